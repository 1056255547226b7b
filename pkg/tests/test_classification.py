#!/usr/bin/env python3
"""
Tests for G(N, H), classification records, the catalog, A_k(S) and acl.
"""

import itertools
import json
import random
import sys
from pathlib import Path

import numpy as np
import pytest
from sympy.combinatorics import Permutation

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from algebra.errors import (
    BoundsExceeded,
    BudgetExceeded,
    DegenerateSpan,
    MissingAutV,
    NotNormal,
    OutOfRange,
)
from algebra.field_space import field_space
from algebra.perm_engine import PermGroup, equals, generate, gl_group, join, sym_fixing_zero, sym_group
from reducts.classification import (
    CASE_AGL,
    CASE_FIX0_AUT,
    CASE_FIX0_SYMF,
    CASE_SYM,
    SHAPE_EMPTY,
    SHAPE_FULL,
    SHAPE_SUBSPACE_IMAGE,
    SigmaGroup,
    a_k_set,
    acl_pair,
    build_G_NH,
    catalog,
    classify,
    extract_NH,
    g_nh_order,
    g_star,
    in_G_NH,
    normal_pairs,
    subgroups_of_sym,
)
from reducts.gamma_sigma import SigmaPerm, full_gamma, gamma_subgroups, make_labelling, sim_classes, sym_f_group
from reducts.geometry import agl_group


def _full_labelling(p, n):
    part = sim_classes(p, n, full_gamma(p))
    return part, make_labelling(part)


def _z2():
    return SigmaGroup.symmetric((1, 2))


def _trivial2():
    return SigmaGroup.trivial((1, 2))


class TestSigmaGroups:

    def test_subgroup_counts(self):
        assert len(subgroups_of_sym((1, 2))) == 2
        assert len(subgroups_of_sym((1, 2, 4))) == 6
        assert len(subgroups_of_sym((1, 2, 3, 4))) == 30

    def test_normal_pair_counts(self):
        assert len(normal_pairs((1, 2))) == 3
        assert len(normal_pairs((1, 2, 4))) == 12

    def test_degree_bound(self):
        with pytest.raises(BoundsExceeded):
            subgroups_of_sym((1, 2, 3, 4, 5))

    def test_generators_regenerate(self):
        for H in subgroups_of_sym((1, 2, 3, 4)):
            assert SigmaGroup.closure(H.domain, H.generators()) == H

    def test_json_round_trip(self):
        S3 = SigmaGroup.symmetric((1, 2, 4))
        assert SigmaGroup.from_json((1, 2, 4), S3.to_json()) == S3

    def test_from_json_rejects_non_group(self):
        with pytest.raises(ValueError):
            SigmaGroup.from_json((1, 2, 4), [[2, 1, 4]])


class TestGNH:

    def test_order_formula(self):
        assert g_nh_order(_trivial2(), _z2(), 4) == 2
        assert g_nh_order(_z2(), _z2(), 4) == 16

    def test_global_flip_group(self):
        part, f = _full_labelling(3, 2)
        group = build_G_NH(_trivial2(), _z2(), part, f)
        assert group.order() == 2
        minus_one = Permutation(field_space(3, 2).linear_map_images(2 * np.eye(2, dtype=np.int64)))
        assert group.contains(minus_one)

    def test_independent_flips(self):
        part, f = _full_labelling(3, 2)
        assert build_G_NH(_z2(), _z2(), part, f).order() == 16

    def test_not_normal(self):
        part = sim_classes(7, 1, next(g for g in gamma_subgroups(7) if g.order == 3))
        f = make_labelling(part)
        domain = part.gamma.elements
        transposition = SigmaPerm(domain, (domain[1], domain[0], domain[2]))
        N = SigmaGroup.closure(domain, [transposition])
        H = SigmaGroup.symmetric(domain)
        with pytest.raises(NotNormal):
            build_G_NH(N, H, part, f)

    def test_membership_matches_definition_exhaustively(self):
        # every class-fixing permutation at p=3, n=2 is a choice of flip per class
        part, f = _full_labelling(3, 2)
        N, H = _trivial2(), _z2()
        group = build_G_NH(N, H, part, f)
        members = 0
        for flips in itertools.product([False, True], repeat=part.num_nonzero):
            images = list(range(9))
            for flip, members_of_class in zip(flips, part.nonzero_classes):
                if flip:
                    a, b = sorted(members_of_class)
                    images[a], images[b] = b, a
            g = Permutation(images)
            assert in_G_NH(f, g, N, H) == group.contains(g)
            members += in_G_NH(f, g, N, H)
        assert members == 2

    def test_random_members_satisfy_definition(self):
        part, f = _full_labelling(3, 2)
        group = build_G_NH(_z2(), _z2(), part, f)
        rng = random.Random(0)
        for _ in range(50):
            assert in_G_NH(f, group.random_element(rng), _z2(), _z2())


class TestExtraction:

    def test_minus_one(self):
        part, f = _full_labelling(3, 2)
        minus_one = Permutation(field_space(3, 2).linear_map_images(2 * np.eye(2, dtype=np.int64)))
        N, H = extract_NH(generate([minus_one]), f)
        assert H == _z2()
        assert N == _trivial2()

    def test_g_star_of_gl_is_scalars(self):
        part, f = _full_labelling(3, 2)
        assert g_star(gl_group(3, 2), part).order() == 2

    def test_round_trip_through_extraction(self):
        part, f = _full_labelling(3, 2)
        gnh = build_G_NH(_z2(), _z2(), part, f)
        N, H = extract_NH(gnh, f)
        assert (N, H) == (_z2(), _z2())


class TestClassify:

    def test_gl(self):
        record = classify(gl_group(3, 2))
        assert record.case == CASE_FIX0_AUT
        assert record.gamma == (1, 2)
        assert record.N.order == 1
        assert record.H.order == 2
        assert record.round_trip_ok
        assert record.preserves_lines is True

    def test_sym_fixing_zero(self):
        record = classify(sym_fixing_zero(9))
        assert record.case == CASE_FIX0_SYMF
        assert record.gamma == (1,)
        assert record.preserves_lines is None
        assert record.round_trip_ok

    def test_gl_with_per_class_flips(self):
        part, f = _full_labelling(3, 2)
        G = join(build_G_NH(_z2(), _z2(), part, f), gl_group(3, 2))
        assert 48 < G.order() < 40320
        assert G.fixes_point(0)
        record = classify(G)
        assert record.case == CASE_FIX0_AUT
        assert (record.N, record.H) == (_z2(), _z2())
        assert record.round_trip_ok

    def test_sym_f_with_gl_in_dimension_two(self):
        # line preservation is vacuous for n = 2
        part, f = _full_labelling(5, 2)
        G = join(sym_f_group(f, part), gl_group(5, 2))
        record = classify(G)
        assert record.case == CASE_FIX0_SYMF
        assert record.round_trip_ok

    def test_groups_moving_zero(self):
        assert classify(agl_group(3, 2)).case == CASE_AGL
        assert classify(sym_group(9)).case == CASE_SYM
        assert classify(sym_group(9)).fixes_zero is False

    def test_missing_gl(self):
        with pytest.raises(MissingAutV):
            classify(PermGroup([], degree=9))

    def test_record_json(self):
        data = classify(sym_group(9)).to_json()
        assert data["order"] == "362880"
        assert data["preserves_lines"] == "n/a"
        json.dumps(data)


class TestCatalog:

    def test_catalog_in_dimension_one(self):
        entries = catalog(3, 1)
        assert [e.group.order() for e in entries] == [2, 6]
        assert all(e.record.round_trip_ok for e in entries)

    def test_catalog_landmarks(self):
        entries = catalog(3, 2)
        orders = {e.group.order() for e in entries}
        assert {48, 432, 40320, 362880} <= orders
        assert any(48 < order < 40320 for order in orders)
        for i, a in enumerate(entries):
            for b in entries[i + 1:]:
                assert not equals(a.group, b.group)

    def test_catalog_bound(self):
        with pytest.raises(BoundsExceeded):
            catalog(3, 4)

    def test_catalog_refuses_large_gamma(self):
        with pytest.raises(BoundsExceeded):
            catalog(7, 1)

    @pytest.mark.slow
    def test_round_trip_in_dimension_two(self):
        entries = catalog(3, 2)
        assert all(e.record.round_trip_ok for e in entries)
        assert all(e.record.case != "UNCLASSIFIED" for e in entries)

    @pytest.mark.slow
    def test_round_trip_in_dimension_three(self):
        entries = catalog(3, 3)
        assert all(e.record.round_trip_ok for e in entries)
        orders = {e.group.order() for e in entries}
        assert {11232, 303264} <= orders

    def test_catalog_is_deterministic(self):
        first = [e.to_json() for e in catalog(3, 1)]
        second = [e.to_json() for e in catalog(3, 1)]
        assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


class TestAkSets:

    def test_subspace_image(self):
        result = a_k_set(gl_group(3, 2), [1], 1)
        assert result.shape == SHAPE_SUBSPACE_IMAGE
        assert result.members == frozenset({0, 1, 2})
        assert frozenset(result.witness[x] for x in result.members) == result.subspace

    def test_empty(self):
        result = a_k_set(gl_group(3, 2), [1, 3], 1)
        assert result.shape == SHAPE_EMPTY
        assert not result.members

    def test_full_when_k_is_n(self):
        assert a_k_set(gl_group(3, 2), [1], 2).shape == SHAPE_FULL

    def test_full_for_sym_fixing_zero(self):
        assert a_k_set(sym_fixing_zero(9), [1], 1).shape == SHAPE_FULL

    def test_bad_arguments(self):
        with pytest.raises(OutOfRange):
            a_k_set(gl_group(3, 2), [1], 0)
        with pytest.raises(OutOfRange):
            a_k_set(gl_group(3, 2), [0], 1)

    def test_orbit_budget(self):
        with pytest.raises(BudgetExceeded):
            a_k_set(gl_group(3, 2), [1], 1, limit=3)

    def test_kandn_report(self):
        kandn = a_k_set(gl_group(3, 2), [1], 1).kandn
        assert kandn["bound"] == 0
        assert kandn["holds"] is False
        assert kandn["classes_in_S"] == 1


class TestAcl:

    def test_acl_is_the_affine_line_for_agl(self):
        space = field_space(3, 3)
        assert acl_pair(agl_group(3, 3), 1, 3, space) == space.affine_line(1, 3)

    def test_acl_is_the_span_for_gl(self):
        space = field_space(3, 3)
        assert acl_pair(gl_group(3, 3), 1, 3, space) == space.span([1, 3]).members

    def test_exchange(self):
        space = field_space(3, 3)
        G = agl_group(3, 3)
        closure = acl_pair(G, 1, 3, space)
        x, y = sorted(closure)[1:]
        assert acl_pair(G, x, y, space) == closure

    def test_equal_points(self):
        with pytest.raises(OutOfRange):
            acl_pair(agl_group(3, 3), 1, 1)

    def test_span_is_everything(self):
        with pytest.raises(DegenerateSpan):
            acl_pair(agl_group(3, 2), 1, 3)
