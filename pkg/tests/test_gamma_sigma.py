#!/usr/bin/env python3
"""
Tests for Gamma subgroups, class partitions, labellings and sigma.
"""

import math
import random
import sys
from pathlib import Path

import numpy as np
import pytest
from sympy.combinatorics import Permutation

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from algebra.errors import MissingAutV, NotClassCompatible, OutOfRange, ParseError, PreconditionViolated
from algebra.field_space import field_space
from algebra.perm_engine import PermGroup, gl_group, sym_fixing_zero
from reducts.gamma_sigma import (
    GammaSubgroup,
    Labelling,
    SigmaPerm,
    compute_gamma,
    full_gamma,
    gamma_subgroups,
    global_label_action,
    is_class_fixing,
    is_label_preserving,
    lift_on_class,
    make_labelling,
    sigma,
    sim_classes,
    sym_f_group,
    trivial_gamma,
)
from reducts.geometry import agl_group


def _scalar(space, lam):
    return Permutation(space.linear_map_images(lam * np.eye(space.n, dtype=np.int64)))


class TestGammaSubgroups:

    def test_subgroups_of_f3(self):
        assert [g.elements for g in gamma_subgroups(3)] == [(1,), (1, 2)]

    def test_subgroups_of_f7(self):
        found = [g.elements for g in gamma_subgroups(7)]
        assert found == [(1,), (1, 6), (1, 2, 4), (1, 2, 3, 4, 5, 6)]

    def test_not_a_group(self):
        with pytest.raises(ValueError):
            GammaSubgroup(7, (1, 2))

    def test_mult_is_a_permutation(self):
        gamma = full_gamma(5)
        assert gamma.mult(2).images == (2, 4, 1, 3)
        assert (gamma.mult(2) * gamma.mult(3)).is_identity()


class TestClassPartition:

    def test_full_gamma_pairs_opposite_vectors(self):
        part = sim_classes(3, 2, full_gamma(3))
        assert part.zero_class == frozenset({0})
        assert part.num_nonzero == 4
        assert all(len(c) == 2 for c in part.nonzero_classes)
        assert part.class_containing(1) == frozenset({1, 2})

    def test_thirteen_classes_in_dimension_three(self):
        part = sim_classes(3, 3, full_gamma(3))
        assert part.num_nonzero == 13

    def test_trivial_gamma_gives_singletons(self):
        part = sim_classes(3, 2, trivial_gamma(3))
        assert part.num_nonzero == 8


class TestLabelling:

    def setup_method(self):
        self.part = sim_classes(3, 2, full_gamma(3))
        self.f = make_labelling(self.part)

    def test_least_index_gets_label_one(self):
        assert self.f(1) == 1
        assert self.f(2) == 2

    def test_equivariant(self):
        assert self.f.is_equivariant()

    def test_zero_has_no_label(self):
        with pytest.raises(OutOfRange):
            self.f(0)

    def test_json_round_trip(self):
        again = Labelling.from_json(self.f.to_json(), 3, 2)
        assert again.labels == self.f.labels

    def test_json_missing_vector(self):
        data = self.f.to_json()
        del data["4"]
        with pytest.raises(ParseError):
            Labelling.from_json(data, 3, 2)

    def test_json_not_equivariant(self):
        data = self.f.to_json()
        data["1"], data["2"] = 1, 1
        with pytest.raises(ParseError):
            Labelling.from_json(data, 3, 2)

    def test_chosen_representatives(self):
        f = make_labelling(self.part, representatives=[2, 6, 8, 7])
        assert f(2) == 1
        assert f(1) == 2
        assert f.is_equivariant()


class TestSigma:

    def setup_method(self):
        self.space = field_space(3, 2)
        self.f = make_labelling(sim_classes(3, 2, full_gamma(3)))

    def test_scalar_swaps_labels_everywhere(self):
        g = _scalar(self.space, 2)
        for v in range(1, 9):
            assert sigma(self.f, g, v).images == (2, 1)

    def test_identity(self):
        g = Permutation(list(range(9)))
        assert sigma(self.f, g, 4).is_identity()

    def test_zero_vector(self):
        with pytest.raises(OutOfRange):
            sigma(self.f, _scalar(self.space, 2), 0)

    def test_not_class_compatible(self):
        g = Permutation([0, 3, 2, 1, 4, 5, 6, 7, 8])
        with pytest.raises(NotClassCompatible):
            sigma(self.f, g, 1)

    def test_composition_law(self):
        G = gl_group(3, 2)
        rng = random.Random(0)
        for _ in range(30):
            g, h = G.random_element(rng), G.random_element(rng)
            for v in range(1, 9):
                lhs = sigma(self.f, g * h, v)
                rhs = sigma(self.f, g, v) * sigma(self.f, h, g.array_form[v])
                assert lhs == rhs

    def test_inverse_law(self):
        G = gl_group(3, 2)
        rng = random.Random(1)
        for _ in range(30):
            g = G.random_element(rng)
            for v in range(1, 9):
                assert sigma(self.f, ~g, g.array_form[v]) == ~sigma(self.f, g, v)

    def test_lift_on_class(self):
        swap = SigmaPerm((1, 2), (2, 1))
        lifted = lift_on_class(self.f, 1, swap)
        assert lifted.array_form == [0, 2, 1, 3, 4, 5, 6, 7, 8]
        assert is_class_fixing(self.f.partition, lifted)

    def test_global_label_action_is_the_scalar(self):
        swap = SigmaPerm((1, 2), (2, 1))
        assert global_label_action(self.f, swap) == _scalar(self.space, 2)


class TestSymF:

    def test_order_with_full_gamma(self):
        f = make_labelling(sim_classes(3, 2, full_gamma(3)))
        assert sym_f_group(f).order() == 24

    def test_order_with_trivial_gamma(self):
        f = make_labelling(sim_classes(3, 2, trivial_gamma(3)))
        assert sym_f_group(f).order() == 40320

    def test_order_in_dimension_three(self):
        f = make_labelling(sim_classes(3, 3, full_gamma(3)))
        assert sym_f_group(f).order() == math.factorial(13)

    def test_generators_preserve_labels(self):
        f = make_labelling(sim_classes(3, 2, full_gamma(3)))
        for g in sym_f_group(f).generators:
            assert is_label_preserving(f, g)


class TestComputeGamma:

    def test_gl_has_full_gamma(self):
        assert compute_gamma(gl_group(3, 2)).elements == (1, 2)

    def test_gl_1_7_has_full_gamma(self):
        assert compute_gamma(gl_group(7, 1)).elements == (1, 2, 3, 4, 5, 6)

    def test_sym_fixing_zero_has_trivial_gamma(self):
        assert compute_gamma(sym_fixing_zero(9)).elements == (1,)

    def test_group_moving_zero(self):
        with pytest.raises(PreconditionViolated):
            compute_gamma(agl_group(3, 2))

    def test_missing_gl(self):
        with pytest.raises(MissingAutV):
            compute_gamma(PermGroup([], degree=9))
