#!/usr/bin/env python3
"""
Tests for permutations, stabiliser chains, orbits and generator files.
"""

import math
import random
import sys
from pathlib import Path

import pytest
from sympy.combinatorics import Permutation

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from algebra.errors import BudgetExceeded, DegreeMismatch, InvalidPartition, ParseError
from algebra.field_space import field_space
from algebra.perm_engine import (
    PermGroup,
    compose,
    contains_group,
    equals,
    fingerprint,
    format_generators,
    generate,
    gl_group,
    gl_order,
    inverse,
    join,
    kernel_of_action,
    orbit,
    orbit_partition,
    parse_generators,
    perm_from_images,
    pointwise_stabilizer,
    read_generator_file,
    setwise_stabilizer,
    sym_fixing_zero,
    sym_group,
    write_generator_file,
)


class TestPermutations:

    def test_composition_is_left_to_right(self):
        g = Permutation([1, 0, 2])
        h = Permutation([0, 2, 1])
        # 0 -> 1 under g, then 1 -> 2 under h
        assert compose(g, h).array_form == [2, 0, 1]

    def test_inverse(self):
        g = Permutation([2, 0, 3, 1])
        assert compose(g, inverse(g)).is_Identity

    def test_degree_mismatch(self):
        with pytest.raises(DegreeMismatch):
            compose(Permutation([1, 0]), Permutation([0, 2, 1]))

    def test_perm_from_images_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            perm_from_images([0, 0, 1])


class TestGroupOrders:

    def test_gl_2_3(self):
        assert gl_group(3, 2).order() == 48
        assert gl_order(3, 2) == 48

    def test_gl_3_3(self):
        assert gl_group(3, 3).order() == 11232

    def test_gl_1_5(self):
        assert gl_group(5, 1).order() == 4

    def test_single_level_chains(self):
        swap = generate([Permutation([1, 0, 2])])
        assert swap.order() == 2
        assert swap.contains(Permutation([1, 0, 2]))
        assert not swap.contains(Permutation([0, 2, 1]))
        assert gl_group(3, 1).order() == 2
        assert gl_group(7, 1).order() == 6

    def test_gl_from_two_generators(self):
        assert len(gl_group(3, 2).generators) == 2

    def test_symmetric_groups(self):
        assert sym_group(9).order() == math.factorial(9)
        assert sym_fixing_zero(9).order() == math.factorial(8)

    def test_order_matches_element_count(self):
        G = gl_group(3, 2)
        elements = {tuple(g.array_form) for g in G.elements()}
        assert len(elements) == G.order()

    def test_element_enumeration_limit(self):
        with pytest.raises(BudgetExceeded):
            list(sym_group(9).elements(limit=1000))

    def test_seed_does_not_change_order(self):
        gens = gl_group(3, 2).generators
        assert generate(gens, seed=1).order() == generate(gens, seed=7).order() == 48


class TestMembership:

    def test_random_elements_are_members(self):
        G = gl_group(3, 2)
        rng = random.Random(0)
        for _ in range(50):
            assert G.random_element(rng) in G

    def test_transposition_not_in_gl(self):
        g = Permutation([0, 3, 2, 1, 4, 5, 6, 7, 8])
        assert not gl_group(3, 2).contains(g)
        assert sym_fixing_zero(9).contains(g)

    def test_containment_between_named_groups(self):
        assert contains_group(sym_fixing_zero(9), gl_group(3, 2))
        assert not contains_group(gl_group(3, 2), sym_fixing_zero(9))

    def test_equals_is_generator_independent(self):
        G = gl_group(3, 2)
        shuffled = generate(list(reversed(G.generators)) + [G.generators[0] * G.generators[1]])
        assert equals(G, shuffled)
        assert fingerprint(G) == fingerprint(shuffled)

    def test_join(self):
        space = field_space(3, 2)
        t = Permutation(space.translation_images(1))
        assert join(gl_group(3, 2), generate([t])).order() == 432


class TestOrbitsAndStabilizers:

    def test_gl_is_transitive_on_nonzero_vectors(self):
        assert orbit(gl_group(3, 2), 1) == frozenset(range(1, 9))

    def test_orbit_partition(self):
        parts = orbit_partition(gl_group(3, 2))
        assert parts == [frozenset({0}), frozenset(range(1, 9))]

    def test_tuple_orbit(self):
        # GL(2,3) is regular on ordered bases
        assert len(orbit(gl_group(3, 2), (1, 3))) == 48

    def test_tuple_orbit_limit(self):
        with pytest.raises(BudgetExceeded):
            orbit(gl_group(3, 2), (1, 3), limit=10)

    def test_pointwise_stabilizer(self):
        G = gl_group(3, 2)
        assert pointwise_stabilizer(G, [1]).order() == 6
        assert pointwise_stabilizer(G, [1, 3]).order() == 1

    def test_setwise_stabilizer(self):
        assert setwise_stabilizer(sym_group(4), {0, 1}).order() == 4

    def test_kernel_on_scalar_classes(self):
        blocks = [[0], [1, 2], [3, 6], [4, 8], [5, 7]]
        kernel = kernel_of_action(gl_group(3, 2), blocks)
        assert kernel.order() == 2

    def test_kernel_of_partition_that_is_not_a_block_system(self):
        # Sym(9) fixing 0 and each pair {v, 2v} setwise
        blocks = [[0], [1, 2], [3, 6], [4, 8], [5, 7]]
        assert kernel_of_action(sym_group(9), blocks).order() == 16

    def test_kernel_rejects_overlapping_blocks(self):
        with pytest.raises(InvalidPartition):
            kernel_of_action(gl_group(3, 2), [[0, 1], [1, 2], list(range(3, 9))])


class TestGeneratorFiles:

    def test_round_trip_through_file(self, tmp_path):
        G = gl_group(3, 2)
        path = tmp_path / "gl.txt"
        write_generator_file(path, 3, 2, G.generators)
        p, n, gens = read_generator_file(path)
        assert (p, n) == (3, 2)
        assert equals(generate(gens, degree=9), G)

    def test_header_and_comments(self):
        text = "# GL(1,3)\n3 1\n0 2 1\n"
        p, n, gens = parse_generators(text)
        assert (p, n) == (3, 1)
        assert gens[0].array_form == [0, 2, 1]

    def test_wrong_length_line(self):
        with pytest.raises(ParseError):
            parse_generators("3 1\n0 1\n")

    def test_not_a_permutation(self):
        with pytest.raises(ParseError):
            parse_generators("3 1\n0 0 1\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            read_generator_file(tmp_path / "absent.txt")

    def test_format(self):
        assert format_generators(3, 1, [Permutation([0, 2, 1])]) == "3 1\n0 2 1\n"

    def test_empty_group_needs_degree(self):
        with pytest.raises(ValueError):
            PermGroup([])
