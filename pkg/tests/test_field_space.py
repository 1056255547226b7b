#!/usr/bin/env python3
"""
Tests for F_p^n arithmetic: encoding, spans, affine and line closures.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from algebra.errors import BoundsExceeded, EmptySetError, InvalidPrime, OutOfRange
from algebra.field_space import FieldSpace, check_prime, field_space


class TestEncoding:
    """Index encoding is little-endian base p."""

    def setup_method(self):
        self.space = field_space(3, 2)

    def test_encode_known_vectors(self):
        assert self.space.encode((1, 0)).index == 1
        assert self.space.encode((0, 1)).index == 3
        assert self.space.encode((2, 2)).index == 8

    def test_decode_inverts_encode(self):
        for index in range(self.space.size):
            v = self.space.decode(index)
            assert self.space.encode(v.coords).index == index

    def test_decode_out_of_range(self):
        with pytest.raises(OutOfRange):
            self.space.decode(9)

    def test_encode_rejects_bad_coordinates(self):
        with pytest.raises(OutOfRange):
            self.space.encode((3, 0))
        with pytest.raises(OutOfRange):
            self.space.encode((1, 0, 0))

    def test_arithmetic_tables(self):
        s = self.space
        assert s.add(1, 3) == 4
        assert s.add(2, 1) == 0
        assert s.neg(4) == 8
        assert s.sub(4, 3) == 1
        assert s.scale(2, 4) == 8
        assert s.scale(0, 7) == 0


class TestPrimeChecks:

    def test_two_is_rejected(self):
        with pytest.raises(InvalidPrime):
            check_prime(2)

    def test_composite_is_rejected(self):
        with pytest.raises(InvalidPrime):
            check_prime(9)

    def test_large_prime_is_out_of_bounds(self):
        with pytest.raises(BoundsExceeded):
            check_prime(37)

    def test_space_above_point_bound(self):
        with pytest.raises(BoundsExceeded):
            FieldSpace(3, 6)

    def test_zero_dimension(self):
        with pytest.raises(OutOfRange):
            FieldSpace(3, 0)


class TestSpans:

    def test_span_of_one_vector(self):
        span = field_space(3, 2).span([(1, 0)])
        assert span.members == frozenset({0, 1, 2})
        assert span.dim == 1

    def test_span_of_basis_is_everything(self):
        span = field_space(3, 2).span([(1, 0), (0, 1)])
        assert len(span) == 9
        assert span.dim == 2

    def test_span_of_parallel_vectors(self):
        assert field_space(3, 3).span([(1, 0, 0), (2, 0, 0)]).dim == 1

    def test_span_of_empty_set(self):
        span = field_space(3, 2).span([])
        assert span.members == frozenset({0})
        assert span.dim == 0

    def test_linear_dependence(self):
        space = field_space(3, 3)
        assert not space.is_linearly_independent([(1, 1, 0), (0, 1, 1), (1, 0, 2)])
        assert space.is_linearly_independent([(1, 0, 0), (0, 1, 0), (0, 0, 1)])

    def test_subspace_counts(self):
        space = field_space(3, 2)
        assert len(space.subspaces_of_dim(0)) == 1
        assert len(space.subspaces_of_dim(1)) == 4
        assert len(space.subspaces_of_dim(2)) == 1
        assert len(field_space(3, 3).subspaces_of_dim(2)) == 13

    def test_is_subspace(self):
        space = field_space(3, 2)
        assert space.is_subspace({0, 1, 2})
        assert not space.is_subspace({1, 2})
        assert not space.is_subspace({0, 1, 3})


class TestClosures:

    def test_affine_closure_of_two_points(self):
        closure = field_space(3, 2).affine_closure([(1, 0), (0, 1)])
        assert closure.members == frozenset({1, 3, 8})
        assert closure.dim == 1

    def test_affine_closure_through_zero_is_a_subspace(self):
        closure = field_space(3, 2).affine_closure([(0, 0), (1, 0)])
        assert closure.members == frozenset({0, 1, 2})

    def test_affine_closure_of_empty_set(self):
        with pytest.raises(EmptySetError):
            field_space(3, 2).affine_closure([])

    def test_line_closure_matches_affine_closure_for_two_points(self):
        space = field_space(3, 2)
        line = space.line_closure([(1, 0), (0, 1)])
        assert line.members == space.affine_closure([(1, 0), (0, 1)]).members
        assert line.is_affine_subspace

    def test_line_closure_fills_the_affine_plane(self):
        space = field_space(5, 2)
        closure = space.line_closure([(1, 0), (0, 1), (1, 1)])
        assert len(closure) == 25

    def test_affine_line_has_p_points(self):
        space = field_space(5, 2)
        assert len(space.affine_line(1, 7)) == 5


class TestMaps:

    def test_identity_matrix(self):
        space = field_space(3, 2)
        assert space.linear_map_images(np.eye(2, dtype=np.int64)) == list(range(9))

    def test_matrix_round_trip(self):
        space = field_space(3, 2)
        m = np.array([[1, 2], [0, 1]])
        images = space.linear_map_images(m)
        assert np.array_equal(space.matrix_from_images(images), m)

    def test_translation(self):
        space = field_space(3, 2)
        images = space.translation_images(3)
        assert images[0] == 3
        assert images[1] == 4
