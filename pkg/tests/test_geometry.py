#!/usr/bin/env python3
"""
Tests for projective/affine geometry: points, lines, reconstruction, AGL and Aut(R).
"""

import random
import sys
from pathlib import Path

import numpy as np
import pytest
from sympy.combinatorics import Permutation

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from algebra.errors import BoundsExceeded, DimensionTooSmall, PreconditionViolated
from algebra.field_space import field_space
from algebra.perm_engine import equals, gl_group, sym_group
from reducts.geometry import (
    ProjPerm,
    agl_group,
    brute_aut_of_R,
    ftag_decompose,
    ftpg_reconstruct,
    is_agl,
    preserves_affine_lines,
    preserves_projective_lines,
    projective_action,
    projective_points,
    projective_space,
    relation_R,
    translation,
    zero_stabilizer_is_gl,
)


def _matrix_perm(space, rows):
    return Permutation(space.linear_map_images(np.array(rows)))


class TestProjectivePoints:

    def test_point_counts(self):
        assert len(projective_points(3, 2)) == 4
        assert len(projective_points(3, 3)) == 13
        assert len(projective_points(5, 2)) == 6

    def test_points_partition_nonzero_vectors(self):
        points = projective_points(3, 3)
        covered = sorted(x for pt in points for x in pt.members)
        assert covered == list(range(1, 27))

    def test_line_count(self):
        assert len(projective_space(3, 3).lines) == 13
        assert len(projective_space(3, 2).lines) == 1


class TestProjectiveAction:

    def setup_method(self):
        self.space = field_space(3, 2)

    def test_scalar_acts_trivially(self):
        q = projective_action(self.space, _matrix_perm(self.space, [[2, 0], [0, 2]]))
        assert q.is_identity()

    def test_coordinate_swap(self):
        q = projective_action(self.space, _matrix_perm(self.space, [[0, 1], [1, 0]]))
        # points are <(1,0)>, <(0,1)>, <(1,1)>, <(1,2)>
        assert q.images == (1, 0, 2, 3)

    def test_moving_zero_is_rejected(self):
        with pytest.raises(PreconditionViolated):
            projective_action(self.space, translation(self.space, 1))

    def test_non_collinear_image_is_rejected(self):
        g = Permutation([0, 3, 2, 1, 4, 5, 6, 7, 8])
        with pytest.raises(PreconditionViolated):
            projective_action(self.space, g)

    def test_gl_preserves_lines(self):
        space = field_space(3, 3)
        rng = random.Random(0)
        G = gl_group(3, 3)
        for _ in range(20):
            assert preserves_projective_lines(space, projective_action(space, G.random_element(rng)))

    def test_point_transposition_breaks_lines(self):
        space = field_space(3, 3)
        images = list(range(13))
        images[0], images[1] = 1, 0
        assert not preserves_projective_lines(space, ProjPerm(tuple(images)))


class TestReconstruction:

    def test_linear_maps_are_reconstructed(self):
        space = field_space(3, 3)
        rng = random.Random(1)
        G = gl_group(3, 3)
        for _ in range(25):
            g = G.random_element(rng)
            q = projective_action(space, g)
            rebuilt = ftpg_reconstruct(space, q)
            assert rebuilt is not None
            assert projective_action(space, rebuilt) == q
            assert G.contains(rebuilt)

    def test_rejected_permutation(self):
        space = field_space(3, 3)
        images = list(range(13))
        images[2], images[5] = 5, 2
        assert ftpg_reconstruct(space, ProjPerm(tuple(images))) is None

    def test_small_dimension(self):
        space = field_space(3, 2)
        with pytest.raises(DimensionTooSmall):
            ftpg_reconstruct(space, ProjPerm((0, 1, 2, 3)))

    def test_affine_decomposition(self):
        space = field_space(3, 2)
        phi = _matrix_perm(space, [[0, 1], [1, 0]])
        g = phi * translation(space, 4)
        t, linear = ftag_decompose(space, g)
        assert t.index == 4
        assert linear == phi

    def test_affine_decomposition_rejects_non_affine(self):
        space = field_space(3, 2)
        g = Permutation([0, 2, 1, 3, 4, 5, 6, 7, 8])
        assert not preserves_affine_lines(space, g)
        assert ftag_decompose(space, g) is None

    def test_agl_elements_preserve_affine_lines(self):
        space = field_space(3, 2)
        rng = random.Random(2)
        G = agl_group(3, 2)
        for _ in range(20):
            assert ftag_decompose(space, G.random_element(rng)) is not None


class TestAffineGroup:

    def test_agl_order(self):
        assert agl_group(3, 2).order() == 432
        assert agl_group(3, 1).order() == 6

    def test_zero_stabilizer(self):
        assert zero_stabilizer_is_gl(3, 2)

    def test_agl_1_3_is_sym_3(self):
        assert equals(agl_group(3, 1), sym_group(3))

    def test_relation_size(self):
        assert len(relation_R(field_space(3, 2))) == 9 ** 3

    def test_brute_force_on_three_points(self):
        group, survivors = brute_aut_of_R(3, 1)
        assert survivors == 6
        assert is_agl(3, 1, group)

    def test_brute_force_on_five_points(self):
        group, survivors = brute_aut_of_R(5, 1)
        assert survivors == 20
        assert is_agl(5, 1, group)

    @pytest.mark.slow
    def test_brute_force_on_nine_points(self):
        group, survivors = brute_aut_of_R(3, 2, workers=2)
        assert survivors == 432
        assert is_agl(3, 2, group)

    def test_brute_force_bound(self):
        with pytest.raises(BoundsExceeded):
            brute_aut_of_R(3, 3)
