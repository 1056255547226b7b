#!/usr/bin/env python3
"""
Projective and affine geometry of F_p^n.

Covers projective points and lines, the line-preservation tests, constructive
versions of the fundamental theorems of projective and affine geometry, the
affine group, and the relation R = {(a, b, c, d) : a + b = c + d} whose
automorphism group is AGL(V).
"""

import functools
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np
from sympy.combinatorics import Permutation

from algebra.errors import BoundsExceeded, DimensionTooSmall, InternalCheckError, PreconditionViolated
from algebra.field_space import FieldSpace, Vector, field_space
from algebra.perm_engine import (
    Perm,
    PermGroup,
    equals,
    generate,
    gl_group,
    gl_order,
    join,
    pointwise_stabilizer,
)

logger = logging.getLogger(__name__)

MAX_BRUTE_R_POINTS = 9


@dataclass(frozen=True)
class ProjPoint:
    """A one-dimensional subspace, stored as its canonical representative and nonzero members."""

    rep: int
    members: FrozenSet[int]


@dataclass(frozen=True)
class ProjPerm:
    """A permutation of the projective points, indexed in canonical order."""

    images: Tuple[int, ...]

    def __mul__(self, other: "ProjPerm") -> "ProjPerm":
        return ProjPerm(tuple(other.images[x] for x in self.images))

    def __invert__(self) -> "ProjPerm":
        inv = [0] * len(self.images)
        for i, x in enumerate(self.images):
            inv[x] = i
        return ProjPerm(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))


class ProjectiveSpace:
    """Points and lines of the projective space of F_p^n."""

    def __init__(self, space: FieldSpace):
        self.space = space
        self.points: List[ProjPoint] = []
        self.point_of: Dict[int, int] = {}
        for index in range(1, space.size):
            coords = space.coords(index)
            leading = next(c for c in coords if c != 0)
            if leading != 1:
                continue
            members = frozenset(space.scale(lam, index) for lam in range(1, space.p))
            for m in members:
                self.point_of[m] = len(self.points)
            self.points.append(ProjPoint(index, members))

        lines: Set[FrozenSet[int]] = set()
        for a, b in itertools.combinations(range(len(self.points)), 2):
            plane = space.span([self.points[a].rep, self.points[b].rep]).members
            lines.add(frozenset(self.point_of[x] for x in plane if x != 0))
        self.lines: List[FrozenSet[int]] = sorted(lines, key=sorted)
        self.line_set: FrozenSet[FrozenSet[int]] = frozenset(lines)
        self._member_sets = {pt.members: i for i, pt in enumerate(self.points)}

    def __len__(self) -> int:
        return len(self.points)

    def point_with_members(self, members: FrozenSet[int]) -> Optional[int]:
        return self._member_sets.get(members)


@functools.lru_cache(maxsize=None)
def projective_space(p: int, n: int) -> ProjectiveSpace:
    return ProjectiveSpace(field_space(p, n))


def projective_points(p: int, n: int) -> List[ProjPoint]:
    """All (p^n - 1)/(p - 1) points, ordered by representative index."""
    return list(projective_space(p, n).points)


def projective_action(space: FieldSpace, g: Perm) -> ProjPerm:
    """The permutation g induces on one-dimensional subspaces."""
    images = g.array_form
    if images[0] != 0:
        raise PreconditionViolated("permutation moves the zero vector")
    proj = projective_space(space.p, space.n)
    action = []
    for pt in proj.points:
        target = proj.point_with_members(frozenset(images[m] for m in pt.members))
        if target is None:
            raise PreconditionViolated(
                f"image of the line through {pt.rep} is not a line",
                {"rep": pt.rep})
        action.append(target)
    return ProjPerm(tuple(action))


def preserves_projective_lines(space: FieldSpace, q: ProjPerm) -> bool:
    """True iff every projective line is mapped onto a projective line."""
    proj = projective_space(space.p, space.n)
    for line in proj.lines:
        if frozenset(q.images[x] for x in line) not in proj.line_set:
            return False
    return True


def _coefficients_in_span(space: FieldSpace, columns: Sequence[int], target: int) -> Optional[List[int]]:
    """Solve target = sum c_i columns_i over F_p; None if no solution."""
    gf = space.GF
    matrix = np.array([space.coords(c) for c in columns] + [space.coords(target)], dtype=np.int64).T
    reduced = gf(matrix).row_reduce().view(np.ndarray).astype(np.int64)
    k = len(columns)
    solution = [0] * k
    for row in reduced:
        nonzero = np.flatnonzero(row[:k])
        if len(nonzero) == 0:
            if row[k] != 0:
                return None
            continue
        solution[int(nonzero[0])] = int(row[k])
    return solution


def ftpg_reconstruct(space: FieldSpace, q: ProjPerm) -> Optional[Perm]:
    """A linear map inducing q, or None when q does not preserve projective lines.

    The image of e_1 is the canonical representative of q(<e_1>); for i >= 2 the
    image of e_i is the multiple of a representative of q(<e_i>) that makes
    e_1 + e_i land on q(<e_1 + e_i>). The candidate is checked on every point.
    """
    if space.n < 3:
        raise DimensionTooSmall(f"projective reconstruction needs n >= 3, got n={space.n}")
    if not preserves_projective_lines(space, q):
        return None
    proj = projective_space(space.p, space.n)
    e = [space.basis_vector(i) for i in range(space.n)]
    images = [proj.points[q.images[proj.point_of[e[0]]]].rep]
    for i in range(1, space.n):
        r_i = proj.points[q.images[proj.point_of[e[i]]]].rep
        w = proj.points[q.images[proj.point_of[space.add(e[0], e[i])]]].rep
        coeffs = _coefficients_in_span(space, [images[0], r_i], w)
        if coeffs is None or coeffs[0] == 0 or coeffs[1] == 0:
            logger.debug(f"ftpg: q(<e_1 + e_{i + 1}>) is off the expected line")
            return None
        ratio = coeffs[1] * space.inverse_scalar(coeffs[0]) % space.p
        images.append(space.scale(ratio, r_i))
    matrix = np.array([space.coords(v) for v in images], dtype=np.int64).T
    if int(np.linalg.det(space.GF(matrix))) == 0:
        return None
    candidate = Permutation(space.linear_map_images(matrix))
    if projective_action(space, candidate) != q:
        logger.debug("ftpg: candidate disagrees with q on some point")
        return None
    return candidate


def affine_lines(space: FieldSpace) -> List[FrozenSet[int]]:
    """Every affine line of V, each listed once."""
    return list(_affine_lines(space.p, space.n))


@functools.lru_cache(maxsize=None)
def _affine_lines(p: int, n: int) -> Tuple[FrozenSet[int], ...]:
    space = field_space(p, n)
    seen: Set[FrozenSet[int]] = set()
    for v, w in itertools.combinations(range(space.size), 2):
        seen.add(space.affine_line(v, w))
    return tuple(sorted(seen, key=sorted))


def preserves_affine_lines(space: FieldSpace, g: Perm) -> bool:
    images = g.array_form
    for line in _affine_lines(space.p, space.n):
        mapped = [images[x] for x in line]
        if space.affine_line(mapped[0], mapped[1]) != frozenset(mapped):
            return False
    return True


def translation(space: FieldSpace, t) -> Perm:
    return Permutation(space.translation_images(t))


def ftag_decompose(space: FieldSpace, g: Perm) -> Optional[Tuple[Vector, Perm]]:
    """Split an affine-line-preserving g as (t, phi) with g = phi followed by translation by t."""
    if not preserves_affine_lines(space, g):
        return None
    images = g.array_form
    t = images[0]
    linear = [space.sub(x, t) for x in images]
    matrix = space.matrix_from_images(linear)
    if int(np.linalg.det(space.GF(matrix))) == 0:
        return None
    phi = Permutation(space.linear_map_images(matrix))
    if phi.array_form != linear:
        logger.debug("ftag: the zero-fixing part is not linear")
        return None
    if (phi * translation(space, t)).array_form != images:
        raise InternalCheckError("affine decomposition does not recompose")
    return space.decode(t), phi


@functools.lru_cache(maxsize=None)
def agl_group(p: int, n: int) -> PermGroup:
    """AGL(V): GL(V) together with one translation."""
    space = field_space(p, n)
    group = join(gl_group(p, n), generate([translation(space, space.basis_vector(0))]))
    expected = space.size * gl_order(p, n)
    if group.order() != expected:
        raise InternalCheckError(f"AGL({n},{p}) has order {group.order()}, expected {expected}")
    return group


def relation_R(space: FieldSpace) -> FrozenSet[Tuple[int, int, int, int]]:
    """All (a, b, c, d) with a + b = c + d."""
    return frozenset(
        (a, b, c, space.sub(space.add(a, b), c))
        for a in range(space.size) for b in range(space.size) for c in range(space.size)
    )


def _r_triples(space: FieldSpace) -> np.ndarray:
    size = space.size
    a, b, c = np.meshgrid(np.arange(size), np.arange(size), np.arange(size), indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    d = space.add_table[space.add_table[a, b], space.scale_table[space.p - 1][c]]
    return np.stack([a, b, c, d])


def _filter_r_preserving(args) -> List[Tuple[int, ...]]:
    p, n, start, stop, chunk = args
    space = field_space(p, n)
    a, b, c, d = _r_triples(space)
    add = space.add_table
    survivors = []
    perms = itertools.islice(itertools.permutations(range(space.size)), start, stop)
    while True:
        block = np.array(list(itertools.islice(perms, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        lhs = add[block[:, a], block[:, b]]
        rhs = add[block[:, c], block[:, d]]
        keep = np.all(lhs == rhs, axis=1)
        survivors.extend(tuple(row) for row in block[keep].tolist())
    return survivors


def brute_aut_of_R(p: int, n: int, workers: int = 1, chunk: int = 4096) -> Tuple[PermGroup, int]:
    """Filter all of Sym(p^n) for R-preservation; returns the group and the survivor count."""
    space = field_space(p, n)
    if space.size > MAX_BRUTE_R_POINTS:
        raise BoundsExceeded(f"brute force over Sym({space.size}) is limited to {MAX_BRUTE_R_POINTS} points")
    total = math.factorial(space.size)
    workers = max(1, workers)
    step = -(-total // workers)
    ranges = [(p, n, lo, min(lo + step, total), chunk) for lo in range(0, total, step)]
    if workers == 1:
        parts = [_filter_r_preserving(r) for r in ranges]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_filter_r_preserving, ranges))
    survivors = [s for part in parts for s in part]
    logger.info(f"Aut(R) filter over Sym({space.size}): {len(survivors)} permutations preserve R")
    group = generate([Permutation(list(s)) for s in survivors], degree=space.size)
    return group, len(survivors)


def is_agl(p: int, n: int, G: PermGroup) -> bool:
    return equals(G, agl_group(p, n))


def zero_stabilizer_is_gl(p: int, n: int) -> bool:
    return equals(pointwise_stabilizer(agl_group(p, n), [0]), gl_group(p, n))
