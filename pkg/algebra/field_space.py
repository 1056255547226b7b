#!/usr/bin/env python3
"""
Arithmetic in V = F_p^n.

Vectors are identified with integers in [0, p^n) by little-endian base-p
encoding: coords[0] is the least significant digit and the zero vector is 0.
A FieldSpace materialises the coordinate, addition and scalar tables once, so
the hot loops elsewhere only ever index lists.
"""

import functools
import itertools
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import galois
import numpy as np

from algebra.errors import BoundsExceeded, EmptySetError, InvalidPrime, OutOfRange

logger = logging.getLogger(__name__)

DEFAULT_MAX_PRIME = 31
DEFAULT_MAX_POINTS = 243


@dataclass(frozen=True)
class Vector:
    """A vector of F_p^n together with its canonical index."""

    index: int
    coords: Tuple[int, ...]

    def __int__(self) -> int:
        return self.index


@dataclass(frozen=True)
class Subspace:
    """A linear subspace: echelon basis plus the full member set."""

    basis: Tuple[Vector, ...]
    members: FrozenSet[int]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, v) -> bool:
        return int(v) in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class AffineSet:
    """An explicit point set; `is_affine_subspace` marks translates of subspaces."""

    members: FrozenSet[int]
    is_affine_subspace: bool = True
    dim: Optional[int] = None

    def __contains__(self, v) -> bool:
        return int(v) in self.members

    def __len__(self) -> int:
        return len(self.members)


VectorLike = Union[int, Vector, Sequence[int]]


def check_prime(p: int, max_prime: int = DEFAULT_MAX_PRIME) -> int:
    """Validate the field characteristic: an odd prime no larger than `max_prime`."""
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise InvalidPrime(f"p must be an odd prime, got {p!r}")
    p = int(p)
    if p == 2:
        raise InvalidPrime("p must be odd; F_2 is excluded")
    if not galois.is_prime(p):
        raise InvalidPrime(f"p must be prime, got {p}")
    if p > max_prime:
        raise BoundsExceeded(f"p={p} exceeds the configured bound {max_prime}",
                             {"p": p, "max_prime": max_prime})
    return p


class FieldSpace:
    """The vector space F_p^n with index-encoded vectors."""

    def __init__(self, p: int, n: int,
                 max_points: int = DEFAULT_MAX_POINTS,
                 max_prime: int = DEFAULT_MAX_PRIME):
        self.p = check_prime(p, max_prime)
        if n < 1:
            raise OutOfRange(f"n must be at least 1, got {n}")
        self.n = int(n)
        self.size = self.p ** self.n
        if self.size > max_points:
            raise BoundsExceeded(
                f"p^n = {self.size} exceeds the configured bound {max_points}",
                {"p": self.p, "n": self.n, "max_points": max_points})

        self.max_points = max_points
        self.max_prime = max_prime
        self.GF = galois.GF(self.p)
        self.weights = self.p ** np.arange(self.n, dtype=np.int64)

        indices = np.arange(self.size, dtype=np.int64)
        self.coords_table = (indices[:, None] // self.weights[None, :]) % self.p
        self.add_table = self._encode_rows(
            (self.coords_table[:, None, :] + self.coords_table[None, :, :]) % self.p)
        scalars = np.arange(self.p, dtype=np.int64)
        self.scale_table = self._encode_rows(
            (scalars[:, None, None] * self.coords_table[None, :, :]) % self.p)

        # list copies for scalar indexing in Python loops
        self._coords = [tuple(int(c) for c in row) for row in self.coords_table]
        self._add = self.add_table.tolist()
        self._scale = self.scale_table.tolist()
        self._neg = self._scale[self.p - 1]

        logger.debug(f"FieldSpace(p={self.p}, n={self.n}) with {self.size} points")

    def __repr__(self) -> str:
        return f"FieldSpace(p={self.p}, n={self.n})"

    def __reduce__(self):
        return (FieldSpace, (self.p, self.n, self.max_points, self.max_prime))

    def _encode_rows(self, coords: np.ndarray) -> np.ndarray:
        return coords @ self.weights

    # -- encoding ------------------------------------------------------------

    def encode(self, coords: Sequence[int]) -> Vector:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.n:
            raise OutOfRange(f"expected {self.n} coordinates, got {len(coords)}")
        for c in coords:
            if not 0 <= c < self.p:
                raise OutOfRange(f"coordinate {c} outside [0, {self.p})")
        index = sum(c * self.p ** i for i, c in enumerate(coords))
        return Vector(index, coords)

    def decode(self, index: int) -> Vector:
        index = int(index)
        if not 0 <= index < self.size:
            raise OutOfRange(f"index {index} outside [0, {self.size})")
        return Vector(index, self._coords[index])

    def index_of(self, v: VectorLike) -> int:
        if isinstance(v, Vector):
            return v.index
        if isinstance(v, (int, np.integer)):
            return self.decode(v).index
        return self.encode(v).index

    def indices(self, vectors: Iterable[VectorLike]) -> List[int]:
        return [self.index_of(v) for v in vectors]

    def basis_vector(self, i: int) -> int:
        return self.p ** i

    # -- arithmetic on indices -----------------------------------------------

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def scale(self, lam: int, a: int) -> int:
        return self._scale[lam % self.p][a]

    def coords(self, a: int) -> Tuple[int, ...]:
        return self._coords[a]

    def inverse_scalar(self, lam: int) -> int:
        return pow(int(lam) % self.p, -1, self.p)

    # -- linear algebra --------------------------------------------------------

    def field_matrix(self, vectors: Iterable[VectorLike]):
        rows = [self._coords[self.index_of(v)] for v in vectors]
        return self.GF(np.array(rows, dtype=np.int64).reshape(len(rows), self.n))

    def rank(self, vectors: Iterable[VectorLike]) -> int:
        vectors = list(vectors)
        if not vectors:
            return 0
        return int(np.linalg.matrix_rank(self.field_matrix(vectors)))

    def _closure_of_basis(self, basis: Sequence[int]) -> FrozenSet[int]:
        members = {0}
        for b in basis:
            multiples = [self._scale[c][b] for c in range(self.p)]
            members = {self._add[m][x] for m in members for x in multiples}
        return frozenset(members)

    def span(self, vectors: Iterable[VectorLike]) -> Subspace:
        """Linear closure <S>; span of the empty set is {0}."""
        idx = [i for i in self.indices(vectors) if i != 0]
        if not idx:
            return Subspace((), frozenset({0}))
        reduced = self.field_matrix(idx).row_reduce()
        basis = tuple(
            self.encode(int(c) for c in row)
            for row in reduced.view(np.ndarray).astype(np.int64)
            if np.any(row)
        )
        return Subspace(basis, self._closure_of_basis([b.index for b in basis]))

    def is_linearly_independent(self, vectors: Sequence[VectorLike]) -> bool:
        idx = self.indices(vectors)
        if any(i == 0 for i in idx):
            return False
        return self.rank(idx) == len(idx)

    def dim(self, vectors: Iterable[VectorLike]) -> int:
        return self.rank(vectors)

    def affine_line(self, v: int, w: int) -> FrozenSet[int]:
        """Aff({v, w}) = {v + lam (w - v)}; p points when v != w."""
        direction = self.sub(w, v)
        return frozenset(self._add[v][self._scale[lam][direction]] for lam in range(self.p))

    def affine_closure(self, vectors: Iterable[VectorLike]) -> AffineSet:
        """All affine combinations of S."""
        idx = sorted(set(self.indices(vectors)))
        if not idx:
            raise EmptySetError("affine closure of the empty set is undefined")
        origin = idx[0]
        directions = self.span(self.sub(s, origin) for s in idx[1:])
        members = frozenset(self._add[origin][w] for w in directions.members)
        return AffineSet(members, True, directions.dim)

    def line_closure(self, vectors: Iterable[VectorLike]) -> AffineSet:
        """Least superset of S closed under two-point affine closure."""
        closed: Set[int] = set(self.indices(vectors))
        if not closed:
            raise EmptySetError("line closure of the empty set is undefined")
        frontier = sorted(closed)
        while frontier:
            fresh = []
            for a in frontier:
                for b in list(closed):
                    if a == b:
                        continue
                    for x in self.affine_line(a, b):
                        if x not in closed:
                            closed.add(x)
                            fresh.append(x)
            frontier = fresh
        members = frozenset(closed)
        return AffineSet(members, self.is_affine_subspace(members))

    def is_subspace(self, members: Iterable[int]) -> bool:
        members = frozenset(members)
        if 0 not in members:
            return False
        return self.span(members).members == members

    def is_affine_subspace(self, members: Iterable[int]) -> bool:
        members = frozenset(members)
        if not members:
            return False
        origin = min(members)
        return self.is_subspace(self.sub(x, origin) for x in members)

    @functools.lru_cache(maxsize=None)
    def subspaces_of_dim(self, k: int) -> Tuple[FrozenSet[int], ...]:
        """Member sets of all k-dimensional subspaces, one per RREF basis."""
        if not 0 <= k <= self.n:
            return ()
        found = []
        for pivots in itertools.combinations(range(self.n), k):
            free = [(r, c) for r, pc in enumerate(pivots)
                    for c in range(pc + 1, self.n) if c not in pivots]
            for values in itertools.product(range(self.p), repeat=len(free)):
                rows = [[0] * self.n for _ in range(k)]
                for r, pc in enumerate(pivots):
                    rows[r][pc] = 1
                for (r, c), x in zip(free, values):
                    rows[r][c] = x
                found.append(self._closure_of_basis([self.encode(row).index for row in rows]))
        return tuple(sorted(found, key=sorted))

    # -- maps ------------------------------------------------------------------

    def linear_map_images(self, matrix) -> List[int]:
        """Images of all vector indices under v -> M v (M acts on columns)."""
        m = np.asarray(matrix, dtype=np.int64).reshape(self.n, self.n)
        image_coords = (self.coords_table @ m.T) % self.p
        return self._encode_rows(image_coords).tolist()

    def translation_images(self, t: VectorLike) -> List[int]:
        return list(self._add[self.index_of(t)])

    def matrix_from_images(self, images: Sequence[int]):
        """The matrix whose columns are the images of the standard basis."""
        columns = [self._coords[images[self.basis_vector(i)]] for i in range(self.n)]
        return np.array(columns, dtype=np.int64).T


@functools.lru_cache(maxsize=None)
def field_space(p: int, n: int) -> FieldSpace:
    """Shared FieldSpace instance for (p, n) under the default bounds."""
    return FieldSpace(p, n)
