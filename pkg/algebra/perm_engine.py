#!/usr/bin/env python3
"""
Permutations of [0, p^n) and finitely generated permutation groups.

Composition is left to right, matching sympy: (i)^(g*h) = ((i)^g)^h.

At finite degree every subgroup of Sym(V) is closed in the pointwise
convergence topology, so a "closed supergroup of Aut(V)" is simply the group
generated by Aut(V) and some further permutations. Nothing in this package
tracks closures separately.

Stabiliser chains come from sympy's deterministic incremental Schreier-Sims,
started from the first moved point of the preferred base. The group seed only
drives random element sampling.
"""

import functools
import itertools
import logging
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy.combinatorics import Permutation, PermutationGroup

from algebra.errors import (
    BoundsExceeded,
    BudgetExceeded,
    DegreeMismatch,
    InternalCheckError,
    InvalidPartition,
    ParseError,
)
from algebra.field_space import field_space

logger = logging.getLogger(__name__)

Perm = Permutation
Point = Union[int, Tuple[int, ...]]

DEFAULT_ORBIT_LIMIT = 500_000


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------

def identity(degree: int) -> Perm:
    return Permutation(list(range(degree)))


def perm_from_images(images: Sequence[int], degree: Optional[int] = None) -> Perm:
    """Build a permutation from its image list, checking it is a bijection."""
    images = [int(x) for x in images]
    if degree is not None and len(images) != degree:
        raise DegreeMismatch(f"expected {degree} images, got {len(images)}")
    if sorted(images) != list(range(len(images))):
        raise ValueError("images do not form a permutation")
    return Permutation(images)


def compose(g: Perm, h: Perm) -> Perm:
    """g then h."""
    if g.size != h.size:
        raise DegreeMismatch(f"cannot compose degree {g.size} with degree {h.size}")
    return g * h


def inverse(g: Perm) -> Perm:
    return ~g


def images_of(g: Perm) -> List[int]:
    return g.array_form


def _mul_af(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """Array form of a then b."""
    return [b[x] for x in a]


def _inv_af(a: Sequence[int]) -> List[int]:
    inv = [0] * len(a)
    for i, x in enumerate(a):
        inv[x] = i
    return inv


# ---------------------------------------------------------------------------
# Stabiliser chains
# ---------------------------------------------------------------------------

@dataclass
class StabilizerChain:
    """Base, strong generators and Schreier-tree transversals."""

    degree: int
    base: List[int]
    strong_gens: List[Perm]
    transversals: List[Dict[int, List[int]]]
    inverse_transversals: List[Dict[int, List[int]]]

    @classmethod
    def from_bsgs(cls, base: Sequence[int], strong_gens: Sequence[Perm], degree: int) -> "StabilizerChain":
        base = list(base)
        strong_gens = [s for s in strong_gens if not s.is_Identity]
        transversals = []
        for level, point in enumerate(base):
            fixed = base[:level]
            level_gens = [s.array_form for s in strong_gens
                          if all(s.array_form[b] == b for b in fixed)]
            transversal = {point: list(range(degree))}
            queue = [point]
            for x in queue:
                u = transversal[x]
                for s in level_gens:
                    y = s[x]
                    if y not in transversal:
                        transversal[y] = _mul_af(u, s)
                        queue.append(y)
            transversals.append(transversal)
        inverse_transversals = [{beta: _inv_af(u) for beta, u in t.items()} for t in transversals]
        return cls(degree, base, strong_gens, transversals, inverse_transversals)

    @classmethod
    def trivial(cls, degree: int) -> "StabilizerChain":
        return cls(degree, [], [], [], [])

    @property
    def order(self) -> int:
        return math.prod(len(t) for t in self.transversals)

    @property
    def basic_orbit_lengths(self) -> List[int]:
        return [len(t) for t in self.transversals]

    def sift(self, images: Sequence[int]) -> Tuple[List[int], int]:
        """Strip through the chain; returns the residue and the level reached."""
        h = list(images)
        for level, b in enumerate(self.base):
            u_inv = self.inverse_transversals[level].get(h[b])
            if u_inv is None:
                return h, level
            h = [u_inv[x] for x in h]
        return h, len(self.base)

    def contains_images(self, images: Sequence[int]) -> bool:
        h, level = self.sift(images)
        return level == len(self.base) and all(x == i for i, x in enumerate(h))

    def random_images(self, rng: random.Random) -> List[int]:
        """Uniform random element: u_k * ... * u_0 with u_i from level i."""
        g = list(range(self.degree))
        for transversal in reversed(self.transversals):
            g = _mul_af(g, rng.choice(list(transversal.values())))
        return g

    def iter_images(self) -> Iterator[List[int]]:
        levels = [list(t.values()) for t in reversed(self.transversals)]
        for choice in itertools.product(*levels):
            g = list(range(self.degree))
            for u in choice:
                g = _mul_af(g, u)
            yield g


def preferred_base(degree: int) -> List[int]:
    """Base points 1, 2, ..., degree-1 and the zero vector last."""
    return list(range(1, degree)) + [0]


def _build_chain(group: PermutationGroup, generators: Sequence[Perm], degree: int) -> StabilizerChain:
    moving = [g for g in generators if not g.is_Identity]
    if not moving:
        return StabilizerChain.trivial(degree)
    first = next(pt for pt in preferred_base(degree)
                 if any(g.array_form[pt] != pt for g in moving))
    base, strong = group.schreier_sims_incremental(base=[first], gens=list(moving))
    chain = StabilizerChain.from_bsgs(base, strong, degree)
    logger.debug(f"chain: degree={degree} base length={len(chain.base)} order={chain.order}")
    return chain


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------

class PermGroup:
    """A finitely generated permutation group with a lazily built stabiliser chain."""

    def __init__(self, generators: Iterable[Perm], degree: Optional[int] = None,
                 seed: int = 0, chain: Optional[StabilizerChain] = None):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise ValueError("degree is required for an empty generator list")
            degree = gens[0].size
        for g in gens:
            if g.size != degree:
                raise DegreeMismatch(f"generator of degree {g.size} in a group of degree {degree}")
        if not gens:
            gens = [identity(degree)]
        self.degree = degree
        self.generators: List[Perm] = gens
        self.seed = seed
        self._chain = chain
        self._sympy: Optional[PermutationGroup] = None
        self._fingerprint = None
        self._rng: Optional[random.Random] = None

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, generators={len(self.generators)})"

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_sympy"] = None
        return state

    @property
    def sympy_group(self) -> PermutationGroup:
        if self._sympy is None:
            self._sympy = PermutationGroup(list(self.generators))
        return self._sympy

    @property
    def chain(self) -> StabilizerChain:
        if self._chain is None:
            self._chain = _build_chain(self.sympy_group, self.generators, self.degree)
        return self._chain

    def order(self) -> int:
        return self.chain.order

    def contains(self, g: Union[Perm, Sequence[int]]) -> bool:
        images = g.array_form if isinstance(g, Permutation) else list(g)
        if len(images) != self.degree:
            raise DegreeMismatch(f"element of degree {len(images)} tested against degree {self.degree}")
        return self.chain.contains_images(images)

    __contains__ = contains

    def is_trivial(self) -> bool:
        return all(g.is_Identity for g in self.generators)

    def fixes_point(self, point: int) -> bool:
        return all(g.array_form[point] == point for g in self.generators)

    def generator_images(self) -> List[List[int]]:
        return [g.array_form for g in self.generators]

    def random_element(self, rng: Optional[random.Random] = None) -> Perm:
        if rng is None:
            if self._rng is None:
                self._rng = random.Random(self.seed)
            rng = self._rng
        return Permutation(self.chain.random_images(rng))

    def elements(self, limit: int = 10 ** 6) -> Iterator[Perm]:
        """Every element, by walking the transversals; refuses groups above `limit`."""
        if self.order() > limit:
            raise BudgetExceeded(f"group of order {self.order()} is above the enumeration limit {limit}")
        for images in self.chain.iter_images():
            yield Permutation(images)


def generate(gens: Iterable[Perm], degree: Optional[int] = None, seed: int = 0) -> PermGroup:
    return PermGroup(gens, degree=degree, seed=seed)


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------

def orbit(G: PermGroup, x: Point, limit: int = DEFAULT_ORBIT_LIMIT) -> FrozenSet[Point]:
    """Orbit of a point or of a point tuple (acted on componentwise)."""
    gens = G.generator_images()
    if isinstance(x, tuple):
        seen = {x}
        queue = [x]
        for t in queue:
            for g in gens:
                y = tuple(g[c] for c in t)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
                    if len(seen) > limit:
                        raise BudgetExceeded(f"tuple orbit exceeds {limit} elements")
        return frozenset(seen)
    x = int(x)
    if not 0 <= x < G.degree:
        raise ValueError(f"point {x} outside [0, {G.degree})")
    seen = {x}
    queue = [x]
    for a in queue:
        for g in gens:
            b = g[a]
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return frozenset(seen)


def _component_labels(generators: Sequence[Sequence[int]], nodes: int, act) -> np.ndarray:
    src = np.arange(nodes, dtype=np.int64)
    rows, cols = [], []
    for g in generators:
        rows.append(src)
        cols.append(act(np.asarray(g, dtype=np.int64)))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(nodes, nodes))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


def orbit_partition(G: PermGroup) -> List[FrozenSet[int]]:
    """Orbits of G on points, ordered by least element."""
    labels = _component_labels(G.generator_images(), G.degree, lambda g: g)
    orbits: Dict[int, List[int]] = {}
    for point, label in enumerate(labels.tolist()):
        orbits.setdefault(label, []).append(point)
    return sorted((frozenset(o) for o in orbits.values()), key=min)


def pair_orbit_lengths(G: PermGroup) -> List[int]:
    """Sorted orbit lengths of G on ordered pairs of points."""
    d = G.degree
    src = np.arange(d * d, dtype=np.int64)
    first, second = src // d, src % d
    labels = _component_labels(G.generator_images(), d * d, lambda g: g[first] * d + g[second])
    return sorted(np.bincount(labels).tolist())


def fingerprint(G: PermGroup) -> Tuple[int, Tuple[int, ...], Tuple[int, ...]]:
    """(order, point orbit lengths, pair orbit lengths); equal groups agree on it."""
    if G._fingerprint is None:
        points = tuple(sorted(len(o) for o in orbit_partition(G)))
        G._fingerprint = (G.order(), points, tuple(pair_orbit_lengths(G)))
    return G._fingerprint


# ---------------------------------------------------------------------------
# Stabilisers and kernels
# ---------------------------------------------------------------------------

def pointwise_stabilizer(G: PermGroup, points: Iterable[int]) -> PermGroup:
    """Subgroup fixing every point of `points`, with its chain read off a rebased BSGS."""
    points = list(dict.fromkeys(int(x) for x in points))
    for x in points:
        if not 0 <= x < G.degree:
            raise ValueError(f"point {x} outside [0, {G.degree})")
    if not points or G.is_trivial():
        return G
    strong = G.chain.strong_gens or G.generators
    base, strong = G.sympy_group.schreier_sims_incremental(base=list(points), gens=list(strong))
    if list(base[:len(points)]) != points:
        raise InternalCheckError("rebased chain does not start with the requested points")
    stab_gens = [s for s in strong
                 if not s.is_Identity and all(s.array_form[x] == x for x in points)]
    chain = StabilizerChain.from_bsgs(base[len(points):], stab_gens, G.degree)
    return PermGroup(stab_gens, degree=G.degree, seed=G.seed, chain=chain)


def _stabilizer_in_extended_action(G: PermGroup, extra_images: List[List[int]],
                                   fixed_extra: Sequence[int]) -> PermGroup:
    """Extend G to act on degree + m points and fix the given extra points."""
    d = G.degree
    extended = [
        Permutation(list(g.array_form) + [d + e for e in extra])
        for g, extra in zip(G.generators, extra_images)
    ]
    targets = [d + e for e in fixed_extra]
    big = PermutationGroup(extended)
    _, strong = big.schreier_sims_incremental(base=list(targets), gens=extended)
    kept = []
    for s in strong:
        if all(s.array_form[t] == t for t in targets):
            projected = s.array_form[:d]
            if projected != list(range(d)):
                kept.append(Permutation(projected))
    return PermGroup(kept, degree=d, seed=G.seed)


def setwise_stabilizer(G: PermGroup, subset: Iterable[int], limit: int = DEFAULT_ORBIT_LIMIT) -> PermGroup:
    """Subgroup mapping `subset` onto itself, through G's action on the orbit of the set."""
    start = frozenset(int(x) for x in subset)
    gens = G.generator_images()
    index = {start: 0}
    sets = [start]
    for s in sets:
        for g in gens:
            image = frozenset(g[x] for x in s)
            if image not in index:
                index[image] = len(sets)
                sets.append(image)
                if len(sets) > limit:
                    raise BudgetExceeded(f"orbit of the set exceeds {limit} elements")
    if len(sets) == 1:
        return G
    extra = [[index[frozenset(g[x] for x in s)] for s in sets] for g in gens]
    return _stabilizer_in_extended_action(G, extra, [0])


def _kernel_by_setwise_stabilizers(G: PermGroup, blocks: List[List[int]]) -> PermGroup:
    # blocks are not a block system for G: stabilise them one at a time
    K = G
    for block in sorted(blocks, key=len)[:-1]:
        K = setwise_stabilizer(K, block)
        if K.is_trivial():
            break
    return K


def kernel_of_action(G: PermGroup, blocks: Sequence[Iterable[int]]) -> PermGroup:
    """Subgroup of G fixing every block setwise (the kernel of the block action)."""
    blocks = [sorted(int(x) for x in b) for b in blocks]
    block_of = {}
    for i, block in enumerate(blocks):
        if not block:
            raise InvalidPartition("empty block")
        for x in block:
            if x in block_of:
                raise InvalidPartition(f"point {x} lies in two blocks")
            block_of[x] = i
    if sorted(block_of) != list(range(G.degree)):
        raise InvalidPartition("blocks do not cover every point")

    if len(blocks) == 1:
        return G
    if all(len(b) == 1 for b in blocks):
        return PermGroup([], degree=G.degree, seed=G.seed)

    extra = []
    for g in G.generator_images():
        action = []
        for block in blocks:
            target = {block_of[g[x]] for x in block}
            if len(target) != 1:
                return _kernel_by_setwise_stabilizers(G, blocks)
            action.append(target.pop())
        extra.append(action)

    if all(a == list(range(len(blocks))) for a in extra):
        return G
    return _stabilizer_in_extended_action(G, extra, range(len(blocks)))


# ---------------------------------------------------------------------------
# Comparisons
# ---------------------------------------------------------------------------

def _check_degrees(G: PermGroup, H: PermGroup) -> None:
    if G.degree != H.degree:
        raise DegreeMismatch(f"degrees differ: {G.degree} vs {H.degree}")


def join(*groups: PermGroup) -> PermGroup:
    """<G, H, ...>: the group generated by all the generators."""
    first = groups[0]
    for other in groups[1:]:
        _check_degrees(first, other)
    gens = [g for group in groups for g in group.generators if not g.is_Identity]
    return PermGroup(gens, degree=first.degree, seed=first.seed)


def contains_group(G: PermGroup, H: PermGroup) -> bool:
    _check_degrees(G, H)
    return all(G.contains(h) for h in H.generators)


def equals(G: PermGroup, H: PermGroup) -> bool:
    _check_degrees(G, H)
    if G.order() != H.order():
        return False
    if fingerprint(G) != fingerprint(H):
        return False
    return contains_group(G, H) and contains_group(H, G)


# ---------------------------------------------------------------------------
# Named groups
# ---------------------------------------------------------------------------

def gl_order(p: int, n: int) -> int:
    return math.prod(p ** n - p ** i for i in range(n))


def _gl_generator_pair(p: int, n: int) -> List[np.ndarray]:
    """diag(w, 1, ..., 1) and the matrix with -1 below the diagonal and first row (-1, 0, ..., 0, 1)."""
    from galois import primitive_root

    diag = np.eye(n, dtype=np.int64)
    diag[0, 0] = primitive_root(p)
    if n == 1:
        return [diag]
    b = np.zeros((n, n), dtype=np.int64)
    b[0, 0] = p - 1
    b[0, n - 1] = 1
    for i in range(1, n):
        b[i, i - 1] = p - 1
    return [diag, b]


def _gl_elementary_matrices(p: int, n: int) -> List[np.ndarray]:
    """diag(w, 1, ..., 1), the transvection I + E_01, and the permutation matrices of (0 1), (0 1 ... n-1)."""
    from galois import primitive_root

    diag = np.eye(n, dtype=np.int64)
    diag[0, 0] = primitive_root(p)
    if n == 1:
        return [diag]
    transvection = np.eye(n, dtype=np.int64)
    transvection[0, 1] = 1
    swap = np.eye(n, dtype=np.int64)[[1, 0] + list(range(2, n))]
    cycle = np.roll(np.eye(n, dtype=np.int64), 1, axis=0)
    return [diag, transvection, swap, cycle]


def _group_of_matrices(space, mats: Sequence[np.ndarray]) -> PermGroup:
    return generate([Permutation(space.linear_map_images(m)) for m in mats], degree=space.size)


@functools.lru_cache(maxsize=None)
def gl_group(p: int, n: int) -> PermGroup:
    """Aut(V) = GL(n, p) acting on vector indices."""
    space = field_space(p, n)
    group = _group_of_matrices(space, _gl_generator_pair(p, n))
    expected = gl_order(p, n)
    if group.order() != expected and n > 2:
        logger.warning(f"GL({n},{p}) generator pair fell short; using elementary generators")
        group = _group_of_matrices(space, _gl_elementary_matrices(p, n))
    if group.order() != expected:
        if n > 2:
            raise InternalCheckError(f"GL({n},{p}) generators give order {group.order()}, expected {expected}")
        logger.warning(f"GL({n},{p}) standard generators fell short; enumerating all matrices")
        gf = space.GF
        gens = []
        for entries in itertools.product(range(p), repeat=n * n):
            m = np.array(entries, dtype=np.int64).reshape(n, n)
            if int(np.linalg.det(gf(m))) != 0:
                gens.append(Permutation(space.linear_map_images(m)))
        group = generate(gens, degree=space.size)
    return group


@functools.lru_cache(maxsize=None)
def sym_group(degree: int) -> PermGroup:
    """Sym(V) on `degree` points."""
    if degree < 2:
        return PermGroup([], degree=degree)
    transposition = Permutation([1, 0] + list(range(2, degree)))
    cycle = Permutation(list(range(1, degree)) + [0])
    return generate([transposition, cycle])


@functools.lru_cache(maxsize=None)
def sym_fixing_zero(degree: int) -> PermGroup:
    """Sym(V)_0: every permutation of the nonzero points."""
    if degree < 3:
        return PermGroup([], degree=degree)
    transposition = Permutation([0, 2, 1] + list(range(3, degree)))
    cycle = Permutation([0] + list(range(2, degree)) + [1])
    return generate([transposition, cycle])


# ---------------------------------------------------------------------------
# Generator files
# ---------------------------------------------------------------------------

def perm_to_line(g: Perm) -> str:
    return " ".join(str(x) for x in g.array_form)


def format_generators(p: int, n: int, gens: Iterable[Perm]) -> str:
    """Generator file text: `p n` then one line of images per generator."""
    lines = [f"{p} {n}"]
    lines.extend(perm_to_line(g) for g in gens)
    return "\n".join(lines) + "\n"


def parse_generators(text: str) -> Tuple[int, int, List[Perm]]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("generator file is empty")
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(f"header must be 'p n', got {lines[0]!r}")
    try:
        p, n = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(f"header must hold two integers, got {lines[0]!r}")
    if p < 2 or n < 1:
        raise ParseError(f"invalid header values p={p}, n={n}")
    degree = p ** n
    gens = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            images = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer image")
        if len(images) != degree:
            raise ParseError(f"line {lineno}: expected {degree} images, got {len(images)}")
        if sorted(images) != list(range(degree)):
            raise ParseError(f"line {lineno}: images are not a permutation of [0, {degree})")
        gens.append(Permutation(images))
    return p, n, gens


def read_generator_file(path: Union[str, Path]) -> Tuple[int, int, List[Perm]]:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"generator file not found: {path}")
    return parse_generators(path.read_text())


def write_generator_file(path: Union[str, Path], p: int, n: int, gens: Iterable[Perm]) -> None:
    Path(path).write_text(format_generators(p, n, gens))


def check_degree_bound(degree: int, bound: int, what: str) -> None:
    if degree > bound:
        raise BoundsExceeded(f"{what} needs degree <= {bound}, got {degree}",
                             {"degree": degree, "bound": bound})
