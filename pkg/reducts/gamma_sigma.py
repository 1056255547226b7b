#!/usr/bin/env python3
"""
Gamma subgroups, the class partition V/~, labellings and the sigma maps.

A labelling f picks a coordinate inside every nonzero class: f(lam v) = lam f(v)
for lam in Gamma. sigma_f(g, v) records how g moves labels on the class of v:

    sigma_f(g, v)(lam) = f((lam / f(v) * v)^g)

Composition of SigmaPerms is left to right like everywhere else in the package,
so sigma_f(g * h, v) == sigma_f(g, v) * sigma_f(h, v^g).
"""

import functools
import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from galois import primitive_root
from sympy import divisors, factorint
from sympy.combinatorics import Permutation

from algebra.errors import (
    IndependenceViolation,
    InternalCheckError,
    MissingAutV,
    NotClassCompatible,
    OutOfRange,
    ParseError,
    PreconditionViolated,
)
from algebra.field_space import FieldSpace, check_prime, field_space
from algebra.perm_engine import Perm, PermGroup, contains_group, generate, gl_group, orbit
from reducts.geometry import projective_space

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SigmaPerm:
    """A permutation of Gamma: images[i] is the image of domain[i]."""

    domain: Tuple[int, ...]
    images: Tuple[int, ...]

    @functools.cached_property
    def _position(self) -> Dict[int, int]:
        return {lam: i for i, lam in enumerate(self.domain)}

    def __call__(self, lam: int) -> int:
        return self.images[self._position[lam]]

    def __mul__(self, other: "SigmaPerm") -> "SigmaPerm":
        if self.domain != other.domain:
            raise ValueError("SigmaPerms over different Gamma")
        return SigmaPerm(self.domain, tuple(other(x) for x in self.images))

    def __invert__(self) -> "SigmaPerm":
        inv = {x: lam for lam, x in zip(self.domain, self.images)}
        return SigmaPerm(self.domain, tuple(inv[lam] for lam in self.domain))

    def is_identity(self) -> bool:
        return self.images == self.domain

    def one_line(self) -> List[int]:
        return list(self.images)

    @classmethod
    def identity(cls, domain: Sequence[int]) -> "SigmaPerm":
        domain = tuple(domain)
        return cls(domain, domain)


@dataclass(frozen=True)
class GammaSubgroup:
    """A subgroup of F_p^x, elements sorted."""

    p: int
    elements: Tuple[int, ...]

    def __post_init__(self):
        if 1 not in self.elements:
            raise ValueError("Gamma must contain 1")
        members = set(self.elements)
        for a in self.elements:
            for b in self.elements:
                if a * b % self.p not in members:
                    raise ValueError(f"{sorted(members)} is not closed under multiplication mod {self.p}")

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, lam: int) -> bool:
        return lam % self.p in self.elements

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_full(self) -> bool:
        return len(self.elements) == self.p - 1

    def inverse(self, lam: int) -> int:
        return pow(lam, -1, self.p)

    @functools.cached_property
    def _mults(self) -> Dict[int, SigmaPerm]:
        return {c: SigmaPerm(self.elements, tuple(c * lam % self.p for lam in self.elements))
                for c in self.elements}

    def mult(self, c: int) -> SigmaPerm:
        """Multiplication by c as a permutation of Gamma."""
        return self._mults[c % self.p]

    def identity(self) -> SigmaPerm:
        return SigmaPerm.identity(self.elements)


def gamma_subgroups(p: int) -> List[GammaSubgroup]:
    """One subgroup of F_p^x per divisor of p - 1, smallest first."""
    p = check_prime(p)
    omega = int(primitive_root(p))
    found = []
    for d in divisors(p - 1):
        generator = pow(omega, (p - 1) // d, p)
        found.append(GammaSubgroup(p, tuple(sorted(pow(generator, i, p) for i in range(d)))))
    return found


def full_gamma(p: int) -> GammaSubgroup:
    return GammaSubgroup(p, tuple(range(1, p)))


def trivial_gamma(p: int) -> GammaSubgroup:
    return GammaSubgroup(p, (1,))


@dataclass(frozen=True)
class ClassPartition:
    """V/~: classes[0] is {0}, the rest are the Gamma-orbits ordered by least index."""

    p: int
    n: int
    gamma: GammaSubgroup
    classes: Tuple[FrozenSet[int], ...]
    class_of: Tuple[int, ...]

    @property
    def zero_class(self) -> FrozenSet[int]:
        return self.classes[0]

    @property
    def nonzero_classes(self) -> Tuple[FrozenSet[int], ...]:
        return self.classes[1:]

    @property
    def num_nonzero(self) -> int:
        return len(self.classes) - 1

    def rep(self, i: int) -> int:
        return min(self.classes[i])

    def class_containing(self, v: int) -> FrozenSet[int]:
        return self.classes[self.class_of[v]]

    def blocks(self) -> List[List[int]]:
        return [sorted(c) for c in self.classes]


def sim_classes(p: int, n: int, gamma: GammaSubgroup) -> ClassPartition:
    space = field_space(p, n)
    class_of = [0] * space.size
    classes = [frozenset({0})]
    for v in range(1, space.size):
        if class_of[v]:
            continue
        members = frozenset(space.scale(lam, v) for lam in gamma.elements)
        for m in members:
            class_of[m] = len(classes)
        classes.append(members)
    return ClassPartition(p, n, gamma, tuple(classes), tuple(class_of))


@dataclass(frozen=True)
class Labelling:
    """f: V \\ {0} -> Gamma; labels[0] is a placeholder 0."""

    partition: ClassPartition
    labels: Tuple[int, ...]

    @property
    def gamma(self) -> GammaSubgroup:
        return self.partition.gamma

    @property
    def space(self) -> FieldSpace:
        return field_space(self.partition.p, self.partition.n)

    def __call__(self, v: int) -> int:
        if v == 0:
            raise OutOfRange("the zero vector has no label")
        return self.labels[v]

    def member_with_label(self, u: int, lam: int) -> int:
        """The member of u's class carrying label lam."""
        space = self.space
        return space.scale(lam * self.gamma.inverse(self.labels[u]), u)

    def is_equivariant(self) -> bool:
        space = self.space
        return all(
            self.labels[space.scale(lam, v)] == lam * self.labels[v] % space.p
            for v in range(1, space.size) for lam in self.gamma.elements
        )

    def to_json(self) -> Dict[str, int]:
        return {str(v): label for v, label in enumerate(self.labels) if v != 0}

    @classmethod
    def from_json(cls, data: Mapping[str, int], p: int, n: int) -> "Labelling":
        space = field_space(p, n)
        try:
            labels = [0] * space.size
            for key, value in data.items():
                v = int(key)
                if not 0 < v < space.size:
                    raise ParseError(f"label key {key!r} is not a nonzero vector index")
                labels[v] = int(value)
        except (TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"malformed labelling: {e}")
        if any(labels[v] == 0 for v in range(1, space.size)):
            raise ParseError("labelling does not cover every nonzero vector")
        try:
            gamma = GammaSubgroup(p, tuple(sorted(set(labels[1:]))))
        except ValueError as e:
            raise ParseError(f"labels do not form a subgroup of F_{p}^x: {e}")
        labelling = cls(sim_classes(p, n, gamma), tuple(labels))
        if not labelling.is_equivariant():
            raise ParseError("labelling violates f(lam v) = lam f(v)")
        return labelling


def make_labelling(part: ClassPartition, gamma: Optional[GammaSubgroup] = None,
                   representatives: Optional[Sequence[int]] = None) -> Labelling:
    """Label 1 on one member per class (least index unless `representatives` says otherwise)."""
    gamma = gamma or part.gamma
    if gamma != part.gamma:
        raise PreconditionViolated("partition was built from a different Gamma")
    space = field_space(part.p, part.n)
    if representatives is not None and len(representatives) != part.num_nonzero:
        raise ValueError(f"expected {part.num_nonzero} representatives, got {len(representatives)}")
    labels = [0] * space.size
    for i, members in enumerate(part.nonzero_classes):
        rep = representatives[i] if representatives is not None else min(members)
        if rep not in members:
            raise ValueError(f"representative {rep} is not in class {sorted(members)}")
        for lam in gamma.elements:
            labels[space.scale(lam, rep)] = lam
    return Labelling(part, tuple(labels))


def sigma(f: Labelling, g: Perm, v: int) -> SigmaPerm:
    """How g moves the labels of v's class."""
    v = int(v)
    if v == 0:
        raise OutOfRange("sigma is defined for nonzero vectors only")
    images = g.array_form
    part = f.partition
    members = part.class_containing(v)
    targets = {images[u] for u in members}
    target_class = part.class_of[images[v]]
    if target_class == 0 or targets != part.classes[target_class]:
        raise NotClassCompatible(
            f"g does not map the class of {v} onto a class",
            {"v": v, "class": sorted(members), "image": sorted(targets)})
    gamma = f.gamma
    fv_inv = gamma.inverse(f.labels[v])
    space = f.space
    return SigmaPerm(gamma.elements, tuple(
        f.labels[images[space.scale(lam * fv_inv, v)]] for lam in gamma.elements))


def lift_on_class(f: Labelling, c: Union[int, FrozenSet[int]], s: SigmaPerm) -> Perm:
    """Permute class c by labels (label lam goes to label s(lam)); identity elsewhere."""
    part = f.partition
    members = part.classes[c] if isinstance(c, int) else frozenset(c)
    if 0 in members:
        raise PreconditionViolated("cannot lift onto the zero class")
    images = list(range(len(f.labels)))
    for u in members:
        images[u] = f.member_with_label(u, s(f.labels[u]))
    return Permutation(images)


def global_label_action(f: Labelling, s: SigmaPerm) -> Perm:
    """Apply s to the labels of every nonzero class at once."""
    images = list(range(len(f.labels)))
    for u in range(1, len(images)):
        images[u] = f.member_with_label(u, s(f.labels[u]))
    return Permutation(images)


def class_permutation_lift(f: Labelling, class_images: Sequence[int]) -> Perm:
    """Label-preserving permutation sending nonzero class i to class class_images[i] (1-based indices)."""
    part = f.partition
    images = list(range(len(f.labels)))
    for i, members in enumerate(part.nonzero_classes, start=1):
        target_rep = part.rep(class_images[i - 1])
        for u in members:
            images[u] = f.member_with_label(target_rep, f.labels[u])
    return Permutation(images)


def sym_f_group(f: Labelling, part: Optional[ClassPartition] = None) -> PermGroup:
    """Sym((V \\ {0})/~)^f: label-preserving permutations realising every class permutation."""
    part = part or f.partition
    m = part.num_nonzero
    degree = len(f.labels)
    if m < 2:
        return PermGroup([], degree=degree)
    swap = [2, 1] + list(range(3, m + 1))
    cycle = list(range(2, m + 1)) + [1]
    group = generate([class_permutation_lift(f, swap), class_permutation_lift(f, cycle)], degree=degree)
    expected = math.factorial(m)
    if group.order() != expected:
        raise InternalCheckError(f"Sym^f has order {group.order()}, expected {m}! = {expected}")
    return group


def is_label_preserving(f: Labelling, g: Perm) -> bool:
    """g fixes 0, permutes classes and sigma_f(g, w) is the identity for every class."""
    if g.array_form[0] != 0:
        return False
    part = f.partition
    try:
        return all(sigma(f, g, part.rep(i)).is_identity() for i in range(1, len(part.classes)))
    except NotClassCompatible:
        return False


def is_class_fixing(part: ClassPartition, g: Perm) -> bool:
    """g acts trivially on V/~ (g lies in Sym*(V))."""
    images = g.array_form
    return all(part.class_of[images[u]] == part.class_of[u] for u in range(len(images)))


def _collinear_pair_orbit(G: PermGroup, v: int, w: int) -> bool:
    """Every pair in the orbit of (v, w) spans one projective point."""
    point_of = projective_space(field_space_of(G).p, field_space_of(G).n).point_of
    for a, b in orbit(G, (v, w)):
        if a == 0 or b == 0 or point_of[a] != point_of[b]:
            return False
    return True


def field_space_of(G: PermGroup) -> FieldSpace:
    """The FieldSpace whose size is G's degree."""
    factors = factorint(G.degree)
    if len(factors) != 1:
        raise PreconditionViolated(f"degree {G.degree} is not a prime power")
    (p, n), = factors.items()
    return field_space(p, n)


def gamma_multipliers(G: PermGroup, v: int, space: FieldSpace) -> FrozenSet[int]:
    """{lam : v ~_G lam v} by the pair-orbit criterion."""
    return frozenset(
        lam for lam in range(1, space.p)
        if _collinear_pair_orbit(G, v, space.scale(lam, v))
    )


def compute_gamma(G: PermGroup, space: Optional[FieldSpace] = None) -> GammaSubgroup:
    """Gamma with ~_G == ~_Gamma, from three sample vectors."""
    space = space or field_space_of(G)
    if not G.fixes_point(0):
        raise PreconditionViolated("compute_gamma needs a group fixing 0")
    if not contains_group(G, gl_group(space.p, space.n)):
        raise MissingAutV("group does not contain Aut(V)")
    samples = list(dict.fromkeys([1, space.basis_vector(space.n - 1), space.add(1, space.basis_vector(space.n - 1))]))
    samples = [v for v in samples if v != 0]
    found = {v: gamma_multipliers(G, v, space) for v in samples}
    distinct = set(found.values())
    if len(distinct) != 1:
        raise IndependenceViolation(
            "multiplier set depends on the sample vector",
            {str(v): sorted(m) for v, m in found.items()})
    members = distinct.pop()
    try:
        gamma = GammaSubgroup(space.p, tuple(sorted(members)))
    except ValueError as e:
        raise InternalCheckError(f"multipliers {sorted(members)} do not form a group: {e}")
    logger.debug(f"Gamma = {list(gamma.elements)} from samples {samples}")
    return gamma
