#!/usr/bin/env python3
"""
Classification of the groups between Aut(V) and Sym(V).

A group G >= Aut(V) fixing 0 is cut into its class-fixing part G* (the kernel
of the action on V/~) and the pair N <= H of label permutations G* realises.
G(N, H) rebuilds G* from that pair; G is then either <G(N, H), Aut(V)> when it
preserves projective lines, or <G(N, H), Sym^f, Aut(V)> otherwise. Groups
moving 0 are Sym(V) or AGL(V).

The module also hosts the two exploration operations that sit on top of the
same machinery: the A_k(S) sets and the pair closure acl(v, w).
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from algebra.errors import (
    BoundsExceeded,
    BudgetExceeded,
    DegenerateSpan,
    IndependenceViolation,
    InternalCheckError,
    InvalidPartition,
    MissingAutV,
    NotClassCompatible,
    NotNormal,
    OutOfRange,
    PreconditionViolated,
    TrichotomyViolation,
    check_deadline,
)
from algebra.field_space import FieldSpace, field_space
from algebra.perm_engine import (
    DEFAULT_ORBIT_LIMIT,
    Perm,
    PermGroup,
    contains_group,
    equals,
    generate,
    gl_group,
    join,
    kernel_of_action,
    orbit_partition,
    perm_to_line,
    pointwise_stabilizer,
    sym_group,
)
from reducts.gamma_sigma import (
    ClassPartition,
    GammaSubgroup,
    Labelling,
    SigmaPerm,
    compute_gamma,
    field_space_of,
    gamma_subgroups,
    global_label_action,
    is_class_fixing,
    lift_on_class,
    make_labelling,
    sigma,
    sim_classes,
    sym_f_group,
)
from reducts.geometry import agl_group, ftpg_reconstruct, preserves_projective_lines, projective_action

logger = logging.getLogger(__name__)

MAX_CATALOG_POINTS = 27
MAX_SIGMA_GROUP_DEGREE = 4

CASE_SYM = "SYM"
CASE_AGL = "AGL"
CASE_FIX0_AUT = "FIX0_AUT"
CASE_FIX0_SYMF = "FIX0_SYMF"
CASE_UNCLASSIFIED = "UNCLASSIFIED"

SHAPE_EMPTY = "EMPTY"
SHAPE_SUBSPACE_IMAGE = "SUBSPACE_IMAGE"
SHAPE_FULL = "FULL"


# ---------------------------------------------------------------------------
# Subgroups of Sym(Gamma)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaGroup:
    """A subgroup of Sym(Gamma), held as its full element set."""

    domain: Tuple[int, ...]
    elements: FrozenSet[SigmaPerm]

    @classmethod
    def closure(cls, domain: Sequence[int], gens: Iterable[SigmaPerm]) -> "SigmaGroup":
        domain = tuple(domain)
        gens = list(gens)
        identity = SigmaPerm.identity(domain)
        found = {identity}
        queue = [identity]
        for x in queue:
            for g in gens:
                y = x * g
                if y not in found:
                    found.add(y)
                    queue.append(y)
        return cls(domain, frozenset(found))

    @classmethod
    def trivial(cls, domain: Sequence[int]) -> "SigmaGroup":
        return cls.closure(domain, [])

    @classmethod
    def symmetric(cls, domain: Sequence[int]) -> "SigmaGroup":
        domain = tuple(domain)
        return cls(domain, frozenset(SigmaPerm(domain, images) for images in itertools.permutations(domain)))

    @classmethod
    def from_json(cls, domain: Sequence[int], data: Sequence[Sequence[int]]) -> "SigmaGroup":
        domain = tuple(domain)
        group = cls(domain, frozenset(SigmaPerm(domain, tuple(row)) for row in data))
        if not group.is_group():
            raise ValueError("element list is not a group")
        return group

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, s: SigmaPerm) -> bool:
        return s in self.elements

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_group(self) -> bool:
        if SigmaPerm.identity(self.domain) not in self.elements:
            return False
        return all(a * b in self.elements for a in self.elements for b in self.elements) \
            and all(~a in self.elements for a in self.elements)

    def is_subgroup_of(self, other: "SigmaGroup") -> bool:
        return self.domain == other.domain and self.elements <= other.elements

    def is_normal_in(self, other: "SigmaGroup") -> bool:
        if not self.is_subgroup_of(other):
            return False
        return all(~h * x * h in self.elements for h in other.elements for x in self.elements)

    def sorted_elements(self) -> List[SigmaPerm]:
        return sorted(self.elements, key=lambda s: s.images)

    def generators(self) -> List[SigmaPerm]:
        """A small generating set, picked greedily in sorted order."""
        gens: List[SigmaPerm] = []
        span = SigmaGroup.trivial(self.domain)
        for s in self.sorted_elements():
            if s not in span:
                gens.append(s)
                span = SigmaGroup.closure(self.domain, gens)
        return gens

    def to_json(self) -> List[List[int]]:
        return [s.one_line() for s in self.sorted_elements()]


def subgroups_of_sym(domain: Sequence[int], max_degree: int = MAX_SIGMA_GROUP_DEGREE) -> List[SigmaGroup]:
    """Every subgroup of Sym(domain), ordered by (order, elements)."""
    domain = tuple(domain)
    if len(domain) > max_degree:
        raise BoundsExceeded(f"subgroups of Sym({len(domain)}) are enumerated only up to degree {max_degree}",
                             {"degree": len(domain), "max_degree": max_degree})
    everything = SigmaGroup.symmetric(domain)
    found = {SigmaGroup.trivial(domain)}
    frontier = list(found)
    while frontier:
        fresh = []
        for group in frontier:
            for s in everything.sorted_elements():
                if s in group:
                    continue
                bigger = SigmaGroup.closure(domain, list(group.elements) + [s])
                if bigger not in found:
                    found.add(bigger)
                    fresh.append(bigger)
        frontier = fresh
    return sorted(found, key=lambda g: (g.order, g.to_json()))


def normal_pairs(domain: Sequence[int], max_degree: int = MAX_SIGMA_GROUP_DEGREE) -> List[Tuple[SigmaGroup, SigmaGroup]]:
    """All (N, H) with N normal in H <= Sym(domain)."""
    subgroups = subgroups_of_sym(domain, max_degree)
    return [(N, H) for H in subgroups for N in subgroups if N.is_normal_in(H)]


# ---------------------------------------------------------------------------
# G*, (N, H) and G(N, H)
# ---------------------------------------------------------------------------

def g_star(G: PermGroup, part: ClassPartition) -> PermGroup:
    """G* = elements of G acting trivially on V/~."""
    classes = set(part.classes)
    for g in G.generator_images():
        if any(frozenset(g[x] for x in c) not in classes for c in classes):
            raise InvalidPartition("G does not permute the ~-classes")
    kernel = kernel_of_action(G, part.blocks())
    for x in G.generators:
        for k in kernel.generators:
            if not kernel.contains(~x * k * x):
                raise InternalCheckError("G* is not normal in G")
    logger.debug(f"G* has order {kernel.order()}")
    return kernel


def _sigma_image(f: Labelling, group: PermGroup, v: int) -> SigmaGroup:
    # g -> sigma_f(g, v) is a homomorphism on class-fixing groups
    return SigmaGroup.closure(f.gamma.elements, [sigma(f, g, v) for g in group.generators])


def extract_H(Gstar: PermGroup, f: Labelling, v0: Optional[int] = None) -> SigmaGroup:
    part = f.partition
    v0 = part.rep(1) if v0 is None else v0
    H = _sigma_image(f, Gstar, v0)
    for i in range(1, len(part.classes)):
        other = _sigma_image(f, Gstar, part.rep(i))
        if other != H:
            raise IndependenceViolation(
                "H depends on the chosen class",
                {"v0": v0, "v": part.rep(i), "H": H.to_json(), "H_v": other.to_json()})
    return H


def extract_N(Gstar: PermGroup, f: Labelling, v0: Optional[int] = None) -> SigmaGroup:
    part = f.partition
    v0 = part.rep(1) if v0 is None else v0
    home = part.class_containing(v0)
    outside = [u for u in range(len(f.labels)) if u not in home]
    return _sigma_image(f, pointwise_stabilizer(Gstar, outside), v0)


def extract_NH(Gstar: PermGroup, f: Labelling, v0: Optional[int] = None) -> Tuple[SigmaGroup, SigmaGroup]:
    H = extract_H(Gstar, f, v0)
    N = extract_N(Gstar, f, v0)
    if not N.is_normal_in(H):
        raise InternalCheckError("extracted N is not normal in H",
                                 {"N": N.to_json(), "H": H.to_json()})
    return N, H


def g_nh_order(N: SigmaGroup, H: SigmaGroup, classes: int) -> int:
    """(|H| / |N|) * |N|^c."""
    return (H.order // N.order) * N.order ** classes


def build_G_NH(N: SigmaGroup, H: SigmaGroup, part: ClassPartition, f: Labelling) -> PermGroup:
    """Class-fixing permutations whose sigma-family lies in one coset of N inside H."""
    if not N.is_normal_in(H):
        raise NotNormal("N is not a normal subgroup of H",
                        {"N": N.to_json(), "H": H.to_json()})
    degree = len(f.labels)
    gens: List[Perm] = []
    for c in range(1, len(part.classes)):
        gens.extend(lift_on_class(f, c, s) for s in N.generators())
    gens.extend(global_label_action(f, h) for h in H.generators())
    group = generate([g for g in gens if not g.is_Identity], degree=degree)
    expected = g_nh_order(N, H, part.num_nonzero)
    if group.order() != expected:
        raise InternalCheckError(f"G(N,H) has order {group.order()}, expected {expected}",
                                 {"N": N.to_json(), "H": H.to_json()})
    return group


def in_G_NH(f: Labelling, g: Perm, N: SigmaGroup, H: SigmaGroup) -> bool:
    """Membership by definition: class-fixing, sigma values in H, pairwise quotients in N."""
    part = f.partition
    if not is_class_fixing(part, g):
        return False
    values = [sigma(f, g, part.rep(i)) for i in range(1, len(part.classes))]
    if any(s not in H for s in values):
        return False
    first = values[0]
    return all(first * ~s in N for s in values[1:])


# ---------------------------------------------------------------------------
# Classification records
# ---------------------------------------------------------------------------

@dataclass
class ClassificationRecord:
    p: int
    n: int
    order: int
    fixes_zero: bool
    gamma: Tuple[int, ...]
    preserves_lines: Optional[bool]
    case: str
    N: Optional[SigmaGroup]
    H: Optional[SigmaGroup]
    round_trip_ok: bool
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "n": self.n,
            "order": str(self.order),
            "fixes_zero": self.fixes_zero,
            "gamma": list(self.gamma),
            "preserves_lines": "n/a" if self.preserves_lines is None else self.preserves_lines,
            "case": self.case,
            "N": None if self.N is None else self.N.to_json(),
            "H": None if self.H is None else self.H.to_json(),
            "round_trip_ok": self.round_trip_ok,
            "notes": "; ".join(self.notes),
        }


def _generators_preserve_lines(space: FieldSpace, G: PermGroup) -> bool:
    for g in G.generators:
        try:
            q = projective_action(space, g)
        except PreconditionViolated:
            return False
        if not preserves_projective_lines(space, q):
            return False
    return True


def _classify_moving_zero(G: PermGroup, space: FieldSpace) -> ClassificationRecord:
    p, n = space.p, space.n
    try:
        gamma_elements = compute_gamma(pointwise_stabilizer(G, [0]), space).elements
        notes = [f"Gamma of the zero stabiliser is {list(gamma_elements)}"]
    except IndependenceViolation as e:
        gamma_elements = ()
        notes = [f"zero stabiliser has no Gamma: {e}"]
    if equals(G, sym_group(space.size)):
        case = CASE_SYM
    elif equals(G, agl_group(p, n)):
        case = CASE_AGL
    else:
        case = CASE_UNCLASSIFIED
        notes.append(f"moves 0 but is neither Sym(V) nor AGL(V) (order {G.order()})")
    return ClassificationRecord(p, n, G.order(), False, gamma_elements, None, case,
                                None, None, case != CASE_UNCLASSIFIED, notes)


def classify(G: PermGroup, space: Optional[FieldSpace] = None) -> ClassificationRecord:
    """Place G in the summary flow: SYM, AGL, FIX0_AUT, FIX0_SYMF or UNCLASSIFIED."""
    space = space or field_space_of(G)
    p, n = space.p, space.n
    gl = gl_group(p, n)
    if not contains_group(G, gl):
        raise MissingAutV("group does not contain Aut(V)", {"p": p, "n": n})
    if not G.fixes_point(0):
        return _classify_moving_zero(G, space)

    notes: List[str] = []
    try:
        gamma = compute_gamma(G, space)
    except IndependenceViolation as e:
        notes.append(f"no Gamma: {e}")
        return ClassificationRecord(p, n, G.order(), True, (), None, CASE_UNCLASSIFIED,
                                    None, None, False, notes)
    part = sim_classes(p, n, gamma)
    f = make_labelling(part)
    preserves = _generators_preserve_lines(space, G) if gamma.is_full else None

    try:
        Gstar = g_star(G, part)
        N, H = extract_NH(Gstar, f)
    except (InvalidPartition, IndependenceViolation, NotClassCompatible) as e:
        notes.append(f"no class decomposition: {type(e).__name__}: {e}")
        return ClassificationRecord(p, n, G.order(), True, gamma.elements, preserves,
                                    CASE_UNCLASSIFIED, None, None, False, notes)
    gnh = build_G_NH(N, H, part, f)

    aut_candidate = join(gnh, gl)
    if preserves:
        case, candidate = CASE_FIX0_AUT, aut_candidate
        if n >= 3:
            for i, g in enumerate(G.generators):
                if ftpg_reconstruct(space, projective_action(space, g)) is None:
                    notes.append(f"generator {i} preserves lines but has no linear reconstruction")
                    case = CASE_UNCLASSIFIED
                    break
            else:
                notes.append("acts on projective points like Aut(V)")
        elif not equals(G, aut_candidate):
            # below dimension 3 line preservation says nothing: fall through to Sym^f
            case, candidate = CASE_FIX0_SYMF, join(gnh, sym_f_group(f, part), gl)
    else:
        case, candidate = CASE_FIX0_SYMF, join(gnh, sym_f_group(f, part), gl)

    ok = case != CASE_UNCLASSIFIED and equals(G, candidate)
    if case != CASE_UNCLASSIFIED and not ok:
        notes.append(f"G (order {G.order()}) differs from the predicted decomposition "
                     f"(order {candidate.order()})")
        case = CASE_UNCLASSIFIED
    logger.debug(f"classified order {G.order()} as {case}: Gamma={list(gamma.elements)} "
                 f"|N|={N.order} |H|={H.order}")
    return ClassificationRecord(p, n, G.order(), True, gamma.elements, preserves, case,
                                N, H, ok, notes)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

@dataclass
class CatalogEntry:
    group: PermGroup
    record: ClassificationRecord
    constructions: List[Dict[str, Any]]
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "order": str(self.group.order()),
            "generators": [perm_to_line(g) for g in self.group.generators],
            "record": self.record.to_json(),
            "constructions": self.constructions,
            "notes": self.notes,
        }


_EXPECTED_CASE = {"SYM": CASE_SYM, "AGL": CASE_AGL, "AUT": CASE_FIX0_AUT, "SYMF": CASE_FIX0_SYMF}


def _construction_specs(p: int, max_sigma_degree: int) -> List[Dict[str, Any]]:
    specs: List[Dict[str, Any]] = [{"kind": "SYM"}, {"kind": "AGL"}]
    for gamma in gamma_subgroups(p):
        for N, H in normal_pairs(gamma.elements, max_sigma_degree):
            for kind in ("AUT", "SYMF"):
                specs.append({"kind": kind, "gamma": list(gamma.elements),
                              "N": N.to_json(), "H": H.to_json()})
    return specs


def build_construction(p: int, n: int, spec: Dict[str, Any]) -> PermGroup:
    kind = spec["kind"]
    if kind == "SYM":
        return sym_group(p ** n)
    if kind == "AGL":
        return agl_group(p, n)
    gamma = GammaSubgroup(p, tuple(spec["gamma"]))
    part = sim_classes(p, n, gamma)
    f = make_labelling(part)
    N = SigmaGroup.from_json(gamma.elements, spec["N"])
    H = SigmaGroup.from_json(gamma.elements, spec["H"])
    gnh = build_G_NH(N, H, part, f)
    if kind == "AUT":
        return join(gnh, gl_group(p, n))
    return join(gnh, sym_f_group(f, part), gl_group(p, n))


def _build_and_classify(args) -> Tuple[PermGroup, ClassificationRecord]:
    p, n, spec = args
    group = build_construction(p, n, spec)
    return group, classify(group, field_space(p, n))


def _describe(spec: Dict[str, Any]) -> str:
    if spec["kind"] in ("SYM", "AGL"):
        return spec["kind"]
    return f"{spec['kind']}(Gamma={spec['gamma']}, |N|={len(spec['N'])}, |H|={len(spec['H'])})"


def _reproduces(record: ClassificationRecord, spec: Dict[str, Any]) -> bool:
    if record.case != _EXPECTED_CASE[spec["kind"]]:
        return False
    if spec["kind"] in ("SYM", "AGL"):
        return True
    return (list(record.gamma) == spec["gamma"]
            and record.N is not None and record.N.to_json() == spec["N"]
            and record.H is not None and record.H.to_json() == spec["H"])


def catalog(p: int, n: int, workers: int = 1, deadline: Optional[float] = None,
            max_points: int = MAX_CATALOG_POINTS,
            max_sigma_degree: int = MAX_SIGMA_GROUP_DEGREE) -> List[CatalogEntry]:
    """Build every candidate group, merge equal ones and classify the survivors."""
    space = field_space(p, n)
    if space.size > max_points:
        raise BoundsExceeded(f"catalog is limited to p^n <= {max_points}, got {space.size}",
                             {"p": p, "n": n, "max_points": max_points})
    if p - 1 > max_sigma_degree:
        raise BoundsExceeded(f"catalog needs every subgroup of Sym(F_{p}^x); only |F_p^x| <= {max_sigma_degree} is supported",
                             {"p": p, "max_sigma_degree": max_sigma_degree})
    specs = _construction_specs(p, max_sigma_degree)
    logger.info(f"catalog p={p} n={n}: {len(specs)} constructions")

    jobs = [(p, n, spec) for spec in specs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_build_and_classify, jobs))
        check_deadline(deadline, "catalog")
    else:
        results = []
        for job in jobs:
            check_deadline(deadline, "catalog")
            results.append(_build_and_classify(job))

    entries: List[CatalogEntry] = []
    for spec, (group, record) in zip(specs, results):
        for entry in entries:
            if equals(entry.group, group):
                entry.constructions.append(spec)
                break
        else:
            entries.append(CatalogEntry(group, record, [spec]))

    for entry in entries:
        matched = [s for s in entry.constructions if _reproduces(entry.record, s)]
        entry.record.round_trip_ok = entry.record.round_trip_ok and bool(matched)
        for spec in entry.constructions:
            if spec not in matched:
                entry.notes.append(f"collapsed: {_describe(spec)} is absorbed into this "
                                   f"{entry.record.case} group of order {entry.group.order()}")
        if len(matched) > 1:
            entry.notes.append("constructed several ways: " + ", ".join(_describe(s) for s in matched))

    entries.sort(key=lambda e: (e.group.order(), [perm_to_line(g) for g in e.group.generators]))
    logger.info(f"catalog p={p} n={n}: {len(entries)} distinct groups")
    return entries


# ---------------------------------------------------------------------------
# A_k(S) and acl
# ---------------------------------------------------------------------------

@dataclass
class AkResult:
    S: Tuple[int, ...]
    k: int
    members: FrozenSet[int]
    shape: str
    witness: Optional[List[int]] = None
    subspace: Optional[FrozenSet[int]] = None
    kandn: Optional[Dict[str, Any]] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "S": list(self.S),
            "k": self.k,
            "set": sorted(self.members),
            "size": len(self.members),
            "shape": self.shape,
            "witness": self.witness,
            "subspace": None if self.subspace is None else sorted(self.subspace),
            "kandn": self.kandn,
        }


def _span_members(space: FieldSpace, vectors: Sequence[int]) -> Tuple[int, FrozenSet[int]]:
    """(dimension, members) of span(vectors), built one vector at a time."""
    members = {0}
    dim = 0
    for x in vectors:
        if x in members:
            continue
        multiples = [space.scale(c, x) for c in range(space.p)]
        members = {space.add(m, y) for m in members for y in multiples}
        dim += 1
    return dim, frozenset(members)


def _kandn(G: PermGroup, space: FieldSpace, S: Sequence[int], k: int) -> Optional[Dict[str, Any]]:
    if not G.fixes_point(0) or not contains_group(G, gl_group(space.p, space.n)):
        return None
    gamma = compute_gamma(G, space)
    part = sim_classes(space.p, space.n, gamma)
    bound = (space.p ** k - 1) // gamma.order - 1
    return {
        "bound": bound,
        "n": space.n,
        "holds": space.n <= bound,
        "classes_in_S": len({part.class_of[s] for s in S}),
    }


def a_k_set(G: PermGroup, S: Iterable[int], k: int, limit: int = DEFAULT_ORBIT_LIMIT,
            space: Optional[FieldSpace] = None, deadline: Optional[float] = None) -> AkResult:
    """{v : some g in G maps S and v into a k-dimensional subspace}, with its shape.

    One BFS over the orbit of the S-tuple keeps a spanning tree; for every image
    t of dimension <= k the tree gives g with S^g = t, and each k-subspace W
    containing t pulls back to W^(g^-1). The union of those pull-backs, closed
    under the pointwise stabiliser of S, is A_k(S).
    """
    space = space or field_space_of(G)
    S = tuple(dict.fromkeys(int(s) for s in S))
    for s in S:
        if not 0 < s < space.size:
            raise OutOfRange(f"S must consist of nonzero vector indices, got {s}")
    if not 1 <= k <= space.n:
        raise OutOfRange(f"k must lie in [1, {space.n}], got {k}")

    subspaces = space.subspaces_of_dim(k)
    gens = G.generator_images()
    parent: Dict[Tuple[int, ...], Optional[Tuple[Tuple[int, ...], int]]] = {S: None}
    queue = [S]
    union: set = set()
    candidates: List[Tuple[List[int], FrozenSet[int], FrozenSet[int]]] = []

    for step, t in enumerate(queue):
        if step % 4096 == 0:
            check_deadline(deadline, "A_k search")
        dim, span_t = _span_members(space, t)
        if dim <= k:
            path = []
            node = t
            while parent[node] is not None:
                node, gen_index = parent[node]
                path.append(gen_index)
            g_images = list(range(space.size))
            for gen_index in reversed(path):
                gen = gens[gen_index]
                g_images = [gen[x] for x in g_images]
            g_inv = [0] * space.size
            for x, y in enumerate(g_images):
                g_inv[y] = x
            for W in subspaces:
                if span_t <= W:
                    pulled = frozenset(g_inv[w] for w in W)
                    if not pulled <= union:
                        union |= pulled
                        candidates.append((g_images, W, pulled))
        for gen_index, gen in enumerate(gens):
            y = tuple(gen[x] for x in t)
            if y not in parent:
                parent[y] = (t, gen_index)
                queue.append(y)
                if len(parent) > limit:
                    raise BudgetExceeded(f"orbit of the S-tuple exceeds {limit} tuples",
                                         {"limit": limit, "S": list(S)})

    members: set = set()
    if union:
        for o in orbit_partition(pointwise_stabilizer(G, S)):
            if o & union:
                members |= o
    members = frozenset(members)
    result = AkResult(S, k, members, SHAPE_EMPTY, kandn=_kandn(G, space, S, k))
    logger.debug(f"A_{k}({list(S)}): {len(parent)} tuples, {len(members)} members")

    if not members:
        return result
    if len(members) == space.size:
        result.shape = SHAPE_FULL
        return result
    if len(members) == space.p ** k:
        for g_images, W, pulled in candidates:
            if pulled == members:
                if frozenset(g_images[x] for x in members) != W:
                    raise InternalCheckError("subspace-image witness does not map A_k(S) onto W")
                result.shape = SHAPE_SUBSPACE_IMAGE
                result.witness = g_images
                result.subspace = W
                return result
    raise TrichotomyViolation(
        f"A_{k}(S) has {len(members)} elements: neither empty, full nor a {k}-subspace image",
        {"S": list(S), "k": k, "set": sorted(members)})


def acl_pair(G: PermGroup, v: int, w: int, space: Optional[FieldSpace] = None) -> FrozenSet[int]:
    """{u : the orbit of u under G_(v,w) stays inside span(v, w)}."""
    space = space or field_space_of(G)
    v, w = space.index_of(v), space.index_of(w)
    if v == w:
        raise OutOfRange("acl needs two distinct vectors")
    span = space.span([v, w]).members
    if len(span) == space.size:
        raise DegenerateSpan(f"span of {v} and {w} is all of V", {"v": v, "w": w})
    closure = set()
    for o in orbit_partition(pointwise_stabilizer(G, [v, w])):
        if o <= span:
            closure |= o
    return frozenset(closure)
