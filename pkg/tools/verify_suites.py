#!/usr/bin/env python3
"""
Property suites run by `reduct-atlas verify`.

Each suite checks exact laws on seeded random instances (or exhaustively where
the instance is tiny) and raises PropertyViolation with the first
counterexample it meets. A passing suite returns a summary of what it checked.
"""

import argparse
import itertools
import json
import logging
import random
import sys
from typing import Any, Callable, Dict

from sympy.combinatorics import Permutation

from algebra.errors import (
    BudgetExceeded,
    InternalCheckError,
    PropertyViolation,
    ReductAtlasError,
    check_deadline,
)
from algebra.field_space import FieldSpace
from algebra.perm_engine import (
    PermGroup,
    equals,
    generate,
    gl_group,
    join,
    orbit,
    pointwise_stabilizer,
    sym_fixing_zero,
    sym_group,
)
from reducts.classification import (
    MAX_SIGMA_GROUP_DEGREE,
    SHAPE_SUBSPACE_IMAGE,
    SigmaGroup,
    a_k_set,
    acl_pair,
    build_G_NH,
    catalog,
    g_nh_order,
    in_G_NH,
    normal_pairs,
)
from reducts.gamma_sigma import (
    Labelling,
    SigmaPerm,
    compute_gamma,
    full_gamma,
    gamma_subgroups,
    is_label_preserving,
    lift_on_class,
    make_labelling,
    sigma,
    sim_classes,
    sym_f_group,
)
from reducts.geometry import (
    MAX_BRUTE_R_POINTS,
    ProjPerm,
    agl_group,
    brute_aut_of_R,
    ftag_decompose,
    ftpg_reconstruct,
    preserves_affine_lines,
    preserves_projective_lines,
    projective_action,
    projective_points,
    projective_space,
)
from reducts.interval_enum import MAX_ENUMERATION_POINTS, cross_check, enumerate_overgroups
from tools.run_config import RunConfig

logger = logging.getLogger(__name__)

IDEMPOTENCE_ORBIT_LIMIT = 20_000


def _fail(law: str, **details) -> None:
    raise PropertyViolation(f"{law} violated", {"law": law, **_jsonable(details)})


def _jsonable(value):
    if isinstance(value, Permutation):
        return value.array_form
    if isinstance(value, SigmaPerm):
        return value.one_line()
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in value]
        return sorted(items) if isinstance(value, (set, frozenset)) else items
    return value


def class_fixing_group(f: Labelling) -> PermGroup:
    """Sym*(V): every permutation acting trivially on V/~."""
    domain = f.gamma.elements
    degree = len(f.labels)
    if len(domain) == 1:
        return PermGroup([], degree=degree)
    swap = SigmaPerm(domain, (domain[1], domain[0]) + domain[2:])
    cycle = SigmaPerm(domain, domain[1:] + domain[:1])
    gens = []
    for c in range(1, len(f.partition.classes)):
        gens.append(lift_on_class(f, c, swap))
        gens.append(lift_on_class(f, c, cycle))
    return generate(gens, degree=degree)


def class_permuting_group(f: Labelling) -> PermGroup:
    """All permutations fixing 0 that map classes onto classes."""
    part = f.partition
    return join(class_fixing_group(f), sym_f_group(f, part), gl_group(part.p, part.n))


# ---------------------------------------------------------------------------
# sigma laws
# ---------------------------------------------------------------------------

def suite_sigma(cfg: RunConfig) -> Dict[str, Any]:
    rng = random.Random(cfg.seed)
    space = cfg.space()
    checks = {"composition": 0, "inverse": 0, "conjugation": 0, "relabelling": 0,
              "class_constancy": 0, "membership": 0}
    gl = gl_group(space.p, space.n)
    for gamma in gamma_subgroups(space.p):
        part = sim_classes(space.p, space.n, gamma)
        f = make_labelling(part)
        star = class_fixing_group(f)
        permuting = class_permuting_group(f)
        sym_f = sym_f_group(f, part)
        nonzero = list(range(1, space.size))

        for _ in range(cfg.samples):
            check_deadline(cfg.deadline, "sigma suite")
            g = permuting.random_element(rng)
            h = permuting.random_element(rng)
            v = rng.choice(nonzero)
            vg = g.array_form[v]
            if sigma(f, g * h, v) != sigma(f, g, v) * sigma(f, h, vg):
                _fail("composition law", gamma=gamma.elements, g=g, h=h, v=v)
            checks["composition"] += 1
            if sigma(f, ~g, vg) != ~sigma(f, g, v):
                _fail("inverse law", gamma=gamma.elements, g=g, v=v)
            checks["inverse"] += 1

            gamma_el = gl.random_element(rng)
            s = star.random_element(rng)
            v_gamma = gamma_el.array_form[v]
            c = f(v_gamma) * gamma.inverse(f(v)) % space.p
            lhs = sigma(f, gamma_el * s * ~gamma_el, v)
            rhs = gamma.mult(c) * sigma(f, s, v_gamma) * gamma.mult(gamma.inverse(c))
            if lhs != rhs:
                _fail("conjugation law", gamma=gamma.elements, conjugator=gamma_el, g=s, v=v)
            checks["conjugation"] += 1

            reps = [rng.choice(sorted(members)) for members in part.nonzero_classes]
            f2 = make_labelling(part, representatives=reps)
            lam = f2(v) * gamma.inverse(f(v)) % space.p
            lhs = sigma(f2, s, v)
            rhs = gamma.mult(gamma.inverse(lam)) * sigma(f, s, v) * gamma.mult(lam)
            if lhs != rhs:
                _fail("relabelling law", gamma=gamma.elements, g=s, v=v, representatives=reps)
            checks["relabelling"] += 1

            if sym_f.contains(g) != is_label_preserving(f, g):
                _fail("membership criterion", gamma=gamma.elements, g=g)
            checks["membership"] += 1

        for _ in range(max(1, cfg.samples // 100)):
            g = permuting.random_element(rng)
            for members in part.nonzero_classes:
                values = {sigma(f, g, u) for u in members}
                if len(values) != 1:
                    _fail("class constancy", gamma=gamma.elements, g=g, cls=members)
                checks["class_constancy"] += 1
        logger.info(f"sigma laws hold for Gamma={list(gamma.elements)}")
    return checks


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

def suite_geometry(cfg: RunConfig) -> Dict[str, Any]:
    rng = random.Random(cfg.seed)
    space = cfg.space()
    p, n = space.p, space.n
    checks: Dict[str, Any] = {}
    expected_points = (p ** n - 1) // (p - 1)
    if len(projective_points(p, n)) != expected_points:
        _fail("projective point count", expected=expected_points)
    checks["projective_points"] = expected_points

    gl = gl_group(p, n)
    samples = min(cfg.samples, 100)
    if n >= 3:
        accepted = rejected = 0
        for _ in range(samples):
            check_deadline(cfg.deadline, "geometry suite")
            g = gl.random_element(rng)
            q = projective_action(space, g)
            rebuilt = ftpg_reconstruct(space, q)
            if rebuilt is None or projective_action(space, rebuilt) != q:
                _fail("projective reconstruction of a linear map", g=g)
            accepted += 1
        count = len(projective_space(p, n))
        for _ in range(samples):
            images = list(range(count))
            rng.shuffle(images)
            q = ProjPerm(tuple(images))
            rebuilt = ftpg_reconstruct(space, q)
            if (rebuilt is None) == preserves_projective_lines(space, q):
                _fail("projective reconstruction agrees with the line test", q=list(q.images))
            rejected += rebuilt is None
        checks["ftpg_accepted"] = accepted
        checks["ftpg_rejected"] = rejected

    agl = agl_group(p, n)
    decomposed = 0
    if agl.order() <= 10 ** 4:
        members = list(agl.elements())
    else:
        members = [agl.random_element(rng) for _ in range(samples)]
    for g in members:
        split = ftag_decompose(space, g)
        if split is None:
            _fail("affine decomposition of an AGL element", g=g)
        decomposed += 1
    checks["ftag_decomposed"] = decomposed

    outsiders = 0
    sym = sym_group(space.size)
    for _ in range(samples):
        g = sym.random_element(rng)
        in_agl = agl.contains(g)
        if (ftag_decompose(space, g) is not None) != in_agl:
            _fail("affine decomposition exactly on AGL", g=g)
        if preserves_affine_lines(space, g) != in_agl:
            _fail("affine line preservation characterises AGL", g=g)
        outsiders += not in_agl
    checks["ftag_outsiders"] = outsiders

    if space.size <= MAX_BRUTE_R_POINTS:
        group, survivors = brute_aut_of_R(p, n, workers=cfg.workers)
        if survivors != agl.order() or not equals(group, agl):
            _fail("Aut(R) = AGL", survivors=survivors, agl_order=agl.order())
        checks["aut_r_survivors"] = survivors
    return checks


# ---------------------------------------------------------------------------
# acl
# ---------------------------------------------------------------------------

def suite_acl(cfg: RunConfig) -> Dict[str, Any]:
    space = cfg.space()
    agl = agl_group(space.p, space.n)
    sym = sym_group(space.size)
    checks = {"pairs": 0, "exchange": 0, "through_zero": 0, "sym_pairs": 0}
    rng = random.Random(cfg.seed)
    for v, w in itertools.combinations(range(space.size), 2):
        check_deadline(cfg.deadline, "acl suite")
        if len(space.span([v, w]).members) == space.size:
            continue
        closure = acl_pair(agl, v, w, space)
        if closure != space.affine_line(v, w) or len(closure) != space.p:
            _fail("acl equals the affine line", v=v, w=w, acl=closure)
        checks["pairs"] += 1
        x, y = sorted(closure - {v})[:1] + [v]
        if acl_pair(agl, x, y, space) != closure:
            _fail("acl exchange", v=v, w=w, x=x, y=y)
        checks["exchange"] += 1
        if v == 0:
            if closure != space.span([w]).members:
                _fail("acl through zero is a line", u=w, acl=closure)
            checks["through_zero"] += 1
    pairs = [pair for pair in itertools.combinations(range(space.size), 2)
             if len(space.span(list(pair)).members) < space.size]
    for v, w in rng.sample(pairs, min(len(pairs), 10)):
        if acl_pair(sym, v, w, space) != frozenset({v, w}):
            _fail("acl for Sym(V) is the pair itself", v=v, w=w)
        checks["sym_pairs"] += 1
    return checks


# ---------------------------------------------------------------------------
# A_k
# ---------------------------------------------------------------------------

def _akset_groups(space: FieldSpace) -> Dict[str, PermGroup]:
    p, n = space.p, space.n
    gamma = full_gamma(p)
    part = sim_classes(p, n, gamma)
    f = make_labelling(part)
    flips = SigmaGroup.symmetric(gamma.elements) if len(gamma) <= MAX_SIGMA_GROUP_DEGREE else None
    groups = {"gl": gl_group(p, n), "sym0": sym_fixing_zero(space.size)}
    if flips is not None:
        per_class = build_G_NH(flips, flips, part, f)
        groups["gl_class_fixing"] = join(per_class, gl_group(p, n))
        groups["gl_sym_f"] = join(per_class, sym_f_group(f, part), gl_group(p, n))
    return groups


def suite_akset(cfg: RunConfig) -> Dict[str, Any]:
    rng = random.Random(cfg.seed)
    space = cfg.space()
    k = min(2, space.n)
    nonzero = list(range(1, space.size))
    checks = {"shapes": {}, "antitone": 0, "chain": 0, "idempotent": 0,
              "idempotent_skipped": 0, "stabiliser_orbits": 0}
    samples = min(cfg.samples, 100)
    for name, G in _akset_groups(space).items():
        gamma = compute_gamma(G, space)
        for _ in range(samples):
            check_deadline(cfg.deadline, "akset suite")
            S = rng.sample(nonzero, rng.randint(1, min(2, len(nonzero) - 1)))
            M = S + [rng.choice([x for x in nonzero if x not in S])]
            small = a_k_set(G, S, k, limit=cfg.max_orbit, space=space)
            big = a_k_set(G, M, k, limit=cfg.max_orbit, space=space)
            for result in (small, big):
                checks["shapes"][result.shape] = checks["shapes"].get(result.shape, 0) + 1
                if result.shape == SHAPE_SUBSPACE_IMAGE and len(result.members) != space.p ** k:
                    _fail("subspace image has p^k elements", group=name, S=result.S)
            if not big.members <= small.members:
                _fail("A_k is antitone", group=name, S=S, M=M)
            checks["antitone"] += 1

            span_s = space.span(S).members
            if small.shape == SHAPE_SUBSPACE_IMAGE:
                classes = {space.scale(lam, s) for s in S for lam in gamma.elements}
                if not (set(S) <= classes <= small.members <= span_s):
                    _fail("S within [S] within A_k(S) within span(S)", group=name, S=S)
                checks["chain"] += 1
                try:
                    again = a_k_set(G, sorted(small.members - {0}), k,
                                    limit=min(cfg.max_orbit, IDEMPOTENCE_ORBIT_LIMIT), space=space)
                    if again.members != small.members:
                        _fail("A_k is idempotent", group=name, S=S)
                    checks["idempotent"] += 1
                except BudgetExceeded:
                    checks["idempotent_skipped"] += 1

            outside = [x for x in range(space.size) if x not in span_s]
            if outside:
                reach = orbit(pointwise_stabilizer(G, S), outside[0])
                if not set(outside) <= reach:
                    _fail("stabiliser orbits cover V outside span(S)", group=name, S=S)
                checks["stabiliser_orbits"] += 1
        logger.info(f"A_{k} checks passed for {name}")
    return checks


# ---------------------------------------------------------------------------
# G(N, H)
# ---------------------------------------------------------------------------

def suite_gnh_order(cfg: RunConfig) -> Dict[str, Any]:
    rng = random.Random(cfg.seed)
    space = cfg.space()
    checks = {"pairs": 0, "sampled_members": 0, "enumerated_class_fixing": 0}
    for gamma in gamma_subgroups(space.p):
        if len(gamma) > MAX_SIGMA_GROUP_DEGREE:
            continue
        part = sim_classes(space.p, space.n, gamma)
        f = make_labelling(part)
        star = class_fixing_group(f)
        for N, H in normal_pairs(gamma.elements):
            check_deadline(cfg.deadline, "gnh-order suite")
            try:
                group = build_G_NH(N, H, part, f)
            except InternalCheckError as e:
                _fail("G(N,H) order formula", N=N.to_json(), H=H.to_json(), error=str(e))
            expected = g_nh_order(N, H, part.num_nonzero)
            checks["pairs"] += 1
            for _ in range(min(cfg.samples, 200)):
                g = group.random_element(rng)
                if not in_G_NH(f, g, N, H):
                    _fail("G(N,H) members satisfy the coset conditions", N=N.to_json(), H=H.to_json(), g=g)
                checks["sampled_members"] += 1
            if star.order() <= 10 ** 4:
                hits = 0
                for g in star.elements():
                    member = in_G_NH(f, g, N, H)
                    if member != group.contains(g):
                        _fail("coset conditions characterise G(N,H)", N=N.to_json(), H=H.to_json(), g=g)
                    hits += member
                if hits != expected:
                    _fail("G(N,H) order formula by enumeration", expected=expected, found=hits)
                checks["enumerated_class_fixing"] += star.order()
    return checks


# ---------------------------------------------------------------------------
# interval
# ---------------------------------------------------------------------------

def suite_interval(cfg: RunConfig) -> Dict[str, Any]:
    space = cfg.space()
    bound = max(MAX_ENUMERATION_POINTS, space.size) if cfg.allow_large else MAX_ENUMERATION_POINTS
    report = enumerate_overgroups(space.p, space.n, max_points=bound,
                                  workers=cfg.workers, deadline=cfg.deadline, seed=cfg.seed)
    groups = [item.group for item in report.groups]
    gl = gl_group(space.p, space.n)
    for i, G in enumerate(groups):
        if not all(G.contains(g) for g in gl.generators):
            _fail("every enumerated group contains Aut(V)", index=i)
    for i, j in itertools.combinations(range(len(groups)), 2):
        if equals(groups[i], groups[j]):
            _fail("enumerated groups are pairwise distinct", first=i, second=j)
    for name, target in (("GL", gl), ("Sym", sym_group(space.size)),
                         ("AGL", agl_group(space.p, space.n)), ("Sym_0", sym_fixing_zero(space.size))):
        if not any(equals(G, target) for G in groups):
            _fail("landmark group present", group=name)
    entries = catalog(space.p, space.n, workers=cfg.workers, deadline=cfg.deadline,
                      max_points=max(space.size, MAX_ENUMERATION_POINTS))
    cross_check(report, entries)
    if report.catalog_unmatched:
        _fail("every catalog group is enumerated", unmatched=report.catalog_unmatched)
    return {"groups": len(groups), "joins": report.joins,
            "matched_catalog": len(report.matched_catalog), "unmatched": len(report.unmatched)}


SUITES: Dict[str, Callable[[RunConfig], Dict[str, Any]]] = {
    "sigma": suite_sigma,
    "sigma-laws": suite_sigma,
    "geometry": suite_geometry,
    "acl": suite_acl,
    "akset": suite_akset,
    "gnh-order": suite_gnh_order,
    "interval": suite_interval,
}


def run_suite(cfg: RunConfig, name: str) -> Dict[str, Any]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    logger.info(f"Running suite {name} at p={cfg.p} n={cfg.n} seed={cfg.seed}")
    checks = SUITES[name](cfg)
    logger.info(f"Suite {name} passed: {checks}")
    return {"suite": name, "passed": True, "checks": checks}


def main():
    parser = argparse.ArgumentParser(description="Run one property suite and print its summary")
    parser.add_argument("--suite", required=True, choices=sorted(SUITES))
    parser.add_argument("--p", type=int, default=3)
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=1000)
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    cfg = RunConfig(command="verify", p=args.p, n=args.n, seed=args.seed, samples=args.samples)
    try:
        result = run_suite(cfg.validate(), args.suite)
    except ReductAtlasError as e:
        print(json.dumps(e.to_dict(), indent=2, sort_keys=True))
        sys.exit(e.exit_code)
    print(json.dumps(result, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
