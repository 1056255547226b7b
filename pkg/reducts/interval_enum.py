#!/usr/bin/env python3
"""
Exhaustive enumeration of the groups between Aut(V) and Sym(V) for tiny V.

Breadth-first over the overgroup lattice: starting from GL(V), every group K on
the frontier is extended by one representative g of each double coset KgK
outside K. <K, k1 g k2> = <K, g> for k1, k2 in K, so one representative per
double coset loses nothing. Double cosets are the connected components of the
graph on Sym(p^n) joining g to k g and g k for the generators k of K.
"""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy.combinatorics import Permutation

from algebra.errors import BoundsExceeded, check_deadline
from algebra.field_space import field_space
from algebra.perm_engine import PermGroup, equals, fingerprint, gl_group, perm_to_line
from reducts.classification import CASE_UNCLASSIFIED, CatalogEntry, ClassificationRecord, classify

logger = logging.getLogger(__name__)

MAX_ENUMERATION_POINTS = 9


@dataclass
class IntervalGroup:
    group: PermGroup
    record: ClassificationRecord

    def to_json(self) -> Dict[str, Any]:
        return {
            "order": str(self.group.order()),
            "generators": [perm_to_line(g) for g in self.group.generators],
            "record": self.record.to_json(),
        }


@dataclass
class IntervalReport:
    p: int
    n: int
    groups: List[IntervalGroup]
    joins: int = 0
    matched_catalog: List[Dict[str, Any]] = field(default_factory=list)
    unmatched: List[Dict[str, Any]] = field(default_factory=list)
    catalog_unmatched: List[Dict[str, Any]] = field(default_factory=list)
    wall_time: Optional[float] = None

    def to_json(self) -> Dict[str, Any]:
        # wall_time is written to the timing sidecar, not here
        return {
            "p": self.p,
            "n": self.n,
            "count": len(self.groups),
            "joins": self.joins,
            "groups": [g.to_json() for g in self.groups],
            "matched_catalog": self.matched_catalog,
            "unmatched": self.unmatched,
            "catalog_unmatched": self.catalog_unmatched,
        }


def all_permutations(degree: int) -> np.ndarray:
    """Sym(degree) as a (degree!, degree) array in lexicographic order."""
    return np.array(list(itertools.permutations(range(degree))), dtype=np.int8).reshape(-1, degree)


def lehmer_ranks(perms: np.ndarray) -> np.ndarray:
    """Lexicographic rank of each row; matches the row order of all_permutations."""
    count, degree = perms.shape
    ranks = np.zeros(count, dtype=np.int64)
    for i in range(degree - 1):
        smaller_after = (perms[:, i + 1:] < perms[:, i:i + 1]).sum(axis=1)
        ranks += smaller_after * math.factorial(degree - 1 - i)
    return ranks


def double_coset_representatives(K: PermGroup, perms: np.ndarray) -> List[List[int]]:
    """Least element of every double coset KgK other than K itself."""
    count = perms.shape[0]
    src = np.arange(count, dtype=np.int64)
    rows, cols = [], []
    for k in K.generator_images():
        k = np.asarray(k, dtype=np.int64)
        rows.extend([src, src])
        cols.append(lehmer_ranks(perms[:, k]))
        cols.append(lehmer_ranks(k[perms].astype(np.int8)))
    graph = coo_matrix((np.ones(count * len(cols), dtype=np.int8),
                        (np.concatenate(rows), np.concatenate(cols))), shape=(count, count))
    _, labels = connected_components(graph, directed=True, connection="weak")
    identity_label = labels[0]
    _, first = np.unique(labels, return_index=True)
    return [perms[i].tolist() for i in sorted(first.tolist()) if labels[i] != identity_label]


def _join_with(args) -> PermGroup:
    generators, images, degree, seed = args
    group = PermGroup([Permutation(g) for g in generators] + [Permutation(images)], degree=degree, seed=seed)
    fingerprint(group)
    return group


def enumerate_overgroups(p: int, n: int, max_points: int = MAX_ENUMERATION_POINTS,
                         workers: int = 1, deadline: Optional[float] = None,
                         seed: int = 0) -> IntervalReport:
    """Every group between GL(V) and Sym(V), each classified."""
    space = field_space(p, n)
    degree = space.size
    if degree > max_points:
        raise BoundsExceeded(f"overgroup enumeration is limited to p^n <= {max_points}, got {degree}",
                             {"p": p, "n": n, "max_points": max_points})
    if degree > MAX_ENUMERATION_POINTS:
        logger.warning(f"enumerating overgroups in Sym({degree}); this walks all {math.factorial(degree)} permutations per group")

    perms = all_permutations(degree)
    start = gl_group(p, n)
    groups: List[PermGroup] = [start]
    frontier: List[PermGroup] = [start]
    joins = 0
    layer = 0
    while frontier:
        layer += 1
        fresh: List[PermGroup] = []
        for K in frontier:
            check_deadline(deadline, "overgroup enumeration")
            reps = double_coset_representatives(K, perms)
            jobs = [([g.array_form for g in K.generators], rep, degree, seed) for rep in reps]
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    joined = list(pool.map(_join_with, jobs, chunksize=16))
            else:
                joined = []
                for job in jobs:
                    check_deadline(deadline, "overgroup enumeration")
                    joined.append(_join_with(job))
            joins += len(joined)
            for J in joined:
                if any(fingerprint(J) == fingerprint(G) and equals(J, G) for G in groups):
                    continue
                groups.append(J)
                fresh.append(J)
            logger.debug(f"K of order {K.order()}: {len(reps)} double cosets")
        logger.info(f"layer {layer}: {len(fresh)} new groups, {len(groups)} in total")
        frontier = fresh

    groups.sort(key=lambda G: (G.order(), [perm_to_line(g) for g in G.generators]))
    classified = [IntervalGroup(G, classify(G, space)) for G in groups]
    return IntervalReport(p, n, classified, joins=joins)


def cross_check(report: IntervalReport, entries: Sequence[CatalogEntry]) -> IntervalReport:
    """Pair catalog groups with enumerated groups and list what does not pair up."""
    matched_groups = set()
    report.matched_catalog = []
    report.catalog_unmatched = []
    for ci, entry in enumerate(entries):
        if entry.record.p != report.p or entry.record.n != report.n:
            raise ValueError("catalog and enumeration are for different (p, n)")
        hit = next((gi for gi, item in enumerate(report.groups) if equals(item.group, entry.group)), None)
        if hit is None:
            report.catalog_unmatched.append({"catalog_index": ci, "order": str(entry.group.order()),
                                             "case": entry.record.case})
            continue
        matched_groups.add(hit)
        report.matched_catalog.append({"catalog_index": ci, "group_index": hit,
                                       "order": str(entry.group.order()), "case": entry.record.case})

    report.unmatched = []
    for gi, item in enumerate(report.groups):
        reasons = []
        if item.record.case == CASE_UNCLASSIFIED:
            reasons.append("unclassified: " + "; ".join(item.record.notes))
        if gi not in matched_groups:
            reasons.append("no catalog group is equal to it")
        if reasons:
            report.unmatched.append({"group_index": gi, "order": str(item.group.order()),
                                     "case": item.record.case, "reasons": reasons})
    logger.info(f"cross-check: {len(report.matched_catalog)} catalog groups matched, "
                f"{len(report.unmatched)} enumerated groups unmatched")
    return report
