"""Exhaustive check of the two extremal bounds on connected (10, 15) graphs.

For every graph: the smallest nonzero Laplacian eigenvalue is at most 2, and
the product of the nonzero Laplacian eigenvalues (v times the spanning-tree
count) is at most 20000.  Equality cases are decided in integer arithmetic.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from ..spectra import integer_eigenvalue_certificate, spanning_tree_count, sym_eig_batch
from .canon import certificate
from .graph import Graph, petersen

ORDER, SIZE = 10, 15
MU_BOUND = 2
PRODUCT_BOUND = 20000
FLOAT_TOL = 1e-7
ESCALATE_TOL = 1e-5
CHUNK = 4096


@dataclass
class PropTeReport:
    total_connected: int = 0
    mu9_bound_violations: list = field(default_factory=list)
    mu9_equality_witnesses: list = field(default_factory=list)
    product_bound_violations: list = field(default_factory=list)
    product_equality_witnesses: list = field(default_factory=list)
    precondition_errors: list = field(default_factory=list)
    min_degree_violations: list = field(default_factory=list)
    regular_count: int = 0
    max_mu9: float = 0.0
    max_product: int = 0

    def merge(self, other: "PropTeReport") -> "PropTeReport":
        return PropTeReport(
            self.total_connected + other.total_connected,
            self.mu9_bound_violations + other.mu9_bound_violations,
            self.mu9_equality_witnesses + other.mu9_equality_witnesses,
            self.product_bound_violations + other.product_bound_violations,
            self.product_equality_witnesses + other.product_equality_witnesses,
            self.precondition_errors + other.precondition_errors,
            self.min_degree_violations + other.min_degree_violations,
            self.regular_count + other.regular_count,
            max(self.max_mu9, other.max_mu9),
            max(self.max_product, other.max_product),
        )

    @property
    def violations(self) -> int:
        return (len(self.mu9_bound_violations) + len(self.product_bound_violations)
                + len(self.min_degree_violations))

    def witnesses_are_petersen(self) -> bool:
        target = certificate(petersen())
        return (sorted(set(self.mu9_equality_witnesses)) == [target]
                and sorted(set(self.product_equality_witnesses)) == [target])

    @property
    def verified(self) -> bool:
        return self.violations == 0 and not self.precondition_errors and self.witnesses_are_petersen()

    def to_record(self) -> dict:
        return {
            "total_connected": self.total_connected,
            "regular_count": self.regular_count,
            "max_mu9": self.max_mu9,
            "max_product": self.max_product,
            "mu9_bound_violations": self.mu9_bound_violations,
            "mu9_equality_witnesses": sorted(set(self.mu9_equality_witnesses)),
            "product_bound_violations": self.product_bound_violations,
            "product_equality_witnesses": sorted(set(self.product_equality_witnesses)),
            "min_degree_violations": self.min_degree_violations,
            "precondition_errors": self.precondition_errors,
            "witnesses_are_petersen": self.witnesses_are_petersen(),
            "verified": self.verified,
        }


def _check_chunk(graphs: list[Graph]) -> PropTeReport:
    rep = PropTeReport()
    good = []
    for g in graphs:
        if g.n != ORDER or g.m != SIZE or not g.is_connected():
            rep.precondition_errors.append(
                {"graph6": g.to_graph6(), "n": g.n, "m": g.m, "connected": g.is_connected()})
        else:
            good.append(g)
    if not good:
        return rep
    eigs = sym_eig_batch(np.array([g.laplacian() for g in good], dtype=float))
    for g, e in zip(good, eigs):
        rep.total_connected += 1
        mu9 = float(e[-2])
        degs = g.degrees()
        regular = len(set(degs)) == 1
        rep.regular_count += regular
        rep.max_mu9 = max(rep.max_mu9, mu9)
        if mu9 > MU_BOUND + FLOAT_TOL:
            rep.mu9_bound_violations.append({"graph6": g.to_graph6(), "mu9": mu9})
        elif abs(mu9 - MU_BOUND) < ESCALATE_TOL and integer_eigenvalue_certificate(g, MU_BOUND):
            rep.mu9_equality_witnesses.append(certificate(g))
        if not regular and mu9 > min(degs) + FLOAT_TOL:
            rep.min_degree_violations.append({"graph6": g.to_graph6(), "mu9": mu9})
        product = g.n * spanning_tree_count(g)
        rep.max_product = max(rep.max_product, product)
        if product > PRODUCT_BOUND:
            rep.product_bound_violations.append({"graph6": g.to_graph6(), "product": product})
        elif product == PRODUCT_BOUND:
            rep.product_equality_witnesses.append(certificate(g))
    return rep


def _chunks(graphs: Iterable[Graph], size: int) -> Iterator[list[Graph]]:
    buf = []
    for g in graphs:
        buf.append(g)
        if len(buf) == size:
            yield buf
            buf = []
    if buf:
        yield buf


def verify_prop_te(graphs: Iterable[Graph], jobs: int = 1) -> PropTeReport:
    report = PropTeReport()
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            for part in pool.map(_check_chunk, _chunks(graphs, CHUNK)):
                report = report.merge(part)
    else:
        for chunk in _chunks(graphs, CHUNK):
            report = report.merge(_check_chunk(chunk))
    return report
