"""Cohomology of the supercharge: betti numbers, Witten index, reports."""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .couplings import CouplingScheme, all_ones, random_scheme
from .hamiltonian import kernel_dimension
from .linalg import kernel_basis, rank
from .state_space import ChainSpec, enumerate_basis
from .supercharge import q_block, q_blocks
from . import oracle

SCHEMA_VERSION = 1


@lru_cache(maxsize=8192)
def q_ranks(spec: ChainSpec, scheme: CouplingScheme) -> tuple[int, ...]:
    return tuple(rank(q) for q in q_blocks(spec, scheme))


def betti_numbers(spec: ChainSpec, scheme: CouplingScheme | None = None) -> list[int]:
    """dim H^f for f = 0..f_max."""
    scheme = scheme or all_ones(spec.max_cluster)
    dims = enumerate_basis(spec).dims()
    r = q_ranks(spec, scheme)
    return [d - r[f] - (r[f - 1] if f else 0) for f, d in enumerate(dims)]


def betti(spec: ChainSpec, scheme: CouplingScheme | None, f: int) -> int:
    b = betti_numbers(spec, scheme)
    return b[f] if 0 <= f < len(b) else 0


def witten_index(betti: list[int]) -> int:
    return sum((-1) ** f * b for f, b in enumerate(betti))


def ground_states(spec: ChainSpec, scheme: CouplingScheme, f: int) -> list[list]:
    """Exact zero modes of H_f in the grade-f basis order.

    Signs of the components depend on the fermionic string convention.
    """
    from .hamiltonian import build_h

    return kernel_basis(build_h(spec, scheme, f))


@dataclass(frozen=True)
class GradeRow:
    f: int
    dim: int
    betti: int
    kernel_h: int | None = None


@dataclass(frozen=True)
class OracleRow:
    f: int
    predicted: int
    computed: int

    @property
    def ok(self) -> bool:
        return self.predicted == self.computed


@dataclass(frozen=True)
class CohomologyReport:
    spec: ChainSpec
    scheme_label: str
    per_grade: tuple[GradeRow, ...]
    witten_index: int
    euler_characteristic: int
    oracle_rows: tuple[OracleRow, ...] = field(default=())

    @property
    def betti(self) -> list[int]:
        return [g.betti for g in self.per_grade]

    @property
    def nonzero(self) -> dict[int, int]:
        return {g.f: g.betti for g in self.per_grade if g.betti}

    @property
    def oracle_ok(self) -> bool:
        return all(r.ok for r in self.oracle_rows)

    @property
    def hamiltonian_ok(self) -> bool | None:
        if any(g.kernel_h is None for g in self.per_grade):
            return None
        return all(g.kernel_h == g.betti for g in self.per_grade)

    def to_dict(self) -> dict:
        grades = []
        for g in self.per_grade:
            row = {"f": g.f, "dim": g.dim, "betti": g.betti}
            if g.kernel_h is not None:
                row["kernel_h"] = g.kernel_h
            grades.append(row)
        return {
            "schema_version": SCHEMA_VERSION,
            "spec": self.spec.to_dict(),
            "couplings": self.scheme_label,
            "grades": grades,
            "witten": self.witten_index,
            "euler": self.euler_characteristic,
            "oracle": [{"f": r.f, "predicted": r.predicted, "computed": r.computed, "ok": r.ok} for r in self.oracle_rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def csv_rows(self) -> list[dict]:
        pred = {r.f: r.predicted for r in self.oracle_rows}
        return [
            {
                "spec": self.spec.label(),
                "f": g.f,
                "dim": g.dim,
                "betti": g.betti,
                "predicted": pred.get(g.f, ""),
            }
            for g in self.per_grade
        ]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["spec", "f", "dim", "betti", "predicted"], lineterminator="\n")
    writer.writeheader()
    for rep in reports:
        writer.writerows(rep.csv_rows())
    return buf.getvalue()


def full_report(
    spec: ChainSpec,
    scheme: CouplingScheme | None = None,
    check_hamiltonian: bool = False,
    with_oracle: bool = True,
) -> CohomologyReport:
    scheme = scheme or all_ones(spec.max_cluster)
    dims = enumerate_basis(spec).dims()
    b = betti_numbers(spec, scheme)
    rows = []
    for f, (d, h) in enumerate(zip(dims, b)):
        k = kernel_dimension(spec, scheme, f) if check_hamiltonian else None
        rows.append(GradeRow(f, d, h, k))
    euler = witten_index(dims)
    oracle_rows = ()
    if with_oracle:
        pred = dict(oracle.predict(spec))
        grades = sorted(set(range(len(b))) | set(pred))
        oracle_rows = tuple(OracleRow(f, pred.get(f, 0), b[f] if f < len(b) else 0) for f in grades)
    return CohomologyReport(spec, scheme.label(), tuple(rows), witten_index(b), euler, oracle_rows)


def parameter_independence_check(
    spec: ChainSpec, trials: int, seed: int, schemes: Sequence[CouplingScheme] | None = None
) -> bool:
    """Betti numbers agree between the all-ones scheme and ``trials`` random nonzero schemes.

    ``schemes`` replaces the random draw (its length must equal ``trials``).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    reference = betti_numbers(spec, all_ones(spec.max_cluster))
    if schemes is None:
        rng = random.Random(seed)
        schemes = [random_scheme(spec.max_cluster, rng) for _ in range(trials)]
    elif len(schemes) != trials:
        raise ValueError("need exactly `trials` schemes")
    return all(betti_numbers(spec, s) == reference for s in schemes)


def betti_from_kernel_image(spec: ChainSpec, scheme: CouplingScheme, f: int) -> int:
    """dim ker Q_f - dim im Q_{f-1}, with the kernel counted from an explicit basis."""
    ker = len(kernel_basis(q_block(spec, scheme, f)))
    return ker - rank(q_block(spec, scheme, f - 1))
