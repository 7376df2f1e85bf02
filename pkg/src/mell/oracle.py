"""Closed-form ground-state predictions for periodic and special-boundary chains.

Every function returns a sorted list of ``(grade, multiplicity)`` pairs with
nonzero multiplicity.  The general rules for long chains are supplemented by
the short-chain statements, two of which exist in two printed readings; both
readings are exposed so that the verification sweep can adjudicate them.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .state_space import ChainSpec, Periodic, Special

Prediction = list[tuple[int, int]]


def decompose_length(n_sites: int, ell: int) -> tuple[int, int]:
    """(n, p) with N = n(ℓ+2) + p + 1 and 0 ≤ p ≤ ℓ+1."""
    if n_sites < 1 or ell < 1:
        raise ValueError("need N >= 1 and ell >= 1")
    return divmod(n_sites - 1, ell + 2)


def periodic_prediction(n_sites: int, ell: int) -> Prediction:
    n, p = decompose_length(n_sites, ell)
    if p <= ell:
        return [(n * ell + p, 1)]
    return [((n + 1) * ell, ell + 1)]


def special_long(n_sites: int, ell: int, c1: int, cN: int) -> Prediction:
    """Long-chain rule for n ≥ 1 (agrees with the short-chain statement at n = 1)."""
    n, p = decompose_length(n_sites, ell)
    out = []
    if p <= ell and min(c1, cN) >= p and c1 + cN <= ell + p:
        out.append((n * ell + p, 1))
    if p >= 1 and max(c1, cN) < p and c1 + cN >= p - 1:
        out.append((n * ell + p - 1, 1))
    return out


def short_open(n_sites: int, c1: int, cN: int) -> Prediction:
    """Short chains N ≤ ℓ+2, with caps clamped to N−1 and the unconstrained case trivial."""
    N = n_sites
    if min(c1, cN) >= N:
        return []
    e1, eN = min(c1, N - 1), min(cN, N - 1)
    if e1 == eN == N - 1:
        return [(N - 1, 1)]
    if N >= 2 and max(e1, eN) <= N - 2 and e1 + eN >= N - 2:
        return [(N - 2, 1)]
    return []


def short_open_literal(n_sites: int, ell: int, c1: int, cN: int) -> Prediction:
    """The statement as printed before the proofs, read literally on raw caps."""
    N = n_sites
    if N <= ell + 1 and ((c1 == N - 1 and cN > N - 1) or (cN == N - 1 and c1 >= N - 1)):
        return [(N - 1, 1)]
    if 2 <= N <= ell + 2 and max(c1, cN) <= N - 2 and c1 + cN >= N - 2:
        return [(N - 2, 1)]
    return []


def medium_open(n_sites: int, ell: int, c1: int, cN: int) -> Prediction:
    """Short chains ℓ+3 ≤ N ≤ 2ℓ+2."""
    N = n_sites
    if min(c1, cN) >= N - ell - 3 and c1 + cN < N - 2:
        return [(N - 3, 1)]
    if ell + 3 < N and max(c1, cN) < N - ell - 3 and c1 + cN >= N - ell - 4:
        return [(N - 4, 1)]
    return []


def short_ring_literal(n_sites: int, ell: int) -> Prediction:
    """Periodic N ≤ ℓ+2 with the printed particle count N−1 at every length."""
    return [(n_sites - 1, ell + 1 if n_sites == ell + 2 else 1)]


def medium_ring(n_sites: int) -> Prediction:
    return [(n_sites - 3, 1)]


def predict(spec: ChainSpec) -> Prediction:
    N, ell = spec.n_sites, spec.max_cluster
    if isinstance(spec.boundary, Periodic):
        return periodic_prediction(N, ell)
    c1, cN = spec.boundary.c1, spec.boundary.cN
    n, _ = decompose_length(N, ell)
    if n >= 1:
        return special_long(N, ell, c1, cN)
    return short_open(N, c1, cN)


def short_chain_prediction(spec: ChainSpec) -> Prediction | None:
    """Short-chain statement covering ``spec`` (N ≤ 2ℓ+2), or None for longer chains."""
    N, ell = spec.n_sites, spec.max_cluster
    if N > 2 * ell + 2:
        return None
    if isinstance(spec.boundary, Periodic):
        return periodic_prediction(N, ell) if N <= ell + 2 else medium_ring(N)
    c1, cN = spec.boundary.c1, spec.boundary.cN
    if N <= ell + 2:
        return short_open(N, c1, cN)
    return medium_open(N, ell, c1, cN)


def witten_from_prediction(pred: Prediction) -> int:
    return sum((-1) ** f * m for f, m in pred)


@dataclass(frozen=True)
class RegionCell:
    c1: int
    cN: int
    prediction: tuple[tuple[int, int], ...]
    region: int = 0  # 0 trivial, 1 upper-grade family, 2 lower-grade family

    @property
    def label(self) -> str:
        return {0: ".", 1: "i", 2: "ii"}[self.region]

    @property
    def multiplicity(self) -> int:
        return sum(m for _, m in self.prediction)


def _region_of(spec: ChainSpec, pred: Prediction) -> int:
    if not pred:
        return 0
    n, p = decompose_length(spec.n_sites, spec.max_cluster)
    (f, _), = pred
    if n >= 1:
        return 1 if f == n * spec.max_cluster + p else 2
    return 1 if f == spec.n_sites - 1 else 2


def region_table(ell: int, n_sites: int) -> list[list[RegionCell]]:
    """Grid of predictions indexed ``[c1][cN]`` for 0 ≤ c1, cN ≤ ℓ."""
    grid = []
    for c1 in range(ell + 1):
        row = []
        for cN in range(ell + 1):
            spec = ChainSpec(n_sites, ell, Special(c1, cN))
            pred = predict(spec)
            row.append(RegionCell(c1, cN, tuple(pred), _region_of(spec, pred)))
        grid.append(row)
    return grid


def render_diagram(grid: list[list[RegionCell]]) -> str:
    """Character diagram: c1 increases to the right, cN upwards; '.' marks gray cells."""
    ell = len(grid) - 1
    lines = []
    for cN in range(ell, -1, -1):
        cells = " ".join(f"{grid[c1][cN].label:>2}" for c1 in range(ell + 1))
        lines.append(f"cN={cN:<2}| {cells}")
    lines.append("     +" + "---" * (ell + 1))
    lines.append("  c1=  " + " ".join(f"{c:>2}" for c in range(ell + 1)))
    return "\n".join(lines)


def region_csv(grid: list[list[RegionCell]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["c1", "cN", "region", "grade", "multiplicity"])
    for row in grid:
        for cell in row:
            grade = cell.prediction[0][0] if cell.prediction else ""
            writer.writerow([cell.c1, cell.cN, cell.label, grade, cell.multiplicity])
    return buf.getvalue()
