"""Sublattice splitting of the supercharge and the two-step cohomology.

For a site subset S1 the supercharge splits as Q = Q1 + Q2, where Q1 only
inserts particles on S1 and Q2 only on the complement.  Both pieces keep the
amplitudes of the full chain.  Configurations are graded by (f1, f2), the
particle counts on S1 and its complement.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .couplings import CouplingScheme, all_ones
from .linalg import StructuralViolation, complement, induced_quotient_map, kernel_basis, rank
from .matrix import SparseRationalMatrix, block
from .state_space import ChainSpec, enumerate_basis, popcount
from .supercharge import insertion_terms, q_block

Bigrade = tuple[int, int]


def prefix_split(spec: ChainSpec) -> frozenset[int]:
    """The first ℓ+2 sites (cut and paste)."""
    return frozenset(range(1, min(spec.max_cluster + 2, spec.n_sites) + 1))


def three_rule_split(spec: ChainSpec) -> frozenset[int]:
    """Isolated sites 1, ℓ+3, 2ℓ+5, ... spaced by ℓ+2."""
    return frozenset(range(1, spec.n_sites + 1, spec.max_cluster + 2))


PRESETS: dict[str, Callable[[ChainSpec], frozenset[int]]] = {
    "prefix": prefix_split,
    "three-rule": three_rule_split,
}


def preset_split(name: str, spec: ChainSpec) -> frozenset[int]:
    try:
        return PRESETS[name](spec)
    except KeyError:
        raise ValueError(f"unknown split preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass
class BigradedComplex:
    spec: ChainSpec
    s1: frozenset[int]
    scheme: CouplingScheme
    bases: dict[Bigrade, list[int]]
    q1_blocks: dict[Bigrade, SparseRationalMatrix] = field(repr=False)
    q2_blocks: dict[Bigrade, SparseRationalMatrix] = field(repr=False)

    def dim(self, g: Bigrade) -> int:
        return len(self.bases.get(g, ()))

    def q1(self, g: Bigrade) -> SparseRationalMatrix:
        """Q1 from ``g`` to ``(f1+1, f2)``; zero map when not stored."""
        if g in self.q1_blocks:
            return self.q1_blocks[g]
        return SparseRationalMatrix(self.dim((g[0] + 1, g[1])), self.dim(g))

    def q2(self, g: Bigrade) -> SparseRationalMatrix:
        if g in self.q2_blocks:
            return self.q2_blocks[g]
        return SparseRationalMatrix(self.dim((g[0], g[1] + 1)), self.dim(g))

    @property
    def bigrades(self) -> list[Bigrade]:
        return sorted(self.bases)

    def structural_checks(self) -> dict[str, bool]:
        """Exact checks of Q1² = 0, Q2² = 0 and Q1Q2 + Q2Q1 = 0 on every bigrade."""
        q1_sq = q2_sq = anti = True
        for f1, f2 in self.bigrades:
            g = (f1, f2)
            q1_sq &= (self.q1((f1 + 1, f2)) @ self.q1(g)).is_zero()
            q2_sq &= (self.q2((f1, f2 + 1)) @ self.q2(g)).is_zero()
            anti &= (self.q1((f1, f2 + 1)) @ self.q2(g) + self.q2((f1 + 1, f2)) @ self.q1(g)).is_zero()
        return {"q1_squared": q1_sq, "q2_squared": q2_sq, "anticommute": anti}

    def reassembles(self) -> bool:
        """Q1 + Q2, mapped back to fermion-number blocks, equals Q."""
        basis = enumerate_basis(self.spec)
        for f in range(basis.f_max + 1):
            row_of = {w: i for i, w in enumerate(basis.grade(f + 1))}
            col_of = {w: i for i, w in enumerate(basis.grade(f))}
            entries: dict[tuple[int, int], object] = defaultdict(int)
            for (f1, f2), words in self.bases.items():
                if f1 + f2 != f:
                    continue
                for mat, tgt in ((self.q1((f1, f2)), (f1 + 1, f2)), (self.q2((f1, f2)), (f1, f2 + 1))):
                    tw = self.bases.get(tgt, [])
                    for r, c, v in mat.entries:
                        entries[(row_of[tw[r]], col_of[words[c]])] += v
            full = SparseRationalMatrix.from_entries(
                len(row_of), len(col_of), [(r, c, v) for (r, c), v in entries.items()]
            )
            if full != q_block(self.spec, self.scheme, f):
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "s1": sorted(self.s1),
            "dims": [{"f1": f1, "f2": f2, "dim": self.dim((f1, f2))} for f1, f2 in self.bigrades],
        }


def split(spec: ChainSpec, s1: Iterable[int], scheme: CouplingScheme | None = None) -> BigradedComplex:
    scheme = scheme or all_ones(spec.max_cluster)
    s1 = frozenset(s1)
    if any(not 1 <= i <= spec.n_sites for i in s1):
        raise ValueError(f"S1 sites must lie in 1..{spec.n_sites}")
    s2 = [i for i in range(1, spec.n_sites + 1) if i not in s1]
    mask1 = sum(1 << (i - 1) for i in s1)
    bases: dict[Bigrade, list[int]] = defaultdict(list)
    basis = enumerate_basis(spec)
    for f in range(basis.f_max + 1):
        for w in basis.grade(f):
            f1 = popcount(w & mask1)
            bases[(f1, f - f1)].append(w)
    bases = {g: sorted(ws) for g, ws in bases.items()}

    def assemble(sites, step):
        blocks = {}
        for g, words in bases.items():
            tgt = (g[0] + step[0], g[1] + step[1])
            row_of = {w: i for i, w in enumerate(bases.get(tgt, []))}
            cols = {}
            for j, w in enumerate(words):
                col = {row_of[t]: v for t, v in insertion_terms(spec, scheme, w, sites)}
                if col:
                    cols[j] = col
            blocks[g] = SparseRationalMatrix(len(row_of), len(words), cols)
        return blocks

    return BigradedComplex(
        spec, s1, scheme, bases, assemble(sorted(s1), (1, 0)), assemble(s2, (0, 1))
    )


@dataclass(frozen=True)
class SubquotientBasis:
    """ker Q1 / im Q1 at one bigrade: bases of both and representatives of the quotient."""

    kernel: list
    image: list
    representatives: list

    @property
    def dim(self) -> int:
        return len(self.representatives)


def h_q1(big: BigradedComplex) -> dict[Bigrade, SubquotientBasis]:
    out = {}
    for f1, f2 in big.bigrades:
        ker = kernel_basis(big.q1((f1, f2)))
        inc = big.q1((f1 - 1, f2))
        im = [dict(inc.column(j)) for j in range(inc.n_cols) if inc.column(j)]
        out[(f1, f2)] = SubquotientBasis(ker, im, complement(ker, im))
    return out


def _stacked_rank(grid, rows, cols) -> int:
    return rank(block(grid, rows, cols))


def h21_cell(big: BigradedComplex, g: Bigrade) -> int:
    """Dimension of the two-step cohomology at one bigrade, from ranks only.

    Cocycles are states a at ``g`` with Q1 a = 0 and Q2 a in the image of Q1;
    coboundaries are Q1 u + Q2 x with Q1 x = 0.
    """
    f1, f2 = g
    x, y = g, (f1 - 1, f2 + 1)
    u, xp = (f1 - 1, f2), (f1, f2 - 1)
    dx, dy, du, dxp = big.dim(x), big.dim(y), big.dim(u), big.dim(xp)
    if dx == 0:
        return 0
    up, right = big.dim((f1 + 1, f2)), big.dim((f1, f2 + 1))
    m = _stacked_rank([[big.q1(x), None], [big.q2(x), -big.q1(y)]], [up, right], [dx, dy])
    dim_z = dx - m + rank(big.q1(y))
    t = _stacked_rank([[big.q1(u), big.q2(xp)], [None, big.q1(xp)]], [dx, big.dim((f1 + 1, f2 - 1))], [du, dxp])
    dim_b = t - rank(big.q1(xp))
    return dim_z - dim_b


def h21(big: BigradedComplex, method: str = "rank") -> dict[Bigrade, int]:
    """Two-step cohomology dimensions on every bigrade of ``big``."""
    if method == "rank":
        return {g: h21_cell(big, g) for g in big.bigrades}
    if method != "subquotient":
        raise ValueError(f"unknown method {method!r}")
    e1 = h_q1(big)
    empty = SubquotientBasis([], [], [])
    induced = {}
    for g in big.bigrades:
        tgt = (g[0], g[1] + 1)
        src, dst = e1[g], e1.get(tgt, empty)
        if src.dim == 0 or dst.dim == 0:
            continue
        try:
            induced[g] = induced_quotient_map(big.q2(g), src.kernel, src.image, dst.kernel, dst.image)
        except StructuralViolation as exc:
            raise StructuralViolation(f"induced map at bigrade {g}: {exc}") from exc
    out = {}
    for f1, f2 in big.bigrades:
        out_rank = rank(induced[(f1, f2)]) if (f1, f2) in induced else 0
        in_rank = rank(induced[(f1, f2 - 1)]) if (f1, f2 - 1) in induced else 0
        out[(f1, f2)] = e1[(f1, f2)].dim - out_rank - in_rank
    return out


def one_row_check(h21_dims: dict[Bigrade, int]) -> bool:
    """True iff every nonzero entry sits at the same f1 (vacuously true when all vanish)."""
    return len({f1 for (f1, _), d in h21_dims.items() if d}) <= 1


def nonzero_row(h21_dims: dict[Bigrade, int]) -> int | None:
    rows = sorted({f1 for (f1, _), d in h21_dims.items() if d})
    return rows[0] if len(rows) == 1 else None


def totals_by_grade(h21_dims: dict[Bigrade, int]) -> dict[int, int]:
    out: dict[int, int] = defaultdict(int)
    for (f1, f2), d in h21_dims.items():
        out[f1 + f2] += d
    return dict(out)


def grid_json(big: BigradedComplex, h21_dims: dict[Bigrade, int]) -> str:
    data = big.to_dict()
    data["h21"] = [{"f1": f1, "f2": f2, "dim": d} for (f1, f2), d in sorted(h21_dims.items())]
    return json.dumps(data, sort_keys=True)


@dataclass(frozen=True)
class TicTacToeResult:
    spec: ChainSpec
    preset: str
    structural: dict
    h21: dict
    one_row: bool
    row: int | None
    totals: dict
    betti: list

    @property
    def matches(self) -> bool:
        if not self.one_row:
            return False
        grades = set(self.totals) | set(range(len(self.betti)))
        return all(self.totals.get(f, 0) == (self.betti[f] if f < len(self.betti) else 0) for f in grades)

    @property
    def ok(self) -> bool:
        return all(self.structural.values()) and self.matches


def tic_tac_toe(spec: ChainSpec, preset: str, scheme: CouplingScheme | None = None) -> TicTacToeResult:
    from .cohomology import betti_numbers

    scheme = scheme or all_ones(spec.max_cluster)
    big = split(spec, preset_split(preset, spec), scheme)
    dims = h21(big)
    return TicTacToeResult(
        spec,
        preset,
        big.structural_checks(),
        dims,
        one_row_check(dims),
        nonzero_row(dims),
        totals_by_grade(dims),
        betti_numbers(spec, scheme),
    )
