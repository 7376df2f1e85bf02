"""Verification sweeps shared by the command line and the acceptance tests."""

from __future__ import annotations

import logging
import multiprocessing
import os
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cohomology import CohomologyReport, betti_numbers, full_report, witten_index
from .couplings import CouplingScheme, all_ones, random_scheme
from .cut_paste import LadderRow, ladder_row
from .double_complex import TicTacToeResult, tic_tac_toe
from .hamiltonian import DEFAULT_TOL, build_h, numeric_zero_modes
from .linalg import certified_nullity
from .state_space import ChainSpec, enumerate_basis
from .supercharge import q_block

log = logging.getLogger(__name__)

JOBS_ENV = "MELL_JOBS"
KERNEL_MAX_DIM = 5000
NUMERIC_MAX_DIM = 2000

# fixed sample for the random-coupling trials: every cluster bound, both
# boundary families and lengths up to 14
PARAMETER_SAMPLE = (
    ChainSpec.periodic(14, 1),
    ChainSpec.special(13, 1, 0, 1),
    ChainSpec.free(12, 1),
    ChainSpec.periodic(8, 2),
    ChainSpec.periodic(13, 2),
    ChainSpec.special(12, 2, 1, 1),
    ChainSpec.free(14, 2),
    ChainSpec.periodic(14, 3),
    ChainSpec.free(14, 3),
    ChainSpec.special(12, 3, 2, 0),
)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def boundary_family(ell: int, kind: str) -> list:
    """Specs-to-be for one family: 'periodic', 'free', or 'special' (the whole (c1, cN) grid)."""
    if kind == "periodic":
        return [("periodic",)]
    if kind == "free":
        return [("special", ell, ell)]
    if kind == "special":
        return [("special", a, b) for a in range(ell + 1) for b in range(ell + 1)]
    raise ValueError(f"unknown boundary family {kind!r}")


def make_specs(ells: Iterable[int], sites: Iterable[int], kinds: Sequence[str]) -> list[ChainSpec]:
    specs = set()
    for ell in ells:
        for n in sites:
            for kind in kinds:
                for b in boundary_family(ell, kind):
                    if b[0] == "periodic":
                        specs.add(ChainSpec.periodic(n, ell))
                    else:
                        specs.add(ChainSpec.special(n, ell, b[1], b[2]))
    return sorted(specs, key=lambda s: s.sort_key)


def spec_seed(seed: int, spec: ChainSpec) -> random.Random:
    """Per-spec generator, independent of sweep order and worker assignment."""
    return random.Random(f"{seed}|{spec.label()}")


@dataclass(frozen=True)
class HamiltonianCheck:
    """Exact and numeric facts about the H blocks of one spec."""

    symmetric: bool
    commutes: bool
    kernel: tuple[int | None, ...]
    numeric: tuple[int | None, ...]

    def kernel_ok(self, betti: Sequence[int]) -> bool:
        return all(k is None or k == b for k, b in zip(self.kernel, betti))

    def numeric_ok(self) -> bool:
        return all(n is None or k is None or n == k for n, k in zip(self.numeric, self.kernel))


def hamiltonian_check(
    spec: ChainSpec,
    scheme: CouplingScheme,
    kernel: bool = True,
    numeric: bool = False,
    kernel_max_dim: int = KERNEL_MAX_DIM,
    numeric_max_dim: int = NUMERIC_MAX_DIM,
    tol: float = DEFAULT_TOL,
) -> HamiltonianCheck:
    """Symmetry, [H, Q] = 0 blockwise, exact kernel dims and numeric zero modes."""
    basis = enumerate_basis(spec)
    blocks = [build_h(spec, scheme, f) for f in range(basis.f_max + 1)]
    symmetric = all(h.is_symmetric() for h in blocks)
    # Q_{f_max} maps into an empty grade, so the last block has nothing to compare
    commutes = all(
        q_block(spec, scheme, f) @ blocks[f] == blocks[f + 1] @ q_block(spec, scheme, f) for f in range(basis.f_max)
    )
    kern = tuple(certified_nullity(h) if kernel and h.n_rows <= kernel_max_dim else None for h in blocks)
    num = tuple(numeric_zero_modes(h, tol, numeric_max_dim) if numeric and h.n_rows <= numeric_max_dim else None for h in blocks)
    return HamiltonianCheck(symmetric, commutes, kern, num)


def q_squared_zero(spec: ChainSpec, scheme: CouplingScheme) -> bool:
    f_max = enumerate_basis(spec).f_max
    return all((q_block(spec, scheme, f + 1) @ q_block(spec, scheme, f)).is_zero() for f in range(f_max + 1))


def parameter_trials(spec: ChainSpec, trials: int, seed: int) -> list[tuple[str, bool]]:
    """(scheme label, betti agrees with all-ones) for ``trials`` random schemes."""
    reference = betti_numbers(spec, all_ones(spec.max_cluster))
    rng = spec_seed(seed, spec)
    out = []
    for _ in range(trials):
        s = random_scheme(spec.max_cluster, rng)
        out.append((s.label(), betti_numbers(spec, s) == reference))
    return out


@dataclass(frozen=True)
class SweepOptions:
    scheme: CouplingScheme | None = None
    check_hamiltonian: bool = False
    numeric: bool = False
    structural: bool = False
    ladder: bool = False
    ttt: tuple[str, ...] = ()
    random_couplings: int = 0
    seed: int = 0


@dataclass(frozen=True)
class SpecResult:
    spec: ChainSpec
    report: CohomologyReport
    structural: dict = field(default_factory=dict)
    hamiltonian: HamiltonianCheck | None = None
    ladder: LadderRow | None = None
    ttt: tuple[TicTacToeResult, ...] = ()
    trials: tuple[tuple[str, bool], ...] = ()

    @property
    def failures(self) -> list[str]:
        out = []
        if not self.report.oracle_ok:
            out.append("oracle")
        if self.report.witten_index != self.report.euler_characteristic:
            out.append("euler")
        out += [k for k, v in self.structural.items() if not v]
        h = self.hamiltonian
        if h is not None:
            if not h.symmetric:
                out.append("h_symmetric")
            if not h.commutes:
                out.append("h_commutes")
            if not h.kernel_ok(self.report.betti):
                out.append("h_kernel")
            if not h.numeric_ok():
                out.append("h_numeric")
        if self.ladder is not None and not self.ladder.ok:
            out.append("ladder")
        out += [f"ttt:{t.preset}" for t in self.ttt if not t.ok]
        if not all(ok for _, ok in self.trials):
            out.append("parameters")
        return out

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        d = self.report.to_dict()
        d["ok"] = self.ok
        d["failures"] = self.failures
        if self.structural:
            d["structural"] = dict(self.structural)
        if self.hamiltonian is not None:
            h = self.hamiltonian
            d["hamiltonian"] = {
                "symmetric": h.symmetric,
                "commutes": h.commutes,
                "kernel": list(h.kernel),
                "numeric_zero_modes": list(h.numeric),
            }
        if self.ladder is not None:
            d["ladder"] = self.ladder.to_dict()
        if self.ttt:
            d["ttt"] = [
                {
                    "preset": t.preset,
                    "structural": t.structural,
                    "one_row": t.one_row,
                    "row": t.row,
                    "totals": {str(f): v for f, v in sorted(t.totals.items())},
                    "ok": t.ok,
                }
                for t in self.ttt
            ]
        if self.trials:
            d["parameter_trials"] = [{"couplings": lab, "ok": ok} for lab, ok in self.trials]
        return d


def verify_spec(spec: ChainSpec, options: SweepOptions) -> SpecResult:
    scheme = options.scheme or all_ones(spec.max_cluster)
    report = full_report(spec, scheme)
    structural = {}
    if options.structural:
        structural["q_squared"] = q_squared_zero(spec, scheme)
        structural["euler_equals_witten"] = witten_index(enumerate_basis(spec).dims()) == report.witten_index
    ham = None
    if options.check_hamiltonian or options.numeric:
        ham = hamiltonian_check(spec, scheme, kernel=True, numeric=options.numeric)
    lad = None
    if options.ladder and spec.n_sites > 2 * spec.max_cluster + 2:
        lad = ladder_row(spec, scheme)
    ttt = tuple(tic_tac_toe(spec, preset, scheme) for preset in options.ttt if _ttt_applies(spec, preset))
    trials = tuple(parameter_trials(spec, options.random_couplings, options.seed)) if options.random_couplings else ()
    return SpecResult(spec, report, structural, ham, lad, ttt, trials)


def _ttt_applies(spec: ChainSpec, preset: str) -> bool:
    """The prefix split is only claimed to be one-row on chains longer than 2ℓ+2."""
    return preset != "prefix" or spec.n_sites > 2 * spec.max_cluster + 2


def _worker(args):
    spec, options = args
    return verify_spec(spec, options)


def run_sweep(specs: Sequence[ChainSpec], options: SweepOptions, jobs: int | None = None) -> list[SpecResult]:
    """Verify every spec; results come back in canonical spec order regardless of ``jobs``."""
    specs = sorted(specs, key=lambda s: s.sort_key)
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(specs) <= 1:
        results = [verify_spec(s, options) for s in specs]
    else:
        # largest specs first keeps the pool busy; order is restored below
        work = sorted(specs, key=lambda s: -enumerate_basis(s).total)
        with multiprocessing.get_context("fork").Pool(jobs) as pool:
            done = pool.map(_worker, [(s, options) for s in work], chunksize=1)
        by_spec = {r.spec: r for r in done}
        results = [by_spec[s] for s in specs]
    for r in results:
        if not r.ok:
            log.warning("mismatch for %s: %s", r.spec.label(), ", ".join(r.failures))
    return results
