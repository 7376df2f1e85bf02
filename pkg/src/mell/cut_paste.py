"""Cut and paste: embedding a shorter chain behind a fixed ℓ-cluster prefix.

A state ψ′ on N′ sites maps to χ ⊗ ψ′ on N = N′ + ℓ + 2 sites, where
χ = 0 1…1 0 occupies the first ℓ+2 sites.  The overall sign (−1)^ℓ that
appears when commuting the second sublattice charge past χ is irrelevant for
dimensions and is not applied.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cohomology import betti_numbers
from .couplings import CouplingScheme, all_ones
from .linalg import StructuralViolation
from .state_space import ChainSpec, is_allowed, word_to_string


def chi_state(ell: int) -> int:
    """Word of 0 1^ℓ 0 on ℓ+2 sites."""
    if ell < 1:
        raise ValueError("ell must be positive")
    return ((1 << ell) - 1) << 1


def chi_string(ell: int) -> str:
    return word_to_string(chi_state(ell), ell + 2)


def big_spec(spec_small: ChainSpec) -> ChainSpec:
    return spec_small.with_sites(spec_small.n_sites + spec_small.max_cluster + 2)


def small_spec(spec_big: ChainSpec) -> ChainSpec:
    return spec_big.with_sites(spec_big.n_sites - spec_big.max_cluster - 2)


def g_map(spec_small: ChainSpec, state: dict[int, object]) -> dict[int, object]:
    """Apply ψ′ ↦ χ ⊗ ψ′ to a sparse vector ``{word: coefficient}``."""
    ell = spec_small.max_cluster
    if spec_small.n_sites <= ell:
        raise ValueError(f"cut chain needs more than {ell} sites")
    target = big_spec(spec_small)
    chi = chi_state(ell)
    out = {}
    for word, coef in state.items():
        if not coef:
            continue
        if not is_allowed(spec_small, word):
            raise ValueError(f"component {word_to_string(word, spec_small.n_sites)} is not an allowed configuration")
        new = chi | (word << (ell + 2))
        if not is_allowed(target, new):
            raise StructuralViolation(f"image {word_to_string(new, target.n_sites)} is not allowed on the long chain")
        out[new] = coef
    return out


def _check_length(spec_big: ChainSpec) -> None:
    ell = spec_big.max_cluster
    if spec_big.n_sites <= 2 * ell + 2:
        raise ValueError(f"dimension shift needs N > {2 * ell + 2}, got N={spec_big.n_sites}")


@dataclass(frozen=True)
class LadderRow:
    spec: ChainSpec
    small: ChainSpec
    betti_big: tuple[int, ...]
    betti_small: tuple[int, ...]

    @property
    def shift(self) -> int:
        return self.spec.max_cluster

    def _big(self, f: int) -> int:
        return self.betti_big[f] if 0 <= f < len(self.betti_big) else 0

    def _small(self, f: int) -> int:
        return self.betti_small[f] if 0 <= f < len(self.betti_small) else 0

    @property
    def grades(self) -> range:
        return range(max(len(self.betti_big), len(self.betti_small) + self.shift))

    def matches(self) -> dict[int, bool]:
        """Per-grade comparison for f ≥ ℓ."""
        return {f: self._big(f) == self._small(f - self.shift) for f in self.grades if f >= self.shift}

    def low_grades_vanish(self) -> bool:
        """The long chain carries no cohomology below grade ℓ (reported separately)."""
        return all(self._big(f) == 0 for f in range(min(self.shift, len(self.betti_big))))

    @property
    def ok(self) -> bool:
        return all(self.matches().values())

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "n_small": self.small.n_sites,
            "betti": list(self.betti_big),
            "betti_small": list(self.betti_small),
            "matches": {str(f): m for f, m in self.matches().items()},
            "low_grades_vanish": self.low_grades_vanish(),
            "ok": self.ok,
        }


def ladder_row(spec_big: ChainSpec, scheme: CouplingScheme | None = None) -> LadderRow:
    _check_length(spec_big)
    scheme = scheme or all_ones(spec_big.max_cluster)
    small = small_spec(spec_big)
    return LadderRow(spec_big, small, tuple(betti_numbers(spec_big, scheme)), tuple(betti_numbers(small, scheme)))


def verify_dimension_shift(spec_big: ChainSpec, scheme: CouplingScheme | None = None) -> bool:
    return ladder_row(spec_big, scheme).ok


def dimension_shift_table(specs, scheme_for=None) -> list[LadderRow]:
    """Ladder rows for every spec long enough, in canonical spec order."""
    rows = []
    for spec in sorted(specs, key=lambda s: s.sort_key):
        if spec.n_sites > 2 * spec.max_cluster + 2:
            rows.append(ladder_row(spec, scheme_for(spec) if scheme_for else None))
    return rows
