"""Grade-raising supercharge blocks Q_f : V_f -> V_{f+1}."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator

from .couplings import CouplingScheme
from .matrix import Rational, SparseRationalMatrix
from .state_space import ChainSpec, GradedBasis, enumerate_basis, is_allowed, occupied, popcount


def string_sign(word: int, site: int) -> int:
    """(-1) to the number of occupied sites strictly left of ``site``."""
    return -1 if popcount(word & ((1 << (site - 1)) - 1)) & 1 else 1


def cluster_position(spec: ChainSpec, word: int, site: int) -> tuple[int, int]:
    """``(m, n)``: the particle at ``site`` is the n-th member of an m-cluster.

    Members are counted from the cluster's first site in increasing site
    order, modulo N on periodic chains.  ``word`` must not be the full ring.
    """
    N = spec.n_sites
    if spec.is_periodic:
        left = 0
        while left < N - 1 and occupied(word, (site - 2 - left) % N + 1):
            left += 1
        right = 0
        while right < N - 1 and occupied(word, (site + right) % N + 1):
            right += 1
    else:
        left = 0
        while site - 1 - left >= 1 and occupied(word, site - 1 - left):
            left += 1
        right = 0
        while site + 1 + right <= N and occupied(word, site + 1 + right):
            right += 1
    return left + right + 1, left + 1


def insertion_terms(
    spec: ChainSpec, scheme: CouplingScheme, word: int, sites: Iterable[int] | None = None
) -> Iterator[tuple[int, Rational]]:
    """Nonzero terms ``(target_word, coefficient)`` of Q acting on one configuration.

    ``sites`` restricts the insertions (sublattice supercharges).
    """
    if sites is None:
        sites = range(1, spec.n_sites + 1)
    for i in sites:
        bit = 1 << (i - 1)
        if word & bit:
            continue
        target = word | bit
        if not is_allowed(spec, target):
            continue
        m, n = cluster_position(spec, target, i)
        yield target, string_sign(word, i) * scheme.amplitude(m, n)


def build_q(
    spec: ChainSpec,
    basis: GradedBasis | None,
    scheme: CouplingScheme,
    f: int,
    sites: Iterable[int] | None = None,
) -> SparseRationalMatrix:
    if basis is None:
        basis = enumerate_basis(spec)
    if scheme.max_cluster != spec.max_cluster:
        raise ValueError(f"scheme has {scheme.max_cluster} primitives, chain needs {spec.max_cluster}")
    if not 0 <= f <= basis.f_max:
        raise ValueError(f"grade {f} outside [0, {basis.f_max}]")
    site_list = None if sites is None else sorted(sites)
    src = basis.grade(f)
    row_of = {w: i for i, w in enumerate(basis.grade(f + 1))}
    cols = {}
    for j, w in enumerate(src):
        col = {}
        for target, value in insertion_terms(spec, scheme, w, site_list):
            col[row_of[target]] = value
        if col:
            cols[j] = col
    return SparseRationalMatrix(len(row_of), len(src), cols)


def adjoint(m: SparseRationalMatrix) -> SparseRationalMatrix:
    """Real couplings and an orthonormal basis: the adjoint is the transpose."""
    return m.transpose()


@lru_cache(maxsize=24)
def q_blocks(spec: ChainSpec, scheme: CouplingScheme) -> tuple[SparseRationalMatrix, ...]:
    """All blocks Q_0 .. Q_{f_max}; the last one maps into an empty grade."""
    basis = enumerate_basis(spec)
    return tuple(build_q(spec, basis, scheme, f) for f in range(basis.f_max + 1))


def q_block(spec: ChainSpec, scheme: CouplingScheme, f: int) -> SparseRationalMatrix:
    """Q_f, or the zero map of matching shape for grades outside 0..f_max."""
    basis = enumerate_basis(spec)
    if f < 0 or f > basis.f_max:
        return SparseRationalMatrix(basis.dim(f + 1), basis.dim(f))
    return q_blocks(spec, scheme)[f]
