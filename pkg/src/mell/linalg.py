"""Exact sparse rank, kernels and subquotient maps over the rationals.

Elimination is fraction-free: each row is scaled to integers, updates are
``row <- p*row - a*pivot_row`` and every updated row is divided by the gcd
of its entries.  Pivots follow a Markowitz-style rule: take the shortest
remaining row (lowest index on ties) and, inside it, the column with the
fewest remaining nonzeros (lowest index on ties).

A modular path computes the rank modulo a random prime above 2**30.  The
modular rank never exceeds the rational rank; ``certify=True`` confirms it
with the exact routine.
"""

from __future__ import annotations

import heapq
import logging
import math
import os
import random
from fractions import Fraction
from typing import Iterable, Sequence

from .matrix import Rational, SparseRationalMatrix, normalize

log = logging.getLogger(__name__)


class StructuralViolation(RuntimeError):
    """An induced map is ill-defined: the image leaves the target kernel."""


# modular prime

_prime_cache: dict[int, int] = {}


def prime_seed() -> int:
    """Per-process seed for the modular prime; override with ``MELL_PRIME_SEED``."""
    if "seed" not in _prime_cache:
        env = os.environ.get("MELL_PRIME_SEED")
        seed = int(env) if env else random.SystemRandom().randrange(2**32)
        _prime_cache["seed"] = seed
        log.info("modular rank prime seed: %d", seed)
    return _prime_cache["seed"]


def set_prime_seed(seed: int) -> None:
    """Pin the per-process seed (the environment variable still wins)."""
    if os.environ.get("MELL_PRIME_SEED"):
        seed = int(os.environ["MELL_PRIME_SEED"])
    _prime_cache["seed"] = seed
    log.info("modular rank prime seed: %d", seed)


def modular_prime(seed: int | None = None) -> int:
    from sympy import randprime

    if seed is None:
        seed = prime_seed()
    if seed not in _prime_cache:
        state = random.getstate()
        random.seed(seed)
        try:
            _prime_cache[seed] = int(randprime(2**30 + 1, 2**31))
        finally:
            random.setstate(state)
    return _prime_cache[seed]


# elimination core


def _integer_rows(m: SparseRationalMatrix) -> dict[int, dict[int, int]]:
    out = {}
    for r, row in m.rows().items():
        den = 1
        for v in row.values():
            if isinstance(v, Fraction):
                den = math.lcm(den, v.denominator)
        if den == 1:
            out[r] = dict(row)
        else:
            out[r] = {c: int(v * den) for c, v in row.items()}
    return out


def _modular_rows(m: SparseRationalMatrix, p: int) -> dict[int, dict[int, int]]:
    out = {}
    for r, row in m.rows().items():
        red = {}
        for c, v in row.items():
            if isinstance(v, Fraction):
                if v.denominator % p == 0:
                    raise ZeroDivisionError(f"prime {p} divides a denominator")
                x = v.numerator * pow(v.denominator, -1, p) % p
            else:
                x = v % p
            if x:
                red[c] = x
        if red:
            out[r] = red
    return out


def _eliminate(rows: dict[int, dict[int, int]], modulus: int | None = None, keep: bool = False):
    """Forward elimination in place.

    Returns ``(rank, pivots)``; ``pivots`` lists ``(col, row)`` in elimination
    order when ``keep`` is set.  Every pivot row only contains its pivot
    column plus columns that were never pivots before it.
    """
    col_index: dict[int, set[int]] = {}
    heap = []
    for i, row in rows.items():
        for c in row:
            col_index.setdefault(c, set()).add(i)
        heap.append((len(row), i))
    heapq.heapify(heap)
    rank = 0
    pivots = []
    while heap:
        ln, i = heapq.heappop(heap)
        row = rows.get(i)
        if row is None or len(row) != ln:
            continue
        c = min(row, key=lambda k: (len(col_index[k]), k))
        del rows[i]
        for k in row:
            col_index[k].discard(i)
        p = row[c]
        targets = sorted(col_index[c])
        inv = pow(p, -1, modulus) if modulus else None
        for j in targets:
            other = rows[j]
            a = other[c]
            if modulus:
                f = a * inv % modulus
                for k, v in row.items():
                    x = (other.get(k, 0) - f * v) % modulus
                    if x:
                        if k not in other:
                            col_index[k].add(j)
                        other[k] = x
                    elif k in other:
                        del other[k]
                        col_index[k].discard(j)
            else:
                if p != 1:
                    for k in other:
                        other[k] *= p
                for k, v in row.items():
                    x = other.get(k, 0) - a * v
                    if x:
                        if k not in other:
                            col_index[k].add(j)
                        other[k] = x
                    elif k in other:
                        del other[k]
                        col_index[k].discard(j)
                if other:
                    g = math.gcd(*other.values())
                    if g > 1:
                        for k in other:
                            other[k] //= g
            if other:
                heapq.heappush(heap, (len(other), j))
            else:
                del rows[j]
        rank += 1
        if keep:
            pivots.append((c, row))
    return rank, pivots


def rank(m: SparseRationalMatrix, method: str = "exact", certify: bool = False, seed: int | None = None) -> int:
    """Exact rank of ``m``.

    ``method="modular"`` returns the rank modulo a random large prime, which
    is a lower bound on the rational rank; with ``certify=True`` the exact
    rank is computed as well and returned.
    """
    if m.is_zero():
        return 0
    if method == "exact":
        return _eliminate(_integer_rows(m))[0]
    if method != "modular":
        raise ValueError(f"unknown rank method {method!r}")
    p = modular_prime(seed)
    r_mod = _eliminate(_modular_rows(m, p), modulus=p)[0]
    if certify:
        r = _eliminate(_integer_rows(m))[0]
        if r_mod > r:
            raise AssertionError(f"modular rank {r_mod} exceeds exact rank {r}")
        if r_mod != r:
            log.warning("prime %d is unlucky: modular rank %d < exact rank %d", p, r_mod, r)
        return r
    return r_mod


def kernel_basis(m: SparseRationalMatrix) -> list[list[Rational]]:
    """Basis of the null space; one vector per non-pivot column."""
    rank_, pivots = _eliminate(_integer_rows(m), keep=True)
    pivot_cols = {c for c, _ in pivots}
    free = [c for c in range(m.n_cols) if c not in pivot_cols]
    basis = []
    for j in free:
        x: dict[int, Fraction] = {j: Fraction(1)}
        for c, row in reversed(pivots):
            s = sum((v * x[k] for k, v in row.items() if k != c and k in x), Fraction(0))
            if s:
                x[c] = -s / row[c]
        vec: list[Rational] = [0] * m.n_cols
        for k, v in x.items():
            vec[k] = normalize(v)
        basis.append(vec)
    assert len(basis) == m.n_cols - rank_
    return basis


# incremental echelon form with coefficient tracking


class Echelon:
    """Row-echelon accumulator over the rationals.

    Each stored row remembers how it was formed from the inserted vectors, so
    :meth:`express` can write a vector in terms of them.
    """

    def __init__(self):
        self._rows: dict[int, tuple[dict[int, Fraction], dict[int, Fraction]]] = {}
        self.count = 0

    def _reduce(self, vec: dict[int, Fraction], combo: dict[int, Fraction]):
        vec = dict(vec)
        heap = list(vec)
        heapq.heapify(heap)
        seen = set()
        while heap:
            c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            a = vec.get(c)
            if not a or c not in self._rows:
                continue
            prow, pcombo = self._rows[c]
            for k, v in prow.items():
                x = vec.get(k, 0) - a * v
                if x:
                    if k not in vec:
                        heapq.heappush(heap, k)
                    vec[k] = x
                else:
                    vec.pop(k, None)
            for k, v in pcombo.items():
                x = combo.get(k, 0) - a * v
                if x:
                    combo[k] = x
                else:
                    combo.pop(k, None)
        return vec, combo

    def add(self, vec, label: int | None = None) -> bool:
        """Insert a vector; returns whether it was independent of the rows so far."""
        if label is None:
            label = self.count
        self.count += 1
        res, combo = self._reduce(_as_dict(vec), {label: Fraction(1)})
        if not res:
            return False
        c = min(res)
        a = res[c]
        self._rows[c] = ({k: v / a for k, v in res.items()}, {k: v / a for k, v in combo.items()})
        return True

    def express(self, vec) -> dict[int, Fraction] | None:
        """Coefficients of ``vec`` in the inserted vectors, or None if outside their span."""
        res, combo = self._reduce(_as_dict(vec), {})
        if res:
            return None
        return {k: -v for k, v in combo.items()}

    @property
    def rank(self) -> int:
        return len(self._rows)


def _as_dict(vec) -> dict[int, Fraction]:
    if isinstance(vec, dict):
        return {k: Fraction(v) for k, v in vec.items() if v}
    return {k: Fraction(v) for k, v in enumerate(vec) if v}


def span_rank(vectors: Iterable) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.rank


def complement(ker: Sequence, im: Sequence) -> list:
    """Vectors of ``ker`` that extend a basis of span(im) to a basis of span(ker)."""
    check = Echelon()
    for v in ker:
        check.add(v)
    for v in im:
        if check.express(v) is None:
            raise ValueError("image vector outside the span of the kernel basis")
    e = Echelon()
    for v in im:
        e.add(v)
    return [v for v in ker if e.add(v)]


def induced_quotient_map(
    big: SparseRationalMatrix,
    src_ker: Sequence,
    src_im: Sequence,
    tgt_ker: Sequence,
    tgt_im: Sequence,
) -> SparseRationalMatrix:
    """Matrix of the map ``big`` induces from ker/im on the source to ker/im on the target.

    Quotient coordinates are taken with respect to the complements chosen by
    :func:`complement`; the result has shape ``(dim tgt quotient, dim src quotient)``.
    """
    src_reps = complement(src_ker, src_im)
    tgt_reps = complement(tgt_ker, tgt_im)
    e = Echelon()
    n_im = len(tgt_im)
    for i, v in enumerate(tgt_im):
        e.add(v, label=i)
    for j, v in enumerate(tgt_reps):
        e.add(v, label=n_im + j)
    cols = {}
    for j, rep in enumerate(src_reps):
        w = big.apply(_dense(rep, big.n_cols))
        coeffs = e.express(w)
        if coeffs is None:
            raise StructuralViolation("image of a kernel representative leaves the target kernel")
        cols[j] = {k - n_im: v for k, v in coeffs.items() if k >= n_im}
    return SparseRationalMatrix(len(tgt_reps), len(src_reps), cols)


def _dense(vec, n: int) -> list:
    if isinstance(vec, dict):
        out = [0] * n
        for k, v in vec.items():
            out[k] = v
        return out
    return list(vec)



def rational_reconstruction(a: int, p: int) -> Fraction | None:
    """Smallest-height fraction congruent to ``a`` modulo ``p``, if one exists."""
    bound = math.isqrt(p // 2)
    r0, r1 = p, a % p
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _modular_kernel(m: SparseRationalMatrix, p: int) -> tuple[int, list[int], list[dict[int, int]]]:
    """Rank mod ``p``, the free columns, and the kernel basis that is the identity on them."""
    rank_, pivots = _eliminate(_modular_rows(m, p), modulus=p, keep=True)
    pivot_cols = {c for c, _ in pivots}
    free = [j for j in range(m.n_cols) if j not in pivot_cols]
    vectors = []
    for j in free:
        x = {j: 1}
        for c, row in reversed(pivots):
            s = sum(v * x[k] for k, v in row.items() if k != c and k in x) % p
            if s:
                x[c] = -s * pow(row[c], -1, p) % p
        vectors.append(x)
    return rank_, free, vectors


MAX_LIFT_PRIMES = 24


def _large_primes(seed: int):
    from sympy import randprime

    rng = random.Random(seed)
    while True:
        state = random.getstate()
        random.seed(rng.random())
        try:
            yield int(randprime(2**61, 2**62))
        finally:
            random.setstate(state)


def _lift(vectors: list[dict[int, int]], modulus: int, n: int) -> list[list[Rational]] | None:
    out = []
    for x in vectors:
        vec: list[Rational] = [0] * n
        for k, v in x.items():
            q = rational_reconstruction(v, modulus)
            if q is None:
                return None
            vec[k] = normalize(q)
        out.append(vec)
    return out


def certified_nullity(m: SparseRationalMatrix, seed: int | None = None, max_primes: int = MAX_LIFT_PRIMES) -> int:
    """Exact ``n_cols - rank(m)`` from two matching bounds, with elimination as fallback.

    The rank modulo a random prime near 2**61 bounds the nullity from above.
    Kernel vectors found modulo that prime, normalized to the identity on the
    free columns, are combined across further primes by Chinese remaindering
    until rational reconstruction yields vectors that ``m`` annihilates
    exactly.  Those vectors are independent by construction and bound the
    nullity from below.
    """
    if m.n_cols == 0:
        return 0
    primes = _large_primes(prime_seed() if seed is None else seed)
    p = next(primes)
    rank_p, free, vectors = _modular_kernel(m, p)
    upper = m.n_cols - rank_p
    if upper == 0:
        return 0
    modulus = p
    for _ in range(max_primes):
        lifted = _lift(vectors, modulus, m.n_cols)
        if lifted is not None and all(not any(m.apply(v)) for v in lifted):
            return upper
        q = next(primes)
        rank_q, free_q, other = _modular_kernel(m, q)
        if rank_q > rank_p:
            # the first prime was unlucky; start over from this one
            rank_p, free, vectors, modulus = rank_q, free_q, other, q
            upper = m.n_cols - rank_q
            if upper == 0:
                return 0
            continue
        if rank_q < rank_p or free_q != free:
            # unlucky prime or a different pivot pattern: residues are not comparable
            continue
        inv = pow(modulus, -1, q)
        combined = []
        for a, b in zip(vectors, other):
            x = {}
            for k in a.keys() | b.keys():
                ra, rb = a.get(k, 0), b.get(k, 0)
                v = ra + modulus * ((rb - ra) * inv % q)
                if v:
                    x[k] = v
            combined.append(x)
        vectors, modulus = combined, modulus * q
    log.info("kernel lift did not settle after %d primes; running exact elimination", max_primes)
    return m.n_cols - rank(m)

