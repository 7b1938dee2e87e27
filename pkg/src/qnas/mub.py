"""Mutually unbiased bases for qubit dimensions d = 2^n.

Construction over the Galois ring GR(4, n) = Z4[x]/(h(x)) with h a monic
basic primitive polynomial: the d + 1 bases are the standard basis plus,
for each a in the Teichmuller set, the vectors

    v[a, b][x] = d^{-1/2} * i^{tr((a + 2b) x)},   b, x in the Teichmuller set.

The h(x) shipped per n is the Graeffe (Hensel) lift of the lexicographically
least primitive polynomial over GF(2), so the residue class of x generates
the Teichmuller units directly.  The d(d+1) basis vectors form a complex
projective 2-design, which `haar_average_fidelity` exploits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_N = 9


# -- GF(2) polynomials as int bitmasks (bit k = coefficient of x^k) ----------

def _gf2_mulmod(a: int, b: int, mod: int, deg: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= mod
    return r


def _gf2_powmod(a: int, e: int, mod: int, deg: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = _gf2_mulmod(r, a, mod, deg)
        a = _gf2_mulmod(a, a, mod, deg)
        e >>= 1
    return r


def _is_primitive_gf2(poly: int, n: int) -> bool:
    order = (1 << n) - 1
    if _gf2_powmod(2, order, poly, n) != 1:  # x^order mod poly
        return False
    m = order
    factors = set()
    p = 2
    while p * p <= m:
        while m % p == 0:
            factors.add(p)
            m //= p
        p += 1
    if m > 1:
        factors.add(m)
    return all(_gf2_powmod(2, order // q, poly, n) != 1 for q in factors)


@lru_cache(maxsize=None)
def _primitive_poly_gf2(n: int) -> int:
    """Lexicographically least monic primitive polynomial of degree n."""
    if n == 1:
        return 0b11  # x + 1
    for low in range(1, 1 << n, 2):  # constant term must be 1
        poly = (1 << n) | low
        if _is_primitive_gf2(poly, n):
            return poly
    raise RuntimeError(f"no primitive polynomial found for degree {n}")


def _graeffe_lift(n: int) -> np.ndarray:
    """Basic primitive h over Z4 with h(x^2) = (-1)^n g(x) g(-x) mod 4."""
    g = _primitive_poly_gf2(n)
    coeffs = np.array([(g >> k) & 1 for k in range(n + 1)], dtype=np.int64)
    galt = coeffs * np.where(np.arange(n + 1) % 2 == 0, 1, -1)  # g(-x)
    prod = np.convolve(coeffs, galt)
    if n % 2 == 1:
        prod = -prod
    h = prod[::2] % 4  # even powers only; h(y) coefficients 0..n
    assert h[n] == 1, "lift must stay monic"
    return h


# -- GR(4, n) arithmetic on coefficient vectors mod h, mod 4 -----------------

class GaloisRing:
    """Precomputed tables for GR(4, n)."""

    def __init__(self, n: int):
        if not 1 <= n <= MAX_N:
            raise ValueError(f"no primitive polynomial configured for n={n}")
        self.n = n
        self.h = _graeffe_lift(n)
        # x^k mod h for k = 0 .. 2n-2, as coefficient rows.
        self.red = np.zeros((2 * n - 1, n), dtype=np.int64)
        cur = np.zeros(n, dtype=np.int64)
        cur[0] = 1
        for k in range(2 * n - 1):
            self.red[k] = cur
            cur = self._shift(cur)
        self.trace_pows = self._trace_powers()

    def _shift(self, coeffs: np.ndarray) -> np.ndarray:
        """Multiply by x modulo h(x), coefficients mod 4."""
        n = self.n
        out = np.zeros(n, dtype=np.int64)
        out[1:] = coeffs[: n - 1]
        top = coeffs[n - 1]
        out = (out - top * self.h[:n]) % 4
        return out

    def mul(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        conv = np.convolve(p, q)
        out = (conv[:, None] * self.red[: conv.size]).sum(axis=0) % 4
        return out

    def pow_x(self, e: int) -> np.ndarray:
        """x^e mod h by square and multiply."""
        result = np.zeros(self.n, dtype=np.int64)
        result[0] = 1
        base = self.red[1].copy() if self.n > 1 else (-self.h[:1]) % 4
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def _trace_powers(self) -> np.ndarray:
        """tr(x^(u+v)) for u, v in 0..n-1, via sigma(x^i) = x^(2i)."""
        n = self.n
        vals = np.zeros(2 * n - 1, dtype=np.int64)
        for k in range(2 * n - 1):
            acc = np.zeros(n, dtype=np.int64)
            for j in range(n):
                acc = (acc + self.pow_x(k * (1 << j))) % 4
            assert not acc[1:].any(), "trace must land in Z4"
            vals[k] = acc[0]
        w = np.zeros((n, n), dtype=np.int64)
        for u in range(n):
            for v in range(n):
                w[u, v] = vals[u + v]
        return w

    def trace(self, p: np.ndarray) -> int:
        """Additive trace GR(4, n) -> Z4 (linear over Z4 coefficients)."""
        return int((np.asarray(p) * self.trace_pows[:, 0]).sum() % 4)

    def teichmuller(self) -> np.ndarray:
        """{0, 1, xi, ..., xi^(2^n - 2)} as a (2^n, n) coefficient matrix."""
        n = self.n
        size = 1 << n
        t = np.zeros((size, n), dtype=np.int64)
        cur = np.zeros(n, dtype=np.int64)
        cur[0] = 1
        xi = self.pow_x(1)
        for i in range(size - 1):
            t[1 + i] = cur
            cur = self.mul(cur, xi)
        return t


@lru_cache(maxsize=None)
def _ring(n: int) -> GaloisRing:
    return GaloisRing(n)


def teichmuller_set(n: int) -> np.ndarray:
    """Teichmuller representatives of GR(4, n), zero first then powers of xi."""
    return _ring(n).teichmuller()


def gr_trace(x, n: int) -> int:
    return _ring(n).trace(np.asarray(x, dtype=np.int64))


@dataclass(frozen=True)
class MubSet:
    """d + 1 mutually unbiased bases; anchors flattened standard-basis first."""

    dim: int
    bases: np.ndarray    # (d + 1, d, d), bases[m][j] is the j-th basis vector
    anchors: np.ndarray  # (d (d + 1), d)

    @property
    def n_anchors(self) -> int:
        return self.anchors.shape[0]


@lru_cache(maxsize=None)
def build_mub(n: int) -> MubSet:
    ring = _ring(n)
    d = 1 << n
    t = ring.teichmuller()
    # g[i, j] = tr(T_i * T_j) computed as a single bilinear form mod 4.
    g = (t @ ring.trace_pows @ t.T) % 4
    phase_a = 1j ** g      # i^(tr(T_a x)) with rows a, columns x
    sign_b = (-1.0) ** g   # i^(2 tr(T_b x)) with rows b, columns x
    bases = np.empty((d + 1, d, d), dtype=complex)
    bases[0] = np.eye(d)
    scale = 1.0 / np.sqrt(d)
    for ai in range(d):
        bases[1 + ai] = scale * phase_a[ai][None, :] * sign_b
    anchors = bases.reshape(-1, d)
    return MubSet(d, bases, anchors)


def haar_average_fidelity(u: np.ndarray, mub: MubSet) -> float:
    """(1/K) sum_k |<psi_k|U|psi_k>|^2 over the anchor states.

    Equals the Haar average (d + |Tr U|^2) / (d (d + 1)) because the anchors
    form a complex projective 2-design.
    """
    if u.shape != (mub.dim, mub.dim):
        raise ValueError(f"operator shape {u.shape} does not match dim {mub.dim}")
    amps = np.einsum("kd,dc,kc->k", mub.anchors.conj(), u, mub.anchors)
    return float(np.mean(np.abs(amps) ** 2))


def analytic_haar_fidelity(u: np.ndarray) -> float:
    d = u.shape[0]
    return (d + abs(np.trace(u)) ** 2) / (d * (d + 1))
