"""Arithmetic over GF(2^r) extension fields, r = 2..8.

Field elements are plain ints in [0, q) interpreted as binary r-tuples
(decimal encoding of the polynomial coefficients, bit i = coefficient of
x^i).  Addition is bitwise XOR; multiplication is polynomial
multiplication modulo a primitive polynomial, realised through exp/log
lookup tables.  Probability-vector permutations for "multiply by alpha"
and "add alpha" are exposed as gather index arrays: ``p_out = p_in[perm]``.
"""

from __future__ import annotations

import numpy as np

# Primitive polynomials used throughout, keyed by field order.  Encoded as
# decimal integers, e.g. 285 = 0b100011101 = x^8 + x^4 + x^3 + x^2 + 1.
PRIMITIVE_POLYS = {4: 7, 8: 11, 16: 19, 32: 37, 64: 67, 128: 137, 256: 285}


def _carryless_mul_mod(a: int, b: int, poly: int, r: int) -> int:
    """Shift-and-reduce polynomial product modulo ``poly`` (test oracle)."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a >> r:
            a ^= poly
    return acc


class GaloisField:
    """GF(2^r) with precomputed exp/log, inverse and multiplication tables.

    Immutable after construction; safe to share across workers.
    """

    def __init__(self, q: int, prim_poly: int | None = None):
        r = q.bit_length() - 1
        if q < 4 or q > 256 or (1 << r) != q:
            raise ValueError(f"field order must be 2^r with r in 2..8, got {q}")
        if prim_poly is None:
            prim_poly = PRIMITIVE_POLYS[q]
        if prim_poly.bit_length() - 1 != r:
            raise ValueError(f"polynomial {prim_poly} does not have degree {r}")
        self.q = q
        self.r = r
        self.prim_poly = prim_poly

        # exp[i] = x^i; primitive <=> the powers of x sweep all q-1 nonzero
        # elements before returning to 1.
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        e = 1
        for i in range(q - 1):
            exp[i] = e
            e <<= 1
            if e >> r:
                e ^= prim_poly
        if e != 1 or len(set(exp[: q - 1].tolist())) != q - 1:
            raise ValueError(f"{prim_poly} is not primitive for GF({q})")
        exp[q - 1 :] = exp[: q - 1]
        log = np.zeros(q, dtype=np.int64)
        log[exp[: q - 1]] = np.arange(q - 1)

        self.exp = exp
        self.log = log
        idx = np.arange(q)
        self.inv_table = np.zeros(q, dtype=np.int64)
        self.inv_table[1:] = exp[(q - 1) - log[1:]]
        # mul_table[a, b] = a*b; row 0 and column 0 stay zero
        mt = np.zeros((q, q), dtype=np.int64)
        nz = idx[1:]
        mt[1:, 1:] = exp[log[nz][:, None] + log[nz][None, :]]
        mt.setflags(write=False)
        self.mul_table = mt
        xt = idx[:, None] ^ idx[None, :]
        xt.setflags(write=False)
        self.xor_table = xt

    def __repr__(self) -> str:
        return f"GaloisField(q={self.q}, prim_poly={self.prim_poly})"

    def _check(self, *elems: int) -> None:
        for a in elems:
            if not 0 <= a < self.q:
                raise ValueError(f"element {a} outside [0, {self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ValueError("zero has no multiplicative inverse")
        return int(self.inv_table[a])

    def mul_row(self, alpha: int) -> np.ndarray:
        """Vector of alpha*b for all b; for table-driven encoding."""
        self._check(alpha)
        return self.mul_table[alpha]

    def mul_perm(self, alpha: int) -> np.ndarray:
        """Gather indices realising pmf(A) -> pmf(A*alpha).

        Entry mu of the output pmf is entry mu * alpha^-1 of the input,
        i.e. ``out[mu*alpha] = in[mu]``.
        """
        if alpha == 0:
            raise ValueError("multiplication permutation needs alpha != 0")
        return self.mul_table[self.inv(alpha)].copy()

    def add_perm(self, alpha: int) -> np.ndarray:
        """Gather indices realising pmf(A) -> pmf(A + alpha); self-inverse."""
        self._check(alpha)
        return np.arange(self.q) ^ alpha
