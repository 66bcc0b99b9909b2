"""Small explicit finite fields GF(p^k) and Galois rings GR(4, k).

Just enough arithmetic for maximal MUB constructions: elements are plain
ints encoding coefficient tuples, multiplication goes through a
precomputed table, and the defining polynomials are found by exhaustive
search (orders here are tiny, <= a few hundred).
"""

from __future__ import annotations

import itertools

from .exceptions import UnsupportedDimensionError


def factor_prime_power(d: int) -> tuple[int, int]:
    """Return (p, k) with d = p^k, or raise UnsupportedDimensionError."""
    if d < 2:
        raise UnsupportedDimensionError(f"dimension {d} is not a prime power")
    for p in range(2, d + 1):
        if d % p == 0:
            k = 0
            m = d
            while m % p == 0:
                m //= p
                k += 1
            if m == 1:
                return p, k
            raise UnsupportedDimensionError(f"dimension {d} is not a prime power")
    raise UnsupportedDimensionError(f"dimension {d} is not a prime power")


def _poly_mul_mod(a, b, mod_poly, q):
    """Product of coefficient tuples a, b modulo (mod_poly, q).

    mod_poly is monic of degree k given by its k lower coefficients,
    i.e. x^k == -mod_poly (mod q).
    """
    k = len(mod_poly)
    acc = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                acc[i + j] = (acc[i + j] + ai * bj) % q
    # reduce degree >= k terms using x^k = -mod_poly
    for deg in range(len(acc) - 1, k - 1, -1):
        coef = acc[deg]
        if coef:
            acc[deg] = 0
            for j, mj in enumerate(mod_poly):
                acc[deg - k + j] = (acc[deg - k + j] - coef * mj) % q
    return tuple(acc[:k])


class GaloisField:
    """GF(p^k) with elements encoded as ints in [0, p^k).

    The int encodes base-p digits, the coefficients of the residue
    polynomial; elements 0..p-1 are the prime subfield.
    """

    def __init__(self, p: int, k: int):
        self.p = p
        self.k = k
        self.order = p ** k
        self.modulus = self._find_irreducible()
        self._mul = self._build_mul_table()

    def _decode(self, e: int):
        digits = []
        for _ in range(self.k):
            digits.append(e % self.p)
            e //= self.p
        return tuple(digits)

    def _encode(self, digits) -> int:
        e = 0
        for c in reversed(digits):
            e = e * self.p + c
        return e

    def _find_irreducible(self):
        p, k = self.p, self.k
        if k == 1:
            return (0,)
        # monic x^k + c_{k-1} x^{k-1} + ... + c_0, irreducible over GF(p):
        # no monic divisor of degree 1..k//2
        low_divisors = []
        for deg in range(1, k // 2 + 1):
            for coeffs in itertools.product(range(p), repeat=deg):
                low_divisors.append(coeffs + (1,))
        for coeffs in itertools.product(range(p), repeat=k):
            f = list(coeffs) + [1]
            if f[0] == 0:
                continue
            if all(self._poly_rem(f, g, p) for g in low_divisors):
                return tuple(coeffs)
        raise RuntimeError(f"no irreducible polynomial found for GF({p}^{k})")

    @staticmethod
    def _poly_rem(f, g, p):
        """Remainder of f by monic g over GF(p); truthy iff nonzero."""
        r = list(f)
        dg = len(g) - 1
        while len(r) - 1 >= dg:
            c = r[-1] % p
            if c:
                for j in range(dg + 1):
                    r[len(r) - 1 - dg + j] = (r[len(r) - 1 - dg + j] - c * g[j]) % p
            r.pop()
        return any(x % p for x in r)

    def _build_mul_table(self):
        q = self.order
        table = [[0] * q for _ in range(q)]
        dec = [self._decode(e) for e in range(q)]
        for a in range(q):
            for b in range(a, q):
                prod = self._encode(_poly_mul_mod(dec[a], dec[b], self.modulus, self.p))
                table[a][b] = prod
                table[b][a] = prod
        return table

    def add(self, a: int, b: int) -> int:
        da, db = self._decode(a), self._decode(b)
        return self._encode(tuple((x + y) % self.p for x, y in zip(da, db)))

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def trace(self, a: int) -> int:
        """Field trace to GF(p), returned as an int in [0, p)."""
        acc = 0
        x = a
        for _ in range(self.k):
            acc = self.add(acc, x)
            y = x
            for _ in range(self.p - 1):
                y = self.mul(y, x)
            x = y  # x -> x^p
        # acc lies in the prime subfield, i.e. a constant polynomial
        return acc % self.p


class GaloisRing4:
    """GR(4, k) = Z4[x]/(h) with h a basic irreducible Hensel lift.

    Elements are ints encoding base-4 coefficient tuples. Supplies the
    Teichmuller set and the Frobenius trace to Z4 used by the even
    prime-power MUB construction.
    """

    def __init__(self, k: int):
        self.k = k
        self.order = 4 ** k
        self.n_units = 2 ** k - 1
        self.modulus = self._find_basic_irreducible()
        self.teichmuller = self._build_teichmuller()
        self._two_adic = self._build_two_adic()

    def _decode(self, e: int):
        digits = []
        for _ in range(self.k):
            digits.append(e % 4)
            e //= 4
        return tuple(digits)

    def _encode(self, digits) -> int:
        e = 0
        for c in reversed(digits):
            e = e * 4 + c
        return e

    def mul(self, a: int, b: int) -> int:
        return self._encode(_poly_mul_mod(self._decode(a), self._decode(b), self.modulus, 4))

    def add(self, a: int, b: int) -> int:
        da, db = self._decode(a), self._decode(b)
        return self._encode(tuple((x + y) % 4 for x, y in zip(da, db)))

    def _find_basic_irreducible(self):
        """Monic degree-k h over Z4 whose root has multiplicative order 2^k - 1.

        Searched as a lift of a primitive polynomial over GF(2): each
        coefficient may gain +2, and the correct lift is recognized by
        x^(2^k - 1) == 1 in Z4[x]/(h).
        """
        k = self.k
        f2 = GaloisField(2, k).modulus if k > 1 else (1,)
        one = (1,) + (0,) * (k - 1)
        for extra in itertools.product((0, 2), repeat=k):
            cand = tuple((c + e) % 4 for c, e in zip(f2, extra))
            x = ((4 - cand[0]) % 4,) if k == 1 else (0, 1) + (0,) * (k - 2)
            acc = one
            for _ in range(self.n_units):
                acc = _poly_mul_mod(acc, x, cand, 4)
            if acc == one:
                return cand
        raise RuntimeError(f"no basic irreducible lift found for GR(4, {self.k})")

    def _generator(self) -> int:
        if self.k == 1:
            return (4 - self.modulus[0]) % 4  # residue of x for h = x + c0
        return self._encode((0, 1) + (0,) * (self.k - 2))

    def _build_teichmuller(self):
        """[0, 1, xi, xi^2, ..., xi^(2^k - 2)] as element ids."""
        one = self._encode((1,) + (0,) * (self.k - 1))
        xi = self._generator()
        out = [0, one]
        acc = one
        for _ in range(self.n_units - 1):
            acc = self.mul(acc, xi)
            out.append(acc)
        if len(set(out)) != self.n_units + 1:
            raise RuntimeError("Teichmuller set is degenerate")
        return out

    def _build_two_adic(self):
        """Map e -> (a, b) with e = a + 2b and a, b Teichmuller elements."""
        table = {}
        for a in self.teichmuller:
            for b in self.teichmuller:
                two_b = self.add(b, b)
                table[self.add(a, two_b)] = (a, b)
        return table

    def frobenius(self, e: int) -> int:
        a, b = self._two_adic[e]
        a2 = self.mul(a, a)
        b2 = self.mul(b, b)
        return self.add(a2, self.add(b2, b2))

    def trace4(self, e: int) -> int:
        """Frobenius trace GR(4,k) -> Z4, as an int mod 4."""
        acc = 0
        x = e
        for _ in range(self.k):
            acc = self.add(acc, x)
            x = self.frobenius(x)
        return self._decode(acc)[0]
