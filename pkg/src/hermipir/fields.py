"""Arithmetic in GF(p^n) and in the quadratic tower F_p < F_q < F_{q^2}.

Field elements are plain Python ints in ``range(order)``: the integer is the
little-endian base-p encoding of the coefficient vector of the residue
polynomial, so ``2 + 3*p`` stands for ``2 + 3*t`` where ``t`` is the class of
the variable modulo the reduction polynomial.  All arithmetic lives on the
field object; the ``*_arr`` variants act elementwise on numpy arrays of
encodings (with broadcasting), which is what keeps the matrix work and the
curve searches fast.

The reduction polynomial is not an input: for every (p, n) we pick the monic
irreducible polynomial of degree n whose constant-first coefficient vector is
smallest in the integer encoding, so a field is reproducible from (p, n)
alone.  Multiplication uses discrete-log tables whenever the order is at most
2**16 and falls back to schoolbook polynomial arithmetic above that (orders
up to 2**20 are accepted).
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


MAX_ORDER = 2**20
_TABLE_LIMIT = 2**16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending (trial division)."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


def factor_prime_power(n: int) -> tuple[int, int]:
    """Return (p, k) with n == p**k, or raise ValueError."""
    if n < 2:
        raise ValueError(f"{n} is not a prime power")
    fs = prime_factors(n)
    if len(fs) != 1:
        raise ValueError(f"{n} is not a prime power")
    p = fs[0]
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    if n != 1:
        raise ValueError("not a prime power")
    return p, k


# ----------------------------------------------------------------------
# dense little-endian coefficient vectors over F_p (bootstrap arithmetic)
# ----------------------------------------------------------------------

def _poly_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mulmod(a: Sequence[int], b: Sequence[int], mod: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return _poly_modred(out, mod, p)


def _poly_modred(a: list[int], mod: Sequence[int], p: int) -> list[int]:
    # mod is monic of degree d = len(mod) - 1
    d = len(mod) - 1
    a = list(a)
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i] % p
        if c:
            a[i] = 0
            for j in range(d):
                a[i - d + j] = (a[i - d + j] - c * mod[j]) % p
    return _poly_trim(a[:d] if len(a) > d else a)


def _poly_powmod_x(e: int, mod: Sequence[int], p: int) -> list[int]:
    """x**e reduced mod the monic polynomial `mod`, square-and-multiply."""
    result = [1]
    base = _poly_modred([0, 1], mod, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        inv_lead = pow(b[-1], p - 2, p)
        monic_b = [(c * inv_lead) % p for c in b]
        r = _poly_modred(a, monic_b, p)
        a, b = b, r
    return a


def _is_irreducible(f: Sequence[int], p: int, n: int) -> bool:
    """Degree-n monic f over F_p: x**(p**n) == x mod f, and for every prime
    r | n the polynomial x**(p**(n//r)) - x is coprime to f."""
    xq = _poly_powmod_x(p**n, f, p)
    if _poly_trim(list(xq)) != [0, 1]:
        return False
    for r in prime_factors(n):
        xe = _poly_powmod_x(p ** (n // r), f, p)
        diff = list(xe) + [0] * max(0, 2 - len(xe))
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(list(f), _poly_trim(diff), p)
        if len(g) > 1:
            return False
    return True


def _lowest_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Monic degree-n irreducible over F_p with the smallest little-endian
    integer encoding of its lower-coefficient vector."""
    if n == 1:
        return (0, 1)
    for enc in range(p**n):
        coeffs = []
        e = enc
        for _ in range(n):
            coeffs.append(e % p)
            e //= p
        f = coeffs + [1]
        if _is_irreducible(f, p, n):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def _prime_kernel_basis(mat: list[list[int]], p: int) -> list[list[int]]:
    """Kernel basis of a small matrix over F_p (row-reduced, pure python)."""
    rows = [list(r) for r in mat]
    n_rows, n_cols = len(rows), len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        lead = next((i for i in range(r, n_rows) if rows[i][c] % p), None)
        if lead is None:
            continue
        rows[r], rows[lead] = rows[lead], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [(v * inv) % p for v in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(vi - f * vr) % p for vi, vr in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * n_cols
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = (-rows[i][fc]) % p
        basis.append(vec)
    return basis


class GFField:
    """The finite field GF(p^n) with int-encoded elements.

    Elements are the ints 0..order-1.  Scalar methods take/return ints; the
    ``*_arr`` methods take/return numpy int64 arrays (any broadcastable
    shapes) of encodings.
    """

    def __init__(self, p: int, n: int = 1):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if n < 1:
            raise ValueError("extension degree must be >= 1")
        order = p**n
        if order > MAX_ORDER:
            raise ValueError(f"field order {order} exceeds supported limit {MAX_ORDER}")
        self.p = p
        self.n = n
        self.order = order
        self.modulus = _lowest_irreducible(p, n)
        self._pk = tuple(p**k for k in range(n))
        self._exp: np.ndarray | None = None
        self._log: np.ndarray | None = None
        self.generator: int | None = None
        if order <= _TABLE_LIMIT:
            self._build_tables()

    # -- construction helpers ------------------------------------------------

    def _build_tables(self) -> None:
        """Discrete-log tables.  A candidate is primitive iff walking its
        powers returns to 1 only after order-1 steps, which builds the exp
        table as a side effect."""
        order = self.order
        if order == 2:
            self.generator = 1
            self._exp = np.array([1, 1], dtype=np.int64)
            self._log = np.array([0, 0], dtype=np.int64)
            return
        for cand in range(2, order):
            exp = np.zeros(2 * (order - 1), dtype=np.int64)
            v = 1
            k = 0
            while True:
                exp[k] = v
                v = self._mul_slow(v, cand)
                k += 1
                if v == 1:
                    break
            if k == order - 1:
                exp[order - 1 : 2 * (order - 1)] = exp[: order - 1]
                log = np.zeros(order, dtype=np.int64)
                log[exp[: order - 1]] = np.arange(order - 1)
                self.generator = cand
                self._exp = exp
                self._log = log
                return
        raise AssertionError("no generator found")  # pragma: no cover

    # -- encoding ------------------------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        """Little-endian base-p coefficient vector of length n."""
        return tuple((a // pk) % self.p for pk in self._pk)

    def from_coeffs(self, cs: Iterable[int]) -> int:
        cs = list(cs)
        if len(cs) > self.n:
            raise ValueError("too many coefficients")
        return sum((c % self.p) * self._pk[k] for k, c in enumerate(cs))

    def element_str(self, a: int) -> str:
        """Textual form, e.g. ``[2,3]`` for 2 + 3t."""
        return "[" + ",".join(str(c) for c in self.coeffs(a)) + "]"

    def element_from_str(self, s: str) -> int:
        body = s.strip().lstrip("[").rstrip("]")
        return self.from_coeffs(int(c) for c in body.split(",") if c.strip() != "")

    def elements(self) -> range:
        """All elements in a fixed deterministic order; the first is 0."""
        return range(self.order)

    # -- scalar arithmetic ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        p = self.p
        out = 0
        for pk in self._pk:
            out += (((a // pk) + (b // pk)) % p) * pk
        return out

    def neg(self, a: int) -> int:
        p = self.p
        out = 0
        for pk in self._pk:
            out += ((p - (a // pk) % p) % p) * pk
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _mul_slow(self, a: int, b: int) -> int:
        ca = [(a // pk) % self.p for pk in self._pk]
        cb = [(b // pk) % self.p for pk in self._pk]
        prod = _poly_modred(
            [
                sum(ca[i] * cb[k - i] for i in range(max(0, k - self.n + 1), min(k, self.n - 1) + 1)) % self.p
                for k in range(2 * self.n - 1)
            ],
            self.modulus,
            self.p,
        )
        out = 0
        for k, c in enumerate(prod):
            out += c * self._pk[k]
        return out

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return int(self._exp[self._log[a] + self._log[b]])
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        if self._exp is not None:
            return int(self._exp[(self.order - 1) - self._log[a]])
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 1 if e == 0 else 0
        if self._exp is not None:
            return int(self._exp[(int(self._log[a]) * e) % (self.order - 1)])
        result = 1
        base = a
        while e:
            if e & 1:
                result = self._mul_slow(result, base)
            base = self._mul_slow(base, base)
            e >>= 1
        return result

    # -- bulk arithmetic on encoding arrays -----------------------------------

    def add_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
        p = self.p
        for pk in self._pk:
            out += (((a // pk) + (b // pk)) % p) * pk
        return out

    def neg_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros(a.shape, dtype=np.int64)
        p = self.p
        for pk in self._pk:
            out += ((p - (a // pk) % p) % p) * pk
        return out

    def sub_arr(self, a, b) -> np.ndarray:
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._exp is None:
            broad = np.broadcast(a, b)
            return np.array([self.mul(int(x), int(y)) for x, y in broad], dtype=np.int64).reshape(broad.shape)
        out = self._exp[self._log[a] + self._log[b]]
        zero = (a == 0) | (b == 0)
        if out.ndim == 0:
            return np.int64(0) if zero else out
        out[zero] = 0
        return out

    def inv_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("0 has no multiplicative inverse")
        if self._exp is None:
            return np.array([self.inv(int(x)) for x in a.ravel()], dtype=np.int64).reshape(a.shape)
        return self._exp[(self.order - 1) - self._log[a]]

    def pow_arr(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones(a.shape, dtype=np.int64)
        if e < 0:
            return self.pow_arr(self.inv_arr(a), -e)
        if self._exp is None:
            return np.array([self.pow(int(x), e) for x in a.ravel()], dtype=np.int64).reshape(a.shape)
        out = self._exp[(self._log[a] * e) % (self.order - 1)]
        if out.ndim == 0:
            return np.int64(0) if a == 0 else out
        out[a == 0] = 0
        return out

    def sum_arr(self, a, axis=None) -> np.ndarray:
        """Field sum along `axis` (per-digit modular sums)."""
        a = np.asarray(a, dtype=np.int64)
        out = None
        p = self.p
        for pk in self._pk:
            digit = ((a // pk) % p).sum(axis=axis) % p
            out = digit * pk if out is None else out + digit * pk
        return out

    def matmul_arr(self, a, b) -> np.ndarray:
        """Field matrix product of 2-D encoding arrays (k inner loop)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[1] != b.shape[0]:
            raise ValueError("inner dimensions differ")
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for k in range(a.shape[1]):
            out = self.add_arr(out, self.mul_arr(a[:, k : k + 1], b[k : k + 1, :]))
        return out

    # -- sampling -------------------------------------------------------------

    def sample_uniform(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, self.order))

    def sample_arr(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.order, size=shape, dtype=np.int64)

    def __repr__(self) -> str:  # pragma: no cover
        return f"GFField(p={self.p}, n={self.n})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GFField) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self) -> int:
        return hash(("GFField", self.p, self.n))


class FieldTower:
    """The extension pair F_q < F_{q^2} with q = p^h, built over one GFField.

    Exposes the q-power Frobenius, the relative norm a**(q+1) and trace
    a**q + a onto the subfield, and a deterministic subfield enumeration.
    """

    def __init__(self, p: int, h: int):
        self.p = p
        self.h = h
        self.q = p**h
        self.q2 = self.q**2
        self.field = GFField(p, 2 * h)
        self.subfield_elements = self._enumerate_subfield()

    def _enumerate_subfield(self) -> tuple[int, ...]:
        """Fixed points of a -> a**q, found as the kernel of the F_p-linear
        map a -> a**q - a on the coefficient space (avoids a full-field scan)."""
        f = self.field
        n = f.n
        # columns of the map on the monomial basis 1, t, t^2, ...
        cols = []
        for k in range(n):
            e_k = f._pk[k]
            cols.append(f.coeffs(f.sub(f.pow(e_k, self.q), e_k)))
        mat = [[cols[k][row] for k in range(n)] for row in range(n)]
        kernel = _prime_kernel_basis(mat, self.p)
        if len(kernel) != self.h:
            raise AssertionError("subfield enumeration failed")  # pragma: no cover
        kernel_els = [f.from_coeffs(vec) for vec in kernel]
        subf = []
        for combo in range(self.p ** len(kernel)):
            acc = 0
            rem = combo
            for el in kernel_els:
                c = rem % self.p
                rem //= self.p
                if c:
                    acc = f.add(acc, f.mul(el, c))
            subf.append(acc)
        subf.sort()
        if len(set(subf)) != self.q:
            raise AssertionError("subfield enumeration failed")  # pragma: no cover
        return tuple(subf)

    def frobenius(self, a: int) -> int:
        return self.field.pow(a, self.q)

    def frobenius_arr(self, a) -> np.ndarray:
        return self.field.pow_arr(a, self.q)

    def in_subfield(self, a: int) -> bool:
        return self.frobenius(a) == a

    def subfield_norm(self, a: int) -> int:
        """a**(q+1); maps onto F_q."""
        return self.field.mul(a, self.frobenius(a))

    def subfield_norm_arr(self, a) -> np.ndarray:
        return self.field.mul_arr(a, self.frobenius_arr(a))

    def subfield_trace(self, a: int) -> int:
        """a**q + a; maps onto F_q with fibers of size q."""
        return self.field.add(a, self.frobenius(a))

    def subfield_trace_arr(self, a) -> np.ndarray:
        return self.field.add_arr(a, self.frobenius_arr(a))

    def __repr__(self) -> str:  # pragma: no cover
        return f"FieldTower(p={self.p}, h={self.h}; q={self.q})"


@lru_cache(maxsize=None)
def _tower_cached(p: int, h: int) -> FieldTower:
    return FieldTower(p, h)


def create_tower(p: int, h: int) -> FieldTower:
    """Build the tower F_p < F_{p^h} < F_{p^{2h}}.

    Rejects non-prime p and towers whose top field would exceed 2**20
    elements.  Towers are cached: repeated calls return the same object.
    """
    if not is_prime(p):
        raise ValueError(f"characteristic {p} is not prime")
    if h < 1:
        raise ValueError("tower height must be >= 1")
    if p ** (2 * h) > MAX_ORDER:
        raise ValueError(f"top field order {p**(2*h)} exceeds supported limit {MAX_ORDER}")
    return _tower_cached(p, h)


def tower_for_prime_power(q: int) -> FieldTower:
    """Tower with middle field of order exactly q (q a prime power)."""
    p, h = factor_prime_power(q)
    return create_tower(p, h)


@lru_cache(maxsize=None)
def field_of_order(order: int) -> GFField:
    """The field GF(order) for a prime power `order` (cached)."""
    p, k = factor_prime_power(order)
    return GFField(p, k)
