"""The Hermitian curve x^(q+1) = y^q + y over F_{q^2} and its function spaces.

Points: q^3 affine points plus one point at infinity (the ``INFINITY``
sentinel).  The affine fiber over an x-value consists of the q solutions of
y^q + y = x^(q+1), i.e. the trace fiber over the norm of x.  The origin
(0, 0) is the only affine point where y vanishes, and the curve has genus
q(q-1)/2.

Functions on the curve are quotients of bivariate polynomials, kept reduced
so the y-degree stays below q via the curve relation y^q = x^(q+1) - y.  In
reduced form the infinity-pole orders q*i + (q+1)*j of distinct monomials
x^i y^j are pairwise distinct, so the valuation at infinity of a polynomial
is exactly minus the largest pole order among its monomials; valuations of
quotients follow by subtraction.  At the origin, x is a uniformizer and y
has valuation q+1.

The module builds four function families used by the retrieval scheme:

* ``one_point_basis`` - monomials with a bounded pole at infinity only,
* ``two_point_monomial_set`` - monomials with poles at infinity and origin,
* ``interpolation_basis`` - the per-fragment interpolation functions, listed
  y-power-major and truncated to the fragment count,
* ``info_basis`` - the same functions divided by the product of all data
  linear factors, in closed form with exactly ``z`` denominator factors.
"""

from __future__ import annotations

import io
from functools import lru_cache

import numpy as np

from hermipir.fields import FieldTower

INFINITY = "infinity"

Poly = dict[tuple[int, int], int]  # (x_power, y_power) -> coefficient encoding


class HermitianCurve:
    def __init__(self, tower: FieldTower):
        self.tower = tower
        self.field = tower.field
        self.q = tower.q
        self.genus = tower.q * (tower.q - 1) // 2
        self._trace_fibers: dict[int, tuple[int, ...]] = {}
        for y in self.field.elements():
            self._trace_fibers.setdefault(tower.subfield_trace(y), tuple())
        fibers: dict[int, list[int]] = {t: [] for t in self._trace_fibers}
        for y in self.field.elements():
            fibers[tower.subfield_trace(y)].append(y)
        self._trace_fibers = {t: tuple(sorted(v)) for t, v in fibers.items()}

    def fiber_of_x(self, x: int) -> tuple[int, ...]:
        """The q affine points over x, as their y-values in ascending order."""
        return self._trace_fibers[self.tower.subfield_norm(x)]

    def affine_points(self) -> list[tuple[int, int]]:
        """All q^3 affine points, ordered by (x, y) encoding."""
        out = []
        for x in self.field.elements():
            for y in self.fiber_of_x(x):
                out.append((x, y))
        return out

    def enumerate_points(self):
        """All q^3 + 1 points in a fixed order; infinity comes last."""
        return self.affine_points() + [INFINITY]

    def on_curve(self, x: int, y: int) -> bool:
        f = self.field
        return f.pow(x, self.q + 1) == f.add(f.pow(y, self.q), y)

    # -- reduced bivariate polynomial arithmetic ------------------------------

    def reduce_poly(self, poly: Poly) -> Poly:
        """Push y-degrees below q using y^q = x^(q+1) - y."""
        f = self.field
        q = self.q
        out: Poly = {}
        work = list(poly.items())
        while work:
            (i, j), c = work.pop()
            if c == 0:
                continue
            if j < q:
                cur = f.add(out.get((i, j), 0), c)
                if cur:
                    out[(i, j)] = cur
                elif (i, j) in out:
                    del out[(i, j)]
            else:
                work.append(((i + q + 1, j - q), c))
                work.append(((i, j - q + 1), f.neg(c)))
        return out

    def poly_mul(self, a: Poly, b: Poly) -> Poly:
        f = self.field
        conv: Poly = {}
        for (ia, ja), ca in a.items():
            for (ib, jb), cb in b.items():
                key = (ia + ib, ja + jb)
                conv[key] = f.add(conv.get(key, 0), f.mul(ca, cb))
        return self.reduce_poly(conv)

    def poly_add(self, a: Poly, b: Poly) -> Poly:
        f = self.field
        out = dict(a)
        for key, c in b.items():
            cur = f.add(out.get(key, 0), c)
            if cur:
                out[key] = cur
            elif key in out:
                del out[key]
        return out

    def poly_eval_arr(self, poly: Poly, xs, ys) -> np.ndarray:
        f = self.field
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        out = np.zeros(np.broadcast_shapes(xs.shape, ys.shape), dtype=np.int64)
        for (i, j), c in poly.items():
            term = f.mul_arr(f.pow_arr(xs, i), f.pow_arr(ys, j))
            out = f.add_arr(out, f.mul_arr(np.int64(c), term))
        return out

    def poly_infty_valuation(self, poly: Poly) -> int:
        """Exact valuation at infinity of a reduced nonzero polynomial."""
        if not poly:
            raise ValueError("zero polynomial has no valuation")
        q = self.q
        return -max(q * i + (q + 1) * j for (i, j) in poly)

    def poly_str(self, poly: Poly) -> str:
        if not poly:
            return "0"
        f = self.field
        parts = []
        for (i, j) in sorted(poly, key=lambda ij: (ij[1], ij[0])):
            c = f.element_str(poly[(i, j)])
            factors = [c]
            if i:
                factors.append(f"x^{i}" if i > 1 else "x")
            if j:
                factors.append(f"y^{j}" if j > 1 else "y")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def linear_factor(self, alpha: int) -> Poly:
        """The polynomial x - alpha."""
        out: Poly = {(1, 0): 1}
        if alpha:
            out[(0, 0)] = self.field.neg(alpha)
        return out

    def monomial_function(self, i: int, j: int) -> "CurveFunction":
        """x^i * y^j as a function; negative j puts y-powers below the bar."""
        num: Poly = {(i, max(j, 0)): 1}
        den: Poly = {(0, -j if j < 0 else 0): 1}
        return CurveFunction(self, num, den)


class CurveFunction:
    """A function on the curve, stored as reduced numerator / denominator."""

    __slots__ = ("curve", "num", "den")

    def __init__(self, curve: HermitianCurve, num: Poly, den: Poly | None = None):
        self.curve = curve
        self.num = curve.reduce_poly(num)
        self.den = curve.reduce_poly(den) if den is not None else {(0, 0): 1}
        if not self.den:
            raise ZeroDivisionError("zero denominator")

    def __mul__(self, other: "CurveFunction") -> "CurveFunction":
        if self.curve is not other.curve:
            raise ValueError("functions live on different curves")
        return CurveFunction(
            self.curve,
            self.curve.poly_mul(self.num, other.num),
            self.curve.poly_mul(self.den, other.den),
        )

    def __add__(self, other: "CurveFunction") -> "CurveFunction":
        if self.curve is not other.curve:
            raise ValueError("functions live on different curves")
        c = self.curve
        num = c.poly_add(c.poly_mul(self.num, other.den), c.poly_mul(other.num, self.den))
        return CurveFunction(c, num, c.poly_mul(self.den, other.den))

    def reciprocal(self) -> "CurveFunction":
        if not self.num:
            raise ZeroDivisionError("cannot invert the zero function")
        return CurveFunction(self.curve, self.den, self.num)

    def is_zero(self) -> bool:
        return not self.num

    def evaluate(self, point) -> int:
        """Value at an affine point; raises on infinity and at poles."""
        if point == INFINITY:
            raise ValueError("cannot evaluate at the point at infinity")
        x, y = point
        f = self.curve.field
        den_v = int(self.curve.poly_eval_arr(self.den, np.int64(x), np.int64(y)))
        if den_v == 0:
            raise ValueError(f"function has a pole (or 0/0 form) at {(x, y)}")
        num_v = int(self.curve.poly_eval_arr(self.num, np.int64(x), np.int64(y)))
        return f.mul(num_v, f.inv(den_v))

    def evaluate_many(self, points) -> np.ndarray:
        xs = np.array([p[0] for p in points], dtype=np.int64)
        ys = np.array([p[1] for p in points], dtype=np.int64)
        f = self.curve.field
        den_v = self.curve.poly_eval_arr(self.den, xs, ys)
        if np.any(den_v == 0):
            bad = int(np.flatnonzero(den_v == 0)[0])
            raise ValueError(f"function has a pole (or 0/0 form) at {points[bad]}")
        num_v = self.curve.poly_eval_arr(self.num, xs, ys)
        return f.mul_arr(num_v, f.inv_arr(den_v))

    def valuation_at_infinity(self) -> int:
        """Exact: pole orders of reduced monomials are pairwise distinct."""
        if not self.num:
            raise ValueError("zero function has no valuation")
        return self.curve.poly_infty_valuation(self.num) - self.curve.poly_infty_valuation(self.den)

    def valuation_at_origin(self) -> int:
        """Valuation at (0, 0); exact for the forms used here (a polynomial
        not vanishing at the origin, or a pure monomial times such)."""
        return self._origin_val(self.num) - self._origin_val(self.den)

    def _origin_val(self, poly: Poly) -> int:
        if not poly:
            raise ValueError("zero polynomial has no valuation")
        const = poly.get((0, 0), 0)
        if const:
            return 0
        if len(poly) == 1:
            (i, j), _ = next(iter(poly.items()))
            return i + (self.curve.q + 1) * j
        raise NotImplementedError("origin valuation only supported for units and monomials")

    def __repr__(self) -> str:
        c = self.curve
        if self.den == {(0, 0): 1}:
            return c.poly_str(self.num)
        return f"({c.poly_str(self.num)}) / ({c.poly_str(self.den)})"


# -- function families ---------------------------------------------------------


def one_point_monomials(q: int, max_pole: int) -> list[tuple[int, int]]:
    """Exponent pairs (i, j) with 0 <= j <= q-1 and q*i + (q+1)*j <= max_pole,
    sorted by increasing pole order at infinity."""
    out = []
    for j in range(min(q, max_pole // (q + 1) + 1)):
        rem = max_pole - (q + 1) * j
        for i in range(rem // q + 1):
            out.append((i, j))
    out.sort(key=lambda ij: q * ij[0] + (q + 1) * ij[1])
    return out


def one_point_basis(curve: HermitianCurve, max_pole: int) -> list[CurveFunction]:
    """Basis of the functions regular away from infinity with pole order at
    most `max_pole` there.  Size max_pole - g + 1 once max_pole > 2g - 2."""
    if max_pole < 0:
        return []
    return [curve.monomial_function(i, j) for i, j in one_point_monomials(curve.q, max_pole)]


def two_point_monomials(q: int, infty_bound: int, origin_bound: int) -> list[tuple[int, int]]:
    """Exponent pairs (i, j), 0 <= i <= q and j any integer, with pole order
    at infinity at most `infty_bound` and at the origin at most
    `origin_bound`; sorted by increasing pole order at infinity."""
    out = []
    for i in range(q + 1):
        j_hi = (infty_bound - q * i) // (q + 1)
        j_lo = -((origin_bound + i) // (q + 1))
        for j in range(j_lo, j_hi + 1):
            out.append((i, j))
    out.sort(key=lambda ij: q * ij[0] + (q + 1) * ij[1])
    return out


def two_point_monomial_set(
    curve: HermitianCurve, infty_bound: int, origin_bound: int
) -> tuple[list[CurveFunction], bool]:
    """Monomial functions with poles confined to infinity and the origin,
    within the given orders.  The second return value reports whether the
    count equals infty_bound + origin_bound - g + 1, the dimension the
    Riemann-Roch theorem prescribes for divisor degrees above 2g - 2; when
    it does, the (automatically independent) set is a full basis.
    """
    mons = two_point_monomials(curve.q, infty_bound, origin_bound)
    fns = [curve.monomial_function(i, j) for i, j in mons]
    complete = len(mons) == infty_bound + origin_bound - curve.genus + 1
    return fns, complete


def _check_alphas(curve: HermitianCurve, alphas) -> list[int]:
    alphas = [int(a) for a in alphas]
    if len(set(alphas)) != len(alphas):
        raise ValueError("data x-values must be distinct")
    if any(a == 0 for a in alphas):
        raise ValueError("data x-values must avoid 0 (its fiber contains the origin)")
    if any(not 0 < a < curve.field.order for a in alphas):
        raise ValueError("data x-values must be nonzero field elements")
    return alphas


def build_h(curve: HermitianCurve, alphas) -> CurveFunction:
    """1 / prod(x - alpha): poles exactly at the data fibers, a zero of
    order (number of alphas) * q at infinity."""
    alphas = _check_alphas(curve, alphas)
    den: Poly = {(0, 0): 1}
    for a in alphas:
        den = curve.poly_mul(den, curve.linear_factor(a))
    return CurveFunction(curve, {(0, 0): 1}, den)


def interpolation_labels(q: int, m: int) -> list[tuple[int, int]]:
    """(z, i) labels, z-major, truncated to the fragment count m*q - g.
    z is the y-power plus one; i indexes the omitted linear factor, 1-based
    within the leading m - z + 1 data x-values."""
    genus = q * (q - 1) // 2
    frag_count = m * q - genus
    out: list[tuple[int, int]] = []
    z = 1
    while len(out) < frag_count:
        if z > m:
            raise AssertionError("label enumeration exhausted early")  # pragma: no cover
        for i in range(1, m - z + 2):
            if len(out) == frag_count:
                break
            out.append((z, i))
        z += 1
    return out


def interpolation_basis(curve: HermitianCurve, m: int, alphas) -> list[CurveFunction]:
    """The fragment interpolation functions y^(z-1) * prod_{i' != i}(x - a_i'),
    taking the product over the leading m - z + 1 data x-values; listed
    z-major and truncated to exactly m*q - g functions."""
    q = curve.q
    if m < (q + 1) / 2:
        raise ValueError(f"need at least (q+1)/2 = {(q + 1) / 2} data x-values, got {m}")
    alphas = _check_alphas(curve, alphas)
    if len(alphas) != m:
        raise ValueError("alpha count must equal m")
    out = []
    for z, i in interpolation_labels(q, m):
        num: Poly = {(0, z - 1): 1}
        for idx in range(m - z + 1):
            if idx != i - 1:
                num = curve.poly_mul(num, curve.linear_factor(alphas[idx]))
        out.append(CurveFunction(curve, num))
    return out


def info_basis(curve: HermitianCurve, m: int, alphas) -> list[CurveFunction]:
    """The decoding-side functions h * (interpolation basis), in closed form:
    for label (z, i) this is y^(z-1) / ((x - a_i) * prod of the trailing z-1
    data linear factors), so the denominator has exactly z linear factors.
    Valuation at infinity is q - z + 1 >= 0; all poles sit in data fibers."""
    q = curve.q
    alphas = _check_alphas(curve, alphas)
    if len(alphas) != m:
        raise ValueError("alpha count must equal m")
    out = []
    for z, i in interpolation_labels(q, m):
        den = curve.linear_factor(alphas[i - 1])
        for idx in range(m - z + 1, m):
            den = curve.poly_mul(den, curve.linear_factor(alphas[idx]))
        out.append(CurveFunction(curve, {(0, z - 1): 1}, den))
    return out


# -- serialization ---------------------------------------------------------------


def points_csv(curve: HermitianCurve) -> str:
    """CSV of all points: coefficient vectors of x and y, infinity last."""
    buf = io.StringIO()
    f = curve.field
    buf.write("x,y\n")
    for p in curve.enumerate_points():
        if p == INFINITY:
            buf.write("infinity,infinity\n")
        else:
            buf.write(f'"{f.element_str(p[0])}","{f.element_str(p[1])}"\n')
    return buf.getvalue()


def basis_csv(curve: HermitianCurve, m: int, alphas) -> str:
    """CSV of the decoding-side basis: label (z, i) plus numerator and
    denominator in textual polynomial form."""
    buf = io.StringIO()
    buf.write("z,i,numerator,denominator\n")
    labels = interpolation_labels(curve.q, m)
    for (z, i), fn in zip(labels, info_basis(curve, m, alphas)):
        buf.write(f'{z},{i},"{curve.poly_str(fn.num)}","{curve.poly_str(fn.den)}"\n')
    return buf.getvalue()


@lru_cache(maxsize=None)
def curve_for_q(q: int) -> HermitianCurve:
    from hermipir.fields import tower_for_prime_power

    return HermitianCurve(tower_for_prime_power(q))
