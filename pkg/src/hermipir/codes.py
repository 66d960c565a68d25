"""Evaluation codes from curve functions, with distance and independence
certificates.

An evaluation code is the image of a function space under evaluation at a
fixed list of affine points.  `degG` is the degree of the pole divisor that
the function space fills out; the standard bounds then read

* designed minimum distance of the code:  N - degG,
* minimum distance of the dual:           degG - 2*genus + 2,

both valid whenever they are positive.  Brute-force routines verify the
bounds on small instances, and the w-wise independence check certifies that
every w columns of the generator matrix are linearly independent (the
combinatorial face of the dual-distance bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from hermipir.fields import GFField
from hermipir.linalg import rank, right_kernel_basis

_EXHAUSTIVE_SUBSET_LIMIT = 10**6
_BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class EvalCode:
    """A k x N generator matrix of function evaluations over `field`."""

    field: GFField
    gen: np.ndarray
    genus: int
    degG: int
    points: tuple | None = None
    functions: tuple | None = None

    @property
    def k(self) -> int:
        return self.gen.shape[0]

    @property
    def n(self) -> int:
        return self.gen.shape[1]


def generator_matrix(field: GFField, functions, points, genus: int, degG: int) -> EvalCode:
    """Evaluate `functions` (rows) at `points` (columns).  Raises if any
    function has a pole at any of the points."""
    gen = np.stack([fn.evaluate_many(points) for fn in functions], axis=0)
    return EvalCode(field=field, gen=gen, genus=genus, degG=degG,
                    points=tuple(points), functions=tuple(functions))


def from_matrix(field: GFField, gen, genus: int, degG: int) -> EvalCode:
    return EvalCode(field=field, gen=np.asarray(gen, dtype=np.int64), genus=genus, degG=degG)


def goppa_designed_distance(code: EvalCode) -> int:
    """N - degG: every nonzero codeword has at least this many nonzeros
    (meaningful when positive)."""
    return code.n - code.degG


def dual_distance_bound(code: EvalCode) -> int:
    """degG - 2*genus + 2: lower bound on the dual minimum distance,
    meaningful when positive."""
    return code.degG - 2 * code.genus + 2


def check_w_wise_independence(
    code: EvalCode,
    w: int,
    mode: str = "exhaustive",
    count: int | None = None,
    seed: int | None = None,
) -> tuple[bool, tuple[int, ...] | None]:
    """Certify that every w columns of the generator are independent.

    mode="exhaustive" walks all column subsets of size w (refused above 10^6
    subsets); mode="sampled" draws `count` random subsets with `seed`.
    Returns (ok, None) or (False, offending column index tuple).
    """
    if w < 1:
        raise ValueError("w must be >= 1")
    gen = code.gen
    n = code.n
    if mode == "exhaustive" and math.comb(n, w) > _EXHAUSTIVE_SUBSET_LIMIT:
        raise ValueError(
            f"{math.comb(n, w)} subsets exceed the exhaustive limit "
            f"{_EXHAUSTIVE_SUBSET_LIMIT}; use sampled mode"
        )
    if w > code.k:
        # more columns than the ambient dimension: never independent
        return False, tuple(range(w))
    zero_cols = np.flatnonzero((gen == 0).all(axis=0))
    if zero_cols.size:
        return False, (int(zero_cols[0]),)
    if w == 1:
        return True, None

    f = code.field
    # canonical form for the pairwise test: scale each column so its first
    # nonzero entry is 1; two columns are dependent iff their forms agree
    first_nz = (gen != 0).argmax(axis=0)
    lead = gen[first_nz, np.arange(n)]
    canon = f.mul_arr(gen, f.inv_arr(lead)[None, :])

    def subset_ok(subset) -> bool:
        if w == 2:
            a, b = subset
            return not (canon[:, a] == canon[:, b]).all()
        return rank(f, gen[:, list(subset)]) == w

    if mode == "exhaustive":
        subsets = combinations(range(n), w)
    elif mode == "sampled":
        if count is None:
            raise ValueError("sampled mode needs a subset count")
        rng = np.random.default_rng(seed)
        subsets = (tuple(sorted(rng.choice(n, size=w, replace=False).tolist())) for _ in range(count))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    for subset in subsets:
        if not subset_ok(subset):
            return False, tuple(subset)
    return True, None


def _enumerate_codeword_weights(field: GFField, basis: np.ndarray) -> int:
    """Minimum Hamming weight over all nonzero combinations of `basis` rows."""
    k, n = basis.shape
    total = field.order**k
    if total > _BRUTE_FORCE_LIMIT:
        raise ValueError(f"{total} codewords exceed the brute-force limit {_BRUTE_FORCE_LIMIT}")
    # expand the span one basis row at a time
    words = np.zeros((1, n), dtype=np.int64)
    for i in range(k):
        scaled = [
            field.add_arr(words, field.mul_arr(np.int64(s), basis[i][None, :]))
            for s in range(field.order)
        ]
        words = np.concatenate(scaled, axis=0)
    weights = (words != 0).sum(axis=1)
    nonzero = weights[(words != 0).any(axis=1)]
    if nonzero.size == 0:
        raise ValueError("code has no nonzero codewords")
    return int(nonzero.min())


def min_distance_bruteforce(code: EvalCode) -> int:
    """Exact minimum distance by span enumeration (guarded).  Reduces to a
    row basis first in case the generator is rank-deficient."""
    r, _ = _row_basis(code.field, code.gen)
    return _enumerate_codeword_weights(code.field, r)


def dual_min_distance_bruteforce(code: EvalCode) -> int:
    """Exact minimum distance of the dual code (guarded)."""
    kernel = right_kernel_basis(code.field, code.gen)
    return _enumerate_codeword_weights(code.field, kernel)


def _row_basis(field: GFField, mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    from hermipir.linalg import rref

    r, pivots = rref(field, mat)
    return r[: len(pivots)], pivots


def dimension_from_pole_degree(degG: int, genus: int) -> int:
    """Riemann-Roch dimension degG - genus + 1, valid for degG > 2*genus - 2."""
    if degG <= 2 * genus - 2:
        raise ValueError("dimension formula needs degG > 2*genus - 2")
    return degG - genus + 1
