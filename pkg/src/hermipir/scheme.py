"""The retrieval scheme: storage encoding, queries, answers, decoding.

A database of M files, each split into L fragments over F_{q^2}, is spread
across N servers so that any `x_sec` colluding servers learn nothing about
file contents and any `t_priv` colluding servers learn nothing about which
file is retrieved.  Everything is built from function spaces on the
Hermitian curve:

* each fragment slot l has a decoding function h_l (``info_basis``) whose
  evaluations at the server points form the decoding matrix,
* storage noise for slot l lives in h_l^(-1) times the one-point space with
  pole bound x_sec + 2g - 1 (dimension x_sec + g),
* query noise lives in the one-point space with pole bound t_priv + 2g - 1
  (dimension t_priv + g),
* every cross term that reaches an answer lies in the two-point space with
  pole bounds (x_sec + t_priv + 4g + q - 2) at infinity and q^2 - 1 at the
  origin, spanned by ``two_point_monomial_set``; a counting certificate
  shows that monomial set is a full basis, which is what makes decoding by
  prefix-solving exact.

Server points are chosen greedily from the pool of affine points outside
the data fibers (origin excluded) until the stacked decoding + noise
matrix reaches full column rank N - g, then padded to N points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from hermipir.codes import EvalCode, check_w_wise_independence, dual_distance_bound, from_matrix
from hermipir.curve import HermitianCurve, curve_for_q, info_basis, one_point_basis, two_point_monomial_set
from hermipir.fields import factor_prime_power, tower_for_prime_power
from hermipir.linalg import ColumnSpace, rank, select_full_rank_rows, solve_prefix


class InfeasibleParams(ValueError):
    """Raised when scheme parameters violate a named constraint."""

    def __init__(self, violated: str, detail: str):
        super().__init__(f"{violated}: {detail}")
        self.violated = violated


class DecodeError(ValueError):
    """Raised when answers are inconsistent with every valid transcript."""


@dataclass(frozen=True)
class SchemeParams:
    q: int
    x_sec: int
    t_priv: int
    fiber_count: int          # number of data x-values (m)
    num_files: int
    genus: int
    frag_count: int           # fragments per file (L)
    server_count: int         # N

    @property
    def rate(self) -> Fraction:
        return Fraction(self.frag_count, self.server_count)


def default_fiber_count(q: int, x_sec: int, t_priv: int) -> int:
    """The rate-maximizing number of data x-values."""
    return (q**3 - 3 * q**2 + q + 1 - (x_sec + t_priv)) // (2 * q)


def validate_params(
    q: int, x_sec: int, t_priv: int, fiber_count: int | None = None, num_files: int = 1
) -> SchemeParams:
    """Check feasibility and fill in derived sizes.

    Raises InfeasibleParams naming the violated constraint.
    """
    factor_prime_power(q)  # raises for non prime powers
    if x_sec < 1:
        raise InfeasibleParams("security-threshold", f"x_sec must be >= 1, got {x_sec}")
    if t_priv < 1:
        raise InfeasibleParams("privacy-threshold", f"t_priv must be >= 1, got {t_priv}")
    if num_files < 1:
        raise InfeasibleParams("file-count", f"num_files must be >= 1, got {num_files}")
    m = default_fiber_count(q, x_sec, t_priv) if fiber_count is None else fiber_count
    genus = q * (q - 1) // 2
    if not q - 1 <= m <= q**2 - 1:
        raise InfeasibleParams(
            "fiber-count-window", f"need q-1 <= m <= q^2-1, got m={m} for q={q}"
        )
    frag_count = m * q - genus
    if not genus <= frag_count <= q**3 - genus:
        raise InfeasibleParams(
            "fragment-count-window",
            f"need g <= L <= q^3 - g, got L={frag_count}",
        )
    if (frag_count + genus) % q != 0:
        raise InfeasibleParams(
            "fragment-count-residue", f"L + g = {frag_count + genus} not divisible by q={q}"
        )
    server_count = frag_count + x_sec + t_priv + 3 * q**2 - q - 2
    if q**3 + 1 < 2 * frag_count + x_sec + t_priv + 4 * q**2 - 2 * q:
        raise InfeasibleParams(
            "point-supply",
            f"curve has q^3+1 = {q**3 + 1} points but the layout needs "
            f"{2 * frag_count + x_sec + t_priv + 4 * q**2 - 2 * q}",
        )
    return SchemeParams(
        q=q,
        x_sec=x_sec,
        t_priv=t_priv,
        fiber_count=m,
        num_files=num_files,
        genus=genus,
        frag_count=frag_count,
        server_count=server_count,
    )


@dataclass(frozen=True)
class PointPlan:
    alphas: tuple[int, ...]
    data_points: tuple[tuple[tuple[int, int], ...], ...]  # per alpha, the fiber
    pool_points: tuple[tuple[int, int], ...]
    server_points: tuple[tuple[int, int], ...]
    selected_pool_indices: tuple[int, ...]


class SchemeInstance:
    """All deterministic state of one scheme instantiation."""

    def __init__(self, params: SchemeParams, check_seed: int = 0):
        self.params = params
        self.check_seed = check_seed
        self.tower = tower_for_prime_power(params.q)
        self.curve = curve_for_q(params.q)
        self.field = self.tower.field
        self._build()

    # -- construction ----------------------------------------------------------

    def _build(self) -> None:
        p = self.params
        curve, field = self.curve, self.field
        q, genus = p.q, p.genus
        alphas = tuple(range(1, p.fiber_count + 1))
        alpha_set = set(alphas)
        data = tuple(tuple((a, y) for y in curve.fiber_of_x(a)) for a in alphas)
        pool = tuple(
            pt for pt in curve.affine_points() if pt[0] not in alpha_set and pt != (0, 0)
        )

        self.info_fns = info_basis(curve, p.fiber_count, alphas)
        noise_fns, noise_complete = two_point_monomial_set(
            curve, p.x_sec + p.t_priv + 4 * genus + q - 2, q**2 - 1
        )
        self.noise_complete = noise_complete
        sec_fns = one_point_basis(curve, p.x_sec + 2 * genus - 1)
        priv_fns = one_point_basis(curve, p.t_priv + 2 * genus - 1)
        self.sec_dim = len(sec_fns)    # x_sec + g
        self.priv_dim = len(priv_fns)  # t_priv + g

        pool_info = np.stack([fn.evaluate_many(pool) for fn in self.info_fns], axis=1)
        pool_noise = np.stack([fn.evaluate_many(pool) for fn in noise_fns], axis=1)
        pool_priv = np.stack([fn.evaluate_many(pool) for fn in priv_fns], axis=1)
        pool_secbase = np.stack([fn.evaluate_many(pool) for fn in sec_fns], axis=1)

        self.fallback_used = False
        if not noise_complete:
            pool_noise = self._fallback_noise_columns(pool, pool_info, pool_secbase, pool_priv, pool_noise)
            self.fallback_used = True

        self._assemble(alphas, data, pool, pool_info, pool_noise, pool_priv, pool_secbase)

        if not self._noise_containment_ok(np.random.default_rng(self.check_seed), 30):
            # the counting certificate should make this unreachable; fall back
            # to the explicit spanning set and rebuild once
            pool_noise = self._fallback_noise_columns(pool, pool_info, pool_secbase, pool_priv, pool_noise)
            self.fallback_used = True
            self._assemble(alphas, data, pool, pool_info, pool_noise, pool_priv, pool_secbase)
            if not self._noise_containment_ok(np.random.default_rng(self.check_seed), 30):
                raise AssertionError("noise space fails containment even after fallback")

    def _assemble(self, alphas, data, pool, pool_info, pool_noise, pool_priv, pool_secbase) -> None:
        """Select server rows and slice all per-server matrices."""
        p, field = self.params, self.field
        combined = np.concatenate([pool_info, pool_noise], axis=1)
        pool_rank = rank(field, combined)
        target = min(pool_rank, p.server_count)
        selected = select_full_rank_rows(field, combined, target, p.server_count)
        self.plan = PointPlan(
            alphas=alphas,
            data_points=data,
            pool_points=pool,
            server_points=tuple(pool[i] for i in selected),
            selected_pool_indices=tuple(selected),
        )
        self.b_info = pool_info[selected]
        self.b_noise = pool_noise[selected]
        self.noise_count = self.b_noise.shape[1]
        # decoding functions never vanish off their data fibers, so the
        # per-slot storage spaces h_l^(-1) * (one-point space) evaluate via
        # an elementwise inverse of the decoding matrix
        inv_info = field.inv_arr(self.b_info)
        self.sec_eval = [
            field.mul_arr(inv_info[:, l : l + 1], pool_secbase[selected]) for l in range(p.frag_count)
        ]
        self.priv_eval = pool_priv[selected]

    def _fallback_noise_columns(self, pool, pool_info, pool_secbase, pool_priv, pool_noise) -> np.ndarray:
        """Explicit spanning set for every answer cross term: all elementwise
        products of a storage-noise column with a query-noise column, plus the
        one-point space with pole bound max(x_sec, t_priv) + 2g - 1."""
        field, p = self.field, self.params
        big = one_point_basis(self.curve, max(p.x_sec, p.t_priv) + 2 * p.genus - 1)
        cols = [pool_noise, np.stack([fn.evaluate_many(pool) for fn in big], axis=1)]
        inv_info = field.inv_arr(pool_info)
        for l in range(p.frag_count):
            sec_l = field.mul_arr(inv_info[:, l : l + 1], pool_secbase)
            for k in range(sec_l.shape[1]):
                cols.append(field.mul_arr(sec_l[:, k : k + 1], pool_priv))
        return np.concatenate(cols, axis=1)

    def _noise_containment_ok(self, rng: np.random.Generator, per_family: int) -> bool:
        """Sampled check that cross terms land in the noise column space."""
        field = self.field
        space = ColumnSpace(field, self.b_noise)
        n = self.b_info.shape[0]
        for _ in range(per_family):
            l = int(rng.integers(0, self.params.frag_count))
            # storage noise times decoding function
            z = field.matmul_arr(self.sec_eval[l], field.sample_arr(rng, (self.sec_dim, 1)))[:, 0]
            if not space.contains(field.mul_arr(z, self.b_info[:, l])):
                return False
            # query noise alone (reaches the answer scaled by file fragments)
            r = field.matmul_arr(self.priv_eval, field.sample_arr(rng, (self.priv_dim, 1)))[:, 0]
            if not space.contains(r):
                return False
            # storage noise times query noise
            if not space.contains(field.mul_arr(z, r)):
                return False
        return True

    # -- protocol --------------------------------------------------------------

    def encode_storage(self, files, rng: np.random.Generator, zero_noise: bool = False) -> np.ndarray:
        """Shares of shape (N, M, L): files[mu][l] masked per-slot by storage
        noise drawn in slot order l = 0..L-1."""
        p, field = self.params, self.field
        files = np.asarray(files, dtype=np.int64)
        if files.shape != (p.num_files, p.frag_count):
            raise ValueError(f"files must have shape {(p.num_files, p.frag_count)}")
        if files.size and (files.min() < 0 or files.max() >= field.order):
            raise ValueError("file fragments must be field element encodings")
        shares = np.zeros((p.server_count, p.num_files, p.frag_count), dtype=np.int64)
        for l in range(p.frag_count):
            if zero_noise:
                z = np.zeros((p.server_count, p.num_files), dtype=np.int64)
            else:
                coeffs = field.sample_arr(rng, (self.sec_dim, p.num_files))
                z = field.matmul_arr(self.sec_eval[l], coeffs)
            shares[:, :, l] = field.add_arr(files[None, :, l], z)
        return shares

    def make_queries(
        self, desired_index: int, rng: np.random.Generator, zero_noise: bool = False
    ) -> np.ndarray:
        """Queries of shape (N, M, L): fresh query noise for every (file,
        slot) pair, plus the decoding row on the desired file."""
        p, field = self.params, self.field
        if not 0 <= desired_index < p.num_files:
            raise ValueError("desired file index out of range")
        if zero_noise:
            r = np.zeros((p.server_count, p.num_files * p.frag_count), dtype=np.int64)
        else:
            coeffs = field.sample_arr(rng, (self.priv_dim, p.num_files * p.frag_count))
            r = field.matmul_arr(self.priv_eval, coeffs)
        queries = r.reshape(p.server_count, p.num_files, p.frag_count)
        queries[:, desired_index, :] = field.add_arr(queries[:, desired_index, :], self.b_info)
        return queries

    def server_answer(self, share_row, query_row) -> int:
        """One server's answer: the inner product of its share and query
        grids.  Stateless: a pure function of the two inputs."""
        prod = self.field.mul_arr(np.asarray(share_row), np.asarray(query_row))
        return int(self.field.sum_arr(prod))

    def all_answers(self, shares, queries) -> np.ndarray:
        prods = self.field.mul_arr(shares, queries)
        return self.field.sum_arr(prods.reshape(self.params.server_count, -1), axis=1)

    def reconstruct(self, answers) -> np.ndarray:
        """Recover the L fragments of the desired file from the N answers."""
        stacked = np.concatenate([self.b_info, self.b_noise], axis=1)
        try:
            return solve_prefix(self.field, stacked, answers, self.params.frag_count)
        except ValueError as exc:
            raise DecodeError(f"answers are inconsistent: {exc}") from exc

    def retrieve(self, files, desired_index: int, rng: np.random.Generator) -> np.ndarray:
        shares = self.encode_storage(files, rng)
        queries = self.make_queries(desired_index, rng)
        answers = self.all_answers(shares, queries)
        return self.reconstruct(answers)

    # -- marginals for statistical tests ----------------------------------------

    def query_marginal_samples(
        self, server: int, file_index: int, frag_index: int, desired_index: int, trials: int, seed: int
    ) -> np.ndarray:
        """`trials` independent draws of one query entry as seen by `server`."""
        field = self.field
        rng = np.random.default_rng(seed)
        coeffs = field.sample_arr(rng, (trials, self.priv_dim))
        vals = field.sum_arr(field.mul_arr(coeffs, self.priv_eval[server][None, :]), axis=1)
        if file_index == desired_index:
            vals = field.add_arr(vals, np.int64(self.b_info[server, frag_index]))
        return vals

    def share_marginal_samples(
        self, server: int, file_index: int, frag_index: int, fragment_value: int, trials: int, seed: int
    ) -> np.ndarray:
        """`trials` independent draws of one stored share entry at `server`."""
        field = self.field
        rng = np.random.default_rng(seed)
        coeffs = field.sample_arr(rng, (trials, self.sec_dim))
        vals = field.sum_arr(
            field.mul_arr(coeffs, self.sec_eval[frag_index][server][None, :]), axis=1
        )
        return field.add_arr(vals, np.int64(fragment_value))

    # -- certificates ------------------------------------------------------------

    def storage_code(self, frag_index: int) -> EvalCode:
        return from_matrix(
            self.field,
            self.sec_eval[frag_index].T,
            self.params.genus,
            self.params.x_sec + 2 * self.params.genus - 1,
        )

    def query_code(self) -> EvalCode:
        return from_matrix(
            self.field,
            self.priv_eval.T,
            self.params.genus,
            self.params.t_priv + 2 * self.params.genus - 1,
        )

    def manifest(self) -> dict:
        p = self.params
        return {
            "params": {
                "q": p.q,
                "x_sec": p.x_sec,
                "t_priv": p.t_priv,
                "fiber_count": p.fiber_count,
                "num_files": p.num_files,
                "genus": p.genus,
                "frag_count": p.frag_count,
                "server_count": p.server_count,
            },
            "rate": {"fraction": f"{p.frag_count}/{p.server_count}", "value": float(p.rate)},
            "alphas": list(self.plan.alphas),
            "data_points": [[list(pt) for pt in fiber] for fiber in self.plan.data_points],
            "server_points": [list(pt) for pt in self.plan.server_points],
            "pool_size": len(self.plan.pool_points),
            "noise": {
                "count": int(self.noise_count),
                "complete": bool(self.noise_complete),
                "fallback_used": bool(self.fallback_used),
            },
            "seeds": {"check_seed": self.check_seed},
        }


def build_instance(params: SchemeParams, check_seed: int = 0) -> SchemeInstance:
    return SchemeInstance(params, check_seed=check_seed)


@dataclass
class CertificationReport:
    params: SchemeParams
    rate: Fraction
    storage_dual_bounds: list[int]
    query_dual_bound: int
    storage_independence: list[tuple[int, bool]]
    query_independence: list[tuple[int, bool]]
    noise_containment: bool
    noise_rank: int
    total_rank: int
    rank_certificate: int
    prefix_unique: bool
    fallback_used: bool

    @property
    def all_ok(self) -> bool:
        return (
            all(b >= self.params.x_sec + 1 for b in self.storage_dual_bounds)
            and self.query_dual_bound >= self.params.t_priv + 1
            and all(ok for _, ok in self.storage_independence)
            and all(ok for _, ok in self.query_independence)
            and self.noise_containment
            and self.prefix_unique
            and self.total_rank == self.rank_certificate
        )

    def to_dict(self) -> dict:
        return {
            "params": {
                "q": self.params.q,
                "x_sec": self.params.x_sec,
                "t_priv": self.params.t_priv,
                "fiber_count": self.params.fiber_count,
                "frag_count": self.params.frag_count,
                "server_count": self.params.server_count,
            },
            "rate": {"fraction": f"{self.rate.numerator}/{self.rate.denominator}", "value": float(self.rate)},
            "storage_dual_bounds": self.storage_dual_bounds,
            "query_dual_bound": self.query_dual_bound,
            "storage_independence": [[w, bool(ok)] for w, ok in self.storage_independence],
            "query_independence": [[w, bool(ok)] for w, ok in self.query_independence],
            "noise_containment": bool(self.noise_containment),
            "noise_rank": int(self.noise_rank),
            "total_rank": int(self.total_rank),
            "rank_certificate": int(self.rank_certificate),
            "prefix_unique": bool(self.prefix_unique),
            "fallback_used": bool(self.fallback_used),
            "all_ok": bool(self.all_ok),
        }


def certify_instance(
    instance: SchemeInstance, seed: int = 0, products_per_family: int = 100
) -> CertificationReport:
    """Re-derive the instance's correctness, security and privacy evidence."""
    p = instance.params
    field = instance.field

    storage_bounds = [dual_distance_bound(instance.storage_code(l)) for l in range(p.frag_count)]
    query_bound = dual_distance_bound(instance.query_code())

    def independence(code: EvalCode, w_max: int) -> list[tuple[int, bool]]:
        out = []
        for w in range(1, w_max + 1):
            if w <= 2:
                ok, _ = check_w_wise_independence(code, w, mode="exhaustive")
            else:
                ok, _ = check_w_wise_independence(code, w, mode="sampled", count=200, seed=seed + w)
            out.append((w, ok))
        return out

    storage_ind = []
    for l in range(p.frag_count):
        for w, ok in independence(instance.storage_code(l), min(p.x_sec, 2)):
            storage_ind.append((w, ok))
    query_ind = independence(instance.query_code(), min(p.t_priv, 2))

    rng = np.random.default_rng(seed)
    containment = instance._noise_containment_ok(rng, products_per_family)

    noise_rank = rank(field, instance.b_noise)
    stacked = np.concatenate([instance.b_info, instance.b_noise], axis=1)
    total = rank(field, stacked)
    certificate = p.server_count - p.genus
    prefix_unique = total == p.frag_count + noise_rank

    return CertificationReport(
        params=p,
        rate=p.rate,
        storage_dual_bounds=storage_bounds,
        query_dual_bound=query_bound,
        storage_independence=storage_ind,
        query_independence=query_ind,
        noise_containment=containment,
        noise_rank=noise_rank,
        total_rank=total,
        rank_certificate=certificate,
        prefix_unique=prefix_unique,
        fallback_used=instance.fallback_used,
    )


def run_pir_demo(
    q: int,
    x_sec: int,
    t_priv: int,
    num_files: int,
    seed: int,
    trials: int = 100,
    fiber_count: int | None = None,
) -> dict:
    """End-to-end seeded retrieval trials; returns a JSON-compatible transcript."""
    params = validate_params(q, x_sec, t_priv, fiber_count=fiber_count, num_files=num_files)
    instance = build_instance(params)
    field = instance.field
    rng = np.random.default_rng(seed)
    results = []
    successes = 0
    for t in range(trials):
        files = field.sample_arr(rng, (params.num_files, params.frag_count))
        desired = int(rng.integers(0, params.num_files))
        got = instance.retrieve(files, desired, rng)
        ok = bool((got == files[desired]).all())
        successes += ok
        results.append(
            {
                "trial": t,
                "desired": desired,
                "ok": ok,
                "fragment_checksum": int(field.sum_arr(got)),
            }
        )
    return {
        "config": {
            "q": q,
            "x_sec": x_sec,
            "t_priv": t_priv,
            "num_files": num_files,
            "seed": seed,
            "trials": trials,
            "fiber_count": params.fiber_count,
        },
        "params": instance.manifest()["params"],
        "rate": instance.manifest()["rate"],
        "successes": successes,
        "trials": trials,
        "results": results,
    }


def chi_square_uniform_stat(values, order: int) -> float:
    """Pearson statistic of observed encodings against the uniform law."""
    values = np.asarray(values)
    counts = np.bincount(values, minlength=order)
    expected = values.size / order
    return float(((counts - expected) ** 2 / expected).sum())
