"""Scheme construction, protocol round trips, marginal statistics."""

from __future__ import annotations

import json

import numpy as np
import pytest
import scipy.stats

import hermipir.scheme as scheme_mod
from hermipir.scheme import (
    DecodeError,
    InfeasibleParams,
    SchemeParams,
    build_instance,
    certify_instance,
    chi_square_uniform_stat,
    default_fiber_count,
    run_pir_demo,
    validate_params,
)


@pytest.fixture(scope="module")
def inst_11():
    return build_instance(validate_params(5, 1, 1, num_files=3))


@pytest.fixture(scope="module")
def inst_22():
    return build_instance(validate_params(5, 2, 2, num_files=2))


def test_validate_params_anchor_values():
    p = validate_params(5, 1, 1, num_files=3)
    assert (p.fiber_count, p.frag_count, p.server_count) == (5, 15, 85)
    assert p.genus == 10
    p2 = validate_params(5, 2, 2)
    assert (p2.fiber_count, p2.frag_count, p2.server_count) == (5, 15, 87)
    p3 = validate_params(11, 5, 5)
    assert (p3.fiber_count, p3.frag_count, p3.server_count) == (44, 429, 789)
    assert default_fiber_count(11, 5, 5) == 44


def test_validate_params_infeasible_cases():
    with pytest.raises(InfeasibleParams) as e:
        validate_params(3, 1, 1)
    assert e.value.violated == "fiber-count-window"
    with pytest.raises(InfeasibleParams):
        validate_params(4, 1, 1)
    with pytest.raises(InfeasibleParams, match="x_sec"):
        validate_params(5, 0, 1)
    with pytest.raises(InfeasibleParams, match="t_priv"):
        validate_params(5, 1, -2)
    with pytest.raises(InfeasibleParams, match="num_files"):
        validate_params(5, 1, 1, num_files=0)
    with pytest.raises(ValueError, match="prime power"):
        validate_params(6, 1, 1)
    # an explicit fiber count outside the window
    with pytest.raises(InfeasibleParams):
        validate_params(5, 1, 1, fiber_count=25)
    # too much collusion for the curve's point supply
    with pytest.raises(InfeasibleParams, match="point-supply|fiber-count"):
        validate_params(5, 20, 20)


def test_point_allocation_disjoint_and_sized(inst_11, inst_22):
    for inst, total in [(inst_11, 110), (inst_22, 112)]:
        data = {pt for fiber in inst.plan.data_points for pt in fiber}
        servers = set(inst.plan.server_points)
        assert len(data) == 25
        assert len(servers) == inst.params.server_count
        assert not data & servers
        assert (0, 0) not in servers
        assert (0, 0) not in data
        assert len(data | servers) == total
        assert len(inst.plan.pool_points) == 99
        # servers drawn from the pool, in pool order
        idx = inst.plan.selected_pool_indices
        assert list(idx) == sorted(idx)
        assert all(inst.plan.pool_points[i] == s for i, s in zip(idx, inst.plan.server_points))


def test_noise_space_counts(inst_11, inst_22):
    assert inst_11.noise_count == 60 and inst_11.noise_complete
    assert inst_22.noise_count == 62 and inst_22.noise_complete
    assert not inst_11.fallback_used and not inst_22.fallback_used


def test_noise_dimension_dims(inst_11, inst_22):
    assert inst_11.sec_dim == 11 and inst_11.priv_dim == 11
    assert inst_22.sec_dim == 12 and inst_22.priv_dim == 12
    assert all(m.shape == (85, 11) for m in inst_11.sec_eval)
    assert inst_11.priv_eval.shape == (85, 11)


def test_zero_noise_hooks(inst_11):
    p = inst_11.params
    rng = np.random.default_rng(1)
    files = inst_11.field.sample_arr(rng, (p.num_files, p.frag_count))
    shares = inst_11.encode_storage(files, rng, zero_noise=True)
    assert (shares == np.broadcast_to(files, shares.shape)).all()
    queries = inst_11.make_queries(1, rng, zero_noise=True)
    assert (queries[:, 0, :] == 0).all() and (queries[:, 2, :] == 0).all()
    assert (queries[:, 1, :] == inst_11.b_info).all()


def test_server_answer_bilinear(inst_11):
    f = inst_11.field
    rng = np.random.default_rng(2)
    p = inst_11.params
    a = f.sample_arr(rng, (p.num_files, p.frag_count))
    b = f.sample_arr(rng, (p.num_files, p.frag_count))
    g = f.sample_arr(rng, (p.num_files, p.frag_count))
    lhs = inst_11.server_answer(f.add_arr(a, b), g)
    rhs = f.add(inst_11.server_answer(a, g), inst_11.server_answer(b, g))
    assert lhs == rhs
    c = int(rng.integers(1, f.order))
    assert inst_11.server_answer(f.mul_arr(np.int64(c), a), g) == f.mul(c, inst_11.server_answer(a, g))


def test_round_trip_many_seeds(inst_11):
    p = inst_11.params
    f = inst_11.field
    for seed in range(12):
        rng = np.random.default_rng(seed)
        files = f.sample_arr(rng, (p.num_files, p.frag_count))
        desired = int(rng.integers(0, p.num_files))
        got = inst_11.retrieve(files, desired, rng)
        assert (got == files[desired]).all()


def test_round_trip_second_config(inst_22):
    p = inst_22.params
    f = inst_22.field
    for seed in range(6):
        rng = np.random.default_rng(seed + 100)
        files = f.sample_arr(rng, (p.num_files, p.frag_count))
        desired = int(rng.integers(0, p.num_files))
        got = inst_22.retrieve(files, desired, rng)
        assert (got == files[desired]).all()


def test_tampered_answers_differ_or_error(inst_11):
    p = inst_11.params
    f = inst_11.field
    outcomes = {"diff": 0, "error": 0, "silent": 0}
    for seed in range(25):
        rng = np.random.default_rng(seed)
        files = f.sample_arr(rng, (p.num_files, p.frag_count))
        desired = int(rng.integers(0, p.num_files))
        shares = inst_11.encode_storage(files, rng)
        queries = inst_11.make_queries(desired, rng)
        answers = inst_11.all_answers(shares, queries)
        k = int(rng.integers(0, p.server_count))
        delta = int(rng.integers(1, f.order))
        answers[k] = f.add(int(answers[k]), delta)
        try:
            got = inst_11.reconstruct(answers)
            if (got == files[desired]).all():
                outcomes["silent"] += 1
            else:
                outcomes["diff"] += 1
        except DecodeError:
            outcomes["error"] += 1
    assert outcomes["silent"] == 0
    assert outcomes["diff"] + outcomes["error"] == 25


def test_file_shape_validation(inst_11):
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError, match="shape"):
        inst_11.encode_storage(np.zeros((2, 15), dtype=np.int64), rng)
    with pytest.raises(ValueError, match="encodings"):
        inst_11.encode_storage(np.full((3, 15), 99, dtype=np.int64), rng)
    with pytest.raises(ValueError, match="out of range"):
        inst_11.make_queries(3, rng)


def test_certify_instance_bounds_and_ranks(inst_11, inst_22):
    rep = certify_instance(inst_11, seed=0, products_per_family=30)
    assert rep.all_ok
    assert set(rep.storage_dual_bounds) == {2}
    assert rep.query_dual_bound == 2
    assert rep.noise_rank == 60
    assert rep.total_rank == 75 == rep.rank_certificate
    assert rep.prefix_unique and not rep.fallback_used
    assert float(rep.rate) == pytest.approx(15 / 85)
    rep2 = certify_instance(inst_22, seed=0, products_per_family=30)
    assert rep2.all_ok
    assert set(rep2.storage_dual_bounds) == {3}
    assert rep2.query_dual_bound == 3
    assert rep2.total_rank == 77 == rep2.rank_certificate
    d = rep2.to_dict()
    json.dumps(d)
    assert d["all_ok"] is True


def test_query_marginal_uniform_chi_square(inst_11):
    # one query entry, viewed by a single server, over fresh randomness:
    # indistinguishable from uniform whatever the desired index
    stats = []
    for desired in (0, 1):
        vals = inst_11.query_marginal_samples(
            server=7, file_index=1, frag_index=3, desired_index=desired, trials=10_000, seed=5
        )
        stats.append(chi_square_uniform_stat(vals, 25))
    threshold = scipy.stats.chi2.ppf(0.999, df=24)
    assert all(s < threshold for s in stats), stats
    # support is the full field
    assert set(int(v) for v in vals) == set(range(25))


def test_share_marginal_uniform_chi_square(inst_11):
    vals = inst_11.share_marginal_samples(
        server=3, file_index=0, frag_index=2, fragment_value=17, trials=10_000, seed=6
    )
    stat = chi_square_uniform_stat(vals, 25)
    assert stat < scipy.stats.chi2.ppf(0.999, df=24)


def test_manifest_json_round_trip(inst_11):
    m = inst_11.manifest()
    text = json.dumps(m, sort_keys=True)
    back = json.loads(text)
    assert back == json.loads(json.dumps(m, sort_keys=True))
    assert back["params"]["server_count"] == 85
    assert back["noise"] == {"count": 60, "complete": True, "fallback_used": False}
    assert len(back["server_points"]) == 85
    assert back["pool_size"] == 99


def test_demo_transcript_deterministic():
    a = run_pir_demo(5, 1, 1, 3, seed=7, trials=5)
    b = run_pir_demo(5, 1, 1, 3, seed=7, trials=5)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    c = run_pir_demo(5, 1, 1, 3, seed=8, trials=5)
    assert json.dumps(a, sort_keys=True) != json.dumps(c, sort_keys=True)
    assert a["successes"] == 5


def test_fallback_noise_path(monkeypatch):
    # force an incomplete monomial set: the explicit product spanning set
    # must kick in and keep retrieval exact
    real = scheme_mod.two_point_monomial_set

    def truncated(curve, infty_bound, origin_bound):
        fns, _ = real(curve, infty_bound, origin_bound)
        return fns[:-4], False

    monkeypatch.setattr(scheme_mod, "two_point_monomial_set", truncated)
    inst = build_instance(validate_params(5, 1, 1, num_files=2))
    assert inst.fallback_used and not inst.noise_complete
    assert inst.noise_count > 60
    f = inst.field
    rng = np.random.default_rng(3)
    files = f.sample_arr(rng, (2, 15))
    got = inst.retrieve(files, 1, rng)
    assert (got == files[1]).all()
    rep = certify_instance(inst, seed=1, products_per_family=20)
    assert rep.noise_containment and rep.prefix_unique


def test_build_deterministic(inst_11):
    inst_b = build_instance(validate_params(5, 1, 1, num_files=3))
    assert inst_b.plan.server_points == inst_11.plan.server_points
    assert (inst_b.b_info == inst_11.b_info).all()
    assert (inst_b.b_noise == inst_11.b_noise).all()


def test_rate_property():
    p = validate_params(5, 1, 1)
    assert p.rate.numerator == 3 and p.rate.denominator == 17  # 15/85 reduced
    assert SchemeParams(5, 1, 1, 5, 1, 10, 15, 85).rate == p.rate
