import numpy as np
import pytest

from aybe.bspec import BSpec
from aybe.builder import r_diagonal, r_general, r_jordan
from aybe.kronecker import Elliptic, SingularInput, fay_residual, sigma
from aybe.tensors import MatTensor
from aybe.verifier import (
    Config,
    SamplePlan,
    aybe4_residual,
    aybe_residual,
    default_configs,
    draw_samples,
    dual_residual,
    gauge_residual,
    run_suite,
    tolerance_for,
    unitarity_residual,
)

from conftest import point_in_domain


def jordan_fun(n, tp):
    return lambda v, y: r_jordan(n, v, y, tp)


def diag_fun(lams, tp):
    return lambda v, y: r_diagonal(lams, v, y, tp)


def perturbed(rfun, n, delta=1e-3):
    bump = MatTensor.unit(n, 0, 1, 0, 1, delta)
    return lambda v, y: rfun(v, y) + bump


def four_points(rng, tp):
    return [point_in_domain(rng, tp.tau) for _ in range(4)]


def test_diagonal_and_jordan_satisfy_identities(tp, rng):
    for rfun in (diag_fun([0, 0.3], tp), jordan_fun(2, tp), diag_fun([0, 0.3, 0.1 + 0.2j], tp), jordan_fun(3, tp)):
        u, v, x, y = four_points(rng, tp)
        assert aybe_residual(rfun, u, v, x, y) < 1e-9
        assert dual_residual(rfun, u, v, x, y) < 1e-9
        assert unitarity_residual(rfun, u, x) < 1e-9


def test_scalar_reduces_to_fay(tp, rng):
    u, v, x, y = four_points(rng, tp)
    got = aybe_residual(jordan_fun(1, tp), u, v, x, y, relative=False)
    ref = abs(fay_residual(Elliptic(tp), u, v, x, y))
    assert abs(got - ref) < 1e-12 * max(1, abs(sigma(Elliptic(tp), u, x) * sigma(Elliptic(tp), u + v, y)))


def test_scalar_dual_direct(tp, rng):
    u, v, x, y = four_points(rng, tp)
    s = lambda a, b: sigma(Elliptic(tp), a, b)  # noqa: E731
    direct = s(v, y) * s(u + v, x) - s(u, x) * s(v, x + y) - s(u + v, x + y) * s(-u, y)
    got = dual_residual(jordan_fun(1, tp), u, v, x, y, relative=False)
    assert abs(got - abs(direct)) < 1e-12 * max(1, abs(s(v, y) * s(u + v, x)))
    assert dual_residual(jordan_fun(1, tp), u, v, x, y) < 1e-12


def test_scalar_unitarity(tp):
    assert unitarity_residual(jordan_fun(1, tp), 0.3 + 0.2j, 0.1 + 0.6j) < 1e-15


def test_residual_scales_quadratically(tp, rng):
    u, v, x, y = four_points(rng, tp)
    bad = perturbed(jordan_fun(2, tp), 2)
    base = aybe_residual(bad, u, v, x, y, relative=False)
    scaled = aybe_residual(lambda a, b: bad(a, b) * 3, u, v, x, y, relative=False)
    assert scaled == pytest.approx(9 * base, rel=1e-9)
    assert aybe_residual(lambda a, b: r_jordan(2, a, b, tp) * 3, u, v, x, y) < 1e-9


def test_perturbation_detected(tp, rng):
    u, v, x, y = four_points(rng, tp)
    assert aybe_residual(perturbed(jordan_fun(2, tp), 2), u, v, x, y) > 1e-6


def test_aybe4_matches_two_point_form(tp, rng):
    bad = perturbed(jordan_fun(2, tp), 2)
    v1, v2, v3, y1, y2, y3 = (point_in_domain(rng, tp.tau) for _ in range(6))
    a = aybe4_residual(bad, v1, v2, v3, y1, y2, y3)
    b = aybe_residual(bad, v1 - v2, v2 - v3, y2 - y1, y3 - y2)
    assert a == pytest.approx(b, rel=1e-8)
    assert aybe4_residual(jordan_fun(2, tp), v1, v2, v3, y1, y2, y3) < 1e-9
    with pytest.raises(SingularInput):
        aybe4_residual(jordan_fun(2, tp), v1, v2, v3, y1, y1, y3)


def test_gauge_identity_is_exact(tp):
    spec = BSpec.diagonal([0.2, 0.5])
    assert gauge_residual(spec, np.eye(2), 0.31 + 0.2j, 0.2 + 0.4j, tp) == 0


@pytest.mark.parametrize("n", [2, 3])
def test_gauge_random(n, tp, rng):
    spec = BSpec.diagonal([0.2, 0.5, 0.7 + 0.1j][:n])
    done = 0
    while done < 3:
        S = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        if np.linalg.cond(S) > 100:
            continue
        done += 1
        assert gauge_residual(spec, S, 0.31 + 0.2j, 0.2 + 0.4j, tp) < 1e-8


def test_gauge_permutation_relabels(tp):
    lams = [0.2, 0.5, 0.7]
    P = np.eye(3)[[2, 0, 1]]
    v, y = 0.31 + 0.2j, 0.2 + 0.4j
    moved = r_diagonal(lams, v, y, tp).gauge(P).coeff
    # P^T diag(mu) P = diag(mu[perm]) with perm read off the columns of P
    perm = [int(np.argmax(P[:, j])) for j in range(3)]
    direct = r_diagonal([lams[i] for i in perm], v, y, tp).coeff
    assert np.max(np.abs(moved - direct)) < 1e-10 * np.max(np.abs(direct))
    spec = BSpec.diagonal(lams)
    assert np.max(np.abs(r_general(spec.with_conjugator(P), v, y, tp).coeff - direct)) < 1e-10 * np.max(np.abs(direct))


def test_sampler_deterministic_and_admissible(tp):
    spec = BSpec.diagonal([0, 0.3])
    plan = SamplePlan(30, seed=4)
    a = draw_samples(plan, "aybe", spec.singular_set(tp), tp.tau)
    b = draw_samples(plan, "aybe", spec.singular_set(tp), tp.tau)
    assert a.points == b.points and len(a.points) == 30
    sig = spec.singular_set(tp)
    for u, v, x, y in a.points:
        assert min(sig.distance(s) for s in (u, v, u + v)) >= 1e-2


def test_sampler_reports_rejections(tp):
    spec = BSpec.jordan(2)
    plan = SamplePlan(5, seed=0, exclusion_radius=1e-6, box=((-0.002, 0.002), (-0.002, 0.002)), max_attempts=20)
    s = draw_samples(plan, "unitarity", spec.singular_set(tp), tp.tau)
    assert s.rejected > 0
    report = run_suite(plan, [Config("j2", "jordan", n=2, identities=("unitarity",))])
    summary = report.summaries[0]
    assert summary["rejected"] > 0
    assert report.to_json() == run_suite(plan, [Config("j2", "jordan", n=2, identities=("unitarity",))]).to_json()


def test_plan_validation():
    with pytest.raises(ValueError):
        SamplePlan(exclusion_radius=0)
    assert SamplePlan(exclusion_radius=1e-6).effective_radius == 1e-3


def test_tolerance_ladder():
    assert tolerance_for(1) == 1e-10
    assert tolerance_for(2) == tolerance_for(3) == 1e-9
    assert tolerance_for(4) == 1e-8
    assert tolerance_for(2, "gauge") == 1e-8


def test_default_suite_passes_and_is_deterministic():
    plan = SamplePlan(8, seed=1)
    a = run_suite(plan, default_configs())
    assert a.passed, a.to_text()
    assert a.to_json() == run_suite(plan, default_configs()).to_json()
    assert a.to_csv().splitlines()[0] == "identity,config,sample,inputs,residual,status"


def test_corrupted_config_fails():
    cfg = Config("bad", "jordan", n=2, perturb={"a": 1, "b": 2, "c": 1, "d": 2, "delta": 1e-3})
    report = run_suite(SamplePlan(5, seed=2), [cfg])
    assert not report.passed
    assert {s["identity"] for s in report.failures()} >= {"aybe", "dual"}


def test_mixed_spec_and_nondegeneracy():
    spec = BSpec(3, ((0.2, 2), (0.5, 1)))
    cfg = Config("mixed", "general", spec=spec, identities=("aybe", "unitarity", "nondegeneracy"))
    report = run_suite(SamplePlan(5, seed=3), [cfg])
    assert report.passed, report.to_text()


def test_config_json():
    cfg = Config.from_json({"family": "diagonal", "lambdas": [{"re": 0}, {"re": 0.3}], "tau": {"re": 0, "im": 2}})
    assert cfg.n == 2 and cfg.tau == 2j and cfg.name == "diagonal-2"
    with pytest.raises(ValueError):
        Config.from_json({"family": "jordan", "n": 2, "bogus": 1})
    with pytest.raises(ValueError):
        Config("x", "jordan", n=2, identities=("yang-baxter",))
