import json
import math

import numpy as np
import pytest

from bowenlyap import EmptyBowenSample, Point
from bowenlyap.pointwise import (POINT_CSV_HEADER, SeparationProfile, bowen_filter, candidate_pool, distortion,
                                 exponent_sequence, lipschitz_bound_check, mirrored_duality_check,
                                 point_exponents)
from bowenlyap.space import sample_near

from .conftest import LAM_S, LAM_U, LOG_LU

CAT = np.array([[2, 3], [3, 5]], dtype=object)


def lam_u_power(n):
    # trace(A^n) = lam_u^n + lam_s^n is an integer; exact integer matrix power
    tr = int(np.trace(np.linalg.matrix_power(CAT, n)))
    return tr - LAM_S ** n


def test_lam_u_power_oracle():
    assert lam_u_power(5) == pytest.approx(15126.99993, abs=1e-5)
    assert lam_u_power(1) == pytest.approx(LAM_U, rel=1e-15)


def test_filter_rotation(rotation):
    x = Point.circle(2.0)
    cands = sample_near(rotation, x, 0.01, 40, seed=1)
    for n in (-7, 0, 3, 25):
        assert bowen_filter(rotation, x, 0.01, n, cands) == cands


def test_filter_toral_unstable_probes(toral_eigen):
    x = Point.torus(0.37, 0.11)
    delta = 1e-3
    radii = [delta * LAM_U ** -k * f for k in range(0, 7) for f in (0.5, 0.999, 1.001)]
    cands = [toral_eigen.probe(x, r, 0) for r in radii]
    for n in range(0, 6):
        kept = bowen_filter(toral_eigen, x, delta, n, cands)
        want = [c for c, r in zip(cands, radii) if r * lam_u_power(n) <= delta]
        assert kept == want


def test_filter_n_zero(toral):
    x = Point.torus(0.5, 0.5)
    cands = sample_near(toral, x, 0.02, 100, seed=2)
    kept = bowen_filter(toral, x, 0.01, 0, cands)
    assert kept == [c for c in cands if toral.distance(x, c) <= 0.01]
    assert 0 < len(kept) < len(cands)


def test_distortion_rotation(rotation):
    x = Point.circle(0.5)
    est = distortion(rotation, x, 0.05, 9, sample_near(rotation, x, 0.05, 30, seed=0))
    assert est.A_hat == est.a_hat == 1.0


def test_distortion_toral_probe_exact(toral_eigen):
    x = Point.torus(0.2, 0.3)
    delta = 1e-3
    r = delta * LAM_U ** -5 * (1 - 1e-12)
    cands = [toral_eigen.probe(x, r, 0), toral_eigen.probe(x, r, 2)]
    est = distortion(toral_eigen, x, delta, 5, cands)
    assert est.A_hat == pytest.approx(lam_u_power(5), rel=1e-12)
    assert est.a_hat == pytest.approx(1 / lam_u_power(5), rel=1e-12)
    assert est.in_ball_count == 2
    assert est.witness_max is cands[0]


def test_distortion_hair_at_q(hair):
    cands = sample_near(hair, hair.q, 0.1, 400, seed=4)
    est = distortion(hair, hair.q, 0.1, 5, cands)
    assert est.A_hat == pytest.approx(LAM_S ** 5, rel=1e-2)
    assert est.A_hat == pytest.approx(6.61e-5, rel=1e-2)
    assert 0 < est.a_hat <= est.A_hat


def test_distortion_errors(toral):
    x = Point.torus(0.1, 0.1)
    far = [Point.torus(0.6, 0.6)]
    with pytest.raises(EmptyBowenSample) as info:
        distortion(toral, x, 1e-3, 4, far)
    assert info.value.n == 4 and info.value.delta == 1e-3
    with pytest.raises(ValueError):
        distortion(toral, x, 1e-3, 0, far)


def test_exponent_sequence_examples(rotation, toral_eigen, hair):
    seq = exponent_sequence(rotation, Point.circle(3.0), 0.01, [1, 2, 3, 4], count=64)
    assert all(a == 0.0 and b == 0.0 for _, a, b in seq)
    seq = exponent_sequence(toral_eigen, Point.torus(0.4, 0.9), 1e-3, range(1, 9), count=128)
    for n, la, sa in seq:
        assert la == pytest.approx(LOG_LU, abs=1e-12)
        assert sa == pytest.approx(-LOG_LU, abs=1e-12)
    seq = exponent_sequence(hair, hair.q, 0.01, range(1, 11), count=256)
    assert seq[-1][1] == pytest.approx(math.log(LAM_S), abs=0.02)
    back = exponent_sequence(toral_eigen, Point.torus(0.4, 0.9), 1e-3, [-1, -2, -3], count=64)
    assert [n for n, _, _ in back] == [-1, -2, -3]
    for bad in ([], [0, 1], [2, 1], [-1, 2]):
        with pytest.raises(ValueError):
            exponent_sequence(rotation, Point.circle(0.0), 0.01, bad, count=8)


def test_exponent_sequence_reports_dying_n(toral_eigen):
    x = Point.torus(0.4, 0.9)
    cands = [toral_eigen.probe(x, 1e-4, 0)]
    with pytest.raises(EmptyBowenSample) as info:
        exponent_sequence(toral_eigen, x, 1e-3, [1, 2, 3], candidates=cands)
    assert info.value.n == 2


@pytest.fixture(scope="module")
def toral_report(toral_eigen):
    return point_exponents(toral_eigen, Point.torus(0.3, 0.7), n_max=10, count=256)


@pytest.fixture(scope="module")
def hair_report(hair):
    return point_exponents(hair, hair.q, n_max=10, count=256)


def test_point_exponents_toral(toral_report):
    r = toral_report
    assert r.Lambda_plus == pytest.approx(LOG_LU, abs=1e-9)
    assert r.lambda_plus == pytest.approx(-LOG_LU, abs=1e-9)
    assert r.Lambda_minus == pytest.approx(LOG_LU, abs=1e-9)
    assert r.lambda_minus == pytest.approx(-LOG_LU, abs=1e-9)
    assert r.converged and r.delta_used == 1e-3
    assert r.Lambda_plus >= math.log(LAM_U) - 0.02


def test_point_exponents_hair_q(hair_report):
    r = hair_report
    assert r.Lambda_plus < 0
    assert r.Lambda_plus == pytest.approx(math.log(LAM_S), abs=0.02)
    assert r.lambda_plus == pytest.approx(math.log(LAM_S), abs=0.02)


def test_point_exponents_rotation(rotation):
    r = point_exponents(rotation, Point.circle(1.0), n_max=6, count=64)
    assert (r.Lambda_plus, r.lambda_plus, r.Lambda_minus, r.lambda_minus) == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("which", ["toral_report", "hair_report"])
def test_duality_at_small_delta(which, request):
    run = next(r for r in request.getfixturevalue(which).runs if r.delta == 1e-3)
    assert run.duality_residuals[0] <= 0.05 and run.duality_residuals[1] <= 0.05


def test_report_orderings(toral_report, hair_report):
    for rep in (toral_report, hair_report):
        by_key = {}
        for run in rep.runs:
            assert run.Lambda_plus >= run.lambda_plus
            for row in run.rows:
                assert 0 < row.a_hat <= row.A_hat
                by_key.setdefault(row.n, []).append((run.delta, row.A_hat, row.a_hat))
        for n, vals in by_key.items():
            vals.sort()
            # larger delta: sup can only grow, inf only shrink
            assert all(b[1] >= a[1] and b[2] <= a[2] for a, b in zip(vals, vals[1:]))


def test_linear_oracle_ratio_bounds(toral_eigen):
    x = Point.torus(0.61, 0.05)
    cands = candidate_pool(toral_eigen, x, [1e-1, 1e-2, 1e-3], 8, 128, 5)
    prof = SeparationProfile(toral_eigen, x, cands, -8, 8)
    for n in list(range(1, 9)) + list(range(-8, 0)):
        m = prof.mask(1e-2, n)
        r = prof.ratios(n)[m]
        assert m.any()
        assert np.all(r <= LAM_U ** abs(n) + 1e-9) and np.all(r >= LAM_U ** -abs(n) - 1e-9)


def test_report_serialization(toral_report):
    text = toral_report.csv_text()
    assert text.splitlines()[0] == "system,point,delta,n,A_hat,a_hat,logA_over_n,loga_over_n"
    assert ",".join(POINT_CSV_HEADER) == text.splitlines()[0]
    assert len(text.splitlines()) == 1 + 3 * 20
    blob = json.dumps(toral_report.to_json(), sort_keys=True)
    assert json.loads(blob)["Lambda_plus"] == toral_report.Lambda_plus


def test_bad_parameters(rotation):
    with pytest.raises(ValueError):
        point_exponents(rotation, Point.circle(0.0), [1e-2, 1e-1], n_max=5, count=8)
    with pytest.raises(ValueError):
        point_exponents(rotation, Point.circle(0.0), [1e-2], n_max=3, count=8)


def test_thread_count_does_not_change_results(hair, monkeypatch):
    out = []
    for threads in ("1", "4"):
        monkeypatch.setenv("LYAP_THREADS", threads)
        rep = point_exponents(hair, Point.hair(0.05), [1e-2, 1e-3], n_max=5, count=64)
        out.append(json.dumps(rep.to_json(), sort_keys=True))
    assert out[0] == out[1]


def test_mirrored_duality(rotation, toral_eigen, toral, hair):
    x = Point.circle(0.2)
    assert mirrored_duality_check(rotation, x, 0.01, 5, sample_near(rotation, x, 0.01, 20, seed=0)) == 0.0
    for s in (toral_eigen, toral):
        x = Point.torus(0.7, 0.2)
        cands = candidate_pool(s, x, [1e-2], 3, 200, 1)
        assert mirrored_duality_check(s, x, 1e-2, 3, cands) <= 1e-9
    cands = candidate_pool(hair, hair.q, [1e-2], 4, 200, 1)
    assert mirrored_duality_check(hair, hair.q, 1e-2, 4, cands) <= 1e-9
    with pytest.raises(ValueError):
        mirrored_duality_check(hair, hair.q, 1e-2, 0, cands)


def test_lipschitz_bound_examples(toral_eigen, rotation, north_south):
    v = lipschitz_bound_check(toral_eigen, Point.torus(0.3, 0.3), 1e-2, 8, K_lip=LAM_U, count=128)
    assert v == pytest.approx(0.0, abs=1e-12)
    assert lipschitz_bound_check(rotation, Point.circle(0.3), 1e-2, 8, K_lip=1 + 1e-9, count=64) <= 0
    K = north_south.grid_lipschitz()
    for theta in (0.0, math.pi, 1.0):
        assert lipschitz_bound_check(north_south, Point.circle(theta), 1e-2, 8, K_lip=K, count=128) <= 0
