import os

import numpy as np
import pytest

import resest


def test_benchmark_certificate():
    cert = resest.certify(resest.benchmark_system(100), normalize=True, psi="l1")
    assert cert["r_max"] == 30
    assert cert["r_max_lp"] == 28
    assert cert["nu"][30] < 0.5 <= cert["nu"][31]


def test_simulate_by_hand():
    sys = resest.benchmark_system(3)
    X, Y = resest.simulate(sys, np.array([1.0, 0.0]))
    assert np.allclose(X[:, 1], [0.7, -0.5])
    assert np.allclose(Y[0, :2], [1.0, -0.3])


def test_e0_exact_recovery():
    sys = resest.benchmark_system(100)
    trial = resest.draw_trial(sys, seed=4, fraction=0.3)
    out = resest.estimate(sys, trial["Y"], estimator="E0")
    assert resest.relative_error(out["X_hat"], trial["X"]) <= 1e-6
    assert out["method"] == "lp"


def test_e_and_oracle_run():
    sys = resest.benchmark_system(50)
    trial = resest.draw_trial(sys, seed=2, fraction=0.2, process_amplitude=0.03, measurement_amplitude=0.1)
    e = resest.estimate(sys, trial["Y"], estimator="E", lambda_=5000.0)
    o = resest.estimate(sys, trial["Y"], estimator="oracle-E", S=trial["S"], lambda_=5000.0)
    assert e["converged"] and o["converged"]
    assert np.isfinite(resest.relative_error(e["X_hat"], trial["X"]))


def test_ltv_construction_and_errors():
    A = [np.eye(2)] * 3
    C = [np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])] * 2
    sys = resest.LtvSystem(A, C)
    assert sys.horizon == 4 and sys.n == 2 and sys.ny == 1
    with pytest.raises(ValueError):
        resest.LtvSystem(A, C[:2])
    with pytest.raises(OSError):
        resest.load_system("/no/such/file.json")


def test_load_system_file():
    path = os.environ.get("RESEST_SYSTEM")
    if not path:
        pytest.skip("RESEST_SYSTEM not set")
    sys = resest.load_system(path)
    assert sys.horizon == 100
    assert abs(resest.nu_brute(sys, 30, grid=20000) - 0.49674) < 1e-4
