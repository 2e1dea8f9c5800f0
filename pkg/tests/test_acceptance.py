"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
report; every tolerance is pinned here.
"""

import time

import numpy as np

from softadapt import (
    SlopeVector,
    SoftAdaptConfig,
    StepRule,
    beale,
    check_gradient,
    compute_weights,
    descend,
    estimate_slope,
    rosenbrock,
)
from softadapt.cli import EXIT_OK, main as cli_main
from softadapt.optimize import TERM_CONVERGED
from softadapt.sae import TrainConfig, generate_patterns, init_net, train
from test_sae import finite_difference_grads


def report(number: int, description: str, ok: bool) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] criterion {number:>2}: {description}: {status}")
    assert ok, f"criterion {number} failed: {description}"


def test_criterion_01_equal_weights_limit():
    rng = np.random.default_rng(1001)
    worst = 0.0
    for m in (2, 3, 5):
        for _ in range(100):
            values = rng.uniform(-1e4, 1e4, m)
            alphas = compute_weights(
                SlopeVector(values), None, SoftAdaptConfig(beta=0.0)
            ).alphas
            worst = max(worst, float(np.abs(alphas - 1.0 / m).max()))
    report(1, f"beta=0 equal weights, worst deviation {worst:.2e} <= 1e-6", worst <= 1e-6)


def test_criterion_02_simplex_invariant():
    start = time.perf_counter()
    rng = np.random.default_rng(1002)
    ok = True
    for trial in range(10_000):
        m = int(rng.integers(1, 7))
        beta = float(rng.uniform(-1.0, 1.0))
        normalized = bool(rng.integers(2))
        loss_weighted = bool(rng.integers(2))
        if trial < 100:
            # Force the extreme-magnitude corner explicitly.
            values = np.where(rng.integers(2, size=m) > 0, 1e8, -1e8).astype(float)
        else:
            values = rng.uniform(-1.0, 1.0, m) * 10.0 ** rng.uniform(0.0, 8.0)
        # Averaged losses bounded away from zero; the epsilon guard in the
        # loss re-weighting denominator erodes the sum bound otherwise.
        avg = 10.0 ** rng.uniform(-1.0, 6.0, m)
        config = SoftAdaptConfig(beta=beta, normalized=normalized, loss_weighted=loss_weighted)
        alphas = compute_weights(SlopeVector(values), avg, config).alphas
        if not (
            np.isfinite(alphas).all()
            and (alphas >= 0).all()
            and 1.0 - 1e-6 <= alphas.sum() <= 1.0
        ):
            ok = False
            break
    elapsed = time.perf_counter() - start
    report(2, f"simplex invariant over 10^4 random inputs ({elapsed:.2f} s < 5 s)", ok and elapsed < 5.0)


def test_criterion_03_finite_difference_exactness():
    rng = np.random.default_rng(1003)
    worst = 0.0
    for order in range(1, 6):
        t = np.arange(order + 1, dtype=float)
        for _ in range(50):
            poly = np.polynomial.Polynomial(rng.uniform(-10, 10, order + 1))
            expected = poly.deriv()(t[-1])
            got = estimate_slope(poly(t), order)
            worst = max(worst, abs(got - expected) / max(1.0, abs(expected)))
    report(3, f"orders 1-5 exact on polynomials, worst relative {worst:.2e} <= 1e-9", worst <= 1e-9)


def test_criterion_04_gradient_fidelity():
    rng = np.random.default_rng(1004)
    worst = 0.0
    for spec in (rosenbrock(), beale()):
        for _ in range(100):
            x = rng.uniform(-4.5, 4.5, 2)
            worst = max(worst, check_gradient(spec.problem, x))
    report(4, f"analytic gradients vs central differences, worst {worst:.2e} <= 1e-5", worst <= 1e-5)


def test_criterion_05_rosenbrock_speedup():
    spec = rosenbrock()
    start = time.perf_counter()
    baseline = descend(
        spec.problem,
        SoftAdaptConfig(beta=0.0),
        StepRule.fixed(1e-3),
        [-1.0, -1.0],
        max_iters=200_000,
        tol=1e-4,
    )
    adapted = descend(
        spec.problem,
        SoftAdaptConfig(beta=0.1, loss_weighted=True),
        StepRule.fixed(1e-3),
        [-1.0, -1.0],
        max_iters=200_000,
        tol=1e-4,
    )
    elapsed = time.perf_counter() - start
    converged = (
        baseline.termination == TERM_CONVERGED and adapted.termination == TERM_CONVERGED
    )
    speedup = 1.0 - adapted.iterations / baseline.iterations
    report(
        5,
        f"loss-weighted {adapted.iterations} vs equal-weight {baseline.iterations} "
        f"iterations (speedup {speedup:.1%} >= 20%, {elapsed:.1f} s < 10 s)",
        converged and speedup >= 0.20 and elapsed < 10.0,
    )


def test_criterion_06_bb_clamping():
    spec = rosenbrock()
    rule = StepRule.barzilai_borwein()
    ok = True
    for config in (SoftAdaptConfig(beta=0.1), SoftAdaptConfig(beta=0.1, loss_weighted=True)):
        trace = descend(spec.problem, config, rule, [-1.0, -1.0], max_iters=200_000, tol=1e-4)
        ok = ok and bool(
            (trace.etas >= rule.eta_min).all() and (trace.etas <= rule.eta_max).all()
        )
    report(6, "all adaptive step sizes within [1e-4, 1e-1]", ok)


def test_criterion_07_beta_zero_engine_equivalence():
    spec = rosenbrock()
    eta = 1e-3
    iters = 1000
    x = np.array([-1.0, -1.0])
    reference = [x.copy()]
    for _ in range(iters):
        r2 = x[1] - x[0] * x[0]
        grad_total = np.array([-2.0 * (1.0 - x[0]) + -400.0 * x[0] * r2, 200.0 * r2])
        x = x - eta * (grad_total / 2.0)
        reference.append(x.copy())
    trace = descend(
        spec.problem,
        SoftAdaptConfig(beta=0.0),
        StepRule.fixed(eta),
        [-1.0, -1.0],
        max_iters=iters,
        tol=1e-300,
    )
    worst = float(np.abs(trace.xs - np.array(reference)).max())
    report(7, f"beta=0 trajectory vs reference descent, worst deviation {worst:.2e} <= 1e-12", worst <= 1e-12)


def test_criterion_08_sae_comparison():
    start = time.perf_counter()
    dataset = generate_patterns(7, count=256, dim=64, active=4)
    adaptive = train(init_net(7), dataset, TrainConfig(mode="softadapt", seed=7, epochs=30))
    fixed = train(init_net(7), dataset, TrainConfig(mode="fixed", lam=1e-4, seed=7, epochs=30))
    elapsed = time.perf_counter() - start
    report(
        8,
        f"adaptive final true loss {adaptive.final_tloss:.4f} <= fixed-lambda "
        f"{fixed.final_tloss:.4f} ({elapsed:.1f} s < 60 s)",
        adaptive.final_tloss <= fixed.final_tloss and elapsed < 60.0,
    )


def test_criterion_09_sae_gradient_checks():
    net = init_net(7)
    batch = generate_patterns(8, count=16, dim=64, active=4)
    from softadapt.sae import backward

    grad_mse, grad_l1 = backward(net, batch)
    rng = np.random.default_rng(1009)
    worst = 0.0
    for _ in range(20):
        block = int(rng.integers(4))
        shape = net.params()[block].shape
        index = tuple(int(rng.integers(s)) for s in shape)
        fd_mse, fd_l1 = finite_difference_grads(net, batch, block, index)
        for fd, analytic in (
            (fd_mse, grad_mse[block][index]),
            (fd_l1, grad_l1[block][index]),
        ):
            scale = max(1e-6, abs(analytic), abs(fd))
            worst = max(worst, abs(fd - analytic) / scale)
    report(9, f"both gradient sets vs central differences, worst relative {worst:.2e} <= 1e-4", worst <= 1e-4)


def test_criterion_10_cli_determinism(tmp_path, monkeypatch):
    monkeypatch.setenv("SOFTADAPT_OUT_DIR", str(tmp_path))
    pairs = []
    for tag, args in (
        ("bench", ["bench", "rosenbrock", "--variant", "loss-weighted", "--max-iters", "2000"]),
        ("sae", ["sae", "--epochs", "5", "--seed", "7"]),
    ):
        first = tmp_path / f"{tag}_1.csv"
        second = tmp_path / f"{tag}_2.csv"
        for out in (first, second):
            code = cli_main(args + ["--out", str(out)])
            assert code in (EXIT_OK, 2)
        pairs.append(first.read_bytes() == second.read_bytes())
    report(10, "repeated CLI runs yield byte-identical traces", all(pairs))
