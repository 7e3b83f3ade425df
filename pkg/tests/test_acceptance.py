"""Acceptance gate: one test per primary criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``)."""

import concurrent.futures
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from podirom import pipeline, pod, pump, rbf, windkessel as wk
from podirom.errors import CorruptData, CorruptModel
from podirom.pod import PodBasis
from podirom.service import create_app
from podirom.snapshots import (
    CoefficientFunction,
    SyntheticManifoldSpec,
    generate_multi_field_set,
    generate_synthetic_set,
    read_snapshot_set,
    write_snapshot_set,
)

from conftest import gap_design, linear_manifold_specs


def _criterion(name: str, ok: bool, detail: str = ""):
    marker = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{marker}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


@pytest.fixture(scope="module")
def gap_model():
    sset, evaluators = generate_multi_field_set(linear_manifold_specs(n_dof=400))
    model = pipeline.train(sset, energy_threshold=0.99)
    return model, sset, evaluators


def test_pod_exactness_on_rank_two_manifold():
    spec = SyntheticManifoldSpec(
        n_dof=2000,
        coefficient_functions=(
            CoefficientFunction("polynomial", (-4.0, 1.5)),
            CoefficientFunction("polynomial", (9.0, -2.0)),
        ),
        parameter_samples=gap_design(),
        noise_amplitude=0.0,
        seed=7,
    )
    sset, _ = generate_synthetic_set(spec, "p")
    start = time.perf_counter()
    model = pipeline.train(sset, rank_override={"p": 2})
    worst = 0.0
    for i, point in enumerate(sset.parameter_table):
        rec = pipeline.evaluate_field(model, "p", point)
        worst = max(worst, pod.relative_error_l2(sset.fields["p"].data[:, i], rec))
    elapsed = time.perf_counter() - start
    _criterion(
        "POD exactness: rank-2 set, k=2, training snapshots within 1e-8 %",
        worst < 1e-8 and elapsed < 1.0,
        f"worst E_X {worst:.3e} %, runtime {elapsed * 1e3:.1f} ms",
    )


def test_truncation_rank_selection_reproduces_reported_counts():
    pressure = PodBasis(
        modes=np.eye(2),
        singular_values=np.sqrt([0.9999, 0.0001]),
        truncation_rank=2,
    )
    k_pressure = pod.rank_for_energy(pressure, 0.99)
    u_y = PodBasis(
        modes=np.eye(3),
        singular_values=np.sqrt([0.9729, 0.9903 - 0.9729, 1.0 - 0.9903]),
        truncation_rank=3,
    )
    k_uy = pod.rank_for_energy(u_y, 0.99)
    _criterion(
        "Truncation rank: cumulative energies 0.9999 -> k=1 and 0.9729/0.9903 -> k=2 at 0.99",
        k_pressure == 1 and k_uy == 2,
        f"k_pressure={k_pressure}, k_uy={k_uy}",
    )


def test_rbf_interpolation_identity_at_all_training_points(gap_model):
    model, sset, _ = gap_model
    worst_ratio = 0.0
    for label, rom in model.fields.items():
        coeffs = rom.basis.truncated_modes.T @ sset.fields[label].data
        assert all(interp.regularization == 0.0 for interp in rom.interpolators)
        for j, interp in enumerate(rom.interpolators):
            tol = 1e-8 * max(1.0, np.abs(coeffs[j]).max())
            for i, center in enumerate(sset.parameter_table):
                gap = abs(rbf.evaluate(interp, center) - coeffs[j, i])
                worst_ratio = max(worst_ratio, gap / tol)
    _criterion(
        "RBF identity: interpolants reproduce modal coefficients at all 10 training parameters",
        worst_ratio <= 1.0,
        f"worst residual at {worst_ratio:.2e} of tolerance",
    )


def test_podi_generalization_at_gap_midpoint(gap_model):
    model, _, evaluators = gap_model
    errors = {
        label: pod.relative_error_l2(exact([4.0]), pipeline.evaluate_field(model, label, [4.0]))
        for label, exact in evaluators.items()
    }
    _criterion(
        "PODI generalization: gap-design training, parameter 4.0, E_X < 1 % per field",
        all(err < 1.0 for err in errors.values()),
        ", ".join(f"{label}={err:.4f} %" for label, err in errors.items()),
    )


def test_windkessel_bdf1_first_order_and_steady_state():
    params = wk.REFERENCE_OUTLETS["descending_aorta"]
    q, p0 = 80.0, 0.0
    tau = params.time_constant
    t_end = 5 * tau

    def end_error(dt):
        trace = wk.simulate(
            params, lambda t: q, dt=dt, t_end=t_end,
            initial=wk.WindkesselState(p_proximal=p0),
        )
        p_inf = params.p_distal + params.r_distal * q
        exact = p_inf + (p0 - p_inf) * np.exp(-trace.t[-1] / tau)
        return abs(trace.p_proximal[-1] - exact)

    errors = [end_error(tau / 10), end_error(tau / 20), end_error(tau / 40)]
    ratios = [errors[0] / errors[1], errors[1] / errors[2]]
    order_ok = all(1.8 <= r <= 2.2 for r in ratios)

    _, p_outlet = wk.steady_state(params, q)
    expected = (params.r_proximal + params.r_distal) * q + params.p_distal
    steady_ok = abs(p_outlet - expected) <= 1e-10 * abs(expected)
    _criterion(
        "Windkessel BDF1: error ratios in [1.8, 2.2] and analytic steady state to 1e-10",
        order_ok and steady_ok,
        f"ratios {ratios[0]:.3f}, {ratios[1]:.3f}; steady residual "
        f"{abs(p_outlet - expected):.2e}",
    )


def test_pump_roundtrip_grid_and_spot_value():
    curve = pump.PumpCurve()
    omegas = np.linspace(3000.0, 8000.0, 50)
    flows = np.linspace(3.0, 5.0, 50)
    worst = 0.0
    for omega in omegas:
        for pf in flows:
            back = pump.flow_from_speed_head(
                curve, omega, pump.head_from_speed_flow(curve, omega, pf)
            )
            worst = max(worst, abs(back - pf))
    spot = pump.head_from_speed_flow(curve, 5000.0, 4.0)
    _criterion(
        "Pump roundtrip: 2500-point grid within 1e-9 and spot head 61.87 within 1e-6",
        worst < 1e-9 and abs(spot - 61.87) < 1e-6,
        f"max grid error {worst:.2e}, spot {spot:.8f} mmHg",
    )


def test_online_evaluation_speed_and_linear_scaling():
    sizes = [25_000, 50_000, 100_000, 200_000]
    samples = gap_design()
    functions = (
        CoefficientFunction("polynomial", (-4.0, 1.5)),
        CoefficientFunction("polynomial", (9.0, -2.0)),
    )
    models = {}
    for n in sizes:
        spec = SyntheticManifoldSpec(
            n_dof=n, coefficient_functions=functions,
            parameter_samples=samples, seed=11,
        )
        sset, _ = generate_synthetic_set(spec, "p")
        models[n] = pipeline.train(sset, rank_override={"p": 2})
        for _ in range(5):  # warm caches before timing
            pipeline.evaluate_field(models[n], "p", [4.0])

    # latency bound: median of 20 single evaluations at the full size
    singles = []
    for _ in range(20):
        start = time.perf_counter()
        pipeline.evaluate_field(models[200_000], "p", [4.0])
        singles.append(time.perf_counter() - start)
    largest_ms = float(np.median(singles)) * 1e3

    # scaling fit: interleaved batches of 5 calls damp scheduler jitter
    buckets: dict[int, list[float]] = {n: [] for n in sizes}
    for _ in range(20):
        for n in sizes:
            start = time.perf_counter()
            for _ in range(5):
                pipeline.evaluate_field(models[n], "p", [4.0])
            buckets[n].append((time.perf_counter() - start) / 5)
    medians = np.array([np.median(buckets[n]) for n in sizes])
    slope, intercept = np.polyfit(sizes, medians, 1)
    predicted = np.polyval([slope, intercept], sizes)
    residual = np.sum((medians - predicted) ** 2)
    total = np.sum((medians - medians.mean()) ** 2)
    r_squared = 1.0 - residual / total
    _criterion(
        "Online speed: 200k-dof evaluation under 50 ms and linear cost in N (R^2 > 0.99)",
        largest_ms < 50.0 and r_squared > 0.99,
        f"median {largest_ms:.2f} ms at N=200k; R^2 {r_squared:.5f}; "
        f"slope {slope * 1e9:.2f} ns/dof",
    )


def test_persistence_bit_exact_and_corruption_detected(tmp_path, gap_model):
    model, sset, _ = gap_model
    model_path = tmp_path / "model.podi"
    pipeline.save_model(model, model_path)
    loaded = pipeline.load_model(model_path)
    model_ok = all(
        np.array_equal(loaded.fields[f].basis.modes, model.fields[f].basis.modes)
        and np.array_equal(
            loaded.fields[f].basis.singular_values, model.fields[f].basis.singular_values
        )
        and all(
            np.array_equal(a.weights, b.weights) and np.array_equal(a.centers, b.centers)
            for a, b in zip(loaded.fields[f].interpolators, model.fields[f].interpolators)
        )
        for f in model.fields
    ) and np.array_equal(loaded.parameter_table, model.parameter_table)

    set_dir = tmp_path / "set"
    write_snapshot_set(sset, set_dir)
    reread = read_snapshot_set(set_dir)
    set_ok = all(
        np.array_equal(reread.fields[f].data, sset.fields[f].data) for f in sset.fields
    ) and np.array_equal(reread.parameter_table, sset.parameter_table)

    raw = bytearray(model_path.read_bytes())
    raw[100] ^= 0x01
    model_path.write_bytes(bytes(raw))
    model_corruption_caught = False
    try:
        pipeline.load_model(model_path)
    except CorruptModel:
        model_corruption_caught = True

    field_file = set_dir / "field_000.bin"
    raw = bytearray(field_file.read_bytes())
    raw[3] ^= 0x10
    field_file.write_bytes(bytes(raw))
    set_corruption_caught = False
    try:
        read_snapshot_set(set_dir)
    except CorruptData:
        set_corruption_caught = True

    _criterion(
        "Persistence: model and snapshot-set roundtrips bit-exact, CRC corruption detected",
        model_ok and set_ok and model_corruption_caught and set_corruption_caught,
        f"model_ok={model_ok}, set_ok={set_ok}, "
        f"corruption caught={model_corruption_caught and set_corruption_caught}",
    )


def test_service_stride_invariance_and_concurrency(tmp_path, gap_model):
    model, _, _ = gap_model
    pipeline.save_model(model, tmp_path / "demo.podi")
    app = create_app(model_dir=str(tmp_path))
    with TestClient(app) as client:
        assert client.get("/health").json()["models"] == 1
        # recover the content-derived id assigned at startup
        model_id = next(iter(app.state.registry._models))

        base = {"field": "p", "parameter": [4.2]}
        plain = client.post(f"/models/{model_id}/evaluate", json=base).json()
        stride_ok = all(
            client.post(
                f"/models/{model_id}/evaluate", json={**base, "stride": stride}
            ).json()["stats"]
            == plain["stats"]
            for stride in (1, 2, 9, 100)
        )

        requests = [
            {"field": field, "parameter": [3.0 + 0.02 * i]}
            for i, field in zip(range(100), ["p", "wss", "ux"] * 34)
        ]
        sequential = [
            client.post(f"/models/{model_id}/evaluate", json=r).content
            for r in requests
        ]
        with concurrent.futures.ThreadPoolExecutor(max_workers=20) as pool:
            concurrent_bodies = list(
                pool.map(
                    lambda r: client.post(
                        f"/models/{model_id}/evaluate", json=r
                    ).content,
                    requests,
                )
            )
        concurrency_ok = concurrent_bodies == sequential
    _criterion(
        "Service contract: stats invariant under stride; 100 concurrent = sequential bytes",
        stride_ok and concurrency_ok,
        f"stride_ok={stride_ok}, concurrency_ok={concurrency_ok}",
    )
