import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from timdof import kernels

needs_c = pytest.mark.skipif("cython" not in kernels.available_backends(),
                                reason="compiled kernels not built")

PY = kernels.get_backend("python")
CY = kernels.get_backend("cython") if "cython" in kernels.available_backends() else None

coef = st.floats(1.0, 2.0, allow_nan=False)


def test_fallback_always_available():
    assert "python" in kernels.available_backends()


@needs_c
def test_use_backend_switches_functions():
    original = kernels.BACKEND
    try:
        kernels.use_backend("python")
        assert kernels.floor_sum is PY.floor_sum
        kernels.use_backend("cython")
        assert kernels.floor_sum is CY.floor_sum
    finally:
        kernels.use_backend(original)
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@needs_c
@settings(max_examples=300)
@given(st.lists(st.tuples(coef, st.integers(0, 10 ** 6)), min_size=1, max_size=6))
def test_floor_sum_parity(pairs):
    g, x = zip(*pairs)
    assert CY.floor_sum(np.array(g), np.array(x)) == PY.floor_sum(np.array(g), np.array(x))


@needs_c
@settings(max_examples=200)
@given(st.lists(coef, min_size=1, max_size=3), st.integers(1, 500), st.integers(2, 5), st.integers(0, 3000))
def test_mac_search_parity(g, spacing, qc, target):
    g = np.array(g)
    assert CY.mac_search(g, spacing, qc, target) == PY.mac_search(g, spacing, qc, target)


@needs_c
@settings(max_examples=200)
@given(coef, st.integers(0, 10 ** 6), st.integers(0, 10 ** 6), st.integers(0, 2 * 10 ** 6))
def test_invert_floor_parity(g, offset, target, hi):
    assert CY.invert_floor(g, offset, target, 0, hi) == PY.invert_floor(g, offset, target, 0, hi)


@needs_c
@settings(max_examples=60)
@given(st.integers(0, 12), st.integers(0, 12), st.integers(10, 5000))
def test_alignment_extents_parity(a, b, n):
    out_c = CY.alignment_extents(a, b, 1.0, 1.0 / n, n)
    out_p = PY.alignment_extents(a, b, 1.0, 1.0 / n, n)
    for u, v in zip(out_c, out_p):
        np.testing.assert_array_equal(u, v)


@needs_c
@settings(max_examples=100)
@given(st.integers(0, 2 ** 32))
def test_image_set_size_parity(seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 5, size=(40, 3))
    b = rng.integers(0, 5, size=(40, 3))
    ga, gb = rng.uniform(1, 2, 3), rng.uniform(1, 2, 3)
    ref = int(rng.integers(0, 40))
    assert CY.image_set_size(a, b, ga, gb, ref) == PY.image_set_size(a, b, ga, gb, ref)


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=needs_c)])
def test_known_values(backend):
    k = kernels.get_backend(backend)
    assert k.floor_sum(np.array([1.5]), np.array([10])) == 15
    assert k.floor_sum(np.array([1.2, 1.7]), np.array([10, 10])) == 29
    # g = (1, 1), spacing 1, qc 2: target 1 matches (0,1) and (1,0)
    assert k.mac_search(np.array([1.0, 1.0]), 1, 2, 1) == (2, 1)
    assert k.mac_search(np.array([1.0, 1.5]), 10, 3, 25) == (1, 1 * 3 + 1)
    assert k.invert_floor(1.5, 0, 15, 0, 100) == 10
    assert k.invert_floor(1.5, 0, 2, 0, 100) == -1


@needs_c
def test_simulation_identical_under_both_backends():
    from timdof.graphs import build_bundle
    from timdof.scheme import build_four_ninths_scheme
    from timdof.simulator import SimConfig, run_deterministic_trials
    from timdof.topology import load_fixture

    t = load_fixture("paper7")
    s = build_four_ninths_scheme(build_bundle(t))
    cfg = SimConfig(pbar=1000, trials=150, seed=4)
    original = kernels.BACKEND
    try:
        out = {}
        for b in ("python", "cython"):
            kernels.use_backend(b)
            out[b] = run_deterministic_trials(s, t, cfg)
    finally:
        kernels.use_backend(original)
    assert out["python"] == out["cython"] and out["python"].err_rate_total > 0


def test_fallback_selected_without_extension():
    import subprocess
    import sys

    code = ("import sys; sys.modules['timdof._kernels_c'] = None\n"
            "from timdof import kernels\n"
            "assert kernels.BACKEND == 'python' and kernels.available_backends() == ['python']\n"
            "from timdof.cli import run_cli\n"
            "sys.exit(run_cli(['fixtures', 'hexnet6']))")
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith("#") or "users 6" in proc.stdout
