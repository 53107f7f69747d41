"""Smoke tests for the python extension, run from the build tree."""

import os
import sys

sys.path.insert(0, os.environ["FBA_MODULE_DIR"])

import numpy as np  # noqa: E402

import _fba as fba  # noqa: E402


def test_merge_identity():
    scene = fba.synthetic_scene(64, 64, seed=7)
    merged = fba.merge_burst([scene, scene, scene], p=11.0)
    assert merged.shape == scene.shape
    assert np.max(np.abs(merged - scene)) < 1e-9


def test_p0_is_mean():
    rng = np.random.default_rng(3)
    frames = [rng.random((32, 32)) for _ in range(4)]
    merged = fba.merge_burst(frames, p=0.0)
    assert np.max(np.abs(merged - np.mean(frames, axis=0))) < 1e-9


def test_color_roundtrip(tmp_path):
    rng = np.random.default_rng(5)
    img = rng.random((24, 20, 3))
    path = str(tmp_path / "roundtrip.pfm")
    fba.write_image(img, path)
    back = fba.read_image(path)
    assert back.shape == img.shape
    assert np.max(np.abs(back - img)) < 1e-6


def test_kernel_properties():
    k = fba.simulate_kernel(t_exp=1.0 / 3.0, seed=11)
    assert abs(k.sum() - 1.0) < 1e-9
    assert k.min() >= 0.0
    size = k.shape[0]
    ys, xs = np.mgrid[0:size, 0:size]
    c = size // 2
    mu = np.array([(k * (xs - c)).sum(), (k * (ys - c)).sum()])
    assert np.hypot(*mu) <= 0.05


def test_equivalent_psf_concentrates():
    kernels = [fba.simulate_kernel(seed=100 + i) for i in range(8)]
    grid = max(k.shape[0] for k in kernels)
    kernels = [k if k.shape[0] == grid else _embed(k, grid) for k in kernels]
    _, c0 = fba.equivalent_psf(kernels, p=0.0, grid=grid)
    _, c11 = fba.equivalent_psf(kernels, p=11.0, grid=grid)
    assert c11 > c0


def _embed(k, size):
    out = np.zeros((size, size))
    off = (size - k.shape[0]) // 2
    out[off:off + k.shape[0], off:off + k.shape[1]] = k
    return out


def test_pipeline_beats_average():
    truth = fba.synthetic_scene(64, 64, seed=13)
    kernels = [fba.simulate_kernel(seed=200 + i) for i in range(6)]
    frames = fba.synthesize_burst(truth, kernels, noise_sigma=0.02, seed=17)
    merged = fba.merge_burst(frames, p=11.0)
    mean = fba.align_and_average(frames)
    rmse = lambda a: float(np.sqrt(np.mean((a - truth) ** 2)))  # noqa: E731
    assert rmse(merged) < rmse(mean)


def test_contributions_sum():
    rng = np.random.default_rng(9)
    frames = [rng.random((24, 24)) for _ in range(3)]
    out = fba.frame_contributions(frames, p=11.0)
    total = np.sum(out["images"], axis=0)
    merged = fba.merge_burst(frames, p=11.0)
    assert np.max(np.abs(total - merged)) < 1e-9
    assert abs(sum(out["energy_shares"]) - 1.0) < 1e-12


def test_run_study_tiny():
    truth = fba.synthetic_scene(32, 32, seed=19)
    r = fba.run_study(truth, frames=3, noise_sigma=0.02, trials=4,
                      p_grid=[0.0, 7.0], seed=23)
    assert len(r["mse"]) == 2
    for i in range(2):
        assert abs(r["mse"][i] - r["bias2"][i] - r["variance"][i]) <= 0.02 * r["mse"][i]
    assert r["csv"].startswith("p,epsilon,T_exp,M,s,trials,mse,bias2,variance")


def test_register_burst_shift():
    truth = fba.synthetic_scene(128, 128, seed=29)
    shifted = np.roll(truth, (3, 5), axis=(0, 1))
    reg = fba.register_burst([truth, shifted], seed=1)
    h = reg["homographies"][1]
    # a pure integer roll is recovered as a translation by (-5, -3)
    assert abs(h[0][2] + 5.0) < 0.2
    assert abs(h[1][2] + 3.0) < 0.2


def main():
    import inspect
    import tempfile
    from pathlib import Path

    failures = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_") or not callable(fn):
            continue
        kwargs = {}
        if "tmp_path" in inspect.signature(fn).parameters:
            kwargs["tmp_path"] = Path(tempfile.mkdtemp())
        try:
            fn(**kwargs)
            print(f"PASS {name}")
        except AssertionError as exc:
            failures += 1
            print(f"FAIL {name}: {exc}")
    return failures


if __name__ == "__main__":
    sys.exit(main())
