import numpy as np
import pytest

import sfcd


def two_valued():
    img = np.full((16, 16), 0.1)
    img[4:12, 2:10] = 0.9
    return img


def test_run_splits_two_valued_image():
    cfg = sfcd.SfcmConfig()
    res = sfcd.run_sfcm(two_valued(), cfg)
    assert res["membership"].shape == (16, 16, 2)
    assert res["changed_count"] == 64
    np.testing.assert_allclose(res["centers"], [0.1, 0.9], atol=1e-9)
    np.testing.assert_array_equal(res["change_map"], two_valued() == 0.9)


def test_membership_rows_sum_to_one():
    rng = np.random.default_rng(0)
    img = rng.random((9, 7))
    u = sfcd.fcm_membership(img, [0.2, 0.5, 0.8], 2.0)
    np.testing.assert_allclose(u.sum(axis=2), 1.0, atol=1e-12)
    h = sfcd.spatial_neighbor(u, 1)
    np.testing.assert_allclose(sfcd.apply_spatial(u, h, 1.0, 1.0).sum(axis=2), 1.0, atol=1e-12)


def test_difference_and_errors():
    a = np.array([[1.0, 0.0], [2.0, 3.0]])
    b = np.array([[3.0, 0.0], [2.0, 1.0]])
    np.testing.assert_allclose(sfcd.difference_image(a, b), [[0.5, 0.0], [0.0, 0.5]])
    with pytest.raises(sfcd.InputError):
        sfcd.difference_image(a, np.ones((3, 3)))
    with pytest.raises(sfcd.NumericalError):
        sfcd.run_sfcm(np.ones((4, 4)), sfcd.SfcmConfig())


def test_config_round_trip():
    cfg = sfcd.parse_config("c = 3\nspatial_variant = intensity\n")
    assert cfg.c == 3
    assert cfg.spatial_variant == sfcd.SpatialVariant.intensity
    assert sfcd.parse_config(sfcd.serialize_config(cfg)) == cfg
    with pytest.raises(ValueError):
        sfcd.parse_config("bogus = 1")


def test_image_round_trip(tmp_path):
    img = np.arange(12, dtype=float).reshape(3, 4) * 20
    for name in ("x.png", "x.pgm"):
        sfcd.save_image(img, tmp_path / name)
        np.testing.assert_array_equal(sfcd.load_image(tmp_path / name), img)


def test_phantom_scoring():
    before, after, truth = sfcd.standard_phantom(looks=16, seed=0)
    assert before.shape == (128, 128)
    res = sfcd.run_sfcm(sfcd.difference_image(before, after), sfcd.SfcmConfig())
    metrics = sfcd.score(res["change_map"].astype(np.uint32), truth.astype(np.uint32))
    assert metrics["oa"] > 0.95
