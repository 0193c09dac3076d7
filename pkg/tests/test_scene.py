import numpy as np
import pytest

from bibeam.scene import (ArrayGeometry, SceneConfig, build_ula, default_scene,
                          image_point, los_coeff, steering_vector, synth_channels)


def test_ula_single_element_at_center():
    arr = build_ula((1.0, 2.0, 3.0), 1, 0.5)
    assert np.array_equal(arr.element_positions, [[1.0, 2.0, 3.0]])


def test_ula_pair_symmetric():
    arr = build_ula((0, 0, 0), 2, 0.05)
    assert np.allclose(sorted(arr.element_positions[:, 0]), [-0.025, 0.025])
    assert np.allclose(arr.element_positions[:, 1:], 0.0)


def test_ula_sixteen_extremes():
    # (count - 1) / 2 * spacing = 7.5 * 0.05
    arr = build_ula((0, 0, 0), 16, 0.05)
    assert np.isclose(arr.element_positions[:, 0].min(), -0.375)
    assert np.isclose(arr.element_positions[:, 0].max(), 0.375)


def test_ula_rejects_zero_axis():
    with pytest.raises(ValueError):
        build_ula((0, 0, 0), 4, 0.1, axis=(0, 0, 0))


def test_image_point_mirror():
    assert np.array_equal(image_point((0.0, 2.0, 0.0), 2.0), [4.0, 2.0, 0.0])


def test_image_point_on_plane_fixed():
    p = (2.0, 5.0, -1.0)
    assert np.array_equal(image_point(p, 2.0), p)


def test_image_point_involution():
    p = np.array([0.3, 1.2, -0.7])
    assert np.allclose(image_point(image_point(p, -2.0), -2.0), p)


def test_los_coeff_at_one_wavelength():
    c = los_coeff(0.1, 0.1)
    assert np.isclose(abs(c), 1.0 / (4.0 * np.pi))
    assert np.isclose(np.angle(c), 0.0, atol=1e-12)


def test_los_coeff_half_wavelength_phase():
    c = los_coeff(0.05, 0.1)
    assert np.isclose(c.real / abs(c), -1.0)


def test_los_coeff_magnitude_reference():
    # lambda/(4 pi d) at lambda=0.1, d=8
    assert np.isclose(abs(los_coeff(8.0, 0.1)), 9.94718394324e-4, rtol=1e-9)


def test_los_coeff_rejects_zero_distance():
    with pytest.raises(ValueError):
        los_coeff(0.0, 0.1)


def _two_point_scene(reflectors=(), g_smc=0.0):
    return SceneConfig(
        wavelength=0.1,
        ce_array=ArrayGeometry([[0.0, 0.0, 0.0]]),
        reader_array=ArrayGeometry([[0.0, 8.0, 0.0]]),
        bde_position=(0.0, 2.0, 0.0),
        reflector_x_offsets=reflectors,
        g_smc=g_smc,
    )


def test_synth_pure_los_single_elements():
    ch = synth_channels(_two_point_scene())
    assert ch.direct.shape == (1, 1)
    assert np.isclose(ch.direct[0, 0], los_coeff(8.0, 0.1))
    assert np.isclose(ch.ce_to_tag[0], los_coeff(2.0, 0.1))
    assert np.isclose(ch.tag_to_reader[0], los_coeff(6.0, 0.1))


def test_synth_one_reflector_adds_image_path():
    # CE at origin, tag at (0,2,0), plane at x=2: image at (4,2,0),
    # path length sqrt(4^2 + 2^2) = sqrt(20)
    ch = synth_channels(_two_point_scene(reflectors=(2.0,), g_smc=0.5))
    expected = los_coeff(2.0, 0.1) + 0.5 * los_coeff(np.sqrt(20.0), 0.1)
    assert np.isclose(ch.ce_to_tag[0], expected)


def test_cascade_is_rank_one():
    ch = synth_channels(default_scene())
    sv = np.linalg.svd(ch.cascade, compute_uv=False)
    assert sv[1] <= 1e-12 * sv[0]
    assert np.allclose(ch.cascade, np.outer(ch.tag_to_reader, ch.ce_to_tag))


def test_channel_reciprocity():
    # distance-only model: swapping endpoint roles keeps the coefficient
    scene = default_scene()
    ch = synth_channels(scene)
    swapped = SceneConfig(
        wavelength=scene.wavelength,
        ce_array=scene.reader_array,
        reader_array=scene.ce_array,
        bde_position=scene.bde_position,
        reflector_x_offsets=scene.reflector_x_offsets,
        g_smc=scene.g_smc,
    )
    ch2 = synth_channels(swapped)
    assert np.allclose(ch.direct, ch2.direct.T)


def test_magnitude_strictly_decreases_with_distance():
    mags = [abs(los_coeff(d, 0.1)) for d in (1.0, 2.0, 5.0, 8.0, 20.0)]
    assert all(a > b for a, b in zip(mags, mags[1:]))


def test_synth_rejects_bde_on_element():
    scene = SceneConfig(
        wavelength=0.1,
        ce_array=ArrayGeometry([[0.0, 0.0, 0.0]]),
        reader_array=ArrayGeometry([[0.0, 8.0, 0.0]]),
        bde_position=(0.0, 0.0, 0.0),
        reflector_x_offsets=(),
        g_smc=0.0,
    )
    with pytest.raises(ValueError):
        synth_channels(scene)


def test_steering_broadside_all_ones():
    arr = build_ula((0, 0, 0), 8, 0.05)
    g = steering_vector(0.0, arr, 0.1)
    assert np.allclose(g, np.ones(8))


def test_steering_single_element():
    arr = build_ula((0, 0, 0), 1, 0.05)
    assert np.allclose(steering_vector(0.7, arr, 0.1), [1.0])


def test_steering_endfire_phase_gap():
    # half-wavelength pair at endfire: phases differ by pi
    arr = build_ula((0, 0, 0), 2, 0.05)
    g = steering_vector(np.pi / 2, arr, 0.1)
    assert np.allclose(np.abs(g), 1.0)
    dphi = np.angle(g[1] / g[0])
    assert np.isclose(abs(dphi), np.pi)


def test_scene_validation():
    with pytest.raises(ValueError):
        default_scene(wavelength=-1.0)
    with pytest.raises(ValueError):
        default_scene(p_max=0.0)
    with pytest.raises(ValueError):
        default_scene(gamma0=(1.0,), gamma1=(1.0,))
    with pytest.raises(ValueError):
        ArrayGeometry([[0, 0, 0], [0, 0, 0]])
