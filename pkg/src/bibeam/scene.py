"""Scene geometry and deterministic multipath channel synthesis.

All channels follow the same free-space model: a line-of-sight term
lambda/(4*pi*d) * exp(-j*2*pi*d/lambda) plus, for every reflector plane,
one single-bounce term with the path length taken through the mirror
image of the source and the amplitude scaled by the reflection gain.

Conventions fixed here (the scenes themselves only state centers and
spacings): both arrays are uniform linear arrays along the x axis,
centered on their stated positions; reflectors are infinite planes
parallel to the y-z plane; angles are measured from broadside (+y),
with direction vector (sin(theta), cos(theta), 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ArrayGeometry:
    """Antenna element positions in meters, one row per element."""

    element_positions: np.ndarray

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.element_positions, dtype=float))
        if pos.shape[0] < 1 or pos.shape[1] != 3:
            raise ValueError("element_positions must be an (n, 3) array with n >= 1")
        if len(np.unique(pos, axis=0)) != pos.shape[0]:
            raise ValueError("element positions must be pairwise distinct")
        object.__setattr__(self, "element_positions", pos)

    @property
    def size(self) -> int:
        return self.element_positions.shape[0]


@dataclass(frozen=True)
class SceneConfig:
    """Full description of one simulated deployment.

    Lengths in meters, powers linear, ``alpha_db`` in dB (-inf allowed).
    ``gamma0``/``gamma1`` are the tag reflection coefficients per slot for
    bit 0 and bit 1.
    """

    wavelength: float
    ce_array: ArrayGeometry
    reader_array: ArrayGeometry
    bde_position: np.ndarray
    reflector_x_offsets: tuple[float, ...] = (2.0, -2.0)
    g_smc: float = 0.5
    p_max: float = 1.0
    slots: int = 1
    gamma0: tuple[float, ...] = (-1.0,)
    gamma1: tuple[float, ...] = (1.0,)
    alpha_db: float = 33.0

    def __post_init__(self):
        object.__setattr__(self, "bde_position", np.asarray(self.bde_position, dtype=float).reshape(3))
        object.__setattr__(self, "reflector_x_offsets", tuple(float(v) for v in self.reflector_x_offsets))
        object.__setattr__(self, "gamma0", tuple(float(v) for v in self.gamma0))
        object.__setattr__(self, "gamma1", tuple(float(v) for v in self.gamma1))
        if self.wavelength <= 0:
            raise ValueError("wavelength: must be > 0")
        if self.p_max <= 0:
            raise ValueError("p_max: must be > 0")
        if not 0.0 <= self.g_smc <= 1.0:
            raise ValueError("g_smc: must be in [0, 1]")
        if self.slots < 1:
            raise ValueError("slots: must be >= 1")
        if len(self.gamma0) != self.slots or len(self.gamma1) != self.slots:
            raise ValueError("gamma0/gamma1: length must equal the slot count")
        diff = np.subtract(self.gamma1, self.gamma0)
        if not np.any(diff != 0.0):
            raise ValueError("gamma0/gamma1: coefficients must differ in at least one slot")


@dataclass(frozen=True)
class ChannelSet:
    """The three channels of one scene plus the rank-1 backscatter cascade.

    ``direct`` is the N x M CE-to-reader matrix, ``ce_to_tag`` the length-M
    CE-to-tag vector, ``tag_to_reader`` the length-N tag-to-reader vector,
    and ``cascade`` their outer product (tag_to_reader * ce_to_tag^T).
    """

    direct: np.ndarray
    ce_to_tag: np.ndarray
    tag_to_reader: np.ndarray
    cascade: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "cascade", np.outer(self.tag_to_reader, self.ce_to_tag))
        for name in ("direct", "ce_to_tag", "tag_to_reader", "cascade"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name}: entries must be finite")

    @property
    def n_ce(self) -> int:
        return self.direct.shape[1]

    @property
    def n_reader(self) -> int:
        return self.direct.shape[0]


def build_ula(center, count: int, spacing: float, axis=(1.0, 0.0, 0.0)) -> ArrayGeometry:
    """Uniform linear array of ``count`` elements centered on ``center``.

    Elements sit symmetrically about the center along ``axis`` at pitch
    ``spacing``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if spacing <= 0:
        raise ValueError("spacing must be > 0")
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if norm == 0:
        raise ValueError("axis must be a nonzero vector")
    axis = axis / norm
    center = np.asarray(center, dtype=float).reshape(3)
    offsets = (np.arange(count) - (count - 1) / 2.0) * spacing
    return ArrayGeometry(center + offsets[:, None] * axis)


def image_point(p, reflector_x: float) -> np.ndarray:
    """Mirror a point about the infinite plane x = ``reflector_x``."""
    p = np.asarray(p, dtype=float).reshape(3)
    return np.array([2.0 * reflector_x - p[0], p[1], p[2]])


def los_coeff(d: float, wavelength: float) -> complex:
    """Free-space coefficient (lambda / (4 pi d)) * exp(-j 2 pi d / lambda)."""
    if d <= 0:
        raise ValueError("path length must be > 0 (free-space model is singular at 0)")
    return wavelength / (4.0 * np.pi * d) * np.exp(-2j * np.pi * d / wavelength)


def _point_channel(sources: np.ndarray, target: np.ndarray, wavelength: float,
                   reflector_xs, g_smc: float) -> np.ndarray:
    """LOS + single-bounce coefficients from each source point to ``target``."""
    d = np.linalg.norm(sources - target, axis=1)
    if np.any(d <= 0):
        raise ValueError("target coincides with a source element (zero path length)")
    coeff = wavelength / (4.0 * np.pi * d) * np.exp(-2j * np.pi * d / wavelength)
    for rx in reflector_xs:
        img = target.copy()
        img[0] = 2.0 * rx - img[0]
        dl = np.linalg.norm(sources - img, axis=1)
        if np.any(dl <= 0):
            raise ValueError("degenerate reflection geometry (zero path length)")
        coeff = coeff + g_smc * wavelength / (4.0 * np.pi * dl) * np.exp(-2j * np.pi * dl / wavelength)
    return coeff


def synth_channels(scene: SceneConfig) -> ChannelSet:
    """Synthesize the direct, CE-to-tag and tag-to-reader channels of a scene.

    Every entry is the LOS coefficient plus one image-method term per
    reflector with amplitude scaled by ``g_smc``.  The cascade matrix is
    formed as the outer product tag_to_reader * ce_to_tag^T and is rank 1
    by construction.
    """
    ce = scene.ce_array.element_positions
    rd = scene.reader_array.element_positions
    bde = scene.bde_position

    ce_to_tag = _point_channel(ce, bde, scene.wavelength, scene.reflector_x_offsets, scene.g_smc)
    tag_to_reader = _point_channel(rd, bde, scene.wavelength, scene.reflector_x_offsets, scene.g_smc)

    direct = np.empty((rd.shape[0], ce.shape[0]), dtype=complex)
    for n in range(rd.shape[0]):
        direct[n, :] = _point_channel(ce, rd[n], scene.wavelength,
                                      scene.reflector_x_offsets, scene.g_smc)

    return ChannelSet(direct=direct, ce_to_tag=ce_to_tag, tag_to_reader=tag_to_reader)


def steering_vector(theta: float, array: ArrayGeometry, wavelength: float) -> np.ndarray:
    """Far-field steering vector for angle ``theta`` off broadside.

    Element m carries unit magnitude and phase
    -(2 pi / lambda) * (position_m . direction) with direction
    (sin(theta), cos(theta), 0).
    """
    direction = np.array([np.sin(theta), np.cos(theta), 0.0])
    proj = array.element_positions @ direction
    return np.exp(-2j * np.pi / wavelength * proj)


def default_scene(**overrides) -> SceneConfig:
    """The reference deployment: 16-element half-wavelength ULAs at the CE
    (origin) and reader (0, 8, 0), tag at (0, 2, 0), reflector planes at
    x = +/-2 m with amplitude gain 0.5, wavelength 0.1 m, unit power budget,
    one slot with reflection coefficients -/+1.
    """
    wavelength = float(overrides.pop("wavelength", 0.1))
    ce_count = int(overrides.pop("ce_count", 16))
    reader_count = int(overrides.pop("reader_count", 16))
    ce_spacing = float(overrides.pop("ce_spacing", 0.5 * wavelength))
    reader_spacing = float(overrides.pop("reader_spacing", 0.5 * wavelength))
    ce_center = overrides.pop("ce_center", (0.0, 0.0, 0.0))
    reader_center = overrides.pop("reader_center", (0.0, 8.0, 0.0))
    params = dict(
        wavelength=wavelength,
        ce_array=build_ula(ce_center, ce_count, ce_spacing),
        reader_array=build_ula(reader_center, reader_count, reader_spacing),
        bde_position=(0.0, 2.0, 0.0),
    )
    params.update(overrides)
    return SceneConfig(**params)
