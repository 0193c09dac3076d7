"""Scalar figures of merit for a designed transmit vector.

eta is the received dynamic range (direct-link over backscattered power,
in dB); path gain maps the fraction of transmitted power arriving at a
probe point; the radiation pattern sweeps the transmit array response
over departure angles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beamforming import realized_eta_db
from .scene import ArrayGeometry, ChannelSet, SceneConfig, _point_channel, steering_vector


@dataclass(frozen=True)
class PathGainMap:
    """Path gain in dB over a rectangular x-y lattice at z = 0."""

    x_coords: np.ndarray
    y_coords: np.ndarray
    pg_db: np.ndarray  # shape (len(y_coords), len(x_coords)); -inf near elements

    def __post_init__(self):
        if self.pg_db.shape != (len(self.y_coords), len(self.x_coords)):
            raise ValueError("pg_db shape must be (len(y), len(x))")


def eta(channels: ChannelSet, x: np.ndarray) -> float:
    """Dynamic range 10*log10(||direct @ x||^2 / ||cascade @ x||^2) in dB."""
    return realized_eta_db(channels, x)


def path_gain(scene: SceneConfig, x: np.ndarray, point) -> float:
    """Received-to-transmitted power ratio at ``point``, in dB.

    Synthesizes the CE-to-point channel (LOS plus reflections) and
    evaluates |h^T x|^2 / ||x||^2.
    """
    x = np.asarray(x, dtype=complex).ravel()
    power = float(np.vdot(x, x).real)
    if power == 0:
        raise ValueError("zero transmit vector")
    h = _point_channel(scene.ce_array.element_positions, np.asarray(point, dtype=float).reshape(3),
                       scene.wavelength, scene.reflector_x_offsets, scene.g_smc)
    return 10.0 * np.log10(float(np.abs(h @ x) ** 2) / power)


def path_gain_map(scene: SceneConfig, x: np.ndarray,
                  x_range=(-2.0, 2.0), y_range=(0.0, 8.0), step: float = 0.05) -> PathGainMap:
    """Path gain over a lattice; points within lambda/4 of a CE element get -inf."""
    xs = np.arange(x_range[0], x_range[1] + step / 2, step)
    ys = np.arange(y_range[0], y_range[1] + step / 2, step)
    guard = scene.wavelength / 4.0
    elems = scene.ce_array.element_positions
    pg = np.empty((ys.size, xs.size))
    for iy, yv in enumerate(ys):
        for ix, xv in enumerate(xs):
            p = np.array([xv, yv, 0.0])
            if np.min(np.linalg.norm(elems - p, axis=1)) < guard:
                pg[iy, ix] = float("-inf")
                continue
            pg[iy, ix] = path_gain(scene, x, p)
    return PathGainMap(x_coords=xs, y_coords=ys, pg_db=pg)


def radiation_pattern(x: np.ndarray, array: ArrayGeometry, wavelength: float,
                      thetas) -> np.ndarray:
    """Transmit pattern |g(theta)^T x|^2 for each angle in ``thetas`` (radians)."""
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != array.size:
        raise ValueError("transmit vector length must match the array size")
    out = np.empty(len(thetas))
    for i, th in enumerate(thetas):
        g = steering_vector(float(th), array, wavelength)
        out[i] = float(np.abs(g @ x) ** 2)
    return out
