"""Scenario ingestion, figure-reproduction runs, and CSV persistence.

Scene files are flat ``key = value`` text: '#' starts a comment, arrays
are whitespace- or comma-separated numbers, all lengths are in meters,
powers are linear, and alpha is in dB with the literal token ``-inf``
permitted.  Omitted keys fall back to the reference deployment.

Every run writes a JSON manifest next to its CSV; re-running with the
same manifest reproduces the CSV byte for byte, independent of the
worker count.  Numbers are serialized with 12 significant digits and
-inf as the token ``-inf``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .beamforming import BeamformerOutput, mrt, null_dli_beamformer, sdr_beamformer
from .detection import GammaScheme, closed_form_pe, monte_carlo_pe
from .metrics import path_gain, radiation_pattern
from .scene import SceneConfig, build_ula, synth_channels

_SCENE_DEFAULTS = {
    "wavelength_m": [0.1],
    "ce_elements": [16.0],
    "ce_center_m": [0.0, 0.0, 0.0],
    "ce_spacing_m": None,  # 0.5 * wavelength when omitted
    "reader_elements": [16.0],
    "reader_center_m": [0.0, 8.0, 0.0],
    "reader_spacing_m": None,
    "bde_position_m": [0.0, 2.0, 0.0],
    "reflector_x_m": [2.0, -2.0],
    "g_smc": [0.5],
    "p_max": [1.0],
    "slots": [1.0],
    "gamma0": [-1.0],
    "gamma1": [1.0],
    "alpha_db": [33.0],
}


class SceneFormatError(ValueError):
    """Scene file violates the schema; the message names the field."""


def _parse_number(token: str, key: str) -> float:
    tok = token.strip().lower()
    if tok in ("-inf", "-infinity"):
        return float("-inf")
    try:
        return float(token)
    except ValueError:
        raise SceneFormatError(f"{key}: cannot parse number {token!r}") from None


def parse_scene(path) -> SceneConfig:
    """Read a scene file; omitted keys take the reference-deployment defaults."""
    raw: dict[str, list[float]] = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SceneFormatError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _SCENE_DEFAULTS:
            raise SceneFormatError(f"{key}: unknown key (line {lineno})")
        if key in raw:
            raise SceneFormatError(f"{key}: duplicate key (line {lineno})")
        tokens = value.replace(",", " ").split()
        if not tokens:
            raise SceneFormatError(f"{key}: empty value (line {lineno})")
        raw[key] = [_parse_number(t, key) for t in tokens]
    return _build_scene(raw)


def _scalar(raw: dict, key: str) -> float:
    vals = raw.get(key) if raw.get(key) is not None else _SCENE_DEFAULTS[key]
    if vals is None:
        return None
    if len(vals) != 1:
        raise SceneFormatError(f"{key}: expected a single value, got {len(vals)}")
    return vals[0]


def _vector(raw: dict, key: str, length: int | None = None) -> list[float]:
    vals = list(raw.get(key, _SCENE_DEFAULTS[key]))
    if length is not None and len(vals) != length:
        raise SceneFormatError(f"{key}: expected {length} values, got {len(vals)}")
    return vals


def _build_scene(raw: dict) -> SceneConfig:
    wavelength = _scalar(raw, "wavelength_m")
    if wavelength is None or wavelength <= 0:
        raise SceneFormatError("wavelength_m: must be > 0")

    def count(key):
        v = _scalar(raw, key)
        if v is None or v != int(v) or int(v) < 1:
            raise SceneFormatError(f"{key}: must be a positive integer")
        return int(v)

    def spacing(key):
        v = _scalar(raw, key)
        if v is None:
            return 0.5 * wavelength
        if v <= 0:
            raise SceneFormatError(f"{key}: must be > 0")
        return v

    slots_f = _scalar(raw, "slots")
    if slots_f is None or slots_f != int(slots_f) or int(slots_f) < 1:
        raise SceneFormatError("slots: must be a positive integer")
    slots = int(slots_f)

    gamma0 = _vector(raw, "gamma0")
    gamma1 = _vector(raw, "gamma1")
    if len(gamma0) == 1 and slots > 1:
        gamma0 = gamma0 * slots
    if len(gamma1) == 1 and slots > 1:
        gamma1 = gamma1 * slots
    if len(gamma0) != slots or len(gamma1) != slots:
        raise SceneFormatError("gamma0/gamma1: length must equal slots")

    try:
        return SceneConfig(
            wavelength=wavelength,
            ce_array=build_ula(_vector(raw, "ce_center_m", 3), count("ce_elements"),
                               spacing("ce_spacing_m")),
            reader_array=build_ula(_vector(raw, "reader_center_m", 3), count("reader_elements"),
                                   spacing("reader_spacing_m")),
            bde_position=_vector(raw, "bde_position_m", 3),
            reflector_x_offsets=tuple(_vector(raw, "reflector_x_m")),
            g_smc=_scalar(raw, "g_smc"),
            p_max=_scalar(raw, "p_max"),
            slots=slots,
            gamma0=tuple(gamma0),
            gamma1=tuple(gamma1),
            alpha_db=_scalar(raw, "alpha_db"),
        )
    except ValueError as e:
        raise SceneFormatError(str(e)) from None


def scene_echo(scene: SceneConfig) -> dict:
    """Resolved scene parameters as a JSON-serializable mapping."""
    return {
        "wavelength_m": scene.wavelength,
        "ce_elements": scene.ce_array.size,
        "ce_positions_m": scene.ce_array.element_positions.tolist(),
        "reader_elements": scene.reader_array.size,
        "reader_positions_m": scene.reader_array.element_positions.tolist(),
        "bde_position_m": scene.bde_position.tolist(),
        "reflector_x_m": list(scene.reflector_x_offsets),
        "g_smc": scene.g_smc,
        "p_max": scene.p_max,
        "slots": scene.slots,
        "gamma0": list(scene.gamma0),
        "gamma1": list(scene.gamma1),
        "alpha_db": _num_token(scene.alpha_db),
    }


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one run byte for byte."""

    subcommand: str
    scene_file: str
    out_dir: str
    tool_version: str
    args: dict
    scene: dict
    rng: str = "Philox4x64 counter stream keyed by (seed, chunk); Box-Muller normals"

    def write(self, path: Path):
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def _num_token(v) -> str:
    """12-significant-digit decimal; infinities keep their sign token."""
    if v is None:
        return ""
    v = float(v)
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return f"{v:.12g}"


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_num_token(v) if not isinstance(v, str) else v for v in row) + "\n")


def design_beamformers(scene: SceneConfig, alphas, p_max: float | None = None) -> list[BeamformerOutput]:
    """MRT plus one design per requested alpha (dB; -inf selects the null design)."""
    channels = synth_channels(scene)
    budget = scene.p_max if p_max is None else p_max
    outputs = [mrt(channels.ce_to_tag, budget, channels=channels)]
    for a in alphas:
        a = float(a)
        if math.isinf(a) and a < 0:
            outputs.append(null_dli_beamformer(channels, budget))
        else:
            outputs.append(sdr_beamformer(channels, a, budget))
    return outputs


def _method_alpha(out: BeamformerOutput):
    return out.method, ("" if out.alpha_db is None else _num_token(out.alpha_db))


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("step must be > 0")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(max(n, 1))]


def run_pattern(scene: SceneConfig, alphas, out_dir, scene_file="<inline>",
                theta_min_deg: float = -90.0, theta_max_deg: float = 90.0,
                theta_step_deg: float = 0.25) -> Path:
    """Radiation pattern sweep; writes pattern.csv (theta_deg, method, alpha_db, et_db)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    thetas_deg = _grid(theta_min_deg, theta_max_deg, theta_step_deg)
    thetas = np.deg2rad(thetas_deg)
    rows = []
    for out in design_beamformers(scene, alphas):
        method, alpha = _method_alpha(out)
        et = radiation_pattern(out.x, scene.ce_array, scene.wavelength, thetas)
        with np.errstate(divide="ignore"):
            et_db = 10.0 * np.log10(et)
        rows.extend((t, method, alpha, v) for t, v in zip(thetas_deg, et_db))
    path = out_dir / "pattern.csv"
    write_csv(path, ["theta_deg", "method", "alpha_db", "et_db"], rows)
    RunManifest("pattern", str(scene_file), str(out_dir), __version__,
                {"alphas_db": [_num_token(a) for a in alphas],
                 "theta_min_deg": theta_min_deg, "theta_max_deg": theta_max_deg,
                 "theta_step_deg": theta_step_deg},
                scene_echo(scene)).write(out_dir / "pattern_manifest.json")
    return path


def run_pgmap(scene: SceneConfig, alphas, out_dir, scene_file="<inline>",
              x_range=(-2.0, 2.0), y_range=(0.0, 8.0), grid_step: float = 0.05) -> Path:
    """Path-gain map; writes pgmap.csv (x_m, y_m, method, alpha_db, pg_db).

    Grid points within a quarter wavelength of a CE element are singular
    for the free-space model and carry -inf.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    xs = _grid(x_range[0], x_range[1], grid_step)
    ys = _grid(y_range[0], y_range[1], grid_step)
    guard = scene.wavelength / 4.0
    elems = scene.ce_array.element_positions
    rows = []
    for out in design_beamformers(scene, alphas):
        method, alpha = _method_alpha(out)
        for yv in ys:
            for xv in xs:
                p = np.array([xv, yv, 0.0])
                if np.min(np.linalg.norm(elems - p, axis=1)) < guard:
                    pg = float("-inf")
                else:
                    pg = path_gain(scene, out.x, p)
                rows.append((xv, yv, method, alpha, pg))
    path = out_dir / "pgmap.csv"
    write_csv(path, ["x_m", "y_m", "method", "alpha_db", "pg_db"], rows)
    RunManifest("pgmap", str(scene_file), str(out_dir), __version__,
                {"alphas_db": [_num_token(a) for a in alphas],
                 "x_range_m": list(x_range), "y_range_m": list(y_range),
                 "grid_step_m": grid_step},
                scene_echo(scene)).write(out_dir / "pgmap_manifest.json")
    return path


def run_pe(scene: SceneConfig, alphas, snr_grid_db, trials: int, seed: int, out_dir,
           scene_file="<inline>", workers: int = 1) -> Path:
    """Error-probability sweep; writes pe.csv.

    Directions are designed once at unit power and rescaled per SNR point
    (noise variance stays 1; the power budget absorbs the sweep), so each
    row needs no fresh solve.  With ``trials`` = 0 only the closed form
    is evaluated and the Monte Carlo columns stay empty.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    channels = synth_channels(scene)
    scheme = GammaScheme(scene.gamma0, scene.gamma1)
    cascade_energy = float(np.linalg.norm(channels.cascade) ** 2)
    m, n = channels.n_ce, channels.n_reader
    rows = []
    for out in design_beamformers(scene, alphas, p_max=1.0):
        method, alpha = _method_alpha(out)
        for snr in snr_grid_db:
            snr_lin = 10.0 ** (float(snr) / 10.0)
            power = snr_lin * m * n / (scene.slots * cascade_energy)
            x = math.sqrt(power) * out.x
            pe_cf = closed_form_pe(scheme, channels.cascade, x)
            if trials > 0:
                pe_mc, ci = monte_carlo_pe(channels, x, scheme, trials, seed, workers=workers)
                rows.append((snr, method, alpha, pe_cf, pe_mc, trials, ci))
            else:
                rows.append((snr, method, alpha, pe_cf, "", 0, ""))
    path = out_dir / "pe.csv"
    write_csv(path, ["snr_db", "method", "alpha_db", "pe_closed_form",
                     "pe_monte_carlo", "trials", "ci95"], rows)
    RunManifest("pe", str(scene_file), str(out_dir), __version__,
                {"alphas_db": [_num_token(a) for a in alphas],
                 "snr_grid_db": [_num_token(s) for s in snr_grid_db],
                 "trials": trials, "seed": seed},
                scene_echo(scene)).write(out_dir / "pe_manifest.json")
    return path


def run_summary(scene: SceneConfig, alphas, out_dir, scene_file="<inline>") -> Path:
    """Figures of merit per design; writes summary.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for out in design_beamformers(scene, alphas):
        method, alpha = _method_alpha(out)
        pg_bde = path_gain(scene, out.x, scene.bde_position)
        obj_db = 10.0 * math.log10(out.objective) if out.objective > 0 else float("-inf")
        rows.append((method, alpha, out.achieved_eta_db, pg_bde, obj_db))
    path = out_dir / "summary.csv"
    write_csv(path, ["method", "alpha_db", "eta_db", "pg_bde_db", "objective_db"], rows)
    RunManifest("summary", str(scene_file), str(out_dir), __version__,
                {"alphas_db": [_num_token(a) for a in alphas]},
                scene_echo(scene)).write(out_dir / "summary_manifest.json")
    return path
