"""Transmit beamformer designs.

Three designs share one output type: maximum-ratio transmission toward
the tag (ignores the direct link), the semidefinite-relaxation design
that maximizes backscattered power subject to a dynamic-range cap on the
direct-link interference, and a null-space design for the complete-
cancellation limit where no direct-link power is tolerated at all.

The relaxation lifts the real-stacked transmit vector x' to X' = x'x'^T,
drops the rank constraint, solves the resulting SDP, and recovers x'
from the dominant eigenvector of the solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import complex_reassemble, real_embed_matrix, real_embed_vector, sym_eig_desc
from .scene import ChannelSet
from .sdp import SdpProblem, SdpSolution, solve_sdp

# Reported dynamic range snaps to -inf below this backscatter-relative floor.
ETA_UNDERFLOW_REL = 1e-15


@dataclass(frozen=True)
class BeamformerOutput:
    """A transmit vector with its achieved figures of merit.

    ``objective`` is the backscattered power ||cascade @ x||^2;
    ``achieved_eta_db`` the realized direct-to-backscatter power ratio in
    dB (-inf when the direct-link residual underflows); ``rank_ratio``
    the second-to-first eigenvalue ratio of the SDP solution (0 for the
    analytic designs).
    """

    x: np.ndarray
    method: str  # "MRT" | "SDR" | "NullSpace"
    objective: float | None = None
    achieved_eta_db: float | None = None
    rank_ratio: float = 0.0
    alpha_db: float | None = None
    # Honest realized direct-link ratio in dB, kept even when
    # achieved_eta_db snaps to -inf at the design's numerical floor.
    dli_residual_db: float | None = None

    def power(self) -> float:
        return float(np.vdot(self.x, self.x).real)


def _normalize_phase(x: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive."""
    idx = int(np.argmax(np.abs(x)))
    pivot = x[idx]
    if np.abs(pivot) == 0:
        return x
    return x * (np.conj(pivot) / np.abs(pivot))


def realized_eta_db(channels: ChannelSet, x: np.ndarray) -> float:
    """Dynamic range of the received signal in dB for transmit vector x.

    Ratio of direct-link to backscattered power; -inf when the direct
    residual is below ETA_UNDERFLOW_REL times the backscattered power.
    """
    bd = float(np.linalg.norm(channels.cascade @ x) ** 2)
    if bd <= 0:
        raise ValueError("zero backscattered power: eta is undefined")
    dl = float(np.linalg.norm(channels.direct @ x) ** 2)
    if dl < ETA_UNDERFLOW_REL * bd:
        return float("-inf")
    return 10.0 * np.log10(dl / bd)


def mrt(h_ce_to_tag: np.ndarray, p_max: float, channels: ChannelSet | None = None) -> BeamformerOutput:
    """Maximum-ratio transmission: x = sqrt(p_max) * conj(h) / ||h||.

    Point the full power budget at the tag.  When ``channels`` is given
    the realized objective and dynamic range are filled in.
    """
    h = np.asarray(h_ce_to_tag, dtype=complex).ravel()
    norm = np.linalg.norm(h)
    if norm == 0:
        raise ValueError("zero channel: MRT direction is undefined")
    x = np.sqrt(p_max) * np.conj(h) / norm
    objective = eta_db = None
    if channels is not None:
        objective = float(np.linalg.norm(channels.cascade @ x) ** 2)
        eta_db = realized_eta_db(channels, x)
    return BeamformerOutput(x=x, method="MRT", objective=objective, achieved_eta_db=eta_db)


def quadratic_forms(channels: ChannelSet) -> tuple[np.ndarray, np.ndarray]:
    """Real-domain quadratic forms (cascade, direct) of the two channels.

    Each is G^T G for the real block embedding G of the channel, so
    x'^T Q x' equals the corresponding received power.  The cascade form
    has rank exactly 2 (one complex dimension).
    """
    g_bd = real_embed_matrix(channels.cascade).block
    g_dl = real_embed_matrix(channels.direct).block
    return g_bd.T @ g_bd, g_dl.T @ g_dl


def build_sdr_problem(channels: ChannelSet, alpha_linear: float, p_max: float) -> SdpProblem:
    """Lifted relaxation of the power-maximization problem.

    maximize tr(Q_bd X) s.t. tr((Q_dl - alpha*Q_bd) X) <= 0,
    tr(X) <= p_max, X PSD, where Q_bd/Q_dl are the real-domain quadratic
    forms of the cascade and direct channels.
    """
    if not (np.isfinite(alpha_linear) and alpha_linear >= 0):
        raise ValueError("alpha_linear must be finite and >= 0")
    q_bd, q_dl = quadratic_forms(channels)
    dim = q_bd.shape[0]
    return SdpProblem(
        C=q_bd,
        constraints=(
            (q_dl - alpha_linear * q_bd, 0.0),
            (np.eye(dim), float(p_max)),
        ),
    )


def _dominant_direction(solution: SdpSolution, q_bd: np.ndarray) -> np.ndarray:
    """Unit dominant eigenvector; ties broken by backscatter power."""
    w, q = sym_eig_desc(solution.X)
    top = np.flatnonzero(w >= (1.0 - 1e-6) * w[0])
    if top.size == 1:
        return q[:, 0]
    # Near-degenerate leading eigenvalues: pick, inside the degenerate
    # eigenspace, the direction maximizing the objective quadratic form.
    basis = q[:, top]
    wp, qp = sym_eig_desc(basis.T @ q_bd @ basis)
    return basis @ qp[:, 0]


def sdr_beamformer(channels: ChannelSet, alpha_db: float, p_max: float,
                   gap_tol: float = 1e-9, max_iter: int = 200) -> BeamformerOutput:
    """Relaxation-based design for a finite dynamic-range cap ``alpha_db``.

    Solves the lifted problem, extracts the dominant eigenvector q1 of
    the solution, scales to the power budget, and reassembles the complex
    transmit vector.  Raises on solver failure; a rank ratio above 1e-3
    signals a loose relaxation and is surfaced as a warning.
    """
    if not np.isfinite(alpha_db):
        raise ValueError("alpha_db must be finite; use null_dli_beamformer for -inf")
    alpha_linear = 10.0 ** (alpha_db / 10.0)
    problem = build_sdr_problem(channels, alpha_linear, p_max)
    solution = solve_sdp(problem, gap_tol=gap_tol, max_iter=max_iter)
    if solution.status != "Optimal":
        raise RuntimeError(f"SDP solve failed with status {solution.status}")
    rank_ratio = solution.rank_ratio
    if rank_ratio > 1e-3:
        import warnings

        warnings.warn(f"relaxation not tight: rank ratio {rank_ratio:.2e}", RuntimeWarning)
    q_bd = problem.C
    x_prime = np.sqrt(p_max) * _dominant_direction(solution, q_bd)
    x = _normalize_phase(complex_reassemble(x_prime))
    return BeamformerOutput(
        x=x,
        method="SDR",
        objective=float(np.linalg.norm(channels.cascade @ x) ** 2),
        achieved_eta_db=realized_eta_db(channels, x),
        rank_ratio=rank_ratio,
        alpha_db=float(alpha_db),
    )


def null_dli_beamformer(channels: ChannelSet, p_max: float,
                        eps_rel: float = 1e-10) -> BeamformerOutput:
    """Complete-cancellation design: transmit in the direct link's null space.

    Restricts the real-stacked vector to the eigenvectors of the direct
    quadratic form with eigenvalues <= eps_rel times the largest, then
    maximizes backscattered power inside that subspace.

    A geometric direct channel has no exact null space, only a numerical
    one, so the design admits a residual of at most eps_rel * lambda_max
    per unit transmit power.  ``achieved_eta_db`` reports -inf whenever
    the realized residual stays inside that budget (cancellation complete
    by design); the honest realized ratio is always kept in
    ``dli_residual_db`` so the leakage stays auditable.
    """
    q_bd, q_dl = quadratic_forms(channels)
    w, q = sym_eig_desc(q_dl)
    if w[0] <= 0:
        null_basis = np.eye(q_dl.shape[0])  # zero direct link: whole space
    else:
        keep = w <= eps_rel * w[0]
        if not np.any(keep):
            raise ValueError(
                f"direct-link form has no eigenvalues below {eps_rel:g} of its "
                "largest; increase eps_rel to admit a residual subspace"
            )
        null_basis = q[:, keep]
    projected = null_basis.T @ q_bd @ null_basis
    wp, qp = sym_eig_desc(projected)
    x_prime = np.sqrt(p_max) * (null_basis @ qp[:, 0])
    x = _normalize_phase(complex_reassemble(x_prime))

    residual_db = realized_eta_db(channels, x)
    leak = float(np.linalg.norm(channels.direct @ x) ** 2)
    budget = eps_rel * w[0] * float(np.vdot(x, x).real) if w[0] > 0 else 0.0
    eta_db = float("-inf") if leak <= budget else residual_db
    return BeamformerOutput(
        x=x,
        method="NullSpace",
        objective=float(np.linalg.norm(channels.cascade @ x) ** 2),
        achieved_eta_db=eta_db,
        rank_ratio=0.0,
        alpha_db=float("-inf"),
        dli_residual_db=residual_db,
    )
