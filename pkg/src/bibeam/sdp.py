"""Self-contained solver for small dense trace-constrained SDPs.

Solves   maximize    tr(C X)
         subject to  tr(A_i X) <= b_i,   i = 1..k   (k small),
                     X  positive semidefinite,

by an infeasible-start primal-dual interior-point method with
Nesterov-Todd scaling and a Mehrotra-style adaptive centering parameter.
The dual is  minimize b^T y  s.t.  Z = sum_i y_i A_i - C >= 0, y >= 0;
weak duality gives tr(C X) <= b^T y for every feasible pair, so the
complementarity gap certifies optimality.

Interior-point iterates drift toward the analytic center of the optimal
face, which has maximal rank.  Because downstream consumers extract
rank-1 solutions, the solver finishes with a facial rank-reduction pass
that walks from the converged iterate to an extreme point of the optimal
face without changing the objective or violating any constraint.

Matrices are at most a few dozen rows, so every step uses dense
factorizations; robustness and accuracy are preferred over speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import sym_eig_desc


@dataclass(frozen=True)
class SdpProblem:
    """Standard-form instance: maximize tr(C X) s.t. tr(A_i X) <= b_i, X >= 0."""

    C: np.ndarray
    constraints: tuple[tuple[np.ndarray, float], ...]

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise ValueError("objective matrix must be square")
        _check_sym(C, "C")
        object.__setattr__(self, "C", C)
        cons = []
        for i, (A, b) in enumerate(self.constraints):
            A = np.asarray(A, dtype=float)
            if A.shape != C.shape:
                raise ValueError(f"constraint {i}: shape {A.shape} != objective shape {C.shape}")
            _check_sym(A, f"A_{i}")
            cons.append((A, float(b)))
        if not cons:
            raise ValueError("at least one constraint is required to bound the problem")
        object.__setattr__(self, "constraints", tuple(cons))

    @property
    def dim(self) -> int:
        return self.C.shape[0]


@dataclass
class SdpSolution:
    """Primal solution with optimality certificates.

    ``duality_gap`` is the relative complementarity gap of the final
    iterate; ``history`` records, per iteration of the normalized
    problem, (primal, dual, primal residual, dual residual).
    """

    X: np.ndarray
    primal_objective: float
    duality_gap: float
    iterations: int
    status: str  # "Optimal" | "MaxIter" | "Infeasible"
    y: np.ndarray = None
    history: list = field(default_factory=list)

    @property
    def eigenvalues(self) -> np.ndarray:
        return sym_eig_desc(self.X)[0]

    @property
    def rank_ratio(self) -> float:
        w = self.eigenvalues
        if w[0] <= 0:
            return 0.0
        return max(0.0, float(w[1] / w[0])) if w.size > 1 else 0.0


def _check_sym(A: np.ndarray, name: str, tol: float = 1e-10):
    scale = np.linalg.norm(A)
    if scale > 0 and np.linalg.norm(A - A.T) > tol * scale:
        raise ValueError(f"{name} must be symmetric within {tol:g} relative")


def _sym(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.T)


def _psd_sqrt_pair(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(S^{1/2}, S^{-1/2}) for symmetric positive definite S."""
    w, q = np.linalg.eigh(_sym(S))
    w = np.maximum(w, 1e-300)
    rt = np.sqrt(w)
    return (q * rt) @ q.T, (q / rt) @ q.T


def _nt_scaling(X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Nesterov-Todd scaling point W with W Z W = X."""
    z_half, z_ihalf = _psd_sqrt_pair(Z)
    inner, _ = _psd_sqrt_pair(z_half @ X @ z_half)
    return _sym(z_ihalf @ inner @ z_ihalf)


def _max_cone_step(M: np.ndarray, dM: np.ndarray) -> float:
    """Largest t with M + t*dM still PSD (M assumed PD)."""
    L = np.linalg.cholesky(_sym(M))
    Li = np.linalg.inv(L)
    lam_min = np.linalg.eigvalsh(_sym(Li @ dM @ Li.T))[0]
    if lam_min >= 0:
        return np.inf
    return -1.0 / lam_min


def _max_pos_step(v: np.ndarray, dv: np.ndarray) -> float:
    neg = dv < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-v[neg] / dv[neg]))


def solve_sdp(problem: SdpProblem, gap_tol: float = 1e-9, max_iter: int = 200) -> SdpSolution:
    """Solve a small dense inequality-form SDP to high accuracy.

    Returns status "Optimal" once the relative complementarity gap falls
    below ``gap_tol`` and the normalized primal/dual residuals fall below
    min(1e-9, sqrt(gap_tol)); "Infeasible" when a Farkas-type certificate
    (y >= 0, sum y_i A_i ~ PSD, b^T y < 0) emerges; "MaxIter" otherwise.
    """
    if gap_tol <= 0:
        raise ValueError("gap_tol must be > 0")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    n = problem.dim
    k = len(problem.constraints)

    # Row normalization: keeps the iteration well scaled when channel
    # energies are tiny (objectives around 1e-8 occur in practice).
    c_scale = max(np.linalg.norm(problem.C), 1e-300)
    C = problem.C / c_scale
    A = []
    b = np.empty(k)
    a_scale = np.empty(k)
    for i, (Ai, bi) in enumerate(problem.constraints):
        s = max(np.linalg.norm(Ai), abs(bi), 1e-300)
        a_scale[i] = s
        A.append(Ai / s)
        b[i] = bi / s

    feas_tol = min(1e-9, np.sqrt(gap_tol))

    # Infeasible start: identity-scaled primal, positive slacks, centered dual.
    tau = max(1.0, float(np.max(np.abs(b))))
    X = (tau / n) * np.eye(n)
    s = np.maximum(b - np.array([np.tensordot(Ai, X) for Ai in A]), tau)
    y = np.full(k, tau)
    Z = _sym(sum(yi * Ai for yi, Ai in zip(y, A)) - C)
    lam_min = np.linalg.eigvalsh(Z)[0]
    if lam_min < tau:
        Z = Z + (tau - lam_min) * np.eye(n)

    history = []
    status = "MaxIter"
    iterations = max_iter

    for it in range(max_iter):
        ax = np.array([np.tensordot(Ai, X) for Ai in A])
        r_p = b - ax - s
        r_d = _sym(sum(yi * Ai for yi, Ai in zip(y, A)) - C - Z)
        mu = (np.tensordot(X, Z) + y @ s) / (n + k)

        primal = np.tensordot(C, X)
        dual = b @ y

        obj_scale = max(1.0, 0.5 * (abs(primal) + abs(dual)))
        rel_gap = (np.tensordot(X, Z) + y @ s) / obj_scale
        rel_rp = np.linalg.norm(r_p, np.inf) / (1.0 + np.linalg.norm(b, np.inf))
        rel_rd = np.linalg.norm(r_d) / (1.0 + np.linalg.norm(C))
        history.append((float(primal), float(dual), float(rel_rp), float(rel_rd)))

        if rel_gap <= gap_tol and rel_rp <= feas_tol and rel_rd <= feas_tol:
            status = "Optimal"
            iterations = it
            break

        # Farkas-type certificate of primal infeasibility.
        ynorm = np.linalg.norm(y)
        if ynorm > 1e8 * tau:
            yn = y / ynorm
            lam = np.linalg.eigvalsh(_sym(sum(v * Ai for v, Ai in zip(yn, A))))[0]
            if b @ yn < -1e-8 and lam > -1e-8:
                status = "Infeasible"
                iterations = it
                break

        W = _nt_scaling(X, Z)

        # Schur complement over the k multipliers.
        WAW = [_sym(W @ Ai @ W) for Ai in A]
        M = np.empty((k, k))
        for i in range(k):
            for j in range(i, k):
                M[i, j] = M[j, i] = np.tensordot(A[i], WAW[j])

        Zinv = _sym(np.linalg.inv(Z))

        def directions(sigma_mu: float, corr: np.ndarray):
            rc_sdp = sigma_mu * Zinv - X
            rhs = np.empty(k)
            base = _sym(W @ r_d @ W)
            for i in range(k):
                rhs[i] = (np.tensordot(A[i], rc_sdp - base)
                          + (sigma_mu - y[i] * s[i] - corr[i]) / y[i]
                          - r_p[i])
            Msys = M + np.diag(s / y)
            try:
                dy = np.linalg.solve(Msys, rhs)
            except np.linalg.LinAlgError:
                dy = np.linalg.lstsq(Msys, rhs, rcond=None)[0]
            ds = (sigma_mu - y * s - corr) / y - (s / y) * dy
            dZ = _sym(sum(v * Ai for v, Ai in zip(dy, A)) + r_d)
            dX = _sym(rc_sdp - W @ dZ @ W)
            return dX, ds, dy, dZ

        # Predictor (affine) pass.  The step fraction stays conservative
        # until late so iterates do not hug the cone boundary, which would
        # degrade the scaling point on degenerate problems.
        try:
            dX_a, ds_a, dy_a, dZ_a = directions(0.0, np.zeros(k))
            gamma = 0.9 if rel_gap > 1e-4 else 0.98
            ap = min(1.0, gamma * min(_max_cone_step(X, dX_a), _max_pos_step(s, ds_a)))
            ad = min(1.0, gamma * min(_max_cone_step(Z, dZ_a), _max_pos_step(y, dy_a)))
            mu_aff = (np.tensordot(X + ap * dX_a, Z + ad * dZ_a)
                      + (y + ad * dy_a) @ (s + ap * ds_a)) / (n + k)
            ratio = max(mu_aff, 0.0) / mu
            sigma = min(0.999, max(ratio ** 3, 1e-6))
            if ratio > 0.9:
                sigma = max(sigma, 0.8)  # weak affine step: recenter first

            # Corrector pass with Mehrotra cross terms on the linear block.
            corr = dy_a * ds_a
            dX, ds, dy, dZ = directions(sigma * mu, corr)

            ap = min(1.0, gamma * min(_max_cone_step(X, dX), _max_pos_step(s, ds)))
            ad = min(1.0, gamma * min(_max_cone_step(Z, dZ), _max_pos_step(y, dy)))
        except np.linalg.LinAlgError:
            iterations = it
            break  # scaling collapsed at the numerical floor: keep best iterate

        X = _sym(X + ap * dX)
        s = s + ap * ds
        y = y + ad * dy
        Z = _sym(Z + ad * dZ)

    X_out = _reduce_to_extreme_point(X, C, A, b)
    X_out = _polish_rank_one(X_out, C, A, b, y)

    primal_out = float(np.tensordot(C, X_out)) * c_scale
    gap_out = float(rel_gap) if status != "Infeasible" else float("nan")
    return SdpSolution(
        X=X_out,
        primal_objective=primal_out,
        duality_gap=gap_out,
        iterations=iterations,
        status=status,
        y=y * c_scale / a_scale,
        history=history,
    )


def _polish_rank_one(X: np.ndarray, C: np.ndarray, A: list, b: np.ndarray,
                     y: np.ndarray, max_newton: int = 30) -> np.ndarray:
    """Newton-refine a rank-1 solution on its active-set KKT system.

    Interior-point iterates carry the duality-gap tolerance into X; for a
    rank-1 optimum X = u u^T the KKT conditions
        (C - sum_i lam_i A_i) u = 0,   u^T A_i u = b_i  (active i)
    pin u to machine precision, making solutions reproducible across
    equivalent problem scalings.  The polish is discarded unless it keeps
    feasibility and does not lower the objective.
    """
    w, q = sym_eig_desc(X)
    if w[0] <= 0 or (w.size > 1 and w[1] > 1e-8 * w[0]):
        return X
    u = np.sqrt(w[0]) * q[:, 0]
    ax = np.array([np.tensordot(Ai, X) for Ai in A])
    slack = b - ax
    active = np.flatnonzero(slack <= 1e-7 * np.maximum(1.0, np.abs(b)))
    if active.size == 0:
        return X
    act = [A[i] for i in active]
    lam = np.array([max(y[i], 0.0) for i in active])

    def residual(u_, lam_):
        zl = C - sum(l * Ai for l, Ai in zip(lam_, act))
        f1 = zl @ u_
        f2 = np.array([u_ @ Ai @ u_ - b[i] for Ai, i in zip(act, active)])
        return zl, np.concatenate([f1, f2])

    zl, f = residual(u, lam)
    scale = max(1.0, np.linalg.norm(u))
    for _ in range(max_newton):
        if np.linalg.norm(f) <= 1e-14 * scale:
            break
        au = np.column_stack([Ai @ u for Ai in act])
        jac = np.block([[zl, -au], [2.0 * au.T, np.zeros((active.size, active.size))]])
        try:
            step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        except np.linalg.LinAlgError:
            return X
        u_new = u + step[: u.size]
        lam_new = lam + step[u.size:]
        zl_new, f_new = residual(u_new, lam_new)
        if not np.all(np.isfinite(f_new)) or np.linalg.norm(f_new) > 0.9 * np.linalg.norm(f):
            break
        u, lam, zl, f = u_new, lam_new, zl_new, f_new

    X_new = np.outer(u, u)
    ax_new = np.array([np.tensordot(Ai, X_new) for Ai in A])
    feas = np.all(b - ax_new >= -1e-8 * np.maximum(1.0, np.abs(b)))
    improved = np.tensordot(C, X_new) >= np.tensordot(C, X) - 1e-9 * max(1.0, abs(np.tensordot(C, X)))
    return X_new if (feas and improved) else X


def _reduce_to_extreme_point(X: np.ndarray, C: np.ndarray, A: list, b: np.ndarray,
                             rank_tol: float = 1e-9, null_tol: float = 1e-7) -> np.ndarray:
    """Walk the optimal face to an extreme (minimum-rank) point.

    Restricted to range(X), searches for a direction S with
    <W^T C W, S> = 0 and <W^T A_i W, S> = 0 for every active constraint,
    then steps until an eigenvalue of the restricted solution hits zero.
    Inactive constraints cap the step so feasibility is preserved exactly.
    """
    for _ in range(X.shape[0]):
        w, q = sym_eig_desc(X)
        if w[0] <= 0:
            return X
        r = int(np.sum(w > rank_tol * w[0]))
        if r <= 1:
            break
        V = q[:, :r] * np.sqrt(w[:r])  # X = V V^T

        ax = np.array([np.tensordot(Ai, X) for Ai in A])
        slack = b - ax
        act_tol = 1e-7 * np.maximum(1.0, np.abs(b))
        active = slack <= act_tol

        rows = [V.T @ C @ V]
        rows += [V.T @ Ai @ V for Ai, on in zip(A, active) if on]
        B = np.stack([_sym(R).ravel() for R in rows])
        norms = np.linalg.norm(B, axis=1)
        keep = norms > 1e-14
        B = B[keep] / norms[keep, None]

        # Null direction of the stacked conditions within symmetric r x r space:
        # smallest right singular vector; an exact null space exists whenever
        # there are fewer independent conditions than r*(r+1)/2 dimensions.
        if B.shape[0] == 0:
            S = np.eye(r)
            S[0, 0] -= r  # any traceless direction works with no conditions
        else:
            # Smallest right singular vector; rows of vt beyond rank(B) span
            # the exact null space when there are fewer conditions than dims.
            _, _, vt = np.linalg.svd(B, full_matrices=True)
            S = _sym(vt[-1].reshape(r, r))
            if np.linalg.norm(B @ S.ravel()) > null_tol * np.linalg.norm(S):
                break  # conditions leave no usable direction: extreme point
        nrm = np.linalg.norm(S)
        if nrm < 1e-12:
            break
        S /= nrm

        lam = np.linalg.eigvalsh(S)
        if lam[0] > -1e-12:  # make sure a negative eigendirection exists
            S = -S
            lam = -lam[::-1]
        if lam[0] > -1e-12:
            break
        t_max = -1.0 / lam[0]  # I + t S loses rank here

        # Inactive constraints may move along the face; cap the step.
        for Ai, on, sl in zip(A, active, slack):
            if on:
                continue
            drift = np.tensordot(Ai, _sym(V @ S @ V.T))
            if drift > 1e-16:
                t_max = min(t_max, sl / drift)

        X_new = _sym(V @ (np.eye(r) + t_max * S) @ V.T)
        wn, qn = sym_eig_desc(X_new)
        X_new = (qn * np.maximum(wn, 0.0)) @ qn.T
        if np.tensordot(C, X_new) < np.tensordot(C, X) - 1e-8 * max(1.0, abs(np.tensordot(C, X))):
            break  # numerical drift: keep the converged iterate
        X = _sym(X_new)
    return X
