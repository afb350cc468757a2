"""Dense primal-dual interior-point solver for block-diagonal SDPs.

Problem form:

    minimize    sum_j <C_j, X_j> + c_free . u
    subject to  sum_j <A_ij, X_j> + B_i . u = b_i     (i = 1..m)
                X_j >= 0 (PSD blocks), u free

Algorithm: infeasible-start path following with Nesterov-Todd scaling and a
Mehrotra predictor-corrector, dense Cholesky on the Schur complement. Free
variables are eliminated inside the Schur solve rather than split into
differences of PSD scalars. Constraint rows are normalized to unit
Frobenius norm internally; solutions are reported in original units.

Feasibility problems are handled by `solve_feasibility`, which minimizes an
artificial slack tau added as tau*I to every block; the thresholds that
classify the outcome are surfaced in the result.

Everything is deterministic: fixed initial point, no randomized pivoting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg as sla


class SdpStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    NUMERICAL_TROUBLE = "NumericalTrouble"


class FeasStatus(Enum):
    FEASIBLE = "Feasible"
    MARGINAL = "Marginal"
    INFEASIBLE = "Infeasible"


SYMMETRY_TOL = 1e-12


def _sym(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


class SdpProblem:
    """Block SDP with equality constraints and free scalar variables.

    `constraints` is a list (one entry per row) of dicts mapping block index
    to a symmetric matrix; `free_rows` is the (m, n_free) coefficient matrix
    of the free variables.
    """

    def __init__(
        self,
        block_sizes: list[int],
        constraints: list[dict[int, np.ndarray]],
        b,
        C: list[np.ndarray] | None = None,
        free_rows: np.ndarray | None = None,
        free_obj: np.ndarray | None = None,
    ):
        self.block_sizes = [int(s) for s in block_sizes]
        self.nblocks = len(self.block_sizes)
        self.m = len(constraints)
        if self.m < 1:
            raise ValueError("need at least one constraint")
        self.b = np.asarray(b, dtype=float).copy()
        if self.b.shape != (self.m,):
            raise ValueError("b has wrong length")

        if C is None:
            C = [np.zeros((s, s)) for s in self.block_sizes]
        self.C = []
        for j, mat in enumerate(C):
            mat = np.asarray(mat, dtype=float)
            if mat.shape != (self.block_sizes[j], self.block_sizes[j]):
                raise ValueError(f"objective block {j} has wrong shape")
            if np.max(np.abs(mat - mat.T), initial=0.0) > SYMMETRY_TOL * (
                1.0 + np.max(np.abs(mat), initial=0.0)
            ):
                raise ValueError(f"objective block {j} is not symmetric")
            self.C.append(_sym(mat))

        self.n_free = 0 if free_rows is None else int(np.shape(free_rows)[1])
        if free_rows is None:
            free_rows = np.zeros((self.m, 0))
        self.free_rows = np.asarray(free_rows, dtype=float).copy()
        if self.free_rows.shape != (self.m, self.n_free):
            raise ValueError("free_rows has wrong shape")
        if free_obj is None:
            free_obj = np.zeros(self.n_free)
        self.free_obj = np.asarray(free_obj, dtype=float).copy()

        # pack per-block stacked tensors for fast adjoints and Schur assembly
        self.block_rows: list[np.ndarray] = []
        self.block_mats: list[np.ndarray] = []
        per_block: list[list[tuple[int, np.ndarray]]] = [[] for _ in range(self.nblocks)]
        nonzero = np.zeros(self.m, dtype=bool)
        for i, row in enumerate(constraints):
            for j, mat in row.items():
                mat = np.asarray(mat, dtype=float)
                s = self.block_sizes[j]
                if mat.shape != (s, s):
                    raise ValueError(f"constraint {i} block {j} has wrong shape")
                if np.max(np.abs(mat - mat.T), initial=0.0) > SYMMETRY_TOL * (
                    1.0 + np.max(np.abs(mat), initial=0.0)
                ):
                    raise ValueError(f"constraint {i} block {j} is not symmetric")
                if np.any(mat):
                    per_block[j].append((i, _sym(mat)))
                    nonzero[i] = True
        nonzero |= np.any(self.free_rows, axis=1)
        if not np.all(nonzero):
            bad = int(np.nonzero(~nonzero)[0][0])
            raise ValueError(f"constraint {bad} has no nonzero coefficients")
        for j in range(self.nblocks):
            rows = np.array([i for i, _ in per_block[j]], dtype=np.int64)
            mats = (
                np.stack([mat for _, mat in per_block[j]])
                if per_block[j]
                else np.zeros((0, self.block_sizes[j], self.block_sizes[j]))
            )
            self.block_rows.append(rows)
            self.block_mats.append(mats)

    # -- linear maps ------------------------------------------------------

    def apply_A(self, X: list[np.ndarray]) -> np.ndarray:
        out = np.zeros(self.m)
        for j in range(self.nblocks):
            if self.block_rows[j].size:
                out[self.block_rows[j]] += np.einsum(
                    "ikl,kl->i", self.block_mats[j], X[j]
                )
        return out

    def apply_AT(self, y: np.ndarray) -> list[np.ndarray]:
        out = []
        for j in range(self.nblocks):
            if self.block_rows[j].size:
                out.append(
                    np.einsum("i,ikl->kl", y[self.block_rows[j]], self.block_mats[j])
                )
            else:
                out.append(np.zeros((self.block_sizes[j], self.block_sizes[j])))
        return out

    def data_norm(self) -> float:
        norms = [np.linalg.norm(mats.reshape(len(mats), -1), axis=1).max(initial=0.0)
                 for mats in self.block_mats]
        return max(norms, default=0.0)

    def scaled_copy(self) -> tuple["SdpProblem", np.ndarray]:
        """Row-normalized copy plus the per-row scale factors."""
        scales = np.zeros(self.m)
        for j in range(self.nblocks):
            if self.block_rows[j].size:
                ns = np.linalg.norm(
                    self.block_mats[j].reshape(len(self.block_mats[j]), -1), axis=1
                )
                np.add.at(scales, self.block_rows[j], ns ** 2)
        scales += np.linalg.norm(self.free_rows, axis=1) ** 2
        scales = np.sqrt(scales)
        scales[scales == 0.0] = 1.0

        rows: list[dict[int, np.ndarray]] = [dict() for _ in range(self.m)]
        for j in range(self.nblocks):
            for pos, i in enumerate(self.block_rows[j]):
                rows[i][j] = self.block_mats[j][pos] / scales[i]
        prob = SdpProblem(
            self.block_sizes,
            rows,
            self.b / scales,
            C=self.C,
            free_rows=self.free_rows / scales[:, None],
            free_obj=self.free_obj,
        )
        return prob, scales


@dataclass
class KktReport:
    primal_residual: float
    dual_residual: float
    free_dual_residual: float
    duality_gap: float
    complementarity: float
    min_eig_X: float
    min_eig_S: float

    def max_residual(self) -> float:
        return max(self.primal_residual, self.dual_residual, self.free_dual_residual)


@dataclass
class SdpSolution:
    status: SdpStatus
    X: list[np.ndarray]
    y: np.ndarray
    S: list[np.ndarray]
    u: np.ndarray
    objective_primal: float
    objective_dual: float
    iterations: int
    residuals: KktReport | None = None
    infeasibility_ray: np.ndarray | None = None
    history: list[dict] = field(default_factory=list)
    message: str = ""


@dataclass
class SolveOptions:
    max_iter: int = 200
    tol: float = 1e-8
    step_fraction: float = 0.99
    init_scale: float = 0.0       # 0 means automatic
    record_history: bool = False
    ray_tol: float = 1e-8
    ray_gain: float = 1e-2        # required b.y per unit ray norm


def _nt_scaling(X: np.ndarray, S: np.ndarray):
    """Return (R, R_inv, lam) with R^-1 X R^-T = R^T S R = diag(lam)."""
    Lx = np.linalg.cholesky(X)
    Ls = np.linalg.cholesky(S)
    U, sv, Vt = np.linalg.svd(Ls.T @ Lx)
    sv = np.maximum(sv, 1e-300)
    R = Lx @ Vt.T * (sv ** -0.5)
    R_inv = (sv[:, None] ** 0.5) * (np.linalg.solve(Lx.T, Vt.T).T)
    return R, R_inv, sv


def _max_step(M: np.ndarray, dM: np.ndarray, chol: np.ndarray) -> float:
    """Largest alpha with M + alpha*dM >= 0 given chol(M) lower."""
    Y = sla.solve_triangular(chol, dM, lower=True)
    Y = sla.solve_triangular(chol, Y.T, lower=True)
    w = np.linalg.eigvalsh(_sym(Y))
    lam_min = w[0]
    if lam_min >= -1e-16:
        return math.inf
    return -1.0 / lam_min


def solve(prob: SdpProblem, opts: SolveOptions | None = None) -> SdpSolution:
    """Run the interior-point method; see the module docstring."""
    opts = opts or SolveOptions()
    scaled, row_scales = prob.scaled_copy()
    sol = _solve_scaled(scaled, opts)
    # report in original units
    sol.y = sol.y / row_scales
    if sol.infeasibility_ray is not None:
        sol.infeasibility_ray = sol.infeasibility_ray / row_scales
    sol.residuals = check_kkt(prob, sol)
    if sol.status is SdpStatus.OPTIMAL:
        tol_p = 1e-7 * (1.0 + np.linalg.norm(prob.b))
        tol_g = 1e-7 * (1.0 + abs(sol.objective_primal))
        if sol.residuals.primal_residual > tol_p or abs(
            sol.objective_primal - sol.objective_dual
        ) > max(tol_g, 10 * opts.tol * (1 + abs(sol.objective_primal))):
            sol.status = SdpStatus.NUMERICAL_TROUBLE
            sol.message = "converged point misses the optimality contract"
    return sol


def _solve_scaled(prob: SdpProblem, opts: SolveOptions) -> SdpSolution:
    m, nf = prob.m, prob.n_free
    sizes = prob.block_sizes
    n_total = sum(sizes)

    norm_b = np.linalg.norm(prob.b)
    norm_C = max((np.linalg.norm(c) for c in prob.C), default=0.0)
    zeta = opts.init_scale
    if zeta <= 0.0:
        zeta = max(10.0, math.sqrt(norm_b), math.sqrt(norm_C))

    X = [zeta * np.eye(s) for s in sizes]
    S = [zeta * np.eye(s) for s in sizes]
    y = np.zeros(m)
    u = np.zeros(nf)
    B = prob.free_rows
    history: list[dict] = []
    message = ""
    status = SdpStatus.NUMERICAL_TROUBLE

    def primal_obj():
        return sum(np.tensordot(prob.C[j], X[j]) for j in range(prob.nblocks)) + float(
            prob.free_obj @ u
        )

    def dual_obj():
        return float(prob.b @ y)

    it = 0
    for it in range(1, opts.max_iter + 1):
        rp = prob.b - prob.apply_A(X) - B @ u
        ATy = prob.apply_AT(y)
        Rd = [prob.C[j] - S[j] - ATy[j] for j in range(prob.nblocks)]
        ru = prob.free_obj - B.T @ y
        mu = sum(np.tensordot(X[j], S[j]) for j in range(prob.nblocks)) / n_total

        pobj, dobj = primal_obj(), dual_obj()
        rel_p = np.linalg.norm(rp) / (1.0 + norm_b)
        rel_d = max(
            (np.linalg.norm(Rd[j]) for j in range(prob.nblocks)), default=0.0
        ) / (1.0 + norm_C)
        rel_u = np.linalg.norm(ru) / (1.0 + np.linalg.norm(prob.free_obj))
        rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))

        if opts.record_history:
            history.append(
                dict(
                    iteration=it,
                    primal_obj=pobj,
                    dual_obj=dobj,
                    mu=mu,
                    rel_p=rel_p,
                    rel_d=rel_d,
                    rel_gap=rel_gap,
                )
            )

        if max(rel_p, rel_d, rel_u) <= opts.tol and rel_gap <= opts.tol:
            status = SdpStatus.OPTIMAL
            break

        # Farkas-ray test for primal infeasibility
        bty = prob.b @ y
        if bty > opts.ray_gain * (1.0 + np.linalg.norm(y)):
            yn = y / bty
            viol = max(
                (
                    np.linalg.eigvalsh(prob.apply_AT(yn)[j])[-1]
                    for j in range(prob.nblocks)
                    if sizes[j] > 0
                ),
                default=0.0,
            )
            free_viol = (
                np.linalg.norm(B.T @ yn, ord=np.inf) if nf else 0.0
            )
            ray_scale = max(1.0, np.linalg.norm(yn))
            if viol <= opts.ray_tol * ray_scale and free_viol <= opts.ray_tol * ray_scale:
                return SdpSolution(
                    SdpStatus.INFEASIBLE, X, y, S, u, pobj, dobj, it,
                    infeasibility_ray=yn, history=history,
                    message="dual improving ray found",
                )

        if pobj < -1e12 * (1.0 + norm_b + norm_C) and rel_d <= 1e-6:
            return SdpSolution(
                SdpStatus.UNBOUNDED, X, y, S, u, pobj, dobj, it,
                history=history, message="primal objective diverging",
            )

        # NT scalings
        try:
            scalings = [_nt_scaling(X[j], S[j]) for j in range(prob.nblocks)]
            chol_X = [np.linalg.cholesky(X[j]) for j in range(prob.nblocks)]
            chol_S = [np.linalg.cholesky(S[j]) for j in range(prob.nblocks)]
        except np.linalg.LinAlgError:
            message = "lost positive definiteness"
            break
        W = [R @ R.T for R, _, _ in scalings]

        # Schur complement H = A (W . W) A^T, assembled per block
        H = np.zeros((m, m))
        for j in range(prob.nblocks):
            rows = prob.block_rows[j]
            if not rows.size:
                continue
            A = prob.block_mats[j]
            T = np.einsum("ab,ibc,cd->iad", W[j], A, W[j], optimize=True)
            H[np.ix_(rows, rows)] += A.reshape(len(rows), -1) @ T.reshape(
                len(rows), -1
            ).T

        try:
            Hc = sla.cho_factor(H, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            H[np.diag_indices_from(H)] += 1e-12 * (1.0 + np.abs(np.diag(H)).max())
            try:
                Hc = sla.cho_factor(H, lower=True, check_finite=False)
            except np.linalg.LinAlgError:
                message = "Schur complement not positive definite"
                break

        ZB = sla.cho_solve(Hc, B, check_finite=False) if nf else np.zeros((m, 0))
        Su = B.T @ ZB if nf else None
        Su_c = None
        if nf:
            try:
                Su_c = sla.cho_factor(Su, lower=True, check_finite=False)
            except np.linalg.LinAlgError:
                message = "free-variable reduction is singular"
                break

        def solve_saddle(hvec, rufree):
            zh = sla.cho_solve(Hc, hvec, check_finite=False)
            if nf:
                du = sla.cho_solve(Su_c, B.T @ zh - rufree, check_finite=False)
                dy = zh - ZB @ du
            else:
                du = np.zeros(0)
                dy = zh
            return dy, du

        def directions(Rc):
            h = rp.copy()
            WRW = [W[j] @ (Rd[j]) @ W[j] - Rc[j] for j in range(prob.nblocks)]
            h += prob.apply_A(WRW)
            dy, du = solve_saddle(h, ru)
            ATdy = prob.apply_AT(dy)
            dS = [Rd[j] - ATdy[j] for j in range(prob.nblocks)]
            dX = [
                _sym(Rc[j] - W[j] @ dS[j] @ W[j]) for j in range(prob.nblocks)
            ]
            return dX, dy, dS, du

        # predictor (affine scaling)
        Rc_aff = [-X[j] for j in range(prob.nblocks)]
        dX_a, dy_a, dS_a, du_a = directions(Rc_aff)
        ap = min(
            (_max_step(X[j], dX_a[j], chol_X[j]) for j in range(prob.nblocks)),
            default=math.inf,
        )
        ad = min(
            (_max_step(S[j], dS_a[j], chol_S[j]) for j in range(prob.nblocks)),
            default=math.inf,
        )
        ap = min(1.0, opts.step_fraction * ap)
        ad = min(1.0, opts.step_fraction * ad)
        mu_aff = sum(
            np.tensordot(X[j] + ap * dX_a[j], S[j] + ad * dS_a[j])
            for j in range(prob.nblocks)
        ) / n_total
        sigma = min(1.0, max((max(mu_aff, 0.0) / mu) ** 3, 1e-10))

        # corrector
        Rc = []
        for j in range(prob.nblocks):
            R, R_inv, lam = scalings[j]
            dXh = R_inv @ dX_a[j] @ R_inv.T
            dSh = R.T @ dS_a[j] @ R
            Mc = 0.5 * (dXh @ dSh + dSh @ dXh)
            rhs = -Mc
            rhs[np.diag_indices_from(rhs)] += sigma * mu - lam ** 2
            G = 2.0 * rhs / np.add.outer(lam, lam)
            Rc.append(R @ _sym(G) @ R.T)

        dX, dy, dS, du = directions(Rc)
        ap = min(
            (_max_step(X[j], dX[j], chol_X[j]) for j in range(prob.nblocks)),
            default=math.inf,
        )
        ad = min(
            (_max_step(S[j], dS[j], chol_S[j]) for j in range(prob.nblocks)),
            default=math.inf,
        )
        ap = min(1.0, opts.step_fraction * ap)
        ad = min(1.0, opts.step_fraction * ad)
        if ap < 1e-10 and ad < 1e-10:
            message = "step sizes collapsed"
            break

        for j in range(prob.nblocks):
            X[j] = _sym(X[j] + ap * dX[j])
            S[j] = _sym(S[j] + ad * dS[j])
        y = y + ad * dy
        u = u + ap * du
    else:
        message = "iteration limit reached"

    pobj, dobj = primal_obj(), dual_obj()
    return SdpSolution(
        status, X, y, S, u, pobj, dobj, it, history=history, message=message
    )


def check_kkt(prob: SdpProblem, sol: SdpSolution) -> KktReport:
    """Recompute all optimality residuals from scratch."""
    Bu = prob.free_rows @ sol.u if prob.n_free else 0.0
    rp = prob.b - prob.apply_A(sol.X) - Bu
    ATy = prob.apply_AT(sol.y)
    rd = max(
        (
            np.linalg.norm(prob.C[j] - sol.S[j] - ATy[j])
            for j in range(prob.nblocks)
        ),
        default=0.0,
    )
    ru = (
        np.linalg.norm(prob.free_obj - prob.free_rows.T @ sol.y)
        if prob.n_free
        else 0.0
    )
    comp = sum(np.tensordot(sol.X[j], sol.S[j]) for j in range(prob.nblocks))
    min_x = min(
        (np.linalg.eigvalsh(sol.X[j])[0] for j in range(prob.nblocks)),
        default=0.0,
    )
    min_s = min(
        (np.linalg.eigvalsh(sol.S[j])[0] for j in range(prob.nblocks)),
        default=0.0,
    )
    pobj = sum(np.tensordot(prob.C[j], sol.X[j]) for j in range(prob.nblocks)) + float(
        prob.free_obj @ sol.u
    )
    dobj = float(prob.b @ sol.y)
    return KktReport(
        primal_residual=float(np.linalg.norm(rp)),
        dual_residual=float(rd),
        free_dual_residual=float(ru),
        duality_gap=float(pobj - dobj),
        complementarity=float(comp),
        min_eig_X=float(min_x),
        min_eig_S=float(min_s),
    )


@dataclass
class FeasibilityResult:
    status: FeasStatus
    tau_star: float
    solution: SdpSolution
    gram_blocks: list[np.ndarray]
    ray: np.ndarray | None
    feasible_tol: float
    infeasible_tol: float


def solve_feasibility(
    prob: SdpProblem,
    opts: SolveOptions | None = None,
    feasible_tol: float = 1e-7,
    infeasible_tol: float = 1e-5,
) -> FeasibilityResult:
    """Decide feasibility of {A(X) + B u = b, X >= 0} via a slack program.

    Solves min tau s.t. (X_j + tau*I) >= 0 by substituting Y_j = X_j + tau*I
    with tau >= 0 kept as an extra 1x1 block. tau* <= feasible_tol counts as
    feasible, tau* >= infeasible_tol as infeasible (the dual vector is then a
    Farkas ray for the original problem), and the dead band in between is
    Marginal.
    """
    sizes = list(prob.block_sizes) + [1]
    tau_idx = len(prob.block_sizes)
    rows: list[dict[int, np.ndarray]] = [dict() for _ in range(prob.m)]
    for j in range(prob.nblocks):
        for pos, i in enumerate(prob.block_rows[j]):
            rows[i][j] = prob.block_mats[j][pos]
    traces = np.zeros(prob.m)
    for j in range(prob.nblocks):
        if prob.block_rows[j].size:
            tr = np.trace(prob.block_mats[j], axis1=1, axis2=2)
            np.add.at(traces, prob.block_rows[j], tr)
    for i in range(prob.m):
        if traces[i] != 0.0:
            rows[i][tau_idx] = np.array([[-traces[i]]])
    C = [np.zeros((s, s)) for s in prob.block_sizes] + [np.array([[1.0]])]
    aug = SdpProblem(
        sizes,
        rows,
        prob.b,
        C=C,
        free_rows=prob.free_rows if prob.n_free else None,
        free_obj=np.zeros(prob.n_free) if prob.n_free else None,
    )
    sol = solve(aug, opts)
    if sol.status not in (SdpStatus.OPTIMAL, SdpStatus.INFEASIBLE):
        return FeasibilityResult(
            FeasStatus.MARGINAL, math.nan, sol, [], None,
            feasible_tol, infeasible_tol,
        )
    tau = float(sol.X[tau_idx][0, 0]) if sol.status is SdpStatus.OPTIMAL else math.inf
    grams = [sol.X[j] - tau * np.eye(prob.block_sizes[j]) for j in range(prob.nblocks)]
    if tau <= feasible_tol:
        status = FeasStatus.FEASIBLE
        ray = None
    elif tau >= infeasible_tol:
        status = FeasStatus.INFEASIBLE
        ray = sol.y.copy()
    else:
        status = FeasStatus.MARGINAL
        ray = None
    return FeasibilityResult(
        status, tau, sol, grams, ray, feasible_tol, infeasible_tol
    )


# -- SDPA sparse export -----------------------------------------------------


def write_sdpa(prob: SdpProblem, path: str) -> None:
    """Dump in SDPA sparse format (dual encoding: file F_i are our A_i, F_0
    is our C, the c-vector is our b). Free variables become an extra diagonal
    block of plus/minus pairs."""
    nf = prob.n_free
    sizes = list(prob.block_sizes)
    if nf:
        sizes.append(-2 * nf)  # negative marks a diagonal block

    lines = [f"{prob.m}", f"{len(sizes)}", " ".join(str(s) for s in sizes)]
    lines.append(" ".join(repr(v) for v in prob.b))

    def emit(matno: int, blkno: int, mat: np.ndarray, out: list[str]):
        s = mat.shape[0]
        for a in range(s):
            for c in range(a, s):
                v = mat[a, c]
                if v != 0.0:
                    out.append(f"{matno} {blkno} {a + 1} {c + 1} {repr(v)}")

    for j, cmat in enumerate(prob.C):
        emit(0, j + 1, cmat, lines)
    if nf:
        blk = len(sizes)
        for l in range(nf):
            v = prob.free_obj[l]
            if v != 0.0:
                lines.append(f"0 {blk} {l + 1} {l + 1} {repr(v)}")
                lines.append(f"0 {blk} {nf + l + 1} {nf + l + 1} {repr(-v)}")
    for j in range(prob.nblocks):
        for pos, i in enumerate(prob.block_rows[j]):
            emit(int(i) + 1, j + 1, prob.block_mats[j][pos], lines)
    if nf:
        blk = len(sizes)
        for i in range(prob.m):
            for l in range(nf):
                v = prob.free_rows[i, l]
                if v != 0.0:
                    lines.append(f"{i + 1} {blk} {l + 1} {l + 1} {repr(v)}")
                    lines.append(f"{i + 1} {blk} {nf + l + 1} {nf + l + 1} {repr(-v)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_sdpa(path: str) -> SdpProblem:
    """Read a file produced by write_sdpa (diagonal blocks become dense)."""
    with open(path) as fh:
        tokens = []
        for line in fh:
            line = line.split("*")[0].split('"')[0]
            tokens.extend(line.replace(",", " ").split())
    pos = 0

    def take() -> str:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    m = int(take())
    nblocks = int(take())
    sizes = [int(take()) for _ in range(nblocks)]
    sizes = [abs(s) for s in sizes]
    b = np.array([float(take()) for _ in range(m)])
    C = [np.zeros((s, s)) for s in sizes]
    rows: list[dict[int, np.ndarray]] = [dict() for _ in range(m)]
    while pos + 4 < len(tokens) + 1 and pos < len(tokens):
        matno = int(take())
        blk = int(take()) - 1
        a = int(take()) - 1
        c = int(take()) - 1
        v = float(take())
        if matno == 0:
            C[blk][a, c] = v
            C[blk][c, a] = v
        else:
            mat = rows[matno - 1].setdefault(blk, np.zeros((sizes[blk], sizes[blk])))
            mat[a, c] = v
            mat[c, a] = v
    return SdpProblem(sizes, rows, b, C=C)
