"""Marginal-constrained max-entropy program and the R/U1/U2/S decomposition.

The optimizing distribution q* maximizes H_q(Y | Y1, Y2) over the polytope of
joints matching the (y1, y) and (y2, y) pairwise marginals of p while leaving
the (y1, y2) coupling free. The solver is Frank-Wolfe with exact per-y-slice
transportation subproblems and a duality-gap certificate; a grid-search oracle
over the same polytope provides an independent cross-check.
"""

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, minimize, minimize_scalar

from .info import (
    Joint2,
    Joint3,
    conditional_entropy_output,
    conditional_mi,
    empirical_joint,
    interaction_information,
    joint_mi,
    mutual_information,
)

FEAS_TOL = 1e-9
CLAMP_TOL = 1e-6
DEGENERATE_TOTAL = 1e-9


class InfeasibleError(ValueError):
    pass


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class MarginalConstraints:
    """Pairwise marginals p(y1, y) and p(y2, y) defining the feasible polytope."""

    m1y: Joint2
    m2y: Joint2

    def __post_init__(self):
        a, b = self.m1y.mass, self.m2y.mass
        if a.shape != b.shape or a.shape[0] != a.shape[1]:
            raise InfeasibleError("marginals must be square and same-shaped")
        if np.max(np.abs(a.sum(axis=0) - b.sum(axis=0))) > FEAS_TOL:
            raise InfeasibleError("marginals disagree on the Y-marginal")

    @property
    def size(self):
        return self.m1y.mass.shape[0]

    @property
    def py(self):
        return self.m1y.mass.sum(axis=0)


@dataclass
class SolverConfig:
    tol_objective: float = 1e-6
    tol_feasibility: float = 1e-9
    max_iterations: int = 10000
    step_rule: str = "line-search"

    def __post_init__(self):
        if self.tol_objective <= 0 or self.tol_feasibility <= 0:
            raise ValueError("tolerances must be positive")
        if self.step_rule not in ("line-search", "diminishing"):
            raise ValueError(f"unknown step rule {self.step_rule!r}")

    def to_json(self):
        return {
            "tol_objective": self.tol_objective,
            "tol_feasibility": self.tol_feasibility,
            "max_iterations": self.max_iterations,
            "step_rule": self.step_rule,
        }


@dataclass
class PIDResult:
    r: float
    u1: float
    u2: float
    s: float
    total: float
    q_star: Joint3
    iterations: int = 0
    objective_gap: float = 0.0
    feasibility_residual: float = 0.0
    converged: bool = True
    consistency: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "r": self.r,
            "u1": self.u1,
            "u2": self.u2,
            "s": self.s,
            "total": self.total,
            "iterations": self.iterations,
            "objective_gap": self.objective_gap,
            "feasibility_residual": self.feasibility_residual,
            "converged": self.converged,
            "consistency": self.consistency,
        }


def constraints_from_joint(p):
    m = p.mass
    return MarginalConstraints(m1y=Joint2(m.sum(axis=1)), m2y=Joint2(m.sum(axis=0)))


def feasible_residual(q_mass, c):
    return max(
        float(np.max(np.abs(q_mass.sum(axis=1) - c.m1y.mass))),
        float(np.max(np.abs(q_mass.sum(axis=0) - c.m2y.mass))),
    )


def feasible_initial(c):
    """Conditional-product coupling q0 = p(y1|y) p(y2|y) p(y), always feasible."""
    py = c.py
    n = c.size
    q = np.zeros((n, n, n))
    for k in range(n):
        if py[k] > 0:
            q[:, :, k] = np.outer(c.m1y.mass[:, k], c.m2y.mass[:, k]) / py[k]
    return Joint3(q)


def _gradient(q_mass):
    """Gradient of H_q(Y|Y1,Y2) w.r.t. q: -log2 q(y|y1,y2), finite everywhere.

    Cells with zero (y1,y2) mass or zero conditional take the maximum finite
    entry plus 1 bit, steering mass toward unexplored cells without infinities.
    """
    m12 = q_mass.sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = q_mass / m12[:, :, None]
    g = np.full_like(q_mass, np.nan)
    pos = (m12[:, :, None] > 0) & (cond > 0)
    g[pos] = -np.log2(cond[pos])
    finite_max = g[pos].max() if pos.any() else 0.0
    g[~pos] = finite_max + 1.0
    return g


def _transport_max(gain, r, c):
    """Exact solution of max <gain, D> over matrices with row sums r, col sums c."""
    total = r.sum()
    if total <= 0:
        return np.zeros_like(gain)
    rows = np.flatnonzero(r > 0)
    cols = np.flatnonzero(c > 0)
    out = np.zeros_like(gain)
    if len(rows) == 1:
        out[rows[0], :] = c
        return out
    if len(cols) == 1:
        out[:, cols[0]] = r
        return out
    if len(rows) == 2 and len(cols) == 2:
        # one free parameter t = D[r0, c0] on a closed interval
        i0, i1 = rows
        j0, j1 = cols
        lo = max(0.0, r[i0] + c[j0] - total)
        hi = min(r[i0], c[j0])
        coeff = gain[i0, j0] - gain[i0, j1] - gain[i1, j0] + gain[i1, j1]
        t = hi if coeff >= 0 else lo
        out[i0, j0] = t
        out[i0, j1] = r[i0] - t
        out[i1, j0] = c[j0] - t
        out[i1, j1] = r[i1] - (c[j0] - t)
        return out
    a, b = len(rows), len(cols)
    sub = gain[np.ix_(rows, cols)]
    # equality constraints: row sums, plus all-but-one column sums (full rank)
    n_var = a * b
    A = []
    rhs = []
    for i in range(a):
        row = np.zeros(n_var)
        row[i * b : (i + 1) * b] = 1.0
        A.append(row)
        rhs.append(r[rows[i]])
    for j in range(b - 1):
        col = np.zeros(n_var)
        col[j::b] = 1.0
        A.append(col)
        rhs.append(c[cols[j]])
    res = linprog(-sub.ravel(), A_eq=np.array(A), b_eq=np.array(rhs), bounds=(0, None), method="highs")
    if not res.success:
        raise InfeasibleError(f"transportation subproblem failed: {res.message}")
    out[np.ix_(rows, cols)] = res.x.reshape(a, b)
    return out


def _objective(q_mass):
    from .info import entropy

    return entropy(q_mass) - entropy(q_mass.sum(axis=2))


def _constraint_null_space(n):
    """Orthonormal basis of directions preserving both pairwise marginals."""
    rows = []
    for i in range(n):
        for k in range(n):
            a = np.zeros((n, n, n))
            a[i, :, k] = 1.0
            rows.append(a.ravel())
            b = np.zeros((n, n, n))
            b[:, i, k] = 1.0
            rows.append(b.ravel())
    return null_space(np.array(rows))


def _correct(q, basis):
    """Local ascent over the marginal-preserving null space, from q.

    Returns an iterate with objective >= that of q; the surrounding
    Frank-Wolfe gap computation still certifies optimality.
    """
    flat0 = q.ravel()

    def neg_f(z):
        return -_objective((flat0 + basis @ z).reshape(q.shape))

    def neg_grad(z):
        cube = np.clip((flat0 + basis @ z).reshape(q.shape), 0.0, None)
        return -(basis.T @ _gradient(cube).ravel())

    res = minimize(
        neg_f,
        np.zeros(basis.shape[1]),
        jac=neg_grad,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": lambda z: flat0 + basis @ z}],
        options={"maxiter": 200, "ftol": 1e-14},
    )
    cand = np.clip((flat0 + basis @ res.x).reshape(q.shape), 0.0, None)
    if _objective(cand) > _objective(q):
        return cand
    return q


_BIG_DUAL = 1e4


def _dual_bound_gap(q_mass, c):
    """Suboptimality bound from a repaired Lagrangian dual point.

    Duals (a_ik, b_jk) for the two marginal constraint families are fitted to
    -log2 q(y|y1,y2) on the support by weighted least squares. Feasibility
    requires sum_k 2^(-a_ik - b_jk) <= 1 per (y1, y2) block; a uniform shift
    repairs any violation, so the returned value is a sound upper bound on
    how far q is from the optimum. Tight even when the optimum sits on the
    polytope boundary, where the linearized Frank-Wolfe gap is loose.
    """
    n = c.size
    m12 = q_mass.sum(axis=2)
    rows, targets = [], []
    for i in range(n):
        for j in range(n):
            if m12[i, j] <= 0:
                continue
            for k in range(n):
                cond = q_mass[i, j, k] / m12[i, j]
                if cond > 1e-12:
                    r = np.zeros(2 * n * n)
                    r[i * n + k] = 1.0
                    r[n * n + j * n + k] = 1.0
                    w = math.sqrt(q_mass[i, j, k])
                    rows.append(r * w)
                    targets.append(-math.log2(cond) * w)
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(targets), rcond=None)
    a = sol[: n * n].reshape(n, n)
    b = sol[n * n :].reshape(n, n)
    # constraints with zero right-hand side have free duals; push them high so
    # they cannot violate block feasibility
    a[c.m1y.mass <= 0] = _BIG_DUAL
    b[c.m2y.mass <= 0] = _BIG_DUAL
    ex = 2.0 ** (-a)  # (i, k)
    ey = 2.0 ** (-b)  # (j, k)
    block = ex @ ey.T  # sum_k 2^(-a_ik - b_jk)
    shift = max(0.0, math.log2(block.max()))
    dual = float(np.sum(a * c.m1y.mass) + np.sum(b * c.m2y.mass)) + shift
    return max(dual - _objective(q_mass), 0.0)


def solve_qstar(c, cfg=None):
    """Maximize H_q(Y | Y1, Y2) over the marginal polytope via Frank-Wolfe.

    Conditional-gradient loop with exact per-y-slice transportation
    subproblems and exact line search, plus a periodic in-polytope correction
    step (ascent over the marginal-preserving null space) that removes the
    zig-zagging plain conditional gradient suffers near flat optima. The
    reported objective gap is the tighter of the Frank-Wolfe linearization
    gap and the repaired dual bound; both are sound upper bounds.

    Returns (Joint3, diagnostics dict).
    """
    cfg = cfg or SolverConfig()
    q = feasible_initial(c).mass.copy()
    n = c.size
    py = c.py
    basis = _constraint_null_space(n)
    gap = math.inf
    it = 0
    stalled = 0
    for it in range(1, cfg.max_iterations + 1):
        # periodic in-polytope correction; plain FW zig-zags near flat optima
        if basis.shape[1] and it % 10 == 2:
            q = _correct(q, basis)
        g = _gradient(q)
        v = np.zeros_like(q)
        for k in range(n):
            if py[k] > 0:
                v[:, :, k] = _transport_max(g[:, :, k], c.m1y.mass[:, k], c.m2y.mass[:, k])
        d = v - q
        gap = float(np.sum(g * d))
        if gap > cfg.tol_objective:
            gap = min(gap, _dual_bound_gap(q, c))
        if gap <= cfg.tol_objective:
            break
        if cfg.step_rule == "diminishing":
            gamma = 2.0 / (it + 2.0)
        else:
            res = minimize_scalar(
                lambda t: -_objective(q + t * d),
                bounds=(0.0, 1.0),
                method="bounded",
                options={"xatol": 1e-12},
            )
            gamma = float(res.x)
            if _objective(q + gamma * d) < _objective(q):
                gamma = 0.0
        if gamma > 0:
            stalled = 0
            q = q + gamma * d
            np.clip(q, 0.0, None, out=q)
        else:
            # no FW progress; allow one more correction pass, then stop
            stalled += 1
            if not basis.shape[1] or stalled > 11:
                break
    diagnostics = {
        "iterations": it,
        "objective_gap": max(gap, 0.0),
        "feasibility_residual": feasible_residual(q, c),
        "converged": gap <= cfg.tol_objective,
        "objective": _objective(q),
    }
    if diagnostics["feasibility_residual"] > cfg.tol_feasibility * 100:
        raise InfeasibleError(
            f"solver left the feasible set (residual {diagnostics['feasibility_residual']})"
        )
    return Joint3(q / q.sum()), diagnostics


def _slice_parametrization(r, c):
    """Base point and basis directions for one transportation slice.

    Free cells are the (i, j) with i, j below the last nonzero row/column; the
    remaining cells are determined by the margins. Returns (base, bases,
    bounds) in full-slice coordinates; bounds are per-parameter upper limits
    ([lo, hi] exact interval in the single-parameter case).
    """
    n = len(r)
    rows = np.flatnonzero(r > 0)
    cols = np.flatnonzero(c > 0)
    a, b = len(rows), len(cols)
    base = np.zeros((n, n))
    if a == 0:
        return base, [], []
    if a == 1 or b == 1:
        if a == 1:
            base[rows[0], :] = c
        else:
            base[:, cols[0]] = r
        return base, [], []
    total = r.sum()
    for i in rows[:-1]:
        base[i, cols[-1]] = r[i]
    for j in cols[:-1]:
        base[rows[-1], j] = c[j]
    base[rows[-1], cols[-1]] = r[rows[-1]] - c[cols[:-1]].sum()
    bases, bounds = [], []
    for i in rows[:-1]:
        for j in cols[:-1]:
            d = np.zeros((n, n))
            d[i, j] = 1.0
            d[i, cols[-1]] = -1.0
            d[rows[-1], j] = -1.0
            d[rows[-1], cols[-1]] = 1.0
            bases.append(d)
            if a == 2 and b == 2:
                lo = max(0.0, r[i] + c[j] - total)
                hi = min(r[i], c[j])
            else:
                lo, hi = 0.0, min(r[i], c[j])
            bounds.append((lo, hi))
    return base, bases, bounds


MAX_GRID_POINTS = 2 * 10**8


def brute_force_qstar(c, grid_resolution=1000):
    """Independent grid-search oracle for the same max-entropy program.

    Parametrizes each y-slice of the polytope as a transportation polytope
    and exhaustively grid-searches the free parameters, returning the best
    feasible grid point. Tractable only for a handful of free parameters.
    """
    if grid_resolution < 2:
        raise OracleError("grid_resolution must be at least 2")
    n = c.size
    base = np.zeros((n, n, n))
    bases, grids = [], []
    for k in range(n):
        sl_base, sl_bases, sl_bounds = _slice_parametrization(
            c.m1y.mass[:, k], c.m2y.mass[:, k]
        )
        base[:, :, k] = sl_base
        for d, (lo, hi) in zip(sl_bases, sl_bounds):
            full = np.zeros((n, n, n))
            full[:, :, k] = d
            bases.append(full)
            grids.append(np.linspace(lo, hi, grid_resolution))
    n_par = len(bases)
    if n_par == 0:
        return Joint3(base)
    if n_par > 6:
        raise OracleError(f"{n_par} free parameters is too many to enumerate")
    total_points = grid_resolution**n_par
    if total_points > MAX_GRID_POINTS:
        raise OracleError(
            f"grid of {total_points} points exceeds cap; lower the resolution"
        )
    basis = np.stack([d.ravel() for d in bases])  # (P, n^3)
    flat_base = base.ravel()
    best_val, best_q = -math.inf, None
    chunk = 1 << 15
    shape = (grid_resolution,) * n_par
    for start in range(0, total_points, chunk):
        idx = np.arange(start, min(start + chunk, total_points))
        coords = np.unravel_index(idx, shape)
        t = np.stack([grids[p][coords[p]] for p in range(n_par)], axis=1)  # (B, P)
        qs = flat_base[None, :] + t @ basis  # (B, n^3)
        feasible = np.all(qs >= -1e-12, axis=1)
        if not feasible.any():
            continue
        qs = np.clip(qs[feasible], 0.0, None)
        cube = qs.reshape(-1, n, n, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            h3 = -np.sum(np.where(cube > 0, cube * np.log2(cube), 0.0), axis=(1, 2, 3))
            m12 = cube.sum(axis=3)
            h2 = -np.sum(np.where(m12 > 0, m12 * np.log2(m12), 0.0), axis=(1, 2))
        vals = h3 - h2
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val = float(vals[j])
            best_q = cube[j]
    if best_q is None:
        raise OracleError("no feasible grid point found")
    return Joint3(best_q / best_q.sum())


def _clamp(value, failures, name):
    if value < -CLAMP_TOL:
        failures.append(f"{name} = {value:.3e} below clamp tolerance")
        return value
    return max(value, 0.0)


def pid_from_solution(p, q_star, diagnostics=None):
    """Extract R, U1, U2, S (in bits) from the optimizing distribution."""
    c = constraints_from_joint(p)
    resid = feasible_residual(q_star.mass, c)
    if resid > 1e-6:
        raise InfeasibleError(f"q_star violates the marginal constraints ({resid:.2e})")
    total = joint_mi(p)
    failures = []
    r = _clamp(interaction_information(q_star), failures, "R")
    u1 = _clamp(conditional_mi(q_star, given="y2"), failures, "U1")
    u2 = _clamp(conditional_mi(q_star, given="y1"), failures, "U2")
    s = _clamp(total - joint_mi(q_star), failures, "S")
    diagnostics = diagnostics or {}
    result = PIDResult(
        r=r,
        u1=u1,
        u2=u2,
        s=s,
        total=total,
        q_star=q_star,
        iterations=diagnostics.get("iterations", 0),
        objective_gap=diagnostics.get("objective_gap", 0.0),
        feasibility_residual=resid,
        converged=diagnostics.get("converged", True) and not failures,
    )
    if failures:
        result.consistency["failures"] = failures
    return result


def check_consistency(result, p, tol=1e-4):
    """Residuals of the five bookkeeping identities tying R/U1/U2/S to p."""
    i1 = mutual_information(p.mass.sum(axis=1))
    i2 = mutual_information(p.mass.sum(axis=0))
    c1 = conditional_mi(p, given="y2")
    c2 = conditional_mi(p, given="y1")
    ii = interaction_information(p)
    residuals = {
        "r_plus_u1": abs(result.r + result.u1 - i1),
        "r_plus_u2": abs(result.r + result.u2 - i2),
        "u1_plus_s": abs(result.u1 + result.s - c1),
        "u2_plus_s": abs(result.u2 + result.s - c2),
        "r_minus_s": abs(result.r - result.s - ii),
    }
    return {
        "residuals": residuals,
        "tolerance": tol,
        "passed": all(v <= tol for v in residuals.values()),
    }


def convert(data, smoothing=0.0, cfg=None, consistency_tol=1e-4):
    """Full pipeline: triples -> joint -> q* -> PIDResult with consistency report."""
    cfg = cfg or SolverConfig()
    p = empirical_joint(data, smoothing=smoothing)
    return pid_from_joint(p, cfg=cfg, consistency_tol=consistency_tol)


def pid_from_joint(p, cfg=None, consistency_tol=1e-4):
    cfg = cfg or SolverConfig()
    c = constraints_from_joint(p)
    if joint_mi(p) <= DEGENERATE_TOTAL:
        # no task information: the sum identity forces every component to 0
        result = PIDResult(
            r=0.0, u1=0.0, u2=0.0, s=0.0, total=0.0, q_star=feasible_initial(c)
        )
    else:
        q_star, diagnostics = solve_qstar(c, cfg)
        result = pid_from_solution(p, q_star, diagnostics)
    result.consistency.update(check_consistency(result, p, tol=consistency_tol))
    return result
