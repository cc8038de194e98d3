"""Lie group time steppers and step-size control.

Two explicit families operate on a :class:`~geomint.actions.HomogeneousAction`:
Runge--Kutta--Munthe-Kaas schemes, which integrate the pulled-back
equation sigma' = dexpinv_sigma(f(act(exp(sigma), y))) in the algebra,
and commutator-free schemes, which compose several exponentials per
step.  A separate implicit one-parameter family provides symplectic
steps on right-trivialized cotangent groups G x g*.

Every stepper is pure: ``stepper(action, f, y, h) -> StepResult`` where
``f`` maps a flat manifold point to a flat algebra element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import root

from .actions import HomogeneousAction
from .lie import dexp_star_so3, dexpinv_series, exp_so3

__all__ = [
    "Tableau",
    "RK4",
    "KUTTA3",
    "DOPRI54",
    "StepResult",
    "lie_euler_step",
    "lie_euler_heun_step",
    "rkmk_step",
    "rkmk4_two_commutator_step",
    "cf4_step",
    "cf32_step_A",
    "cf32_step_B",
    "cf43_step",
    "rkmk54_step",
    "make_rkmk_stepper",
    "METHODS",
    "MethodInfo",
    "CotangentGroup",
    "so3_cotangent_group",
    "so3r3_cotangent_group",
    "SolveConfig",
    "NonConvergenceError",
    "symplectic_step",
    "ControllerConfig",
    "controller_update",
    "StepAttempt",
    "AdaptiveResult",
    "StepSizeUnderflowError",
    "TooManyRejectsError",
    "adaptive_integrate",
    "fixed_integrate",
]


# ---------------------------------------------------------------------------
# Butcher tableaux


@dataclass(frozen=True)
class Tableau:
    """Explicit Runge--Kutta coefficients, optionally with an embedded
    second weight row for error estimation."""

    name: str
    c: Tuple[float, ...]
    a: Tuple[Tuple[float, ...], ...]
    b: Tuple[float, ...]
    p: int
    b_hat: Optional[Tuple[float, ...]] = None
    p_hat: Optional[int] = None

    def __post_init__(self):
        s = len(self.c)
        if len(self.a) != s or len(self.b) != s:
            raise ValueError(f"{self.name}: inconsistent stage count")
        for i, row in enumerate(self.a):
            if len(row) > i:
                raise ValueError(f"{self.name}: tableau not explicit (row {i})")
        if abs(sum(self.b) - 1.0) > 1e-14:
            raise ValueError(f"{self.name}: weights do not sum to 1")
        if self.b_hat is not None and abs(sum(self.b_hat) - 1.0) > 1e-14:
            raise ValueError(f"{self.name}: embedded weights do not sum to 1")

    @property
    def stages(self) -> int:
        return len(self.c)


RK4 = Tableau(
    name="rk4",
    c=(0.0, 0.5, 0.5, 1.0),
    a=((), (0.5,), (0.0, 0.5), (0.0, 0.0, 1.0)),
    b=(1 / 6, 1 / 3, 1 / 3, 1 / 6),
    p=4,
)

KUTTA3 = Tableau(
    name="kutta3",
    c=(0.0, 0.5, 1.0),
    a=((), (0.5,), (-1.0, 2.0)),
    b=(1 / 6, 2 / 3, 1 / 6),
    p=3,
)

# Dormand--Prince 5(4): the first-same-as-last stage doubles as the
# embedded method's seventh stage.
DOPRI54 = Tableau(
    name="dopri54",
    c=(0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0),
    a=(
        (),
        (1 / 5,),
        (3 / 40, 9 / 40),
        (44 / 45, -56 / 15, 32 / 9),
        (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
        (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
        (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
    ),
    b=(35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0),
    p=5,
    b_hat=(
        5179 / 57600,
        0.0,
        7571 / 16695,
        393 / 640,
        -92097 / 339200,
        187 / 2100,
        1 / 40,
    ),
    p_hat=4,
)


@dataclass(frozen=True)
class StepResult:
    y_next: np.ndarray
    y_aux: Optional[np.ndarray] = None
    error_estimate: Optional[float] = None


FieldMap = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# One-step schemes


def lie_euler_step(action: HomogeneousAction, f: FieldMap, y, h: float) -> StepResult:
    """First order: flow of the field frozen at y, y1 = act(exp(h f(y)), y)."""
    return StepResult(y_next=action.act(action.exp(h * f(y)), y))


def lie_euler_heun_step(action, f, y, h) -> StepResult:
    """Trapezoidal two-stage variant of the frozen-field Euler step (order 2)."""
    f1 = f(y)
    y2 = action.act(action.exp(h * f1), y)
    f2 = f(y2)
    return StepResult(y_next=action.act(action.exp(0.5 * h * (f1 + f2)), y))


def _dexpinv_for(action: HomogeneousAction, tableau: Tableau, trunc_order):
    if trunc_order is None and action.dexpinv is not None:
        return action.dexpinv
    order = trunc_order if trunc_order is not None else tableau.p + 1
    return lambda u, v: dexpinv_series(u, v, order, bracket=action.bracket)


def rkmk_step(
    action: HomogeneousAction,
    f: FieldMap,
    y,
    h: float,
    tableau: Tableau = RK4,
    trunc_order: Optional[int] = None,
) -> StepResult:
    """Generic explicit RKMK step for any explicit tableau.

    The algebra-valued stages solve the dexpinv equation from sigma = 0;
    the exact dexpinv of the action is used when present, otherwise the
    truncated series at ``trunc_order`` (default p+1).
    """
    dexpinv = _dexpinv_for(action, tableau, trunc_order)
    s = tableau.stages
    k: List[np.ndarray] = []
    for i in range(s):
        sigma = h * sum(
            (tableau.a[i][j] * k[j] for j in range(i) if tableau.a[i][j] != 0.0),
            np.zeros(action.algebra_dim),
        )
        stage_point = action.act(action.exp(sigma), y) if i else y
        k.append(dexpinv(sigma, f(stage_point)))
    sigma1 = h * sum(b * ki for b, ki in zip(tableau.b, k))
    y1 = action.act(action.exp(sigma1), y)
    if tableau.b_hat is None:
        return StepResult(y_next=y1)
    sigma_hat = h * sum(b * ki for b, ki in zip(tableau.b_hat, k))
    y_aux = action.act(action.exp(sigma_hat), y)
    return StepResult(
        y_next=y1,
        y_aux=y_aux,
        error_estimate=float(np.linalg.norm(sigma1 - sigma_hat)),
    )


def rkmk4_two_commutator_step(action, f, y, h) -> StepResult:
    """Four-stage order-4 RKMK scheme needing only two commutators."""
    br = action.bracket
    k1 = h * f(y)
    k2 = h * f(action.act(action.exp(0.5 * k1), y))
    k3 = h * f(action.act(action.exp(0.5 * k2 - 0.125 * br(k1, k2)), y))
    k4 = h * f(action.act(action.exp(k3), y))
    sigma = (k1 + 2.0 * k2 + 2.0 * k3 + k4 - 0.5 * br(k1, k4)) / 6.0
    return StepResult(y_next=action.act(action.exp(sigma), y))


def _cf4_stages(action, f, y, h):
    f1 = f(y)
    y2 = action.act(action.exp(0.5 * h * f1), y)
    f2 = f(y2)
    f3 = f(action.act(action.exp(0.5 * h * f2), y))
    # the second-stage exponential is reused: Y4 = exp(h f3 - h/2 f1) . Y2
    f4 = f(action.act(action.exp(h * f3 - 0.5 * h * f1), y2))
    return f1, f2, f3, f4


def cf4_step(action, f, y, h) -> StepResult:
    """Commutator-free order 4: two update exponentials through a half point."""
    f1, f2, f3, f4 = _cf4_stages(action, f, y, h)
    y_half = action.act(action.exp(h / 12.0 * (3.0 * f1 + 2.0 * f2 + 2.0 * f3 - f4)), y)
    y1 = action.act(action.exp(h / 12.0 * (-f1 + 2.0 * f2 + 2.0 * f3 + 3.0 * f4)), y_half)
    return StepResult(y_next=y1)


def _ambient_distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def cf32_step_A(action, f, y, h) -> StepResult:
    """Embedded commutator-free 3(2) pair reusing the second stage
    exponential in the order-3 update."""
    f1 = f(y)
    y2 = action.act(action.exp(h / 3.0 * f1), y)
    f2 = f(y2)
    y3 = action.act(action.exp(2.0 * h / 3.0 * f2), y)
    f3 = f(y3)
    y1 = action.act(action.exp(h * (-f1 / 12.0 + 0.75 * f3)), y2)
    y_aux = action.act(action.exp(0.5 * h * (f2 + f3)), y)
    return StepResult(y_next=y1, y_aux=y_aux, error_estimate=_ambient_distance(y1, y_aux))


def cf32_step_B(action, f, y, h) -> StepResult:
    """Embedded commutator-free 3(2) pair reusing the third stage
    exponential in the order-3 update."""
    f1 = f(y)
    f2 = f(action.act(action.exp(2.0 * h / 3.0 * f1), y))
    y3 = action.act(action.exp(h * (5.0 / 12.0 * f1 + 0.25 * f2)), y)
    f3 = f(y3)
    y1 = action.act(action.exp(h * (-f1 / 6.0 - 0.5 * f2 + f3)), y3)
    y_aux = action.act(action.exp(0.25 * h * (f1 + 3.0 * f3)), y)
    return StepResult(y_next=y1, y_aux=y_aux, error_estimate=_ambient_distance(y1, y_aux))


def cf43_step(action, f, y, h) -> StepResult:
    """Order 4(3): the commutator-free order-4 step plus one extra stage
    feeding an order-3 auxiliary update."""
    f1, f2, f3, f4 = _cf4_stages(action, f, y, h)
    y_half = action.act(action.exp(h / 12.0 * (3.0 * f1 + 2.0 * f2 + 2.0 * f3 - f4)), y)
    y1 = action.act(action.exp(h / 12.0 * (-f1 + 2.0 * f2 + 2.0 * f3 + 3.0 * f4)), y_half)
    f3bar = f(action.act(action.exp(0.75 * h * f2), y))
    y_aux = action.act(
        action.exp(h / 9.0 * (-f1 + 3.0 * f2 + 4.0 * f3bar)),
        action.act(action.exp(h / 3.0 * f1), y),
    )
    return StepResult(y_next=y1, y_aux=y_aux, error_estimate=_ambient_distance(y1, y_aux))


def rkmk54_step(action, f, y, h) -> StepResult:
    """RKMK pair built on the Dormand--Prince 5(4) tableau; the error
    estimate is the algebra norm of the difference of the two updates."""
    return rkmk_step(action, f, y, h, tableau=DOPRI54)


def make_rkmk_stepper(tableau: Tableau, trunc_order: Optional[int] = None):
    def stepper(action, f, y, h):
        return rkmk_step(action, f, y, h, tableau=tableau, trunc_order=trunc_order)

    stepper.__name__ = f"rkmk_{tableau.name}_step"
    return stepper


@dataclass(frozen=True)
class MethodInfo:
    """Registry entry: the stepper plus its (main, auxiliary) orders."""

    stepper: Callable[..., StepResult]
    p: int
    p_hat: Optional[int] = None

    @property
    def embedded(self) -> bool:
        return self.p_hat is not None


METHODS = {
    "lie-euler": MethodInfo(lie_euler_step, 1),
    "heun": MethodInfo(lie_euler_heun_step, 2),
    "rkmk3": MethodInfo(make_rkmk_stepper(KUTTA3), 3),
    "rkmk4": MethodInfo(make_rkmk_stepper(RK4), 4),
    "rkmk4-2c": MethodInfo(rkmk4_two_commutator_step, 4),
    "cf4": MethodInfo(cf4_step, 4),
    "cf32a": MethodInfo(cf32_step_A, 3, 2),
    "cf32b": MethodInfo(cf32_step_B, 3, 2),
    "cf43": MethodInfo(cf43_step, 4, 3),
    "rkmk54": MethodInfo(rkmk54_step, 5, 4),
    "rkmk5": MethodInfo(rkmk54_step, 5),
}


# ---------------------------------------------------------------------------
# Symplectic family on right-trivialized cotangent groups


@dataclass(frozen=True)
class CotangentGroup:
    """Group data for the implicit symplectic family on G x g*.

    ``coad`` is the coadjoint map Ad*_g on the dual, ``dexp_star`` the
    dual of the differential of exp.  Dual elements are flat arrays of
    length ``dual_dim``; algebra elements flat arrays of ``algebra_dim``.
    """

    name: str
    algebra_dim: int
    dual_dim: int
    exp: Callable[[np.ndarray], Any]
    compose: Callable[[Any, Any], Any]
    coad: Callable[[Any, np.ndarray], np.ndarray]
    dexp_star: Callable[[np.ndarray, np.ndarray], np.ndarray]


def so3_cotangent_group() -> CotangentGroup:
    """SO(3) x so(3)*: Ad*_R mu = R^T mu."""
    return CotangentGroup(
        name="so3-cotangent",
        algebra_dim=3,
        dual_dim=3,
        exp=exp_so3,
        compose=lambda g1, g2: g1 @ g2,
        coad=lambda g, mu: g.T @ mu,
        dexp_star=dexp_star_so3,
    )


def so3r3_cotangent_group() -> CotangentGroup:
    """(SO(3) x R^3) x its dual; the translational factor is abelian, so
    its coadjoint and dexp* blocks are identities."""

    def expmap(xi):
        return exp_so3(xi[:3]), np.asarray(xi[3:6], dtype=float)

    def coad(g, mu):
        return np.concatenate([g[0].T @ mu[:3], mu[3:6]])

    def dexp_star(u, mu):
        return np.concatenate([dexp_star_so3(u[:3], mu[:3]), mu[3:6]])

    return CotangentGroup(
        name="so3r3-cotangent",
        algebra_dim=6,
        dual_dim=6,
        exp=expmap,
        compose=lambda g1, g2: (g1[0] @ g2[0], g1[1] + g2[1]),
        coad=coad,
        dexp_star=dexp_star,
    )


@dataclass(frozen=True)
class SolveConfig:
    """Nonlinear-solve settings for the implicit symplectic step."""

    tol: float = 1e-13
    max_iter: int = 100
    method: str = "fixed-point"  # or "newton"

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("solve tolerance must be positive")
        if self.method not in ("fixed-point", "newton"):
            raise ValueError(f"unknown solve method {self.method!r}")


class NonConvergenceError(RuntimeError):
    """The implicit solve did not contract; usually the step is too large."""


def _symplectic_residual_map(group, f, g0, mu0, h, theta):
    """Returns G(xi, nbar) = h f(exp(theta xi) g0, M_theta)."""

    def gmap(xi, nbar):
        ad_n = group.coad(group.exp(theta * xi), nbar)
        m_theta = group.dexp_star(-xi, mu0 + ad_n)
        if theta != 0.0:
            m_theta = m_theta - theta * group.dexp_star(-theta * xi, ad_n)
        g = group.compose(group.exp(theta * xi), g0)
        xi_new, nbar_new = f(g, m_theta)
        return h * np.asarray(xi_new, dtype=float), h * np.asarray(nbar_new, dtype=float)

    return gmap


def symplectic_step(
    group: CotangentGroup,
    f: Callable[[Any, np.ndarray], Tuple[np.ndarray, np.ndarray]],
    g0,
    mu0: np.ndarray,
    h: float,
    theta: float,
    solve: SolveConfig = SolveConfig(),
):
    """One step of the one-parameter implicit symplectic family on G x g*.

    Solves (xi, nbar) = h f(exp(theta xi) g0, M_theta) and updates by the
    cotangent-group product, so mu1 = Ad*_{exp((theta-1)xi)} nbar +
    Ad*_{exp(-xi)} mu0.  ``f`` maps (group element, dual element) to an
    (algebra, dual) pair.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    gmap = _symplectic_residual_map(group, f, g0, mu0, h, theta)
    nd, na = group.dual_dim, group.algebra_dim
    xi = np.zeros(na)
    nbar = np.zeros(nd)

    if solve.method == "fixed-point":
        for _ in range(solve.max_iter):
            xi_new, nbar_new = gmap(xi, nbar)
            delta = math.hypot(
                float(np.linalg.norm(xi_new - xi)), float(np.linalg.norm(nbar_new - nbar))
            )
            scale = 1.0 + math.hypot(
                float(np.linalg.norm(xi_new)), float(np.linalg.norm(nbar_new))
            )
            xi, nbar = xi_new, nbar_new
            if delta <= solve.tol * scale:
                break
        else:
            raise NonConvergenceError(
                f"fixed-point iteration stalled after {solve.max_iter} sweeps "
                f"(h = {h:.3e} likely too large)"
            )
    else:

        def residual(x):
            xi_new, nbar_new = gmap(x[:na], x[na:])
            return x - np.concatenate([xi_new, nbar_new])

        sol = root(residual, np.concatenate([xi, nbar]), method="hybr", tol=1e-14)
        x = sol.x
        if np.linalg.norm(residual(x)) > solve.tol * (1.0 + np.linalg.norm(x)) * 100.0:
            raise NonConvergenceError(f"newton solve failed: {sol.message}")
        xi, nbar = x[:na], x[na:]

    g1 = group.compose(group.exp(xi), g0)
    mu1 = group.coad(group.exp((theta - 1.0) * xi), nbar) + group.coad(
        group.exp(-xi), mu0
    )
    return g1, mu1


# ---------------------------------------------------------------------------
# Step-size controller and drivers


@dataclass(frozen=True)
class ControllerConfig:
    tol: float
    alpha: float
    theta: float = 0.9
    h_min: float = 1e-12
    h_max: float = math.inf
    max_rejects: int = 30

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("safety factor must lie in (0, 1)")
        if self.h_min > self.h_max:
            raise ValueError("h_min exceeds h_max")


def controller_update(
    h: float, e: float, cfg: ControllerConfig, exponent: Optional[float] = None
) -> float:
    """h_next = clamp(theta (tol/e)^alpha h); e = 0 maps to h_max."""
    if e < 0:
        raise ValueError("error estimate must be nonnegative")
    if e == 0.0:
        return cfg.h_max
    a = cfg.alpha if exponent is None else exponent
    return min(max(cfg.theta * (cfg.tol / e) ** a * h, cfg.h_min), cfg.h_max)


@dataclass(frozen=True)
class StepAttempt:
    t: float
    h: float
    error_estimate: float
    accepted: bool


@dataclass
class AdaptiveResult:
    ts: np.ndarray
    ys: np.ndarray
    step_log: List[StepAttempt]
    rejects: int


class StepSizeUnderflowError(RuntimeError):
    pass


class TooManyRejectsError(RuntimeError):
    pass


def adaptive_integrate(
    action: HomogeneousAction,
    f: FieldMap,
    stepper: Callable[..., StepResult],
    y0,
    t0: float,
    T: float,
    h0: float,
    cfg: ControllerConfig,
) -> AdaptiveResult:
    """Accept/reject loop: accept when e < tol, always update h by the
    controller formula, truncate the last step to land exactly on T."""
    if T <= t0:
        raise ValueError("T must exceed t0")
    t, y = t0, np.asarray(y0, dtype=float)
    h = min(h0, cfg.h_max)
    ts, ys, log = [t], [y], []
    rejects = 0
    consecutive = 0
    while t < T - 1e-14 * max(1.0, abs(T)):
        h_try = min(h, T - t)
        if h_try < cfg.h_min:
            raise StepSizeUnderflowError(f"step size underflow at t = {t:.6g}")
        res = stepper(action, f, y, h_try)
        if res.error_estimate is None:
            raise ValueError("adaptive integration requires an embedded stepper")
        e = res.error_estimate
        accepted = e < cfg.tol
        log.append(StepAttempt(t=t, h=h_try, error_estimate=e, accepted=accepted))
        h = controller_update(h_try, e, cfg)
        if accepted:
            t = t + h_try
            y = np.asarray(res.y_next, dtype=float)
            ts.append(t)
            ys.append(y)
            consecutive = 0
        else:
            rejects += 1
            consecutive += 1
            if consecutive > cfg.max_rejects:
                raise TooManyRejectsError(
                    f"{consecutive} consecutive rejections at t = {t:.6g}"
                )
    return AdaptiveResult(ts=np.array(ts), ys=np.array(ys), step_log=log, rejects=rejects)


def fixed_integrate(
    action: HomogeneousAction,
    f: FieldMap,
    stepper: Callable[..., StepResult],
    y0,
    t0: float,
    T: float,
    n_steps: int,
):
    """Uniform-step driver; returns (times, states) with n_steps + 1 rows."""
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    h = (T - t0) / n_steps
    ys = np.empty((n_steps + 1, np.asarray(y0).shape[0]))
    ys[0] = y0
    for n in range(n_steps):
        ys[n + 1] = stepper(action, f, ys[n], h).y_next
    ts = t0 + h * np.arange(n_steps + 1)
    ts[-1] = T
    return ts, ys
