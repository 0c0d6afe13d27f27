"""Iteration schemes: GD, NAG, TM baselines and the Hessian-driven methods.

The Hessian-driven methods come in three flavours sharing one state layout
(primary iterate ``x`` plus auxiliary ``v = alpha * y``):

* ``HNAG``       canonical scheme; x-update first with the cached gradient,
                 then one fresh gradient at the new point drives the v-update
                 (coefficients 1/L in x, 2/L in v).
* ``HNAG_BOX``   the alternative box ordering: v-update first, then x-update,
                 both from the gradient at the old point (coefficients 1/L in
                 v, 2/L in x).  Kept verbatim because the two orderings do not
                 produce the same trajectory; ``forms_deviation`` measures the
                 gap.
* ``HNAG_PLUS``  rescaled variant: smaller step alpha = sqrt(mu/L), double
                 weight on the auxiliary sequence in the x-update.

``HNAG++`` is accepted everywhere as an alias of ``HNAG``: it is the same
iteration, only analyzed more sharply, so there is nothing separate to run.

Each step of a Hessian-driven method evaluates the gradient exactly once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DimensionError, MinimizerUnknownError, ObjectiveLike, Vector


class MethodKind(enum.Enum):
    GD = "gd"
    NAG = "nag"
    TM = "tm"
    HNAG = "hnag"
    HNAG_PLUS = "hnag_plus"
    HNAG_BOX = "hnag_box"


HNAG_FAMILY = (MethodKind.HNAG, MethodKind.HNAG_PLUS, MethodKind.HNAG_BOX)

_ALIASES = {
    "gd": MethodKind.GD,
    "nag": MethodKind.NAG,
    "tm": MethodKind.TM,
    "hnag": MethodKind.HNAG,
    "hnag++": MethodKind.HNAG,
    "hnagpp": MethodKind.HNAG,
    "hnag+": MethodKind.HNAG_PLUS,
    "hnagplus": MethodKind.HNAG_PLUS,
    "hnag_plus": MethodKind.HNAG_PLUS,
    "hnagbox": MethodKind.HNAG_BOX,
    "hnag_box": MethodKind.HNAG_BOX,
}


def parse_method(name: str) -> MethodKind:
    """Resolve a method name or alias (case-insensitive) to a MethodKind."""
    key = name.strip().lower()
    if key not in _ALIASES:
        raise ValueError(f"unknown method '{name}'")
    return _ALIASES[key]


class DivergenceError(RuntimeError):
    """A step produced a non-finite iterate."""

    def __init__(self, method: MethodKind, iteration: int):
        super().__init__(
            f"{method.value} produced non-finite values at iteration {iteration}"
        )
        self.method = method
        self.iteration = iteration


@dataclass(frozen=True)
class MethodParams:
    """Step constants derived from (mu, L) for one method.

    For the Hessian-driven family, ``alpha_sq`` is stored exactly (2mu/L or
    mu/L) and ``alpha`` is its square root; ``x_grad_coeff``/``v_grad_coeff``
    are the gradient weights of the two updates.
    """

    method: MethodKind
    mu: float
    lipschitz: float
    inv_lipschitz: float
    alpha: float = 0.0
    alpha_sq: float = 0.0
    alpha_beta: float = 0.0
    x_grad_coeff: float = 0.0
    v_grad_coeff: float = 0.0
    gd_step: float = 0.0
    momentum: float = 0.0
    # Triple-momentum coefficients (Van Scoy, Freeman, Lynch 2018):
    # rho = 1 - 1/sqrt(kappa), (step, momentum, y-extrapolation, output).
    tm_coeffs: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)


def make_params(method: MethodKind, mu: float, lipschitz: float) -> MethodParams:
    """Recommended parameters for each method at the given (mu, L)."""
    if not (0.0 < mu <= lipschitz):
        raise ValueError(f"need 0 < mu <= lipschitz, got mu={mu}, L={lipschitz}")
    L = float(lipschitz)
    mu = float(mu)
    kappa = L / mu
    common = dict(method=method, mu=mu, lipschitz=L, inv_lipschitz=1.0 / L)

    if method in (MethodKind.HNAG, MethodKind.HNAG_BOX):
        alpha_sq = 2.0 * mu / L
        alpha = np.sqrt(alpha_sq)
        if method is MethodKind.HNAG:
            x_c, v_c = 1.0 / L, 2.0 / L
        else:
            x_c, v_c = 2.0 / L, 1.0 / L
        return MethodParams(
            **common, alpha=alpha, alpha_sq=alpha_sq, alpha_beta=1.0 / L,
            x_grad_coeff=x_c, v_grad_coeff=v_c,
        )
    if method is MethodKind.HNAG_PLUS:
        alpha_sq = mu / L
        return MethodParams(
            **common, alpha=np.sqrt(alpha_sq), alpha_sq=alpha_sq,
            alpha_beta=1.0 / L, x_grad_coeff=1.0 / L, v_grad_coeff=1.0 / L,
        )
    if method is MethodKind.GD:
        return MethodParams(**common, gd_step=2.0 / (L + mu))
    if method is MethodKind.NAG:
        rk = np.sqrt(kappa)
        return MethodParams(**common, momentum=(rk - 1.0) / (rk + 1.0))
    if method is MethodKind.TM:
        rho = 1.0 - 1.0 / np.sqrt(kappa)
        tm = (
            (1.0 + rho) / L,
            rho**2 / (2.0 - rho),
            rho**2 / ((1.0 + rho) * (2.0 - rho)),
            rho**2 / (1.0 - rho**2) if rho > 0.0 else 0.0,
        )
        return MethodParams(**common, tm_coeffs=tm)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class SolverState:
    """One method's iterate bundle.

    ``aux`` holds v = alpha * y for the Hessian-driven family, y for NAG, the
    pair (xi_k, xi_{k-1}) for TM, and mirrors x for GD.  ``grad_cache`` is the
    last gradient evaluated at ``x``; the stopping rule reads it for free.
    """

    x: Vector
    aux: Vector
    k: int
    grad_cache: Vector


def init_state(
    method: MethodKind, f: ObjectiveLike, x0: Vector, params: MethodParams
) -> SolverState:
    """Matched initialization: internal variables start at x0 (v0 = alpha*x0)."""
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (f.dim,):
        raise DimensionError(f"x0 has shape {x0.shape}, expected ({f.dim},)")
    if not np.isfinite(x0).all():
        raise ValueError("x0 must be finite")
    g0 = f.gradient(x0)
    if method in HNAG_FAMILY:
        aux = params.alpha * x0
    elif method is MethodKind.TM:
        aux = np.stack([x0, x0])
    else:
        aux = x0.copy()
    return SolverState(x=x0.copy(), aux=aux, k=0, grad_cache=g0)


def aux_point(method: MethodKind, state: SolverState, params: MethodParams) -> Vector:
    """The method's reported auxiliary iterate y_k."""
    if method in HNAG_FAMILY:
        return state.aux / params.alpha
    if method is MethodKind.TM:
        _, _, g_tm, _ = params.tm_coeffs
        return (1.0 + g_tm) * state.aux[0] - g_tm * state.aux[1]
    return state.aux


def step(
    method: MethodKind,
    state: SolverState,
    f: ObjectiveLike,
    params: MethodParams,
) -> SolverState:
    """Advance one iteration, returning a fresh state."""
    if params.method is not method:
        raise ValueError(f"params were built for {params.method}, not {method}")
    x, aux, g = state.x, state.aux, state.grad_cache

    if method is MethodKind.HNAG or method is MethodKind.HNAG_PLUS:
        a = params.alpha
        if method is MethodKind.HNAG:
            x_new = (x + aux - params.x_grad_coeff * g) / (1.0 + a)
        else:
            x_new = (x + 2.0 * aux - params.x_grad_coeff * g) / (1.0 + 2.0 * a)
        g_new = f.gradient(x_new)
        aux_new = (aux + params.alpha_sq * x_new - params.v_grad_coeff * g_new) / (1.0 + a)
    elif method is MethodKind.HNAG_BOX:
        a = params.alpha
        aux_new = (aux + params.alpha_sq * x - params.v_grad_coeff * g) / (1.0 + a)
        x_new = (x + aux_new - params.x_grad_coeff * g) / (1.0 + a)
        g_new = f.gradient(x_new)
    elif method is MethodKind.GD:
        x_new = x - params.gd_step * g
        g_new = f.gradient(x_new)
        aux_new = x_new
    elif method is MethodKind.NAG:
        gy = f.gradient(aux)
        x_new = aux - params.inv_lipschitz * gy
        aux_new = x_new + params.momentum * (x_new - x)
        g_new = f.gradient(x_new)
    elif method is MethodKind.TM:
        a_tm, b_tm, g_tm, d_tm = params.tm_coeffs
        xi, xi_prev = aux[0], aux[1]
        y = (1.0 + g_tm) * xi - g_tm * xi_prev
        xi_new = (1.0 + b_tm) * xi - b_tm * xi_prev - a_tm * f.gradient(y)
        x_new = (1.0 + d_tm) * xi_new - d_tm * xi
        aux_new = np.stack([xi_new, xi])
        g_new = f.gradient(x_new)
    else:
        raise ValueError(f"unknown method {method!r}")

    if not (np.isfinite(x_new).all() and np.isfinite(aux_new).all()
            and np.isfinite(g_new).all()):
        raise DivergenceError(method, state.k + 1)
    return SolverState(x=x_new, aux=aux_new, k=state.k + 1, grad_cache=g_new)


class TerminalStatus(enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"


@dataclass
class SolverConfig:
    method: MethodKind
    tol_rel_grad: float = 1e-8
    max_iter: int = 10**6
    record_lyapunov: bool = True
    seed: int = 42

    def __post_init__(self) -> None:
        if not 0.0 < self.tol_rel_grad < 1.0:
            raise ValueError("tol_rel_grad must lie in (0, 1)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class Trace:
    """Per-iteration records of one solve.

    Column conventions: ``grad_norm`` is ||grad f(x_k)|| (the stopping
    quantity), ``E`` the unshifted energy f-gap + mu/2 ||y - x*||^2, and
    ``E_shifted`` its fully shifted counterpart (y-weight mu for HNAG+, mu/2
    otherwise).  ``grad_shifted_sq`` = ||grad f(x_k) - mu (x_k - x*)||^2 is
    kept when the config asked for Lyapunov recording.
    """

    method: MethodKind
    status: TerminalStatus
    k: np.ndarray
    f_gap: np.ndarray
    grad_norm: np.ndarray
    x_err_sq: np.ndarray
    y_err_sq: np.ndarray
    E: np.ndarray
    E_shifted: np.ndarray
    grad_shifted_sq: Optional[np.ndarray] = None

    @property
    def iterations(self) -> int:
        return len(self.k) - 1

    @property
    def records(self) -> list[tuple]:
        cols = (self.k, self.f_gap, self.grad_norm, self.x_err_sq,
                self.y_err_sq, self.E, self.E_shifted)
        return [tuple(c[i].item() for c in cols) for i in range(len(self.k))]


def solve(f: ObjectiveLike, config: SolverConfig, x0: Vector) -> Trace:
    """Run one method until the relative-gradient stopping rule or max_iter.

    Stopping rule: ||grad f(x_k)|| <= tol_rel_grad * ||grad f(x_0)||.
    The objective must carry its minimizer (exact or oracle-attached) because
    every record includes distance-to-minimizer columns.
    """
    if f.minimizer is None:
        raise MinimizerUnknownError(
            "solve() records error columns; attach a minimizer first "
            "(analysis.ensure_minimizer)"
        )
    method = config.method
    params = make_params(method, f.mu, f.lipschitz)
    state = init_state(method, f, x0, params)
    xstar = np.asarray(f.minimizer, dtype=np.float64)
    fstar = f.value(xstar)
    mu = f.mu
    y_weight = mu if method is MethodKind.HNAG_PLUS else 0.5 * mu

    cols: dict[str, list] = {name: [] for name in (
        "f_gap", "grad_norm", "x_err_sq", "y_err_sq", "E", "E_shifted", "gsh")}

    def record(st: SolverState) -> None:
        # squared quantities can overflow long before coordinates do; treat
        # that as divergence rather than recording infinities
        with np.errstate(over="ignore", invalid="ignore"):
            dx = st.x - xstar
            dy = aux_point(method, st, params) - xstar
            f_gap = f.value(st.x) - fstar
            x_err = float(dx @ dx)
            y_err = float(dy @ dy)
            grad_norm = float(np.linalg.norm(st.grad_cache))
            gsh_sq = 0.0
            if config.record_lyapunov:
                gsh = st.grad_cache - mu * dx
                gsh_sq = float(gsh @ gsh)
        if not np.isfinite([f_gap, x_err, y_err, grad_norm, gsh_sq]).all():
            raise DivergenceError(method, st.k)
        cols["f_gap"].append(f_gap)
        cols["grad_norm"].append(grad_norm)
        cols["x_err_sq"].append(x_err)
        cols["y_err_sq"].append(y_err)
        cols["E"].append(f_gap + 0.5 * mu * y_err)
        cols["E_shifted"].append(f_gap - 0.5 * mu * x_err + y_weight * y_err)
        if config.record_lyapunov:
            cols["gsh"].append(gsh_sq)

    record(state)
    g0_norm = cols["grad_norm"][0]
    threshold = config.tol_rel_grad * g0_norm
    status = TerminalStatus.MAX_ITER
    while True:
        if cols["grad_norm"][-1] <= threshold:
            status = TerminalStatus.CONVERGED
            break
        if state.k >= config.max_iter:
            break
        state = step(method, state, f, params)
        record(state)

    n = len(cols["f_gap"])
    return Trace(
        method=method,
        status=status,
        k=np.arange(n, dtype=np.int64),
        f_gap=np.asarray(cols["f_gap"]),
        grad_norm=np.asarray(cols["grad_norm"]),
        x_err_sq=np.asarray(cols["x_err_sq"]),
        y_err_sq=np.asarray(cols["y_err_sq"]),
        E=np.asarray(cols["E"]),
        E_shifted=np.asarray(cols["E_shifted"]),
        grad_shifted_sq=np.asarray(cols["gsh"]) if config.record_lyapunov else None,
    )


def forms_deviation(f: ObjectiveLike, x0: Vector, k: int) -> float:
    """Max gap ||x_j^scheme - x_j^box|| over j <= k from identical starts.

    Quantifies the disagreement between the canonical scheme ordering and the
    box ordering of the same update; zero only in degenerate cases.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    p_s = make_params(MethodKind.HNAG, f.mu, f.lipschitz)
    p_b = make_params(MethodKind.HNAG_BOX, f.mu, f.lipschitz)
    st_s = init_state(MethodKind.HNAG, f, x0, p_s)
    st_b = init_state(MethodKind.HNAG_BOX, f, x0, p_b)
    dev = 0.0
    for _ in range(k):
        st_s = step(MethodKind.HNAG, st_s, f, p_s)
        st_b = step(MethodKind.HNAG_BOX, st_b, f, p_b)
        dev = max(dev, float(np.linalg.norm(st_s.x - st_b.x)))
    return dev
