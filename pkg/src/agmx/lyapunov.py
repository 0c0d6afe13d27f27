"""Energy functions and numerical verification of the contraction theory.

Three energies, one per analysis route:

* ``E_HNAG``        D_f(x, x*) + mu/2 ||y - x*||^2          (unshifted)
* ``E_HNAG_PLUS``   D_{f-mu}(x, x*) + mu ||y - x*||^2        (full shift, 2x y-weight)
* ``E_PARTIAL``     D_{f-mu_hat}(x, x*) + mu/2 ||y - x*||^2  (partial shift)

``strong_lyapunov_residual`` checks the continuous-time dissipation bounds,
``contraction_residuals`` the per-iteration discrete contractions, and
``shift_schedule`` materializes the analysis-only shift sequences.  None of
these feed back into the solvers; they only certify what the solvers did.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import IO

import numpy as np

from .core import (
    MinimizerUnknownError,
    ObjectiveLike,
    ShiftedObjective,
    Vector,
    bregman,
    bregman_asymmetry,
)
from .solvers import MethodKind, Trace


class LyapunovKind(enum.Enum):
    E_HNAG = "e_hnag"
    E_HNAG_PLUS = "e_hnag_plus"
    E_PARTIAL = "e_partial"


def _minimizer(f: ObjectiveLike) -> Vector:
    if f.minimizer is None:
        raise MinimizerUnknownError("objective has no minimizer attached")
    return np.asarray(f.minimizer, dtype=np.float64)


def lyapunov(
    kind: LyapunovKind,
    f: ObjectiveLike,
    x: Vector,
    y: Vector,
    mu_hat: float = 0.0,
) -> float:
    """Evaluate the requested energy at (x, y); nonnegative, zero only at x*.

    ``mu_hat`` only matters for ``E_PARTIAL`` (it is forced to mu for
    ``E_HNAG_PLUS`` and ignored for ``E_HNAG``).
    """
    xstar = _minimizer(f)
    mu = f.mu
    dy = y - xstar
    if kind is LyapunovKind.E_HNAG:
        return bregman(f, x, xstar) + 0.5 * mu * float(dy @ dy)
    if kind is LyapunovKind.E_HNAG_PLUS:
        shifted = ShiftedObjective(f, mu, xstar)
        return bregman(shifted, x, xstar) + mu * float(dy @ dy)
    if kind is LyapunovKind.E_PARTIAL:
        if not 0.0 <= mu_hat <= mu:
            raise ValueError(f"mu_hat must lie in [0, mu]; got {mu_hat}")
        shifted = ShiftedObjective(f, mu_hat, xstar)
        return bregman(shifted, x, xstar) + 0.5 * mu * float(dy @ dy)
    raise ValueError(f"unknown Lyapunov kind {kind!r}")


def strong_lyapunov_terms(
    kind: LyapunovKind,
    f: ObjectiveLike,
    x: Vector,
    y: Vector,
    beta: float,
    mu_hat: float = 0.0,
) -> tuple[float, float]:
    """(-<grad E, G>, proven lower bound) at the state (x, y).

    The gradient of E and the flow field G are assembled analytically from
    grad f, mu, and x*, so ``lhs >= rhs`` certifies the dissipation
    inequality at this state up to roundoff only.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    xstar = _minimizer(f)
    mu = f.mu
    g = f.gradient(x)
    dx = x - xstar
    dy = y - xstar

    if kind is LyapunovKind.E_HNAG:
        ge_x, ge_y = g, mu * dy
        flow_x = (y - x) - beta * g
        flow_y = (x - y) - g / mu
        lhs = -(float(ge_x @ flow_x) + float(ge_y @ flow_y))
        rhs = (
            lyapunov(kind, f, x, y)
            + beta * float(g @ g)
            + 0.5 * mu * float((x - y) @ (x - y))
        )
        return float(lhs), float(rhs)

    if kind is LyapunovKind.E_HNAG_PLUS:
        gsh = g - mu * dx
        ge_x, ge_y = gsh, 2.0 * mu * dy
        flow_x = 2.0 * (y - x) - beta * g
        flow_y = (x - y) - g / mu
        lhs = -(float(ge_x @ flow_x) + float(ge_y @ flow_y))
        rhs = (
            2.0 * lyapunov(kind, f, x, y)
            + beta * float(gsh @ gsh)
            + beta * mu * float(gsh @ dx)
        )
        return float(lhs), float(rhs)

    if kind is LyapunovKind.E_PARTIAL:
        if not 0.0 <= mu_hat <= mu:
            raise ValueError(f"mu_hat must lie in [0, mu]; got {mu_hat}")
        gsh = g - mu_hat * dx
        ge_x, ge_y = gsh, mu * dy
        flow_x = (y - x) - beta * g
        flow_y = (x - y) - g / mu
        lhs = -(float(ge_x @ flow_x) + float(ge_y @ flow_y))
        root = np.sqrt((mu - mu_hat) / mu)
        rhs = (
            (2.0 - root) * lyapunov(kind, f, x, y, mu_hat)
            + (1.0 - root) * bregman_asymmetry(f, x, xstar)
            + beta * float(gsh @ gsh)
            + beta * mu_hat * float(gsh @ dx)
        )
        return float(lhs), float(rhs)

    raise ValueError(f"unknown Lyapunov kind {kind!r}")


def strong_lyapunov_residual(
    kind: LyapunovKind,
    f: ObjectiveLike,
    x: Vector,
    y: Vector,
    beta: float,
    mu_hat: float = 0.0,
) -> float:
    """Dissipation slack lhs - rhs; nonnegative wherever the bound holds."""
    lhs, rhs = strong_lyapunov_terms(kind, f, x, y, beta, mu_hat)
    return lhs - rhs


class ContractionTheorem(enum.Enum):
    THM_HNAG_FUNCVAL = "thm_hnag_funcval"
    THM_HNAG_PLUS = "thm_hnag_plus"
    PROP_QUADRATIC = "prop_quadratic"


_THEOREM_METHOD = {
    ContractionTheorem.THM_HNAG_FUNCVAL: MethodKind.HNAG,
    ContractionTheorem.THM_HNAG_PLUS: MethodKind.HNAG_PLUS,
    ContractionTheorem.PROP_QUADRATIC: MethodKind.HNAG,
}


@dataclass
class ContractionReport:
    """Per-step contraction check lhs_k <= rhs_k of one named theorem.

    lhs_k is the dual-shifted energy after step k+1, rhs_k the contraction
    factor times the energy after step k; positive residuals are violations.
    ``initial_energy`` scales the pass tolerance (energies span many orders
    of magnitude over a run).
    """

    theorem: ContractionTheorem
    k: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    residuals: np.ndarray
    max_violation: float
    argmax_k: int
    initial_energy: float

    def passes(self, rel_tol: float = 1e-10) -> bool:
        return self.max_violation <= rel_tol * self.initial_energy

    def write_csv(self, stream: IO[str]) -> None:
        stream.write("k,lhs,rhs,residual\n")
        for i in range(len(self.k)):
            stream.write(
                f"{int(self.k[i])},{float(self.lhs[i])!r},"
                f"{float(self.rhs[i])!r},{float(self.residuals[i])!r}\n"
            )


def contraction_residuals(
    theorem: ContractionTheorem, trace: Trace, f: ObjectiveLike
) -> ContractionReport:
    """Check one theorem's per-iteration contraction along a recorded trace."""
    expected = _THEOREM_METHOD[theorem]
    if trace.method is not expected:
        raise ValueError(
            f"{theorem.value} applies to {expected.value} traces, "
            f"got {trace.method.value}"
        )
    mu, L = f.mu, f.lipschitz
    if theorem is ContractionTheorem.THM_HNAG_FUNCVAL:
        energy = trace.E - trace.grad_norm**2 / (2.0 * L)
        rate = 1.0 / (1.0 + np.sqrt(2.0 * mu / L))
    else:
        if trace.grad_shifted_sq is None:
            raise ValueError("trace lacks shifted gradients; solve with record_lyapunov")
        energy = trace.E_shifted - trace.grad_shifted_sq / (2.0 * L)
        if theorem is ContractionTheorem.THM_HNAG_PLUS:
            rate = 1.0 / (1.0 + 2.0 * np.sqrt(mu / L))
        else:
            rate = 1.0 / (1.0 + 2.0 * np.sqrt(2.0 * mu / L))

    lhs = energy[1:]
    rhs = rate * energy[:-1]
    residuals = lhs - rhs
    if len(residuals):
        worst = int(np.argmax(residuals))
        max_violation = float(residuals[worst])
    else:
        worst, max_violation = 0, 0.0
    return ContractionReport(
        theorem=theorem,
        k=np.arange(len(residuals), dtype=np.int64),
        lhs=lhs,
        rhs=rhs,
        residuals=residuals,
        max_violation=max_violation,
        argmax_k=worst,
        initial_energy=float(energy[0]) if len(energy) else 0.0,
    )


def asymmetry_bound_check(
    f: ObjectiveLike, x: Vector, y: Vector
) -> tuple[float, float]:
    """(|Delta_f(x, y)|, (M/6) ||x - y||^3); first <= second is the claim."""
    if f.hessian_lipschitz is None:
        raise ValueError("objective has no Hessian-Lipschitz constant")
    lhs = abs(bregman_asymmetry(f, x, y))
    rhs = f.hessian_lipschitz / 6.0 * float(np.linalg.norm(x - y)) ** 3
    return lhs, rhs


_A_MAX = 0.75 * (np.sqrt(2.0) - 1.0)


@dataclass
class ShiftSchedule:
    """Analysis-only shift sequences, normalized so mu = 1.

    delta[k] decays geometrically from delta0, mu_k = 1 - delta[k] rises to 1,
    c[k] = 2 - sqrt(delta[k]) rises to 2, and the step contraction factors
    r[k] = 1/(1 + c[k] sqrt(2 rho)) fall to the limit 1/(1 + 2 sqrt(2 rho)).
    No solver consumes these; they certify the boosted-rate bookkeeping.
    """

    delta0: float
    a: float
    rho: float
    delta: np.ndarray
    mu_k: np.ndarray
    c: np.ndarray
    r: np.ndarray
    admissible: bool
    cancellation_ok: bool
    cancellation_margin: float

    @property
    def limit_rate(self) -> float:
        return 1.0 / (1.0 + 2.0 * np.sqrt(2.0 * self.rho))


def shift_schedule(delta0: float, a: float, rho: float, k_max: int) -> ShiftSchedule:
    """Materialize delta_k, mu_k, c_k, r_k for k <= k_max (delta0 as a fraction of mu).

    Flags: ``admissible`` is r_0 < (1 + sqrt(2 rho))^(-3/2); ``cancellation_ok``
    is the gradient-cancellation condition 2 (1 - delta_k / delta_{k-1}) <= 1 - r_0.
    """
    if not 0.0 < delta0 <= 1.0:
        raise ValueError("delta0 must lie in (0, 1] as a fraction of mu")
    if not 0.0 < a <= _A_MAX:
        raise ValueError(f"a must lie in (0, {_A_MAX}]")
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")

    u = np.sqrt(2.0 * rho)
    decay = (1.0 + a * u) ** (-2.0 / 3.0)
    ks = np.arange(k_max + 1)
    delta = delta0 * decay**ks
    mu_k = 1.0 - delta
    c = 2.0 - np.sqrt(delta)
    r = 1.0 / (1.0 + c * u)
    admissible = bool(r[0] < (1.0 + u) ** -1.5)
    margin = (1.0 - r[0]) - 2.0 * (1.0 - decay)
    return ShiftSchedule(
        delta0=delta0, a=a, rho=rho,
        delta=delta, mu_k=mu_k, c=c, r=r,
        admissible=admissible,
        cancellation_ok=bool(margin >= 0.0),
        cancellation_margin=float(margin),
    )
