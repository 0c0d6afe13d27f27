"""Seeded benchmark problems: FD Laplacian quadratic, smooth piecewise sum,
and l2-regularized logistic regression.

Reproducibility contract
------------------------
All randomness flows through :class:`Rng`, a SplitMix64 generator with the
constants pinned below, so the same seed rebuilds the same problem bit for
bit on any platform.  Consumption order is documented per builder; matrices
are regenerated from {kind, dims, seed, parameters} descriptions rather than
stored (see :func:`rebuild`).
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .core import DimensionError, ObjectiveLike, Vector

# SplitMix64 constants (Steele, Lea, Flood 2014). The k-th raw draw mixes
# state0 + k * _GAMMA; uniforms take the top 53 bits.
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 2.0**-53


class Rng:
    """Deterministic SplitMix64 stream.

    * ``uniform``: top 53 bits of the mixed state, in [0, 1).
    * ``standard_normal``: Box-Muller on consecutive uniform pairs (u1, u2),
      radius sqrt(-2 ln(1 - u1)), angle 2 pi u2; pairs are emitted in order
      (cos, sin) and multi-dimensional shapes fill row-major.
    * ``signs``: +1 where uniform < 1/2, else -1.

    Default seed 42.
    """

    def __init__(self, seed: int = 42):
        self.seed = int(seed)
        self._state = np.uint64(self.seed & 0xFFFFFFFFFFFFFFFF)

    def _raw(self, n: int) -> np.ndarray:
        # uint64 arithmetic wraps mod 2^64 by design; silence numpy's warning
        with np.errstate(over="ignore"):
            z = self._state + np.arange(1, n + 1, dtype=np.uint64) * _GAMMA
            self._state = np.uint64(self._state + np.uint64(n) * _GAMMA)
            z = (z ^ (z >> np.uint64(30))) * _MIX1
            z = (z ^ (z >> np.uint64(27))) * _MIX2
            z = z ^ (z >> np.uint64(31))
        return z

    def uniform(self, size=None) -> np.ndarray | float:
        if size is None:
            return float(self._raw(1)[0] >> np.uint64(11)) * _U53
        shape = (size,) if np.isscalar(size) else tuple(size)
        n = int(np.prod(shape))
        u = (self._raw(n) >> np.uint64(11)).astype(np.float64) * _U53
        return u.reshape(shape)

    def standard_normal(self, size=None) -> np.ndarray | float:
        if size is None:
            return float(self.standard_normal(1)[0])
        shape = (size,) if np.isscalar(size) else tuple(size)
        n = int(np.prod(shape))
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
        theta = 2.0 * np.pi * u[1::2]
        z = np.empty(2 * m)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:n].reshape(shape)

    def signs(self, size=None) -> np.ndarray | float:
        u = self.uniform(size)
        return np.where(u < 0.5, 1.0, -1.0) if size is not None else (1.0 if u < 0.5 else -1.0)


class EigenEstimateError(RuntimeError):
    """Power iteration failed to converge; carries the partial estimates."""

    def __init__(self, message: str, lam_min=None, lam_max=None):
        super().__init__(message)
        self.lam_min = lam_min
        self.lam_max = lam_max


def _power_iteration(
    matvec: Callable[[Vector], Vector], dim: int, tol: float, max_iter: int, rng: Rng
) -> float:
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    lam_prev = np.inf
    for _ in range(max_iter):
        w = matvec(v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        lam = float(v @ w)
        v = w / nw
        if abs(lam - lam_prev) <= tol * max(1.0, abs(lam)):
            return lam
        lam_prev = lam
    raise EigenEstimateError(
        f"power iteration did not converge in {max_iter} iterations",
        lam_max=lam_prev,
    )


def estimate_extreme_eigs(
    matvec: Callable[[Vector], Vector],
    dim: int,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a symmetric PSD operator.

    lambda_max by power iteration; lambda_min by power iteration on the
    shifted operator lambda_max * I - A.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    rng = Rng(0x51AB5EED)
    lam_max = _power_iteration(matvec, dim, tol, max_iter, rng)
    try:
        spread = _power_iteration(
            lambda v: lam_max * v - matvec(v), dim, tol, max_iter, rng
        )
    except EigenEstimateError as err:
        raise EigenEstimateError(str(err), lam_min=None, lam_max=lam_max) from err
    return lam_max - spread, lam_max


class QuadraticObjective:
    """f(x) = 1/2 (x - c)^T A (x - c) for a sparse SPD matrix A (CSR)."""

    def __init__(self, matrix: sp.spmatrix, center: Vector, mu: float,
                 lipschitz: float, description: Optional[dict] = None):
        self.matrix = sp.csr_matrix(matrix)
        self.center = np.asarray(center, dtype=np.float64)
        self.dim = self.center.size
        self.mu = float(mu)
        self.lipschitz = float(lipschitz)
        self.hessian_lipschitz = 0.0
        self.minimizer: Optional[Vector] = self.center
        self._description = description

    def value(self, x: Vector) -> float:
        r = x - self.center
        return 0.5 * float(r @ (self.matrix @ r))

    def gradient(self, x: Vector) -> Vector:
        return self.matrix @ (x - self.center)

    def description(self) -> dict:
        if self._description is None:
            raise ValueError("this quadratic was built ad hoc and has no description")
        return dict(self._description)


def build_laplacian2d(n: int) -> QuadraticObjective:
    """Five-point FD Laplacian on the unit square, n x n interior grid.

    Dirichlet boundary, spacing h = 1/(n+1), target point x* = 0.  Extreme
    eigenvalues are analytic: mu = (8/h^2) sin^2(pi h / 2) and
    L = (8/h^2) cos^2(pi h / 2), so kappa = cot^2(pi h / 2) = O(h^-2).
    """
    if n < 1:
        raise ValueError(f"grid parameter must be >= 1, got {n}")
    h = 1.0 / (n + 1)
    K = sp.diags([-1.0, 2.0, -1.0], offsets=[-1, 0, 1], shape=(n, n))
    eye = sp.identity(n)
    A = (sp.kron(eye, K) + sp.kron(K, eye)) / h**2
    mu = (8.0 / h**2) * np.sin(0.5 * np.pi * h) ** 2
    lipschitz = (8.0 / h**2) * np.cos(0.5 * np.pi * h) ** 2
    return QuadraticObjective(
        A.tocsr(), np.zeros(n * n), mu, lipschitz,
        description={"kind": "laplacian2d", "n": int(n)},
    )


# Smooth one-sided penalty h(t) = t^2/2 * exp(-eps/t) for t > 0, else 0.
# exp(-eps/t) underflows for t < eps/709 (double exponent floor); the
# analytic limit there is 0, so the cutoff returns it directly.

def piecewise_h(t, eps: float):
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    m = t > eps / 709.0
    tm = t[m]
    out[m] = 0.5 * tm**2 * np.exp(-eps / tm)
    return out


def piecewise_h_prime(t, eps: float):
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    m = t > eps / 709.0
    tm = t[m]
    out[m] = np.exp(-eps / tm) * (tm + 0.5 * eps)
    return out


def piecewise_h_second(t, eps: float):
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    m = t > eps / 709.0
    tm = t[m]
    out[m] = np.exp(-eps / tm) * (1.0 + eps / tm + 0.5 * (eps / tm) ** 2)
    return out


class PiecewiseSmoothObjective:
    """f(x) = sum_i h(a_i . x - b_i) + mu/2 ||x||^2 with h as above.

    The columns a_i are scaled so that ||A||_2 = sqrt(L - mu); since
    sup h'' = 1 this makes f mu-strongly convex and L-smooth.
    """

    def __init__(self, A: np.ndarray, b: Vector, mu: float, lipschitz: float,
                 eps: float, description: Optional[dict] = None):
        self.A = np.asarray(A, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.dim, self.p = self.A.shape
        self.mu = float(mu)
        self.lipschitz = float(lipschitz)
        self.eps = float(eps)
        self.hessian_lipschitz: Optional[float] = None
        self.minimizer: Optional[Vector] = None
        self._description = description

    def value(self, x: Vector) -> float:
        t = self.A.T @ x - self.b
        return float(piecewise_h(t, self.eps).sum() + 0.5 * self.mu * (x @ x))

    def gradient(self, x: Vector) -> Vector:
        t = self.A.T @ x - self.b
        return self.A @ piecewise_h_prime(t, self.eps) + self.mu * x

    def description(self) -> dict:
        return dict(self._description)


def build_piecewise(
    d: int = 100,
    p: int = 5,
    mu: float = 1.0,
    lipschitz: float = 1e4,
    eps: float = 1e-6,
    seed: int = 42,
) -> PiecewiseSmoothObjective:
    """Seeded piecewise problem; defaults mu=1, L=1e4, d=100, p=5, eps=1e-6.

    Stream order: the d*p entries of A (row-major), then the p entries of b;
    A is then rescaled to spectral norm sqrt(L - mu).
    """
    if d < 1 or p < 1:
        raise ValueError("d and p must be >= 1")
    if not (0.0 < mu < lipschitz):
        raise ValueError("need 0 < mu < lipschitz")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    rng = Rng(seed)
    A = rng.standard_normal((d, p))
    b = rng.standard_normal(p)
    _, gram_max = estimate_extreme_eigs(lambda w: A.T @ (A @ w), p, tol=1e-13)
    A *= np.sqrt((lipschitz - mu) / gram_max)
    return PiecewiseSmoothObjective(
        A, b, mu, lipschitz, eps,
        description={"kind": "piecewise", "d": int(d), "p": int(p), "mu": mu,
                     "lipschitz": lipschitz, "eps": eps, "seed": int(seed)},
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # evaluate 1 / (1 + e^-z) through exp of negative magnitudes only
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LogisticObjective:
    """l2-regularized logistic regression over m labelled columns a_i.

    f(x) = sum_i log(1 + exp(-b_i a_i . x)) + lam/2 ||x||^2, labels in {-1,+1}.
    mu = lam, L = lambda_max(sum a_i a_i^T) + lam, and the Hessian is
    Lipschitz with constant 0.11 * sum ||a_i||^3.
    """

    def __init__(self, A: np.ndarray, b: Vector, lam: float, lipschitz: float,
                 description: Optional[dict] = None):
        self.A = np.asarray(A, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.dim, self.m = self.A.shape
        self.lam = float(lam)
        self.mu = float(lam)
        self.lipschitz = float(lipschitz)
        norms = np.linalg.norm(self.A, axis=0)
        self.hessian_lipschitz = 0.11 * float((norms**3).sum())
        self.minimizer: Optional[Vector] = None
        self._description = description

    def value(self, x: Vector) -> float:
        s = self.b * (self.A.T @ x)
        return float(np.logaddexp(0.0, -s).sum() + 0.5 * self.lam * (x @ x))

    def gradient(self, x: Vector) -> Vector:
        s = self.b * (self.A.T @ x)
        return self.A @ (-self.b * _sigmoid(-s)) + self.lam * x

    def description(self) -> dict:
        return dict(self._description)


def build_logistic(
    d: int = 1000, m: int = 50, lam: float = 0.1, seed: int = 42
) -> LogisticObjective:
    """Seeded logistic problem; defaults lam=0.1, d=1000, m=50.

    Stream order: the d*m entries of A (row-major), then the m labels.
    """
    if d < 1 or m < 1:
        raise ValueError("d and m must be >= 1")
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    rng = Rng(seed)
    A = rng.standard_normal((d, m))
    b = rng.signs(m)
    _, gram_max = estimate_extreme_eigs(lambda w: A.T @ (A @ w), m, tol=1e-12)
    return LogisticObjective(
        A, b, lam, gram_max + lam,
        description={"kind": "logistic", "d": int(d), "m": int(m),
                     "lam": lam, "seed": int(seed)},
    )


def rebuild(description: dict) -> ObjectiveLike:
    """Reconstruct a problem bitwise-identically from its description."""
    kind = description.get("kind")
    if kind == "laplacian2d":
        return build_laplacian2d(description["n"])
    if kind == "piecewise":
        return build_piecewise(
            d=description["d"], p=description["p"], mu=description["mu"],
            lipschitz=description["lipschitz"], eps=description["eps"],
            seed=description["seed"],
        )
    if kind == "logistic":
        return build_logistic(
            d=description["d"], m=description["m"], lam=description["lam"],
            seed=description["seed"],
        )
    raise ValueError(f"unknown problem kind {kind!r}")


def check_gradient(f: ObjectiveLike, x: Vector) -> float:
    """Max per-coordinate relative error of grad f against central differences.

    Step 1e-6 * (1 + ||x||); relative to 1 + |gradient coordinate|.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (f.dim,):
        raise DimensionError(f"x has shape {x.shape}, expected ({f.dim},)")
    g = f.gradient(x)
    h = 1e-6 * (1.0 + float(np.linalg.norm(x)))
    worst = 0.0
    e = np.zeros_like(x)
    for i in range(f.dim):
        e[i] = h
        fd = (f.value(x + e) - f.value(x - e)) / (2.0 * h)
        e[i] = 0.0
        worst = max(worst, abs(fd - g[i]) / (1.0 + abs(g[i])))
    return worst
