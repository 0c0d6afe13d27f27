#!/usr/bin/env python3
"""End-to-end theory verification outside pytest.

Runs every per-iteration contraction check and dissipation sweep on the
three benchmark problems and prints one PASS/FAIL line per check.  Exits
nonzero if anything fails.

Usage: python scripts/verify_theory.py [--seed 42]
"""

import argparse
import sys

sys.path.insert(0, "src")

import numpy as np

import agmx
from agmx import (
    ContractionTheorem,
    LyapunovKind,
    MethodKind,
    SolverConfig,
    contraction_residuals,
    shift_schedule,
    solve,
    strong_lyapunov_terms,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    problems = {
        "laplacian2d(n=39)": agmx.build_laplacian2d(39),
        "piecewise(defaults)": agmx.ensure_minimizer(agmx.build_piecewise()),
        "logistic(defaults)": agmx.ensure_minimizer(agmx.build_logistic()),
    }
    failures = 0

    def report(ok, label, detail):
        nonlocal failures
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")

    checks = [
        (ContractionTheorem.THM_HNAG_FUNCVAL, MethodKind.HNAG),
        (ContractionTheorem.THM_HNAG_PLUS, MethodKind.HNAG_PLUS),
    ]
    for name, f in problems.items():
        x0 = agmx.Rng(args.seed).uniform(f.dim)
        for theorem, method in checks:
            trace = solve(f, SolverConfig(method=method), x0)
            rep = contraction_residuals(theorem, trace, f)
            report(rep.passes(1e-10), f"{theorem.value} on {name}",
                   f"{trace.iterations} iters, "
                   f"viol/E0={rep.max_violation / rep.initial_energy:.2e}")
        if name.startswith("laplacian"):
            trace = solve(f, SolverConfig(method=MethodKind.HNAG), x0)
            rep = contraction_residuals(ContractionTheorem.PROP_QUADRATIC, trace, f)
            report(rep.passes(1e-10), f"prop_quadratic on {name}",
                   f"viol/E0={rep.max_violation / rep.initial_energy:.2e}")

    sweeps = [
        (LyapunovKind.E_HNAG, MethodKind.HNAG, 0.0),
        (LyapunovKind.E_HNAG_PLUS, MethodKind.HNAG_PLUS, 0.0),
        (LyapunovKind.E_PARTIAL, MethodKind.HNAG, 0.5),
        (LyapunovKind.E_PARTIAL, MethodKind.HNAG, 0.99),
    ]
    for name, f in problems.items():
        xstar = np.asarray(f.minimizer)
        for kind, method, frac in sweeps:
            p = agmx.make_params(method, f.mu, f.lipschitz)
            beta = p.alpha_beta / p.alpha
            rng = agmx.Rng(args.seed)
            worst = np.inf
            for i in range(100):
                scale = (1e-2, 1.0, 50.0)[i % 3]
                x = xstar + scale * rng.standard_normal(f.dim)
                y = xstar + scale * rng.standard_normal(f.dim)
                lhs, rhs = strong_lyapunov_terms(kind, f, x, y, beta, frac * f.mu)
                worst = min(worst, (lhs - rhs) + 1e-12 * (1 + abs(lhs)))
            tag = kind.value if frac == 0.0 else f"{kind.value}(mu_hat={frac}mu)"
            report(worst >= 0.0, f"{tag} sweep on {name}", f"worst margin {worst:.2e}")

    for rho in (1e-2, 1e-4):
        s = shift_schedule(delta0=1e-4, a=0.125, rho=rho, k_max=10**4)
        gap = abs(s.r[-1] - s.limit_rate)
        report(s.admissible and s.cancellation_ok and gap <= 1e-6,
               f"shift schedule rho={rho:g}",
               f"admissible={s.admissible}, cancellation={s.cancellation_ok}, "
               f"|r_k-limit|={gap:.2e}")

    print(f"\n{failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
