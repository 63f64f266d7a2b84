"""Markov-process view of the stopping rule: exact transition probability,
Monte-Carlo simulation, large-n bounds, and the quantile sandwich."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .statkernel import phi, z_quantile

__all__ = [
    "TheoryParams",
    "TransitionEstimate",
    "TheoryBounds",
    "omega2_exact",
    "simulate_two_candidate",
    "theorem1_bounds",
    "lemma1_sandwich",
    "n_prime_tail",
    "theory_grid_csv",
]


@dataclass(frozen=True)
class TheoryParams:
    mu: float  # mean loss gap between the two candidates
    sigma: float  # per-row loss-gap standard deviation
    n: int
    alpha: float
    N_C: int = 2  # candidate count under the complexity cap
    S_star: float | None = None  # min |mu/sigma|; defaults to |mu|/sigma

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")

    @property
    def S(self) -> float:
        return self.mu / self.sigma

    @property
    def s_star(self) -> float:
        return abs(self.S) if self.S_star is None else self.S_star


@dataclass(frozen=True)
class TransitionEstimate:
    omega1: float  # P(stop at current n)
    omega2: float  # P(a larger n' is suggested)
    n_prime_samples: np.ndarray


@dataclass(frozen=True)
class TheoryBounds:
    omega1_lower: float
    omega2_upper: float
    n_prime_upper: float
    regime_ok: bool


def omega2_exact(p: TheoryParams) -> float:
    """Exact probability (two candidates) that the test fails to stop."""
    za = z_quantile(p.alpha)
    root_n_s = math.sqrt(p.n) * p.S
    return phi(math.sqrt(2.0) * za - root_n_s) - phi(-math.sqrt(2.0) * za - root_n_s)


def simulate_two_candidate(p: TheoryParams, trials: int, seed: int) -> TransitionEstimate:
    """Monte-Carlo draws of the observed gap under the normal approximation.

    Each trial draws d ~ N(mu, sigma^2/n) and applies the two-sided stopping
    rule; on non-rejection the suggested size n' = 2 Z_alpha^2 n / Z1^2 with
    Z1 = sqrt(n) d / sigma is recorded.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    za = z_quantile(p.alpha)
    d = rng.normal(p.mu, p.sigma / math.sqrt(p.n), size=trials)
    z1 = math.sqrt(p.n) * d / p.sigma
    reject = np.abs(z1) > math.sqrt(2.0) * za
    cont = ~reject
    n_prime = 2.0 * za * za * p.n / np.square(z1[cont & (z1 != 0.0)])
    omega2 = float(cont.mean())
    return TransitionEstimate(omega1=1.0 - omega2, omega2=omega2, n_prime_samples=n_prime)


def theorem1_bounds(p: TheoryParams) -> TheoryBounds:
    """Large-n stopping-probability and suggested-size bounds.

    Valid in the regime sqrt(n) S* > 2 sqrt(log(N/2alpha)); outside it the
    bounds are reported as-is with regime_ok False (they may be vacuous).
    """
    N = p.N_C
    log_term = math.log(N / (2.0 * p.alpha))
    if log_term <= 0:
        raise ValueError("N/(2 alpha) must exceed 1")
    gap = math.sqrt(p.n) * p.s_star - 2.0 * math.sqrt(log_term)
    regime_ok = gap > 0
    omega2_upper = N * math.sqrt(8.0 / math.pi * log_term) * math.exp(-0.5 * gap * gap)
    n_prime_upper = 4.0 * p.n * math.log(p.n) * N * N * log_term
    return TheoryBounds(
        omega1_lower=1.0 - omega2_upper,
        omega2_upper=omega2_upper,
        n_prime_upper=n_prime_upper,
        regime_ok=regime_ok,
    )


_LEMMA1_ALPHA_MAX = 1.0 / (10.0 * math.e)  # keeps log log (1/(10 alpha)) >= 0


def lemma1_sandwich(alpha: float) -> tuple[float, float, float]:
    """Two-sided bound on Z_alpha for small alpha; returns (lower, z, upper)."""
    if not 0.0 < alpha < _LEMMA1_ALPHA_MAX:
        raise ValueError(
            f"lemma valid only for very small alpha (< {_LEMMA1_ALPHA_MAX:.4f})"
        )
    inner = math.log(1.0 / (10.0 * alpha))
    lower = math.sqrt(2.0 * inner - math.log(inner))
    upper = math.sqrt(2.0 * math.log(1.0 / (2.0 * alpha)))
    z = z_quantile(alpha)
    if not lower <= z <= upper:
        raise AssertionError(f"sandwich violated: {lower} <= {z} <= {upper}")
    return lower, z, upper


def n_prime_tail(p: TheoryParams, delta: float) -> float:
    """P(n' >= 2 Z_alpha^2 n / delta^2) for the two-candidate process."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    root_n_s = math.sqrt(p.n) * p.S
    return phi(delta - root_n_s) - phi(-delta - root_n_s)


def theory_grid_csv(grid: dict, out_path, trials: int = 100000, seed: int = 0) -> None:
    """Evaluate exact/simulated/bounded quantities over a parameter grid.

    grid keys: "n", "S", "alpha", "N" (lists). One CSV row per combination.
    """
    with open(out_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(
            ["n", "S_star", "N_C", "alpha", "omega2_exact", "omega2_sim", "omega2_bound", "n_prime_bound"]
        )
        for n in grid["n"]:
            for s in grid["S"]:
                for alpha in grid["alpha"]:
                    for N in grid.get("N", [2]):
                        p = TheoryParams(mu=s, sigma=1.0, n=n, alpha=alpha, N_C=N)
                        exact = omega2_exact(p)
                        sim = simulate_two_candidate(p, trials, seed).omega2
                        b = theorem1_bounds(p)
                        w.writerow(
                            [n, s, N, alpha, f"{exact:.6f}", f"{sim:.6f}",
                             f"{b.omega2_upper:.6g}", f"{b.n_prime_upper:.6g}"]
                        )
