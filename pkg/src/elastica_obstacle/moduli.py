"""Scalar functions of the elliptic modulus and the thresholds derived from them.

    f(q) = (4q^4 - 5q^2 + 1) K(q) + (-8q^4 + 8q^2 - 1) E(q)
    g(q) = 8 (2E(q) - K(q))^2 (2q^2 - 1)
    h(q) = ((4q^2 - 3) K(q) + 2E(q)) / sqrt(2q^2 - 1)

On [1/sqrt(2), 1) the function g rises from 0 to its maximum ``lambda_hat`` at
the root ``q_hat`` of f, falls back to 0 at the root ``q_star`` of 2E - K and
then grows without bound.  Each monotone piece is a :class:`Branch`.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .elliptic import EllipticDomainError, complete_E, complete_K

__all__ = [
    "Branch",
    "Thresholds",
    "NoSolutionError",
    "f_of",
    "g_of",
    "h_of",
    "dh_dq",
    "solve_thresholds",
    "invert_g",
    "n_lambda",
    "h_lambda",
    "Q_of",
    "alpha0",
]

SQRT_HALF = 1.0 / math.sqrt(2.0)
_XTOL = 1e-15
_MAXITER = 200


class NoSolutionError(ValueError):
    """Raised when g(q) = c has no solution on the requested branch."""


class Branch(enum.Enum):
    Branch1 = 1
    Branch2 = 2
    Branch3 = 3


@dataclass(frozen=True)
class Thresholds:
    q_hat: float
    q_star: float
    lambda_hat: float
    h_star: float

    def as_dict(self) -> dict:
        return {
            "q_hat": self.q_hat,
            "q_star": self.q_star,
            "lambda_hat": self.lambda_hat,
            "h_star": self.h_star,
        }


def _check_range(q, lo_open: bool):
    q = np.asarray(q, dtype=float)
    lo_bad = q <= SQRT_HALF if lo_open else q < SQRT_HALF - 1e-15
    if np.any(lo_bad) or np.any(q >= 1.0) or not np.all(np.isfinite(q)):
        bound = "(1/sqrt2, 1)" if lo_open else "[1/sqrt2, 1)"
        raise EllipticDomainError(f"modulus must lie in {bound}")
    return q


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def Q_of(q):
    """2E(q) - K(q); strictly decreasing from pi/2 at q = 0."""
    return _out(2.0 * np.asarray(complete_E(q)) - np.asarray(complete_K(q)))


def f_of(q):
    q = _check_range(q, lo_open=False)
    q2 = q * q
    K, E = np.asarray(complete_K(q)), np.asarray(complete_E(q))
    return _out((4 * q2 * q2 - 5 * q2 + 1) * K + (-8 * q2 * q2 + 8 * q2 - 1) * E)


def g_of(q):
    q = _check_range(q, lo_open=False)
    Q = np.asarray(Q_of(q))
    return _out(8.0 * Q * Q * np.maximum(2 * q * q - 1, 0.0))


def h_of(q):
    """h(q); blows up as q approaches 1/sqrt(2) from above."""
    q = _check_range(q, lo_open=True)
    K, E = np.asarray(complete_K(q)), np.asarray(complete_E(q))
    return _out(((4 * q * q - 3) * K + 2 * E) / np.sqrt(2 * q * q - 1))


def dh_dq(q):
    """Closed-form derivative h'(q) = -f(q) / ((2q^2 - 1)^(3/2) q (1 - q^2))."""
    q = _check_range(q, lo_open=True)
    return _out(-np.asarray(f_of(q)) / ((2 * q * q - 1) ** 1.5 * q * (1 - q * q)))


def alpha0() -> float:
    """Scaling of the rectangular elastica, 4E(1/sqrt2) - 2K(1/sqrt2)."""
    return 4.0 * complete_E(SQRT_HALF) - 2.0 * complete_K(SQRT_HALF)


def _root(fun, a, b):
    return brentq(fun, a, b, xtol=_XTOL, rtol=4 * np.finfo(float).eps, maxiter=_MAXITER)


@functools.lru_cache(maxsize=1)
def solve_thresholds() -> Thresholds:
    """Compute q_hat, q_star, lambda_hat and h_star.

    The roots are bracketed using the sign pattern of f and 2E - K
    and refined by Brent's method.
    """
    q_hat = _root(f_of, 0.75, 0.85)
    q_star = _root(Q_of, 0.85, 0.95)
    return Thresholds(
        q_hat=q_hat,
        q_star=q_star,
        lambda_hat=g_of(q_hat),
        h_star=math.sqrt(2.0) / alpha0(),
    )


def invert_g(c: float, branch: Branch) -> float:
    """Solve g(q) = c with q restricted to ``branch``."""
    if not np.isfinite(c) or c <= 0:
        raise EllipticDomainError(f"invert_g requires c > 0, got {c}")
    th = solve_thresholds()
    branch = Branch(branch)
    if branch in (Branch.Branch1, Branch.Branch2):
        if abs(c - th.lambda_hat) <= 1e-12:
            return th.q_hat
        if c > th.lambda_hat:
            raise NoSolutionError(
                f"g(q) = {c} has no solution on {branch.name}: c exceeds lambda_hat={th.lambda_hat:.12g}"
            )
        lo, hi = (SQRT_HALF, th.q_hat) if branch is Branch.Branch1 else (th.q_hat, th.q_star)
        return _root(lambda q: g_of(q) - c, lo, hi)
    # Branch3: g grows without bound as q -> 1; expand the bracket towards 1
    lo, hi = th.q_star, 1.0 - 1e-3
    while g_of(hi) < c:
        hi = 1.0 - (1.0 - hi) * 1e-2
        if 1.0 - hi < 1e-15:
            raise NoSolutionError(f"g(q) = {c} is out of reach in double precision")
    return _root(lambda q: g_of(q) - c, lo, hi)


def n_lambda(lam: float) -> int:
    """Smallest integer n with n >= sqrt(lam / lambda_hat)."""
    if not np.isfinite(lam) or lam <= 0:
        raise EllipticDomainError(f"lambda must be positive, got {lam}")
    ratio = math.sqrt(lam / solve_thresholds().lambda_hat)
    n = math.ceil(ratio)
    # guard the exact-integer case against rounding just above it
    if n - ratio > 1.0 - 1e-12:
        n -= 1
    return max(n, 1)


def h_lambda(lam: float) -> float:
    """Apex height q2/(2E(q2) - K(q2)) of the longer arc, q2 = invert_g(lam, Branch2)."""
    if not np.isfinite(lam) or lam <= 0:
        raise EllipticDomainError(f"lambda must be positive, got {lam}")
    if lam > solve_thresholds().lambda_hat + 1e-12:
        raise EllipticDomainError("h_lambda requires lambda <= lambda_hat")
    q2 = invert_g(lam, Branch.Branch2)
    return q2 / Q_of(q2)
