"""Static spectrum of the invariant eigenproblem -psi'' + |x| psi = lambda psi.

With hbar = 1 and the mass scaled out, the matched solutions on the two
half-lines are Airy functions of the shifted coordinate, and the matching
condition at the origin picks the eigenvalues from the negative zeros of
Ai or Ai':

    even n:  psi'(0) = 0  ->  lambda_n = -a'_{n/2+1}
    odd  n:  psi(0)  = 0  ->  lambda_n = -a_{(n+1)/2}

Eigenfunctions are phi_n(x) = N_n Ai(|x| - lambda_n) for even n and
sgn(x) N_n Ai(|x| - lambda_n) for odd n (sgn(0) = 0), with

    even: N_n = 1 / (sqrt(-2 a') Ai(a'))
    odd:  N_n = 1 / (sqrt(2) Ai'(a))

which normalize the full-line integral to 1 through the tail identity
int_a^inf Ai^2 = Ai'(a)^2 - a Ai(a)^2; the same identity makes each
half-line carry exactly 1/2.  The analytic continuation used by the
time-dependent solution keeps the region branch explicit:
region 1 evaluates Ai(z - lambda), region 2 evaluates +-Ai(-z - lambda),
because |.| of a complex argument would be meaningless.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .airy import airy_derivative_zero, airy_eval, airy_eval_many, airy_function_zero

__all__ = [
    "MAX_LEVEL",
    "SpectralLevel",
    "EigenfunctionSample",
    "level",
    "eigenfunction",
    "eigenfunction_continued",
    "sample_eigenfunction",
    "density",
    "tail_integral",
]

MAX_LEVEL = 40


@dataclass(frozen=True)
class SpectralLevel:
    """One bound level of the invariant: index, parity, lambda, N."""

    n: int
    parity: str              # "even" | "odd"
    eigenvalue: float
    norm_const: float


@dataclass(frozen=True)
class EigenfunctionSample:
    """One evaluation point: which state, where, which branch, what value."""

    n: int
    x: complex
    region: str              # "1" | "2" | "auto"
    value: complex


@functools.lru_cache(maxsize=None)
def level(n: int) -> SpectralLevel:
    """Level data for quantum number n (0-based, n <= 40)."""
    if not 0 <= n <= MAX_LEVEL:
        raise ValueError(f"level index must lie in 0..{MAX_LEVEL}")
    if n % 2 == 0:
        a = airy_derivative_zero(n // 2 + 1).location
        lam = -a
        norm = 1.0 / (np.sqrt(-2.0 * a) * airy_eval(a).ai.real)
        return SpectralLevel(n=n, parity="even", eigenvalue=lam, norm_const=float(norm))
    a = airy_function_zero((n + 1) // 2).location
    lam = -a
    norm = 1.0 / (np.sqrt(2.0) * airy_eval(a).ai_prime.real)
    return SpectralLevel(n=n, parity="odd", eigenvalue=lam, norm_const=float(norm))


def eigenfunction(n: int, x):
    """phi_n at real x (scalar or array); real-valued by construction."""
    lev = level(n)
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    vals = airy_eval_many(np.abs(xa) - lev.eigenvalue)[0].real * lev.norm_const
    if lev.parity == "odd":
        vals = vals * np.sign(xa)        # sgn(0) = 0 zeroes the origin exactly
    return float(vals[0]) if scalar else vals


def eigenfunction_continued(n: int, z, region: int):
    """Analytic continuation of phi_n with the half-line branch explicit.

    Region 1 (x >= 0 branch) evaluates N Ai(z - lambda); region 2 evaluates
    +-N Ai(-z - lambda), the sign carrying the parity of the state.
    """
    if region not in (1, 2):
        raise ValueError("region must be 1 (x >= 0) or 2 (x <= 0)")
    lev = level(n)
    za = np.asarray(z, dtype=complex)
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    if region == 1:
        vals = airy_eval_many(za - lev.eigenvalue)[0] * lev.norm_const
    else:
        sign = 1.0 if lev.parity == "even" else -1.0
        vals = sign * airy_eval_many(-za - lev.eigenvalue)[0] * lev.norm_const
    return complex(vals[0]) if scalar else vals


def sample_eigenfunction(n: int, x, region: str = "auto") -> EigenfunctionSample:
    """Evaluate one point with the branch spelled out in the record.

    region "auto" needs a real coordinate (the branch is then the sign of x);
    complex coordinates must name their branch explicitly.
    """
    if region not in ("1", "2", "auto"):
        raise ValueError('region must be "1", "2" or "auto"')
    zc = complex(x)
    if region == "auto":
        if zc.imag != 0.0:
            raise ValueError("region auto is only defined for real coordinates")
        value = complex(eigenfunction(n, zc.real))
    else:
        value = eigenfunction_continued(n, zc, int(region))
    return EigenfunctionSample(n=n, x=zc, region=region, value=value)


def density(n: int, x):
    """Probability density phi_n(x)^2 on the real line."""
    vals = eigenfunction(n, x)
    return vals * vals


def tail_integral(a: float) -> float:
    """int_a^inf Ai^2, by the closed identity Ai'(a)^2 - a Ai(a)^2."""
    v = airy_eval(a)
    return float(v.ai_prime.real**2 - a * v.ai.real**2)
