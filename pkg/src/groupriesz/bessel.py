"""Scaled Bessel function J~_nu(r) = J_nu(r) / r^nu.

Two branches meet at ``r_switch(nu) = 12 + nu^2/2``:

* ascending power series for r <= r_switch.  The series suffers
  catastrophic cancellation once r is moderately large (the largest term
  exceeds the value by ~(r/2)^2 digits), so the partial sums track their
  largest term and the evaluation is repeated in mpmath arithmetic with
  enough guard digits whenever float64 would lose more than 8 digits;
* Hankel asymptotic expansion for r > r_switch, truncated adaptively at
  the smallest term.  For half-integer orders the expansion terminates
  and is exact, which covers every n - 1/2 order used by the kernels.

Scalar calls go through the branch logic directly; array calls on the
series side are served by a cached Chebyshev interpolant per order (the
function is entire, so the proxy converges spectrally).
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

__all__ = ["bessel_tilde", "bessel_tilde_scalar", "r_switch"]

_MAX_SERIES_TERMS = 400
_MAX_ASYMPTOTIC_TERMS = 80
_FLOAT64_CANCEL_LIMIT = 1e8
_proxy_cache: dict[float, "np.polynomial.chebyshev.Chebyshev"] = {}


def r_switch(nu: float) -> float:
    """Branch switchover radius; validated by the continuity tests."""
    return 12.0 + 0.5 * nu * nu


def _series_float(nu: float, r: float) -> tuple[float, float]:
    """Ascending series in float64; returns (value, cancellation ratio)."""
    x = 0.25 * r * r
    term = 1.0 / (2.0**nu * math.gamma(nu + 1.0))
    acc = term
    peak = abs(term)
    for k in range(1, _MAX_SERIES_TERMS):
        term *= -x / (k * (nu + k))
        acc += term
        peak = max(peak, abs(term))
        if abs(term) < 1e-18 * max(peak, 1e-300):
            break
    cancel = peak / abs(acc) if acc != 0 else math.inf
    return acc, cancel


def _series_mp(nu: float, r: float, digits_lost: float) -> float:
    """Ascending series at elevated precision (cancellation-proof)."""
    dps = int(25 + digits_lost)
    with mpmath.workdps(dps):
        x = mpmath.mpf(r) ** 2 / 4
        term = 1 / (mpmath.mpf(2) ** nu * mpmath.gamma(nu + 1))
        acc = term
        for k in range(1, _MAX_SERIES_TERMS * 4):
            term *= -x / (k * (nu + k))
            acc += term
            if abs(term) < mpmath.mpf(10) ** (-dps) * abs(acc):
                break
        return float(acc)


def _series(nu: float, r: float) -> float:
    val, cancel = _series_float(nu, r)
    if cancel < _FLOAT64_CANCEL_LIMIT:
        return val
    return _series_mp(nu, r, math.log10(max(cancel, 10.0)))


def _hankel(nu: float, r: np.ndarray) -> np.ndarray:
    """Asymptotic expansion; exact for half-integer nu, else truncated at
    the smallest term."""
    r = np.asarray(r, dtype=float)
    four_nu2 = 4.0 * nu * nu
    p = np.ones_like(r)
    q = np.zeros_like(r)
    coef = np.ones_like(r)
    smallest = np.inf
    for j in range(1, _MAX_ASYMPTOTIC_TERMS):
        factor = (four_nu2 - (2 * j - 1) ** 2) / (8.0 * j)
        coef = coef * factor / r
        mag = float(np.abs(coef).max(initial=0.0))
        if mag == 0.0:
            break
        if mag > smallest:
            coef = coef * 0.0
            break
        smallest = min(smallest, mag)
        quarter = j % 4
        if quarter == 0:
            p += coef
        elif quarter == 1:
            q += coef
        elif quarter == 2:
            p -= coef
        else:
            q -= coef
        if mag < 1e-18:
            break
    omega = r - nu * np.pi / 2 - np.pi / 4
    j_val = np.sqrt(2.0 / (np.pi * r)) * (np.cos(omega) * p - np.sin(omega) * q)
    return j_val / r**nu


def _series_proxy(nu: float):
    """Chebyshev interpolant of the series branch on [0, r_switch]."""
    key = round(float(nu), 12)
    proxy = _proxy_cache.get(key)
    if proxy is None:
        rs = r_switch(nu)
        deg = int(rs) + 60

        def f(x):
            return np.array([_series(nu, float(t)) for t in np.atleast_1d(x)])

        proxy = np.polynomial.chebyshev.Chebyshev.interpolate(
            f, deg, domain=[0.0, rs]
        )
        _proxy_cache[key] = proxy
    return proxy


def bessel_tilde_scalar(nu: float, r: float) -> float:
    """J_nu(r) / r^nu for a single r >= 0, continuous through r = 0."""
    if r < 0:
        raise ValueError("bessel_tilde requires r >= 0")
    if r > r_switch(nu):
        return float(_hankel(nu, np.array([r]))[0])
    return _series(nu, r)


def bessel_tilde(nu: float, r):
    """J_nu(r) / r^nu, vectorized over r (scalar in, scalar out).

    At r = 0 the value is 1 / (2^nu Gamma(nu + 1)).
    """
    scalar = np.isscalar(r) or (isinstance(r, np.ndarray) and r.ndim == 0)
    arr = np.atleast_1d(np.asarray(r, dtype=float))
    if arr.size and float(arr.min()) < 0:
        raise ValueError("bessel_tilde requires r >= 0")
    out = np.empty_like(arr)
    cut = r_switch(nu)
    low = arr <= cut
    if low.any():
        out[low] = _series_proxy(nu)(arr[low])
    if (~low).any():
        out[~low] = _hankel(nu, arr[~low])
    return float(out[0]) if scalar else out.reshape(np.shape(r))
