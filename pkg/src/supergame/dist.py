"""Shock-distribution machinery: CDFs, log interval masses, truncated sampling.

All functions accept scalars or numpy arrays and broadcast. Extended reals
(+/-inf) are legal inputs wherever a truncation point or bucket boundary is
expected. Everything that can underflow in probability space is also offered
in log space; the sampler and likelihood code use the log forms exclusively.
"""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy import special

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Probabilities passed to quantile() outside [QUANTILE_FLOOR, 1-QUANTILE_FLOOR]
# are clamped to the nearest endpoint; a counter records how often. The floor
# sits at 1e-16 so that quantile(cdf(x)) round-trips through |x| <= 8:
# cdf(-8) ~ 6.2e-16 must stay inside the supported range.
QUANTILE_FLOOR = 1e-16
_LOG_QUANTILE_CEIL = math.log1p(-QUANTILE_FLOOR)

_clamp_count = 0


def quantile_clamp_count() -> int:
    """Number of quantile evaluations clamped to the supported range so far."""
    return _clamp_count


def reset_quantile_clamp_count() -> None:
    global _clamp_count
    _clamp_count = 0


def _record_clamps(n: int) -> None:
    global _clamp_count
    if n:
        _clamp_count += int(n)


class ShockFamily(enum.Enum):
    """Standardized iid shock distribution (zero location, unit scale)."""

    NORMAL = "normal"
    LOGISTIC = "logistic"


class TruncationSide(enum.Enum):
    BELOW_OR_EQUAL = "below_or_equal"
    ABOVE = "above"


def cdf(x, fam: ShockFamily = ShockFamily.NORMAL):
    """F(x); +/-inf map to 1/0 exactly."""
    x = np.asarray(x, dtype=float)
    if fam is ShockFamily.NORMAL:
        return special.ndtr(x)
    return special.expit(x)


def pdf(x, fam: ShockFamily = ShockFamily.NORMAL):
    out = np.exp(log_pdf(x, fam))
    return out


def log_pdf(x, fam: ShockFamily = ShockFamily.NORMAL):
    """log f(x); -inf at x = +/-inf."""
    x = np.asarray(x, dtype=float)
    if fam is ShockFamily.NORMAL:
        with np.errstate(invalid="ignore"):
            out = -0.5 * x * x - _LOG_SQRT_2PI
        # x = +/-inf gives -inf from the quadratic term; silence inf*inf NaN paths
        return np.where(np.isinf(x), -np.inf, out)
    return -np.logaddexp(0.0, x) - np.logaddexp(0.0, -x)


def log_cdf(x, fam: ShockFamily = ShockFamily.NORMAL):
    """log F(x), accurate far into the left tail."""
    x = np.asarray(x, dtype=float)
    if fam is ShockFamily.NORMAL:
        return special.log_ndtr(x)
    return -np.logaddexp(0.0, -x)


def log_sf(x, fam: ShockFamily = ShockFamily.NORMAL):
    """log(1 - F(x)); both families are symmetric so this is log F(-x)."""
    return log_cdf(np.negative(x), fam)


def quantile(q, fam: ShockFamily = ShockFamily.NORMAL):
    """Inverse CDF, clamping q outside [1e-15, 1-1e-15] to the nearest endpoint."""
    q = np.asarray(q, dtype=float)
    clamped = np.clip(q, QUANTILE_FLOOR, 1.0 - QUANTILE_FLOOR)
    _record_clamps(np.count_nonzero(clamped != q))
    if fam is ShockFamily.NORMAL:
        return special.ndtri(clamped)
    return np.log(clamped) - np.log1p(-clamped)


def _log1mexp(x):
    """log(1 - exp(x)) for x <= 0, stable near both ends."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < -math.log(2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[small] = np.log1p(-np.exp(x[small]))
        rest = ~small
        out[rest] = np.log(-np.expm1(x[rest]))
    return out


def _quantile_from_log(lp, fam: ShockFamily):
    """Inverse CDF evaluated at exp(lp); exact arbitrarily deep in the left tail."""
    lp = np.asarray(lp, dtype=float)
    capped = np.minimum(lp, _LOG_QUANTILE_CEIL)
    _record_clamps(np.count_nonzero(capped != lp))
    if fam is ShockFamily.NORMAL:
        return special.ndtri_exp(capped)
    return capped - _log1mexp(capped)


def log_interval_mass(lower, upper, fam: ShockFamily = ShockFamily.NORMAL):
    """log(F(upper) - F(lower)) in a tail-stable form.

    Intervals entirely inside one tail are evaluated through the complementary
    CDF of that tail, so the result keeps full relative accuracy even when the
    mass is far below the double-precision underflow threshold. lower == upper
    gives -inf; lower > upper is rejected.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(lower > upper):
        raise ValueError("log_interval_mass requires lower <= upper")
    lower, upper = np.broadcast_arrays(lower, upper)
    out = np.full(lower.shape, -np.inf)

    nonempty = lower < upper
    left = nonempty & (upper <= 0)
    right = nonempty & (lower >= 0)
    middle = nonempty & ~left & ~right

    if np.any(left):
        lc_up = log_cdf(upper[left], fam)
        lc_lo = log_cdf(lower[left], fam)
        out[left] = lc_up + _log1mexp(lc_lo - lc_up)
    if np.any(right):
        ls_lo = log_sf(lower[right], fam)
        ls_up = log_sf(upper[right], fam)
        out[right] = ls_lo + _log1mexp(ls_up - ls_lo)
    if np.any(middle):
        with np.errstate(divide="ignore"):
            out[middle] = np.log(cdf(upper[middle], fam) - cdf(lower[middle], fam))
    if out.ndim == 0:
        return float(out)
    return out


def sample_truncated(q, bound, side: TruncationSide, fam: ShockFamily = ShockFamily.NORMAL):
    """Inverse-probability-transform draw from F truncated at `bound`.

    side=BELOW_OR_EQUAL maps q in (0,1) onto (-inf, bound]; side=ABOVE maps it
    onto (bound, inf). Deterministic in q, which is what makes common random
    numbers work. The returned value is nudged onto the correct side of the
    bound whenever quantile rounding would put it on the wrong one.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0) or np.any(q >= 1.0):
        raise ValueError("q must lie strictly inside (0, 1)")
    bound = np.asarray(bound, dtype=float)

    if side is TruncationSide.BELOW_OR_EQUAL:
        if np.any(np.isneginf(bound)):
            raise ValueError("bound = -inf leaves no support below it")
        lp = np.log(q) + log_cdf(bound, fam)
        draw = _quantile_from_log(lp, fam)
        draw = np.minimum(draw, bound)
    elif side is TruncationSide.ABOVE:
        if np.any(np.isposinf(bound)):
            raise ValueError("bound = +inf leaves no support above it")
        lsf = np.log1p(-q) + log_sf(bound, fam)
        draw = -_quantile_from_log(lsf, fam)
        bad = draw <= bound
        if np.any(bad):
            draw = np.where(bad, np.nextafter(bound, np.inf), draw)
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"unknown truncation side: {side!r}")
    if draw.ndim == 0:
        return float(draw)
    return draw
