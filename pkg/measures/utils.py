import math

import numpy as np
from django.conf import settings
from scipy.integrate import quad

from fourterm.exceptions import ToleranceFailure

SQRT3 = math.sqrt(3.0)
UPSILON_CONST = SQRT3 / (4 * math.pi)
G_CONST = 3 * SQRT3 / (16 * math.pi)
H_CONST = 3 * SQRT3 / (4 * math.pi)


# ============================================================================
# CLOSED-FORM DENSITIES
# ============================================================================
# Each helper takes an array and is only evaluated where 0 < x < 1 (resp. y);
# 1 - sqrt(1 - x) is always written as x / (1 + sqrt(1 - x)).

def upsilon_unit(x):
    """Density of the limit law on [0, 1]; +inf at the two endpoints, 0 outside."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0) & (x < 1)
    xi = x[inside]
    s = np.sqrt(1.0 - xi)
    v_plus = np.cbrt(1.0 + s)
    v_minus = np.cbrt(xi / (1.0 + s))
    out[inside] = UPSILON_CONST * (v_plus + v_minus) / (np.cbrt(xi) ** 2 * s)
    out[(x == 0) | (x == 1)] = np.inf
    return out


def g_profile(y):
    """Laguerre-type density on [0, 1] before the 27t/8 rescaling."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = (y > 0) & (y < 1)
    yi = y[inside]
    w = np.sqrt(1.0 - yi)
    lower = np.cbrt(yi / (1.0 + w))
    upper = np.cbrt(1.0 + w)
    out[inside] = G_CONST * ((1 + 3 * w) * lower - (1 - 3 * w) * upper) / np.cbrt(yi) ** 2
    out[y == 0] = np.inf
    return out


def h_profile(y):
    """Macdonald-type density on [0, 1] before the 27t**2/4 rescaling."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = (y > 0) & (y < 1)
    yi = y[inside]
    w = np.sqrt(1.0 - yi)
    out[inside] = H_CONST * (np.cbrt(1.0 + w) - np.cbrt(yi / (1.0 + w))) / np.cbrt(yi) ** 2
    out[y == 0] = np.inf
    return out


# ============================================================================
# QUADRATURE
# ============================================================================

def checked_quad(f, a, b, what='integral'):
    """scipy quad with the configured tolerances; trouble raises ToleranceFailure."""
    if a == b:
        return 0.0
    epsabs = settings.FOURTERM_QUAD_EPSABS
    out = quad(
        f, a, b,
        epsabs=epsabs,
        epsrel=settings.FOURTERM_QUAD_EPSREL,
        limit=settings.FOURTERM_QUAD_LIMIT,
        full_output=1,
    )
    if len(out) > 3:
        raise ToleranceFailure(
            f"Quadrature of {what} on [{a:g}, {b:g}] did not converge: {out[3].splitlines()[0]}",
            achieved=out[1],
            required=epsabs,
        )
    return out[0]


def endpoint_integral(f, lo, hi, a, b, what='integral'):
    """Integral of f over [a, b] within the support [lo, hi].

    The half next to lo is integrated in x = lo + u**3, the half next to
    hi in x = hi - v**2, which flattens x**(-2/3) and (hi - x)**(-1/2)
    endpoint behaviour.
    """
    a = max(a, lo)
    b = min(b, hi)
    if b <= a:
        return 0.0
    mid = 0.5 * (lo + hi)
    inner_lo = np.nextafter(lo, hi)
    inner_hi = np.nextafter(hi, lo)

    def near_lo(u):
        x = min(max(lo + u ** 3, inner_lo), inner_hi)
        return f(x) * 3.0 * u ** 2

    def near_hi(v):
        x = min(max(hi - v ** 2, inner_lo), inner_hi)
        return f(x) * 2.0 * v

    total = 0.0
    if a < mid:
        top = min(b, mid)
        total += checked_quad(near_lo, float(np.cbrt(a - lo)), float(np.cbrt(top - lo)), what)
    if b > mid:
        bottom = max(a, mid)
        total += checked_quad(near_hi, math.sqrt(hi - b), math.sqrt(hi - bottom), what)
    return total


def complex_endpoint_integral(f, lo, hi, what='integral'):
    """endpoint_integral for a complex integrand, real and imaginary parts apart."""
    re = endpoint_integral(lambda x: f(x).real, lo, hi, lo, hi, what)
    im = endpoint_integral(lambda x: f(x).imag, lo, hi, lo, hi, what)
    return complex(re, im)


def profile_average_density(profile, t, x):
    """(1/t) * integral over s in [0, t] of the [0, alpha(s)] density at x.

    Only s in [t_-(x), t_+(x)] contribute. The square-root singularity
    where alpha(s) = x is removed with s = t_- + w**2 (and s = t_+ - v**2
    when t_+ < t).
    """
    if x <= 0:
        return 0.0
    t_minus, t_plus = profile.interval(x)
    a = min(t, t_minus)
    b = min(t, t_plus)
    if b <= a:
        return 0.0

    def integrand(s):
        alpha = float(profile.alpha(s))
        if alpha - x <= 0 or x / alpha >= 1.0:
            return 0.0
        return float(upsilon_unit(np.array([x / alpha]))[0]) / alpha

    what = f'profile density at x={x:g}'
    if t_plus < t:
        mid = 0.5 * (a + b)
        total = checked_quad(lambda w: integrand(a + w * w) * 2 * w, 0.0, math.sqrt(mid - a), what)
        total += checked_quad(lambda v: integrand(b - v * v) * 2 * v, 0.0, math.sqrt(b - mid), what)
    else:
        total = checked_quad(lambda w: integrand(a + w * w) * 2 * w, 0.0, math.sqrt(b - a), what)
    return total / t
