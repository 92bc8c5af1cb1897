import cmath
import math

import numpy as np
from numpy.polynomial import polynomial as P

from fourterm.exceptions import AmbiguityError

K = 4.0 / 27.0
OMEGA = cmath.exp(2j * math.pi / 3)


# ============================================================================
# BRANCHES
# ============================================================================

def sqrt_branch(w):
    """sqrt(rho e^{i theta}) = rho**(1/2) e^{i theta/2}, theta in [0, 2 pi)."""
    w = complex(w)
    theta = math.atan2(w.imag, w.real)
    if theta < 0:
        theta += 2 * math.pi
    return math.sqrt(abs(w)) * cmath.exp(0.5j * theta)


def cbrt_branch(w):
    """(rho e^{i theta})**(1/3) = rho**(1/3) e^{i theta/3}, theta in (-pi, pi]."""
    w = complex(w)
    if w == 0:
        return 0j
    theta = math.atan2(w.imag, w.real)
    if theta == -math.pi:
        theta = math.pi
    return abs(w) ** (1.0 / 3.0) * cmath.exp(1j * theta / 3)


def distance_to_cut(z):
    """Distance from z to the segment [0, 1]."""
    z = complex(z)
    return abs(z - min(max(z.real, 0.0), 1.0))


# ============================================================================
# DIRECT FORMULA
# ============================================================================

def phi_formula(z):
    """phi straight from the branch formula.

    On the negative real axis both one-sided limits equal the real value
    (27/4)((3/2)|x|**(1/3)((s+1)**(1/3) - (s-1)**(1/3)) - 1), s = sqrt(1 - x),
    which is used there since the principal conventions land on neither side.
    """
    z = complex(z)
    if z.imag == 0 and z.real < 0:
        x = z.real
        s = math.sqrt(1.0 - x)
        inner = 1.5 * abs(x) ** (1.0 / 3.0) * ((s + 1) ** (1.0 / 3.0) - (s - 1) ** (1.0 / 3.0))
        return complex(27.0 / 4.0 * (inner - 1.0))
    root = sqrt_branch(1.0 - z)
    u_plus = -1.0 + root
    u_minus = -1.0 - root
    bracket = OMEGA * cbrt_branch(u_plus) + cbrt_branch(u_minus)
    return 27.0 / 4.0 * (1.5 * OMEGA * cbrt_branch(z) * bracket - 1.0)


def polish_root(z, w, steps=3):
    """Newton on F(w) = (1 + K w)**3 - z w, skipping steps that would jump branch."""
    for _ in range(steps):
        base = 1.0 + K * w
        F = base ** 3 - z * w
        dF = 3 * K * base ** 2 - z
        if abs(dF) <= 1e-4 * max(1.0, abs(z)):
            break
        delta = F / dF
        if abs(delta) > 1e-8 * max(1.0, abs(w)):
            break
        w = w - delta
        if delta == 0:
            break
    return w


# ============================================================================
# CUBIC ORACLE
# ============================================================================

def cubic_roots(z):
    """Roots of K**3 w**3 + 3 K**2 w**2 + (3K - z) w + 1."""
    return np.roots([K ** 3, 3 * K ** 2, 3 * K - z, 1.0])


def polish_cubic(z, w, steps=3):
    for _ in range(steps):
        value = ((K ** 3 * w + 3 * K ** 2) * w + (3 * K - z)) * w + 1.0
        slope = (3 * K ** 3 * w + 6 * K ** 2) * w + (3 * K - z)
        if slope == 0:
            break
        w = w - value / slope
    return w


def homotopy_path(z, anchor, arc_step=math.pi / 32, radial_ratio=1.25):
    """Points from anchor (real, positive) to z: an arc at |anchor|, then a radial leg."""
    angle = cmath.phase(z)
    if angle == -math.pi:
        angle = math.pi
    arc_count = max(1, int(math.ceil(abs(angle) / arc_step)))
    path = [anchor * cmath.exp(1j * angle * i / arc_count) for i in range(1, arc_count + 1)]

    radius = abs(z)
    radial_count = max(1, int(math.ceil(abs(math.log(radius / anchor)) / math.log(radial_ratio))))
    direction = cmath.exp(1j * angle)
    path += [anchor * (radius / anchor) ** (i / radial_count) * direction
             for i in range(1, radial_count + 1)]
    path[-1] = complex(z)
    return path


def track_root(z, anchor, spacing_floor=1e-7, max_halvings=30):
    """Follow the root with w ~ 1/z from the anchor along homotopy_path.

    Each step keeps the root nearest to the previous one; a step whose
    displacement exceeds a tenth of the root spacing is halved. Roots
    closer than spacing_floor (relative) make the choice ambiguous.
    """
    start = complex(anchor)
    roots = cubic_roots(start)
    w = polish_cubic(start, roots[np.argmin(np.abs(roots - 1.0 / start))])
    previous = start

    for target in homotopy_path(z, anchor):
        stack = [target]
        halvings = 0
        while stack:
            point = stack[-1]
            roots = cubic_roots(point)
            spacing = min(abs(roots[0] - roots[1]), abs(roots[0] - roots[2]), abs(roots[1] - roots[2]))
            if spacing <= spacing_floor * max(1.0, float(np.max(np.abs(roots)))):
                raise AmbiguityError(f"Cubic roots coalesce near z={point}", z=complex(z))
            choice = roots[np.argmin(np.abs(roots - w))]
            if abs(choice - w) > 0.1 * spacing:
                halvings += 1
                if halvings > max_halvings:
                    raise AmbiguityError(f"Root tracking stalled near z={point}", z=complex(z))
                stack.append(0.5 * (previous + point))
                continue
            w = polish_cubic(point, choice)
            previous = point
            stack.pop()
    return complex(w)


# ============================================================================
# LAURENT SERIES AT INFINITY
# ============================================================================

def _truncate(series, order):
    out = np.zeros(order + 1)
    out[:min(order + 1, len(series))] = series[:order + 1]
    return out


def laurent_series(order):
    """Coefficients a_0..a_order of phi = sum a_j z**(-j).

    With u = 1/z, w = phi solves w = u (1 + K w)**3; fixed-point
    iteration gains one correct coefficient per pass.
    """
    w = np.zeros(order + 1)
    for _ in range(order + 1):
        cube = P.polypow(_truncate(P.polyadd([1.0], K * w), order), 3)
        w = _truncate(P.polymulx(_truncate(cube, order)), order)
    return w


def series_reciprocal(series, order):
    out = np.zeros(order + 1)
    out[0] = 1.0 / series[0]
    for j in range(1, order + 1):
        out[j] = -np.dot(series[1:j + 1], out[j - 1::-1]) / series[0]
    return out


def stieltjes_moments(order):
    """m_0..m_order with -phi'/phi = sum m_j z**(-j-1).

    Writing phi = u W(u), -phi'/phi = u + u**2 W'/W, so m_j is the
    coefficient of u**(j-1) in W'/W.
    """
    a = laurent_series(order + 1)
    W = a[1:order + 2]
    dW = P.polyder(W)
    ratio = P.polymul(dW, series_reciprocal(W, order))
    moments = np.zeros(order + 1)
    moments[0] = 1.0
    moments[1:] = _truncate(ratio, order)[:order]
    return moments
