import json
import logging
import math

import numpy as np
from django.conf import settings

from fourterm.exceptions import HorizonError, ProfileError
from .models import (
    CoefficientFamily, CoefficientTable, ConstantProfile, LimitDeviation,
    PowerProfile, TabulatedProfile,
)

logger = logging.getLogger(__name__)


# ============================================================================
# PROFILE CONSTRUCTION
# ============================================================================

def build_profile(alpha):
    """Turn a descriptor ``alpha`` entry into a profile callable.

    Accepts a number, ``{"grid": [[t, a], ...], "interp": "linear"}`` or
    ``{"form": "power", "coefficient": c, "power": p}``.
    """
    if isinstance(alpha, bool):
        raise ProfileError("alpha must be a number or a profile object")
    if isinstance(alpha, (int, float)):
        if not math.isfinite(alpha) or alpha < 0:
            raise ProfileError(f"Constant alpha must be finite and nonnegative, got {alpha}")
        return ConstantProfile(float(alpha))
    if not isinstance(alpha, dict):
        raise ProfileError("alpha must be a number or a profile object")

    if 'grid' in alpha:
        interp = alpha.get('interp', 'linear')
        if interp != 'linear':
            raise ProfileError(f"Unsupported interpolation rule: {interp}")
        try:
            grid = tuple((float(t), float(a)) for t, a in alpha['grid'])
        except (TypeError, ValueError):
            raise ProfileError("Profile grid must be a list of [t, alpha] pairs")
        return TabulatedProfile(grid)

    if alpha.get('form') == 'power':
        coefficient = float(alpha.get('coefficient', 1.0))
        power = float(alpha.get('power', 1.0))
        if coefficient < 0 or power < 0:
            raise ProfileError("Power profile needs nonnegative coefficient and power")
        return PowerProfile(coefficient, power)

    raise ProfileError(f"Unknown profile descriptor: {alpha}")


# ============================================================================
# NAMED FAMILIES
# ============================================================================

def make_constant_family(alpha):
    """Constant coefficients 3*beta, 3*beta**2, beta**3 with beta = 4*alpha/27."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return CoefficientFamily(
        name=f'constant(alpha={alpha:g})',
        kind='constant',
        profile=ConstantProfile(float(alpha)),
    )


def make_jacobi_pineiro_family():
    return CoefficientFamily(
        name='jacobi_pineiro',
        kind='jacobi_pineiro',
        profile=ConstantProfile(1.0),
    )


def make_laguerre1_family():
    """Multiple Laguerre (first kind) limits: beta(t) = t/2 after division by N."""
    return CoefficientFamily(
        name='laguerre1',
        kind='laguerre1',
        profile=PowerProfile(27.0 / 8.0, 1.0),
        scale_exponent=1.0,
    )


def make_macdonald_family():
    """Macdonald limits: beta(t) = t**2 after division by N**2."""
    return CoefficientFamily(
        name='macdonald',
        kind='macdonald',
        profile=PowerProfile(27.0 / 4.0, 2.0),
        scale_exponent=2.0,
    )


def make_zero_family():
    """alpha = 0, so P_n(x) = x**n."""
    return make_custom_family({'name': 'zero', 'alpha': 0})


def make_custom_family(spec):
    """Family from a descriptor dict (see FamilyDescriptorSerializer)."""
    profile = build_profile(spec.get('alpha'))
    table = None
    if spec.get('coefficients'):
        table = _build_table(spec['coefficients'])
    return CoefficientFamily(
        name=spec.get('name') or 'custom',
        kind='custom',
        profile=profile,
        scale_exponent=float(spec.get('scale_exponent', 0.0)),
        table=table,
    )


def _build_table(coefficients):
    b, c, d = (tuple(float(v) for v in coefficients[key]) for key in ('b', 'c', 'd'))
    if not (len(b) == len(c) == len(d)):
        raise ProfileError("Coefficient arrays b, c, d must have equal length")
    if not all(math.isfinite(v) for v in b + c + d):
        raise ProfileError("Coefficient arrays must be finite")
    return CoefficientTable(N=int(coefficients['N']), b=b, c=c, d=d)


NAMED_FAMILIES = {
    'jacobi_pineiro': make_jacobi_pineiro_family,
    'laguerre1': make_laguerre1_family,
    'macdonald': make_macdonald_family,
    'zero': make_zero_family,
}


def get_family(kind, alpha=None, spec=None):
    """Resolve a family from a CLI-style selection."""
    if kind == 'constant':
        if alpha is None:
            raise ValueError("The constant family needs alpha")
        if alpha == 0:
            return make_zero_family()
        return make_constant_family(alpha)
    if kind == 'custom':
        if spec is None:
            raise ValueError("The custom family needs a descriptor")
        return make_custom_family(spec)
    try:
        return NAMED_FAMILIES[kind]()
    except KeyError:
        raise ValueError(f"Unknown family: {kind}")


def family_from_descriptor(data):
    """Build a family from validated descriptor data."""
    kind = data['kind']
    if kind == 'custom':
        return make_custom_family(data)
    return get_family(kind, alpha=data.get('alpha'))


def load_family(path):
    """Read and validate a family descriptor JSON file."""
    from .serializers import FamilyDescriptorSerializer

    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as e:
            raise ProfileError(f"Family descriptor {path} is not valid JSON: {e}")

    serializer = FamilyDescriptorSerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    family = family_from_descriptor(serializer.validated_data)
    logger.info(f"Loaded family {family.name} ({family.kind}) from {path}")
    return family


# ============================================================================
# COEFFICIENT ARRAYS
# ============================================================================

def coefficient_arrays(family, n, N):
    """Working coefficients b[k], c[k], d[k] for k = 0..n.

    This is what the recurrence code consumes. Profiles are only
    evaluated up to the horizon t*.
    """
    if n < 0 or N < 1:
        raise ValueError(f"Need n >= 0 and N >= 1, got n={n}, N={N}")
    horizon = settings.FOURTERM_T_HORIZON
    if not isinstance(family.profile, ConstantProfile) and n / N > horizon:
        raise HorizonError(f"n/N = {n / N:g} exceeds the horizon t* = {horizon:g}", n=n, N=N)

    t = np.arange(n + 1, dtype=float) / N
    beta = 4.0 * np.asarray(family.alpha(t), dtype=float) / 27.0
    b = 3.0 * beta
    c = 3.0 * beta ** 2
    d = beta ** 3

    table = family.table
    if table is not None and table.N == N:
        k = min(len(table), n + 1)
        b[:k] = table.b[:k]
        c[:k] = table.c[:k]
        d[:k] = table.d[:k]
    return b, c, d


def limit_deviation(family, t, N_schedule):
    """Distance of the working coefficients at n = round(t*N) from their limits."""
    beta = float(family.beta(t))
    rows = []
    for N in N_schedule:
        n = int(round(t * N))
        b, c, d = family.working(n, N)
        rows.append(LimitDeviation(
            N=N, n=n, t=t,
            b_error=abs(b - 3.0 * beta),
            c_error=abs(c - 3.0 * beta ** 2),
            d_error=abs(d - beta ** 3),
        ))
    return rows
