"""Hyperbolic densities on five model domains and the expansion of e^z.

Densities (curvature -1 normalization, the factor 2 kept throughout):

    unit disc           2 / (1 - |z|^2)
    right half-plane    1 / re z
    strip |im z| < pi   1 / (2 cos(im z / 2))
    plane minus [0,oo)  1 / (2 |z| sin(arg z / 2)),  arg in (0, 2*pi)
    plane minus (-oo,0] 1 / (2 |z| cos(Arg z / 2)),  Arg in (-pi, pi)

A holomorphic map between such domains never increases the metric; its
hyperbolic derivative |f'(z)| * rho_dst(f(z)) / rho_src(z) is <= 1, with
equality exactly for conformal isomorphisms.  The exponential map, by
contrast, expands the metric of the slit planes at every point of their
preimage, which is what the expansion_* functions quantify.
"""

import cmath
import math
from enum import Enum

from .errors import OutsideDomain, ParameterOutsideDisc

TAU = math.tau


class Domain(Enum):
    UNIT_DISC = "unit-disc"
    RIGHT_HALF_PLANE = "right-half-plane"
    STRIP_PI = "strip-pi"
    SLIT_PLANE_POS = "slit-plane-pos"  # complement of [0, oo)
    SLIT_PLANE_NEG = "slit-plane-neg"  # complement of (-oo, 0]


def domain_contains(domain: Domain, z: complex) -> bool:
    """Strict membership; boundary points are outside (densities blow up there)."""
    z = complex(z)
    if domain is Domain.UNIT_DISC:
        return abs(z) < 1.0
    if domain is Domain.RIGHT_HALF_PLANE:
        return z.real > 0.0
    if domain is Domain.STRIP_PI:
        return abs(z.imag) < math.pi
    if domain is Domain.SLIT_PLANE_POS:
        return not (z.imag == 0.0 and z.real >= 0.0)
    if domain is Domain.SLIT_PLANE_NEG:
        return not (z.imag == 0.0 and z.real <= 0.0)
    raise ValueError(f"unknown domain {domain!r}")


def arg_in_0_2pi(z: complex) -> float:
    """Argument in (0, 2*pi), the convention the positively slit plane uses."""
    ph = cmath.phase(z)
    return ph if ph > 0 else ph + TAU


def density(domain: Domain, z: complex) -> float:
    """Hyperbolic density rho_domain(z); raises OutsideDomain off the domain."""
    z = complex(z)
    if not domain_contains(domain, z):
        raise OutsideDomain(f"{z!r} not in {domain.value}")
    if domain is Domain.UNIT_DISC:
        return 2.0 / (1.0 - abs(z) ** 2)
    if domain is Domain.RIGHT_HALF_PLANE:
        return 1.0 / z.real
    if domain is Domain.STRIP_PI:
        return 1.0 / (2.0 * math.cos(z.imag / 2.0))
    if domain is Domain.SLIT_PLANE_POS:
        return 1.0 / (2.0 * abs(z) * math.sin(arg_in_0_2pi(z) / 2.0))
    # SLIT_PLANE_NEG
    return 1.0 / (2.0 * abs(z) * math.cos(cmath.phase(z) / 2.0))


def mobius(a: complex, theta: float, z: complex) -> complex:
    """Disc automorphism e^{i theta} (z - a) / (1 - conj(a) z), |a|, |z| < 1."""
    a, z = complex(a), complex(z)
    if abs(a) >= 1.0:
        raise ParameterOutsideDisc(f"|a| = {abs(a)} >= 1")
    if abs(z) >= 1.0:
        raise ParameterOutsideDisc(f"|z| = {abs(z)} >= 1")
    return cmath.exp(1j * theta) * (z - a) / (1.0 - a.conjugate() * z)


class Iso(Enum):
    """The four conformal isomorphisms linking the model domains."""

    HALF_PLANE_TO_DISC = "half-plane-to-disc"          # z -> (1 - z) / (1 + z)
    STRIP_TO_HALF_PLANE = "strip-to-half-plane"        # z -> e^{z/2}
    HALF_PLANE_TO_SLIT_POS = "half-plane-to-slit-pos"  # z -> -z^2
    SLIT_POS_TO_SLIT_NEG = "slit-pos-to-slit-neg"      # z -> -z


_ISO_DOMAINS = {
    Iso.HALF_PLANE_TO_DISC: (Domain.RIGHT_HALF_PLANE, Domain.UNIT_DISC),
    Iso.STRIP_TO_HALF_PLANE: (Domain.STRIP_PI, Domain.RIGHT_HALF_PLANE),
    Iso.HALF_PLANE_TO_SLIT_POS: (Domain.RIGHT_HALF_PLANE, Domain.SLIT_PLANE_POS),
    Iso.SLIT_POS_TO_SLIT_NEG: (Domain.SLIT_PLANE_POS, Domain.SLIT_PLANE_NEG),
}


def iso_domains(which: Iso) -> tuple[Domain, Domain]:
    return _ISO_DOMAINS[which]


def iso(which: Iso, z: complex) -> complex:
    """Value of the named isomorphism at z (z must lie in its source domain)."""
    z = complex(z)
    src, _ = _ISO_DOMAINS[which]
    if not domain_contains(src, z):
        raise OutsideDomain(f"{z!r} not in {src.value}")
    if which is Iso.HALF_PLANE_TO_DISC:
        return (1.0 - z) / (1.0 + z)
    if which is Iso.STRIP_TO_HALF_PLANE:
        return cmath.exp(z / 2.0)
    if which is Iso.HALF_PLANE_TO_SLIT_POS:
        return -(z * z)
    return -z


def iso_deriv(which: Iso, z: complex) -> complex:
    """Complex derivative of the named isomorphism at z."""
    z = complex(z)
    src, _ = _ISO_DOMAINS[which]
    if not domain_contains(src, z):
        raise OutsideDomain(f"{z!r} not in {src.value}")
    if which is Iso.HALF_PLANE_TO_DISC:
        return -2.0 / (1.0 + z) ** 2
    if which is Iso.STRIP_TO_HALF_PLANE:
        return cmath.exp(z / 2.0) / 2.0
    if which is Iso.HALF_PLANE_TO_SLIT_POS:
        return -2.0 * z
    return complex(-1.0)


def hyp_derivative(
    fz: complex, dfz: complex, src: Domain, z: complex, dst: Domain
) -> float:
    """Hyperbolic derivative |f'(z)| * rho_dst(f(z)) / rho_src(z).

    At most 1 for any holomorphic f: src -> dst, equal to 1 exactly when f is
    a conformal isomorphism between the two domains.
    """
    return abs(dfz) * density(dst, fz) / density(src, z)


def _require_preimage_of_slit_pos(zeta: complex) -> None:
    if not domain_contains(Domain.SLIT_PLANE_POS, zeta):
        raise OutsideDomain(f"{zeta!r} lies on [0, oo)")
    if math.remainder(zeta.imag, TAU) == 0.0:
        raise OutsideDomain(
            f"im zeta = {zeta.imag} is a multiple of 2*pi, so e^zeta lands on [0, oo)"
        )


def expansion_slit_pos(zeta: complex) -> float:
    """Expansion factor of e^z in the metric of the plane minus [0, oo).

    Closed form r * sin(theta/2) / |sin(im zeta / 2)| with r = |zeta| and
    theta = arg zeta in (0, 2*pi); always > 1, and at least
    1 / |cos(theta/2)|.  Defined for zeta with both zeta and e^zeta off the
    slit.
    """
    zeta = complex(zeta)
    _require_preimage_of_slit_pos(zeta)
    r = abs(zeta)
    theta = arg_in_0_2pi(zeta)
    return r * math.sin(theta / 2.0) / abs(math.sin(zeta.imag / 2.0))


def expansion_slit_neg(zeta: complex) -> float:
    """Expansion factor of e^z in the metric of the plane minus (-oo, 0].

    r * cos(Arg zeta / 2) / |cos(Arg e^zeta / 2)| with principal arguments.
    Not bounded below by 1 in general, but >= sqrt(2) whenever re zeta >= 2,
    and it grows without bound as re zeta -> oo.
    """
    zeta = complex(zeta)
    if not domain_contains(Domain.SLIT_PLANE_NEG, zeta):
        raise OutsideDomain(f"{zeta!r} lies on (-oo, 0]")
    image_arg = math.remainder(zeta.imag, TAU)
    if abs(image_arg) == math.pi:
        raise OutsideDomain(
            f"im zeta = {zeta.imag} is an odd multiple of pi, so e^zeta lands on (-oo, 0]"
        )
    r = abs(zeta)
    theta = cmath.phase(zeta)
    return r * math.cos(theta / 2.0) / abs(math.cos(image_arg / 2.0))
