"""Branches of the complex logarithm with explicit imaginary-part windows.

A branch with window center theta maps into the horizontal strip
(theta - pi, theta + pi) and inverts the exponential there.  Branch selection
is always by explicit window center, never "nearest value", so compositions
are reproducible bit for bit.
"""

import cmath
import math
from dataclasses import dataclass

from .dynamics import LogPolarPoint, exp_map
from .errors import AnchorMismatch, DiscContainsOrigin, OnCut, OutsideDisc, ZeroArgument

TAU = math.tau

# Angular distance to the cut below which evaluation fails loudly.
CUT_TOL = 1e-14


@dataclass(frozen=True)
class BranchSpec:
    """Window of a logarithm branch: center = base + 2*pi*index.

    The integer index is stored exactly.  For indices beyond ~1e15 the float
    window center absorbs sub-2*pi detail, but the reduced center (base mod
    2*pi) stays exact, which is what inversion checks need.
    """

    base: float
    index: int = 0

    @property
    def window_center(self) -> float:
        return self.base + TAU * self.index

    def reduced_center(self) -> float:
        """Window center mod 2*pi, in [-pi, pi]; exact in the index."""
        return math.remainder(self.base, TAU)

    @classmethod
    def from_center(cls, theta: float) -> "BranchSpec":
        return cls(base=float(theta), index=0)


def _windowed_parts(log_mod: float, arg: float, spec: BranchSpec) -> tuple[float, float]:
    """(log modulus, offset into the window) for a point given in log-polar form."""
    rel = math.remainder(
        math.remainder(arg, TAU) - spec.reduced_center(), TAU
    )
    if math.pi - abs(rel) <= CUT_TOL:
        raise OnCut(
            f"argument within {CUT_TOL} rad of the cut opposite window center "
            f"{spec.window_center}"
        )
    return log_mod, rel


def windowed_log(w: complex | LogPolarPoint, spec: BranchSpec) -> complex:
    """The logarithm branch L(w) = log|w| + i*(theta + Arg(w / e^{i theta})).

    exp_map(L(w)) = w and im L(w) lies in (theta - pi, theta + pi) for
    theta = spec.window_center.  Accepts a LogPolarPoint so the step just past
    double-precision overflow can still be pulled back.

    Roundtrip precision note: the returned imaginary part materializes
    theta + offset as one float, so window centers beyond ~1e12 lose the
    sub-window offset there; use windowed_log_reduced for inversion checks.
    """
    log_mod, rel = _windowed_log_inputs(w, spec)
    return complex(log_mod, spec.window_center + rel)


def windowed_log_reduced(w: complex | LogPolarPoint, spec: BranchSpec) -> tuple[float, float]:
    """(re, im mod 2*pi) of the branch value; exact in the window index.

    exp of this reduced form equals w regardless of how large the window
    center is, which is what stepwise inversion verification uses.
    """
    log_mod, rel = _windowed_log_inputs(w, spec)
    return log_mod, spec.reduced_center() + rel


def _windowed_log_inputs(w: complex | LogPolarPoint, spec: BranchSpec) -> tuple[float, float]:
    if isinstance(w, LogPolarPoint):
        return _windowed_parts(w.log_mod, w.arg, spec)
    w = complex(w)
    if w == 0:
        raise ZeroArgument("log branch undefined at 0")
    return _windowed_parts(math.log(abs(w)), cmath.phase(w), spec)


@dataclass(frozen=True)
class DiscBranch:
    """A logarithm branch restricted to a disc that omits the origin.

    Anchored: calling it at exp_map(anchor) returns anchor, and imaginary
    parts stay within pi of anchor.im on the disc.
    """

    center: complex
    radius: float
    anchor: complex
    spec: BranchSpec

    def __call__(self, w: complex | LogPolarPoint) -> complex:
        if not isinstance(w, LogPolarPoint):
            if abs(complex(w) - self.center) > self.radius * (1 + 1e-9):
                raise OutsideDisc(
                    f"{w!r} outside disc of radius {self.radius} at {self.center!r}"
                )
        return windowed_log(w, self.spec)

    def derivative_modulus(self, w: complex) -> float:
        """|L'(w)| = 1/|w|."""
        return 1.0 / abs(w)


def disc_branch(center: complex, radius: float, anchor: complex) -> DiscBranch:
    """Branch of the logarithm on the disc D_radius(center), anchored at anchor.

    Requires the closed disc to omit 0 and exp_map(anchor) to lie in the disc.
    The window center is anchor.im, so L(exp_map(anchor)) = anchor.
    """
    center = complex(center)
    anchor = complex(anchor)
    if radius <= 0:
        raise ValueError("radius must be positive")
    if abs(center) <= radius:
        raise DiscContainsOrigin(
            f"closed disc of radius {radius} at {center!r} contains 0"
        )
    image = exp_map(anchor)
    if abs(image - center) > radius * (1 + 1e-12):
        raise AnchorMismatch(
            f"exp_map(anchor) = {image!r} lies outside the disc of radius "
            f"{radius} at {center!r}"
        )
    return DiscBranch(
        center=center,
        radius=float(radius),
        anchor=anchor,
        spec=BranchSpec.from_center(anchor.imag),
    )
