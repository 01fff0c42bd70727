"""Inverse-branch machinery: pullback chains and the f^{-2} branch.

A pullback chain composes logarithm branches anchored along a forward orbit
z_0 .. z_n, realizing a branch of the n-fold inverse on the disc of radius
2*pi around z_n.  When the orbit rides high moduli the chain contracts hard:
each branch contributes a factor sup 1/|w| over its disc.

The f^{-2} branch maps a disc around an arbitrary nonzero target into any
2*pi-disc far enough to the right, "closing the loop" for periodic-point
construction and single-target covering.  Its branch indices grow like
e^{re center} / (2*pi), far beyond exact float range, so they are carried as
exact integers and all modulus comparisons happen in log scale.
"""

import cmath
import math
from dataclasses import dataclass

from .dynamics import LogPolarPoint, exp_map
from .errors import (
    CenterTooFarLeft,
    DiscTouchesOrigin,
    EmptyCompactSet,
    OnCut,
    OrbitMismatch,
    OutsideDisc,
    TargetZero,
    ZeroInCompactSet,
)
from .logbranch import BranchSpec, windowed_log

TAU = math.tau
PULLBACK_DISC_RADIUS = TAU  # radius 2*pi of the discs D_n around orbit points

# Chain anchors must stay one exp step away from overflow.
MAX_ANCHOR_RE = 700.0


def _cis(theta: float) -> complex:
    return complex(math.cos(theta), math.sin(theta))


def _rel_residual(candidate: complex, target) -> float:
    """Relative distance from candidate to target (complex or log-polar)."""
    if isinstance(target, LogPolarPoint):
        if candidate == 0:
            return math.inf
        dlog = math.log(abs(candidate)) - target.log_mod
        dang = math.remainder(cmath.phase(candidate) - target.arg, TAU)
        return math.hypot(dlog, dang)
    t = complex(target)
    scale = max(abs(t), 1e-300)
    return abs(candidate - t) / scale


@dataclass(frozen=True)
class PullbackChain:
    """A branch of the n-fold inverse along the orbit base_orbit[0..n].

    branch_specs[j] is the logarithm window (centered at base_orbit[j].im)
    taking the disc around base_orbit[j+1] to a disc around base_orbit[j].
    entry_radii[k] is the radius of the disc around base_orbit[k] that the
    evaluation actually passes through; deriv_bound is the product of
    sup 1/|w| over those discs, an upper bound for the branch derivative on
    the whole entry disc.
    """

    base_orbit: tuple[complex, ...]
    branch_specs: tuple[BranchSpec, ...]
    deriv_bound: float
    entry_radii: tuple[float, ...]
    disc_radius: float = PULLBACK_DISC_RADIUS

    @property
    def depth(self) -> int:
        return len(self.branch_specs)

    def evaluate(self, w, check: bool = True) -> complex:
        value, _ = self.evaluate_with_trace(w, check=check)
        return value

    def evaluate_with_trace(self, w, check: bool = True):
        """Apply the chain to w in the entry disc.

        Returns (value, trace) with trace[j] the computed preimage near
        base_orbit[j], trace ascending (trace[depth] is w itself when w is
        complex).  Accepts a LogPolarPoint for w, which is how callers hand in
        points whose separation from the anchor is below float resolution.
        """
        n = self.depth
        if not isinstance(w, LogPolarPoint):
            w = complex(w)
            if check and abs(w - self.base_orbit[n]) > self.disc_radius * (1 + 1e-9):
                raise OutsideDisc(
                    f"{w!r} outside the entry disc of radius {self.disc_radius} "
                    f"around {self.base_orbit[n]!r}"
                )
        trace: list = [None] * (n + 1)
        trace[n] = w
        x = w
        for k in range(n, 0, -1):
            y = windowed_log(x, self.branch_specs[k - 1])
            if check:
                slack = self.entry_radii[k - 1] * (1 + 1e-6) + 1e-12 * (
                    1 + abs(self.base_orbit[k - 1])
                )
                if abs(y - self.base_orbit[k - 1]) > slack:
                    raise OutsideDisc(
                        f"pullback left its disc at index {k - 1}: "
                        f"{y!r} vs center {self.base_orbit[k - 1]!r} "
                        f"radius {self.entry_radii[k - 1]}"
                    )
            trace[k - 1] = y
            x = y
        return x, trace

    def verify_stepwise(self, w, tol: float = 1e-11) -> float:
        """Max relative residual of exp over each branch step; must be <= tol.

        Checks exp_map(trace[j]) against trace[j+1] one step at a time, never
        re-iterating forward through unrepresentable magnitudes.
        """
        _, trace = self.evaluate_with_trace(w, check=True)
        worst = 0.0
        for j in range(self.depth):
            worst = max(worst, _rel_residual(exp_map(trace[j]), trace[j + 1]))
        if worst > tol:
            raise OrbitMismatch(
                f"stepwise inversion residual {worst} exceeds {tol}"
            )
        return worst

    def to_json(self) -> dict:
        return {
            "orbit": [[z.real, z.imag] for z in self.base_orbit],
            "window_bases": [s.base for s in self.branch_specs],
            "window_indices": [s.index for s in self.branch_specs],
            "deriv_bound": self.deriv_bound,
            "disc_radius": self.disc_radius,
            "entry_radii": list(self.entry_radii),
        }


def build_pullback(orbit, n: int, *, orbit_tol: float = 1e-9) -> PullbackChain:
    """Compose the logarithm branches anchored along orbit[0..n].

    The orbit must be a consistent forward orbit of the exponential map with
    re <= 700 throughout.  Entry radii shrink adaptively: starting from 2*pi
    around orbit[n], each branch multiplies the radius by sup 1/|w| over the
    current disc, so the recorded deriv_bound is the product of those sups.
    With every |orbit[k]| >= 2*pi + 2 each factor is at most 1/2.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    pts = [complex(z) for z in orbit[: n + 1]]
    if len(pts) != n + 1:
        raise OrbitMismatch(f"orbit has {len(pts)} points, need {n + 1}")
    for k, z in enumerate(pts):
        if z.real > MAX_ANCHOR_RE:
            raise OrbitMismatch(
                f"orbit[{k}].re = {z.real} > {MAX_ANCHOR_RE}: anchor not usable"
            )
    for k in range(n):
        if _rel_residual(exp_map(pts[k]), pts[k + 1]) > orbit_tol:
            raise OrbitMismatch(
                f"orbit[{k + 1}] is not exp_map(orbit[{k}]) within {orbit_tol}"
            )

    radii = [0.0] * (n + 1)
    radii[n] = PULLBACK_DISC_RADIUS
    bound = 1.0
    specs = []
    for k in range(n, 0, -1):
        mod = abs(pts[k])
        if mod <= radii[k] * (1 + 1e-12):
            raise DiscTouchesOrigin(
                f"|orbit[{k}]| = {mod} <= pullback radius {radii[k]}: "
                "disc reaches the origin"
            )
        factor = 1.0 / (mod - radii[k])
        bound *= factor
        radii[k - 1] = radii[k] * factor
        specs.append(BranchSpec.from_center(pts[k - 1].imag))
    specs.reverse()

    chain = PullbackChain(
        base_orbit=tuple(pts),
        branch_specs=tuple(specs),
        deriv_bound=bound,
        entry_radii=tuple(radii),
    )
    # Anchor identity: each branch takes orbit[k] back to orbit[k-1].
    for k in range(n, 0, -1):
        got = windowed_log(pts[k], chain.branch_specs[k - 1])
        if _rel_residual(got, pts[k - 1]) > 1e-11:
            raise OrbitMismatch(
                f"branch {k} does not anchor: log(orbit[{k}]) = {got!r} "
                f"vs orbit[{k - 1}] = {pts[k - 1]!r}"
            )
    return chain


@dataclass(frozen=True)
class AnnulusSpec:
    """Closed round annulus around the origin."""

    r_minus: float
    r_plus: float

    def __post_init__(self):
        if not self.r_minus < self.r_plus:
            raise ValueError("need r_minus < r_plus")


def annulus_of_square(a: float) -> AnnulusSpec:
    """Image under e^z of a vertical square strip with re in [a, a + 2*pi].

    The annulus (e^a, e^{a + 2*pi}); the radii ratio is e^{2*pi} regardless
    of a.
    """
    a = float(a)
    if not math.isfinite(a):
        raise ValueError("a must be finite")
    if a > MAX_ANCHOR_RE - TAU:
        raise OverflowError(f"a = {a} > {MAX_ANCHOR_RE - TAU}: outer radius overflows")
    return AnnulusSpec(math.exp(a), math.exp(a + TAU))


def rho_for_compact(points) -> float:
    """3*pi + max |log|z|| over the finite set: any 2*pi-disc centered at
    re >= this value covers the whole set after two forward steps."""
    pts = [complex(z) for z in points]
    if not pts:
        raise EmptyCompactSet("need at least one target point")
    if any(z == 0 for z in pts):
        raise ZeroInCompactSet("targets must be nonzero")
    return 3.0 * math.pi + max(abs(math.log(abs(z))) for z in pts)


def rho_for_target(v: complex) -> float:
    """Admissible right-shift for the f^{-2} branch into a disc around v:
    max(|Log v| + 3, log 4 - log |v|) with the principal logarithm."""
    v = complex(v)
    if v == 0:
        raise TargetZero("target must be nonzero")
    w0 = complex(math.log(abs(v)), cmath.phase(v))
    return max(abs(w0) + 3.0, math.log(4.0) - math.log(abs(v)))


@dataclass(frozen=True)
class F2Trace:
    """Intermediate data of one f^{-2} branch evaluation.

    The middle point w has re = log|z| and im = alpha + 2*pi*branch_index
    with the index an exact integer; im_w is its float image.  alpha and
    psi_im_reduced are the exact mod-2*pi residues of the two branch values,
    which is what inversion checks need when the index is astronomically
    large.
    """

    z: complex
    re_w: float
    alpha: float
    im_w: float
    value: complex
    psi_im_reduced: float

    @property
    def w(self) -> complex:
        return complex(self.re_w, self.im_w)


@dataclass(frozen=True)
class InverseSquareBranch:
    """A branch psi of f^{-2} from the disc around target into D_{2pi}(disc_center).

    f^2(psi(z)) = z for z in the disc, |psi'| <= 1 throughout.  Constructed
    from two logarithm branches: the first with window center
    Arg(target) + 2*pi*branch_index, the second into the horizontal strip
    selected by strip_index.
    """

    target: complex
    radius: float
    disc_center: complex
    branch_index: int
    strip_index: int

    @property
    def first_spec(self) -> BranchSpec:
        return BranchSpec(base=cmath.phase(self.target), index=self.branch_index)

    @property
    def strip_spec(self) -> BranchSpec:
        return BranchSpec(base=math.pi / 2.0, index=self.strip_index)

    def _check_inside(self, z: complex) -> None:
        if abs(z - self.target) > self.radius * (1 + 1e-9):
            raise OutsideDisc(
                f"{z!r} outside the branch disc of radius {self.radius} "
                f"around {self.target!r}"
            )

    def trace(self, z: complex, check: bool = True) -> F2Trace:
        z = complex(z)
        if z == 0:
            raise TargetZero("cannot pull back 0")
        if check:
            self._check_inside(z)
        base = cmath.phase(self.target)
        rel = math.remainder(cmath.phase(z) - base, TAU)
        if math.pi - abs(rel) <= 1e-12:
            raise OnCut("point crosses the cut of the first branch")
        alpha = base + rel
        re_w = math.log(abs(z))
        im_w = TAU * float(self.branch_index) + alpha
        log_w = math.log(math.hypot(re_w, im_w))
        phase_w = math.atan2(im_w, re_w)  # in (0, pi): im_w > 0
        # Strip window center (4m+1)*pi/2 reduces to pi/2 exactly in the index.
        rel2 = phase_w - math.pi / 2.0
        value = complex(log_w, self.strip_spec.window_center + rel2)
        psi_im_reduced = phase_w
        tr = F2Trace(
            z=z, re_w=re_w, alpha=alpha, im_w=im_w,
            value=value, psi_im_reduced=psi_im_reduced,
        )
        if check and abs(value - self.disc_center) > PULLBACK_DISC_RADIUS * (1 + 1e-9):
            raise OutsideDisc(
                f"branch value {value!r} left the disc of radius 2*pi "
                f"around {self.disc_center!r}"
            )
        return tr

    def __call__(self, z: complex, check: bool = True) -> complex:
        return self.trace(z, check=check).value

    def derivative_modulus(self, z: complex) -> float:
        """|psi'(z)| = 1 / (|z| * |w(z)|); <= 1 on the disc by construction."""
        tr = self.trace(z, check=False)
        return 1.0 / (abs(z) * math.hypot(tr.re_w, tr.im_w))

    def verify_inversion(self, z: complex, tol: float = 1e-11) -> float:
        """Max relative residual of the two exp steps against the trace.

        The middle step exp(w) = z is checked through the exact mod-2*pi
        residue alpha of im w, since cos/sin of the float im w is meaningless
        once the branch index exceeds 2^53/e^{re center}.
        """
        tr = self.trace(z)
        w = tr.w
        step1 = _rel_residual(
            math.exp(tr.value.real) * _cis(tr.psi_im_reduced), w
        )
        step2 = _rel_residual(math.exp(tr.re_w) * _cis(tr.alpha), z)
        worst = max(step1, step2)
        if worst > tol:
            raise OrbitMismatch(f"f^-2 inversion residual {worst} exceeds {tol}")
        return worst


def inverse_f2_branch(
    v: complex, disc_center: complex, radius: float | None = None
) -> InverseSquareBranch:
    """Construct the f^{-2} branch from D_radius(v) into D_{2pi}(disc_center).

    Requires re(disc_center) in [rho_for_target(v), 700].  radius defaults to
    |v|/2 and may be chosen smaller (all bounds only tighten).  The first
    branch index solves |w_0 + 2*pi*i*n| ~ e^{re(disc_center)} in log scale;
    the strip index centers the second window on im(disc_center).
    """
    v = complex(v)
    if v == 0:
        raise TargetZero("target must be nonzero")
    disc_center = complex(disc_center)
    if radius is None:
        radius = abs(v) / 2.0
    if not 0 < radius <= abs(v) / 2.0 * (1 + 1e-12):
        raise ValueError(f"radius must lie in (0, |v|/2], got {radius}")
    rho = rho_for_target(v)
    if disc_center.real < rho:
        raise CenterTooFarLeft(
            f"re(disc_center) = {disc_center.real} < rho = {rho}"
        )
    if disc_center.real > MAX_ANCHOR_RE:
        raise ValueError(
            f"re(disc_center) = {disc_center.real} > {MAX_ANCHOR_RE}: "
            "the construction no longer fits double precision"
        )

    t = math.exp(disc_center.real)
    l0 = math.log(abs(v))
    a0 = cmath.phase(v)
    # |w_n|^2 = l0^2 + (a0 + 2 pi n)^2 = t^2, solved without forming t^2.
    s = t * math.sqrt(max(1.0 - (l0 / t) ** 2, 0.0))
    n0 = max(1, int(round((s - a0) / TAU)))
    m = int(round((2.0 * disc_center.imag / math.pi - 1.0) / 4.0))

    branch = InverseSquareBranch(
        target=v,
        radius=float(radius),
        disc_center=disc_center,
        branch_index=n0,
        strip_index=m,
    )
    # The modulus window must hold in relative terms: |w| / e^{re center}
    # within a factor 2 either way (log-scale form of the +-pi window).
    tr = branch.trace(v, check=False)
    ratio_log = math.log(math.hypot(tr.re_w, tr.im_w)) - disc_center.real
    if not -math.log(2.0) <= ratio_log <= math.log(2.0):
        raise OnCut(
            f"branch index selection failed: log(|w|/e^re) = {ratio_log}"
        )
    return branch
