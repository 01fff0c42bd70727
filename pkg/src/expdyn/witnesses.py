"""Constructive witnesses: escaping points, transitivity, periodic points,
sensitive dependence.

The density theorems behind these objects are proved by contradiction, so no
algorithm falls out of them; the searches here are explicit procedures whose
results are verified witness by witness.  A NotFound outcome is an honest
answer, never a correctness bug.  Every search is deterministic for a given
seed, and every report can be replayed through verify_report, which
re-executes only representable forward steps plus stepwise branch inversions.

Two search styles are used.  The public escaping-point search scans segments
of the disc for sign changes of im f^m and slides along the zero curve by
damped Newton steps.  The transitivity and periodic-point constructions
instead build orbits backward through steered logarithm branches (the same
pullback mechanism their correctness rests on), because forward scanning
cannot reach prescribed landing heights from small discs: orbits blow past
double range before developing the angular spread the landing needs.
"""

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    DEFAULT_AXIS_TOL,
    OVERFLOW_RE,
    exp_map,
    multiplier_along,
)
from .errors import (
    CenterTooFarLeft,
    DiscTouchesOrigin,
    OnCut,
    OrbitMismatch,
    OutsideDisc,
    TargetZero,
    WitnessNotFound,
    ZeroArgument,
)
from .logbranch import BranchSpec, windowed_log
from .pullback import (
    PULLBACK_DISC_RADIUS,
    build_pullback,
    inverse_f2_branch,
    rho_for_target,
)

TAU = math.tau

SCHEMA_VERSION = 1

# Default landing height for escape searches: inside
# [rho_for_target(v), 700] for every target modulus between e^-40 and e^40.
DEFAULT_T_STAR = 50.0
DEFAULT_M_MAX = 12
HEIGHT_TOL = 1e-8

# Caps on orbit values along constructed routes.  Transitivity chains verify
# step by step, so imaginary parts up to ~1e6 keep each exp residual below
# 1e-10; periodic cycles verify by full forward iteration, whose noise floor
# is the cycle multiplier times machine epsilon, so their rungs must stay
# far smaller.
TRANS_ROUTE_CAP = 2.5e6
PERIODIC_ROUTE_CAP = 2.0e5

_METHOD_NOTE = (
    "search-based witness: existence is guaranteed by density theorems whose "
    "proofs are non-constructive; correctness comes from the per-witness "
    "verification, and axis certification is tolerance-qualified"
)


def _cis(theta: float) -> complex:
    return complex(math.cos(theta), math.sin(theta))


def _c2j(z: complex) -> list[float]:
    return [z.real, z.imag]


def _j2c(pair) -> complex:
    return complex(pair[0], pair[1])


@dataclass(frozen=True)
class Disc:
    """Open round disc, the universal 'open set' of the witness searches."""

    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disc radius must be positive")

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return abs(complex(z) - self.center) < self.radius - margin

    def boundary_distance(self, z: complex) -> float:
        return self.radius - abs(complex(z) - self.center)

    def to_json(self) -> list[float]:
        return [self.center.real, self.center.imag, self.radius]

    @classmethod
    def from_json(cls, triple) -> "Disc":
        return cls(complex(triple[0], triple[1]), float(triple[2]))


@dataclass(frozen=True)
class PeriodicPointResult:
    point: complex
    period: int
    multiplier_modulus: float
    residual: float
    contraction_steps: int

    def __post_init__(self):
        if not self.residual <= 1e-9:
            raise ValueError(f"residual {self.residual} exceeds 1e-9")
        if not self.multiplier_modulus > 1.0:
            raise ValueError(
                f"multiplier modulus {self.multiplier_modulus} not repelling"
            )


@dataclass(frozen=True)
class WitnessReport:
    """Self-describing witness payload; schema version 1.

    Complex numbers serialize as [re, im] pairs, discs as [re, im, radius].
    """

    kind: str
    seed: int
    inputs: dict
    outputs: dict
    diagnostics: dict
    chain: dict | None = None
    schema: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        doc = {
            "schema": self.schema,
            "kind": self.kind,
            "seed": self.seed,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "diagnostics": self.diagnostics,
        }
        if self.chain is not None:
            doc["chain"] = self.chain
        return doc

    def to_json_str(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_json(), **kwargs)

    @classmethod
    def from_json(cls, doc: dict) -> "WitnessReport":
        if doc.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {doc.get('schema')!r}")
        return cls(
            kind=doc["kind"],
            seed=doc["seed"],
            inputs=doc["inputs"],
            outputs=doc["outputs"],
            diagnostics=doc["diagnostics"],
            chain=doc.get("chain"),
        )


@dataclass
class VerificationResult:
    ok: bool
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append({"name": name, "ok": bool(ok), "detail": detail})
        if not ok:
            self.ok = False

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            mark = "ok" if c["ok"] else "FAIL"
            lines.append(
                f"[{mark}] {c['name']}" + (f": {c['detail']}" if c["detail"] else "")
            )
        lines.append("verified" if self.ok else "VERIFICATION FAILED")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# guarded forward evaluation


def _fm_guarded(z: complex, m: int):
    """(f^m(z), sum log|z_k|, sum arg z_k) or None if the orbit leaves
    double range.  The log/arg sums are the chain-rule derivative of the m-th
    iterate in log-polar form."""
    cur = complex(z)
    dlog = 0.0
    dphase = 0.0
    for _ in range(m):
        if cur.real > OVERFLOW_RE:
            return None
        cur = exp_map(cur)
        if cur == 0:  # e^z underflowed; the orbit is numerically lost
            return None
        dlog += math.log(abs(cur))
        dphase += cmath.phase(cur)
    return cur, dlog, dphase


def _orbit_prefix(z: complex, m: int) -> list[complex] | None:
    pts = [complex(z)]
    for _ in range(m):
        if pts[-1].real > OVERFLOW_RE:
            return None
        pts.append(exp_map(pts[-1]))
    return pts


# ---------------------------------------------------------------------------
# escaping points: segment scan, bisection, Newton slide


def _bisect_axis(za: complex, zb: complex, m: int, iters: int = 80) -> complex | None:
    """Bisect the segment [za, zb] to a zero of im f^m; endpoints must bracket."""
    fa = _fm_guarded(za, m)
    fb = _fm_guarded(zb, m)
    if fa is None or fb is None:
        return None
    ia, ib = fa[0].imag, fb[0].imag
    if ia == 0.0:
        return za
    if ib == 0.0:
        return zb
    if ia * ib > 0:
        return None
    for _ in range(iters):
        zm = (za + zb) / 2
        fm = _fm_guarded(zm, m)
        if fm is None:
            return None
        im = fm[0].imag
        if im == 0.0:
            return zm
        if ia * im < 0:
            zb = zm
        else:
            za, ia = zm, im
    return (za + zb) / 2


def _newton_slide(
    z: complex,
    m: int,
    t_star: float,
    disc: Disc,
    *,
    axis_tol: float = DEFAULT_AXIS_TOL,
    max_iter: int = 50,
) -> complex | None:
    """Damped complex Newton for f^m(z) = t_star, confined to the disc.

    The step gap / (f^m)' is formed in log scale so enormous derivatives
    along expanding orbits cannot overflow.  Returns None when it stalls.
    """
    step_cap = 0.25 * disc.radius
    margin = 1e-9 * disc.radius
    stall = 0
    best_gap = math.inf
    for _ in range(max_iter):
        ev = _fm_guarded(z, m)
        if ev is None:
            return None
        value, dlog, dphase = ev
        gap = t_star - value
        gnorm = abs(gap)
        if (
            abs(value.imag) <= axis_tol * max(1.0, abs(value.real))
            and abs(value.real - t_star) <= 1e-9
        ):
            return z
        if gnorm >= best_gap * (1 - 1e-12):
            stall += 1
            if stall > 6:
                return None
        else:
            stall = 0
            best_gap = gnorm
        if gnorm == 0.0:
            return z
        step_log = min(math.log(gnorm) - dlog, math.log(step_cap))
        step = math.exp(step_log) * _cis(cmath.phase(gap) - dphase)
        damp = 1.0
        accepted = False
        for _ in range(16):
            z2 = z + damp * step
            if not disc.contains(z2, margin):
                damp /= 2
                continue
            ev2 = _fm_guarded(z2, m)
            if ev2 is None:
                damp /= 2
                continue
            if abs(t_star - ev2[0]) < gnorm:
                z = z2
                accepted = True
                break
            damp /= 2
        if not accepted:
            return None
    ev = _fm_guarded(z, m)
    if ev is not None:
        value = ev[0]
        if (
            abs(value.imag) <= axis_tol * max(1.0, abs(value.real))
            and abs(value.real - t_star) <= HEIGHT_TOL
        ):
            return z
    return None


def _stage_search(
    disc: Disc,
    m: int,
    t_star: float,
    *,
    samples: int = 121,
    axis_tol: float = DEFAULT_AXIS_TOL,
    max_newton_attempts: int = 6,
):
    """Scan one search stage m.  Returns ('full', z), ('axis', z) or (None, None).

    Segments are the 8 diameters of the disc at angles j*pi/8, scanned in
    fixed order; candidates are sign changes of im f^m along a segment,
    bisected to the zero curve, then slid toward height t_star by damped
    Newton.  The first success wins, which keeps the search reproducible.
    """
    axis_fallback = None
    attempts = 0
    c, r = disc.center, disc.radius
    svals = [(-0.995 + 1.99 * i / (samples - 1)) for i in range(samples)]
    for j in range(8):
        direction = _cis(j * math.pi / 8.0)
        prev_s = None
        prev_im = None
        for s in svals:
            z = c + s * r * direction
            ev = _fm_guarded(z, m)
            cur_im = ev[0].imag if ev is not None else None
            if (
                cur_im is not None
                and prev_im is not None
                and (prev_im == 0.0 or prev_im * cur_im < 0)
            ):
                za = c + prev_s * r * direction
                root = za if prev_im == 0.0 else _bisect_axis(za, z, m)
                if root is not None and attempts < max_newton_attempts:
                    attempts += 1
                    hit = _newton_slide(root, m, t_star, disc, axis_tol=axis_tol)
                    if hit is not None:
                        return "full", hit
                    if axis_fallback is None:
                        fr = _fm_guarded(root, m)
                        if (
                            fr is not None
                            and fr[0].real >= 0
                            and abs(fr[0].imag) <= axis_tol * max(1.0, fr[0].real)
                        ):
                            axis_fallback = root
            prev_s, prev_im = s, cur_im
    if axis_fallback is not None:
        return "axis", axis_fallback
    return None, None


def find_escaping_point(
    disc: Disc,
    t_star: float = DEFAULT_T_STAR,
    m_max: int = DEFAULT_M_MAX,
    *,
    m_min: int = 0,
    seed: int = 0,
    settle_for_axis: bool = True,
    samples: int = 121,
) -> tuple[complex, WitnessReport]:
    """Exhibit a certified escaping point inside the disc.

    Searches stages m = m_min..m_max for a point whose m-th iterate lands on
    the positive real axis at height t_star; once an orbit reaches [0, oo) it
    escapes, so the landing certifies escape (within the stated tolerance).
    When settle_for_axis is true, an axis landing whose height target was
    unreachable inside the disc is returned as is, with its own height.
    """
    if not (TAU + 2 <= t_star <= 700):
        raise ValueError(f"t_star must lie in [2*pi + 2, 700], got {t_star}")
    deepest = None
    for m in range(m_min, m_max + 1):
        mode, z = _stage_search(disc, m, t_star, samples=samples)
        deepest = m
        if mode == "full" or (mode == "axis" and settle_for_axis):
            landing = _fm_guarded(z, m)[0]
            report = WitnessReport(
                kind="escaping",
                seed=seed,
                inputs={
                    "disc": disc.to_json(),
                    "t_star": t_star,
                    "m_min": m_min,
                    "m_max": m_max,
                    "settle_for_axis": settle_for_axis,
                },
                outputs={
                    "z": _c2j(z),
                    "stage": m,
                    "landing": _c2j(landing),
                    "height": landing.real,
                    "mode": "height-targeted" if mode == "full" else "axis-settled",
                },
                diagnostics={
                    "axis_tol": DEFAULT_AXIS_TOL,
                    "height_tol": HEIGHT_TOL,
                    "im_residual": abs(landing.imag),
                    "height_residual": abs(landing.real - t_star),
                    "method": _METHOD_NOTE,
                },
            )
            return z, report
    raise WitnessNotFound(
        f"no escaping point found in {disc} up to stage m = {deepest}"
    )


# ---------------------------------------------------------------------------
# steered backward routes (shared by transitivity and periodic construction)


def _forward_ladder(z: complex, cap: float, max_len: int = 24) -> list[complex]:
    """Forward orbit prefix of z kept while the moduli stay at most cap."""
    out = [complex(z)]
    while len(out) < max_len:
        cur = out[-1]
        if cur.real > min(OVERFLOW_RE, math.log(cap)):
            break
        nxt = exp_map(cur)
        if abs(nxt) > cap:
            break
        out.append(nxt)
    return out


def _anchor_points(disc: Disc) -> list[complex]:
    c, r = disc.center, disc.radius
    return [c, c + 0.45 * r, c - 0.45 * r, c + 0.45j * r, c - 0.45j * r]


def _route_score(z: complex, j: int, ladders) -> float:
    best = math.inf
    for lad in ladders:
        if j < len(lad):
            best = min(best, abs(z - lad[j]) / max(1.0, abs(lad[j])))
        elif j == len(lad):
            # one past the guided prefix: match the modulus the forward
            # ladder would have, in log scale
            best = min(
                best,
                0.25 + 0.5 * abs(math.log(max(abs(z), 1e-300)) - lad[-1].real),
            )
    if best is math.inf:
        best = 2.0 + 0.05 * abs(math.log(max(abs(z), 1e-300)))
    return best


def _candidate_indices(tau: complex, j: int, ladders, spread: int) -> set[int]:
    ph = cmath.phase(tau)
    log_mod = math.log(abs(tau))
    ks: set[int] = {0, 1, -1}
    for lad in ladders:
        if j < len(lad):
            k0 = round((lad[j].imag - ph) / TAU)
            ks.update(range(k0 - spread, k0 + spread + 1))
        elif j == len(lad) and lad[-1].real <= 700:
            target = math.exp(lad[-1].real)  # modulus of the would-be rung
            if target > abs(log_mod) * 1.05 + 1.0:
                s = math.sqrt(target * target - log_mod * log_mod)
                for sign in (1.0, -1.0):
                    k0 = round((sign * s - ph) / TAU)
                    ks.update(range(k0 - spread, k0 + spread + 1))
    return ks


def _backward_routes(
    tau0: complex,
    target: Disc,
    m: int,
    ladders,
    *,
    route_cap: float,
    beam: int = 18,
    spread: int = 2,
    max_routes: int = 4,
):
    """Orbit prefixes [z_0 .. z_m] with z_m = tau0 and z_0 inside the target
    disc, built backward through steered logarithm branches.

    Branch indices are chosen to track the forward ladders of points of the
    target disc while the ladders stay below route_cap, to match the ladder
    modulus one step past each, and to stay moderate otherwise.  Deterministic:
    fixed candidate generation, fixed tie-breaking.
    """
    states = [(0.0, complex(tau0), [complex(tau0)])]
    for d in range(1, m + 1):
        j = m - d
        cands: dict = {}
        for _, tau, path in states:
            if tau == 0 or not (abs(tau) < math.inf):
                continue
            log_mod = math.log(abs(tau))
            ph = cmath.phase(tau)
            for k in _candidate_indices(tau, j, ladders, spread):
                z = complex(log_mod, ph + TAU * k)
                if abs(z.imag) > route_cap or not math.isfinite(z.imag):
                    continue
                key = (round(z.real, 10), round(z.imag, 10))
                if key in cands:
                    continue
                cands[key] = (_route_score(z, j, ladders), z, path + [z])
        if not cands:
            return []
        states = sorted(
            cands.values(), key=lambda s: (s[0], s[1].real, s[1].imag)
        )[:beam]
    finals = [
        (abs(path[-1] - target.center), path)
        for _, _, path in states
        if abs(path[-1] - target.center) < target.radius * 0.98
    ]
    finals.sort(key=lambda s: s[0])
    return [list(reversed(path)) for _, path in finals[:max_routes]]


# ---------------------------------------------------------------------------
# transitivity


def transitivity_witness(
    U: Disc,
    v: complex,
    n_min: int = 0,
    *,
    t_star: float = DEFAULT_T_STAR,
    m_max: int = 16,
    seed: int = 0,
) -> tuple[tuple[complex, int], WitnessReport]:
    """A point z in U with f^n(z) = v exactly (stepwise-verified), n >= n_min.

    Construction: an orbit prefix from U to a landing point at height
    t >= rho_for_target(v) is built backward through steered logarithm
    branches; the f^{-2} branch pulls v into the 2*pi-disc around the landing
    point, and the pullback chain carries it back into U.  Containment in U
    is certified by deriv_bound * 2*pi against the anchor's distance to the
    boundary, deepening until the margin holds.
    """
    v = complex(v)
    if v == 0:
        raise TargetZero("transitivity target must be nonzero")
    rho = rho_for_target(v)
    t = min(max(t_star, rho + 0.6), 700.0)
    search = Disc(U.center, U.radius / 2.0)
    ladders = [_forward_ladder(a, TRANS_ROUTE_CAP) for a in _anchor_points(search)]
    start = complex(t, 0.0)
    for m in range(max(1, n_min - 2), m_max + 1):
        for orbit in _backward_routes(
            start, search, m, ladders, route_cap=TRANS_ROUTE_CAP
        ):
            got = _assemble_transitivity(U, v, orbit, m, n_min, t, seed)
            if got is not None:
                return got
    raise WitnessNotFound(
        f"no transitivity witness for target {v} in {U} with n_min={n_min} "
        f"up to depth {m_max}"
    )


def _assemble_transitivity(U, v, orbit, m, n_min, t, seed):
    try:
        chain = build_pullback(orbit, m)
    except (DiscTouchesOrigin, OrbitMismatch):
        return None
    dist = U.boundary_distance(orbit[0])
    if chain.deriv_bound * PULLBACK_DISC_RADIUS > 0.99 * dist:
        return None
    try:
        branch = inverse_f2_branch(v, orbit[m])
        tr = branch.trace(v)
        z, trace = chain.evaluate_with_trace(tr.value)
    except (CenterTooFarLeft, TargetZero, OutsideDisc, OrbitMismatch, OnCut):
        return None
    if not U.contains(z):
        return None
    n = m + 2
    residuals = _transitivity_residuals(trace, tr, v)
    if sum(residuals) > 1e-8:
        return None
    report = WitnessReport(
        kind="transitivity",
        seed=seed,
        inputs={
            "disc": U.to_json(),
            "target": _c2j(v),
            "n_min": n_min,
            "t_star": t,
        },
        outputs={"z": _c2j(z), "n": n},
        diagnostics={
            "k": m,
            "intermediates": [_c2j(y) for y in trace],
            "f2": {
                "re_w": tr.re_w,
                "alpha": tr.alpha,
                "im_w": tr.im_w,
                "branch_index": branch.branch_index,
                "strip_index": branch.strip_index,
                "value": _c2j(tr.value),
            },
            "per_step_residuals": residuals,
            "cumulative_residual": sum(residuals),
            "deriv_bound": chain.deriv_bound,
            "containment_margin": U.boundary_distance(orbit[0])
            - chain.deriv_bound * PULLBACK_DISC_RADIUS,
            "method": _METHOD_NOTE,
        },
        chain=chain.to_json(),
    )
    return (z, n), report


def _transitivity_residuals(trace, f2_trace, v: complex) -> list[float]:
    """Per-step relative inversion residuals along z -> ... -> v."""
    res = []
    for j in range(len(trace) - 1):
        step = exp_map(trace[j])
        res.append(abs(step - trace[j + 1]) / max(abs(trace[j + 1]), 1e-300))
    w = f2_trace.w
    step = exp_map(trace[-1])
    res.append(abs(step - w) / max(abs(w), 1e-300))
    back = math.exp(f2_trace.re_w) * _cis(f2_trace.alpha)
    res.append(abs(back - v) / max(abs(v), 1e-300))
    return res


# ---------------------------------------------------------------------------
# periodic points


def find_periodic(
    U: Disc, *, seed: int = 0, m_max: int = 12
) -> tuple[PeriodicPointResult, WitnessReport]:
    """A repelling periodic point inside U, by closing a pullback loop.

    A backward orbit route from an anchor in U steers back into U; composing
    the logarithm branches along it (the chain through an f^{-2}-shaped tail)
    gives a strict contraction whose fixed point is periodic.  Backward
    iteration converges to it (repelling forward means attracting backward);
    the forward orbit then verifies the residual, and the chain rule gives
    the multiplier.  Route moduli are capped so the forward verification
    stays accurate in double precision; discs whose forced orbit rungs exceed
    the cap yield NotFound rather than an unverifiable point.
    """
    anchors = _periodic_anchors(U)
    attempts = 0
    for m in range(1, m_max + 1):
        for a in anchors:
            ladders = [_forward_ladder(p, PERIODIC_ROUTE_CAP) for p in _anchor_points(Disc(a, U.radius / 4))]
            target = Disc(a, min(U.boundary_distance(a) * 0.9, abs(a) / 2 if a != 0 else U.radius))
            if target.radius <= 0:
                continue
            for orbit in _backward_routes(
                a, target, m, ladders, route_cap=PERIODIC_ROUTE_CAP
            ):
                attempts += 1
                got = _close_periodic_route(U, orbit, m, seed)
                if got is not None:
                    return got
    raise WitnessNotFound(
        f"no verifiable repelling periodic point found in {U} "
        f"(depth <= {m_max}, {attempts} routes tried); the disc may force "
        "orbit rungs beyond double-precision verification"
    )


def _periodic_anchors(U: Disc) -> list[complex]:
    """Anchor candidates inside U kept away from the origin."""
    c, r = U.center, U.radius
    out = []
    for a in _anchor_points(U):
        if abs(a) <= 0.1 * r:
            u = a / abs(a) if a != 0 else complex(1.0)
            a = a + 0.45 * r * u
        out.append(a)
    return out


def _close_periodic_route(U, orbit, m, seed):
    windows = [z.imag for z in orbit[:-1]]  # window for the branch into z_j

    def backward_pass(x: complex) -> complex:
        for j in range(m - 1, -1, -1):
            x = windowed_log(x, BranchSpec.from_center(windows[j]))
        return x

    x = orbit[-1]
    contraction_steps = None
    try:
        for it in range(1, 80):
            x2 = backward_pass(x)
            diff = abs(x2 - x)
            x = x2
            if contraction_steps is None and diff <= 1e-12:
                contraction_steps = it
            if diff <= 1e-15 * max(1.0, abs(x)):
                break
        else:
            return None
    except (OnCut, ZeroArgument, ValueError, OverflowError):
        return None
    if contraction_steps is None:
        return None

    period = _minimal_period(x, m)
    p, polish_steps = _newton_polish_periodic(x, period)
    cycle = _orbit_prefix(p, period)
    if cycle is None:
        return None
    residual = abs(cycle[-1] - p)
    log_mag, _ = multiplier_along(cycle)
    mult_mod = math.exp(log_mag)
    if residual > 1e-9 or mult_mod < 2.0 or not U.contains(p):
        return None
    result = PeriodicPointResult(
        point=p,
        period=period,
        multiplier_modulus=mult_mod,
        residual=residual,
        contraction_steps=contraction_steps,
    )
    report = WitnessReport(
        kind="periodic",
        seed=seed,
        inputs={"disc": U.to_json()},
        outputs={
            "point": _c2j(p),
            "period": period,
            "multiplier_modulus": mult_mod,
            "residual": residual,
            "contraction_steps": contraction_steps,
        },
        diagnostics={
            "route_depth": m,
            "windows": windows,
            "polish_steps": polish_steps,
            "cycle": [_c2j(z) for z in cycle[:-1]],
            "method": _METHOD_NOTE,
        },
    )
    return result, report


def _minimal_period(p: complex, m: int) -> int:
    for d in range(1, m):
        if m % d == 0:
            cyc = _orbit_prefix(p, d)
            if cyc is not None and abs(cyc[-1] - p) <= 1e-9:
                return d
    return m


def _newton_polish_periodic(p: complex, period: int, steps: int = 4) -> tuple[complex, int]:
    """A few Newton steps on f^period(z) - z to drop the residual to noise level."""
    used = 0
    cycle = _orbit_prefix(p, period)
    if cycle is None:
        return p, used
    best, best_res = p, abs(cycle[-1] - p)
    for _ in range(steps):
        cycle = _orbit_prefix(best, period)
        if cycle is None:
            break
        h = cycle[-1] - best
        _, dmult = multiplier_along(cycle)
        if dmult is None or dmult == 1:
            break
        cand = best - h / (dmult - 1)
        cyc2 = _orbit_prefix(cand, period)
        if cyc2 is None:
            break
        res2 = abs(cyc2[-1] - cand)
        if res2 >= best_res:
            break
        best, best_res = cand, res2
        used += 1
    return best, used


# ---------------------------------------------------------------------------
# sensitive dependence


def sensitivity_witness(
    U: Disc, *, seed: int = 0, target: complex = -1.0, m_max: int = 16
) -> tuple[tuple[complex, complex, int], WitnessReport]:
    """Points z, w in U and n with |f^n(z)| <= 1 and |f^n(w) - f^n(z)| >= 1.

    w escapes through the axis, so |f^j(w)| >= 2 for all j past some n0; z is
    a transitivity witness hitting the given left-half-plane target at a time
    past n0, so one extra step puts it at e^target, of modulus
    e^{re target} <= 1.  The separation is at least 2 - e^{re target} >= 1.
    """
    target = complex(target)
    if target.real > 0:
        raise ValueError("sensitivity target must have re <= 0")
    w, w_report = find_escaping_point(
        Disc(U.center, U.radius * 0.95), seed=seed, settle_for_axis=True
    )
    m_w = w_report.outputs["stage"]
    height = w_report.outputs["height"]
    n0 = m_w + _steps_until_height(height, 2.0)
    (z, n_hit), t_report = transitivity_witness(
        U, target, n_min=n0, seed=seed, m_max=m_max
    )
    n = n_hit + 1
    bounded_mod = math.exp(target.real)
    report = WitnessReport(
        kind="sensitivity",
        seed=seed,
        inputs={"disc": U.to_json(), "target": _c2j(target)},
        outputs={
            "z": _c2j(z),
            "w": _c2j(w),
            "n": n,
            "bounded_value_mod": bounded_mod,
            "escape_lower_bound": 2.0,
            "separation_lower_bound": 2.0 - bounded_mod,
        },
        diagnostics={
            "n0": n0,
            "w_stage": m_w,
            "w_height": height,
            "transitivity": t_report.to_json(),
            "method": _METHOD_NOTE,
        },
        chain=t_report.chain,
    )
    return (z, w, n), report


def _steps_until_height(h: float, goal: float) -> int:
    """Forward steps a real axis point at height h needs to exceed goal."""
    steps = 0
    while h < goal:
        h = math.exp(min(h, OVERFLOW_RE))
        steps += 1
        if steps > 4:
            break
    return steps


# ---------------------------------------------------------------------------
# verification


def verify_report(report: WitnessReport | dict, tol_factor: float = 10.0) -> VerificationResult:
    """Replay a witness report; residuals must come out within tol_factor of
    the claimed tolerances.  Only representable forward steps and stepwise
    branch inversions are executed."""
    if isinstance(report, dict):
        report = WitnessReport.from_json(report)
    result = VerificationResult(ok=True)
    if report.kind == "escaping":
        _verify_escaping(report, result, tol_factor)
    elif report.kind == "transitivity":
        _verify_transitivity(report, result, tol_factor)
    elif report.kind == "periodic":
        _verify_periodic(report, result, tol_factor)
    elif report.kind == "sensitivity":
        _verify_sensitivity(report, result, tol_factor)
    else:
        result.add("kind", False, f"unknown witness kind {report.kind!r}")
    return result


def _verify_escaping(report, result, tol_factor) -> None:
    disc = Disc.from_json(report.inputs["disc"])
    z = _j2c(report.outputs["z"])
    m = report.outputs["stage"]
    result.add("point-in-disc", disc.contains(z), f"z = {z}")
    ev = _fm_guarded(z, m)
    if ev is None:
        result.add("orbit-representable", False, f"overflow before step {m}")
        return
    landing = ev[0]
    tol = report.diagnostics["axis_tol"] * tol_factor
    result.add(
        "axis-landing",
        landing.real >= 0 and abs(landing.imag) <= tol * max(1.0, landing.real),
        f"f^{m}(z) = {landing}",
    )
    if report.outputs["mode"] == "height-targeted":
        t_star = report.inputs["t_star"]
        result.add(
            "height",
            abs(landing.real - t_star) <= HEIGHT_TOL * tol_factor,
            f"height {landing.real} vs target {t_star}",
        )


def _check_transitivity_core(inputs, outputs, diagnostics, result, tol_factor) -> None:
    disc = Disc.from_json(inputs["disc"])
    v = _j2c(inputs["target"])
    z = _j2c(outputs["z"])
    n = outputs["n"]
    ys = [_j2c(p) for p in diagnostics["intermediates"]]
    f2 = diagnostics["f2"]
    result.add("point-in-disc", disc.contains(z), f"z = {z}")
    result.add("start-matches", abs(ys[0] - z) <= 1e-12 * max(1.0, abs(z)))
    result.add("hit-time", n == len(ys) - 1 + 2, f"n = {n}, k = {len(ys) - 1}")
    if n < inputs.get("n_min", 0):
        result.add("n-min", False, f"n = {n} < n_min = {inputs['n_min']}")
    total = 0.0
    for j in range(len(ys) - 1):
        step = exp_map(ys[j])
        total += abs(step - ys[j + 1]) / max(abs(ys[j + 1]), 1e-300)
    w = complex(f2["re_w"], f2["im_w"])
    step = exp_map(ys[-1])
    total += abs(step - w) / max(abs(w), 1e-300)
    back = math.exp(f2["re_w"]) * _cis(f2["alpha"])
    total += abs(back - v) / max(abs(v), 1e-300)
    # alpha must really be the mod-2*pi residue of im w = alpha + 2*pi*index
    idx = f2["branch_index"]
    alpha_ok = (
        abs(f2["alpha"] + TAU * float(idx) - f2["im_w"])
        <= max(1.0, abs(f2["im_w"])) * 1e-12
    )
    result.add("branch-index-consistent", alpha_ok)
    result.add(
        "stepwise-inversion",
        total <= 1e-8 * tol_factor,
        f"cumulative residual {total}",
    )


def _verify_transitivity(report, result, tol_factor) -> None:
    _check_transitivity_core(
        report.inputs, report.outputs, report.diagnostics, result, tol_factor
    )


def _verify_periodic(report, result, tol_factor) -> None:
    disc = Disc.from_json(report.inputs["disc"])
    p = _j2c(report.outputs["point"])
    period = report.outputs["period"]
    result.add("point-in-disc", disc.contains(p), f"p = {p}")
    cycle = _orbit_prefix(p, period)
    if cycle is None:
        result.add("orbit-representable", False)
        return
    residual = abs(cycle[-1] - p)
    result.add(
        "forward-residual",
        residual <= max(report.outputs["residual"] * tol_factor, 1e-9 * tol_factor),
        f"|f^{period}(p) - p| = {residual}",
    )
    log_mag, _ = multiplier_along(cycle)
    mult = math.exp(log_mag)
    result.add("repelling", mult >= 2.0, f"multiplier modulus {mult}")
    claimed = report.outputs["multiplier_modulus"]
    result.add(
        "multiplier-matches",
        abs(mult - claimed) <= 1e-6 * claimed,
        f"recomputed {mult} vs claimed {claimed}",
    )


def _verify_sensitivity(report, result, tol_factor) -> None:
    disc = Disc.from_json(report.inputs["disc"])
    target = _j2c(report.inputs["target"])
    z = _j2c(report.outputs["z"])
    w = _j2c(report.outputs["w"])
    n = report.outputs["n"]
    result.add("z-in-disc", disc.contains(z))
    result.add("w-in-disc", disc.contains(w))
    tdoc = report.diagnostics["transitivity"]
    _check_transitivity_core(
        tdoc["inputs"], tdoc["outputs"], tdoc["diagnostics"], result, tol_factor
    )
    result.add(
        "times-consistent",
        n == tdoc["outputs"]["n"] + 1 and abs(_j2c(tdoc["outputs"]["z"]) - z) == 0,
    )
    bounded = abs(cmath.exp(target))
    result.add(
        "bounded-side",
        bounded <= 1.0 and abs(bounded - report.outputs["bounded_value_mod"]) <= 1e-12,
        f"|f^n(z)| = e^{target.real} = {bounded}",
    )
    # escaping side: replay w to its axis landing, then use monotone growth
    n0 = report.diagnostics["n0"]
    m_w = report.diagnostics["w_stage"]
    ev = _fm_guarded(w, m_w)
    if ev is None:
        result.add("w-orbit-representable", False)
        return
    landing = ev[0]
    ok_axis = landing.real >= 0 and abs(landing.imag) <= 1e-9 * max(1.0, landing.real)
    result.add("w-axis-landing", ok_axis, f"f^{m_w}(w) = {landing}")
    steps = _steps_until_height(landing.real, 2.0)
    result.add(
        "escape-threshold",
        m_w + steps <= n0 <= n - 1,
        f"|f^j(w)| >= 2 for j >= {m_w + steps}, n0 = {n0}, n = {n}",
    )
    separation = 2.0 - bounded
    result.add(
        "separation",
        separation >= 1.0
        and abs(separation - report.outputs["separation_lower_bound"]) <= 1e-12,
        f"|f^n(w) - f^n(z)| >= {separation}",
    )


# seeded generators appear in reports so reruns are bit-for-bit identical
def report_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
