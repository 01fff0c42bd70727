"""Forward iteration of z -> e^z with overflow-safe bookkeeping.

The orbit of z0 is the sequence z0, e^{z0}, e^{e^{z0}}, ...  Real parts grow
tower-exponentially, so double precision survives at most one step past
re > 709.  That one extra step is carried in log-polar form: if w = e^z then
log|w| = re z and arg w = im z (unreduced), which needs no exponentiation.
"""

import cmath
import csv
import json
import math
from dataclasses import dataclass
from enum import Enum

# Largest re for which e^z is representable in double precision.
OVERFLOW_RE = 709.0

DEFAULT_ESCAPE_RE = 50.0
DEFAULT_SCAN_LIMIT = 64
DEFAULT_AXIS_TOL = 1e-10
DEFAULT_PERIOD_TOL = 1e-9
DEFAULT_CONSEC = 3


def exp_map(z: complex) -> complex:
    """One step of the dynamics: e^x * (cos y + i sin y) for z = x + iy.

    Raises OverflowError for re z > 709; callers that need one more step
    switch to the log-polar shadow instead.
    """
    x, y = z.real, z.imag
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"exp_map needs a finite point, got {z!r}")
    if x > OVERFLOW_RE:
        raise OverflowError(
            f"re z = {x} > {OVERFLOW_RE}: e^z exceeds double precision, "
            "use the log-polar shadow"
        )
    e = math.exp(x)
    return complex(e * math.cos(y), e * math.sin(y))


@dataclass(frozen=True)
class LogPolarPoint:
    """A complex value stored as (log modulus, lifted argument).

    Represents exp(log_mod) * (cos arg + i sin arg).  The argument is kept on
    the real line, not reduced mod 2*pi, because branch bookkeeping downstream
    needs the winding information that reduction destroys.
    """

    log_mod: float
    arg: float

    def to_complex(self) -> complex:
        if self.log_mod > OVERFLOW_RE:
            raise OverflowError(
                f"log_mod = {self.log_mod} > {OVERFLOW_RE}: not representable"
            )
        e = math.exp(self.log_mod)
        return complex(e * math.cos(self.arg), e * math.sin(self.arg))

    @classmethod
    def from_complex(cls, z: complex) -> "LogPolarPoint":
        if z == 0:
            return cls(float("-inf"), 0.0)
        return cls(math.log(abs(z)), cmath.phase(z))


class OrbitLabel(Enum):
    ESCAPING_CERTIFIED = "escaping-certified"
    ESCAPING_HEURISTIC = "escaping-heuristic"
    PERIODIC = "periodic"
    UNRESOLVED = "unresolved"
    OVERFLOWED = "overflowed"


@dataclass(frozen=True)
class Classification:
    label: OrbitLabel
    period: int | None = None
    at_step: int | None = None

    def to_json(self) -> dict:
        doc: dict = {"label": self.label.value}
        if self.period is not None:
            doc["period"] = self.period
        if self.at_step is not None:
            doc["at_step"] = self.at_step
        return doc


@dataclass(frozen=True)
class OrbitRecord:
    """A finite orbit prefix with per-step log-polar shadows.

    points[k+1] = exp_map(points[k]) for every recorded step.  shadows runs
    parallel to points; shadows[k+1] = (points[k].re, points[k].im) exactly,
    by construction.  When the next point is not representable its shadow is
    carried in overflow_shadow and the record stops.
    """

    start: complex
    points: tuple[complex, ...]
    shadows: tuple[LogPolarPoint, ...]
    classification: Classification
    overflow_shadow: LogPolarPoint | None = None

    @property
    def length(self) -> int:
        """Number of recorded points (orbit prefix length)."""
        return len(self.points)

    def to_json(self) -> dict:
        doc = {
            "start": [self.start.real, self.start.imag],
            "length": self.length,
            "classification": self.classification.to_json(),
            "points": [[p.real, p.imag] for p in self.points],
            "shadows": [[s.log_mod, s.arg] for s in self.shadows],
        }
        if self.overflow_shadow is not None:
            doc["overflow_shadow"] = [
                self.overflow_shadow.log_mod,
                self.overflow_shadow.arg,
            ]
        return doc

    def to_json_str(self, **kwargs) -> str:
        return json.dumps(self.to_json(), **kwargs)

    def to_csv(self, fileobj) -> None:
        """Write columns step, re, im, log_mod, arg.

        The overflow shadow, if any, becomes a final row with empty re/im.
        """
        writer = csv.writer(fileobj)
        writer.writerow(["step", "re", "im", "log_mod", "arg"])
        for k, (p, s) in enumerate(zip(self.points, self.shadows)):
            writer.writerow([k, repr(p.real), repr(p.imag), repr(s.log_mod), repr(s.arg)])
        if self.overflow_shadow is not None:
            s = self.overflow_shadow
            writer.writerow([len(self.points), "", "", repr(s.log_mod), repr(s.arg)])


def on_positive_axis(z: complex, tol: float = DEFAULT_AXIS_TOL) -> bool:
    """Tolerance-qualified membership of [0, inf): |im| <= tol * max(1, re)."""
    return z.real >= 0.0 and abs(z.imag) <= tol * max(1.0, z.real)


def _detect_period(
    points: list[complex], scan_limit: int, tol: float
) -> int | None:
    """Smallest p with |last - last_minus_p|^2 <= tol^2 within the scan window."""
    last = points[-1]
    top = min(scan_limit, len(points) - 1)
    t2 = tol * tol
    for p in range(1, top + 1):
        d = last - points[-1 - p]
        if d.real * d.real + d.imag * d.imag <= t2:
            return p
    return None


def iterate(
    z0: complex,
    max_steps: int,
    escape_re_threshold: float = DEFAULT_ESCAPE_RE,
    period_scan_limit: int = DEFAULT_SCAN_LIMIT,
    *,
    axis_tol: float = DEFAULT_AXIS_TOL,
    period_tol: float = DEFAULT_PERIOD_TOL,
    threshold_consec: int = DEFAULT_CONSEC,
) -> OrbitRecord:
    """Record the forward orbit of z0 until max_steps, overflow, or periodicity.

    Log-polar shadows are maintained in parallel; when a point overflows, its
    shadow is still recorded (overflow_shadow) before stopping.  The
    classification is filled in per classify_orbit with the same parameters.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    z0 = complex(z0)
    points: list[complex] = [z0]
    shadows: list[LogPolarPoint] = [LogPolarPoint.from_complex(z0)]
    overflow_shadow: LogPolarPoint | None = None
    for _ in range(max_steps):
        z = points[-1]
        if z.real > OVERFLOW_RE:
            overflow_shadow = LogPolarPoint(z.real, z.imag)
            break
        points.append(exp_map(z))
        shadows.append(LogPolarPoint(z.real, z.imag))
        if _detect_period(points, period_scan_limit, period_tol) is not None:
            break
    record = OrbitRecord(
        start=z0,
        points=tuple(points),
        shadows=tuple(shadows),
        classification=Classification(OrbitLabel.UNRESOLVED),
        overflow_shadow=overflow_shadow,
    )
    cls = classify_orbit(
        record,
        escape_re_threshold=escape_re_threshold,
        period_scan_limit=period_scan_limit,
        axis_tol=axis_tol,
        period_tol=period_tol,
        threshold_consec=threshold_consec,
    )
    return OrbitRecord(
        start=z0,
        points=tuple(points),
        shadows=tuple(shadows),
        classification=cls,
        overflow_shadow=overflow_shadow,
    )


def classify_orbit(
    record: OrbitRecord,
    *,
    escape_re_threshold: float = DEFAULT_ESCAPE_RE,
    period_scan_limit: int = DEFAULT_SCAN_LIMIT,
    axis_tol: float = DEFAULT_AXIS_TOL,
    period_tol: float = DEFAULT_PERIOD_TOL,
    threshold_consec: int = DEFAULT_CONSEC,
) -> Classification:
    """Deterministic classification of a recorded orbit.

    Precedence: a point on the nonnegative real axis (within tolerance)
    certifies escape, since [0, inf) lies in the escaping set.  Large real
    parts alone are only heuristic evidence: threshold_consec consecutive
    points with re above escape_re_threshold, or overflow while re was
    increasing.  Periodicity is a pairwise scan over the last
    period_scan_limit points at tolerance period_tol.  Otherwise the orbit is
    unresolved, or overflowed if it stopped that way.
    """
    points = record.points
    if any(on_positive_axis(p, axis_tol) for p in points):
        return Classification(OrbitLabel.ESCAPING_CERTIFIED)

    consec = 0
    threshold_run = False
    for p in points:
        consec = consec + 1 if p.real > escape_re_threshold else 0
        if consec >= threshold_consec:
            threshold_run = True
            break
    overflowed = record.overflow_shadow is not None
    re_increasing = (
        overflowed
        and len(points) >= 2
        and points[-1].real > points[-2].real
    )
    if threshold_run or re_increasing:
        return Classification(OrbitLabel.ESCAPING_HEURISTIC)

    if len(points) >= 2:
        period = _detect_period(list(points), period_scan_limit, period_tol)
        if period is not None:
            return Classification(OrbitLabel.PERIODIC, period=period)

    if overflowed:
        return Classification(OrbitLabel.OVERFLOWED, at_step=len(points))
    return Classification(OrbitLabel.UNRESOLVED)


def multiplier_along(points) -> tuple[float, complex | None]:
    """Derivative of the n-fold map along an orbit prefix, by the chain rule.

    For points z_0 .. z_n the derivative of the n-th iterate at z_0 is the
    product of e^{z_k} = z_{k+1}, i.e. prod of points[1:].  Returns the sum of
    log moduli (always finite while points are nonzero) and the complex
    product when its modulus stays below 1e300.
    """
    pts = [complex(p) for p in points]
    if len(pts) < 2:
        raise ValueError("need an orbit prefix of length >= 2")
    log_mag = 0.0
    phase = 0.0
    for z in pts[1:]:
        log_mag += math.log(abs(z))
        phase += cmath.phase(z)
    if log_mag <= math.log(1e300):
        value = cmath.exp(complex(log_mag, phase))
    else:
        value = None
    return log_mag, value
