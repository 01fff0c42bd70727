"""Grid kernels: numba-jitted hot loops with a pure-numpy fallback.

Backend selection: the EXPDYN_KERNEL environment variable ("numba" or
"numpy"); default is numba when importable.  Both backends implement
identical decision logic.  Density kernels use only operations that are
bit-identical between libm and numpy (sqrt, log, cos, arithmetic), so their
grids agree across backends to the bit; escape grids involve exp, whose
numpy SIMD path may differ from libm in the last ulp, so escape goldens are
recorded per backend.

Classification codes: 0 escaping-certified, 1 escaping-heuristic,
2 periodic, 3 unresolved, 4 overflowed.
"""

import math
import os

import numpy as np

CODE_CERTIFIED = 0
CODE_HEURISTIC = 1
CODE_PERIODIC = 2
CODE_UNRESOLVED = 3
CODE_OVERFLOWED = 4

_OVERFLOW_RE = 709.0

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if _HAVE_NUMBA else ("numpy",)


def active_backend() -> str:
    choice = os.environ.get("EXPDYN_KERNEL", "").strip().lower()
    if choice in ("numba", "numpy"):
        if choice == "numba" and not _HAVE_NUMBA:
            raise RuntimeError("EXPDYN_KERNEL=numba but numba is not importable")
        return choice
    return "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# escape-time classification


def _escape_rows_py(res, ims, max_steps, thr, axis_tol, period_tol, window,
                    consec_needed, codes, steps, periods):
    t2 = period_tol * period_tol
    bufx = np.empty(window, np.float64)
    bufy = np.empty(window, np.float64)
    for j in range(ims.size):
        y0 = ims[j]
        for i in range(res.size):
            x = res[i]
            y = y0
            axis = x >= 0.0 and abs(y) <= axis_tol * max(1.0, x)
            crossing = 0 if x > thr else -1
            consec = 1 if x > thr else 0
            threshold_run = consec >= consec_needed
            period = 0
            over_at = -1
            re_incr = False
            prev_re = 0.0
            bufx[0] = x
            bufy[0] = y
            for n in range(1, max_steps + 1):
                if x > _OVERFLOW_RE:
                    over_at = n
                    re_incr = n >= 2 and x > prev_re
                    break
                prev_re = x
                e = math.exp(x)
                nx = e * math.cos(y)
                ny = e * math.sin(y)
                x = nx
                y = ny
                if x >= 0.0 and abs(y) <= axis_tol * max(1.0, x):
                    axis = True
                if x > thr:
                    consec += 1
                    if crossing < 0:
                        crossing = n
                    if consec >= consec_needed:
                        threshold_run = True
                else:
                    consec = 0
                top = n if n < window else window
                for p in range(1, top + 1):
                    idx = (n - p) % window
                    dx = x - bufx[idx]
                    dy = y - bufy[idx]
                    if dx * dx + dy * dy <= t2:
                        period = p
                        break
                if period > 0:
                    break
                bufx[n % window] = x
                bufy[n % window] = y
            if axis:
                code = CODE_CERTIFIED
            elif threshold_run or (over_at >= 0 and re_incr):
                code = CODE_HEURISTIC
            elif period > 0:
                code = CODE_PERIODIC
            elif over_at >= 0:
                code = CODE_OVERFLOWED
            else:
                code = CODE_UNRESOLVED
            codes[j, i] = code
            steps[j, i] = crossing
            periods[j, i] = period


if _HAVE_NUMBA:
    _escape_rows_numba = numba.njit(cache=False, nogil=True)(_escape_rows_py)


def _escape_rows_numpy(res, ims, max_steps, thr, axis_tol, period_tol, window,
                       consec_needed, codes, steps, periods):
    w = res.size
    rows_per_slab = max(1, (1 << 22) // max(1, w * window))
    t2 = period_tol * period_tol
    for lo in range(0, ims.size, rows_per_slab):
        hi = min(lo + rows_per_slab, ims.size)
        x = np.repeat(res[np.newaxis, :], hi - lo, axis=0).ravel()
        y = np.repeat(ims[lo:hi, np.newaxis], w, axis=1).ravel()
        npix = x.size
        alive = np.ones(npix, np.bool_)
        axis = (x >= 0.0) & (np.abs(y) <= axis_tol * np.maximum(1.0, x))
        big0 = x > thr
        crossing = np.where(big0, 0, -1).astype(np.int32)
        consec = big0.astype(np.int32)
        threshold_run = consec >= consec_needed
        period = np.zeros(npix, np.int32)
        over_at = np.full(npix, -1, np.int32)
        re_incr = np.zeros(npix, np.bool_)
        prev_re = np.zeros(npix, np.float64)
        bufx = np.empty((window, npix), np.float64)
        bufy = np.empty((window, npix), np.float64)
        bufx[0] = x
        bufy[0] = y
        for n in range(1, max_steps + 1):
            if not alive.any():
                break
            of = alive & (x > _OVERFLOW_RE)
            if of.any():
                over_at[of] = n
                if n >= 2:
                    re_incr[of] = x[of] > prev_re[of]
                alive &= ~of
            a = alive
            if not a.any():
                break
            prev_re[a] = x[a]
            e = np.exp(x[a])
            nx = e * np.cos(y[a])
            ny = e * np.sin(y[a])
            x[a] = nx
            y[a] = ny
            hit_axis = (nx >= 0.0) & (np.abs(ny) <= axis_tol * np.maximum(1.0, nx))
            axis[a] |= hit_axis
            big = nx > thr
            consec_a = consec[a]
            consec_a = np.where(big, consec_a + 1, 0)
            consec[a] = consec_a
            cross_a = crossing[a]
            crossing[a] = np.where(big & (cross_a < 0), n, cross_a)
            threshold_run[a] |= consec_a >= consec_needed
            top = n if n < window else window
            for p in range(1, top + 1):
                idx = (n - p) % window
                dx = x - bufx[idx]
                dy = y - bufy[idx]
                hit = a & (period == 0) & (dx * dx + dy * dy <= t2)
                if hit.any():
                    period[hit] = p
            newly = a & (period > 0)
            if newly.any():
                alive &= ~newly
            store = a
            bufx[n % window][store] = x[store]
            bufy[n % window][store] = y[store]
        code = np.full(npix, CODE_UNRESOLVED, np.uint8)
        code[over_at >= 0] = CODE_OVERFLOWED
        code[period > 0] = CODE_PERIODIC
        code[threshold_run | ((over_at >= 0) & re_incr)] = CODE_HEURISTIC
        code[axis] = CODE_CERTIFIED
        codes[lo:hi] = code.reshape(hi - lo, w)
        steps[lo:hi] = crossing.reshape(hi - lo, w)
        periods[lo:hi] = period.reshape(hi - lo, w)


def escape_grid(res, ims, max_steps=40, escape_re_threshold=50.0, *,
                axis_tol=1e-10, period_tol=1e-9, period_scan_limit=64,
                threshold_consec=3, backend=None):
    """Classify the orbit of each pixel center; returns (codes, steps, periods).

    codes is uint8 per the module table, steps the first threshold-crossing
    step (-1 when never crossed), periods the detected period (0 when none).
    """
    res = np.ascontiguousarray(res, np.float64)
    ims = np.ascontiguousarray(ims, np.float64)
    h, w = ims.size, res.size
    codes = np.empty((h, w), np.uint8)
    steps = np.empty((h, w), np.int32)
    periods = np.empty((h, w), np.int32)
    backend = backend or active_backend()
    fn = _escape_rows_numba if backend == "numba" else _escape_rows_numpy
    fn(res, ims, int(max_steps), float(escape_re_threshold), float(axis_tol),
       float(period_tol), int(period_scan_limit), int(threshold_consec),
       codes, steps, periods)
    return codes, steps, periods


# ---------------------------------------------------------------------------
# hyperbolic density grids

DOMAIN_CODES = {
    "unit-disc": 0,
    "right-half-plane": 1,
    "strip-pi": 2,
    "slit-plane-pos": 3,
    "slit-plane-neg": 4,
}


def _density_rows_py(domain, res, ims, logrho, inside):
    # Only +,*,/ (exactly rounded), sqrt (exactly rounded), log and cos
    # (bit-identical between numpy and libm here), so both backends and the
    # numpy kernel produce identical bits.
    pi = math.pi
    for j in range(ims.size):
        y = ims[j]
        for i in range(res.size):
            x = res[i]
            ok = False
            val = 0.0
            if domain == 0:
                m2 = x * x + y * y
                if m2 < 1.0:
                    ok = True
                    val = math.log(2.0 / (1.0 - m2))
            elif domain == 1:
                if x > 0.0:
                    ok = True
                    val = math.log(1.0 / x)
            elif domain == 2:
                if -pi < y < pi:
                    ok = True
                    val = math.log(1.0 / (2.0 * math.cos(y * 0.5)))
            elif domain == 3:
                if not (y == 0.0 and x >= 0.0):
                    r = math.sqrt(x * x + y * y)
                    ok = True
                    val = math.log(1.0 / math.sqrt(2.0 * r * (r - x)))
            else:
                if not (y == 0.0 and x <= 0.0):
                    r = math.sqrt(x * x + y * y)
                    ok = True
                    val = math.log(1.0 / math.sqrt(2.0 * r * (r + x)))
            inside[j, i] = ok
            logrho[j, i] = val if ok else 0.0


if _HAVE_NUMBA:
    _density_rows_numba = numba.njit(cache=False, nogil=True)(_density_rows_py)


def _density_rows_numpy(domain, res, ims, logrho, inside):
    x = res[np.newaxis, :]
    y = ims[:, np.newaxis]
    if domain == 0:
        m2 = x * x + y * y
        ok = m2 < 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.log(2.0 / (1.0 - m2))
    elif domain == 1:
        ok = x > 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.log(1.0 / x) + 0.0 * y
    elif domain == 2:
        ok = (-np.pi < y) & (y < np.pi)
        val = np.log(1.0 / (2.0 * np.cos(y * 0.5))) + 0.0 * x
    elif domain == 3:
        r = np.sqrt(x * x + y * y)
        ok = ~((y == 0.0) & (x >= 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.log(1.0 / np.sqrt(2.0 * r * (r - x)))
    else:
        r = np.sqrt(x * x + y * y)
        ok = ~((y == 0.0) & (x <= 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.log(1.0 / np.sqrt(2.0 * r * (r + x)))
    ok = np.broadcast_to(ok, (ims.size, res.size))
    inside[:, :] = ok
    logrho[:, :] = np.where(ok, val, 0.0)


def density_grid(domain_name: str, res, ims, *, backend=None):
    """Log hyperbolic density at pixel centers; returns (logrho, inside mask)."""
    res = np.ascontiguousarray(res, np.float64)
    ims = np.ascontiguousarray(ims, np.float64)
    code = DOMAIN_CODES[domain_name]
    logrho = np.empty((ims.size, res.size), np.float64)
    inside = np.empty((ims.size, res.size), np.bool_)
    backend = backend or active_backend()
    fn = _density_rows_numba if backend == "numba" else _density_rows_numpy
    fn(code, res, ims, logrho, inside)
    return logrho, inside
