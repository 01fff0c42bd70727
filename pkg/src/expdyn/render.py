"""Deterministic raster rendering: escape-time maps and density heatmaps.

Output is binary PPM (P6, maxval 255): bit-exact, dependency-free, trivially
golden-testable.  Convert with e.g. ImageMagick if PNG is wanted.  Renders
are pure functions of (GridSpec, RenderParams); row-parallel output is
byte-identical to sequential because rows are written by index.
"""

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .hyperbolic import Domain

# Classification palette (RGB), fixed and documented in the README.
CLASS_COLORS = {
    _kernels.CODE_CERTIFIED: (235, 235, 235),
    _kernels.CODE_HEURISTIC: (66, 135, 245),
    _kernels.CODE_PERIODIC: (219, 68, 55),
    _kernels.CODE_UNRESOLVED: (24, 24, 24),
    _kernels.CODE_OVERFLOWED: (155, 89, 182),
}

_DOMAIN_NAMES = {
    Domain.UNIT_DISC: "unit-disc",
    Domain.RIGHT_HALF_PLANE: "right-half-plane",
    Domain.STRIP_PI: "strip-pi",
    Domain.SLIT_PLANE_POS: "slit-plane-pos",
    Domain.SLIT_PLANE_NEG: "slit-plane-neg",
}


@dataclass(frozen=True)
class GridSpec:
    """Pixel grid over a rectangle; pixel (0,0) is the top-left corner
    (re_min, im_max) and pixel centers sample the rectangle."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("need re_min < re_max and im_min < im_max")
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be positive")

    def re_centers(self) -> np.ndarray:
        step = (self.re_max - self.re_min) / self.width
        return self.re_min + (np.arange(self.width) + 0.5) * step

    def im_centers(self) -> np.ndarray:
        step = (self.im_max - self.im_min) / self.height
        return self.im_max - (np.arange(self.height) + 0.5) * step


@dataclass(frozen=True)
class RenderParams:
    max_steps: int = 40
    escape_re_threshold: float = 50.0
    palette: str = "grayscale"  # or "classification"

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.palette not in ("grayscale", "classification"):
            raise ValueError(f"unknown palette {self.palette!r}")


def ppm_bytes(rgb: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as binary PPM (P6, maxval 255)."""
    h, w, _ = rgb.shape
    return b"P6\n%d %d\n255\n" % (w, h) + rgb.astype(np.uint8).tobytes()


def _row_parallel(height: int, workers: int, run_chunk) -> None:
    """Partition rows into contiguous chunks and run them, possibly threaded.

    run_chunk(lo, hi) must write only rows [lo, hi) of preallocated output,
    so assembly is order-independent.
    """
    if workers <= 1:
        run_chunk(0, height)
        return
    bounds = np.linspace(0, height, workers + 1).astype(int)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run_chunk, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()


def escape_arrays(
    grid: GridSpec, params: RenderParams, *, workers: int = 1, backend: str | None = None
):
    """Per-pixel classification codes, crossing steps, periods for the grid."""
    res = grid.re_centers()
    ims = grid.im_centers()
    codes = np.empty((grid.height, grid.width), np.uint8)
    steps = np.empty((grid.height, grid.width), np.int32)
    periods = np.empty((grid.height, grid.width), np.int32)

    def run_chunk(lo, hi):
        c, s, p = _kernels.escape_grid(
            res,
            ims[lo:hi],
            max_steps=params.max_steps,
            escape_re_threshold=params.escape_re_threshold,
            backend=backend,
        )
        codes[lo:hi] = c
        steps[lo:hi] = s
        periods[lo:hi] = p

    _row_parallel(grid.height, workers, run_chunk)
    return codes, steps, periods


def render_escape_map(
    grid: GridSpec,
    params: RenderParams,
    *,
    workers: int = 1,
    backend: str | None = None,
) -> bytes:
    """Escape-time map as PPM bytes; one classify call per pixel center.

    Grayscale maps the first threshold-crossing step linearly: crossing at
    step s gives gray 255*(max_steps - s)//max_steps, never-crossed pixels are
    black.  The classification palette uses the fixed colors in CLASS_COLORS.
    """
    codes, steps, _ = escape_arrays(grid, params, workers=workers, backend=backend)
    if params.palette == "grayscale":
        crossed = steps >= 0
        gray = np.zeros_like(steps)
        gray[crossed] = (255 * (params.max_steps - steps[crossed])) // params.max_steps
        rgb = np.repeat(gray.astype(np.uint8)[:, :, np.newaxis], 3, axis=2)
    else:
        lut = np.zeros((5, 3), np.uint8)
        for code, color in CLASS_COLORS.items():
            lut[code] = color
        rgb = lut[codes]
    return ppm_bytes(rgb)


def render_density_map(
    domain: Domain,
    grid: GridSpec,
    *,
    workers: int = 1,
    backend: str | None = None,
) -> bytes:
    """Hyperbolic log-density heatmap as PPM bytes; out-of-domain pixels black.

    In-domain log densities map linearly onto gray 1..255 (min to max over
    the rendered grid; a constant field maps to 128).
    """
    res = grid.re_centers()
    ims = grid.im_centers()
    name = _DOMAIN_NAMES[domain]
    logrho = np.empty((grid.height, grid.width), np.float64)
    inside = np.empty((grid.height, grid.width), np.bool_)

    def run_chunk(lo, hi):
        lr, ins = _kernels.density_grid(name, res, ims[lo:hi], backend=backend)
        logrho[lo:hi] = lr
        inside[lo:hi] = ins

    _row_parallel(grid.height, workers, run_chunk)

    gray = np.zeros((grid.height, grid.width), np.uint8)
    if inside.any():
        vals = logrho[inside]
        vmin = float(vals.min())
        vmax = float(vals.max())
        if vmax > vmin:
            scaled = 1.0 + (logrho[inside] - vmin) * (254.0 / (vmax - vmin))
            gray[inside] = np.floor(scaled).astype(np.uint8)
        else:
            gray[inside] = 128
    rgb = np.repeat(gray[:, :, np.newaxis], 3, axis=2)
    return ppm_bytes(rgb)
