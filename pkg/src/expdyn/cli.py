"""Command-line front end.

Subcommands: orbit, classify, escape-point, transitivity, periodic,
sensitivity, verify, render-escape, render-density.  Exit codes: 0 success,
2 when a witness search reports NotFound, 1 on usage or verification errors.
Flags override an optional key-value config file (one "key = value" per
line) named by --config.
"""

import argparse
import json
import sys

from .dynamics import iterate
from .errors import WitnessNotFound
from .hyperbolic import Domain
from .render import GridSpec, RenderParams, render_density_map, render_escape_map
from .witnesses import (
    Disc,
    find_escaping_point,
    find_periodic,
    sensitivity_witness,
    transitivity_witness,
    verify_report,
    WitnessReport,
)

_DOMAINS = {
    "disc": Domain.UNIT_DISC,
    "half-plane": Domain.RIGHT_HALF_PLANE,
    "strip": Domain.STRIP_PI,
    "slit-pos": Domain.SLIT_PLANE_POS,
    "slit-neg": Domain.SLIT_PLANE_NEG,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "")
    if "," in s:
        re, im = s.split(",", 1)
        return complex(float(re), float(im))
    try:
        return complex(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse complex number {text!r}") from exc


def _read_config(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {line!r}")
            key, _, raw = line.partition("=")
            values[key.strip().replace("-", "_")] = raw.strip()
    return values


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Defaults < config file < explicit flags."""
    provided = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    merged = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        for key, raw in _read_config(config_path).items():
            if key not in defaults:
                raise ValueError(f"unknown config key {key!r}")
            template = defaults[key]
            if isinstance(template, bool):
                merged[key] = raw.lower() in ("1", "true", "yes", "on")
            elif isinstance(template, int):
                merged[key] = int(raw)
            elif isinstance(template, float):
                merged[key] = float(raw)
            elif isinstance(template, complex):
                merged[key] = _parse_complex(raw)
            else:
                merged[key] = raw
    merged.update(provided)
    return merged


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)


def _write_bytes(data: bytes, out: str) -> None:
    with open(out, "wb") as fh:
        fh.write(data)


def _add_disc_args(sub) -> None:
    sub.add_argument("--center", type=_parse_complex, default=argparse.SUPPRESS,
                     help="disc center, e.g. '1.0+0.5j' or '1.0,0.5'")
    sub.add_argument("--radius", type=float, default=argparse.SUPPRESS)


def _add_grid_args(sub) -> None:
    for name in ("re-min", "re-max", "im-min", "im-max"):
        sub.add_argument(f"--{name}", type=float, default=argparse.SUPPRESS)
    sub.add_argument("--width", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--height", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--backend", choices=["numba", "numpy"], default=argparse.SUPPRESS)


def _orbit_defaults() -> dict:
    return {
        "z0": complex(0.0),
        "max_steps": 100,
        "escape_re_threshold": 50.0,
        "period_scan_limit": 64,
        "csv": "",
        "json_out": "",
    }


def _cmd_orbit(args) -> int:
    p = _resolve(args, _orbit_defaults())
    record = iterate(
        p["z0"], p["max_steps"],
        escape_re_threshold=p["escape_re_threshold"],
        period_scan_limit=p["period_scan_limit"],
    )
    if p["csv"]:
        with open(p["csv"], "w", encoding="utf-8", newline="") as fh:
            record.to_csv(fh)
    if p["json_out"]:
        with open(p["json_out"], "w", encoding="utf-8") as fh:
            fh.write(record.to_json_str(indent=2))
    cls = record.classification
    print(f"start: {record.start}")
    print(f"recorded points: {record.length}")
    label = cls.label.value
    if cls.period is not None:
        label += f" (period {cls.period})"
    if cls.at_step is not None:
        label += f" (at step {cls.at_step})"
    print(f"classification: {label}")
    tail = record.points[-1]
    print(f"last point: {tail}")
    if record.overflow_shadow is not None:
        s = record.overflow_shadow
        print(f"overflow shadow: log|z| = {s.log_mod}, arg = {s.arg}")
    return 0


def _cmd_classify(args) -> int:
    p = _resolve(args, _orbit_defaults())
    record = iterate(
        p["z0"], p["max_steps"],
        escape_re_threshold=p["escape_re_threshold"],
        period_scan_limit=p["period_scan_limit"],
    )
    print(record.classification.label.value)
    return 0


def _witness_common(p: dict) -> Disc:
    return Disc(p["center"], p["radius"])


def _emit_report(report: WitnessReport, out: str) -> None:
    _write_or_print(report.to_json_str(), out or None)


def _cmd_escape_point(args) -> int:
    defaults = {"center": complex(1.0), "radius": 0.5, "t_star": 50.0,
                "m_max": 12, "seed": 0, "out": ""}
    p = _resolve(args, defaults)
    z, report = find_escaping_point(
        _witness_common(p), t_star=p["t_star"], m_max=p["m_max"], seed=p["seed"]
    )
    print(f"escaping point: {z}  (stage {report.outputs['stage']}, "
          f"height {report.outputs['height']})")
    _emit_report(report, p["out"])
    return 0


def _cmd_transitivity(args) -> int:
    defaults = {"center": complex(1.0), "radius": 0.5, "target": complex(-1.0),
                "n_min": 0, "t_star": 50.0, "m_max": 16, "seed": 0, "out": ""}
    p = _resolve(args, defaults)
    (z, n), report = transitivity_witness(
        _witness_common(p), p["target"], n_min=p["n_min"],
        t_star=p["t_star"], m_max=p["m_max"], seed=p["seed"],
    )
    print(f"witness: f^{n}({z}) = {p['target']}")
    _emit_report(report, p["out"])
    return 0


def _cmd_periodic(args) -> int:
    defaults = {"center": complex(1.0), "radius": 0.5, "seed": 0, "out": ""}
    p = _resolve(args, defaults)
    result, report = find_periodic(_witness_common(p), seed=p["seed"])
    print(f"repelling periodic point: {result.point}")
    print(f"period {result.period}, multiplier modulus {result.multiplier_modulus:.6g}, "
          f"residual {result.residual:.3g}, contraction steps {result.contraction_steps}")
    _emit_report(report, p["out"])
    return 0


def _cmd_sensitivity(args) -> int:
    defaults = {"center": complex(1.0), "radius": 0.5, "target": complex(-1.0),
                "seed": 0, "out": ""}
    p = _resolve(args, defaults)
    (z, w, n), report = sensitivity_witness(
        _witness_common(p), seed=p["seed"], target=p["target"]
    )
    print(f"z = {z}\nw = {w}\nn = {n}")
    print(f"|f^n(z)| = {report.outputs['bounded_value_mod']:.6g} <= 1, "
          f"separation >= {report.outputs['separation_lower_bound']:.6g}")
    _emit_report(report, p["out"])
    return 0


def _cmd_verify(args) -> int:
    with open(args.report, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    result = verify_report(doc)
    print(result.summary())
    return 0 if result.ok else 1


def _grid_from(p: dict) -> GridSpec:
    return GridSpec(p["re_min"], p["re_max"], p["im_min"], p["im_max"],
                    p["width"], p["height"])


def _cmd_render_escape(args) -> int:
    defaults = {"re_min": -3.0, "re_max": 3.0, "im_min": -3.0, "im_max": 3.0,
                "width": 256, "height": 256, "max_steps": 40,
                "escape_re_threshold": 50.0, "palette": "grayscale",
                "workers": 1, "backend": "", "out": "escape.ppm"}
    p = _resolve(args, defaults)
    params = RenderParams(max_steps=p["max_steps"],
                          escape_re_threshold=p["escape_re_threshold"],
                          palette=p["palette"])
    data = render_escape_map(_grid_from(p), params, workers=p["workers"],
                             backend=p["backend"] or None)
    _write_bytes(data, p["out"])
    print(f"wrote {p['out']} ({p['width']}x{p['height']} P6)")
    return 0


def _cmd_render_density(args) -> int:
    defaults = {"domain": "disc", "re_min": -1.5, "re_max": 1.5,
                "im_min": -1.5, "im_max": 1.5, "width": 256, "height": 256,
                "workers": 1, "backend": "", "out": "density.ppm"}
    p = _resolve(args, defaults)
    data = render_density_map(_DOMAINS[p["domain"]], _grid_from(p),
                              workers=p["workers"], backend=p["backend"] or None)
    _write_bytes(data, p["out"])
    print(f"wrote {p['out']} ({p['width']}x{p['height']} P6)")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="expdyn",
                     description="dynamics of the complex exponential map")
    subs = parser.add_subparsers(dest="command", required=True)

    def add(name, func, helptext):
        sub = subs.add_parser(name, help=helptext)
        sub.add_argument("--config", default=None,
                         help="key = value file; flags take precedence")
        sub.set_defaults(func=func)
        return sub

    sub = add("orbit", _cmd_orbit, "iterate a point and dump the orbit")
    sub.add_argument("--z0", type=_parse_complex, default=argparse.SUPPRESS)
    sub.add_argument("--max-steps", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--escape-re-threshold", type=float, default=argparse.SUPPRESS)
    sub.add_argument("--period-scan-limit", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--csv", default=argparse.SUPPRESS, help="write orbit CSV here")
    sub.add_argument("--json-out", default=argparse.SUPPRESS, help="write orbit JSON here")

    sub = add("classify", _cmd_classify, "print the orbit classification")
    sub.add_argument("--z0", type=_parse_complex, default=argparse.SUPPRESS)
    sub.add_argument("--max-steps", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--escape-re-threshold", type=float, default=argparse.SUPPRESS)
    sub.add_argument("--period-scan-limit", type=int, default=argparse.SUPPRESS)

    sub = add("escape-point", _cmd_escape_point, "find a certified escaping point")
    _add_disc_args(sub)
    sub.add_argument("--t-star", type=float, default=argparse.SUPPRESS)
    sub.add_argument("--m-max", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--out", default=argparse.SUPPRESS, help="write report JSON here")

    sub = add("transitivity", _cmd_transitivity, "find z in U with f^n(z) = target")
    _add_disc_args(sub)
    sub.add_argument("--target", type=_parse_complex, default=argparse.SUPPRESS)
    sub.add_argument("--n-min", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--t-star", type=float, default=argparse.SUPPRESS)
    sub.add_argument("--m-max", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--out", default=argparse.SUPPRESS)

    sub = add("periodic", _cmd_periodic, "find a repelling periodic point")
    _add_disc_args(sub)
    sub.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--out", default=argparse.SUPPRESS)

    sub = add("sensitivity", _cmd_sensitivity, "exhibit sensitive dependence")
    _add_disc_args(sub)
    sub.add_argument("--target", type=_parse_complex, default=argparse.SUPPRESS)
    sub.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--out", default=argparse.SUPPRESS)

    sub = add("verify", _cmd_verify, "replay and check a witness report")
    sub.add_argument("report", help="path to a witness report JSON")

    sub = add("render-escape", _cmd_render_escape, "render an escape-time map")
    _add_grid_args(sub)
    sub.add_argument("--max-steps", type=int, default=argparse.SUPPRESS)
    sub.add_argument("--escape-re-threshold", type=float, default=argparse.SUPPRESS)
    sub.add_argument("--palette", choices=["grayscale", "classification"],
                     default=argparse.SUPPRESS)
    sub.add_argument("--out", default=argparse.SUPPRESS)

    sub = add("render-density", _cmd_render_density, "render a density heatmap")
    sub.add_argument("--domain", choices=sorted(_DOMAINS), default=argparse.SUPPRESS)
    _add_grid_args(sub)
    sub.add_argument("--out", default=argparse.SUPPRESS)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WitnessNotFound as exc:
        print(f"not found: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
