"""Batch command-line front end.

Every subcommand writes CSV or JSON (17 significant digits) to ``--output``
or stdout. Flags override values from a ``--config`` JSON file. Exit codes:
0 success, 1 a check failed its threshold, 2 usage error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import LWError, UsageError
from .quadrature import (
    ContourSpec,
    GridFunction,
    QuadratureRule,
    default_threads,
    smooth_bump,
)
from .specfun import gamma, log_gamma

COMMANDS = ("gamma", "whittaker", "forward", "inverse", "roundtrip", "plancherel", "stade",
            "mellin", "residue-check", "verify-all")

_FIELDS = ("n", "t", "u", "y", "s", "eps", "grid", "contour", "tol", "threads", "output",
           "format", "T", "normalization", "x", "seed", "timings")


@dataclass
class RunConfig:
    command: str
    n: int = None
    t: list = None
    u: list = None
    y: list = None
    s: complex = None
    eps: float = None
    grid: list = None
    contour: ContourSpec = None
    tol: float = None
    threads: int = field(default_factory=default_threads)
    output: str = None
    format: str = "csv"
    T: float = None
    normalization: str = "calibrated"
    x: list = None
    seed: int = 2024
    timings: bool = False

    def to_dict(self):
        d = asdict(self)
        d["s"] = None if self.s is None else [self.s.real, self.s.imag]
        d["contour"] = None if self.contour is None else asdict(self.contour)
        return d


def _fmt(x):
    return format(float(x), ".17g")


def _floats(text, flag):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None


def _complex(text, flag):
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"{flag}: expected a complex number such as 1+0.3j, got {text!r}") from None


def _grid(text):
    """``lo:hi:count`` per axis, comma separated across axes."""
    if isinstance(text, list) and text and isinstance(text[0], (list, tuple)):
        return [(float(a), float(b), int(c)) for a, b, c in text]
    axes = []
    for part in str(text).split(","):
        bits = part.split(":")
        if len(bits) != 3:
            raise UsageError(f"--grid: axis {part!r} is not lo:hi:count")
        try:
            lo, hi, count = float(bits[0]), float(bits[1]), int(bits[2])
        except ValueError:
            raise UsageError(f"--grid: axis {part!r} is not lo:hi:count") from None
        if not 0 < lo < hi or count < 1:
            raise UsageError(f"--grid: axis {part!r} needs 0 < lo < hi and count >= 1")
        axes.append((lo, hi, count))
    return axes


def _contour(text):
    """``c:T:nodes_per_unit`` (one abscissa shared by every line)."""
    if isinstance(text, dict):
        return ContourSpec(tuple(text["real_parts"]), text["height"], text["nodes_per_unit"])
    bits = str(text).split(":")
    if len(bits) != 3:
        raise UsageError("--contour: expected c:T:nodes_per_unit")
    try:
        c, T, npu = float(bits[0]), float(bits[1]), int(bits[2])
        return ContourSpec((c, c), T, npu)
    except (ValueError, LWError) as exc:
        raise UsageError(f"--contour: {exc}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="lwtransform", description="Lebedev-Whittaker transform toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with default values")
        p.add_argument("--n", type=int)
        p.add_argument("--t", help="spectral parameters, comma separated")
        p.add_argument("--u", help="second spectral parameters (stade)")
        p.add_argument("--y", help="one y point, comma separated coordinates")
        p.add_argument("--s", help="complex exponent or Gamma argument, e.g. 1+0.3j")
        p.add_argument("--eps", type=float)
        p.add_argument("--x", help="Mellin kernel arguments, comma separated")
        p.add_argument("--grid", help="lo:hi:count per axis, comma separated")
        p.add_argument("--contour", help="c:T:nodes_per_unit for Mellin-Barnes lines")
        p.add_argument("--T", type=float, help="t-box half width")
        p.add_argument("--tol", type=float)
        p.add_argument("--threads", type=int)
        p.add_argument("--normalization", choices=("calibrated", "literal"))
        p.add_argument("--seed", type=int)
        p.add_argument("--output")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--timings", action="store_true", default=None,
                       help="record wall-clock seconds (output is then not reproducible)")
    return parser


_REQUIRED = {
    "gamma": ("s",),
    "whittaker": ("n", "t"),
    "forward": ("n", "t", "grid"),
    "inverse": ("n", "grid"),
    "roundtrip": ("n", "grid"),
    "stade": ("n", "t", "u"),
    "residue-check": ("t",),
}


def parse_config(argv, config_file=None):
    """Parse ``argv`` into a validated RunConfig; flags override file values."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    values = {}
    path = ns.config or config_file
    if path:
        try:
            with open(path) as fh:
                values.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: cannot read {path}: {exc}") from None
    for key in _FIELDS:
        v = getattr(ns, key, None)
        if v is not None:
            values[key] = v
    unknown = set(values) - set(_FIELDS)
    if unknown:
        raise UsageError(f"--config: unknown keys {sorted(unknown)}")
    cfg = RunConfig(command=ns.command)
    for key, v in values.items():
        if key in ("t", "u", "y", "x"):
            v = _floats(v, f"--{key}")
        elif key == "s":
            v = _complex(v, "--s")
        elif key == "grid":
            v = _grid(v)
        elif key == "contour":
            v = _contour(v)
        setattr(cfg, key, v)
    for key in _REQUIRED.get(cfg.command, ()):
        if getattr(cfg, key) is None:
            raise UsageError(f"--{key} is required for {cfg.command}")
    _validate(cfg)
    return cfg


def _validate(cfg):
    if cfg.tol is not None and not cfg.tol > 0:
        raise UsageError("--tol must be positive")
    if cfg.threads is None or cfg.threads < 1:
        raise UsageError("--threads must be >= 1")
    if cfg.n is not None:
        if cfg.n not in (2, 3):
            raise UsageError("--n must be 2 or 3")
        dim = cfg.n - 1
        for key in ("t", "u", "y"):
            v = getattr(cfg, key)
            if v is not None and len(v) != dim:
                raise UsageError(f"--{key}: rank {cfg.n} needs {dim} values, got {len(v)}")
        if cfg.grid is not None and len(cfg.grid) != dim:
            raise UsageError(f"--grid: rank {cfg.n} needs {dim} axes, got {len(cfg.grid)}")
    if cfg.command == "whittaker" and cfg.y is None and cfg.grid is None:
        raise UsageError("--y or --grid is required for whittaker")
    if cfg.command == "residue-check" and len(cfg.t) != 2:
        raise UsageError("--t: residue-check needs two values")
    if cfg.command == "plancherel" and cfg.n not in (None, 2):
        raise UsageError("--n: plancherel is implemented for n = 2")


# ---------------------------------------------------------------- commands

def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, int, np.floating)) and not isinstance(v, bool)
                    else v for v in r])
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return str(x)


def _mesh_points(grid):
    axes = [np.exp(np.linspace(math.log(lo), math.log(hi), c)) for lo, hi, c in grid]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _bump_grid(cfg, sigma=None):
    # the built-in test function: a product of smooth bumps centred in each axis
    parts = []
    for lo, hi, _ in cfg.grid:
        a, b = math.log(lo), math.log(hi)
        parts.append((0.5 * (a + b), 0.5 * (b - a)))
    sig = sigma or (0.12 if cfg.n == 2 else 0.25)

    def f(*ys):
        out = 1.0
        for y, (c, hw) in zip(ys, parts):
            out = out * smooth_bump(np.log(y), center=c, half_width=hw, sigma=sig)
        return out

    box = [(lo, hi) for lo, hi, _ in cfg.grid]
    counts = [c for _, _, c in cfg.grid]
    return GridFunction.from_callable(cfg.n, box, counts, f, label="bump"), f


def _default_T(n):
    return 40.0 if n == 2 else 12.0


def _rule(n, T):
    return QuadratureRule(max(4, int(math.ceil(T / 4))), 32) if n == 2 \
        else QuadratureRule(max(2, int(math.ceil(T / 4))), 20)


def _cmd_gamma(cfg):
    z = cfg.s
    g, lg = gamma(z), log_gamma(z)
    rows = [(z.real, z.imag, g.real, g.imag, lg.real, lg.imag)]
    if cfg.format == "json":
        return _json({"z": z, "gamma": g, "log_gamma": lg}), 0
    return _csv(["re_z", "im_z", "re_gamma", "im_gamma", "re_log_gamma", "im_log_gamma"], rows), 0


def _cmd_whittaker(cfg):
    from .whittaker import WhittakerEvaluator

    kw = {"contour": cfg.contour} if cfg.contour is not None and cfg.n == 3 else {}
    if cfg.tol is not None:
        kw["accuracy"] = cfg.tol
    ev = WhittakerEvaluator.for_t(cfg.n, cfg.t, **kw)
    pts = np.array([cfg.y]) if cfg.y is not None else _mesh_points(cfg.grid)
    rows = ev.table(pts, threads=cfg.threads)
    header = ["n"] + [f"t{i + 1}" for i in range(cfg.n - 1)] + [f"y{i + 1}" for i in range(cfg.n - 1)] \
        + ["W", "W_im", "est_error", "method", "seconds"]
    out = [[cfg.n, *t, *y, v.real, v.imag, err, m, sec if cfg.timings else ""]
           for t, y, v, err, m, sec in rows]
    if cfg.format == "json":
        return _json([dict(zip(header, r)) for r in out]), 0
    return _csv(header, out), 0


def _cmd_forward(cfg):
    from .transform import forward_table

    f, _ = _bump_grid(cfg)
    val = forward_table(f, np.array([cfg.t]), contour=cfg.contour, threads=cfg.threads)[0]
    header = [f"t{i + 1}" for i in range(cfg.n - 1)] + ["re", "im", "est_error"]
    row = [*cfg.t, val.real, val.imag, 0.0]
    if cfg.format == "json":
        return _json(dict(zip(header, row))), 0
    return _csv(header, [row]), 0


def _cmd_roundtrip(cfg, inverse_only=False):
    from .transform import roundtrip

    f, func = _bump_grid(cfg)
    T = cfg.T or _default_T(cfg.n)
    if cfg.n == 2:
        interior = np.abs(f.log_axes[0] - f.log_axes[0].mean()) <= 0.25 * np.ptp(f.log_axes[0])
        rep = roundtrip(f, T, _rule(2, T), interior=interior, normalization=cfg.normalization,
                        threads=cfg.threads)
    else:
        pts = np.array([cfg.y]) if cfg.y is not None else _interior_points(cfg.grid)
        rep = roundtrip(f, T, _rule(3, T), points=pts, reference=func(pts[:, 0], pts[:, 1]),
                        normalization=cfg.normalization, contour=cfg.contour, threads=cfg.threads)
    tol = cfg.tol if cfg.tol is not None else (1e-4 if cfg.n == 2 else 1e-3)
    code = 0 if rep.max_rel_error < tol else 1
    if not cfg.timings:
        rep.timings = {}
    if cfg.format == "json":
        d = rep.to_dict()
        d["tol"] = tol
        d["passed"] = code == 0
        if inverse_only:
            d.pop("forward_values")
        return _json(d), code
    text = rep.roundtrip_csv() if inverse_only else rep.forward_csv() + "\n" + rep.roundtrip_csv()
    return text, code


def _interior_points(grid):
    mids = [math.sqrt(lo * hi) for lo, hi, _ in grid]
    (lo1, hi1, _), (lo2, hi2, _) = grid
    q1 = (hi1 / lo1) ** 0.1
    q2 = (hi2 / lo2) ** 0.1
    return np.array([mids, [mids[0] / q1, mids[1] * q2], [mids[0] * q1, mids[1] / q2]])


def _reports_out(cfg, reports, extra=None):
    code = 0 if all(r.passed for r in reports) else 1
    if extra is not None and not extra.get("passed", True):
        code = 1
    if cfg.format == "json":
        items = [r.to_dict() for r in reports]
        if extra is not None:
            items.append(extra)
        return _json(items), code
    rows = [[r.identity, r.lhs.real, r.lhs.imag, r.rhs.real, r.rhs.imag, r.abs_err, r.rel_err,
             r.threshold if r.threshold is not None else "", "PASS" if r.passed else "FAIL"]
            for r in reports]
    if extra is not None:
        rows.append([extra["identity"], "", "", "", "", extra["max_abs_error"],
                     extra["max_rel_error"], extra["threshold"],
                     "PASS" if extra["passed"] else "FAIL"])
    return _csv(["identity", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err",
                 "threshold", "status"], rows), code


def _cmd_plancherel(cfg):
    from .verify import plancherel_equality

    rep = plancherel_equality(T=cfg.T or 30.0, threads=cfg.threads)
    if cfg.tol is not None:
        rep.threshold = cfg.tol
    return _reports_out(cfg, [rep])


def _cmd_stade(cfg):
    from .verify import stade_check

    s = cfg.s if cfg.s is not None else 1.0
    rep = stade_check(cfg.n, cfg.t, cfg.u, s, normalization=cfg.normalization)
    if cfg.tol is not None:
        rep.threshold = cfg.tol
    return _reports_out(cfg, [rep])


def _cmd_mellin(cfg):
    from .verify import (
        IdentityReport,
        mellin_kernel,
        mellin_plancherel,
        mellin_roundtrip,
    )

    xs = cfg.x if cfg.x is not None else [2.0, 0.5, math.e]
    reports = [IdentityReport("MellinKernel", mellin_kernel(x), max(0.0, 1 - 1 / x),
                              params={"x": x}, absolute=True) for x in xs]
    reports.append(mellin_roundtrip()[0])
    reports.append(mellin_plancherel())
    return _reports_out(cfg, reports)


def _cmd_residue(cfg):
    from .verify import residue_limit, symmetric_test_function

    rng = np.random.default_rng(cfg.seed)
    H = symmetric_test_function(rng.normal(size=4))
    lim = residue_limit(H, cfg.t[0], cfg.t[1])
    if cfg.eps is not None:
        from .verify import residue_r11

        lim["eps"].append(cfg.eps)
        v = residue_r11(H, cfg.t[0], cfg.t[1], cfg.eps)
        lim["values"].append(v)
        lim["rel_errors"].append(abs(v - lim["target"]) / abs(lim["target"]))
    tol = cfg.tol if cfg.tol is not None else 1e-3
    code = 0 if lim["rel_errors"][-1] < tol else 1
    if cfg.format == "json":
        return _json({**lim, "tol": tol, "passed": code == 0}), code
    rows = [[e, v.real, v.imag, r] for e, v, r in zip(lim["eps"], lim["values"], lim["rel_errors"])]
    return _csv(["eps", "re", "im", "rel_err"], rows), code


def _cmd_verify_all(cfg):
    from .verify import THRESHOLDS, verify_all

    reports, rt = verify_all(seed=cfg.seed, roundtrip_T=cfg.T or 40.0, threads=cfg.threads)
    extra = {"identity": "RoundtripGL2", "max_abs_error": rt.max_abs_error,
             "max_rel_error": rt.max_rel_error, "threshold": THRESHOLDS["RoundtripGL2"],
             "passed": rt.max_rel_error < THRESHOLDS["RoundtripGL2"], "T": rt.params["T"]}
    text, code = _reports_out(cfg, reports, extra)
    if cfg.format != "json":
        width = max(len(r.identity) for r in reports)
        lines = [f"{r.identity:<{width}}  rel_err={r.rel_err:.3e}  "
                 f"{'PASS' if r.passed else 'FAIL'}" for r in reports]
        lines.append(f"{'RoundtripGL2':<{width}}  rel_err={rt.max_rel_error:.3e}  "
                     f"{'PASS' if extra['passed'] else 'FAIL'}")
        print("\n".join(lines), file=sys.stderr)
    return text, code


_HANDLERS = {
    "gamma": _cmd_gamma,
    "whittaker": _cmd_whittaker,
    "forward": _cmd_forward,
    "inverse": lambda cfg: _cmd_roundtrip(cfg, inverse_only=True),
    "roundtrip": _cmd_roundtrip,
    "plancherel": _cmd_plancherel,
    "stade": _cmd_stade,
    "mellin": _cmd_mellin,
    "residue-check": _cmd_residue,
    "verify-all": _cmd_verify_all,
}


def run(cfg):
    """Execute ``cfg``; write the output and return the exit code."""
    os.environ["WHITTAKER_THREADS"] = str(cfg.threads)
    if cfg.n is None and cfg.command in ("plancherel",):
        cfg.n = 2
    try:
        text, code = _HANDLERS[cfg.command](cfg)
    except LWError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
