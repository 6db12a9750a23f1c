"""
``zdm``: command-line front end.

Every command writes a JSON report (atomically, via a temporary file and a
rename) and exits with 0 when all certificates pass, 1 when a certificate
fails, and 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import tempfile
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import encoder as enc
from .embedding import build_phi, host_window, plan_embedding, verify_density
from .errors import CertificateFailure, ConfigError, ZDMError
from .glue import GlueState, Schedule, glue_run
from .markers import find_marker, gap_statistics
from .selector import check_selector, selector_build, synthetic_measures
from .shifts import Subshift
from .simplex import FiniteSimplex, retract

EXIT_OK, EXIT_CERT, EXIT_CONFIG = 0, 1, 2


# ---------------------------------------------------------------------------
# plumbing


class Context:
    """Collects inputs, checks and series for one command."""

    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}
        self.checks: list[dict] = []
        self.series: dict[str, dict] = {}
        self.seed = resolve_seed(getattr(args, "seed", None))

    def load_json(self, path):
        if path is None:
            raise ConfigError("missing required input file")
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"input file not found: {path}")
        data = p.read_bytes()
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()
        try:
            return json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc

    def check(self, name: str, passed: bool, witness=None):
        self.checks.append({"name": name, "passed": bool(passed), "witness": witness})

    def add_series(self, name: str, columns: list[str], rows: list[list]):
        self.series[name] = {"columns": columns, "rows": rows}


def resolve_seed(flag):
    env = os.environ.get("ZDM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"ZDM_SEED must be an integer, got {env!r}") from exc
    return 0 if flag is None else flag


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, bytes):
        return obj.decode("latin-1")
    return obj


def write_atomic(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_plotdata(report: dict, directory) -> list[Path]:
    """One CSV per series in the report; a report without series writes nothing."""
    series = report.get("series") or {}
    written = []
    for name, data in sorted(series.items()):
        if not data.get("rows"):
            continue
        path = Path(directory) / f"{name}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(data["columns"])
            w.writerows(data["rows"])
        os.replace(tmp, path)
        written.append(path)
    return written


def _positive(kind):
    def parse(text):
        try:
            value = kind(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
        if value <= 0:
            raise argparse.ArgumentTypeError(f"{text} must be positive")
        return value

    return parse


def _load_subshift(ctx: Context, path) -> Subshift:
    conf = ctx.load_json(path)
    try:
        s = Subshift.from_dict(conf)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if s.name in (Subshift.SFT, Subshift.SUBSTITUTION):
        s.name = Path(path).stem
    return s


def _parse_shapes(text: str):
    try:
        shapes = [tuple(int(v) for v in item.split("x")) for item in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad shape list {text!r}; use e.g. 1x1,1x2") from exc
    if any(len(s) != 2 or min(s) < 1 for s in shapes):
        raise ConfigError(f"bad shape list {text!r}")
    return shapes


# ---------------------------------------------------------------------------
# commands


def cmd_marker(ctx: Context) -> dict:
    a = ctx.args
    s = _load_subshift(ctx, a.system)
    m = find_marker(s, a.n, a.max_L or 4 * a.n, a.n_cap)
    lo, hi = gap_statistics(m)
    ctx.check("separation", m.certificate.valid)
    ctx.check("covering", m.certificate.covered, {"N": m.N})
    return {"subshift": s.name, "marker": m.to_dict(), "gaps": [lo, hi], "within_2n_minus_1": m.N <= 2 * a.n - 1}


def cmd_embed_dense(ctx: Context) -> dict:
    a = ctx.args
    host = _load_subshift(ctx, a.host)
    target = _load_subshift(ctx, a.target)
    shapes = _parse_shapes(a.shapes)
    plan = plan_embedding(host, target, a.eps, shapes)
    cols = a.window_length or int(round(20 * plan.N0 / a.eps))
    rng = np.random.default_rng(ctx.seed)
    outputs = [build_phi(plan, host_window(plan, host.sample_word(cols, rng))) for _ in range(a.windows)]
    rep = verify_density(plan, outputs, strict=a.strict)
    tol = a.check_eps if a.check_eps is not None else a.eps
    inside = rep.worst_deviation < tol
    witness = None if inside else {"worst_deviation": rep.worst_deviation, "tolerance": tol, **(rep.witness or {})}
    ctx.check("density", inside, witness)
    ctx.add_series(
        "deviation_by_rectangle",
        ["shape", "pattern", "deviation"],
        [[f"{k}x{n}", "|".join("".join(str(c) for c in row) for row in p), d] for (k, n), p, d in rep.rows()],
    )
    return {"plan": plan.summary(), "window_length": cols, "windows": a.windows,
            "tolerance": tol, "inside": inside, "worst_deviation": rep.worst_deviation, "witness": rep.witness}


def _load_system(ctx: Context, path):
    conf = ctx.load_json(path)
    try:
        return enc.system_from_dict(conf), conf
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _schedule(system, levels: int, slack: float, conf: dict | None = None):
    conf = conf or {}
    if isinstance(system, enc.CircleRotation):
        return enc.cover_schedule(system, levels, slack, conf.get("first", 4), conf.get("growth", 2))
    return enc.symbolic_schedule(system, levels, slack)


def cmd_encode(ctx: Context) -> dict:
    a = ctx.args
    if not 0 <= a.t <= 1:
        raise ConfigError("--t must lie in [0, 1]")
    system, _ = _load_system(ctx, a.system)
    fams = _schedule(system, a.levels, a.slack)
    rng = np.random.default_rng(ctx.seed)
    points = [a.x if a.x is not None else (0.0 if isinstance(system, enc.CircleRotation) else None)]
    if points[0] is None:
        points = [int(system.random_points(1, rng)[0])]
    points += [v.item() for v in system.random_points(a.points, rng)]
    names = [enc.array_name(system, fams, a.t, x, a.levels, a.window) for x in points]
    equivariant = True
    for x, name in zip(points, names):
        shifted = enc.array_name(system, fams, a.t, system.step(x).item(), a.levels, a.window)
        equivariant &= bool(np.array_equal(name.cells[:, 1:], shifted.cells[:, :-1]))
    ctx.check("equivariance", equivariant)
    rec = enc.recoverability_check(system, fams, a.t, points, a.levels, a.window)
    result = {
        "levels": [{"k": f.k, "m": f.m, "r0": f.r0, "r1": f.r1} for f in fams],
        "t": a.t,
        "points": points,
        "names": [n.to_dict() for n in names],
        "recoverability": {"separated": rec.separated, "level": rec.level, "halfwidth": rec.halfwidth},
    }
    if isinstance(system, enc.CircleRotation):
        measure = enc.OrbitMeasure(system, float(rng.random()), a.quadrature)
        rows = []
        for f in fams:
            for t in np.linspace(0, 1, 21):
                for d in a.d:
                    est = enc.psi_estimate(system, f, measure, float(t), enc.BoundaryEstimatorConfig(d))
                    rows.append([f.k, float(t), d, est.value, est.tolerance])
        ctx.add_series("psi_by_t", ["k", "t", "d", "psi", "tolerance"], rows)
    return result


def _build_measure(conf: dict, system, fams, seed: int):
    kind = conf.get("type")
    if kind == "atomic":
        return enc.AtomicMeasure(conf["points"], conf.get("weights"), conf.get("name", "atomic"))
    if kind == "lebesgue":
        return enc.LebesgueMeasure(system, int(conf.get("size", 20_000)))
    if kind == "orbit":
        return enc.OrbitMeasure(system, conf["x0"], int(conf.get("length", 50_000)))
    if kind == "sphere":
        return enc.SphereMeasure(system, conf["center"], conf["radius"])
    if kind == "synthetic":
        pairs = [(int(k), float(t)) for k, t in conf["bad"]]
        return synthetic_measures(system, fams, [pairs], conf.get("filler", 2), seed)[0]
    if kind == "mixture":
        parts = [_build_measure(p, system, fams, seed) for p in conf["parts"]]
        return enc.MixtureMeasure(parts, conf["weights"])
    raise ConfigError(f"unknown measure type {kind!r}")


def cmd_selector(ctx: Context) -> dict:
    a = ctx.args
    conf = ctx.load_json(a.measures)
    try:
        system = enc.system_from_dict(conf["system"])
        levels = int(conf.get("levels", a.stages))
        if levels < a.stages:
            raise ConfigError(f"{levels} cover levels cannot support {a.stages} stages")
        fams = _schedule(system, levels, float(conf.get("slack", 0.2)), conf.get("schedule"))
        measures = [_build_measure(m, system, fams, ctx.seed) for m in conf["measures"]]
        cfg = enc.BoundaryEstimatorConfig(float(conf.get("d", 0.01)))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{a.measures}: {exc}") from exc
    table = selector_build(measures, fams, a.stages, cfg)
    check = check_selector(table, measures, fams, cfg)
    for name in ("base", "nesting", "diameters", "smallness"):
        ctx.check(name, getattr(check, name), list(check.failures) or None)
    ctx.add_series(
        "selector_bounds",
        ["stage", "piece", "k", "bound", "tolerance"],
        [[n, i, k + 1, b, p.tolerance] for n, st in enumerate(table.stages, 1) for i, p in enumerate(st)
         for k, b in enumerate(p.psi_bounds)],
    )
    return {"table": table.to_dict(), "cover_sizes": [f.m for f in fams]}


def cmd_simplex_retract(ctx: Context) -> dict:
    a = ctx.args
    conf = ctx.load_json(a.simplex)
    try:
        K = FiniteSimplex.from_dict(conf)
        face = K.face(int(v) for v in a.face.split(","))
    except (KeyError, ValueError, IndexError) as exc:
        raise ConfigError(f"{a.simplex}: {exc}") from exc
    theta = retract(K, face, a.eps)
    disp = theta.vertex_displacement()
    ctx.check("displacement", disp <= a.eps, {"displacement": disp})
    fixed = all(np.array_equal(theta.images[i], K.vertices[i]) for i in face.indices)
    ctx.check("fixes_face", fixed)
    return {"face": list(face.indices), "eps": a.eps, "images": theta.images.tolist(), "displacement": disp}


def cmd_glue(ctx: Context) -> dict:
    a = ctx.args
    K = FiniteSimplex.from_dict(ctx.load_json(a.simplex))
    groups = ctx.load_json(a.groups)
    if isinstance(groups, dict):
        groups = groups.get("groups")
    try:
        schedule = Schedule.parse(a.eps_schedule)
        state = GlueState.start(K, groups, schedule)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    res = glue_run(state, a.stages, subdivide=not a.no_subdivide)
    for c in res.stages:
        ctx.check(f"stage {c.k}", c.ok, None if c.ok else c.to_dict())
    ctx.check("injective", res.injective)
    ctx.check("labels", res.labels_preserved)
    ctx.add_series("displacement_by_stage", ["stage", "eps", "displacement", "bound"],
                   [[c.k, c.eps, c.displacement, c.bound] for c in res.stages])
    out = res.to_dict()
    out["schedule"] = str(schedule)
    return out


def cmd_verify_all(ctx: Context) -> dict:
    from .suites import DEFAULT_SEED, run_desk

    a = ctx.args
    if a.suite != "desk":
        raise ConfigError(f"unknown suite {a.suite!r}")
    seed = ctx.seed if (a.seed is not None or "ZDM_SEED" in os.environ) else DEFAULT_SEED
    ctx.seed = seed
    results = run_desk(seed)
    for r in results:
        print(r.line(), file=sys.stderr)
        ctx.check(f"criterion {r.key}: {r.title}", r.ok, None if r.ok else r.details)
    return {"suites": [r.to_dict() for r in results]}


COMMANDS = {
    "marker": cmd_marker,
    "embed-dense": cmd_embed_dense,
    "encode": cmd_encode,
    "selector": cmd_selector,
    "simplex-retract": cmd_simplex_retract,
    "glue": cmd_glue,
    "verify-all": cmd_verify_all,
}

# fields that legitimately differ between identical runs
VOLATILE = ("wall_time", "timestamp")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zdm", description=__doc__.strip().splitlines()[0])
    p.add_argument("--version", action="version", version=f"zdm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="report path (JSON); printed to stdout when omitted")
        sp.add_argument("--plotdata", metavar="DIR", help="also write one CSV per data series into DIR")
        sp.add_argument("--seed", type=int, help="random seed (the ZDM_SEED variable takes precedence)")
        sp.add_argument("-v", "--verbose", action="store_true")
        return sp

    sp = common(sub.add_parser("marker", help="find and certify an n-marker in a subshift (marker lemma)"))
    sp.add_argument("--system", required=True, help="subshift JSON (sft or substitution)")
    sp.add_argument("--n", type=_positive(int), required=True, help="separation n")
    sp.add_argument("--max-L", dest="max_L", type=_positive(int), help="largest marker word length (default 4n)")
    sp.add_argument("--n-cap", type=_positive(int), help="covering bound cap (default 4n)")

    sp = common(sub.add_parser("embed-dense", help="marker-aligned row insertion into a weak-star neighborhood "
                                                    "(dense embedding lemma)"))
    sp.add_argument("--host", required=True, help="host subshift JSON")
    sp.add_argument("--target", required=True, help="target substitution subshift JSON")
    sp.add_argument("--eps", type=_positive(float), required=True)
    sp.add_argument("--shapes", default="1x1,1x2", help="increasing rectangle shapes, e.g. 1x1,1x2")
    sp.add_argument("--windows", type=_positive(int), default=20)
    sp.add_argument("--window-length", type=_positive(int), help="columns per window (default 20 N0 / eps)")
    sp.add_argument("--strict", action="store_true", help="also check top-aligned rectangle placements")
    sp.add_argument("--check-eps", type=_positive(float), help="verify against this tolerance instead of --eps")

    sp = common(sub.add_parser("encode", help="array-names through a one-parameter ball cover family "
                                               "(encoding of a metric system)"))
    sp.add_argument("--system", required=True, help="system JSON, e.g. {\"type\": \"circle_rotation\", \"alpha\": \"sqrt2-1\"}")
    sp.add_argument("--levels", type=_positive(int), default=3)
    sp.add_argument("--window", type=int, default=16, help="halfwidth n of the array-name window")
    sp.add_argument("--t", type=float, default=0.5, help="cover parameter in [0, 1]")
    sp.add_argument("--x", type=float, help="base point (circle systems)")
    sp.add_argument("--points", type=int, default=4, help="extra random points")
    sp.add_argument("--slack", type=float, default=0.2)
    sp.add_argument("--d", type=_positive(float), nargs="+", default=[0.1, 0.05, 0.01], help="tent half-widths")
    sp.add_argument("--quadrature", type=_positive(int), default=20_000, help="orbit length for boundary estimates")

    sp = common(sub.add_parser("selector", help="continuous selection of null-boundary cover parameters "
                                                 "(selector induction)"))
    sp.add_argument("--measures", required=True, help="measures JSON")
    sp.add_argument("--stages", type=_positive(int), default=6)

    sp = common(sub.add_parser("simplex-retract", help="affine eps-retraction onto a face (face retraction lemma)"))
    sp.add_argument("--simplex", required=True, help="simplex JSON with vertices and labels")
    sp.add_argument("--face", required=True, help="comma-separated vertex indices")
    sp.add_argument("--eps", type=_positive(float), required=True)

    sp = common(sub.add_parser("glue", help="staged gluing of affine maps with a Cauchy certificate "
                                             "(gluing induction)"))
    sp.add_argument("--simplex", required=True)
    sp.add_argument("--groups", required=True, help="JSON list of vertex groups")
    sp.add_argument("--eps-schedule", default="geometric:0.5", help="geometric:R or list:e1,e2,...")
    sp.add_argument("--stages", type=int, default=5)
    sp.add_argument("--no-subdivide", action="store_true", help="fail instead of splitting coarse groups")

    sp = common(sub.add_parser("verify-all", help="run the full acceptance matrix"))
    sp.add_argument("--suite", default="desk")
    return p


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    t0 = time.perf_counter()
    report = {"command": ["zdm", *argv], "version": __version__}
    status = EXIT_OK
    try:
        ctx = Context(args)
        try:
            result = COMMANDS[args.command](ctx)
            failed = [c for c in ctx.checks if not c["passed"]]
            if failed:
                raise CertificateFailure(f"{len(failed)} check(s) failed", failed[0].get("witness"))
            report["result"] = result
        except CertificateFailure as exc:
            status = EXIT_CERT
            report["error"] = {"type": "CertificateFailure", "message": str(exc), "witness": exc.witness}
        except ConfigError:
            raise
        except ZDMError as exc:
            status = EXIT_CERT
            report["error"] = {"type": type(exc).__name__, "message": str(exc),
                               "witness": {k: v for k, v in vars(exc).items() if not k.startswith("_")}}
        report.update(seed=ctx.seed, inputs=ctx.inputs, checks=ctx.checks, series=ctx.series)
    except ConfigError as exc:
        print(f"zdm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report["status"] = "pass" if status == EXIT_OK else "fail"
    report["wall_time"] = round(time.perf_counter() - t0, 3)
    report["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if args.plotdata:
        emit_plotdata(report, args.plotdata)
    summary = report.get("error", {}).get("message", "all checks passed")
    print(f"zdm {args.command}: {report['status']} ({summary})", file=sys.stderr)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
