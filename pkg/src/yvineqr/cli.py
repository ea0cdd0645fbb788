"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 model error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import paircop as pc
from . import predict as pr
from . import quantile as qt
from . import serialize
from .exceptions import DomainError, FitError, ModelFormatError, NoSolutionOnLine, QuadratureError
from .yvine import fit

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MODEL = 3
EXIT_NUMERIC = 4

COMMANDS = ("fit", "predict", "curve", "curve-uncond", "simulate", "validate")


class InputError(Exception):
    """Unusable command-line input or data file."""


@dataclass
class RunConfig:
    command: str
    data: Path | None = None
    model: Path | None = None
    output_dir: Path = Path(".")
    responses: tuple = ()
    predictors: tuple = ()
    alpha: tuple = (0.5,)
    granularity: int = qt.DEFAULT_M
    tol: float = qt.DEFAULT_ERR
    scale: str = "x"
    n: int = 1000
    seed: int | None = None
    cond_indep: bool = False
    threads: int = 1
    family: str | None = None
    params: tuple = ()
    rotation: int = 0
    method: str = "numeric"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        for a in self.alpha:
            if not 0.0 < a < 1.0:
                raise InputError(f"alpha values must lie in (0, 1), got {a}")
        if set(self.responses) & set(self.predictors):
            raise InputError("a column cannot be both a response and a predictor")
        if self.responses and len(self.responses) != 2:
            raise InputError("--responses needs exactly two column names")
        if self.granularity < 2:
            raise InputError("--granularity must be >= 2")
        if not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.scale not in ("u", "x"):
            raise InputError("--scale must be 'u' or 'x'")
        if self.threads < 1:
            raise InputError("--threads must be >= 1")


# ---------------------------------------------------------------------------
# IO helpers


def read_csv(path) -> tuple:
    """Read a numeric CSV with a header row; returns (names, matrix)."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path} is empty")
    names = [h.strip() for h in rows[0]]
    if len(set(names)) != len(names):
        raise InputError(f"{path}: duplicate column names in header")
    data = []
    for r, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(names):
            raise InputError(f"{path}:{r}: expected {len(names)} fields, found {len(row)}")
        vals = []
        for name, cell in zip(names, row):
            try:
                vals.append(float(cell))
            except ValueError:
                raise InputError(f"{path}:{r}: non-numeric value {cell!r} in column {name!r}") from None
        data.append(vals)
    mat = np.array(data, dtype=float).reshape(len(data), len(names))
    if not np.all(np.isfinite(mat)):
        raise InputError(f"{path}: non-finite values")
    return names, mat


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _columns(names, wanted, what) -> list:
    idx = []
    for w in wanted:
        if w not in names:
            raise InputError(f"{what} column {w!r} not found in data header")
        idx.append(names.index(w))
    return idx


def _load_model(path):
    if path is None:
        raise InputError("--model is required")
    try:
        return serialize.load_model(path)
    except OSError as exc:
        raise InputError(f"cannot read model {path}: {exc.strerror}") from None


def _fmt_alpha(a: float) -> str:
    return repr(float(a))


def _model_predictor_matrix(model, path):
    names, data = read_csv(path)
    idx = _columns(names, model.predictor_names, "predictor")
    return data[:, idx]


# ---------------------------------------------------------------------------
# Commands


def cmd_fit(cfg: RunConfig, out=sys.stdout) -> int:
    if cfg.data is None:
        raise InputError("--data is required")
    names, data = read_csv(cfg.data)
    if not cfg.responses:
        raise InputError("--responses is required")
    resp = _columns(names, cfg.responses, "response")
    preds = list(cfg.predictors) or [n for n in names if n not in cfg.responses]
    pidx = _columns(names, preds, "predictor")
    if data.shape[0] < 30:
        raise InputError(f"fit needs at least 30 data rows, found {data.shape[0]}")
    if cfg.scale == "u":
        sub = data[:, resp + pidx]
        if np.any((sub <= 0) | (sub >= 1)):
            raise InputError("u-scale data must lie strictly inside (0, 1)")
    model = fit(data, resp, pidx, scale=cfg.scale, threads=cfg.threads,
                response_names=tuple(cfg.responses), predictor_names=tuple(preds))
    os.makedirs(cfg.output_dir, exist_ok=True)
    model_path = cfg.model or Path(cfg.output_dir) / "model.json"
    serialize.save_model(model, model_path)
    report = fit_report(model)
    with open(Path(cfg.output_dir) / "fit_report.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print(format_report(report), file=out)
    print(f"model written to {model_path}", file=out)
    return EXIT_OK


def fit_report(model) -> dict:
    pairs = []
    for e, spec in model.pairs():
        pairs.append({"tree": e.tree, "edge": _named_label(model, e.label), "family": spec.family.value,
                      "rotation": spec.rotation, "params": list(spec.params), "tau": spec.tau})
    return {
        "order": list(model.predictor_names),
        "steps": [{"predictor": model.predictor_names[i], "gain": st.gain, "acll": st.acll}
                  for i, st in enumerate(model.steps)],
        "pair_copulas": pairs,
    }


def _named_label(model, label: str) -> str:
    names = {"V1": model.response_names[0], "V2": model.response_names[1]}
    names.update({f"U{i + 1}": n for i, n in enumerate(model.predictor_names)})
    head, _, cond = label.partition(";")
    conv = ",".join(names.get(v, v) for v in head.split(","))
    if cond:
        conv += ";" + ",".join(names.get(v, v) for v in cond.split(","))
    return conv


def format_report(report: dict) -> str:
    lines = ["order: " + ", ".join(report["order"]), "forward selection:"]
    for st in report["steps"]:
        lines.append(f"  + {st['predictor']:<12s} gain {st['gain']:12.4f}   acll {st['acll']:12.4f}")
    lines.append("pair copulas:")
    for p in report["pair_copulas"]:
        par = ", ".join(f"{v:.4g}" for v in p["params"])
        lines.append(f"  T{p['tree']} {p['edge']:<28s} {p['family']:<8s} rot {p['rotation']:>3d}"
                     f"  ({par})  tau {p['tau']:+.3f}")
    return "\n".join(lines)


def cmd_predict(cfg: RunConfig, out=sys.stdout) -> int:
    model = _load_model(cfg.model)
    if cfg.data is None:
        raise InputError("--data is required")
    X = _model_predictor_matrix(model, cfg.data)
    os.makedirs(cfg.output_dir, exist_ok=True)
    header = ["row", "alpha"] + [f"{n}_quantile" for n in model.response_names]
    rows = []
    for r, x in enumerate(X):
        ctx = pr.build_context(model, x, "x")
        for a in cfg.alpha:
            q = [pr.univariate_conditional_quantile(model, j, a, ctx, scale=cfg.scale) for j in range(2)]
            rows.append([r, a] + q)
    path = Path(cfg.output_dir) / "predictions.csv"
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(f"{row[0]},{_fmt_alpha(row[1])},{float(row[2])!r},{float(row[3])!r}\n")
    print(f"{len(rows)} predictions written to {path}", file=out)
    return EXIT_OK


def _region_pairs(alphas) -> list:
    """(lower, upper, level) for alpha pairs forming a confidence region."""
    found = []
    a = sorted(set(alphas))
    for lo in a:
        for hi in a:
            if lo < 0.5 < hi and abs(lo + hi - 1.0) < 1e-12:
                found.append((lo, hi, 2.0 * lo))
    return found


def cmd_curve(cfg: RunConfig, out=sys.stdout) -> int:
    model = _load_model(cfg.model)
    if cfg.data is None:
        raise InputError("--data is required")
    X = _model_predictor_matrix(model, cfg.data)
    outdir = Path(cfg.output_dir)
    os.makedirs(outdir, exist_ok=True)
    manifest = {"model": str(cfg.model), "method": "cond-indep" if cfg.cond_indep else "quadrature",
                "granularity": cfg.granularity, "tol": cfg.tol, "rows": []}
    for r, x in enumerate(X):
        ctx = pr.build_context(model, x, "x")
        entry = {"row": r, "x": [float(v) for v in x], "curves": [], "regions": []}
        for a in cfg.alpha:
            try:
                if cfg.cond_indep:
                    cu = pr.cond_indep_curve(model, ctx, a, cfg.granularity, scale="u")
                else:
                    cu = pr.conditional_quantile_curve(model, ctx, a, cfg.granularity, cfg.tol, scale="u")
            except NoSolutionOnLine as exc:
                entry["curves"].append({"alpha": a, "error": str(exc)})
                continue
            cx = qt.to_x_scale(cu, model.response_marginals)
            stem = f"curve_row{r}_alpha{a:g}"
            files = {}
            for c, tag in ((cu, "u"), (cx, "x")):
                path = outdir / f"{stem}_{tag}.csv"
                qt.write_curve_csv(c, path)
                qt.write_curve_meta(c, outdir / f"{stem}_{tag}.json", row=r)
                files[tag] = path.name
            entry["curves"].append({"alpha": a, "points": len(cu), "skipped_rays": cu.skipped_rays,
                                    "files": files})
        for lo, hi, level in _region_pairs(cfg.alpha):
            entry["regions"].append({"level": level, "lower_alpha": lo, "upper_alpha": hi})
        manifest["rows"].append(entry)
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"curves for {len(X)} row(s) x {len(cfg.alpha)} alpha(s) written to {outdir}", file=out)
    return EXIT_OK


def closed_form_grid(alpha: float, m: int) -> np.ndarray:
    return alpha + (1.0 - alpha) * np.arange(m + 1) / m


def cmd_curve_uncond(cfg: RunConfig, out=sys.stdout) -> int:
    if cfg.family is None:
        raise InputError("--family is required")
    try:
        spec = pc.PairCopulaSpec(cfg.family, cfg.rotation, tuple(cfg.params))
    except DomainError as exc:
        raise InputError(str(exc)) from None
    outdir = Path(cfg.output_dir)
    os.makedirs(outdir, exist_ok=True)
    for a in cfg.alpha:
        if cfg.method == "closed":
            if spec.rotation != 0 or spec.family not in (pc.Family.CLAYTON, pc.Family.GUMBEL,
                                                          pc.Family.INDEPENDENCE):
                raise InputError("closed-form curves exist for unrotated clayton, gumbel and indep")
            theta = spec.params[0] if spec.params else None
            c = qt.closed_form_curve(spec.family, theta, a, closed_form_grid(a, cfg.granularity))
        else:
            c = qt.unconditional_curve_numeric(spec, a, cfg.granularity, cfg.tol)
        stem = f"uncond_{spec.family.value}_alpha{a:g}_{cfg.method}"
        qt.write_curve_csv(c, outdir / f"{stem}.csv")
        qt.write_curve_meta(c, outdir / f"{stem}.json", family=spec.family.value,
                            rotation=spec.rotation, params=list(spec.params), method=cfg.method)
    print(f"{len(cfg.alpha)} curve(s) written to {outdir}", file=out)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, out=sys.stdout) -> int:
    model = _load_model(cfg.model)
    if cfg.n < 1:
        raise InputError("--n must be >= 1")
    sim = pr.simulate(model, cfg.n, cfg.seed, scale=cfg.scale)
    outdir = Path(cfg.output_dir)
    os.makedirs(outdir, exist_ok=True)
    path = outdir / "simulated.csv"
    write_csv(path, list(model.response_names) + list(model.predictor_names), sim)
    print(f"{cfg.n} rows written to {path}", file=out)
    return EXIT_OK


def cmd_validate(cfg: RunConfig, out=sys.stdout) -> int:
    model = _load_model(cfg.model)
    problems = serialize.validate_model(model)
    grid = np.linspace(0.05, 0.95, 7)
    a, b = np.meshgrid(grid, grid)
    for e, spec in model.pairs():
        back = pc.hfunc(spec, "1|2", pc.hinv(spec, "1|2", a, b), b)
        if np.max(np.abs(back - a)) > 1e-8:
            problems.append(f"edge {_named_label(model, e.label)}: h-function inverse check failed")
    if problems:
        for p in problems:
            print("FAIL " + p, file=out)
        return EXIT_MODEL
    print(f"model ok: p={model.p}, {model.n_pairs} pair copulas, regular-vine check passed", file=out)
    return EXIT_OK


HANDLERS = {
    "fit": cmd_fit, "predict": cmd_predict, "curve": cmd_curve,
    "curve-uncond": cmd_curve_uncond, "simulate": cmd_simulate, "validate": cmd_validate,
}


# ---------------------------------------------------------------------------
# Argument parsing


def _names(s: str) -> tuple:
    return tuple(x.strip() for x in s.split(",") if x.strip())


def _floats(s: str) -> tuple:
    try:
        return tuple(float(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--data", type=Path, help="input CSV with a header row")
    common.add_argument("--model", type=Path, help="model JSON (written by fit, read by the others)")
    common.add_argument("--output-dir", type=Path, default=Path("."), help="directory for output files")
    common.add_argument("--responses", type=_names, default=(), help="two response columns, e.g. y1,y2")
    common.add_argument("--predictors", type=_names, default=(),
                        help="candidate predictor columns (default: all others)")
    common.add_argument("--alpha", type=_floats, default=(0.5,), help="quantile levels, e.g. 0.05,0.5,0.95")
    common.add_argument("--granularity", type=int, default=qt.DEFAULT_M,
                        help="rays per side of the unit square")
    common.add_argument("--tol", type=float, default=qt.DEFAULT_ERR,
                        help="line-search tolerance on |C - alpha|")
    common.add_argument("--scale", choices=("u", "x"), default="x", help="u: PIT scale, x: original units")
    common.add_argument("--n", type=int, default=1000, help="rows to simulate")
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--cond-indep", action="store_true",
                        help="curves assuming conditionally independent responses")
    common.add_argument("--threads", type=int, default=1, help="worker threads for candidate fits")

    parser = _Parser(prog="yvineqr", description="Bivariate vine copula quantile regression.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("fit", parents=[common], help="fit a Y-vine model to a CSV file")
    sub.add_parser("predict", parents=[common], help="univariate conditional quantiles for new rows")
    sub.add_parser("curve", parents=[common], help="conditional bivariate quantile curves")
    cu = sub.add_parser("curve-uncond", parents=[common], help="quantile curves of a pair copula")
    cu.add_argument("--family", required=True, help="pair-copula family name")
    cu.add_argument("--param", type=_floats, default=(), help="family parameters, comma-separated")
    cu.add_argument("--rotation", type=int, default=0, choices=pc.ROTATIONS)
    cu.add_argument("--method", choices=("numeric", "closed"), default="numeric")
    sub.add_parser("simulate", parents=[common], help="simulate from a fitted model")
    sub.add_parser("validate", parents=[common], help="check a model file")
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    return RunConfig(
        command=ns.command, data=ns.data, model=ns.model, output_dir=ns.output_dir,
        responses=ns.responses, predictors=ns.predictors, alpha=ns.alpha,
        granularity=ns.granularity, tol=ns.tol, scale=ns.scale, n=ns.n, seed=ns.seed,
        cond_indep=ns.cond_indep, threads=ns.threads,
        family=getattr(ns, "family", None), params=getattr(ns, "param", ()),
        rotation=getattr(ns, "rotation", 0), method=getattr(ns, "method", "numeric"),
    )


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg = config_from_args(argv)
        return HANDLERS[cfg.command](cfg, out=out)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except (ModelFormatError, FitError) as exc:
        print(f"model error: {exc}", file=err)
        return EXIT_MODEL
    except (QuadratureError, ArithmeticError, NoSolutionOnLine) as exc:
        print(f"numeric failure: {exc}", file=err)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
