"""Command-line front end.

Every subcommand reads an optional JSON config (``--config``), applies the
command-line flags on top of it, validates the result and writes a JSON
report plus CSV tables into the output directory. Exit status: 0 on
success, 2 on validation errors, 3 when a solver does not converge.
"""

from __future__ import annotations

import argparse
import copy
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from ._io import atomic_write_text, write_csv, write_json
from .errors import InvalidParameters, SupportOverflowError
from .extension import default_height, extend, extension_energy, trace, write_profile_csv
from .fracops import seminorm_sq
from .functionals import REPORT_VERSION, c_star, energy_evaluate, gamma_H, model_for, quotient_evaluate
from .grid import ProblemParams, field_to_csv, make_grid, save_field
from .profiles import PROFILES, gaussian, make_profile
from .solvers import (
    MinimizerConfig,
    MountainPassConfig,
    estimate_constant,
    max_representable_shift,
    minimize_quotient,
    mountain_pass,
    translate_scan,
)

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 2, 3

COMMANDS = ("hardy-constant", "quotient", "minimize", "translate-scan", "mountain-pass", "extension-check", "sweep")

# schema: section -> key -> (type(s), default)
SCHEMA: dict[str, dict[str, tuple[tuple[type, ...], Any]]] = {
    "problem": {
        "n": ((int,), 1),
        "alpha": ((int, float), 0.5),
        "s": ((int, float), 0.0),
        "gamma": ((int, float), None),
        "gamma_frac": ((int, float), None),
    },
    "grid": {
        "N": ((int,), 1024),
        "L": ((int, float), 50.0),
    },
    "solver": {
        "step": ((int, float), 1.0),
        "max_iters": ((int,), 2000),
        "tol": ((int, float), 1e-12),
        "grad_tol": ((int, float), 1e-7),
        "symmetrize_every": ((int,), 10),
        "renormalize": ((bool,), True),
        "path_points": ((int,), 16),
        "mp_tol": ((int, float), 1e-4),
        "mp_max_iters": ((int,), 500),
        "refine": ((bool,), True),
    },
    "experiment": {
        "profile": ((str,), "bubble"),
        "scale": ((int, float), 1.0),
        "alphas": ((list,), None),
        "deltas": ((list,), None),
        "M": ((int,), 256),
        "Y": ((int, float), None),
        "mass_threshold": ((int, float), 0.9999),
    },
    "sweep": {
        "command": ((str,), "quotient"),
        "parameters": ((dict,), {}),
        "workers": ((int,), 1),
    },
}
TOP_LEVEL = {"output": ((str,), "out"), "seed": ((int,), 0)}

CSV_SCHEMA = {
    "hardy_constant.csv": ("alpha", "gamma_H"),
    "quotient.csv": ("spectral", "hardy", "hs_term", "sob_term", "quotient", "gamma"),
    "history.csv (minimize)": ("iteration", "quotient", "residual", "step", "boundary_mass", "event"),
    "history.csv (mountain-pass)": ("iteration", "c", "residual", "step", "event"),
    "path_energy.csv": ("index", "energy", "norm"),
    "scan.csv": ("delta", "quotient"),
    "profiles.csv": ("xi_abs", "y", "phi"),
    "field.csv": ("x1..xn", "value"),
    "sweep.csv": ("entry", "status", "exit_code", "<swept keys>", "headline"),
}
CSV_DOC = {
    "alpha": "order of the operator",
    "gamma_H": "sharp Hardy constant for (n, alpha)",
    "spectral": "spectral energy of the field (zeta zero-mode form)",
    "hardy": "int |u|^2 |x|^-alpha",
    "hs_term": "int |u|^(2*(s)) |x|^-s",
    "sob_term": "int |u|^(2*)",
    "quotient": "Rayleigh quotient",
    "gamma": "Hardy coupling",
    "iteration": "iteration counter (0 = initial state)",
    "residual": "Sobolev-metric gradient norm, relative",
    "step": "current step length",
    "boundary_mass": "share of Hardy-Sobolev mass in |x|_inf > L/2",
    "event": "step, symmetrize, shift<k> (lattice translation) or init",
    "c": "maximum of the energy along the current path",
    "index": "path point index from 0 to the end point",
    "energy": "energy at the path point",
    "norm": "twisted norm at the path point",
    "delta": "translation distance",
    "xi_abs": "frequency magnitude |xi|",
    "y": "height in the extension strip",
    "phi": "normalized extension profile phi(2 pi |xi| y)",
    "x1..xn": "node coordinates",
    "value": "field value",
    "entry": "sweep entry directory name",
    "status": "ok / solver status / invalid",
    "exit_code": "exit status of the entry",
    "<swept keys>": "one column per swept dotted key",
    "headline": "main scalar result of the entry",
}


class ConfigError(ValueError):
    """Schema violation; ``errors`` lists every offending key."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def default_config() -> dict:
    cfg: dict[str, Any] = {sec: {k: copy.deepcopy(v[1]) for k, v in keys.items()} for sec, keys in SCHEMA.items()}
    cfg.update({k: v[1] for k, v in TOP_LEVEL.items()})
    return cfg


def validate_config(raw: dict) -> list[str]:
    """Return a message for every unknown or ill-typed key of ``raw``."""
    errors = []
    if not isinstance(raw, dict):
        return ["config must be a JSON object"]
    for key, val in raw.items():
        if key in TOP_LEVEL:
            types = TOP_LEVEL[key][0]
            if not _type_ok(val, types):
                errors.append(f"{key}: expected {_tname(types)}, got {type(val).__name__}")
        elif key in SCHEMA:
            if not isinstance(val, dict):
                errors.append(f"{key}: expected an object")
                continue
            for sub, sval in val.items():
                if sub not in SCHEMA[key]:
                    errors.append(f"{key}.{sub}: unknown key")
                    continue
                types = SCHEMA[key][sub][0]
                if sval is not None and not _type_ok(sval, types):
                    errors.append(f"{key}.{sub}: expected {_tname(types)}, got {type(sval).__name__}")
        else:
            errors.append(f"{key}: unknown key")
    prob = raw.get("problem", {}) if isinstance(raw.get("problem", {}), dict) else {}
    if prob.get("gamma") is not None and prob.get("gamma_frac") is not None:
        errors.append("problem.gamma and problem.gamma_frac are mutually exclusive")
    return errors


def _type_ok(val, types) -> bool:
    if bool in types:
        return isinstance(val, bool)
    if isinstance(val, bool):
        return False
    return isinstance(val, types)


def _tname(types) -> str:
    return " or ".join(t.__name__ for t in types)


def merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "parameters":
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def resolve(raw_file: dict | None, overrides: dict) -> dict:
    raw_file = raw_file or {}
    errors = validate_config(raw_file) + validate_config(overrides)
    if errors:
        raise ConfigError(errors)
    cfg = merge(merge(default_config(), raw_file), overrides)
    if overrides.get("problem", {}).get("gamma") is not None:
        cfg["problem"]["gamma_frac"] = None
    if overrides.get("problem", {}).get("gamma_frac") is not None:
        cfg["problem"]["gamma"] = None
    return cfg


def params_from(cfg: dict) -> ProblemParams:
    p = cfg["problem"]
    n, alpha, s = p["n"], float(p["alpha"]), float(p["s"])
    if p.get("gamma_frac") is not None:
        try:
            gh = gamma_H(n, alpha)
        except ValueError as exc:
            raise InvalidParameters(str(exc)) from exc
        gamma = float(p["gamma_frac"]) * gh
    else:
        gamma = float(p["gamma"] or 0.0)
    return ProblemParams(n, alpha, s, gamma)


def grid_from(cfg: dict):
    try:
        return make_grid(cfg["problem"]["n"], cfg["grid"]["N"], float(cfg["grid"]["L"]))
    except ValueError as exc:
        raise ConfigError([f"grid: {exc}"]) from exc


def minimizer_cfg(cfg: dict) -> MinimizerConfig:
    s = cfg["solver"]
    try:
        return MinimizerConfig(step=float(s["step"]), max_iters=s["max_iters"], tol=float(s["tol"]),
                               symmetrize_every=s["symmetrize_every"], renormalize=s["renormalize"],
                               grad_tol=float(s["grad_tol"]))
    except ValueError as exc:
        raise ConfigError([f"solver: {exc}"]) from exc


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _envelope(command: str, cfg: dict, body: dict, grid=None) -> dict:
    out = {"report_version": REPORT_VERSION, "command": command, "config": cfg, "package_version": __version__}
    if grid is not None:
        out["grid"] = grid.metadata()
    out.update(body)
    return out


def write_schema(outdir: Path) -> Path:
    lines = ["# CSV schema", "", "Columns of the CSV tables written by the `frachs` command-line tool.", ""]
    for name, cols in CSV_SCHEMA.items():
        lines.append(f"## {name}")
        lines.append("")
        lines.append("| column | meaning |")
        lines.append("|---|---|")
        for c in cols:
            doc = CSV_DOC.get(c, "").replace("|", "\\|")
            lines.append(f"| `{c}` | {doc} |")
        lines.append("")
    lines += ["JSON reports carry `\"report_version\": 1`, the resolved config and the grid metadata.", ""]
    return atomic_write_text(outdir / "SCHEMA.md", "\n".join(lines))


# ---------------------------------------------------------------------------
# subcommands: each returns (exit_code, headline)
# ---------------------------------------------------------------------------


def cmd_hardy_constant(cfg: dict, outdir: Path) -> tuple[int, float]:
    n = cfg["problem"]["n"]
    alphas = cfg["experiment"]["alphas"]
    if alphas is None:
        top = min(2.0, float(n))
        alphas = [round(top * f, 4) for f in (0.25, 0.5, 0.75, 0.995)]
    alphas = [float(a) for a in alphas]
    rows = []
    for a in alphas:
        try:
            rows.append((a, gamma_H(n, a)))
        except ValueError as exc:
            raise InvalidParameters(str(exc)) from exc
    write_csv(outdir / "hardy_constant.csv", ("alpha", "gamma_H"), rows)
    write_json(outdir / "report.json", _envelope("hardy-constant", cfg, {
        "n": n, "rows": [{"alpha": a, "gamma_H": g} for a, g in rows]}))
    return EXIT_OK, rows[-1][1]


def cmd_quotient(cfg: dict, outdir: Path) -> tuple[int, float]:
    params = params_from(cfg)
    grid = grid_from(cfg)
    ex = cfg["experiment"]
    if ex["profile"] not in PROFILES:
        raise ConfigError([f"experiment.profile: unknown profile {ex['profile']!r}"])
    u = make_profile(ex["profile"], grid, params.alpha, cfg["seed"], float(ex["scale"]))
    rep = quotient_evaluate(u, params)
    en = energy_evaluate(u, params)
    write_csv(outdir / "quotient.csv", rep.CSV_COLUMNS, [rep.csv_row()])
    save_field(outdir / "field.fxv", u)
    write_json(outdir / "report.json", _envelope("quotient", cfg, {
        "profile": ex["profile"], "quotient": rep.to_dict(), "energy": en.to_dict()}, grid))
    return EXIT_OK, rep.quotient


def cmd_minimize(cfg: dict, outdir: Path) -> tuple[int, float]:
    params = params_from(cfg)
    grid = grid_from(cfg)
    ex = cfg["experiment"]
    profile = ex["profile"] if ex["profile"] in PROFILES else "random-smooth"
    init = make_profile(profile, grid, params.alpha, cfg["seed"], float(ex["scale"]))
    u, rep, hist = minimize_quotient(init, params, minimizer_cfg(cfg))
    atomic_write_text(outdir / "history.csv", hist.to_csv())
    save_field(outdir / "minimizer.fxv", u)
    field_to_csv(outdir / "minimizer.csv", u)
    write_json(outdir / "report.json", _envelope("minimize", cfg, {
        "init_profile": profile, "status": hist.status, "converged": hist.converged,
        "notes": hist.notes, "quotient": rep.to_dict()}, grid))
    return (EXIT_OK if hist.converged else EXIT_NONCONVERGED), rep.quotient


def cmd_translate_scan(cfg: dict, outdir: Path) -> tuple[int, float]:
    params = params_from(cfg)
    if params.s != 0.0:
        raise InvalidParameters("translate-scan needs s = 0")
    grid = grid_from(cfg)
    ex = cfg["experiment"]
    bubble_src = "extremal"
    status = "converged"
    if ex["profile"] in PROFILES and ex["profile"] != "bubble":
        bubble_src = ex["profile"]
        bub = make_profile(ex["profile"], grid, params.alpha, cfg["seed"], float(ex["scale"]))
    else:
        # the gamma = 0 extremal of this grid
        init = make_profile("random-smooth", grid, params.alpha, cfg["seed"])
        bub, _, hist = minimize_quotient(init, params.with_gamma(0.0), minimizer_cfg(cfg))
        status = hist.status
    thr = float(ex["mass_threshold"])
    if ex["deltas"] is None:
        dmax = max_representable_shift(bub, params, mass_threshold=thr)
        k = int(round(dmax / grid.spacing))
        steps = sorted({0} | {int(round(k * f)) for f in np.linspace(0.0, 1.0, 11)})
        deltas = [j * grid.spacing for j in steps]
    else:
        deltas = [float(d) for d in ex["deltas"]]
    try:
        table = translate_scan(bub, params, deltas, mass_threshold=thr)
    except SupportOverflowError as exc:
        raise ConfigError([f"experiment.deltas: {exc}"]) from exc
    atomic_write_text(outdir / "scan.csv", table.to_csv())
    write_json(outdir / "report.json", _envelope("translate-scan", cfg, {
        "bubble": bubble_src, "bubble_status": status, "scan": table.to_dict()}, grid))
    ok = status == "converged"
    return (EXIT_OK if ok else EXIT_NONCONVERGED), table.quotients[-1]


def cmd_mountain_pass(cfg: dict, outdir: Path) -> tuple[int, float]:
    params = params_from(cfg)
    grid = grid_from(cfg)
    ex = cfg["experiment"]
    seed_field = (make_profile(ex["profile"], grid, params.alpha, cfg["seed"], float(ex["scale"]))
                  if ex["profile"] in PROFILES else gaussian(grid))
    mcfg = minimizer_cfg(cfg)
    if params.s <= 0.0 or params.gamma < 0.0:
        raise InvalidParameters("mountain pass needs 0 < s < α and 0 ≤ γ < γ_H")
    e0 = estimate_constant(params.with_s(0.0), grid, mcfg, seed=cfg["seed"])
    es = estimate_constant(params, grid, mcfg, seed=cfg["seed"])
    cs = c_star(params, e0.value, es.value)
    cs_fine = c_star(params, e0.refined, es.refined)
    s = cfg["solver"]
    try:
        mp_cfg = MountainPassConfig(path_points=s["path_points"], tol=float(s["mp_tol"]),
                                    max_iters=s["mp_max_iters"], step=float(s["step"]))
    except ValueError as exc:
        raise ConfigError([f"solver: {exc}"]) from exc
    rep = mountain_pass(seed_field, params, mp_cfg, constants=(e0.value, es.value),
                        constants_error=abs(cs - cs_fine))
    model = model_for(grid, params)
    rows = [(i, model.energy(p.values), model.norm_sq(p.values)) for i, p in enumerate(rep.path)]
    write_csv(outdir / "path_energy.csv", ("index", "energy", "norm"), rows)
    atomic_write_text(outdir / "history.csv", rep.history.to_csv())
    save_field(outdir / "maximizer.fxv", rep.maximizer)
    write_json(outdir / "report.json", _envelope("mountain-pass", cfg, {
        "mountain_pass": rep.to_dict(),
        "constants": {"S0": e0.to_dict(), "Ss": es.to_dict(), "c_star_refined": cs_fine}}, grid))
    return (EXIT_OK if rep.converged else EXIT_NONCONVERGED), rep.c_est


def cmd_extension_check(cfg: dict, outdir: Path) -> tuple[int, float]:
    grid = grid_from(cfg)
    alpha = float(cfg["problem"]["alpha"])
    if not 0.0 < alpha < 2.0:
        raise InvalidParameters(f"hypothesis 0 < α < 2 violated (alpha={alpha})")
    ex = cfg["experiment"]
    if ex["profile"] not in PROFILES:
        raise ConfigError([f"experiment.profile: unknown profile {ex['profile']!r}"])
    u = make_profile(ex["profile"], grid, alpha, cfg["seed"], float(ex["scale"]))
    Y = float(ex["Y"]) if ex["Y"] is not None else default_height(grid)
    try:
        w = extend(u, Y, ex["M"], alpha)
    except ValueError as exc:
        raise ConfigError([f"experiment: {exc}"]) from exc
    energy = extension_energy(w)
    semi = seminorm_sq(u, alpha)
    tr = trace(w)
    rel = abs(energy - semi) / semi if semi > 0 else abs(energy)
    trace_err = float(np.max(np.abs(tr.values - u.values)) / max(np.max(np.abs(u.values)), 1e-300))
    write_profile_csv(outdir / "profiles.csv", w)
    write_json(outdir / "report.json", _envelope("extension-check", cfg, {
        "extension_energy": energy, "seminorm_sq": semi, "relative_error": rel,
        "trace_error": trace_err, "Y": Y, "M": ex["M"], "k_alpha": w.k_alpha, "status": w.status}, grid))
    return EXIT_OK, rel


HANDLERS: dict[str, Callable[[dict, Path], tuple[int, float]]] = {
    "hardy-constant": cmd_hardy_constant,
    "quotient": cmd_quotient,
    "minimize": cmd_minimize,
    "translate-scan": cmd_translate_scan,
    "mountain-pass": cmd_mountain_pass,
    "extension-check": cmd_extension_check,
}


def _set_dotted(cfg: dict, key: str, value) -> None:
    parts = key.split(".")
    node = cfg
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    node[parts[-1]] = value


def _sweep_entry(args) -> tuple[str, int, str, float]:
    command, cfg, outdir = args
    code, status, headline = _run_single(command, cfg, Path(outdir))
    return Path(outdir).name, code, status, headline


def cmd_sweep(cfg: dict, outdir: Path) -> tuple[int, float]:
    sw = cfg["sweep"]
    command = sw["command"]
    if command not in HANDLERS:
        raise ConfigError([f"sweep.command: unknown or nested command {command!r}"])
    params = sw["parameters"] or {}
    keys = sorted(params)
    for k in keys:
        if not isinstance(params[k], list) or not params[k]:
            raise ConfigError([f"sweep.parameters.{k}: expected a non-empty list"])
    entries = []
    for i, combo in enumerate(itertools.product(*(params[k] for k in keys))):
        sub = copy.deepcopy(cfg)
        overrides: dict = {}
        for k, v in zip(keys, combo):
            _set_dotted(overrides, k, v)
        errs = validate_config(overrides)
        if errs:
            raise ConfigError([f"sweep.parameters: {e}" for e in errs])
        sub = merge(sub, overrides)
        if overrides.get("problem", {}).get("gamma") is not None:
            sub["problem"]["gamma_frac"] = None
        if overrides.get("problem", {}).get("gamma_frac") is not None:
            sub["problem"]["gamma"] = None
        name = f"entry_{i:03d}"
        sub["output"] = str(outdir / name)
        entries.append((command, sub, str(outdir / name), combo))
    jobs = [(c, s, o) for c, s, o, _ in entries]
    if sw["workers"] > 1:
        with ProcessPoolExecutor(max_workers=sw["workers"]) as pool:
            results = list(pool.map(_sweep_entry, jobs))
    else:
        results = [_sweep_entry(j) for j in jobs]
    rows = []
    worst = EXIT_OK
    for (name, code, status, headline), (_, _, _, combo) in zip(results, entries):
        rows.append([name, status, code, *combo, headline])
        worst = max(worst, code)
    write_csv(outdir / "sweep.csv", ["entry", "status", "exit_code", *keys, "headline"], rows)
    write_json(outdir / "report.json", _envelope("sweep", cfg, {
        "entries": [dict(zip(["entry", "status", "exit_code", *keys, "headline"], r)) for r in rows]}))
    return worst, float(len(rows))


def _run_single(command: str, cfg: dict, outdir: Path) -> tuple[int, str, float]:
    """Run one subcommand; never raises for validation problems."""
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        write_schema(outdir)
        code, headline = HANDLERS[command](cfg, outdir)
        return code, ("ok" if code == EXIT_OK else "not_converged"), float(headline)
    except (ConfigError, InvalidParameters) as exc:
        atomic_write_text(outdir / "error.txt", f"{exc}\n")
        return EXIT_INVALID, "invalid", float("nan")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

FLAG_MAP = {
    # flag dest -> (section, key)
    "n": ("problem", "n"), "alpha": ("problem", "alpha"), "s": ("problem", "s"),
    "gamma": ("problem", "gamma"), "gamma_frac": ("problem", "gamma_frac"),
    "N": ("grid", "N"), "L": ("grid", "L"),
    "step": ("solver", "step"), "max_iters": ("solver", "max_iters"), "tol": ("solver", "tol"),
    "grad_tol": ("solver", "grad_tol"), "symmetrize_every": ("solver", "symmetrize_every"),
    "path_points": ("solver", "path_points"), "mp_tol": ("solver", "mp_tol"),
    "mp_max_iters": ("solver", "mp_max_iters"),
    "profile": ("experiment", "profile"), "scale": ("experiment", "scale"),
    "alphas": ("experiment", "alphas"), "deltas": ("experiment", "deltas"),
    "M": ("experiment", "M"), "Y": ("experiment", "Y"), "mass_threshold": ("experiment", "mass_threshold"),
    "command": ("sweep", "command"), "workers": ("sweep", "workers"),
}


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _sweep_param(text: str) -> tuple[str, list]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=v1,v2,..., got {text!r}")
    key, vals = text.split("=", 1)
    out = []
    for t in vals.split(","):
        t = t.strip()
        try:
            out.append(json.loads(t))
        except json.JSONDecodeError:
            out.append(t)
    return key.strip(), out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frachs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        sp = subs.add_parser(name)
        sp.add_argument("--config", type=Path, help="JSON config file; flags override it")
        sp.add_argument("--output", "-o", help="output directory")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--s", type=float)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--gamma", type=float, help="Hardy coupling")
        g.add_argument("--gamma-frac", dest="gamma_frac", type=float, help="Hardy coupling as a multiple of gamma_H")
        sp.add_argument("--N", type=int)
        sp.add_argument("--L", type=float)
        sp.add_argument("--step", type=float)
        sp.add_argument("--max-iters", dest="max_iters", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--grad-tol", dest="grad_tol", type=float)
        sp.add_argument("--symmetrize-every", dest="symmetrize_every", type=int)
        sp.add_argument("--path-points", dest="path_points", type=int)
        sp.add_argument("--mp-tol", dest="mp_tol", type=float)
        sp.add_argument("--mp-max-iters", dest="mp_max_iters", type=int)
        sp.add_argument("--profile")
        sp.add_argument("--scale", type=float)
        sp.add_argument("--alphas", type=_float_list)
        sp.add_argument("--deltas", type=_float_list)
        sp.add_argument("--M", type=int)
        sp.add_argument("--Y", type=float)
        sp.add_argument("--mass-threshold", dest="mass_threshold", type=float)
        if name == "sweep":
            sp.add_argument("--command", choices=[c for c in COMMANDS if c != "sweep"])
            sp.add_argument("--workers", type=int)
            sp.add_argument("--set", dest="sweep_set", action="append", type=_sweep_param, default=[],
                            metavar="KEY=V1,V2", help="swept dotted config key, e.g. problem.alpha=0.25,0.5")
    return parser


def overrides_from(ns: argparse.Namespace) -> dict:
    over: dict = {}
    for dest, (sec, key) in FLAG_MAP.items():
        val = getattr(ns, dest, None)
        if val is not None:
            over.setdefault(sec, {})[key] = val
    if ns.output is not None:
        over["output"] = ns.output
    if ns.seed is not None:
        over["seed"] = ns.seed
    for key, vals in getattr(ns, "sweep_set", []) or []:
        over.setdefault("sweep", {}).setdefault("parameters", {})[key] = vals
    return over


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        raw = None
        if ns.config is not None:
            try:
                raw = json.loads(Path(ns.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError([f"config: cannot read {ns.config}: {exc}"]) from exc
        cfg = resolve(raw, overrides_from(ns))
    except ConfigError as exc:
        for e in exc.errors:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    outdir = Path(cfg["output"])
    if ns.subcommand == "sweep":
        try:
            outdir.mkdir(parents=True, exist_ok=True)
            write_schema(outdir)
            code, _ = cmd_sweep(cfg, outdir)
        except (ConfigError, InvalidParameters) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        return code
    code, status, headline = _run_single(ns.subcommand, cfg, outdir)
    if code == EXIT_INVALID:
        print(f"error: {(outdir / 'error.txt').read_text().strip()}", file=sys.stderr)
    else:
        print(f"{ns.subcommand}: {status} ({headline:.12g}) -> {outdir}")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
