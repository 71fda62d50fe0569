"""Command-line front end.

    cubex COMMAND [key=value ...] [--config PATH] [--out DIR] [--threads N]
          [--seed U64] [--p-grid LIST] [--epsilon FLOAT] [--tolerance-scale FLOAT]

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
errors.  Every run writes ``report.json`` (tool version, resolved config and
per-check records) plus CSV tables and PNG figures under ``--out``.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .envelope import CheckRecord, EnvelopeFit

COMMANDS = ("sum-eval", "arc-classify", "verify-identities", "verify-envelopes",
            "major-approx", "expander", "bound-table")

FLAG_DEFAULTS = {
    "out": "cubex-out",
    "threads": 1,
    "seed": 0,
    "p_grid": "1000,4000,16000",
    "epsilon": 0.1,
    "tolerance_scale": 1.0,
}

SUM_KINDS = ("S", "U", "Ustar", "W", "T", "f", "g", "G", "F_w", "I", "J", "K")

# per-command parameters: name -> default (the default's type is the parse type)
PARAMS = {
    "sum-eval": {"sum": "F_w", "q": 1, "a1": 0, "a2": 0, "a": 0, "b": 0, "r": 1,
                 "alpha": "0", "alpha2": "0", "P": 400.0, "w": "1", "X": 100.0, "Y": 10.0,
                 "beta": 0.0, "beta1": 0.0, "beta2": 0.0, "H": 0.0, "method": "mobius"},
    "arc-classify": {"alpha": "0", "P": 100.0, "w": "1"},
    "verify-identities": {},
    "verify-envelopes": {},
    "major-approx": {"mode": "all", "n_random": 1000, "n_near": 1000},
    "expander": {"N": 1_000_000, "set": "two_cubes", "k": 3, "delta": 0.5, "values": "",
                 "trend": "10000,100000,1000000"},
    "bound-table": {"step": "1/20", "deltas": ""},
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration

def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; blank lines and ``#`` comments ignored."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _convert(key: str, raw, default):
    if isinstance(default, bool):
        return str(raw).lower() in ("1", "true", "yes")
    try:
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {raw!r}") from exc
    return str(raw)


def resolve_config(command: str, file_values: dict, cli_params: dict, cli_flags: dict) -> dict:
    """defaults < config file < command line; unknown keys are usage errors."""
    allowed = PARAMS[command]
    flags = dict(FLAG_DEFAULTS)
    params = dict(allowed)
    for source in (file_values, cli_params):
        for k, v in source.items():
            if k in FLAG_DEFAULTS and source is file_values:
                flags[k] = _convert(k, v, FLAG_DEFAULTS[k])
            elif k in allowed:
                params[k] = _convert(k, v, allowed[k])
            else:
                raise UsageError(f"unknown key {k!r} for {command}")
    for k, v in cli_flags.items():
        if v is not None:
            flags[k] = _convert(k, v, FLAG_DEFAULTS[k])
    if not 0 <= flags["seed"] < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    if flags["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    try:
        flags["p_grid"] = [float(x) for x in str(flags["p_grid"]).split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --p-grid: {flags['p_grid']!r}") from exc
    if not flags["p_grid"] or min(flags["p_grid"]) < 2:
        raise UsageError("--p-grid needs values >= 2")
    if command == "sum-eval" and params["sum"] not in SUM_KINDS:
        raise UsageError(f"unknown sum {params['sum']!r}; choose from {', '.join(SUM_KINDS)}")
    return {"command": command, "flags": flags, "params": params}


def parse_number(text: str):
    """'p/q' becomes an exact Fraction, anything else a float."""
    text = str(text).strip()
    try:
        if "/" in text:
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def parse_modulus(text: str, P: float):
    from .ntheory import PrimorialSpec
    if str(text).lower() in ("primorial", "varpi"):
        return PrimorialSpec(P ** 0.25)
    try:
        return int(text)
    except ValueError as exc:
        raise UsageError(f"w must be a squarefree integer or 'primorial', got {text!r}") from exc


# ---------------------------------------------------------------------------
# commands

class Run:
    """Collects checks, tables and figures for one invocation."""

    def __init__(self, config: dict):
        self.config = config
        self.flags = config["flags"]
        self.params = config["params"]
        self.out = Path(self.flags["out"])
        self.checks: list[CheckRecord] = []
        self.files: list[str] = []
        self.summary: dict = {}

    def csv(self, name: str, header, rows):
        from .report import write_csv
        self.files.append(str(write_csv(self.out / name, header, rows).relative_to(self.out)))

    def figure(self, path: Path):
        self.files.append(str(path.relative_to(self.out)))

    def fig_path(self, name: str) -> Path:
        return self.out / "figures" / name

    def add_fits(self, fits: list[EnvelopeFit]):
        from .report import plot_envelope
        for f in fits:
            self.checks.append(f.record())
            self.figure(plot_envelope(f, self.fig_path(f"{f.name}.png")))

    def finish(self) -> int:
        from .report import checks_table, to_jsonable, write_json
        passed = all(c.passed for c in self.checks)
        self.csv("checks.csv", *checks_table(self.checks))
        report = {
            "tool": "cubex",
            "version": __version__,
            "config": self.config,
            "checks": [{"name": c.name, "observed": c.observed, "threshold": c.threshold,
                        "pass": c.passed, "details": c.details} for c in self.checks],
            "summary": self.summary,
            "passed": passed,
            "files": sorted(self.files + ["report.json"]),
        }
        write_json(self.out / "report.json", report)
        for c in self.checks:
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  observed={to_jsonable(c.observed)}  threshold={to_jsonable(c.threshold)}")
        return 0 if passed else 1


def cmd_sum_eval(run: Run):
    from . import complete_sums as cs
    from . import oscillatory as osc
    from . import weyl
    p = run.params
    kind = p["sum"]
    alpha = parse_number(p["alpha"])
    alpha_col = ""
    if kind == "S":
        v = cs.gauss_quad(p["q"], p["a1"], p["a2"])
    elif kind == "U":
        v = cs.hua_sum(p["q"], p["a"], p["b"])
    elif kind == "Ustar":
        v = cs.restricted_cubic_sum(p["r"], p["b"])
    elif kind == "W":
        v = cs.paired_sum_W(p["r"], p["b"])
    elif kind == "T":
        v = cs.hua_T(p["q"], p["a"], p["b"])
    elif kind in ("f", "g"):
        fn = weyl.quad_f if kind == "f" else weyl.quad_g
        v = fn(alpha, parse_number(p["alpha2"]), p["X"])
        alpha_col = p["alpha"]
    elif kind == "G":
        v = weyl.cubic_G(alpha, p["X"], p["Y"])
        alpha_col = p["alpha"]
    elif kind == "F_w":
        params = weyl.WeylParams(p["P"], parse_modulus(p["w"], p["P"]))
        v = weyl.F_w(alpha, params, method=p["method"])
        alpha_col = p["alpha"]
    else:
        if kind == "I":
            q = osc.integral_I(p["beta1"], p["beta2"], p["X"])
        elif kind == "J":
            q = osc.integral_J(p["beta1"], p["beta2"], p["X"])
        else:
            H = p["H"] if p["H"] > 0 else math.sqrt(p["P"])
            q = osc.integral_K(p["beta"], H, p["P"])
        row = [kind, "", q.value.real, q.value.imag, q.panels, q.abs_error_estimate]
        run.csv("sum_eval.csv", ["sum", "alpha", "Re", "Im", "terms", "error_estimate"], [row])
        run.summary = {"value": q.value, "panels": q.panels, "abs_error_estimate": q.abs_error_estimate}
        return
    row = [kind, alpha_col, v.value.real, v.value.imag, v.terms, v.err_budget]
    run.csv("sum_eval.csv", ["sum", "alpha", "Re", "Im", "terms", "error_estimate"], [row])
    run.summary = {"value": v.value, "terms": v.terms, "err_budget": v.err_budget}


def cmd_arc_classify(run: Run):
    from .arcs import classify
    p = run.params
    P = p["P"]
    label = classify(parse_number(p["alpha"]), P, parse_modulus(p["w"], P))
    ap = label.approximant
    row = [p["alpha"], label.kind.value, ap.a if ap else "", ap.q if ap else "",
           ap.beta if ap else "", label.upsilon, label.xi, label.boundary_ambiguous]
    run.csv("arc.csv", ["alpha", "kind", "a", "q", "beta", "upsilon", "xi", "boundary_ambiguous"], [row])
    run.summary = {"kind": label.kind.value, "a": ap.a if ap else None, "q": ap.q if ap else None,
                   "beta": ap.beta if ap else None, "upsilon": label.upsilon, "xi": label.xi,
                   "boundary_ambiguous": label.boundary_ambiguous}


def cmd_verify_identities(run: Run):
    from .checks import identity_checks, vanishing_checks
    from .report import plot_checks
    scale = run.flags["tolerance_scale"]
    run.checks += identity_checks(run.flags["seed"], scale)
    run.checks += vanishing_checks(scale)
    run.figure(plot_checks(run.checks, run.fig_path("identities.png")))


def cmd_verify_envelopes(run: Run):
    from .checks import envelope_checks
    from .report import fits_table
    fits, records = envelope_checks(run.flags["seed"], run.flags["epsilon"])
    run.add_fits(fits)
    run.checks += records
    run.csv("envelopes.csv", *fits_table(fits))


def cmd_major_approx(run: Run):
    from .checks import major_residual_fits, theorem12_fits
    from .report import fits_table, plot_scatter
    p, f = run.params, run.flags
    if p["mode"] not in ("all", "residual", "theorem12"):
        raise UsageError("mode must be all, residual or theorem12")
    grid = f["p_grid"]
    fits: list[EnvelopeFit] = []
    if p["mode"] in ("all", "residual"):
        res_fits, tables = major_residual_fits(grid, epsilon=f["epsilon"])
        fits += res_fits
        run.csv("major_residual.csv", ["w", "P", "a", "q", "beta", "abs_F", "abs_main", "residual", "ratio"],
                [[w, P, r["a"], r["q"], r["beta"], r["abs_F"], r["abs_main"], r["residual"], r["ratio"]]
                 for (w, P), rows in tables.items() for r in rows])
        # the constant fitted at the smallest P, as reported alongside the slope
        run.summary["residual_C_at_first_P"] = {fit.name: fit.per_size_max[0] for fit in res_fits}
    if p["mode"] in ("all", "theorem12"):
        t_fits, recs, tables = theorem12_fits(f["seed"], grid, p["n_random"], p["n_near"],
                                              threads=f["threads"], epsilon=f["epsilon"])
        fits += t_fits
        run.checks += recs
        run.csv("theorem12.csv", ["variant", "P", "alpha", "kind", "q", "abs_F", "envelope", "ratio"],
                [[name, P, r.alpha, r.kind, r.q, r.abs_F, r.envelope, r.ratio]
                 for (name, P), rows in tables.items() for r in rows])
        for (name, P), rows in tables.items():
            if P == max(grid):
                run.figure(plot_scatter([r.alpha for r in rows], [r.ratio for r in rows],
                                        run.fig_path(f"theorem12_{name}_P{int(P)}.png"),
                                        f"{name}, P = {P:g}", "alpha", "ratio"))
    run.add_fits(fits)
    run.csv("major_fits.csv", *fits_table(fits))


def cmd_expander(run: Run):
    from . import expander as ex
    from .report import plot_histogram
    p = run.params
    N = p["N"]
    values = [int(v) for v in p["values"].split(",") if v.strip()]
    try:
        Z = ex.generate_set(p["set"], N, k=p["k"], delta=p["delta"], seed=run.flags["seed"], values=values)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    m = ex.moments(Z, N)
    eq = ex.M2_equation_count(Z, N)
    rho = ex.rho_counts(Z, N)
    run.checks += [
        CheckRecord("M1_equals_Z_times_primes", m.M1, m.Z * m.primes, m.m1_exact),
        CheckRecord("cauchy_theta_M2_ge_M1_squared", m.Theta * m.M2, m.M1 * m.M1, m.cauchy_holds),
        CheckRecord("M2_histogram_equals_equation_count", m.M2, eq, m.M2 == eq),
        CheckRecord("M2_ge_M1", m.M2, m.M1, m.M2 >= m.M1),
    ]
    trend = ex.theta_trend([int(x) for x in p["trend"].split(",") if x.strip()], 0.5, run.flags["seed"])
    dens = ex.density_estimate(Z, N)
    run.summary = {"set": Z.label, "moments": m, "density_estimate": dens, "theta_trend": trend}
    run.csv("rho.csv", ["n", "rho"], sorted(rho.items()))
    run.csv("theta_trend.csv", ["N", "Z", "Theta", "ratio"],
            [[t["N"], t["Z"], t["Theta"], t["ratio"]] for t in trend])
    run.figure(plot_histogram(rho, run.fig_path("rho_histogram.png"), f"rho multiplicities, {Z.label}"))


def cmd_bound_table(run: Run):
    from . import expander as ex
    from .report import plot_bound_table
    p = run.params
    if p["deltas"]:
        try:
            deltas = [Fraction(d.strip()) for d in p["deltas"].split(",") if d.strip()]
        except ValueError as exc:
            raise UsageError(f"bad deltas: {p['deltas']!r}") from exc
    else:
        deltas = ex.delta_grid(Fraction(p["step"]))
    try:
        rows = ex.bound_table(deltas)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    run.csv("bound_table.csv",
            ["delta", "davenport", "new_bound", "davenport_in_range", "delta_exact", "davenport_exact",
             "new_bound_exact"],
            [[float(r.delta), float(r.davenport), float(r.new_bound), r.davenport_in_range,
              r.delta, r.davenport, r.new_bound] for r in rows])
    two_thirds = ex.bound_table([Fraction(2, 3)])[0]
    four_fifths = ex.bound_table([Fraction(4, 5)])[0]
    beats = [r for r in rows if r.delta > Fraction(3, 5)]
    run.checks += [
        CheckRecord("delta_2/3_davenport", two_thirds.davenport, Fraction(13, 15),
                    two_thirds.davenport == Fraction(13, 15)),
        CheckRecord("delta_2/3_new_bound", two_thirds.new_bound, Fraction(8, 9),
                    two_thirds.new_bound == Fraction(8, 9)),
        CheckRecord("delta_4/5_new_bound", four_fifths.new_bound, Fraction(1), four_fifths.new_bound == 1),
        CheckRecord("new_bound_improves_above_3/5", sum(not r.improves for r in beats), 0,
                    all(r.improves for r in beats)),
    ]
    run.summary = {"rows": len(rows)}
    run.figure(plot_bound_table(rows, run.fig_path("bound_table.png")))


HANDLERS = {
    "sum-eval": cmd_sum_eval,
    "arc-classify": cmd_arc_classify,
    "verify-identities": cmd_verify_identities,
    "verify-envelopes": cmd_verify_envelopes,
    "major-approx": cmd_major_approx,
    "expander": cmd_expander,
    "bound-table": cmd_bound_table,
}


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cubex", description="Exponential sums over cubes: checks and experiments.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("params", nargs="*", help="key=value parameters (sum-eval also takes a bare sum name)")
    ap.add_argument("--config", help="flat key = value file; command-line values win")
    ap.add_argument("--out", help="output directory (default cubex-out)")
    ap.add_argument("--threads", help="worker cap for per-sample parallelism")
    ap.add_argument("--seed", help="unsigned 64-bit seed")
    ap.add_argument("--p-grid", dest="p_grid", help="comma-separated P values")
    ap.add_argument("--epsilon", help="exponent in the P^(1+eps) floors (default 0.1)")
    ap.add_argument("--tolerance-scale", dest="tolerance_scale", help="multiplier on identity tolerances")
    ap.add_argument("--version", action="version", version=f"cubex {__version__}")
    return ap


def _split_params(command: str, tokens: list[str]) -> dict:
    out = {}
    for tok in tokens:
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k.strip()] = v
        elif command == "sum-eval" and "sum" not in out:
            out["sum"] = tok
        else:
            raise UsageError(f"unexpected argument {tok!r}; parameters are key=value")
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_intermixed_args(argv)
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        cli_flags = {k: getattr(args, k) for k in FLAG_DEFAULTS}
        config = resolve_config(args.command, file_values, _split_params(args.command, args.params), cli_flags)
        if args.config:
            config["config_file"] = args.config
        run = Run(config)
        HANDLERS[args.command](run)
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"cubex: error: {exc}", file=sys.stderr)
        return 2
    return run.finish()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
