"""Command line front end.

Exit codes: 0 success, 2 invalid arguments, 3 solver or branch failure
(for instance a Grad-13 wave number beyond the critical point), 4 a
verification threshold was violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .chapman_enskog import simple_ce_coefficients
from .errors import (
    CatalogError,
    CriticalPointError,
    DomainError,
    ExactHydroError,
    PreconditionError,
    SingularityError,
    SolverError,
)
from .invariance import (
    BURNETT_13,
    COEFFICIENT_NAMES,
    SIMPLE_CLOSURES,
    LiftingCoefficients,
    grad13_newton_first,
    grad13_residual,
    grad13_sweep,
    lateral_solve,
    lifting_matrix,
    simple_closure,
)
from .models import MODEL_NAMES, build_model, catalog_json
from .projector import entropic_product, random_context, thermodynamic_project
from .spectra import closure_lifting, closure_spectrum
from .verification import (
    commutative_diagram_error,
    energy_balance_series,
    invariance_defect,
    lift,
    propagate,
)
from .viscosity import r_beta_expansion, r_burnett, r_maxwell, r_ode_solve

__all__ = ["RunConfig", "run", "main"]

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4

CLOSURES = (
    "euler",
    "navier-stokes",
    "burnett",
    "super-burnett",
    "newton1",
    "newton2",
    "matched",
    "exact",
    "nonlocal",
    "kinetic",
)


class UsageError(ExactHydroError):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    model: str = "grad3_1d"
    closure: str = "exact"
    k_min: float = 0.0
    k_max: float = 1.0
    points: int = 50
    spacing: str = "linear"
    fmt: str = "csv"
    output: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k_min < 0:
            raise UsageError("--k-min must be nonnegative")
        if self.points < 2:
            raise UsageError("--points must be at least 2")
        if self.k_max <= self.k_min:
            raise UsageError("--k-max must exceed --k-min")
        if self.spacing == "log" and self.k_min <= 0:
            raise UsageError("log spacing requires --k-min > 0")

    def k_grid(self):
        if self.spacing == "log":
            return np.geomspace(self.k_min, self.k_max, self.points)
        return np.linspace(self.k_min, self.k_max, self.points)


# --------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


class Table:
    def __init__(self, columns, rows=(), footer=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.footer = dict(footer or {})

    def render(self, fmt):
        if fmt == "json":
            payload = {
                "columns": self.columns,
                "rows": [[_jsonable(v) for v in r] for r in self.rows],
            }
            if self.footer:
                payload["footer"] = {k: _jsonable(v) for k, v in self.footer.items()}
            return json.dumps(payload, indent=1) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        for key, val in self.footer.items():
            w.writerow([key, _fmt(val)])
        return buf.getvalue()


def _emit(text, output):
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# subcommands


def _cmd_models(args, cfg):
    if cfg.fmt == "json":
        return catalog_json() + "\n", EXIT_OK
    rows = []
    for name in MODEL_NAMES:
        m = build_model(name)
        rows.append([name, m.dim_macro, m.dim_micro, " ".join(m.macro_names), " ".join(m.micro_names)])
    return Table(["name", "dim_macro", "dim_micro", "macro_names", "micro_names"], rows), EXIT_OK


def _cmd_ce(args, cfg):
    if args.order < 0:
        raise UsageError("--order must be nonnegative")
    s = simple_ce_coefficients(args.order)
    rows = [[n, str(a), float(a), str(b), float(b)] for n, (a, b) in enumerate(zip(s.a, s.b))]
    return Table(["n", "a_n", "a_n_decimal", "b_n", "b_n_decimal"], rows), EXIT_OK


def _parse_k_values(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --k-values: {exc}") from None
    if not vals or any(v < 0 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
        raise UsageError("--k-values must be nonnegative and strictly increasing")
    return np.array(vals)


def _cmd_manifold(args, cfg):
    explicit = args.k_values is not None
    k = _parse_k_values(args.k_values) if explicit else cfg.k_grid()
    names = COEFFICIENT_NAMES.get(cfg.model)
    if names is None:
        raise UsageError(f"unknown model {cfg.model!r}")
    cols = ["k", "k2", *names, "residual_norm"]
    footer = {}
    samples = []
    if cfg.model == "grad3_1d":
        if cfg.closure not in SIMPLE_CLOSURES:
            raise UsageError(f"closure {cfg.closure!r} has no grad3_1d lifting")
        samples = [simple_closure(cfg.closure, kj * kj) for kj in k]
    elif cfg.model == "grad13_lateral":
        if cfg.closure != "exact":
            raise UsageError("grad13_lateral supports only --closure exact")
        samples = [lateral_solve(kj * kj) for kj in k]
    else:
        if cfg.closure == "burnett":
            samples = [_burnett13(kj * kj) for kj in k]
        elif cfg.closure == "newton1":
            samples = [grad13_newton_first(kj * kj) for kj in k]
        elif cfg.closure == "exact":
            samples = [_burnett13(0.0)] if k[0] == 0 else []
            pos = k[k > 0]
            if pos.size:
                res = grad13_sweep(pos)
                samples += list(res.samples)
                if res.critical_k is not None:
                    footer["critical_k"] = res.critical_k
                    if explicit:
                        beyond = pos[pos >= res.critical_k]
                        raise CriticalPointError(
                            f"requested k={beyond[0]:.6g} exceeds critical_k={res.critical_k:.6g}",
                            critical_k=res.critical_k,
                        )
        else:
            raise UsageError("grad13_1d supports --closure exact, burnett or newton1")
    rows = [[s.k, s.k2, *[s.values[n] for n in names], s.residual_norm] for s in samples]
    return Table(cols, rows, footer), EXIT_OK


def _burnett13(k2):
    res = grad13_residual(BURNETT_13, k2)
    return LiftingCoefficients("grad13_1d", k2, dict(BURNETT_13), float(np.abs(res).max()))


def _cmd_dispersion(args, cfg):
    spec = closure_spectrum(cfg.model, cfg.closure, cfg.k_grid())
    rows = [[k, i, lab, w.real, w.imag] for k, i, lab, w in spec.rows()]
    return Table(["k", "branch_id", "label", "re_omega", "im_omega"], rows), EXIT_OK


def _cmd_viscosity(args, cfg):
    if args.points < 2 or args.g_max <= args.g_min:
        raise UsageError("need --points >= 2 and --g-max > --g-min")
    g = np.linspace(args.g_min, args.g_max, args.points)
    method = args.method
    if method == "auto":
        method = "closed_form" if args.gamma == 1.0 else "ode"
    if method == "closed_form":
        if args.gamma != 1.0:
            raise UsageError("closed_form requires --gamma 1")
        R = r_maxwell(g)
    elif method == "ode":
        R = r_ode_solve(args.gamma, g).r_values
    else:
        R = r_beta_expansion(g, args.gamma)
    cols = ["g", "R", "method", "gamma"]
    if args.burnett_truncation:
        cols.append("burnett_truncation")
        B = r_burnett(g, args.gamma)
    rows = []
    for i in range(g.size):
        row = [float(g[i]), float(R[i]), method, float(args.gamma)]
        if args.burnett_truncation:
            row.append(float(B[i]))
        rows.append(row)
    return Table(cols, rows), EXIT_OK


def _macro0(model, text):
    if text is None:
        return np.ones(model.dim_macro, complex)
    try:
        vals = np.array([complex(t.strip()) for t in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad --macro: {exc}") from None
    if vals.size != model.dim_macro:
        raise UsageError(f"--macro needs {model.dim_macro} values for {model.name}")
    return vals


def _lifting_at(model, closure, k):
    if closure in ("kinetic",):
        raise UsageError("closure 'kinetic' has no lifting")
    if model.name == "grad13_1d" and closure == "exact":
        res = grad13_sweep([abs(k)])
        if res.critical_k is not None:
            raise CriticalPointError(
                f"k={k} exceeds critical_k={res.critical_k:.6g}", critical_k=res.critical_k
            )
        return lifting_matrix(res.samples[-1], k)
    return closure_lifting(model.name, closure)(k)


def _cmd_verify(args, cfg):
    if args.check == "projector":
        return _verify_projector(args, cfg)
    model = build_model(cfg.model)
    t = np.linspace(0.0, args.t_max, args.t_points)
    k = args.k
    M0 = _macro0(model, args.macro)
    X = _lifting_at(model, cfg.closure, k)
    if args.check == "defect":
        vals = invariance_defect(model, X, k, M0, t)
        thr = 1e-9 if args.threshold is None else args.threshold
    elif args.check == "diagram":
        vals = commutative_diagram_error(model, X, k, M0, t)
        thr = 1e-9 if args.threshold is None else args.threshold
    else:
        if model.name != "grad3_1d":
            raise UsageError("verify energy needs --model grad3_1d")
        c = simple_closure(cfg.closure, k * k)
        traj = propagate(model, k, lift(model, X, M0, k), t)
        vals = energy_balance_series(traj, c["A"], c["B"])
        thr = 1e-8 if args.threshold is None else args.threshold
    table = Table(["t", "value"], [[float(ti), float(v)] for ti, v in zip(t, vals)])
    code = EXIT_OK if float(np.max(vals)) < thr else EXIT_VERIFY
    return table, code


def _verify_projector(args, cfg):
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if args.dim != 0 and args.dim < 2:
        raise UsageError("--dim must be 0 (random 3..8) or at least 2")
    rng = np.random.default_rng(cfg.seed)
    ep = idem = 0.0
    for _ in range(args.trials):
        d = int(rng.integers(3, 9)) if args.dim == 0 else args.dim
        ctx = random_context(rng, d)
        J = rng.normal(size=d)
        P = thermodynamic_project(ctx, J)
        g = ctx.entropy_gradient
        lhs, rhs = entropic_product(ctx, g, P), entropic_product(ctx, g, J)
        ep = max(ep, abs(lhs - rhs) / max(1.0, abs(rhs)))
        PP = thermodynamic_project(ctx, P)
        idem = max(idem, float(np.abs(PP - P).max()) / max(1.0, float(np.abs(P).max())))
    thr = 1e-12 if args.threshold is None else args.threshold
    table = Table(["metric", "value"], [["entropy_production", ep], ["idempotence", idem]])
    return table, EXIT_OK if max(ep, idem) < thr else EXIT_VERIFY


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--output", default=None, help="output path (default: stdout)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")


def _k_range(p, k_max=1.0, points=50):
    p.add_argument("--model", default="grad3_1d")
    p.add_argument("--closure", default="exact", choices=CLOSURES)
    p.add_argument("--k-min", type=float, default=0.0)
    p.add_argument("--k-max", type=float, default=k_max)
    p.add_argument("--points", type=int, default=points)
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")


def build_parser():
    parser = _Parser(prog="exacthydro", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("models", help="model catalog")
    p.add_argument("action", choices=("list",))
    _common(p)

    p = sub.add_parser("ce", help="Chapman-Enskog coefficients of the three-moment model")
    p.add_argument("--order", type=int, default=10)
    _common(p)

    p = sub.add_parser("manifold", help="lifting coefficients along a k grid")
    _k_range(p)
    p.add_argument("--k-values", default=None, help="comma-separated k list instead of a range")
    _common(p)

    p = sub.add_parser("dispersion", help="dispersion relation along a k grid")
    _k_range(p, k_max=5.0, points=200)
    _common(p)

    p = sub.add_parser("viscosity", help="nonlinear viscosity factor R(g)")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--g-min", type=float, default=-2.0)
    p.add_argument("--g-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--method", choices=("auto", "closed_form", "ode", "beta_expansion"), default="auto")
    p.add_argument("--burnett-truncation", action="store_true")
    _common(p)

    p = sub.add_parser("verify", help="verification oracles")
    p.add_argument("check", choices=("defect", "energy", "diagram", "projector"))
    p.add_argument("--model", default="grad3_1d")
    p.add_argument("--closure", default="exact", choices=CLOSURES)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--macro", default=None, help="comma-separated complex macro amplitudes")
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--t-points", type=int, default=101)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--dim", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    return parser


def _config(args):
    kw = dict(subcommand=args.command, fmt=args.fmt, output=args.output)
    for name in ("model", "closure", "k_min", "k_max", "points", "spacing", "seed"):
        if hasattr(args, name) and getattr(args, name) is not None:
            kw[name] = getattr(args, name)
    if args.command not in ("manifold", "dispersion"):
        kw.pop("k_min", None), kw.pop("k_max", None), kw.pop("points", None)
    return RunConfig(**kw)


_COMMANDS = {
    "models": _cmd_models,
    "ce": _cmd_ce,
    "manifold": _cmd_manifold,
    "dispersion": _cmd_dispersion,
    "viscosity": _cmd_viscosity,
    "verify": _cmd_verify,
}


def run(argv=None) -> int:
    """Run the CLI with ``argv`` (default ``sys.argv[1:]``) and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        if getattr(args, "model", None) is not None and args.model not in MODEL_NAMES:
            build_model(args.model)  # raises CatalogError
        out, code = _COMMANDS[args.command](args, cfg)
    except (UsageError, CatalogError, PreconditionError, DomainError) as exc:
        print(f"exacthydro: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, SingularityError, ExactHydroError) as exc:
        print(f"exacthydro: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    text = out.render(cfg.fmt) if isinstance(out, Table) else out
    _emit(text, cfg.output)
    if code == EXIT_VERIFY:
        print("exacthydro: verification threshold violated", file=sys.stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
