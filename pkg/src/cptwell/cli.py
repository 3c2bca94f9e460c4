"""Command-line interface: deterministic JSON/CSV access to every module.

Subcommands:

* ``spectrum``      eigenvalues and reality classification of one H(lambda, mu)
* ``scan``          reality domain over a coupling grid (line or product grid)
* ``pseudometrics`` basis of all symmetric solutions of H^T X = X H
* ``metric``        spectrally assembled metric Theta on the mu = +/-lambda lines
* ``charge``        spectral charge vs closed form on the mu = +lambda line
* ``verify``        residual report of the closed-form operator triple
* ``continuum``     scaled-level convergence study over a size ladder

Exit status: 0 success; 1 validation/usage error; 2 numerical failure.
Identical invocations produce byte-identical output: fixed key order, fixed
row order, floats via shortest round-trip repr, booleans as lowercase
true/false, and no timestamps.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import continuum, dieudonne, quasihermitian, spectra
from .errors import CptwellError, ValidationError
from .hamiltonian import CouplingPair, build

FORMATS = ("json", "csv")
LINES = ("mu=lambda", "mu=-lambda")
CONTINUUM_DEFAULT_SIZE = 160


class _UsageError(Exception):
    """Raised by the parser instead of argparse's SystemExit(2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Validated invocation: one subcommand plus its parameters."""

    command: str
    n: int
    lam: float
    mu: float
    grid: tuple
    grid_spec: str
    line: str
    levels: int
    tol: float
    fmt: str
    output: str


def parse_grid(spec):
    """Grid values lo + k*step covering [lo, hi], from a lo:hi:step string."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid must be lo:hi:step, got {spec!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"grid must be three numbers lo:hi:step, got {spec!r}") from None
    if not (np.isfinite(lo) and np.isfinite(hi) and np.isfinite(step)):
        raise ValidationError(f"grid bounds must be finite, got {spec!r}")
    if step <= 0.0:
        raise ValidationError(f"grid step must be positive, got {step}")
    if hi < lo:
        raise ValidationError(f"grid upper bound {hi} is below lower bound {lo}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(lo + k * step for k in range(count))


def _build_parser():
    parser = _Parser(
        prog="cptwell",
        description="Discrete square well with boundary couplings: spectra, "
        "reality domain, pseudometrics, metric/charge construction, "
        "hermitization, continuum limit.",
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, size_default=None, with_couplings=True, with_tol=False):
        if size_default is None:
            p.add_argument("-N", "--size", dest="n", type=int, required=True,
                           help="matrix dimension n")
        else:
            p.add_argument("-N", "--size", dest="n", type=int, default=size_default,
                           help=f"matrix dimension n (default {size_default})")
        if with_couplings:
            p.add_argument("--lambda", dest="lam", type=float, required=True,
                           help="left boundary coupling")
            p.add_argument("--mu", dest="mu", type=float, default=None,
                           help="right boundary coupling (default: lambda)")
        if with_tol:
            p.add_argument("--tol", dest="tol", type=float, default=None,
                           help="absolute reality tolerance override")
        p.add_argument("--format", dest="fmt", choices=FORMATS, default="json",
                       help="output format (default json)")
        p.add_argument("--output", dest="output", default=None,
                       help="write to this path instead of stdout")

    p = sub.add_parser("spectrum", help="eigenvalues of one H(lambda, mu)")
    common(p, with_tol=True)

    p = sub.add_parser("scan", help="reality classification over a coupling grid")
    p.add_argument("-N", "--size", dest="n", type=int, required=True,
                   help="matrix dimension n")
    p.add_argument("--grid", dest="grid_spec", required=True,
                   help="coupling grid lo:hi:step")
    p.add_argument("--line", dest="line", choices=LINES, default=None,
                   help="restrict to a coupling line (default: full product grid)")
    p.add_argument("--tol", dest="tol", type=float, default=None,
                   help="absolute reality tolerance override")
    p.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
    p.add_argument("--output", dest="output", default=None)

    p = sub.add_parser("pseudometrics", help="basis of solutions of H^T X = X H")
    common(p)

    p = sub.add_parser("metric", help="spectrally assembled metric Theta")
    common(p)

    p = sub.add_parser("charge", help="spectral charge vs closed form")
    common(p)

    p = sub.add_parser("verify", help="closed-form triple residual report")
    common(p)

    p = sub.add_parser("continuum", help="scaled-level convergence study")
    common(p, size_default=CONTINUUM_DEFAULT_SIZE, with_couplings=False)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0,
                   help="boundary coupling held fixed along the ladder (default 0)")
    p.add_argument("--levels", dest="levels", type=int, default=1,
                   help="number of lowest levels to track (default 1)")

    return parser


def _config_from(ns):
    command = ns.command
    if command is None:
        raise ValidationError("a subcommand is required (see --help)")
    n = int(ns.n)
    if n < 2:
        raise ValidationError(f"size must be at least 2, got {n}")
    lam = getattr(ns, "lam", None)
    mu = getattr(ns, "mu", None)
    if lam is not None:
        lam = float(lam)
    if mu is None:
        mu = lam
    else:
        mu = float(mu)
    grid_spec = getattr(ns, "grid_spec", None)
    grid = parse_grid(grid_spec) if grid_spec is not None else None
    return RunConfig(
        command=command,
        n=n,
        lam=lam,
        mu=mu,
        grid=grid,
        grid_spec=grid_spec,
        line=getattr(ns, "line", None),
        levels=int(getattr(ns, "levels", 1)),
        tol=getattr(ns, "tol", None),
        fmt=ns.fmt,
        output=ns.output,
    )


def _cmd_spectrum(cfg):
    h = build(cfg.n, CouplingPair(cfg.lam, cfg.mu))
    spec = spectra.spectrum_of(h, reality_tol=cfg.tol)
    payload = {"n": cfg.n, "lambda": cfg.lam, "mu": cfg.mu}
    payload.update(spec.to_dict())
    rows = [(k + 1, v["re"], v["im"]) for k, v in enumerate(payload["values"])]
    return payload, ("k", "re", "im"), rows


def _cmd_scan(cfg):
    grid = np.array(cfg.grid)
    if cfg.line is None:
        scan = spectra.scan_domain(cfg.n, grid, grid, reality_tol=cfg.tol)
    else:
        sign = 1 if cfg.line == "mu=lambda" else -1
        scan = spectra.scan_line(cfg.n, grid, sign, reality_tol=cfg.tol)
    rows = list(scan.rows())
    cells = [
        {"lambda": r[0], "mu": r[1], "all_real": r[2], "complex_pairs": r[3],
         "min_gap": r[4]}
        for r in rows
    ]
    payload = {
        "n": cfg.n,
        "grid": cfg.grid_spec,
        "line": cfg.line,
        "cells": cells,
        "diagnostics": list(scan.diagnostics),
    }
    return payload, ("lambda", "mu", "all_real", "complex_pairs", "min_gap"), rows


def _cmd_pseudometrics(cfg):
    h = build(cfg.n, CouplingPair(cfg.lam, cfg.mu))
    basis = dieudonne.kernel_basis(h)
    payload = {"n": cfg.n, "lambda": cfg.lam, "mu": cfg.mu}
    payload.update(basis.to_dict())
    rows = []
    for e, element in enumerate(payload["elements"]):
        res = element["residual"]
        for i, row in enumerate(element["matrix"]):
            for j, value in enumerate(row):
                rows.append((e, i, j, value, res))
    return payload, ("element", "row", "col", "value", "residual"), rows


def _require_line(cfg, allow_weighted):
    if cfg.mu == cfg.lam:
        return "exchange"
    if allow_weighted and cfg.mu == -cfg.lam:
        return "weighted"
    allowed = "mu = +lambda or mu = -lambda" if allow_weighted else "mu = lambda"
    raise ValidationError(
        f"this subcommand needs {allowed}; got lambda={cfg.lam}, mu={cfg.mu}"
    )


def _cmd_metric(cfg):
    variant = _require_line(cfg, allow_weighted=True)
    h = build(cfg.n, CouplingPair(cfg.lam, cfg.mu))
    p = dieudonne.closed_form(cfg.n, cfg.lam, variant).matrix
    system = quasihermitian.biorthogonalize(h)
    nu = quasihermitian.decompose_inverse_pseudometric(p, system)
    asm = quasihermitian.assemble_charge_spectral(system, nu)
    theta = p @ asm.c
    smallest = float(np.linalg.eigvalsh(0.5 * (theta + theta.T))[0])
    payload = {
        "n": cfg.n,
        "lambda": cfg.lam,
        "mu": cfg.mu,
        "pseudometric": variant,
        "nu": [float(v) for v in asm.nu],
        "kappa_sq": [float(v) for v in asm.kappa_sq],
        "theta": [[float(v) for v in row] for row in theta],
        "smallest_eigenvalue": smallest,
        "positive": bool(smallest > 0.0),
        "residual_theta": dieudonne.residual(h, theta),
    }
    rows = [
        (i, j, float(theta[i, j]))
        for i in range(cfg.n)
        for j in range(cfg.n)
    ]
    return payload, ("row", "col", "value"), rows


def _cmd_charge(cfg):
    _require_line(cfg, allow_weighted=False)
    h = build(cfg.n, CouplingPair(cfg.lam, cfg.lam))
    triple = quasihermitian.closed_form_operators(cfg.n, cfg.lam)
    system = quasihermitian.biorthogonalize(h)
    nu = quasihermitian.decompose_inverse_pseudometric(triple.p, system)
    asm = quasihermitian.assemble_charge_spectral(system, nu)
    diff = float(np.abs(asm.c - triple.c).max())
    payload = {
        "n": cfg.n,
        "lambda": cfg.lam,
        "max_difference": diff,
        "residual_involution_closed": float(triple.residual_involution),
        "residual_involution_spectral": float(
            np.abs(asm.c @ asm.c - np.eye(cfg.n)).max()
        ),
        "c_spectral": [[float(v) for v in row] for row in asm.c],
        "c_closed": [[float(v) for v in row] for row in triple.c],
    }
    rows = [
        (i, j, float(asm.c[i, j]), float(triple.c[i, j]))
        for i in range(cfg.n)
        for j in range(cfg.n)
    ]
    return payload, ("row", "col", "spectral", "closed"), rows


def _cmd_verify(cfg):
    _require_line(cfg, allow_weighted=False)
    h = build(cfg.n, CouplingPair(cfg.lam, cfg.lam))
    triple = quasihermitian.closed_form_operators(cfg.n, cfg.lam)
    report = quasihermitian.symmetry_report(h, triple)
    payload = {"n": cfg.n, "lambda": cfg.lam}
    payload.update(report.to_dict())
    rows = [(key, value) for key, value in report.to_dict().items()]
    return payload, ("quantity", "value"), rows


def _cmd_continuum(cfg):
    if cfg.n % 8 != 0 or cfg.n < 16:
        raise ValidationError(
            f"continuum needs a ladder top divisible by 8 and at least 16, got {cfg.n}"
        )
    sizes = (cfg.n // 8, cfg.n // 4, cfg.n // 2, cfg.n)
    study = continuum.convergence_study(sizes, cfg.lam, cfg.levels)
    return study.to_dict(), ("n", "k", "scaled_energy", "richardson_order"), list(study.rows())


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "scan": _cmd_scan,
    "pseudometrics": _cmd_pseudometrics,
    "metric": _cmd_metric,
    "charge": _cmd_charge,
    "verify": _cmd_verify,
    "continuum": _cmd_continuum,
}


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render(payload, header, rows, fmt):
    """Serialize one subcommand result to its final output text."""
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def dispatch(cfg):
    """Run one validated config and return the rendered output text."""
    payload, header, rows = _COMMANDS[cfg.command](cfg)
    return render(payload, header, rows, cfg.fmt)


def _absorb_grid_value(argv):
    """Join '--grid LO:HI:STEP' into '--grid=...' so a leading minus parses."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--grid":
            val = next(it, None)
            out.append(tok if val is None else f"--grid={val}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = _build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = parser.parse_args(_absorb_grid_value(argv))
        cfg = _config_from(ns)
        text = dispatch(cfg)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"cptwell: invalid request: {exc}", file=sys.stderr)
        return 1
    except CptwellError as exc:
        print(f"cptwell: computation failed: {exc}", file=sys.stderr)
        return 2
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
