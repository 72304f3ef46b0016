"""``perm`` command line: one subcommand per library operation, JSON or CSV reports.

Every report carries the resolved configuration and library version. The only
fields that differ between identical runs are ``started_at`` and ``finished_at``.
Exit codes: 0 ok, 1 failed invariant, 2 bad input, 3 certificate failure,
4 size limit.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .bounds import BETA_STAR, approximate_permanent
from .errors import (CertificateError, DegenerateInstanceError, InfeasibleSmoothnessError,
                     NotHermitianError, NotPSDError, SizeLimitError)
from .gadgets import build_gadget, smooth_vector_bound_check
from .io import MatrixFormatError, dumps, matrix_to_dict, read_matrix, write_matrix
from .linalg import VectorSystem
from .logvalue import LogValue
from .norm2q import round_2q, solve_sdp_2q
from .permanent import permanent_naive, permanent_ryser, wick_estimate, wick_sphere_estimate
from .rounding import interpolated_rounding, per_row_guarantee, sharp_per_row_guarantee
from .sdp import SdpConfig, rescale, solve_sdp, verify_optimality
from .verify import run_all, run_gap

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_CERT, EXIT_SIZE = 0, 1, 2, 3, 4
TIMESTAMP_FIELDS = ("started_at", "finished_at")


class RunFailed(Exception):
    """A check ran to completion but an asserted invariant did not hold."""

    def __init__(self, result):
        super().__init__("invariant failed")
        self.result = result


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _log_fields(lv: LogValue, base10: bool, prefix: str = "") -> dict:
    out = {f"{prefix}log_value": lv.log_magnitude, f"{prefix}sign": lv.sign}
    if lv.phase:
        out[f"{prefix}phase"] = lv.phase
    if base10:
        out[f"{prefix}log10_value"] = lv.log10()
    return out


def _vectors(path) -> VectorSystem:
    m, field = read_matrix(path)
    return VectorSystem(m, field)


def _sdp_config(args) -> SdpConfig:
    return SdpConfig(tol=args.tol, max_iters=args.max_iters, multiplicative=not args.no_multiplicative)


# subcommands -------------------------------------------------------------

def cmd_exact(args) -> dict:
    m, _ = read_matrix(args.input)
    A = m @ m.conj().T if args.vectors else m
    if A.shape[0] != A.shape[1]:
        raise MatrixFormatError(f"exact needs a square matrix (or --vectors), got {A.shape}")
    fn = permanent_naive if args.method == "naive" else permanent_ryser
    return {"n": int(A.shape[0]), "method": args.method, **_log_fields(fn(A), args.base10)}


def cmd_wick(args) -> dict:
    V = _vectors(args.input)
    est = (wick_sphere_estimate if args.sphere else wick_estimate)(V, args.samples, args.seed)
    out = {"n": V.n, "d": V.d, "samples": args.samples,
           **_log_fields(est.estimate, args.base10),
           "std_error": est.std_error, "log_std_error": est.log_std_error}
    if V.n <= args.exact_max:
        out.update(_log_fields(permanent_ryser(V.gram), args.base10, "exact_"))
    return out


def cmd_sdp(args) -> dict:
    V = _vectors(args.input)
    sol = solve_sdp(V, _sdp_config(args))
    resc = rescale(V, sol)
    opt = verify_optimality(resc.V_tilde, sol)
    return {"n": V.n, "d": V.d, **sol.to_dict(), "log_per_D": resc.log_per_D.log_magnitude,
            "optimality": opt.to_dict()}


def cmd_bounds(args) -> dict:
    V = _vectors(args.input)
    rep = approximate_permanent(V, _sdp_config(args))
    out = rep.to_dict()
    if args.base10:
        for key in ("log_lower", "log_upper", "log_estimate"):
            out[key.replace("log_", "log10_")] = out[key] / math.log(10)
    if args.exact and V.n <= 24:
        exact = permanent_ryser(V.gram).log_magnitude
        out["log_exact"] = exact
        out["sandwich_ok"] = bool(rep.log_lower - 1e-6 <= exact <= rep.log_upper + 1e-6)
        if not out["sandwich_ok"]:
            raise RunFailed(out)
    return out


def cmd_round(args) -> dict:
    V = _vectors(args.input)
    sol = solve_sdp(V, _sdp_config(args))
    Vt = rescale(V, sol).V_tilde
    batch = interpolated_rounding(Vt, sol, args.beta, args.samples, args.seed)
    logs = batch.log_r_values
    rows = batch.mean_row_log
    trace = float(np.sum(Vt.row_norms_sq))
    finite = logs[np.isfinite(logs)]
    k = int(np.argmax(logs))
    return {
        "n": V.n,
        "beta": args.beta,
        "samples": [{"log_r_value": float(v)} for v in logs],
        "summary": {
            "best": float(logs[k]),
            "mean": float(finite.mean()) if finite.size else -math.inf,
            "mean_row_log": float(rows.mean()),
            "mean_row_log_se": float(rows.std(ddof=1) / math.sqrt(rows.size)) if rows.size > 1 else 0.0,
            "guarantee_per_row": per_row_guarantee(V.n, trace, args.beta),
            "sharp_guarantee_per_row": sharp_per_row_guarantee(Vt, args.beta),
            "trace_ratio": trace / V.n,
        },
        "best_witness": [[float(z.real), float(z.imag)] for z in batch.x[k]],
    }


def cmd_norm2q(args) -> dict:
    A, field = read_matrix(args.input)
    fld = args.field or field
    sol = solve_sdp_2q(A, args.q, SdpConfig(tol=args.tol if args.tol is not None else 1e-8,
                                            max_iters=args.max_iters,
                                            multiplicative=not args.no_multiplicative))
    rep = round_2q(A, sol, args.samples, args.seed, fld)
    return {
        "q": args.q,
        "field": fld,
        "sdp_value": sol.value,
        "sdp_value_upper": sol.value_upper,
        "fw_gap": sol.fw_gap,
        "converged": sol.converged,
        "best_witness_value": rep.best_ratio,
        "gamma_q": rep.gamma_q,
        "mean_ratio": rep.mean_ratio,
        "mean_ratio_se": rep.mean_ratio_se,
        "f_ratio": rep.f_ratio,
        "f_ratio_se": rep.f_ratio_se,
        "best_witness": [[float(z.real), float(z.imag)] for z in rep.best_witness],
    }


def cmd_gadget(args) -> dict:
    if args.action == "check":
        return smooth_vector_bound_check(args.k, args.field, args.p, args.delta, args.trials,
                                         args.seed).to_dict()
    E = build_gadget(args.k, args.field)
    out = {"k": E.k, "field": E.field, "rows": E.d_k, "norm_22": E.norm_22()}
    if args.matrix_out:
        write_matrix(args.matrix_out, E.rows, E.field)
        out["matrix_out"] = args.matrix_out
    else:
        out["matrix"] = matrix_to_dict(E.rows, E.field)
    return out


def cmd_verify(args) -> dict:
    checks = run_gap() if args.which == "gap" else run_all(args.seed)
    out = {"checks": checks, "all_passed": all(c["passed"] for c in checks)}
    if not out["all_passed"]:
        raise RunFailed(out)
    return out


COMMANDS = {
    "exact": cmd_exact, "wick": cmd_wick, "sdp": cmd_sdp, "bounds": cmd_bounds,
    "round": cmd_round, "norm2q": cmd_norm2q, "gadget": cmd_gadget, "verify": cmd_verify,
}


# parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed; PERM_SEED overrides")
    common.add_argument("--threads", type=int, default=None, help="BLAS threads (default: all cores)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="report path (default stdout)")
    common.add_argument("--base10", action="store_true", help="also report log10 values")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--tol", type=float, default=None)
    solver.add_argument("--max-iters", type=int, default=50_000)
    solver.add_argument("--no-multiplicative", action="store_true")

    p = argparse.ArgumentParser(prog="perm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"perm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("exact", parents=[common], help="exact permanent (Ryser or naive)")
    s.add_argument("--input", required=True)
    s.add_argument("--method", choices=("ryser", "naive"), default="ryser")
    s.add_argument("--vectors", action="store_true", help="input holds V; use A = V V^dagger")

    s = sub.add_parser("wick", parents=[common], help="Monte-Carlo Wick estimate of per(V V^dagger)")
    s.add_argument("--input", required=True)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--sphere", action="store_true", help="sample the sphere instead of the Gaussian")
    s.add_argument("--exact-max", type=int, default=20, help="include Ryser value up to this n")

    s = sub.add_parser("sdp", parents=[common, solver], help="solve the log-concave relaxation")
    s.add_argument("--input", required=True)

    s = sub.add_parser("bounds", parents=[common, solver], help="certified lower/upper bounds")
    s.add_argument("--input", required=True)
    s.add_argument("--exact", action="store_true", help="also compute Ryser and check the sandwich")

    s = sub.add_parser("round", parents=[common, solver], help="interpolated rounding witnesses")
    s.add_argument("--input", required=True)
    s.add_argument("--beta", type=float, default=BETA_STAR)
    s.add_argument("--samples", type=int, default=100)

    s = sub.add_parser("norm2q", parents=[common, solver], help="2->q relaxation and rounding")
    s.add_argument("--input", required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--field", choices=("R", "C"), default=None)

    s = sub.add_parser("gadget", parents=[common], help="build a gadget or check smooth vectors")
    s.add_argument("action", nargs="?", choices=("build", "check"), default="build")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--field", choices=("R", "C"), default="C")
    s.add_argument("--p", type=float, default=0.0)
    s.add_argument("--delta", type=float, default=0.5)
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--matrix-out", default=None, help="write the gadget in matrix format")

    s = sub.add_parser("verify", parents=[common], help="inequality grids and analytic checks")
    s.add_argument("which", nargs="?", choices=("gap", "all"), default="all")
    return p


def resolve_config(args) -> dict:
    env = os.environ.get("PERM_SEED")
    if env is not None:
        try:
            args.seed = int(env)
        except ValueError:
            raise MatrixFormatError(f"PERM_SEED must be an integer, got {env!r}")
        source = "env"
    else:
        source = "flag"
    if not 0 <= args.seed < 2 ** 64:
        raise MatrixFormatError("seed must fit in 64 bits")
    if args.threads is None:
        args.threads = os.cpu_count() or 1
    cfg = {k: v for k, v in sorted(vars(args).items())}
    cfg["seed_source"] = source
    return cfg


def _flatten(result: dict) -> list[dict]:
    if "checks" in result:
        rows = result["checks"]
    elif "samples" in result and isinstance(result["samples"], list):
        rows = [dict(result.get("summary", {}), n=result["n"], beta=result["beta"])]
    else:
        rows = [result]
    return [{k: v for k, v in r.items() if not isinstance(v, (dict, list))} for r in rows]


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report) + "\n"
    rows = _flatten(report["result"])
    buf = _io.StringIO()
    keys = list(dict.fromkeys(k for r in rows for k in r))
    w = csv.DictWriter(buf, fieldnames=keys, restval="", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_INPUT
    started = _now()
    report = {"tool": "perm", "version": __version__, "command": args.command}
    status, code, result = "ok", EXIT_OK, None
    try:
        report["config"] = resolve_config(args)
        with threadpool_limits(limits=args.threads):
            result = COMMANDS[args.command](args)
    except RunFailed as exc:
        status, code, result = "failed", EXIT_FAILED, exc.result
    except (MatrixFormatError, NotHermitianError, NotPSDError, FileNotFoundError) as exc:
        status, code, result = "failed", EXIT_INPUT, {"error": str(exc)}
    except CertificateError as exc:
        status, code, result = "failed", EXIT_CERT, {"error": str(exc)}
    except SizeLimitError as exc:
        status, code, result = "failed", EXIT_SIZE, {"error": str(exc)}
    except (DegenerateInstanceError, InfeasibleSmoothnessError, ValueError) as exc:
        status, code, result = "failed", EXIT_FAILED, {"error": str(exc)}
    report.setdefault("config", {})
    report["status"] = status
    report["exit_code"] = code
    report["result"] = result
    report["started_at"] = started
    report["finished_at"] = _now()
    fmt = args.format if status == "ok" or "error" not in (result or {}) else "json"
    _emit(render(report, fmt), args.out)
    if status != "ok":
        msg = (result or {}).get("error", "invariant failed") if isinstance(result, dict) else "failed"
        print(f"perm {args.command}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
