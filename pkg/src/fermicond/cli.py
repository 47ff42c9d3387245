"""Command-line front end.

Every command prints a single JSON report on stdout and logs to stderr.
Exit status: 0 when every residual is within its tolerance, 1 otherwise,
2 for input errors.
"""

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import bipartite as bp
from . import fock
from . import linalg as la
from .conditioning import (
    conditional_bounds,
    conditional_symbol,
    exponential_conditioner,
    normalized_exp_conditioner_fock,
    oracle_conditional_symbol,
)
from .cp_maps import minimal_model, pullback_symbol
from .errors import FermiCondError
from .jsonio import (
    block_from_json,
    conditioner_from_json,
    density_from_json,
    load_json,
    matrix_to_json,
)
from .suites import Residual, run_suite
from .symbols import DEFAULT_TOL, Tolerances, assemble, trim

logger = logging.getLogger("fermicond")


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def _spectrum(m) -> list:
    return np.linalg.eigvalsh(la.hermitize(m)).tolist()


def make_report(command, inputs, results, residuals, seed=0, elapsed_ms=0.0) -> dict:
    residuals = sorted(residuals, key=lambda r: r.name)
    return {
        "command": command,
        "inputs_digest": _digest(inputs),
        "results": results,
        "residuals": [{"name": r.name, "value": r.value, "tol": r.tol, "pass": r.passed}
                      for r in residuals],
        "pass": all(r.passed for r in residuals),
        "seed": seed,
        "elapsed_ms": elapsed_ms,
    }


def _tolerances(args) -> Tolerances:
    return Tolerances(herm=args.tol_herm, psd=args.tol_psd, det=args.tol_det, oracle=args.tol_oracle)


def _tol_dict(tol: Tolerances) -> dict:
    return {"herm": tol.herm, "psd": tol.psd, "det": tol.det, "oracle": tol.oracle}


def cmd_verify(args, tol):
    inputs = {"suite": args.suite, "modes": args.modes, "trials": args.trials,
              "seed": args.seed, "tol": _tol_dict(tol)}
    results, residuals = {}, []
    for res in run_suite(args.suite, args.modes, args.trials, args.seed, tol):
        logger.info("suite %s: %s", res.name, "pass" if res.passed else "FAIL")
        results[res.name] = dict(res.results, passed=res.passed)
        residuals.extend(res.residuals)
    return inputs, results, residuals


def _load_block(path):
    raw = load_json(path)
    return raw, block_from_json(raw)


def cmd_bounds(args, tol):
    raw, block = _load_block(_need(args.block, "--block"))
    assemble(block, tol)
    trimmed, _ = trim(block, tol)
    bounds = conditional_bounds(trimmed, tol)
    a = la.hermitize(block.a)
    order = max(0.0, -la.min_eig(a - bounds.lower), -la.min_eig(bounds.upper - a))
    results = {
        "lower": matrix_to_json(bounds.lower),
        "upper": matrix_to_json(bounds.upper),
        "lower_spectrum": _spectrum(bounds.lower),
        "upper_spectrum": _spectrum(bounds.upper),
        "retained_dim": trimmed.d2,
    }
    return {"block": raw}, results, [Residual("bounds.order", order, tol.psd)]


def cmd_condition(args, tol):
    raw, block = _load_block(_need(args.block, "--block"))
    raw_l = load_json(_need(args.l, "--l"))
    assemble(block, tol)
    cond = exponential_conditioner(block, conditioner_from_json(raw_l), tol)
    a_tilde = conditional_symbol(block, cond, tol).q
    results = {"a_tilde": matrix_to_json(a_tilde), "spectrum": _spectrum(a_tilde),
               "normalization": cond.normalization}
    residuals = []
    if block.d1 + block.d2 <= fock.max_modes() and la.min_eig(cond.l) > tol.psd:
        y = normalized_exp_conditioner_fock(block, cond, tol)
        oracle = oracle_conditional_symbol(block, y, tol).q
        residuals.append(Residual("condition.oracle", float(np.max(np.abs(oracle - a_tilde))),
                                  tol.oracle))
    else:
        logger.info("oracle cross-check skipped (too many modes or singular L)")
    return {"block": raw, "l": raw_l}, results, residuals


def cmd_model(args, tol):
    raw, block = _load_block(_need(args.block, "--block"))
    assemble(block, tol)
    trimmed, _ = trim(block, tol)
    cp = minimal_model(trimmed, tol)
    bounds = conditional_bounds(trimmed, tol)
    k = cp.target_dim
    low = pullback_symbol(cp, np.zeros((k, k)), tol).q
    up = pullback_symbol(cp, np.eye(k), tol).q
    results = {"r": matrix_to_json(cp.r), "s": matrix_to_json(cp.s), "target_dim": k}
    residuals = [
        Residual("model.lower_endpoint", la.op_norm(low - bounds.lower), 1e-10),
        Residual("model.upper_endpoint", la.op_norm(up - bounds.upper), 1e-10),
    ]
    return {"block": raw}, results, residuals


def cmd_bipartite(args, tol):
    raw = load_json(_need(args.rho, "--rho"))
    arr, dims = density_from_json(raw)
    if arr.ndim == 1:
        rho = bp.pure_density(arr, dims)
    else:
        rho = bp.density_matrix(arr, dims, tol.psd)
    n = bp.correlation_dimension(rho, tol.psd)
    results = {"dims": list(dims), "correlation_dimension": n}
    residuals = []
    if la.rank(rho.rho, tol.psd) == 1:
        w, v = np.linalg.eigh(rho.rho)
        pb = bp.schmidt(v[:, -1], dims, tol.psd)
        results["schmidt_rank"] = pb.rank
        results["schmidt_weights"] = pb.weights.tolist()
        residuals.append(Residual("bipartite.p_squared", abs(n - pb.rank**2), 0.0))
    return {"rho": raw}, results, residuals


def _need(value, flag):
    if value is None:
        raise FermiCondError(f"{flag} is required")
    return value


COMMANDS = {
    "verify": cmd_verify,
    "bounds": cmd_bounds,
    "condition": cmd_condition,
    "model": cmd_model,
    "bipartite": cmd_bipartite,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermicond", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--suite", default="all")
    parser.add_argument("--modes", type=int, default=4)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--block")
    parser.add_argument("--l")
    parser.add_argument("--rho")
    parser.add_argument("--out")
    parser.add_argument("--tol-herm", type=float, default=DEFAULT_TOL.herm)
    parser.add_argument("--tol-psd", type=float, default=DEFAULT_TOL.psd)
    parser.add_argument("--tol-det", type=float, default=DEFAULT_TOL.det)
    parser.add_argument("--tol-oracle", type=float, default=DEFAULT_TOL.oracle)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        tol = _tolerances(args)
        inputs, results, residuals = COMMANDS[args.command](args, tol)
    except (FermiCondError, ValueError, np.linalg.LinAlgError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        error = {"command": args.command, "error": type(exc).__name__, "message": str(exc), "pass": False}
        print(json.dumps(error))
        return 2
    elapsed = (time.perf_counter() - start) * 1e3
    report = make_report(args.command, inputs, results, residuals, args.seed, elapsed)
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
