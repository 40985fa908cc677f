"""``tomoforge`` command-line interface.

Exit codes: 0 success, 1 selftest failure, 2 invalid input (error JSON on
stderr), 64 usage error, 66 unreadable input file.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from ._random import generator
from .ambiguity import DiagonalState, delta_rho
from .circle import CouplingProfile, b_expectation, recover_momentum
from .config import SCHEMA_VERSION, TOL
from .coupled import CoupledConfig, build_design, observe, random_configs, recover_system
from .entropy import (LINE_FUNCTIONS, GridFunction, entropy_sum_rn, hy_check_rn,
                      random_band_limited_circle, u1_check)
from .errors import InvalidInputError, TomoforgeError
from .operators import random_density, trace_norm, validate_density
from .reconstruct import (StateOracle, finite_reconstruct, mc_reconstruct, measure,
                          projector_protocol, records_oracle)
from .serialize import dumps, matrix_from_json, matrix_to_json, record_from_json, record_to_json
from .spin import basis_function, group_entropy_check, random_band_limited
from .stochastic import StochasticMatrix, birkhoff_decompose, from_unitary
from .su_basis import build_basis, haar_sample

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_USAGE, EXIT_IO = 0, 1, 2, 64, 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class InputIOError(Exception):
    pass


# I/O helpers ------------------------------------------------------------------

def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputIOError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc}") from None


def _matrix(obj):
    if isinstance(obj, dict):
        return matrix_from_json(obj)
    try:
        return np.asarray(obj, dtype=complex)
    except (TypeError, ValueError):
        raise InvalidInputError("expected a matrix object or nested list") from None


def _write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tomoforge-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _finite_floats(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _finite_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_floats(v) for v in obj]
    return obj


def _emit(args, payload, csv_rows=None):
    if args.format == "csv":
        if csv_rows is None:
            raise InvalidInputError(f"subcommand {args.command!r} has no CSV form")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in csv_rows:
            w.writerow(row)
        text = buf.getvalue()
    else:
        payload = dict(payload)
        payload["schema"] = SCHEMA_VERSION
        text = dumps(_finite_floats(payload))
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _floats(text, name):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidInputError(f"--{name} expects comma-separated numbers, got {text!r}") from None


def _state(args, n, rng):
    if getattr(args, "state_in", None):
        return validate_density(_matrix(_read_json(args.state_in)), _tol(args)).matrix
    kind = args.state
    if kind == "random":
        return random_density(n, rng)
    if kind == "pure":
        return random_density(n, rng, rank=1)
    if kind == "maximally-mixed":
        return np.eye(n, dtype=complex) / n
    raise InvalidInputError(f"unknown state kind {kind!r}")


def _tol(args):
    return TOL.record_sum if args.tol is None else args.tol


# subcommands ------------------------------------------------------------------

def cmd_basis(args):
    b = build_basis(args.n)
    rows = [["index", "kind", "i", "j", "symmetry"]]
    roots = {}
    for k in range(len(b)):
        if k in b.root_planes:
            i, j, s = b.root_planes[k]
            roots[str(k)] = [i, j, s]
            rows.append([k, "root", i, j, s])
        else:
            rows.append([k, "cartan", "", "", ""])
    payload = {
        "N": b.N,
        "generators": [matrix_to_json(g) for g in b.generators],
        "cartan": list(b.cartan_indices),
        "roots": roots,
    }
    _emit(args, payload, rows)


def cmd_tomo_measure(args):
    rng = generator(args.seed)
    rho = validate_density(_matrix(_read_json(args.state_in)), _tol(args)).matrix
    n = rho.shape[0]
    if args.frame_in:
        u = _matrix(_read_json(args.frame_in))
    elif args.frame == "haar":
        u = haar_sample(n, rng)
    else:
        u = np.eye(n, dtype=complex)
    rec = measure(rho, u)
    _emit(args, {"record": record_to_json(rec)},
          [["m", "expectation"]] + [[m, repr(float(w))] for m, w in enumerate(rec.expectations)])


def cmd_tomo_reconstruct(args):
    rng = generator(args.seed)
    tol = _tol(args)
    truth = None
    if args.records_in:
        raw = _read_json(args.records_in)
        recs = [record_from_json(r) for r in (raw["records"] if isinstance(raw, dict) else raw)]
        n = recs[0].frame.shape[0]
        if args.protocol != "finite":
            raise InvalidInputError("recorded measurements are only supported by the finite protocol")
        rec = finite_reconstruct(records_oracle(recs), build_basis(n), tol)
    else:
        if args.state_in is None and args.n is None:
            raise InvalidInputError("give --n (with --state) or --state-in")
        truth = _state(args, args.n or 0, rng)
        n = truth.shape[0]
        oracle = StateOracle(truth)
        if args.protocol == "finite":
            rec = finite_reconstruct(oracle, build_basis(n), tol)
        elif args.protocol == "projector":
            rec = projector_protocol(oracle.projector, n, tol)
        else:
            rec = mc_reconstruct(oracle, n, args.samples, seed=rng.integers(2**63),
                                 project=True)
    payload = {"reconstruction": rec.to_json(), "protocol": args.protocol, "N": int(n)}
    if truth is not None:
        payload["state"] = matrix_to_json(truth)
        payload["error_trace_norm"] = trace_norm(rec.matrix - truth)
    _emit(args, payload, [["k", "component"]] + [[k, repr(float(x))] for k, x in enumerate(rec.bloch)])


def cmd_ambiguity(args):
    d = DiagonalState(_floats(args.weights, "weights"))
    res = delta_rho(d, budget=args.budget, seed=args.seed)
    payload = {
        "delta": res.delta,
        "diameter": res.diameter,
        "pair": [matrix_to_json(res.pair[0]), matrix_to_json(res.pair[1])],
        "budget": args.budget,
        "evaluations": res.evaluations,
        "converged": res.converged,
        "weights": [float(x) for x in d.weights],
    }
    _emit(args, payload, [["delta", "diameter", "evaluations"],
                          [repr(res.delta), repr(res.diameter), res.evaluations]])


def cmd_stochastic_decompose(args):
    raw = _read_json(args.in_path)
    if isinstance(raw, dict) and "T" in raw:
        raw = raw["T"]
    t = StochasticMatrix(np.real(_matrix(raw)))
    terms = birkhoff_decompose(t, tol=1e-9 if args.tol is None else args.tol)
    payload = {"terms": [{"weight": w, "perm": p} for w, p in terms], "N": t.dim}
    _emit(args, payload, [["weight", "perm"]] + [[repr(w), " ".join(map(str, p))] for w, p in terms])


def cmd_stochastic_from_unitary(args):
    rng = generator(args.seed)
    u = _matrix(_read_json(args.in_path)) if args.in_path else haar_sample(args.n, rng)
    t = from_unitary(u)
    payload = {"T": t.entries.tolist(), "unitary": matrix_to_json(u)}
    _emit(args, payload, [list(map(repr, row)) for row in t.entries.tolist()])


def _coupled_from_json(obj):
    try:
        n, N = int(obj["n"]), int(obj["N"])
        hs, hm = _matrix(obj["H_S"]), _matrix(obj["H_M"])
        rm = _matrix(obj["rho_M"])
        cfgs = [CoupledConfig(n, N, hs, hm, np.asarray(c["couplings"], dtype=float),
                              float(c.get("t0", 0.0)), float(c.get("T", 1.0)),
                              float(c.get("t_read", 2.0)))
                for c in obj["configs"]]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"coupled config is missing or has a malformed field: {exc}") from None
    rs = _matrix(obj["rho_S"]) if "rho_S" in obj else None
    obs = np.asarray(obj["observations"], dtype=float) if "observations" in obj else None
    return cfgs, rm, rs, obs


def cmd_coupled(args):
    rng = generator(args.seed)
    if args.config:
        cfgs, rm, rs, obs = _coupled_from_json(_read_json(args.config))
    else:
        count = args.n * args.n if args.configs is None else args.configs
        cfgs = random_configs(args.n, args.N, count, seed=int(rng.integers(2**63)))
        rm, rs, obs = random_density(args.N, rng), random_density(args.n, rng), None
    if obs is None:
        if rs is None:
            raise InvalidInputError("config needs either observations or rho_S to simulate them")
        obs = observe(cfgs, rs, rm)
    design = build_design(cfgs, rm)
    rec = recover_system(design, obs, full=not args.partial)
    payload = rec.to_json()
    if rs is not None and rec.rho_S is not None:
        payload["error_trace_norm"] = trace_norm(rec.rho_S - rs)
    if rec.rho_S is None:
        payload["determined"] = rec.determined.tolist()
        payload["determined_values"] = rec.determined_values.tolist()
    _emit(args, payload)


def cmd_circle(args):
    profile = CouplingProfile(args.profile, args.lambda0, args.T)
    system = _floats(args.weights, "weights") if args.weights else args.n
    traj = b_expectation(profile, system, args.t_end, args.h)
    payload = {"trajectory": traj.to_json(stride=args.stride),
               "profile": {"family": profile.family, "lambda0": profile.lambda0, "T": profile.T}}
    try:
        payload["recovery"] = recover_momentum(traj).to_json()
    except TomoforgeError as exc:
        payload["recovery"] = exc.to_dict()
    if args.format == "csv":
        buf = io.StringIO()
        traj.write_csv(buf, stride=args.stride)
        rows = list(csv.reader(io.StringIO(buf.getvalue())))
        _emit(args, payload, rows)
    else:
        _emit(args, payload)


def cmd_entropy(args):
    if args.domain == "rn":
        if args.fn not in LINE_FUNCTIONS:
            raise InvalidInputError(f"--fn must be one of {sorted(LINE_FUNCTIONS)} on the line")
        psi = GridFunction.on_line(LINE_FUNCTIONS[args.fn], args.L, args.grid)
        hy = hy_check_rn(psi, args.p)
        ent = entropy_sum_rn(psi)
        payload = {"hy_slack": hy.slack, "hy_eps": hy.eps, "kappa": hy.kappa,
                   "S_x": ent.S_x, "S_p": ent.S_p, "bound": ent.bound, "dF_dq": ent.dF_dq}
    elif args.domain == "circle":
        rng = generator(args.seed)
        if args.fn == "random":
            phi = random_band_limited_circle(args.grid, rng)
        elif args.fn == "mode":
            phi = GridFunction.on_circle(lambda t: np.exp(1j * t), args.grid)
        elif args.fn == "pair":
            phi = GridFunction.on_circle(lambda t: (1 + np.exp(1j * t)) / math.sqrt(2), args.grid)
        else:
            raise InvalidInputError("--fn must be random, mode or pair on the circle")
        r = u1_check(phi, args.p)
        payload = {"hy_slack": r.hy_slack, "entropy_slack": r.entropy_slack,
                   "S_phi": r.S_phi, "S_coeff": r.S_coeff, "eps": r.eps}
    else:
        rng = generator(args.seed)
        if args.fn == "random":
            f = random_band_limited(args.jmax, rng)
        elif args.fn == "basis":
            f = basis_function(args.jmax, 0, 0)
        else:
            raise InvalidInputError("--fn must be random or basis on SU(2)")
        r = group_entropy_check(f, args.jmax)
        payload = {"slack": r.slack, "weighted_slack": r.weighted_slack,
                   "function_entropy": r.function_entropy,
                   "coefficient_entropy": r.coefficient_entropy,
                   "block_entropy": r.block_entropy, "refine_error": r.refine_error}
    payload["domain"] = args.domain
    _emit(args, payload)


def cmd_selftest(args):
    from .selftest import run

    results = run(args.seed)
    _emit(args, {"checks": results, "ok": all(r["ok"] for r in results)},
          [["name", "value", "limit", "ok"]] + [[r["name"], r["value"], r["limit"], r["ok"]] for r in results])
    return EXIT_OK if all(r["ok"] for r in results) else EXIT_FAIL


# parser -----------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    common.add_argument("--tol", type=float, default=None, help="override the validation tolerance")
    common.add_argument("--out", default=None, help="write here (atomically) instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = _Parser(prog="tomoforge", description="Tomography, lift ambiguity and entropic checks.")
    p.add_argument("--version", action="version", version=f"tomoforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("basis", parents=[common], help="su(N) generator basis")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_basis)

    tomo = sub.add_parser("tomo", help="measure and reconstruct states")
    tsub = tomo.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = tsub.add_parser("measure", parents=[common])
    s.add_argument("--state-in", required=True)
    s.add_argument("--frame-in")
    s.add_argument("--frame", choices=("identity", "haar"), default="identity")
    s.set_defaults(func=cmd_tomo_measure)
    s = tsub.add_parser("reconstruct", parents=[common])
    s.add_argument("--n", type=int)
    s.add_argument("--protocol", choices=("finite", "projector", "mc"), default="finite")
    s.add_argument("--state", choices=("random", "pure", "maximally-mixed"), default="random")
    s.add_argument("--state-in")
    s.add_argument("--records-in")
    s.add_argument("--samples", type=int, default=100000)
    s.set_defaults(func=cmd_tomo_reconstruct)

    s = sub.add_parser("ambiguity", parents=[common], help="lift ambiguity of a diagonal state")
    s.add_argument("--weights", required=True)
    s.add_argument("--budget", type=int, default=10000)
    s.set_defaults(func=cmd_ambiguity)

    st = sub.add_parser("stochastic", help="doubly stochastic maps")
    ssub = st.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = ssub.add_parser("decompose", parents=[common])
    s.add_argument("--in", dest="in_path", required=True)
    s.set_defaults(func=cmd_stochastic_decompose)
    s = ssub.add_parser("from-unitary", parents=[common])
    s.add_argument("--in", dest="in_path")
    s.add_argument("--n", type=int, default=3)
    s.set_defaults(func=cmd_stochastic_from_unitary)

    s = sub.add_parser("coupled", parents=[common], help="system recovery through an apparatus")
    s.add_argument("--config")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--N", type=int, default=2)
    s.add_argument("--configs", type=int, default=None, help="coupling choices (default n^2)")
    s.add_argument("--partial", action="store_true", help="report the determined subspace instead of failing")
    s.set_defaults(func=cmd_coupled)

    s = sub.add_parser("circle", parents=[common], help="rotor-oscillator model")
    s.add_argument("--profile", choices=("rect", "bump", "constant"), default="bump")
    s.add_argument("--lambda0", type=float, default=0.8)
    s.add_argument("--T", type=float, default=5.0)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--weights", help="p_0,p_1,... instead of a single level")
    s.add_argument("--h", type=float, default=1e-3)
    s.add_argument("--t-end", dest="t_end", type=float, default=15.0)
    s.add_argument("--stride", type=int, default=100, help="keep every k-th sample in the output")
    s.set_defaults(func=cmd_circle)

    s = sub.add_parser("entropy", parents=[common], help="Hausdorff-Young and entropy checks")
    s.add_argument("domain", choices=("rn", "circle", "su2"))
    s.add_argument("--p", type=float, default=1.5)
    s.add_argument("--grid", type=int, default=4096)
    s.add_argument("--L", type=float, default=20.0)
    s.add_argument("--fn", default=None)
    s.add_argument("--jmax", type=float, default=2.0)
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    s.set_defaults(func=cmd_selftest)
    return p


_DEFAULT_FN = {"rn": "gaussian", "circle": "random", "su2": "random"}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if getattr(args, "command", None) == "entropy" and args.fn is None:
        args.fn = _DEFAULT_FN[args.domain]
    try:
        code = args.func(args)
    except InputIOError as exc:
        sys.stderr.write(dumps({"error": "io", "message": str(exc), "schema": SCHEMA_VERSION}))
        return EXIT_IO
    except TomoforgeError as exc:
        d = exc.to_dict()
        d["schema"] = SCHEMA_VERSION
        sys.stderr.write(dumps(_finite_floats(d)))
        return EXIT_INVALID
    except (ValueError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(dumps({"error": "invalid-input", "message": str(exc), "schema": SCHEMA_VERSION}))
        return EXIT_INVALID
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
