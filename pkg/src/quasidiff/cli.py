"""Command-line front end driven by a JSON operator file.

Usage::

    quasidiff spectrum --spec op.json [--out eig.csv] [--format csv|json]

Subcommands: ``validate``, ``spectrum``, ``resolvent``, ``gresolvent``,
``verify``, ``compare``.  Exit status is 0 on success, 2 when ``verify``
finds a failing check and 1 on any error; errors are written to stderr as a
single JSON line.
"""

import argparse
import copy
import csv
import io
import json
import sys

import jsonschema
import numpy as np

from .coefficients import PiecewiseCoefficient
from .errors import QuasiDiffError, SchemaError
from .extensions import ExtensionSpec, matrix_from_pairs, preset
from .shinzettl import (
    ShinZettlMatrix,
    build_sturm_liouville,
    build_two_term,
    is_formally_selfadjoint,
    lagrange_adjoint,
    validate,
)
from .spectral import (
    ConstantFamily,
    MobiusFamily,
    ScanOptions,
    TabulatedFamily,
    eigenvalues_complex_box,
    eigenvalues_real_scan,
    generalized_resolvent_apply,
    resolvent_apply,
)
from .triplet import build_triplet, greens_identity_residual, odd_coefficient_relations
from .ode import solve_cauchy

TASKS = ("validate", "spectrum", "resolvent", "generalized_resolvent", "verify", "compare")
SUBCOMMANDS = {
    "validate": "validate",
    "spectrum": "spectrum",
    "resolvent": "resolvent",
    "gresolvent": "generalized_resolvent",
    "verify": "verify",
    "compare": "compare",
}

DEFAULTS = {
    "tolerances": {"rtol": 1e-10, "atol": 1e-10, "threshold": 1e-8},
    "scan": {"grid": 400, "max_eigenvalues": 200},
    "output": {"format": "csv"},
    "seed": 12345,
    "verify": {"trials": 20, "window": [-20.0, 200.0]},
    "resolvent": {"samples": 101},
}

_NUM = {"type": "number"}
_CPLX = {
    "oneOf": [
        _NUM,
        {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
    ]
}
_PIECE = {
    "type": "object",
    "properties": {
        "lo": _NUM,
        "hi": _NUM,
        "origin": _NUM,
        "coeffs": {"type": "array", "items": _CPLX, "minItems": 1},
        "singular_exponent": _NUM,
        "den": {"type": "array", "items": _CPLX, "minItems": 1},
        "terms": {"type": "array", "items": {"type": "object"}},
    },
    "required": ["lo", "hi"],
    "additionalProperties": False,
}
_COEF = {
    "oneOf": [
        _CPLX,
        {
            "type": "object",
            "properties": {"pieces": {"type": "array", "items": _PIECE, "minItems": 1}},
            "required": ["pieces"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "step": {
                    "type": "object",
                    "properties": {"at": _NUM, "left": _CPLX, "right": _CPLX},
                    "required": ["at"],
                    "additionalProperties": False,
                }
            },
            "required": ["step"],
            "additionalProperties": False,
        },
    ]
}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _CPLX}}
_SIGN = {"enum": ["plus", "minus"]}
_WINDOW = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_BOX = {
    "type": "object",
    "properties": {"re_lo": _NUM, "re_hi": _NUM, "im_lo": _NUM, "im_hi": _NUM},
    "required": ["re_lo", "re_hi", "im_lo", "im_hi"],
    "additionalProperties": False,
}


def _obj(props, required=(), **extra):
    out = {"type": "object", "properties": props, "additionalProperties": False}
    if required:
        out["required"] = list(required)
    out.update(extra)
    return out


SCHEMA = _obj(
    {
        "interval": _WINDOW,
        "builder": _obj(
            {
                "raw_matrix": _obj(
                    {"m": {"type": "integer", "minimum": 2},
                     "entries": {"type": "array", "items": {"type": "array"}}},
                    ["m", "entries"],
                ),
                "sturm_liouville": _obj(
                    {"p": _COEF, "Q": _COEF, "q": _COEF,
                     "mode": {"enum": ["distributional", "classical"]}},
                    ["p"],
                ),
                "two_term": _obj(
                    {"m": {"type": "integer", "minimum": 3}, "k": {"type": "integer", "minimum": 1},
                     "Q": _COEF},
                    ["m", "k"],
                ),
            },
            minProperties=1,
            maxProperties=1,
        ),
        "extension": _obj(
            {
                "preset": {"enum": ["dirichlet", "neumann", "quasi_periodic", "custom_separated"]},
                "K": _MATRIX,
                "sign": _SIGN,
                "theta": _NUM,
                "K_a": _MATRIX,
                "K_b": _MATRIX,
            }
        ),
        "odd_coeffs": {"type": "array", "items": _CPLX, "minItems": 4, "maxItems": 4},
        "task": _obj(
            {
                "validate": _obj({}),
                "spectrum": _obj({"window": _WINDOW, "box": _BOX,
                                  "grid": {"type": "integer", "minimum": 3},
                                  "max_eigenvalues": {"type": "integer", "minimum": 1}}),
                "resolvent": _obj({"lambda": _CPLX, "h": _COEF,
                                   "samples": {"type": "integer", "minimum": 2}},
                                  ["lambda", "h"]),
                "generalized_resolvent": _obj(
                    {
                        "lambda": _CPLX,
                        "h": _COEF,
                        "samples": {"type": "integer", "minimum": 2},
                        "family": _obj(
                            {
                                "constant": _MATRIX,
                                "mobius": _obj({"K0": _MATRIX, "a": _CPLX, "b": _CPLX,
                                                "c": _CPLX, "d": _CPLX},
                                               ["K0", "a", "b", "c", "d"]),
                                "tabulated": _obj({"points": {"type": "array", "items": _CPLX},
                                                   "matrices": {"type": "array", "items": _MATRIX}},
                                                  ["points", "matrices"]),
                            },
                            minProperties=1,
                            maxProperties=1,
                        ),
                    },
                    ["lambda", "h", "family"],
                ),
                "verify": _obj({"trials": {"type": "integer", "minimum": 1}, "window": _WINDOW}),
                "compare": _obj({"window": _WINDOW, "count": {"type": "integer", "minimum": 1},
                                 "tolerance": _NUM}),
            },
            minProperties=1,
            maxProperties=1,
        ),
        "tolerances": _obj({"rtol": _NUM, "atol": _NUM, "threshold": _NUM}),
        "output": _obj({"path": {"type": "string"}, "format": {"enum": ["csv", "json"]}}),
        "seed": {"type": "integer"},
    },
    ["interval", "builder", "task"],
)


def _pointer(path):
    return "/" + "/".join(str(p) for p in path) if path else ""


def _fill_defaults(spec):
    out = copy.deepcopy(spec)
    tol = dict(DEFAULTS["tolerances"])
    tol.update(out.get("tolerances", {}))
    out["tolerances"] = tol
    outp = dict(DEFAULTS["output"])
    outp.update(out.get("output", {}))
    out["output"] = outp
    out.setdefault("seed", DEFAULTS["seed"])
    ext = out.setdefault("extension", {"preset": "dirichlet"})
    ext.setdefault("sign", "plus")
    if "preset" not in ext and "K" not in ext:
        ext["preset"] = "dirichlet"
    return out


def _order_of(builder):
    kind, params = next(iter(builder.items()))
    if kind == "sturm_liouville":
        return 2
    return params.get("m")


def check_spec(data):
    """Schema and cross-field checks; returns the spec with defaults filled."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    problems = [(_pointer(e.absolute_path), e.message) for e in errors]
    if problems:
        raise SchemaError(problems)
    ext = data.get("extension", {})
    if "preset" in ext and "K" in ext:
        problems.append(("/extension", "'preset' and 'K' are mutually exclusive"))
    m = _order_of(data["builder"])
    if ext.get("preset") == "custom_separated":
        if m is not None and m % 2:
            problems.append(("/extension/preset",
                             f"custom_separated needs an even order, got m={m}"))
        if "K_a" not in ext or "K_b" not in ext:
            problems.append(("/extension", "custom_separated needs K_a and K_b"))
    sl = data["builder"].get("sturm_liouville")
    if sl is not None:
        mode = sl.get("mode", "distributional")
        key = "Q" if mode == "distributional" else "q"
        if key not in sl:
            problems.append(("/builder/sturm_liouville", f"mode {mode} needs '{key}'"))
    a, b = data["interval"]
    if not b > a:
        problems.append(("/interval", "interval must satisfy a < b"))
    task = data["task"]
    if "spectrum" in task:
        sp = task["spectrum"]
        if ("window" in sp) == ("box" in sp):
            problems.append(("/task/spectrum", "give exactly one of 'window' and 'box'"))
    if "odd_coeffs" in data and m is not None and m % 2 == 0:
        problems.append(("/odd_coeffs", "odd_coeffs apply to odd order only"))
    if problems:
        raise SchemaError(problems)
    return _fill_defaults(data)


def parse_spec(path):
    """Read and validate an operator file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError([("", f"invalid JSON: {exc}")]) from exc
    except OSError as exc:
        raise SchemaError([("", f"cannot read {path}: {exc}")]) from exc
    return check_spec(data)


# -- building objects from the file -----------------------------------------


def _cplx(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def coefficient_from_json(value, a, b):
    if isinstance(value, dict):
        if "pieces" in value:
            return PiecewiseCoefficient.from_dict(value)
        st = value["step"]
        return PiecewiseCoefficient.step(a, b, st["at"], _cplx(st.get("left", 0.0)),
                                         _cplx(st.get("right", 1.0)))
    return PiecewiseCoefficient.constant(_cplx(value), a, b)


def _matrix(rows):
    return np.array([[_cplx(v) for v in row] for row in rows], dtype=complex)


def build_operator(spec):
    """``(A, T, extension, builder_kind)`` from a validated spec."""
    a, b = (float(v) for v in spec["interval"])
    kind, params = next(iter(spec["builder"].items()))
    if kind == "raw_matrix":
        rows = [[None if c is None else coefficient_from_json(c, a, b) for c in row]
                for row in params["entries"]]
        A = ShinZettlMatrix(rows, a, b)
        if A.m != params["m"]:
            raise SchemaError([("/builder/raw_matrix/m", "m does not match the entry grid")])
    elif kind == "sturm_liouville":
        mode = params.get("mode", "distributional")
        p = coefficient_from_json(params["p"], a, b)
        second = params["Q"] if mode == "distributional" else params["q"]
        A = build_sturm_liouville(p, coefficient_from_json(second, a, b), mode)
    else:
        Q = coefficient_from_json(params.get("Q", 0.0), a, b)
        A = build_two_term(params["m"], params["k"], Q)
    odd = spec.get("odd_coeffs")
    T = build_triplet(A.m, None if odd is None else tuple(_cplx(v) for v in odd))
    ext = spec["extension"]
    sign = ext.get("sign", "plus")
    if "K" in ext:
        E = ExtensionSpec(_matrix(ext["K"]), sign)
    else:
        E = preset(
            ext["preset"], A.m, T, sign=sign, theta=ext.get("theta", 0.0),
            K_a=None if "K_a" not in ext else _matrix(ext["K_a"]),
            K_b=None if "K_b" not in ext else _matrix(ext["K_b"]),
        )
    return A, T, E, kind


# -- tasks ------------------------------------------------------------------


def _scan_options(spec, jobs, task_params):
    tol = spec["tolerances"]
    return ScanOptions(
        grid=task_params.get("grid", DEFAULTS["scan"]["grid"]),
        threshold=tol["threshold"],
        max_eigenvalues=task_params.get("max_eigenvalues", DEFAULTS["scan"]["max_eigenvalues"]),
        rtol=tol["rtol"],
        atol=tol["atol"],
        jobs=jobs,
    )


def _spectrum(A, T, E, spec, params, jobs):
    opts = _scan_options(spec, jobs, params)
    if "window" in params:
        return eigenvalues_real_scan(A, E, T, params["window"], opts)
    return eigenvalues_complex_box(A, E, T, params["box"], opts)


def _trajectory_output(y, samples, fmt):
    t = np.linspace(y.interval[0], y.interval[1], samples)
    vals = y(t)[:, 0]
    meta = {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in y.meta.items()}
    if fmt == "json":
        return json.dumps({
            "t": [float(x) for x in t],
            "re": [float(v.real) for v in vals],
            "im": [float(v.imag) for v in vals],
            "meta": meta,
        }, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "re", "im"])
    for x, v in zip(t, vals):
        writer.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def _family(params):
    kind, val = next(iter(params.items()))
    if kind == "constant":
        return ConstantFamily(_matrix(val))
    if kind == "mobius":
        return MobiusFamily(_matrix(val["K0"]), *(_cplx(val[k]) for k in "abcd"))
    return TabulatedFamily([_cplx(p) for p in val["points"]], [_matrix(M) for M in val["matrices"]])


def run_verify(A, T, E, spec, params, rng, jobs=1):
    """Invariant checks on one operator; returns ``(report, all_passed)``."""
    tol = spec["tolerances"]
    a, b = A.a, A.b
    checks = []

    def record(name, passed, **info):
        checks.append({"check": name, "pass": bool(passed), **info})

    trials = params.get("trials", DEFAULTS["verify"]["trials"])
    worst = 0.0
    for _ in range(trials):
        lam_y, lam_z = (complex(*rng.normal(size=2)) for _ in range(2))
        fy = PiecewiseCoefficient.polynomial(rng.normal(size=3) + 1j * rng.normal(size=3), a, b, a)
        y = solve_cauchy(A, lam_y, fy, rng.uniform(a, b), rng.normal(size=A.m) + 1j * rng.normal(size=A.m),
                         tol["rtol"], tol["atol"])
        z = solve_cauchy(A, lam_z, None, a, rng.normal(size=A.m) + 1j * rng.normal(size=A.m),
                         tol["rtol"], tol["atol"])
        worst = max(worst, greens_identity_residual(A, y, z, T).residual)
    record("greens_identity", worst < 1e-8, worst_residual=worst, trials=trials)
    record("adjoint_involution", lagrange_adjoint(lagrange_adjoint(A)).equals(A))
    record("formally_selfadjoint", is_formally_selfadjoint(A, atol=1e-12))
    record("admissible", validate(A).ok)
    if A.m % 2:
        rel = odd_coefficient_relations(*T.odd_coeffs, A.m // 2)
        record("odd_coefficients", all(rel.values()), relations=rel)
    c = E.classification
    record("extension_classified", True, contraction=c.is_contraction, unitary=c.is_unitary,
           symmetric=c.is_symmetric_matrix, block_diagonal=c.is_block_diagonal)
    kind, bparams = next(iter(spec["builder"].items()))
    if kind == "sturm_liouville" and bparams.get("mode", "distributional") == "distributional" \
            and E.is_unitary:
        window = params.get("window", DEFAULTS["verify"]["window"])
        opts = _scan_options(spec, jobs, {})
        p = coefficient_from_json(bparams["p"], a, b)
        Q = coefficient_from_json(bparams["Q"], a, b)
        shifted = build_sturm_liouville(p, Q.shift_constant(3.0), "distributional")
        e1 = eigenvalues_real_scan(A, E, T, window, opts).values
        e2 = eigenvalues_real_scan(shifted, E, T, window, opts).values
        n = min(len(e1), len(e2), 6)
        dev = float(np.max(np.abs(e1[:n] - e2[:n]))) if n else 0.0
        record("q_shift_invariance", len(e1) == len(e2) and dev < 1e-7, max_deviation=dev, count=n)
    passed = all(ch["pass"] for ch in checks)
    return {"checks": checks, "pass": passed}, passed


def run_compare(A, T, E, spec, params, jobs=1):
    """Classical against distributional Sturm--Liouville builds."""
    kind, bparams = next(iter(spec["builder"].items()))
    if kind != "sturm_liouville":
        raise SchemaError([("/builder", "compare needs a sturm_liouville builder")])
    a, b = A.a, A.b
    p = coefficient_from_json(bparams["p"], a, b)
    if "q" in bparams:
        q = coefficient_from_json(bparams["q"], a, b)
        Q = q.antiderivative()
    else:
        Q = coefficient_from_json(bparams["Q"], a, b)
        q = None
    if q is None:
        raise SchemaError([("/builder/sturm_liouville", "compare needs the potential 'q'")])
    Ac = build_sturm_liouville(p, q, "classical")
    Ad = build_sturm_liouville(p, Q, "distributional")
    window = params.get("window", [-10.0, 150.0])
    count = params.get("count", 10)
    limit = params.get("tolerance", 1e-6)
    opts = _scan_options(spec, jobs, {})
    e1 = eigenvalues_real_scan(Ac, E, T, window, opts).values[:count]
    e2 = eigenvalues_real_scan(Ad, E, T, window, opts).values[:count]
    n = min(len(e1), len(e2))
    dev = float(np.max(np.abs(e1[:n] - e2[:n]))) if n else 0.0
    rows = [{"classical": [float(x.real), float(x.imag)],
             "distributional": [float(y.real), float(y.imag)]} for x, y in zip(e1, e2)]
    passed = len(e1) == len(e2) == count and dev < limit
    return {"pairs": rows, "max_deviation": dev, "count": n, "pass": passed}, passed


def run(spec, subcommand, jobs=1, seed=None):
    """Dispatch a validated spec; returns ``(exit_status, text_output)``."""
    task_name = SUBCOMMANDS[subcommand]
    if task_name not in spec["task"]:
        given = next(iter(spec["task"]))
        raise SchemaError([("/task", f"file describes task '{given}', not '{task_name}'")])
    params = spec["task"][task_name]
    fmt = spec["output"]["format"]
    seed = spec["seed"] if seed is None else seed
    A, T, E, _ = build_operator(spec)
    tol = spec["tolerances"]
    if task_name == "validate":
        report = validate(A)
        out = {
            "admissible": report.ok,
            "violations": [{"kind": v.kind, "position": list(v.position), "message": v.message}
                           for v in report],
            "m": A.m,
            "formally_selfadjoint": is_formally_selfadjoint(A, atol=1e-12),
            "extension": {"sign": E.sign, "flags": sorted(E.classification.flags())},
        }
        return (0 if report.ok else 1), json.dumps(out, indent=2, sort_keys=True) + "\n"
    if task_name == "spectrum":
        res = _spectrum(A, T, E, spec, params, jobs)
        return 0, (res.to_csv() if fmt == "csv" else res.to_json() + "\n")
    if task_name == "resolvent":
        h = coefficient_from_json(params["h"], A.a, A.b)
        y = resolvent_apply(A, E, T, _cplx(params["lambda"]), h, tol["rtol"], tol["atol"])
        return 0, _trajectory_output(y, params.get("samples", 101), fmt)
    if task_name == "generalized_resolvent":
        h = coefficient_from_json(params["h"], A.a, A.b)
        y = generalized_resolvent_apply(A, _family(params["family"]), T, _cplx(params["lambda"]), h,
                                        tol["rtol"], tol["atol"])
        return 0, _trajectory_output(y, params.get("samples", 101), fmt)
    if task_name == "verify":
        report, ok = run_verify(A, T, E, spec, params, np.random.default_rng(seed), jobs)
        return (0 if ok else 2), json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    report, ok = run_compare(A, T, E, spec, params, jobs)
    return (0 if ok else 2), json.dumps(report, indent=2, sort_keys=True) + "\n"


def _parser():
    parser = argparse.ArgumentParser(prog="quasidiff", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--spec", required=True, help="JSON operator file")
        p.add_argument("--out", help="output path (default: stdout or output.path)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float, help="integrator rtol and atol")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        spec = parse_spec(args.spec)
        if args.format:
            spec["output"]["format"] = args.format
        if args.tol is not None:
            if not args.tol > 0:
                raise SchemaError([("--tol", "tolerance must be positive")])
            spec["tolerances"]["rtol"] = spec["tolerances"]["atol"] = args.tol
        if args.jobs < 1:
            raise SchemaError([("--jobs", "jobs must be at least 1")])
        status, text = run(spec, args.command, args.jobs, args.seed)
        path = args.out or spec["output"].get("path")
        if path:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return status
    except QuasiDiffError as exc:
        sys.stderr.write(json.dumps(exc.record(), sort_keys=True, default=str) + "\n")
        return 1
    except (ValueError, np.linalg.LinAlgError) as exc:
        record = {"error": "internal", "module": "cli", "message": str(exc)}
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
