"""Command line front end: ``setcsp <subcommand> ...``.

Exit codes: 0 success / yes / accept, 1 no / reject, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .acac import ExplicitGraph, from_explicit, materialize, reduce_to_acac
from .circuits import parse_circuit
from .compiler import compile_spec
from .core import SetCspInstance, ValidationError, check_bits, embed_csp, set_unsat
from .oracle import conductance, decide_satisfiable, min_set_unsat_exhaustive
from .walk import VerifierParams, check_escape_lemma, ma_verify

EXIT_OK, EXIT_NO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def _load_instance(path: str) -> SetCspInstance:
    return SetCspInstance.from_json(_read_json(path))


def read_set_file(path: str, n: int) -> list[str]:
    out, seen = [], set()
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            check_bits(line, n)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        if line in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate string {line}")
        seen.add(line)
        out.append(line)
    if not out:
        raise ValidationError(f"{path}: empty string set")
    return out


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SETCSP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SETCSP_SEED is not an integer: {env!r}")
    raise UsageError("this subcommand is randomized: pass --seed or set SETCSP_SEED")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------------------
# subcommands; each returns (exit code, output object)

def cmd_compile(args):
    spec = parse_circuit(Path(args.circuit).read_text())
    compiled = compile_spec(spec, Fraction(args.epsilon) if args.epsilon else None)
    if args.labels:
        Path(args.labels).write_text(_dump(list(compiled.labels)))
    return EXIT_OK, compiled.instance.to_json()


def cmd_embed(args):
    obj = _read_json(args.csp)
    try:
        cons = [(c["j"], c["allowed"]) for c in obj["constraints"]]
        n = int(obj["n"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed CSP file: {exc}") from exc
    if not cons:
        raise ValidationError("CSP has no constraints")
    eps = obj.get("epsilon")
    return EXIT_OK, embed_csp(n, cons, Fraction(eps) if eps else None).to_json()


def cmd_eval(args):
    inst = _load_instance(args.instance)
    report = set_unsat(inst, read_set_file(args.set_file, inst.n))
    return EXIT_OK, report.to_json()


def cmd_decide(args):
    inst = _load_instance(args.instance)
    res = decide_satisfiable(inst)
    out = {"result": "satisfiable" if res.satisfiable else "unsatisfiable",
           "witness": sorted(res.witness) if res.witness else None}
    return (EXIT_OK if res.satisfiable else EXIT_NO), out


def cmd_brutemin(args):
    res = min_set_unsat_exhaustive(_load_instance(args.instance))
    return EXIT_OK, {"min_value": frac(res.min_value), "argmin": sorted(res.argmin),
                     "subsets_examined": res.subsets_examined}


def cmd_reduce(args):
    inst = _load_instance(args.instance)
    acac = reduce_to_acac(inst)
    out = materialize(acac).to_json()
    out["degree_bound"] = acac.degree_bound
    if acac.epsilon is not None:
        out["epsilon"] = frac(acac.epsilon)
    return EXIT_OK, out


def _load_acac(path: str):
    obj = _read_json(path)
    if "edges" in obj:
        g = ExplicitGraph.from_json(obj)
        acac = from_explicit(g, obj.get("epsilon"))
        if "degree_bound" in obj:
            acac = dataclasses.replace(acac, degree_bound=int(obj["degree_bound"]))
        return acac
    return reduce_to_acac(SetCspInstance.from_json(obj))


def cmd_verify(args):
    seed = _seed(args)
    acac = _load_acac(args.input)
    params = VerifierParams.for_instance(acac, Fraction(args.epsilon) if args.epsilon else None)
    res = ma_verify(acac, args.witness, params, seed, audit=args.audit,
                    trials_override=args.trials_override, steps_override=args.steps_override)
    out = res.to_json()
    out.update(epsilon=frac(params.epsilon), d=params.d, q1=params.q1, q2=params.q2)
    return (EXIT_OK if res.accepted else EXIT_NO), out


def cmd_conductance(args):
    res = conductance(ExplicitGraph.from_json(_read_json(args.graph)))
    return EXIT_OK, {"conductance": frac(res.value), "disconnected": res.disconnected}


def cmd_escape_check(args):
    g = ExplicitGraph.from_json(_read_json(args.graph))
    report = check_escape_lemma(g, d=args.d)
    code = EXIT_NO if report.hypothesis_met and not report.holds else EXIT_OK
    return code, report.to_json()


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit seed (fallback: $SETCSP_SEED)")
    common.add_argument("--output", "-o", default=None, help="write the result here instead of stdout")
    common.add_argument("--manifest", default=None, help="write a run manifest to this path")

    parser = argparse.ArgumentParser(prog="setcsp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("compile", cmd_compile, "compile a reversible circuit file into a set-constraint instance")
    p.add_argument("circuit")
    p.add_argument("--labels", help="write constraint family labels (JSON list) here")
    p.add_argument("--epsilon", help="promise parameter stamped on the instance")

    p = add("embed", cmd_embed, "embed a classical CSP as singleton-group set-constraints")
    p.add_argument("csp")

    p = add("eval", cmd_eval, "frustration of a string set")
    p.add_argument("instance")
    p.add_argument("set_file")

    p = add("decide", cmd_decide, "exact satisfiability via clean components")
    p.add_argument("instance")

    p = add("brutemin", cmd_brutemin, "exhaustive minimum frustration (n <= 4)")
    p.add_argument("instance")

    p = add("reduce", cmd_reduce, "materialize the constraint graph with bad-string marks")
    p.add_argument("instance")

    p = add("verify", cmd_verify, "random-walk verifier from a witness vertex")
    p.add_argument("input", help="instance JSON or graph JSON")
    p.add_argument("--witness", required=True)
    p.add_argument("--epsilon")
    p.add_argument("--trials-override", type=int)
    p.add_argument("--steps-override", type=int)
    p.add_argument("--audit", action="store_true", help="run every trial even after a hit")

    p = add("conductance", cmd_conductance, "exact conductance of a small graph")
    p.add_argument("graph")

    p = add("escape-check", cmd_escape_check, "check the escape-time bound with exact hitting probabilities")
    p.add_argument("graph")
    p.add_argument("--d", type=int, default=None, help="degree bound (default: max degree on A)")
    return parser


def _input_paths(args) -> list[str]:
    keys = ("circuit", "csp", "instance", "set_file", "input", "graph")
    return [getattr(args, k) for k in keys if getattr(args, k, None)]


def write_manifest(path: str, args, argv, wall: float):
    inputs = []
    for p in _input_paths(args):
        digest = hashlib.sha256(Path(p).read_bytes()).hexdigest()
        inputs.append({"path": p, "sha256": digest})
    manifest = {
        "subcommand": args.command,
        "argv": list(argv),
        "inputs": inputs,
        "seed": args.seed if args.seed is not None else os.environ.get("SETCSP_SEED"),
        "tool_version": __version__,
        "wall_time_s": round(wall, 6),
    }
    Path(path).write_text(_dump(manifest))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    t0 = time.perf_counter()
    try:
        code, out = args.func(args)
    except (ValidationError, UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = _dump(out)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    manifest = args.manifest or (args.output + ".manifest.json" if args.output else None)
    if manifest:
        write_manifest(manifest, args, argv, time.perf_counter() - t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
