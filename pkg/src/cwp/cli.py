"""``cwp`` command-line interface.

Exit codes: 0 identity (or success), 1 not identity, 2 domain error,
64 usage error, 74 I/O error.  ``CWP_LOG`` (debug, info, warning) controls
diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import secrets
import sys
from typing import Any, Sequence

from . import formats
from .circuit import Circuit, eval_int, eval_mod, eval_poly, is_skew, metrics
from .errors import CwpError, FormatError
from .generators import GENERATORS, gen_instance, identity_ut_slp
from .matrices import Matrix, alphabet_for, make_Ga_alphabet
from .passes import (
    ExponentSchedule,
    PartitionedCircuit,
    circuit_pair_to_ut_slp,
    degree_normalize,
    eliminate_subtraction,
    eliminate_subtraction_partitioned,
    powerful_skew_to_group_slp,
    reduce_mdepth_once,
    skew_to_group_slp,
    slp_to_circuit,
    to_addition_circuit,
)
from .slp import Slp, eval_matrix, eval_matrix_mod, expand, word_length
from .solvers import (
    CosetSystem,
    ModularSolverParams,
    NotInSubgroup,
    pit_schwartz_zippel,
    reduce_finite_index,
    solve_exact,
    solve_linear_modular,
    solve_ut_exact,
    solve_ut_via_addition_circuits,
    verdict_to_json,
)

log = logging.getLogger("cwp")

EXIT_IDENTITY = 0
EXIT_NOT_IDENTITY = 1
EXIT_DOMAIN = 2
EXIT_USAGE = 64
EXIT_IO = 74

PASS_NAMES = (
    "eliminate-sub",
    "slp-to-circuit",
    "reduce-mdepth",
    "to-addition",
    "degree-normalize",
    "pair-to-ut-slp",
    "skew-to-slp",
    "powerful-to-slp",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# I/O helpers


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _read_json(path: str) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON: {e}") from None


def _load(path: str):
    return formats.load(_read_json(path))


def _expect(obj, kind, path: str):
    if not isinstance(obj, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise FormatError(f"{path}: expected a {names.lower()} document")
    return obj


def _emit(args: argparse.Namespace, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    out = getattr(args, "output", None)
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_obj(args: argparse.Namespace, obj) -> None:
    fmt = args.format
    if fmt == "dot":
        if isinstance(obj, Circuit):
            _emit(args, formats.circuit_to_dot(obj))
            return
        if isinstance(obj, Slp):
            _emit(args, formats.slp_to_dot(obj))
            return
        raise UsageError("DOT output is available for single circuits and SLPs only")
    _emit(args, formats.dumps(obj))


def _matrix_text(m: Matrix) -> str:
    return json.dumps([[_scalar(x) for x in row] for row in m.rows])


def _scalar(x):
    return x if isinstance(x, int) else str(x)


def _parse_assignment(text: str | None) -> dict[str, int]:
    out: dict[str, int] = {}
    if not text:
        return out
    for part in text.split(","):
        name, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"bad assignment {part!r}; expected name=value")
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"bad value in {part!r}") from None
    return out


def _seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        args.seed = secrets.randbelow(2**32)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


# ---------------------------------------------------------------------------
# Subcommands


def cmd_eval(args: argparse.Namespace) -> int:
    obj = _load(args.file)
    if isinstance(obj, Circuit):
        assignment = _parse_assignment(args.assign)
        if args.poly:
            p = eval_poly(obj, modulus=args.mod)
            if args.format == "text":
                _emit(args, str(p))
            else:
                _emit(args, json.dumps({"variables": sorted(obj.variables()), "terms": p.to_terms()}))
            return 0
        value = eval_mod(obj, assignment, args.mod) if args.mod else eval_int(obj, assignment)
        if args.format == "json":
            _emit(args, json.dumps({"value": value, **vars(metrics(obj))}))
        else:
            _emit(args, str(value))
        return 0
    if isinstance(obj, Slp):
        if args.group is None:
            n = word_length(obj)
            if args.format == "json":
                doc: dict[str, Any] = {"length": n}
                if args.expand:
                    doc["word"] = expand(obj, args.max_len)
                _emit(args, json.dumps(doc))
            else:
                _emit(args, " ".join(expand(obj, args.max_len)) if args.expand else str(n))
            return 0
        alph = alphabet_for(args.group)
        m = eval_matrix_mod(obj, alph, args.mod) if args.mod else eval_matrix(obj, alph)
        _emit(args, _matrix_text(m))
        return 0
    raise FormatError(f"{args.file}: eval expects a circuit or an SLP")


def _schedule(args: argparse.Namespace, c: Circuit) -> ExponentSchedule:
    if args.schedule == "paper":
        return ExponentSchedule.paper(c)
    exps = _parse_assignment(args.exponents)
    for x in c.variables():
        exps.setdefault(x, 1)
    return ExponentSchedule.test(exps)


def _load_partition(args: argparse.Namespace, c: Circuit) -> PartitionedCircuit:
    if not args.partition:
        raise UsageError("this pass needs --partition")
    return formats.partition_from_json(c, _read_json(args.partition))


def _write_partition(args: argparse.Namespace, pcs: Sequence[PartitionedCircuit]) -> None:
    if args.emit_partition:
        data = [formats.partition_to_json(p) for p in pcs]
        with open(args.emit_partition, "w", encoding="utf-8") as fh:
            json.dump(data[0] if len(data) == 1 else data, fh, indent=2)


def cmd_pass(args: argparse.Namespace) -> int:
    name = args.name
    obj = _load(args.file)
    if name == "eliminate-sub":
        c = _expect(obj, Circuit, args.file)
        if args.partition:
            p1, p2 = eliminate_subtraction_partitioned(_load_partition(args, c))
            _write_partition(args, [p1, p2])
            _emit(args, formats.dumps(formats.bundle_to_json([p1.circuit, p2.circuit], [p1, p2])))
        else:
            c1, c2 = eliminate_subtraction(c)
            _emit(args, formats.dumps(formats.bundle_to_json([c1, c2])))
    elif name == "slp-to-circuit":
        g = _expect(obj, Slp, args.file)
        if args.d is None:
            raise UsageError("slp-to-circuit needs --d")
        pc = slp_to_circuit(g, args.d)
        _write_partition(args, [pc])
        _emit_obj(args, pc.circuit)
    elif name in ("reduce-mdepth", "to-addition"):
        c = _expect(obj, Circuit, args.file)
        pc = _load_partition(args, c)
        if name == "reduce-mdepth":
            out = reduce_mdepth_once(pc, copy_all=args.copy_all)
            _write_partition(args, [out])
            _emit_obj(args, out.circuit)
        else:
            _emit_obj(args, to_addition_circuit(pc, copy_all=args.copy_all))
    elif name == "degree-normalize":
        cs = _expect(obj, list, args.file)
        if len(cs) != 2:
            raise FormatError("degree-normalize needs a bundle of two circuits")
        a1, a2 = degree_normalize(cs[0], cs[1])
        doc = formats.bundle_to_json([a1.circuit, a2.circuit])
        doc["degree"] = a1.formal_degree
        doc["padding"] = [sorted(a1.padding), sorted(a2.padding)]
        _emit(args, json.dumps(doc, indent=2))
    elif name == "pair-to-ut-slp":
        cs = _expect(obj, list, args.file)
        if len(cs) != 2:
            raise FormatError("pair-to-ut-slp needs a bundle of two circuits")
        a1, a2 = degree_normalize(cs[0], cs[1])
        _emit_obj(args, circuit_pair_to_ut_slp(a1, a2))
    elif name in ("skew-to-slp", "powerful-to-slp"):
        c = _expect(obj, Circuit, args.file)
        alph = make_Ga_alphabet(_base(args.base))
        encode = skew_to_group_slp if name == "skew-to-slp" else powerful_skew_to_group_slp
        _emit_obj(args, encode(c, alph, _schedule(args, c)))
    return 0


def _base(text: str):
    if text in ("sqrt2", "1+sqrt2"):
        return "sqrt2"
    if text.startswith("int") and text[3:].isdigit():
        return int(text[3:])
    if text.isdigit():
        return int(text)
    raise UsageError(f"unknown base {text!r}; use sqrt2 or intN")


def _report(args: argparse.Namespace, verdict) -> int:
    if args.format == "json":
        _emit(args, json.dumps(verdict_to_json(verdict)))
    else:
        _emit(args, _verdict_text(verdict))
    return EXIT_IDENTITY if verdict.is_identity else EXIT_NOT_IDENTITY


def _verdict_text(v) -> str:
    doc = verdict_to_json(v)
    name = doc.pop("verdict")
    doc.pop("identity")
    if name == "AcceptsIdentity":
        bound = doc.pop("error_bound", None)
        if bound is None:
            doc["error_bound"] = "heuristic"
        else:
            doc["error_bound"] = f"{bound:.3g}" if bound > 0 else "<1e-300"
    details = " ".join(f"{k}={json.dumps(x) if not isinstance(x, str) else x}" for k, x in doc.items())
    return f"{name} {details}".rstrip()


def cmd_solve(args: argparse.Namespace) -> int:
    g = _expect(_load(args.file), Slp, args.file)
    group = args.group
    mode = args.mode
    if mode == "modular":
        params = ModularSolverParams(args.prime_bits, args.trials, _seed(args), args.jobs)
        return _report(args, solve_linear_modular(g, alphabet_for(group), params))
    if group.startswith("ut:"):
        d = int(group[3:])
        if mode == "circuits":
            return _report(args, solve_ut_via_addition_circuits(g, d))
        return _report(args, solve_ut_exact(g, d))
    if mode == "circuits":
        raise UsageError("--mode circuits applies to ut:d groups only")
    return _report(args, solve_exact(g, alphabet_for(group)))


def cmd_reduce_index(args: argparse.Namespace) -> int:
    g = _expect(_load(args.file), Slp, args.file)
    cs = CosetSystem.from_json(_read_json(args.cosets))
    out = reduce_finite_index(g, cs)
    if isinstance(out, NotInSubgroup):
        return _report(args, out)
    if args.embed:
        return _report(args, solve_exact(out, alphabet_for(args.embed)))
    _emit_obj(args, out)
    return EXIT_IDENTITY


def cmd_pit(args: argparse.Namespace) -> int:
    c = _expect(_load(args.file), Circuit, args.file)
    if args.method == "sz":
        r = pit_schwartz_zippel(c, args.trials, args.prime_bits, _seed(args))
        doc = {"zero": r.is_zero}
        if r.is_zero:
            doc["error_bound"] = r.error_bound
        else:
            doc.update(prime=r.prime, point=r.point, value=r.value)
        _emit(args, json.dumps(doc) if args.format == "json" else
              ("ZeroPolynomial" if r.is_zero else f"NonzeroPolynomial prime={r.prime} value={r.value}"))
        return EXIT_IDENTITY if r.is_zero else EXIT_NOT_IDENTITY
    alph = make_Ga_alphabet(_base(args.base))
    sched = _schedule(args, c)
    encode = skew_to_group_slp if is_skew(c) else powerful_skew_to_group_slp
    g = encode(c, alph, sched)
    log.info("group encoding has %d rules", len(g.rules))
    if args.mode == "exact":
        return _report(args, solve_exact(g, alph))
    params = ModularSolverParams(args.prime_bits, args.trials, _seed(args), args.jobs)
    return _report(args, solve_linear_modular(g, alph, params))


def cmd_gen(args: argparse.Namespace) -> int:
    seed = _seed(args)
    options = {}
    if args.d is not None:
        options["d"] = args.d
    if args.vars is not None:
        options["vars"] = args.vars
    if args.identity:
        if args.kind != "slp-ut":
            raise UsageError("--identity applies to --kind slp-ut only")
        obj = identity_ut_slp(args.d or 3, args.gates, seed)
    else:
        obj = gen_instance(args.kind, args.gates, seed, **options)
    _emit_obj(args, obj)
    return 0


def cmd_dot(args: argparse.Namespace) -> int:
    obj = _load(args.file)
    if isinstance(obj, Circuit):
        pc = formats.partition_from_json(obj, _read_json(args.partition)) if args.partition else None
        _emit(args, formats.circuit_to_dot(obj, pc))
    elif isinstance(obj, Slp):
        _emit(args, formats.slp_to_dot(obj))
    else:
        raise FormatError(f"{args.file}: dot expects a circuit or an SLP")
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    from .selftest import run_selftest

    ok = run_selftest(seed=args.seed if args.seed is not None else 0, quick=args.quick, out=sys.stdout)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "dot", "text"), default=None)
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    rand = argparse.ArgumentParser(add_help=False)
    rand.add_argument("--seed", type=int, default=None)
    rand.add_argument("--jobs", type=int, default=1, help="parallel solver trials")

    modular = argparse.ArgumentParser(add_help=False)
    modular.add_argument("--prime-bits", type=int, default=61)
    modular.add_argument("--trials", type=int, default=20)

    sched = argparse.ArgumentParser(add_help=False)
    sched.add_argument("--base", default="sqrt2", help="sqrt2 (a = 1+sqrt2) or intN (a = N)")
    sched.add_argument("--schedule", choices=("paper", "test"), default="paper")
    sched.add_argument("--exponents", help="test schedule, e.g. x1=2,x2=3 (default 1)")

    p = _Parser(prog="cwp", description="Compressed word problems and circuit reductions.")
    p.add_argument("--version", action="version", version="cwp 0.1.0")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("eval", parents=[common], help="evaluate a circuit or SLP")
    s.add_argument("file")
    s.add_argument("--assign", help="variable values, e.g. x1=3,x2=-1")
    s.add_argument("--mod", type=int, help="evaluate modulo this integer")
    s.add_argument("--poly", action="store_true", help="print the expanded polynomial")
    s.add_argument("--group", help="interpret an SLP in ut:d, ga:intN or ga:sqrt2")
    s.add_argument("--expand", action="store_true", help="print the SLP's word")
    s.add_argument("--max-len", type=int, default=10**6)
    s.set_defaults(func=cmd_eval, default_format="text")

    s = sub.add_parser("pass", parents=[common, sched], help="run one transformation pass")
    s.add_argument("name", choices=PASS_NAMES)
    s.add_argument("file")
    s.add_argument("--d", type=int, help="matrix dimension for slp-to-circuit")
    s.add_argument("--partition", help="JSON file with the multiplication-gate classes")
    s.add_argument("--emit-partition", help="write the output's classes to this file")
    s.add_argument("--copy-all", action="store_true", help="copy every gate in reduce-mdepth")
    s.set_defaults(func=cmd_pass, default_format="json")

    s = sub.add_parser("solve", parents=[common, rand, modular], help="decide whether an SLP is the identity")
    s.add_argument("file")
    s.add_argument("--group", required=True, help="ut:d, ga:intN or ga:sqrt2")
    s.add_argument("--mode", choices=("exact", "modular", "circuits"), default="exact")
    s.set_defaults(func=cmd_solve, default_format="text")

    s = sub.add_parser("reduce-index", parents=[common], help="rewrite an SLP into a finite-index subgroup")
    s.add_argument("file")
    s.add_argument("--cosets", required=True, help="coset system JSON")
    s.add_argument("--embed", help="also decide the result in ut:d")
    s.set_defaults(func=cmd_reduce_index, default_format="json")

    s = sub.add_parser("pit", parents=[common, rand, modular, sched], help="polynomial identity test")
    s.add_argument("file")
    s.add_argument("--method", choices=("group", "sz"), default="group")
    s.add_argument("--mode", choices=("exact", "modular"), default="modular")
    s.set_defaults(func=cmd_pit, default_format="text")

    s = sub.add_parser("gen", parents=[common, rand], help="generate a random instance")
    s.add_argument("--kind", required=True, choices=tuple(GENERATORS))
    s.add_argument("--gates", "--size", type=int, default=10, dest="gates")
    s.add_argument("--vars", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--identity", action="store_true", help="slp-ut instance that evaluates to 1")
    s.set_defaults(func=cmd_gen, default_format="json")

    s = sub.add_parser("dot", parents=[common], help="render a circuit or SLP as DOT")
    s.add_argument("file")
    s.add_argument("--partition", help="annotate multiplication gates with their class")
    s.set_defaults(func=cmd_dot, default_format="dot")

    s = sub.add_parser("selftest", parents=[common], help="run the built-in oracle checks")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--quick", action="store_true")
    s.set_defaults(func=cmd_selftest, default_format="text")
    return p


def _configure_logging() -> None:
    level = os.environ.get("CWP_LOG", "warning").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="cwp: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )


def run(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except UsageError as e:
        print(f"cwp: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"cwp: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except CwpError as e:
        print(f"cwp: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
