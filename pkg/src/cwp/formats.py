"""JSON and DOT formats for circuits, SLPs, polynomials and partitions.

Circuit::

    {"gates": [{"id": "A", "rhs": {"const": 1}},
               {"id": "B", "rhs": {"var": "x1"}},
               {"id": "S", "rhs": {"add": ["A", "B"]}},
               {"rhs": {"mul": ["A", {"add": ["A", "B"]}]}}],
     "output": "S"}

``add`` and ``mul`` accept two or more operands, each a gate id or a nested
right-hand side; a missing ``id`` is filled in.  Powerful products are
``{"monomul": {"coeff": 2, "powers": [["x1", 3]], "operand": "B"}}``.

SLP::

    {"rules": [{"id": "A", "terminal": "T(1,2)"},
               {"id": "S", "concat": ["A", "A"]},
               {"id": "W", "word": ["S", "T(2,3)^-1"]}],
     "start": "S"}

In a ``word`` every string naming an earlier variable is that variable, any
other string is a letter.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Sequence

from .circuit import Add, Circuit, CircuitBuilder, Const, MonoMul, Mul, Rhs, Var, validate
from .errors import FormatError
from .passes import PartitionedCircuit
from .poly import MultiPoly
from .slp import Concat, Slp, SlpBuilder, Terminal, validate_slp


# ---------------------------------------------------------------------------
# Circuits


def circuit_from_json(data: Mapping[str, Any]) -> Circuit:
    if not isinstance(data, Mapping) or "gates" not in data:
        raise FormatError("a circuit needs a 'gates' list")
    entries = data["gates"]
    if not isinstance(entries, list):
        raise FormatError("'gates' must be a list")
    reserved = [e["id"] for e in entries if isinstance(e, Mapping) and "id" in e]
    b = CircuitBuilder(prefix="_n", reserved=reserved)
    last = None
    for e in entries:
        if not isinstance(e, Mapping) or "rhs" not in e:
            raise FormatError(f"gate entry {e!r} has no 'rhs'")
        last = _gate(b, e["rhs"], e.get("id"))
    output = data.get("output", last)
    if output is None:
        raise FormatError("circuit has no gates and no output")
    c = b.build(output)
    validate(c)
    return c


def _operand(b: CircuitBuilder, x: Any) -> str:
    if isinstance(x, str):
        return x
    return _gate(b, x, None)


def _gate(b: CircuitBuilder, rhs: Any, ident: str | None) -> str:
    if not isinstance(rhs, Mapping) or len(rhs) != 1:
        raise FormatError(f"right-hand side {rhs!r} must be an object with one key")
    (kind, arg), = rhs.items()
    if kind == "const":
        if not isinstance(arg, int) or isinstance(arg, bool):
            raise FormatError(f"constant {arg!r} is not an integer")
        return b.gate(Const(arg), ident)
    if kind == "var":
        return b.gate(Var(str(arg)), ident)
    if kind in ("add", "mul"):
        if not isinstance(arg, list) or len(arg) < 2:
            raise FormatError(f"'{kind}' needs a list of at least two operands")
        ops = [_operand(b, x) for x in arg]
        return b.sum(ops, ident) if kind == "add" else b.product(ops, ident)
    if kind == "monomul":
        try:
            powers = arg.get("powers", [])
            if isinstance(powers, Mapping):
                powers = list(powers.items())
            mono = MonoMul(
                int(arg.get("coeff", 1)),
                tuple((str(x), int(e)) for x, e in powers),
                _operand(b, arg["operand"]),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as err:
            raise FormatError(f"bad monomul {arg!r}: {err}") from None
        return b.gate(mono, ident)
    raise FormatError(f"unknown right-hand side kind {kind!r}")


def _rhs_json(r: Rhs) -> dict:
    if isinstance(r, Const):
        return {"const": r.value}
    if isinstance(r, Var):
        return {"var": r.name}
    if isinstance(r, Add):
        return {"add": [r.left, r.right]}
    if isinstance(r, Mul):
        return {"mul": [r.left, r.right]}
    return {
        "monomul": {
            "coeff": r.coeff,
            "powers": [[x, e] for x, e in r.powers],
            "operand": r.operand,
        }
    }


def circuit_to_json(c: Circuit) -> dict:
    return {"gates": [{"id": g, "rhs": _rhs_json(r)} for g, r in c.gates], "output": c.output}


# ---------------------------------------------------------------------------
# SLPs


def slp_from_json(data: Mapping[str, Any]) -> Slp:
    if not isinstance(data, Mapping) or "rules" not in data:
        raise FormatError("an SLP needs a 'rules' list")
    rules = data["rules"]
    if not isinstance(rules, list):
        raise FormatError("'rules' must be a list")
    reserved = [r["id"] for r in rules if isinstance(r, Mapping) and "id" in r]
    b = SlpBuilder(prefix=_fresh_prefix(reserved))
    declared: set[str] = set()
    last = None
    for r in rules:
        if not isinstance(r, Mapping):
            raise FormatError(f"rule {r!r} is not an object")
        ident = r.get("id")
        if "terminal" in r:
            last = b.terminal(str(r["terminal"]), ident or b.fresh())
        elif "concat" in r or "word" in r:
            items = r.get("concat") or r.get("word")
            if not isinstance(items, list) or not items:
                raise FormatError(f"rule {ident!r} needs a nonempty list")
            if len(items) == 1:
                x = items[0]
                letter = x.get("letter") if isinstance(x, Mapping) else x
                if "word" in r and isinstance(letter, str) and letter not in declared:
                    last = b.terminal(letter, ident or b.fresh())
                    declared.add(last)
                    continue
                raise FormatError(f"rule {ident!r} must have two or more items")
            parts = [_slp_item(b, x, declared, literal_ids="concat" in r) for x in items]
            last = b.word(parts, ident or b.fresh())
        else:
            raise FormatError(f"rule {ident!r} needs 'terminal', 'concat' or 'word'")
        declared.add(last)
    start = data.get("start", last)
    if start is None:
        raise FormatError("SLP has no rules")
    g = b.build(start)
    validate_slp(g)
    return g


def _slp_item(b: SlpBuilder, x: Any, declared: set[str], literal_ids: bool) -> str:
    if isinstance(x, Mapping) and "letter" in x:
        return b.terminal(str(x["letter"]))
    if isinstance(x, Mapping) and "var" in x:
        return str(x["var"])
    if isinstance(x, str):
        return x if literal_ids or x in declared else b.terminal(x)
    raise FormatError(f"bad rule item {x!r}")


def _fresh_prefix(taken: Sequence[str]) -> str:
    prefix = "_v"
    while any(t.startswith(prefix) for t in taken):
        prefix += "_"
    return prefix


def slp_to_json(g: Slp) -> dict:
    rules = []
    for v, r in g.rules:
        if isinstance(r, Terminal):
            rules.append({"id": v, "terminal": r.letter})
        else:
            rules.append({"id": v, "concat": [r.left, r.right]})
    return {"rules": rules, "start": g.start}


# ---------------------------------------------------------------------------
# Polynomials, partitions, bundles


def poly_from_json(data: Any, nvars: int | None = None, modulus: int | None = None) -> MultiPoly:
    rows = data
    if isinstance(data, Mapping):
        rows = data.get("terms", [])
        modulus = data.get("modulus", modulus)
        nvars = data.get("nvars", nvars)
    if not isinstance(rows, list) or not all(isinstance(t, list) and t for t in rows):
        raise FormatError("a polynomial is a list of [coeff, n1, ..., nk] rows")
    return MultiPoly.from_terms(rows, nvars=nvars, modulus=modulus)


def poly_to_json(p: MultiPoly) -> list[list[int]]:
    return p.to_terms()


def partition_to_json(pc: PartitionedCircuit) -> list[list[str]]:
    return pc.to_lists()


def partition_from_json(c: Circuit, data: Any) -> PartitionedCircuit:
    if not isinstance(data, list) or not all(isinstance(v, list) for v in data):
        raise FormatError("a partition is a list of gate-id lists")
    return PartitionedCircuit(c, tuple(frozenset(map(str, v)) for v in data))


def bundle_from_json(data: Mapping[str, Any]) -> list[Circuit]:
    if not isinstance(data, Mapping) or "circuits" not in data:
        raise FormatError("a bundle needs a 'circuits' list")
    return [circuit_from_json(c) for c in data["circuits"]]


def bundle_to_json(circuits: Sequence[Circuit], partitions: Sequence[PartitionedCircuit] | None = None) -> dict:
    out: dict[str, Any] = {"circuits": [circuit_to_json(c) for c in circuits]}
    if partitions is not None:
        out["partitions"] = [partition_to_json(p) for p in partitions]
    return out


def load(data: Any) -> Circuit | Slp | list[Circuit] | MultiPoly:
    """Decode any supported JSON document by its shape."""
    if isinstance(data, list):
        return poly_from_json(data)
    if isinstance(data, Mapping):
        if "gates" in data:
            return circuit_from_json(data)
        if "rules" in data:
            return slp_from_json(data)
        if "circuits" in data:
            return bundle_from_json(data)
        if "terms" in data:
            return poly_from_json(data)
    raise FormatError("unrecognised document: expected a circuit, SLP, bundle or polynomial")


def loads(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e}") from None
    return load(data)


def dumps(obj: Any) -> str:
    if isinstance(obj, Circuit):
        obj = circuit_to_json(obj)
    elif isinstance(obj, Slp):
        obj = slp_to_json(obj)
    elif isinstance(obj, MultiPoly):
        obj = poly_to_json(obj)
    return json.dumps(obj, indent=2)


# ---------------------------------------------------------------------------
# DOT


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def circuit_to_dot(c: Circuit, partition: PartitionedCircuit | None = None) -> str:
    cls = partition.class_of() if partition is not None else {}
    lines = ["digraph circuit {", "  rankdir=BT;"]
    for g, r in c.gates:
        if isinstance(r, Const):
            label = str(r.value)
        elif isinstance(r, Var):
            label = r.name
        elif isinstance(r, Add):
            label = "+"
        elif isinstance(r, Mul):
            label = "*" + (f" V{cls[g]}" if g in cls else "")
        else:
            mono = "*".join(f"{x}^{e}" for x, e in r.powers) or "1"
            label = f"{r.coeff}*{mono}"
        shape = "doubleoctagon" if g == c.output else ("box" if isinstance(r, (Const, Var)) else "ellipse")
        lines.append(f"  {_q(g)} [label={_q(g + ': ' + label)}, shape={shape}];")
    for g, r in c.gates:
        kids = []
        if isinstance(r, (Add, Mul)):
            kids = [r.left, r.right]
        elif isinstance(r, MonoMul):
            kids = [r.operand]
        for ch in kids:
            lines.append(f"  {_q(ch)} -> {_q(g)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def slp_to_dot(g: Slp) -> str:
    lines = ["digraph slp {", "  rankdir=BT;"]
    for v, r in g.rules:
        label = r.letter if isinstance(r, Terminal) else "."
        shape = "doubleoctagon" if v == g.start else ("box" if isinstance(r, Terminal) else "ellipse")
        lines.append(f"  {_q(v)} [label={_q(v + ': ' + label)}, shape={shape}];")
    for v, r in g.rules:
        if isinstance(r, Concat):
            lines.append(f"  {_q(r.left)} -> {_q(v)} [label=L];")
            lines.append(f"  {_q(r.right)} -> {_q(v)} [label=R];")
    lines.append("}")
    return "\n".join(lines) + "\n"
