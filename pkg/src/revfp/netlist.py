"""Netlist serialization.

The record layout is fixed: ``{"wires": [{id, name, role}], "gates": [{kind,
operands, inverse_flag, stage}]}``, one wire or gate per line, so diffs stay
readable and a dump/load/dump cycle is byte-identical.
"""
from __future__ import annotations

import json

from .core import Circuit, CircuitError, Gate


def dumps(circuit: Circuit) -> str:
    lines = ['{"wires": [']
    ws = [json.dumps({"id": w.id, "name": w.name, "role": w.role}) for w in circuit.wires]
    lines.append(",\n".join(ws))
    lines.append('], "gates": [')
    gs = [json.dumps({"kind": g.kind, "operands": list(g.operands),
                      "inverse_flag": g.inverse, "stage": g.stage}) for g in circuit.gates]
    lines.append(",\n".join(gs))
    lines.append("]}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CircuitError(f"malformed netlist: {e}") from None
    if set(doc) != {"wires", "gates"}:
        raise CircuitError("netlist must have exactly 'wires' and 'gates'")
    c = Circuit()
    for i, w in enumerate(doc["wires"]):
        if set(w) != {"id", "name", "role"}:
            raise CircuitError(f"wire record {i} has fields {sorted(w)}")
        if w["id"] != i:
            raise CircuitError(f"wire ids must be 0..n-1 in order (got {w['id']} at {i})")
        c.add_wire(w["name"], w["role"])
    for i, g in enumerate(doc["gates"]):
        if set(g) != {"kind", "operands", "inverse_flag", "stage"}:
            raise CircuitError(f"gate record {i} has fields {sorted(g)}")
        c.append(Gate(g["kind"], tuple(g["operands"]), bool(g["inverse_flag"]), g["stage"]))
    return c


def dump(circuit: Circuit, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(circuit))


def load(path: str) -> Circuit:
    with open(path) as fh:
        return loads(fh.read())
