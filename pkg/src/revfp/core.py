"""Reversible circuit IR: wires, logical gates, circuits, bit-sliced simulation, costs.

Wire id doubles as bit index.  Multi-bit registers are little-endian lists of
wire ids (index 0 is the LSB).
"""
from __future__ import annotations

import os
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

VARIABLE = "variable-input"
CONST0 = "constant-0"
CONST1 = "constant-1"
ROLES = (VARIABLE, CONST0, CONST1)

RESULT = "result"
RESTORED = "restored-input"
GARBAGE = "garbage"
OUTPUT_ROLES = (RESULT, RESTORED, GARBAGE)

STAGES = ("swap", "alignment", "conversion", "addition", "normalization", "rounding")

BASE_KINDS = ("NOT", "CNOT", "TOFFOLI", "FREDKIN", "PERES", "TR")
# 4-wire macro gates.  Each is a permutation defined by a controlled-V level
# drawing; none can be written with the six base kinds at the same cost.
MACRO_KINDS = ("RFS1", "RFS2", "RFA")
KINDS = BASE_KINDS + MACRO_KINDS

ARITY = {"NOT": 1, "CNOT": 2, "TOFFOLI": 3, "FREDKIN": 3, "PERES": 3, "TR": 3,
         "RFS1": 4, "RFS2": 4, "RFA": 4}
SELF_INVERSE = frozenset({"NOT", "CNOT", "TOFFOLI", "FREDKIN"})

DEFAULT_COSTS = {"NOT": 1, "CNOT": 1, "PERES": 4, "TR": 4, "TOFFOLI": 5, "FREDKIN": 5,
                 "RFS1": 6, "RFS2": 8, "RFA": 6}

COST_TABLE_ENV = "REVFP_COST_TABLE"


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Wire:
    id: int
    name: str
    role: str


@dataclass(frozen=True)
class Gate:
    kind: str
    operands: tuple
    inverse: bool = False
    stage: str = ""

    def inverted(self) -> "Gate":
        if self.kind in SELF_INVERSE:
            return self
        return Gate(self.kind, self.operands, not self.inverse, self.stage)


# ---------------------------------------------------------------------------
# bit-sliced semantics: each wire value is a Python int whose bit i belongs
# to batch lane i; ``m`` is the all-lanes mask.

def _not(s, o, m):
    s[o[0]] ^= m


def _cnot(s, o, m):
    s[o[1]] ^= s[o[0]]


def _toffoli(s, o, m):
    a, b, c = o
    s[c] ^= s[a] & s[b]


def _fredkin(s, o, m):
    a, b, c = o
    t = s[a] & (s[b] ^ s[c])
    s[b] ^= t
    s[c] ^= t


def _peres(s, o, m):
    a, b, c = o
    s[c] ^= s[a] & s[b]
    s[b] ^= s[a]


def _peres_inv(s, o, m):
    a, b, c = o
    s[b] ^= s[a]
    s[c] ^= s[a] & s[b]


def _tr(s, o, m):
    a, b, c = o
    s[c] ^= s[a] & ~s[b]
    s[b] ^= s[a]


def _tr_inv(s, o, m):
    a, b, c = o
    s[b] ^= s[a]
    s[c] ^= s[a] & ~s[b]


def _borrow(a, b, c):
    # borrow out of a - b - c
    return (~a & (b | c)) | (a & b & c)


def _rfs1(s, o, m):
    c, b, a, anc = o
    s[anc] ^= _borrow(s[a], s[b], s[c])
    s[a] ^= s[b] ^ s[c]


def _rfs1_inv(s, o, m):
    c, b, a, anc = o
    s[a] ^= s[b] ^ s[c]
    s[anc] ^= _borrow(s[a], s[b], s[c])


def _rfs2(s, o, m):
    c, b, a, anc = o
    va = s[a]
    s[anc] ^= _borrow(va, s[b], s[c])
    s[a] = va ^ s[b] ^ s[c]
    s[c] = va


def _rfs2_inv(s, o, m):
    c, b, a, anc = o
    va = s[c]
    s[c] = va ^ s[b] ^ s[a]
    s[a] = va
    s[anc] ^= _borrow(va, s[b], s[c])


def _maj(a, b, c):
    return (a & b) | (a & c) | (b & c)


def _rfa(s, o, m):
    a, b, c, d = o
    s[d] ^= _maj(s[a], s[b], s[c])
    s[b] ^= s[a]
    s[c] ^= s[b]


def _rfa_inv(s, o, m):
    a, b, c, d = o
    s[c] ^= s[b]
    s[b] ^= s[a]
    s[d] ^= _maj(s[a], s[b], s[c])


_FWD: dict[str, Callable] = {"NOT": _not, "CNOT": _cnot, "TOFFOLI": _toffoli,
                             "FREDKIN": _fredkin, "PERES": _peres, "TR": _tr,
                             "RFS1": _rfs1, "RFS2": _rfs2, "RFA": _rfa}
_INV: dict[str, Callable] = {"PERES": _peres_inv, "TR": _tr_inv, "RFS1": _rfs1_inv,
                             "RFS2": _rfs2_inv, "RFA": _rfa_inv}


def gate_action(kind: str, inverse: bool = False) -> Callable:
    if kind not in _FWD:
        raise CircuitError(f"unknown gate kind {kind!r}")
    if inverse and kind not in SELF_INVERSE:
        return _INV[kind]
    return _FWD[kind]


def truth_table(kind: str, inverse: bool = False) -> list[int]:
    """Map input index -> output index; operand 0 is the most significant bit."""
    n = ARITY[kind]
    fn = gate_action(kind, inverse)
    out = []
    for x in range(1 << n):
        s = [(x >> (n - 1 - k)) & 1 for k in range(n)]
        fn(s, tuple(range(n)), 1)
        out.append(sum((v & 1) << (n - 1 - k) for k, v in enumerate(s)))
    return out


# ---------------------------------------------------------------------------

@dataclass
class Circuit:
    wires: list[Wire] = field(default_factory=list)
    gates: list[Gate] = field(default_factory=list)
    output_roles: dict[int, str] = field(default_factory=dict)
    stage: str = ""
    frozen: bool = False
    _names: dict[str, int] = field(default_factory=dict, repr=False)

    @property
    def width(self) -> int:
        return len(self.wires)

    @property
    def stage_tags(self) -> dict[int, str]:
        return {i: g.stage for i, g in enumerate(self.gates)}

    def wire_id(self, name: str) -> int:
        return self._names[name]

    def add_wire(self, name: str, role: str = VARIABLE) -> int:
        self._check_mutable()
        if not name:
            raise CircuitError("wire name must be nonempty")
        if role not in ROLES:
            raise CircuitError(f"invalid role {role!r}")
        if name in self._names:
            raise CircuitError(f"duplicate wire name {name!r}")
        wid = len(self.wires)
        self.wires.append(Wire(wid, name, role))
        self._names[name] = wid
        return wid

    def add_register(self, prefix: str, n: int, role: str = VARIABLE,
                     value: int | None = None) -> list[int]:
        """Declare ``n`` wires; with ``value`` set, roles are constants encoding it."""
        ids = []
        for i in range(n):
            r = role if value is None else (CONST1 if (value >> i) & 1 else CONST0)
            ids.append(self.add_wire(f"{prefix}[{i}]", r))
        return ids

    def append(self, gate: Gate) -> "Circuit":
        self._check_mutable()
        if gate.kind not in ARITY:
            raise CircuitError(f"unknown gate kind {gate.kind!r}")
        ops = tuple(gate.operands)
        if len(ops) != ARITY[gate.kind]:
            raise CircuitError(f"{gate.kind} takes {ARITY[gate.kind]} operands, got {len(ops)}")
        for w in ops:
            if not isinstance(w, int) or not 0 <= w < len(self.wires):
                raise CircuitError(f"undeclared wire {w!r}")
        if len(set(ops)) != len(ops):
            raise CircuitError(f"repeated operand in {gate.kind}{ops}")
        stage = gate.stage or self.stage
        self.gates.append(Gate(gate.kind, ops, bool(gate.inverse), stage))
        return self

    def add(self, kind: str, *ops: int, inverse: bool = False) -> "Circuit":
        return self.append(Gate(kind, ops, inverse))

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def freeze(self, output_roles: dict[int, str] | None = None) -> "Circuit":
        if output_roles is not None:
            for w, r in output_roles.items():
                if r not in OUTPUT_ROLES:
                    raise CircuitError(f"invalid output role {r!r}")
            self.output_roles = dict(output_roles)
        self.frozen = True
        return self

    def _check_mutable(self):
        if self.frozen:
            raise CircuitError("circuit is finalized")

    def constants(self) -> list[int]:
        return [w.id for w in self.wires if w.role != VARIABLE]

    def initial_state(self) -> list[int]:
        return [1 if w.role == CONST1 else 0 for w in self.wires]


def new_circuit(wire_decls: Sequence[tuple[str, str]]) -> Circuit:
    if not wire_decls:
        raise CircuitError("empty circuit")
    c = Circuit()
    for name, role in wire_decls:
        c.add_wire(name, role)
    return c


def append(circuit: Circuit, gate: Gate) -> Circuit:
    return circuit.append(gate)


def invert(circuit: Circuit) -> Circuit:
    """Reverse gate order and replace each gate by its inverse."""
    out = Circuit()
    for w in circuit.wires:
        out.add_wire(w.name, w.role)
    out.gates = [g.inverted() for g in reversed(circuit.gates)]
    return out


def compose(first: Circuit, second: Circuit) -> Circuit:
    if [(w.name, w.role) for w in first.wires] != [(w.name, w.role) for w in second.wires]:
        raise CircuitError("wire sets differ")
    out = Circuit()
    for w in first.wires:
        out.add_wire(w.name, w.role)
    out.gates = list(first.gates) + list(second.gates)
    return out


# ---------------------------------------------------------------------------
# simulation

def run_gates(gates: Iterable[Gate], state: list[int], mask: int) -> list[int]:
    """Apply gates in place to a bit-sliced state and return it."""
    fwd, inv = _FWD, _INV
    for g in gates:
        if g.inverse and g.kind not in SELF_INVERSE:
            inv[g.kind](state, g.operands, mask)
        else:
            fwd[g.kind](state, g.operands, mask)
    return state


def check_constants(circuit: Circuit, state: Sequence[int], mask: int) -> list[int]:
    """Return ids of constant wires whose value differs from the declared constant in any lane."""
    bad = []
    for w in circuit.wires:
        if w.role == CONST0 and state[w.id] & mask:
            bad.append(w.id)
        elif w.role == CONST1 and (state[w.id] & mask) != mask:
            bad.append(w.id)
    return bad


def simulate(circuit: Circuit, input_bits: Sequence[int], verify_constants: bool = True) -> list[int]:
    """Simulate one basis state; ``input_bits[i]`` is the value on wire i."""
    if len(input_bits) != circuit.width:
        raise CircuitError(f"width mismatch: {len(input_bits)} bits for {circuit.width} wires")
    state = [int(b) & 1 for b in input_bits]
    if verify_constants:
        bad = check_constants(circuit, state, 1)
        if bad:
            names = ", ".join(circuit.wires[i].name for i in bad[:5])
            raise CircuitError(f"constant wire(s) not at declared value: {names}")
    return run_gates(circuit.gates, state, 1)


def simulate_batch(circuit: Circuit, state: list[int], lanes: int,
                   verify_constants: bool = True) -> list[int]:
    """Bit-sliced simulation over ``lanes`` basis states at once."""
    if len(state) != circuit.width:
        raise CircuitError(f"width mismatch: {len(state)} slices for {circuit.width} wires")
    mask = (1 << lanes) - 1
    if verify_constants:
        bad = check_constants(circuit, state, mask)
        if bad:
            raise CircuitError(f"constant wire(s) not at declared value: {bad[:5]}")
    return run_gates(circuit.gates, list(state), mask)


# ---------------------------------------------------------------------------
# costs

@dataclass
class CostReport:
    quantum_cost: int = 0
    garbage_outputs: int = 0
    constant_inputs: int = 0
    per_stage: dict[str, tuple[int, int, int]] = field(default_factory=dict)
    gate_count: int = 0
    t_count: int | None = None
    t_depth: int | None = None
    qubit_count: int | None = None
    kq: int | None = None

    def set_kq(self):
        if self.qubit_count is not None and self.t_depth is not None:
            self.kq = self.qubit_count * self.t_depth

    def as_dict(self) -> dict:
        return {"quantum_cost": self.quantum_cost, "garbage_outputs": self.garbage_outputs,
                "constant_inputs": self.constant_inputs, "gate_count": self.gate_count,
                "per_stage": {k: list(v) for k, v in self.per_stage.items()},
                "t_count": self.t_count, "t_depth": self.t_depth,
                "qubit_count": self.qubit_count, "kq": self.kq}


def load_cost_table(path: str | None = None) -> dict[str, int]:
    """Default costs, overlaid with a JSON override from ``path`` or $REVFP_COST_TABLE."""
    table = dict(DEFAULT_COSTS)
    path = path or os.environ.get(COST_TABLE_ENV)
    if path:
        with open(path) as fh:
            try:
                override = json.load(fh)
            except json.JSONDecodeError as e:
                raise CircuitError(f"{path}: bad cost table: {e}") from None
        if not isinstance(override, dict):
            raise CircuitError(f"{path}: cost table must be a JSON object")
        for k, v in override.items():
            if k.upper() not in KINDS:
                raise CircuitError(f"unknown gate kind in cost table: {k}")
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise CircuitError(f"cost for {k} must be a positive integer")
            table[k.upper()] = v
    return table


def _first_touch(circuit: Circuit) -> dict[int, str]:
    seen: dict[int, str] = {}
    for g in circuit.gates:
        for w in g.operands:
            seen.setdefault(w, g.stage)
    return seen


def _last_touch(circuit: Circuit) -> dict[int, str]:
    seen: dict[int, str] = {}
    for g in circuit.gates:
        for w in g.operands:
            seen[w] = g.stage
    return seen


def cost_summary(circuit: Circuit, cost_table: dict[str, int] | None = None,
                 stage_claims: dict[int, str] | None = None) -> CostReport:
    """QC/GO/CI totals plus per-stage rows.

    Per stage: QC sums gate costs, CI counts constant wires by the stage that
    first touches them, GO counts garbage wires by the stage that last touches
    them.  ``stage_claims`` pins specific wires to a stage for GO attribution.
    """
    table = cost_table or DEFAULT_COSTS
    qc: dict[str, int] = {}
    for g in circuit.gates:
        if g.kind not in table:
            raise CircuitError(f"gate kind {g.kind} missing from cost table")
        qc[g.stage] = qc.get(g.stage, 0) + table[g.kind]
    first, last = _first_touch(circuit), _last_touch(circuit)
    ci: dict[str, int] = {}
    go: dict[str, int] = {}
    for w in circuit.wires:
        if w.role != VARIABLE:
            st = first.get(w.id, "")
            ci[st] = ci.get(st, 0) + 1
        if circuit.output_roles.get(w.id) == GARBAGE:
            st = (stage_claims or {}).get(w.id, last.get(w.id, ""))
            go[st] = go.get(st, 0) + 1
    names = [s for s in STAGES if s in qc or s in ci or s in go]
    names += sorted(s for s in set(qc) | set(ci) | set(go) if s not in names)
    per = {s: (qc.get(s, 0), go.get(s, 0), ci.get(s, 0)) for s in names}
    return CostReport(quantum_cost=sum(qc.values()), garbage_outputs=sum(go.values()),
                      constant_inputs=sum(ci.values()), per_stage=per,
                      gate_count=len(circuit.gates))
