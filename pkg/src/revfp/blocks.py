"""Builders for the adder's sub-circuits.

Every ``emit_*`` function appends gates to an existing circuit, allocating
whatever ancillae it needs, and returns the wire ids of interest.  The
``build_*`` functions wrap one emitter in a standalone circuit and hand back a
:class:`BlockHandle` with declared garbage, for unit testing and cost rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import CONST0, CONST1, GARBAGE, RESTORED, RESULT, Circuit, CircuitError

SHIFT_LIMIT = 26



def _fresh(c: Circuit, prefix: str, n: int = 1, value: int = 0) -> list[int]:
    """Allocate ``n`` constant wires encoding ``value`` little-endian."""
    tag = c.width                 # unique within the circuit, stable across builds
    return [c.add_wire(f"{prefix}#{tag}[{i}]", CONST1 if (value >> i) & 1 else CONST0)
            for i in range(n)]


@dataclass
class BlockHandle:
    circuit: Circuit
    registers: dict[str, list[int]]
    garbage: list[int] = field(default_factory=list)

    def finalize(self, results: list[int] = (), restored: list[int] = ()) -> "BlockHandle":
        roles = {w: RESULT for w in results}
        roles.update({w: RESTORED for w in restored})
        roles.update({w: GARBAGE for w in self.garbage})
        self.circuit.freeze(roles)
        return self


# ---------------------------------------------------------------------------
# subtractor cells

def emit_rhs1(c: Circuit, sub: int, minu: int, anc: int) -> None:
    """anc ^= borrow(minu - sub); both operands kept."""
    c.add("TR", sub, minu, anc)
    c.add("CNOT", sub, minu)


def emit_rhs2(c: Circuit, top: int, sub: int, minu: int, anc: int) -> None:
    """top ^= minu xor sub (difference), anc ^= borrow; operands kept."""
    c.add("TR", sub, minu, anc)
    c.add("CNOT", minu, top)
    c.add("CNOT", sub, minu)


def emit_subtractor(c: Circuit, minuend: list[int], subtrahend: list[int],
                    full: str = "RFS2", half: str = "RHS2") -> tuple[list[int], int, list[int]]:
    """Ripple-borrow ``minuend - subtrahend``.

    Returns (difference wires, final borrow wire, wires where the minuend
    bits end up).  With RFS2 the minuend bit i>0 migrates onto the incoming
    borrow wire and the difference takes its place; RFS1 leaves the borrow
    wire garbled and keeps no copy of the minuend.
    """
    n = len(minuend)
    if len(subtrahend) != n or n < 2:
        raise CircuitError("subtractor needs equal widths >= 2")
    borrows = _fresh(c, "bw", n)
    diff: list[int] = []
    kept: list[int] = [minuend[0]]
    if half == "RHS2":
        top = _fresh(c, "d0")[0]
        emit_rhs2(c, top, subtrahend[0], minuend[0], borrows[0])
        diff.append(top)
    elif half == "RHS1":
        emit_rhs1(c, subtrahend[0], minuend[0], borrows[0])
        diff.append(-1)
    else:
        raise CircuitError(f"unknown half subtractor {half!r}")
    for i in range(1, n):
        c.add(full, borrows[i - 1], subtrahend[i], minuend[i], borrows[i])
        diff.append(minuend[i])
        kept.append(borrows[i - 1] if full == "RFS2" else -1)
    return diff, borrows[-1], kept


def build_rhs(variant: int) -> BlockHandle:
    c = Circuit()
    minu = c.add_wire("minuend")
    sub = c.add_wire("subtrahend")
    if variant == 1:
        anc = c.add_wire("borrow", CONST0)
        emit_rhs1(c, sub, minu, anc)
        regs = {"minuend": [minu], "subtrahend": [sub], "borrow": [anc]}
        return BlockHandle(c, regs).finalize([anc], [minu, sub])
    if variant == 2:
        top = c.add_wire("difference", CONST0)
        anc = c.add_wire("borrow", CONST0)
        emit_rhs2(c, top, sub, minu, anc)
        regs = {"minuend": [minu], "subtrahend": [sub], "difference": [top], "borrow": [anc]}
        return BlockHandle(c, regs).finalize([top, anc], [minu, sub])
    raise CircuitError("RHS variant must be 1 or 2")


def build_rfs(variant: int) -> BlockHandle:
    if variant not in (1, 2):
        raise CircuitError("RFS variant must be 1 or 2")
    c = Circuit()
    bin_ = c.add_wire("borrow_in")
    sub = c.add_wire("subtrahend")
    minu = c.add_wire("minuend")
    anc = c.add_wire("borrow", CONST0)
    c.add(f"RFS{variant}", bin_, sub, minu, anc)
    regs = {"borrow_in": [bin_], "subtrahend": [sub], "difference": [minu], "borrow": [anc]}
    if variant == 2:
        regs["minuend"] = [bin_]
        return BlockHandle(c, regs).finalize([minu, anc], [sub, bin_])
    return BlockHandle(c, regs, [bin_]).finalize([minu, anc], [sub])


# ---------------------------------------------------------------------------
# conditional swap

def emit_conditional_swap(c: Circuit, a: dict[str, list[int]], b: dict[str, list[int]]):
    """Subtract exponents, then swap the operands when expA < expB.

    ``a``/``b`` map 'sign', 'exp', 'man' to wire lists.  Returns
    (x, y, d, b7): x holds the larger-exponent operand, d the 8-bit
    difference expA - expB, and b7 its borrow (the swap control).
    """
    diff, b7, kept = emit_subtractor(c, a["exp"], b["exp"], "RFS2", "RHS2")
    a_exp = kept
    pairs = [(a["sign"][0], b["sign"][0])]
    pairs += list(zip(a_exp, b["exp"]))
    pairs += list(zip(a["man"], b["man"]))
    for wa, wb in pairs:
        c.add("FREDKIN", b7, wa, wb)
    x = {"sign": [a["sign"][0]], "exp": a_exp, "man": list(a["man"])}
    y = {"sign": [b["sign"][0]], "exp": list(b["exp"]), "man": list(b["man"])}
    return x, y, diff, b7


def _operand_wires(c: Circuit, name: str) -> dict[str, list[int]]:
    return {"man": c.add_register(f"{name}.man", 23),
            "exp": c.add_register(f"{name}.exp", 8),
            "sign": [c.add_wire(f"{name}.sign")]}


def build_conditional_swap() -> BlockHandle:
    c = Circuit()
    a = _operand_wires(c, "A")
    b = _operand_wires(c, "B")
    x, y, d, b7 = emit_conditional_swap(c, a, b)
    regs = {f"X_{k}": v for k, v in x.items()} | {f"Y_{k}": v for k, v in y.items()}
    regs |= {"d": d, "b7": [b7]}
    used = set(sum(regs.values(), []))
    h = BlockHandle(c, regs, [w.id for w in c.wires if w.id not in used])
    return h.finalize(sorted(used))


# ---------------------------------------------------------------------------
# converters

def emit_2c_to_sm(c: Circuit, sign: int, mag: list[int], anc: list[int] | None = None) -> list[int]:
    """In place: mag <- (mag - sign) xor (sign repeated).  Returns the borrow wires."""
    m = len(mag)
    if m < 2:
        raise CircuitError("converter needs n >= 3")
    anc = list(anc) if anc is not None else _fresh(c, "cv", m - 1)
    if len(anc) != m - 1:
        raise CircuitError(f"converter needs {m - 1} ancillae")
    bw = [sign] + anc
    c.add("TR", sign, mag[0], bw[1])
    c.add("CNOT", sign, mag[0])
    for i in range(1, m - 1):
        c.add("TR", bw[i], mag[i], bw[i + 1])
        c.add("CNOT", sign, mag[i])
    c.add("CNOT", bw[m - 1], mag[m - 1])
    c.add("CNOT", sign, mag[m - 1])
    return anc


def emit_sm_to_2c(c: Circuit, sign: int, mag: list[int], anc: list[int] | None = None) -> list[int]:
    """In place: mag <- (mag xor sign-mask) + sign.  Returns the carry wires."""
    m = len(mag)
    if m < 2:
        raise CircuitError("converter needs n >= 3")
    anc = list(anc) if anc is not None else _fresh(c, "cv", m - 1)
    if len(anc) != m - 1:
        raise CircuitError(f"converter needs {m - 1} ancillae")
    cy = [sign] + anc
    c.add("CNOT", sign, mag[0])
    c.add("PERES", sign, mag[0], cy[1])
    for i in range(1, m - 1):
        c.add("CNOT", sign, mag[i])
        c.add("PERES", cy[i], mag[i], cy[i + 1])
    c.add("CNOT", sign, mag[m - 1])
    c.add("CNOT", cy[m - 1], mag[m - 1])
    return anc


def build_converter(n: int, direction: str = "2c_to_sm") -> BlockHandle:
    """n-bit register: bits 0..n-2 magnitude / low bits, bit n-1 sign."""
    if n < 3:
        raise CircuitError("converter needs n >= 3")
    c = Circuit()
    reg = c.add_register("x", n)
    if direction == "2c_to_sm":
        anc = emit_2c_to_sm(c, reg[-1], reg[:-1])
    elif direction == "sm_to_2c":
        anc = emit_sm_to_2c(c, reg[-1], reg[:-1])
    else:
        raise CircuitError(f"unknown direction {direction!r}")
    return BlockHandle(c, {"x": reg, "anc": anc}, list(anc)).finalize(reg)


# ---------------------------------------------------------------------------
# shift limiter

def emit_shift_limiter(c: Circuit, mag: list[int], limit: int = SHIFT_LIMIT) -> list[int]:
    """In place: mag <- min(mag, limit) for an 8-bit magnitude."""
    n = len(mag)
    k = _fresh(c, "lim", n, limit)
    _, borrow, kept = emit_subtractor(c, k, mag, "RFS2", "RHS1")
    for w_mag, w_k in zip(mag, kept):
        c.add("FREDKIN", borrow, w_mag, w_k)
    return mag


def build_shift_limiter() -> BlockHandle:
    c = Circuit()
    mag = c.add_register("d", 8)
    emit_shift_limiter(c, mag)
    return BlockHandle(c, {"d": mag}, [w.id for w in c.wires if w.id not in mag]).finalize(mag)


# ---------------------------------------------------------------------------
# barrel shifters

def _reversal(lo: int, hi: int) -> list[tuple[int, int]]:
    return [(lo + i, hi - 1 - i) for i in range((hi - lo) // 2)]


def rotation_swaps(n: int, k: int, direction: str) -> list[list[tuple[int, int]]]:
    """Two layers of disjoint swaps rotating ``n`` positions by ``k``.

    Right rotation moves position i+k to i (towards the LSB).
    """
    k %= n
    split = n - k if direction == "right" else k
    return [_reversal(0, n), _reversal(0, split) + _reversal(split, n)]


def emit_barrel_shifter(c: Circuit, data: list[int], controls: list[int],
                        direction: str = "right", fanout: bool = True) -> list[int]:
    """Stage j rotates ``data`` by 2**j when controls[j] is 1.

    With ``fanout`` the control is copied onto fresh wires so the swaps of a
    layer share no wire and can run in parallel; the copies stay as garbage.
    Returns the fan-out wires.
    """
    n = len(data)
    if direction not in ("right", "left"):
        raise CircuitError(f"unknown direction {direction!r}")
    if not controls or any(w is None for w in controls):
        raise CircuitError("shift distance wires missing")
    extra: list[int] = []
    for j, ctl in enumerate(controls):
        layers = rotation_swaps(n, 1 << j, direction)
        width = max(len(layer) for layer in layers)
        copies = [ctl]
        if fanout and width > 1:
            fresh = _fresh(c, f"fan{j}", width - 1)
            for w in fresh:
                c.add("CNOT", ctl, w)
            copies += fresh
            extra += fresh
        for layer in layers:
            for idx, (p, q) in enumerate(layer):
                c.add("FREDKIN", copies[idx % len(copies)], data[p], data[q])
    return extra


def build_barrel_shifter(n_bits: int, k_controls: int, direction: str = "right",
                         fanout: bool = True) -> BlockHandle:
    if n_bits < 2 or k_controls < 1:
        raise CircuitError("need at least 2 data bits and 1 control")
    c = Circuit()
    data = c.add_register("data", n_bits)
    ctl = c.add_register("shift", k_controls)
    extra = emit_barrel_shifter(c, data, ctl, direction, fanout)
    return BlockHandle(c, {"data": data, "shift": ctl}, extra).finalize(data, ctl)


# ---------------------------------------------------------------------------
# sticky bit

def emit_or(c: Circuit, a: int, b: int) -> int:
    """Fresh wire = a OR b using NOT + TR on a constant-1 target."""
    out = _fresh(c, "or", 1, 1)[0]
    c.add("NOT", a)
    c.add("TR", a, b, out)
    return out


def emit_sticky_cascade(c: Circuit, bits: list[int]) -> int:
    acc = bits[0]
    for w in bits[1:]:
        acc = emit_or(c, acc, w)
    return acc


def build_sticky_cascade(n: int = 24) -> BlockHandle:
    c = Circuit()
    bits = c.add_register("lost", n)
    s = emit_sticky_cascade(c, bits)
    garbage = [w.id for w in c.wires if w.id != s]
    return BlockHandle(c, {"lost": bits, "sticky": [s]}, garbage).finalize([s])


# ---------------------------------------------------------------------------
# ripple adder

def emit_ripple_adder(c: Circuit, x: list[int], y: list[int]) -> list[int]:
    """Two's-complement x + y with one sign-extension bit; x is kept.

    Returns the n+1 sum wires, LSB first.
    """
    n = len(x)
    if len(y) != n or n < 2:
        raise CircuitError("adder needs equal widths >= 2")
    cy = _fresh(c, "cy", n)
    c.add("PERES", x[0], y[0], cy[0])
    for i in range(1, n):
        c.add("RFA", x[i], y[i], cy[i - 1], cy[i])
    # top bit: x[n-1] xor y[n-1] xor carry; y[n-1] already holds the xor
    c.add("CNOT", y[n - 1], cy[n - 1])
    return [y[0]] + cy


def build_ripple_adder(n: int = 28) -> BlockHandle:
    c = Circuit()
    x = c.add_register("x", n)
    y = c.add_register("y", n)
    s = emit_ripple_adder(c, x, y)
    garbage = [w for w in y[1:]]
    return BlockHandle(c, {"x": x, "y": y, "sum": s}, garbage).finalize(s, x)


# ---------------------------------------------------------------------------
# leading-zero counting

def emit_rlzc(c: Circuit, a: int, b: int, cc: int, d: int) -> tuple[int, int]:
    """One RLZC cell.  Returns (a|b|cc, d | a&~b&~cc) on fresh wires.

    a and b are restored; cc, d and two internal wires become garbage.
    """
    anc = _fresh(c, "rz.n", 1, 0)[0]
    p = _fresh(c, "rz.p", 1, 1)[0]
    g = _fresh(c, "rz.g", 1, 1)[0]
    o = _fresh(c, "rz.o", 1, 1)[0]
    c.add("NOT", b)
    c.add("TR", b, cc, anc)          # anc = ~b & ~cc
    c.add("TOFFOLI", a, anc, g)      # g = ~(a & ~b & ~cc)
    c.add("TR", anc, a, p)           # p = a | b | cc
    c.add("CNOT", anc, a)
    c.add("TR", g, d, o)             # o = d | (a & ~b & ~cc)
    c.add("NOT", b)
    return p, o


def build_rlzc() -> BlockHandle:
    c = Circuit()
    a, b, cc, d = (c.add_wire(n) for n in "ABCD")
    p, o = emit_rlzc(c, a, b, cc, d)
    garbage = [w.id for w in c.wires if w.id not in (a, b, p, o)]
    return BlockHandle(c, {"A": [a], "B": [b], "C": [cc], "D": [d], "P": [p], "O": [o]},
                       garbage).finalize([p, o], [a, b])


def emit_rlzcu(c: Circuit, x: list[int]) -> tuple[list[int], int]:
    """Leading-zero count of ``x`` (LSB first, width a power of two >= 4).

    Returns (count wires LSB first, wire holding OR of all input bits).
    Built from width-1 RLZC cells: a ripple chain over bit pairs produces the
    even prefix ORs and the count's LSB, then one chain per higher count bit.
    """
    w = len(x)
    levels = w.bit_length() - 1
    if w < 4 or w != 1 << levels:
        raise CircuitError("RLZCU width must be a power of two >= 4")
    top = lambda t: x[w - 1 - t]            # t-th bit from the MSB
    prefix: dict[int, int] = {}             # k -> wire holding OR of the top k bits
    out: list[int] = []
    carry = _fresh(c, "rz.c0")[0]
    chain = _fresh(c, "rz.d0")[0]
    for t in range(1, w, 2):
        p, chain = emit_rlzc(c, top(t), top(t - 1), carry, chain)
        prefix[t + 1] = p
        if t + 1 < w:
            carry = _fresh(c, "rz.cp")[0]
            c.add("CNOT", p, carry)
    out.append(chain)
    for j in range(1, levels):
        chain = _fresh(c, f"rz.d{j}")[0]
        step = 1 << j
        for b in range(1, w // step, 2):
            zero = _fresh(c, "rz.z")[0]
            _, chain = emit_rlzc(c, prefix[(b + 1) * step], prefix[b * step], zero, chain)
        out.append(chain)
    return out, prefix[w]


def build_rlzcu(width: int = 32) -> BlockHandle:
    c = Circuit()
    x = c.add_register("x", width)
    out, nz = emit_rlzcu(c, x)
    garbage = [w.id for w in c.wires if w.id not in out and w.id not in x and w.id != nz]
    return BlockHandle(c, {"x": x, "count": out, "nonzero": [nz]}, garbage).finalize(out + [nz], x)


# ---------------------------------------------------------------------------
# exponent arithmetic used by normalization

def emit_incrementer(c: Circuit, reg: list[int], cin: int) -> list[int]:
    """In place: reg += cin (mod 2**len).  Returns carry wires."""
    n = len(reg)
    cy = _fresh(c, "inc", n - 1)
    chain = [cin] + cy
    for i in range(n - 1):
        c.add("PERES", chain[i], reg[i], chain[i + 1])
    c.add("CNOT", chain[n - 1], reg[n - 1])
    return cy
