"""Software reference for binary32 addition with truncation (round toward zero).

Written from the arithmetic definition only; nothing here imports the circuit
builders, so agreement between the two is a real cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

SHIFT_CAP = 26
EXTRA = 3          # guard, round, sticky
SIG_BITS = 24      # implicit 1 + 23 stored


class UnsupportedOperand(ValueError):
    """Operand is zero, subnormal, infinite or NaN."""


class OutOfRange(ValueError):
    """Result exponent leaves 1..254, or the sum cancels to zero."""

    def __init__(self, kind: str, msg: str = ""):
        super().__init__(msg or kind)
        self.kind = kind


@dataclass(frozen=True)
class Float32Fields:
    sign: int
    exponent: int
    mantissa: int

    @property
    def significand(self) -> int:
        return (1 << 23) | self.mantissa


def decode(word: int) -> Float32Fields:
    word &= 0xFFFFFFFF
    return Float32Fields(word >> 31, (word >> 23) & 0xFF, word & 0x7FFFFF)


def encode(f: Float32Fields) -> int:
    return ((f.sign & 1) << 31) | ((f.exponent & 0xFF) << 23) | (f.mantissa & 0x7FFFFF)


def classify(word: int) -> str:
    f = decode(word)
    if f.exponent == 0:
        return "zero" if f.mantissa == 0 else "subnormal"
    if f.exponent == 255:
        return "inf" if f.mantissa == 0 else "nan"
    return "normal"


def _require_normal(word: int) -> Float32Fields:
    cls = classify(word)
    if cls != "normal":
        raise UnsupportedOperand(f"{word:08x} is {cls}")
    return decode(word)


# -- stage oracles ----------------------------------------------------------

def align(big: Float32Fields, small: Float32Fields, cap: int = SHIFT_CAP) -> tuple[int, int, int]:
    """Return (x, y, sticky) as 27-bit magnitudes [sig | G R S] after aligning ``small``.

    ``big`` must have the larger or equal exponent.
    """
    shift = min(big.exponent - small.exponent, cap)
    x = big.significand << EXTRA
    wide = small.significand << 2            # room for guard and round
    kept = wide >> shift
    lost = wide & ((1 << shift) - 1)
    sticky = 1 if lost else 0
    y = (kept << 1) | sticky
    return x, y, sticky


def leading_zeros(x: int, width: int = 32) -> int:
    x &= (1 << width) - 1
    n = 0
    for i in range(width - 1, -1, -1):
        if x >> i & 1:
            break
        n += 1
    return n


def normalize(mag: int) -> tuple[int, int]:
    """Normalize a 28-bit sum magnitude so bit 26 leads.

    Returns (normalized 27-bit magnitude, exponent delta).
    """
    if mag == 0:
        raise OutOfRange("zero", "exact cancellation")
    if mag >> 27:
        return mag >> 1, 1
    lz = leading_zeros(mag, 27)
    return mag << lz, -lz


def oracle_add_rtz(a: int, b: int) -> int:
    """Add two normal binary32 words following the swap/align/add/normalize/truncate recipe."""
    fa, fb = _require_normal(a), _require_normal(b)
    if fa.exponent < fb.exponent:
        fa, fb = fb, fa
    x, y, _ = align(fa, fb)
    vx = -x if fa.sign else x
    vy = -y if fb.sign else y
    total = vx + vy
    sign = 1 if total < 0 else 0
    mag, de = normalize(abs(total))
    exp = fa.exponent + de
    if exp > 254:
        raise OutOfRange("overflow", f"exponent {exp}")
    if exp < 1:
        raise OutOfRange("underflow", f"exponent {exp}")
    return encode(Float32Fields(sign, exp, (mag >> EXTRA) & 0x7FFFFF))


def exact_add_rtz(a: int, b: int) -> int:
    """Cap-free reference: exact rational sum truncated to 24 significant bits."""
    fa, fb = _require_normal(a), _require_normal(b)
    lo = min(fa.exponent, fb.exponent)
    va = fa.significand << (fa.exponent - lo)
    vb = fb.significand << (fb.exponent - lo)
    total = (-va if fa.sign else va) + (-vb if fb.sign else vb)
    if total == 0:
        raise OutOfRange("zero", "exact cancellation")
    sign = 1 if total < 0 else 0
    mag = abs(total)
    # value = mag * 2^(lo - 127 - 23); keep the top 24 bits
    nbits = mag.bit_length()
    drop = nbits - SIG_BITS
    sig = mag >> drop if drop >= 0 else mag << -drop
    exp = lo + drop
    if exp > 254:
        raise OutOfRange("overflow", f"exponent {exp}")
    if exp < 1:
        raise OutOfRange("underflow", f"exponent {exp}")
    return encode(Float32Fields(sign, exp, sig & 0x7FFFFF))


def pair_status(a: int, b: int) -> str:
    """'ok', 'unsupported', 'zero', 'overflow' or 'underflow'."""
    try:
        oracle_add_rtz(a, b)
    except UnsupportedOperand:
        return "unsupported"
    except OutOfRange as e:
        return e.kind
    return "ok"


def to_hex(word: int) -> str:
    return f"{word & 0xFFFFFFFF:08x}"
