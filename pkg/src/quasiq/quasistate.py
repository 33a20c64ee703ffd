"""Sparse exact statevector and the full gate alphabet.

Basis states are ints whose binary rendering (zero-padded to the wire count)
is the basis label: wire 0 is the leftmost character, so numeric order of
keys equals lexicographic order of labels.

Gates cover four families: unitary (H and the classical permutations),
invertible non-unitary (S, B, G, A, N, D and their inverses), projective
(PROJ0/PROJ1), and classical oracle gates that XOR a verifier's output onto
a target wire.  Any gate may carry coherent controls with explicit
polarities; a multiply-controlled X is just X with controls.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from quasiq.exactnum import HALF, INV_SQRT2, ONE, TWO, ZERO, Amplitude


class WireError(ValueError):
    """A gate references a wire outside the state's width."""


class NotInvertibleError(ValueError):
    """Projectors and N(0) have no inverse."""


class ProjectionError(ValueError):
    """Raised when projecting the zero state."""


def bits_of(key: int, width: int) -> tuple[int, ...]:
    return tuple((key >> (width - 1 - i)) & 1 for i in range(width))


def key_of(bits: Iterable[int]) -> int:
    key = 0
    for b in bits:
        key = (key << 1) | (b & 1)
    return key


def label_of(key: int, width: int) -> str:
    return format(key, f"0{width}b") if width else ""


def key_of_label(label: str) -> int:
    return int(label, 2) if label else 0


_WILDCARDS = frozenset("*.·")


def compile_pattern(pattern: str) -> tuple[int, int]:
    """Bit pattern with wildcards ('*', '.', or middle dot) -> (mask, value)."""
    mask = value = 0
    for ch in pattern:
        mask <<= 1
        value <<= 1
        if ch == "1":
            mask |= 1
            value |= 1
        elif ch == "0":
            mask |= 1
        elif ch not in _WILDCARDS:
            raise ValueError(f"bad pattern character {ch!r}")
    return mask, value


_SELF_INVERSE = {"H", "X", "ORACLE", "PROJ0", "PROJ1"}
_INVERSE_KIND = {
    "S": "SINV", "SINV": "S",
    "B": "BINV", "BINV": "B",
    "G": "GINV", "GINV": "G",
    "A": "AINV", "AINV": "A",
    "N": "NINV", "NINV": "N",
    "D": "DINV", "DINV": "D",
}


@dataclass(frozen=True)
class Gate:
    """One typed gate application on named wires.

    param holds the kind-specific data: an int for G/A (the |0>-branch
    multiplier), an Amplitude for N, the destination tuple for PERM, and
    (verifier, n_input_wires) for ORACLE.
    """

    kind: str
    wires: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    param: object = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def h(cls, wire: int, controls=()) -> Gate:
        return cls("H", (wire,), tuple(controls))

    @classmethod
    def x(cls, wire: int, controls=()) -> Gate:
        return cls("X", (wire,), tuple(controls))

    @classmethod
    def cnot(cls, control: int, target: int) -> Gate:
        return cls.x(target, controls=((control, 1),))

    @classmethod
    def toffoli(cls, c1: int, c2: int, target: int) -> Gate:
        return cls.x(target, controls=((c1, 1), (c2, 1)))

    @classmethod
    def mcx(cls, controls: Iterable[tuple[int, int]], target: int) -> Gate:
        return cls.x(target, controls=tuple(controls))

    @classmethod
    def s(cls, wire: int, controls=()) -> Gate:
        return cls("S", (wire,), tuple(controls))

    @classmethod
    def b(cls, wire: int, controls=()) -> Gate:
        return cls("B", (wire,), tuple(controls))

    @classmethod
    def g(cls, wire: int, base: int, controls=()) -> Gate:
        return cls("G", (wire,), tuple(controls), int(base))

    @classmethod
    def a(cls, wire: int, value: int, controls=()) -> Gate:
        return cls("A", (wire,), tuple(controls), int(value))

    @classmethod
    def n(cls, wire: int, p: Amplitude, controls=()) -> Gate:
        return cls("N", (wire,), tuple(controls), p)

    @classmethod
    def d(cls, first: int, second: int, controls=()) -> Gate:
        if first == second:
            raise WireError("D needs two distinct wires")
        return cls("D", (first, second), tuple(controls))

    @classmethod
    def proj(cls, wire: int, value: int) -> Gate:
        return cls("PROJ1" if value else "PROJ0", (wire,))

    @classmethod
    def perm(cls, sources: Iterable[int], dests: Iterable[int]) -> Gate:
        src, dst = tuple(sources), tuple(dests)
        if len(set(src)) != len(src) or sorted(src) != sorted(dst):
            raise WireError("PERM must relabel distinct wires within the same set")
        return cls("PERM", src, (), dst)

    @classmethod
    def swap(cls, w1: int, w2: int) -> Gate:
        return cls.perm((w1, w2), (w2, w1))

    @classmethod
    def oracle(cls, verifier, x_wires: Iterable[int], b_wires: Iterable[int],
               target: int, controls=()) -> Gate:
        xw, bw = tuple(x_wires), tuple(b_wires)
        return cls("ORACLE", xw + bw + (target,), tuple(controls), (verifier, len(xw)))

    # -- structure -----------------------------------------------------------

    def with_controls(self, extra: Iterable[tuple[int, int]]) -> Gate:
        return Gate(self.kind, self.wires, self.controls + tuple(extra), self.param)

    def inverse(self) -> Gate:
        if self.kind in _SELF_INVERSE:
            if self.kind.startswith("PROJ"):
                raise NotInvertibleError("projectors are not invertible")
            return self
        if self.kind == "PERM":
            return Gate("PERM", self.param, self.controls, self.wires)
        if self.kind in ("N", "NINV") and self.param.is_zero():
            raise NotInvertibleError("N(0) is not invertible")
        return Gate(_INVERSE_KIND[self.kind], self.wires, self.controls, self.param)

    def label(self) -> str:
        """Display name; controlled X renders as CNOT/TOFFOLI/MCX."""
        if self.kind == "X" and self.controls:
            if all(pol == 1 for _, pol in self.controls):
                if len(self.controls) == 1:
                    return "CNOT"
                if len(self.controls) == 2:
                    return "TOFFOLI"
            return "MCX"
        return self.kind

    def all_wires(self) -> tuple[int, ...]:
        return self.wires + tuple(w for w, _ in self.controls)

    def to_json(self) -> dict:
        obj: dict = {"kind": self.kind, "label": self.label(), "wires": list(self.wires)}
        if self.controls:
            obj["controls"] = [[w, p] for w, p in self.controls]
        if self.kind in ("G", "GINV", "A", "AINV"):
            obj["param"] = self.param
        elif self.kind in ("N", "NINV"):
            obj["param"] = self.param.to_json()
        elif self.kind == "PERM":
            obj["param"] = list(self.param)
        elif self.kind == "ORACLE":
            verifier, nx = self.param
            obj["param"] = {"verifier": getattr(verifier, "name", "?"), "n_input_wires": nx}
        return obj

    @classmethod
    def from_json(cls, obj: dict, verifiers: dict | None = None) -> Gate:
        kind = obj["kind"]
        wires = tuple(obj["wires"])
        controls = tuple((w, p) for w, p in obj.get("controls", []))
        param = obj.get("param")
        if kind in ("N", "NINV"):
            param = Amplitude.from_json(param)
        elif kind == "PERM":
            param = tuple(param)
        elif kind == "ORACLE":
            name, nx = param["verifier"], param["n_input_wires"]
            if verifiers is None or name not in verifiers:
                raise KeyError(f"no verifier named {name!r} to rebind the oracle gate")
            param = (verifiers[name], nx)
        return cls(kind, wires, controls, param)


class StateVector:
    """Map from basis keys to nonzero amplitudes over a fixed wire count."""

    __slots__ = ("width", "terms")

    def __init__(self, width: int, terms: dict[int, Amplitude] | None = None):
        self.width = width
        self.terms = {k: a for k, a in (terms or {}).items() if not a.is_zero()}

    @classmethod
    def basis(cls, width: int, key: int | str, amp: Amplitude = ONE) -> StateVector:
        if isinstance(key, str):
            if len(key) != width:
                raise WireError(f"label width {len(key)} != state width {width}")
            key = key_of_label(key)
        return cls(width, {key: amp})

    @classmethod
    def zero_state(cls, width: int) -> StateVector:
        return cls(width, {})

    # -- inspection ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def amplitude(self, key: int | str) -> Amplitude:
        if isinstance(key, str):
            key = key_of_label(key)
        return self.terms.get(key, ZERO)

    def items_sorted(self) -> list[tuple[int, Amplitude]]:
        return sorted(self.terms.items())

    def labels(self) -> list[str]:
        return [label_of(k, self.width) for k, _ in self.items_sorted()]

    def match(self, pattern: str) -> list[tuple[int, Amplitude]]:
        """All stored terms matching the wildcard pattern, in lexicographic order."""
        if len(pattern) != self.width:
            raise WireError(f"pattern width {len(pattern)} != state width {self.width}")
        mask, value = compile_pattern(pattern)
        return sorted((k, a) for k, a in self.terms.items() if k & mask == value)

    def norm_sq(self) -> Amplitude:
        total = ZERO
        for a in self.terms.values():
            total = total + a * a
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.width == other.width and self.terms == other.terms

    def __iter__(self) -> Iterator[tuple[int, Amplitude]]:
        return iter(self.items_sorted())

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        body = " + ".join(f"{a}|{label_of(k, self.width)}>" for k, a in self.items_sorted())
        return f"StateVector({body or '0'})"

    # -- linear structure ------------------------------------------------------

    def __add__(self, other: StateVector) -> StateVector:
        if self.width != other.width:
            raise WireError("width mismatch in superposition")
        out = dict(self.terms)
        for k, a in other.terms.items():
            out[k] = out.get(k, ZERO) + a
        return StateVector(self.width, out)

    def __sub__(self, other: StateVector) -> StateVector:
        return self + other.scale(Amplitude(-1, 0, 0))

    def scale(self, factor: Amplitude) -> StateVector:
        return StateVector(self.width, {k: a * factor for k, a in self.terms.items()})

    def filter_terms(self, keep) -> StateVector:
        return StateVector(self.width, {k: a for k, a in self.terms.items() if keep(k)})

    def append_wires(self, count: int) -> StateVector:
        """Tensor with |0...0> on new trailing wires."""
        return StateVector(self.width + count, {k << count: a for k, a in self.terms.items()})

    # -- gate application ------------------------------------------------------

    def apply(self, gate: Gate) -> StateVector:
        width = self.width
        for w in gate.all_wires():
            if not 0 <= w < width:
                raise WireError(f"wire {w} out of range for width {width}")
        if set(w for w, _ in gate.controls) & set(gate.wires):
            raise WireError("control wires overlap gate wires")
        cmask = cval = 0
        for w, pol in gate.controls:
            bit = 1 << (width - 1 - w)
            cmask |= bit
            if pol:
                cval |= bit
        out: dict[int, Amplitude] = {}

        def put(key: int, amp: Amplitude) -> None:
            prev = out.get(key)
            out[key] = amp if prev is None else prev + amp

        kind = gate.kind
        if kind == "ORACLE":
            verifier, nx = gate.param
            xw, bw, target = gate.wires[:nx], gate.wires[nx:-1], gate.wires[-1]
            if len(xw) != verifier.n or len(bw) != verifier.m:
                raise WireError(
                    f"oracle arity mismatch: gate has {len(xw)}+{len(bw)} wires, "
                    f"verifier wants {verifier.n}+{verifier.m}"
                )
        if kind == "PERM":
            shift = [(width - 1 - s, width - 1 - d) for s, d in zip(gate.wires, gate.param)]
            moved = 0
            for s, _ in shift:
                moved |= 1 << s

        for key, amp in self.terms.items():
            if key & cmask != cval:
                put(key, amp)
                continue
            if kind == "H":
                m = 1 << (width - 1 - gate.wires[0])
                scaled = amp * INV_SQRT2
                put(key & ~m, scaled)
                put(key | m, scaled if key & m == 0 else -scaled)
            elif kind == "X":
                put(key ^ (1 << (width - 1 - gate.wires[0])), amp)
            elif kind == "S":
                m = 1 << (width - 1 - gate.wires[0])
                put(key, amp)
                if key & m:
                    put(key & ~m, amp)
            elif kind == "SINV":
                m = 1 << (width - 1 - gate.wires[0])
                put(key, amp)
                if key & m:
                    put(key & ~m, -amp)
            elif kind in ("B", "BINV", "G", "GINV", "A", "AINV", "N", "NINV"):
                m = 1 << (width - 1 - gate.wires[0])
                if key & m:
                    put(key, amp)
                elif kind == "B":
                    put(key, amp * HALF)
                elif kind == "BINV":
                    put(key, amp * TWO)
                elif kind in ("G", "A"):
                    put(key, amp.scale_int(gate.param))
                elif kind in ("GINV", "AINV"):
                    put(key, amp.div_exact(Amplitude(gate.param, 0, 0)))
                elif kind == "N":
                    put(key, amp * gate.param)
                else:  # NINV
                    put(key, amp.div_exact(gate.param))
            elif kind in ("D", "DINV"):
                m1 = 1 << (width - 1 - gate.wires[0])
                m2 = 1 << (width - 1 - gate.wires[1])
                put(key, amp)
                if key & m1:
                    put(key & ~m1 & ~m2, -amp if kind == "D" else amp)
            elif kind == "PROJ0":
                if key & (1 << (width - 1 - gate.wires[0])) == 0:
                    put(key, amp)
            elif kind == "PROJ1":
                if key & (1 << (width - 1 - gate.wires[0])):
                    put(key, amp)
            elif kind == "PERM":
                new = key & ~moved
                for s, d in shift:
                    if key & (1 << s):
                        new |= 1 << d
                put(new, amp)
            elif kind == "ORACLE":
                xbits = tuple((key >> (width - 1 - w)) & 1 for w in xw)
                bbits = tuple((key >> (width - 1 - w)) & 1 for w in bw)
                if verifier.eval(xbits, bbits):
                    key ^= 1 << (width - 1 - target)
                put(key, amp)
            else:
                raise ValueError(f"unknown gate kind {kind!r}")
        return StateVector(width, out)

    # -- projection --------------------------------------------------------------

    def project(self, wire: int, value: int) -> tuple[Amplitude, StateVector]:
        """Project onto wire == value.

        Returns (success_mass, conditional): the squared norm of the projected
        component and the projected state left unnormalized, so probabilities
        stay exact ratios.
        """
        if self.is_zero():
            raise ProjectionError("cannot project the zero state")
        if not 0 <= wire < self.width:
            raise WireError(f"wire {wire} out of range for width {self.width}")
        m = 1 << (self.width - 1 - wire)
        want = m if value else 0
        conditional = self.filter_terms(lambda k: k & m == want)
        return conditional.norm_sq(), conditional

    # -- serialization --------------------------------------------------------------

    def to_json(self) -> list[dict]:
        """Lexicographically sorted dump; byte-stable for golden tests."""
        return [
            {"basis": label_of(k, self.width), "amp": a.to_json()}
            for k, a in self.items_sorted()
        ]

    @classmethod
    def from_json(cls, entries: list[dict], width: int | None = None) -> StateVector:
        if width is None:
            if not entries:
                raise ValueError("cannot infer width of an empty dump")
            width = len(entries[0]["basis"])
        terms = {
            key_of_label(entry["basis"]): Amplitude.from_json(entry["amp"])
            for entry in entries
        }
        return cls(width, terms)
