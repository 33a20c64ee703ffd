"""Compile dual verifier pairs into gap-amplitude circuits and run them.

Five constructions share one wire layout, registers in the fixed order
x (n wires), b (m wires), c, a, and s (when present):

* the unitary gap-amplitude circuit: Hadamards on b and c, the two verifier
  oracles XORed onto a (conditioned on c = 0 resp. c = 1), Hadamards on b,
  then a Hadamard on a — after which the b = 0...0 block carries amplitude
  1/2 on |c 0> and the normalized half-gap delta_c on |c 1>;
* its zero-error / postselected extension: a multiply-controlled NOT flags
  success on s, the last three wires are cyclically relabeled so the flag
  sits second-to-last and the answer last, and a diag(p, 1) stage (p = 2^-m
  via B gates, a generic exact p, or a projector) suppresses failure mass;
* the uncomputing variant: flag, one S gate on s, then the whole unitary
  block inverted under an s = 0 control, leaving the b and a ancillas at 0
  in every surviving component;
* the exact deciders: the uncomputed state is fed through B^m and a scaling
  gate matching the half-gap witness, and a D gate cancels the |00> tail
  exactly, leaving the single term (h/2^m)|x>|1>|L(x)> — with the scaling
  gate either input-length dependent (diag(h, 1)) or expanded into t copies
  of the fixed gate diag(M, 1) when h = M^t.

Checkpoints label the intermediate states (psi_1..psi_3, flagged, cycled,
phi_1..phi_4, swapped, scaled) so each displayed identity can be checked
term by term.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from quasiq.exactnum import ZERO, Amplitude
from quasiq.quasistate import Gate, StateVector, key_of, label_of
from quasiq.verifierkit import DualVerifierPair, HalfGapFunction

VERDICT_YES = "YES"
VERDICT_NO = "NO"
VERDICT_FAIL = "FAIL-branch-mass"
VERDICT_POSTSELECTED = "POSTSELECTED"

GATE_CHOICES = ("bm", "n", "proj1")


class RegisterMismatchError(ValueError):
    """Input or verifier sizes do not fit the circuit's registers."""


class AncillaRestorationError(ValueError):
    """A surviving component left an ancilla wire nonzero."""

    def __init__(self, message: str, term: str):
        super().__init__(message)
        self.term = term


class ResidualTermError(ValueError):
    """The decider output is not the expected single basis term."""

    def __init__(self, message: str, residuals: list[str]):
        super().__init__(message)
        self.residuals = residuals


class PostselectionError(ValueError):
    """The postselected event has zero mass (signals an invalid pair)."""


class SimulationInvariantError(RuntimeError):
    """Simulation and oracle disagree; construction bug or invalid pair."""


@dataclass
class Circuit:
    """Gate list on named registers, with labeled checkpoint positions."""

    width: int
    registers: dict[str, tuple[int, int]]
    gates: tuple[Gate, ...]
    checkpoints: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        labels = [label for label, _ in self.checkpoints]
        if len(labels) != len(set(labels)):
            raise ValueError("checkpoint labels must be unique")
        for gate in self.gates:
            for w in gate.all_wires():
                if not 0 <= w < self.width:
                    raise RegisterMismatchError(f"gate wire {w} outside width {self.width}")

    def register_wires(self, name: str) -> tuple[int, ...]:
        start, length = self.registers[name]
        return tuple(range(start, start + length))

    def wire(self, name: str) -> int:
        start, length = self.registers[name]
        if length != 1:
            raise ValueError(f"register {name!r} spans {length} wires")
        return start

    def checkpoint_labels(self) -> list[str]:
        return [label for label, _ in self.checkpoints]

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "registers": {name: list(span) for name, span in self.registers.items()},
            "gates": [g.to_json() for g in self.gates],
            "checkpoints": [[label, pos] for label, pos in self.checkpoints],
        }

    @classmethod
    def from_json(cls, obj: dict, verifiers: dict | None = None) -> Circuit:
        return cls(
            width=obj["width"],
            registers={name: tuple(span) for name, span in obj["registers"].items()},
            gates=tuple(Gate.from_json(g, verifiers) for g in obj["gates"]),
            checkpoints=tuple((label, pos) for label, pos in obj["checkpoints"]),
        )


def gate_alphabet(circuit: Circuit) -> set[str]:
    """Display labels of every gate used, controlled X collapsing to CNOT/TOFFOLI/MCX."""
    return {gate.label() for gate in circuit.gates}


def simulate_circuit(circuit: Circuit, x_bits, record=False) -> tuple[StateVector, dict[str, StateVector]]:
    """Run the circuit on |x>|0...0> and capture checkpoint states.

    record: False for none, True for all checkpoints, or an iterable of labels.
    """
    n = circuit.registers["x"][1]
    if len(x_bits) != n:
        raise RegisterMismatchError(f"input has {len(x_bits)} bits, x register has {n} wires")
    if record is True:
        wanted = set(circuit.checkpoint_labels())
    elif record:
        wanted = set(record)
    else:
        wanted = set()
    by_position: dict[int, list[str]] = {}
    for label, pos in circuit.checkpoints:
        if label in wanted:
            by_position.setdefault(pos, []).append(label)

    state = StateVector.basis(circuit.width, key_of(x_bits) << (circuit.width - n))
    captured: dict[str, StateVector] = {}
    for label in by_position.get(0, ()):
        captured[label] = state
    for idx, gate in enumerate(circuit.gates, start=1):
        state = state.apply(gate)
        for label in by_position.get(idx, ()):
            captured[label] = state
    return state, captured


@dataclass
class RunOutcome:
    """Result of one simulation: exact masses, verdict, and checkpoint states."""

    construction: str
    input: str
    verdict: str
    answer: int | None
    success_mass: Amplitude
    failure_mass: Amplitude
    final_state: StateVector
    width: int
    checkpoints: dict[str, StateVector] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "construction": self.construction,
            "input": self.input,
            "verdict": self.verdict,
            "answer": self.answer,
            "success_mass": self.success_mass.to_json(),
            "failure_mass": self.failure_mass.to_json(),
            "width": self.width,
            "final_state": self.final_state.to_json(),
            "checkpoints": {label: s.to_json() for label, s in sorted(self.checkpoints.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> RunOutcome:
        width = obj["width"]
        return cls(
            construction=obj["construction"],
            input=obj["input"],
            verdict=obj["verdict"],
            answer=obj["answer"],
            success_mass=Amplitude.from_json(obj["success_mass"]),
            failure_mass=Amplitude.from_json(obj["failure_mass"]),
            final_state=StateVector.from_json(obj["final_state"], width),
            width=width,
            checkpoints={
                label: StateVector.from_json(dump, width)
                for label, dump in obj["checkpoints"].items()
            },
        )


# -- circuit builders -------------------------------------------------------------


def _registers(n: int, m: int, with_s: bool) -> dict[str, tuple[int, int]]:
    regs = {"x": (0, n), "b": (n, m), "c": (n + m, 1), "a": (n + m + 1, 1)}
    if with_s:
        regs["s"] = (n + m + 2, 1)
    return regs


def build_un(pair: DualVerifierPair, n: int) -> Circuit:
    """Unitary gap-amplitude circuit on registers (x, b, c, a)."""
    if pair.n != n:
        raise RegisterMismatchError(f"pair expects n = {pair.n}, circuit built for n = {n}")
    m = pair.m
    regs = _registers(n, m, with_s=False)
    b_wires = tuple(range(n, n + m))
    c, a = n + m, n + m + 1
    x_wires = tuple(range(n))
    gates: list[Gate] = [Gate.h(w) for w in b_wires]
    gates.append(Gate.h(c))
    gates.append(Gate.oracle(pair.v0, x_wires, b_wires, a, controls=((c, 0),)))
    gates.append(Gate.oracle(pair.v1, x_wires, b_wires, a, controls=((c, 1),)))
    pos_psi1 = len(gates)
    gates.extend(Gate.h(w) for w in b_wires)
    pos_psi2 = len(gates)
    gates.append(Gate.h(a))
    checkpoints = (("psi_1", pos_psi1), ("psi_2", pos_psi2), ("psi_3", len(gates)))
    return Circuit(n + m + 2, regs, tuple(gates), checkpoints)


def _success_flag_block(pair: DualVerifierPair, n: int) -> tuple[list[Gate], int, int, int]:
    """The MCX that writes the success flag: controls b = 0...0 and a = 1, target s."""
    m = pair.m
    b_wires = tuple(range(n, n + m))
    c, a, s = n + m, n + m + 1, n + m + 2
    controls = tuple((w, 0) for w in b_wires) + ((a, 1),)
    return [Gate.mcx(controls, s)], c, a, s


def build_fig3(pair: DualVerifierPair, n: int, gate_choice: str = "bm",
               p: Amplitude | None = None) -> Circuit:
    """Zero-error / postselected circuit: flag, cycle, then the diag(p, 1) stage.

    gate_choice picks the stage: "bm" uses m B gates (p = 2^-m), "n" a single
    diag(p, 1) with the given exact p, "proj1" the postselecting projector.
    """
    if gate_choice not in GATE_CHOICES:
        raise ValueError(f"gate_choice must be one of {GATE_CHOICES}")
    un = build_un(pair, n)
    m = pair.m
    flag, c, a, s = _success_flag_block(pair, n)
    gates = list(un.gates) + flag
    pos_flagged = len(gates)
    # Relabel the last three wires: the flag moves to a (second-to-last) and
    # the answer bit held on c moves to s (last).
    gates.append(Gate.perm((c, a, s), (s, c, a)))
    pos_cycled = len(gates)
    if gate_choice == "bm":
        gates.extend(Gate.b(a) for _ in range(m))
    elif gate_choice == "n":
        if not isinstance(p, Amplitude):
            raise ValueError("gate_choice 'n' needs an exact ring element p")
        gates.append(Gate.n(a, p))
    else:
        gates.append(Gate.proj(a, 1))
    checkpoints = (
        ("psi_3", len(un.gates)),
        ("flagged", pos_flagged),
        ("cycled", pos_cycled),
        ("final", len(gates)),
    )
    return Circuit(n + m + 3, _registers(n, m, with_s=True), tuple(gates), checkpoints)


def build_wn(pair: DualVerifierPair, n: int) -> Circuit:
    """Uncomputing circuit: flag on s, S gate, inverse unitary block under an
    s = 0 control, then a flip of a under an s = 1 control.

    Every surviving output component returns the b register and a to 0.
    """
    un = build_un(pair, n)
    m = pair.m
    flag, c, a, s = _success_flag_block(pair, n)
    gates = list(un.gates)
    pos_phi1 = len(gates)
    gates.extend(flag)
    pos_phi2 = len(gates)
    gates.append(Gate.s(s))
    pos_phi3 = len(gates)
    gates.extend(g.inverse().with_controls(((s, 0),)) for g in reversed(un.gates))
    gates.append(Gate.cnot(s, a))
    checkpoints = (
        ("phi_1", pos_phi1),
        ("phi_2", pos_phi2),
        ("phi_3", pos_phi3),
        ("phi_4", len(gates)),
    )
    return Circuit(n + m + 3, _registers(n, m, with_s=True), tuple(gates), checkpoints)


def _decider_tail(pair: DualVerifierPair, n: int, scaling: list[Gate]) -> Circuit:
    wn = build_wn(pair, n)
    m = pair.m
    c, s = n + m, n + m + 2
    gates = list(wn.gates)
    gates.append(Gate.swap(c, s))
    pos_swapped = len(gates)
    gates.extend(Gate.b(c) for _ in range(m))
    gates.extend(scaling)
    pos_scaled = len(gates)
    gates.append(Gate.d(c, s))
    checkpoints = wn.checkpoints + (
        ("swapped", pos_swapped),
        ("scaled", pos_scaled),
        ("final", len(gates)),
    )
    return Circuit(wn.width, wn.registers, tuple(gates), checkpoints)


def build_lwpp_decider(pair: DualVerifierPair, h, n: int) -> Circuit:
    """Exact decider with the input-length-dependent gate diag(h(n), 1).

    h may be a HalfGapFunction or a plain positive integer (the value at n).
    """
    hv = h.value(n) if isinstance(h, HalfGapFunction) else int(h)
    if hv < 1:
        raise ValueError(f"half-gap value must be positive, got {hv}")
    c = n + pair.m
    return _decider_tail(pair, n, [Gate.a(c, hv)])


def build_lpwpp_decider(pair: DualVerifierPair, base: int, t: int, n: int) -> Circuit:
    """Exact decider over the fixed gate alphabet: diag(h, 1) expanded into
    t copies of diag(base, 1), valid when h = base**t."""
    if base < 1:
        raise ValueError("gate base M must be at least 1")
    if t < 0:
        raise ValueError("exponent t must be nonnegative")
    c = n + pair.m
    return _decider_tail(pair, n, [Gate.g(c, base) for _ in range(t)])


# -- runs -------------------------------------------------------------------------


def _single_wire_value(state: StateVector, wire: int, context: str) -> int:
    values = {(key >> (state.width - 1 - wire)) & 1 for key, _ in state}
    if len(values) != 1:
        raise SimulationInvariantError(f"{context}: support spans both values of wire {wire}")
    return values.pop()


def run_un(pair: DualVerifierPair, x_bits, record=False) -> RunOutcome:
    """Run the unitary gap-amplitude circuit.

    success_mass is the mass of the b = 0...0, a = 1 block (the gap
    components); for a dual pair that block is a single term whose c bit is
    the language bit.
    """
    n = pair.n
    lx = pair.language_bit(tuple(x_bits))
    circuit = build_un(pair, n)
    final, captured = simulate_circuit(circuit, x_bits, record)
    pattern = "".join(str(b) for b in x_bits) + "0" * pair.m + "*1"
    block = final.match(pattern)
    success_mass = sum((amp * amp for _, amp in block), ZERO)
    failure_mass = final.norm_sq() - success_mass
    c = circuit.wire("c")
    gap_block = StateVector(final.width, dict(block))
    answer = _single_wire_value(gap_block, c, "gap-amplitude block")
    if answer != lx:
        raise SimulationInvariantError(
            f"gap-amplitude block sits on c = {answer}, oracle says L(x) = {lx}")
    return RunOutcome(
        construction="un",
        input="".join(str(b) for b in x_bits),
        verdict=VERDICT_YES if answer else VERDICT_NO,
        answer=answer,
        success_mass=success_mass,
        failure_mass=failure_mass,
        final_state=final,
        width=final.width,
        checkpoints=captured,
    )


def run_zqp(pair: DualVerifierPair, x_bits, record=False) -> RunOutcome:
    """Zero-error run with p = 2^-m: success flag on a, answer on s.

    The exact success probability is certified strictly greater than 1/2
    (success mass > failure mass), and the success-conditioned component is
    checked to carry zero mass on the wrong answer.
    """
    n = pair.n
    lx = pair.language_bit(tuple(x_bits))  # DualityError on an invalid pair
    circuit = build_fig3(pair, n, "bm")
    final, captured = simulate_circuit(circuit, x_bits, record)
    a, s = circuit.wire("a"), circuit.wire("s")
    success_mass, conditional = final.project(a, 1)
    failure_mass = final.norm_sq() - success_mass
    wrong_mass = sum(
        (amp * amp for key, amp in conditional
         if (key >> (final.width - 1 - s)) & 1 != lx),
        ZERO,
    )
    if not wrong_mass.is_zero():
        raise SimulationInvariantError(
            f"success-conditioned state has mass {wrong_mass} on answer {1 - lx}")
    if failure_mass < success_mass:
        answer = _single_wire_value(conditional, s, "zero-error conditional")
        verdict = VERDICT_YES if answer else VERDICT_NO
    else:
        answer = None
        verdict = VERDICT_FAIL
    return RunOutcome(
        construction="fig3-zqp",
        input="".join(str(b) for b in x_bits),
        verdict=verdict,
        answer=answer,
        success_mass=success_mass,
        failure_mass=failure_mass,
        final_state=final,
        width=final.width,
        checkpoints=captured,
    )


def run_posteqp(pair: DualVerifierPair, x_bits, record=False) -> RunOutcome:
    """Postselected run: project a onto 1; the conditional state must be
    supported entirely on the correct answer and have nonzero mass."""
    n = pair.n
    lx = pair.language_bit(tuple(x_bits))
    circuit = build_fig3(pair, n, "proj1")
    # The pre-projection state is always captured to report the rejected mass.
    wanted = True if record is True else set(record or ()) | {"cycled"}
    final, captured = simulate_circuit(circuit, x_bits, wanted)
    success_mass = final.norm_sq()
    if success_mass.is_zero():
        raise PostselectionError(
            f"postselection mass is zero at x = {''.join(str(b) for b in x_bits)} "
            "(signals an invalid pair)")
    pre_projection = captured["cycled"]
    failure_mass = pre_projection.norm_sq() - success_mass
    if not record:
        captured = {}
    elif record is not True:
        captured = {k: v for k, v in captured.items() if k in set(record)}
    s = circuit.wire("s")
    answer = _single_wire_value(final, s, "postselected state")
    if answer != lx:
        raise SimulationInvariantError(
            f"postselected answer {answer} contradicts the oracle value {lx}")
    return RunOutcome(
        construction="fig3-post",
        input="".join(str(b) for b in x_bits),
        verdict=VERDICT_POSTSELECTED,
        answer=answer,
        success_mass=success_mass,
        failure_mass=failure_mass,
        final_state=final,
        width=final.width,
        checkpoints=captured,
    )


def check_ancillas_restored(state: StateVector, circuit: Circuit) -> None:
    """Every surviving component must hold the b register and a at zero."""
    ancilla_wires = circuit.register_wires("b") + (circuit.wire("a"),)
    mask = 0
    for w in ancilla_wires:
        mask |= 1 << (state.width - 1 - w)
    for key, _ in state:
        if key & mask:
            term = label_of(key, state.width)
            raise AncillaRestorationError(
                f"component |{term}> leaves an ancilla nonzero", term=term)


def reduce_wires(state: StateVector, keep: tuple[int, ...]) -> StateVector:
    """Relabel onto the kept wires only; all dropped wires must be 0."""
    dropped_mask = 0
    for w in range(state.width):
        if w not in keep:
            dropped_mask |= 1 << (state.width - 1 - w)
    terms = {}
    for key, amp in state:
        if key & dropped_mask:
            raise ValueError(f"cannot drop nonzero wire in |{label_of(key, state.width)}>")
        new_key = 0
        for w in keep:
            new_key = (new_key << 1) | ((key >> (state.width - 1 - w)) & 1)
        terms[new_key] = amp
    return StateVector(len(keep), terms)


def run_wn(pair: DualVerifierPair, x_bits, record=False) -> RunOutcome:
    """Run the uncomputing circuit and verify ancilla restoration.

    success_mass is the mass of the s = 1 (gap-indicator) component; the
    answer is that component's c bit.
    """
    n = pair.n
    circuit = build_wn(pair, n)
    final, captured = simulate_circuit(circuit, x_bits, record)
    check_ancillas_restored(final, circuit)
    c, s = circuit.wire("c"), circuit.wire("s")
    success_mass, indicator = final.project(s, 1)
    failure_mass = final.norm_sq() - success_mass
    answer = None
    verdict = VERDICT_FAIL
    if not indicator.is_zero():
        answer = _single_wire_value(indicator, c, "gap-indicator component")
        verdict = VERDICT_YES if answer else VERDICT_NO
    return RunOutcome(
        construction="wn",
        input="".join(str(b) for b in x_bits),
        verdict=verdict,
        answer=answer,
        success_mass=success_mass,
        failure_mass=failure_mass,
        final_state=final,
        width=final.width,
        checkpoints=captured,
    )


def _run_decider(circuit: Circuit, construction: str, x_bits, record) -> RunOutcome:
    final, captured = simulate_circuit(circuit, x_bits, record)
    width = circuit.width
    x_label = "".join(str(b) for b in x_bits)
    expected_prefix = x_label + "0" * circuit.registers["b"][1] + "1" + "0"
    residuals = [
        label_of(key, width)
        for key, _ in final
        if not label_of(key, width).startswith(expected_prefix)
    ]
    if residuals or len(final) != 1:
        raise ResidualTermError(
            f"decider output is not a single clean term at x = {x_label}; "
            f"residual terms: {residuals or final.labels()}",
            residuals=residuals or final.labels(),
        )
    ((key, _),) = final.items_sorted()
    answer = key & 1
    return RunOutcome(
        construction=construction,
        input=x_label,
        verdict=VERDICT_YES if answer else VERDICT_NO,
        answer=answer,
        success_mass=final.norm_sq(),
        failure_mass=ZERO,
        final_state=final,
        width=width,
        checkpoints=captured,
    )


def run_lwpp(pair: DualVerifierPair, h, x_bits, record=False) -> RunOutcome:
    """Exact decider run; raises ResidualTermError when the half-gap witness
    fails to cancel the |00> tail."""
    return _run_decider(build_lwpp_decider(pair, h, pair.n), "lwpp", x_bits, record)


def run_lpwpp(pair: DualVerifierPair, base: int, t: int, x_bits, record=False) -> RunOutcome:
    return _run_decider(build_lpwpp_decider(pair, base, t, pair.n), "lpwpp", x_bits, record)
