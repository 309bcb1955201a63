"""Distillation circuits over a bounded register, with validation and JSON IO.

A circuit runs against a register of R slots per node.  Execution starts
with min(N, R) slots filled with fresh raw copies; each Measure consumes a
copy and frees its slot, each Refill draws a new raw copy into a freed
slot.  A valid circuit consumes exactly N raw copies overall and leaves
exactly K live (unmeasured) copies at the end.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .bits import PAULIS
from .gates import BGate, Gate, HGate, HKind
from .noise import NoiseModel

BASES = ("Z", "X")


@dataclass(frozen=True)
class GateOp:
    """Homogeneous or bilocal gate on the copies in slots (copy_a, copy_b)."""

    gate: Gate
    copy_a: int
    copy_b: int


@dataclass(frozen=True)
class PauliOp:
    copy: int
    qubit: int
    pauli: str


@dataclass(frozen=True)
class MeasureOp:
    copy: int
    basis: str


@dataclass(frozen=True)
class RefillOp:
    slot: int


@dataclass(frozen=True)
class TwirlOp:
    """Isotropic error symmetrization of one copy (protocol building block,
    not part of the optimizer's gate alphabet)."""

    copy: int


Element = Union[GateOp, PauliOp, MeasureOp, RefillOp, TwirlOp]


@dataclass(frozen=True)
class Circuit:
    elements: tuple = ()

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class CircuitConfig:
    """Run parameters: n qubits per copy, N raw copies consumed, K outputs,
    register size R (max simultaneously live copies per node)."""

    n: int
    N: int
    K: int
    R: int
    noise: NoiseModel = NoiseModel()
    f_in: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2 qubits per copy")
        # K == N is permitted so the empty circuit is expressible
        if not 1 <= self.K <= self.N:
            raise ValueError("need 1 <= K <= N")
        if self.R < 2 and self.N > self.K:
            raise ValueError("need R >= 2 to apply any two-copy gate")
        if self.K > self.R:
            raise ValueError("outputs cannot exceed the register size")
        if not 0.0 <= self.f_in <= 1.0:
            raise ValueError("f_in must be in [0, 1]")

    @property
    def initial_fill(self) -> int:
        return min(self.N, self.R)


@dataclass(frozen=True)
class Violation:
    index: int  # element index, or -1 for end-of-circuit accounting
    rule: str
    message: str

    def __str__(self):
        where = f"element {self.index}" if self.index >= 0 else "end of circuit"
        return f"{where}: [{self.rule}] {self.message}"


def validate(circuit: Circuit, config: CircuitConfig) -> list[Violation]:
    """Symbolic dry run; empty result iff every register/budget invariant holds."""
    out: list[Violation] = []
    live = set(range(config.initial_fill))
    consumed = config.initial_fill

    def check_live(idx, slot, what):
        if not 0 <= slot < config.R:
            out.append(Violation(idx, "slot-range", f"{what} slot {slot} outside register 0..{config.R - 1}"))
            return False
        if slot not in live:
            out.append(Violation(idx, "dead-copy", f"{what} targets measured/empty slot {slot}"))
            return False
        return True

    for idx, el in enumerate(circuit.elements):
        if isinstance(el, GateOp):
            if el.copy_a == el.copy_b:
                out.append(Violation(idx, "copy-pair", "gate needs two distinct copies"))
                continue
            ok = check_live(idx, el.copy_a, "gate") & check_live(idx, el.copy_b, "gate")
            if isinstance(el.gate, BGate) and el.gate.nodes[1] > config.n:
                out.append(Violation(idx, "node-range", f"node pair {el.gate.nodes} outside 1..{config.n}"))
            del ok
        elif isinstance(el, PauliOp):
            check_live(idx, el.copy, "Pauli")
            if not 1 <= el.qubit <= config.n:
                out.append(Violation(idx, "qubit-range", f"qubit {el.qubit} outside 1..{config.n}"))
            if el.pauli not in PAULIS:
                out.append(Violation(idx, "pauli-kind", f"unknown Pauli {el.pauli!r}"))
        elif isinstance(el, MeasureOp):
            if el.basis not in BASES:
                out.append(Violation(idx, "basis", f"basis must be Z or X, got {el.basis!r}"))
            if check_live(idx, el.copy, "measurement"):
                live.discard(el.copy)
        elif isinstance(el, RefillOp):
            if not 0 <= el.slot < config.R:
                out.append(Violation(idx, "slot-range", f"refill slot {el.slot} outside register"))
            elif el.slot in live:
                out.append(Violation(idx, "register-overflow", f"refill into occupied slot {el.slot}"))
            elif consumed >= config.N:
                out.append(Violation(idx, "raw-budget", f"refill would consume raw copy {consumed + 1} > N={config.N}"))
            else:
                live.add(el.slot)
                consumed += 1
        elif isinstance(el, TwirlOp):
            check_live(idx, el.copy, "twirl")
        else:
            out.append(Violation(idx, "element-kind", f"unknown element {el!r}"))

    if consumed != config.N:
        out.append(Violation(-1, "raw-budget", f"circuit consumes {consumed} raw copies, config requires N={config.N}"))
    if len(live) != config.K:
        out.append(Violation(-1, "outputs", f"{len(live)} copies remain live, config requires K={config.K}"))
    return out


# -- JSON circuit files ---------------------------------------------------------

CIRCUIT_FORMAT_VERSION = 1


def element_to_json(el: Element) -> dict:
    if isinstance(el, GateOp):
        if isinstance(el.gate, HGate):
            return {"kind": "h", "gate": el.gate.kind.name,
                    "copies": [el.copy_a, el.copy_b]}
        g = el.gate
        return {"kind": "b", "cz": int(g.cz), "s1": int(g.s1), "s2": int(g.s2),
                "nodes": list(g.nodes), "copies": [el.copy_a, el.copy_b]}
    if isinstance(el, PauliOp):
        return {"kind": "pauli", "copy": el.copy, "qubit": el.qubit, "pauli": el.pauli}
    if isinstance(el, MeasureOp):
        return {"kind": "measure", "copy": el.copy, "basis": el.basis}
    if isinstance(el, RefillOp):
        return {"kind": "refill", "slot": el.slot}
    if isinstance(el, TwirlOp):
        return {"kind": "twirl", "copy": el.copy}
    raise TypeError(f"unknown element {el!r}")


def element_from_json(doc: dict, index: int = -1) -> Element:
    try:
        kind = doc["kind"]
        if kind == "h":
            return GateOp(HGate(HKind[doc["gate"]]), *doc["copies"])
        if kind == "b":
            return GateOp(
                BGate(bool(doc["cz"]), bool(doc["s1"]), bool(doc["s2"]), tuple(doc["nodes"])),
                *doc["copies"],
            )
        if kind == "pauli":
            return PauliOp(doc["copy"], doc["qubit"], doc["pauli"])
        if kind == "measure":
            return MeasureOp(doc["copy"], doc["basis"])
        if kind == "refill":
            return RefillOp(doc["slot"])
        if kind == "twirl":
            return TwirlOp(doc["copy"])
        raise ValueError(f"unknown element kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise CircuitParseError(f"element {index}: {exc}") from exc


class CircuitParseError(ValueError):
    pass


def circuit_to_json(circuit: Circuit, n: int, N: int, K: int, R: int) -> str:
    doc = {
        "version": CIRCUIT_FORMAT_VERSION,
        "n": n, "N": N, "K": K, "R": R,
        "elements": [element_to_json(el) for el in circuit.elements],
    }
    return json.dumps(doc, indent=2)


def circuit_from_json(text: str):
    """Returns (circuit, dims) with dims = {"n", "N", "K", "R"}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != CIRCUIT_FORMAT_VERSION:
        raise CircuitParseError(f"expected a circuit document with version={CIRCUIT_FORMAT_VERSION}")
    missing = [k for k in ("n", "N", "K", "R", "elements") if k not in doc]
    if missing:
        raise CircuitParseError(f"missing fields: {', '.join(missing)}")
    elements = tuple(
        element_from_json(el, i) for i, el in enumerate(doc["elements"])
    )
    dims = {k: int(doc[k]) for k in ("n", "N", "K", "R")}
    return Circuit(elements), dims
