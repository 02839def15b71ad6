"""Gate-level circuit IR and a sparse statevector simulator.

Registers are named runs of qubits, little-endian (bit 0 of a register is
its least significant bit and lowest global qubit index).  Gates carry an
optional list of (qubit, value) controls; a gate fires on a basis state
only when every control bit matches.

The simulator keeps the state as a dict {basis int: amplitude}.  Oracle
circuits here are basis-state permutations (with phases), so a basis input
stays a single key; the few superposing gates (H, Ry and the three-way
neighbor-slot preparation) fan a key into at most two, which keeps
exhaustive sweeps over every basis input cheap even at 30+ qubits.

Reversible arithmetic (`add`, `sub`, `lt`) and table lookups execute
functionally on the keys; `expand_composites` rewrites them into a
CNOT/Toffoli ripple-carry form (MAJ/UMA chains) that the tests check
against the functional behavior exhaustively on small widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PRUNE_EPS = 1e-15


@dataclass(frozen=True)
class Register:
    name: str
    offset: int
    width: int

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.width:
            raise IndexError(f"bit {i} out of register {self.name}[{self.width}]")
        return self.offset + i

    def __len__(self) -> int:
        return self.width

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(range(self.offset, self.offset + self.width))


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...] = ()
    controls: tuple[tuple[int, int], ...] = ()
    theta: float = 0.0
    a: tuple[int, ...] = ()       # operand bits (source / index)
    b: tuple[int, ...] = ()       # operand bits (destination / value)
    table: tuple[int, ...] = ()


def _norm_controls(controls) -> tuple[tuple[int, int], ...]:
    return tuple((int(q), int(v)) for q, v in controls) if controls else ()


class Circuit:
    def __init__(self):
        self.registers: dict[str, Register] = {}
        self.n_qubits = 0
        self.gates: list[Gate] = []

    def register(self, name: str, width: int) -> Register:
        if name in self.registers:
            raise ValueError(f"register {name!r} already declared")
        reg = Register(name, self.n_qubits, width)
        self.registers[name] = reg
        self.n_qubits += width
        return reg

    def _append(self, gate: Gate) -> None:
        for q in (*gate.targets, *gate.a, *gate.b, *(q for q, _ in gate.controls)):
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit {q} outside circuit of {self.n_qubits} qubits")
        self.gates.append(gate)

    # -- elementary gates ------------------------------------------------
    def x(self, q, controls=()):
        self._append(Gate("x", (q,), _norm_controls(controls)))

    def z(self, q, controls=()):
        self._append(Gate("z", (q,), _norm_controls(controls)))

    def s(self, q, controls=()):
        self._append(Gate("s", (q,), _norm_controls(controls)))

    def sdg(self, q, controls=()):
        self._append(Gate("sdg", (q,), _norm_controls(controls)))

    def h(self, q, controls=()):
        self._append(Gate("h", (q,), _norm_controls(controls)))

    def ry(self, q, theta, controls=()):
        self._append(Gate("ry", (q,), _norm_controls(controls), theta=float(theta)))

    def swap(self, q1, q2, controls=()):
        self._append(Gate("swap", (q1, q2), _norm_controls(controls)))

    def gphase(self, theta, controls=()):
        self._append(Gate("gphase", (), _norm_controls(controls), theta=float(theta)))

    # -- reversible composites --------------------------------------------
    def add(self, src_bits, dst_bits, controls=()):
        """dst += src mod 2**len(dst); src unchanged."""
        self._append(Gate("add", a=tuple(src_bits), b=tuple(dst_bits),
                          controls=_norm_controls(controls)))

    def sub(self, src_bits, dst_bits, controls=()):
        self._append(Gate("sub", a=tuple(src_bits), b=tuple(dst_bits),
                          controls=_norm_controls(controls)))

    def compare_lt(self, a_bits, b_bits, flag, controls=()):
        """flag ^= [a < b], unsigned; operands unchanged."""
        self._append(Gate("lt", (flag,), _norm_controls(controls),
                          a=tuple(a_bits), b=tuple(b_bits)))

    def lookup(self, index_bits, value_bits, table, controls=()):
        """value ^= table[index]."""
        self._append(Gate("lookup", a=tuple(index_bits), b=tuple(value_bits),
                          table=tuple(int(t) for t in table),
                          controls=_norm_controls(controls)))


# -- gate algebra ---------------------------------------------------------

_INVERSE = {"x": "x", "z": "z", "h": "h", "swap": "swap", "lt": "lt",
            "lookup": "lookup", "s": "sdg", "sdg": "s", "add": "sub", "sub": "add"}


def inverted_gates(gates) -> list[Gate]:
    out = []
    for g in reversed(gates):
        if g.kind in ("ry", "gphase"):
            out.append(Gate(g.kind, g.targets, g.controls, theta=-g.theta, a=g.a, b=g.b,
                            table=g.table))
        else:
            out.append(Gate(_INVERSE[g.kind], g.targets, g.controls, theta=g.theta,
                            a=g.a, b=g.b, table=g.table))
    return out


def controlled_gates(gates, extra_controls) -> list[Gate]:
    extra = _norm_controls(extra_controls)
    return [Gate(g.kind, g.targets, g.controls + extra, theta=g.theta, a=g.a, b=g.b,
                 table=g.table) for g in gates]


def inverse(circ: Circuit) -> Circuit:
    inv = Circuit()
    inv.registers = dict(circ.registers)
    inv.n_qubits = circ.n_qubits
    inv.gates = inverted_gates(circ.gates)
    return inv


# -- simulation -----------------------------------------------------------

def _gather(key: int, bits) -> int:
    v = 0
    for i, q in enumerate(bits):
        v |= ((key >> q) & 1) << i
    return v


def _scatter(key: int, bits, value: int) -> int:
    for i, q in enumerate(bits):
        if (value >> i) & 1:
            key |= 1 << q
        else:
            key &= ~(1 << q)
    return key


class SparseState:
    """Statevector as {basis int: amplitude} over a circuit's registers."""

    def __init__(self, circuit: Circuit, amps: dict[int, complex]):
        self.circuit = circuit
        self.amps = amps

    @classmethod
    def from_basis(cls, circuit: Circuit, init: dict[str, int] | None = None):
        key = 0
        for name, value in (init or {}).items():
            reg = circuit.registers[name]
            if not 0 <= value < (1 << reg.width):
                raise ValueError(f"{value} does not fit register {name}[{reg.width}]")
            key = _scatter(key, reg.bits, value)
        return cls(circuit, {key: 1.0 + 0.0j})

    def value(self, key: int, name: str) -> int:
        return _gather(key, self.circuit.registers[name].bits)

    def assignment(self, key: int) -> dict[str, int]:
        return {name: _gather(key, reg.bits) for name, reg in self.circuit.registers.items()}

    def amplitude(self, assign: dict[str, int]) -> complex:
        key = 0
        for name, value in assign.items():
            key = _scatter(key, self.circuit.registers[name].bits, value)
        return self.amps.get(key, 0.0 + 0.0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amps.values()))

    def postselect(self, conditions: dict[str, int]) -> tuple["SparseState", float]:
        """Keep keys matching the register values; renormalize.

        Returns the renormalized state and the success probability.
        """
        kept = {}
        for key, amp in self.amps.items():
            if all(self.value(key, name) == val for name, val in conditions.items()):
                kept[key] = amp
        prob = sum(abs(a) ** 2 for a in kept.values())
        if prob > 0.0:
            scale = 1.0 / math.sqrt(prob)
            kept = {k: a * scale for k, a in kept.items()}
        return SparseState(self.circuit, kept), prob

    def dense(self) -> np.ndarray:
        if self.circuit.n_qubits > 24:
            raise ValueError("dense vector too large")
        vec = np.zeros(1 << self.circuit.n_qubits, dtype=complex)
        for key, amp in self.amps.items():
            vec[key] = amp
        return vec


def _apply(gate: Gate, amps: dict[int, complex]) -> dict[int, complex]:
    kind = gate.kind
    ctrl = gate.controls

    def ok(key):
        return all((key >> q) & 1 == v for q, v in ctrl)

    if kind in ("x", "swap", "add", "sub", "lt", "lookup"):
        out = {}
        for key, amp in amps.items():
            if not ok(key):
                out[key] = amp
                continue
            if kind == "x":
                key ^= 1 << gate.targets[0]
            elif kind == "swap":
                q1, q2 = gate.targets
                b1, b2 = (key >> q1) & 1, (key >> q2) & 1
                if b1 != b2:
                    key ^= (1 << q1) | (1 << q2)
            elif kind in ("add", "sub"):
                w = len(gate.b)
                src = _gather(key, gate.a)
                dst = _gather(key, gate.b)
                dst = (dst + src) % (1 << w) if kind == "add" else (dst - src) % (1 << w)
                key = _scatter(key, gate.b, dst)
            elif kind == "lt":
                if _gather(key, gate.a) < _gather(key, gate.b):
                    key ^= 1 << gate.targets[0]
            else:  # lookup
                key = _scatter(key, gate.b,
                               _gather(key, gate.b) ^ gate.table[_gather(key, gate.a)])
            out[key] = amp
        return out

    if kind in ("z", "s", "sdg", "gphase"):
        phase = {"z": -1.0, "s": 1j, "sdg": -1j}.get(kind)
        out = {}
        for key, amp in amps.items():
            if ok(key):
                if kind == "gphase":
                    amp = amp * complex(math.cos(gate.theta), math.sin(gate.theta))
                elif (key >> gate.targets[0]) & 1:
                    amp = amp * phase
            out[key] = amp
        return out

    if kind in ("h", "ry"):
        t = gate.targets[0]
        if kind == "h":
            m00 = m01 = m10 = 1.0 / math.sqrt(2.0)
            m11 = -m00
        else:
            cth, sth = math.cos(gate.theta / 2.0), math.sin(gate.theta / 2.0)
            m00, m01, m10, m11 = cth, -sth, sth, cth
        out: dict[int, complex] = {}
        for key, amp in amps.items():
            if not ok(key):
                out[key] = out.get(key, 0.0) + amp
                continue
            k0, k1 = key & ~(1 << t), key | (1 << t)
            if (key >> t) & 1:
                out[k0] = out.get(k0, 0.0) + amp * m01
                out[k1] = out.get(k1, 0.0) + amp * m11
            else:
                out[k0] = out.get(k0, 0.0) + amp * m00
                out[k1] = out.get(k1, 0.0) + amp * m10
        return {k: a for k, a in out.items() if abs(a) > PRUNE_EPS}

    raise ValueError(f"unknown gate kind {kind!r}")


def simulate(circ: Circuit, init: dict[str, int] | None = None) -> SparseState:
    state = SparseState.from_basis(circ, init)
    amps = state.amps
    for gate in circ.gates:
        amps = _apply(gate, amps)
    state.amps = amps
    return state


def run_basis(circ: Circuit, init: dict[str, int] | None = None) -> dict[str, int]:
    """Apply a permutation-style circuit to a basis input.

    Asserts the output is a single basis state of unit magnitude and
    returns its register values.
    """
    state = simulate(circ, init)
    if len(state.amps) != 1:
        raise AssertionError(f"not a basis permutation: {len(state.amps)} output keys")
    key, amp = next(iter(state.amps.items()))
    if abs(abs(amp) - 1.0) > 1e-9:
        raise AssertionError(f"output magnitude {abs(amp)} != 1")
    return state.assignment(key)


# -- ripple-carry expansions ----------------------------------------------

def _maj(gates, c, b, a, controls):
    gates.append(Gate("x", (b,), _norm_controls([(a, 1), *controls])))
    gates.append(Gate("x", (c,), _norm_controls([(a, 1), *controls])))
    gates.append(Gate("x", (a,), _norm_controls([(c, 1), (b, 1), *controls])))


def _uma(gates, c, b, a, controls):
    gates.append(Gate("x", (a,), _norm_controls([(c, 1), (b, 1), *controls])))
    gates.append(Gate("x", (c,), _norm_controls([(a, 1), *controls])))
    gates.append(Gate("x", (b,), _norm_controls([(c, 1), *controls])))


def _adder_expansion(a_bits, b_bits, scratch, controls) -> list[Gate]:
    """b += a mod 2**w as a MAJ/UMA ripple chain (no carry out)."""
    gates: list[Gate] = []
    w = len(b_bits)
    carries = [scratch, *a_bits[:-1]]
    for i in range(w):
        _maj(gates, carries[i], b_bits[i], a_bits[i], controls)
    for i in reversed(range(w)):
        _uma(gates, carries[i], b_bits[i], a_bits[i], controls)
    return gates


def _comparator_expansion(a_bits, b_bits, flag, scratch, controls) -> list[Gate]:
    """flag ^= [a < b] via the carry of b + ~a; operands restored."""
    gates: list[Gate] = []
    w = len(a_bits)
    for q in a_bits:
        gates.append(Gate("x", (q,), _norm_controls(controls)))
    carries = [scratch, *a_bits[:-1]]
    chain: list[Gate] = []
    for i in range(w):
        _maj(chain, carries[i], b_bits[i], a_bits[i], controls)
    gates.extend(chain)
    gates.append(Gate("x", (flag,), _norm_controls([(a_bits[-1], 1), *controls])))
    gates.extend(inverted_gates(chain))
    for q in a_bits:
        gates.append(Gate("x", (q,), _norm_controls(controls)))
    return gates


def _lookup_expansion(index_bits, value_bits, table, controls) -> list[Gate]:
    gates: list[Gate] = []
    n = len(index_bits)
    for idx, entry in enumerate(table):
        if entry == 0:
            continue
        pattern = [(q, (idx >> i) & 1) for i, q in enumerate(index_bits)]
        for i, q in enumerate(value_bits):
            if (entry >> i) & 1:
                gates.append(Gate("x", (q,), _norm_controls(pattern + list(controls))))
    return gates


def expand_composites(circ: Circuit) -> Circuit:
    """Rewrite add/sub/lt/lookup into elementary gates (one scratch qubit)."""
    out = Circuit()
    out.registers = dict(circ.registers)
    out.n_qubits = circ.n_qubits
    scratch = out.register("scratch", 1)[0] if any(
        g.kind in ("add", "sub", "lt") for g in circ.gates) else None
    for g in circ.gates:
        if g.kind == "add":
            out.gates.extend(_adder_expansion(g.a, g.b, scratch, g.controls))
        elif g.kind == "sub":
            out.gates.extend(inverted_gates(_adder_expansion(g.a, g.b, scratch, g.controls)))
        elif g.kind == "lt":
            out.gates.extend(
                _comparator_expansion(g.a, g.b, g.targets[0], scratch, g.controls))
        elif g.kind == "lookup":
            out.gates.extend(_lookup_expansion(g.a, g.b, g.table, g.controls))
        else:
            out.gates.append(g)
    return out


# -- text dump -------------------------------------------------------------

def circuit_text(circ: Circuit) -> str:
    """Stable line-oriented dump for golden-file comparisons."""
    lines = [f"reg {r.name} {r.offset} {r.width}" for r in circ.registers.values()]
    for g in circ.gates:
        parts = [g.kind]
        if g.controls:
            parts.append("c=" + ",".join(f"{'+' if v else '-'}{q}" for q, v in g.controls))
        if g.targets:
            parts.append("t=" + ",".join(str(q) for q in g.targets))
        if g.a:
            parts.append("a=" + ",".join(str(q) for q in g.a))
        if g.b:
            parts.append("b=" + ",".join(str(q) for q in g.b))
        if g.kind in ("ry", "gphase"):
            parts.append(f"theta={g.theta:.17g}")
        if g.table:
            parts.append("table=" + ",".join(str(t) for t in g.table))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
