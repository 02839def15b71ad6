"""Amplitude encodings of oscillator dynamics and the block Hamiltonian.

Register ledger
---------------
An encoded state lives on ``axis (x) part (x) j (x) k`` with ``n`` address
bits per node register, stored as a dense tensor of shape (D, 2, N, N):

* part 0, slot (j, 0): velocity block, amplitude sqrt(m_j) xdot_j / sqrt(2E)
* part 1, slot (j, k), j < k: bond block, amplitude
  i sqrt(kappa_jk) (x_j - x_k) / sqrt(2E)

The alternative encoding reuses the same layout for one axis: part 0 holds
P y (null-space-projected mass-weighted displacements), part 1 holds
-i B^+ y_dot scattered over the bonded pairs, normalized by sqrt(2F).

Both are solutions of d/dt psi = -i H psi for the block Hamiltonian

    H = -[[0, B'], [B'^T, 0]]

acting on the part (x) j (x) k space of dimension 2 N^2, where B' is the
incidence matrix padded with zero columns on non-bonded pairs.  Exact
evolution diagonalizes the dense H; the gate-level block encoding below is
verified against H / sqrt(2 kappa/m d) by amplitude extraction and is never
used for time evolution.

Circuit block encodings (uniform mass and coupling):

* ``incidence_block_circuit``: slot superposition (1/sqrt(3)), connectivity
  oracle, comparator + order bit + controlled swaps, then Z and H on the
  order qubit.  Projecting slot, validity flag, scratch, comparator and
  order qubits onto |0> leaves B^T / sqrt(2 kappa/m d) between the node
  registers.
* ``diffusion_projector_circuit``: Hadamard, zero-controlled reflection
  2|0><0| - 1, Hadamard; its ancilla-|0> block is the all-zero projector.
* ``hamiltonian_block_circuit``: glues the two above with a part qubit so
  that the |0>-ancilla block is H / sqrt(2 kappa/m d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import enm
from .circuits import (Circuit, Gate, controlled_gates, inverted_gates, simulate)
from .enm import SystemMatrices
from .lattice import LatticeSpec, decode_index, neighbor
from .oracles import (_emit_coord_add, _emit_shift, _emit_slot_uncompute,
                      _emit_validation, emit_slot_superposition, node_value_bits)

DESK_DIM_LIMIT = 1 << 13


@dataclass
class EncodedState:
    tensor: np.ndarray            # (D, 2, N, N) complex
    tag: str                      # "standard" | "alternative"
    sys: SystemMatrices
    norm_constant: float          # E (standard) or F (alternative)
    e_max: float | None = None
    aa_round_estimate: int | None = None
    thetas: tuple[float, ...] = ()

    @property
    def n(self) -> int:
        return self.tensor.shape[-1]

    @property
    def axes(self) -> int:
        return self.tensor.shape[0]

    def vector(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensor))


def _uniform_coupling(sys: SystemMatrices) -> tuple[float, float, int]:
    kappas = np.array([sys.kappa[j, k] for j, k in sys.pairs])
    if len(kappas) == 0:
        raise ValueError("system has no bonds")
    if not (np.allclose(kappas, kappas[0]) and np.allclose(sys.masses, sys.masses[0])):
        raise ValueError("block encoding requires uniform coupling and mass")
    return float(kappas[0]), float(sys.masses[0]), sparsity(sys)


def sparsity(sys: SystemMatrices) -> int:
    """Structural sparsity bound d: 3 for lattice sheets, else the max degree."""
    if sys.spec is not None:
        return 3
    return int((sys.kappa > 0).sum(axis=1).max())


def aa_rounds(sys: SystemMatrices, alpha: float, beta: float,
              energy: float | None = None) -> int:
    """Amplitude-amplification rounds ceil(sqrt((m_max a^2 + 2 k_max d b^2) / 2E))."""
    m_max = float(sys.masses.max())
    k_max = float(sys.kappa.max())
    d = sparsity(sys)
    if energy is None:
        if beta != 0.0:
            raise ValueError("need the system energy when displacements are nonzero")
        energy = 0.5 * m_max * alpha**2
    if energy <= 0.0:
        raise ValueError("zero-energy state has no encoding")
    return math.ceil(math.sqrt((m_max * alpha**2 + 2.0 * k_max * d * beta**2)
                               / (2.0 * energy)))


def prepare_standard(sys: SystemMatrices, x0, xdot0) -> EncodedState:
    """Velocity/bond-difference encoding (sqrt(M) xdot, i mu) / sqrt(2E).

    ``x0``/``xdot0`` are (N,) or (D, N); each axis occupies one slice of
    the axis register.  The recorded rotation angles use the exact
    amplitude sums; for median-split thermal velocities these coincide
    with the thermodynamic-mean value since every sample has |v| = sigma.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    xdot0 = np.atleast_2d(np.asarray(xdot0, dtype=float))
    d_ax, n = x0.shape
    if x0.shape != xdot0.shape or n != sys.n:
        raise ValueError("initial conditions must be (D, N) matching the system")
    kinetic = 0.5 * float(np.sum(sys.masses * xdot0**2))
    potential = 0.0
    for j, k in sys.pairs:
        potential += 0.5 * sys.kappa[j, k] * float(np.sum((x0[:, j] - x0[:, k]) ** 2))
    energy = kinetic + potential
    if energy <= 0.0:
        raise ValueError("zero-energy state has no encoding")

    tensor = np.zeros((d_ax, 2, n, n), dtype=complex)
    sqrt_m = np.sqrt(sys.masses)
    for a in range(d_ax):
        tensor[a, 0, :, 0] = sqrt_m * xdot0[a]
        for j, k in sys.pairs:
            tensor[a, 1, j, k] = 1j * math.sqrt(sys.kappa[j, k]) * (x0[a, j] - x0[a, k])
    tensor /= math.sqrt(2.0 * energy)

    alpha_sq = float(np.sum(xdot0**2))
    beta_sq = float(np.sum(x0**2))
    e_max = 0.5 * float(sys.masses.max()) * alpha_sq + 0.5 * float(sys.kappa.max()) * beta_sq
    d = sparsity(sys)
    kd = 2.0 * float(sys.kappa.max()) * d
    thetas = tuple(
        math.acos(math.sqrt(2.0 * kinetic)
                  / math.sqrt(2.0 * kinetic + kd * float(np.sum(x0[a] ** 2))))
        for a in range(d_ax)
    )
    rounds = aa_rounds(sys, math.sqrt(alpha_sq), math.sqrt(beta_sq), energy)
    return EncodedState(tensor, "standard", sys, energy, e_max, rounds, thetas)


def prepare_alternative(sys: SystemMatrices, x0, xdot0) -> EncodedState:
    """Displacement encoding (P y, -i B^+ P y_dot) / sqrt(2F), single axis."""
    x0 = np.asarray(x0, dtype=float)
    xdot0 = np.asarray(xdot0, dtype=float)
    if x0.shape != (sys.n,) or xdot0.shape != (sys.n,):
        raise ValueError("alternative encoding takes one axis of initial conditions")
    sqrt_m = np.sqrt(sys.masses)
    y = sqrt_m * x0
    ydot = sqrt_m * xdot0
    f_const = enm.conserved_F(sys, y, ydot)
    if f_const <= 0.0:
        raise ValueError("zero-energy state has no encoding")
    sp = enm.spectral(sys)
    top = sp.P @ y
    pair_amps = sys.B.T @ enm.pinv_apply(sys, ydot)   # B^+ P ydot = B^T A^+ ydot
    tensor = np.zeros((1, 2, sys.n, sys.n), dtype=complex)
    tensor[0, 0, :, 0] = top
    for col, (j, k) in enumerate(sys.pairs):
        tensor[0, 1, j, k] = -1j * pair_amps[col]
    tensor /= math.sqrt(2.0 * f_const)
    return EncodedState(tensor, "alternative", sys, f_const)


@dataclass
class BlockHamiltonian:
    """H = -[[0, B'], [B'^T, 0]] on the padded part (x) j (x) k space.

    The padded matrix is block diagonal: the active subspace (node slots
    (j, 0) and bonded pair slots) is invariant under H and every other row
    and column is identically zero, so exp(-iHt) is the dense exponential
    of the active block and the identity elsewhere.  ``active`` holds the
    flat indices of the active slots; ``H_active`` is eigendecomposed once
    and cached.  ``dense()`` materializes the full 2N^2 matrix for
    structure checks on small systems.
    """

    H_active: np.ndarray
    active: np.ndarray            # flat indices into the 2 N^2 space
    scale: float                  # sqrt(2 kappa/m d)
    n_nodes: int
    d: int
    _eig: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def eig(self):
        if self._eig is None:
            w, v = np.linalg.eigh(self.H_active)
            self._eig = (w, v)
        return self._eig

    def dense(self) -> np.ndarray:
        dim = 2 * self.n_nodes * self.n_nodes
        if dim > DESK_DIM_LIMIT:
            raise ValueError(f"dense block Hamiltonian {dim} exceeds the desk limit")
        H = np.zeros((dim, dim))
        rows = self.active[:, None]
        H[rows, self.active[None, :]] = self.H_active
        return H


def build_block_H(sys: SystemMatrices) -> BlockHamiltonian:
    kappa, mass, d = _uniform_coupling(sys)
    n = sys.n
    n_pairs = len(sys.pairs)
    if n + n_pairs > DESK_DIM_LIMIT:
        raise ValueError("block Hamiltonian exceeds the desk limit")
    active = np.array([j * n for j in range(n)]
                      + [n * n + j * n + k for j, k in sys.pairs])
    H_active = np.zeros((n + n_pairs, n + n_pairs))
    for col, (j, k) in enumerate(sys.pairs):
        H_active[j, n + col] = -math.sqrt(sys.kappa[j, k] / sys.masses[j])
        H_active[k, n + col] = +math.sqrt(sys.kappa[j, k] / sys.masses[k])
    H_active += H_active.T
    return BlockHamiltonian(H_active, active, math.sqrt(2.0 * (kappa / mass) * d), n, d)


def evolve_exact(state: EncodedState, bh: BlockHamiltonian, t: float) -> EncodedState:
    """exp(-iHt) per axis slice: dense propagator on the active block.

    Components outside the active subspace see a zero Hamiltonian row and
    pass through unchanged.
    """
    if bh.n_nodes != state.n:
        raise ValueError("Hamiltonian and state sizes differ")
    w, v = bh.eig()
    phases = np.exp(-1j * w * t)
    out = state.tensor.copy()
    for a in range(state.axes):
        vec = out[a].reshape(-1)
        vec[bh.active] = v @ (phases * (v.conj().T @ vec[bh.active]))
    return EncodedState(out, state.tag, state.sys, state.norm_constant,
                        state.e_max, state.aa_round_estimate, state.thetas)


def doubled_mass_encoding(sys: SystemMatrices) -> SystemMatrices:
    """Axis doubling: 2N interleaved masses, x on even slots, y on odd.

    Couplings replicate per axis; cross-axis entries stay zero, so the
    doubled spectrum is two copies of the per-axis one.
    """
    n = sys.n
    kappa2 = np.zeros((2 * n, 2 * n))
    kappa2[0::2, 0::2] = sys.kappa
    kappa2[1::2, 1::2] = sys.kappa
    masses2 = np.repeat(sys.masses, 2)
    physical2 = np.repeat(sys.physical, 2)
    import warnings
    with warnings.catch_warnings():
        # the two per-axis copies are disconnected from each other by design
        warnings.simplefilter("ignore")
        return enm._assemble(masses2, kappa2, physical2)


# -- gate-level block encodings ----------------------------------------------


def _shadow(circ: Circuit) -> Circuit:
    sh = Circuit()
    sh.registers = circ.registers
    sh.n_qubits = circ.n_qubits
    return sh


def _emit_incidence_dagger(circ: Circuit, spec: LatticeSpec) -> list[Gate]:
    """Gate list whose |0>-ancilla block is B^T / sqrt(2 kappa/m d)."""
    sh = _shadow(circ)
    regs = circ.registers
    r, c, s = regs["r"], regs["c"], regs["s"]
    ell, rp, cp, sp = regs["ell"], regs["rp"], regs["cp"], regs["sp"]
    f, anc = regs["f"], regs["anc"]
    cmp_q, ord_q = regs["cmp"], regs["ord"]
    emit_slot_superposition(sh, ell)
    _emit_shift(sh, r, s, ell, rp, cp, sp)
    _emit_slot_uncompute(sh, r, s, ell, rp, cp)
    _emit_coord_add(sh, r, c, s, rp, cp, sp)
    _emit_validation(sh, (r, c, s), (rp, cp, sp), f, anc)
    j_bits = node_value_bits(sh, primed=False)
    k_bits = node_value_bits(sh, primed=True)
    sh.compare_lt(k_bits, j_bits, cmp_q[0])
    sh.x(ord_q[0], [(cmp_q[0], 1)])
    for qa, qb in zip(j_bits, k_bits):
        sh.swap(qa, qb, [(cmp_q[0], 1)])
    sh.x(cmp_q[0], [(ord_q[0], 1)])
    sh.z(ord_q[0])
    sh.h(ord_q[0])
    return sh.gates


def _emit_ucond(circ: Circuit, a_bit: int, t_bits) -> list[Gate]:
    """H . (a=0)-controlled (2|0><0| - 1) . H; self-adjoint."""
    sh = _shadow(circ)
    sh.h(a_bit)
    for q in t_bits:
        sh.x(q)
    sh.z(t_bits[0], [(a_bit, 0)] + [(q, 1) for q in t_bits[1:]])
    for q in t_bits:
        sh.x(q)
    sh.x(a_bit)
    sh.z(a_bit)
    sh.x(a_bit)
    sh.h(a_bit)
    return sh.gates


def _oracle_registers(circ: Circuit, spec: LatticeSpec) -> None:
    circ.register("r", spec.n_r)
    circ.register("c", spec.n_c)
    circ.register("s", 1)
    circ.register("ell", 2)
    circ.register("rp", spec.n_r)
    circ.register("cp", spec.n_c)
    circ.register("sp", 1)
    circ.register("f", 1)
    circ.register("anc", 6)
    circ.register("cmp", 1)
    circ.register("ord", 1)


def incidence_block_circuit(spec: LatticeSpec) -> Circuit:
    circ = Circuit()
    _oracle_registers(circ, spec)
    circ.gates = _emit_incidence_dagger(circ, spec)
    return circ


def diffusion_projector_circuit(n: int) -> Circuit:
    circ = Circuit()
    a = circ.register("a", 1)
    t = circ.register("t", n)
    circ.gates = _emit_ucond(circ, a[0], t.bits)
    return circ


def hamiltonian_block_circuit(spec: LatticeSpec) -> Circuit:
    """Unitary whose |0>-ancilla block on (part, j, k) is H / sqrt(2 kappa/m d)."""
    circ = Circuit()
    p = circ.register("p", 1)
    ca = circ.register("ca", 1)
    _oracle_registers(circ, spec)
    ub_dagger = _emit_incidence_dagger(circ, spec)
    ub = inverted_gates(ub_dagger)
    k_bits = node_value_bits(circ, primed=True)
    ucond = _emit_ucond(circ, ca[0], k_bits)
    gates: list[Gate] = []
    gates += controlled_gates(inverted_gates(ucond), [(p[0], 0)])
    gates += controlled_gates(ub_dagger, [(p[0], 0)])
    gates += controlled_gates(ub, [(p[0], 1)])
    gates += controlled_gates(ucond, [(p[0], 1)])
    circ.gates = gates
    circ.x(p[0])
    circ.gphase(math.pi)
    return circ


# -- block extraction ---------------------------------------------------------


def _node_assign(spec: LatticeSpec, j: int, primed: bool) -> dict[str, int]:
    co = decode_index(j, spec)
    if primed:
        return {"rp": co.r, "cp": co.c, "sp": co.s}
    return {"r": co.r, "c": co.c, "s": co.s}


_ZERO_REGS = ("ell", "f", "anc", "cmp", "ord")


def incidence_block_column(circ: Circuit, spec: LatticeSpec, j: int) -> dict:
    """Column j of the postselected block, keyed by (j', k') node indices."""
    state = simulate(circ, _node_assign(spec, j, primed=False))
    col: dict[tuple[int, int], complex] = {}
    for key, amp in state.amps.items():
        if any(state.value(key, nm) != 0 for nm in _ZERO_REGS):
            continue
        co_j = (state.value(key, "r"), state.value(key, "c"), state.value(key, "s"))
        co_k = (state.value(key, "rp"), state.value(key, "cp"), state.value(key, "sp"))
        jj = (co_j[0] << (spec.n_c + 1)) | (co_j[1] << 1) | co_j[2]
        kk = (co_k[0] << (spec.n_c + 1)) | (co_k[1] << 1) | co_k[2]
        col[(jj, kk)] = col.get((jj, kk), 0.0) + amp
    return {rc: a for rc, a in col.items() if abs(a) > 1e-14}


def expected_incidence_column(spec: LatticeSpec, j: int, d: int = 3) -> dict:
    """Sparse column of B^T / sqrt(2 kappa/m d) for unit kappa/m."""
    col: dict[tuple[int, int], float] = {}
    for l in range(3):
        k, valid = neighbor(j, l, spec)
        if not valid:
            continue
        if k >= j:
            col[(j, k)] = col.get((j, k), 0.0) + 1.0 / math.sqrt(2.0 * d)
        else:
            col[(k, j)] = col.get((k, j), 0.0) - 1.0 / math.sqrt(2.0 * d)
    return col


def hamiltonian_block_column(circ: Circuit, spec: LatticeSpec, part: int,
                             j: int, k: int) -> dict:
    """Column (part, j, k) of the postselected block, keyed by (part', j', k')."""
    init = {"p": part, "ca": 0}
    init.update(_node_assign(spec, j, primed=False))
    init.update(_node_assign(spec, k, primed=True))
    state = simulate(circ, init)
    col: dict[tuple[int, int, int], complex] = {}
    for key, amp in state.amps.items():
        if state.value(key, "ca") != 0:
            continue
        if any(state.value(key, nm) != 0 for nm in _ZERO_REGS):
            continue
        jj = ((state.value(key, "r") << (spec.n_c + 1))
              | (state.value(key, "c") << 1) | state.value(key, "s"))
        kk = ((state.value(key, "rp") << (spec.n_c + 1))
              | (state.value(key, "cp") << 1) | state.value(key, "sp"))
        rc = (state.value(key, "p"), jj, kk)
        col[rc] = col.get(rc, 0.0) + amp
    return {rc: a for rc, a in col.items() if abs(a) > 1e-14}


def dump_state_csv(state: EncodedState, path, threshold: float = 1e-12) -> None:
    with open(path, "w") as fh:
        fh.write("axis,part,j,k,re,im\n")
        tensor = state.tensor
        for a in range(tensor.shape[0]):
            for part in range(2):
                for j in range(state.n):
                    for k in range(state.n):
                        amp = tensor[a, part, j, k]
                        if abs(amp) > threshold:
                            fh.write(f"{a},{part},{j},{k},{amp.real:.17g},{amp.imag:.17g}\n")
