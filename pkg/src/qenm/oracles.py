"""Oracle circuits: mass lookup, graphene connectivity, comparators, loaders.

The connectivity oracle S_a computes, for a source node j = (r, c, s) and a
neighbor slot l, the neighbor coordinates and a flag marking ghost bonds:

    |j> |l> |0>_k |0>_f  ->  |j> |0>_l |k> |D(j) or D(k)>_f

in four stages: load the slot's two's-complement unit-cell shift into the
neighbor register (controlled on row parity and sublattice, one case per
table row, deliberately unsimplified), uncompute the slot index from the
shift pattern so the slot register disentangles, ripple-add the source
coordinates (modular, so boundary cells wrap), and OR the four dummy rules
for both endpoints into the flag, restoring every scratch ancilla.

Slot values outside {0, 1, 2} are undefined; drivers assert they never
reach the oracle.
"""

from __future__ import annotations

import math

import numpy as np

from .boltzmann import BucketKey
from .circuits import Circuit, Register, simulate
from .lattice import SHIFT_TABLE, LatticeSpec


def _twos(value: int, width: int) -> int:
    return value % (1 << width)


def mass_oracle(mass: int | str, n_address: int, width: int | None = None) -> Circuit:
    """XOR the fixed mass bit pattern into the value register: |j>|z> -> |j>|z ^ m>."""
    m = int(mass, 2) if isinstance(mass, str) else int(mass)
    if width is None:
        width = max(m.bit_length(), 1)
    circ = Circuit()
    circ.register("j", n_address)
    z = circ.register("z", width)
    for i in range(width):
        if (m >> i) & 1:
            circ.x(z[i])
    return circ


# -- connectivity oracle stages ---------------------------------------------


def _emit_shift(circ: Circuit, r: Register, s: Register, ell: Register,
                rp: Register, cp: Register, sp: Register) -> None:
    """Load the slot's (delta_r, delta_c, 1) into the neighbor register."""
    for (r0v, sv, lv), (drv, dcv) in sorted(SHIFT_TABLE.items()):
        if lv == 0:
            continue
        controls = [(ell[0], lv & 1), (ell[1], (lv >> 1) & 1), (s[0], sv), (r[0], r0v)]
        for i in range(rp.width):
            if (_twos(drv, rp.width) >> i) & 1:
                circ.x(rp[i], controls)
        for i in range(cp.width):
            if (_twos(dcv, cp.width) >> i) & 1:
                circ.x(cp[i], controls)
    circ.x(sp[0])


def _emit_slot_uncompute(circ: Circuit, r: Register, s: Register, ell: Register,
                         rp: Register, cp: Register) -> None:
    """Clear the slot register; the shift pattern determines the slot."""
    for (r0v, sv, lv), (drv, dcv) in sorted(SHIFT_TABLE.items()):
        if lv == 0:
            continue
        controls = [(s[0], sv), (r[0], r0v)]
        controls += [(rp[i], (_twos(drv, rp.width) >> i) & 1) for i in range(rp.width)]
        controls += [(cp[i], (_twos(dcv, cp.width) >> i) & 1) for i in range(cp.width)]
        for i in range(2):
            if (lv >> i) & 1:
                circ.x(ell[i], controls)


def _emit_coord_add(circ: Circuit, r: Register, c: Register, s: Register,
                    rp: Register, cp: Register, sp: Register) -> None:
    """Neighbor register: shift -> absolute coordinates, modular wrap."""
    circ.add(r.bits, rp.bits)
    circ.add(c.bits, cp.bits)
    circ.x(sp[0], [(s[0], 1)])


def _emit_conditions(circ: Circuit, r: Register, c: Register, s: Register,
                     anc: Register) -> None:
    """Boundary rules C1..C4 of one node into four scratch bits."""
    n_r, n_c = r.width, c.width
    circ.x(anc[0], [(s[0], 0)] + [(r[i], 0) for i in range(n_r)])
    circ.x(anc[1], [(r[i], 1) for i in range(n_r)])
    second_last = (1 << n_r) - 2
    circ.x(anc[2], [(s[0], 1)] + [(r[i], (second_last >> i) & 1) for i in range(n_r)])
    circ.x(anc[3], [(c[i], 1) for i in range(n_c)] + [(r[0], 0)])


def _emit_node_dummy(circ: Circuit, r: Register, c: Register, s: Register,
                     anc: Register, d_bit: int) -> None:
    """d ^= C1 or C2 or C3 or C4; condition bits restored."""
    _emit_conditions(circ, r, c, s, anc)
    circ.x(d_bit)
    circ.x(d_bit, [(anc[i], 0) for i in range(4)])
    _emit_conditions(circ, r, c, s, anc)


def _emit_validation(circ: Circuit, src, dst, f: Register, anc: Register) -> None:
    """f ^= D(j) or D(k); all six scratch bits uncomputed."""
    dj, dk = anc[4], anc[5]
    _emit_node_dummy(circ, *src, anc, dj)
    _emit_node_dummy(circ, *dst, anc, dk)
    circ.x(f[0])
    circ.x(f[0], [(dj, 0), (dk, 0)])
    _emit_node_dummy(circ, *dst, anc, dk)
    _emit_node_dummy(circ, *src, anc, dj)


def shift_init(spec: LatticeSpec) -> Circuit:
    """Standalone shift-loading stage; inputs r0, s, slot index."""
    circ = Circuit()
    r0 = circ.register("r0", 1)
    s = circ.register("s", 1)
    ell = circ.register("ell", 2)
    rp = circ.register("dr", spec.n_r)
    cp = circ.register("dc", spec.n_c)
    sp = circ.register("ds", 1)
    _emit_shift(circ, r0, s, ell, rp, cp, sp)
    return circ


def coord_adder(spec: LatticeSpec) -> Circuit:
    """Standalone modular coordinate addition; shift registers pre-loaded."""
    circ = Circuit()
    r = circ.register("r", spec.n_r)
    c = circ.register("c", spec.n_c)
    s = circ.register("s", 1)
    rp = circ.register("rp", spec.n_r)
    cp = circ.register("cp", spec.n_c)
    sp = circ.register("sp", 1)
    _emit_coord_add(circ, r, c, s, rp, cp, sp)
    return circ


def bond_validation(spec: LatticeSpec) -> Circuit:
    """Standalone ghost-bond detector over two populated node registers."""
    circ = Circuit()
    regs = _node_registers(circ, spec)
    f = circ.register("f", 1)
    anc = circ.register("anc", 6)
    _emit_validation(circ, regs[:3], regs[3:], f, anc)
    return circ


def _node_registers(circ: Circuit, spec: LatticeSpec):
    r = circ.register("r", spec.n_r)
    c = circ.register("c", spec.n_c)
    s = circ.register("s", 1)
    rp = circ.register("rp", spec.n_r)
    cp = circ.register("cp", spec.n_c)
    sp = circ.register("sp", 1)
    return r, c, s, rp, cp, sp


def connectivity_oracle(spec: LatticeSpec) -> Circuit:
    """Full S_a: shift, slot uncompute, coordinate add, bond validation."""
    circ = Circuit()
    r = circ.register("r", spec.n_r)
    c = circ.register("c", spec.n_c)
    s = circ.register("s", 1)
    ell = circ.register("ell", 2)
    rp = circ.register("rp", spec.n_r)
    cp = circ.register("cp", spec.n_c)
    sp = circ.register("sp", 1)
    f = circ.register("f", 1)
    anc = circ.register("anc", 6)
    _emit_shift(circ, r, s, ell, rp, cp, sp)
    _emit_slot_uncompute(circ, r, s, ell, rp, cp)
    _emit_coord_add(circ, r, c, s, rp, cp, sp)
    _emit_validation(circ, (r, c, s), (rp, cp, sp), f, anc)
    return circ


def node_value_bits(circ: Circuit, primed: bool) -> tuple[int, ...]:
    """Qubits of a node register in index significance order (s, c, r)."""
    names = ("sp", "cp", "rp") if primed else ("s", "c", "r")
    bits: list[int] = []
    for name in names:
        bits.extend(circ.registers[name].bits)
    return tuple(bits)


# -- comparator and ordered swap --------------------------------------------


def comparator(width: int) -> Circuit:
    """flag ^= [k < j] over two node-index registers."""
    circ = Circuit()
    j = circ.register("j", width)
    k = circ.register("k", width)
    flag = circ.register("flag", 1)
    circ.compare_lt(k.bits, j.bits, flag[0])
    return circ


def ordered_swap(width: int) -> Circuit:
    """Sort |j>|k>: compare, record the order bit, swap, uncompute the flag."""
    circ = Circuit()
    j = circ.register("j", width)
    k = circ.register("k", width)
    flag = circ.register("flag", 1)
    order = circ.register("order", 1)
    circ.compare_lt(k.bits, j.bits, flag[0])
    circ.x(order[0], [(flag[0], 1)])
    for i in range(width):
        circ.swap(j[i], k[i], [(flag[0], 1)])
    circ.x(flag[0], [(order[0], 1)])
    return circ


# -- velocity loaders --------------------------------------------------------


def velocity_loader_two_bucket(n: int, key: BucketKey, velocities,
                               scale: float | None = None) -> Circuit:
    """Bucket-keyed velocity loading over all 2**n node indices.

    Uniform superposition, parity-key bucket bit, bucket-controlled Ry on
    the rotation ancilla with sin(theta_b/2) = v_b / scale, then key
    uncomputation.  Postselecting the ancilla on |1> leaves amplitudes
    proportional to the bucket velocities.
    """
    v0, v1 = float(velocities[0]), float(velocities[1])
    if scale is None:
        scale = max(abs(v0), abs(v1))
    if scale <= 0 or max(abs(v0), abs(v1)) > scale * (1 + 1e-12):
        raise ValueError("velocities exceed the rotation scale")
    circ = Circuit()
    j = circ.register("j", n)
    b = circ.register("b", 1)
    anc = circ.register("anc", 1)
    for i in range(n):
        circ.h(j[i])

    def key_mix():
        if key.r:
            circ.x(b[0])
        for i in range(n):
            if (key.s >> i) & 1:
                circ.x(b[0], [(j[i], 1)])

    key_mix()
    circ.ry(anc[0], 2.0 * math.asin(max(-1.0, min(1.0, v0 / scale))), [(b[0], 0)])
    circ.ry(anc[0], 2.0 * math.asin(max(-1.0, min(1.0, v1 / scale))), [(b[0], 1)])
    key_mix()
    return circ


def run_velocity_loader(n: int, key: BucketKey, velocities,
                        scale: float | None = None) -> tuple[np.ndarray, float]:
    """Simulate the loader and postselect; returns (amplitudes over j, success prob)."""
    circ = velocity_loader_two_bucket(n, key, velocities, scale)
    state, prob = simulate(circ).postselect({"anc": 1, "b": 0})
    amps = np.zeros(1 << n, dtype=complex)
    for key_, amp in state.amps.items():
        amps[state.value(key_, "j")] = amp
    return amps, prob


def inequality_test_loader(values, r: int) -> Circuit:
    """Amplitude loading by inequality testing against a value table.

    The table is looked up into a value register, a uniform r-qubit
    reference register is compared against it (flag set when reference >=
    value), and Hadamards concentrate weight on the all-zero reference.
    Postselecting reference = 0 and flag = 0 leaves amplitudes
    proportional to the (signed) table entries; the lookup is uncomputed.
    """
    n = int(math.log2(len(values)))
    if 1 << n != len(values):
        raise ValueError("table length must be a power of two")
    mags = [abs(int(v)) for v in values]
    signs = [1 if v < 0 else 0 for v in values]
    if max(mags) >= 1 << r:
        raise ValueError(f"values need more than {r} precision bits")
    circ = Circuit()
    i_reg = circ.register("i", n)
    v_reg = circ.register("v", r)
    x_reg = circ.register("x", r)
    flag = circ.register("flag", 1)
    sign = circ.register("sign", 1)
    for q in i_reg.bits:
        circ.h(q)
    circ.lookup(i_reg.bits, v_reg.bits, mags)
    if any(signs):
        circ.lookup(i_reg.bits, sign.bits, signs)
        circ.z(sign[0])
        circ.lookup(i_reg.bits, sign.bits, signs)
    for q in x_reg.bits:
        circ.h(q)
    circ.x(flag[0])
    circ.compare_lt(x_reg.bits, v_reg.bits, flag[0])
    for q in x_reg.bits:
        circ.h(q)
    circ.lookup(i_reg.bits, v_reg.bits, mags)
    return circ


def run_inequality_loader(values, r: int) -> tuple[np.ndarray, float]:
    """Simulate the inequality-test loader; returns (amplitudes over i, success prob)."""
    circ = inequality_test_loader(values, r)
    state, prob = simulate(circ).postselect({"x": 0, "flag": 0, "v": 0, "sign": 0})
    amps = np.zeros(len(values), dtype=complex)
    for key_, amp in state.amps.items():
        amps[state.value(key_, "i")] = amp
    return amps, prob


def emit_slot_superposition(circ: Circuit, ell: Register) -> None:
    """Prepare (|0> + |1> + |2>)/sqrt(3) on the two slot qubits."""
    circ.ry(ell[1], 2.0 * math.acos(math.sqrt(2.0 / 3.0)))
    circ.h(ell[0], [(ell[1], 0)])
