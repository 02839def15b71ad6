"""Padded graphene lattice: index arithmetic, neighbor shifts, dummy rules.

A sheet of ``N = 2**(n_r + n_c + 1)`` sites is addressed by two-atom unit
cells: ``n_r`` row bits, ``n_c`` column bits and one sublattice bit, packed
little-endian as

    j = 2**(n_c + 1) * r + 2 * c + s

Every site has exactly three neighbor slots l in {0, 1, 2}, always on the
opposite sublattice (delta_s = 1).  The unit-cell offset (delta_r, delta_c)
of slot l depends only on the row parity r0 (low bit of r) and the
sublattice bit s.  Coordinate additions wrap modulo the register sizes;
sites in the padding region are flagged as dummies by four boundary rules,
and a bond is valid only when neither endpoint is a dummy.  Ghost bonds
created by the wrap-around always terminate on a dummy, so no wrap is ever
special-cased.

The geometric embedding used by the brute-force test oracle places a site
at ``x = sqrt(3) * (c - r0/2)``, ``y = 1.5 * r + s`` with bond length 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

#: (r0, s, l) -> (delta_r, delta_c); the sublattice shift is always 1.
SHIFT_TABLE = {
    (0, 0, 0): (0, 0), (0, 0, 1): (-1, 0), (0, 0, 2): (-1, +1),
    (0, 1, 0): (0, 0), (0, 1, 1): (+1, 0), (0, 1, 2): (+1, +1),
    (1, 0, 0): (0, 0), (1, 0, 1): (-1, -1), (1, 0, 2): (-1, 0),
    (1, 1, 0): (0, 0), (1, 1, 1): (+1, -1), (1, 1, 2): (+1, 0),
}

SPARSITY = 3


@dataclass(frozen=True)
class LatticeSpec:
    """Bit widths of the row and column registers."""

    n_r: int
    n_c: int

    def __post_init__(self):
        if self.n_r < 1 or self.n_c < 1:
            raise ValueError("register widths must be >= 1")

    @property
    def rows(self) -> int:
        return 1 << self.n_r

    @property
    def cols(self) -> int:
        return 1 << self.n_c

    @property
    def n_total(self) -> int:
        return 1 << (self.n_r + self.n_c + 1)

    @property
    def address_bits(self) -> int:
        return self.n_r + self.n_c + 1


@dataclass(frozen=True)
class NodeCoord:
    r: int
    c: int
    s: int


def decode_index(j: int, spec: LatticeSpec) -> NodeCoord:
    """Unpack node index j into (r, c, s)."""
    if not 0 <= j < spec.n_total:
        raise ValueError(f"node index {j} out of range for {spec}")
    s = j & 1
    c = (j >> 1) & (spec.cols - 1)
    r = j >> (spec.n_c + 1)
    return NodeCoord(r, c, s)


def encode_coord(coord: NodeCoord, spec: LatticeSpec) -> int:
    """Pack (r, c, s) into the node index."""
    return (coord.r << (spec.n_c + 1)) | (coord.c << 1) | coord.s


def shift_vector(r0: int, s: int, l: int) -> tuple[int, int]:
    """Unit-cell offset of neighbor slot l for a source with parity r0, sublattice s."""
    if l not in (0, 1, 2):
        raise ValueError(f"neighbor slot must be 0, 1 or 2, got {l}")
    return SHIFT_TABLE[(r0, s, l)]


def is_dummy(coord: NodeCoord, spec: LatticeSpec) -> bool:
    """Boundary rules flagging padding sites.

    C1: bottom edge, C2: top buffer row, C3: second-to-last row upper
    sublattice, C4: right buffer column on even rows.
    """
    r, c, s = coord.r, coord.c, coord.s
    c1 = s == 0 and r == 0
    c2 = r == spec.rows - 1
    c3 = s == 1 and r == spec.rows - 2
    c4 = c == spec.cols - 1 and (r & 1) == 0
    return c1 or c2 or c3 or c4


def neighbor(j: int, l: int, spec: LatticeSpec) -> tuple[int, bool]:
    """Neighbor index in slot l and whether the bond is physical."""
    src = decode_index(j, spec)
    dr, dc = shift_vector(src.r & 1, src.s, l)
    dst = NodeCoord((src.r + dr) % spec.rows, (src.c + dc) % spec.cols, src.s ^ 1)
    k = encode_coord(dst, spec)
    valid = not (is_dummy(src, spec) or is_dummy(dst, spec))
    return k, valid


@dataclass
class Adjacency:
    """Per-node neighbor slots with bond validity flags.

    ``neighbors[j, l]`` is -1 when the slot is unused (geometric oracle on
    boundary nodes); ``valid[j, l]`` marks physical bonds.
    """

    neighbors: np.ndarray
    valid: np.ndarray
    d: int = SPARSITY

    def bond_set(self) -> set[tuple[int, int]]:
        """Unordered physical bonds as (min, max) pairs."""
        bonds = set()
        for j in range(self.neighbors.shape[0]):
            for l in range(self.d):
                if self.valid[j, l]:
                    k = int(self.neighbors[j, l])
                    bonds.add((min(j, k), max(j, k)))
        return bonds

    def degrees(self) -> np.ndarray:
        return self.valid.sum(axis=1)


def adjacency(spec: LatticeSpec) -> Adjacency:
    """Shift-table adjacency over the full padded lattice."""
    n = spec.n_total
    neighbors = np.empty((n, SPARSITY), dtype=np.int64)
    valid = np.zeros((n, SPARSITY), dtype=bool)
    for j in range(n):
        for l in range(SPARSITY):
            k, ok = neighbor(j, l, spec)
            neighbors[j, l] = k
            valid[j, l] = ok
    return Adjacency(neighbors, valid)


def dummy_mask(spec: LatticeSpec) -> np.ndarray:
    """Boolean mask over node indices, True where the site is padding."""
    return np.array(
        [is_dummy(decode_index(j, spec), spec) for j in range(spec.n_total)], dtype=bool
    )


def node_positions(spec: LatticeSpec) -> np.ndarray:
    """Honeycomb embedding of every site (bond length 1), shape (N, 2)."""
    pos = np.empty((spec.n_total, 2))
    for j in range(spec.n_total):
        rc = decode_index(j, spec)
        pos[j, 0] = np.sqrt(3.0) * (rc.c - 0.5 * (rc.r & 1))
        pos[j, 1] = 1.5 * rc.r + rc.s
    return pos


def brute_force_adjacency(spec: LatticeSpec) -> Adjacency:
    """Geometric adjacency oracle, independent of the shift table.

    Physical sites are embedded in the plane and every pair at unit
    distance is bonded.  Only a test oracle; never used by the pipeline.
    """
    if spec.n_total > 1 << 14:
        raise ValueError("geometric oracle is meant for small lattices")
    dummies = dummy_mask(spec)
    pos = node_positions(spec)
    phys = np.flatnonzero(~dummies)
    neighbors = np.full((spec.n_total, SPARSITY), -1, dtype=np.int64)
    valid = np.zeros((spec.n_total, SPARSITY), dtype=bool)
    if len(phys) == 0:
        return Adjacency(neighbors, valid)
    tree = cKDTree(pos[phys])
    slots = np.zeros(spec.n_total, dtype=int)
    for a, b in tree.query_pairs(r=1.0 + 1e-6):
        ja, jb = int(phys[a]), int(phys[b])
        for j, k in ((ja, jb), (jb, ja)):
            neighbors[j, slots[j]] = k
            valid[j, slots[j]] = True
            slots[j] += 1
    return Adjacency(neighbors, valid)


def lattice_rows(spec: LatticeSpec) -> list[dict]:
    """One record per node for the CSV dump."""
    adj = adjacency(spec)
    rows = []
    for j in range(spec.n_total):
        coord = decode_index(j, spec)
        rec = {
            "j": j, "r": coord.r, "c": coord.c, "s": coord.s,
            "dummy": int(is_dummy(coord, spec)),
        }
        for l in range(SPARSITY):
            rec[f"neigh{l}"] = int(adj.neighbors[j, l])
        for l in range(SPARSITY):
            rec[f"valid{l}"] = int(adj.valid[j, l])
        rows.append(rec)
    return rows


def dump_lattice_csv(spec: LatticeSpec, path) -> None:
    rows = lattice_rows(spec)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
