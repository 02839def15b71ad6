import numpy as np
import pytest

from qenm.lattice import (LatticeSpec, NodeCoord, adjacency, brute_force_adjacency,
                          decode_index, dummy_mask, encode_coord, is_dummy,
                          lattice_rows, neighbor, node_positions, shift_vector)

SPECS = [LatticeSpec(2, 1), LatticeSpec(2, 2), LatticeSpec(3, 2), LatticeSpec(3, 3),
         LatticeSpec(4, 3)]


def test_decode_zero():
    assert decode_index(0, LatticeSpec(2, 2)) == NodeCoord(0, 0, 0)


def test_decode_paper_example():
    # j = 8*1 + 2*1 + 1 = 11 with two column bits
    assert decode_index(11, LatticeSpec(2, 2)) == NodeCoord(1, 1, 1)


def test_decode_column_boundary():
    # j = 2**(n_c+1) - 1 = 7: bits are s=1, c=11, r=00
    assert decode_index(7, LatticeSpec(2, 2)) == NodeCoord(0, 3, 1)


def test_decode_out_of_range():
    with pytest.raises(ValueError):
        decode_index(32, LatticeSpec(2, 2))


@pytest.mark.parametrize("spec", SPECS + [LatticeSpec(6, 7)])
def test_encode_decode_roundtrip_exhaustive(spec):
    for j in range(spec.n_total):
        assert encode_coord(decode_index(j, spec), spec) == j


def test_shift_vector_table_entries():
    assert shift_vector(0, 0, 2) == (-1, +1)
    assert shift_vector(1, 1, 1) == (+1, -1)
    for r0 in (0, 1):
        for s in (0, 1):
            assert shift_vector(r0, s, 0) == (0, 0)


def test_shift_vector_invalid_slot():
    with pytest.raises(ValueError):
        shift_vector(0, 0, 3)


def test_neighbor_slot0_same_cell():
    spec = LatticeSpec(3, 3)
    j = encode_coord(NodeCoord(2, 1, 0), spec)
    k, valid = neighbor(j, 0, spec)
    assert decode_index(k, spec) == NodeCoord(2, 1, 1)
    assert valid


def test_neighbor_dummy_source_invalid():
    spec = LatticeSpec(3, 3)
    j = encode_coord(NodeCoord(spec.rows - 1, 0, 0), spec)  # top buffer row
    for l in range(3):
        _, valid = neighbor(j, l, spec)
        assert not valid


@pytest.mark.parametrize("spec", SPECS)
def test_adjacency_matches_geometric_oracle(spec):
    assert adjacency(spec).bond_set() == brute_force_adjacency(spec).bond_set()


@pytest.mark.parametrize("spec", SPECS)
def test_validity_symmetric(spec):
    for j in range(spec.n_total):
        for l in range(3):
            k, valid = neighbor(j, l, spec)
            assert (j, valid) in [neighbor(k, lb, spec) for lb in range(3)]


def test_is_dummy_bottom_edge():
    assert is_dummy(NodeCoord(0, 0, 0), LatticeSpec(3, 3))


def test_is_dummy_top_buffer():
    spec = LatticeSpec(3, 3)
    for c in range(spec.cols):
        for s in (0, 1):
            assert is_dummy(NodeCoord(spec.rows - 1, c, s), spec)


def test_is_dummy_interior_physical():
    assert not is_dummy(NodeCoord(1, 0, 0), LatticeSpec(3, 3))


@pytest.mark.parametrize("spec", SPECS)
def test_dummy_rules_flag_exactly_the_nonphysical_sites(spec):
    # geometric oracle: a site is physical iff it carries at least one unit bond
    # or is an isolated interior site; rule-based dummies must carry no
    # geometric bonds at all
    geo = brute_force_adjacency(spec)
    dummies = dummy_mask(spec)
    assert not geo.valid[dummies].any()


@pytest.mark.parametrize("spec", SPECS)
def test_physical_degrees(spec):
    adj = adjacency(spec)
    degrees = adj.degrees()[~dummy_mask(spec)]
    assert degrees.min() >= 1 and degrees.max() <= 3
    if spec.n_total >= 64:   # smaller sheets have no interior site
        assert (degrees == 3).any()


def test_interior_node_has_three_bonds():
    spec = LatticeSpec(3, 3)
    j = encode_coord(NodeCoord(3, 2, 0), spec)
    adj = adjacency(spec)
    assert adj.valid[j].sum() == 3


@pytest.mark.parametrize("spec", SPECS)
def test_geometric_oracle_degree_profile(spec):
    geo = brute_force_adjacency(spec)
    degrees = geo.degrees()[~dummy_mask(spec)]
    if spec.n_total >= 64:
        assert degrees.max() == 3
    assert (degrees < 3).any()  # boundary sites exist
    bonds = geo.bond_set()
    assert all((k, j) not in bonds or j < k for j, k in bonds)


def test_geometric_positions_unit_bonds():
    spec = LatticeSpec(3, 2)
    pos = node_positions(spec)
    for j, k in brute_force_adjacency(spec).bond_set():
        assert np.linalg.norm(pos[j] - pos[k]) == pytest.approx(1.0, abs=1e-12)


def test_lattice_rows_schema(tmp_path):
    spec = LatticeSpec(2, 1)
    rows = lattice_rows(spec)
    assert len(rows) == spec.n_total
    assert list(rows[0].keys()) == ["j", "r", "c", "s", "dummy", "neigh0", "neigh1",
                                    "neigh2", "valid0", "valid1", "valid2"]
