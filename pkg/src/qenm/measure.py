"""Observables over encoded states and the two flagship experiments.

The standard encoding exposes energies as probabilities: the summed
|amplitude|^2 over a node subset V of the velocity block is K_V(t)/E, and
over a bond subset of the pair block is U_V(t)/E.  The alternative
encoding exposes squared displacements: the first-block weight of V is
sum_V (P y)_i^2 / 2F, so the subset MSD is (2F/|V|) times that weight.

Exact-expectation mode reads the probabilities off the statevector; shot
mode Bernoulli-samples subset membership and reports the binomial standard
error.  Reports also quote the fraction itself as the detectability ratio
(a subset exponentially smaller than E is formally measurable but needs
exponentially many estimation calls, ~log(1/delta)/epsilon per the
amplitude-estimation contract).

Heat transfer: a boundary hotspot gets thermal velocities, the rest of the
sheet starts cold, and a classical binary search over column bands tracks
the leading edge by keeping the half with the larger kinetic-energy
fraction at each of ceil(log2(#regions)) halvings (ties keep the
lexicographically lower half).  Rippling: out-of-plane thermal velocities,
alternative encoding, time-averaged MSD and the B-factor 8 pi^2 <M>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import boltzmann, encoding, enm
from .lattice import LatticeSpec, decode_index


@dataclass(frozen=True)
class SubsetSelector:
    target: str                       # "kinetic" | "potential" | "displacement"
    nodes: tuple[int, ...] = ()
    bonds: tuple[tuple[int, int], ...] = ()
    axis: int | None = None           # None sums all axes


@dataclass
class EstimateReport:
    estimate: float                   # fraction of the conserved constant
    mode: str                         # "exact-expectation" | "shot-sampled"
    shots: int | None = None
    stderr: float = 0.0
    observable: float | None = None   # rescaled physical value when defined
    epsilon: float = 0.01
    delta: float = 0.05
    oracle_calls: int = field(init=False)

    def __post_init__(self):
        self.oracle_calls = oracle_call_estimate(self.epsilon, self.delta)

    @property
    def detectability(self) -> float:
        return self.estimate


def oracle_call_estimate(epsilon: float, delta: float) -> int:
    """Amplitude-estimation call count O(log(1/delta)/epsilon)."""
    if epsilon <= 0 or not 0 < delta < 1:
        raise ValueError("need epsilon > 0 and 0 < delta < 1")
    return math.ceil(math.log(1.0 / delta) / epsilon)


def _axis_slice(state: encoding.EncodedState, axis):
    return range(state.axes) if axis is None else (axis,)


def subset_probability(state: encoding.EncodedState, sel: SubsetSelector) -> float:
    """Summed |amplitude|^2 over the basis states selected by ``sel``."""
    if sel.target == "kinetic" or (sel.target == "displacement"
                                   and state.tag == "alternative"):
        nodes = np.asarray(sel.nodes, dtype=int)
        if nodes.size == 0:
            raise ValueError("empty node subset")
        return float(sum(np.sum(np.abs(state.tensor[a, 0, nodes, 0]) ** 2)
                         for a in _axis_slice(state, sel.axis)))
    if sel.target == "potential":
        bonds = sel.bonds if sel.bonds else tuple(state.sys.pairs)
        total = 0.0
        for a in _axis_slice(state, sel.axis):
            for j, k in bonds:
                total += abs(state.tensor[a, 1, j, k]) ** 2
        return total
    if sel.target == "displacement":
        raise ValueError(
            "standard encoding carries no displacement amplitudes (all kappa_jj = 0)")
    raise ValueError(f"unknown selector target {sel.target!r}")


def energy_fraction(state: encoding.EncodedState, sel: SubsetSelector,
                    epsilon: float = 0.01, delta: float = 0.05) -> EstimateReport:
    """K_V/E (or U_V/E) as an exact expectation over the standard encoding."""
    if state.tag != "standard":
        raise ValueError("energy fractions require the standard encoding")
    frac = subset_probability(state, sel)
    return EstimateReport(frac, "exact-expectation",
                          observable=frac * state.norm_constant,
                          epsilon=epsilon, delta=delta)


def msd_fraction(state: encoding.EncodedState, sel: SubsetSelector,
                 epsilon: float = 0.01, delta: float = 0.05) -> EstimateReport:
    """Subset MSD fraction and the rescaled (2F/|V|) value, alternative encoding."""
    if state.tag != "alternative":
        raise ValueError("MSD requires the alternative encoding")
    frac = subset_probability(state, SubsetSelector("displacement", sel.nodes))
    msd = 2.0 * state.norm_constant * frac / len(sel.nodes)
    return EstimateReport(frac, "exact-expectation", observable=msd,
                          epsilon=epsilon, delta=delta)


def shot_sample(state: encoding.EncodedState, sel: SubsetSelector, shots: int,
                seed: int, epsilon: float = 0.01, delta: float = 0.05) -> EstimateReport:
    """Bernoulli sampling of subset membership; binomial standard error."""
    if shots < 1:
        raise ValueError("need at least one shot")
    p = subset_probability(state, sel)
    rng = np.random.default_rng(seed)
    hits = int(rng.binomial(shots, min(max(p, 0.0), 1.0)))
    est = hits / shots
    stderr = math.sqrt(max(est * (1.0 - est), 0.0) / shots)
    return EstimateReport(est, "shot-sampled", shots=shots, stderr=stderr,
                          observable=est * state.norm_constant,
                          epsilon=epsilon, delta=delta)


# -- heat transfer -------------------------------------------------------------


def column_regions(spec: LatticeSpec, n_regions: int) -> list[tuple[int, ...]]:
    """Physical nodes split into contiguous unit-cell-column bands."""
    cols = spec.cols
    if n_regions < 1 or cols % n_regions != 0:
        raise ValueError(f"{n_regions} regions do not tile {cols} columns")
    width = cols // n_regions
    bands: list[list[int]] = [[] for _ in range(n_regions)]
    from .lattice import is_dummy
    for j in range(spec.n_total):
        co = decode_index(j, spec)
        if not is_dummy(co, spec):
            bands[co.c // width].append(j)
    return [tuple(b) for b in bands]


@dataclass
class SearchRound:
    region_indices: tuple[int, ...]
    frac_low: float
    frac_high: float
    kept: str                          # "low" | "high"


@dataclass
class SearchResult:
    region_index: int
    nodes: tuple[int, ...]
    rounds: list[SearchRound]

    @property
    def query_count(self) -> int:
        return len(self.rounds)


def heat_binary_search(state: encoding.EncodedState,
                       regions: list[tuple[int, ...]]) -> SearchResult:
    """Locate the kinetic-energy leading edge among 2^m disjoint regions.

    Each query halves the candidate set, measuring the kinetic fraction of
    both halves and keeping the larger; exact ties keep the
    lexicographically lower half.  Issues exactly log2(#regions) queries.
    """
    m = int(math.log2(len(regions)))
    if 1 << m != len(regions):
        raise ValueError("region count must be a power of two")
    current = tuple(range(len(regions)))
    rounds: list[SearchRound] = []
    while len(current) > 1:
        half = len(current) // 2
        low, high = current[:half], current[half:]
        frac_low = subset_probability(
            state, SubsetSelector("kinetic", sum((regions[i] for i in low), ())))
        frac_high = subset_probability(
            state, SubsetSelector("kinetic", sum((regions[i] for i in high), ())))
        if frac_high > frac_low:
            current, kept = high, "high"
        else:
            current, kept = low, "low"
        rounds.append(SearchRound(current, frac_low, frac_high, kept))
    idx = current[0]
    return SearchResult(idx, regions[idx], rounds)


@dataclass
class HeatResult:
    times: np.ndarray
    found_regions: list[int]
    classical_argmax: list[int]
    search_logs: list[SearchResult]
    n_regions: int


def heat_experiment(spec: LatticeSpec, times, hotspot_region: int = 0,
                    n_regions: int = 8, temperature: float = 1.0,
                    kappa: float = 1.0, mass: float = 1.0, k_B: float = 1.0,
                    seed: int = 0) -> HeatResult:
    """Boundary-hotspot heat propagation tracked by binary search.

    The hotspot region's nodes carry median-split thermal velocities; the
    rest of the sheet starts at T = 0 with zero displacements, so the
    total energy is purely kinetic and the standard encoding needs no
    amplitude amplification.
    """
    sys = enm.build_system(spec, kappa=kappa, mass=mass)
    regions = column_regions(spec, n_regions)
    params = boltzmann.MBParams(m=mass, T=temperature, k_B=k_B, D=2)
    disc = boltzmann.discretize_two_bucket(params)
    rng = np.random.default_rng(seed)
    keys = [boltzmann.BucketKey.random(spec.address_bits, rng) for _ in range(2)]
    xdot0 = np.zeros((2, sys.n))
    for j in regions[hotspot_region]:
        for axis in range(2):
            b = boltzmann.bucket_assignment(j, keys[axis])
            xdot0[axis, j] = disc.velocities[b]
    x0 = np.zeros((2, sys.n))
    times = np.asarray(times, dtype=float)
    traj = enm.evolve_classical(sys, x0, xdot0, times)
    st0 = encoding.prepare_standard(sys, x0, xdot0)
    bh = encoding.build_block_H(sys)
    found, argmax, logs = [], [], []
    for ti, t in enumerate(times):
        st = encoding.evolve_exact(st0, bh, t)
        res = heat_binary_search(st, regions)
        classical = [enm.kinetic_energy_subset(traj, ti, band) for band in regions]
        found.append(res.region_index)
        argmax.append(int(np.argmax(classical)))
        logs.append(res)
    return HeatResult(times, found, argmax, logs, n_regions)


# -- out-of-plane rippling ------------------------------------------------------


@dataclass
class RippleResult:
    times: np.ndarray
    msd: np.ndarray                  # quantum-path subset MSD per time
    msd_classical: np.ndarray
    mean_msd: float
    b_factor: float


def ripple_msd(spec: LatticeSpec, times, temperature: float,
               kappa: float = 1.0, mass: float = 1.0, k_B: float = 1.0,
               seed: int = 0) -> RippleResult:
    """Out-of-plane MSD of the whole physical sheet from thermal velocities.

    The z axis reuses the in-plane harmonic machinery (axes are uncoupled).
    Velocities are median-split thermal samples with the center-of-mass
    drift projected out, zero displacements; the quantum path evolves the
    alternative encoding and reads the MSD fraction, the classical path is
    the spectral trajectory.
    """
    times = np.asarray(times, dtype=float)
    sys = enm.build_system(spec, kappa=kappa, mass=mass)
    phys = tuple(int(j) for j in np.flatnonzero(sys.physical))
    if temperature == 0.0:
        zeros = np.zeros_like(times)
        return RippleResult(times, zeros, zeros.copy(), 0.0, 0.0)
    period = 2.0 * math.pi / math.sqrt(np.linalg.eigvalsh(sys.A)[-1])
    if times[-1] - times[0] < period:
        import warnings
        warnings.warn("averaging window shorter than one oscillation period")

    params = boltzmann.MBParams(m=mass, T=temperature, k_B=k_B, D=1)
    disc = boltzmann.discretize_two_bucket(params)
    rng = np.random.default_rng(seed)
    key = boltzmann.BucketKey.random(spec.address_bits, rng)
    zdot0 = np.zeros(sys.n)
    for j in phys:
        zdot0[j] = disc.velocities[boltzmann.bucket_assignment(j, key)]
    # zero net momentum: project the mass-weighted velocity onto range(A)
    sp = enm.spectral(sys)
    sqrt_m = np.sqrt(sys.masses)
    zdot0 = (sp.P @ (sqrt_m * zdot0)) / sqrt_m
    z0 = np.zeros(sys.n)

    traj = enm.evolve_classical(sys, z0, zdot0, times, axes=("z",))
    st0 = encoding.prepare_alternative(sys, z0, zdot0)
    bh = encoding.build_block_H(sys)
    sel = SubsetSelector("displacement", phys)
    msd_q = np.empty(times.size)
    msd_c = np.empty(times.size)
    for ti, t in enumerate(times):
        st = encoding.evolve_exact(st0, bh, t)
        msd_q[ti] = msd_fraction(st, sel).observable
        msd_c[ti] = enm.msd_subset(traj, ti, phys)
    mean = enm.time_average(msd_q, times)
    return RippleResult(times, msd_q, msd_c, mean, enm.b_factor(mean))


def dump_results_csv(path, rows) -> None:
    """rows: iterables of (t, observable, subset_id, estimate, stderr, mode)."""
    with open(path, "w") as fh:
        fh.write("t,observable,subset_id,estimate,stderr,mode\n")
        for t, obs, sid, est, err, mode in rows:
            fh.write(f"{t:.17g},{obs},{sid},{est:.17g},{err:.17g},{mode}\n")
