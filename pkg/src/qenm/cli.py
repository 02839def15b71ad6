"""Command-line surface: lattice inspection, validation, simulation, studies.

Subcommands: lattice, validate, simulate, heat, ripple, scaling.
Configuration comes from an optional JSON file (--config) with flag
overrides; every command writes the resolved configuration to
``manifest.json`` in the output directory, and identical configuration plus
seed produces byte-identical outputs.

Seed streams: component seeds derive from the master seed through the keyed
64-bit mix ``prf64(master, role)`` with fixed role indices (velocity-x 0,
velocity-y 1, velocity-z 2, shot-sampler 3, bucket-key 4), so adding a
consumer never shifts existing streams.

Units: the default is the reduced system kappa = m = k_B = 1.  With
``"units": "physical"`` the defaults switch to carbon masses in amu
(m = 12), Angstrom lengths, picosecond times and k_B in amu A^2 ps^-2 K^-1;
this is a pure multiplier layer over the same dimensionless dynamics.

Exit codes: 0 ok, 1 validation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from pathlib import Path

import numpy as np

from . import boltzmann, encoding, enm, measure, svgplot
from .boltzmann import BucketKey, MBParams, prf64
from .circuits import run_basis, simulate
from .lattice import (LatticeSpec, adjacency, brute_force_adjacency, decode_index,
                      dummy_mask, dump_lattice_csv, is_dummy, neighbor)
from .oracles import comparator, connectivity_oracle, mass_oracle

K_B_PHYSICAL = 0.8314462618     # amu A^2 ps^-2 K^-1
SEED_ROLES = {"velocity-x": 0, "velocity-y": 1, "velocity-z": 2,
              "shot-sampler": 3, "bucket-key": 4}

DEFAULTS = {
    "lattice": {"n_r": 3, "n_c": 2},
    "physics": {"units": "reduced", "kappa": 1.0, "mass": 1.0,
                "temperature": 1.0, "k_B": 1.0},
    "initial": {"kind": "boltzmann", "nodes": [], "displacements": []},
    "times": {"start": 0.0, "stop": 6.0, "steps": 50},
    "regions": 8,
    "heat_lattice": {"n_r": 2, "n_c": 3},
    "probe_times": [0.0, 1.0, 2.0, 3.0, 4.0, 4.5],
    "window": None,
    "sizes": [[3, 2], [3, 3], [4, 3], [4, 4], [5, 4], [5, 5]],
    "seed": 0,
    "out_dir": "out",
}


class ConfigError(Exception):
    pass


def derive_seed(master: int, role: str) -> int:
    return prf64(master, SEED_ROLES[role]) & 0x7FFFFFFF


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = _merge(cfg, json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    if cfg["physics"].get("units") == "physical":
        phys_defaults = {"mass": 12.0, "k_B": K_B_PHYSICAL, "temperature": 300.0}
        for key, val in phys_defaults.items():
            file_phys = {}
            if args.config:
                with open(args.config) as fh:
                    file_phys = json.load(fh).get("physics", {})
            if key not in file_phys:
                cfg["physics"][key] = val
        if cfg.get("window") is None:
            cfg["window"] = 1000.0   # ~1 ns in ps
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out_dir is not None:
        cfg["out_dir"] = args.out_dir
    if getattr(args, "temperature", None) is not None:
        cfg["physics"]["temperature"] = args.temperature
    if getattr(args, "time_steps", None) is not None:
        cfg["times"]["steps"] = args.time_steps
    if getattr(args, "sizes", None):
        try:
            cfg["sizes"] = [[int(a), int(b)] for a, b in
                            (item.split("x") for item in args.sizes.split(","))]
        except ValueError as exc:
            raise ConfigError(f"bad --sizes: {args.sizes}") from exc
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: dict) -> None:
    lat = cfg["lattice"]
    if lat["n_r"] < 1 or lat["n_c"] < 1:
        raise ConfigError("lattice register widths must be >= 1")
    phys = cfg["physics"]
    if phys["kappa"] <= 0 or phys["mass"] <= 0 or phys["temperature"] < 0:
        raise ConfigError("need kappa > 0, mass > 0, temperature >= 0")
    if cfg["times"]["steps"] < 1:
        raise ConfigError("need at least one time step")
    init = cfg["initial"]
    bits = lat["n_r"] + lat["n_c"] + 1
    if len(init.get("nodes", [])) > 4 * bits * bits:
        raise ConfigError("perturbation list exceeds the polylog budget (4 n^2 nodes)")
    if phys.get("units") == "physical":
        if any(abs(d) > 1.0 for d in init.get("displacements", [])):
            raise ConfigError("physical-units displacements must stay within 1 Angstrom")


def _spec(cfg) -> LatticeSpec:
    return LatticeSpec(cfg["lattice"]["n_r"], cfg["lattice"]["n_c"])


def _times(cfg) -> np.ndarray:
    t = cfg["times"]
    return np.linspace(t["start"], t["stop"], t["steps"])


def _out_dir(cfg) -> Path:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(cfg: dict, out: Path) -> None:
    with open(out / "manifest.json", "w") as fh:
        json.dump(cfg, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _initial_conditions(cfg, sys, axes: int = 2):
    """(x0, xdot0) shaped (axes, N) from the configured initial-condition spec."""
    init = cfg["initial"]
    phys_cfg = cfg["physics"]
    x0 = np.zeros((axes, sys.n))
    xdot0 = np.zeros((axes, sys.n))
    if init["kind"] not in ("zero", "perturbed", "boltzmann"):
        raise ConfigError(f"unknown initial-condition kind {init['kind']!r}")
    if init["kind"] == "perturbed" or init.get("nodes"):
        nodes = init.get("nodes", [])
        disps = init.get("displacements", [])
        if len(disps) not in (0, len(nodes)):
            raise ConfigError("displacements must match the perturbed node list")
        for idx, j in enumerate(nodes):
            mag = disps[idx] if disps else 0.1
            x0[:, int(j)] = mag
    if init["kind"] == "boltzmann":
        params = MBParams(m=phys_cfg["mass"], T=phys_cfg["temperature"],
                          k_B=phys_cfg["k_B"], D=axes)
        disc = boltzmann.discretize_two_bucket(params)
        roles = ["velocity-x", "velocity-y", "velocity-z"][:axes]
        for a, role in enumerate(roles):
            rng = np.random.default_rng(derive_seed(cfg["seed"], role))
            key = BucketKey.random(sys.spec.address_bits, rng)
            for j in np.flatnonzero(sys.physical):
                b = boltzmann.bucket_assignment(int(j), key)
                xdot0[a, j] = disc.velocities[b]
    return x0, xdot0


# -- subcommands ---------------------------------------------------------------


def cmd_lattice(cfg) -> int:
    spec = _spec(cfg)
    out = _out_dir(cfg)
    dump_lattice_csv(spec, out / "lattice.csv")
    svgplot.lattice_svg(out / "lattice.svg", spec)
    _write_manifest(cfg, out)
    dummies = int(dummy_mask(spec).sum())
    print(f"lattice {spec.rows}x{spec.cols} cells: {spec.n_total} sites, "
          f"{spec.n_total - dummies} physical, {dummies} dummy")
    print(f"wrote {out / 'lattice.csv'} and {out / 'lattice.svg'}")
    return 0


def _validation_checks(cfg):
    spec = _spec(cfg)
    checks = []

    adj = adjacency(spec)
    geo = brute_force_adjacency(spec)
    round_trip = all(
        ((co := decode_index(j, spec)).r << (spec.n_c + 1)) | (co.c << 1) | co.s == j
        for j in range(spec.n_total))
    checks.append(("encode-decode-roundtrip", round_trip, f"{spec.n_total} indices"))
    same_bonds = adj.bond_set() == geo.bond_set()
    checks.append(("shift-table-vs-geometric-adjacency", same_bonds,
                   f"{len(adj.bond_set())} bonds"))
    ghosts_rule = {(min(j, int(adj.neighbors[j, l])), max(j, int(adj.neighbors[j, l])))
                   for j in range(spec.n_total) for l in range(3) if not adj.valid[j, l]}
    checks.append(("dummy-rules-vs-geometry", not (ghosts_rule & geo.bond_set()),
                   f"{len(ghosts_rule)} flagged ghost bonds, none physical"))
    symmetric = True
    for j in range(spec.n_total):
        for l in range(3):
            k, valid = neighbor(j, l, spec)
            back = [neighbor(k, lb, spec) for lb in range(3)]
            if (j, valid) not in back:
                symmetric = False
    checks.append(("validity-symmetric", symmetric, "all (j,l)"))
    degrees = adj.degrees()[~dummy_mask(spec)]
    deg_ok = bool(np.all((degrees >= 1) & (degrees <= 3))) and bool(np.any(degrees == 3))
    checks.append(("degree-profile", deg_ok,
                   f"degrees {sorted(set(int(d) for d in degrees))}"))

    sys = enm.build_system(spec, cfg["physics"]["kappa"], cfg["physics"]["mass"])
    err_a = float(np.abs(sys.B @ sys.B.T - sys.A).max())
    checks.append(("factorization-BBt-equals-A", err_a <= 1e-10, f"max err {err_a:.2e}"))
    sq = np.sqrt(sys.masses)
    err_f = float(np.abs((sq[:, None] * sys.B) @ (sq[:, None] * sys.B).T - sys.F).max())
    checks.append(("factorization-sqrtMB-equals-F", err_f <= 1e-10, f"max err {err_f:.2e}"))
    eigs = np.linalg.eigvalsh(sys.A)
    checks.append(("A-positive-semidefinite", eigs[0] >= -1e-10, f"min eig {eigs[0]:.2e}"))
    phys = np.flatnonzero(sys.physical)
    a_phys = sys.A[np.ix_(phys, phys)]
    w_phys = np.linalg.eigvalsh(a_phys)
    nulls = int((w_phys <= 1e-9 * max(w_phys[-1], 1.0)).sum())
    checks.append(("null-space-dimension", nulls == 1, f"dim {nulls}"))

    rng = np.random.default_rng(derive_seed(cfg["seed"], "bucket-key"))
    x0 = np.zeros((2, sys.n))
    xdot0 = np.zeros((2, sys.n))
    xdot0[:, phys] = rng.normal(0.0, 1.0, (2, len(phys)))
    ts = np.linspace(0.0, 10.0, 200)
    traj = enm.evolve_classical(sys, x0, xdot0, ts)
    e0 = enm.total_energy(traj, 0)
    drift = max(abs(enm.total_energy(traj, ti) - e0) for ti in range(len(ts))) / e0
    checks.append(("energy-conservation", drift <= 1e-9, f"rel drift {drift:.2e}"))
    sqm = np.sqrt(sys.masses)
    fvals = [enm.conserved_F(sys, sqm * traj.x[ti, 0], sqm * traj.xdot[ti, 0])
             for ti in range(0, len(ts), 20)]
    fdrift = (max(fvals) - min(fvals)) / max(fvals)
    checks.append(("F-conservation", fdrift <= 1e-8, f"rel drift {fdrift:.2e}"))

    circ = connectivity_oracle(spec)
    mismatches = 0
    for j in range(spec.n_total):
        co = decode_index(j, spec)
        for l in range(3):
            outp = run_basis(circ, {"r": co.r, "c": co.c, "s": co.s, "ell": l})
            k_cl, valid = neighbor(j, l, spec)
            kc = decode_index(k_cl, spec)
            if ((outp["rp"], outp["cp"], outp["sp"], outp["f"], outp["ell"], outp["anc"])
                    != (kc.r, kc.c, kc.s, 0 if valid else 1, 0, 0)):
                mismatches += 1
    checks.append(("connectivity-oracle-exhaustive", mismatches == 0,
                   f"{spec.n_total * 3} basis states, {mismatches} mismatches"))

    mo = mass_oracle(12, spec.address_bits)
    once = run_basis(mo, {"j": 3, "z": 0})["z"]
    twice = run_basis(mo, {"j": 3, "z": once})["z"]
    checks.append(("mass-oracle-involution", once == 12 and twice == 0, f"z -> {once} -> {twice}"))
    comp = comparator(4)
    comp_ok = all(run_basis(comp, {"j": j, "k": k})["flag"] == (1 if k < j else 0)
                  for j in range(16) for k in range(16))
    checks.append(("comparator-table", comp_ok, "256 pairs"))
    uc = encoding.diffusion_projector_circuit(3)
    proj_ok = True
    for tv in range(8):
        st = simulate(uc, {"a": 0, "t": tv})
        amp = st.amplitude({"a": 0, "t": tv})
        if abs(amp - (1.0 if tv == 0 else 0.0)) > 1e-12:
            proj_ok = False
    checks.append(("zero-projector-block", proj_ok, "8 basis states"))

    params = MBParams(m=cfg["physics"]["mass"], T=cfg["physics"]["temperature"] or 1.0,
                      k_B=cfg["physics"]["k_B"])
    disc = boltzmann.discretize_two_bucket(params)
    moment_ok = (abs(disc.moment(1)) <= 1e-12 and abs(disc.moment(3)) <= 1e-12
                 and abs(disc.moment(2) - params.sigma**2) <= 1e-9)
    checks.append(("two-bucket-moments", moment_ok,
                   f"m2 err {abs(disc.moment(2) - params.sigma**2):.2e}"))
    return checks


def cmd_validate(cfg) -> int:
    out = _out_dir(cfg)
    checks = _validation_checks(cfg)
    lines = []
    for name, passed, detail in checks:
        status = "PASS" if passed else "FAIL"
        lines.append(f"{status} {name}: {detail}")
        print(lines[-1])
    failed = sum(1 for _, passed, _ in checks if not passed)
    print(f"{len(checks)} checks, {failed} failed")
    with open(out / "validation.txt", "w") as fh:
        fh.write("\n".join(lines) + f"\n{len(checks)} checks, {failed} failed\n")
    _write_manifest(cfg, out)
    return 1 if failed else 0


def cmd_simulate(cfg) -> int:
    spec = _spec(cfg)
    out = _out_dir(cfg)
    sys = enm.build_system(spec, cfg["physics"]["kappa"], cfg["physics"]["mass"])
    x0, xdot0 = _initial_conditions(cfg, sys)
    times = _times(cfg)
    traj = enm.evolve_classical(sys, x0, xdot0, times)
    enm.dump_trajectory_csv(traj, out / "trajectory.csv")

    zero_ic = not (np.any(x0) or np.any(xdot0))
    with open(out / "comparison.csv", "w") as fh:
        fh.write("t,max_amplitude_deviation,kinetic_fraction,potential_fraction\n")
        if zero_ic:
            for t in times:
                fh.write(f"{t:.17g},0,0,0\n")
        else:
            st0 = encoding.prepare_standard(sys, x0, xdot0)
            bh = encoding.build_block_H(sys)
            encoding.dump_state_csv(st0, out / "state_t0.csv")
            all_nodes = tuple(range(sys.n))
            for ti, t in enumerate(times):
                st = encoding.evolve_exact(st0, bh, t)
                ref = encoding.prepare_standard(sys, traj.x[ti], traj.xdot[ti])
                dev = float(np.abs(st.tensor - ref.tensor).max())
                kin = measure.energy_fraction(
                    st, measure.SubsetSelector("kinetic", all_nodes)).estimate
                pot = measure.energy_fraction(
                    st, measure.SubsetSelector("potential")).estimate
                fh.write(f"{t:.17g},{dev:.17g},{kin:.17g},{pot:.17g}\n")
    _write_manifest(cfg, out)
    print(f"wrote {out / 'trajectory.csv'} and {out / 'comparison.csv'}")
    return 0


def cmd_heat(cfg) -> int:
    out = _out_dir(cfg)
    lat = cfg["heat_lattice"]
    spec = LatticeSpec(lat["n_r"], lat["n_c"])
    result = measure.heat_experiment(
        spec, np.asarray(cfg["probe_times"], dtype=float),
        n_regions=cfg["regions"], temperature=cfg["physics"]["temperature"],
        kappa=cfg["physics"]["kappa"], mass=cfg["physics"]["mass"],
        k_B=cfg["physics"]["k_B"], seed=derive_seed(cfg["seed"], "bucket-key"))
    with open(out / "heat_search.csv", "w") as fh:
        fh.write("t,found_region,classical_argmax,queries,match\n")
        for t, f, a, log in zip(result.times, result.found_regions,
                                result.classical_argmax, result.search_logs):
            fh.write(f"{t:.17g},{f},{a},{log.query_count},{int(f == a)}\n")
    rows = []
    for t, log in zip(result.times, result.search_logs):
        for rnd_idx, rnd in enumerate(log.rounds):
            rows.append((t, f"round{rnd_idx}-low", ",".join(map(str, rnd.region_indices)),
                         rnd.frac_low, 0.0, "exact-expectation"))
            rows.append((t, f"round{rnd_idx}-high", ",".join(map(str, rnd.region_indices)),
                         rnd.frac_high, 0.0, "exact-expectation"))
    with open(out / "heat_queries.csv", "w") as fh:
        fh.write("t,observable,subset_id,estimate,stderr,mode\n")
        for t, obs, sid, est, err, mode in rows:
            fh.write(f'{t:.17g},{obs},"{sid}",{est:.17g},{err:.17g},{mode}\n')
    svgplot.series_svg(out / "heat_regions.svg", result.times,
                       {"search": np.array(result.found_regions, dtype=float),
                        "classical argmax": np.array(result.classical_argmax, dtype=float)},
                       title="heat front region vs time", ylabel="region index")
    _write_manifest(cfg, out)
    matches = sum(f == a for f, a in zip(result.found_regions, result.classical_argmax))
    print(f"heat search matched classical argmax at {matches}/{len(result.times)} probes")
    return 0


def cmd_ripple(cfg) -> int:
    out = _out_dir(cfg)
    spec = _spec(cfg)
    window = cfg.get("window") or cfg["times"]["stop"]
    times = np.linspace(0.0, float(window), cfg["times"]["steps"])
    result = measure.ripple_msd(
        spec, times, temperature=cfg["physics"]["temperature"],
        kappa=cfg["physics"]["kappa"], mass=cfg["physics"]["mass"],
        k_B=cfg["physics"]["k_B"], seed=derive_seed(cfg["seed"], "velocity-z"))
    disc = boltzmann.discretize_two_bucket(MBParams(
        m=cfg["physics"]["mass"], T=cfg["physics"]["temperature"],
        k_B=cfg["physics"]["k_B"], D=1))
    with open(out / "bucket_spec.json", "w") as fh:
        json.dump(boltzmann.bucket_spec_json(disc), fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(out / "ripple_msd.csv", "w") as fh:
        fh.write("t,observable,subset_id,estimate,stderr,mode\n")
        for t, mq, mc in zip(result.times, result.msd, result.msd_classical):
            fh.write(f"{t:.17g},msd,all,{mq:.17g},0,exact-expectation\n")
            fh.write(f"{t:.17g},msd-classical,all,{mc:.17g},0,classical\n")
    svgplot.series_svg(out / "ripple_msd.svg", result.times,
                       {"quantum": result.msd, "classical": result.msd_classical},
                       title="out-of-plane MSD", ylabel="MSD")
    _write_manifest(cfg, out)
    print(f"time-averaged MSD {result.mean_msd:.6g}, B-factor {result.b_factor:.6g}")
    return 0


def cmd_scaling(cfg, kind: str) -> int:
    out = _out_dir(cfg)
    records = []
    for n_r, n_c in cfg["sizes"]:
        spec = LatticeSpec(n_r, n_c)
        if spec.n_total > 1 << 12:
            raise ConfigError(f"lattice {n_r}x{n_c} too large for dense spectra")
        sys = enm.build_system(spec, cfg["physics"]["kappa"], cfg["physics"]["mass"])
        n_phys = int(sys.physical.sum())
        value = (enm.condition_number_B(sys) if kind == "cond"
                 else enm.pseudoinverse_trace(sys))
        records.append((n_phys, value))
    records.sort()
    ns = np.array([r[0] for r in records], dtype=float)
    vals = np.array([r[1] for r in records], dtype=float)

    fit = {}
    if len(records) >= 2:
        if kind == "cond":
            slope, intercept = np.polyfit(np.log10(ns), np.log10(vals), 1)
            pred = slope * np.log10(ns) + intercept
            ss_res = float(np.sum((np.log10(vals) - pred) ** 2))
            ss_tot = float(np.sum((np.log10(vals) - np.log10(vals).mean()) ** 2))
        else:
            slope, intercept = np.polyfit(ns, vals, 1)
            pred = slope * ns + intercept
            ss_res = float(np.sum((vals - pred) ** 2))
            ss_tot = float(np.sum((vals - vals.mean()) ** 2))
        fit = {"slope": float(slope), "intercept": float(intercept),
               "r_squared": 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0}

    with open(out / f"scaling_{kind}.csv", "w") as fh:
        fh.write("n_physical,value\n")
        for n_phys, value in records:
            fh.write(f"{n_phys},{value:.17g}\n")
    with open(out / f"scaling_{kind}_fit.json", "w") as fh:
        json.dump(fit, fh, sort_keys=True, indent=2)
        fh.write("\n")
    svgplot.scatter_svg(
        out / f"scaling_{kind}.svg", ns, vals,
        title=("incidence condition number" if kind == "cond" else "pseudoinverse trace"),
        xlabel="log10 N" if kind == "cond" else "N",
        ylabel="log10 value" if kind == "cond" else "value",
        fit=(fit["slope"], fit["intercept"]) if fit else None,
        loglog=(kind == "cond"))
    _write_manifest(cfg, out)
    if fit:
        print(f"{kind}: slope {fit['slope']:.4f}, R^2 {fit['r_squared']:.5f} "
              f"over {len(records)} sizes")
    else:
        print(f"{kind}: single size, points only")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qenm", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("lattice", "validate", "simulate", "heat", "ripple", "scaling"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out-dir", default=None)
        p.add_argument("--temperature", type=float, default=None)
        p.add_argument("--time-steps", type=int, default=None)
        p.add_argument("--sizes", default=None)
        if name == "scaling":
            p.add_argument("kind", choices=("cond", "trace"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    handlers = {"lattice": cmd_lattice, "validate": cmd_validate,
                "simulate": cmd_simulate, "heat": cmd_heat, "ripple": cmd_ripple}
    try:
        if args.command == "scaling":
            return cmd_scaling(cfg, args.kind)
        return handlers[args.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
