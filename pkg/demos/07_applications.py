"""The two flagship experiments plus the scaling studies, with SVG output.

Run:  python demos/07_applications.py
Writes out/heat_regions.svg, out/ripple_msd.svg, out/scaling_*.svg.
"""

from pathlib import Path

import numpy as np

from qenm import enm, measure
from qenm.lattice import LatticeSpec
from qenm.svgplot import scatter_svg, series_svg

out = Path("out")
out.mkdir(exist_ok=True)

# -- heat transfer: binary search tracks the kinetic-energy leading edge
spec = LatticeSpec(2, 3)
probe_times = np.linspace(0.0, 4.5, 10)
heat = measure.heat_experiment(spec, probe_times, n_regions=8, temperature=1.0,
                               seed=11)
hits = sum(f == a for f, a in zip(heat.found_regions, heat.classical_argmax))
print(f"heat transfer: search == classical argmax at {hits}/{len(probe_times)} "
      f"probes, {heat.search_logs[0].query_count} queries per probe")
series_svg(out / "heat_regions.svg", heat.times,
           {"search": np.array(heat.found_regions, dtype=float),
            "classical": np.array(heat.classical_argmax, dtype=float)},
           title="hotspot region vs time", ylabel="region")

# -- out-of-plane rippling: time-averaged MSD grows linearly with T
times = np.linspace(0.0, 15.0, 60)
temps = [0.5, 1.0, 1.5, 2.0]
means = []
for temp in temps:
    res = measure.ripple_msd(LatticeSpec(2, 2), times, temperature=temp, seed=4)
    means.append(res.mean_msd)
    print(f"T={temp}: <M> = {res.mean_msd:.4f}, B-factor = {res.b_factor:.3f}, "
          f"quantum-classical gap {np.abs(res.msd - res.msd_classical).max():.1e}")
series_svg(out / "ripple_msd.svg", times,
           {"msd(T=2)": res.msd, "classical": res.msd_classical},
           title="out-of-plane MSD", ylabel="MSD")
slope = np.polyfit(temps, means, 1)[0]
print(f"<M> vs T slope: {slope:.4f} (linear, as the harmonic model demands)")

# -- scaling studies: cond(B) ~ sqrt(N), Tr(A^+) ~ N
sizes = [(3, 2), (3, 3), (4, 3), (4, 4), (5, 4)]
ns, conds, traces = [], [], []
for n_r, n_c in sizes:
    sys = enm.build_system(LatticeSpec(n_r, n_c))
    ns.append(int(sys.physical.sum()))
    conds.append(enm.condition_number_B(sys))
    traces.append(enm.pseudoinverse_trace(sys))
slope, intercept = np.polyfit(np.log10(ns), np.log10(conds), 1)
print(f"cond(B) log-log slope over N: {slope:.3f}")
scatter_svg(out / "scaling_cond.svg", ns, conds, loglog=True,
            fit=(slope, intercept), title="incidence condition number",
            xlabel="log10 N", ylabel="log10 cond(B)")
t_slope, t_int = np.polyfit(ns, traces, 1)
print(f"Tr(A^+) linear slope over N: {t_slope:.3f}")
scatter_svg(out / "scaling_trace.svg", ns, traces, fit=(t_slope, t_int),
            title="pseudoinverse trace", xlabel="N", ylabel="Tr(A^+)")
print(f"wrote SVGs under {out}/")
