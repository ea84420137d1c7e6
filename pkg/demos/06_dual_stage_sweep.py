"""Dual-stage squeezer: feeding squeezed light back into a fiber.

The first fiber-and-filter stage is summarized by two numbers and a
profile: its measured squeezing S1 fixes r = -ln(S1)/2, and its filter's
in-band deviation h(w) = H(w) - 1 imprints the mean perturbation
delta_a0(w) = h(w) f0(w) on the soliton.  The second stage then behaves
like a single-stage squeezer fed by an ideal squeezed state: its
covariance is the coherent-input kernel scaled by exp(-2r) minus the
rank-one mean term.  With both stages near three soliton periods the
observed squeezing roughly doubles in dB.

Writes the sweep to dss_sweep.csv next to this script.
"""

from pathlib import Path

from solsqueeze import calibrate_bandwidth, extract_r, make_grid, parabolic_filter
from solsqueeze.cascade import StageChain, StageSpec, maps_for_lengths, run_dss, run_sss

grid = make_grid(256, 20.0)
filt = parabolic_filter(grid, calibrate_bandwidth(grid, 0.1))

# characterize stage one at its optimum
s1, _ = run_sss(StageSpec(3.0, filt), grid)
print(f"stage one (3 periods, 10% parabolic filter): S1 = {s1:.5f}")
print(f"  equivalent squeezing parameter r = {extract_r(s1):.4f}")

# sweep stage two with stage one frozen
lengths = [0.25 * k for k in range(33)]
chain = StageChain((StageSpec(3.0, filt), StageSpec(3.0, filt)))
maps = maps_for_lengths(grid, lengths)
points, report = run_dss(chain, grid, sweep_lengths=lengths, maps=maps, cross_check=False)

print("\n stage-two length    dual-stage squeezing [dB]")
for p in points[::2]:
    bar = "#" * max(0, int(round(5 * p.db)))
    print(f"  {p.length_soliton_periods:>6.2f}             {p.db:+7.3f}  {bar}")

best = max(points, key=lambda p: p.db)
print(f"\nmaximum squeezing: {best.db:.3f} dB at {best.length_soliton_periods} periods "
      f"(single stage gave {report['db_first_stage']:.3f} dB)")

# the reduction freezes the mean and scales the kernel uniformly; an
# explicitly propagated squeezed state quantifies that approximation
_, check = run_dss(chain, grid, cross_check=True)
print(f"reduction vs explicitly propagated squeezed input: |dS| = {check['cross_check_gap']:.4f}")

out = Path(__file__).with_name("dss_sweep.csv")
rows = ["length_soliton_periods,s_value,squeezing_db"] + [
    f"{p.length_soliton_periods:.9g},{p.s_value:.9g},{p.db:.9g}" for p in points
]
out.write_text("\n".join(rows) + "\n")
print(f"wrote {out.name}")
