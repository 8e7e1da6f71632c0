"""How much mismatch can two sources tolerate?

For each kind of mismatch the full simulator is compared with the ideal
exponential-wavepacket model, first at a few points, then as thresholds
(largest mismatch keeping g2 below 0.2).  The fast profile keeps this quick;
use "default" for quotable numbers.
"""
from homsim.oracle import IdealParams, ideal_g2hom, ideal_threshold
from homsim.sweep import Scenario, find_threshold, g2_of, set_param

PRECISION = "fast"

print("detuning  simulated  ideal   (identical lifetimes)")
for dw in (0.0, 0.5, 1.0, 2.0):
    sim = g2_of(set_param(Scenario(), "delta_omega", dw), PRECISION)
    print(f"  {dw:<7g} {sim:.4f}    {ideal_g2hom(IdealParams(delta_omega=dw)):.4f}")

print("\naxis          threshold(g2<0.2)  ideal")
for axis in ("gamma_ratio", "delta_omega", "delta_tau", "gamma_deph"):
    x = find_threshold(axis, 0.2, precision=PRECISION)
    print(f"  {axis:<12s} {x:>10.3f}        {ideal_threshold(axis, 0.2):.3f}")
