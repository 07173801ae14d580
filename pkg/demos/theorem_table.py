"""Measure of the large-value set next to the zero-count side, for a few heights T.

Run: python3 demos/theorem_table.py [T ...]
"""

import sys

from densitylab.calibration import zero_table
from densitylab.large_values import ScanConfig, measure_theorem_lhs, theorem_rhs

NU, EPS, DT = 0.4, 0.25, 0.05


def main(Ts):
    table = zero_table(max(Ts))
    print(f"{'T':>8} {'measure':>10} {'rhs':>9} {'8T^(nu/2+eps)':>14} {'measure/T^(nu/2)':>17}")
    for T in Ts:
        iv = measure_theorem_lhs(ScanConfig(T=T, dt=DT, nu=NU, eps=EPS))
        rhs = theorem_rhs(T, NU, EPS, table)
        print(f"{T:8g} {iv.measure:10.2f} {rhs['rhs']:9.2f} {8 * T ** (NU / 2 + EPS):14.2f} "
              f"{iv.measure / T ** (NU / 2):17.2f}")
    print("zero counts above 1/2 vanish here, so the right side is the T^(nu/2+eps) term alone")


if __name__ == "__main__":
    main([float(x) for x in sys.argv[1:]] or [1000.0, 3000.0])
