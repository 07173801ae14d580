"""Follow a few zeros through the detector: mollified tail, dyadic block, witness.

Run: python3 demos/detector_walkthrough.py
"""

from densitylab.calibration import zero_table
from densitylab.detector import DetectorConfig, classify_zero, witness_from_block
from densitylab.errors import DetectionFailure


def main():
    cfg = DetectorConfig(nu=0.5, eps=0.3, T=1e4, U=200)
    tab = zero_table(402.0)
    print(f"R = {cfg.R_len:.3f}, dyadic threshold = {cfg.dyadic_threshold:.4f}")
    for g in tab.gammas[tab.gammas >= 200][:4].tolist():
        w = classify_zero(g, cfg)
        d = w.details
        print(f"gamma={g:.6f} tail={d['tail']:.3f} residual={d['identity_residual']:.3f} "
              f"K={w.K:.2f} block={d['dyadic_value']:.3f} -> {w.tag}")

    # a wider configuration where K can land outside the exceptional ranges
    wide = DetectorConfig(nu=0.5, eps=0.1, T=1e3, U=400)
    tab = zero_table(802.0)
    for K in (4.0, 30.0):
        for g in tab.gammas[tab.gammas >= 400][:12].tolist():
            try:
                w = witness_from_block(g, wide, K)
            except DetectionFailure:
                continue
            print(f"K={K:g} gamma={g:.4f}: {w.tag} |sum over ({w.M:.2f}, {w.M_prime:.0f}]| = "
                  f"{w.value:.4f} >= {w.threshold:.4f}, re-evaluated {w.reverify():.4f}")
            break


if __name__ == "__main__":
    main()
