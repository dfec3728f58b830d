"""Best squeezed single-photon and 0/2 superposition approximations of a cat.

    python scripts/approximation_optimum.py [--alpha 1] [--gamma 1]

Prints the optimal (omega, r) with r in dB under both variance laws.
"""

import argparse

from catability.approximations import optimize_approximation


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=1.0)
    args = ap.parse_args()
    for kind in ("single-photon", "zero-two"):
        o = optimize_approximation(kind, args.alpha, args.gamma)
        print(f"{kind:13s} omega={o.omega:.4f} r={o.r:+.4f} "
              f"dB(e^2r)={o.db_exp2r:+.2f} dB(e^4r)={o.db_exp4r:+.2f} <O>={o.value:.6f}")


if __name__ == "__main__":
    main()
