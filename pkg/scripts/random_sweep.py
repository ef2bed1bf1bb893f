"""Run the certification residuals over seeded random instances and print a table.

    python3 scripts/random_sweep.py --per-kind 40 --max-multiplicity 2
"""
import argparse
from dataclasses import replace

from dbrinterp.instances import InstanceConfig
from dbrinterp.sweep import SweepConfig, run_sweep

COLUMNS = ["theta_identity", "boundary_j", "det", "round_trip", "interpolation", "orthogonality",
           "isometry", "isometry_unrestricted", "additivity", "h2_excess"]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--per-kind", type=int, default=40)
    ap.add_argument("--kinds", nargs="+", default=["blaschke", "scaled"])
    ap.add_argument("--max-multiplicity", type=int, default=2)
    ap.add_argument("--max-kappa", type=float, default=SweepConfig.isometry_max_kappa,
                    help="cancellation cap for the filtered isometry combos")
    ap.add_argument("--quiet", action="store_true", help="only print the maxima")
    args = ap.parse_args()

    cfg = SweepConfig(per_kind=args.per_kind, kinds=tuple(args.kinds),
                      instance=replace(InstanceConfig(), max_multiplicity=args.max_multiplicity),
                      isometry_max_kappa=args.max_kappa)
    rows = run_sweep(cfg)
    head = f"{'kind':9}{'seed':>5}{'dim':>4}{'cond_P':>10}" + "".join(f"{c[:11]:>12}" for c in COLUMNS)
    if not args.quiet:
        print(head)
        for r in rows:
            print(f"{r['kind']:9}{r['seed']:>5}{r['dim']:>4}{r['cond_P']:>10.1e}"
                  + "".join(f"{r[c]:>12.2e}" for c in COLUMNS))
    print(f"\nmaxima over {len(rows)} instances")
    for c in COLUMNS + ["isometry_per_kappa"]:
        print(f"  {c:24}{max(r[c] for r in rows):.3e}")
    print(f"  {'sigma_sup - 1':24}{max(r['sigma_sup'] for r in rows) - 1:.3e}")


if __name__ == "__main__":
    main()
