"""Time LABS optimisation for growing n under each variant (single run each)."""
import argparse

from boxview.models import LabsSpec, solve_model
from boxview.propagators import ModelVariant


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-min", type=int, default=6)
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--time-limit", type=float, default=60.0)
    args = ap.parse_args()
    print("n  variant                 status    obj   time_ms  propagations     fails")
    for n in range(args.n_min, args.n_max + 1):
        model = LabsSpec(n).build()
        for v in ModelVariant:
            r = solve_model(model, v, time_limit=args.time_limit)
            s = r.stats
            print(f"{n:<2} {v.value:<22} {r.status:<8} {str(r.objective):>4} {s.time_ms:>9.1f} "
                  f"{s.propagations:>13} {s.fails:>9}")


if __name__ == "__main__":
    main()
