"""Print auxiliary variable and propagator counts for each model under each variant."""
import argparse

from boxview.models import EccSpec, GolfersSpec, GolombSpec, LabsSpec, LinearSpec, NonlinearSpec
from boxview.propagators import ModelVariant

SPECS = [LinearSpec(10, 5, 3, 4), NonlinearSpec(8, 4, 2, 3, 2, seed=3), GolombSpec(8, 34),
         LabsSpec(12), GolfersSpec(3, 3, 3), EccSpec(2, 4, 6, 3)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--balanced", action="store_true", help="balanced binary sums")
    args = ap.parse_args()
    variants = list(ModelVariant)
    print(f"{'instance':<24}" + "".join(f"{v.value:>24}" for v in variants))
    for spec in SPECS:
        model = spec.build()
        cells = []
        for v in variants:
            posted = model.post(v, balanced=args.balanced)
            dec = posted.decomposition
            cells.append(f"{len(dec.aux):>6} aux {len(dec.propagators):>6} props")
        print(f"{model.problem + ' ' + model.instance:<24}" + "".join(f"{c:>24}" for c in cells))


if __name__ == "__main__":
    main()
