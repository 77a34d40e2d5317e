#!/usr/bin/env python3
"""Survey every built-in code: parameters, distance, and erasure structure.

For each code and each subset size, counts correctable subsets by class and
reports the entanglement-assisted descriptions of the best (largest-C)
subset found.  This is the quickest way to see which erasure patterns a
code tolerates and what sharing them costs.

Usage:
    python3 scripts/survey_fixtures.py
    python3 scripts/survey_fixtures.py --fixtures five_qubit steane --max-size 2
"""

import argparse
import itertools
import time

from eaqec import analysis, codes, structure


def survey(name: str, max_size: int) -> None:
    code = codes.fixture(name)
    t0 = time.perf_counter()
    d = codes.min_distance(code)
    dt = time.perf_counter() - t0
    print(f"\n=== {name}: n={code.n}, K={code.k_dim}, distance {d} "
          f"(found in {dt:.2f}s) ===")
    for size in range(1, max_size + 1):
        if size > code.n:
            break
        tallies = {analysis.PURE: 0, analysis.IMPURE_NONDEGENERATE: 0,
                   analysis.DEGENERATE: 0}
        total = 0
        best = None
        for subset in itertools.combinations(range(1, code.n + 1), size):
            report = analysis.analyze_subset(code, subset)
            total += 1
            if not report.correctable:
                continue
            tallies[report.trichotomy] += 1
            if best is None or report.marginal_rank > best[1].marginal_rank:
                best = (subset, report)
        correctable = sum(tallies.values())
        parts = ", ".join(f"{cls}: {cnt}" for cls, cnt in tallies.items() if cnt)
        print(f"  size {size}: {correctable}/{total} correctable"
              + (f" ({parts})" if parts else ""))
        if best is not None:
            subset, report = best
            dec = structure.decompose(code, subset)
            unc = structure.ea_from_structure(dec, d)
            cmp_ = structure.compress(dec, d)
            tag = "" if cmp_.receiver_dim == unc.receiver_dim else \
                f" -> compressed {cmp_.params.dimension_form()}"
            print(f"    e.g. B={set(subset)}: {report.trichotomy}, "
                  f"C={report.marginal_rank}, "
                  f"{unc.params.dimension_form()} at {unc.ebit_cost} ebits{tag}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--fixtures", nargs="*", default=list(codes.FIXTURE_NAMES),
                        choices=codes.FIXTURE_NAMES, metavar="NAME")
    parser.add_argument("--max-size", type=int, default=3,
                        help="largest erased-subset size to scan (default 3)")
    args = parser.parse_args()
    for name in args.fixtures:
        survey(name, args.max_size)


if __name__ == "__main__":
    main()
