import argparse
import json

from hmix.core.logging import setup_logging
from hmix.services import SuiteService


def main():
    parser = argparse.ArgumentParser(description="Grid refinement study on the quartic manufactured problem")
    parser.add_argument("--grid", type=int, action="append", help="points per axis, repeatable")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    setup_logging()
    service = SuiteService(seed=args.seed, grids=args.grid or (9, 13, 17, 21))
    report = service.run("convergence")

    obs = report.observations
    print(f"{'points':>8} {'h':>12} {'error':>12} {'order':>8}")
    for i, points in enumerate(obs["grids"]):
        order = f"{obs['orders'][i - 1]:8.3f}" if i else " " * 8
        print(f"{points:8d} {obs['h'][i]:12.4e} {obs['errors'][i]:12.4e} {order}")
    print("✅ refinement study passed" if report.ok else "❌ refinement study outside tolerance")
    print(json.dumps(report.model_dump(mode="json")["observations"], indent=2))


if __name__ == "__main__":
    main()

# run from the repo root
# $ python scripts/convergence_study.py --grid 9 --grid 13 --grid 17
