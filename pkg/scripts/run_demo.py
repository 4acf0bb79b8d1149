"""Synthetic two-class pipeline with PS, PI and PL features; prints a short table.

Usage: python scripts/run_demo.py [--seed 0] [--n-per-class 50] [--noise 0.05] [--json report.json]
"""
import argparse
import json

from persphere.demo import run_demo


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-per-class", type=int, default=50)
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--json", default=None)
    args = ap.parse_args()
    rep = run_demo(args.seed, args.n_per_class, args.noise)
    for name, m in rep["methods"].items():
        print(f"{name}: chosen {m['chosen']} train {m['train_score']:.3f} test {m['test_score']:.3f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rep, fh, indent=2)


if __name__ == "__main__":
    main()
