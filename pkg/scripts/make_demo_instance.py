#!/usr/bin/env python3
"""Write example system files for trying out the CLI.

Produces demo.json (the worked 4-state example), plus a handful of
generated instances at the requested size.  Try:

    python scripts/make_demo_instance.py --out instances/
    ioselect check instances/demo.json
    ioselect select instances/demo.json --exact --trace
"""

import argparse
import json
from pathlib import Path

from ioselect.oracle_bench import GeneratorConfig, generate
from ioselect.system_model import (
    COMPLETE,
    SparsityPattern,
    StructuredSystem,
    system_to_json,
)

# 4 states, 3 inputs, 2 outputs; selecting u3 and y1 is optimal (cost 2),
# the three-stage pipeline returns {u1, u3} x {y1} (cost 3).
DEMO = StructuredSystem(
    A=SparsityPattern(4, 4, frozenset({(0, 0), (0, 1), (1, 1), (2, 0), (2, 1), (2, 3), (3, 3)})),
    B=SparsityPattern(4, 3, frozenset({(0, 0), (0, 2), (1, 1), (1, 2), (2, 0), (2, 1), (3, 2)})),
    C=SparsityPattern(2, 4, frozenset({(0, 2), (1, 0)})),
    K=COMPLETE,
    cost_u=(1_000_000, 1_000_000, 1_000_000),
    cost_y=(1_000_000, 1_000_000),
    mode="continuous",
)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="instances", help="output directory")
    parser.add_argument("--count", type=int, default=4, help="generated instances")
    parser.add_argument("--n", type=int, default=6)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    path = out / "demo.json"
    path.write_text(json.dumps(system_to_json(DEMO), indent=2) + "\n")
    print(f"wrote {path}")

    for k in range(args.count):
        cfg = GeneratorConfig(
            n=args.n, m=max(1, args.n // 2), p=max(1, args.n // 2),
            state_density=0.3, input_density=0.5, output_density=0.5,
            cost_range=("1", "9"), seed=args.seed + k,
        )
        system = generate(cfg)
        path = out / f"gen_{args.n}_{args.seed + k}.json"
        path.write_text(json.dumps(system_to_json(system), indent=2) + "\n")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
