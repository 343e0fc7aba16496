"""Export tabulated Lebedev rules from scipy into the point-set text format.

Each output line is "x y z w" with w the solid-angle weight (sum 4*pi).
Usage: python3 scripts/export_lebedev.py grids/
"""

import sys
from pathlib import Path

from scipy.integrate import lebedev_rule

ORDERS = list(range(3, 32, 2)) + [131]


def main(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for order in ORDERS:
        x, w = lebedev_rule(order)
        path = out_dir / f"lebedev_{order:03d}.txt"
        with path.open("w") as f:
            f.write(f"# Lebedev rule, degree {order}, {x.shape[1]} points\n")
            f.write("# x y z weight (solid angle, sum 4*pi)\n")
            for i in range(x.shape[1]):
                f.write(f"{float(x[0, i])!r} {float(x[1, i])!r} {float(x[2, i])!r} {float(w[i])!r}\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "grids"))
