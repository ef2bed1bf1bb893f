"""Rewrite problems/golden/<name>.report.json from the current solver.

Run only after a deliberate numerical change; the acceptance suite compares
fresh reports against these files field by field.
"""
import argparse
import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
EXAMPLES = ["minimal", "blaschke_tangential", "scaled_parametrized"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=EXAMPLES)
    args = ap.parse_args()
    for name in args.names:
        out = ROOT / "problems" / "golden" / f"{name}.report.json"
        cmd = [sys.executable, "-m", "dbrinterp", "solve", str(ROOT / "problems" / f"{name}.json"),
               "--report", str(out)]
        code = subprocess.run(cmd).returncode
        print(f"{name}: exit {code} -> {out.relative_to(ROOT)}")
        if code:
            sys.exit(code)


if __name__ == "__main__":
    main()
