"""Two lowest levels of H(g) on g in [0, 1] for N=5, B=0.5 (non-crossing check)."""
import sys

from chaincut.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "gap_scan.csv"
    sys.exit(main(["spectrum", "--points", "201", "-o", out]))
