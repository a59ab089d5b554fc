"""Polynomial and K=2 pulse fidelity landscapes at T=1 on the default axes."""
import os
import sys
import time

from chaincut.cli import main

if __name__ == "__main__":
    workers = os.environ.get("CHAIN_WORKERS", str(min(8, os.cpu_count() or 1)))
    for ansatz, name in (("pulse", "landscape_pulse_T1.csv"), ("poly", "landscape_poly_T1.csv")):
        start = time.perf_counter()
        code = main(["landscape", "--ansatz", ansatz, "--T", "1", "--workers", workers, "-o", name])
        print(f"{name}: {time.perf_counter() - start:.1f}s", file=sys.stderr)
        if code:
            sys.exit(code)
