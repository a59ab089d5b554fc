"""Cut/stitch table for K=2 pulses, fixed M=300 and M scaled with T."""
import sys

from chaincut.cli import main

if __name__ == "__main__":
    codes = [main(["table1"]), main(["table1", "--scale-steps"])]
    sys.exit(max(codes))
