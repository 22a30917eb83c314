"""Run every oracle verification suite and exit non-zero on any failure."""
import sys

from boxview.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", *sys.argv[1:]]))
