"""Entry point for `python -m humbert_series`."""
import sys

from humbert_series.cli import main

if __name__ == "__main__":
    sys.exit(main())
