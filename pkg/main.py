"""Application entry point for the annihilator command-line tool.

Usage::

    python main.py annihilate --expr "x1/(1+x1^2)" --output json
    python main.py reconstruct --expr "x1*y1/(1+x1^2)" --x-vars 1 --y-vars 1
"""

import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
