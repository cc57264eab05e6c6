"""Allow running package as module: python -m egnas"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
