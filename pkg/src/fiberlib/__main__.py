import sys

from fiberlib.cli import main

sys.exit(main())
