import sys

from lsro.cli import main

sys.exit(main())
