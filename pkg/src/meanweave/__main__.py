"""Allow ``python -m meanweave`` as an alias for the console script."""

import sys

from meanweave.cli import main

sys.exit(main())
