"""Allow ``python -m sphereplate``."""

import sys

from .cli import main

sys.exit(main())
