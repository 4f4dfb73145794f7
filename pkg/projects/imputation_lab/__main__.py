"""Allow `python -m imputation_lab`."""

import sys

from imputation_lab.main import main

sys.exit(main())
