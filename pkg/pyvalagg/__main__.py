# SPDX-License-Identifier: LGPL-3.0-or-later
# Copyright (C) 2026 pyvalagg contributors

"""Entry point for running pyvalagg as a module (python -m pyvalagg)."""

import sys

from pyvalagg.cli import main

if __name__ == "__main__":
    sys.exit(main())
