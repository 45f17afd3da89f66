#!/usr/bin/python

#
# offdiag
# Spectral classification and Riccati checks for rank-one off-diagonal
# perturbations of multiplication operators.
#

import sys

from core.cli import main

if __name__ == '__main__':
    sys.exit(main())
