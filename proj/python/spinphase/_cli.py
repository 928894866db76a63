# Copyright 2026 The spinphase Authors
# SPDX-License-Identifier: Apache-2.0

import sys

from spinphase._core import main


def run() -> None:
    sys.exit(main(sys.argv[1:]))
