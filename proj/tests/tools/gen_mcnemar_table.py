#!/usr/bin/env python3
# Copyright 2026 The geoprobe Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# SPDX-License-Identifier: Apache-2.0
"""Generates the exact McNemar p-value table used by the test suite.

Computed with exact rational arithmetic (fractions.Fraction) and converted
to float only at the end, so the frozen table is an independent reference
for the C++ implementation:

    p = min(1, 2 * sum_{k=0..min(b,c)} C(b+c, k) / 2^(b+c)),  p(0,0) = 1

Usage: gen_mcnemar_table.py [max_n] > mcnemar_table.json
"""

import json
import math
import sys
from fractions import Fraction


def mcnemar_exact(b: int, c: int) -> float:
    n = b + c
    if n == 0:
        return 1.0
    total = sum(Fraction(math.comb(n, k)) for k in range(min(b, c) + 1))
    p = 2 * total / Fraction(2) ** n
    return float(min(p, Fraction(1)))


def main() -> None:
    max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    rows = []
    for n in range(max_n + 1):
        for b in range(n + 1):
            c = n - b
            rows.append({"b": b, "c": c, "p": mcnemar_exact(b, c)})
    json.dump(rows, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
