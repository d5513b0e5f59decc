#!/usr/bin/env python3
# Copyright 2026 The lingmt Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Expected selected fraction of the masking budget rule.

With single-piece words the budget is always met exactly, so the mean
selected fraction over sentences of m maskable pieces, m uniform on
[lo, hi], is the mean of round_half_up(rate * m) / m.
"""

import argparse
from fractions import Fraction


def budget(rate, m):
  b = int(Fraction(rate) * m + Fraction(1, 2))
  return max(1, b) if m > 0 else 0


def main():
  ap = argparse.ArgumentParser()
  ap.add_argument("--rate", default="0.15")
  ap.add_argument("--lo", type=int, default=10)
  ap.add_argument("--hi", type=int, default=40)
  args = ap.parse_args()
  rate = Fraction(args.rate)
  lengths = range(args.lo, args.hi + 1)
  expected = sum(Fraction(budget(rate, m), m) for m in lengths) / len(lengths)
  print(f"expected selected fraction {float(expected):.6f}")


if __name__ == "__main__":
  main()
