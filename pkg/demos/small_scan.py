"""Scan two-variable simplex phases with exponents up to 3 and summarize."""

import json

from newtonosc import conjecture

rep = conjecture.scan(2, 3)
summary = rep.to_json()
summary.pop("violations")
summary.pop("min_abs_sum_stable_witness")
print(json.dumps(summary, indent=2, sort_keys=True))
print("violations:", len(rep.violations))
