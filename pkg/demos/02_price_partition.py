"""Decomposing a day-ahead price series by sign: negative periods,
negative runs, and the longest run, which drive everything downstream.

Run: python3 demos/02_price_partition.py
"""

import numpy as np

from storesched import PriceSeries, partition

# a spring day: cheap night, negative midday (solar surplus), evening peak
values = np.array(
    [42, 38, 35, 31, 30, 33, 45, 50, 28, 5,
     -2, -14, -9, -1, 8, 20, 34, 48, 62, 71,
     66, 55, 47, 40],
    dtype=float,
)
prices = PriceSeries(values, dt=1.0)
part = partition(prices)

print("hours with strictly negative prices:", part.t_neg)
print("hours with a zero price:            ", part.t_zero)
print("run-length blocks (nonneg, neg):    ", part.blocks)
print("longest negative run:               ", part.longest_neg, f"(n_bar={part.n_bar})")
print("number of negative runs:            ", part.num_negative_blocks)

# ties keep the earliest run
tie = partition(PriceSeries([-1, -1, 5, -3, -3], 1.0))
print("\ntwo equally long runs -> earliest wins:", tie.longest_neg)
