"""The a-priori advisor: decide from the storage characteristics and the
price sign pattern alone whether the cheap LP relaxation is safe, or
whether the refined MILP (binaries only at negative prices) is needed.

Run: python3 demos/03_relaxation_advisor.py
"""

import json

import numpy as np

from storesched import PriceSeries, StorageParams, advise, partition

values = np.array(
    [42, 38, 35, 31, 30, 33, 45, 50, 28, 5,
     -2, -14, -9, -1, 8, 20, 34, 48, 62, 71,
     66, 55, 47, 40],
    dtype=float,
)
part = partition(PriceSeries(values, dt=1.0))


def storage(p_chg, p_dis, eta=0.9, rho=1.0):
    return StorageParams(
        s_min=0.0, s_max=1.0, s_init=0.0,
        p_chg_max=p_chg, p_dis_max=p_dis,
        eta_c=eta, eta_d=eta, rho=rho, dt=1.0,
    )


cases = {
    "slow battery (0.1 MW)": storage(0.1, 0.1),
    "fast battery (2 MW)": storage(2.0, 2.0),
    "lossless battery (2 MW)": storage(2.0, 2.0, eta=1.0),
}

for label, params in cases.items():
    advice = advise(params, part)
    print(f"\n=== {label} ===")
    print("recommendation:", advice.recommendation.value)
    for rule, fired, detail in advice.rationale:
        marker = "*" if fired else " "
        print(f"  [{marker}] {rule:18s} {detail}")

# a pending end-of-horizon level constraint always routes to the MILP
constrained = advise(storage(0.1, 0.1), part, final_level_constrained=True)
print("\nwith a terminal level constraint:", constrained.recommendation.value)

print("\nmachine-readable form:")
print(json.dumps(advise(storage(2.0, 2.0), part).to_dict(), indent=2))
