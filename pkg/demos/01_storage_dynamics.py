"""Storage model basics: parameters, state-of-energy propagation,
durations, and feasibility checking.

Run: python3 demos/01_storage_dynamics.py
"""

import numpy as np

from storesched import (
    Schedule,
    StorageParams,
    duration_of_charge,
    duration_of_discharge,
    feasibility_check,
    propagate_soe,
)

params = StorageParams(
    s_min=0.0,       # MWh
    s_max=1.0,       # MWh
    s_init=0.2,      # MWh
    p_chg_max=0.4,   # MW
    p_dis_max=0.4,   # MW
    eta_c=0.9,
    eta_d=0.9,
    rho=0.995,       # 0.5 % of the stored energy leaks away each hour
    dt=1.0,          # hours
)

print("A small lossy battery:")
print(f"  round-trip efficiency      {params.eta:.2f}")
print(f"  duration of charge         {duration_of_charge(params):.2f} h")
print(f"  duration of discharge      {duration_of_discharge(params):.2f} h")

# charge hard for two hours, rest, then discharge two hours
p_chg = np.array([0.4, 0.4, 0.0, 0.0, 0.0, 0.0])
p_dis = np.array([0.0, 0.0, 0.0, 0.0, 0.3, 0.3])
soe = propagate_soe(params, p_chg, p_dis)

print("\nhour  charge  discharge  level")
for t in range(len(soe)):
    print(f"{t + 1:4d}  {p_chg[t]:6.2f}  {p_dis[t]:9.2f}  {soe[t]:5.3f}")

schedule = Schedule(p_chg=p_chg, p_dis=p_dis, soe=soe)
print("\nfeasible:", feasibility_check(params, schedule).feasible)

# now overdo it: a third full-rate charging hour bursts the tank
p_chg_bad = np.array([0.4, 0.4, 0.4, 0.0, 0.0, 0.0])
soe_bad = propagate_soe(params, p_chg_bad, p_dis)
bad = Schedule(p_chg=p_chg_bad, p_dis=p_dis, soe=soe_bad)
print("\novercharged variant:")
for t, tag, magnitude in feasibility_check(params, bad).violations:
    print(f"  violation at hour {t}: {tag} by {magnitude:.3f}")
