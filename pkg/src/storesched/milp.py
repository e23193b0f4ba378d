"""MILP formulations of the scheduling problem and an exact
branch-and-bound solver over the LP relaxation.

The full variant carries charge/discharge exclusivity binaries on every
period; the refined variant only on strictly-negative-price periods,
which is sufficient because SCD at a nonnegative price is either
suboptimal or removable at equal objective.  Since the binaries never
enter the objective, branching is done directly on the exclusivity
disjunction: a child either forbids charging or forbids discharging at
the chosen period (equivalent to fixing u_t^C or u_t^D to zero with the
exact big-M links p <= u * p_max).
"""

import copy
from dataclasses import dataclass, field

import numpy as np

from .lp import SolveReport, build_lp, solve_lp
from .prices import PricePartition, PriceSeries
from .simplex import LpProblem, LpStatus, SimplexFailure
from .storage import DEFAULT_TOL, StorageParams, detect_scd, repair_scd


@dataclass
class MilpProblem:
    base: LpProblem
    binary_periods: tuple  # 1-based periods carrying u_t^C, u_t^D
    big_m_chg: float  # exact big-M of the charge link
    big_m_dis: float
    params: StorageParams = None
    prices: PriceSeries = None

    @property
    def num_binaries(self) -> int:
        return 2 * len(self.binary_periods)


@dataclass
class BnbStats:
    nodes: int = 0
    incumbent_updates: int = 0
    gap: float = float("inf")


def build_milp(
    params: StorageParams,
    prices: PriceSeries,
    refined: bool,
    part: PricePartition,
) -> MilpProblem:
    T = len(prices)
    binary_periods = part.t_neg if refined else tuple(range(1, T + 1))
    return MilpProblem(
        base=build_lp(params, prices),
        binary_periods=binary_periods,
        big_m_chg=params.p_chg_max,
        big_m_dis=params.p_dis_max,
        params=params,
        prices=prices,
    )


def _node_lp(problem: MilpProblem, chg_off: frozenset, dis_off: frozenset) -> LpProblem:
    lp = copy.copy(problem.base)
    lp.upper = problem.base.upper.copy()
    T = problem.base.horizon
    for t in chg_off:
        lp.upper[t - 1] = 0.0
    for t in dis_off:
        lp.upper[T + t - 1] = 0.0
    return lp


def _branch_period(problem: MilpProblem, report: SolveReport, tol: float) -> int | None:
    """Binary period with SCD whose implied charge binary is most
    fractional; most negative price breaks ties."""
    events = {ev.t: ev for ev in detect_scd(report.schedule, tol)}
    best = None
    best_key = None
    for t in problem.binary_periods:
        ev = events.get(t)
        if ev is None:
            continue
        frac = ev.p_chg_t / problem.big_m_chg
        key = (-min(frac, 1 - frac), problem.prices.prices[t - 1], t)
        if best_key is None or key < best_key:
            best, best_key = t, key
    return best


def solve_milp(problem: MilpProblem, tol: float = DEFAULT_TOL):
    """Globally optimal solve; returns (SolveReport, BnbStats).  The final
    schedule is SCD-free everywhere: exclusivity is enforced by branching
    at binary periods, and any leftover SCD at a non-binary period must
    sit at a zero price, where the equal-objective repair applies."""
    stats = BnbStats()
    incumbent = None
    best_obj = -np.inf
    # DFS, children in a fixed order: deterministic optimum and schedule
    stack = [(frozenset(), frozenset())]
    root_bound = None
    while stack:
        chg_off, dis_off = stack.pop()
        report = solve_lp(_node_lp(problem, chg_off, dis_off), tol)
        stats.nodes += 1
        if report.status is not LpStatus.OPTIMAL:
            raise SimplexFailure(f"node LP {report.status.value} in branch and bound")
        if root_bound is None:
            root_bound = report.objective
        if report.objective <= best_obj + 1e-12 * max(1.0, abs(best_obj)):
            continue
        t = _branch_period(problem, report, tol)
        if t is None:
            # integral-equivalent: no SCD at any binary period; repair any
            # residual zero-price SCD and promote to incumbent
            schedule = repair_scd(problem.params, problem.prices, report.schedule, tol)
            report.schedule = schedule
            report.scd_events = detect_scd(schedule, tol)
            incumbent = report
            best_obj = report.objective
            stats.incumbent_updates += 1
            continue
        stack.append((chg_off, dis_off | {t}))
        stack.append((chg_off | {t}, dis_off))
    stats.gap = 0.0
    incumbent.duals = None  # LP duals of a node are not MILP duals
    return incumbent, stats


def solve_storage_milp(
    params: StorageParams,
    prices: PriceSeries,
    part: PricePartition,
    refined: bool = True,
    tol: float = DEFAULT_TOL,
):
    problem = build_milp(params, prices, refined, part)
    return solve_milp(problem, tol)
