"""Improving moves, best responses and equilibrium certification.

Three stability notions are checked, from weakest to strongest: AE (no
improving single edge purchase), GE (no improving single add, delete or swap)
and NE (no improving strategy change at all).  NE certification enumerates all
``2**(n-1)`` strategies of each agent and is therefore gated by a size cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from gncg._kernel import INF, Kernel
from gncg.errors import CapExceededError
from gncg.game import AgentView, StrategyProfile, all_single_owner_profiles
from gncg.hostgraph import HostGraph, Weight

DEFAULT_BR_CAP = 20
_LOW_BITS = 12
_KIND_ORDER = {"add": 0, "delete": 1, "swap": 2, "strategy": 3}


@dataclass(frozen=True)
class Move:
    """A strategy change of one agent.

    ``kind`` is ``add``/``delete`` (``target`` set), ``swap`` (``target``
    removed, ``new_target`` added) or ``strategy`` (arbitrary change).
    ``strategy`` is always the resulting strategy.
    """

    agent: int
    kind: str
    strategy: frozenset[int]
    cost_before: Weight
    cost_after: Weight
    target: int | None = None
    new_target: int | None = None

    @property
    def delta(self) -> Weight:
        if self.cost_before == INF:
            return INF
        return self.cost_before - self.cost_after

    def apply(self, profile: StrategyProfile) -> StrategyProfile:
        return profile.with_strategy(self.agent, self.strategy)

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "kind": self.kind,
            "target": self.target,
            "new_target": self.new_target,
            "strategy": sorted(self.strategy),
            "cost_before": self.cost_before,
            "cost_after": self.cost_after,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class Verdict:
    stable: bool
    witness: Move | None = None


@dataclass(frozen=True)
class EquilibriumReport:
    level: str
    ae: Verdict
    ge: Verdict | None
    ne: Verdict | None
    beta_ge: Weight | None
    beta_ne: Weight | None
    ne_certified_exactly: bool
    eps: float

    @property
    def stable(self) -> bool:
        top = {"AE": self.ae, "GE": self.ge, "NE": self.ne}[self.level]
        return top.stable


# -- single moves -------------------------------------------------------------


def _candidate_moves(view: AgentView):
    """Yield ``(kind, target, new_target, strategy)`` for every single move."""
    cur = view.current
    outside = [x for x in view.others if x not in cur]
    for x in outside:
        yield "add", x, None, cur | {x}
    for v in sorted(cur):
        yield "delete", v, None, cur - {v}
    for v in sorted(cur):
        rest = cur - {v}
        for x in outside:
            yield "swap", v, x, rest | {x}


def _move_key(kernel: Kernel, m: Move, scaled_delta):
    second = m.new_target if m.new_target is not None else -1
    return (-scaled_delta, _KIND_ORDER[m.kind], m.target, second)


def _improving_moves(kernel: Kernel, view: AgentView, kinds=("add", "delete", "swap")) -> list[Move]:
    before = view.current_cost()
    found = []
    for kind, target, new_target, strategy in _candidate_moves(view):
        if kind not in kinds:
            continue
        after = view.cost(strategy)
        if kernel.improves(before, after):
            m = Move(view.u, kind, frozenset(strategy), kernel.value(before), kernel.value(after), target, new_target)
            found.append((_move_key(kernel, m, INF if before == INF else before - after), m))
    found.sort(key=lambda t: t[0])
    return [m for _, m in found]


def improving_single_moves(host: HostGraph, profile: StrategyProfile, u: int, alpha) -> list[Move]:
    """All strictly improving adds, deletes and swaps of agent ``u``, best first."""
    profile.validate(host.n)
    k = Kernel(host, alpha)
    return _improving_moves(k, AgentView(k, profile, u))


def greedy_stable_response(host: HostGraph, profile: StrategyProfile, u: int, alpha) -> frozenset[int]:
    """Apply the best single improving move of ``u`` until none is left."""
    profile.validate(host.n)
    k = Kernel(host, alpha)
    view = AgentView(k, profile, u)
    while True:
        moves = _improving_moves(k, view)
        if not moves:
            return view.current
        view.current = moves[0].strategy


# -- exact best response ------------------------------------------------------


def _best_response(kernel: Kernel, view: AgentView):
    """Minimum scaled cost over all strategies and the tie-broken argmin."""
    m = len(view.others)
    low = min(m, _LOW_BITS)
    table = view.base[None, :].copy()
    prices = np.zeros(1, dtype=kernel.dtype)
    for i in range(low):
        table = np.concatenate([table, np.minimum(table, view.M[i][None, :])])
        prices = np.concatenate([prices, prices + view.prices[i]])
    best = INF
    near: list[tuple[object, int]] = []
    for high in range(1 << (m - low)):
        rows = [low + j for j in range(m - low) if high >> j & 1]
        if rows:
            reach = np.minimum(table, np.minimum(view.base, view.M[rows].min(axis=0))[None, :])
            offset = view.prices[rows].sum()
        else:
            reach, offset = table, 0
        costs = reach.sum(axis=1) + prices + offset
        cmin = costs.min()
        if cmin == INF:
            continue
        if best == INF or cmin < best:
            best = cmin
        for i in np.nonzero(costs <= best + kernel.tol)[0]:
            near.append((costs[i], high << low | int(i)))
    if best == INF:
        return INF, frozenset()
    near = [(c, x) for c, x in near if c <= best + kernel.tol]

    def key(item):
        mask = item[1]
        targets = tuple(view.others[i] for i in range(m) if mask >> i & 1)
        return (len(targets), targets)

    _, mask = min(near, key=key)
    strategy = frozenset(view.others[i] for i in range(m) if mask >> i & 1)
    return best, strategy


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceededError("exact best response", n, cap)


def best_response_exact(host: HostGraph, profile: StrategyProfile, u: int, alpha, cap: int = DEFAULT_BR_CAP):
    """Cost-minimal strategy of ``u`` over all subsets of ``V - {u}``.

    Ties go to fewer edges, then to the lexicographically smallest target set.
    Returns ``(strategy, cost)``.
    """
    _check_cap(host.n, cap)
    profile.validate(host.n)
    k = Kernel(host, alpha)
    best, strategy = _best_response(k, AgentView(k, profile, u))
    return strategy, k.value(best)


# -- certification ------------------------------------------------------------


def _ratio(kernel: Kernel, before, after):
    if not kernel.improves(before, after):
        return Fraction(1) if kernel.exact else 1.0
    if before == INF:
        return INF
    b, a = kernel.value(before), kernel.value(after)
    if a == 0:
        return INF
    return b / a


def certify(host: HostGraph, profile: StrategyProfile, alpha, level: str = "NE", cap: int = DEFAULT_BR_CAP) -> EquilibriumReport:
    """Check AE, GE and (for ``level="NE"``) NE stability, with witnesses and beta factors."""
    level = level.upper()
    if level not in ("AE", "GE", "NE"):
        raise ValueError(f"unknown level {level!r}")
    if level == "NE":
        _check_cap(host.n, cap)
    profile.validate(host.n)
    k = Kernel(host, alpha)
    views = [AgentView(k, profile, u) for u in range(host.n)]
    ae = ge = ne = None
    beta_ge = beta_ne = None
    ae_moves = [_improving_moves(k, v, kinds=("add",)) for v in views]
    ae_witness = next((ms[0] for ms in ae_moves if ms), None)
    ae = Verdict(ae_witness is None, ae_witness)
    if level in ("GE", "NE"):
        ge_witness = None
        beta_ge = Fraction(1) if k.exact else 1.0
        for v in views:
            moves = _improving_moves(k, v)
            if moves:
                ge_witness = ge_witness or moves[0]
                cur = v.current_cost()
                best = v.cost(moves[0].strategy)
                beta_ge = max(beta_ge, _ratio(k, cur, best))
        ge = Verdict(ge_witness is None, ge_witness)
    if level == "NE":
        ne_witness = None
        beta_ne = Fraction(1) if k.exact else 1.0
        for v in views:
            cur = v.current_cost()
            best, strategy = _best_response(k, v)
            if k.improves(cur, best):
                if ne_witness is None:
                    ne_witness = Move(v.u, "strategy", strategy, k.value(cur), k.value(best))
                beta_ne = max(beta_ne, _ratio(k, cur, best))
        ne = Verdict(ne_witness is None, ne_witness)
    return EquilibriumReport(level, ae, ge, ne, beta_ge, beta_ne, level == "NE", 0.0 if k.exact else host.eps)


def approx_factors(host: HostGraph, profile: StrategyProfile, alpha, cap: int = DEFAULT_BR_CAP):
    """``(beta_ge, beta_ne)``: worst ratio of current cost to best single-move / best-response cost."""
    report = certify(host, profile, alpha, "NE", cap)
    return report.beta_ge, report.beta_ne


def is_nash(host: HostGraph, profile: StrategyProfile, alpha, kernel: Kernel | None = None) -> bool:
    """Fast NE test with early exit; no cap check."""
    k = kernel or Kernel(host, alpha)
    for u in range(host.n):
        v = AgentView(k, profile, u)
        best, _ = _best_response(k, v)
        if k.improves(v.current_cost(), best):
            return False
    return True


def nash_equilibria(host: HostGraph, alpha, profiles: Iterable[StrategyProfile] | None = None) -> list[StrategyProfile]:
    """Every NE among ``profiles`` (default: all single-owner profiles)."""
    k = Kernel(host, alpha)
    if profiles is None:
        profiles = all_single_owner_profiles(host.n)
    return [s for s in profiles if is_nash(host, s, alpha, k)]
