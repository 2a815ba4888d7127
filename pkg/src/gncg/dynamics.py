"""Sequential improving-move dynamics, cycle detection and cycle certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from gncg._kernel import Kernel
from gncg.equilibria import DEFAULT_BR_CAP, Move, _best_response, _improving_moves
from gncg.errors import CapExceededError
from gncg.game import AgentView, StrategyProfile
from gncg.hostgraph import HostGraph

RULES = ("exact-BR", "greedy-single", "random-improving")
SCHEDULERS = ("round-robin", "random")


@dataclass(frozen=True)
class Step:
    agent: int
    move: Move
    profile_key: tuple


@dataclass(frozen=True)
class CycleStep:
    profile: StrategyProfile
    mover: int
    strategy: frozenset[int]


@dataclass(frozen=True)
class CycleCertificate:
    """Steps whose last resulting profile is the first step's profile."""

    steps: tuple[CycleStep, ...]
    alpha: object
    rule: str

    def __len__(self) -> int:
        return len(self.steps)

    def movers(self) -> set[int]:
        return {s.mover for s in self.steps}

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "rule": self.rule,
            "steps": [{"profile": s.profile.to_lists(), "mover": s.mover, "strategy": sorted(s.strategy)} for s in self.steps],
        }


@dataclass
class DynamicsTrace:
    initial: StrategyProfile
    rule: str
    scheduler: str
    max_steps: int
    seed: int | None
    steps: list[Step] = field(default_factory=list)
    outcome: str = "budget_exhausted"
    final: StrategyProfile | None = None
    cycle: CycleCertificate | None = None

    def to_dict(self) -> dict:
        return {
            "initial": self.initial.to_lists(),
            "rule": self.rule,
            "scheduler": self.scheduler,
            "max_steps": self.max_steps,
            "seed": self.seed,
            "outcome": self.outcome,
            "final": self.final.to_lists() if self.final is not None else None,
            "steps": [{"agent": s.agent, "move": s.move.to_dict(), "profile": [list(t) for t in s.profile_key]} for s in self.steps],
            "cycle": self.cycle.to_dict() if self.cycle is not None else None,
        }


def _next_move(kernel: Kernel, profile: StrategyProfile, u: int, rule: str, rng) -> Move | None:
    view = AgentView(kernel, profile, u)
    if rule == "exact-BR":
        cur = view.current_cost()
        best, strategy = _best_response(kernel, view)
        if not kernel.improves(cur, best):
            return None
        return Move(u, "strategy", strategy, kernel.value(cur), kernel.value(best))
    moves = _improving_moves(kernel, view)
    if not moves:
        return None
    if rule == "greedy-single":
        return moves[0]
    return moves[int(rng.integers(len(moves)))]


def run(
    host: HostGraph,
    alpha,
    init: StrategyProfile,
    rule: str = "exact-BR",
    scheduler: str = "round-robin",
    max_steps: int = 1000,
    seed: int | None = None,
    cap: int = DEFAULT_BR_CAP,
) -> DynamicsTrace:
    """Let agents move one at a time until a pass without moves, a repeated profile, or the budget.

    Each pass visits every agent once, in index order (``round-robin``) or in a
    fresh random permutation (``random``).
    """
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}")
    if scheduler not in SCHEDULERS:
        raise ValueError(f"unknown scheduler {scheduler!r}")
    if rule == "exact-BR" and host.n > cap:
        raise CapExceededError("exact best response", host.n, cap)
    init.validate(host.n)
    kernel = Kernel(host, alpha)
    rng = np.random.default_rng(seed)
    trace = DynamicsTrace(init, rule, scheduler, max_steps, seed)
    profile = init
    history = [init]
    movers: list[tuple[int, frozenset[int]]] = []
    seen = {init.key(): 0}
    while True:
        order = range(host.n) if scheduler == "round-robin" else [int(x) for x in rng.permutation(host.n)]
        moved = False
        for u in order:
            if len(trace.steps) >= max_steps:
                trace.final = profile
                return trace
            move = _next_move(kernel, profile, u, rule, rng)
            if move is None:
                continue
            moved = True
            profile = move.apply(profile)
            key = profile.key()
            trace.steps.append(Step(u, move, key))
            movers.append((u, move.strategy))
            history.append(profile)
            if key in seen:
                start = seen[key]
                cert_steps = tuple(CycleStep(history[i], *movers[i]) for i in range(start, len(movers)))
                trace.cycle = CycleCertificate(cert_steps, alpha, rule)
                trace.outcome = "cycle"
                trace.final = profile
                return trace
            seen[key] = len(history) - 1
        if not moved:
            trace.outcome = "converged"
            trace.final = profile
            return trace


@dataclass(frozen=True)
class CycleVerdict:
    accepted: bool
    failed_step: int | None = None
    reason: str = ""


def _is_single_move(before: frozenset[int], after: frozenset[int]) -> bool:
    added, removed = after - before, before - after
    return (len(added), len(removed)) in ((1, 0), (0, 1), (1, 1))


def verify_cycle(host: HostGraph, alpha, cert: CycleCertificate, rule: str | None = None) -> CycleVerdict:
    """Replay a certificate and check that every step strictly improves its mover and the sequence closes.

    ``exact-BR`` steps must also reach the mover's minimum cost; single-move
    rules must change exactly one edge (add, delete or swap).
    """
    rule = rule or cert.rule
    steps = cert.steps
    if len(steps) < 2:
        return CycleVerdict(False, None, "a cycle needs at least two steps")
    kernel = Kernel(host, alpha)
    for i, step in enumerate(steps):
        try:
            step.profile.validate(host.n)
        except Exception as exc:  # noqa: BLE001 - report any malformed snapshot
            return CycleVerdict(False, i, f"invalid profile: {exc}")
        nxt = steps[(i + 1) % len(steps)].profile
        result = step.profile.with_strategy(step.mover, step.strategy)
        if result.key() != nxt.key():
            return CycleVerdict(False, i, "resulting profile does not match the next snapshot")
        view = AgentView(kernel, step.profile, step.mover)
        before, after = view.current_cost(), view.cost(step.strategy)
        if not kernel.improves(before, after):
            return CycleVerdict(False, i, "step is not a strict improvement")
        if rule == "exact-BR":
            best, _ = _best_response(kernel, view)
            if not kernel.same(after, best):
                return CycleVerdict(False, i, "step is not a best response")
        elif rule in ("greedy-single", "random-improving"):
            if not _is_single_move(step.profile[step.mover], frozenset(step.strategy)):
                return CycleVerdict(False, i, "step is not a single add, delete or swap")
    return CycleVerdict(True)


def random_profile(n: int, rng: np.random.Generator, density: float = 0.3) -> StrategyProfile:
    """Random spanning tree plus extra random edges, each with a random single owner."""
    owned = []
    order = [int(x) for x in rng.permutation(n)]
    present = set()
    for i in range(1, n):
        u, v = order[int(rng.integers(0, i))], order[i]
        present.add((min(u, v), max(u, v)))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                present.add((u, v))
    for u, v in sorted(present):
        owned.append((u, v) if rng.random() < 0.5 else (v, u))
    return StrategyProfile.from_owned(n, owned)


def _canonical(cert: CycleCertificate) -> tuple:
    keys = [s.profile.key() for s in cert.steps]
    i = keys.index(min(keys))
    return (str(cert.alpha), tuple(keys[i:] + keys[:i]))


def cycle_search(
    host: HostGraph,
    alpha_grid: Sequence,
    max_len: int = 8,
    restarts: int = 10,
    seed: int = 0,
    rules: Sequence[str] = ("exact-BR",),
    max_steps: int = 200,
) -> list[CycleCertificate]:
    """Randomized search for verified improving-move cycles of length at most ``max_len``."""
    if max_len < 2:
        return []
    rng = np.random.default_rng(seed)
    found: dict[tuple, CycleCertificate] = {}
    for alpha in alpha_grid:
        for _ in range(restarts):
            for rule in rules:
                init = random_profile(host.n, rng)
                trace = run(host, alpha, init, rule=rule, scheduler="random", max_steps=max_steps, seed=int(rng.integers(2**31)))
                cert = trace.cycle
                if cert is None or len(cert) > max_len:
                    continue
                if verify_cycle(host, alpha, cert).accepted:
                    found.setdefault(_canonical(cert), cert)
    return list(found.values())


def frange(start, stop, step) -> list[Fraction]:
    """Exact grid ``start, start+step, ...`` up to and including ``stop``."""
    start, stop, step = Fraction(start), Fraction(stop), Fraction(step)
    out = []
    x = start
    while x <= stop:
        out.append(x)
        x += step
    return out
