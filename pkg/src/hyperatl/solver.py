"""Parity game solving with min-even winning convention.

Player 0 wins a play iff the minimal priority occurring infinitely often is
even.  The recursive solver peels the minimal priority and its attractor;
the brute-force solver enumerates positional strategy pairs and serves as
an independent reference on small games.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass
class ParityGame:
    """Explicit two-player game; every vertex must have a successor."""

    succ: list[list[int]]
    owner: list[int]
    priority: list[int]
    initial: int = 0

    @property
    def n_vertices(self) -> int:
        return len(self.succ)

    @property
    def n_edges(self) -> int:
        return sum(len(row) for row in self.succ)

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for v, row in enumerate(self.succ):
            for t in row:
                preds[t].append(v)
        return preds

    def check(self) -> None:
        n = self.n_vertices
        if not (len(self.owner) == len(self.priority) == n):
            raise ValueError("inconsistent vertex arrays")
        if not 0 <= self.initial < n:
            raise ValueError("initial vertex out of range")
        for v, row in enumerate(self.succ):
            if not row:
                raise ValueError(f"vertex {v} has no successor")
            for t in row:
                if not 0 <= t < n:
                    raise ValueError(f"edge {v}->{t} out of range")


@dataclass(frozen=True)
class WinningRegions:
    w0: frozenset[int]
    w1: frozenset[int]

    def winner(self, v: int) -> int:
        return 0 if v in self.w0 else 1


PositionalStrategy = dict


def _attractor(
    game: ParityGame,
    preds: list[list[int]],
    player: int,
    target: Iterable[int],
    alive: list[bool],
    out_strategy: dict,
) -> set[int]:
    """Vertices from which ``player`` can force a visit to ``target``.

    Records, for attracted vertices owned by ``player``, the edge used to
    move toward the target (target vertices themselves get no edge here).
    """
    n = game.n_vertices
    in_attr = [False] * n
    todo = []
    for v in target:
        if alive[v] and not in_attr[v]:
            in_attr[v] = True
            todo.append(v)
    # countdown of escaping edges for the opponent's vertices
    count = [0] * n
    for v in range(n):
        if alive[v] and game.owner[v] != player:
            count[v] = sum(1 for t in game.succ[v] if alive[t])
    pos = 0
    while pos < len(todo):
        u = todo[pos]
        pos += 1
        for p in preds[u]:
            if not alive[p] or in_attr[p]:
                continue
            if game.owner[p] == player:
                in_attr[p] = True
                out_strategy[p] = u
                todo.append(p)
            else:
                count[p] -= 1
                if count[p] == 0:
                    in_attr[p] = True
                    todo.append(p)
    return set(todo)


def zielonka(game: ParityGame):
    """Solve the game; returns (regions, strategy for 0, strategy for 1).

    Each strategy is defined on all vertices its player both owns and wins,
    keeps the play inside the winning region, and is certified by
    :func:`verify_strategy` in the test suite.
    """
    game.check()
    preds = game.predecessors()
    alive = [True] * game.n_vertices

    def solve(n_alive: int):
        w: tuple[set[int], set[int]] = (set(), set())
        s: tuple[dict, dict] = ({}, {})
        if n_alive == 0:
            return w, s
        m = min(game.priority[v] for v in range(game.n_vertices) if alive[v])
        player = m % 2
        top = [v for v in range(game.n_vertices) if alive[v] and game.priority[v] == m]
        attr_strategy: dict = {}
        a = _attractor(game, preds, player, top, alive, attr_strategy)
        for v in a:
            alive[v] = False
        (w0, w1), (s0, s1) = solve(n_alive - len(a))
        w_op = (w0, w1)[1 - player]
        if not w_op:
            # the whole remaining game is won by `player`
            for v in a:
                alive[v] = True
            win = {v for v in range(game.n_vertices) if alive[v]}
            mine = (s0, s1)[player]
            mine.update(attr_strategy)
            for v in top:
                if game.owner[v] == player and v not in mine:
                    mine[v] = next(t for t in game.succ[v] if alive[t])
            w = (win, set()) if player == 0 else (set(), win)
            return w, (s0, s1)
        # the opponent wins part of the subgame: remove their attractor and repeat
        for v in a:
            alive[v] = True
        escape_strategy: dict = {}
        b = _attractor(game, preds, 1 - player, w_op, alive, escape_strategy)
        for v in b:
            alive[v] = False
        (w0b, w1b), (s0b, s1b) = solve(n_alive - len(b))
        for v in b:
            alive[v] = True
        opponent = 1 - player
        ws = [set(w0b), set(w1b)]
        ws[opponent] |= b
        strategies = [s0b, s1b]
        strategies[opponent].update(escape_strategy)
        strategies[opponent].update((s0, s1)[opponent])
        return (ws[0], ws[1]), (strategies[0], strategies[1])

    (w0, w1), (s0, s1) = solve(game.n_vertices)
    regions = WinningRegions(frozenset(w0), frozenset(w1))
    return regions, s0, s1


def brute_force_solve(game: ParityGame, bound: int = 1 << 20) -> WinningRegions:
    """Reference solver by exhaustive positional strategy enumeration.

    A vertex is won by player 0 iff some positional choice of player-0 edges
    beats every positional response, judged on the unique resulting lasso.
    Positional determinacy makes this exact.
    """
    game.check()
    n = game.n_vertices
    combos = 1
    for v in range(n):
        combos *= len(game.succ[v])
        if combos > bound:
            raise ValueError(f"strategy enumeration bound {bound} exceeded")
    vertices0 = [v for v in range(n) if game.owner[v] == 0]
    vertices1 = [v for v in range(n) if game.owner[v] == 1]

    def choices(vertices: list[int]):
        if not vertices:
            yield {}
            return
        ranges = [range(len(game.succ[v])) for v in vertices]
        for combo in itertools.product(*ranges):
            yield {v: game.succ[v][i] for v, i in zip(vertices, combo)}

    def play_winners(nxt: list[int]) -> list[int]:
        winners = [-1] * n
        for start in range(n):
            if winners[start] != -1:
                continue
            trail = []
            seen_at = {}
            v = start
            while winners[v] == -1 and v not in seen_at:
                seen_at[v] = len(trail)
                trail.append(v)
                v = nxt[v]
            if winners[v] != -1:
                verdict = winners[v]
            else:
                cycle = trail[seen_at[v]:]
                verdict = 0 if min(game.priority[u] for u in cycle) % 2 == 0 else 1
            for u in trail:
                winners[u] = verdict
        return winners

    wins0 = [False] * n
    for f0 in choices(vertices0):
        beaten = [True] * n
        for f1 in choices(vertices1):
            nxt = [0] * n
            for v in range(n):
                nxt[v] = f0[v] if game.owner[v] == 0 else f1[v]
            winners = play_winners(nxt)
            for v in range(n):
                if winners[v] == 1:
                    beaten[v] = False
        for v in range(n):
            if beaten[v]:
                wins0[v] = True
    w0 = frozenset(v for v in range(n) if wins0[v])
    w1 = frozenset(v for v in range(n) if not wins0[v])
    return WinningRegions(w0, w1)


def verify_strategy(
    game: ParityGame,
    regions: WinningRegions,
    strategy0: Mapping[int, int],
    strategy1: Mapping[int, int],
) -> bool:
    """Certify both strategies: closure of the regions plus cycle parity.

    Restricting a player's moves to their strategy inside their region must
    leave no reachable cycle whose minimal priority favours the opponent,
    and the opponent must be unable to leave the region.
    """
    for player, strategy in ((0, strategy0), (1, strategy1)):
        region = regions.w0 if player == 0 else regions.w1
        edges: dict[int, list[int]] = {}
        for v in region:
            if game.owner[v] == player:
                if v not in strategy:
                    return False
                t = strategy[v]
                if t not in game.succ[v] or t not in region:
                    return False
                edges[v] = [t]
            else:
                if any(t not in region for t in game.succ[v]):
                    return False
                edges[v] = list(game.succ[v])
        # no cycle inside the restriction may have opponent parity
        bad_parity = 1 if player == 0 else 0
        for c in sorted({game.priority[v] for v in region if game.priority[v] % 2 == bad_parity}):
            allowed = {v for v in region if game.priority[v] >= c}
            if _has_cycle_through(edges, allowed, {v for v in allowed if game.priority[v] == c}):
                return False
    return True


def _has_cycle_through(
    edges: Mapping[int, list[int]], allowed: set[int], targets: set[int]
) -> bool:
    """Is there a cycle within ``allowed`` visiting some target vertex?"""
    if not targets:
        return False
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    counter = [0]
    sccs: list[set[int]] = []

    def strongconnect(root: int) -> None:
        work = [(root, iter([t for t in edges.get(root, []) if t in allowed]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter([t for t in edges.get(w, []) if t in allowed])))
                    advanced = True
                    break
                elif w in on_stack:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == node:
                        break
                sccs.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])

    for v in sorted(allowed):
        if v not in index:
            strongconnect(v)
    for comp in sccs:
        if not comp & targets:
            continue
        if len(comp) > 1:
            return True
        v = next(iter(comp))
        if v in [t for t in edges.get(v, []) if t in allowed]:
            return True
    return False
