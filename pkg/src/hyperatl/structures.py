"""Multi-stage concurrent game structures and the stutter / shift transforms.

A structure stores, per state, an ordered list of decision slots
``(agent, arity)`` and a dense successor table indexed mixed-radix by the
slot choices (first slot most significant).  The joint transition function
is total: an agent without a slot in a state is ignored, and a move ``m``
of a slot agent acts as ``m mod arity``.  Program-compiled structures are
turn-based (one slot); the stutter transform adds a second slot for the
scheduling agent, whose later stage lets it react to the others' choices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

SCHED = "sched"
STUT_PROP = "stut"


class TransformError(Exception):
    """Raised when a structure transform is applied to an unsuitable input."""


@dataclass
class MSCGS:
    """Explicit game structure; treat instances as immutable after creation."""

    name: str
    agents: tuple[str, ...]
    stages: dict[str, int]
    props: frozenset[str]
    labels: list[frozenset[str]]
    decisions: list[tuple[tuple[str, int], ...]]
    table: list[tuple[int, ...]]
    initial: int
    state_names: list[str]

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def arity(self, state: int) -> int:
        n = 1
        for _, a in self.decisions[state]:
            n *= a
        return n

    def owner(self, state: int) -> str:
        slots = self.decisions[state]
        return slots[0][0] if slots else self.agents[0]

    def delta(self, state: int, moves: Mapping[str, int]) -> int:
        """Total transition: missing agents default to move 0, moves wrap."""
        idx = 0
        for agent, arity in self.decisions[state]:
            idx = idx * arity + (moves.get(agent, 0) % arity)
        return self.table[state][idx]

    def successors(self, state: int) -> tuple[int, ...]:
        return self.table[state]

    def decode_choice(self, state: int, idx: int) -> list[tuple[str, int]]:
        """Per-slot moves selecting entry ``idx`` of the successor table."""
        slots = self.decisions[state]
        moves = []
        for agent, arity in reversed(slots):
            moves.append((agent, idx % arity))
            idx //= arity
        return list(reversed(moves))

    def max_stage(self) -> int:
        return max(self.stages.values()) if self.stages else 0


Severity = str  # "error" | "warning"
Diagnostics = list[tuple[Severity, str, Optional[int]]]


def validate(g: MSCGS) -> Diagnostics:
    """Structural well-formedness report; empty list means valid."""
    out: Diagnostics = []
    n = g.n_states
    if not (0 <= g.initial < n):
        out.append(("error", f"initial state {g.initial} out of range", None))
    for agent in g.agents:
        if agent not in g.stages:
            out.append(("error", f"agent {agent!r} missing from the stage map", None))
    for s in range(n):
        if not g.table[s]:
            out.append(("error", "non-total transition: state has no successor", s))
            continue
        expected = 1
        for agent, arity in g.decisions[s]:
            if agent not in g.agents:
                out.append(("error", f"decision slot for unknown agent {agent!r}", s))
            if arity < 1:
                out.append(("error", "decision slot with arity < 1", s))
            expected *= max(arity, 1)
        if len(g.table[s]) != expected:
            out.append(
                ("error", f"successor table has {len(g.table[s])} entries, expected {expected}", s)
            )
        for t in g.table[s]:
            if not (0 <= t < n):
                out.append(("error", f"successor {t} out of range", s))
        extra = g.labels[s] - g.props
        if extra:
            out.append(("error", f"labels not in the proposition set: {sorted(extra)}", s))
    return out


def stutter_transform(g: MSCGS) -> MSCGS:
    """Add a scheduling agent that may freeze the state for a step.

    Output states are pairs (s, frozen?).  The scheduler decides, after all
    existing agents (one stage later), whether the joint choice fires
    (landing in (s', 0)) or the state freezes (landing in (s, 1)); frozen
    copies carry the extra proposition ``stut``.
    """
    if SCHED in g.agents:
        raise TransformError(f"agent {SCHED!r} already present in {g.name!r}")
    sched_stage = g.max_stage() + 1

    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def intern(s: int, b: int) -> int:
        k = (s, b)
        if k not in index:
            index[k] = len(order)
            order.append(k)
        return index[k]

    intern(g.initial, 0)
    table: list[tuple[int, ...]] = []
    frontier = 0
    while frontier < len(order):
        s, _b = order[frontier]
        frontier += 1
        row: list[int] = []
        # per base joint choice, the scheduler picks progress (0) or freeze (1)
        for t in g.table[s]:
            row.append(intern(t, 0))
            row.append(intern(s, 1))
        table.append(tuple(row))

    labels = []
    decisions = []
    names = []
    for s, b in order:
        lab = g.labels[s] | {STUT_PROP} if b else g.labels[s]
        labels.append(frozenset(lab))
        decisions.append(g.decisions[s] + ((SCHED, 2),))
        names.append(f"{g.state_names[s]}~" if b else g.state_names[s])

    return MSCGS(
        name=f"{g.name}_stut",
        agents=g.agents + (SCHED,),
        stages={**g.stages, SCHED: sched_stage},
        props=g.props | {STUT_PROP},
        labels=labels,
        decisions=decisions,
        table=table,
        initial=0,
        state_names=names,
    )


def shift_transform(g: MSCGS, k: int) -> MSCGS:
    """Prepend a chain of ``k`` unlabelled states before the initial state.

    The chain delays the structure's behaviour by ``k`` positions; dummy
    states are owned by the first agent with a single move.
    """
    if k < 1:
        raise TransformError("shift distance must be at least 1")
    filler_agent = g.agents[0]
    labels: list[frozenset[str]] = []
    decisions: list[tuple[tuple[str, int], ...]] = []
    table: list[tuple[int, ...]] = []
    names: list[str] = []
    for i in range(k):
        labels.append(frozenset())
        decisions.append(((filler_agent, 1),))
        nxt = i + 1 if i + 1 < k else g.initial + k
        table.append((nxt,))
        names.append(f"shift{i}")
    for s in range(g.n_states):
        labels.append(g.labels[s])
        decisions.append(g.decisions[s])
        table.append(tuple(t + k for t in g.table[s]))
        names.append(g.state_names[s])
    return MSCGS(
        name=f"{g.name}_shift{k}",
        agents=g.agents,
        stages=dict(g.stages),
        props=g.props,
        labels=labels,
        decisions=decisions,
        table=table,
        initial=0,
        state_names=names,
    )


def export_dot(g: MSCGS) -> str:
    """Deterministic DOT rendering: node = state id + labels, edge = moves."""
    lines = [f'digraph "{g.name}" {{']
    lines.append("  rankdir=LR;")
    for s in range(g.n_states):
        labs = "{" + ",".join(sorted(g.labels[s])) + "}"
        shape = "doublecircle" if s == g.initial else "circle"
        lines.append(f'  n{s} [label="{g.state_names[s]} {labs}", shape={shape}];')
    for s in range(g.n_states):
        for idx, t in enumerate(g.table[s]):
            moves = g.decode_choice(s, idx)
            label = " ".join(f"{a}={m}" for a, m in moves) or "-"
            lines.append(f'  n{s} -> n{t} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
