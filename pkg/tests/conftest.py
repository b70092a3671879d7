"""Shared randomized generators for the test suite (all explicitly seeded)."""

from __future__ import annotations

import random

from hyperatl import formula as F
from hyperatl.ltl2dpa import DPA
from hyperatl.solver import ParityGame
from hyperatl.structures import MSCGS

ATOM_POOL = (("a", "p"), ("b", "p"), ("c", "p"))


def random_ltl(rng: random.Random, size: int, atoms=ATOM_POOL, nnf_only: bool = True):
    """Random formula of the given size; sugar/negations only when allowed."""
    if size <= 1:
        r = rng.random()
        if r < 0.1:
            return F.TrueF()
        if r < 0.2:
            return F.FalseF()
        atom = F.Atom(*atoms[rng.randrange(len(atoms))])
        return F.Not(atom) if rng.random() < 0.3 else atom
    unary = [F.Next, F.Globally, F.Eventually]
    binary = [F.And, F.Or, F.Until, F.Release]
    if not nnf_only:
        unary.append(F.Not)
        binary.extend([F.Implies, F.Iff])
    if rng.random() < 0.45:
        return rng.choice(unary)(random_ltl(rng, size - 1, atoms, nnf_only))
    left = rng.randint(1, size - 1)
    op = rng.choice(binary)
    return op(
        random_ltl(rng, left, atoms, nnf_only),
        random_ltl(rng, size - left, atoms, nnf_only),
    )


def random_lasso(rng: random.Random, atoms, max_prefix: int = 4, max_loop: int = 4):
    prefix = [
        {a: rng.random() < 0.5 for a in atoms} for _ in range(rng.randint(0, max_prefix))
    ]
    loop = [
        {a: rng.random() < 0.5 for a in atoms} for _ in range(rng.randint(1, max_loop))
    ]
    return prefix, loop


def random_game(rng: random.Random, max_vertices: int = 8, max_degree: int = 3,
                max_priority: int = 4) -> ParityGame:
    n = rng.randint(1, max_vertices)
    succ = [
        [rng.randrange(n) for _ in range(rng.randint(1, max_degree))] for _ in range(n)
    ]
    owner = [rng.randint(0, 1) for _ in range(n)]
    priority = [rng.randint(0, max_priority) for _ in range(n)]
    return ParityGame(succ=succ, owner=owner, priority=priority)


def random_structure(rng: random.Random, max_states: int = 6, props=("x", "y")) -> MSCGS:
    """Small structure with one or two agents over at most two stages."""
    n = rng.randint(1, max_states)
    agents = tuple(f"a{i}" for i in range(rng.randint(1, 2)))
    stages = {a: rng.randint(0, 1) for a in agents}
    labels, decisions, table = [], [], []
    for _ in range(n):
        labels.append(frozenset(p for p in props if rng.random() < 0.5))
        slots = []
        for a in sorted(agents, key=lambda a: (stages[a], a)):
            if rng.random() < 0.7:
                slots.append((a, rng.randint(1, 2)))
        if not slots:
            slots = [(agents[0], 1)]
        arity = 1
        for _, k in slots:
            arity *= k
        decisions.append(tuple(slots))
        table.append(tuple(rng.randrange(n) for _ in range(arity)))
    return MSCGS(
        name="R",
        agents=agents,
        stages=stages,
        props=frozenset(props),
        labels=labels,
        decisions=decisions,
        table=table,
        initial=0,
        state_names=[f"s{i}" for i in range(n)],
    )


def random_dpa(rng: random.Random, atoms, max_states: int = 5, max_color: int = 2) -> DPA:
    n = rng.randint(1, max_states)
    n_letters = 1 << len(atoms)
    colors = [rng.randint(0, max_color) for _ in range(n)]
    trans = [[rng.randrange(n) for _ in range(n_letters)] for _ in range(n)]
    return DPA(tuple(atoms), 0, colors, trans)
