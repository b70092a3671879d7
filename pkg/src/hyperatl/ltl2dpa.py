"""Translation of quantifier-free bodies into deterministic parity automata.

The alphabet is the set of truth assignments to the body's indexed atoms,
encoded as bitmasks over a fixed atom order (bit ``i`` gives the truth of
``atoms[i]``).  The chain is alternating → nondeterministic (breakpoint
construction) → deterministic (node-tree construction with an index
appearance record), with min-even parity acceptance throughout: a run is
accepting iff the minimal colour seen infinitely often is even.

:func:`eval_lasso` is an independent bottom-up evaluator over ultimately
periodic words and deliberately shares no code with the automata chain.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Optional, Sequence

from . import formula as F

Assignment = Mapping[tuple[str, str], bool]


class AutomatonCapError(Exception):
    """Raised when a construction exceeds its configured state cap."""


def assignment_to_letter(assignment: Assignment, atoms: Sequence[tuple[str, str]]) -> int:
    letter = 0
    for i, atom in enumerate(atoms):
        if assignment.get(atom, False):
            letter |= 1 << i
    return letter


def letter_to_assignment(letter: int, atoms: Sequence[tuple[str, str]]) -> dict:
    return {atom: bool(letter >> i & 1) for i, atom in enumerate(atoms)}


# ---------------------------------------------------------------------------
# Alternating parity automata (colors 0/1) built structurally from NNF input.
#
# Transition formulas are positive boolean combinations of states:
#   ("t",) true | ("f",) false | ("q", i) state | ("&", a, b) | ("|", a, b)

PB_TRUE = ("t",)
PB_FALSE = ("f",)


class APA:
    def __init__(self, atoms, initial, colors, trans):
        self.atoms = tuple(atoms)
        self.n_letters = 1 << len(self.atoms)
        self.initial = initial
        self.colors = colors  # per state, 0 or 1
        self.trans = trans  # trans[q][letter] -> positive boolean formula

    @property
    def n_states(self) -> int:
        return len(self.colors)


def ltl_to_apa(f: F.Ltl, atoms: Optional[Sequence[tuple[str, str]]] = None) -> APA:
    """One automaton state per subformula; fixpoint states loop on themselves.

    Availability-style operators get colour 1 (their loop must be left),
    invariance-style operators colour 0; all other states colour 0.
    """
    if atoms is None:
        atoms = F.collect_atoms(f)
    if not F.is_nnf(f):
        raise ValueError("input must be in negation normal form")
    atom_index = {a: i for i, a in enumerate(atoms)}
    n_letters = 1 << len(atoms)
    colors: list[int] = []
    trans: list[list] = []

    def add_state(color: int) -> int:
        colors.append(color)
        trans.append([None] * n_letters)
        return len(colors) - 1

    def build(g: F.Ltl) -> int:
        match g:
            case F.Atom(prop, var):
                q = add_state(0)
                bit = atom_index[(prop, var)]
                for v in range(n_letters):
                    trans[q][v] = PB_TRUE if v >> bit & 1 else PB_FALSE
                return q
            case F.Not(F.Atom(prop, var)):
                q = add_state(0)
                bit = atom_index[(prop, var)]
                for v in range(n_letters):
                    trans[q][v] = PB_FALSE if v >> bit & 1 else PB_TRUE
                return q
            case F.TrueF():
                q = add_state(0)
                for v in range(n_letters):
                    trans[q][v] = PB_TRUE
                return q
            case F.FalseF():
                q = add_state(0)
                for v in range(n_letters):
                    trans[q][v] = PB_FALSE
                return q
            case F.And(l, r):
                ql, qr = build(l), build(r)
                q = add_state(0)
                for v in range(n_letters):
                    trans[q][v] = ("&", trans[ql][v], trans[qr][v])
                return q
            case F.Or(l, r):
                ql, qr = build(l), build(r)
                q = add_state(0)
                for v in range(n_letters):
                    trans[q][v] = ("|", trans[ql][v], trans[qr][v])
                return q
            case F.Next(h):
                qh = build(h)
                q = add_state(0)
                for v in range(n_letters):
                    trans[q][v] = ("q", qh)
                return q
            case F.Until(l, r):
                ql, qr = build(l), build(r)
                q = add_state(1)
                for v in range(n_letters):
                    trans[q][v] = ("|", trans[qr][v], ("&", trans[ql][v], ("q", q)))
                return q
            case F.Release(l, r):
                ql, qr = build(l), build(r)
                q = add_state(0)
                for v in range(n_letters):
                    trans[q][v] = ("&", trans[qr][v], ("|", trans[ql][v], ("q", q)))
                return q
            case F.Eventually(h):
                qh = build(h)
                q = add_state(1)
                for v in range(n_letters):
                    trans[q][v] = ("|", trans[qh][v], ("q", q))
                return q
            case F.Globally(h):
                qh = build(h)
                q = add_state(0)
                for v in range(n_letters):
                    trans[q][v] = ("&", trans[qh][v], ("q", q))
                return q
        raise TypeError(f"not an NNF node: {g!r}")

    initial = build(f)
    return APA(atoms, initial, colors, trans)


def _antichain(sets: Iterable[frozenset]) -> tuple[frozenset, ...]:
    """Minimal elements only, in a deterministic order."""
    pool = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
    out: list[frozenset] = []
    for s in pool:
        if not any(t <= s for t in out):
            out.append(s)
    return tuple(out)


def _min_models(pb, memo: dict) -> tuple[frozenset, ...]:
    """Antichain of minimal state sets satisfying a positive boolean formula."""
    got = memo.get(pb)
    if got is not None:
        return got
    tag = pb[0]
    if tag == "t":
        res: tuple[frozenset, ...] = (frozenset(),)
    elif tag == "f":
        res = ()
    elif tag == "q":
        res = (frozenset((pb[1],)),)
    elif tag == "|":
        res = _antichain(_min_models(pb[1], memo) + _min_models(pb[2], memo))
    elif tag == "&":
        left = _min_models(pb[1], memo)
        right = _min_models(pb[2], memo)
        res = _antichain(a | b for a in left for b in right)
    else:
        raise ValueError(f"bad formula tag {tag!r}")
    memo[pb] = res
    return res


# ---------------------------------------------------------------------------
# Nondeterministic parity automaton (Büchi encoded as colors 0/1)


class NBA:
    def __init__(self, atoms, initial, accepting, trans):
        self.atoms = tuple(atoms)
        self.n_letters = 1 << len(self.atoms)
        self.initial = initial
        self.accepting = accepting  # frozenset of states with colour 0
        self.trans = trans  # trans[q][letter] -> tuple of successor states

    @property
    def n_states(self) -> int:
        return len(self.trans)


def apa_to_nba(apa: APA, cap: int = 10**6) -> NBA:
    """Breakpoint construction over (all branches, branches owing a visit).

    With colours in {0,1}, min-even acceptance says every infinite branch
    must see a colour-0 state infinitely often; the second component tracks
    the branches that have not done so since the last breakpoint.
    """
    if any(c not in (0, 1) for c in apa.colors):
        raise ValueError("unsupported input: breakpoint construction needs colors in {0,1}")
    fstates = frozenset(q for q in range(apa.n_states) if apa.colors[q] == 0)
    memo: dict = {}

    init = (frozenset((apa.initial,)), frozenset((apa.initial,)) - fstates)
    index: dict = {init: 0}
    order = [init]
    trans: list[list[tuple[int, ...]]] = []

    def intern(key) -> int:
        if key not in index:
            if len(order) >= cap:
                raise AutomatonCapError(f"state cap of {cap} exceeded in breakpoint construction")
            index[key] = len(order)
            order.append(key)
        return index[key]

    frontier = 0
    while frontier < len(order):
        big, owing = order[frontier]
        frontier += 1
        rows: list[tuple[int, ...]] = []
        # every tracked state picks its own minimal successor set; taking the
        # union per combination keeps each branch's choice visible to the
        # breakpoint component (a globally minimal set could hide the escape
        # one owing branch needs)
        states = sorted(big)
        for letter in range(apa.n_letters):
            choices = [_min_models(apa.trans[q][letter], memo) for q in states]
            succs = set()
            if all(choices):
                for combo in itertools.product(*choices):
                    picked = dict(zip(states, combo))
                    nxt_big = frozenset().union(*combo) if combo else frozenset()
                    if owing:
                        nxt_owing = frozenset().union(*(picked[q] for q in owing))
                    else:
                        nxt_owing = nxt_big
                    succs.add(intern((nxt_big, nxt_owing - fstates)))
            rows.append(tuple(sorted(succs)))
        trans.append(rows)

    accepting = frozenset(i for i, (_big, owing) in enumerate(order) if not owing)
    return NBA(apa.atoms, 0, accepting, trans)


# ---------------------------------------------------------------------------
# Deterministic parity automaton


class DPA:
    def __init__(self, atoms, initial, colors, trans):
        self.atoms = tuple(atoms)
        self.n_letters = 1 << len(self.atoms)
        self.initial = initial
        self.colors = colors
        self.trans = trans  # trans[q][letter] -> state

    @property
    def n_states(self) -> int:
        return len(self.colors)

    @property
    def n_colors(self) -> int:
        return len(set(self.colors))

    def step(self, q: int, letter: int) -> int:
        return self.trans[q][letter]


# A node tree is a recursive tuple (name, label frozenset, children tuple);
# sibling order is seniority (older first).  Each transition reports which
# node names were deleted and which completed a breakpoint, and the record
# of live names turns those events into a parity colour.


def _tree_decode(root):
    label: dict[int, set[int]] = {}
    children: dict[int, list[int]] = {}
    preorder: list[int] = []

    def walk(node):
        name, lab, kids = node
        preorder.append(name)
        label[name] = set(lab)
        children[name] = [k[0] for k in kids]
        for kid in kids:
            walk(kid)

    walk(root)
    return preorder, label, children


def _tree_encode(name, label, children):
    return (
        name,
        frozenset(label[name]),
        tuple(_tree_encode(c, label, children) for c in children[name]),
    )


def _safra_step(root, letter, nba):
    """One deterministic macro step; returns (tree', removed, marked, fresh)."""
    preorder, label, children = _tree_decode(root)
    root_name = root[0]
    used = set(preorder)
    removed: set[int] = set()
    marked: set[int] = set()
    fresh: list[int] = []
    next_name = 0

    def alloc() -> int:
        nonlocal next_name
        while next_name in used:
            next_name += 1
        used.add(next_name)
        return next_name

    # branch out a youngest child for every node currently seeing acceptance
    for v in preorder:
        hit = label[v] & nba.accepting
        if hit:
            c = alloc()
            label[c] = set(hit)
            children[c] = []
            children[v].append(c)
            fresh.append(c)

    # move every node label forward
    for v in list(label):
        nxt: set[int] = set()
        for q in label[v]:
            nxt.update(nba.trans[q][letter])
        label[v] = nxt

    # a state is kept only in the oldest sibling tracking it
    def dedupe(v, allowed):
        label[v] &= allowed
        claimed: set[int] = set()
        for c in children[v]:
            dedupe(c, label[v] - claimed)
            claimed |= label[c]

    dedupe(root_name, label[root_name])

    def bury(v):
        removed.add(v)
        for c in children[v]:
            bury(c)

    if not label[root_name]:
        bury(root_name)
        return None, removed, marked, []

    # drop emptied nodes (their subtrees are empty too)
    def sweep(v):
        kept = []
        for c in children[v]:
            if label[c]:
                sweep(c)
                kept.append(c)
            else:
                bury(c)
        children[v] = kept

    sweep(root_name)

    # breakpoint: all tracked runs revisited acceptance since the children spawned
    def merge(v):
        if not children[v]:
            return
        union: set[int] = set()
        for c in children[v]:
            union |= label[c]
        if union == label[v]:
            for c in children[v]:
                bury(c)
            children[v] = []
            marked.add(v)
        else:
            for c in children[v]:
                merge(c)

    merge(root_name)
    alive_fresh = [c for c in fresh if c not in removed]
    return _tree_encode(root_name, label, children), removed, marked, alive_fresh


_DEAD = (None, (), 1)


def nba_to_dpa(nba: NBA, cap: int = 10**6) -> DPA:
    """Determinize; the colour of a state reports the last transition's event.

    An appearance record over live node names orders deletion (odd colour
    2p+1) and breakpoint (even colour 2p+2) events by record position p, so
    a deletion dominates a breakpoint at the same position.  A node that
    eventually survives forever while completing breakpoints infinitely
    often yields a recurring even colour below every recurring odd one,
    matching acceptance of the input automaton.
    """
    neutral = 2 * (nba.n_states + 2) + 3
    init_tree = (0, frozenset((nba.initial,)), ())
    init_key = (init_tree, (0,), neutral)
    index: dict = {init_key: 0}
    order = [init_key]
    trans: list[list[int]] = []

    def intern(key) -> int:
        if key not in index:
            if len(order) >= cap:
                raise AutomatonCapError(f"state cap of {cap} exceeded in determinization")
            index[key] = len(order)
            order.append(key)
        return index[key]

    frontier = 0
    while frontier < len(order):
        tree, record, _color = order[frontier]
        frontier += 1
        row = []
        for letter in range(nba.n_letters):
            if tree is None:
                row.append(intern(_DEAD))
                continue
            tree2, removed, marked, fresh = _safra_step(tree, letter, nba)
            if tree2 is None:
                row.append(intern(_DEAD))
                continue
            pos = {nm: i for i, nm in enumerate(record)}
            removal_pos = [pos[nm] for nm in removed if nm in pos]
            mark_pos = [pos[nm] for nm in marked]
            if removal_pos and (not mark_pos or min(removal_pos) <= min(mark_pos)):
                color = 2 * min(removal_pos) + 1
            elif mark_pos:
                color = 2 * min(mark_pos) + 2
            else:
                color = neutral
            record2 = tuple(nm for nm in record if nm not in removed) + tuple(fresh)
            row.append(intern((tree2, record2, color)))
        trans.append(row)

    colors = [key[2] for key in order]
    dpa = DPA(nba.atoms, 0, colors, trans)
    return _quotient(dpa)


def _quotient(dpa: DPA) -> DPA:
    """Merge states with equal colour and bisimilar successor behaviour."""
    n = dpa.n_states
    color_ids = {c: i for i, c in enumerate(sorted(set(dpa.colors)))}
    block = [color_ids[c] for c in dpa.colors]
    while True:
        signatures: dict = {}
        new_block = [0] * n
        for q in range(n):
            sig = (block[q], tuple(block[t] for t in dpa.trans[q]))
            if sig not in signatures:
                signatures[sig] = len(signatures)
            new_block[q] = signatures[sig]
        if new_block == block:
            break
        block = new_block
    n_blocks = max(block) + 1
    if n_blocks == n:
        return dpa
    rep = [None] * n_blocks
    for q in range(n):
        if rep[block[q]] is None:
            rep[block[q]] = q
    colors = [dpa.colors[rep[b]] for b in range(n_blocks)]
    trans = [[block[t] for t in dpa.trans[rep[b]]] for b in range(n_blocks)]
    return _prune(DPA(dpa.atoms, block[dpa.initial], colors, trans))


def _prune(dpa: DPA) -> DPA:
    """Drop states unreachable from the initial state."""
    seen = {dpa.initial}
    stack = [dpa.initial]
    while stack:
        q = stack.pop()
        for t in dpa.trans[q]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    if len(seen) == dpa.n_states:
        return dpa
    remap = {}
    for q in range(dpa.n_states):
        if q in seen:
            remap[q] = len(remap)
    colors = [dpa.colors[q] for q in sorted(seen)]
    trans = [[remap[t] for t in dpa.trans[q]] for q in sorted(seen)]
    return DPA(dpa.atoms, remap[dpa.initial], colors, trans)


def _neutralize_transient(dpa: DPA) -> DPA:
    """Give states on no cycle the minimal cycle colour.

    Such states are visited at most once per run, so their colour never
    decides acceptance; a uniform choice lets the quotient merge them.
    """
    on_cycle = [False] * dpa.n_states
    for comp in _scc(dpa, set(range(dpa.n_states))):
        if len(comp) > 1:
            for q in comp:
                on_cycle[q] = True
        else:
            q = next(iter(comp))
            if q in dpa.trans[q]:
                on_cycle[q] = True
    if all(on_cycle):
        return dpa
    fill = min(dpa.colors[q] for q in range(dpa.n_states) if on_cycle[q])
    colors = [c if cyc else fill for c, cyc in zip(dpa.colors, on_cycle)]
    return DPA(dpa.atoms, dpa.initial, colors, dpa.trans)


def compress_colors(dpa: DPA) -> DPA:
    """Relabel colours to a minimal 0-based range preserving order and parity.

    Runs of same-parity colours collapse to one value, so the minimal colour
    of every cycle keeps its parity and winners are unchanged.
    """
    present = sorted(set(dpa.colors))
    mapping = {}
    value = present[0] % 2
    previous_parity = value
    for c in present:
        if c % 2 != previous_parity:
            value += 1
            previous_parity = c % 2
        mapping[c] = value
    colors = [mapping[c] for c in dpa.colors]
    return DPA(dpa.atoms, dpa.initial, colors, dpa.trans)


def ltl_to_dpa(
    f: F.Ltl,
    atoms: Optional[Sequence[tuple[str, str]]] = None,
    cap: int = 10**6,
) -> DPA:
    """Full chain: normal form, alternating, breakpoint, determinize, tidy."""
    nnf = F.to_nnf(f)
    if atoms is None:
        atoms = F.collect_atoms(nnf)
    apa = ltl_to_apa(nnf, atoms)
    nba = apa_to_nba(apa, cap=cap)
    dpa = nba_to_dpa(nba, cap=cap)
    dpa = _quotient(_neutralize_transient(dpa))
    dpa = _prune(dpa)
    return compress_colors(dpa)


# ---------------------------------------------------------------------------
# Lasso-word oracle


def eval_lasso(f: F.Ltl, prefix: Sequence[Assignment], loop: Sequence[Assignment]) -> bool:
    """Truth of ``f`` at position 0 of ``prefix · loop^ω``.

    Evaluated bottom-up per position with explicit fixpoint iteration over
    the loop; accepts any formula, including ones outside normal form.
    """
    if not loop:
        raise ValueError("loop must be nonempty")
    word = list(prefix) + list(loop)
    n = len(word)
    loop_start = len(prefix)

    def nxt(i: int) -> int:
        return i + 1 if i + 1 < n else loop_start

    memo: dict = {}

    def values(g: F.Ltl) -> tuple[bool, ...]:
        if g in memo:
            return memo[g]
        match g:
            case F.Atom(prop, var):
                res = tuple(bool(word[i].get((prop, var), False)) for i in range(n))
            case F.TrueF():
                res = (True,) * n
            case F.FalseF():
                res = (False,) * n
            case F.Not(h):
                res = tuple(not v for v in values(h))
            case F.And(l, r):
                res = tuple(a and b for a, b in zip(values(l), values(r)))
            case F.Or(l, r):
                res = tuple(a or b for a, b in zip(values(l), values(r)))
            case F.Implies(l, r):
                res = tuple((not a) or b for a, b in zip(values(l), values(r)))
            case F.Iff(l, r):
                res = tuple(a == b for a, b in zip(values(l), values(r)))
            case F.Next(h):
                vh = values(h)
                res = tuple(vh[nxt(i)] for i in range(n))
            case F.Until(l, r):
                vl, vr = values(l), values(r)
                cur = list(vr)
                for _ in range(n + 1):
                    nxt_cur = [vr[i] or (vl[i] and cur[nxt(i)]) for i in range(n)]
                    if nxt_cur == cur:
                        break
                    cur = nxt_cur
                res = tuple(cur)
            case F.Release(l, r):
                vl, vr = values(l), values(r)
                cur = [True] * n
                for _ in range(n + 1):
                    nxt_cur = [vr[i] and (vl[i] or cur[nxt(i)]) for i in range(n)]
                    if nxt_cur == cur:
                        break
                    cur = nxt_cur
                res = tuple(cur)
            case F.Eventually(h):
                vh = values(h)
                cur = list(vh)
                for _ in range(n + 1):
                    nxt_cur = [vh[i] or cur[nxt(i)] for i in range(n)]
                    if nxt_cur == cur:
                        break
                    cur = nxt_cur
                res = tuple(cur)
            case F.Globally(h):
                vh = values(h)
                cur = [True] * n
                for _ in range(n + 1):
                    nxt_cur = [vh[i] and cur[nxt(i)] for i in range(n)]
                    if nxt_cur == cur:
                        break
                    cur = nxt_cur
                res = tuple(cur)
            case _:
                raise TypeError(f"not an LTL node: {g!r}")
        memo[g] = res
        return res

    return values(f)[0]


def dpa_accepts_lasso(
    dpa: DPA, prefix: Sequence[Assignment], loop: Sequence[Assignment]
) -> bool:
    """Run the unique path and test the minimal colour on the recurrent cycle."""
    if not loop:
        raise ValueError("loop must be nonempty")
    state = dpa.initial
    for a in prefix:
        state = dpa.trans[state][assignment_to_letter(a, dpa.atoms)]
    loop_letters = [assignment_to_letter(a, dpa.atoms) for a in loop]
    seen: dict = {}
    trail: list[int] = []
    pos = 0
    while (pos, state) not in seen:
        seen[(pos, state)] = len(trail)
        trail.append(state)
        state = dpa.trans[state][loop_letters[pos]]
        pos = (pos + 1) % len(loop_letters)
    cycle = trail[seen[(pos, state)]:]
    return min(dpa.colors[q] for q in cycle) % 2 == 0


# ---------------------------------------------------------------------------
# Emptiness / universality per state (used to prune decided game regions)


def _has_dominated_cycle(dpa: DPA, parity: int) -> list[bool]:
    """Per state: is a cycle whose minimal colour has ``parity`` reachable?"""
    n = dpa.n_states
    good = [False] * n
    for c in sorted(set(dpa.colors)):
        if c % 2 != parity:
            continue
        allowed = [q for q in range(n) if dpa.colors[q] >= c]
        allowed_set = set(allowed)
        comp = _scc(dpa, allowed_set)
        for members in comp:
            if len(members) == 1:
                q = next(iter(members))
                has_cycle = q in dpa.trans[q]
            else:
                has_cycle = True
            if has_cycle and any(dpa.colors[q] == c for q in members):
                for q in members:
                    good[q] = True
    # propagate backwards: a state reaching a good state is good
    preds: list[list[int]] = [[] for _ in range(n)]
    for q in range(n):
        for t in set(dpa.trans[q]):
            preds[t].append(q)
    stack = [q for q in range(n) if good[q]]
    while stack:
        q = stack.pop()
        for p in preds[q]:
            if not good[p]:
                good[p] = True
                stack.append(p)
    return good


def _scc(dpa: DPA, allowed: set[int]) -> list[set[int]]:
    """Strongly connected components of the sub-graph on ``allowed`` states."""
    index = {}
    low = {}
    on_stack = set()
    stack: list[int] = []
    out: list[set[int]] = []
    counter = itertools.count()

    def strongconnect(v: int) -> None:
        work = [(v, iter([t for t in set(dpa.trans[v]) if t in allowed]))]
        index[v] = low[v] = next(counter)
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter([t for t in set(dpa.trans[w]) if t in allowed])))
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
                out.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])

    for v in sorted(allowed):
        if v not in index:
            strongconnect(v)
    return out


def empty_states(dpa: DPA) -> list[bool]:
    """Per state: does it accept no word at all?"""
    good = _has_dominated_cycle(dpa, parity=0)
    return [not g for g in good]


def universal_states(dpa: DPA) -> list[bool]:
    """Per state: does it accept every word?"""
    bad = _has_dominated_cycle(dpa, parity=1)
    return [not b for b in bad]


# ---------------------------------------------------------------------------
# DOT export


def _cubes(letters: list[int], n_bits: int) -> list[str]:
    """Greedy merge of full assignments into don't-care cubes for edge labels."""
    cubes = {tuple((letter >> i & 1) for i in range(n_bits)) for letter in letters}
    cubes = {tuple(map(str, c)) for c in cubes}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(sorted(cubes), 2):
            diff = [i for i in range(n_bits) if a[i] != b[i]]
            if len(diff) == 1 and all(a[i] == b[i] for i in range(n_bits) if i != diff[0]):
                merged = tuple(a[i] if i != diff[0] else "*" for i in range(n_bits))
                cubes.discard(a)
                cubes.discard(b)
                cubes.add(merged)
                changed = True
                break
    return ["".join(c) for c in sorted(cubes)]


def export_dot(dpa: DPA, name: str = "dpa") -> str:
    """Deterministic DOT rendering; edge labels are assignment cubes."""
    n_bits = len(dpa.atoms)
    lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
    atom_names = " ".join(f"{p}{{{v}}}" for p, v in dpa.atoms)
    lines.append(f'  info [label="atoms: {atom_names}", shape=note];')
    for q in range(dpa.n_states):
        shape = "doublecircle" if q == dpa.initial else "circle"
        lines.append(f'  q{q} [label="q{q} c{dpa.colors[q]}", shape={shape}];')
    for q in range(dpa.n_states):
        by_target: dict[int, list[int]] = {}
        for letter, t in enumerate(dpa.trans[q]):
            by_target.setdefault(t, []).append(letter)
        for t in sorted(by_target):
            label = " | ".join(_cubes(by_target[t], n_bits)) if n_bits else "*"
            lines.append(f'  q{q} -> q{t} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
