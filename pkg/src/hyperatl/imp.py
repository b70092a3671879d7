"""Imperative bit-vector programs and their compilation to explicit game structures.

Programs manipulate fixed-width bit vectors with ``&``, ``|``, ``!``,
concatenation ``@`` and single-bit projection ``e[n]``.  Inputs enter via
``read_H`` / ``read_L`` statements; ``if (*)`` branches non-deterministically.
Each program step is owned by one of three agents: ``xi_H`` and ``xi_L``
resolve the reads, ``xi_N`` everything else.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .structures import MSCGS

AGENT_N = "xi_N"
AGENT_H = "xi_H"
AGENT_L = "xi_L"
AGENTS = (AGENT_N, AGENT_H, AGENT_L)

BitVector = tuple[bool, ...]


class ProgramError(Exception):
    """Raised for malformed program text (syntax or bit-width violations)."""

    def __init__(self, message: str, pos: Optional[int] = None, text: Optional[str] = None):
        if pos is not None and text is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class StateCapError(Exception):
    """Raised when reachable-state exploration exceeds the configured cap."""


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class TrueE:
    pass


@dataclass(frozen=True)
class FalseE:
    pass


@dataclass(frozen=True)
class NotE:
    operand: "Expr"


@dataclass(frozen=True)
class AndE:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class OrE:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Concat:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Index:
    operand: "Expr"
    index: int


Expr = Union[Var, TrueE, FalseE, NotE, AndE, OrE, Concat, Index]


def expr_width(e, widths: Mapping[str, int]) -> int:
    """Bit width of a well-formed expression; raises on width violations."""
    match e:
        case Var(name):
            if name not in widths:
                raise ProgramError(f"undeclared variable {name!r}")
            return widths[name]
        case TrueE() | FalseE():
            return 1
        case NotE(op):
            return expr_width(op, widths)
        case AndE(l, r) | OrE(l, r):
            wl, wr = expr_width(l, widths), expr_width(r, widths)
            if wl != wr:
                raise ProgramError(f"operand widths differ ({wl} vs {wr})")
            return wl
        case Concat(l, r):
            return expr_width(l, widths) + expr_width(r, widths)
        case Index(op, i):
            w = expr_width(op, widths)
            if not 0 <= i < w:
                raise ProgramError(f"bit index {i} out of range for width {w}")
            return 1
    raise TypeError(f"not an expression: {e!r}")


def eval_expr(e, state: Mapping[str, BitVector]) -> BitVector:
    """Evaluate a well-formed expression over a variable state."""
    match e:
        case Var(name):
            return state[name]
        case TrueE():
            return (True,)
        case FalseE():
            return (False,)
        case NotE(op):
            return tuple(not b for b in eval_expr(op, state))
        case AndE(l, r):
            return tuple(a and b for a, b in zip(eval_expr(l, state), eval_expr(r, state)))
        case OrE(l, r):
            return tuple(a or b for a, b in zip(eval_expr(l, state), eval_expr(r, state)))
        case Concat(l, r):
            return eval_expr(l, state) + eval_expr(r, state)
        case Index(op, i):
            return (eval_expr(op, state)[i],)
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Programs


@dataclass(frozen=True)
class Assign:
    var: str
    expr: object


@dataclass(frozen=True)
class ReadH:
    var: str


@dataclass(frozen=True)
class ReadL:
    var: str


@dataclass(frozen=True)
class IfExpr:
    cond: object
    then: "Program"
    els: "Program"


@dataclass(frozen=True)
class IfStar:
    then: "Program"
    els: "Program"


@dataclass(frozen=True)
class While:
    cond: object
    body: "Program"


@dataclass(frozen=True)
class Seq:
    first: "Program"
    second: "Program"


@dataclass(frozen=True)
class Terminated:
    pass


Program = Union[Assign, ReadH, ReadL, IfExpr, IfStar, While, Seq, Terminated]

TERMINATED = Terminated()


def controlling_player(p) -> str:
    """Agent that picks the successor; only reads and ``if (*)`` offer a choice."""
    match p:
        case ReadH(_):
            return AGENT_H
        case ReadL(_):
            return AGENT_L
        case Seq(first, _):
            return controlling_player(first)
        case _:
            return AGENT_N


def _read_values(width: int) -> list[BitVector]:
    # lexicographic with False < True; bit 0 is most significant
    return [tuple(bits) for bits in itertools.product((False, True), repeat=width)]


def successors(
    program, state: Mapping[str, BitVector], widths: Mapping[str, int]
) -> list[tuple[object, dict[str, BitVector]]]:
    """All one-step successors of a configuration, in deterministic order."""
    match program:
        case Assign(var, expr):
            new = dict(state)
            new[var] = eval_expr(expr, state)
            return [(TERMINATED, new)]
        case ReadH(var) | ReadL(var):
            out = []
            for value in _read_values(widths[var]):
                new = dict(state)
                new[var] = value
                out.append((TERMINATED, new))
            return out
        case IfExpr(cond, then, els):
            branch = then if eval_expr(cond, state)[0] else els
            return [(branch, dict(state))]
        case IfStar(then, els):
            return [(then, dict(state)), (els, dict(state))]
        case While(cond, body):
            if eval_expr(cond, state)[0]:
                return [(Seq(body, program), dict(state))]
            return [(TERMINATED, dict(state))]
        case Seq(first, second):
            out = []
            for p1, s1 in successors(first, state, widths):
                if p1 == TERMINATED:
                    out.append((second, s1))
                else:
                    out.append((Seq(p1, second), s1))
            return out
        case Terminated():
            return [(TERMINATED, dict(state))]
    raise TypeError(f"not a program: {program!r}")


# ---------------------------------------------------------------------------
# Parser

_KEYWORDS = {"var", "if", "else", "while", "true", "false", "read_H", "read_L"}
_PUNCT = [":=", ":", ";", "{", "}", "(", ")", "[", "]", "!", "&", "|", "@", "*"]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "#":  # comment to end of line
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        matched = False
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(("punct", p, i))
                i += len(p)
                matched = True
                break
        if matched:
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("nat", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ProgramError(f"unexpected character {c!r}", i, text)
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, width_overrides: Optional[Mapping[str, int]] = None):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.widths: dict[str, int] = {}
        self.width_overrides = dict(width_overrides or {})

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> ProgramError:
        return ProgramError(message, self.peek()[2], self.text)

    def at(self, kind: str, val: str) -> bool:
        k, v, _ = self.peek()
        return k == kind and v == val

    def expect_punct(self, p: str) -> None:
        if not self.at("punct", p):
            raise self.error(f"expected {p!r}")
        self.next()

    def expect_ident(self) -> str:
        k, v, _ = self.peek()
        if k != "ident" or v in _KEYWORDS:
            raise self.error("expected variable name")
        self.next()
        return v

    def parse_program(self):
        while self.at("ident", "var"):
            self.next()
            name = self.expect_ident()
            if name in self.widths:
                raise self.error(f"variable {name!r} declared twice")
            self.expect_punct(":")
            k, v, _ = self.peek()
            if k != "nat":
                raise self.error("expected bit width")
            self.next()
            width = self.width_overrides.get(name, int(v))
            if width < 1:
                raise self.error("bit width must be at least 1")
            self.expect_punct(";")
            self.widths[name] = width
        body = self.parse_stmts(top=True)
        if self.peek()[0] != "eof":
            raise self.error("expected statement")
        return self.widths, body

    def parse_stmts(self, top: bool = False):
        stmts = [self.parse_stmt()]
        while True:
            k, v, _ = self.peek()
            if k == "eof" or (k == "punct" and v == "}"):
                break
            stmts.append(self.parse_stmt())
        node = stmts[-1]
        for s in reversed(stmts[:-1]):
            node = Seq(s, node)
        return node

    def parse_block(self):
        self.expect_punct("{")
        body = self.parse_stmts()
        self.expect_punct("}")
        return body

    def parse_stmt(self):
        k, v, pos = self.peek()
        if k == "ident" and v == "if":
            self.next()
            self.expect_punct("(")
            if self.at("punct", "*"):
                self.next()
                self.expect_punct(")")
                then = self.parse_block()
                if not self.at("ident", "else"):
                    raise self.error("expected 'else'")
                self.next()
                els = self.parse_block()
                return IfStar(then, els)
            cond = self.parse_expr()
            if expr_width(cond, self.widths) != 1:
                raise ProgramError("guard must have width 1", pos, self.text)
            self.expect_punct(")")
            then = self.parse_block()
            if not self.at("ident", "else"):
                raise self.error("expected 'else'")
            self.next()
            els = self.parse_block()
            return IfExpr(cond, then, els)
        if k == "ident" and v == "while":
            self.next()
            self.expect_punct("(")
            cond = self.parse_expr()
            if expr_width(cond, self.widths) != 1:
                raise ProgramError("guard must have width 1", pos, self.text)
            self.expect_punct(")")
            body = self.parse_block()
            return While(cond, body)
        name = self.expect_ident()
        if name not in self.widths:
            raise ProgramError(f"undeclared variable {name!r}", pos, self.text)
        self.expect_punct(":=")
        if self.at("ident", "read_H") or self.at("ident", "read_L"):
            _, which, _ = self.next()
            self.expect_punct(";")
            return ReadH(name) if which == "read_H" else ReadL(name)
        expr = self.parse_expr()
        w = expr_width(expr, self.widths)
        if w != self.widths[name]:
            raise ProgramError(
                f"cannot assign width {w} to {name!r} of width {self.widths[name]}",
                pos,
                self.text,
            )
        self.expect_punct(";")
        return Assign(name, expr)

    # expression precedence: postfix [] > ! > @ > & > |
    def parse_expr(self):
        left = self.parse_and()
        while self.at("punct", "|"):
            self.next()
            left = OrE(left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_concat()
        while self.at("punct", "&"):
            self.next()
            left = AndE(left, self.parse_concat())
        return left

    def parse_concat(self):
        left = self.parse_unary()
        while self.at("punct", "@"):
            self.next()
            left = Concat(left, self.parse_unary())
        return left

    def parse_unary(self):
        if self.at("punct", "!"):
            self.next()
            return NotE(self.parse_unary())
        return self.parse_postfix()

    def parse_postfix(self):
        e = self.parse_primary()
        while self.at("punct", "["):
            self.next()
            k, v, _ = self.peek()
            if k != "nat":
                raise self.error("expected bit index")
            self.next()
            e = Index(e, int(v))
            self.expect_punct("]")
        return e

    def parse_primary(self):
        k, v, _ = self.peek()
        if k == "punct" and v == "(":
            self.next()
            e = self.parse_expr()
            self.expect_punct(")")
            return e
        if k == "ident" and v == "true":
            self.next()
            return TrueE()
        if k == "ident" and v == "false":
            self.next()
            return FalseE()
        if k == "ident" and v not in _KEYWORDS:
            self.next()
            return Var(v)
        raise self.error("expected expression")


def parse_program(text: str, width_overrides: Optional[Mapping[str, int]] = None):
    """Parse program text into ``(width map, program)``.

    ``width_overrides`` replaces declared widths before well-formedness is
    checked, so a single source can be explored at several bit widths.
    """
    widths, body = _Parser(text, width_overrides).parse_program()
    if width_overrides:
        missing = set(width_overrides) - set(widths)
        if missing:
            raise ProgramError(f"width override for undeclared variable(s): {sorted(missing)}")
    return widths, body


# ---------------------------------------------------------------------------
# Compilation to an explicit game structure


def initial_state(widths: Mapping[str, int]) -> dict[str, BitVector]:
    return {x: (False,) * w for x, w in widths.items()}


def _labels(state: Mapping[str, BitVector]) -> frozenset[str]:
    return frozenset(f"{x}[{i}]" for x, bits in state.items() for i, b in enumerate(bits) if b)


def build_cgs(program, widths: Mapping[str, int], cap: int = 10**6, name: str = "G") -> MSCGS:
    """Enumerate the reachable configurations of a program as a game structure.

    States are ⟨program, variable state⟩ pairs; the agent returned by
    :func:`controlling_player` owns the choice among the successor list.
    All variables start as all-zero vectors.
    """
    var_order = tuple(widths)
    init_sigma = initial_state(widths)

    def key(prog, sigma):
        return (prog, tuple(sigma[x] for x in var_order))

    index: dict = {}
    configs: list[tuple[object, dict]] = []
    order: list = []

    def intern(prog, sigma) -> int:
        k = key(prog, sigma)
        if k in index:
            return index[k]
        if len(configs) >= cap:
            raise StateCapError(f"state cap of {cap} exceeded")
        index[k] = len(configs)
        configs.append((prog, sigma))
        order.append(k)
        return index[k]

    intern(program, init_sigma)
    succ_ids: list[tuple[int, ...]] = []
    owners: list[str] = []
    frontier = 0
    while frontier < len(configs):
        prog, sigma = configs[frontier]
        frontier += 1
        succs = successors(prog, sigma, widths)
        owners.append(controlling_player(prog))
        succ_ids.append(tuple(intern(p, s) for p, s in succs))

    props = frozenset(f"{x}[{i}]" for x in var_order for i in range(widths[x]))
    labels = [_labels(sigma) for _, sigma in configs]
    decisions = [((owners[s], len(succ_ids[s])),) for s in range(len(configs))]
    state_names = [f"s{idx}" for idx in range(len(configs))]
    return MSCGS(
        name=name,
        agents=AGENTS,
        stages={a: 0 for a in AGENTS},
        props=props,
        labels=labels,
        decisions=decisions,
        table=list(succ_ids),
        initial=0,
        state_names=state_names,
    )
