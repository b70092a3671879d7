"""Specification syntax: quantifier blocks over path variables plus an LTL body.

A specification has the shape ``[ <quantifier>+ ] <ltl>`` with an optional
leading ``!`` negating the whole block.  Each quantifier is ``forall``,
``exists`` or an explicit agent coalition ``<<a,b>>``, binds one path
variable, and may name the structure it is resolved on with ``@ system``.
The body is quantifier-free LTL whose atoms ``prop{var}`` read a labelled
proposition off one bound path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union


class FormulaError(Exception):
    """Raised for syntactically or semantically ill-formed specifications."""

    def __init__(self, message: str, pos: Optional[int] = None, text: Optional[str] = None):
        self.pos = pos
        if pos is not None and text is not None:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = f"{line}:{col}: {message}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class Atom:
    prop: str
    var: str


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Not:
    operand: "Ltl"


@dataclass(frozen=True)
class And:
    left: "Ltl"
    right: "Ltl"


@dataclass(frozen=True)
class Or:
    left: "Ltl"
    right: "Ltl"


@dataclass(frozen=True)
class Implies:
    left: "Ltl"
    right: "Ltl"


@dataclass(frozen=True)
class Iff:
    left: "Ltl"
    right: "Ltl"


@dataclass(frozen=True)
class Next:
    operand: "Ltl"


@dataclass(frozen=True)
class Until:
    left: "Ltl"
    right: "Ltl"


@dataclass(frozen=True)
class Release:
    left: "Ltl"
    right: "Ltl"


@dataclass(frozen=True)
class Globally:
    operand: "Ltl"


@dataclass(frozen=True)
class Eventually:
    operand: "Ltl"


Ltl = Union[
    Atom, TrueF, FalseF, Not, And, Or, Implies, Iff, Next, Until, Release, Globally, Eventually
]


@dataclass(frozen=True)
class Forall:
    """Empty coalition: every agent is adversarial."""


@dataclass(frozen=True)
class Exists:
    """Full coalition: every agent of the bound structure is controlled."""


@dataclass(frozen=True)
class Coalition:
    agents: tuple[str, ...]

    def __post_init__(self):
        if not self.agents:
            raise FormulaError("empty coalition; use 'forall' instead")


AgentSpec = Union[Forall, Exists, Coalition]


@dataclass(frozen=True)
class Quantifier:
    spec: AgentSpec
    var: str
    system: Optional[str] = None


@dataclass(frozen=True)
class HyperFormula:
    block: tuple[Quantifier, ...]
    body: Ltl
    negated: bool = False
    bracketed: bool = True


# ---------------------------------------------------------------------------
# Tokenizer

_RESERVED = {"forall", "exists", "true", "false", "X", "G", "F", "U", "R"}

_PUNCT = ["<->", "->", "<<", ">>", "[", "]", "(", ")", "{", "}", "!", "&", "|", ".", ",", "@"]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
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
        raise FormulaError(f"unexpected character {c!r}", i, text)
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> FormulaError:
        return FormulaError(message, self.peek()[2], self.text)

    def expect_punct(self, p: str) -> None:
        kind, val, _ = self.peek()
        if kind != "punct" or val != p:
            raise self.error(f"expected {p!r}")
        self.next()

    def expect_ident(self) -> str:
        kind, val, _ = self.peek()
        if kind != "ident":
            raise self.error("expected identifier")
        self.next()
        return val

    def at_punct(self, p: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "punct" and val == p

    def at_ident(self, name: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "ident" and val == name

    # -- quantifier block

    def parse_hyper(self) -> HyperFormula:
        negated = False
        if self.at_punct("!"):
            self.next()
            negated = True
        kind, val, _ = self.peek()
        if kind == "ident" and (val in ("forall", "exists")) or (kind == "punct" and val == "<<"):
            raise self.error(
                "unsupported fragment: quantifiers must be grouped in one '[...]' block"
            )
        self.expect_punct("[")
        block = [self.parse_quantifier()]
        while not self.at_punct("]"):
            block.append(self.parse_quantifier())
        self.expect_punct("]")
        body = self.parse_ltl()
        kind, _, _ = self.peek()
        if kind != "eof":
            raise self.error("trailing input after formula")
        f = HyperFormula(block=tuple(block), body=body, negated=negated, bracketed=True)
        _check_bindings(f, self.text)
        return f

    def parse_quantifier(self) -> Quantifier:
        spec: AgentSpec
        if self.at_ident("forall"):
            self.next()
            spec = Forall()
        elif self.at_ident("exists"):
            self.next()
            spec = Exists()
        elif self.at_punct("<<"):
            self.next()
            agents = [self.expect_ident()]
            while self.at_punct(","):
                self.next()
                agents.append(self.expect_ident())
            self.expect_punct(">>")
            spec = Coalition(tuple(agents))
        else:
            raise self.error("expected 'forall', 'exists' or '<<agents>>'")
        var = self.expect_ident()
        system = None
        if self.at_punct("@"):
            self.next()
            system = self.expect_ident()
        self.expect_punct(".")
        return Quantifier(spec=spec, var=var, system=system)

    # -- LTL body; precedence: unary > U/R > & > | > -> > <->

    def parse_ltl(self) -> Ltl:
        return self.parse_iff()

    def parse_iff(self) -> Ltl:
        left = self.parse_implies()
        if self.at_punct("<->"):
            self.next()
            return Iff(left, self.parse_iff())
        return left

    def parse_implies(self) -> Ltl:
        left = self.parse_or()
        if self.at_punct("->"):
            self.next()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> Ltl:
        left = self.parse_and()
        while self.at_punct("|"):
            self.next()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Ltl:
        left = self.parse_until()
        while self.at_punct("&"):
            self.next()
            left = And(left, self.parse_until())
        return left

    def parse_until(self) -> Ltl:
        left = self.parse_unary()
        if self.at_ident("U"):
            self.next()
            return Until(left, self.parse_until())
        if self.at_ident("R"):
            self.next()
            return Release(left, self.parse_until())
        return left

    def parse_unary(self) -> Ltl:
        kind, val, _ = self.peek()
        if kind == "punct" and val == "!":
            self.next()
            return Not(self.parse_unary())
        if kind == "punct" and val == "(":
            self.next()
            inner = self.parse_ltl()
            self.expect_punct(")")
            return inner
        if kind == "ident":
            if val == "true":
                self.next()
                return TrueF()
            if val == "false":
                self.next()
                return FalseF()
            if val == "X":
                self.next()
                reps = 1
                if self.at_punct("["):
                    self.next()
                    k, v, _ = self.peek()
                    if k != "nat":
                        raise self.error("expected repetition count after 'X['")
                    self.next()
                    reps = int(v)
                    self.expect_punct("]")
                inner = self.parse_unary()
                for _ in range(reps):
                    inner = Next(inner)
                return inner
            if val == "G":
                self.next()
                return Globally(self.parse_unary())
            if val == "F":
                self.next()
                return Eventually(self.parse_unary())
            if val in _RESERVED:
                raise self.error(f"reserved word {val!r} cannot start an atom")
            return self.parse_atom()
        raise self.error("expected a formula")

    def parse_atom(self) -> Ltl:
        name = self.expect_ident()
        prop = name
        if self.at_punct("["):
            self.next()
            k, v, _ = self.peek()
            if k != "nat":
                raise self.error("expected bit index")
            self.next()
            prop = f"{name}[{v}]"
            self.expect_punct("]")
        self.expect_punct("{")
        var = self.expect_ident()
        self.expect_punct("}")
        return Atom(prop=prop, var=var)


def _check_bindings(f: HyperFormula, text: Optional[str] = None) -> None:
    seen = set()
    for q in f.block:
        if q.var in seen:
            raise FormulaError(f"path variable {q.var!r} bound twice")
        seen.add(q.var)
    for prop, var in collect_atoms(f.body):
        if var not in seen:
            raise FormulaError(f"unbound path variable {var!r} in atom {prop}{{{var}}}")


def parse_formula(text: str) -> HyperFormula:
    """Parse a specification; raises :class:`FormulaError` with a position."""
    return _Parser(text).parse_hyper()


def parse_ltl(text: str) -> Ltl:
    """Parse a bare LTL formula (no quantifier block)."""
    p = _Parser(text)
    body = p.parse_ltl()
    if p.peek()[0] != "eof":
        raise p.error("trailing input after formula")
    return body


# ---------------------------------------------------------------------------
# Printing (parse ∘ format is the identity up to structural equality)


def format_ltl(f: Ltl) -> str:
    match f:
        case Atom(prop, var):
            return f"{prop}{{{var}}}"
        case TrueF():
            return "true"
        case FalseF():
            return "false"
        case Not(g):
            return f"! {format_ltl(g)}" if isinstance(g, (Atom, TrueF, FalseF)) else f"! ({format_ltl(g)})"
        case And(l, r):
            return f"({format_ltl(l)} & {format_ltl(r)})"
        case Or(l, r):
            return f"({format_ltl(l)} | {format_ltl(r)})"
        case Implies(l, r):
            return f"({format_ltl(l)} -> {format_ltl(r)})"
        case Iff(l, r):
            return f"({format_ltl(l)} <-> {format_ltl(r)})"
        case Next(g):
            return f"X ({format_ltl(g)})"
        case Until(l, r):
            return f"({format_ltl(l)} U {format_ltl(r)})"
        case Release(l, r):
            return f"({format_ltl(l)} R {format_ltl(r)})"
        case Globally(g):
            return f"G ({format_ltl(g)})"
        case Eventually(g):
            return f"F ({format_ltl(g)})"
    raise TypeError(f"not an LTL node: {f!r}")


def format_quantifier(q: Quantifier) -> str:
    match q.spec:
        case Forall():
            kind = "forall"
        case Exists():
            kind = "exists"
        case Coalition(agents):
            kind = "<<" + ",".join(agents) + ">>"
    at = f" @ {q.system}" if q.system else ""
    return f"{kind} {q.var}{at} ."


def format_hyper(f: HyperFormula) -> str:
    neg = "! " if f.negated else ""
    block = " ".join(format_quantifier(q) for q in f.block)
    return f"{neg}[ {block} ] {format_ltl(f.body)}"


# ---------------------------------------------------------------------------
# Negation normal form


def to_nnf(f: Ltl) -> Ltl:
    """Rewrite so negation only guards atoms; ``->`` and ``<->`` are expanded."""
    match f:
        case Atom() | TrueF() | FalseF():
            return f
        case Not(g):
            return _neg(g)
        case And(l, r):
            return And(to_nnf(l), to_nnf(r))
        case Or(l, r):
            return Or(to_nnf(l), to_nnf(r))
        case Implies(l, r):
            return Or(_neg(l), to_nnf(r))
        case Iff(l, r):
            return Or(And(to_nnf(l), to_nnf(r)), And(_neg(l), _neg(r)))
        case Next(g):
            return Next(to_nnf(g))
        case Until(l, r):
            return Until(to_nnf(l), to_nnf(r))
        case Release(l, r):
            return Release(to_nnf(l), to_nnf(r))
        case Globally(g):
            return Globally(to_nnf(g))
        case Eventually(g):
            return Eventually(to_nnf(g))
    raise TypeError(f"not an LTL node: {f!r}")


def _neg(f: Ltl) -> Ltl:
    """NNF of the negation of ``f``."""
    match f:
        case Atom():
            return Not(f)
        case TrueF():
            return FalseF()
        case FalseF():
            return TrueF()
        case Not(g):
            return to_nnf(g)
        case And(l, r):
            return Or(_neg(l), _neg(r))
        case Or(l, r):
            return And(_neg(l), _neg(r))
        case Implies(l, r):
            return And(to_nnf(l), _neg(r))
        case Iff(l, r):
            return Or(And(to_nnf(l), _neg(r)), And(_neg(l), to_nnf(r)))
        case Next(g):
            return Next(_neg(g))
        case Until(l, r):
            return Release(_neg(l), _neg(r))
        case Release(l, r):
            return Until(_neg(l), _neg(r))
        case Globally(g):
            return Eventually(_neg(g))
        case Eventually(g):
            return Globally(_neg(g))
    raise TypeError(f"not an LTL node: {f!r}")


def is_nnf(f: Ltl) -> bool:
    match f:
        case Atom() | TrueF() | FalseF():
            return True
        case Not(Atom()):
            return True
        case Not(_):
            return False
        case Implies(_, _) | Iff(_, _):
            return False
        case And(l, r) | Or(l, r) | Until(l, r) | Release(l, r):
            return is_nnf(l) and is_nnf(r)
        case Next(g) | Globally(g) | Eventually(g):
            return is_nnf(g)
    raise TypeError(f"not an LTL node: {f!r}")


# ---------------------------------------------------------------------------
# Atoms and fragment validation


def collect_atoms(f: Ltl) -> tuple[tuple[str, str], ...]:
    """All (proposition, path variable) pairs in first-occurrence order."""
    out: list[tuple[str, str]] = []
    seen = set()

    def walk(g: Ltl) -> None:
        match g:
            case Atom(prop, var):
                if (prop, var) not in seen:
                    seen.add((prop, var))
                    out.append((prop, var))
            case TrueF() | FalseF():
                pass
            case Not(h) | Next(h) | Globally(h) | Eventually(h):
                walk(h)
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) | Until(l, r) | Release(l, r):
                walk(l)
                walk(r)
            case _:
                raise TypeError(f"not an LTL node: {g!r}")

    walk(f)
    return tuple(out)


@dataclass(frozen=True)
class ResolvedQuantifier:
    var: str
    system: str
    coalition: frozenset[str]


@dataclass(frozen=True)
class FragmentInfo:
    """Checked block: per-quantifier coalition plus the body's atom layout."""

    quantifiers: tuple[ResolvedQuantifier, ...]
    atoms: tuple[tuple[str, str], ...]
    atom_copy: Mapping[tuple[str, str], int]


def validate_fragment(
    f: HyperFormula,
    systems: Mapping[str, object],
    default_system: Optional[str] = None,
) -> FragmentInfo:
    """Resolve quantifier bindings against concrete structures.

    Every structure must expose ``agents`` (ordered names) and ``props``.
    A quantifier without an ``@`` annotation binds to ``default_system``,
    or to the single structure when only one is supplied.
    """
    if len(f.block) > 1 and not f.bracketed:
        raise FormulaError("unsupported fragment: multiple quantifiers must share one block")
    if default_system is None and len(systems) == 1:
        default_system = next(iter(systems))
    var_to_copy: dict[str, int] = {}
    resolved = []
    for idx, q in enumerate(f.block):
        sys_id = q.system or default_system
        if sys_id is None:
            raise FormulaError(f"quantifier for {q.var!r} names no system and no default is set")
        if sys_id not in systems:
            raise FormulaError(f"unknown system {sys_id!r}")
        g = systems[sys_id]
        agents = tuple(g.agents)
        match q.spec:
            case Forall():
                coalition: frozenset[str] = frozenset()
            case Exists():
                coalition = frozenset(agents)
            case Coalition(names):
                missing = [a for a in names if a not in agents]
                if missing:
                    raise FormulaError(
                        f"coalition of {q.var!r} names agents absent from {sys_id!r}: "
                        + ", ".join(missing)
                    )
                coalition = frozenset(names)
        var_to_copy[q.var] = idx
        resolved.append(ResolvedQuantifier(var=q.var, system=sys_id, coalition=coalition))
    atoms = collect_atoms(f.body)
    atom_copy = {}
    for prop, var in atoms:
        if var not in var_to_copy:
            raise FormulaError(f"unbound path variable {var!r}")
        copy = var_to_copy[var]
        g = systems[resolved[copy].system]
        if prop not in g.props:
            raise FormulaError(
                f"proposition {prop!r} is not labelled in system {resolved[copy].system!r}"
            )
        atom_copy[(prop, var)] = copy
    return FragmentInfo(quantifiers=tuple(resolved), atoms=atoms, atom_copy=atom_copy)
