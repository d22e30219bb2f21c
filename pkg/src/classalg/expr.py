"""Surface syntax for class-algebra expressions.

ASCII operators, loosest to tightest binding::

    <=    subset atom            (path <= class)
    |     union                  right associative
    &     intersection           right associative
    .     composition            right associative
    ~x    Boolean complement
    -x    pseudo-complement
    x'    inverse
    x*    reflexive-transitive closure
    @Name, Name, U, 0, I, (...), base{...}

``@Name`` always denotes a class. A bare ``Name`` is a relation inside a
relational context (``hasPart*.color``) and a proposition elsewhere
(``p & q``); its sort is left open until a parent operator fixes it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Union as _U

from .errors import LexError, ParseError, SortError

__all__ = [
    "ClassRef", "Ref", "Univ", "Empty", "Ident", "Union", "Inter", "Compose",
    "BoolComp", "PseudoComp", "Inverse", "Star", "Selector", "SubsetAtom",
    "Formula", "Sort", "parse", "to_text", "sort_of", "op_count", "leaves",
    "tokenize",
]


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class ClassRef:
    name: str


@dataclass(frozen=True)
class Ref:
    """A bare name: a relation or a proposition, depending on context."""
    name: str


@dataclass(frozen=True)
class Univ:
    pass


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Ident:
    pass


@dataclass(frozen=True)
class Union:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Inter:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Compose:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class BoolComp:
    arg: "Formula"


@dataclass(frozen=True)
class PseudoComp:
    arg: "Formula"


@dataclass(frozen=True)
class Inverse:
    arg: "Formula"


@dataclass(frozen=True)
class Star:
    arg: "Formula"


@dataclass(frozen=True)
class Selector:
    base: "Formula"
    cond: "Formula"


@dataclass(frozen=True)
class SubsetAtom:
    path: "Formula"
    rhs: "Formula"


Formula = _U[ClassRef, Ref, Univ, Empty, Ident, Union, Inter, Compose, BoolComp,
             PseudoComp, Inverse, Star, Selector, SubsetAtom]

BINARY = (Union, Inter, Compose)
UNARY = (BoolComp, PseudoComp, Inverse, Star)


class Sort(enum.Enum):
    CLASS = "class"
    RELATION = "relation"
    ANY = "any"


def _unify(a: Sort, b: Sort) -> Sort | None:
    if a is Sort.ANY:
        return b
    if b is Sort.ANY or a is b:
        return a
    return None


def _combine(node, sorts: tuple[Sort, ...]) -> Sort:
    """Sort of ``node`` given its children's sorts; raises ValueError on a clash."""
    if isinstance(node, ClassRef):
        return Sort.CLASS
    if isinstance(node, Ident):
        return Sort.RELATION
    if isinstance(node, (Ref, Univ, Empty)):
        return Sort.ANY
    if isinstance(node, (Union, Inter)):
        s = _unify(*sorts)
        if s is None:
            raise ValueError("cannot mix class and relation operands")
        return s
    if isinstance(node, Compose):
        if any(_unify(s, Sort.RELATION) is None for s in sorts):
            raise ValueError("'.' composes relations only")
        return Sort.RELATION
    if isinstance(node, (BoolComp, PseudoComp)):
        return sorts[0]
    if isinstance(node, (Inverse, Star)):
        if _unify(sorts[0], Sort.RELATION) is None:
            op = "'" if isinstance(node, Inverse) else "*"
            raise ValueError(f"'{op}' applies to relations only")
        return Sort.RELATION
    if isinstance(node, Selector):
        if any(_unify(s, Sort.CLASS) is None for s in sorts):
            raise ValueError("selector base and condition must be classes")
        return Sort.CLASS
    if isinstance(node, SubsetAtom):
        if _unify(sorts[0], Sort.RELATION) is None:
            raise ValueError("left side of '<=' must be a relation path")
        if _unify(sorts[1], Sort.CLASS) is None:
            raise ValueError("right side of '<=' must be a class")
        return Sort.CLASS
    raise TypeError(node)


def children(f: Formula) -> tuple:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, UNARY):
        return (f.arg,)
    if isinstance(f, Selector):
        return (f.base, f.cond)
    if isinstance(f, SubsetAtom):
        return (f.path, f.rhs)
    return ()


def sort_of(f: Formula) -> Sort:
    """Sort-check ``f`` bottom-up; raises SortError (position 0) on a clash."""
    try:
        return _combine(f, tuple(sort_of(c) for c in children(f)))
    except ValueError as exc:
        raise SortError(str(exc), 0) from None


def op_count(f: Formula) -> int:
    """Number of operator nodes (everything that is not a leaf)."""
    kids = children(f)
    return (1 if kids else 0) + sum(op_count(c) for c in kids)


def leaves(f: Formula) -> Iterator[Formula]:
    kids = children(f)
    if not kids:
        yield f
    for c in kids:
        yield from leaves(c)


# --- lexer -----------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str        # NAME, CLASS, KW, OP, EOF
    text: str
    pos: int         # byte offset


_SINGLE = set("|&.~-'*(){}")
_KEYWORDS = {"U", "0", "I"}


def _is_name_start(c: str) -> bool:
    return c.isalpha()


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(text: str) -> list[Token]:
    # byte offset of every character index (and of the end)
    offsets = [0]
    for ch in text:
        offsets.append(offsets[-1] + len(ch.encode("utf-8")))
    out: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start = i
        if c == "<":
            if i + 1 < n and text[i + 1] == "=":
                out.append(Token("OP", "<=", offsets[start]))
                i += 2
                continue
            raise LexError("expected '<='", offsets[start])
        if c in _SINGLE:
            out.append(Token("OP", c, offsets[start]))
            i += 1
            continue
        if c == "@":
            i += 1
            if i >= n or not _is_name_start(text[i]):
                raise LexError("expected class name after '@'", offsets[i])
            while i < n and _is_name_char(text[i]):
                i += 1
            out.append(Token("CLASS", text[start + 1:i], offsets[start]))
            continue
        if c == "0":
            if i + 1 < n and _is_name_char(text[i + 1]):
                raise LexError("names must start with a letter", offsets[start])
            out.append(Token("KW", "0", offsets[start]))
            i += 1
            continue
        if _is_name_start(c):
            while i < n and _is_name_char(text[i]):
                i += 1
            word = text[start:i]
            kind = "KW" if word in _KEYWORDS else "NAME"
            out.append(Token(kind, word, offsets[start]))
            continue
        raise LexError(f"illegal character {c!r}", offsets[start])
    out.append(Token("EOF", "", offsets[n]))
    return out


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.sorts: dict[int, Sort] = {}

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind == "OP" and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.take()

    def fail(self, what: str):
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"{what}, found {found}", t.pos)

    def build(self, node, pos: int, kids: tuple):
        try:
            sort = _combine(node, tuple(self.sorts[id(k)] for k in kids))
        except ValueError as exc:
            raise SortError(str(exc), pos) from None
        self.sorts[id(node)] = sort
        return node

    def expr(self):
        left = self.or_()
        if self.at("<="):
            pos = self.take().pos
            right = self.or_()
            return self.build(SubsetAtom(left, right), pos, (left, right))
        return left

    def _binary(self, op: str, cls, sub):
        left = sub()
        if self.at(op):
            pos = self.take().pos
            right = self._binary(op, cls, sub)
            return self.build(cls(left, right), pos, (left, right))
        return left

    def or_(self):
        return self._binary("|", Union, self.and_)

    def and_(self):
        return self._binary("&", Inter, self.comp)

    def comp(self):
        return self._binary(".", Compose, self.unary)

    def unary(self):
        if self.at("~") or self.at("-"):
            t = self.take()
            arg = self.unary()
            node = BoolComp(arg) if t.text == "~" else PseudoComp(arg)
            return self.build(node, t.pos, (arg,))
        return self.postfix()

    def postfix(self):
        node = self.primary()
        while self.at("'") or self.at("*"):
            t = self.take()
            inner = node
            node = Inverse(inner) if t.text == "'" else Star(inner)
            node = self.build(node, t.pos, (inner,))
        return node

    def primary(self):
        t = self.tok
        if t.kind == "CLASS":
            self.take()
            node = self.build(ClassRef(t.text), t.pos, ())
        elif t.kind == "NAME":
            self.take()
            node = self.build(Ref(t.text), t.pos, ())
        elif t.kind == "KW":
            self.take()
            node = {"U": Univ, "0": Empty, "I": Ident}[t.text]()
            node = self.build(node, t.pos, ())
        elif self.at("("):
            self.take()
            node = self.expr()
            self.expect(")")
        else:
            self.fail("expected an operand")
        while self.at("{"):
            pos = self.take().pos
            cond = self.expr()
            self.expect("}")
            base = node
            node = self.build(Selector(base, cond), pos, (base, cond))
        return node


def parse(text: str) -> Formula:
    """Parse ``text`` into a sort-checked Formula."""
    p = _Parser(tokenize(text))
    f = p.expr()
    if p.tok.kind != "EOF":
        p.fail("unexpected token")
    return f


# --- printer ---------------------------------------------------------------

_SUB, _OR, _AND, _COMP, _UNARY, _POSTFIX, _ATOM = range(7)

_BIN_TEXT = {Union: (" | ", _OR), Inter: (" & ", _AND), Compose: (".", _COMP)}


def _level(f: Formula) -> int:
    if isinstance(f, SubsetAtom):
        return _SUB
    if isinstance(f, BINARY):
        return _BIN_TEXT[type(f)][1]
    if isinstance(f, (BoolComp, PseudoComp)):
        return _UNARY
    if isinstance(f, (Inverse, Star)):
        return _POSTFIX
    return _ATOM


def _wrap(f: Formula, minimum: int) -> str:
    s = to_text(f)
    return f"({s})" if _level(f) < minimum else s


def to_text(f: Formula) -> str:
    """Render with the fewest parentheses that still parse back to ``f``."""
    if isinstance(f, ClassRef):
        return "@" + f.name
    if isinstance(f, Ref):
        return f.name
    if isinstance(f, Univ):
        return "U"
    if isinstance(f, Empty):
        return "0"
    if isinstance(f, Ident):
        return "I"
    if isinstance(f, BINARY):
        sep, lvl = _BIN_TEXT[type(f)]
        return _wrap(f.left, lvl + 1) + sep + _wrap(f.right, lvl)
    if isinstance(f, BoolComp):
        return "~" + _wrap(f.arg, _UNARY)
    if isinstance(f, PseudoComp):
        return "-" + _wrap(f.arg, _UNARY)
    if isinstance(f, Inverse):
        return _wrap(f.arg, _POSTFIX) + "'"
    if isinstance(f, Star):
        return _wrap(f.arg, _POSTFIX) + "*"
    if isinstance(f, Selector):
        return _wrap(f.base, _ATOM) + "{" + to_text(f.cond) + "}"
    if isinstance(f, SubsetAtom):
        return _wrap(f.path, _OR) + " <= " + _wrap(f.rhs, _OR)
    raise TypeError(f)


def dump(f: Formula, indent: int = 0) -> list[str]:
    """Indented tree view, one node per line."""
    pad = "  " * indent
    if isinstance(f, (ClassRef, Ref)):
        return [f"{pad}{type(f).__name__}({f.name})"]
    kids = children(f)
    if not kids:
        return [f"{pad}{type(f).__name__}"]
    lines = [f"{pad}{type(f).__name__}"]
    for c in kids:
        lines.extend(dump(c, indent + 1))
    return lines
