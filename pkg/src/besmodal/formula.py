"""Modal formulas: AST, parser, printer and bounded enumeration.

The AST has exactly five constructors: ``Atom``, ``Bottom``, ``Implies``,
``Box`` and ``Diamond``. Negation is sugar for ``phi -> bot``.

Concrete syntax (ASCII)::

    phi ::= atom | bot | ~phi | []phi | <>phi | phi -> phi | (phi)

``->`` is right-associative and binds weakest; prefix operators bind tightest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Union


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Box:
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Diamond:
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


Formula = Union[Atom, Bottom, Implies, Box, Diamond]

BOT = Bottom()


def neg(f: Formula) -> Formula:
    return Implies(f, BOT)


class AtomAlphabet(tuple):
    """Ordered, duplicate-free, nonempty tuple of atom names.

    The position of an atom is its index in every bitset downstream.
    """

    def __new__(cls, atoms: Sequence[str]):
        atoms = tuple(atoms)
        if not atoms:
            raise ValueError("atom alphabet must be nonempty")
        if len(set(atoms)) != len(atoms):
            raise ValueError(f"duplicate atoms in alphabet {atoms!r}")
        for a in atoms:
            if not _ATOM_RE.fullmatch(a) or a == "bot":
                raise ValueError(f"invalid atom name {a!r}")
        return super().__new__(cls, atoms)

    def index(self, name: str) -> int:  # type: ignore[override]
        try:
            return super().index(name)
        except ValueError:
            raise KeyError(f"unknown atom {name!r}") from None


# --------------------------------------------------------------------------
# parsing

_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*")
_TOKEN_RE = re.compile(r"\s*(?:(->)|(\[\])|(<>)|(~)|(\()|(\))|([a-z][a-z0-9_]*))")


class FormulaSyntaxError(ValueError):
    def __init__(self, text: str, position: int, expected: Sequence[str]):
        self.text = text
        self.position = position
        self.expected = tuple(sorted(expected))
        super().__init__(
            f"syntax error at position {position}: expected one of "
            f"{', '.join(self.expected)}"
        )


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    kinds = ("->", "[]", "<>", "~", "(", ")", "atom")
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(text, pos, ["atom", "bot", "(", "~", "[]", "<>", "->", ")"])
        for kind, group in zip(kinds, m.groups()):
            if group is not None:
                start = m.start(m.lastindex)
                if kind == "atom" and group == "bot":
                    kind = "bot"
                tokens.append((kind, group, start))
                break
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    _PRIMARY_START = ["atom", "bot", "(", "~", "[]", "<>"]

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: Sequence[str]):
        raise FormulaSyntaxError(self.text, self.peek()[2], expected)

    def formula(self) -> Formula:
        left = self.unary()
        if self.peek()[0] == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def unary(self) -> Formula:
        kind, value, _ = self.peek()
        if kind == "~":
            self.take()
            return Implies(self.unary(), BOT)
        if kind == "[]":
            self.take()
            return Box(self.unary())
        if kind == "<>":
            self.take()
            return Diamond(self.unary())
        if kind == "atom":
            self.take()
            return Atom(value)
        if kind == "bot":
            self.take()
            return BOT
        if kind == "(":
            self.take()
            inner = self.formula()
            if self.peek()[0] != ")":
                self.fail([")", "->"])
            self.take()
            return inner
        self.fail(self._PRIMARY_START)


def parse(text: str) -> Formula:
    """Parse ``text`` into a formula, raising :class:`FormulaSyntaxError`."""
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "eof":
        p.fail(["->", "end of input"])
    return f


def render(f: Formula) -> str:
    """Canonical minimal-parenthesis ASCII rendering."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bottom):
        return "bot"
    if isinstance(f, Implies):
        left = render(f.left)
        if isinstance(f.left, Implies):
            left = f"({left})"
        return f"{left} -> {render(f.right)}"
    op = "[]" if isinstance(f, Box) else "<>"
    body = render(f.body)
    if isinstance(f.body, Implies):
        body = f"({body})"
    return op + body


# --------------------------------------------------------------------------
# structural helpers

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Implies):
        return (f.left, f.right)
    if isinstance(f, (Box, Diamond)):
        return (f.body,)
    return ()


def depth(f: Formula) -> int:
    kids = children(f)
    return 1 + max(depth(k) for k in kids) if kids else 0


def size(f: Formula) -> int:
    return 1 + sum(size(k) for k in children(f))


def atoms_of(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    out: set[str] = set()
    for k in children(f):
        out |= atoms_of(k)
    return out


def is_modal(f: Formula) -> bool:
    if isinstance(f, (Box, Diamond)):
        return True
    return any(is_modal(k) for k in children(f))


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas, children before parents, ``f`` last."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        for k in children(g):
            walk(k)
        seen.setdefault(g, None)

    walk(f)
    return list(seen)


def rewrite_diamond(f: Formula) -> Formula:
    """Replace every ``<>phi`` by ``[](phi -> bot) -> bot``."""
    if isinstance(f, Diamond):
        return Implies(Box(Implies(rewrite_diamond(f.body), BOT)), BOT)
    if isinstance(f, Box):
        return Box(rewrite_diamond(f.body))
    if isinstance(f, Implies):
        return Implies(rewrite_diamond(f.left), rewrite_diamond(f.right))
    return f


def rewrite_box(f: Formula) -> Formula:
    """Replace every ``[]phi`` by ``<>(phi -> bot) -> bot``."""
    if isinstance(f, Box):
        return Implies(Diamond(Implies(rewrite_box(f.body), BOT)), BOT)
    if isinstance(f, Diamond):
        return Diamond(rewrite_box(f.body))
    if isinstance(f, Implies):
        return Implies(rewrite_box(f.left), rewrite_box(f.right))
    return f


def enumerate_formulas(
    alphabet: Sequence[str], max_depth: int, allow_modal: bool = True
) -> Iterator[Formula]:
    """Yield every formula of depth <= ``max_depth`` exactly once.

    Formulas come out grouped by exact depth; inside a group unary
    formulas precede implications.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    layers: list[list[Formula]] = [[Atom(a) for a in alphabet] + [BOT]]
    yield from layers[0]
    for d in range(1, max_depth + 1):
        prev = layers[d - 1]
        below = [g for layer in layers[: d - 1] for g in layer]
        layer: list[Formula] = []
        if allow_modal:
            layer += [Box(g) for g in prev]
            layer += [Diamond(g) for g in prev]
        for a in prev:
            for b in below + prev:
                layer.append(Implies(a, b))
        for a in below:
            for b in prev:
                layer.append(Implies(a, b))
        layers.append(layer)
        yield from layer
