"""Generator expression language.

A generator is a small expression tree that maps the context of a candidate
arc (identifiers, degrees, walk distances) to a selection weight. Trees are
written as prefix s-expressions::

    (* (indeg j) 2)
    (psi 3 1 0.5)
    (> (indeg i) du 1 (exp dd))

Evaluation is closed: every operator is protected so that no NaN or infinity
can escape, and any non-finite intermediate value is replaced by 0.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Union

import numpy as np

BINARY_OPS = ("+", "-", "*", "/", "pow", "min", "max")
UNARY_OPS = ("exp", "log", "abs")
COMPARISON_OPS = (">", "<", "=")
OPERATORS = BINARY_OPS + UNARY_OPS + COMPARISON_OPS + ("=0", "psi")

ARITY = {
    **{op: 2 for op in BINARY_OPS},
    **{op: 1 for op in UNARY_OPS},
    **{op: 4 for op in COMPARISON_OPS},
    "=0": 3,
    "psi": 3,
}

VARIABLES = ("i", "j", "indeg_i", "indeg_j", "outdeg_i", "outdeg_j", "d_u", "d_d", "d_r")
DIRECTED_ONLY = frozenset({"outdeg_i", "outdeg_j", "d_d", "d_r"})
UNDIRECTED_VARIABLES = tuple(v for v in VARIABLES if v not in DIRECTED_ONLY)

# variable name -> program text
_VAR_TEXT = {
    "i": "i",
    "j": "j",
    "indeg_i": "(indeg i)",
    "indeg_j": "(indeg j)",
    "outdeg_i": "(outdeg i)",
    "outdeg_j": "(outdeg j)",
    "d_u": "du",
    "d_d": "dd",
    "d_r": "dr",
}
_ATOM_VARS = {"i": "i", "j": "j", "du": "d_u", "dd": "d_d", "dr": "d_r"}
_DEGREE_HEADS = ("indeg", "outdeg")

EXP_CLAMP = 50.0


class GenlangError(ValueError):
    """Structurally invalid program (bad arity, unknown variable, wrong mode)."""


class ParseError(GenlangError):
    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


# ---------------------------------------------------------------------------
# tree nodes


@dataclass(frozen=True)
class Const:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Op:
    op: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


ExprNode = Union[Const, Var, Op]


def _children(node: ExprNode) -> tuple:
    return node.args if isinstance(node, Op) else ()


def iter_nodes(node: ExprNode) -> Iterator[tuple[tuple[int, ...], ExprNode]]:
    """Yield ``(path, node)`` pairs in preorder; ``path`` indexes children from the root."""
    stack = [((), node)]
    while stack:
        path, cur = stack.pop()
        yield path, cur
        kids = _children(cur)
        for k in range(len(kids) - 1, -1, -1):
            stack.append((path + (k,), kids[k]))


def replace_at(node: ExprNode, path: tuple[int, ...], new: ExprNode) -> ExprNode:
    if not path:
        return new
    head, rest = path[0], path[1:]
    args = list(node.args)
    args[head] = replace_at(args[head], rest, new)
    return Op(node.op, tuple(args))


def node_count(node: ExprNode) -> int:
    return sum(1 for _ in iter_nodes(node))


def tree_depth(node: ExprNode) -> int:
    kids = _children(node)
    return 1 + (max(tree_depth(k) for k in kids) if kids else 0)


def variables_used(node: ExprNode) -> frozenset[str]:
    return frozenset(n.name for _, n in iter_nodes(node) if isinstance(n, Var))


def check_node(node: ExprNode, directed: bool = True) -> None:
    """Raise :class:`GenlangError` unless ``node`` is a well-formed tree for the mode."""
    for _, n in iter_nodes(node):
        if isinstance(n, Const):
            if not math.isfinite(n.value):
                raise GenlangError(f"non-finite constant {n.value!r}")
        elif isinstance(n, Var):
            if n.name not in VARIABLES:
                raise GenlangError(f"unknown variable {n.name!r}")
            if not directed and n.name in DIRECTED_ONLY:
                raise GenlangError(f"variable {_VAR_TEXT[n.name]} is only legal for directed networks")
        elif isinstance(n, Op):
            if n.op not in ARITY:
                raise GenlangError(f"unknown operator {n.op!r}")
            if len(n.args) != ARITY[n.op]:
                raise GenlangError(f"operator {n.op!r} takes {ARITY[n.op]} arguments, got {len(n.args)}")
        else:
            raise GenlangError(f"not an expression node: {n!r}")


@dataclass(frozen=True)
class GeneratorProgram:
    """A validated generator tree together with the network mode it targets."""

    root: ExprNode
    directed: bool = True
    _length: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        check_node(self.root, self.directed)
        object.__setattr__(self, "_length", node_count(self.root))

    def __len__(self) -> int:
        return self._length

    def __str__(self) -> str:
        return print_program(self)

    @property
    def variables(self) -> frozenset[str]:
        return variables_used(self.root)


def program_length(prog: GeneratorProgram | ExprNode) -> int:
    """Number of nodes (operators and leaves) in the tree."""
    if isinstance(prog, GeneratorProgram):
        return len(prog)
    return node_count(prog)


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class ArcContext:
    """Variable bindings for one candidate arc ``i -> j``.

    Identifiers are 1-based. Directed-only fields stay ``None`` for
    undirected networks.
    """

    i: int
    j: int
    indeg_i: int
    indeg_j: int
    outdeg_i: int | None = None
    outdeg_j: int | None = None
    d_u: float = 1.0
    d_d: float | None = None
    d_r: float | None = None


def _finite(x: np.ndarray) -> np.ndarray:
    bad = ~np.isfinite(x)
    if bad.any():
        x = np.where(bad, 0.0, x)
    return x


def _eval(node: ExprNode, env: Callable[[str], np.ndarray], size: int) -> np.ndarray:
    if isinstance(node, Const):
        return np.full(size, node.value)
    if isinstance(node, Var):
        return env(node.name)

    op = node.op
    a = [_eval(child, env, size) for child in node.args]
    if op == "+":
        out = a[0] + a[1]
    elif op == "-":
        out = a[0] - a[1]
    elif op == "*":
        out = a[0] * a[1]
    elif op == "/":
        den = a[1]
        zero = den == 0
        out = np.where(zero, 0.0, a[0] / np.where(zero, 1.0, den))
    elif op == "pow":
        out = np.where(a[0] < 0, -1.0, 1.0) * np.abs(a[0]) ** a[1]
    elif op == "min":
        out = np.minimum(a[0], a[1])
    elif op == "max":
        out = np.maximum(a[0], a[1])
    elif op == "exp":
        out = np.exp(np.clip(a[0], -EXP_CLAMP, EXP_CLAMP))
    elif op == "log":
        mag = np.abs(a[0])
        zero = mag == 0
        out = np.where(zero, 0.0, np.log(np.where(zero, 1.0, mag)))
    elif op == "abs":
        out = np.abs(a[0])
    elif op == ">":
        out = np.where(a[0] > a[1], a[2], a[3])
    elif op == "<":
        out = np.where(a[0] < a[1], a[2], a[3])
    elif op == "=":
        out = np.where(a[0] == a[1], a[2], a[3])
    elif op == "=0":
        out = np.where(a[0] == 0, a[1], a[2])
    elif op == "psi":
        groups = np.maximum(np.rint(np.abs(a[0])), 1.0)
        same = np.fmod(env("i"), groups) == np.fmod(env("j"), groups)
        out = np.where(same, a[1], a[2])
    else:  # pragma: no cover - rejected by check_node
        raise GenlangError(f"unknown operator {op!r}")
    return _finite(np.asarray(out, dtype=float))


def evaluate_batch(
    prog: GeneratorProgram | ExprNode,
    variables: Mapping[str, np.ndarray] | Callable[[str], np.ndarray],
    size: int,
) -> np.ndarray:
    """Evaluate a tree over ``size`` candidate arcs at once.

    ``variables`` maps variable names to arrays of length ``size``; it may be
    a callable so that expensive variables (walk distances) are only computed
    when the tree actually reads them.
    """
    root = prog.root if isinstance(prog, GeneratorProgram) else prog
    if callable(variables):
        fetch = variables
    else:
        fetch = variables.__getitem__

    cache: dict[str, np.ndarray] = {}

    def env(name: str) -> np.ndarray:
        if name not in cache:
            cache[name] = np.asarray(fetch(name), dtype=float)
        return cache[name]

    with np.errstate(all="ignore"):
        return _eval(root, env, size)


def evaluate(prog: GeneratorProgram, ctx: ArcContext) -> float:
    """Weight assigned by ``prog`` to the single arc described by ``ctx``."""

    def env(name: str) -> np.ndarray:
        value = getattr(ctx, name)
        if value is None:
            raise GenlangError(f"context has no value for {_VAR_TEXT[name]}")
        return np.array([value], dtype=float)

    return float(evaluate_batch(prog, env, 1)[0])


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _strip_comments(text: str) -> str:
    # blank out comment lines so token offsets still point into the original text
    return "".join(
        " " * len(line) if line.lstrip().startswith("#") else line for line in text.splitlines(keepends=True)
    )


def _tokenize(text: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start()) for m in _TOKEN.finditer(_strip_comments(text))]


def _parse_number(tok: str) -> float | None:
    try:
        value = float(tok)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


class _Parser:
    def __init__(self, tokens: list[tuple[str, int]], end: int):
        self.tokens = tokens
        self.pos = 0
        self.end = end

    def peek(self) -> tuple[str, int]:
        if self.pos >= len(self.tokens):
            raise ParseError("unexpected end of input, unbalanced parentheses", self.end)
        return self.tokens[self.pos]

    def next(self) -> tuple[str, int]:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_close(self) -> None:
        tok, at = self.next()
        if tok != ")":
            raise ParseError(f"expected ')' but found {tok!r}", at)

    def expr(self) -> ExprNode:
        tok, at = self.next()
        if tok == ")":
            raise ParseError("unexpected ')'", at)
        if tok != "(":
            if tok in _ATOM_VARS:
                return Var(_ATOM_VARS[tok])
            value = _parse_number(tok)
            if value is None:
                raise ParseError(f"unknown symbol {tok!r}", at)
            return Const(value)

        head, head_at = self.next()
        if head in _DEGREE_HEADS:
            who, who_at = self.next()
            if who not in ("i", "j"):
                raise ParseError(f"({head} ...) takes i or j, got {who!r}", who_at)
            self.expect_close()
            return Var(f"{head}_{who}")
        if head not in ARITY:
            raise ParseError(f"unknown operator {head!r}", head_at)
        args = []
        while self.peek()[0] != ")":
            args.append(self.expr())
        self.next()
        if len(args) != ARITY[head]:
            raise ParseError(f"operator {head!r} takes {ARITY[head]} arguments, got {len(args)}", head_at)
        return Op(head, tuple(args))


def parse_expr(text: str) -> ExprNode:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty program", 0)
    parser = _Parser(tokens, len(text))
    node = parser.expr()
    if parser.pos != len(tokens):
        tok, at = tokens[parser.pos]
        raise ParseError(f"trailing input {tok!r}", at)
    return node


def parse_program(text: str, directed: bool = True) -> GeneratorProgram:
    """Parse one prefix s-expression; ``#`` comment lines are ignored."""
    return GeneratorProgram(parse_expr(text), directed)


def format_constant(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def print_expr(node: ExprNode) -> str:
    if isinstance(node, Const):
        return format_constant(node.value)
    if isinstance(node, Var):
        return _VAR_TEXT[node.name]
    return "(" + " ".join([node.op] + [print_expr(a) for a in node.args]) + ")"


def print_program(prog: GeneratorProgram | ExprNode) -> str:
    return print_expr(prog.root if isinstance(prog, GeneratorProgram) else prog)


def load_program(path, directed: bool = True) -> GeneratorProgram:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read(), directed)


def save_program(prog: GeneratorProgram, path, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(print_program(prog) + "\n")


# ---------------------------------------------------------------------------
# random trees and mutation


@dataclass(frozen=True)
class TreeGenParams:
    """Settings of the "grow" tree generator.

    A node becomes a leaf with probability ``terminal_prob`` or when it sits
    at ``max_depth``. Leaves are constants with probability ``const_prob``,
    otherwise a uniformly chosen legal variable. Constants are a uniform
    integer in ``0..int_max`` or, with probability ``1 - int_const_prob``, a
    uniform real in ``(0, real_max]``.
    """

    max_depth: int = 5
    terminal_prob: float = 0.3
    const_prob: float = 0.5
    int_const_prob: float = 0.5
    int_max: int = 10
    real_max: float = 10.0
    directed: bool = True

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        for name in ("terminal_prob", "const_prob", "int_const_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @property
    def variables(self) -> tuple[str, ...]:
        return VARIABLES if self.directed else UNDIRECTED_VARIABLES


def random_constant(params: TreeGenParams, rng: np.random.Generator) -> Const:
    if rng.random() < params.int_const_prob:
        return Const(int(rng.integers(0, params.int_max + 1)))
    return Const(params.real_max * (1.0 - rng.random()))


def _random_leaf(params: TreeGenParams, rng: np.random.Generator) -> ExprNode:
    if rng.random() < params.const_prob:
        return random_constant(params, rng)
    names = params.variables
    return Var(names[int(rng.integers(len(names)))])


def _grow(depth: int, params: TreeGenParams, rng: np.random.Generator) -> ExprNode:
    if depth >= params.max_depth or rng.random() < params.terminal_prob:
        return _random_leaf(params, rng)
    op = OPERATORS[int(rng.integers(len(OPERATORS)))]
    return Op(op, tuple(_grow(depth + 1, params, rng) for _ in range(ARITY[op])))


def random_program(params: TreeGenParams, rng: np.random.Generator) -> GeneratorProgram:
    return GeneratorProgram(_grow(1, params, rng), params.directed)


def mutate(prog: GeneratorProgram, params: TreeGenParams, rng: np.random.Generator) -> GeneratorProgram:
    """Subtree mutation.

    A uniformly chosen node of ``prog`` is replaced by a uniformly chosen
    subtree of a freshly generated random tree. ``prog`` is left untouched.
    """
    if params.directed != prog.directed:
        raise GenlangError("mutation parameters and program disagree on directedness")
    targets = list(iter_nodes(prog.root))
    path, _ = targets[int(rng.integers(len(targets)))]
    donor = list(iter_nodes(_grow(1, params, rng)))
    _, graft = donor[int(rng.integers(len(donor)))]
    return GeneratorProgram(replace_at(prog.root, path, graft), prog.directed)


CONSTANT = GeneratorProgram(Const(1.0))
PREFERENTIAL = GeneratorProgram(Var("indeg_j"))


def constant_program(value: float = 1.0, directed: bool = True) -> GeneratorProgram:
    """Uniform attachment: every candidate gets the same weight."""
    return GeneratorProgram(Const(value), directed)


def preferential_program(directed: bool = True) -> GeneratorProgram:
    """Preferential attachment on the target's in-degree."""
    return GeneratorProgram(Var("indeg_j"), directed)
