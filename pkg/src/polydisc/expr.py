"""A small expression language for functions of z1, ..., zd.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' int)*            # right-associative, integer exponents
    atom   := number | 'i' | var | name '(' expr ')' | '[' items ']' | '(' expr ')'

Numbers may carry a trailing ``i`` (``2.5i``).  Variables are ``z1`` ...
``zd`` (``z`` is accepted when d = 1).  Functions: exp, sin, cos, log,
sqrt (principal branches) and conj, the only non-holomorphic primitive.
``[a, b]`` builds a vector, ``[[a, b], [c, d]]`` a matrix.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass

import numpy as np

from .core import CPoint, SpaceDescriptor, VectorValue, as_points
from .errors import DomainError, EvaluationError, ParseError

FUNCTIONS = ("exp", "sin", "cos", "log", "sqrt", "conj")
MIN_DIVISOR = 1e-300
MAX_EXPONENT = 4096


# ---------------------------------------------------------------------------
# AST


class Node:
    __slots__ = ()

    @property
    def tainted(self) -> bool:
        return any(child.tainted for child in self.children())

    def children(self):
        return ()

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True)
class Num(Node):
    value: complex


@dataclass(frozen=True)
class Var(Node):
    index: int  # 1-based


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int

    def children(self):
        return (self.base,)


@dataclass(frozen=True)
class Call(Node):
    name: str
    arg: Node

    @property
    def tainted(self) -> bool:
        return self.name == "conj" or self.arg.tainted

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Vector(Node):
    items: tuple

    def children(self):
        return self.items


@dataclass(frozen=True)
class Matrix(Node):
    rows: tuple

    def children(self):
        return tuple(x for row in self.rows for x in row)


# ---------------------------------------------------------------------------
# printing


def _num_source(value: complex) -> str:
    re_, im = value.real, value.imag
    if im == 0 and re_ >= 0 and not str(re_).startswith("-"):
        return repr(float(re_))
    if re_ == 0 and im >= 0 and not str(re_).startswith("-"):
        return repr(float(im)) + "i"
    return f"({float(re_)!r} + {float(im)!r}i)"


def to_source(node: Node) -> str:
    """Canonical text form; ``parse(to_source(e))`` rebuilds ``e``."""
    if isinstance(node, Num):
        return _num_source(node.value)
    if isinstance(node, Var):
        return f"z{node.index}"
    if isinstance(node, Neg):
        return f"(-{to_source(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Pow):
        base = to_source(node.base)
        if isinstance(node.base, Pow) or (isinstance(node.base, Num) and base.startswith("(")):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.name}({to_source(node.arg)})"
    if isinstance(node, Vector):
        return "[" + ", ".join(to_source(x) for x in node.items) + "]"
    if isinstance(node, Matrix):
        return "[" + ", ".join("[" + ", ".join(to_source(x) for x in row) + "]" for row in node.rows) + "]"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def _line_col(src: str, pos: int) -> tuple[int, int]:
    line = src.count("\n", 0, pos) + 1
    col = pos - (src.rfind("\n", 0, pos) + 1) + 1
    return line, col


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", *_line_col(src, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, d: int):
        self.src = src
        self.d = d
        self.tokens = tokenize(src)
        self.i = 0

    def error(self, message: str, token: Token | None = None):
        token = token or self.peek()
        return ParseError(message, *_line_col(self.src, token.pos))

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.peek().kind == "op" and self.peek().text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            tok = self.peek()
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise self.error(f"expected {text!r}, found {found}")

    def parse(self) -> Node:
        if self.peek().kind == "end":
            raise self.error("empty expression")
        node = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        exps = []
        while self.accept("^"):
            exps.append(self.integer())
        if not exps:
            return base
        exponent = exps[-1]
        for e in reversed(exps[:-1]):
            exponent = e ** exponent if exponent >= 0 else None
            if exponent is None or abs(exponent) > MAX_EXPONENT:
                raise self.error("exponent tower is not a small integer")
        return Pow(base, exponent)

    def integer(self) -> int:
        sign = -1 if self.accept("-") else 1
        tok = self.next()
        if tok.kind != "num" or not tok.text.isdigit():
            raise self.error("exponents must be integer literals", tok)
        value = sign * int(tok.text)
        if abs(value) > MAX_EXPONENT:
            raise self.error(f"exponent {value} is too large", tok)
        return value

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            if tok.text.endswith("i"):
                return Num(complex(0, float(tok.text[:-1])))
            return Num(complex(float(tok.text)))
        if tok.kind == "name":
            self.next()
            return self.name(tok)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if self.accept("["):
            return self.bracket(tok)
        if tok.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok.text!r}")

    def name(self, tok: Token) -> Node:
        text = tok.text
        if text == "i":
            return Num(1j)
        if text in FUNCTIONS:
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(text, arg)
        m = re.fullmatch(r"z(\d*)", text)
        if m:
            index = int(m.group(1)) if m.group(1) else (1 if self.d == 1 else 0)
            if index < 1:
                raise self.error("use z1 ... zd to name variables", tok)
            if index > self.d:
                raise self.error(f"variable {text} exceeds dimension d={self.d}", tok)
            return Var(index)
        raise self.error(f"unknown identifier {text!r}", tok)

    def bracket(self, open_tok: Token) -> Node:
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        self.expect("]")
        if all(isinstance(x, Vector) for x in items):
            width = len(items[0].items)
            if any(len(x.items) != width for x in items) or width != len(items):
                raise self.error("matrix rows must form a square array", open_tok)
            return Matrix(tuple(x.items for x in items))
        if any(isinstance(x, (Vector, Matrix)) for x in items):
            raise self.error("vector entries must be scalars", open_tok)
        return Vector(tuple(items))


@dataclass(frozen=True)
class Expression:
    """A parsed expression in ``d`` variables."""

    root: Node
    d: int

    @property
    def tainted(self) -> bool:
        """True when the expression contains ``conj`` (non-holomorphic)."""
        return self.root.tainted

    @property
    def holomorphic(self) -> bool:
        return not self.tainted

    def __str__(self):
        return to_source(self.root)

    def value_shape(self) -> tuple[int, ...]:
        return shape_of(self.root)

    def space(self, seminorms=()) -> SpaceDescriptor:
        return SpaceDescriptor.for_shape(self.value_shape(), seminorms)

    def __call__(self, points) -> np.ndarray:
        return evaluate_array(self, points)

    def evaluate(self, z, space: SpaceDescriptor | None = None) -> VectorValue:
        return evaluate(self, z, space)

    def to_integrand(self, d: int | None = None, space: SpaceDescriptor | None = None):
        from .quadrature import Integrand

        if d is not None and d != self.d:
            raise DomainError(f"expression in {self.d} variables used where d={d}")
        space = space or self.space()
        return Integrand(lambda pts: evaluate_array(self, pts, space), self.d, space,
                         holomorphic=self.holomorphic, name=str(self))


def shape_of(node: Node) -> tuple[int, ...]:
    """Value shape of an AST without evaluating it: ``()``, ``(m,)`` or ``(m, m)``."""
    if isinstance(node, Vector):
        return (len(node.items),)
    if isinstance(node, Matrix):
        return (len(node.rows),) * 2
    if isinstance(node, (Neg, Pow, Call)):
        return shape_of(node.children()[0])
    if isinstance(node, BinOp):
        a, b = shape_of(node.left), shape_of(node.right)
        if node.op == "*" and len(a) == 2 and len(b) == 1:
            return b
        if node.op == "/":
            return a
        return a if len(a) >= len(b) else b
    return ()


def parse(src: str, d: int) -> Expression:
    """Parse ``src`` into an :class:`Expression` in ``d`` variables."""
    if d < 1:
        raise DomainError("dimension must be at least 1")
    if not isinstance(src, str) or not src.strip():
        raise ParseError("empty expression", 1, 1)
    return Expression(_Parser(src, d).parse(), d)


# ---------------------------------------------------------------------------
# vectorised evaluation


def _fail(message: str, pts: np.ndarray, mask) -> EvaluationError:
    idx = int(np.argmax(np.asarray(mask).reshape(len(pts), -1).any(axis=1)))
    point = tuple(complex(c) for c in pts[idx])
    return EvaluationError(f"{message} at {point}", point)


def _eval(node: Node, pts: np.ndarray) -> np.ndarray:
    n = len(pts)
    if isinstance(node, Num):
        return np.full(n, node.value, dtype=complex)
    if isinstance(node, Var):
        return pts[:, node.index - 1].astype(complex)
    if isinstance(node, Neg):
        return -_eval(node.arg, pts)
    if isinstance(node, BinOp):
        a, b = _eval(node.left, pts), _eval(node.right, pts)
        return _binop(node.op, a, b, pts)
    if isinstance(node, Pow):
        return _power(_eval(node.base, pts), node.exponent, pts)
    if isinstance(node, Call):
        return _call(node.name, _eval(node.arg, pts), pts)
    if isinstance(node, Vector):
        return np.stack([_scalar(_eval(x, pts)) for x in node.items], axis=-1)
    if isinstance(node, Matrix):
        return np.stack([np.stack([_scalar(_eval(x, pts)) for x in row], axis=-1) for row in node.rows], axis=-2)
    raise TypeError(f"not an expression node: {node!r}")


def _scalar(v: np.ndarray) -> np.ndarray:
    if v.ndim != 1:
        raise DomainError("vector and matrix entries must be scalar expressions")
    return v


def _expand(scalar: np.ndarray, other: np.ndarray) -> np.ndarray:
    return scalar.reshape(scalar.shape + (1,) * (other.ndim - 1))


def _binop(op: str, a: np.ndarray, b: np.ndarray, pts: np.ndarray) -> np.ndarray:
    if op in "+-":
        if a.ndim != b.ndim and a.ndim > 1 and b.ndim > 1:
            raise DomainError(f"cannot {'add' if op == '+' else 'subtract'} values of shapes {a.shape[1:]} and {b.shape[1:]}")
        if a.ndim == 1 and b.ndim > 1:
            a = _expand(a, b)
        if b.ndim == 1 and a.ndim > 1:
            b = _expand(b, a)
        if a.shape != b.shape:
            raise DomainError(f"shape mismatch {a.shape[1:]} vs {b.shape[1:]}")
        return a + b if op == "+" else a - b
    if op == "*":
        if a.ndim == 1 or b.ndim == 1:
            if a.ndim == 1:
                return _expand(a, b) * b
            return a * _expand(b, a)
        if a.ndim == 3 and b.ndim == 3:
            return np.matmul(a, b)
        if a.ndim == 3 and b.ndim == 2:
            return np.einsum("nij,nj->ni", a, b)
        raise DomainError(f"cannot multiply values of shapes {a.shape[1:]} and {b.shape[1:]}")
    if op == "/":
        if b.ndim != 1:
            raise DomainError("division is only defined by scalar expressions")
        small = np.abs(b) < MIN_DIVISOR
        if np.any(small):
            raise _fail("division by zero", pts, small)
        return a / _expand(b, a)
    raise DomainError(f"unknown operator {op!r}")


def _power(v: np.ndarray, k: int, pts: np.ndarray) -> np.ndarray:
    if v.ndim == 1:
        if k < 0:
            small = np.abs(v) < MIN_DIVISOR
            if np.any(small):
                raise _fail("negative power of zero", pts, small)
            return (1 / v) ** (-k)
        return v ** k
    if v.ndim == 3:
        if k < 0:
            det = np.abs(np.linalg.det(v))
            if np.any(det < MIN_DIVISOR):
                raise _fail("singular matrix raised to a negative power", pts, det < MIN_DIVISOR)
            return np.linalg.matrix_power(np.linalg.inv(v), -k)
        return np.linalg.matrix_power(v, k)
    raise DomainError("vectors cannot be raised to a power")


def _call(name: str, v: np.ndarray, pts: np.ndarray) -> np.ndarray:
    if name == "exp":
        return np.exp(v)
    if name == "sin":
        return np.sin(v)
    if name == "cos":
        return np.cos(v)
    if name == "sqrt":
        return np.sqrt(v)
    if name == "conj":
        return np.conj(v)
    if name == "log":
        small = np.abs(v) < MIN_DIVISOR
        if np.any(small):
            raise _fail("logarithm of zero", pts, small)
        return np.log(v)
    raise DomainError(f"unknown function {name!r}")


def evaluate_array(expr: Expression, points, space: SpaceDescriptor | None = None) -> np.ndarray:
    """Evaluate at an ``(n, d)`` array; returns ``(n,)`` or ``(n, *shape)``."""
    pts = as_points(points, expr.d)
    with np.errstate(all="ignore"):
        out = _eval(expr.root, pts)
    if space is not None:
        want = space.shape if space.shape != (1,) else ()
        if out.shape[1:] not in (want, space.shape):
            raise DomainError(f"expression has shape {out.shape[1:]} but the space is {space.describe()}")
    bad = ~np.isfinite(out)
    if np.any(bad):
        raise _fail("non-finite value", pts, bad)
    return out


def evaluate(expr: Expression, z, space: SpaceDescriptor | None = None) -> VectorValue:
    """Evaluate at one point."""
    z = CPoint.of(z)
    space = space or expr.space()
    return VectorValue(space, evaluate_array(expr, z.array()[None, :], space)[0])


# ---------------------------------------------------------------------------
# reference evaluator (independent, one point at a time, cmath only)


def evaluate_reference(expr: Expression, z) -> complex | list:
    """Direct recursive evaluation with Python complex numbers.

    Used as an independent check of :func:`evaluate_array`; vectors and
    matrices come back as (nested) lists.
    """
    coords = tuple(complex(c) for c in CPoint.of(z).coords)
    return _ref(expr.root, coords)


def _ref(node: Node, z):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return z[node.index - 1]
    if isinstance(node, Neg):
        return _ref_map(lambda x: -x, _ref(node.arg, z))
    if isinstance(node, BinOp):
        a, b = _ref(node.left, z), _ref(node.right, z)
        if node.op == "+":
            return _ref_zip(lambda x, y: x + y, a, b)
        if node.op == "-":
            return _ref_zip(lambda x, y: x - y, a, b)
        if node.op == "*":
            if isinstance(a, list) and isinstance(b, list):
                return _ref_matmul(a, b)
            return _ref_zip(lambda x, y: x * y, a, b)
        if isinstance(b, list) or abs(b) < MIN_DIVISOR:
            raise EvaluationError(f"division by zero at {z}", z)
        return _ref_map(lambda x: x / b, a)
    if isinstance(node, Pow):
        base = _ref(node.base, z)
        if isinstance(base, list):
            result = [[complex(i == j) for j in range(len(base))] for i in range(len(base))]
            for _ in range(abs(node.exponent)):
                result = _ref_matmul(result, base)
            if node.exponent < 0:
                result = np.linalg.inv(np.array(result)).tolist()
            return result
        if node.exponent < 0 and abs(base) < MIN_DIVISOR:
            raise EvaluationError(f"negative power of zero at {z}", z)
        out = complex(1)
        for _ in range(abs(node.exponent)):
            out *= base
        return 1 / out if node.exponent < 0 else out
    if isinstance(node, Call):
        fn = {"exp": cmath.exp, "sin": cmath.sin, "cos": cmath.cos, "sqrt": cmath.sqrt,
              "log": cmath.log, "conj": lambda x: x.conjugate()}[node.name]
        return _ref_map(fn, _ref(node.arg, z))
    if isinstance(node, Vector):
        return [_ref(x, z) for x in node.items]
    if isinstance(node, Matrix):
        return [[_ref(x, z) for x in row] for row in node.rows]
    raise TypeError(f"not an expression node: {node!r}")


def _ref_map(fn, a):
    if isinstance(a, list):
        return [_ref_map(fn, x) for x in a]
    return fn(a)


def _ref_zip(fn, a, b):
    if isinstance(a, list) and isinstance(b, list):
        return [_ref_zip(fn, x, y) for x, y in zip(a, b)]
    if isinstance(a, list):
        return [_ref_zip(fn, x, b) for x in a]
    if isinstance(b, list):
        return [_ref_zip(fn, a, y) for y in b]
    return fn(a, b)


def _ref_matmul(a, b):
    if b and not isinstance(b[0], list):
        return [sum(x * y for x, y in zip(row, b)) for row in a]
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


# ---------------------------------------------------------------------------
# polynomial export


def _coeff_source(c: complex) -> str:
    return f"({float(c.real)!r} + {float(c.imag)!r}i)"


def _scalar_poly(series, entry) -> str:
    terms = []
    for beta, coeff in series.items():
        c = complex(coeff[entry])
        if c == 0:
            continue
        factors = [_coeff_source(c)]
        for j, b in enumerate(beta.exponents):
            if b:
                w = series.center[j]
                base = f"z{j + 1}" if w == 0 else f"(z{j + 1} - {_coeff_source(w)})"
                factors.append(base if b == 1 else f"{base}^{b}")
        terms.append("*".join(factors))
    return " + ".join(terms) if terms else "0"


def polynomial_source(series, digits: int = 17) -> str:
    """Expression text for a truncated Taylor series (scalar, vector or matrix valued)."""
    shape = series.space.shape
    if shape == (1,):
        return _scalar_poly(series, (0,))
    if len(shape) == 1:
        return "[" + ", ".join(_scalar_poly(series, (i,)) for i in range(shape[0])) + "]"
    return "[" + ", ".join(
        "[" + ", ".join(_scalar_poly(series, (i, j)) for j in range(shape[1])) + "]"
        for i in range(shape[0])
    ) + "]"
