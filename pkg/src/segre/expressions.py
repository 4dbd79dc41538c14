"""Parsing of polynomial expressions and manifold definition files.

This is the only ingestion path of the engine.  The grammar covers integers,
the imaginary unit ``i``, named variables, ``+ - * / ^`` with the usual
precedence, unary minus, and parentheses; ``/`` is restricted to nonzero
constant divisors and ``^`` to nonnegative integer literal exponents, so
every expression denotes an exact polynomial.

Manifold files are JSON objects

    {"N": int, "d": int, "form": "graph" | "rho",
     "expressions": [str, ...], "split": [int, ...]?}

with graph-form expressions in the variables z1..zn, ch1..chn, ta1..tad and
rho-form expressions in Z1..ZN, ze1..zeN.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import linalg
from .coords import Dims
from .errors import GenericityError, ManifoldError, RealityError, SplitError
from .implicit import GraphForm, check_reality, ideal_member, solve_graph
from .series import (
    FormalMap,
    GaussianRational,
    TruncatedSeries,
    I,
)


class ParseError(ManifoldError):
    """Syntax or lookup failure while parsing an expression."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------------------
# tokenizer + recursive descent parser
# ---------------------------------------------------------------------------

_OPERATORS = set("+-*/^()")


def _tokenize(text: str) -> List[Tuple[str, Union[int, str], int]]:
    tokens: List[Tuple[str, Union[int, str], int]] = []
    pos = 0
    size = len(text)
    while pos < size:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch.isdigit():
            start = pos
            while pos < size and text[pos].isdigit():
                pos += 1
            tokens.append(("int", int(text[start:pos]), start))
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < size and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(("ident", text[start:pos], start))
            continue
        if ch in _OPERATORS:
            tokens.append(("op", ch, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(("end", "", size))
    return tokens


class _Parser:
    def __init__(self, tokens, table: Dict[str, int], arity: int, kappa: int):
        self.tokens = tokens
        self.index = 0
        self.table = table
        self.arity = arity
        self.kappa = kappa

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect_op(self, symbol: str):
        kind, value, pos = self.peek()
        if kind != "op" or value != symbol:
            raise ParseError(f"expected {symbol!r}", pos)
        return self.advance()

    def parse(self) -> TruncatedSeries:
        result = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("trailing input after expression", pos)
        return result

    def expr(self) -> TruncatedSeries:
        left = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                right = self.term()
                left = left + right if value == "+" else left - right
            else:
                return left

    def term(self) -> TruncatedSeries:
        left = self.unary()
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                right = self.unary()
                if value == "*":
                    left = left * right
                else:
                    divisor = right.constant_term()
                    if any(sum(e) > 0 for e in right.terms):
                        raise ParseError("division only by a nonzero constant", pos)
                    if not divisor:
                        raise ParseError("division by zero", pos)
                    left = left.scale(divisor.inverse())
            else:
                return left

    def unary(self) -> TruncatedSeries:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> TruncatedSeries:
        base = self.atom()
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value == "^":
                self.advance()
                kind, exponent, epos = self.peek()
                if kind != "int":
                    raise ParseError("exponent must be a nonnegative integer literal", epos)
                self.advance()
                base = base.power(exponent)
            else:
                return base

    def atom(self) -> TruncatedSeries:
        kind, value, pos = self.advance()
        if kind == "int":
            return TruncatedSeries.constant(self.arity, self.kappa, GaussianRational(value))
        if kind == "ident":
            if value == "i":
                return TruncatedSeries.constant(self.arity, self.kappa, I)
            index = self.table.get(value)
            if index is None:
                raise ParseError(f"unknown variable {value!r}", pos)
            return TruncatedSeries.variable(self.arity, self.kappa, index)
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {value!r}", pos)


def variable_table(names: Sequence[str]) -> Dict[str, int]:
    table = {name: index for index, name in enumerate(names)}
    if "i" in table:
        raise ValueError("'i' is reserved for the imaginary unit")
    return table


def parse_expression(
    text: str,
    table: Union[Dict[str, int], Sequence[str]],
    kappa: int,
    arity: Optional[int] = None,
) -> TruncatedSeries:
    """Parse a polynomial expression into an exact truncated series.

    ``table`` maps variable names to slot indices (or is a name list in slot
    order); ``arity`` defaults to the number of table entries.
    """
    if not isinstance(table, dict):
        table = variable_table(table)
    if arity is None:
        arity = (max(table.values()) + 1) if table else 0
    parser = _Parser(_tokenize(text), table, arity, kappa)
    return parser.parse()


# ---------------------------------------------------------------------------
# manifold specifications and loading
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManifoldSpec:
    """A manifold definition file: dimensions, form, and defining expressions."""

    N: int
    d: int
    form: str
    expressions: Tuple[str, ...]
    split: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.d < 1 or self.N <= self.d:
            raise ManifoldError(f"need N > d >= 1, got N={self.N}, d={self.d}")
        if self.form not in ("graph", "rho"):
            raise ManifoldError(f"form must be 'graph' or 'rho', got {self.form!r}")
        if len(self.expressions) != self.d:
            raise ManifoldError(f"need exactly d={self.d} expressions, got {len(self.expressions)}")
        if self.split is not None:
            if self.form != "rho":
                raise ManifoldError("a split declaration only applies to rho form")
            if len(set(self.split)) != self.d or not all(0 <= c < self.N for c in self.split):
                raise ManifoldError("split must list d distinct Z-coordinate indices")

    @staticmethod
    def from_json(data: dict) -> "ManifoldSpec":
        try:
            split = data.get("split")
            return ManifoldSpec(
                N=int(data["N"]),
                d=int(data["d"]),
                form=str(data["form"]),
                expressions=tuple(str(e) for e in data["expressions"]),
                split=tuple(int(c) for c in split) if split is not None else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifoldError(f"malformed manifold file: {exc}") from exc

    @staticmethod
    def from_file(path: Union[str, Path]) -> "ManifoldSpec":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ManifoldError(f"cannot read manifold file {path}: {exc}") from exc
        return ManifoldSpec.from_json(data)

    def to_json(self) -> dict:
        data = {"N": self.N, "d": self.d, "form": self.form, "expressions": list(self.expressions)}
        if self.split is not None:
            data["split"] = list(self.split)
        return data


@dataclass(frozen=True)
class GenericManifold:
    """A loaded formal generic manifold in solved graph coordinates.

    Carries both the graph form (Q, Qbar) and the canonical defining
    functions rho = w - Q in the ambient ring; ``w_columns`` records which
    raw Z-coordinates were renamed to w (the identity split for graph-form
    input).  ``source`` retains enough information to rebuild the manifold
    at a different truncation order.
    """

    dims: Dims
    kappa: int
    graph: GraphForm
    rho: FormalMap
    w_columns: Tuple[int, ...]
    source: Tuple
    label: str = "manifold"

    @property
    def N(self) -> int:
        return self.dims.N

    @property
    def d(self) -> int:
        return self.dims.d

    @property
    def n(self) -> int:
        return self.dims.n

    @property
    def Q(self) -> FormalMap:
        return self.graph.Q

    def ideal_member(self, g: TruncatedSeries) -> bool:
        return ideal_member(g, self.graph)

    def at_kappa(self, kappa: int, verify: bool = False) -> "GenericManifold":
        """The same manifold rebuilt at another truncation order.

        The load-time invariants were verified at the original order; by
        default the rebuild skips re-verifying them (they are identities in
        the same polynomial input, and the refined data is consumed by rank
        certification, which carries its own witnesses).  Pass verify=True
        to re-run the full load gate at the new order.
        """
        if kappa == self.kappa:
            return self
        kind = self.source[0]
        if kind == "spec":
            return load_manifold(self.source[1], kappa, label=self.label, verify=verify)
        _, form, components, split = self.source
        lifted = [c.with_order(kappa) for c in components]
        if form == "graph":
            return manifold_from_graph_series(
                self.dims, lifted, kappa, label=self.label, verify=verify
            )
        return manifold_from_rho_series(
            self.dims, lifted, kappa, split=split, label=self.label, verify=verify
        )

    def describe(self) -> str:
        return f"{self.label}: N={self.N} d={self.d} n={self.n} kappa={self.kappa}"


def _choose_w_columns(linear: List[List[GaussianRational]], dims: Dims) -> Tuple[int, ...]:
    """Lexicographically first d columns of the Z-differential forming an invertible minor."""
    for cols in combinations(range(dims.N), dims.d):
        minor = [[linear[j][c] for c in cols] for j in range(dims.d)]
        if linalg.rank(minor) == dims.d:
            return cols
    raise GenericityError("no invertible d x d minor among the Z-differentials at 0")


def _finish_load(
    dims: Dims,
    graph: GraphForm,
    rho: FormalMap,
    kappa: int,
    w_columns: Tuple[int, ...],
    source: Tuple,
    label: str,
    verify: bool = True,
) -> GenericManifold:
    if verify:
        ok, witness = check_reality(graph)
        if not ok:
            raise RealityError(
                f"defining ideal is not real: reality identity fails at {witness}", witness or ""
            )
        # mutual membership of the two generator families in the truncated ideal
        from .series import compose_many

        membership = graph.membership_map()
        for image in compose_many(list(rho.components), membership):
            if not image.is_zero():
                raise ManifoldError("rho generators do not lie in the graph ideal")
        for image in compose_many(list(graph.rho().components), membership):
            if not image.is_zero():
                raise ManifoldError("graph generators fail the membership test")
    linear = [
        [rho.component(j).coefficient(_unit(dims.ambient_arity, c)) for c in range(dims.N)]
        for j in range(dims.d)
    ]
    if linalg.rank(linear) != dims.d:
        raise GenericityError("rank of the Z-differentials at 0 is below d")
    return GenericManifold(dims, kappa, graph, rho, w_columns, source, label)


def manifold_from_graph_series(
    dims: Dims,
    q_components: Sequence[TruncatedSeries],
    kappa: int,
    label: str = "manifold",
    verify: bool = True,
) -> GenericManifold:
    """Build a manifold from already-parsed graph components Q_l(z, ch, ta)."""
    comps = []
    for q in q_components:
        if q.arity != dims.graph_arity:
            raise ManifoldError("graph components must live in the (z, ch, ta) ring")
        if q.constant_term():
            raise ManifoldError("the manifold must pass through the origin (Q has a constant term)")
        comps.append(q.truncate(min(q.kappa, kappa)).with_order(kappa))
    graph = GraphForm(dims, FormalMap(comps), kappa)
    rho = graph.rho()
    w_columns = tuple(range(dims.n, dims.N))
    source = ("series", "graph", tuple(q_components), None)
    return _finish_load(dims, graph, rho, kappa, w_columns, source, label, verify)


def manifold_from_rho_series(
    dims: Dims,
    raw_components: Sequence[TruncatedSeries],
    kappa: int,
    split: Optional[Sequence[int]] = None,
    label: str = "manifold",
    verify: bool = True,
) -> GenericManifold:
    """Build a manifold from defining functions in the raw (Z, ze) ring."""
    raw = []
    for component in raw_components:
        if component.arity != dims.ambient_arity:
            raise ManifoldError("rho components must live in the 2N-variable (Z, ze) ring")
        if component.constant_term():
            raise ManifoldError("the manifold must pass through the origin (rho has a constant term)")
        raw.append(component.truncate(min(component.kappa, kappa)).with_order(kappa))
    linear = [
        [raw[j].coefficient(_unit(dims.ambient_arity, c)) for c in range(dims.N)]
        for j in range(dims.d)
    ]
    if linalg.rank(linear) != dims.d:
        raise GenericityError("rank of the Z-differentials at 0 is below d")
    if split is not None:
        w_columns = tuple(sorted(int(c) for c in split))
        minor = [[linear[j][c] for c in w_columns] for j in range(dims.d)]
        if linalg.rank(minor) != dims.d:
            raise SplitError("declared split does not give an invertible w-differential")
    else:
        w_columns = _choose_w_columns(linear, dims)
    assignment = dims.raw_to_ambient(w_columns)
    rho = FormalMap([component.map_vars(dims.ambient_arity, assignment) for component in raw])
    graph = solve_graph(rho, dims, kappa)
    source = ("series", "rho", tuple(raw_components), w_columns)
    return _finish_load(dims, graph, rho, kappa, w_columns, source, label, verify)


def load_manifold(
    spec: ManifoldSpec, kappa: int, label: Optional[str] = None, verify: bool = True
) -> GenericManifold:
    """Parse a manifold specification and verify all load-time invariants.

    Raises GenericityError, RealityError, SplitError, or ParseError with the
    offending detail; a returned manifold has a verified real ideal, rank-d
    Z-differentials, and mutually consistent graph and rho generators.
    """
    dims = Dims(spec.N, spec.d)
    if kappa < 2:
        raise ManifoldError("truncation order must be at least 2")
    if label is None:
        label = "manifold"
    if spec.form == "graph":
        table = variable_table(dims.graph_names())
        components = [
            parse_expression(text, table, kappa, dims.graph_arity) for text in spec.expressions
        ]
        manifold = manifold_from_graph_series(dims, components, kappa, label=label, verify=verify)
    else:
        table = variable_table(dims.raw_names())
        components = [
            parse_expression(text, table, kappa, dims.ambient_arity) for text in spec.expressions
        ]
        manifold = manifold_from_rho_series(
            dims, components, kappa, split=spec.split, label=label, verify=verify
        )
    return GenericManifold(
        manifold.dims,
        manifold.kappa,
        manifold.graph,
        manifold.rho,
        manifold.w_columns,
        ("spec", spec),
        label,
    )


def load_manifold_file(path: Union[str, Path], kappa: int) -> GenericManifold:
    path = Path(path)
    spec = ManifoldSpec.from_file(path)
    return load_manifold(spec, kappa, label=path.stem)


def _unit(arity: int, index: int) -> Tuple[int, ...]:
    exp = [0] * arity
    exp[index] = 1
    return tuple(exp)
