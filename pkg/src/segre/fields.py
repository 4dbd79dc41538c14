"""Formal vector fields, Lie brackets, and the CR Lie-hull dimension.

A formal vector field on the ambient 2N-variable ring is stored as one
truncated coefficient series per variable.  The tangent basis attached to a
manifold in graph form consists of n fields along the conjugate directions
and n along the holomorphic directions; iterated brackets of these, evaluated
at the origin, span the same space as the full Lie algebra generated by all
tangent fields of the two types, because multiplying a field by a series only
rescales its value at 0.

Every bracket costs one order of truncation, so a word of length k in fields
with coefficients valid to order kappa - 1 is valid to order kappa - k; the
reported hull dimension is therefore a certified lower bound with an explicit
stability flag rather than a completeness claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InternalConsistencyError
from .expressions import GenericManifold
from .implicit import ideal_member
from .linalg import SpanTracker
from .series import GaussianRational, TruncatedSeries, grlex_key


class FormalVectorField:
    """A derivation of the truncated series ring: sum of coeff_i * d/dx_i."""

    __slots__ = ("arity", "coefficients", "valid_order")

    def __init__(self, coefficients: Sequence[TruncatedSeries], valid_order: Optional[int] = None):
        coeffs = tuple(coefficients)
        if not coeffs:
            raise ValueError("a vector field needs at least one coefficient")
        arity = len(coeffs)
        for c in coeffs:
            if c.arity != arity:
                raise ValueError("coefficient arities must equal the ambient arity")
        max_valid = min(c.kappa for c in coeffs)
        if valid_order is None:
            valid_order = max_valid
        if valid_order > max_valid:
            raise ValueError("valid_order exceeds the coefficients' truncation orders")
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "valid_order", valid_order)

    def __setattr__(self, name, value):
        raise AttributeError("FormalVectorField is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalVectorField):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __repr__(self) -> str:
        return f"FormalVectorField(arity={self.arity}, valid_order={self.valid_order})"

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def apply(self, f: TruncatedSeries) -> TruncatedSeries:
        """X(f) = sum coeff_i * df/dx_i, valid to min(valid_order, f.kappa - 1)."""
        if f.arity != self.arity:
            raise ValueError("series arity does not match the field")
        out = TruncatedSeries.zero(self.arity, min(self.valid_order, f.kappa - 1))
        for index, coeff in enumerate(self.coefficients):
            if coeff.is_zero():
                continue
            out = out + coeff * f.partial(index)
        return out

    def evaluate_at_origin(self) -> Tuple[GaussianRational, ...]:
        return tuple(c.constant_term() for c in self.coefficients)

    def truncate(self, order: int) -> "FormalVectorField":
        return FormalVectorField(
            [c.truncate(min(c.kappa, order)) for c in self.coefficients], valid_order=order
        )


def bracket(x: FormalVectorField, y: FormalVectorField) -> FormalVectorField:
    """Commutator [X, Y]; the result is valid one order lower than its arguments."""
    if x.arity != y.arity:
        raise ValueError("bracket of fields with different ambient arities")
    coeffs = [x.apply(b) - y.apply(a) for a, b in zip(x.coefficients, y.coefficients)]
    return FormalVectorField(coeffs)


def sigma_field(x: FormalVectorField, block: int) -> FormalVectorField:
    """Conjugation involution on fields: swap the coefficient blocks and apply sigma.

    Sends fields along the conjugate directions to fields along the
    holomorphic directions and back; an involution.
    """
    if x.arity != 2 * block:
        raise ValueError(f"sigma_field needs arity 2*{block}")
    swapped = [c.sigma(block) for c in x.coefficients]
    return FormalVectorField(swapped[block:] + swapped[:block])


def cr_basis(manifold: GenericManifold) -> Tuple[List[FormalVectorField], List[FormalVectorField]]:
    """The tangent basis (L_1..L_n, Lt_1..Lt_n) attached to the graph form.

        L_j  = d/dch_j + sum_l dQbar_l/dch_j (ch, z, w) d/dta_l
        Lt_j = d/dz_j  + sum_l dQ_l/dz_j (z, ch, ta)  d/dw_l

    Every returned field is checked to be tangent: applying it to each
    defining function lands in the truncated ideal.
    """
    dims = manifold.dims
    graph = manifold.graph
    arity = dims.ambient_arity
    kappa = manifold.kappa
    q_amb = graph.q_ambient()
    qbar_amb = graph.qbar_ambient()

    def zero():
        return TruncatedSeries.zero(arity, kappa - 1)

    fields_l: List[FormalVectorField] = []
    fields_lt: List[FormalVectorField] = []
    for j in range(dims.n):
        coeffs = [zero() for _ in range(arity)]
        coeffs[dims.ch(j)] = TruncatedSeries.constant(arity, kappa - 1, 1)
        for l in range(dims.d):
            coeffs[dims.ta(l)] = qbar_amb.component(l).partial(dims.ch(j))
        fields_l.append(FormalVectorField(coeffs))

        coeffs = [zero() for _ in range(arity)]
        coeffs[dims.z(j)] = TruncatedSeries.constant(arity, kappa - 1, 1)
        for l in range(dims.d):
            coeffs[dims.w(l)] = q_amb.component(l).partial(dims.z(j))
        fields_lt.append(FormalVectorField(coeffs))

    for name, field in [(f"L{j + 1}", f) for j, f in enumerate(fields_l)] + [
        (f"Lt{j + 1}", f) for j, f in enumerate(fields_lt)
    ]:
        for l in range(dims.d):
            if not ideal_member(field.apply(manifold.rho.component(l)), graph):
                raise InternalConsistencyError(f"basis field {name} is not tangent to the manifold")
    return fields_l, fields_lt


@dataclass(frozen=True)
class LieHullReport:
    """Certified lower bound on the dimension of the tangent Lie hull at 0."""

    dim_g0: int
    bracket_depth_used: int
    basis_witnesses: Tuple[Tuple[str, Tuple[GaussianRational, ...]], ...]
    stable: bool
    depth_capped: bool
    cap: int

    def finite_type(self) -> bool:
        return self.dim_g0 == self.cap


class _SparseSpan:
    """Exact span of vector fields over the constants, keyed by (slot, exponent).

    Used only to prune bracket words that are constant-linear combinations of
    words already kept; dropping such a word never loses evaluation span at
    any visible truncation order.
    """

    def __init__(self):
        self._rows: List[Tuple[Tuple, Dict]] = []

    @staticmethod
    def _vector(field: FormalVectorField) -> Dict:
        vec = {}
        for slot, coeff in enumerate(field.coefficients):
            for exp, value in coeff.terms.items():
                vec[(slot, exp)] = value
        return vec

    @staticmethod
    def _key(item) -> Tuple:
        slot, exp = item
        return (grlex_key(exp), slot)

    def add(self, field: FormalVectorField) -> bool:
        """Reduce mod the stored rows at the field's own order; True if independent."""
        order = field.valid_order
        vec = self._vector(field)
        for pivot, row in self._rows:
            factor = vec.get(pivot)
            if factor is None or not factor:
                continue
            for key, value in row.items():
                new = vec.get(key, None)
                new = (new - factor * value) if new is not None else -factor * value
                if new:
                    vec[key] = new
                else:
                    vec.pop(key, None)
        vec = {k: v for k, v in vec.items() if sum(k[1]) <= order}
        if not vec:
            return False
        pivot = min(vec, key=self._key)
        inv = vec[pivot].inverse()
        normalized = {k: v * inv for k, v in vec.items()}
        self._rows.append((pivot, normalized))
        return True


def lie_hull_dimension(manifold: GenericManifold, max_depth: Optional[int] = None) -> LieHullReport:
    """Breadth-first closure over left-normed bracket words of the CR basis.

    Words are explored by length; each new word is reduced against the span
    of all previously kept words (over constants) and dropped if dependent.
    The search stops early once the evaluations at 0 span the full tangent
    dimension 2N - d, or when no new word survives.
    """
    dims = manifold.dims
    cap = 2 * dims.N - dims.d
    depth_supported = manifold.kappa
    if max_depth is None:
        max_depth = manifold.kappa
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    depth_capped = max_depth > depth_supported
    depth = min(max_depth, depth_supported)

    fields_l, fields_lt = cr_basis(manifold)
    generators = [(f"L{j + 1}", f) for j, f in enumerate(fields_l)]
    generators += [(f"Lt{j + 1}", f) for j, f in enumerate(fields_lt)]

    tracker = SpanTracker(dims.ambient_arity)
    field_span = _SparseSpan()
    witnesses: List[Tuple[str, Tuple[GaussianRational, ...]]] = []
    frontier: List[Tuple[str, FormalVectorField]] = []
    grew_last = False
    depth_used = 0

    def absorb(name: str, field: FormalVectorField) -> bool:
        value = field.evaluate_at_origin()
        if tracker.add(list(value)):
            witnesses.append((name, value))
            return True
        return False

    for name, field in generators:
        if field_span.add(field):
            frontier.append((name, field))
            grew_last = absorb(name, field) or grew_last
    depth_used = 1

    for current_depth in range(2, depth + 1):
        if tracker.rank >= cap or not frontier:
            break
        grew_last = False
        next_frontier: List[Tuple[str, FormalVectorField]] = []
        for gen_name, gen_field in generators:
            for word_name, word_field in frontier:
                candidate = bracket(gen_field, word_field)
                if candidate.is_zero():
                    continue
                if not field_span.add(candidate):
                    continue
                name = f"[{gen_name},{word_name}]"
                next_frontier.append((name, candidate))
                if absorb(name, candidate):
                    grew_last = True
                    if tracker.rank >= cap:
                        break
            if tracker.rank >= cap:
                break
        frontier = next_frontier
        depth_used = current_depth
        if tracker.rank >= cap:
            break

    stable = tracker.rank >= cap or not frontier or not grew_last
    if tracker.rank > cap:
        raise InternalConsistencyError("Lie hull dimension exceeded the tangent dimension")
    return LieHullReport(
        dim_g0=tracker.rank,
        bracket_depth_used=depth_used,
        basis_witnesses=tuple(witnesses),
        stable=stable,
        depth_capped=depth_capped,
        cap=cap,
    )
