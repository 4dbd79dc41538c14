"""Exact sparse truncated multivariate power series over the Gaussian rationals.

A series is stored as a dictionary mapping exponent tuples to nonzero
``GaussianRational`` coefficients, together with the number of variables
(``arity``) and a truncation order ``kappa``: the series is an element of
the quotient of the power series ring by all terms of total degree > kappa.
Truncation at a lower order is a ring homomorphism, which is what makes
"nonzero coefficient below the truncation order" a sound certificate for
nonvanishing of the untruncated object.

  exponent = (e_1, ..., e_p)     one nonnegative int per variable
  terms    = {exponent: coeff}   zero coefficients are never stored

Every operation returns a new value; nothing is mutated after construction,
so series and maps can be shared freely.

Order bookkeeping follows three rules:
  * add/mul take the minimum kappa of their operands,
  * composition takes the minimum kappa over the outer series and all
    components of the inner map (which must vanish at the origin),
  * partial differentiation lowers kappa by one (the derivative of an
    unknown degree-(kappa+1) tail pollutes degree kappa).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Tuple, Union

Exponent = Tuple[int, ...]


class SeriesError(ValueError):
    """Structural misuse of series operations (arity mismatches and the like)."""


class CompositionError(SeriesError):
    """Substitution into a power series requires inner components without constant term."""


RationalLike = Union[int, Fraction]


def _fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


@dataclass(frozen=True)
class GaussianRational:
    """A complex number with exact rational real and imaginary parts.

    ``fractions.Fraction`` keeps both parts in lowest terms with positive
    denominators, so the field axioms hold exactly; there is no rounding
    anywhere in the engine.
    """

    re: Fraction
    im: Fraction

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        object.__setattr__(self, "re", _fraction(re))
        object.__setattr__(self, "im", _fraction(im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def inverse(self) -> "GaussianRational":
        return ONE / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __pow__(self, exponent: int) -> "GaussianRational":
        if exponent < 0:
            return ONE / (self ** (-exponent))
        result = ONE
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{_imag_str(abs(self.im))}"

    def __repr__(self) -> str:
        return f"GaussianRational({self.re!r}, {self.im!r})"


def _imag_str(im: Fraction) -> str:
    if im == 1:
        return "i"
    if im == -1:
        return "-i"
    return f"{im}*i"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def gauss(re: RationalLike = 0, im: RationalLike = 0) -> GaussianRational:
    """Convenience constructor: gauss(2), gauss(0, 1) == i, gauss(Fraction(1, 2))."""
    return GaussianRational(re, im)


CoeffLike = Union[GaussianRational, Fraction, int]


def as_coeff(value: CoeffLike) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    return GaussianRational(_fraction(value))


def grlex_key(exponent: Exponent) -> Tuple[int, Exponent]:
    """Graded-lexicographic sort key: total degree first, then the tuple itself."""
    return (sum(exponent), exponent)


class TruncatedSeries:
    """An element of C[[x_1..x_p]] carried modulo total degree > kappa."""

    __slots__ = ("arity", "kappa", "terms", "_hash")

    def __init__(self, arity: int, kappa: int, terms: Optional[Mapping[Exponent, CoeffLike]] = None):
        if arity < 0:
            raise SeriesError("arity must be nonnegative")
        if kappa < 0:
            raise SeriesError("truncation order must be nonnegative")
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "kappa", kappa)
        clean: dict = {}
        if terms:
            for exp, raw in terms.items():
                exp = tuple(exp)
                if len(exp) != arity:
                    raise SeriesError(f"exponent {exp} does not match arity {arity}")
                if any(e < 0 for e in exp):
                    raise SeriesError(f"negative exponent in {exp}")
                if sum(exp) > kappa:
                    continue
                coeff = as_coeff(raw)
                if coeff:
                    clean[exp] = coeff
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(arity: int, kappa: int) -> "TruncatedSeries":
        return TruncatedSeries(arity, kappa)

    @staticmethod
    def constant(arity: int, kappa: int, value: CoeffLike) -> "TruncatedSeries":
        return TruncatedSeries(arity, kappa, {(0,) * arity: as_coeff(value)})

    @staticmethod
    def variable(arity: int, kappa: int, index: int) -> "TruncatedSeries":
        if not 0 <= index < arity:
            raise SeriesError(f"variable index {index} out of range for arity {arity}")
        exp = [0] * arity
        exp[index] = 1
        return TruncatedSeries(arity, kappa, {tuple(exp): ONE})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * self.arity, ZERO)

    def coefficient(self, exponent: Exponent) -> GaussianRational:
        return self.terms.get(tuple(exponent), ZERO)

    def degree(self) -> int:
        """Total degree of the stored representative (0 for the zero series)."""
        return max((sum(e) for e in self.terms), default=0)

    def order(self) -> Optional[int]:
        """Lowest total degree of a stored term, or None for the zero series."""
        return min((sum(e) for e in self.terms), default=None)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda item: grlex_key(item[0]))

    def leading_term(self) -> Tuple[Exponent, GaussianRational]:
        """Graded-lex-first nonzero term; raises on the zero series."""
        if not self.terms:
            raise SeriesError("zero series has no leading term")
        exp = min(self.terms, key=grlex_key)
        return exp, self.terms[exp]

    def homogeneous_part(self, degree: int) -> "TruncatedSeries":
        part = {e: c for e, c in self.terms.items() if sum(e) == degree}
        return TruncatedSeries(self.arity, self.kappa, part)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.arity == other.arity
            and self.kappa == other.kappa
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            items = tuple(self.sorted_terms())
            object.__setattr__(self, "_hash", hash((self.arity, self.kappa, items)))
        return self._hash

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.to_text()!r}, kappa={self.kappa})"

    # -- ring operations ---------------------------------------------------

    def _require_same_arity(self, other: "TruncatedSeries") -> None:
        if self.arity != other.arity:
            raise SeriesError(f"arity mismatch: {self.arity} vs {other.arity}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._require_same_arity(other)
        kappa = min(self.kappa, other.kappa)
        out = dict(self.terms)
        for exp, coeff in other.terms.items():
            new = out.get(exp, ZERO) + coeff
            if new:
                out[exp] = new
            else:
                out.pop(exp, None)
        return TruncatedSeries(self.arity, kappa, out)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.arity, self.kappa, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def scale(self, value: CoeffLike) -> "TruncatedSeries":
        coeff = as_coeff(value)
        if not coeff:
            return TruncatedSeries.zero(self.arity, self.kappa)
        return TruncatedSeries(self.arity, self.kappa, {e: c * coeff for e, c in self.terms.items()})

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._require_same_arity(other)
        kappa = min(self.kappa, other.kappa)
        if not self.terms or not other.terms:
            return TruncatedSeries.zero(self.arity, kappa)
        # iterate in degree order so overflowing pairs cut whole suffixes
        a_items = sorted(((sum(e), e, c) for e, c in self.terms.items()), key=lambda t: t[0])
        b_items = sorted(((sum(e), e, c) for e, c in other.terms.items()), key=lambda t: t[0])
        b_min = b_items[0][0]
        out: dict = {}
        for da, ea, ca in a_items:
            if da + b_min > kappa:
                break
            for db, eb, cb in b_items:
                if da + db > kappa:
                    break
                exp = tuple(x + y for x, y in zip(ea, eb))
                new = out.get(exp, ZERO) + ca * cb
                if new:
                    out[exp] = new
                else:
                    del out[exp]
        return TruncatedSeries(self.arity, kappa, out)

    def power(self, exponent: int) -> "TruncatedSeries":
        if exponent < 0:
            raise SeriesError("negative power of a series")
        result = TruncatedSeries.constant(self.arity, self.kappa, ONE)
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def truncate(self, kappa: int) -> "TruncatedSeries":
        """Image in the quotient at a lower (or equal) order."""
        if kappa > self.kappa:
            raise SeriesError(f"cannot raise truncation order {self.kappa} to {kappa}; use with_order")
        if kappa == self.kappa:
            return self
        return TruncatedSeries(self.arity, kappa, self.terms)

    def with_order(self, kappa: int) -> "TruncatedSeries":
        """Reinterpret at an arbitrary order.

        Raising the order asserts that the stored terms are the exact,
        untruncated object (true for parsed polynomial input and anything
        derived from it without truncation loss); the caller owns that claim.
        """
        if kappa <= self.kappa:
            return self.truncate(kappa)
        return TruncatedSeries(self.arity, kappa, self.terms)

    # -- calculus ----------------------------------------------------------

    def partial(self, index: int) -> "TruncatedSeries":
        """Formal partial derivative; the result is valid one order lower."""
        if not 0 <= index < self.arity:
            raise SeriesError(f"variable index {index} out of range for arity {self.arity}")
        if self.kappa == 0:
            raise SeriesError("cannot differentiate a series carried only to order 0")
        out: dict = {}
        for exp, coeff in self.terms.items():
            k = exp[index]
            if not k:
                continue
            new_exp = exp[:index] + (k - 1,) + exp[index + 1 :]
            out[new_exp] = coeff * GaussianRational(k)
        return TruncatedSeries(self.arity, self.kappa - 1, out)

    def evaluate(self, point: Sequence[CoeffLike]) -> GaussianRational:
        """Exact evaluation of the truncated polynomial representative."""
        if len(point) != self.arity:
            raise SeriesError(f"point length {len(point)} does not match arity {self.arity}")
        values = [as_coeff(v) for v in point]
        power_cache: dict = {}

        def var_power(index: int, exponent: int) -> GaussianRational:
            key = (index, exponent)
            cached = power_cache.get(key)
            if cached is None:
                cached = values[index] ** exponent
                power_cache[key] = cached
            return cached

        total = ZERO
        for exp, coeff in self.terms.items():
            term = coeff
            for index, e in enumerate(exp):
                if e:
                    term = term * var_power(index, e)
            total = total + term
        return total

    # -- structural maps ---------------------------------------------------

    def map_coefficients(self, fn: Callable[[GaussianRational], GaussianRational]) -> "TruncatedSeries":
        return TruncatedSeries(self.arity, self.kappa, {e: fn(c) for e, c in self.terms.items()})

    def conjugate(self) -> "TruncatedSeries":
        """Coefficientwise complex conjugation (no variable change)."""
        return self.map_coefficients(lambda c: c.conjugate())

    def sigma(self, block: int) -> "TruncatedSeries":
        """Conjugate every coefficient and swap the two declared variable blocks.

        ``block`` is the size of each half; the arity must equal 2*block.
        An involution: sigma(sigma(f), block) == f.
        """
        if block is None:
            raise SeriesError("sigma requires the block split")
        if self.arity != 2 * block:
            raise SeriesError(f"sigma needs arity 2*{block}, got {self.arity}")
        out = {}
        for exp, coeff in self.terms.items():
            out[exp[block:] + exp[:block]] = coeff.conjugate()
        return TruncatedSeries(self.arity, self.kappa, out)

    def map_vars(self, target_arity: int, assignment: Sequence[Optional[int]]) -> "TruncatedSeries":
        """Monomial substitution x_i -> y_{assignment[i]}, or 0 when assignment[i] is None.

        Distinct source variables may land on the same target (their
        exponents add), which implements diagonal identifications exactly.
        """
        if len(assignment) != self.arity:
            raise SeriesError("assignment length must match arity")
        for target in assignment:
            if target is not None and not 0 <= target < target_arity:
                raise SeriesError(f"target index {target} out of range")
        out: dict = {}
        for exp, coeff in self.terms.items():
            new = [0] * target_arity
            dead = False
            for e, target in zip(exp, assignment):
                if not e:
                    continue
                if target is None:
                    dead = True
                    break
                new[target] += e
            if dead:
                continue
            key = tuple(new)
            acc = out.get(key, ZERO) + coeff
            if acc:
                out[key] = acc
            else:
                del out[key]
        return TruncatedSeries(target_arity, self.kappa, out)

    def extend(self, target_arity: int) -> "TruncatedSeries":
        """Embed into a ring with extra trailing variables."""
        if target_arity < self.arity:
            raise SeriesError("extend cannot shrink the arity")
        if target_arity == self.arity:
            return self
        pad = (0,) * (target_arity - self.arity)
        return TruncatedSeries(target_arity, self.kappa, {e + pad: c for e, c in self.terms.items()})

    def compose(self, inner: "FormalMap") -> "TruncatedSeries":
        """Substitute the components of ``inner`` for the variables of this series.

        Requires every inner component to vanish at the origin; the result
        is exact modulo degree > min(self.kappa, inner component kappas).
        """
        return compose_many([self], inner)[0]

    # -- canonical text ----------------------------------------------------

    def to_text(self, names: Optional[Sequence[str]] = None) -> str:
        """Canonical text form: graded-lex term order, exact coefficients.

        The output reparses to an equal series under the expression grammar
        (with the same variable table).
        """
        if names is None:
            names = [f"x{i + 1}" for i in range(self.arity)]
        elif len(names) != self.arity:
            raise SeriesError("name table length must match arity")
        if not self.terms:
            return "0"
        pieces = []
        for exp, coeff in self.sorted_terms():
            mono = "*".join(
                f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(exp) if e
            )
            text, negative = _coeff_factor(coeff, bool(mono))
            if mono:
                body = mono if text == "" else f"{text}*{mono}"
            else:
                body = text
            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(pieces)


def _rat_text(value: Fraction) -> str:
    return str(value)


def _coeff_factor(coeff: GaussianRational, has_monomial: bool) -> Tuple[str, bool]:
    """Render a coefficient as a factor; returns (text, sign_extracted).

    The empty text means the factor 1 (only emitted in front of a monomial).
    Mixed real+imaginary coefficients are parenthesized and never have their
    sign extracted.
    """
    if coeff.re and coeff.im:
        return f"({coeff})", False
    if coeff.im:
        mag = abs(coeff.im)
        negative = coeff.im < 0
        text = "i" if mag == 1 else f"{_rat_text(mag)}*i"
        return text, negative
    mag = abs(coeff.re)
    negative = coeff.re < 0
    if mag == 1 and has_monomial:
        return "", negative
    return _rat_text(mag), negative


class FormalMap:
    """A tuple of series with declared source and target arities.

    Models a formal mapping (C^p, 0) -> (C^m, .); when ``vanishes_at_origin``
    is set every component has zero constant term and the map may be used as
    the inner map of a composition.
    """

    __slots__ = ("source_arity", "target_arity", "components", "vanishes_at_origin")

    def __init__(self, components: Iterable[TruncatedSeries], vanishes_at_origin: bool = True):
        comps = tuple(components)
        if not comps:
            raise SeriesError("a formal map needs at least one component")
        arity = comps[0].arity
        for comp in comps:
            if comp.arity != arity:
                raise SeriesError("all components must share the source arity")
        if vanishes_at_origin:
            for comp in comps:
                if comp.constant_term():
                    raise SeriesError("component has nonzero constant term but the map is declared to vanish at 0")
        object.__setattr__(self, "source_arity", arity)
        object.__setattr__(self, "target_arity", len(comps))
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "vanishes_at_origin", vanishes_at_origin)

    def __setattr__(self, name, value):
        raise AttributeError("FormalMap is immutable")

    @staticmethod
    def identity(arity: int, kappa: int) -> "FormalMap":
        return FormalMap(TruncatedSeries.variable(arity, kappa, i) for i in range(arity))

    @property
    def kappa(self) -> int:
        return min(c.kappa for c in self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalMap):
            return NotImplemented
        return self.components == other.components

    def __repr__(self) -> str:
        return f"FormalMap({self.source_arity}->{self.target_arity}, kappa={self.kappa})"

    def __iter__(self):
        return iter(self.components)

    def component(self, index: int) -> TruncatedSeries:
        return self.components[index]

    def conjugate(self) -> "FormalMap":
        """Coefficientwise conjugation of every component (no variable swap)."""
        return FormalMap((c.conjugate() for c in self.components), self.vanishes_at_origin)

    def compose(self, inner: "FormalMap") -> "FormalMap":
        return FormalMap(
            compose_many(list(self.components), inner),
            vanishes_at_origin=self.vanishes_at_origin,
        )

    def map_vars(self, target_arity: int, assignment: Sequence[Optional[int]]) -> "FormalMap":
        return FormalMap(
            (c.map_vars(target_arity, assignment) for c in self.components),
            vanishes_at_origin=self.vanishes_at_origin,
        )

    def extend(self, target_arity: int) -> "FormalMap":
        return FormalMap((c.extend(target_arity) for c in self.components), self.vanishes_at_origin)

    def truncate(self, kappa: int) -> "FormalMap":
        return FormalMap((c.truncate(min(kappa, c.kappa)) for c in self.components), self.vanishes_at_origin)

    def evaluate(self, point: Sequence[CoeffLike]) -> list:
        return [c.evaluate(point) for c in self.components]

    def equals_mod(self, other: "FormalMap") -> bool:
        """Componentwise equality after truncating both sides to the shared order."""
        if self.target_arity != other.target_arity or self.source_arity != other.source_arity:
            return False
        return all(series_match(a, b) for a, b in zip(self.components, other.components))


def series_match(a: TruncatedSeries, b: TruncatedSeries) -> bool:
    """Equality in the quotient at the shared (minimum) truncation order."""
    if a.arity != b.arity:
        return False
    kappa = min(a.kappa, b.kappa)
    return a.truncate(kappa).terms == b.truncate(kappa).terms


def compose_many(
    outers: Sequence[TruncatedSeries], inner: "FormalMap"
) -> list:
    """Compose several series with one inner map, sharing all partial products.

    Monomial substitution values are memoized across all outer series: each
    distinct monomial of any outer costs one series multiplication on top of
    a previously computed sub-monomial.  Results carry per-outer truncation
    orders; sharing at the maximum order and truncating afterwards is sound
    because truncation is a quotient homomorphism.
    """
    if not outers:
        return []
    arity = outers[0].arity
    for outer in outers:
        if outer.arity != arity:
            raise SeriesError("outer series must share one ring")
    if inner.target_arity != arity:
        raise SeriesError(
            f"series in {arity} variables composed with map into {inner.target_arity}"
        )
    for comp in inner.components:
        if comp.constant_term():
            raise CompositionError("inner map has a component with nonzero constant term")
    inner_kappa = min(c.kappa for c in inner.components)
    cache_kappa = min(max(outer.kappa for outer in outers), inner_kappa)
    source = inner.source_arity
    components = [c.truncate(min(cache_kappa, c.kappa)) for c in inner.components]
    memo: dict = {(0,) * arity: TruncatedSeries.constant(source, cache_kappa, ONE)}

    def monomial_value(exp: Exponent) -> TruncatedSeries:
        cached = memo.get(exp)
        if cached is not None:
            return cached
        last = max(i for i, e in enumerate(exp) if e)
        parent = exp[:last] + (exp[last] - 1,) + exp[last + 1 :]
        value = monomial_value(parent) * components[last]
        memo[exp] = value
        return value

    results = []
    for outer in outers:
        kappa = min(outer.kappa, inner_kappa)
        accumulator: dict = {}
        for exp, coeff in outer.terms.items():
            if sum(exp) > kappa:
                continue
            for mono, value in monomial_value(exp).terms.items():
                new = accumulator.get(mono, ZERO) + coeff * value
                if new:
                    accumulator[mono] = new
                else:
                    del accumulator[mono]
        results.append(TruncatedSeries(source, kappa, accumulator))
    return results
