"""Iterated Segre mappings and their companion parametrizations.

Everything here uses the graph-special convention: the mapping gamma sends
(zeta, t) to (t, Q(t, zeta)), so the z-part of the j-th iterate is the last
block of t-variables.  Iterates are built by exact truncated composition,

    v^1(t^1)              = gamma(0, t^1)
    v^(j+1)(t^1..t^(j+1)) = gamma(conj(v^j)(t^1..t^j), t^(j+1)),

where conj conjugates coefficients only.  Two collapse identities pin the
argument convention and are re-verified on every constructed iterate: setting
the first block to zero drops the iterate by one, and identifying the last
block with the (j-2)-nd drops it by two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import linalg
from .errors import InternalConsistencyError, SegreError
from .expressions import GenericManifold
from .fields import FormalVectorField
from .implicit import GraphForm
from .series import FormalMap, TruncatedSeries, compose_many, series_match


class VariableCapError(SegreError):
    """An iterate would exceed the configured bound on source variables."""


class SegreMapping:
    """The graph-special Segre variety mapping of a manifold, with iterate cache."""

    convention = "graph-special"

    def __init__(self, manifold: GenericManifold, var_cap: Optional[int] = None):
        dims = manifold.dims
        self.dims = dims
        self.manifold = manifold
        self.graph: GraphForm = manifold.graph
        self.kappa = manifold.kappa
        if var_cap is None:
            var_cap = 4 * (dims.d + 1) * dims.n
        self.var_cap = var_cap
        self.gamma = self._build_gamma()
        self._cache: Dict[int, FormalMap] = {}

    def _build_gamma(self) -> FormalMap:
        """gamma(zeta, t) = (t, Q(t, zeta)) in the (ch, ta, t) source ring."""
        dims = self.dims
        arity = dims.N + dims.n
        kappa = self.kappa
        chs = [TruncatedSeries.variable(arity, kappa, i) for i in range(dims.n)]
        tas = [TruncatedSeries.variable(arity, kappa, dims.n + l) for l in range(dims.d)]
        ts = [TruncatedSeries.variable(arity, kappa, dims.N + i) for i in range(dims.n)]
        w_part = self.graph.q_of(ts, chs, tas)
        gamma = FormalMap([*ts, *w_part])
        # defining identity rho(gamma(zeta, t), zeta) = 0 and full t-rank at 0
        inner = FormalMap([*ts, *w_part, *chs, *tas])
        for image in compose_many(list(self.manifold.rho.components), inner):
            if not image.is_zero():
                raise InternalConsistencyError("gamma does not annihilate the defining functions")
        jac = [
            [component.coefficient(_unit(arity, dims.N + i)) for i in range(dims.n)]
            for component in gamma.components
        ]
        if linalg.rank(jac) != dims.n:
            raise InternalConsistencyError("gamma has deficient t-rank at 0")
        return gamma

    def v(self, j: int) -> FormalMap:
        """The j-th iterate as a map from j blocks of t-variables into Z-space."""
        if j < 1:
            raise SegreError("iterated Segre mappings start at j = 1")
        if j * self.dims.n > self.var_cap:
            raise VariableCapError(
                f"iterate {j} needs {j * self.dims.n} variables, cap is {self.var_cap}"
            )
        cached = self._cache.get(j)
        if cached is not None:
            return cached
        dims = self.dims
        kappa = self.kappa
        if j == 1:
            arity = dims.n
            ts = [TruncatedSeries.variable(arity, kappa, i) for i in range(dims.n)]
            zeros = [TruncatedSeries.zero(arity, kappa) for _ in range(dims.n)]
            zerosd = [TruncatedSeries.zero(arity, kappa) for _ in range(dims.d)]
            result = FormalMap([*ts, *self.graph.q_of(ts, zeros, zerosd)])
        else:
            previous = self.v(j - 1)
            arity = j * dims.n
            prev_bar = previous.conjugate().extend(arity)
            ts = [
                TruncatedSeries.variable(arity, kappa, (j - 1) * dims.n + i)
                for i in range(dims.n)
            ]
            chi = [prev_bar.component(i) for i in range(dims.n)]
            tau = [prev_bar.component(dims.n + l) for l in range(dims.d)]
            result = FormalMap([*ts, *self.graph.q_of(ts, chi, tau)])
        self._cache[j] = result
        return result

    def v_bar(self, j: int) -> FormalMap:
        return self.v(j).conjugate()


def make_gamma(manifold: GenericManifold, var_cap: Optional[int] = None) -> SegreMapping:
    return SegreMapping(manifold, var_cap=var_cap)


@dataclass(frozen=True)
class IteratedSegre:
    """The j-th iterated Segre mapping with its verified structure.

    ``mapping`` has j*n source variables and N components; the z-part equals
    the last t-block identically, ``nu`` is the w-part.
    """

    j: int
    mapping: FormalMap
    nu: FormalMap


def iterate(gamma: SegreMapping, j: int) -> IteratedSegre:
    """Build v^j and verify its structural identities exactly.

    Checks, as series identities modulo truncation: the z-part is the last
    block of variables, killing the first block drops the iterate by one,
    and identifying the last block with block j-2 drops it by two.
    """
    dims = gamma.dims
    mapping = gamma.v(j)
    arity = j * dims.n
    for i in range(dims.n):
        expected = TruncatedSeries.variable(arity, gamma.kappa, (j - 1) * dims.n + i)
        if not series_match(mapping.component(i), expected):
            raise InternalConsistencyError("z-part of the iterate is not the last t-block")
    if j >= 2:
        collapsed = mapping.map_vars(
            (j - 1) * dims.n,
            _assignment_drop_first(dims.n, j),
        )
        if not collapsed.equals_mod(gamma.v(j - 1)):
            raise InternalConsistencyError("zero-first-block collapse identity failed")
    if j >= 3:
        reflected = mapping.map_vars(
            (j - 1) * dims.n,
            _assignment_fold_last(dims.n, j),
        )
        if not reflected.equals_mod(gamma.v(j - 2).extend((j - 1) * dims.n)):
            raise InternalConsistencyError("reflection collapse identity failed")
    nu = FormalMap(mapping.components[dims.n :])
    return IteratedSegre(j, mapping, nu)


def _assignment_drop_first(n: int, j: int) -> List[Optional[int]]:
    """t^1 -> 0, t^b -> t^(b-1): source j blocks, target j-1 blocks."""
    assignment: List[Optional[int]] = [None] * n
    for b in range(1, j):
        assignment.extend(range((b - 1) * n, b * n))
    return assignment

def _assignment_fold_last(n: int, j: int) -> List[Optional[int]]:
    """t^j -> t^(j-2), other blocks fixed: source j blocks, target j-1 blocks."""
    assignment: List[Optional[int]] = []
    for b in range(1, j):
        assignment.extend(range((b - 1) * n, b * n))
    assignment.extend(range((j - 3) * n, (j - 2) * n))
    return assignment


@dataclass(frozen=True)
class SegreManifoldParam:
    """Parametrization of the k-fold chain manifold, with its generator pairs.

    ``mapping`` sends k blocks of t-variables to k blocks of Z-sized
    coordinates; ``generator_pairs`` lists the (Z-side, zeta-side) chain-slot
    indices whose defining-function compositions were verified to vanish
    (None denotes the zero slot closing the chain).
    """

    k: int
    mapping: FormalMap
    generator_pairs: Tuple[Tuple[Optional[int], Optional[int]], ...]


def chain_generator_pairs(k: int) -> Tuple[Tuple[Optional[int], Optional[int]], ...]:
    """Slot pairs receiving the defining functions along the k-fold chain."""
    pairs: List[Tuple[Optional[int], Optional[int]]] = [(0, 1 if k > 1 else None)]
    for g in range(1, k):
        a = 2 * ((g + 1) // 2)
        b = 2 * (g // 2) + 1
        pairs.append((a if a < k else None, b if b < k else None))
    return tuple(pairs)


def make_T(gamma: SegreMapping, k: int) -> SegreManifoldParam:
    """Assemble (v^k, conj v^(k-1), v^(k-2), ...) and verify it parametrizes the chain.

    Verifies that every generator pair annihilates under the assembled map and
    that the constant-term Jacobian has full rank k*n.
    """
    if k < 1:
        raise SegreError("chain parametrizations start at k = 1")
    dims = gamma.dims
    arity = k * dims.n
    slots: List[FormalMap] = []
    for s in range(k):
        piece = gamma.v(k - s).extend(arity)
        if s % 2 == 1:
            piece = piece.conjugate()
        slots.append(piece)
    components: List[TruncatedSeries] = []
    for piece in slots:
        components.extend(piece.components)
    mapping = FormalMap(components)

    zero_block = [TruncatedSeries.zero(arity, gamma.kappa) for _ in range(dims.N)]
    pairs = chain_generator_pairs(k)
    for a, b in pairs:
        z_side = list(slots[a].components) if a is not None else zero_block
        zeta_side = list(slots[b].components) if b is not None else zero_block
        inner = FormalMap([*z_side, *zeta_side])
        for image in compose_many(list(gamma.manifold.rho.components), inner):
            if not image.is_zero():
                raise InternalConsistencyError(
                    f"chain generator pair {(a, b)} does not annihilate under T^{k}"
                )
    jac = [
        [component.coefficient(_unit(arity, col)) for col in range(arity)]
        for component in mapping.components
    ]
    if linalg.rank(jac) != arity:
        raise InternalConsistencyError(f"T^{k} is rank-deficient at 0")
    return SegreManifoldParam(k, mapping, pairs)


@dataclass(frozen=True)
class ThetaPhi:
    """The paired mappings into the manifold used for orbit rank bookkeeping.

    theta has j+1 source blocks and 2N components; phi has j source blocks
    (absent for j = 0).  Both are verified to map into the manifold, and for
    j >= 1 theta restricted to a zero last block equals phi.
    """

    j: int
    theta: FormalMap
    phi: Optional[FormalMap]


def make_theta_phi(gamma: SegreMapping, j: int) -> ThetaPhi:
    if j < 0:
        raise SegreError("theta/phi indices start at j = 0")
    dims = gamma.dims
    kappa = gamma.kappa

    if j == 0:
        arity = dims.n
        v1 = gamma.v(1)
        zeros = [TruncatedSeries.zero(arity, kappa) for _ in range(dims.N)]
        theta = FormalMap([*v1.components, *zeros])
        phi = None
    else:
        arity = (j + 1) * dims.n
        shift_components = [
            TruncatedSeries.variable(arity, kappa, index) for index in range(j * dims.n)
        ]
        for i in range(dims.n):
            last = TruncatedSeries.variable(arity, kappa, j * dims.n + i)
            if j >= 2:
                last = last + TruncatedSeries.variable(arity, kappa, (j - 2) * dims.n + i)
            shift_components.append(last)
        first = gamma.v(j + 1).compose(FormalMap(shift_components))
        second = gamma.v_bar(j).extend(arity)
        theta = FormalMap([*first.components, *second.components])

        phi_arity = j * dims.n
        if j == 1:
            zeros = [TruncatedSeries.zero(phi_arity, kappa) for _ in range(dims.N)]
            phi = FormalMap([*zeros, *gamma.v_bar(1).components])
        else:
            head = gamma.v(j - 1).extend(phi_arity)
            phi = FormalMap([*head.components, *gamma.v_bar(j).components])

    for name, mapping in (("theta", theta), ("phi", phi)):
        if mapping is None:
            continue
        inner = FormalMap(mapping.components)
        for image in compose_many(list(gamma.manifold.rho.components), inner):
            if not image.is_zero():
                raise InternalConsistencyError(f"{name}^{j} does not map into the manifold")
    if j >= 1:
        assignment: List[Optional[int]] = list(range(j * dims.n)) + [None] * dims.n
        restricted = theta.map_vars(j * dims.n, assignment)
        if not restricted.equals_mod(phi):
            raise InternalConsistencyError("theta with zero last block does not equal phi")
    return ThetaPhi(j, theta, phi)


def pushforward_residuals(
    gamma: SegreMapping,
    theta_phi: ThetaPhi,
    fields_l: List[FormalVectorField],
    fields_lt: List[FormalVectorField],
    f: TruncatedSeries,
) -> List[TruncatedSeries]:
    """Residuals of the differentiation-through-composition identities.

    For each direction l, the t-derivative of f composed with theta in the
    last block must equal (Lt_l f) composed with theta, and the phi version
    holds with L_l; all residuals are exact modulo the shared valid order and
    must vanish.
    """
    dims = gamma.dims
    j = theta_phi.j
    residuals: List[TruncatedSeries] = []
    theta_inner = FormalMap(theta_phi.theta.components)
    for l in range(dims.n):
        lhs = f.compose(theta_inner).partial(j * dims.n + l)
        rhs = fields_lt[l].apply(f).compose(theta_inner)
        residuals.append(lhs.truncate(min(lhs.kappa, rhs.kappa)) - rhs)
    if theta_phi.phi is not None:
        phi_inner = FormalMap(theta_phi.phi.components)
        for l in range(dims.n):
            lhs = f.compose(phi_inner).partial((j - 1) * dims.n + l)
            rhs = fields_l[l].apply(f).compose(phi_inner)
            residuals.append(lhs.truncate(min(lhs.kappa, rhs.kappa)) - rhs)
    return residuals


def _unit(arity: int, index: int) -> Tuple[int, ...]:
    exp = [0] * arity
    exp[index] = 1
    return tuple(exp)
