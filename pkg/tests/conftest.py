"""Shared fixtures: loaded manifolds and helpers for random real manifolds."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from segre import (
    Dims,
    GaussianRational,
    TruncatedSeries,
    load_manifold_file,
    manifold_from_graph_series,
    manifold_from_rho_series,
)

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "src" / "segre" / "fixtures"


def load_fixture(name: str, kappa: int = 8):
    return load_manifold_file(FIXTURE_DIR / f"{name}.json", kappa)


@pytest.fixture(scope="session")
def manifold_h():
    return load_fixture("h")


@pytest.fixture(scope="session")
def manifold_flat():
    return load_fixture("flat")


@pytest.fixture(scope="session")
def manifold_l4():
    return load_fixture("l4")


@pytest.fixture(scope="session")
def manifold_c2():
    return load_fixture("c2")


@pytest.fixture(scope="session")
def all_fixture_manifolds(manifold_h, manifold_flat, manifold_l4, manifold_c2):
    return {
        "h": manifold_h,
        "flat": manifold_flat,
        "l4": manifold_l4,
        "c2": manifold_c2,
    }


def random_coefficient(rng: random.Random, height: int = 4) -> GaussianRational:
    return GaussianRational(rng.randint(-height, height), rng.randint(-height, height))


def random_rigid_manifold(rng: random.Random, kappa: int = 8, master: int = 16):
    """A random rigid real graph manifold: Q = ta + (psi - conj-swap psi).

    The antisymmetrization makes the reality identity hold by construction;
    coefficients have height at most 4 and the perturbation degree is at
    most 4.  Built at a high master order so the manifold can be re-expanded.
    """
    N = rng.randint(2, 3)
    d = rng.randint(1, min(2, N - 1))
    dims = Dims(N, d)
    arity = dims.graph_arity
    components = []
    for l in range(d):
        psi = {}
        for _ in range(rng.randint(1, 3)):
            exp = [0] * arity
            z_deg = rng.randint(1, 2)
            ch_deg = rng.randint(1, 2)
            for _ in range(z_deg):
                exp[rng.randrange(dims.n)] += 1
            for _ in range(ch_deg):
                exp[dims.n + rng.randrange(dims.n)] += 1
            coeff = random_coefficient(rng)
            if coeff:
                psi[tuple(exp)] = coeff
        psi_series = TruncatedSeries(arity, master, psi)
        # swap the z and ch blocks and conjugate: psi_bar(ch, z)
        swap = list(range(dims.n, 2 * dims.n)) + list(range(dims.n)) + list(
            range(2 * dims.n, arity)
        )
        psi_bar = psi_series.conjugate().map_vars(arity, swap)
        phi = psi_series - psi_bar
        q = TruncatedSeries.variable(arity, master, dims.gta(l)) + phi
        components.append(q)
    return manifold_from_graph_series(dims, components, kappa, label="random-rigid")


def random_real_rho_manifold(rng: random.Random, kappa: int = 8, master: int = 16):
    """A random non-rigid real manifold built from a + sigma(a) defining functions."""
    N = rng.randint(2, 3)
    d = rng.randint(1, min(2, N - 1))
    dims = Dims(N, d)
    arity = dims.ambient_arity
    components = []
    for l in range(d):
        base = TruncatedSeries.variable(arity, master, dims.n + l).scale(
            GaussianRational(0, Fraction(-1, 2))
        )
        extra = {}
        for _ in range(rng.randint(0, 3)):
            exp = [0] * arity
            degree = rng.randint(2, 3)
            for _ in range(degree):
                exp[rng.randrange(arity)] += 1
            coeff = random_coefficient(rng)
            if coeff:
                extra[tuple(exp)] = coeff
        a = base + TruncatedSeries(arity, master, extra)
        r = a + a.sigma(dims.N)
        components.append(r)
    # with the standard split the raw (Z, ze) layout coincides with the ambient one
    return manifold_from_rho_series(dims, components, kappa, label="random-rho")
