"""Weyl denominator, characters, dimensions and torus quadrature.

Characters are evaluated through the alternating-sum formula divided by
the Weyl denominator.  Near denominator zeros ("walls") the quotient is
recovered by Richardson extrapolation along a fixed generic direction.
Quadrature on the maximal torus is a uniform tensor grid over one period
cell of the unit lattice, which integrates lattice trigonometric
polynomials exactly below its Nyquist bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NormalizationError, QuadratureResolutionError, SingularEvaluationError
from .rootsys import FundamentalDomain, RootSystem, reduce_to_Q

__all__ = [
    "TorusPoint",
    "TorusQuadrature",
    "build_torus_quadrature",
    "weyl_denominator",
    "weyl_denominator_sum",
    "dimension",
    "character",
    "character_numerator",
    "weyl_integrate",
    "character_gram",
]

WALL_TOL = 1e-6  # |D| below this triggers the extrapolated branch


@dataclass(frozen=True)
class TorusPoint:
    """A point exp(xi) of the maximal torus, tracked by its log xi."""

    xi: np.ndarray

    def canonical(self, rs: RootSystem, dom: FundamentalDomain) -> np.ndarray:
        return reduce_to_Q(rs, dom, self.xi)

    def conjugate_to(self, other: "TorusPoint", rs, dom, tol: float = 1e-9) -> bool:
        a = self.canonical(rs, dom)
        b = other.canonical(rs, dom)
        return bool(rs.norm(a - b) < tol)


def weyl_denominator(rs: RootSystem, xi) -> complex | np.ndarray:
    """Weyl denominator in product form, (2i)^k prod sin(<alpha,xi>/2).

    Vectorizes over a trailing batch of points (shape (P, m) -> (P,)).
    Zeros on the walls are legitimate values.
    """
    pair = rs.root_pairings(xi)
    prod = np.prod(np.sin(pair / 2.0), axis=0)
    return (2j) ** rs.num_positive_roots * prod


def weyl_denominator_sum(rs: RootSystem, xi) -> complex:
    """Alternating-sum form of the denominator (cross-check of the product)."""
    xi = np.asarray(xi, dtype=float)
    images = rs.weyl_elements @ rs.rho
    phases = images @ rs.gram @ xi
    return complex(np.sum(rs.weyl_signatures * np.exp(1j * phases)))


def dimension(rs: RootSystem, lam) -> int:
    """Dimension of the irreducible representation with highest weight lam."""
    lam = np.asarray(lam, dtype=float)
    num = rs.root_pairings(lam + rs.rho)
    den = rs.root_pairings(rs.rho)
    val = float(np.prod(num / den))
    rounded = round(val)
    if abs(val - rounded) > 1e-6:
        raise NormalizationError(
            f"dimension product {val!r} is {abs(val - rounded):.2e} from an integer"
        )
    return int(rounded)


def character_numerator(rs: RootSystem, lam, xi) -> complex | np.ndarray:
    """Alternating sum over the Weyl orbit of lam + rho; batch-aware in xi."""
    lam = np.asarray(lam, dtype=float)
    images = rs.weyl_elements @ (lam + rs.rho)          # (|W|, m)
    xi = np.asarray(xi, dtype=float)
    phases = images @ rs.gram @ xi.T                     # (|W|, P) or (|W|,)
    terms = rs.weyl_signatures.reshape(-1, *([1] * (phases.ndim - 1)))
    return np.sum(terms * np.exp(1j * phases), axis=0)


def _generic_direction(rs: RootSystem) -> np.ndarray:
    u = np.cos(1.0 + np.arange(rs.m, dtype=float))
    return u / float(rs.norm(u))


def character(rs: RootSystem, lam, xi) -> complex:
    """Character of the representation with highest weight lam at exp(xi).

    Away from walls this is the numerator divided by the denominator; on
    walls the value is the limit along a fixed generic direction, computed
    by three-level Richardson extrapolation.  Raises if the two deepest
    extrapolation levels disagree beyond 1e-6.
    """
    lam = np.asarray(lam, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if float(np.abs(xi).max(initial=0.0)) < 1e-14:
        return complex(dimension(rs, lam))
    den = weyl_denominator(rs, xi)
    if abs(den) > WALL_TOL:
        return complex(character_numerator(rs, lam, xi) / den)
    u = _generic_direction(rs)
    t0 = 1e-3

    def probe(t):
        p = xi + t * u
        return complex(character_numerator(rs, lam, p) / weyl_denominator(rs, p))

    a, b, c = probe(t0), probe(t0 / 2), probe(t0 / 4)
    r1, r2 = 2 * b - a, 2 * c - b
    value = (4 * r2 - r1) / 3
    if abs(value - r2) > 1e-6 * max(1.0, abs(value)):
        raise SingularEvaluationError(
            f"wall extrapolation disagreement {abs(value - r2):.2e} at xi={xi.tolist()},"
            f" |D|={abs(den):.2e}"
        )
    return value


@dataclass(frozen=True, eq=False)
class TorusQuadrature:
    """Uniform tensor-product rule over a period cell of the unit lattice.

    ``nyquist_norm`` is the largest frequency norm F such that every
    lattice exponential e^{i<mu, xi>} with |mu| <= F is integrated exactly
    (to roundoff).  Nodes are offset by half a step so that cell corners
    (denominator zeros) are never sampled.
    """

    rs: RootSystem
    shape: tuple[int, ...]
    nodes: np.ndarray     # (P, m)
    weights: np.ndarray   # (P,) equal, summing to 1
    nyquist_norm: float
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def abs_d_squared(self) -> np.ndarray:
        if "absd2" not in self._cache:
            d = weyl_denominator(self.rs, self.nodes)
            self._cache["absd2"] = np.abs(d) ** 2
        return self._cache["absd2"]

    def descriptor(self) -> dict:
        return {
            "grid_shape": list(self.shape),
            "num_nodes": self.num_nodes,
            "nyquist_norm": self.nyquist_norm,
        }


def build_torus_quadrature(
    rs: RootSystem, max_frequency_norm: float, margin: float = 2.0
) -> TorusQuadrature:
    """Grid sized so trig polynomials with spectrum inside
    ``margin * max_frequency_norm`` are integrated exactly."""
    target = margin * max_frequency_norm
    gnorms = rs.norm(rs.gamma_basis)
    shape = tuple(
        int(np.ceil(target * g / (2 * np.pi))) + 1 for g in gnorms
    )
    axes = [(np.arange(nj) + 0.5) / nj for nj in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    fracs = np.stack([a.ravel() for a in mesh], axis=1)
    nodes = fracs @ rs.gamma_basis
    weights = np.full(len(nodes), 1.0 / len(nodes))
    nyq = min(2 * np.pi * (nj - 1) / g for nj, g in zip(shape, gnorms))
    return TorusQuadrature(
        rs=rs, shape=shape, nodes=nodes, weights=weights, nyquist_norm=nyq
    )


def weyl_integrate(rs: RootSystem, quad: TorusQuadrature, f) -> float | complex:
    """Integral over the group of a central function via the torus.

    ``f`` is either a callable taking the (P, m) node array or a length-P
    array of values.  The Jacobian |D|^2 and the 1/|W| factor are applied
    here.
    """
    vals = f(quad.nodes) if callable(f) else np.asarray(f)
    if vals.shape != (quad.num_nodes,):
        raise QuadratureResolutionError(
            f"integrand shape {vals.shape} does not match quadrature nodes"
        )
    total = np.sum(quad.weights * vals * quad.abs_d_squared())
    total = total / rs.weyl_order
    if np.iscomplexobj(vals) and abs(total.imag) < 1e-9 * max(1.0, abs(total.real)):
        return float(total.real)
    return total


def character_gram(rs: RootSystem, quad: TorusQuadrature, weights: list) -> np.ndarray:
    """Gram matrix of characters under the group inner product.

    Uses the numerator form (chi_lam chibar_mu |D|^2 equals the product of
    alternating sums), which has no denominator zeros and is exact under
    the grid's Nyquist bound.
    """
    max_norm = max(w.shifted_norm for w in weights)
    if 2 * max_norm > quad.nyquist_norm:
        raise QuadratureResolutionError(
            f"character Gram needs Nyquist {2 * max_norm:.2f},"
            f" quadrature provides {quad.nyquist_norm:.2f}"
        )
    nums = np.stack(
        [character_numerator(rs, w.lam, quad.nodes) for w in weights]
    )  # (K, P)
    wn = nums * quad.weights[None, :]
    gram = (wn @ nums.conj().T) / rs.weyl_order
    return gram
