"""Root data, Killing geometry, Weyl group and lattices of compact groups.

A group is specified by a string like ``"A1"``, ``"A2"``, ``"A1xA1"``,
``"B2"``, ``"C2"``, ``"G2"`` (factors joined by ``x``).  All geometry is
expressed in a fixed coordinate basis of the Cartan algebra; the inner
product is the negative-Killing normalization, realized as the inverse of
the root outer-product sum.  That normalization is what makes the strange
formula <rho,rho> = dim(G)/24 hold, which the tests use as an oracle.

Conventions:

* roots, weights and Cartan-algebra points are all coordinate vectors in
  R^m identified through the inner product;
* the unit lattice is spanned by 2*pi times the coroots (simply connected
  groups), the weight lattice by the fundamental weights;
* the fundamental domain Q is the closed alcove of the affine Weyl group,
  cut out by <alpha_i, xi> >= 0 for simple roots and <theta_f, xi> <= 2*pi
  for each factor's highest root.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapacityError,
    InternalError,
    SpecParseError,
    UnsupportedGroupError,
)

__all__ = [
    "GroupSpec",
    "RootSystem",
    "DominantWeight",
    "FundamentalDomain",
    "parse_group_spec",
    "build_root_system",
    "build_fundamental_domain",
    "weyl_orbit",
    "dominant_weights_in_ball",
    "dominant_weight_table",
    "reduce_to_Q",
]

SPEC_GRAMMAR = "factors joined by 'x', each '<letter><rank>', e.g. A1, A2, A1xA1, G2"

#: frozen support set; desk-scale builds keep total rank <= 3
_SUPPORTED_FACTORS = {("A", 1), ("A", 2), ("B", 2), ("C", 2), ("G", 2)}
_MAX_TOTAL_RANK = 3
_WEYL_CAP = 10_000
DEFAULT_WEIGHT_CAP = 2_000_000


@dataclass(frozen=True)
class GroupSpec:
    """Parsed group specification with derived dimension counts."""

    factors: tuple[tuple[str, int], ...]
    m: int  # total rank = dim of the Cartan algebra
    n: int  # group dimension
    k: int  # number of positive roots, (n - m) / 2

    @property
    def name(self) -> str:
        return "x".join(f"{s}{r}" for s, r in self.factors)


def parse_group_spec(text: str) -> GroupSpec:
    """Parse a specification string; raise on grammar or support violations."""
    if not text or not isinstance(text, str):
        raise SpecParseError(f"empty group spec; grammar: {SPEC_GRAMMAR}")
    factors = []
    for part in text.split("x"):
        mo = re.fullmatch(r"([A-G])([0-9]+)", part)
        if mo is None:
            raise SpecParseError(
                f"cannot parse factor {part!r}; grammar: {SPEC_GRAMMAR}"
            )
        series, rank = mo.group(1), int(mo.group(2))
        if rank < 1:
            raise SpecParseError(f"factor rank must be >= 1, got {part!r}")
        if (series, rank) not in _SUPPORTED_FACTORS:
            supported = sorted(f"{s}{r}" for s, r in _SUPPORTED_FACTORS)
            raise UnsupportedGroupError(
                f"unsupported factor {part!r}; supported factors: {supported}"
            )
        factors.append((series, rank))
    m = sum(r for _, r in factors)
    if m > _MAX_TOTAL_RANK:
        raise UnsupportedGroupError(
            f"total rank {m} exceeds desk-scale cap {_MAX_TOTAL_RANK}"
        )
    k = sum(len(_factor_positive_roots(s, r)) for s, r in factors)
    n = m + 2 * k
    return GroupSpec(factors=tuple(factors), m=m, n=n, k=k)


def _factor_simple_roots(series: str, rank: int) -> np.ndarray:
    """Simple roots of one factor in its standard Euclidean realization."""
    s2 = np.sqrt(2.0)
    if (series, rank) == ("A", 1):
        return np.array([[s2]])
    if (series, rank) == ("A", 2):
        return np.array([[s2, 0.0], [-s2 / 2, np.sqrt(6.0) / 2]])
    if (series, rank) == ("B", 2):
        return np.array([[1.0, -1.0], [0.0, 1.0]])
    if (series, rank) == ("C", 2):
        return np.array([[1.0, -1.0], [0.0, 2.0]])
    if (series, rank) == ("G", 2):
        return np.array([[1.0, 0.0], [-1.5, np.sqrt(3.0) / 2]])
    raise UnsupportedGroupError(f"no realization for {series}{rank}")


def _factor_positive_roots(series: str, rank: int) -> list[tuple[int, ...]]:
    """Positive roots as integer coefficient rows over the simple roots."""
    if (series, rank) == ("A", 1):
        return [(1,)]
    if (series, rank) == ("A", 2):
        return [(1, 0), (0, 1), (1, 1)]
    if (series, rank) == ("B", 2):
        return [(1, 0), (0, 1), (1, 1), (1, 2)]
    if (series, rank) == ("C", 2):
        return [(1, 0), (0, 1), (1, 1), (2, 1)]
    if (series, rank) == ("G", 2):
        return [(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)]
    raise UnsupportedGroupError(f"no root table for {series}{rank}")


_FACTOR_HIGHEST = {
    ("A", 1): (1,),
    ("A", 2): (1, 1),
    ("B", 2): (1, 2),
    ("C", 2): (2, 1),
    ("G", 2): (3, 2),
}

_FACTOR_WEYL_ORDER = {("A", 1): 2, ("A", 2): 6, ("B", 2): 8, ("C", 2): 8, ("G", 2): 12}


@dataclass(frozen=True, eq=False)
class RootSystem:
    """Immutable root datum of a compact, simply connected, semisimple group.

    All operations on this object are pure; instances are safe to share
    across concurrent workers.  ``_cache`` only memoizes derived tables.
    """

    spec: GroupSpec
    simple_roots: np.ndarray      # (m, m) rows
    positive_roots: np.ndarray    # (k, m) rows
    gram: np.ndarray              # (m, m) Killing-normalized inner product
    rho: np.ndarray               # (m,) half-sum of positive roots
    fundamental_weights: np.ndarray  # (m, m) rows, dual to coroots
    coroots: np.ndarray           # (m, m) rows, 2*alpha/<alpha,alpha>
    gamma_basis: np.ndarray       # (m, m) rows, 2*pi*coroots
    weyl_elements: np.ndarray     # (|W|, m, m) matrices, identity first
    weyl_signatures: np.ndarray   # (|W|,) entries +-1
    factor_slices: tuple[tuple[int, int], ...]
    highest_roots: np.ndarray     # (num_factors, m) rows
    _cache: dict = field(default_factory=dict, repr=False)

    # -- inner-product helpers -------------------------------------------------

    def inner(self, x, y):
        """Killing inner product; broadcasts over leading axes."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.gram, y)

    def norm(self, x):
        return np.sqrt(np.maximum(self.inner(x, x), 0.0))

    def root_pairings(self, xi):
        """<alpha, xi> for every positive root; shape (k,) or (k, ...)."""
        forms = self.gram @ np.asarray(xi, dtype=float).T
        return self.positive_roots @ forms

    @property
    def weyl_order(self) -> int:
        return len(self.weyl_elements)

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def num_positive_roots(self) -> int:
        return self.spec.k

    def lattice_min_norm(self) -> float:
        """Norm of the shortest nonzero unit-lattice vector."""
        if "lattice_min" not in self._cache:
            rng = range(-2, 3)
            best = np.inf
            for coeffs in itertools.product(rng, repeat=self.m):
                if all(c == 0 for c in coeffs):
                    continue
                v = np.asarray(coeffs, dtype=float) @ self.gamma_basis
                best = min(best, float(self.norm(v)))
            self._cache["lattice_min"] = best
        return self._cache["lattice_min"]

    def to_json_dict(self) -> dict:
        """Serializable description (spec string, Gram matrix, lattice bases)."""
        return {
            "group": self.spec.name,
            "m": self.spec.m,
            "n": self.spec.n,
            "num_positive_roots": self.spec.k,
            "gram": self.gram.tolist(),
            "simple_roots": self.simple_roots.tolist(),
            "gamma_basis": self.gamma_basis.tolist(),
            "weight_basis": self.fundamental_weights.tolist(),
            "weyl_order": self.weyl_order,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _reflection_matrix(alpha: np.ndarray, gram: np.ndarray) -> np.ndarray:
    form = gram @ alpha
    return np.eye(len(alpha)) - 2.0 * np.outer(alpha, form) / float(alpha @ form)


def _close_weyl_group(generators: list[np.ndarray]) -> np.ndarray:
    """BFS closure of the group generated by reflection matrices."""
    m = generators[0].shape[0]
    ident = np.eye(m)

    def key(w):
        return tuple(np.round(w, 9).ravel())

    seen = {key(ident): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for g in generators:
                cand = g @ w
                k = key(cand)
                if k not in seen:
                    if len(seen) >= _WEYL_CAP:
                        raise CapacityError(
                            f"Weyl group closure exceeded cap {_WEYL_CAP}",
                            cap=_WEYL_CAP,
                        )
                    seen[k] = cand
                    nxt.append(cand)
        frontier = nxt
    elements = list(seen.values())
    # identity first, then sorted by rounded entries for determinism
    elements.sort(key=lambda w: (round(float(np.abs(w - ident).sum()), 9),) + key(w))
    return np.array(elements)


def build_root_system(spec: GroupSpec | str) -> RootSystem:
    """Construct the full root datum for a parsed or textual group spec.

    The Gram matrix is the inverse of ``sum(outer(a, a))`` over all roots,
    which is exactly the fixed point of the Killing self-consistency
    identity and needs no per-factor scale bookkeeping.
    """
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    m = spec.m
    simple = np.zeros((m, m))
    positive_rows = []
    highest = []
    slices = []
    offset = 0
    simple_offset = 0
    for series, rank in spec.factors:
        fs = _factor_simple_roots(series, rank)
        simple[simple_offset : simple_offset + rank, offset : offset + rank] = fs
        for coeffs in _factor_positive_roots(series, rank):
            row = np.zeros(m)
            row[offset : offset + rank] = np.asarray(coeffs, dtype=float) @ fs
            positive_rows.append(row)
        hrow = np.zeros(m)
        hrow[offset : offset + rank] = (
            np.asarray(_FACTOR_HIGHEST[(series, rank)], dtype=float) @ fs
        )
        highest.append(hrow)
        slices.append((offset, offset + rank))
        offset += rank
        simple_offset += rank
    positive = np.array(positive_rows)

    # Killing normalization: gram = S^{-1}, S = sum over +-roots of a a^T
    all_roots = np.vstack([positive, -positive])
    S = all_roots.T @ all_roots
    gram = np.linalg.inv(S)
    gram = 0.5 * (gram + gram.T)

    rho = 0.5 * positive.sum(axis=0)
    norms2 = np.einsum("ij,jk,ik->i", simple, gram, simple)
    coroots = 2.0 * simple / norms2[:, None]
    # fundamental weights are dual to the coroots: <omega_i, coroot_j> = delta_ij
    fundamental = np.linalg.inv(coroots @ gram).T
    gamma_basis = 2.0 * np.pi * coroots

    generators = [_reflection_matrix(a, gram) for a in simple]
    weyl = _close_weyl_group(generators)
    signatures = np.array([int(round(np.linalg.det(w))) for w in weyl])

    expected_order = 1
    for f in spec.factors:
        expected_order *= _FACTOR_WEYL_ORDER[f]
    if len(weyl) != expected_order:
        raise InternalError(
            f"Weyl closure produced {len(weyl)} elements, expected {expected_order}"
        )

    return RootSystem(
        spec=spec,
        simple_roots=simple,
        positive_roots=positive,
        gram=gram,
        rho=rho,
        fundamental_weights=fundamental,
        coroots=coroots,
        gamma_basis=gamma_basis,
        weyl_elements=weyl,
        weyl_signatures=signatures,
        factor_slices=tuple(slices),
        highest_roots=np.array(highest),
    )


def weyl_orbit(rs: RootSystem, xi) -> list[tuple[np.ndarray, int]]:
    """All Weyl images of ``xi`` with signatures, one entry per element."""
    xi = np.asarray(xi, dtype=float)
    return [
        (rs.weyl_elements[i] @ xi, int(rs.weyl_signatures[i]))
        for i in range(rs.weyl_order)
    ]


@dataclass(frozen=True)
class DominantWeight:
    """A dominant weight with its dimension and shifted norm cached."""

    lam: np.ndarray        # coordinate vector in R^m
    coords: tuple[int, ...]  # coordinates in the fundamental-weight basis
    dim: int
    shifted_norm: float    # |lam + rho|


def weight_gram(rs: RootSystem) -> np.ndarray:
    """Gram matrix of the fundamental weights under the Killing form."""
    W = rs.fundamental_weights
    return W @ rs.gram @ W.T


def dominant_weight_table(rs: RootSystem, radius: float, cap: int = DEFAULT_WEIGHT_CAP):
    """Array-valued enumeration of dominant weights with |lam+rho| < radius.

    Returns a dict with keys ``coords`` (int array, N x m), ``shifted``
    (N x m vectors lam+rho), ``norms`` (N,), ``dims`` (N,), sorted by
    (norm, coords) for deterministic downstream reductions.  Cached per
    radius on the root system.
    """
    key = ("wtable", round(float(radius), 12), cap)
    if key in rs._cache:
        return rs._cache[key]
    if radius <= 0:
        table = {
            "coords": np.zeros((0, rs.m), dtype=np.int64),
            "shifted": np.zeros((0, rs.m)),
            "norms": np.zeros(0),
            "dims": np.zeros(0),
        }
        rs._cache[key] = table
        return table
    gw = weight_gram(rs)
    lam_min = float(np.linalg.eigvalsh(gw).min())
    # shifted coordinates c = coords + 1 satisfy |c|^2 * lam_min <= radius^2
    cmax = int(np.floor(radius / np.sqrt(lam_min))) + 1
    total = (cmax) ** rs.m
    if total > cap:
        raise CapacityError(
            f"weight enumeration box {cmax}^{rs.m} = {total} exceeds cap {cap}",
            cap=cap,
        )
    axes = [np.arange(1, cmax + 1, dtype=np.int64)] * rs.m
    mesh = np.meshgrid(*axes, indexing="ij")
    shifted_coords = np.stack([a.ravel() for a in mesh], axis=1)  # c = coords+1
    vecs = shifted_coords @ rs.fundamental_weights
    norms2 = np.einsum("ij,jk,ik->i", vecs, rs.gram, vecs)
    keep = norms2 < radius * radius
    shifted_coords = shifted_coords[keep]
    vecs = vecs[keep]
    norms = np.sqrt(norms2[keep])
    if len(vecs) > cap:
        raise CapacityError(
            f"{len(vecs)} weights inside radius {radius} exceed cap {cap}", cap=cap
        )
    # Weyl dimension product
    pair_shift = vecs @ rs.gram @ rs.positive_roots.T       # <lam+rho, alpha>
    pair_rho = rs.positive_roots @ rs.gram @ rs.rho         # <rho, alpha>
    dims_f = np.prod(pair_shift / pair_rho[None, :], axis=1)
    dims = np.round(dims_f)
    order = np.lexsort(tuple(shifted_coords[:, i] for i in range(rs.m - 1, -1, -1)))
    order = order[np.argsort(norms[order], kind="stable")]
    table = {
        "coords": (shifted_coords - 1)[order],
        "shifted": vecs[order],
        "norms": norms[order],
        "dims": dims[order],
        "dim_residual": float(np.abs(dims_f - dims).max()) if len(dims) else 0.0,
    }
    rs._cache[key] = table
    return table


def dominant_weights_in_ball(
    rs: RootSystem, radius: float, cap: int = DEFAULT_WEIGHT_CAP
) -> list[DominantWeight]:
    """Exactly the dominant weights lambda with |lambda + rho| < radius."""
    table = dominant_weight_table(rs, radius, cap=cap)
    out = []
    for coords, vec, norm, dim in zip(
        table["coords"], table["shifted"], table["norms"], table["dims"]
    ):
        out.append(
            DominantWeight(
                lam=vec - rs.rho,
                coords=tuple(int(c) for c in coords),
                dim=int(dim),
                shifted_norm=float(norm),
            )
        )
    return out


@dataclass(frozen=True, eq=False)
class FundamentalDomain:
    """Closed alcove Q of the affine Weyl group, with the subregion Q0.

    ``Q`` is the set ``{xi : <alpha_i, xi> >= 0 for simple alpha_i, and
    <theta_f, xi> <= 2*pi for each factor's highest root theta_f}``;
    ``Q0`` keeps only points with every positive-root pairing below pi.
    The half-space description is exposed via ``halfspaces``.
    """

    rs: RootSystem
    simple_forms: np.ndarray    # rows a with constraint a . xi >= 0
    highest_forms: np.ndarray   # rows h with constraint h . xi <= 2*pi
    positive_forms: np.ndarray  # rows for the Q0 cut |a . xi| < pi
    coroot_dirs: np.ndarray     # reflection directions for the simple walls
    highest_coroot_dirs: np.ndarray

    @property
    def halfspaces(self) -> list[tuple[np.ndarray, float, str]]:
        out = [(row.copy(), 0.0, ">=") for row in self.simple_forms]
        out += [(row.copy(), 2.0 * np.pi, "<=") for row in self.highest_forms]
        return out

    def contains(self, xi, tol: float = 1e-9) -> bool:
        xi = np.asarray(xi, dtype=float)
        if np.any(self.simple_forms @ xi < -tol):
            return False
        return bool(np.all(self.highest_forms @ xi <= 2 * np.pi + tol))

    def in_q0(self, xi, tol: float = 0.0):
        """Indicator of Q0 (pairings strictly below pi); broadcasts."""
        xi = np.asarray(xi, dtype=float)
        pair = self.positive_forms @ xi.T if xi.ndim > 1 else self.positive_forms @ xi
        return np.all(np.abs(pair) < np.pi - tol, axis=0)

    @property
    def r0(self) -> float:
        """Largest r with B(0, 2r) inside Q0 (group-folded) and |.|-isometric.

        The two alcove-derived constraints: 2*r0 below the distance from 0
        to the Q0 walls inside the dominant cone (pi / max |alpha|), and
        2*r0 at most half the shortest unit-lattice vector so that alcove
        norm equals geodesic distance.
        """
        rs = self.rs
        max_root = float(rs.norm(rs.positive_roots).max())
        wall = np.pi / max_root
        packing = rs.lattice_min_norm() / 2.0
        return 0.5 * min(wall, packing)


def build_fundamental_domain(rs: RootSystem) -> FundamentalDomain:
    gram = rs.gram
    simple_forms = rs.simple_roots @ gram
    highest_forms = rs.highest_roots @ gram
    positive_forms = rs.positive_roots @ gram
    norms2 = np.einsum("ij,jk,ik->i", rs.simple_roots, gram, rs.simple_roots)
    coroot_dirs = 2.0 * rs.simple_roots / norms2[:, None]
    hn2 = np.einsum("ij,jk,ik->i", rs.highest_roots, gram, rs.highest_roots)
    highest_coroot_dirs = 2.0 * rs.highest_roots / hn2[:, None]
    return FundamentalDomain(
        rs=rs,
        simple_forms=simple_forms,
        highest_forms=highest_forms,
        positive_forms=positive_forms,
        coroot_dirs=coroot_dirs,
        highest_coroot_dirs=highest_coroot_dirs,
    )


def _closest_lattice_vector(rs: RootSystem, xi: np.ndarray) -> np.ndarray:
    """Gamma-lattice vector nearest to ``xi`` (Babai round + neighbor scan).

    The +-2 coefficient window around the Babai point is exhaustive for the
    rank <= 3 coroot lattices supported here.  Ties break deterministically
    toward the lexicographically smallest coefficient offset.
    """
    base = np.round(np.linalg.solve(rs.gamma_basis.T, xi))
    offsets = rs._cache.get("cvp_offsets")
    if offsets is None:
        rng = np.arange(-2, 3)
        mesh = np.meshgrid(*([rng] * rs.m), indexing="ij")
        offsets = np.stack([a.ravel() for a in mesh], axis=1)
        # zero offset first so exact boundary ties keep the current cell
        order = np.lexsort(
            tuple(offsets[:, i] for i in range(rs.m - 1, -1, -1))
            + (np.abs(offsets).sum(axis=1),)
        )
        offsets = offsets[order]
        rs._cache["cvp_offsets"] = offsets
    candidates = (base[None, :] + offsets) @ rs.gamma_basis
    dist = rs.norm(xi[None, :] - candidates)
    best = int(np.argmin(np.round(dist, 9)))
    return candidates[best]


def reduce_to_Q(rs: RootSystem, dom: FundamentalDomain, xi) -> np.ndarray:
    """Affine-Weyl representative of ``xi`` inside the closed alcove Q.

    The result equals w(xi) + gamma for some Weyl element w and unit-lattice
    gamma; the map is idempotent up to floating-point tolerance.  The
    algorithm subtracts the closest lattice vector and then folds into the
    dominant cone; a dominant minimum-norm point automatically satisfies
    the highest-root constraint <theta, xi> <= 2*pi, so the result lies in
    Q.  The representative is minimum-norm over the whole orbit, which
    makes |reduce_to_Q(xi)| the geodesic distance of exp(xi) to e.
    """
    xi = np.array(xi, dtype=float)
    xi = xi - _closest_lattice_vector(rs, xi)
    tol = 1e-12
    max_iter = 10 * rs.weyl_order + 50
    for _ in range(max_iter):
        sv = dom.simple_forms @ xi
        i = int(np.argmin(sv))
        if sv[i] >= -tol:
            return xi
        xi = xi - sv[i] * dom.coroot_dirs[i]
    raise InternalError("alcove reduction did not converge")
