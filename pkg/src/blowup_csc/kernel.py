"""Model manifolds, configuration points and the explicit kernel functions.

On P^n every nonconstant kernel function is the restriction of a traceless
Hermitian form ``z -> z^H A z`` to the unit sphere of C^{n+1}.  Storing the
matrix ``A`` makes evaluation vectorised, phase invariance automatic and
group averaging exact (``A -> mean_g G^H A G``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import qr, svd

from ._random import DEFAULT_SEED, rng_for, sphere_points

NORM_TOL = 1e-12
PHASE_TOL = 1e-12


class InvalidDimensionError(ValueError):
    pass


class EmptyKernelError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------------
# manifolds


@dataclass(frozen=True)
class Projective:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidDimensionError(f"projective dimension must be >= 1, got {self.n!r}")

    @property
    def kernel_dim(self) -> int:
        return self.n * self.n + 2 * self.n

    def to_dict(self):
        return {"P": self.n}


@dataclass(frozen=True)
class Rigid:
    """Factor without vanishing holomorphic vector fields; contributes no kernel."""

    dim: int | None = None

    kernel_dim = 0

    def to_dict(self):
        out = {"rigid": True}
        if self.dim is not None:
            out["dim"] = self.dim
        return out


@dataclass(frozen=True)
class ModelManifold:
    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise InvalidDimensionError("a model manifold needs at least one factor")
        for f in factors:
            if not isinstance(f, (Projective, Rigid)):
                raise TypeError(f"unknown factor {f!r}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def projective(cls, n: int) -> "ModelManifold":
        return cls((Projective(n),))

    @classmethod
    def product(cls, *factors) -> "ModelManifold":
        built = []
        for f in factors:
            if isinstance(f, (Projective, Rigid)):
                built.append(f)
            elif f == "rigid":
                built.append(Rigid())
            else:
                built.append(Projective(int(f)))
        return cls(tuple(built))

    @property
    def d(self) -> int:
        return sum(f.kernel_dim for f in self.factors)

    @property
    def complex_dim(self) -> int | None:
        """Total complex dimension, or None when a rigid factor has unknown dimension."""
        total = 0
        for f in self.factors:
            dim = f.n if isinstance(f, Projective) else f.dim
            if dim is None:
                return None
            total += dim
        return total

    @property
    def projective_indices(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.factors) if isinstance(f, Projective))

    def to_dict(self):
        return {"factors": [f.to_dict() for f in self.factors]}

    @classmethod
    def from_dict(cls, data) -> "ModelManifold":
        if isinstance(data, dict) and "factors" in data:
            items = data["factors"]
        elif isinstance(data, list):
            items = data
        else:
            items = [data]
        factors = []
        for item in items:
            if "P" in item:
                factors.append(Projective(int(item["P"])))
            elif item.get("rigid"):
                dim = item.get("dim")
                factors.append(Rigid(None if dim is None else int(dim)))
            else:
                raise ValueError(f"cannot parse factor {item!r}")
        return cls(tuple(factors))

    def __str__(self):
        parts = [f"P{f.n}" if isinstance(f, Projective) else "Rigid" for f in self.factors]
        return " x ".join(parts)


# ---------------------------------------------------------------------------
# points


def normalize_coords(coords) -> np.ndarray:
    z = np.asarray(coords, dtype=complex).ravel()
    nrm = np.linalg.norm(z)
    if nrm == 0 or not np.isfinite(nrm):
        raise ValueError("homogeneous coordinates must be finite and not all zero")
    return z / nrm


def canonical(z: np.ndarray) -> np.ndarray:
    """Phase-fixed representative: first coordinate of modulus > 1e-12 made real positive."""
    idx = int(np.argmax(np.abs(z) > PHASE_TOL))
    phase = z[idx] / abs(z[idx])
    return z / phase


def chordal(z: np.ndarray, w: np.ndarray) -> float:
    """Fubini-Study chordal distance sqrt(1 - |<z, w>|^2) between unit vectors."""
    ip = abs(np.vdot(z, w))
    return float(np.sqrt(max(0.0, 1.0 - ip * ip)))


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", normalize_coords(self.coords))

    @property
    def n(self) -> int:
        return self.coords.size - 1

    def canonical(self) -> np.ndarray:
        return canonical(self.coords)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint) or other.n != self.n:
            return NotImplemented
        return chordal(self.coords, other.coords) < 1e-8

    def __hash__(self):
        return hash(tuple(np.round(self.canonical(), 8)))


def as_point(manifold: ModelManifold, p) -> tuple:
    """Coerce ``p`` into a configuration point: a tuple with one entry per factor.

    Projective components become unit complex vectors; rigid components are
    kept as opaque labels.  A bare coordinate vector is accepted when the
    manifold has a single factor.
    """
    if isinstance(p, ProjectivePoint):
        p = (p.coords,)
    elif len(manifold.factors) == 1 and (
            not isinstance(p, tuple) or (len(p) > 0 and np.isscalar(p[0]))):
        p = (p,)
    p = tuple(p)
    if len(p) != len(manifold.factors):
        raise DimensionMismatchError(
            f"point has {len(p)} components, manifold {manifold} has {len(manifold.factors)}")
    out = []
    for comp, fac in zip(p, manifold.factors):
        if isinstance(fac, Rigid):
            out.append(comp)
            continue
        if isinstance(comp, ProjectivePoint):
            comp = comp.coords
        z = normalize_coords(comp)
        if z.size != fac.n + 1:
            raise DimensionMismatchError(
                f"P{fac.n} component needs {fac.n + 1} coordinates, got {z.size}")
        out.append(z)
    return tuple(out)


def as_points(manifold: ModelManifold, points: Iterable) -> list[tuple]:
    return [as_point(manifold, p) for p in points]


def point_distance(manifold: ModelManifold, p: tuple, q: tuple) -> float:
    """Max over factors of the chordal distance; rigid labels count as 0 or 1."""
    dist = 0.0
    for comp_p, comp_q, fac in zip(p, q, manifold.factors):
        if isinstance(fac, Rigid):
            dist = max(dist, 0.0 if comp_p == comp_q else 1.0)
        else:
            dist = max(dist, chordal(comp_p, comp_q))
    return dist


def point_key(manifold: ModelManifold, p: tuple, decimals: int = 8) -> tuple:
    key = []
    for comp, fac in zip(p, manifold.factors):
        if isinstance(fac, Rigid):
            key.append(("rigid", repr(comp)))
        else:
            c = np.round(canonical(comp), decimals) + 0.0  # drop negative zeros
            key.append(tuple(complex(v) for v in c))
    return tuple(key)


def random_points(manifold: ModelManifold, count: int, rng: np.random.Generator) -> list[tuple]:
    """Uniform random points, one independent sample per projective factor."""
    cols = []
    for i, fac in enumerate(manifold.factors):
        if isinstance(fac, Rigid):
            cols.append([f"q{k}" for k in range(count)])
        else:
            cols.append(list(sphere_points(rng, fac.n + 1, count)))
    return [tuple(c[k] for c in cols) for k in range(count)]


# ---------------------------------------------------------------------------
# kernel functions


@dataclass(frozen=True, eq=False)
class KernelFunction:
    """``p -> Re(z^H A z)`` with ``z`` the component of ``p`` on factor ``factor``."""

    factor: int
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("kernel function matrix must be square")
        object.__setattr__(self, "matrix", a)

    def values(self, coords: np.ndarray) -> np.ndarray:
        """Evaluate on an (m, n+1) array of factor coordinates.

        Computed as a Rayleigh quotient after scaling each row by its largest
        modulus, which keeps values at symmetric points such as (1, i)/sqrt 2
        free of rounding from the unit normalisation.
        """
        z = np.atleast_2d(coords)
        z = z / np.max(np.abs(z), axis=1, keepdims=True)
        num = np.einsum("mi,ij,mj->m", z.conj(), self.matrix, z).real
        return num / np.einsum("mi,mi->m", z.conj(), z).real

    def __call__(self, p) -> float:
        z = p[self.factor] if isinstance(p, tuple) else p
        return float(self.values(np.asarray(z))[0])

    def scaled(self, lam: float) -> "KernelFunction":
        return KernelFunction(self.factor, lam * self.matrix, f"{lam:g}*{self.label}")

    @property
    def is_zero(self) -> bool:
        return bool(np.max(np.abs(self.matrix)) < 1e-14)


@dataclass(frozen=True, eq=False)
class KernelBasis:
    manifold: ModelManifold
    functions: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __getitem__(self, i):
        return self.functions[i]

    @property
    def d(self) -> int:
        return len(self.functions)

    @property
    def labels(self) -> list[str]:
        return [f.label for f in self.functions]

    def matrix(self, points: Sequence) -> np.ndarray:
        """The d x m matrix of values xi_j(p_l)."""
        pts = as_points(self.manifold, points)
        m = len(pts)
        out = np.zeros((self.d, m))
        if m == 0:
            return out
        stacks = {}
        for i in self.manifold.projective_indices:
            stacks[i] = np.stack([p[i] for p in pts])
        for j, f in enumerate(self.functions):
            out[j] = f.values(stacks[f.factor])
        return out

    def evaluate(self, p) -> np.ndarray:
        return self.matrix([p])[:, 0]


def _unit(size, i, j, value=1.0):
    a = np.zeros((size, size), dtype=complex)
    a[i, j] = value
    return a


def pn_functions(n: int, factor: int = 0, prefix: str = "xi") -> list[KernelFunction]:
    """The n^2 + 2n real kernel functions of P^n, in a fixed order.

    Order: xi_ab for a < b (lexicographic), then hat-xi_ab for a < b, then
    tilde-xi_a = |z_a|^2 - |z_{a+1}|^2 for a = 1..n.  Indices in labels are 1-based.
    """
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n!r}")
    size = n + 1
    pairs = list(itertools.combinations(range(size), 2))
    funcs = []
    for a, b in pairs:
        # z_a conj(z_b) + z_b conj(z_a)
        mat = _unit(size, b, a) + _unit(size, a, b)
        funcs.append(KernelFunction(factor, mat, f"{prefix}_{a + 1}{b + 1}"))
    for a, b in pairs:
        # i (z_a conj(z_b) - z_b conj(z_a))
        mat = _unit(size, b, a, 1j) + _unit(size, a, b, -1j)
        funcs.append(KernelFunction(factor, mat, f"hat{prefix}_{a + 1}{b + 1}"))
    for a in range(n):
        mat = _unit(size, a, a) - _unit(size, a + 1, a + 1)
        funcs.append(KernelFunction(factor, mat, f"tilde{prefix}_{a + 1}"))
    return funcs


def pn_kernel_basis(n: int) -> KernelBasis:
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n!r}")
    return KernelBasis(ModelManifold.projective(n), pn_functions(n))


_PREFIXES = ["xi", "chi", "psi", "phi", "omega"]


def product_kernel_basis(manifold: ModelManifold) -> KernelBasis:
    """Concatenate the P^n bases of every projective factor; rigid factors add nothing."""
    funcs = []
    proj = manifold.projective_indices
    if not proj:
        raise EmptyKernelError(f"{manifold} has no projective factor: d = 0")
    for rank, i in enumerate(proj):
        prefix = _PREFIXES[rank] if rank < len(_PREFIXES) else f"f{i}"
        funcs.extend(pn_functions(manifold.factors[i].n, factor=i, prefix=prefix))
    return KernelBasis(manifold, funcs)


def kernel_basis(manifold: ModelManifold) -> KernelBasis:
    if len(manifold.factors) == 1 and isinstance(manifold.factors[0], Projective):
        return pn_kernel_basis(manifold.factors[0].n)
    return product_kernel_basis(manifold)


def evaluate(basis: KernelBasis, p) -> np.ndarray:
    return basis.evaluate(p)


# ---------------------------------------------------------------------------
# symmetry groups


def monomial_matrix(perm: Sequence[int], phase: Sequence[complex] | None = None) -> np.ndarray:
    """Unitary matrix of ``(g z)[i] = phase[i] * z[perm[i]]``."""
    size = len(perm)
    if sorted(perm) != list(range(size)):
        raise ValueError(f"not a permutation: {perm!r}")
    phase = np.ones(size, dtype=complex) if phase is None else np.asarray(phase, dtype=complex)
    if phase.shape != (size,) or np.max(np.abs(np.abs(phase) - 1)) > 1e-12:
        raise ValueError("phases must be unit complex numbers, one per coordinate")
    g = np.zeros((size, size), dtype=complex)
    g[np.arange(size), list(perm)] = phase
    return g


def _element_key(mats) -> tuple:
    key = []
    for g in mats:
        if g is None:
            key.append(None)
        else:
            key.append(tuple(np.round(g.ravel(), 9) + 0.0))
    return tuple(key)


@dataclass(frozen=True, eq=False)
class SymmetryGroup:
    """Finite group of coordinate permutations with unit phases, per projective factor.

    Each element is a tuple with one unitary monomial matrix per factor
    (``None`` on rigid factors).
    """

    manifold: ModelManifold
    elements: tuple

    def __post_init__(self):
        elems = tuple(tuple(e) for e in self.elements)
        object.__setattr__(self, "elements", elems)
        self._verify()

    def _verify(self):
        keys = {_element_key(e) for e in self.elements}
        if len(keys) != len(self.elements):
            raise ValueError("duplicate group elements")
        identity = _element_key(self._identity())
        if identity not in keys:
            raise ValueError("group does not contain the identity")
        for g in self.elements:
            if _element_key(self._inverse(g)) not in keys:
                raise ValueError("group is not closed under inverses")
            for h in self.elements:
                if _element_key(self._compose(g, h)) not in keys:
                    raise ValueError("group is not closed under composition")

    def _identity(self):
        return tuple(None if isinstance(f, Rigid) else np.eye(f.n + 1, dtype=complex)
                     for f in self.manifold.factors)

    @staticmethod
    def _compose(g, h):
        return tuple(None if a is None else a @ b for a, b in zip(g, h))

    @staticmethod
    def _inverse(g):
        return tuple(None if a is None else a.conj().T for a in g)

    @classmethod
    def generate(cls, manifold: ModelManifold, generators, max_order: int = 100000) -> "SymmetryGroup":
        """Closure of ``generators`` under composition."""
        base = cls.__new__(cls)
        object.__setattr__(base, "manifold", manifold)
        gens = [cls._lift(manifold, g) for g in generators]
        identity = base._identity()
        seen = {_element_key(identity): identity}
        frontier = [identity]
        while frontier:
            new = []
            for g in frontier:
                for s in gens:
                    h = cls._compose(s, g)
                    k = _element_key(h)
                    if k not in seen:
                        seen[k] = h
                        new.append(h)
                        if len(seen) > max_order:
                            raise ValueError("group generation exceeded max_order")
            frontier = new
        return cls(manifold, tuple(seen.values()))

    @staticmethod
    def _lift(manifold, g):
        """Accept per-factor tuples, a single matrix, or (perm, phase) pairs."""
        if isinstance(g, np.ndarray) and len(manifold.factors) == 1:
            g = (g,)
        elif isinstance(g, dict) and len(manifold.factors) == 1 and "factors" not in g:
            g = (g,)
        elif isinstance(g, dict) and "factors" in g:
            g = tuple(g["factors"])
        out = []
        for comp, fac in zip(g, manifold.factors):
            if isinstance(fac, Rigid) or comp is None:
                out.append(None if isinstance(fac, Rigid) else np.eye(fac.n + 1, dtype=complex))
            elif isinstance(comp, dict):
                phase = comp.get("phase")
                if phase is not None:
                    phase = [complex(*ph) if isinstance(ph, (list, tuple)) else complex(ph) for ph in phase]
                out.append(monomial_matrix(comp["perm"], phase))
            else:
                out.append(np.asarray(comp, dtype=complex))
        if len(out) != len(manifold.factors):
            raise DimensionMismatchError("group element does not match the manifold factors")
        return tuple(out)

    @classmethod
    def sign_flips(cls, manifold: ModelManifold) -> "SymmetryGroup":
        """All coordinate sign changes, independently on every projective factor."""
        gens = []
        for i in manifold.projective_indices:
            size = manifold.factors[i].n + 1
            for a in range(size):
                phase = np.ones(size)
                phase[a] = -1
                g = [None if isinstance(f, Rigid) else np.eye(f.n + 1, dtype=complex)
                     for f in manifold.factors]
                g[i] = monomial_matrix(range(size), phase)
                gens.append(tuple(g))
        return cls.generate(manifold, gens)

    @classmethod
    def permutations(cls, manifold: ModelManifold) -> "SymmetryGroup":
        """All coordinate permutations of a single P^n."""
        (fac,) = manifold.factors
        size = fac.n + 1
        elems = [(monomial_matrix(p),) for p in itertools.permutations(range(size))]
        return cls(manifold, tuple(elems))

    def __len__(self):
        return len(self.elements)

    def act(self, g, p: tuple) -> tuple:
        return tuple(comp if a is None else a @ comp for a, comp in zip(g, p))

    def orbit(self, p: tuple) -> list[tuple]:
        """Projectively distinct images of ``p``, in element order."""
        seen = {}
        for g in self.elements:
            q = self.act(g, p)
            k = point_key(self.manifold, q)
            if k not in seen:
                seen[k] = q
        return list(seen.values())

    def average(self, f: KernelFunction) -> KernelFunction:
        acc = np.zeros_like(f.matrix)
        for g in self.elements:
            a = g[f.factor]
            acc += a.conj().T @ f.matrix @ a
        acc /= len(self.elements)
        acc[np.abs(acc) < 1e-15] = 0
        label = f.label if np.allclose(acc, f.matrix, atol=1e-14) else f"avg({f.label})"
        return KernelFunction(f.factor, acc, label)

    def to_dict(self):
        elems = []
        for g in self.elements:
            comps = []
            for a in g:
                if a is None:
                    comps.append(None)
                    continue
                perm = [int(np.argmax(np.abs(row))) for row in a]
                phase = [[float(a[i, j].real), float(a[i, j].imag)] for i, j in enumerate(perm)]
                comps.append({"perm": perm, "phase": phase})
            elems.append({"factors": comps})
        return {"elements": elems}

    @classmethod
    def from_dict(cls, manifold: ModelManifold, data) -> "SymmetryGroup":
        if "generators" in data:
            return cls.generate(manifold, data["generators"])
        return cls(manifold, tuple(cls._lift(manifold, g) for g in data["elements"]))


def invariant_subbasis(basis: KernelBasis, group: SymmetryGroup, seed: int = DEFAULT_SEED,
                       rtol: float = 1e-9, oversample: int = 4) -> KernelBasis:
    """Basis of the group-invariant part of span(basis).

    Every function is replaced by its exact group average; a maximal
    independent subset is then picked by pivoted QR on the values at
    ``oversample * d`` random points, with rank decided by singular values
    above ``rtol`` times the largest.
    """
    averaged = [group.average(f) for f in basis]
    averaged = [f for f in averaged if not f.is_zero]
    if not averaged:
        return KernelBasis(basis.manifold, ())
    rng = rng_for(seed, "invariant_subbasis")
    npts = max(oversample * len(basis), 8)
    pts = random_points(basis.manifold, npts, rng)
    vals = KernelBasis(basis.manifold, averaged).matrix(pts)
    sv = svd(vals, compute_uv=False)
    rank = int(np.sum(sv > rtol * sv[0])) if sv[0] > 0 else 0
    _, _, piv = qr(vals.T, pivoting=True, mode="economic")
    keep = sorted(piv[:rank])
    return KernelBasis(basis.manifold, [averaged[i] for i in keep])


# ---------------------------------------------------------------------------
# numerical checks


def mean_zero_check(functions: Iterable[KernelFunction], manifold: ModelManifold,
                    samples: int = 100_000, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Monte Carlo means against the uniform measure; rows are (mean, standard error)."""
    if samples < 1000:
        raise ValueError("mean_zero_check needs at least 1000 samples")
    funcs = list(functions)
    rng = rng_for(seed, "mean_zero")
    stacks = {i: sphere_points(rng, manifold.factors[i].n + 1, samples)
              for i in manifold.projective_indices}
    out = np.zeros((len(funcs), 2))
    for j, f in enumerate(funcs):
        v = f.values(stacks[f.factor])
        out[j] = v.mean(), v.std(ddof=1) / np.sqrt(samples)
    return out


def _tangent_frame(x: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the tangent space of the unit sphere at real vector x."""
    dim = x.size
    q, _ = np.linalg.qr(np.column_stack([x, np.eye(dim)]))
    frame = q[:, 1:dim]
    return frame


def laplace_eigen_check(n: int, fn, p, h: float = 1e-3) -> float:
    """|Delta_S f + 4(n+1) f| at p on S^{2n+1} by tangential central differences.

    ``fn`` is an index into ``pn_kernel_basis(n)`` or a KernelFunction on
    C^{n+1}.  Stencil points ``p + h e`` are projected back onto the sphere,
    which places them on the great circle through p at angle arctan(h).
    """
    if not 1e-5 <= h <= 1e-2:
        raise ValueError(f"step h={h} outside [1e-5, 1e-2]")
    f = pn_kernel_basis(n)[fn] if isinstance(fn, (int, np.integer)) else fn
    z = normalize_coords(p)
    if z.size != n + 1:
        raise DimensionMismatchError("point dimension does not match n")
    x = np.concatenate([z.real, z.imag])
    frame = _tangent_frame(x)
    theta = np.arctan(h)

    def val(v):
        w = v / np.linalg.norm(v)
        return f.values(w[: n + 1] + 1j * w[n + 1:])[0]

    f0 = val(x)
    lap = 0.0
    for e in frame.T:
        lap += (val(x + h * e) - 2 * f0 + val(x - h * e)) / theta ** 2
    return float(abs(lap + 4 * (n + 1) * f0))
