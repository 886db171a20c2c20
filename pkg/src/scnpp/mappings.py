"""Maximal monotone mappings, represented through their resolvents.

A mapping ``B`` is never evaluated directly. Each catalog entry knows how to
compute ``J = (I + lam B)^{-1}``, which is single-valued and firmly
nonexpansive; its fixed points are exactly the zeros of ``B``.

Catalog
-------
Zero            B = 0, resolvent is the identity
NormalCone      B = N_C for a box, ball, halfspace or affine set; resolvent is P_C
SubdiffL1       B = weight * d||.||_1; resolvent is soft thresholding
AffineMonotone  B(v) = G v + c with G + G^T PSD; resolvent is a linear solve
AffineVI        B(v) = G v + c + N_C(v); resolvent by an inner fixed-point loop
ProductMap      blockwise product of other mappings (used by the product lift)
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .linops import LinearOp, as_vector, gram_norm

PSD_TOL = 1e-9
CONSISTENCY_TOL = 1e-9


class ResolventError(RuntimeError):
    """The inner loop of a resolvent failed to converge.

    Attributes
    ----------
    last : ndarray
        The last inner iterate.
    residual : float
        Its fixed-point residual.
    """

    def __init__(self, message, last, residual):
        super().__init__(message)
        self.last = last
        self.residual = residual


@dataclass(frozen=True)
class ResolventParams:
    lam: float = 1.0
    inner_tol: float = 1e-12
    inner_max_iter: int = 10000

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"resolvent parameter must be positive, got {self.lam}")
        if not self.inner_tol > 0:
            raise ValueError("inner_tol must be positive")
        if self.inner_max_iter < 1:
            raise ValueError("inner_max_iter must be positive")


DEFAULT_PARAMS = ResolventParams()


def _frozen(a):
    a = np.array(a, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# closed convex sets


@dataclass(frozen=True, eq=False)
class Box:
    """``{v : lo <= v <= hi}`` with finite bounds."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", _frozen(self.lo))
        object.__setattr__(self, "hi", _frozen(self.hi))

    @property
    def dim(self):
        return self.lo.size

    def issues(self):
        out = []
        if self.lo.shape != self.hi.shape:
            return [f"box bounds have shapes {self.lo.shape} and {self.hi.shape}"]
        if not (np.all(np.isfinite(self.lo)) and np.all(np.isfinite(self.hi))):
            out.append("box bounds must be finite (use a halfspace or AffineMonotone for unbounded directions)")
        elif np.any(self.lo > self.hi):
            out.append("box requires lo <= hi componentwise")
        return out

    def is_symmetric(self):
        return bool(np.array_equal(self.lo, -self.hi))

    def project(self, x):
        return np.minimum(np.maximum(x, self.lo), self.hi)


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed Euclidean ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.size

    def issues(self):
        if not (np.isfinite(self.radius) and self.radius > 0):
            return [f"ball radius must be positive and finite, got {self.radius}"]
        return []

    def is_symmetric(self):
        return not np.any(self.center)

    def project(self, x):
        d = x - self.center
        dn = np.linalg.norm(d)
        if dn <= self.radius:
            return x.copy()
        return self.center + (self.radius / dn) * d


@dataclass(frozen=True, eq=False)
class Halfspace:
    """``{v : <a, v> <= b}``."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a))
        object.__setattr__(self, "b", float(self.b))

    @property
    def dim(self):
        return self.a.size

    def issues(self):
        if not np.any(self.a):
            return ["halfspace normal must be nonzero"]
        return []

    def is_symmetric(self):
        return False

    def project(self, x):
        excess = float(self.a @ x) - self.b
        if excess <= 0:
            return x.copy()
        return x - (excess / float(self.a @ self.a)) * self.a


@dataclass(frozen=True, eq=False)
class Affine:
    """``{v : E v = d}``; ``E`` may be rank deficient if the system is consistent."""

    E: LinearOp
    d: np.ndarray

    def __post_init__(self):
        if not isinstance(self.E, LinearOp):
            object.__setattr__(self, "E", LinearOp(self.E))
        object.__setattr__(self, "d", _frozen(self.d))

    @property
    def dim(self):
        return self.E.cols

    @functools.cached_property
    def _pinv(self):
        return np.linalg.pinv(self.E.matrix)

    def issues(self):
        if self.d.shape != (self.E.rows,):
            return [f"affine set: E has {self.E.rows} rows but d has shape {self.d.shape}"]
        v = self._pinv @ self.d
        res = float(np.linalg.norm(self.E.matrix @ v - self.d))
        if res > CONSISTENCY_TOL:
            return [f"affine set: E v = d is inconsistent (least-squares residual {res:.3e})"]
        return []

    def is_symmetric(self):
        return not np.any(self.d)

    def project(self, x):
        return x - self._pinv @ (self.E.matrix @ x - self.d)


def project_set(s, x):
    """Euclidean projection of ``x`` onto the set described by ``s``."""
    return s.project(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# monotone mappings


class MonotoneMap:
    """Base class. Subclasses provide ``dim``, ``resolve`` and ``issues``."""

    odd: bool = False

    @property
    def kind(self):
        return type(self).__name__

    def resolve(self, x, params=DEFAULT_PARAMS):
        raise NotImplementedError

    def odd_permitted(self):
        return False

    def issues(self):
        """List of invariant violations (empty when valid)."""
        return []

    def _odd_issues(self):
        if self.odd and not self.odd_permitted():
            return [f"{self.kind}: odd=true is not permitted for this mapping (its resolvent is not odd)"]
        return []


@dataclass(frozen=True, eq=False)
class Zero(MonotoneMap):
    dim: int
    odd: bool = False

    def odd_permitted(self):
        return True

    def issues(self):
        return [] if self.dim >= 1 else ["Zero: dimension must be positive"]

    def resolve(self, x, params=DEFAULT_PARAMS):
        return np.array(x, dtype=float)


@dataclass(frozen=True, eq=False)
class NormalCone(MonotoneMap):
    """Normal cone of a closed convex set; the resolvent is the projection for every ``lam``."""

    set: Box | Ball | Halfspace | Affine
    odd: bool = False

    @property
    def kind(self):
        return "NormalCone" + type(self.set).__name__

    @property
    def dim(self):
        return self.set.dim

    def odd_permitted(self):
        return self.set.is_symmetric()

    def issues(self):
        return [f"{self.kind}: {m}" for m in self.set.issues()] + self._odd_issues()

    def resolve(self, x, params=DEFAULT_PARAMS):
        return self.set.project(x)


@dataclass(frozen=True, eq=False)
class SubdiffL1(MonotoneMap):
    """Subdifferential of ``weight * ||v||_1``."""

    dim: int
    weight: float = 1.0
    odd: bool = False

    def odd_permitted(self):
        return True

    def issues(self):
        out = []
        if not (self.weight > 0 and np.isfinite(self.weight)):
            out.append(f"SubdiffL1: weight must be positive, got {self.weight}")
        return out + self._odd_issues()

    def resolve(self, x, params=DEFAULT_PARAMS):
        x = np.asarray(x, dtype=float)
        t = params.lam * self.weight
        return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _psd_issues(kind, G):
    if G.rows != G.cols:
        return [f"{kind}: G must be square, got {G.rows}x{G.cols}"]
    emin = float(np.linalg.eigvalsh(G.matrix + G.matrix.T)[0])
    if emin < -PSD_TOL:
        return [f"{kind}: G + G^T is not positive semidefinite (smallest eigenvalue {emin:.6e})"]
    return []


@dataclass(frozen=True, eq=False)
class AffineMonotone(MonotoneMap):
    """Single-valued ``v -> G v + c`` with ``G + G^T`` positive semidefinite."""

    G: LinearOp
    c: np.ndarray
    odd: bool = False

    def __post_init__(self):
        if not isinstance(self.G, LinearOp):
            object.__setattr__(self, "G", LinearOp(self.G))
        object.__setattr__(self, "c", _frozen(self.c))

    @property
    def dim(self):
        return self.G.cols

    def odd_permitted(self):
        return not np.any(self.c)

    def issues(self):
        out = _psd_issues(self.kind, self.G)
        if self.c.shape != (self.G.rows,):
            out.append(f"{self.kind}: c has shape {self.c.shape}, expected ({self.G.rows},)")
        return out + self._odd_issues()

    def resolve(self, x, params=DEFAULT_PARAMS):
        x = np.asarray(x, dtype=float)
        lam = params.lam
        M = np.eye(self.dim) + lam * self.G.matrix
        try:
            return np.linalg.solve(M, x - lam * self.c)
        except np.linalg.LinAlgError as exc:
            raise ResolventError(f"AffineMonotone: linear solve failed ({exc})", x, float("nan")) from exc


@dataclass(frozen=True, eq=False)
class AffineVI(MonotoneMap):
    """``v -> G v + c + N_C(v)``: the variational-inequality operator on ``C``.

    Zeros are the solutions of ``<G v + c, y - v> >= 0 for all y in C``.
    """

    G: LinearOp
    c: np.ndarray
    set: Box | Ball | Halfspace | Affine
    odd: bool = False

    def __post_init__(self):
        if not isinstance(self.G, LinearOp):
            object.__setattr__(self, "G", LinearOp(self.G))
        object.__setattr__(self, "c", _frozen(self.c))

    @property
    def dim(self):
        return self.G.cols

    @functools.cached_property
    def g_norm(self):
        """Spectral norm of ``G``."""
        return float(np.sqrt(gram_norm(self.G)))

    @functools.cached_property
    def _min_sym_eig(self):
        sym = 0.5 * (self.G.matrix + self.G.matrix.T)
        return max(float(np.linalg.eigvalsh(sym)[0]), 0.0)

    def _dr_solver(self, lam):
        """Step ``t`` and ``(I + t (I + lam G))^{-1}`` for the splitting loop, cached per ``lam``."""
        cache = self.__dict__.setdefault("_dr_cache", {})
        if lam not in cache:
            n = self.dim
            M = np.eye(n) + lam * self.G.matrix
            mu = 1.0 + lam * self._min_sym_eig
            t = 1.0 / np.sqrt(mu * np.linalg.norm(M, 2))
            cache[lam] = (t, np.linalg.inv(np.eye(n) + t * M))
        return cache[lam]

    def is_contractive(self, lam):
        return lam * self.g_norm < 1.0

    def issues(self):
        out = _psd_issues(self.kind, self.G)
        if self.c.shape != (self.G.rows,):
            out.append(f"{self.kind}: c has shape {self.c.shape}, expected ({self.G.rows},)")
        if self.set.dim != self.G.cols:
            out.append(f"{self.kind}: set dimension {self.set.dim} does not match G ({self.G.cols})")
        out += [f"{self.kind}: {m}" for m in self.set.issues()]
        return out + self._odd_issues()

    def inner_residual(self, v, x, lam):
        """``||v - P_C(x - lam (G v + c))||``."""
        t = self.set.project(x - lam * (self.G.matrix @ v + self.c))
        return float(np.linalg.norm(v - t)), t

    def resolve(self, x, params=DEFAULT_PARAMS):
        x = np.asarray(x, dtype=float)
        lam = params.lam
        if self.is_contractive(lam):
            # v <- P_C(x - lam (G v + c)) contracts with modulus lam*||G||
            v = self.set.project(x)
            for _ in range(params.inner_max_iter):
                res, t = self.inner_residual(v, x, lam)
                if res <= params.inner_tol:
                    return v
                v = t
        else:
            # Douglas-Rachford on 0 in M v - (x - lam c) + N_C(v), M = I + lam G.
            # M is 1-strongly monotone, so the splitting converges linearly
            # even when G is far from symmetric.
            t, solve = self._dr_solver(lam)
            shift = t * (x - lam * self.c)
            u = x.copy()
            for _ in range(params.inner_max_iter):
                v = self.set.project(u)
                res, _ = self.inner_residual(v, x, lam)
                if res <= params.inner_tol:
                    return v
                u = u + solve @ (2.0 * v - u + shift) - v
            v = self.set.project(u)
        res, _ = self.inner_residual(v, x, lam)
        if res <= params.inner_tol:
            return v
        raise ResolventError(
            f"AffineVI resolvent did not converge in {params.inner_max_iter} inner iterations "
            f"(residual {res:.3e})",
            v,
            res,
        )


@dataclass(frozen=True, eq=False)
class ProductMap(MonotoneMap):
    """Product of mappings acting on consecutive blocks of a vector."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def dim(self):
        return sum(m.dim for m in self.components)

    @property
    def odd(self):
        return all(m.odd for m in self.components)

    @property
    def offsets(self):
        return np.cumsum([0] + [m.dim for m in self.components])

    def issues(self):
        return [msg for m in self.components for msg in m.issues()]

    def resolve(self, x, params=DEFAULT_PARAMS):
        x = np.asarray(x, dtype=float)
        off = self.offsets
        return np.concatenate(
            [m.resolve(x[a:b], params) for m, a, b in zip(self.components, off[:-1], off[1:])]
        )


def resolve(m, params, x):
    """Evaluate the resolvent ``(I + lam m)^{-1} x``."""
    x = as_vector(x, m.dim)
    return m.resolve(x, params)


def fixed_point_residual(m, params, x):
    """``||x - J(x)||``; zero exactly at the null points of ``m``."""
    x = as_vector(x, m.dim)
    return float(np.linalg.norm(x - m.resolve(x, params)))
