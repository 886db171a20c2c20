"""Iterative schemes for split common null point problems.

All schemes are built from the averaged operator

    S(x) = J^B (x - gamma A^T (A x - J^F(A x)))

on a (1, 1) instance, with ``J`` the resolvents at a common ``lam``:

* ``fb``        x+ = S(x)                                  (weak convergence)
* ``product``   x+ = x + gamma (sum_i (J^Bi x - x) + sum_j A_j^T (J^Fj A_j x - A_j x))
                for any number of mappings, L = p + sum_j ||A_j||^2
* ``halpern``   x+ = a_k x0 + (1 - a_k) S(x)
* ``haugazeau`` x+ = T(x0, x, (x + S(x)) / 2)

Convergence requires ``0 < gamma < 2 / L`` where ``L = ||A^T A||``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .linops import as_vector, gram_norm, safe_lipschitz
from .mappings import Affine, AffineVI, NormalCone, ProductMap, ResolventError, ResolventParams, Zero

ALGORITHMS = ("fb", "product", "halpern", "haugazeau")
_ALIASES = {
    "forwardbackward": "fb",
    "forward_backward": "fb",
    "productspace": "product",
    "product_space": "product",
}

CONVERGED = "Converged"
MAX_ITER = "MaxIterReached"
BREAKDOWN = "Breakdown"


class Breakdown(RuntimeError):
    """An iteration cannot be continued; ``reason`` says why."""

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class StepSizeError(ValueError):
    """Explicit step size outside ``(0, 2 / L_safe)``."""


def alpha_schedule(spec):
    """Return ``k -> alpha_k`` for ``"harmonic"`` or ``"power:q"`` with ``0 < q <= 1``.

    Both satisfy ``alpha_k -> 0`` and ``sum alpha_k = inf``.
    """
    if callable(spec):
        return spec
    s = str(spec).strip().lower()
    if s == "harmonic":
        return lambda k: 1.0 / (k + 1)
    if s.startswith("power:"):
        try:
            q = float(s.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad power-law exponent in {spec!r}") from None
        if not 0 < q <= 1:
            raise ValueError(f"power-law exponent must lie in (0, 1], got {q}")
        return lambda k: (k + 1.0) ** (-q)
    raise ValueError(f"unknown alpha schedule {spec!r}; use 'harmonic' or 'power:q'")


@dataclass(frozen=True)
class SolverConfig:
    """Settings for :func:`run`.

    ``gamma=None`` selects ``gamma = gamma_fraction * 2 / L_safe``.
    ``record_every=None`` records every iterate up to 1000, then every 10th.
    ``relaxation_c`` applies only to ``fb``; ``None`` runs the plain scheme.
    """

    algorithm: str = "fb"
    lam: float = 1.0
    gamma: float | None = None
    gamma_fraction: float = 0.5
    alpha: str = "harmonic"
    relaxation_c: float | None = None
    tol: float = 1e-8
    max_iter: int = 100_000
    record_every: int | None = None
    inner_tol: float = 1e-12
    inner_max_iter: int = 10_000

    def __post_init__(self):
        algo = str(self.algorithm).strip().lower()
        algo = _ALIASES.get(algo, algo)
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        object.__setattr__(self, "algorithm", algo)
        if not 0 < self.gamma_fraction < 1:
            raise ValueError("gamma_fraction must lie in (0, 1)")
        if self.gamma is not None and not self.gamma > 0:
            raise StepSizeError(f"gamma must be positive, got {self.gamma}")
        if self.relaxation_c is not None and not 0 < self.relaxation_c < 1:
            raise ValueError("relaxation_c must lie in (0, 1)")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.record_every is not None and self.record_every < 1:
            raise ValueError("record_every must be positive")
        alpha_schedule(self.alpha)

    @property
    def params(self):
        return ResolventParams(self.lam, self.inner_tol, self.inner_max_iter)


@dataclass
class RunTrace:
    """Outcome of :func:`run`.

    ``history`` rows are ``(k, primal_residual, image_residual, step_norm)``
    evaluated at ``x^k``, with ``step_norm = ||x^{k+1} - x^k||`` (NaN on the
    terminal row, where no step is taken).
    """

    algorithm: str
    status: str
    final_point: np.ndarray
    iterations_used: int
    history: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    gamma: float = float("nan")
    lipschitz: float = float("nan")
    reason: str = ""

    @property
    def converged(self):
        return self.status == CONVERGED

    @property
    def final_residuals(self):
        _, pr, ir, _ = self.history[-1]
        return pr, ir

    def iterate_array(self):
        return np.array([x for _, x in self.iterates])


# ---------------------------------------------------------------------------
# step sizes


def _require_11(inst, what):
    if inst.p != 1 or inst.r != 1:
        raise ValueError(f"{what} needs a (1, 1) instance, got p={inst.p}, r={inst.r}; lift it first")


def lipschitz_bound(inst, algorithm):
    """``L`` entering the step-size condition for ``algorithm`` (before the safety factor)."""
    if algorithm == "product":
        return inst.p + sum(gram_norm(A) for A in inst.a_ops)
    _require_11(inst, algorithm)
    return gram_norm(inst.a_ops[0])


def resolve_gamma(inst, cfg):
    """Return ``(gamma, L)`` for ``cfg`` on ``inst``, rejecting invalid explicit steps."""
    L = lipschitz_bound(inst, cfg.algorithm)
    L_safe = safe_lipschitz(L)
    if L_safe == 0.0:
        # A = 0: the image correction vanishes and any positive step is admissible
        return (cfg.gamma if cfg.gamma is not None else 1.0), L
    upper = 2.0 / L_safe
    if cfg.gamma is None:
        return cfg.gamma_fraction * upper, L
    if not 0 < cfg.gamma < upper:
        raise StepSizeError(
            f"gamma = {cfg.gamma!r} is outside (0, 2/L_safe) = (0, {upper!r}) with L = {L!r}"
        )
    return cfg.gamma, L


def _gamma(inst, cfg):
    return cfg.gamma if cfg.gamma is not None else resolve_gamma(inst, cfg)[0]


# ---------------------------------------------------------------------------
# single steps


def _norm(v):
    return math.sqrt(float(v @ v))


def _fb_core(inst, gamma, params, x):
    """``(S(x), primal_residual(x), image_residual(x))`` sharing the image resolvent."""
    B, F, A = inst.b_maps[0], inst.f_maps[0], inst.a_ops[0].matrix
    Ax = A @ x
    d = Ax - F.resolve(Ax, params)
    Sx = B.resolve(x - gamma * (A.T @ d), params)
    pr = 0.0 if isinstance(B, Zero) else _norm(x - B.resolve(x, params))
    return Sx, pr, _norm(d)


def _product_core(inst, gamma, params, x):
    total = np.zeros_like(x)
    pr = ir = 0.0
    for m in inst.b_maps:
        diff = m.resolve(x, params) - x
        pr = max(pr, _norm(diff))
        total += diff
    for m, A in zip(inst.f_maps, inst.a_ops):
        y = A.matrix @ x
        diff = m.resolve(y, params) - y
        ir = max(ir, _norm(diff))
        total += A.matrix.T @ diff
    return x + gamma * total, pr, ir


def fb_step(inst, cfg, x):
    """``J^B(x - gamma A^T (I - J^F) A x)`` on a (1, 1) instance."""
    _require_11(inst, "fb_step")
    x = as_vector(x, inst.n1)
    return _fb_core(inst, _gamma(inst, cfg), cfg.params, x)[0]


def product_step(inst, cfg, x):
    """Simultaneous update over all ``p`` domain and ``r`` image mappings."""
    x = as_vector(x, inst.n1)
    if cfg.gamma is None:
        cfg = replace(cfg, algorithm="product")
    return _product_core(inst, _gamma(inst, cfg), cfg.params, x)[0]


def halpern_step(inst, cfg, x0, x, k):
    """``alpha_k x0 + (1 - alpha_k) S(x)``."""
    a = alpha_schedule(cfg.alpha)(k)
    return a * as_vector(x0, inst.n1) + (1.0 - a) * fb_step(inst, cfg, x)


def relax(c, S_output, x):
    """``c x + (1 - c) S_output``: same fixed points as ``S``, asymptotically regular."""
    if not 0 < c < 1:
        raise ValueError(f"relaxation constant must lie in (0, 1), got {c}")
    return c * np.asarray(x, dtype=float) + (1.0 - c) * np.asarray(S_output, dtype=float)


def haugazeau_T(x, y, z):
    """Projection of ``x`` onto ``H(x, y) & H(y, z)``, ``H(a, b) = {u : <u - b, a - b> <= 0}``.

    The normals count as parallel when ``rho <= 1e-14 max(1, mu nu)``; the
    intersection is then taken to be ``H(y, z)`` when
    ``pi >= -1e-12 max(1, sqrt(mu nu))``.

    Raises
    ------
    Breakdown
        When the two halfspaces are parallel with disjoint interiors
        (``rho = 0`` and ``pi < 0``), a case the closed form leaves undefined.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    xy = x - y
    yz = y - z
    pi = float(xy @ yz)
    mu = float(xy @ xy)
    nu = float(yz @ yz)
    # rho = mu nu - pi^2 = mu ||w||^2 with w the part of yz orthogonal to xy;
    # computing it through w avoids cancellation for nearly parallel normals
    w = yz - (pi / mu) * xy if mu > 0 else yz
    ww = float(w @ w)
    rho = mu * ww
    rho_tol = 1e-14 * max(1.0, mu * nu)
    pi_tol = 1e-12 * max(1.0, math.sqrt(mu * nu))
    if rho <= rho_tol:
        if pi >= -pi_tol:
            return z.copy()
        raise Breakdown("inconsistent halfspaces (rho = 0, pi < 0)")
    if pi * nu >= rho:
        return x + (1.0 + pi / nu) * (z - y)
    # y + (nu / rho)(pi xy + mu (z - y)) with pi xy - mu yz = -mu w
    return y - (nu / ww) * w


def haugazeau_step(inst, cfg, x0, x):
    """``T(x0, x, (x + S(x)) / 2)``."""
    x = as_vector(x, inst.n1)
    half = relax(0.5, fb_step(inst, cfg, x), x)
    return haugazeau_T(x0, x, half)


# ---------------------------------------------------------------------------
# driver


def _affine_vi_maps(inst):
    stack = list(inst.b_maps) + list(inst.f_maps)
    while stack:
        m = stack.pop()
        if isinstance(m, ProductMap):
            stack.extend(m.components)
        elif isinstance(m, AffineVI):
            yield m


def _record_due(k, every):
    if every is None:
        return k < 1000 or k % 10 == 0
    return k % every == 0


def run(inst, cfg, x0=None):
    """Iterate the configured scheme from ``x0`` (default: zero vector).

    Stops when ``max(primal_residual, image_residual) <= cfg.tol`` or after
    ``cfg.max_iter`` steps. ``fb``, ``halpern`` and ``haugazeau`` need a
    (1, 1) instance; apply :func:`~scnpp.problems.lift_to_product` first
    otherwise.

    Returns
    -------
    RunTrace
    """
    algo = cfg.algorithm
    if algo != "product":
        _require_11(inst, algo)
    x0 = np.zeros(inst.n1) if x0 is None else as_vector(x0, inst.n1).copy()
    gamma, L = resolve_gamma(inst, cfg)
    cfg = replace(cfg, gamma=gamma)
    params = cfg.params
    for m in _affine_vi_maps(inst):
        if not m.is_contractive(cfg.lam):
            warnings.warn(
                f"AffineVI: lam * ||G|| = {cfg.lam * m.g_norm:.3g} >= 1; "
                "inner resolvent loop switches to Douglas-Rachford splitting",
                stacklevel=2,
            )
    alpha = alpha_schedule(cfg.alpha)
    c = cfg.relaxation_c

    history, iterates = [], []
    x = x0
    status, reason = MAX_ITER, ""
    k = 0
    while True:
        try:
            if algo == "product":
                nxt, pr, ir = _product_core(inst, gamma, params, x)
            else:
                Sx, pr, ir = _fb_core(inst, gamma, params, x)
        except ResolventError as exc:
            status, reason = BREAKDOWN, f"resolvent failure: {exc}"
            pr = ir = float("nan")
            break
        if max(pr, ir) <= cfg.tol:
            status = CONVERGED
            break
        if k >= cfg.max_iter:
            break
        try:
            if algo == "fb":
                nxt = Sx if c is None else relax(c, Sx, x)
            elif algo == "halpern":
                a = alpha(k)
                nxt = a * x0 + (1.0 - a) * Sx
            elif algo == "haugazeau":
                nxt = haugazeau_T(x0, x, 0.5 * (x + Sx))
        except Breakdown as exc:
            status, reason = BREAKDOWN, exc.reason
            break
        step = _norm(nxt - x)
        if not math.isfinite(step):
            status, reason = BREAKDOWN, "non-finite iterate"
            break
        if _record_due(k, cfg.record_every):
            history.append((k, pr, ir, step))
            iterates.append((k, x))
        x = nxt
        k += 1

    history.append((k, pr, ir, float("nan")))
    iterates.append((k, x))
    return RunTrace(
        algorithm=algo,
        status=status,
        final_point=x,
        iterations_used=k,
        history=history,
        iterates=iterates,
        gamma=gamma,
        lipschitz=L,
        reason=reason,
    )


def affine_anchor_projection(inst, x0):
    """Nearest point of Gamma to ``x0`` when every mapping is an affine normal cone or zero.

    Diagnostic only: compares a strongly convergent run's limit with the
    projection of its anchor. Returns ``None`` for other instances.
    """
    rows, rhs = [], []
    for m in inst.b_maps:
        if isinstance(m, Zero):
            continue
        if not (isinstance(m, NormalCone) and isinstance(m.set, Affine)):
            return None
        rows.append(m.set.E.matrix)
        rhs.append(m.set.d)
    for m, A in zip(inst.f_maps, inst.a_ops):
        if isinstance(m, Zero):
            continue
        if not (isinstance(m, NormalCone) and isinstance(m.set, Affine)):
            return None
        rows.append(m.set.E.matrix @ A.matrix)
        rhs.append(m.set.d)
    x0 = as_vector(x0, inst.n1)
    if not rows:
        return x0.copy()
    M = np.vstack(rows)
    d = np.concatenate(rhs)
    return x0 - np.linalg.pinv(M) @ (M @ x0 - d)
