"""Split common null point instances, validation and reductions.

An instance asks for ``x`` in ``R^n1`` with ``0 in B_i(x)`` for every
``i`` and ``0 in F_j(A_j x)`` for every ``j``. Its solution set is written
Gamma below.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .linops import LinearOp, as_vector, lift_operator
from .mappings import (
    DEFAULT_PARAMS,
    AffineVI,
    Box,
    MonotoneMap,
    NormalCone,
    ProductMap,
    Zero,
)

CERTIFICATE_TOL = 1e-9


class ValidationError(ValueError):
    """An instance violates one or more invariants; all of them are in ``issues``."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("invalid instance:\n" + "\n".join(f"  - {m}" for m in self.issues))


@dataclass(frozen=True, eq=False)
class ScnppInstance:
    """Data of a split common null point problem.

    Parameters
    ----------
    n1 : int
        Dimension of the domain space.
    b_maps : sequence of MonotoneMap
        Mappings on ``R^n1``.
    f_maps : sequence of MonotoneMap
        Mappings on the image spaces; ``f_maps[j]`` acts on ``R^{a_ops[j].rows}``.
    a_ops : sequence of LinearOp
        One operator per image mapping.
    certified_solution : array_like, optional
        A known point of Gamma, checked by :func:`validate`.
    certified_empty : bool, optional
        Metadata: Gamma is known to be empty.
    """

    n1: int
    b_maps: tuple = ()
    f_maps: tuple = ()
    a_ops: tuple = ()
    certified_solution: np.ndarray | None = None
    certified_empty: bool | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "b_maps", tuple(self.b_maps))
        object.__setattr__(self, "f_maps", tuple(self.f_maps))
        object.__setattr__(
            self, "a_ops", tuple(op if isinstance(op, LinearOp) else LinearOp(op) for op in self.a_ops)
        )
        if self.certified_solution is not None:
            sol = np.array(self.certified_solution, dtype=float).reshape(-1)
            sol.setflags(write=False)
            object.__setattr__(self, "certified_solution", sol)

    @property
    def p(self):
        return len(self.b_maps)

    @property
    def r(self):
        return len(self.f_maps)

    def primal_residual(self, x, params=DEFAULT_PARAMS):
        """``max_i ||x - J^{B_i}(x)||`` (0 when there are no B-mappings)."""
        return max((float(np.linalg.norm(x - m.resolve(x, params))) for m in self.b_maps), default=0.0)

    def image_residual(self, x, params=DEFAULT_PARAMS):
        """``max_j ||A_j x - J^{F_j}(A_j x)||``."""
        out = 0.0
        for m, A in zip(self.f_maps, self.a_ops):
            y = A.matrix @ x
            out = max(out, float(np.linalg.norm(y - m.resolve(y, params))))
        return out

    def residuals(self, x, params=DEFAULT_PARAMS):
        x = as_vector(x, self.n1)
        return self.primal_residual(x, params), self.image_residual(x, params)


def instance_issues(inst, params=DEFAULT_PARAMS):
    """Every invariant violation of ``inst``, as human-readable strings."""
    issues = []
    if inst.n1 < 1:
        issues.append(f"space.n1 must be positive, got {inst.n1}")
    if inst.p == 0 and inst.r == 0:
        issues.append("instance has no mappings (p = r = 0)")
    if len(inst.a_ops) != inst.r:
        issues.append(f"{inst.r} image mappings but {len(inst.a_ops)} operators")
    for i, m in enumerate(inst.b_maps):
        if not isinstance(m, MonotoneMap):
            issues.append(f"b[{i}]: not a monotone mapping ({type(m).__name__})")
            continue
        issues += [f"b[{i}]: {msg}" for msg in m.issues()]
        if m.dim != inst.n1:
            issues.append(f"b[{i}]: mapping dimension {m.dim} != n1 = {inst.n1}")
    for j, m in enumerate(inst.f_maps):
        if not isinstance(m, MonotoneMap):
            issues.append(f"f[{j}]: not a monotone mapping ({type(m).__name__})")
            continue
        issues += [f"f[{j}]: {msg}" for msg in m.issues()]
        if j < len(inst.a_ops) and inst.a_ops[j].rows != m.dim:
            issues.append(f"a[{j}]: operator has {inst.a_ops[j].rows} rows but f[{j}] has dimension {m.dim}")
    for j, A in enumerate(inst.a_ops):
        if A.cols != inst.n1:
            issues.append(f"a[{j}]: operator has {A.cols} columns, expected n1 = {inst.n1}")
    sol = inst.certified_solution
    if sol is not None and not issues:
        if sol.shape != (inst.n1,):
            issues.append(f"certified_solution has dimension {sol.size}, expected {inst.n1}")
        else:
            try:
                pr, ir = inst.residuals(sol, params)
            except Exception as exc:  # resolvent failure is itself a certification failure
                issues.append(f"certified_solution: residual evaluation failed ({exc})")
            else:
                if pr > CERTIFICATE_TOL:
                    issues.append(f"certified_solution: primal residual {pr:.6e} exceeds {CERTIFICATE_TOL:g}")
                if ir > CERTIFICATE_TOL:
                    issues.append(f"certified_solution: image residual {ir:.6e} exceeds {CERTIFICATE_TOL:g}")
    if sol is not None and inst.certified_empty:
        issues.append("certified_solution given for an instance marked certified_empty")
    return issues


def validate(inst, params=DEFAULT_PARAMS):
    """Return ``inst`` unchanged, or raise :class:`ValidationError` listing every violation."""
    issues = instance_issues(inst, params)
    if issues:
        raise ValidationError(issues)
    return inst


def lift_to_product(inst):
    """Rewrite an instance with ``p`` B- and ``r`` F-mappings as a (1, 1) instance.

    The new domain mapping is :class:`Zero`; the image mapping is the product
    ``B_1 x ... x B_p x F_1 x ... x F_r`` acting on the stacked vector
    ``(x, ..., x, A_1 x, ..., A_r x)``.
    """
    if inst.p == 0 and inst.r == 0:
        raise ValidationError(["cannot lift an instance with no mappings"])
    A = lift_operator(inst.p, list(inst.a_ops), inst.n1)
    return ScnppInstance(
        n1=inst.n1,
        b_maps=(Zero(inst.n1),),
        f_maps=(ProductMap(inst.b_maps + inst.f_maps),),
        a_ops=(A,),
        certified_solution=inst.certified_solution,
        certified_empty=inst.certified_empty,
        name=f"{inst.name} (lifted)" if inst.name else "lifted",
    )


def svip_instance(G, c, C, F_side, A, certified_solution=None):
    """Instance whose domain mapping is the affine variational-inequality operator on ``C``.

    Zeros of ``v -> G v + c + N_C(v)`` are the VI solutions on ``C``; the image
    side asks ``0 in F_side(A x)``.
    """
    G = G if isinstance(G, LinearOp) else LinearOp(G)
    A = A if isinstance(A, LinearOp) else LinearOp(A)
    if C is None:
        raise ValidationError(["VI set C is required; an unconstrained affine VI is AffineMonotone"])
    if isinstance(C, Box) and not (np.all(np.isfinite(C.lo)) and np.all(np.isfinite(C.hi))):
        raise ValidationError(
            ["box with infinite bounds is not allowed: use AffineMonotone for the unconstrained VI "
             "or a halfspace for a one-sided constraint"]
        )
    inst = ScnppInstance(
        n1=G.cols,
        b_maps=(AffineVI(G, c, C),),
        f_maps=(F_side,),
        a_ops=(A,),
        certified_solution=certified_solution,
    )
    return validate(inst)


def feasibility_instance(sets_C, sets_Q, a_ops, certified_solution=None, certified_empty=None):
    """Multiple-sets split feasibility: ``x in all C_i`` and ``A_j x in Q_j``."""
    a_ops = tuple(op if isinstance(op, LinearOp) else LinearOp(op) for op in a_ops)
    dims = {s.dim for s in sets_C} | {op.cols for op in a_ops}
    if len(dims) != 1:
        raise ValidationError([f"inconsistent domain dimensions {sorted(dims)}"])
    (n1,) = dims
    inst = ScnppInstance(
        n1=n1,
        b_maps=tuple(NormalCone(s) for s in sets_C),
        f_maps=tuple(NormalCone(s) for s in sets_Q),
        a_ops=a_ops,
        certified_solution=certified_solution,
        certified_empty=certified_empty,
    )
    return validate(inst)


def with_solution(inst, x):
    """Copy of ``inst`` carrying ``x`` as its certified solution (validated)."""
    return validate(replace(inst, certified_solution=np.asarray(x, dtype=float)))


__all__ = [
    "ScnppInstance",
    "ValidationError",
    "instance_issues",
    "validate",
    "lift_to_product",
    "svip_instance",
    "feasibility_instance",
    "with_solution",
]
