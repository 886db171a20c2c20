"""Random instance families with constructed solutions."""

import numpy as np

from scnpp.linops import LinearOp
from scnpp.mappings import (
    Affine,
    AffineMonotone,
    AffineVI,
    Ball,
    Box,
    Halfspace,
    NormalCone,
    ProductMap,
    SubdiffL1,
    Zero,
)
from scnpp.problems import ScnppInstance, feasibility_instance, validate


def canonical():
    """x in [0, 1] and 2x in [2, 3]; the only solution is x = 1."""
    return feasibility_instance([Box([0.0], [1.0])], [Box([2.0], [3.0])], [[[2.0]]], certified_solution=[1.0])


def empty():
    """x in [0, 1] and x in [5, 6]: no solution."""
    return feasibility_instance([Box([0.0], [1.0])], [Box([5.0], [6.0])], [[[1.0]]], certified_empty=True)


def all_zero(n=3, m=2, seed=0):
    A = np.random.default_rng(seed).normal(size=(m, n))
    return validate(ScnppInstance(n, [Zero(n)], [Zero(m)], [A]))


def set_containing(rng, u, kinds=("box", "halfspace")):
    kind = kinds[rng.integers(len(kinds))]
    if kind == "box":
        return Box(u - rng.uniform(0.0, 1.0, u.size), u + rng.uniform(0.0, 1.0, u.size))
    if kind == "ball":
        return Ball(u + rng.uniform(-0.3, 0.3, u.size), rng.uniform(0.6, 1.5))
    a = rng.normal(size=u.size)
    return Halfspace(a, a @ u + rng.uniform(0.0, 0.5))


def feasibility_11(seed, n=5, m=4):
    """(1, 1) split feasibility with boxes/halfspaces through a common point.

    Returns ``(instance, x0)``.
    """
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, n)
    A = rng.normal(size=(m, n)) / np.sqrt(n)
    inst = feasibility_instance([set_containing(rng, u)], [set_containing(rng, A @ u)], [A], certified_solution=u)
    return inst, 2.0 * rng.normal(size=n)


def feasibility_pr(seed, p, r, n=4):
    """Multiple-sets split feasibility with ``p`` domain and ``r`` image sets."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, n)
    kinds = ("box", "ball", "halfspace")
    C = [set_containing(rng, u, kinds) for _ in range(p)]
    ops, Q = [], []
    for _ in range(r):
        m = int(rng.integers(1, 5))
        A = rng.normal(size=(m, n)) / np.sqrt(n)
        ops.append(A)
        Q.append(set_containing(rng, A @ u, kinds))
    return feasibility_instance(C, Q, ops, certified_solution=u), 2.0 * rng.normal(size=n)


def odd_11(seed, n=5, m=4):
    """(1, 1) instance whose mappings all have odd resolvents; 0 is a solution."""
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(m, n)) / np.sqrt(n)

    def odd_map(dim, which):
        if which == 0:
            h = rng.uniform(0.2, 1.0, dim)
            return NormalCone(Box(-h, h), odd=True)
        if which == 1:
            return NormalCone(Ball(np.zeros(dim), rng.uniform(0.3, 1.0)), odd=True)
        if which == 2:
            k = max(1, dim - 2)
            return NormalCone(Affine(rng.normal(size=(k, dim)), np.zeros(k)), odd=True)
        return SubdiffL1(dim, rng.uniform(0.2, 1.0), odd=True)

    inst = validate(
        ScnppInstance(
            n,
            [odd_map(n, int(rng.integers(4)))],
            [odd_map(m, int(rng.integers(3)))],
            [A],
            certified_solution=np.zeros(n),
        )
    )
    return inst, 2.0 * rng.normal(size=n)


def unique_affine(seed, n=5):
    """Transversal affine constraints: ``E x = E u`` and ``K A x = K A u`` pin down ``u``."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, n)
    k = n - 2
    E = rng.normal(size=(k, n))
    A = rng.normal(size=(4, n)) / np.sqrt(n)
    K = rng.normal(size=(n - k, 4))
    inst = ScnppInstance(n, [NormalCone(Affine(E, E @ u))], [NormalCone(Affine(K, K @ A @ u))], [A],
                         certified_solution=u)
    return validate(inst), u


def unique_monotone(seed, n=5):
    """Strongly monotone affine domain mapping with zero ``u``; image box around ``A u``."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, n)
    S = rng.normal(size=(n, n))
    G = np.eye(n) + 0.5 * (S - S.T)
    A = rng.normal(size=(4, n)) / np.sqrt(n)
    y = A @ u
    w = rng.uniform(0.1, 0.5, 4)
    inst = ScnppInstance(n, [AffineMonotone(G, -G @ u)], [NormalCone(Box(y - w, y + w))], [A],
                         certified_solution=u)
    return validate(inst), u


def unique_vi(seed, n=4):
    """Affine VI on a box with a strongly monotone operator; some constraints active at ``u``."""
    rng = np.random.default_rng(seed)
    lo, hi = -np.ones(n), np.ones(n)
    u = rng.uniform(-0.8, 0.8, n)
    active = rng.random(n) < 0.5
    u[active] = lo[active]
    S = rng.normal(size=(n, n))
    G = 0.4 * (np.eye(n) + 0.3 * (S - S.T)) / max(1.0, np.linalg.norm(np.eye(n) + 0.3 * (S - S.T), 2))
    nu = np.where(active, rng.uniform(0.1, 1.0, n), 0.0)
    c = -G @ u + nu
    A = rng.normal(size=(3, n)) / np.sqrt(n)
    inst = ScnppInstance(n, [AffineVI(G, c, Box(lo, hi))], [NormalCone(Ball(A @ u, 0.5))], [A],
                         certified_solution=u)
    return validate(inst), u


def unique_l1(seed, n=5):
    """``0 in d||x||_1`` forces ``x = 0``; image halfspace contains ``A 0 = 0``."""
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(3, n)) / np.sqrt(n)
    a = rng.normal(size=3)
    inst = ScnppInstance(n, [SubdiffL1(n, rng.uniform(0.3, 2.0))], [NormalCone(Halfspace(a, rng.uniform(0.0, 1.0)))],
                         [A], certified_solution=np.zeros(n))
    return validate(inst), np.zeros(n)


def certified_suite():
    """Twenty instances with unique certified solutions across the catalog."""
    out = []
    for s in range(5):
        out.append(unique_affine(100 + s))
        out.append(unique_monotone(200 + s))
        out.append(unique_vi(300 + s))
        out.append(unique_l1(400 + s))
    return out


def _monotone_matrix(rng, n, scale=1.0):
    S = rng.normal(size=(n, n))
    P = rng.normal(size=(n, n))
    return scale * (0.3 * P @ P.T / n + 0.5 * (S - S.T))


def catalog(seed=0, n=4):
    """One mapping of every catalog kind, with a known null point each.

    Returns a list of ``(label, mapping, null_point)``.
    """
    rng = np.random.default_rng(seed)
    h = rng.uniform(0.5, 1.5, n)
    box = Box(-h, h)
    ball = Ball(rng.normal(size=n), 1.3)
    a = rng.normal(size=n)
    half = Halfspace(a, 0.7)
    E = rng.normal(size=(2, n))
    aff_pt = rng.normal(size=n)
    aff = Affine(E, E @ aff_pt)

    G_small = _monotone_matrix(rng, n)
    G_small = LinearOp(0.6 * G_small.T / np.linalg.norm(G_small, 2))
    G_big = LinearOp(3.0 * _monotone_matrix(rng, n))
    G_mono = LinearOp(_monotone_matrix(rng, n, 2.0))
    z = rng.normal(size=n)

    def vi_with_zero(G, C, v):
        # c chosen so that v solves the VI: -(G v + c) lies in N_C(v) = {0} for interior v
        return AffineVI(G, -G.matrix @ v, C)

    interior = 0.2 * h * rng.uniform(-1, 1, n)
    items = [
        ("Zero", Zero(n), rng.normal(size=n)),
        ("Zero odd", Zero(n, odd=True), rng.normal(size=n)),
        ("NormalConeBox", NormalCone(Box(-h + 0.3, h + 0.1)), 0.5 * (-h + 0.3 + h + 0.1)),
        ("NormalConeBox odd", NormalCone(box, odd=True), interior),
        ("NormalConeBox degenerate", NormalCone(Box(z, z)), z),
        ("NormalConeBall", NormalCone(ball), ball.center),
        ("NormalConeBall odd", NormalCone(Ball(np.zeros(n), 0.8), odd=True), np.zeros(n)),
        ("NormalConeHalfspace", NormalCone(half), np.zeros(n)),
        ("NormalConeAffine", NormalCone(aff), aff_pt),
        ("NormalConeAffine odd", NormalCone(Affine(E, np.zeros(2)), odd=True), np.zeros(n)),
        ("SubdiffL1", SubdiffL1(n, 0.7), np.zeros(n)),
        ("SubdiffL1 odd", SubdiffL1(n, 1.3, odd=True), np.zeros(n)),
        ("AffineMonotone", AffineMonotone(G_mono, -G_mono.matrix @ z), z),
        ("AffineMonotone odd", AffineMonotone(G_mono, np.zeros(n), odd=True), np.zeros(n)),
        ("AffineVI contractive", vi_with_zero(G_small, box, interior), interior),
        ("AffineVI fallback", vi_with_zero(G_big, box, interior), interior),
        ("AffineVI halfspace", vi_with_zero(G_small, half, np.zeros(n)), np.zeros(n)),
    ]
    prod = ProductMap([items[3][1], items[10][1]])
    items.append(("ProductMap", prod, np.concatenate([interior, np.zeros(n)])))
    return items
