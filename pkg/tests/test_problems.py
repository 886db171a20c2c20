import numpy as np
import pytest

from instances import canonical, feasibility_pr
from scnpp.linops import LinearOp, gram_norm
from scnpp.mappings import (
    DEFAULT_PARAMS,
    AffineMonotone,
    Ball,
    Box,
    Halfspace,
    NormalCone,
    Zero,
)
from scnpp.problems import (
    ScnppInstance,
    ValidationError,
    feasibility_instance,
    instance_issues,
    lift_to_product,
    svip_instance,
    validate,
    with_solution,
)
from scnpp.schemes import SolverConfig, fb_step


def test_canonical_instance_is_valid():
    inst = canonical()
    assert (inst.n1, inst.p, inst.r) == (1, 1, 1)
    assert inst.residuals([1.0]) == (0.0, 0.0)


def test_lift_of_single_domain_mapping():
    inst = validate(ScnppInstance(1, [NormalCone(Box([0.0], [1.0]))], [], []))
    lifted = lift_to_product(inst)
    assert isinstance(lifted.b_maps[0], Zero)
    np.testing.assert_array_equal(lifted.a_ops[0].matrix, [[1.0]])
    x1 = fb_step(lifted, SolverConfig(gamma=0.5, lam=1.0), np.array([3.0]))
    np.testing.assert_allclose(x1, [2.0], atol=1e-15)


def test_lift_of_empty_instance_rejected():
    with pytest.raises(ValidationError):
        lift_to_product(ScnppInstance(2, [], [], []))


def test_lift_of_canonical_instance():
    lifted = lift_to_product(canonical())
    np.testing.assert_array_equal(lifted.a_ops[0].matrix, [[1.0], [2.0]])
    assert gram_norm(lifted.a_ops[0]) == pytest.approx(5.0, rel=1e-12)
    assert lifted.certified_solution[0] == 1.0
    validate(lifted)


def test_lift_preserves_solution_set():
    # Blockwise: the lifted image residual squared is the sum of the per-mapping squared residuals.
    for seed in range(5):
        inst, _ = feasibility_pr(seed, p=2, r=3)
        lifted = lift_to_product(inst)
        rng = np.random.default_rng(seed)
        for _ in range(20):
            x = 2.0 * rng.normal(size=inst.n1)
            parts = [np.linalg.norm(x - m.resolve(x)) ** 2 for m in inst.b_maps]
            parts += [np.linalg.norm(A.matrix @ x - m.resolve(A.matrix @ x)) ** 2
                      for m, A in zip(inst.f_maps, inst.a_ops)]
            pr, ir = lifted.residuals(x)
            assert pr == 0.0
            assert ir**2 == pytest.approx(sum(parts), rel=1e-12, abs=1e-14)
        assert lifted.residuals(inst.certified_solution)[1] <= 1e-9


def test_svip_zero_operator_is_normal_cone():
    inst = svip_instance([[0.0]], [0.0], Box([0.0], [1.0]), Zero(1), [[1.0]])
    for v in (0.0, 0.3, 1.0):
        assert inst.primal_residual(np.array([v])) <= 1e-12
    for v in (-0.5, 1.5):
        assert inst.primal_residual(np.array([v])) == pytest.approx(0.5)


def test_svip_unbounded_box_steers_to_affine_monotone():
    with pytest.raises(ValidationError) as info:
        svip_instance([[1.0]], [-1.0], Box([-np.inf], [np.inf]), Zero(1), [[1.0]])
    assert "AffineMonotone" in str(info.value)
    with pytest.raises(ValidationError):
        svip_instance([[1.0]], [-1.0], None, Zero(1), [[1.0]])


def test_svip_halfline_certified_solution():
    halfline = Halfspace([-1.0], 0.0)
    inst = svip_instance([[1.0]], [1.0], halfline, Zero(1), [[1.0]], certified_solution=[0.0])
    # VI inequality <G v + c, y - v> >= 0 checked on random points of C
    v = inst.certified_solution
    G, c = inst.b_maps[0].G.matrix, inst.b_maps[0].c
    ys = np.abs(np.random.default_rng(0).normal(size=(100, 1))) * 10
    assert all((G @ v + c) @ (y - v) >= 0 for y in ys)
    with pytest.raises(ValidationError):
        with_solution(inst, [1.0])


def test_feasibility_examples():
    inst = feasibility_instance([Box([0.0], [1.0])], [Box([2.0], [3.0])], [[[2.0]]])
    assert inst.residuals([1.0]) == (0.0, 0.0)
    assert max(inst.residuals([0.9])) > 0

    unit = Ball(np.zeros(2), 1.0)
    inst = feasibility_instance([unit], [unit], [np.eye(2)])
    rng = np.random.default_rng(1)
    for _ in range(50):
        x = rng.normal(size=2)
        inside = np.linalg.norm(x) <= 1.0
        assert (max(inst.residuals(x)) == 0.0) == inside

    inst = feasibility_instance([Box([0.0], [1.0])], [Box([5.0], [6.0])], [[[1.0]]], certified_empty=True)
    assert inst.certified_empty
    assert all(max(inst.residuals([t])) > 0 for t in np.linspace(-2, 8, 41))


def test_validate_wrong_column_count():
    inst = ScnppInstance(2, [NormalCone(Box([0, 0], [1, 1]))], [NormalCone(Box([0], [1]))], [LinearOp([[1.0, 2.0, 3.0]])])
    issues = instance_issues(inst)
    assert any(m.startswith("a[0]") and "columns" in m for m in issues)


def test_validate_bad_certification():
    inst = ScnppInstance(1, [NormalCone(Box([0.0], [1.0]))], [NormalCone(Box([2.0], [3.0]))], [[[2.0]]],
                         certified_solution=[0.5])
    with pytest.raises(ValidationError) as info:
        validate(inst)
    (msg,) = info.value.issues
    assert "image residual 1.000000e+00" in msg


def test_validate_reports_every_issue():
    bad_G = AffineMonotone([[-1.0]], [0.0])
    inst = ScnppInstance(
        1,
        [bad_G, NormalCone(Box([0.0], [1.0]), odd=True)],
        [NormalCone(Box([2.0], [1.0]))],
        [[[1.0, 1.0]]],
    )
    issues = instance_issues(inst)
    assert len(issues) >= 4
    joined = "\n".join(issues)
    assert "b[0]" in joined and "b[1]" in joined and "f[0]" in joined and "a[0]" in joined


def test_validate_mismatched_operator_rows():
    inst = ScnppInstance(1, [], [NormalCone(Box([0.0, 0.0], [1.0, 1.0]))], [[[1.0]]])
    assert any("rows" in m for m in instance_issues(inst))


def test_solution_and_empty_flag_conflict():
    inst = ScnppInstance(1, [Zero(1)], [], [], certified_solution=[0.0], certified_empty=True)
    assert any("certified_empty" in m for m in instance_issues(inst))


def test_residuals_check_dimension():
    with pytest.raises(ValueError):
        canonical().residuals([1.0, 2.0])
    assert canonical().residuals([1.0], DEFAULT_PARAMS) == (0.0, 0.0)
