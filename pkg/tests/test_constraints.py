from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drgfeas.arrays import parse_array
from drgfeas.constraints import Constraint, ConstraintError, Expr, eval_q, parse_constraints
from drgfeas.search import SearchSpec, array_env, constraint_failures, spectral_failures
from drgfeas.spectral import spectrum


def test_parse_and_names():
    c = Constraint("a1 >= k/2 - 1")
    assert c.names == {"a1", "k"} and not c.spectral
    assert Constraint("theta1 == b1/2 - 1").spectral
    assert Constraint("m1 < k/2").spectral
    assert str(c) == "a1 >= k/2 - 1"
    assert len(parse_constraints(["k > 3", "c2 >= 2"])) == 2


@pytest.mark.parametrize(
    "bad",
    ["k", "k >", "a1 ** 2 > 3", "x1 > 2", "1 < k < 4", "k % 2 == 0", "k > 1.5", "__import__('os')", "f(k) > 0"],
)
def test_rejects_bad_syntax(bad):
    with pytest.raises(ConstraintError):
        Constraint(bad)


def test_expression_rejects_comparison():
    with pytest.raises(ConstraintError):
        Expr("k > 2")
    assert Expr("b1/2 - 1")({"b1": 6}) == 2


def test_boolean_connectives():
    env = {"k": 10, "c2": 3}
    assert Constraint("k > 5 and c2 >= 2").holds(env)
    assert Constraint("k < 5 or c2 >= 2").holds(env)
    assert not Constraint("not c2 >= 2").holds(env)


def test_exact_division():
    # 6*c2 > k versus c2 > k/6 at the boundary
    env = {"k": 12, "c2": 2}
    assert not Constraint("6*c2 > k").holds(env)
    assert not Constraint("c2 > k/6").holds(env)
    assert Constraint("c2 == k/6").holds(env)
    assert Constraint("a1 >= k/2 - 1").holds({"a1": 5, "k": 12})
    assert not Constraint("a1 >= k/2 - 1").holds({"a1": 4, "k": 11})


@given(
    st.lists(st.integers(1, 60), min_size=1, max_size=30),
    st.lists(st.integers(1, 60), min_size=1, max_size=30),
    st.sampled_from(["a1 >= k/2 - 1", "6*c2 > k", "3*b2 < k", "k2 <= 3*k/2", "a1 != c2/3", "-k < c2 - 2*a1"]),
)
def test_mask_matches_scalar_evaluation(ks, others, text):
    n = min(len(ks), len(others))
    k = np.array(ks[:n], dtype=np.int64)
    o = np.array(others[:n], dtype=np.int64)
    env = {"k": k, "a1": o, "c2": o + 1, "b2": o, "k2": o * 2}
    c = Constraint(text)
    mask = c.mask({name: env[name] for name in c.names})
    for i in range(n):
        scalar = {name: int(env[name][i]) for name in c.names}
        assert bool(mask[i]) == c.holds(scalar)


def test_eval_q_is_exact():
    q = eval_q(Expr("k/3 + c2/6"), {"k": np.array([1, 2]), "c2": np.array([1, 2])})
    assert [Fraction(int(a), int(b)) for a, b in zip(q.num, np.broadcast_to(q.den, q.num.shape))] == [Fraction(1, 2), Fraction(1)]


def test_array_env_contents():
    env = array_env(parse_array("12,6,2;1,4,9"))
    assert env["k"] == 12 and env["b1"] == 6 and env["c3"] == 9
    assert env["a1"] == 5 and env["a3"] == 3
    assert env["k2"] == 18 and env["k3"] == 4 and env["v"] == 35


def test_constraint_failures_on_johnson():
    spec = SearchSpec(constraints=("a1 > 0", "3*b2 < k", "4*a3 >= k", "v <= 7*k/2"))
    assert constraint_failures(spec, parse_array("12,6,2;1,4,9")) == []
    spec = SearchSpec(constraints=("a1 < k/2 - 1", "2*c2 <= k"))
    assert constraint_failures(spec, parse_array("12,6,2;1,4,9")) == ["a1 < k/2 - 1"]


def test_spectral_constraints_exact():
    ico = parse_array("5,2,1;1,2,5")
    spec = SearchSpec(constraints=("theta1 * theta1 == 5", "m1 == 3", "theta3 < -2"))
    assert spectral_failures(spec, ico) == []
    spec = SearchSpec(constraints=("theta1 > 5/2 - 1/100", "m2 < k/2"))
    assert spectral_failures(spec, ico) == ["theta1 > 5/2 - 1/100", "m2 < k/2"]
    # theta_1 of J(7,3) is 5 = b1/2 + 2
    j = parse_array("12,6,2;1,4,9")
    assert spectral_failures(SearchSpec(constraints=("theta1 == b1/2 + 2",)), j, spectrum(j)) == []


def test_spec_rejects_bad_constraints():
    with pytest.raises(ConstraintError):
        SearchSpec(constraints=("k >",))
