import numpy as np
import pytest

from ldsforge.errors import ValidationError
from ldsforge.graph import FactorGraph, active_users, builtin_graph, validate


def test_builtin_graph_shape_and_degrees():
    g = builtin_graph()
    assert (g.K, g.J, g.d_v, g.d_c) == (4, 6, 2, 3)
    inc = g.incidence
    assert inc.shape == (4, 6)
    assert list(inc.sum(axis=1)) == [3, 3, 3, 3]
    assert list(inc.sum(axis=0)) == [2, 2, 2, 2, 2, 2]


def test_builtin_active_user_sets():
    g = builtin_graph()
    assert active_users(g, 1) == [2, 3, 5]
    assert active_users(g, 2) == [1, 3, 6]
    assert active_users(g, 3) == [2, 4, 6]
    assert active_users(g, 4) == [1, 4, 5]


def test_active_users_bounds():
    g = builtin_graph()
    with pytest.raises(ValidationError):
        active_users(g, 0)
    with pytest.raises(ValidationError):
        active_users(g, 5)


def test_overloading_factor():
    assert builtin_graph().overloading == pytest.approx(1.5)


def test_edge_count_consistency():
    g = builtin_graph()
    assert g.K * g.d_c == g.J * g.d_v == int(g.incidence.sum())


def test_validate_clean_graph():
    assert validate(builtin_graph()) == []


def test_validate_flipped_entry_reports_two_violations():
    inc = builtin_graph().incidence.copy()
    inc[0, 0] = 1  # was 0: breaks row 1 degree and column 1 degree
    g = FactorGraph(K=4, J=6, d_v=2, d_c=3, incidence=inc)
    problems = validate(g)
    assert len(problems) == 2


def test_validate_all_ones_graph():
    g = FactorGraph(K=4, J=6, d_v=2, d_c=3, incidence=np.ones((4, 6)))
    # every row degree is 6 != 3 and every column degree is 4 != 2
    assert len(validate(g)) == 10


def test_incidence_is_read_only():
    g = builtin_graph()
    with pytest.raises(ValueError):
        g.incidence[0, 0] = 1


def test_wrong_shape_rejected():
    with pytest.raises(ValidationError):
        FactorGraph(K=4, J=6, d_v=2, d_c=3, incidence=np.ones((3, 6)))
