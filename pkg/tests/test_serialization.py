import json
import math

import numpy as np
import pytest

import coarselab as cl
from coarselab.errors import ParameterError
from coarselab.serialization import (
    action_from_json,
    action_to_json,
    canonical_dumps,
    family_from_json,
    family_to_json,
    operator_from_json,
    operator_to_json,
    partition_from_json,
    partition_to_json,
    space_from_json,
    space_to_json,
)


def test_space_round_trip(z21):
    obj = space_to_json(z21)
    back = space_from_json(obj)
    assert back.points == z21.points
    assert np.array_equal(back.dmat, z21.dmat)
    assert back.basepoint == z21.basepoint
    assert back.window_radius == z21.window_radius


def test_graph_metric_closes_by_shortest_paths():
    obj = {
        "points": ["a", "b", "c", "d"],
        "metric": {"kind": "graph", "edges": [["a", "b", 1], ["b", "c", 2]]},
        "basepoint": "a",
        "window_radius": 0,
    }
    s = space_from_json(obj)
    assert s.dist("a", "c") == 3
    assert s.dist("a", "d") == math.inf  # separate component


def test_infinity_encodes_as_null():
    d = np.array([[0.0, math.inf], [math.inf, 0.0]])
    s = cl.FiniteSpace([0, 1], d, 0, 0.0)
    obj = space_to_json(s)
    assert obj["metric"]["rows"][0][1] is None
    assert space_from_json(obj).dist(0, 1) == math.inf


def test_family_round_trip(z21):
    fam = cl.ball_cover(z21, 2)
    back = family_from_json(family_to_json(fam))
    assert set(back.members) == set(fam.members)


def test_action_round_trip(z21):
    neg = cl.negation_action(z21)
    back = action_from_json(action_to_json(neg), z21)
    assert np.array_equal(back.perms["gamma"], neg.perms["gamma"])
    assert back.inverses == neg.inverses


def test_partition_round_trip(z21):
    hat = cl.hat_partition(z21, 5)
    back = partition_from_json(partition_to_json(hat), z21)
    assert back.vertices == hat.vertices
    assert np.allclose(back.weights, hat.weights)


def test_operator_round_trip(z21):
    op = cl.BandOperator.from_entries(z21, [(0, 1, 1 + 2j), (-3, 3, -0.5j)])
    back = operator_from_json(operator_to_json(op), z21)
    assert (back.mat != op.mat).nnz == 0


def test_enveloped_reports_are_accepted(z21):
    obj = {"manifest": {}, "value": space_to_json(z21)}
    assert space_from_json(obj).points == z21.points


def test_canonical_dumps_is_deterministic_and_formatted():
    value = {"b": 1.0, "a": [0.1234567891234, math.inf, 3, True]}
    out = canonical_dumps(value)
    assert out == '{"a":[0.123456789,null,3,true],"b":1}'
    assert canonical_dumps(value) == out
    with pytest.raises(ParameterError):
        canonical_dumps(object())


def test_missing_fields_raise_parameter_errors():
    with pytest.raises(ParameterError):
        space_from_json({"points": [0]})
    with pytest.raises(ParameterError):
        action_from_json({}, cl.segment_space(0, 1))
