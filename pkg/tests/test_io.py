import json
import os

import numpy as np

from blowup_csc.catalog import example_catalog
from blowup_csc.io import (atomic_write, basis_from_json, basis_to_json, configuration_from_dict,
                           configuration_to_dict, dumps, point_from_json, point_to_json)
from blowup_csc.kernel import ModelManifold, Projective, Rigid, pn_kernel_basis


def test_point_round_trip_product():
    m = ModelManifold((Projective(1), Rigid()))
    p = (np.array([1 + 1j, 2.0]) / np.sqrt(6), "q7")
    raw = point_to_json(m, p)
    q = point_from_json(m, json.loads(json.dumps(raw)))
    assert q[1] == "q7" and np.allclose(q[0], p[0])


def test_bare_coordinate_list_for_single_factor():
    m = ModelManifold.projective(1)
    q = point_from_json(m, [[1, 0], [0, 1]])
    assert np.allclose(np.abs(q[0]), [1, 1] / np.sqrt(2))


def test_basis_round_trip():
    basis = pn_kernel_basis(2)
    back = basis_from_json(basis.manifold, json.loads(json.dumps(basis_to_json(basis))))
    assert back.labels == basis.labels
    assert all(np.array_equal(a.matrix, b.matrix) for a, b in zip(basis, back))


def test_configuration_round_trip_rechecks():
    for k in (1, 5, 6):
        cfg = example_catalog(k).configuration
        raw = json.loads(dumps(configuration_to_dict(cfg)))
        back = configuration_from_dict(raw)
        assert back.report.verdict == cfg.report.verdict
        assert np.allclose(back.report.matrix, cfg.report.matrix, atol=1e-15)


def test_dumps_is_sorted_and_handles_numpy():
    text = dumps({"b": np.float64(1.5), "a": np.arange(2), "c": float("-inf")})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text)["c"] == "-inf"


def test_atomic_write(tmp_path):
    path = tmp_path / "out.json"
    atomic_write(str(path), "one")
    atomic_write(str(path), "two")
    assert path.read_text() == "two"
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]
    assert not any(name.startswith(".tmp-") for name in os.listdir(tmp_path))
