import numpy as np
import pytest

from batchenvs import rng
from batchenvs.errors import InstanceFormatError
from batchenvs.generators.tsplib import format_tsplib, load_instances, normalize, parse_tsplib, subsample, write_tsplib

THREE = """NAME: tri
TYPE: TSP
DIMENSION: 3
NODE_COORD_SECTION
1 10.0 5.0
2 20.0 5.0
3 15.0 25.0
EOF
"""


def test_parse_three_points():
    (inst,) = parse_tsplib(THREE)
    assert inst.name == "tri"
    np.testing.assert_array_equal(inst.coordinates, [[10, 5], [20, 5], [15, 25]])


def test_normalized_min_max(tmp_path):
    path = tmp_path / "tri.tsp"
    path.write_text(THREE)
    (coords,) = load_instances(path)
    assert coords.min(axis=0).tolist() == [0.0, 0.0]
    assert coords.max(axis=0).tolist() == [1.0, 1.0]
    np.testing.assert_allclose(coords[2], [0.5, 1.0])


def test_constant_axis_maps_to_zero():
    assert normalize(np.array([[1.0, 3.0], [2.0, 3.0]]))[:, 1].tolist() == [0.0, 0.0]


def test_multiple_instances_and_directory(tmp_path):
    (tmp_path / "a.tsp").write_text(THREE + THREE.replace("tri", "two"))
    (tmp_path / "b.tsp").write_text(THREE)
    (tmp_path / "ignored.txt").write_text("junk")
    assert len(load_instances(tmp_path)) == 3


@pytest.mark.parametrize("text,line", [
    ("NAME: x\nDIMENSION: 2\nNODE_COORD_SECTION\n1 0 0\n2 1\nEOF\n", 5),
    ("NAME: x\nDIMENSION: two\n", 2),
    ("NAME: x\nDIMENSION: 2\nNODE_COORD_SECTION\n1 0 0\nEOF\n", 5),
    ("NAME: x\nDIMENSION: 1\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n", 5),
    ("NAME: x\nDIMENSION: 1\nNODE_COORD_SECTION\n1 a 0\nEOF\n", 4),
    ("NAME: x\nDIMENSION: 1\nNODE_COORD_SECTION\n1 0 0\n", 4),
    ("NAME: x\nNODE_COORD_SECTION\n1 0 0\nEOF\n", 4),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(InstanceFormatError) as err:
        parse_tsplib(text, path="f.tsp")
    assert err.value.line == line
    assert f"f.tsp:{line}:" in str(err.value)


def test_empty_file():
    with pytest.raises(InstanceFormatError):
        parse_tsplib("\n\n")


def test_write_read_round_trip(tmp_path):
    coords = rng.uniform(rng.key(3), 40).reshape(20, 2)
    path = tmp_path / "rt.tsp"
    write_tsplib(path, coords, name="rt")
    (inst,) = parse_tsplib(path.read_text())
    assert inst.name == "rt"
    np.testing.assert_allclose(inst.coordinates, coords, rtol=0, atol=1e-9)
    assert format_tsplib(coords, "rt") == path.read_text()


def test_subsample():
    coords = np.arange(20.0).reshape(10, 2)
    assert np.array_equal(subsample(rng.key(0), coords, 10), coords)
    sub = subsample(rng.key(1), coords, 4)
    assert sub.shape == (4, 2) and np.all(np.diff(sub[:, 0]) > 0)
    with pytest.raises(ValueError):
        subsample(rng.key(0), coords, 11)
