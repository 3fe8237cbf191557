import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diamest import dataio
from diamest.core import Dataset
from diamest.dataio import DataFormatError


@given(st.integers(1, 6).flatmap(lambda n: st.lists(
    st.tuples(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n), st.sampled_from([1, -1])),
    max_size=10).map(lambda pts: (n, pts))))
def test_round_trip(case):
    n, pts = case
    d = Dataset.from_points(pts, n=n)
    back = dataio.loads(dataio.dumps(d))
    assert back.n == n and np.array_equal(back.X, d.X) and np.array_equal(back.y, d.y)


def test_real_mode_round_trip(tmp_path):
    d = Dataset.from_points([((0.25, -3.5), 1)], space="real")
    path = tmp_path / "r.jsonl"
    dataio.dump(d, path)
    back = dataio.load(path)
    assert back.space == "real" and np.array_equal(back.X, d.X)


@pytest.mark.parametrize("text", [
    '{"x": [1, 0], "y": 1}\n',
    '{"x": [1, -1], "y": 2}\n',
    '{"x": [1.0, -1], "y": 1}\n',
    '{"x": [1, -1], "y": 1}\n{"n": 2}\n',
    'not json\n',
    '{"x": [1, -1], "y": 1}\n{"x": [1], "y": 1}\n',
])
def test_malformed(text):
    with pytest.raises(DataFormatError):
        dataio.loads(text)
