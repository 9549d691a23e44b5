import struct

import numpy as np
import pytest

from src.errors import InvalidParameterError
from src.input_parser import DatasetParser


@pytest.fixture
def parser(config):
    return DatasetParser(config)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return path


def test_load_graph(parser, tmp_path):
    path = _write(tmp_path, "g.txt", "# triangle plus pendant\n4 4\n0 1\n1 2\n2 0\n\n2 3\n")
    graph = parser.load_graph(path)
    assert graph.vertex_count == 4
    assert len(graph.edges) == 4


def test_graph_edge_count_must_match_header(parser, tmp_path):
    with pytest.raises(InvalidParameterError):
        parser.load_graph(_write(tmp_path, "g.txt", "3 3\n0 1\n1 2\n"))
    with pytest.raises(InvalidParameterError):
        parser.load_graph(_write(tmp_path, "h.txt", "three edges\n"))
    with pytest.raises(FileNotFoundError):
        parser.load_graph(tmp_path / "missing.txt")


def test_load_hamming(parser, tmp_path):
    points = parser.load_hamming(_write(tmp_path, "p.txt", "0101\n1111\n"))
    assert points.shape == (2, 4)
    assert list(points[0]) == [0, 1, 0, 1]


def test_hamming_rejects_ragged_or_non_bits(parser, tmp_path):
    with pytest.raises(InvalidParameterError):
        parser.load_hamming(_write(tmp_path, "p.txt", "0101\n111\n"))
    with pytest.raises(InvalidParameterError):
        parser.load_hamming(_write(tmp_path, "q.txt", "0121\n"))


def test_load_l1_embeds_in_unary(parser, tmp_path):
    points = parser.load_l1(_write(tmp_path, "p.txt", "0.5 0.25\n"), resolution=4)
    assert list(points[0]) == [1, 1, 0, 0, 1, 0, 0, 0]
    with pytest.raises(InvalidParameterError):
        parser.load_points(tmp_path / "p.txt", fmt='l2')


def test_text_stream(parser, tmp_path):
    updates = parser.load_stream(_write(tmp_path, "s.txt", "3 5\n7\n3 -2\n"))
    assert updates == [(3, 5), (7, 1), (3, -2)]


def test_binary_stream(parser, tmp_path):
    # GIVEN
    path = tmp_path / "s.bin"
    path.write_bytes(struct.pack('<QqQq', 9, 4, 2, -1))

    # WHEN
    updates = parser.load_stream(path)

    # THEN
    assert updates == [(9, 4), (2, -1)]


def test_truncated_binary_stream(parser, tmp_path):
    path = tmp_path / "s.bin"
    path.write_bytes(struct.pack('<Qq', 1, 1)[:-3])
    with pytest.raises(InvalidParameterError):
        parser.load_stream(path)


def test_load_ops(parser, tmp_path):
    ops = parser.load_ops(_write(tmp_path, "ops.txt", "insert 5 five\ninsert 6\nsearch 5\ndelete 6\n"))
    assert ops == [('insert', 5, 'five'), ('insert', 6, None), ('search', 5, None), ('delete', 6, None)]
    with pytest.raises(InvalidParameterError):
        parser.load_ops(_write(tmp_path, "bad.txt", "upsert 5\n"))
    with pytest.raises(InvalidParameterError):
        parser.load_ops(_write(tmp_path, "bad2.txt", "insert five\n"))


def test_validate_stream():
    assert DatasetParser.validate_stream([(1, 2)])
    assert DatasetParser.validate_stream([(1, -2)], mode='general')
    with pytest.raises(InvalidParameterError):
        DatasetParser.validate_stream([])
    with pytest.raises(InvalidParameterError):
        DatasetParser.validate_stream([(1, -2)])
    with pytest.raises(InvalidParameterError):
        DatasetParser.validate_stream([(-1, 2)], mode='general')


def test_validate_points():
    assert DatasetParser.validate_points(np.zeros((3, 4), dtype=np.uint8), min_points=3)
    with pytest.raises(InvalidParameterError):
        DatasetParser.validate_points(np.zeros((1, 4), dtype=np.uint8), min_points=2)
