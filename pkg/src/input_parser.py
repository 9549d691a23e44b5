"""
Input Parser - graph, point-set, stream and operation files for the CLI

Text formats:
    graph     first line "n m", then m lines "u v" (0-based vertices)
    hamming   one point per line as a string of '0'/'1'
    l1        one point per line, whitespace-separated decimals in [0, 1]
    stream    one update per line, "index count" (count defaults to 1)
    queries   one index per line
    ops       one operation per line: "insert KEY [PAYLOAD]", "delete KEY", "search KEY"
Binary streams (.bin) are little-endian pairs of u64 index and i64 count.
Blank lines and lines starting with '#' are skipped.
"""
import struct
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from rich.console import Console

from .classic import MultiGraph
from .errors import InvalidParameterError
from .lsh import as_bit_matrix, l1_embed

OPS = ('insert', 'delete', 'search')
_PAIR = struct.Struct('<Qq')


class DatasetParser:
    """Parse CLI input files; settings come from the `input` config section"""

    def __init__(self, config: Dict[str, Any], console: Optional[Console] = None):
        self.config = config or {}
        self.input_config = self.config.get('input', {}) or {}
        self.comment_prefix = self.input_config.get('comment_prefix', '#')
        self.l1_resolution = self.input_config.get('l1_resolution', 16)
        self.stream_format = self.input_config.get('stream_format', 'auto')
        self.console = console or Console(stderr=True)

    def _lines(self, path) -> List[Tuple[int, str]]:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Input file not found: {path}")
        with open(path, 'r', encoding='utf-8') as f:
            return [(no, line.strip()) for no, line in enumerate(f, 1)
                    if line.strip() and not line.strip().startswith(self.comment_prefix)]

    def load_graph(self, path) -> MultiGraph:
        lines = self._lines(path)
        if not lines:
            raise InvalidParameterError(f"{path}: empty graph file")
        try:
            n, m = (int(tok) for tok in lines[0][1].split())
        except ValueError:
            raise InvalidParameterError(f"{path}:{lines[0][0]}: header must be 'n m', got {lines[0][1]!r}")
        edges = []
        for no, line in lines[1:]:
            parts = line.split()
            if len(parts) != 2:
                raise InvalidParameterError(f"{path}:{no}: edge must be 'u v', got {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
        if len(edges) != m:
            raise InvalidParameterError(f"{path}: header declares {m} edges, found {len(edges)}")
        graph = MultiGraph.from_edges(n, edges)
        self.console.print(f"✓ Graph read: {n} vertices, {m} edges")
        return graph

    def load_hamming(self, path) -> np.ndarray:
        rows = []
        for no, line in self._lines(path):
            if set(line) - {'0', '1'}:
                raise InvalidParameterError(f"{path}:{no}: bit vectors may only contain '0' and '1'")
            rows.append([int(ch) for ch in line])
        points = self._matrix(path, rows)
        self.console.print(f"✓ {len(points)} Hamming points read (d={points.shape[1]})")
        return points

    def load_l1(self, path, resolution: Optional[int] = None) -> np.ndarray:
        resolution = resolution or self.l1_resolution
        rows = []
        for no, line in self._lines(path):
            try:
                values = [float(tok) for tok in line.split()]
            except ValueError:
                raise InvalidParameterError(f"{path}:{no}: expected decimals, got {line!r}")
            rows.append(l1_embed(values, resolution))
        points = self._matrix(path, rows)
        self.console.print(f"✓ {len(points)} l1 points embedded (resolution={resolution})")
        return points

    def load_points(self, path, fmt: str = 'hamming') -> np.ndarray:
        if fmt == 'hamming':
            return self.load_hamming(path)
        if fmt == 'l1':
            return self.load_l1(path)
        raise InvalidParameterError(f"Unknown point format: {fmt}")

    def _matrix(self, path, rows: List) -> np.ndarray:
        if not rows:
            raise InvalidParameterError(f"{path}: no points found")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise InvalidParameterError(f"{path}: points have differing lengths {sorted(widths)}")
        return as_bit_matrix(rows)

    def load_stream(self, path) -> List[Tuple[int, int]]:
        """(index, count) updates from a text or binary stream file"""
        fmt = self.stream_format
        if fmt == 'auto':
            fmt = 'binary' if Path(path).suffix == '.bin' else 'text'
        if fmt == 'binary':
            data = Path(path).read_bytes()
            if len(data) % _PAIR.size:
                raise InvalidParameterError(
                    f"{path}: binary stream length {len(data)} is not a multiple of {_PAIR.size}")
            updates = [tuple(pair) for pair in _PAIR.iter_unpack(data)]
        elif fmt == 'text':
            updates = []
            for no, line in self._lines(path):
                parts = line.split()
                if len(parts) not in (1, 2):
                    raise InvalidParameterError(f"{path}:{no}: expected 'index [count]', got {line!r}")
                try:
                    updates.append((int(parts[0]), int(parts[1]) if len(parts) == 2 else 1))
                except ValueError:
                    raise InvalidParameterError(f"{path}:{no}: non-integer field in {line!r}")
        else:
            raise InvalidParameterError(f"Unknown stream format: {fmt}")
        self.console.print(f"✓ {len(updates)} stream updates read")
        return updates

    def load_queries(self, path) -> List[int]:
        queries = []
        for no, line in self._lines(path):
            try:
                queries.append(int(line.split()[0]))
            except ValueError:
                raise InvalidParameterError(f"{path}:{no}: expected an integer index, got {line!r}")
        return queries

    def load_ops(self, path) -> List[Tuple[str, int, Optional[str]]]:
        ops = []
        for no, line in self._lines(path):
            parts = line.split(maxsplit=2)
            if parts[0] not in OPS or len(parts) < 2:
                raise InvalidParameterError(f"{path}:{no}: expected '<{'|'.join(OPS)}> KEY', got {line!r}")
            try:
                key = int(parts[1])
            except ValueError:
                raise InvalidParameterError(f"{path}:{no}: key must be an integer, got {parts[1]!r}")
            payload = parts[2] if len(parts) == 3 and parts[0] == 'insert' else None
            ops.append((parts[0], key, payload))
        self.console.print(f"✓ {len(ops)} operations read")
        return ops

    @staticmethod
    def validate_stream(updates: List[Tuple[int, int]], mode: str = 'nonnegative') -> bool:
        if not updates:
            raise InvalidParameterError("No stream updates found")
        for index, count in updates:
            if index < 0:
                raise InvalidParameterError(f"stream index must be >= 0, got {index}")
            if mode == 'nonnegative' and count < 0:
                raise InvalidParameterError(f"negative count {count} for index {index} in nonnegative mode")
        return True

    @staticmethod
    def validate_points(points: np.ndarray, min_points: int = 1) -> bool:
        if len(points) < min_points:
            raise InvalidParameterError(f"need at least {min_points} points, got {len(points)}")
        return True
