"""
Treap - ordered dictionary with random priorities

A binary search tree on keys that is also a max-heap on 64-bit random
priorities, so its shape depends only on the (key, priority) set.
Rotations and comparisons are counted in `stats`.

Delete counts rotations as the length of the right spine of the left
subtree plus the left spine of the right subtree (the full sink-to-leaf
count) even though the node is spliced out as soon as it has one child.
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Tuple

from .errors import DuplicateKeyError, InvalidParameterError, MissingKeyError
from .randsrc import RandomSource

PRIORITY_BITS = 64


class _Node:
    __slots__ = ('key', 'value', 'priority', 'serial', 'left', 'right')

    def __init__(self, key, value, priority: int, serial: int):
        self.key = key
        self.value = value
        self.priority = priority
        self.serial = serial
        self.left: Optional['_Node'] = None
        self.right: Optional['_Node'] = None


@dataclass
class TreapStats:
    rotations: int = 0
    comparisons: int = 0
    # inserts whose priority equalled the ancestor they stopped under
    priority_ties: int = 0


@dataclass(frozen=True)
class SearchResult:
    found: bool
    depth: int
    value: Any = None


@dataclass
class SplitResult:
    left: 'Treap'
    right: 'Treap'
    pivot: Optional[Tuple[Any, Any]]
    rotations: int


def _spine(node: Optional[_Node], side: str) -> int:
    count = 0
    while node is not None:
        count += 1
        node = getattr(node, side)
    return count


class Treap:
    """Treap keyed by any totally ordered type"""

    def __init__(self):
        self.root: Optional[_Node] = None
        self.size = 0
        self.stats = TreapStats()
        self._next_serial = 0

    def __len__(self) -> int:
        return self.size

    def __contains__(self, key) -> bool:
        return self.search(key).found

    def __iter__(self) -> Iterator:
        return iter(self.keys())

    # --- heap order ---

    @staticmethod
    def _beats(a: _Node, b: _Node) -> bool:
        """True if a belongs above b; equal priorities favour the earlier insert"""
        if a.priority == b.priority:
            return a.serial < b.serial
        return a.priority > b.priority

    def _note_tie(self, child: _Node, parent: _Node, node: _Node) -> None:
        # a new node stops under the first ancestor it does not beat, so this fires once per insert at most
        if child is node and node.priority == parent.priority:
            self.stats.priority_ties += 1

    def _rotate_right(self, node: _Node) -> _Node:
        pivot = node.left
        node.left = pivot.right
        pivot.right = node
        self.stats.rotations += 1
        return pivot

    def _rotate_left(self, node: _Node) -> _Node:
        pivot = node.right
        node.right = pivot.left
        pivot.left = node
        self.stats.rotations += 1
        return pivot

    # --- operations ---

    def insert(self, key, src: Optional[RandomSource] = None, value: Any = None,
               priority: Optional[int] = None) -> int:
        """
        Insert key as a leaf and rotate it up while its priority wins

        Args:
            key: new key (must be absent)
            src: source for the 64-bit priority
            value: optional payload
            priority: explicit priority, bypassing src (shape tests)

        Returns:
            Rotations performed by this insert
        """
        if priority is None:
            if src is None:
                raise InvalidParameterError("insert needs a RandomSource or an explicit priority")
            priority = src.word(PRIORITY_BITS)
        node = _Node(key, value, priority, self._next_serial)
        before = self.stats.rotations
        self.root = self._insert(self.root, node)
        self._next_serial += 1
        self.size += 1
        return self.stats.rotations - before

    def _insert(self, root: Optional[_Node], node: _Node) -> _Node:
        if root is None:
            return node
        self.stats.comparisons += 1
        if node.key < root.key:
            root.left = self._insert(root.left, node)
            self._note_tie(root.left, root, node)
            if self._beats(root.left, root):
                root = self._rotate_right(root)
        elif root.key < node.key:
            root.right = self._insert(root.right, node)
            self._note_tie(root.right, root, node)
            if self._beats(root.right, root):
                root = self._rotate_left(root)
        else:
            raise DuplicateKeyError(f"key {node.key!r} already present")
        return root

    def delete(self, key) -> int:
        """
        Remove key; returns its spine-length rotation count

        Raises:
            MissingKeyError: key absent
        """
        node = self._find(key)
        if node is None:
            raise MissingKeyError(f"key {key!r} not present")
        counted = _spine(node.left, 'right') + _spine(node.right, 'left')
        saved = self.stats.rotations
        self.root = self._delete(self.root, key)
        self.stats.rotations = saved + counted
        self.size -= 1
        return counted

    def _delete(self, root: _Node, key) -> Optional[_Node]:
        if key < root.key:
            root.left = self._delete(root.left, key)
            return root
        if root.key < key:
            root.right = self._delete(root.right, key)
            return root
        if root.left is None:
            return root.right
        if root.right is None:
            return root.left
        if self._beats(root.left, root.right):
            root = self._rotate_right(root)
            root.right = self._delete(root.right, key)
        else:
            root = self._rotate_left(root)
            root.left = self._delete(root.left, key)
        return root

    def _find(self, key) -> Optional[_Node]:
        node = self.root
        while node is not None:
            if key < node.key:
                node = node.left
            elif node.key < key:
                node = node.right
            else:
                return node
        return None

    def search(self, key) -> SearchResult:
        """Look up key; depth counts edges from the root to the last node touched"""
        node = self.root
        depth = -1
        while node is not None:
            depth += 1
            self.stats.comparisons += 1
            if key < node.key:
                node = node.left
            elif node.key < key:
                node = node.right
            else:
                return SearchResult(found=True, depth=depth, value=node.value)
        return SearchResult(found=False, depth=max(depth, 0))

    def get(self, key, default=None):
        result = self.search(key)
        return result.value if result.found else default

    def split(self, pivot_key, keep_pivot: bool = False) -> SplitResult:
        """
        Rotate the pivot to the root and cut off its subtrees

        The pivot rises one level per rotation, so `rotations` equals its
        depth. This treap is left empty.

        Returns:
            SplitResult with keys < pivot on the left, > pivot on the right,
            and (key, value) of the pivot when keep_pivot is set
        """
        if self._find(pivot_key) is None:
            raise MissingKeyError(f"pivot {pivot_key!r} not present")
        before = self.stats.rotations
        self.root = self._raise(self.root, pivot_key)
        rotations = self.stats.rotations - before
        top = self.root
        left, right = self._spawn(top.left), self._spawn(top.right)
        pivot = (top.key, top.value) if keep_pivot else None
        self.root = None
        self.size = 0
        return SplitResult(left=left, right=right, pivot=pivot, rotations=rotations)

    def _raise(self, root: _Node, key) -> _Node:
        if key < root.key:
            root.left = self._raise(root.left, key)
            return self._rotate_right(root)
        if root.key < key:
            root.right = self._raise(root.right, key)
            return self._rotate_left(root)
        return root

    def _spawn(self, root: Optional[_Node]) -> 'Treap':
        child = Treap()
        child.root = root
        child.size = _count(root)
        child._next_serial = self._next_serial
        return child

    @classmethod
    def merge(cls, left: 'Treap', right: 'Treap') -> 'Treap':
        """
        Join two treaps whose key ranges do not overlap

        Both inputs are consumed. The merged treap's stats record the sink
        rotations of the implicit dummy root.
        """
        if left.root is not None and right.root is not None:
            if not _max_key(left.root) < _min_key(right.root):
                raise InvalidParameterError("merge needs every left key < every right key")
        merged = cls()
        merged.stats.rotations = _spine(left.root, 'right') + _spine(right.root, 'left')
        merged.root = merged._merge(left.root, right.root)
        merged.size = left.size + right.size
        merged._next_serial = max(left._next_serial, right._next_serial)
        left.root, right.root = None, None
        left.size, right.size = 0, 0
        return merged

    def _merge(self, a: Optional[_Node], b: Optional[_Node]) -> Optional[_Node]:
        if a is None:
            return b
        if b is None:
            return a
        if self._beats(a, b):
            a.right = self._merge(a.right, b)
            return a
        b.left = self._merge(a, b.left)
        return b

    # --- inspection ---

    def keys(self) -> List:
        out = []
        stack: List[_Node] = []
        node = self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            out.append(node.key)
            node = node.right
        return out

    def depths(self) -> Dict[Any, int]:
        """Depth of every key, by traversal"""
        out: Dict[Any, int] = {}
        stack = [(self.root, 0)] if self.root is not None else []
        while stack:
            node, depth = stack.pop()
            out[node.key] = depth
            for child in (node.left, node.right):
                if child is not None:
                    stack.append((child, depth + 1))
        return out

    def shape(self) -> str:
        """Canonical pre-order text: (key:priority left right), () for empty"""
        parts: List[str] = []
        stack: List[Any] = [self.root]
        while stack:
            item = stack.pop()
            if isinstance(item, str):
                parts.append(item)
            elif item is None:
                parts.append('()')
            else:
                parts.append(f"({item.key!r}:{item.priority} ")
                stack.extend([')', item.right, ' ', item.left])
        return ''.join(parts)

    def check_invariants(self) -> bool:
        """Full traversal: search-tree order on keys and heap order on priorities"""
        keys = self.keys()
        if any(not a < b for a, b in zip(keys, keys[1:])):
            return False
        if len(keys) != self.size:
            return False
        stack = [self.root] if self.root is not None else []
        while stack:
            node = stack.pop()
            for child in (node.left, node.right):
                if child is None:
                    continue
                if (child.priority, -child.serial) > (node.priority, -node.serial):
                    return False
                stack.append(child)
        return True


def _count(node: Optional[_Node]) -> int:
    total = 0
    stack = [node] if node is not None else []
    while stack:
        n = stack.pop()
        total += 1
        stack.extend(c for c in (n.left, n.right) if c is not None)
    return total


def _min_key(node: _Node):
    while node.left is not None:
        node = node.left
    return node.key


def _max_key(node: _Node):
    while node.right is not None:
        node = node.right
    return node.key


def build_treap(keys, src: RandomSource) -> Treap:
    """Insert keys in the given order with fresh random priorities"""
    t = Treap()
    for key in keys:
        t.insert(key, src)
    return t
