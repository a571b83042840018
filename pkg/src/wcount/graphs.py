"""Small undirected graph type shared by the code and reduction encoders.

Loops are allowed (stored as singleton edge sets); multiple edges are not.
Vertices are 0-based integers; edge-list files are 1-based, one `u v` pair
per line, with `u u` denoting a loop.
"""

from __future__ import annotations

from dataclasses import dataclass

from wcount.errors import ParseError


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: frozenset  # frozenset({u, v}); loops are frozenset({u})

    def __post_init__(self):
        for e in self.edges:
            if not 1 <= len(e) <= 2:
                raise ParseError(f"bad edge {set(e)}")
            for v in e:
                if not 0 <= v < self.n:
                    raise ParseError(f"vertex {v} out of range 0..{self.n - 1}")

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "SimpleGraph":
        return cls(n, frozenset(frozenset(p) for p in pairs))

    def has_edge(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.edges

    def has_loop(self, v: int) -> bool:
        return frozenset((v,)) in self.edges

    def neighbors(self, v: int) -> tuple[int, ...]:
        """Adjacent vertices, including v itself when v has a loop."""
        out = set()
        for e in self.edges:
            if v in e:
                out.update(e)
        if not self.has_loop(v):
            out.discard(v)
        return tuple(sorted(out))

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.n)), default=0)

    def nonloop_edges(self):
        return sorted(tuple(sorted(e)) for e in self.edges if len(e) == 2)

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = {0}
        frontier = [0]
        while frontier:
            u = frontier.pop()
            for v in self.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
        return len(seen) == self.n

    def is_regular(self):
        degs = {self.degree(v) for v in range(self.n)}
        return len(degs) == 1


def load_graph(text: str) -> SimpleGraph:
    """Parse a 1-based edge-list file; vertex count is the largest id seen."""
    pairs = []
    max_v = 0
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"bad edge line {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"bad edge line {line!r}") from None
        if u < 1 or v < 1:
            raise ParseError(f"vertex ids must be >= 1 in {line!r}")
        max_v = max(max_v, u, v)
        pairs.append((u - 1, v - 1))
    if not pairs:
        raise ParseError("graph file has no edges")
    return SimpleGraph.from_pairs(max_v, pairs)
