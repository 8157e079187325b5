"""Finite quivers: vertices 0..n-1 and labelled arrows, possibly with loops
and parallel arrows. Acyclicity (loops count as cycles) gates the projective
constructions elsewhere."""

from typing import NamedTuple

from .errors import ApproxcatError, ShapeError


class Arrow(NamedTuple):
    id: str
    source: int
    target: int


class Quiver:
    __slots__ = ("vertex_count", "arrows", "_by_id", "_acyclic")

    def __init__(self, vertex_count: int, arrows):
        if vertex_count < 0:
            raise ShapeError("negative vertex count")
        arrs = []
        for a in arrows:
            if isinstance(a, Arrow):
                arrs.append(a)
            else:
                aid, s, t = a
                arrs.append(Arrow(str(aid), int(s), int(t)))
        by_id = {}
        for a in arrs:
            if not (0 <= a.source < vertex_count and 0 <= a.target < vertex_count):
                raise ShapeError(f"arrow {a.id} endpoints out of range")
            if a.id in by_id:
                raise ApproxcatError(f"duplicate arrow id {a.id!r}")
            by_id[a.id] = a
        object.__setattr__(self, "vertex_count", vertex_count)
        object.__setattr__(self, "arrows", tuple(arrs))
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_acyclic", None)

    def __setattr__(self, name, value):
        raise AttributeError("Quiver is immutable")

    def arrow(self, aid: str) -> Arrow:
        try:
            return self._by_id[aid]
        except KeyError:
            raise ApproxcatError(f"no arrow {aid!r}") from None

    @property
    def arrow_ids(self):
        return tuple(a.id for a in self.arrows)

    def arrows_from(self, v: int):
        return tuple(a for a in self.arrows if a.source == v)

    def arrows_to(self, v: int):
        return tuple(a for a in self.arrows if a.target == v)

    @property
    def is_acyclic(self) -> bool:
        if self._acyclic is None:
            object.__setattr__(self, "_acyclic", self._compute_acyclic())
        return self._acyclic

    def _compute_acyclic(self) -> bool:
        # iterative three-color DFS; a back edge (including a loop) is a cycle
        WHITE, GRAY, BLACK = 0, 1, 2
        color = [WHITE] * self.vertex_count
        out = [self.arrows_from(v) for v in range(self.vertex_count)]
        for start in range(self.vertex_count):
            if color[start] != WHITE:
                continue
            stack = [(start, 0)]
            color[start] = GRAY
            while stack:
                v, i = stack.pop()
                if i < len(out[v]):
                    stack.append((v, i + 1))
                    w = out[v][i].target
                    if color[w] == GRAY:
                        return False
                    if color[w] == WHITE:
                        color[w] = GRAY
                        stack.append((w, 0))
                else:
                    color[v] = BLACK
        return True

    def paths_from(self, start: int):
        """All directed paths out of start as tuples of arrow ids, including
        the empty path. Ordered by length, then lexicographically by the
        positions of the arrows used. Requires an acyclic quiver."""
        if not self.is_acyclic:
            raise ApproxcatError("paths_from needs an acyclic quiver")
        order = {a.id: i for i, a in enumerate(self.arrows)}
        paths = [((), start)]
        frontier = [((), start)]
        while frontier:
            nxt = []
            for path, end in frontier:
                for a in sorted(self.arrows_from(end), key=lambda a: order[a.id]):
                    nxt.append((path + (a.id,), a.target))
            paths.extend(nxt)
            frontier = nxt
        return paths

    def __eq__(self, other):
        return (
            isinstance(other, Quiver)
            and self.vertex_count == other.vertex_count
            and self.arrows == other.arrows
        )

    def __hash__(self):
        return hash((self.vertex_count, self.arrows))

    def __repr__(self):
        arrs = ", ".join(f"{a.id}:{a.source}->{a.target}" for a in self.arrows)
        return f"Quiver({self.vertex_count}; {arrs})"

    def key(self):
        return (self.vertex_count, self.arrows)

    def to_jsonable(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "arrows": [{"id": a.id, "source": a.source, "target": a.target} for a in self.arrows],
        }

    @staticmethod
    def from_jsonable(data: dict) -> "Quiver":
        try:
            arrows = [(a["id"], a["source"], a["target"]) for a in data["arrows"]]
            return Quiver(int(data["vertices"]), arrows)
        except (KeyError, TypeError) as exc:
            raise ApproxcatError(f"bad quiver JSON: {exc}") from None


def a2_quiver() -> Quiver:
    """The two-vertex quiver with a single arrow 0 -> 1."""
    return Quiver(2, [("a", 0, 1)])


def loop_quiver(n_loops: int = 1) -> Quiver:
    """One vertex with n loops."""
    return Quiver(1, [(f"alpha{i}", 0, 0) for i in range(1, n_loops + 1)])
