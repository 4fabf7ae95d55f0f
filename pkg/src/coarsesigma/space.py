"""Exact presentations of pointed, locally finite metric spaces.

Every distance is a :class:`fractions.Fraction`.  Points are identified by
hashable labels that are unique within one presentation and mutually
comparable, so ``(distance to basepoint, label)`` is a total canonical order.

Continuous spaces (the half line, the line, the open book) are presented by
their delta-nets.
"""

from __future__ import annotations

import bisect
import functools
import itertools
import math
from fractions import Fraction
from typing import Any, Hashable, Iterable, Iterator, Sequence

Label = Hashable

DEFAULT_NET_SPACING = Fraction(1, 2)


class SpaceError(ValueError):
    """Invalid space specification or unknown point."""


def as_rational(value: Any) -> Fraction:
    """Coerce ints, ``"p/q"`` strings and Fractions; reject floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise SpaceError(f"inexact value {value!r}; use an int or a 'p/q' string")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpaceError(f"not a rational number: {value!r}") from exc


def rational_to_json(value: Fraction) -> str:
    return str(value)


class Space:
    """A pointed metric space with finite balls.

    Subclasses provide ``distance``, ``contains`` and ``_ball_points``; the
    remaining queries are derived.  Instances are immutable apart from an
    internal ball cache.
    """

    kind = "abstract"
    basepoint: Label

    def __init__(self) -> None:
        self._ball_cache: dict[Fraction, tuple] = {}
        self._norm_cache: dict[Fraction, tuple] = {}

    # -- required ---------------------------------------------------------
    def distance(self, a: Label, b: Label) -> Fraction:
        raise NotImplementedError

    def contains(self, a: Label) -> bool:
        raise NotImplementedError

    def _ball_points(self, radius: Fraction) -> Iterable[Label]:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError

    def label_to_json(self, a: Label) -> Any:
        raise NotImplementedError

    def label_from_json(self, data: Any) -> Label:
        raise NotImplementedError

    # -- derived ----------------------------------------------------------
    def norm(self, a: Label) -> Fraction:
        """Distance from the basepoint."""
        return self.distance(self.basepoint, a)

    def check(self, a: Label) -> Label:
        if not self.contains(a):
            raise SpaceError(f"unknown point {a!r} in {self.kind} space")
        return a

    def sort_key(self, a: Label) -> tuple:
        return (self.norm(a), a)

    def ball(self, radius: Any) -> tuple:
        """Points within ``radius`` of the basepoint in canonical order."""
        radius = as_rational(radius)
        if radius < 0:
            raise SpaceError("radius must be non-negative")
        cached = self._ball_cache.get(radius)
        if cached is None:
            keyed = sorted((self.norm(p), p) for p in self._ball_points(radius))
            cached = tuple(p for _, p in keyed)
            self._ball_cache[radius] = cached
            self._norm_cache[radius] = tuple(n for n, _ in keyed)
        return cached

    def ball_norms(self, radius: Any) -> tuple:
        """Norms of ``ball(radius)``, in the same order."""
        radius = as_rational(radius)
        self.ball(radius)
        return self._norm_cache[radius]

    def neighbors(self, a: Label, scale: Any, radius: Any) -> Iterator[tuple[Label, Fraction]]:
        """Yield ``(b, d(a, b))`` for ``b != a`` in ``ball(radius)`` with ``d(a, b) <= scale``.

        The generic version scans the canonical ball order between norms
        ``|a| - scale`` and ``|a| + scale``; this is exact by the triangle
        inequality.
        """
        scale = as_rational(scale)
        points = self.ball(radius)
        norms = self.ball_norms(radius)
        center = self.norm(a)
        lo = bisect.bisect_left(norms, center - scale)
        hi = bisect.bisect_right(norms, center + scale)
        for b in points[lo:hi]:
            if b == a:
                continue
            d = self.distance(a, b)
            if d <= scale:
                yield b, d

    def canonical(self, a: Label) -> Label:
        return a

    def __repr__(self) -> str:
        return f"<{self.kind} {self.to_spec()['params']}>"


class PointCloud(Space):
    """A finite metric space given by its full distance matrix."""

    kind = "point_cloud"

    def __init__(self, distances: Sequence[Sequence[Any]], basepoint: int = 0) -> None:
        super().__init__()
        matrix = tuple(tuple(as_rational(x) for x in row) for row in distances)
        n = len(matrix)
        if n == 0:
            raise SpaceError("point cloud needs at least one point")
        if any(len(row) != n for row in matrix):
            raise SpaceError("distance matrix must be square")
        for i in range(n):
            if matrix[i][i] != 0:
                raise SpaceError(f"d({i},{i}) = {matrix[i][i]} is not zero")
            for j in range(i + 1, n):
                if matrix[i][j] != matrix[j][i]:
                    raise SpaceError(f"asymmetric distance between {i} and {j}")
                if matrix[i][j] <= 0:
                    raise SpaceError(f"distinct points {i}, {j} at distance {matrix[i][j]}")
        # exact check on integers scaled by the common denominator
        scale = math.lcm(*(x.denominator for row in matrix for x in row))
        ints = [[x.numerator * (scale // x.denominator) for x in row] for row in matrix]
        for i, j in itertools.product(range(n), repeat=2):
            dij, row_i, row_j = ints[i][j], ints[i], ints[j]
            for k, (dik, djk) in enumerate(zip(row_i, row_j)):
                if dik > dij + djk:
                    raise SpaceError(
                        f"triangle inequality fails for witness triple ({i}, {j}, {k}): "
                        f"{matrix[i][k]} > {matrix[i][j]} + {matrix[j][k]}"
                    )
        if not 0 <= basepoint < n:
            raise SpaceError(f"basepoint {basepoint} out of range")
        self.matrix = matrix
        self.basepoint = basepoint

    def __len__(self) -> int:
        return len(self.matrix)

    def distance(self, a, b):
        return self.matrix[self.check(a)][self.check(b)]

    def contains(self, a):
        return isinstance(a, int) and not isinstance(a, bool) and 0 <= a < len(self.matrix)

    def _ball_points(self, radius):
        row = self.matrix[self.basepoint]
        return [i for i in range(len(row)) if row[i] <= radius]

    def to_spec(self):
        return {
            "kind": self.kind,
            "params": {
                "distances": [[rational_to_json(x) for x in row] for row in self.matrix],
                "basepoint": self.basepoint,
            },
        }

    def label_to_json(self, a):
        return a

    def label_from_json(self, data):
        return self.check(data)


@functools.lru_cache(maxsize=256)
def _step_lengths(spacing: Fraction, steps: int) -> tuple:
    return tuple(k * spacing for k in range(steps + 1))


class Ray(Space):
    """The points ``{0, s, 2s, ...}`` of the half line with spacing ``s``.

    With ``s = 1`` this is the integer ray; with ``s = delta <= 1/2`` it is
    the delta-net presentation of ``[0, inf)``.
    """

    def __init__(self, spacing: Any = 1, kind: str = "discrete_ray") -> None:
        super().__init__()
        self.spacing = as_rational(spacing)
        if self.spacing <= 0:
            raise SpaceError("ray spacing must be positive")
        self.kind = kind
        self.basepoint = Fraction(0)

    def distance(self, a, b):
        return abs(self.check(a) - self.check(b))

    def norm(self, a):
        return self.check(a)

    def contains(self, a):
        if isinstance(a, bool) or not isinstance(a, (int, Fraction)):
            return False
        return a >= 0 and (a / self.spacing).denominator == 1

    def _ball_points(self, radius):
        count = math.floor(radius / self.spacing)
        return [n * self.spacing for n in range(count + 1)]

    def neighbors(self, a, scale, radius):
        # ball(radius)[n] is n * spacing, so neighbours are index offsets
        n = int(self.check(a) / self.spacing)
        points = self.ball(radius)
        lengths = _step_lengths(self.spacing, math.floor(as_rational(scale) / self.spacing))
        for k in range(1, len(lengths)):
            if n - k >= 0:
                yield points[n - k], lengths[k]
            if n + k < len(points):
                yield points[n + k], lengths[k]

    def to_spec(self):
        if self.kind == "integer_ray":
            return {"kind": self.kind, "params": {}}
        key = "delta" if self.kind == "ray" else "spacing"
        return {"kind": self.kind, "params": {key: rational_to_json(self.spacing)}}

    def label_to_json(self, a):
        return rational_to_json(a)

    def label_from_json(self, data):
        return self.check(as_rational(data))


class Line(Space):
    """The delta-net ``delta * Z`` of the real line (``delta = 1`` gives Z)."""

    kind = "delta_net"

    def __init__(self, delta: Any = DEFAULT_NET_SPACING) -> None:
        super().__init__()
        self.delta = as_rational(delta)
        if self.delta <= 0:
            raise SpaceError("net spacing must be positive")
        self.basepoint = Fraction(0)

    def distance(self, a, b):
        return abs(self.check(a) - self.check(b))

    def norm(self, a):
        return abs(self.check(a))

    def contains(self, a):
        if isinstance(a, bool) or not isinstance(a, (int, Fraction)):
            return False
        return (a / self.delta).denominator == 1

    def _ball_points(self, radius):
        count = math.floor(radius / self.delta)
        return [n * self.delta for n in range(-count, count + 1)]

    def neighbors(self, a, scale, radius):
        # ball(radius) lists 0, -d, d, -2d, 2d, ...
        m = int(self.check(a) / self.delta)
        points = self.ball(radius)
        position = lambda j: 2 * j if j >= 0 else -2 * j - 1  # noqa: E731
        lengths = _step_lengths(self.delta, math.floor(as_rational(scale) / self.delta))
        for k in range(1, len(lengths)):
            for j in (m - k, m + k):
                idx = position(j)
                if idx < len(points):
                    yield points[idx], lengths[k]

    def to_spec(self):
        return {"kind": self.kind, "params": {"delta": rational_to_json(self.delta)}}

    def label_to_json(self, a):
        return rational_to_json(a)

    def label_from_json(self, data):
        return self.check(as_rational(data))


class Lattice(Space):
    """``Z^dim`` with the l1 metric, based at the origin."""

    kind = "lattice"

    def __init__(self, dim: int = 2) -> None:
        super().__init__()
        if not isinstance(dim, int) or dim < 1:
            raise SpaceError("lattice dimension must be a positive integer")
        self.dim = dim
        self.basepoint = (0,) * dim

    def distance(self, a, b):
        self.check(a)
        self.check(b)
        return Fraction(sum(abs(x - y) for x, y in zip(a, b)))

    def contains(self, a):
        return (
            isinstance(a, tuple)
            and len(a) == self.dim
            and all(isinstance(x, int) and not isinstance(x, bool) for x in a)
        )

    @staticmethod
    def _l1_sphere_fill(dim: int, bound: int) -> list[tuple]:
        if dim == 0:
            return [()]
        out = []
        for x in range(-bound, bound + 1):
            for rest in Lattice._l1_sphere_fill(dim - 1, bound - abs(x)):
                out.append((x,) + rest)
        return out

    def _ball_points(self, radius):
        return self._l1_sphere_fill(self.dim, math.floor(radius))

    def neighbors(self, a, scale, radius):
        self.check(a)
        radius = as_rational(radius)
        for offset in self._l1_sphere_fill(self.dim, math.floor(as_rational(scale))):
            if not any(offset):
                continue
            b = tuple(x + y for x, y in zip(a, offset))
            if sum(abs(x) for x in b) <= radius:
                yield b, Fraction(sum(abs(x) for x in offset))

    def to_spec(self):
        return {"kind": self.kind, "params": {"dim": self.dim}}

    def label_to_json(self, a):
        return list(a)

    def label_from_json(self, data):
        return self.check(tuple(data))


WEDGE_POINT = (0,)


class Wedge(Space):
    """Metric wedge of pointed spaces glued along their basepoints.

    Labels are ``(0,)`` for the wedge point and ``(k, x)`` for a point ``x``
    of the k-th summand (1-based).  Across summands the distance runs through
    the wedge point: ``d(x, y) = |x| + |y|``.
    """

    kind = "wedge"

    def __init__(self, parts: Sequence[Space]) -> None:
        super().__init__()
        parts = tuple(parts)
        if not parts:
            raise SpaceError("metric wedge of an empty family")
        self.parts = parts
        self.basepoint = WEDGE_POINT

    def part(self, k: int) -> Space:
        if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= len(self.parts):
            raise SpaceError(f"no wedge summand {k!r}")
        return self.parts[k - 1]

    def _parts_within(self, radius: Fraction) -> Iterator[tuple[int, Space]]:
        """Summands that can have non-base points inside ``radius``."""
        return iter(enumerate(self.parts, start=1))

    def canonical(self, a):
        if isinstance(a, tuple) and len(a) == 2:
            k, x = a
            x = self.part(k).canonical(x)
            if x == self.part(k).basepoint:
                return WEDGE_POINT
            return (k, x)
        return a

    def contains(self, a):
        if a == WEDGE_POINT:
            return True
        if not (isinstance(a, tuple) and len(a) == 2):
            return False
        k, x = a
        try:
            part = self.part(k)
        except SpaceError:
            return False
        return part.contains(x) and x != part.basepoint

    def norm(self, a):
        self.check(a)
        if a == WEDGE_POINT:
            return Fraction(0)
        return self.part(a[0]).norm(a[1])

    def distance(self, a, b):
        self.check(a)
        self.check(b)
        if a == WEDGE_POINT:
            return self.norm(b)
        if b == WEDGE_POINT:
            return self.norm(a)
        if a[0] == b[0]:
            return self.part(a[0]).distance(a[1], b[1])
        return self.norm(a) + self.norm(b)

    def _ball_points(self, radius):
        pts = [WEDGE_POINT]
        for k, part in self._parts_within(radius):
            pts.extend((k, x) for x in part.ball(radius) if x != part.basepoint)
        return pts

    def neighbors(self, a, scale, radius):
        self.check(a)
        scale = as_rational(scale)
        radius = as_rational(radius)
        if a == WEDGE_POINT:
            for k, part in self._parts_within(min(scale, radius)):
                for x, d in part.neighbors(part.basepoint, scale, radius):
                    yield (k, x), d
            return
        k, x = a
        part = self.part(k)
        for y, d in part.neighbors(x, scale, radius):
            yield ((0,) if y == part.basepoint else (k, y)), d
        height = part.norm(x)
        if height <= scale:
            budget = min(scale - height, radius)
            for j, other in self._parts_within(budget):
                if j == k:
                    continue
                for y in other.ball(budget):
                    if y != other.basepoint:
                        yield (j, y), height + other.norm(y)

    def to_spec(self):
        return {"kind": self.kind, "params": {"parts": [p.to_spec() for p in self.parts]}}

    def label_to_json(self, a):
        if a == WEDGE_POINT:
            return [0]
        return [a[0], self.part(a[0]).label_to_json(a[1])]

    def label_from_json(self, data):
        if list(data) == [0]:
            return WEDGE_POINT
        k, x = data
        return self.check(self.canonical((k, self.part(k).label_from_json(x))))


class OpenBook(Wedge):
    """Wedge of ``num_rays`` delta-nets of ``[0, inf)``."""

    kind = "open_book"

    def __init__(self, num_rays: int, net_spacing: Any = DEFAULT_NET_SPACING) -> None:
        _check_ray_count(num_rays)
        self.net_spacing = as_rational(net_spacing)
        super().__init__([Ray(self.net_spacing, kind="ray") for _ in range(num_rays)])

    def to_spec(self):
        return {
            "kind": self.kind,
            "params": {"num_rays": len(self.parts), "net_spacing": rational_to_json(self.net_spacing)},
        }


class DiscreteOpenBook(Wedge):
    """Wedge of the progressions ``{0, i, 2i, ...}`` on ray ``i``.

    ``num_rays=None`` gives the full countable wedge; it stays locally finite
    because ray ``i`` has no non-base point closer than ``i``.
    """

    kind = "discrete_open_book"

    def __init__(self, num_rays: int | None = None) -> None:
        Space.__init__(self)
        if num_rays is not None:
            _check_ray_count(num_rays)
        self.num_rays = num_rays
        self.basepoint = WEDGE_POINT
        self._rays: dict[int, Ray] = {}

    def part(self, k):
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise SpaceError(f"no wedge summand {k!r}")
        if self.num_rays is not None and k > self.num_rays:
            raise SpaceError(f"no wedge summand {k!r}")
        ray = self._rays.get(k)
        if ray is None:
            ray = self._rays[k] = Ray(k)
        return ray

    @property
    def parts(self):
        if self.num_rays is None:
            raise SpaceError("the infinite discrete open book has no finite summand list")
        return tuple(self.part(k) for k in range(1, self.num_rays + 1))

    def _parts_within(self, radius):
        top = math.floor(radius)
        if self.num_rays is not None:
            top = min(top, self.num_rays)
        return ((k, self.part(k)) for k in range(1, top + 1))

    def norm(self, a):
        self.check(a)
        if a == WEDGE_POINT:
            return Fraction(0)
        return a[1]

    def distance(self, a, b):
        self.check(a)
        self.check(b)
        if a == WEDGE_POINT:
            return self.norm(b)
        if b == WEDGE_POINT:
            return self.norm(a)
        if a[0] == b[0]:
            return abs(a[1] - b[1])
        return a[1] + b[1]

    def label_to_json(self, a):
        if a == WEDGE_POINT:
            return [0]
        return [a[0], rational_to_json(a[1])]

    def to_spec(self):
        return {"kind": self.kind, "params": {"num_rays": self.num_rays}}


class Rebased(Space):
    """The same metric space with a different basepoint."""

    kind = "rebased"

    def __init__(self, space: Space, basepoint: Label) -> None:
        super().__init__()
        self.inner = space
        self.basepoint = space.check(space.canonical(basepoint))
        self.offset = space.norm(self.basepoint)

    def distance(self, a, b):
        return self.inner.distance(a, b)

    def contains(self, a):
        return self.inner.contains(a)

    def canonical(self, a):
        return self.inner.canonical(a)

    def _ball_points(self, radius):
        return [p for p in self.inner.ball(radius + self.offset)
                if self.inner.distance(self.basepoint, p) <= radius]

    def neighbors(self, a, scale, radius):
        radius = as_rational(radius)
        for b, d in self.inner.neighbors(a, scale, radius + self.offset):
            if self.inner.distance(self.basepoint, b) <= radius:
                yield b, d

    def to_spec(self):
        spec = self.inner.to_spec()
        return {**spec, "basepoint": self.inner.label_to_json(self.basepoint)}

    def label_to_json(self, a):
        return self.inner.label_to_json(a)

    def label_from_json(self, data):
        return self.inner.label_from_json(data)


def _check_ray_count(k: Any) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise SpaceError(f"number of rays must be a positive integer, got {k!r}")


# -- construction ----------------------------------------------------------

def metric_wedge(parts: Sequence[Space]) -> Wedge:
    """Glue pointed spaces at their basepoints with the through-basepoint metric."""
    return Wedge(parts)


def open_book(num_rays: int, net_spacing: Any = DEFAULT_NET_SPACING) -> OpenBook:
    return OpenBook(num_rays, net_spacing)


def discrete_open_book(num_rays: int | None = None) -> DiscreteOpenBook:
    return DiscreteOpenBook(num_rays)


def integer_ray() -> Ray:
    return Ray(1, kind="integer_ray")


def integer_line() -> Line:
    return Line(1)


def build_space(spec: dict) -> Space:
    """Build a presentation from a ``{"kind": ..., "params": {...}}`` mapping.

    An optional top-level ``"basepoint"`` (a JSON point label) moves the
    basepoint.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpaceError("space spec must be an object with a 'kind' field")
    kind = spec["kind"]
    params = dict(spec.get("params") or {})
    try:
        space = _BUILDERS[kind](params)
    except KeyError as exc:
        if kind not in _BUILDERS:
            raise SpaceError(f"unknown space kind {kind!r}") from exc
        raise SpaceError(f"missing parameter {exc} for {kind}") from exc
    except TypeError as exc:
        raise SpaceError(f"bad parameters for {kind}: {exc}") from exc
    if "basepoint" in spec:
        space = Rebased(space, space.label_from_json(spec["basepoint"]))
    return space


def _point_cloud(p: dict) -> Space:
    return PointCloud(p["distances"], basepoint=p.get("basepoint", 0))


_BUILDERS = {
    "point_cloud": _point_cloud,
    "integer_ray": lambda p: integer_ray(),
    "ray": lambda p: Ray(p.get("delta", DEFAULT_NET_SPACING), kind="ray"),
    "discrete_ray": lambda p: Ray(p["spacing"], kind="discrete_ray"),
    "delta_net": lambda p: Line(p.get("delta", DEFAULT_NET_SPACING)),
    "integer_line": lambda p: integer_line(),
    "lattice": lambda p: Lattice(p.get("dim", 2)),
    "wedge": lambda p: metric_wedge([build_space(s) for s in p["parts"]]),
    "open_book": lambda p: OpenBook(p["num_rays"], p.get("net_spacing", DEFAULT_NET_SPACING)),
    "discrete_open_book": lambda p: DiscreteOpenBook(p.get("num_rays")),
}


def distance(space: Space, a: Label, b: Label) -> Fraction:
    return space.distance(a, b)


def enumerate_ball(space: Space, radius: Any) -> tuple:
    return space.ball(radius)
