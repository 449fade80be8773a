"""Random complete graphs with exponential edge weights, and path functionals.

Edges ``{u, v}`` with ``u < v`` are numbered row-major,

    index(u, v) = u*n - u*(u+1)/2 + (v - u - 1),

and edge ``e`` gets weight ``-edge_mean * log(U_e)`` where ``U_e`` is the
counter-based uniform ``rng.counter_uniforms(key, e)`` with
``key = rng.mix(seed, n)``.  The dense table and the on-demand row
computation run the same arithmetic, so both storage modes agree bit for bit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import rng
from .errors import InvalidArgument, InvalidPath

FORMAT_VERSION = 1
DENSE_LIMIT = 10_000


def edge_index(n: int, u, v):
    """Row-major index of edge {u, v}; works on scalars and integer arrays."""
    a = np.minimum(u, v)
    b = np.maximum(u, v)
    return a * n - a * (a + 1) // 2 + (b - a - 1)


@dataclass(frozen=True, eq=False)
class Instance:
    """Weighted complete graph K_n, regenerated from ``(n, edge_mean, seed)``.

    Use :func:`generate_instance` rather than the constructor.  ``weights``
    is the dense symmetric table (zero diagonal); for ``n > DENSE_LIMIT``
    it is not materialised and :meth:`row` computes rows on demand.
    """

    n: int
    edge_mean: float
    seed: int
    _table: np.ndarray | None = field(default=None, repr=False)

    @property
    def key(self) -> int:
        return rng.mix(self.seed, self.n)

    @property
    def dense(self) -> bool:
        return self._table is not None

    @property
    def weights(self) -> np.ndarray:
        if self._table is None:
            raise InvalidArgument(
                f"n={self.n} exceeds the dense limit {DENSE_LIMIT}; use row()/weight()"
            )
        return self._table

    def row(self, u: int) -> np.ndarray:
        """Weights from vertex ``u`` to every vertex (entry ``u`` is 0)."""
        if self._table is not None:
            return self._table[u]
        v = np.arange(self.n, dtype=np.int64)
        out = _weights_for(self, np.full(self.n, u, dtype=np.int64), v)
        out[u] = 0.0
        return out

    def weight(self, u: int, v: int) -> float:
        if u == v:
            raise InvalidArgument("no self-loops in K_n")
        if self._table is not None:
            return float(self._table[u, v])
        return float(_weights_for(self, np.array([u]), np.array([v]))[0])

    def header(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "n": self.n,
            "edge_mean": self.edge_mean,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.header())

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        h = json.loads(text)
        if h.get("format_version") != FORMAT_VERSION:
            raise InvalidArgument(f"unsupported instance format {h.get('format_version')!r}")
        return generate_instance(h["n"], h["edge_mean"], h["seed"])


def _weights_for(inst: Instance, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    idx = edge_index(inst.n, u.astype(np.int64), v.astype(np.int64))
    return -inst.edge_mean * np.log(rng.counter_uniforms(inst.key, idx))


def generate_instance(n: int, edge_mean: float | None = None, seed: int = 0,
                      dense: bool | None = None) -> Instance:
    """Draw K_n with i.i.d. Exp(mean=edge_mean) weights; ``edge_mean`` defaults to n."""
    if n < 2:
        raise InvalidArgument(f"need n >= 2, got {n}")
    if edge_mean is None:
        edge_mean = float(n)
    if not edge_mean > 0:
        raise InvalidArgument(f"edge_mean must be positive, got {edge_mean}")
    if dense is None:
        dense = n <= DENSE_LIMIT
    inst = Instance(int(n), float(edge_mean), int(seed))
    if not dense:
        return inst
    iu, iv = np.triu_indices(n, k=1)
    w = _weights_for(inst, iu, iv)
    table = np.zeros((n, n))
    table[iu, iv] = w
    table[iv, iu] = w
    table.setflags(write=False)
    object.__setattr__(inst, "_table", table)
    return inst


def instance_with_weights(table: np.ndarray) -> Instance:
    """Wrap a hand-made symmetric table (tests, worked examples).  Seed is -1."""
    t = np.array(table, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 2:
        raise InvalidArgument("weight table must be square with n >= 2")
    if not np.allclose(t, t.T):
        raise InvalidArgument("weight table must be symmetric")
    np.fill_diagonal(t, 0.0)
    t.setflags(write=False)
    inst = Instance(t.shape[0], float("nan"), -1)
    object.__setattr__(inst, "_table", t)
    return inst


@dataclass(frozen=True, init=False)
class Path:
    """An ordered simple path ``v_0, ..., v_l``; a path and its reversal differ."""

    vertices: tuple[int, ...]

    def __init__(self, vertices: Iterable[int]):
        vs = tuple(int(v) for v in vertices)
        if len(vs) < 2:
            raise InvalidPath("a path needs at least one edge")
        if len(set(vs)) != len(vs):
            raise InvalidPath(f"repeated vertex in {vs}")
        if min(vs) < 0:
            raise InvalidPath(f"negative vertex id in {vs}")
        object.__setattr__(self, "vertices", vs)

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def reversed(self) -> "Path":
        return Path(self.vertices[::-1])

    def edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(vs[i], vs[i + 1]) for i in range(len(vs) - 1)]

    def to_json(self) -> str:
        return json.dumps(list(self.vertices))

    @classmethod
    def from_json(cls, text: str) -> "Path":
        return cls(json.loads(text))

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)


@dataclass(frozen=True)
class PathStats:
    total_weight: float
    deviation: float
    argmax_index: int


def as_path(p: Path | Sequence[int]) -> Path:
    return p if isinstance(p, Path) else Path(p)


def edge_weights(inst: Instance, path: Path | Sequence[int]) -> np.ndarray:
    """The weights X_1, ..., X_l along the path, in order."""
    p = as_path(path)
    vs = np.asarray(p.vertices)
    if vs.max() >= inst.n:
        raise InvalidPath(f"vertex id out of range for n={inst.n}: {p.vertices}")
    if inst.dense:
        return inst.weights[vs[:-1], vs[1:]]
    return _weights_for(inst, vs[:-1], vs[1:])


def path_weight(inst: Instance, path: Path | Sequence[int]) -> float:
    """Total weight X(path)."""
    return float(edge_weights(inst, path).sum())


def deviation_profile(x: np.ndarray) -> np.ndarray:
    """|S_k - (k/l) S_l| for k = 1..l, where S_k are partial sums of ``x``."""
    s = np.cumsum(x)
    l = len(x)
    k = np.arange(1, l + 1)
    return np.abs(s - k * s[-1] / l)


def path_stats(inst: Instance, path: Path | Sequence[int]) -> PathStats:
    """Total weight and maximal deviation M from the straight line k X / l.

    ``argmax_index`` is the smallest k attaining the maximum.
    """
    x = edge_weights(inst, path)
    dev = deviation_profile(x)
    k = int(np.argmax(dev))
    return PathStats(float(x.sum()), float(dev[k]), k + 1)
