"""Small singular chains and cochains in the vertex-tuple model.

A singular simplex is represented by its vertex tuple ``(T(e_0), ..., T(e_n))``.
Every cochain built in this package only looks at vertices, and smallness is
a vertex condition, so nothing is lost for the identities checked here.  Two
continuous simplexes with the same vertices are identified; as a consequence
some chain identities hold only up to degenerate simplexes (repeated
vertices), see :func:`is_degenerate_chain`.

Group-valued cochains are written multiplicatively, algebra-valued ones
additively.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

from .errors import DomainError, NotSmallError
from .group import AlgebraElement, GroupDescriptor, GroupElement

MAX_DIM = 2


@dataclass(frozen=True)
class Simplex:
    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not 1 <= len(self.vertices) <= MAX_DIM + 2:
            raise ValueError(f"simplex must have between 1 and {MAX_DIM + 2} vertices")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def face(self, k: int) -> Simplex:
        """The k-th face: drop vertex k."""
        return Simplex(self.vertices[:k] + self.vertices[k + 1:])

    def is_degenerate(self) -> bool:
        return len(set(self.vertices)) < len(self.vertices)

    def __repr__(self):
        return f"Simplex{self.vertices}"


class Chain:
    """An element of the free abelian group on n-simplexes."""

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Mapping[Simplex, int] | Iterable[tuple[Simplex, int]] = ()):
        if not 0 <= dim <= MAX_DIM + 1:
            raise ValueError(f"unsupported chain dimension {dim}")
        self.dim = dim
        acc: dict[Simplex, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for s, c in items:
            if not isinstance(s, Simplex):
                s = Simplex(s)
            if s.dim != dim:
                raise ValueError(f"{s} has dimension {s.dim}, chain has dimension {dim}")
            if not isinstance(c, int):
                raise TypeError("chain coefficients must be integers")
            acc[s] = acc.get(s, 0) + c
        self._terms = {s: c for s, c in acc.items() if c != 0}

    @classmethod
    def zero(cls, dim: int) -> Chain:
        return cls(dim)

    @classmethod
    def of(cls, *vertices, coeff: int = 1) -> Chain:
        s = Simplex(vertices)
        return cls(s.dim, {s: coeff})

    @property
    def terms(self) -> dict[Simplex, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def simplexes(self) -> list[Simplex]:
        return list(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __getitem__(self, s: Simplex) -> int:
        return self._terms.get(s, 0)

    def _check(self, other: Chain):
        if not isinstance(other, Chain):
            raise TypeError(f"cannot combine Chain with {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"cannot add chains of dimension {self.dim} and {other.dim}")

    def __add__(self, other: Chain) -> Chain:
        self._check(other)
        return Chain(self.dim, list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self) -> Chain:
        return Chain(self.dim, {s: -c for s, c in self._terms.items()})

    def __sub__(self, other: Chain) -> Chain:
        return self + (-other)

    def __rmul__(self, n: int) -> Chain:
        if not isinstance(n, int):
            return NotImplemented
        return Chain(self.dim, {s: n * c for s, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self):
        return hash((self.dim, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return f"Chain.zero({self.dim})"
        parts = []
        for s, c in self._terms.items():
            v = s.vertices
            parts.append(f"{v}" if c == 1 else f"-{v}" if c == -1 else f"{c}*{v}")
        return " + ".join(parts)

    def to_json(self, vertex_to_json: Callable[[Any], Any] | None = None) -> list[dict]:
        conv = vertex_to_json or _default_vertex_json
        return [{"coeff": c, "vertices": [conv(v) for v in s.vertices]} for s, c in self._terms.items()]

    @classmethod
    def from_json(cls, data: list, vertex_from_json: Callable[[Any], Any] | None = None,
                  dim: int | None = None) -> Chain:
        conv = vertex_from_json or _default_vertex_from_json
        terms = []
        for entry in data:
            verts = tuple(conv(v) for v in entry["vertices"])
            terms.append((Simplex(verts), int(entry["coeff"])))
        if dim is None:
            if not terms:
                raise ValueError("cannot infer the dimension of an empty chain")
            dim = terms[0][0].dim
        return cls(dim, terms)


def _default_vertex_json(v):
    if hasattr(v, "to_json"):
        return v.to_json()
    if isinstance(v, tuple):
        return list(v)
    return v


def _default_vertex_from_json(v):
    if isinstance(v, list):
        return tuple(float(x) for x in v)
    if isinstance(v, (int, float)):
        return (float(v),)
    raise ValueError(f"cannot decode vertex {v!r}")


def is_degenerate_chain(c: Chain) -> bool:
    """True iff every simplex of ``c`` has a repeated vertex."""
    return all(s.is_degenerate() for s in c.simplexes())


@dataclass(frozen=True)
class Region:
    """An open subset of ``X x X`` given by a membership predicate on pairs.

    Tuple membership follows ``U^(n+1)``: all pairs ``(x_j, x_k)`` with
    ``j < k`` must lie in the region (all ordered pairs with ``all_pairs``).
    """

    contains_pair: Callable[[Any, Any], bool]
    ambient: str = "base"
    name: str = "region"

    @classmethod
    def full(cls, ambient: str = "base") -> Region:
        return cls(_always, ambient, "full")

    def __call__(self, x0, x1) -> bool:
        return bool(self.contains_pair(x0, x1))

    def contains_tuple(self, points, all_pairs: bool = False) -> bool:
        n = len(points)
        for j in range(n):
            for k in range(n):
                if k == j or (k < j and not all_pairs):
                    continue
                if not self.contains_pair(points[j], points[k]):
                    return False
        return True

    def intersect(self, other: Region) -> Region:
        if self.name == "full":
            return other
        if other.name == "full":
            return self
        a, b = self.contains_pair, other.contains_pair
        return Region(lambda x, y: a(x, y) and b(x, y), self.ambient, f"{self.name}&{other.name}")


def _always(x0, x1) -> bool:
    return True


def is_small(T: Simplex, R: Region, all_pairs: bool = False) -> bool:
    if T.dim == 0:
        return True
    return R.contains_tuple(T.vertices, all_pairs)


def _identity_for(descriptor: GroupDescriptor, algebra: bool):
    return descriptor.zero() if algebra else descriptor.identity()


@dataclass(frozen=True)
class Cochain:
    """A small singular n-cochain with values in G (or in its Lie algebra).

    ``evaluate_simplex`` is only ever called on simplexes that are small for
    ``region``; evaluation on chains is the homomorphic extension.
    """

    dim: int
    descriptor: GroupDescriptor
    evaluate_simplex: Callable[[Simplex], GroupElement | AlgebraElement]
    region: Region = field(default_factory=Region.full)
    algebra: bool = False
    name: str = ""

    def identity(self):
        return _identity_for(self.descriptor, self.algebra)

    def __call__(self, c: Chain | Simplex):
        return integrate(self, c)

    def __add__(self, other: Cochain) -> Cochain:
        """Pointwise group operation (product for G-valued cochains)."""
        if (other.dim, other.descriptor, other.algebra) != (self.dim, self.descriptor, self.algebra):
            raise ValueError("cochains live in different groups")
        f, g = self.evaluate_simplex, other.evaluate_simplex
        op = (lambda a, b: a + b) if self.algebra else (lambda a, b: a * b)
        return Cochain(self.dim, self.descriptor, lambda T: op(f(T), g(T)),
                       self.region.intersect(other.region), self.algebra)

    def __neg__(self) -> Cochain:
        f = self.evaluate_simplex
        inv = (lambda a: -a) if self.algebra else (lambda a: a.inverse())
        return Cochain(self.dim, self.descriptor, lambda T: inv(f(T)), self.region, self.algebra)


def _scale(value, n: int, algebra: bool):
    return n * value if algebra else value ** n


def _op(a, b, algebra: bool):
    return a + b if algebra else a * b


def integrate(alpha: Cochain, c: Chain | Simplex):
    """The pairing of a cochain with a chain of the same dimension."""
    if isinstance(c, Simplex):
        c = Chain(c.dim, {c: 1})
    if c.dim != alpha.dim:
        raise DomainError(f"cannot pair a {alpha.dim}-cochain with a {c.dim}-chain")
    result = alpha.identity()
    for s, n in c.items():
        if not is_small(s, alpha.region):
            raise NotSmallError(s, alpha.region.name)
        result = _op(result, _scale(alpha.evaluate_simplex(s), n, alpha.algebra), alpha.algebra)
    return result


def boundary(c: Chain) -> Chain:
    if c.dim < 1:
        raise ValueError("the boundary of a 0-chain is not defined")
    terms = []
    for s, n in c.items():
        for k in range(s.dim + 1):
            terms.append((s.face(k), n if k % 2 == 0 else -n))
    return Chain(c.dim - 1, terms)


def coboundary(alpha: Cochain) -> Cochain:
    """``(delta alpha)(T) = alpha(boundary T)``; region and coefficients carry over."""
    if alpha.dim not in (0, 1):
        raise ValueError(f"coboundary of a {alpha.dim}-cochain is not supported")

    def evaluate(T: Simplex):
        return integrate(alpha, boundary(Chain(T.dim, {T: 1})))

    return Cochain(alpha.dim + 1, alpha.descriptor, evaluate, alpha.region, alpha.algebra,
                   f"d({alpha.name})" if alpha.name else "")


def pushforward(f: Callable, alpha: Cochain, *, algebra: bool | None = None,
                descriptor: GroupDescriptor | None = None) -> Cochain:
    """Change of coefficients ``f_* alpha = f o alpha`` along a homomorphism ``f``.

    ``algebra`` and ``descriptor`` describe the target coefficients and default
    to those of ``alpha``; for ``f = exp`` pass ``algebra=False``.
    """
    g = alpha.evaluate_simplex
    return Cochain(alpha.dim,
                   alpha.descriptor if descriptor is None else descriptor,
                   lambda T: f(g(T)),
                   alpha.region,
                   alpha.algebra if algebra is None else algebra,
                   f"f*({alpha.name})" if alpha.name else "")


def zero_cochain(dim: int, descriptor: GroupDescriptor, algebra: bool = False,
                 region: Region | None = None) -> Cochain:
    value = _identity_for(descriptor, algebra)
    return Cochain(dim, descriptor, lambda T: value, region or Region.full(), algebra, "zero")
