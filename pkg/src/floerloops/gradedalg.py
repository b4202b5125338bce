"""Exact graded Z-linear algebra: generators, sparse chains, complexes, Koszul signs.

Grading is cohomological throughout; chain-level (homological) data is stored
with negated degree.  A generator carries an orientation token in {+1, -1}:
the generator with token -1 is, as a chain, the negative of the one with
token +1, and chains canonicalise tokens to +1 by folding the sign into the
coefficient.  Coefficients are arbitrary-precision integers.

All values are immutable after construction; every operation is pure.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Callable, Hashable

from .report import CheckReport, failed, passed

Gid = Hashable


def sign_pow(exponent: int) -> int:
    """(-1)**exponent for arbitrary integer exponents."""
    return -1 if exponent & 1 else 1


def koszul_sign(left_degrees: Iterable[int], right_degrees: Iterable[int]) -> int:
    """Sign for moving a block of graded factors past another.

    Each element of degree a from the left block moved past an element of
    degree b from the right block contributes (-1)**(a*b); the total is the
    product over all such pairs.
    """
    left_odd = sum(1 for a in left_degrees if a & 1)
    right_odd = sum(1 for b in right_degrees if b & 1)
    return sign_pow(left_odd * right_odd)


@dataclass(frozen=True)
class Generator:
    """A graded basis element with an orientation token.

    `gid` is an opaque hashable identifier.  Two generators differing only in
    the token are negatives of each other as chains.
    """

    gid: Gid
    degree: int
    orientation: int = 1

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError(f"orientation token must be +1 or -1, got {self.orientation}")

    @property
    def key(self) -> "Generator":
        """The token-(+1) representative used as the canonical chain key."""
        if self.orientation == 1:
            return self
        return Generator(self.gid, self.degree, 1)

    def flipped(self) -> "Generator":
        return Generator(self.gid, self.degree, -self.orientation)


class Chain:
    """A finite Z-linear combination of generators in canonical form.

    Canonical form stores no zero coefficients and only token-(+1)
    generators.  Instances are immutable by convention; all arithmetic
    returns fresh chains.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Generator, int] | None = None):
        canon: dict[Generator, int] = {}
        if terms:
            for gen, coeff in terms.items():
                if coeff == 0:
                    continue
                c = coeff * gen.orientation
                k = gen.key
                new = canon.get(k, 0) + c
                if new:
                    canon[k] = new
                else:
                    canon.pop(k, None)
        self._terms = canon

    @classmethod
    def zero(cls) -> "Chain":
        return _ZERO

    @classmethod
    def of(cls, gen: Generator, coeff: int = 1) -> "Chain":
        return cls({gen: coeff})

    @property
    def terms(self) -> dict[Generator, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, gen: Generator) -> int:
        return self._terms.get(gen.key, 0) * gen.orientation

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "Chain") -> "Chain":
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for gen, coeff in other._terms.items():
            new = out.get(gen, 0) + coeff
            if new:
                out[gen] = new
            else:
                out.pop(gen, None)
        res = Chain.__new__(Chain)
        res._terms = out
        return res

    def __neg__(self) -> "Chain":
        res = Chain.__new__(Chain)
        res._terms = {g: -c for g, c in self._terms.items()}
        return res

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, scalar: int) -> "Chain":
        if scalar == 0:
            return _ZERO
        if scalar == 1:
            return self
        res = Chain.__new__(Chain)
        res._terms = {g: scalar * c for g, c in self._terms.items()}
        return res

    def __rmul__(self, scalar: int) -> "Chain":
        return self.scale(scalar)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Chain) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int | None:
        """Common degree of the terms; None for the zero chain.

        Raises if the chain is inhomogeneous.
        """
        degs = {g.degree for g in self._terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous chain with degrees {sorted(degs)}")
        return degs.pop()

    def map_generators(self, fn: Callable[[Generator], "Chain"]) -> "Chain":
        out = _ZERO
        for gen, coeff in self._terms.items():
            out = out + fn(gen).scale(coeff)
        return out

    def sorted_items(self) -> list[tuple[Generator, int]]:
        return sorted(self._terms.items(), key=lambda kv: repr(kv[0].gid))

    def __repr__(self):
        if not self._terms:
            return "Chain(0)"
        parts = [f"{c}*{g.gid}" for g, c in self.sorted_items()]
        return "Chain(" + " + ".join(parts) + ")"


_ZERO = Chain()


# ---------------------------------------------------------------------------
# Finite cubical sets and normalised cubical chains.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cube:
    """A combinatorial cube in a finite cubical set.

    `faces[(k, eps)]` names the (dim-1)-cube obtained by freezing the k-th
    free coordinate (k = 1..dim) at eps in {0, 1}.  Degenerate cubes are
    quotiented out of the normalised chain complex.
    """

    cid: Gid
    dim: int
    faces: tuple[tuple[tuple[int, int], Gid], ...] = ()
    degenerate: bool = False

    def face(self, k: int, eps: int) -> Gid:
        for (kk, ee), target in self.faces:
            if kk == k and ee == eps:
                return target
        raise KeyError(f"cube {self.cid} has no face ({k},{eps})")


class CubicalSet:
    """A finite cubical set given by explicit cubes and face assignments."""

    def __init__(self, cubes: Iterable[Cube]):
        self._cubes: dict[Gid, Cube] = {}
        for cube in cubes:
            if cube.cid in self._cubes:
                raise ValueError(f"duplicate cube id {cube.cid}")
            self._cubes[cube.cid] = cube
        for cube in self._cubes.values():
            expected = {(k, e) for k in range(1, cube.dim + 1) for e in (0, 1)}
            got = {ke for ke, _ in cube.faces}
            if got != expected:
                raise ValueError(f"cube {cube.cid}: faces {got} != expected {expected}")
            for _, target in cube.faces:
                tgt = self._cubes.get(target)
                if tgt is None or tgt.dim != cube.dim - 1:
                    raise ValueError(f"cube {cube.cid}: bad face target {target}")

    def cube(self, cid: Gid) -> Cube:
        return self._cubes[cid]

    def cubes(self, dim: int | None = None) -> list[Cube]:
        out = [c for c in self._cubes.values() if dim is None or c.dim == dim]
        return sorted(out, key=lambda c: repr(c.cid))

    def generator(self, cid: Gid) -> Generator:
        cube = self._cubes[cid]
        # Chains on cubes live in C_{-*}: cohomological degree is -dim.
        return Generator(("cube", cid), -cube.dim)


def cubical_boundary(cset: CubicalSet, cid: Gid) -> Chain:
    """Normalised boundary: sum of (-1)**(k+eps) faces, degenerate faces dropped.

    A degenerate cube is itself zero in normalised chains, so its boundary
    is the zero chain.
    """
    cube = cset.cube(cid)
    if cube.degenerate:
        return Chain.zero()
    terms: dict[Generator, int] = {}
    for (k, eps), target in cube.faces:
        face = cset.cube(target)
        if face.degenerate:
            continue
        gen = cset.generator(target)
        terms[gen] = terms.get(gen, 0) + sign_pow(k + eps)
    return Chain(terms)


def standard_cube_complex(n: int) -> CubicalSet:
    """The cubical set of all faces of the n-cube.

    Faces are encoded as words in {'0', '1', '*'}; dimension is the number
    of stars, and delta_{k,eps} freezes the k-th star.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    words = [""]
    for _ in range(n):
        words = [w + ch for w in words for ch in "01*"]
    cubes = []
    for w in words:
        stars = [i for i, ch in enumerate(w) if ch == "*"]
        faces = []
        for k, pos in enumerate(stars, start=1):
            for eps in (0, 1):
                target = w[:pos] + str(eps) + w[pos + 1:]
                faces.append(((k, eps), target))
        cubes.append(Cube(w if w else "pt", len(stars), tuple(faces)))
    return CubicalSet(cubes)


def torus_square_complex() -> CubicalSet:
    """The torus as one square with opposite edges identified."""
    v = Cube("v", 0)
    a = Cube("a", 1, (((1, 0), "v"), ((1, 1), "v")))
    b = Cube("b", 1, (((1, 0), "v"), ((1, 1), "v")))
    sq = Cube("sq", 2, (((1, 0), "a"), ((1, 1), "a"), ((2, 0), "b"), ((2, 1), "b")))
    return CubicalSet([v, a, b, sq])


def circle_with_degenerate_square() -> CubicalSet:
    """A circle together with a degenerate edge and a degenerate square on it."""
    v = Cube("v", 0)
    e = Cube("e", 1, (((1, 0), "v"), ((1, 1), "v")))
    dv = Cube("dv", 1, (((1, 0), "v"), ((1, 1), "v")), degenerate=True)
    dsq = Cube(
        "dsq", 2,
        (((1, 0), "e"), ((1, 1), "e"), ((2, 0), "dv"), ((2, 1), "dv")),
        degenerate=True,
    )
    return CubicalSet([v, e, dv, dsq])


def complex_from_cubical_set(cset: CubicalSet) -> "GradedComplex":
    basis = tuple(
        cset.generator(c.cid)
        for c in sorted(cset.cubes(), key=lambda c: (c.dim, repr(c.cid)))
        if not c.degenerate
    )
    diff = {g: cubical_boundary(cset, g.gid[1]) for g in basis}
    return GradedComplex(basis, diff)


# ---------------------------------------------------------------------------
# Graded complexes.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedComplex:
    """A complex with a chosen basis and a degree +1 differential on it."""

    basis: tuple[Generator, ...]
    d_table: Mapping[Generator, Chain] = field(default_factory=dict)

    def d(self, chain: Chain) -> Chain:
        table = self.d_table
        out = Chain.zero()
        for gen, coeff in chain.items():
            out = out + table.get(gen, Chain.zero()).scale(coeff)
        return out

    def d_gen(self, gen: Generator) -> Chain:
        return self.d_table.get(gen.key, Chain.zero()).scale(gen.orientation)


def check_d_squared(complex_: GradedComplex, name: str = "d-squared") -> CheckReport:
    """Pass, or the first basis element g with d(d(g)) != 0 plus the residual."""
    for gen in complex_.basis:
        dd = complex_.d(complex_.d_gen(gen))
        if not dd.is_zero():
            return failed(name, {"generator": gen.gid, "residual": repr(dd)})
        dgen = complex_.d_gen(gen)
        deg = dgen.degree()
        if deg is not None and deg != gen.degree + 1:
            return failed(
                name,
                {"generator": gen.gid, "residual": f"d has degree {deg - gen.degree}"},
            )
    return passed(name, basis_size=len(complex_.basis))
