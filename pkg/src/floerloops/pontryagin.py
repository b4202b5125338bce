"""Finite models of the path category of a space: basepoints, graded hom
complexes, and strictly associative concatenation.

Morphism complexes are graded as Hom_* = C_{-*} of the path space, so the
degree-0 part carries the components of the path space and the product sign
for mu_2 is (-1)**deg(first factor).  The circle model stores one generator
per homotopy class of paths between marked basepoints, with zero
differential; table-backed models may carry a differential and are validated
by the same exhaustive checks.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .gradedalg import Chain, Generator, GradedComplex, sign_pow
from .report import CheckReport, failed, passed

SCHEMA_VERSION = 1


class PathModel:
    """Common machinery for concrete path models.

    Subclasses provide the basis, endpoints, units, the raw concatenation of
    basis generators, and the differential on basis generators.
    """

    points: tuple = ()

    # -- hooks -------------------------------------------------------------
    def hom_basis(self, i: int, j: int, window: int) -> tuple[Generator, ...]:
        raise NotImplementedError

    def gen_endpoints(self, gen: Generator) -> tuple[int, int]:
        raise NotImplementedError

    def unit_gen(self, i: int) -> Generator:
        raise NotImplementedError

    def concat_gens(self, g1: Generator, g2: Generator) -> Chain:
        """Raw concatenation g1.g2 (g1 first, from i to j; g2 from j to l)."""
        raise NotImplementedError

    def d_gen(self, gen: Generator) -> Chain:
        raise NotImplementedError

    # -- derived operations --------------------------------------------------
    def npoints(self) -> int:
        return len(self.points)

    def unit_chain(self, i: int) -> Chain:
        return Chain.of(self.unit_gen(i))

    def concat(self, chain1: Chain, chain2: Chain) -> Chain:
        out = Chain.zero()
        for g1, c1 in chain1.items():
            for g2, c2 in chain2.items():
                out = out + self.concat_gens(g1, g2).scale(c1 * c2)
        return out

    def mu1(self, chain: Chain) -> Chain:
        out = Chain.zero()
        for gen, coeff in chain.items():
            out = out + self.d_gen(gen).scale(coeff)
        return out

    def mu2(self, chain2: Chain, chain1: Chain) -> Chain:
        """mu_2(s2, s1) = (-1)**deg(s1) s1.s2, extended bilinearly."""
        out = Chain.zero()
        for g1, c1 in chain1.items():
            s = sign_pow(g1.degree)
            for g2, c2 in chain2.items():
                out = out + self.concat_gens(g1, g2).scale(s * c1 * c2)
        return out

    def hom_complex(self, i: int, j: int, window: int) -> GradedComplex:
        basis = self.hom_basis(i, j, window)
        return GradedComplex(basis, {g: self.d_gen(g) for g in basis})


class CirclePathModel(PathModel):
    """Path classes between marked basepoints on a circle of circumference 1.

    A generator from basepoint i to basepoint j is labelled by the integer
    winding k; its total displacement is (points[j] - points[i]) + k.
    Every component of the path space is contractible, so the model is
    concentrated in degree 0 with zero differential, and concatenation adds
    windings.
    """

    def __init__(self, points: Iterable[Fraction]):
        pts = tuple(Fraction(p) for p in points)
        if not pts:
            raise ValueError("need at least one basepoint")
        if len(set(pts)) != len(pts):
            raise ValueError("basepoints must be distinct")
        if any(p < 0 or p >= 1 for p in pts):
            raise ValueError("basepoints must lie in [0, 1)")
        self.points = pts

    def gen(self, i: int, j: int, winding: int) -> Generator:
        self._check_index(i)
        self._check_index(j)
        return Generator(("p", i, j, winding), 0)

    def _check_index(self, i: int) -> None:
        if not 0 <= i < len(self.points):
            raise IndexError(f"basepoint index {i} out of range")

    def hom_basis(self, i: int, j: int, window: int) -> tuple[Generator, ...]:
        return tuple(self.gen(i, j, k) for k in range(-window, window + 1))

    def gen_endpoints(self, gen: Generator) -> tuple[int, int]:
        _, i, j, _ = gen.gid
        return i, j

    def winding(self, gen: Generator) -> int:
        return gen.gid[3]

    def displacement(self, gen: Generator) -> Fraction:
        _, i, j, k = gen.gid
        return self.points[j] - self.points[i] + k

    def unit_gen(self, i: int) -> Generator:
        return self.gen(i, i, 0)

    def concat_gens(self, g1: Generator, g2: Generator) -> Chain:
        _, i, j, k1 = g1.gid
        _, j2, l, k2 = g2.gid
        if j != j2:
            raise ValueError(f"paths not composable: {g1.gid} then {g2.gid}")
        sgn = g1.orientation * g2.orientation
        return Chain.of(self.gen(i, l, k1 + k2), sgn)

    def d_gen(self, gen: Generator) -> Chain:
        return Chain.zero()


def circle_model(num_basepoints: int) -> CirclePathModel:
    """The model of the circle's path category on n equally spaced basepoints."""
    if num_basepoints < 1:
        raise ValueError("num_basepoints must be >= 1")
    return CirclePathModel(Fraction(j, num_basepoints) for j in range(num_basepoints))


def circle_model_at(points: Iterable[Fraction]) -> CirclePathModel:
    return CirclePathModel(points)


class FinitePathModel(PathModel):
    """A path model backed by explicit finite tables (e.g. loaded from JSON)."""

    def __init__(
        self,
        points: tuple,
        generators: Mapping[Hashable, tuple[int, int, int]],
        units: Mapping[int, Hashable],
        composition: Mapping[tuple[Hashable, Hashable], Mapping[Hashable, int]],
        differential: Mapping[Hashable, Mapping[Hashable, int]] | None = None,
    ):
        self.points = tuple(points)
        self._gens: dict[Hashable, Generator] = {}
        self._endpoints: dict[Hashable, tuple[int, int]] = {}
        for gid, (src, tgt, deg) in generators.items():
            self._gens[gid] = Generator(gid, deg)
            self._endpoints[gid] = (src, tgt)
        self._units = dict(units)
        for i in range(len(self.points)):
            ugid = self._units.get(i)
            if ugid not in self._gens or self._endpoints[ugid] != (i, i):
                raise ValueError(f"missing or invalid unit for point {i}")
        self._compose = {
            pair: self._to_chain(table) for pair, table in composition.items()
        }
        self._diff = {
            gid: self._to_chain(table) for gid, table in (differential or {}).items()
        }

    def _to_chain(self, table: Mapping[Hashable, int]) -> Chain:
        return Chain({self._gens[gid]: coeff for gid, coeff in table.items()})

    def hom_basis(self, i: int, j: int, window: int = 0) -> tuple[Generator, ...]:
        out = [g for gid, g in self._gens.items() if self._endpoints[gid] == (i, j)]
        return tuple(sorted(out, key=lambda g: repr(g.gid)))

    def all_gens(self) -> tuple[Generator, ...]:
        return tuple(sorted(self._gens.values(), key=lambda g: repr(g.gid)))

    def gen_endpoints(self, gen: Generator) -> tuple[int, int]:
        return self._endpoints[gen.gid]

    def unit_gen(self, i: int) -> Generator:
        return self._gens[self._units[i]]

    def concat_gens(self, g1: Generator, g2: Generator) -> Chain:
        if self._endpoints[g1.gid][1] != self._endpoints[g2.gid][0]:
            raise ValueError(f"paths not composable: {g1.gid} then {g2.gid}")
        sgn = g1.orientation * g2.orientation
        return self._compose.get((g1.gid, g2.gid), Chain.zero()).scale(sgn)

    def d_gen(self, gen: Generator) -> Chain:
        return self._diff.get(gen.gid, Chain.zero()).scale(gen.orientation)


class MutatedPathModel(PathModel):
    """Wrapper flipping the sign of one composition entry (test corruption)."""

    def __init__(self, base: PathModel, flip_pair: tuple[Hashable, Hashable]):
        self.base = base
        self.points = base.points
        self.flip_pair = flip_pair

    def hom_basis(self, i, j, window):
        return self.base.hom_basis(i, j, window)

    def gen_endpoints(self, gen):
        return self.base.gen_endpoints(gen)

    def unit_gen(self, i):
        return self.base.unit_gen(i)

    def concat_gens(self, g1, g2):
        out = self.base.concat_gens(g1, g2)
        if (g1.gid, g2.gid) == self.flip_pair:
            out = -out
        return out

    def d_gen(self, gen):
        return self.base.d_gen(gen)


def _basis_all(model: PathModel, window: int) -> list[Generator]:
    n = model.npoints()
    out: list[Generator] = []
    for i in range(n):
        for j in range(n):
            out.extend(model.hom_basis(i, j, window))
    return out


def validate_path_model(
    model: PathModel, window: int = 2, name: str = "path-model"
) -> CheckReport:
    """Exhaustive associativity, unitality, Leibniz and d-squared checks.

    All basis elements within the winding window are checked; products are
    evaluated exactly, so composites leaving the window are still correct.
    """
    basis = _basis_all(model, window)

    for g in basis:
        dd = model.mu1(model.mu1(Chain.of(g)))
        if not dd.is_zero():
            return failed(name, {"check": "d-squared", "generator": g.gid, "residual": repr(dd)})

    for i in range(model.npoints()):
        unit = model.unit_chain(i)
        for g in basis:
            src, tgt = model.gen_endpoints(g)
            if tgt == i:
                prod = model.concat(Chain.of(g), unit)
                if prod != Chain.of(g):
                    return failed(name, {"check": "right-unit", "generator": g.gid})
            if src == i:
                prod = model.concat(unit, Chain.of(g))
                if prod != Chain.of(g):
                    return failed(name, {"check": "left-unit", "generator": g.gid})

    pairs = [
        (g1, g2)
        for g1 in basis
        for g2 in basis
        if model.gen_endpoints(g1)[1] == model.gen_endpoints(g2)[0]
    ]
    for g1, g2 in pairs:
        c1, c2 = Chain.of(g1), Chain.of(g2)
        # d=2 A-infinity relation: mu1 mu2(s2,s1) + mu2(s2, mu1 s1)
        #   + (-1)**(1+deg s1) mu2(mu1 s2, s1) = 0.
        residual = (
            model.mu1(model.mu2(c2, c1))
            + model.mu2(c2, model.mu1(c1))
            + model.mu2(model.mu1(c2), c1).scale(sign_pow(1 + g1.degree))
        )
        if not residual.is_zero():
            return failed(
                name,
                {"check": "leibniz", "pair": (g1.gid, g2.gid), "residual": repr(residual)},
            )

    for g1, g2 in pairs:
        for g3 in basis:
            if model.gen_endpoints(g2)[1] != model.gen_endpoints(g3)[0]:
                continue
            c1, c2, c3 = Chain.of(g1), Chain.of(g2), Chain.of(g3)
            lhs = model.concat(model.concat(c1, c2), c3)
            rhs = model.concat(c1, model.concat(c2, c3))
            if lhs != rhs:
                return failed(
                    name,
                    {"check": "associativity", "triple": (g1.gid, g2.gid, g3.gid)},
                )

    return passed(name, basis_size=len(basis), pairs=len(pairs))


# ---------------------------------------------------------------------------
# JSON ingestion / export of table-backed models.
# ---------------------------------------------------------------------------

def path_model_to_json(model: FinitePathModel) -> dict:
    gens = []
    for g in model.all_gens():
        src, tgt = model.gen_endpoints(g)
        gens.append({"id": str(g.gid), "source": src, "target": tgt, "degree": g.degree})
    comp = []
    for (gid1, gid2), chain in sorted(model._compose.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
        comp.append({
            "first": str(gid1),
            "second": str(gid2),
            "result": {str(g.gid): c for g, c in chain.sorted_items()},
        })
    diff = {
        str(gid): {str(g.gid): c for g, c in chain.sorted_items()}
        for gid, chain in sorted(model._diff.items(), key=lambda kv: str(kv[0]))
        if not chain.is_zero()
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "path_model",
        "points": [str(p) for p in model.points],
        "generators": gens,
        "units": {str(i): str(gid) for i, gid in sorted(model._units.items())},
        "differential": diff,
        "composition": comp,
    }


def path_model_from_json(data: dict) -> FinitePathModel:
    if data.get("kind") != "path_model":
        raise ValueError("not a path_model document")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {data.get('schema_version')}")
    points = tuple(data["points"])
    generators = {
        g["id"]: (g["source"], g["target"], g["degree"]) for g in data["generators"]
    }
    units = {int(i): gid for i, gid in data["units"].items()}
    composition = {
        (row["first"], row["second"]): {k: int(v) for k, v in row["result"].items()}
        for row in data["composition"]
    }
    differential = {
        gid: {k: int(v) for k, v in table.items()}
        for gid, table in data.get("differential", {}).items()
    }
    return FinitePathModel(points, generators, units, composition, differential)


def load_path_model(path: str) -> FinitePathModel:
    with open(path, "r", encoding="utf-8") as fh:
        return path_model_from_json(json.load(fh))


def path_model_category(model: PathModel, window: int = 2, name: str = "P"):
    """View a path model as a DG A-infinity category on its basepoints."""
    from .ainfty import AInftyCategory

    n = model.npoints()
    hom_basis_map = {
        (i, j): model.hom_basis(i, j, window) for i in range(n) for j in range(n)
    }

    def mu_fn(gens):
        if len(gens) == 1:
            return model.mu1(Chain.of(gens[0]))
        if len(gens) == 2:
            return model.mu2(Chain.of(gens[1]), Chain.of(gens[0]))
        return Chain.zero()

    def gen_hom_fn(gen):
        return model.gen_endpoints(gen)

    return AInftyCategory(
        name, tuple(range(n)), hom_basis_map, mu_fn,
        is_dg=True, max_arity=2, gen_hom_fn=gen_hom_fn,
    )


def leibniz_witness_model() -> FinitePathModel:
    """One basepoint, generators u (unit, degree 0), a, b, c (degree 1) and
    ab (degree 2), with differential c -> ab and the single product
    a.b = ab.  The smallest model with a non-trivially satisfied
    Maurer-Cartan equation, used to exercise differential-vs-product signs.
    """
    gens = {
        "u": (0, 0, 0),
        "a": (0, 0, 1),
        "b": (0, 0, 1),
        "c": (0, 0, 1),
        "ab": (0, 0, 2),
    }
    names = list(gens)
    composition: dict[tuple, dict] = {}
    for x in names:
        composition[("u", x)] = {x: 1}
        composition[(x, "u")] = {x: 1}
    composition[("a", "b")] = {"ab": 1}
    return FinitePathModel(
        points=("P",),
        generators=gens,
        units={0: "u"},
        composition=composition,
        differential={"c": {"ab": 1}},
    )
