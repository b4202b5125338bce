"""Generic A-infinity categories over Z and executable checkers for their
defining relations.

Conventions.  An operation mu_d has degree 2-d.  Input tuples are stored in
composition order (x_1, ..., x_d) with x_1 in hom(L_0, L_1); the displayed
operation mu_d(x_d, ..., x_1) acts on the reversed tuple.  The quadratic
relation checked by `check_ainfty` is

    sum (-1)**(k + |x_1| + ... + |x_k|)
        mu_{d_1}(x_d, ..., mu_{d_2}(x_{k+d_2}, ..., x_{k+1}), ..., x_1) = 0,

and `check_functor` evaluates the functor equation into a DG target, where
the right-hand side is mu_1(F_d) plus the sum of mu_2(F_{d_2}, F_{d_1}) over
splittings.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Mapping

from .gradedalg import Chain, Generator, sign_pow
from .report import CheckReport, failed, passed

SCHEMA_VERSION = 1


class CompositionError(ValueError):
    """Raised when an operation is evaluated on a non-composable tuple."""


@dataclass
class AInftyCategory:
    """Objects, based hom complexes and structure maps given on basis tuples.

    `mu_fn` receives tuples of token-(+1) basis generators in composition
    order and returns a Chain; absent structure (beyond `max_arity`) is zero.
    `gen_hom_fn` resolves the hom-pair of generators not listed in the
    enumeration basis (operations may leave a finite enumeration window).
    """

    name: str
    objects: tuple
    hom_basis_map: Mapping[tuple, tuple[Generator, ...]]
    mu_fn: Callable[[tuple[Generator, ...]], Chain]
    is_dg: bool = False
    max_arity: int | None = None
    gen_hom_fn: Callable[[Generator], tuple] | None = None
    _gen_hom: dict = field(init=False, default_factory=dict)

    def __post_init__(self):
        for pair, basis in self.hom_basis_map.items():
            for gen in basis:
                if gen.orientation != 1:
                    raise ValueError("basis generators must carry token +1")
                if gen in self._gen_hom and self._gen_hom[gen] != pair:
                    raise ValueError(f"generator {gen.gid} listed in two hom spaces")
                self._gen_hom[gen] = pair

    def hom_basis(self, a, b) -> tuple[Generator, ...]:
        return self.hom_basis_map.get((a, b), ())

    def gen_hom(self, gen: Generator) -> tuple:
        pair = self._gen_hom.get(gen.key)
        if pair is None and self.gen_hom_fn is not None:
            pair = self.gen_hom_fn(gen)
        if pair is None:
            raise CompositionError(f"unknown generator {gen.gid}")
        return pair

    def tuple_path(self, gens: tuple[Generator, ...]) -> tuple:
        """Object path (L_0, ..., L_d); raises if consecutive homs mismatch."""
        if not gens:
            raise CompositionError("empty tuple")
        pairs = [self.gen_hom(g) for g in gens]
        for (_, tgt), (src, _) in zip(pairs, pairs[1:]):
            if tgt != src:
                raise CompositionError(
                    f"non-composable tuple {[g.gid for g in gens]}"
                )
        return tuple(p[0] for p in pairs) + (pairs[-1][1],)

    def mu(self, gens: tuple[Generator, ...]) -> Chain:
        """Evaluate mu on a basis tuple, normalising orientation tokens and
        asserting degree 2 - d + sum of input degrees on the output."""
        self.tuple_path(gens)
        token = 1
        keys = []
        for g in gens:
            token *= g.orientation
            keys.append(g.key)
        if self.max_arity is not None and len(keys) > self.max_arity:
            return Chain.zero()
        out = self.mu_fn(tuple(keys))
        if not out.is_zero():
            expected = 2 - len(keys) + sum(g.degree for g in keys)
            got = out.degree()
            if got != expected:
                raise ValueError(
                    f"{self.name}: mu_{len(keys)} output degree {got}, expected {expected}"
                )
        return out if token == 1 else out.scale(token)

    def mu_raw(self, gens: tuple[Generator, ...]) -> Chain:
        """mu without composability/degree validation; callers must pass
        token-(+1) generators forming a composable tuple (the checkers
        validate the enclosing tuple once and work on its slices)."""
        if self.max_arity is not None and len(gens) > self.max_arity:
            return Chain.zero()
        return self.mu_fn(gens)

    def mu1_chain(self, chain: Chain) -> Chain:
        out = Chain.zero()
        for gen, coeff in chain.items():
            out = out + self.mu((gen,)).scale(coeff)
        return out

    def mu2_chain(self, chain2: Chain, chain1: Chain) -> Chain:
        out = Chain.zero()
        for g1, c1 in chain1.items():
            for g2, c2 in chain2.items():
                out = out + self.mu((g1, g2)).scale(c1 * c2)
        return out

    def composable_tuples(self, d: int):
        """All length-d composable basis tuples, lexicographic in the object
        path then in the per-slot basis order."""
        for path in itertools.product(self.objects, repeat=d + 1):
            slots = [self.hom_basis(path[i], path[i + 1]) for i in range(d)]
            if any(not s for s in slots):
                continue
            yield from itertools.product(*slots)


def category_from_tables(
    name: str,
    objects: tuple,
    hom_basis_map: Mapping[tuple, tuple[Generator, ...]],
    mu_tables: Mapping[int, Mapping[tuple, Chain]],
    is_dg: bool = False,
) -> AInftyCategory:
    """Build a category whose mu is a sparse lookup table.

    Table keys are tuples of generator gids in composition order; absent
    tuples are zero.  Non-composable table entries are rejected here.
    """
    lookup: dict[tuple, Chain] = {}
    for d, table in mu_tables.items():
        for gids, chain in table.items():
            if len(gids) != d:
                raise ValueError(f"arity-{d} table entry with {len(gids)} inputs")
            lookup[gids] = chain
    max_arity = max(mu_tables.keys(), default=1)

    def mu_fn(gens: tuple[Generator, ...]) -> Chain:
        return lookup.get(tuple(g.gid for g in gens), Chain.zero())

    cat = AInftyCategory(name, objects, hom_basis_map, mu_fn, is_dg, max_arity)
    for gids in lookup:
        gens = tuple(_find_gen(cat, gid) for gid in gids)
        cat.tuple_path(gens)
    return cat


def _find_gen(cat: AInftyCategory, gid: Hashable) -> Generator:
    for gen in cat._gen_hom:
        if gen.gid == gid:
            return gen
    raise CompositionError(f"gid {gid} not in any hom basis")


def mu2_shifted(
    mu2: Callable[[Chain, Chain], Chain],
    s2: Chain,
    s1: Chain,
    shifts: tuple[int, int, int],
) -> Chain:
    """Composition of morphisms between shifted objects.

    For s1 in Hom(q0[m0], q1[m1]) and s2 in Hom(q1[m1], q2[m2]), given by
    underlying (unshifted) chains, returns

        (-1)**((deg s2 + 1) * (m1 - m0)) mu2(s2, s1)

    as an underlying chain of Hom(q0[m0], q2[m2]); degrees in the sign are
    the unshifted ones.
    """
    m0, m1, m2 = shifts
    out = Chain.zero()
    for g2, c2 in s2.items():
        sgn = sign_pow((g2.degree + 1) * (m1 - m0))
        out = out + mu2(Chain.of(g2), s1).scale(sgn * c2)
    return out


# ---------------------------------------------------------------------------
# Relation checkers.
# ---------------------------------------------------------------------------

def ainfty_residual(cat: AInftyCategory, gens: tuple[Generator, ...]) -> Chain:
    """The quadratic A-infinity residual on one composable tuple."""
    d = len(gens)
    cat.tuple_path(gens)
    acc: dict[Generator, int] = {}
    deg_prefix = [0]
    for g in gens:
        deg_prefix.append(deg_prefix[-1] + g.degree)
    for d2 in range(1, d + 1):
        for k in range(0, d - d2 + 1):
            inner = cat.mu_raw(gens[k:k + d2])
            if inner.is_zero():
                continue
            sgn = sign_pow(k + deg_prefix[k])
            head, tail = gens[:k], gens[k + d2:]
            for gen, coeff in inner.items():
                outer = cat.mu_raw(head + (gen,) + tail)
                if outer.is_zero():
                    continue
                c = sgn * coeff
                for og, oc in outer.items():
                    new = acc.get(og, 0) + c * oc
                    if new:
                        acc[og] = new
                    else:
                        acc.pop(og, None)
    return Chain(acc)


def check_ainfty(
    cat: AInftyCategory, max_d: int, name: str | None = None
) -> CheckReport:
    """Verify the A-infinity relations on every composable tuple of length
    <= max_d; the witness is the first failing tuple in lexicographic order.

    The loop body is an inlined version of `ainfty_residual`: enumeration
    only yields composable tuples, so per-slice validation is skipped.
    """
    name = name or f"ainfty({cat.name})"
    mu_fn = cat.mu_fn
    cap = cat.max_arity
    checked = 0
    for d in range(1, max_d + 1):
        for gens in cat.composable_tuples(d):
            checked += 1
            acc = None
            prefix = [0] * (d + 1)
            running = 0
            for i, gg in enumerate(gens):
                running += gg.degree
                prefix[i + 1] = running
            for d2 in range(1, d + 1):
                if cap is not None and (d2 > cap or d - d2 + 1 > cap):
                    continue
                for k in range(0, d - d2 + 1):
                    inner = mu_fn(gens[k:k + d2])
                    if inner.is_zero():
                        continue
                    sgn = -1 if (k + prefix[k]) & 1 else 1
                    head, tail = gens[:k], gens[k + d2:]
                    for gen, coeff in inner.items():
                        outer = mu_fn(head + (gen,) + tail)
                        if outer.is_zero():
                            continue
                        c = sgn * coeff
                        if acc is None:
                            acc = {}
                        for og, oc in outer.items():
                            new = acc.get(og, 0) + c * oc
                            if new:
                                acc[og] = new
                            else:
                                acc.pop(og, None)
            if acc:
                residual = ainfty_residual(cat, gens)
                if not residual.is_zero():
                    return failed(
                        name,
                        {
                            "tuple": [g.gid for g in gens],
                            "d": d,
                            "residual": repr(residual),
                        },
                    )
    return passed(name, tuples_checked=checked, max_d=max_d)


@dataclass
class AInftyFunctor:
    """Multilinear components F_d from a source category into a DG target.

    `components(d, gens)` receives composable source basis tuples in
    composition order and returns a Chain in
    hom(object_map[L_0], object_map[L_d]) of the target.
    """

    source: AInftyCategory
    target: AInftyCategory
    object_map: Mapping
    components: Callable[[int, tuple[Generator, ...]], Chain]
    name: str = "F"

    def apply(self, gens: tuple[Generator, ...]) -> Chain:
        return self.components(len(gens), gens)

    def apply_multilinear(
        self, head: tuple[Generator, ...], inner: Chain, tail: tuple[Generator, ...]
    ) -> Chain:
        out = Chain.zero()
        for gen, coeff in inner.items():
            out = out + self.apply(head + (gen,) + tail).scale(coeff)
        return out


def functor_residual(F: AInftyFunctor, gens: tuple[Generator, ...]) -> Chain:
    """LHS minus RHS of the functor equation on one source tuple."""
    d = len(gens)
    src, tgt = F.source, F.target
    deg_prefix = [0]
    for g in gens:
        deg_prefix.append(deg_prefix[-1] + g.degree)

    lhs = Chain.zero()
    for d2 in range(1, d + 1):
        for k in range(0, d - d2 + 1):
            inner = src.mu(gens[k:k + d2])
            if inner.is_zero():
                continue
            sgn = sign_pow(k + deg_prefix[k])
            lhs = lhs + F.apply_multilinear(gens[:k], inner, gens[k + d2:]).scale(sgn)

    rhs = tgt.mu1_chain(F.apply(gens))
    for r in range(1, d):
        rhs = rhs + tgt.mu2_chain(F.apply(gens[r:]), F.apply(gens[:r]))
    return lhs - rhs


def check_functor(
    F: AInftyFunctor, max_d: int, name: str | None = None
) -> CheckReport:
    """Verify the A-infinity functor equation on every composable source
    tuple of length <= max_d."""
    name = name or f"functor({F.name})"
    if not F.target.is_dg:
        raise ValueError("functor target must be a DG category (mu_{>=3} = 0)")
    checked = 0
    for d in range(1, max_d + 1):
        for gens in F.source.composable_tuples(d):
            residual = functor_residual(F, gens)
            checked += 1
            if not residual.is_zero():
                return failed(
                    name,
                    {
                        "tuple": [g.gid for g in gens],
                        "d": d,
                        "residual": repr(residual),
                    },
                )
    return passed(name, tuples_checked=checked, max_d=max_d)


# ---------------------------------------------------------------------------
# JSON round-trip for table-backed categories.
# ---------------------------------------------------------------------------

def gid_to_json(gid: Any) -> Any:
    if isinstance(gid, tuple):
        return [gid_to_json(x) for x in gid]
    return gid


def gid_from_json(obj: Any) -> Any:
    if isinstance(obj, list):
        return tuple(gid_from_json(x) for x in obj)
    return obj


def _gid_sort_key(gid: Any) -> str:
    return json.dumps(gid_to_json(gid))


def chain_to_json(chain: Chain) -> list[dict]:
    rows = [
        {"gen": gid_to_json(g.gid), "degree": g.degree, "coeff": c}
        for g, c in chain.items()
    ]
    rows.sort(key=lambda r: json.dumps(r["gen"]))
    return rows


def chain_from_json(rows: list[dict]) -> Chain:
    terms = {
        Generator(gid_from_json(r["gen"]), r["degree"]): int(r["coeff"]) for r in rows
    }
    return Chain(terms)


def category_to_json(
    cat: AInftyCategory, mu_tables: Mapping[int, Mapping[tuple, Chain]],
    extra: dict | None = None,
) -> dict:
    objects = list(cat.objects)
    basis = []
    for (a, b), gens in sorted(
        cat.hom_basis_map.items(),
        key=lambda kv: (objects.index(kv[0][0]), objects.index(kv[0][1])),
    ):
        basis.append({
            "source": objects.index(a),
            "target": objects.index(b),
            "generators": [
                {"id": gid_to_json(g.gid), "degree": g.degree} for g in gens
            ],
        })
    mu_rows = []
    for d in sorted(mu_tables):
        for gids, chain in sorted(mu_tables[d].items(), key=lambda kv: _gid_sort_key(kv[0])):
            if chain.is_zero():
                continue
            mu_rows.append({
                "d": d,
                "inputs": [gid_to_json(g) for g in gids],
                "output": chain_to_json(chain),
            })
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "ainfty_category",
        "name": cat.name,
        "is_dg": cat.is_dg,
        "objects": [gid_to_json(o) for o in objects],
        "basis": basis,
        "mu": mu_rows,
    }
    if extra:
        doc.update(extra)
    return doc


def category_from_json(data: dict) -> tuple[AInftyCategory, dict[int, dict[tuple, Chain]]]:
    if data.get("kind") != "ainfty_category":
        raise ValueError("not an ainfty_category document")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {data.get('schema_version')}")
    objects = tuple(gid_from_json(o) for o in data["objects"])
    hom_basis_map: dict[tuple, tuple[Generator, ...]] = {}
    for row in data["basis"]:
        pair = (objects[row["source"]], objects[row["target"]])
        hom_basis_map[pair] = tuple(
            Generator(gid_from_json(g["id"]), g["degree"]) for g in row["generators"]
        )
    mu_tables: dict[int, dict[tuple, Chain]] = {}
    for row in data["mu"]:
        d = row["d"]
        key = tuple(gid_from_json(g) for g in row["inputs"])
        mu_tables.setdefault(d, {})[key] = chain_from_json(row["output"])
    cat = category_from_tables(
        data["name"], objects, hom_basis_map, mu_tables, is_dg=data.get("is_dg", False)
    )
    return cat, mu_tables
