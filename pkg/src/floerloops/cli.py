"""Batch CLI: build the cylinder model, run every checker, demo the circle
equivalence, and emit machine-readable reports.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage/config/IO error.
Reports are deterministic byte-for-byte for a fixed config; wall-clock
timings are shown on the console and only written to JSON with --timings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from .ainfty import category_from_json, category_to_json, check_ainfty, check_functor
from .cylinder import (
    CylinderConfigError,
    CylinderGeometry,
    cylinder_category,
    enumerate_chords,
    f1_sign_table,
    functor_F,
    half_disc_d2_family,
    chord,
    maslov_cross_check,
    mu_d,
    pontryagin_target,
    raster_cross_check,
    ring_isomorphism_report,
    TWISTS,
)
from .gradedalg import Chain
from .moduli import (
    ModuliConsistencyError,
    choose_fundamental_chains,
    moduli_to_json,
    synthetic_dataset_battery,
    verify_boundary_consistency,
)
from .pontryagin import (
    MutatedPathModel,
    leibniz_witness_model,
    load_path_model,
    validate_path_model,
)
from .report import CheckReport, failed, passed
from .twisted import (
    TwistedComplex,
    ShiftedObject,
    check_tw_dg,
    synthetic_twisted_complexes,
    twisted_to_json,
)

SCHEMA_VERSION = 1

MUTATIONS = ("mu2-sign", "f1-zero", "pontryagin-compose", "flat-sign", "twisted-mc")


@dataclass
class RunConfig:
    c: Fraction
    fibers: tuple[Fraction, ...]
    winding_bound: int
    max_d: int
    twist: str
    out: str | None
    mutate: str | None
    timings: bool

    def validate(self) -> None:
        if self.winding_bound < 1:
            raise CylinderConfigError("winding_bound must be >= 1")
        if not 2 <= self.max_d <= 4:
            raise CylinderConfigError("max_d must lie in 2..4")
        if self.twist not in TWISTS:
            raise CylinderConfigError(f"unknown twist {self.twist!r}")
        if self.mutate is not None and self.mutate not in MUTATIONS:
            raise CylinderConfigError(f"unknown mutation {self.mutate!r}")

    def geometry(self) -> CylinderGeometry:
        return CylinderGeometry(self.c, self.fibers)

    def as_json(self) -> dict:
        return {
            "kind": "geometry_config",
            "schema_version": SCHEMA_VERSION,
            "c": str(self.c),
            "fibers": [str(f) for f in self.fibers],
            "winding_bound": self.winding_bound,
            "max_d": self.max_d,
            "twist": self.twist,
        }


@dataclass
class Report:
    name: str
    status: str
    witness: dict | None
    seconds: float

    @classmethod
    def from_check(cls, check: CheckReport, seconds: float) -> "Report":
        return cls(check.name, "pass" if check.ok else "fail", check.witness, seconds)

    def as_json(self, timings: bool) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "witness": _jsonable(self.witness),
            "timing_ms": round(self.seconds * 1000.0, 3) if timings else None,
        }


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, float)):
        return obj
    if isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    return repr(obj)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CylinderConfigError(f"bad rational {text!r}: {exc}") from exc


def load_run_config(args: argparse.Namespace) -> RunConfig:
    c = Fraction(1)
    fibers: tuple[Fraction, ...] = (Fraction(0),)
    winding = 3
    max_d = 4
    twist = "none"
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("kind") == "export_bundle":
            doc = doc["config"]
        if doc.get("kind") != "geometry_config":
            raise CylinderConfigError("config file is not a geometry_config document")
        c = _parse_fraction(doc["c"])
        fibers = tuple(_parse_fraction(f) for f in doc["fibers"])
        winding = int(doc["winding_bound"])
        max_d = int(doc["max_d"])
        twist = doc.get("twist", "none")
    if args.winding is not None:
        winding = args.winding
    if args.max_d is not None:
        max_d = args.max_d
    if args.twist is not None:
        twist = args.twist
    cfg = RunConfig(
        c=c, fibers=fibers, winding_bound=winding, max_d=max_d, twist=twist,
        out=args.out, mutate=args.mutate, timings=args.timings,
    )
    cfg.validate()
    return cfg


def _timed(fn, *args, **kwargs) -> Report:
    t0 = time.perf_counter()
    check = fn(*args, **kwargs)
    return Report.from_check(check, time.perf_counter() - t0)


def _moduli_pipeline(cfg: RunConfig) -> CheckReport:
    """Choose and verify fundamental chains on the synthetic battery and on
    the cylinder's two-input half-disc families."""
    g = cfg.geometry()
    datasets = synthetic_dataset_battery()
    bound = min(cfg.winding_bound, 2)
    for a in range(g.nfibers()):
        for b in range(g.nfibers()):
            for c_idx in range(g.nfibers()):
                for w1 in range(-bound, bound + 1):
                    for w2 in range(-bound, bound + 1):
                        ds, _ev = half_disc_d2_family(
                            g, chord(g, a, b, w1), chord(g, b, c_idx, w2)
                        )
                        datasets.append(ds)
    if cfg.mutate == "flat-sign":
        datasets[0] = synthetic_dataset_battery()[0].mutated(0)
    for ds in datasets:
        try:
            chains = choose_fundamental_chains(ds)
        except ModuliConsistencyError as exc:
            return failed("fundamental-chains", {"dataset": ds.name, "error": str(exc)})
        rep = verify_boundary_consistency(ds, chains)
        if not rep.ok:
            return failed("fundamental-chains", {"dataset": ds.name, **rep.witness})
    return passed("fundamental-chains", datasets=len(datasets))


def _build_reports(cfg: RunConfig, imported_category=None) -> list[Report]:
    g = cfg.geometry()
    reports: list[Report] = []

    model = pontryagin_target(g)
    if cfg.mutate == "pontryagin-compose":
        model = MutatedPathModel(model, (("p", 0, 0, 1), ("p", 0, 0, 2)))
    reports.append(_timed(
        validate_path_model, model, min(cfg.winding_bound, 2), "path-model"
    ))

    if imported_category is not None:
        cat = imported_category
    else:
        cat = cylinder_category(
            g, cfg.winding_bound, cfg.max_d, twist=cfg.twist,
            mutate_mu2=cfg.mutate == "mu2-sign",
        )
    reports.append(_timed(check_ainfty, cat, cfg.max_d, "ainfty"))

    F, target_model, f_objs = functor_F(
        g, cfg.winding_bound, max_d=2, twist=cfg.twist,
        mutate_f1_zero=("x", 0, 0, 1) if cfg.mutate == "f1-zero" else None,
    )
    samples = list(f_objs) + synthetic_twisted_complexes(target_model, tag="syn")
    if cfg.mutate == "twisted-mc":
        witness = leibniz_witness_model()
        gens = {g.gid: g for g in witness.all_gens()}
        bad = TwistedComplex(
            witness,
            [ShiftedObject(0, 0), ShiftedObject(0, 0), ShiftedObject(0, 0)],
            {(0, 1): Chain.of(gens["a"]),
             (1, 2): Chain.of(gens["b"]),
             (0, 2): Chain.of(gens["c"], -1)},
            name="corrupt",
        )
        reports.append(_timed(check_tw_dg, witness, [bad], 0, "tw-dg"))
    else:
        reports.append(_timed(check_tw_dg, target_model, samples, 1, "tw-dg"))

    reports.append(_timed(_moduli_pipeline, cfg))
    reports.append(_timed(check_functor, F, 2, "functor"))
    return reports


def _emit(cfg: RunConfig, reports: list[Report], stream) -> int:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "check_report",
        "seed": os.environ.get("FLOERLOOPS_SEED"),
        "config": cfg.as_json(),
        "reports": [r.as_json(cfg.timings) for r in reports],
    }
    text = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stream.write(text)
    for r in reports:
        print(f"[{r.status:4s}] {r.name} ({r.seconds * 1000.0:.1f} ms)", file=sys.stderr)
    return 0 if all(r.status == "pass" for r in reports) else 1


def cmd_check_all(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    imported = None
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("kind") == "export_bundle":
            # the bundle's tables cover every lookup of the A-infinity check
            # at the recorded enumeration bound; re-check over that basis
            from .ainfty import AInftyCategory

            full_cat, _tables = category_from_json(doc["category"])
            g = cfg.geometry()
            n = g.nfibers()
            hom_basis_map = {
                (a, b): tuple(
                    x.generator() for x in enumerate_chords(g, a, b, cfg.winding_bound)
                )
                for a in range(n) for b in range(n)
            }
            imported = AInftyCategory(
                "imported", full_cat.objects, hom_basis_map, full_cat.mu_fn,
                is_dg=False, max_arity=cfg.max_d,
                gen_hom_fn=lambda gen: (gen.gid[1], gen.gid[2]),
            )
    reports = _build_reports(cfg, imported_category=imported)
    return _emit(cfg, reports, sys.stdout)


def cmd_demo_s1(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    g = cfg.geometry()
    bound = cfg.winding_bound
    fiber = 0
    chords = enumerate_chords(g, fiber, fiber, bound)
    print(f"# wrapped chords of the fibre at q={g.fibers[fiber]} (H = {g.c} p^2)")
    print(f"{'winding':>8} {'momentum':>10} {'action':>10} {'degree':>7}")
    for x in sorted(chords, key=lambda x: x.winding):
        print(f"{x.winding:>8} {str(x.momentum):>10} {str(x.action):>10} {x.degree:>7}")

    table = f1_sign_table(g, bound)
    print("\n# linear comparison map: chord -> loop class")
    for x in sorted(chords, key=lambda x: x.winding):
        path_gid, coeff = table[x.gid]
        sign = "+" if coeff > 0 else "-"
        print(f"  x_{x.winding} -> {sign}t^{path_gid[3]}")

    twist_fn = TWISTS[cfg.twist]
    print("\n# product table: mu_2(x_j, x_i) vs loop concatenation t^i.t^j")
    windings = [x.winding for x in sorted(chords, key=lambda x: x.winding)]
    agree = True
    for i in windings:
        floer_row = []
        loop_row = []
        for j in windings:
            prod = mu_d(g, (chord(g, fiber, fiber, i), chord(g, fiber, fiber, j)),
                        twist=twist_fn)
            ((gen, coeff),) = list(prod.items())
            floer_row.append(f"{'+' if coeff > 0 else '-'}x_{gen.gid[3]}")
            loop_row.append(f"t^{i + j}")
            if gen.gid[3] != i + j:
                agree = False
        print(f"  x_{i}: " + " ".join(floer_row) + "   |   " + " ".join(loop_row))
    rep = ring_isomorphism_report(g, bound, fiber, twist=cfg.twist)
    F, _m, _f = functor_F(g, bound, max_d=2, twist=cfg.twist)
    func = check_functor(F, 2, "functor")
    verdict = rep.ok and func.ok and agree
    print(f"\nring isomorphism: {'yes' if verdict else 'no'}")
    if not verdict:
        print(f"witness: {rep.witness or func.witness}")
        return 1
    return 0


def _export_tables(g: CylinderGeometry, winding_bound: int, max_d: int, twist: str):
    """mu_2 tables wide enough that the A-infinity check at the recorded
    enumeration bound is closed under every lookup it performs."""
    closure = (max_d - 1) * winding_bound
    pair_bound = 2 * winding_bound
    n = g.nfibers()
    hom_basis_map = {
        (a, b): tuple(x.generator() for x in enumerate_chords(g, a, b, closure))
        for a in range(n) for b in range(n)
    }
    twist_fn = TWISTS[twist]
    table: dict[tuple, Chain] = {}
    for a in range(n):
        for b in range(n):
            for c_idx in range(n):
                for w1 in range(-pair_bound, pair_bound + 1):
                    for w2 in range(-pair_bound, pair_bound + 1):
                        if abs(w1 + w2) > closure:
                            continue
                        if min(abs(w1), abs(w2)) > winding_bound:
                            continue
                        x1, x2 = chord(g, a, b, w1), chord(g, b, c_idx, w2)
                        val = mu_d(g, (x1, x2), twist=twist_fn)
                        if not val.is_zero():
                            table[(x1.gid, x2.gid)] = val
    return hom_basis_map, {2: table}


def cmd_export(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    g = cfg.geometry()
    from .ainfty import category_from_tables

    hom_basis_map, mu_tables = _export_tables(
        g, cfg.winding_bound, cfg.max_d, cfg.twist
    )
    cat = category_from_tables(
        "cylinder-export", tuple(range(g.nfibers())), hom_basis_map, mu_tables
    )
    F, model, f_objs = functor_F(g, cfg.winding_bound, max_d=2, twist=cfg.twist)
    bundle = {
        "schema_version": SCHEMA_VERSION,
        "kind": "export_bundle",
        "config": cfg.as_json(),
        "category": category_to_json(
            cat, mu_tables,
            extra={"enumeration_bound": cfg.winding_bound, "max_d": cfg.max_d},
        ),
        "twisted_complexes": [twisted_to_json(T) for T in f_objs],
        "functor_f1": [
            {
                "chord": list(gid),
                "path_winding": table_entry[0][3],
                "sign": table_entry[1],
            }
            for gid, table_entry in sorted(
                f1_sign_table(g, cfg.winding_bound).items(), key=lambda kv: repr(kv[0])
            )
        ],
        "moduli": [moduli_to_json(ds) for ds in synthetic_dataset_battery()],
    }
    text = json.dumps(bundle, sort_keys=True, separators=(",", ":")) + "\n"
    if not cfg.out:
        sys.stdout.write(text)
        return 0
    try:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {cfg.out}: {exc}", file=sys.stderr)
        return 2
    return 0


def cmd_import_model(args: argparse.Namespace) -> int:
    if not args.model:
        print("error: import-model requires --model PATH", file=sys.stderr)
        return 2
    try:
        model = load_path_model(args.model)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load model: {exc}", file=sys.stderr)
        return 2
    rep = validate_path_model(model, window=0, name="imported-path-model")
    status = "pass" if rep.ok else "fail"
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "check_report",
        "seed": os.environ.get("FLOERLOOPS_SEED"),
        "reports": [{
            "name": rep.name,
            "status": status,
            "witness": _jsonable(rep.witness),
            "timing_ms": None,
        }],
    }
    print(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    return 0 if rep.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floerloops",
        description="exact-arithmetic checks for the cylinder's wrapped "
                    "category and its loop-space comparison",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("check-all", cmd_check_all),
        ("demo-s1", cmd_demo_s1),
        ("export", cmd_export),
        ("import-model", cmd_import_model),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", help="geometry config or export bundle (JSON)")
        p.add_argument("--winding", type=int, default=None, help="winding bound")
        p.add_argument("--max-d", type=int, default=None, dest="max_d")
        p.add_argument("--twist", choices=sorted(TWISTS), default=None)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--mutate", default=None, help="test-only sign corruption")
        p.add_argument("--timings", action="store_true", help="include wall-clock in JSON")
        p.add_argument("--model", default=None, help="path model JSON (import-model)")
        p.set_defaults(fn=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    seed = os.environ.get("FLOERLOOPS_SEED")
    if seed is not None:
        print(f"FLOERLOOPS_SEED={seed} (reserved; core is deterministic)", file=sys.stderr)
    try:
        return args.fn(args)
    except CylinderConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
