"""Command-line front end.

Loads user-defined categories, bundles and morphism pairs from TOML
manifests (or uses the builtins), runs the verification suites and emits
human-readable tables plus a machine-readable JSON report.  Exit code 0
means every selected check passed, 1 means check failures, 2 means the
manifest or builtin selection was invalid.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import bundles as bundles_mod
from . import equivalence, nbullet, polycat, selftest, verify, weil
from .categories import (
    NBulletCategory,
    PolyCategory,
    TrivialTangentCategory,
    WeilSelfCategory,
)
from .errors import ManifestParse, TangentCatError, UnknownBuiltin

REPORT_VERSION = 1

DEFAULTS = {
    "seed": 0,
    "sample_size": 50,
    "max_rank": 3,
    "provider_bound": 4,
    "tangent_power": 2,
}


def category_from_descriptor(desc):
    """Rebuild a category from a serialized descriptor (used by replay)."""
    name = desc["name"]
    if name == "nbullet":
        return NBulletCategory()
    if name == "weil":
        return WeilSelfCategory()
    if name == "trivial":
        return TrivialTangentCategory()
    if name.startswith("poly"):
        return PolyCategory(polycat.Domain.parse(desc["domain"]))
    raise UnknownBuiltin(f"unknown category descriptor {desc!r}")


def builtin_category(name):
    if name == "nbullet":
        return NBulletCategory()
    if name == "weil":
        return WeilSelfCategory()
    if name == "trivial":
        return TrivialTangentCategory()
    if name in ("poly-q", "poly-rational"):
        return PolyCategory(polycat.Domain.rational())
    if name == "poly-nat":
        return PolyCategory(polycat.Domain.nat())
    if name.startswith("poly-zp:"):
        try:
            return PolyCategory(polycat.Domain.zp(int(name.split(":", 1)[1])))
        except ValueError as exc:
            raise UnknownBuiltin(str(exc)) from exc
    raise UnknownBuiltin(f"no builtin category named {name!r}")


def default_objects(cat, max_rank):
    if isinstance(cat, WeilSelfCategory):
        return weil.enumerate_algebras(max_rank)
    return list(range(max_rank + 1))


def builtin_bundles(cat, bound):
    """Standard round-trip fixtures for a builtin category."""
    if isinstance(cat, WeilSelfCategory):
        raise UnknownBuiltin("bundle fixtures are defined for the matrix and polynomial categories")
    if isinstance(cat, NBulletCategory) and not isinstance(cat, TrivialTangentCategory):
        return [bundles_mod.diff_object_bundle(cat, k, bound=bound) for k in range(5)]
    return [
        bundles_mod.trivial_bundle(cat, m, v, bound=bound)
        for m in range(3)
        for v in range(3)
    ]


# -- manifest loading ------------------------------------------------------------


class Manifest:
    """Parsed manifest: category, named morphisms, bundles, pairs, config."""

    def __init__(self, cat, config, morphisms, bundle_map, pairs):
        self.cat = cat
        self.config = config
        self.morphisms = morphisms
        self.bundles = bundle_map
        self.pairs = pairs


def load_manifest(path) -> Manifest:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ManifestParse(f"cannot open manifest: {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise ManifestParse(f"{path}: {exc}")
    if "category" not in data:
        raise ManifestParse(f"{path}: missing `category` key")
    kind = data["category"]
    domain_tag = data.get("domain", "nat")
    try:
        domain = polycat.Domain.parse(domain_tag)
    except ValueError as exc:
        raise ManifestParse(f"{path}: {exc}")
    if kind == "nbullet":
        if domain.tag != "nat":
            raise ManifestParse(f"{path}: the matrix category uses the `nat` domain")
        cat = NBulletCategory()
    elif kind == "poly":
        cat = PolyCategory(domain)
    else:
        raise ManifestParse(f"{path}: unknown category {kind!r}")

    config = dict(DEFAULTS)
    for key, value in data.get("config", {}).items():
        config[key.replace("-", "_")] = value

    morphisms = {}
    for name, entry in data.get("morphisms", {}).items():
        morphisms[name] = _parse_morphism(cat, name, entry, path)

    bundle_map = {}
    for name, entry in data.get("bundles", {}).items():
        bundle_map[name] = _parse_bundle(cat, name, entry, morphisms, config, path)

    pairs = {}
    for name, entry in data.get("pairs", {}).items():
        for key in ("f", "g", "source", "target"):
            if key not in entry:
                raise ManifestParse(f"{path}: pair {name!r} is missing {key!r}")
        if entry["f"] not in morphisms or entry["g"] not in morphisms:
            raise ManifestParse(f"{path}: pair {name!r} references unknown morphisms")
        if entry["source"] not in bundle_map or entry["target"] not in bundle_map:
            raise ManifestParse(f"{path}: pair {name!r} references unknown bundles")
        src = bundle_map[entry["source"]]
        dst = bundle_map[entry["target"]]
        f = morphisms[entry["f"]]
        g = morphisms[entry["g"]]
        if (
            cat.rank(cat.source(f)) != cat.rank(src.total)
            or cat.rank(cat.target(f)) != cat.rank(dst.total)
            or cat.rank(cat.source(g)) != cat.rank(src.base)
            or cat.rank(cat.target(g)) != cat.rank(dst.base)
        ):
            raise ManifestParse(f"{path}: pair {name!r}: arities do not match the bundles")
        pairs[name] = (src, dst, f, g)
    return Manifest(cat, config, morphisms, bundle_map, pairs)


def _parse_morphism(cat, name, entry, path):
    if isinstance(cat, NBulletCategory):
        if "matrix" not in entry:
            raise ManifestParse(f"{path}: morphism {name!r} needs a `matrix` entry")
        rows = entry["matrix"]
        cols = entry.get("cols", len(rows[0]) if rows else 0)
        try:
            return nbullet.NMatrix(rows, len(rows), cols)
        except (ValueError, TypeError) as exc:
            raise ManifestParse(f"{path}: morphism {name!r}: {exc}")
    if "components" not in entry or "source" not in entry:
        raise ManifestParse(f"{path}: morphism {name!r} needs `source` and `components`")
    return polycat.parse_morphism(
        entry["components"], entry["source"], cat.domain, where=f"{path}:{name}"
    )


def _parse_bundle(cat, name, entry, morphisms, config, path):
    bound = entry.get("bound", config["provider_bound"])
    if "trivial" in entry:
        shorthand = entry["trivial"]
        try:
            return bundles_mod.trivial_bundle(
                cat, shorthand["base"], shorthand["fiber"], bound=bound, label=name
            )
        except (KeyError, TypeError) as exc:
            raise ManifestParse(f"{path}: bundle {name!r}: bad trivial shorthand ({exc})")
    needed = ("E", "M", "q", "zeta", "sigma", "lambda")
    if any(key not in entry for key in needed):
        raise ManifestParse(
            f"{path}: bundle {name!r} needs either `trivial` or all of {needed}"
        )
    refs = {}
    for key in ("q", "zeta", "sigma", "lambda"):
        if entry[key] not in morphisms:
            raise ManifestParse(f"{path}: bundle {name!r}: unknown morphism {entry[key]!r}")
        refs[key] = morphisms[entry[key]]
    base = entry["M"]
    total = entry["E"]
    if cat.rank(cat.source(refs["q"])) != total or cat.rank(cat.target(refs["q"])) != base:
        raise ManifestParse(f"{path}: bundle {name!r}: projection arity mismatch")
    fiber = total - base
    if fiber < 0:
        raise ManifestParse(f"{path}: bundle {name!r}: total rank below base rank")
    provider = bundles_mod.ProductProvider(cat, base, fiber, bound)
    return bundles_mod.DifferentialBundle(
        cat=cat,
        total=total,
        base=base,
        projection=refs["q"],
        zero=refs["zeta"],
        add=refs["sigma"],
        lift=refs["lambda"],
        provider=provider,
        label=name,
    )


# -- report output ----------------------------------------------------------------


def emit(report: verify.CheckReport, args) -> int:
    rows = sorted(report.results, key=lambda r: r.name)
    width = max((len(r.name) for r in rows), default=4)
    for r in rows:
        print(f"{r.status.upper():4}  {r.name:<{width}}  {r.anchor}")
    print(f"-- {report.passed}/{report.total} checks passed, {report.failed} failed")
    if getattr(args, "json", None):
        payload = report.to_json()
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if report.failed == 0 else 1


def _resolve_seed(args):
    env = os.environ.get("TANGENTCAT_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _context(args):
    """Category + config from --builtin or --manifest."""
    if args.manifest:
        manifest = load_manifest(args.manifest)
        config = manifest.config
    elif args.builtin:
        manifest = None
        config = dict(DEFAULTS)
    else:
        raise ManifestParse("either --manifest or --builtin is required")
    if args.seed is not None:
        config["seed"] = args.seed
    env = os.environ.get("TANGENTCAT_SEED")
    if env is not None:
        config["seed"] = int(env)
    for key in ("sample_size", "max_rank", "provider_bound", "tangent_power"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    cat = manifest.cat if manifest else builtin_category(args.builtin)
    return cat, manifest, config


# -- subcommands -------------------------------------------------------------------


def cmd_verify_category(args) -> int:
    cat, _, config = _context(args)
    report = verify.check_tangent_category(
        cat,
        objects=default_objects(cat, config["max_rank"]),
        morphism_sample_size=config["sample_size"],
        seed=config["seed"],
        tangent_depth=config["tangent_power"],
    )
    w = weil.dual_numbers()
    report.extend(
        verify.check_foundational_pullbacks(
            cat, w, w, w,
            objects=default_objects(cat, min(config["max_rank"], 2)),
            seed=config["seed"],
        )
    )
    return emit(report, args)


def _manifest_bundles(cat, manifest, config):
    if manifest:
        if not manifest.bundles:
            raise ManifestParse("manifest declares no bundles")
        return list(manifest.bundles.values())
    return builtin_bundles(cat, config["provider_bound"])


def cmd_verify_bundle(args) -> int:
    cat, manifest, config = _context(args)
    report = verify.CheckReport(seed=config["seed"])
    for bundle in _manifest_bundles(cat, manifest, config):
        bundles_mod.check_differential_bundle(
            bundle, tangent_power=config["tangent_power"], report=report
        )
    return emit(report, args)


def cmd_classify(args) -> int:
    report = verify.CheckReport()
    if args.builtin == "frobenius":
        p = args.p or 2
        cat = PolyCategory(polycat.Domain.zp(p))
        bundle = bundles_mod.diff_object_bundle(cat, 1)
        frob = polycat.PolyMorphism(
            cat.domain, 1, [polycat.Polynomial(cat.domain, 1, {(p,): 1})]
        )
        klass = bundles_mod.classify_morphism(bundle, bundle, frob, cat.identity(0))
        additive = klass in ("additive", "linear")
        linear = klass == "linear"
        print(f"additive: {'yes' if additive else 'no'}, linear: {'yes' if linear else 'no'}")
        report.add("classify:frobenius", "classification of the p-power map",
                   klass == "additive", None if klass == "additive" else
                   {"kind": "comparison-unavailable", "reason": f"classified {klass}"})
        if getattr(args, "json", None):
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(report.to_json(), fh, indent=2, sort_keys=True)
                fh.write("\n")
        return 0 if report.failed == 0 else 1
    cat, manifest, config = _context(args)
    if not manifest or not manifest.pairs:
        raise ManifestParse("classify needs a manifest with morphism pairs")
    for name, (src, dst, f, g) in manifest.pairs.items():
        klass = bundles_mod.classify_morphism(src, dst, f, g)
        print(f"{name}: {klass}")
        report.add(f"classify:{name}", "bundle morphism classification", True)
    return emit(report, args)


def cmd_roundtrip(args) -> int:
    cat, manifest, config = _context(args)
    report = verify.CheckReport(seed=config["seed"])
    for bundle in _manifest_bundles(cat, manifest, config):
        equivalence.roundtrip_report(bundle, report=report)
    return emit(report, args)


def cmd_appendix(args) -> int:
    cat, manifest, config = _context(args)
    report = verify.CheckReport(seed=config["seed"])
    for bundle in _manifest_bundles(cat, manifest, config):
        if bundle.provider.bound < 8:
            bundle = _rebound(bundle, 8)
        equivalence.appendix_suite(
            ind_functor(bundle), seed=config["seed"], sample=10, report=report
        )
    return emit(report, args)


def ind_functor(bundle):
    return equivalence.ind(bundle)


def _rebound(bundle, bound):
    provider = bundle.provider
    if isinstance(provider, bundles_mod.ProductProvider):
        provider = bundles_mod.ProductProvider(
            provider.cat, provider.base_rank, provider.fiber_rank, bound
        )
    return bundles_mod.DifferentialBundle(
        cat=bundle.cat, total=bundle.total, base=bundle.base,
        projection=bundle.projection, zero=bundle.zero, add=bundle.add,
        lift=bundle.lift, provider=provider, label=bundle.label,
    )


def cmd_suite(args) -> int:
    if args.builtin == "mutations":
        seed = _resolve_seed(args) if args.seed is not None else 0
        env = os.environ.get("TANGENTCAT_SEED")
        if env is not None:
            seed = int(env)
        return emit(selftest.mutation_report(seed=seed), args)
    cat, manifest, config = _context(args)
    suites = config.get("suites") or ["category", "bundles", "roundtrip", "appendix"]
    report = verify.CheckReport(seed=config["seed"])
    if "category" in suites:
        report.extend(
            verify.check_tangent_category(
                cat,
                objects=default_objects(cat, config["max_rank"]),
                morphism_sample_size=config["sample_size"],
                seed=config["seed"],
                tangent_depth=config["tangent_power"],
            )
        )
        w = weil.dual_numbers()
        report.extend(
            verify.check_foundational_pullbacks(
                cat, w, w, w,
                objects=default_objects(cat, min(config["max_rank"], 2)),
                seed=config["seed"],
            )
        )
    wants_bundles = {"bundles", "roundtrip", "appendix", "tensor-law", "uniqueness"} & set(suites)
    if wants_bundles and not isinstance(cat, WeilSelfCategory):
        fixtures = _manifest_bundles(cat, manifest, config)
        for bundle in fixtures:
            if "bundles" in suites:
                bundles_mod.check_differential_bundle(
                    bundle, tangent_power=config["tangent_power"], report=report
                )
            if "roundtrip" in suites:
                equivalence.roundtrip_report(bundle, report=report)
            if "appendix" in suites:
                equivalence.appendix_suite(
                    equivalence.ind(_rebound(bundle, max(bundle.provider.bound, 8))),
                    seed=config["seed"], sample=5, report=report,
                )
            if "tensor-law" in suites:
                equivalence.tensor_law_report(
                    equivalence.ind(_rebound(bundle, max(bundle.provider.bound, 8))),
                    report=report,
                )
            if "uniqueness" in suites:
                equivalence.lineator_uniqueness_report(
                    _rebound(bundle, max(bundle.provider.bound, 8)), report=report
                )
    return emit(report, args)


def cmd_replay(args) -> int:
    with open(args.report, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    ok = True
    replayed = 0
    for check in payload.get("checks", []):
        counterexample = check.get("counterexample")
        if counterexample is None:
            continue
        replayed += 1
        good = verify.replay_counterexample(counterexample)
        print(f"{'REPLAYED' if good else 'DID-NOT-REPLAY'}  {check['name']}")
        ok = ok and good
    print(f"-- {replayed} counterexamples processed")
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tangentcat",
        description="Verify tangent-category axioms, differential bundles and the "
        "induce/evaluate round trip over exact arithmetic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, bundles=False):
        p.add_argument("--manifest", help="TOML manifest path")
        p.add_argument("--builtin", help="builtin category or fixture name")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--sample", dest="sample_size", type=int, default=None)
        p.add_argument("--max-rank", dest="max_rank", type=int, default=None)
        p.add_argument("--provider-bound", dest="provider_bound", type=int, default=None)
        p.add_argument("--tangent-power", dest="tangent_power", type=int, default=None)
        p.add_argument("--json", help="write the JSON report here")

    p = sub.add_parser("verify-category", help="tangent-category axiom suite")
    common(p)
    p.set_defaults(func=cmd_verify_category)

    p = sub.add_parser("verify-bundle", help="differential bundle laws")
    common(p)
    p.set_defaults(func=cmd_verify_bundle)

    p = sub.add_parser("classify", help="classify bundle morphisms")
    common(p)
    p.add_argument("--p", type=int, default=None, help="prime for the frobenius builtin")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("roundtrip", help="evaluate-after-induce identity")
    common(p)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("appendix", help="distributor naturality square suite")
    common(p)
    p.set_defaults(func=cmd_appendix)

    p = sub.add_parser("suite", help="run the manifest's suite selection")
    common(p)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("replay", help="replay counterexamples from a JSON report")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ManifestParse, UnknownBuiltin) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TangentCatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
