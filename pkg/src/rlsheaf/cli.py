"""Command-line front end.

Exit codes: 0 every check passed, 1 a mathematical check failed (a witness is
printed), 2 malformed input or unmet precondition, 3 a search budget ran out.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Callable

from . import fixtures as fx
from .algebra import RLMorphism, check_morphism, validate_residuated_lattice
from .colimit import stalk, stalk_routes_agree
from .dot import export_dot
from .errors import BudgetExceeded, FormatError, PreconditionError
from .presheaf import (
    Presheaf,
    check_equalizer,
    check_gluing,
    check_separation,
    equalizer_agreement,
    is_sheaf,
    load_presheaf,
    validate_presheaf,
)
from .report import Report, _plain
from .sheafify import check_plus_sections, etale_of_presheaf, sheafification
from .spectra import classify_filters, enumerate_filters, filter_report, min_patch_discrepancy, spectrum

EXIT_OK, EXIT_MATH, EXIT_FORMAT, EXIT_BUDGET = 0, 1, 2, 3

PUBLISHED_OPENS = {
    "Spec_h(A4)": [[], ["F2"], ["F3"], ["F2", "F3"]],
    "Max_d(A6)": [[], ["F2"], ["F3"], ["F2", "F3"]],
    "Min_p(A8)": [[], ["F3"], ["F4"], ["F3", "F4"], ["F2", "F3", "F4"]],
}


# ---------------------------------------------------------------------------
# input resolution


def load_algebra(ref: str):
    if os.path.exists(ref):
        with open(ref, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{ref}: {exc}") from None
        return data
    try:
        return fx.small_algebra(ref) if ref in fx.SMALL_ALGEBRAS else fx.algebra(ref)
    except KeyError:
        raise FormatError(f"unknown algebra {ref!r} (not a file or fixture name)") from None


def resolve_algebra(ref: str):
    got = load_algebra(ref)
    if isinstance(got, dict):
        rep = validate_residuated_lattice(got)
        if not rep.ok:
            raise FormatError(f"{ref}: not a residuated lattice ({rep.violations[0].message})")
        return rep.value
    return got


def resolve_presheaf(ref: str) -> Presheaf:
    if os.path.exists(ref):
        return load_presheaf(ref, fx.algebra)
    try:
        return fx.presheaf(ref)
    except (KeyError, ValueError, IndexError):
        raise FormatError(f"unknown presheaf {ref!r} (not a file or fixture expression)") from None


# ---------------------------------------------------------------------------
# output


class Out:
    """Collects sections; renders as text or a single JSON document."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.sections: list[tuple[str, object]] = []
        self.failed = False

    def report(self, rep: Report, title: str | None = None) -> Report:
        self.sections.append((title or rep.subject, rep))
        if not rep.ok:
            self.failed = True
        return rep

    def data(self, title: str, value) -> None:
        self.sections.append((title, value))

    def note(self, title: str, rep: Report) -> None:
        """A paper-discrepancy section: shown, but not counted as a failure."""
        self.sections.append((f"paper-discrepancy: {title}", rep))

    def emit(self, stream=None) -> None:
        stream = stream or sys.stdout
        if self.as_json:
            doc = []
            for title, v in self.sections:
                doc.append({"section": title, "content": v.to_dict() if isinstance(v, Report) else _plain(v)})
            stream.write(json.dumps({"schema": 1, "ok": not self.failed, "sections": doc},
                                    indent=2, ensure_ascii=False) + "\n")
            return
        for title, v in self.sections:
            stream.write(f"== {title}\n")
            if isinstance(v, Report):
                stream.write(v.render() + "\n")
            elif isinstance(v, str):
                stream.write(v if v.endswith("\n") else v + "\n")
            elif isinstance(v, dict):
                for k, x in v.items():
                    stream.write(f"  {k}: {_plain(x)}\n")
            elif isinstance(v, list):
                for x in v:
                    stream.write(f"  {_plain(x)}\n")
            else:
                stream.write(f"  {_plain(v)}\n")


def _opens_of(P: Presheaf) -> list[str]:
    return [P.key(U) for U in P.opens]


def _find_open(P: Presheaf, key: str) -> int:
    U = P.base.from_key(key.strip("{} "))
    if not P.base.is_open(U):
        raise FormatError(f"{{{key}}} is not open")
    return U


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate_algebra(args, out: Out) -> None:
    got = load_algebra(args.algebra)
    rep = validate_residuated_lattice(got)
    if rep.ok:
        rep.info["elements"] = list(rep.value.elems)
    out.report(rep)


def cmd_filters(args, out: Out) -> None:
    out.report(filter_report(resolve_algebra(args.algebra)))


def cmd_classify(args, out: Out) -> None:
    alg = resolve_algebra(args.algebra)
    cls = classify_filters(alg)
    out.data(f"classification of {alg.name}", {
        "prime": cls.names("prime"), "maximal": cls.names("maximal"),
        "minimal_prime": cls.names("minimal_prime")})


def cmd_spectrum(args, out: Out) -> None:
    alg = resolve_algebra(args.algebra)
    sp = spectrum(alg, args.carrier, args.kind, closed_basis=args.closed_basis)
    out.data(f"{args.carrier}_{args.kind}({alg.name})", {"points": sp.names, "opens": sp.open_families()})


def cmd_validate_presheaf(args, out: Out) -> None:
    P = resolve_presheaf(args.presheaf)
    rep = validate_presheaf(P)
    rep.info["opens"] = _opens_of(P)
    out.report(rep)


def cmd_sheaf_check(args, out: Out) -> None:
    P = resolve_presheaf(args.presheaf)
    _require_valid(P, out)
    out.report(is_sheaf(P, args.mode))


def cmd_stalk(args, out: Out) -> None:
    P = resolve_presheaf(args.presheaf)
    _require_valid(P, out)
    points = [args.point] if args.point else list(P.base.points)
    for p in points:
        if p not in P.base.points:
            raise FormatError(f"unknown point {p!r}")
        st = stalk(P, p)
        rep = stalk_routes_agree(P, p)
        rep.info["size"] = st.algebra.n
        rep.info["minimal_neighbourhood"] = P.key(st.minimal)
        rep.info["elements"] = list(st.algebra.elems)
        out.report(rep)


def cmd_sheafify(args, out: Out) -> None:
    P = resolve_presheaf(args.presheaf)
    _require_valid(P, out)
    sh = sheafification(P)
    info = Report(f"sheafification of {P.name}")
    info.info["values"] = {P.key(U): [P.value(U).n, sh.plus.value(U).n] for U in P.opens}
    info.info["iota_isomorphism"] = sh.iota.is_isomorphism()
    info.info["germ_space_points"] = sh.etale.etale.total.n
    out.report(info)
    out.report(is_sheaf(sh.plus), "F+ is a sheaf")
    out.report(check_plus_sections(sh))


def cmd_etale(args, out: Out) -> None:
    P = resolve_presheaf(args.presheaf)
    _require_valid(P, out)
    E = etale_of_presheaf(P).etale
    if args.export == "dot":
        text = export_dot(E, args.output)
        if args.output is None:
            out.data(f"DOT of {E.name}", text)
        else:
            out.data("written", args.output)
    else:
        from .etale import validate_etale_space

        out.report(validate_etale_space(E))


def cmd_dot(args, out: Out) -> None:
    alg = resolve_algebra(args.algebra)
    obj = enumerate_filters(alg) if args.what == "filters" else alg
    out.data(f"DOT ({args.what})", export_dot(obj, args.output))


def _require_valid(P: Presheaf, out: Out) -> None:
    rep = validate_presheaf(P)
    if not rep.ok:
        out.report(rep)
        raise _Stop()


class _Stop(Exception):
    pass


# ---------------------------------------------------------------------------
# theorem instances


def _quotient_pool(rng: random.Random, n: int) -> list[Presheaf]:
    pool = [fx.presheaf(p) for p in ("prsresexa4", "prsresexa6", "prsresexa8")]
    while len(pool) < n:
        P = fx.random_presheaf(rng)
        if hasattr(P, "filters"):
            pool.append(P)
    return pool


def reflection_triples(seed: int, count: int = 20):
    """``(P, G, φ)`` with ``G = (G')⁺`` a sheaf and ``φ = ι_{G'} ∘ q``."""
    rng = random.Random(seed)
    out = []
    for P in _quotient_pool(rng, count):
        Gp, q = fx.coarsening(P, rng)
        sh = sheafification(Gp)
        out.append((P, sh.plus, q.then(sh.iota)))
    return out


def etale_morphism_fixtures(seed: int, count: int = 10):
    """Étalé maps ``Et(q)`` for random coarsening projections ``q``."""
    from .sheafify import etale_of_morphism

    rng = random.Random(seed)
    out = []
    for P in _quotient_pool(rng, count):
        _, q = fx.coarsening(P, rng)
        m = etale_of_morphism(q)
        out.append((m.map, m.source.etale, m.target.etale))
    return out


def run_theorem(name: str, seed: int, count: int) -> list[Report]:
    from .functors import check_equivalence, check_reflection, check_subcategory

    reps: list[Report] = []
    if name == "equalizer":
        pool = [fx.presheaf(p) for p in fx.PRESHEAF_FIXTURES] + fx.random_presheaves(seed, count)
        for P in pool:
            reps.append(equalizer_agreement(P))
    elif name == "reflection":
        for P, G, phi in reflection_triples(seed, count):
            reps.append(check_reflection(P, G, phi))
    elif name == "equivalence":
        maps = etale_morphism_fixtures(seed, max(1, count // 2))
        for p in fx.PRESHEAF_FIXTURES:
            reps.append(check_equivalence(etale_of_presheaf(fx.presheaf(p)).etale))
        for h, E, F in maps:
            reps.append(check_equivalence(E, [(h, E, F)]))
    elif name == "subcategory":
        maps = etale_morphism_fixtures(seed, max(2, count // 2))
        spaces = [E for _, E, _ in maps]
        reps.append(check_subcategory(spaces, maps))
    else:
        raise FormatError(f"unknown theorem {name!r}")
    return reps


def cmd_theorem(args, out: Out) -> None:
    from .functors import dashboard

    reps = run_theorem(args.id, args.seed, args.count)
    for r in reps:
        if not r.ok:
            out.report(r)
    if not out.failed:
        out.failed = any(not r.ok for r in reps)
    out.data("dashboard", dashboard([r for r in reps if hasattr(r, "theorem")])
             or {args.id: {"passed": sum(r.ok for r in reps), "failed": sum(not r.ok for r in reps)}})


# ---------------------------------------------------------------------------
# demos


def _demo_algebra(name: str) -> Callable:
    def run(out: Out, args) -> None:
        alg = fx.algebra(name)
        rep = validate_residuated_lattice(alg)
        rep.subject = f"{alg.name} is a residuated lattice"
        rep.info["elements"] = list(alg.elems)
        rep.info["hasse_edges"] = [(alg.label(a), alg.label(b)) for a, b in alg.hasse_edges()]
        out.report(rep)
    return run


def _demo_lukas(out: Out, args) -> None:
    for k in (1, 2, 5, 10):
        alg = fx.algebra(f"L{k}")
        rep = validate_residuated_lattice(alg)
        rep.subject = f"Lukasiewicz chain {alg.name} ({alg.n} elements)"
        out.report(rep)


def _demo_filters(out: Out, args) -> None:
    for a in ("a4", "a6", "a8"):
        out.report(filter_report(fx.algebra(a)))


def _demo_mora6a4(out: Out, args) -> None:
    A6, A4 = fx.a6(), fx.a4()
    f = RLMorphism(A6, A4, [A4.index(v) for v in ("0", "a", "a", "b", "1", "1")])
    rep = check_morphism(f)
    rep.subject = "f: A6 -> A4, f(0)=0, f(a)=f(b)=a, f(c)=b, f(d)=f(1)=1"
    out.report(rep)


def _demo_spectra(out: Out, args) -> None:
    for title, (a, carrier, kind) in {"Spec_h(A4)": ("a4", "spec", "hull"),
                                      "Max_d(A6)": ("a6", "max", "dual")}.items():
        sp = spectrum(fx.algebra(a), carrier, kind)
        rep = Report(title)
        got = sorted(sorted(o) for o in sp.open_families())
        want = sorted(sorted(o) for o in PUBLISHED_OPENS[title])
        rep.info["opens"] = sp.open_families()
        if got != want:
            rep.fail("table", "open family differs from the published one", published=want, computed=got)
        out.report(rep)
    sp = spectrum(fx.a8(), "min", "patch")
    out.data("Min_p(A8) computed", {"points": sp.names, "opens": sp.open_families()})
    out.note("Min_p(A8)", min_patch_discrepancy(fx.a8(), PUBLISHED_OPENS["Min_p(A8)"]))


def _demo_presheaf(expr: str, sheaf: bool | None, modes=("strict",)) -> Callable:
    def run(out: Out, args) -> None:
        P = fx.presheaf(expr)
        rep = validate_presheaf(P)
        rep.info["values"] = {P.key(U): P.value(U).n for U in P.opens}
        out.report(rep)
        for mode in modes:
            s = is_sheaf(P, mode)
            if sheaf is None:
                out.data(f"sheaf verdict ({mode})", {"sheaf": s.ok, "first": s.first().to_dict() if s.first() else None})
            elif sheaf:
                out.report(s)
            else:
                out.data(f"sheaf verdict ({mode}, expected not a sheaf)", s.render())
                if s.ok:
                    out.failed = True
    return run


def _demo_prsresexa(which: str) -> Callable:
    alg_name = {"prsresexa4": "a4", "prsresexa6": "a6", "prsresexa8": "a8"}[which]

    def run(out: Out, args) -> None:
        alg = fx.algebra(alg_name)
        lat = enumerate_filters(alg)
        out.data(f"filters of {alg.name}", {n: m for n, m in lat.table()})
        P = fx.presheaf(which)
        out.data(f"base space {P.base.name}", {"opens": [P.key(U) for U in P.opens]})
        rep = validate_presheaf(P)
        rep.info["values"] = {P.key(U): P.value(U).n for U in P.opens}
        out.report(rep)
        s = is_sheaf(P)
        out.data("sheaf verdict (strict)", {"sheaf": s.ok, "first": s.first().to_dict() if s.first() else None})
        if which == "prsresexa8":
            out.note("Min_p(A8) base", min_patch_discrepancy(fx.a8(), PUBLISHED_OPENS["Min_p(A8)"]))
    return run


def _demo_exsheanot(out: Out, args) -> None:
    P = fx.presheaf("constant(a4, discrete2)")
    out.report(validate_presheaf(P))
    B = P.base.full
    p, q = P.base.mask(["p"]), P.base.mask(["q"])
    g = check_gluing(P, B, (p, q), "paper")
    out.data("paper mode: gluing on {p},{q}", g.render())
    s = check_separation(P, 0, (), "strict")
    out.data("strict mode: separation on the empty cover of the empty set", s.render())
    note = Report("constant presheaf, strict vs paper mode")
    note.info["paper_mode"] = "gluing fails on the disjoint cover; separation holds"
    note.info["strict_mode"] = ("the empty cover of the empty set forces a one-element value, so "
                                "separation already fails; the disjoint family is not compatible "
                                "because restrictions to the empty intersection are identities")
    out.note("exsheanot", note)
    out.failed = True  # the example reproduces a failure


def _demo_exsirsheanot(out: Out, args) -> None:
    for k in (1, 2, 10):
        P = fx.presheaf(f"sierpinski_modified({k})")
        rep = validate_presheaf(P)
        out.report(rep, f"modified Sierpinski presheaf, k={k}")
    note = Report("modified restriction (a, b) -> (a, 0)")
    note.info["finding"] = ("the map kills the beta component, so the top (1,1) = (0,0)->(0,0) lands on (1,0); it does not "
                            "preserve the implication, so the object is not a presheaf of residuated "
                            "lattices; the published gluing witness also glues via sigma = mu")
    out.note("exsirsheanot", note)


def _demo_stalkgermex(out: Out, args) -> None:
    P = fx.presheaf("sierpinski_fuzzy(10)")
    for p in ("x", "y"):
        rep = stalk_routes_agree(P, p)
        rep.info["size"] = stalk(P, p).algebra.n
        out.report(rep)
    note = Report("stalks of the modified presheaf")
    note.info["finding"] = ("computed on the valid Sierpinski presheaf instead; the modified one is "
                            "rejected by validation (see exsirsheanot)")
    out.note("stalkgermex", note)


def _demo_sirpshe(out: Out, args) -> None:
    P = fx.presheaf("sierpinski_fuzzy(10)")
    rep = validate_presheaf(P)
    rep.info["values"] = {P.key(U): P.value(U).n for U in P.opens}
    out.report(rep)
    out.report(is_sheaf(P))
    sh = sheafification(P)
    iso = Report("iota is an isomorphism")
    if not sh.iota.is_isomorphism():
        iso.fail("iota", "iota is not an isomorphism for a sheaf")
    out.report(iso)


def _demo_fundexampresh(out: Out, args) -> None:
    from .presheaf import filter_quotient_presheaf

    base = spectrum(fx.a4(), "spec", "hull").topology
    lat = enumerate_filters(fx.a4())
    P = filter_quotient_presheaf(fx.a4(), base, {"F2": lat.by_name("F2").mask, "F3": lat.by_name("F3").mask})
    rep = validate_presheaf(P)
    rep.info["values"] = {P.key(U): P.value(U).n for U in P.opens}
    out.report(rep)
    ref = fx.presheaf("prsresexa4")
    from .algebra import is_isomorphic

    same = Report("matches prsresexa4 value by value")
    for U in P.opens:
        if not is_isomorphic(P.value(U), ref.value(U)):
            same.fail("isomorphism", "values differ", U=P.key(U))
    out.report(same)


def _demo_onepoint(out: Out, args) -> None:
    for expr in ("one_point(a4)", "skyscraper(sierpinski, x, a4)", "skyscraper(discrete2, p, a4)"):
        P = fx.presheaf(expr)
        out.report(validate_presheaf(P), f"{expr} is a presheaf")
        for mode in ("strict", "paper"):
            out.report(is_sheaf(P, mode), f"{expr} is a sheaf ({mode})")


DEMOS: dict[str, Callable] = {
    "exa4": _demo_algebra("a4"),
    "exa6": _demo_algebra("a6"),
    "exa8": _demo_algebra("a8"),
    "lukas": _demo_lukas,
    "filterexa": _demo_filters,
    "maxminex": _demo_filters,
    "mora6a4": _demo_mora6a4,
    "spectrumofex": _demo_spectra,
    "onepointpre": _demo_presheaf("one_point(a4)", True),
    "skyscraperpre": _demo_presheaf("skyscraper(sierpinski, x, a4)", True),
    "constantpreex": _demo_presheaf("constant(a4, discrete2)", None, ("strict", "paper")),
    "fundexampresh": _demo_fundexampresh,
    "prsresexa4": _demo_prsresexa("prsresexa4"),
    "prsresexa6": _demo_prsresexa("prsresexa6"),
    "prsresexa8": _demo_prsresexa("prsresexa8"),
    "sirpshe": _demo_sirpshe,
    "sirppresheaf": _demo_sirpshe,
    "onepointshe": _demo_onepoint,
    "exsheanot": _demo_exsheanot,
    "exsirsheanot": _demo_exsirsheanot,
    "stalkgermex": _demo_stalkgermex,
}


def cmd_demo(args, out: Out) -> None:
    if args.example not in DEMOS:
        raise FormatError(f"unknown example {args.example!r}; known: {', '.join(sorted(DEMOS))}")
    DEMOS[args.example](out, args)


def cmd_equalizer(args, out: Out) -> None:
    P = resolve_presheaf(args.presheaf)
    _require_valid(P, out)
    O = _find_open(P, args.open)
    cover = tuple(_find_open(P, c) for c in args.cover)
    out.report(check_equalizer(P, O, cover))


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rlsheaf", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.add_argument("--seed", type=int, default=0, help="seed for generated instances")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, *args):
        sp = sub.add_parser(name, help=help_)
        for a in args:
            sp.add_argument(a)
        sp.set_defaults(func=fn)
        return sp

    add("validate-algebra", cmd_validate_algebra, "check every residuated-lattice axiom", "algebra")
    add("filters", cmd_filters, "enumerate filters", "algebra")
    add("classify", cmd_classify, "prime / maximal / minimal prime filters", "algebra")
    sp = add("spectrum", cmd_spectrum, "spectral topology on a set of prime filters", "algebra")
    sp.add_argument("--kind", choices=("hull", "dual", "patch"), default="hull")
    sp.add_argument("--carrier", choices=("spec", "max", "min"), default="spec")
    sp.add_argument("--closed-basis", action="store_true", help="take h(x) as closed sets")
    add("validate-presheaf", cmd_validate_presheaf, "functor laws and restriction morphisms", "presheaf")
    sp = add("sheaf-check", cmd_sheaf_check, "separation and gluing on every cover", "presheaf")
    sp.add_argument("--mode", choices=("strict", "paper"), default="strict")
    sp = add("stalk", cmd_stalk, "stalks by both routes", "presheaf")
    sp.add_argument("--point", default=None)
    add("sheafify", cmd_sheafify, "F+ = Ps(Et(F)) and the unit", "presheaf")
    sp = add("etale", cmd_etale, "the germ space Et(F)", "presheaf")
    sp.add_argument("--export", choices=("dot", "check"), default="check")
    sp.add_argument("-o", "--output", default=None)
    sp = add("dot", cmd_dot, "DOT of an algebra order or its filter lattice", "algebra")
    sp.add_argument("--what", choices=("hasse", "filters"), default="hasse")
    sp.add_argument("-o", "--output", default=None)
    sp = add("equalizer", cmd_equalizer, "equalizer diagram on one cover", "presheaf", "open")
    sp.add_argument("cover", nargs="*")
    sp = add("theorem", cmd_theorem, "instance checks of a theorem",)
    sp.add_argument("id", choices=("equalizer", "reflection", "equivalence", "subcategory"))
    sp.add_argument("--count", type=int, default=20)
    sp = add("demo", cmd_demo, "reproduce a worked example end to end")
    sp.add_argument("example")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Out(args.json)
    code = EXIT_OK
    try:
        args.func(args, out)
        code = EXIT_MATH if out.failed else EXIT_OK
    except _Stop:
        code = EXIT_MATH
    except (FormatError, PreconditionError) as exc:
        out.data("error", {"kind": type(exc).__name__, "message": str(exc),
                           "witness": getattr(exc, "witness", None)})
        code = EXIT_FORMAT
    except BudgetExceeded as exc:
        out.data("error", {"kind": "BudgetExceeded", "message": str(exc)})
        code = EXIT_BUDGET
    out.emit()
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
