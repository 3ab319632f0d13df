"""Command line: rigidcr <command> ...; reports are JSON on stdout.

Exit codes: 0 success, 1 parse or validation error, 2 degenerate pivot.
``equivalence`` always exits 0 and carries the verdict in the report.
"""

import json
import sys
import warnings

import click

from . import fileformat
from .closed_forms import bridge_prediction
from .cr_fields import diff_invariants
from .equivalence import equivalent_c3
from .fileformat import FileFormatError, document, dumps, to_jsonable
from .hypersurface import (
    DegenerateError, Hypersurface, complete_dependents, envelope_germ, gm_model, jet_table,
    lightcone_tube, random_germ, random_rank1, recenter, remove_pluriharmonic, validate,
)
from .normalform_c3 import normalize, prenormalize
from .series_core import GaussRat, SeriesError
from .toy_c2 import equivalent_c2, invariant_R, prenormalize_c2, sphere_test

FRACTION = click.STRING


class Failure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _emit(ctx, doc):
    if ctx.obj.get("decimals"):
        click.echo(json.dumps(to_jsonable(doc, True), indent=2))
    else:
        click.echo(dumps(doc))


def _load(ctx, path, convention=None):
    try:
        H = fileformat.load(path)
    except (OSError, FileFormatError) as exc:
        raise Failure(1, "cannot read %s: %s" % (path, exc))
    if H.degree > ctx.obj["max_degree"]:
        raise Failure(1, "degree %d exceeds the configured maximum %d" % (H.degree, ctx.obj["max_degree"]))
    return H


def _run(fn):
    """Map exceptions onto exit codes with the failing predicate named."""
    try:
        fn()
    except Failure as exc:
        click.echo("error: %s" % exc, err=True)
        sys.exit(exc.code)
    except DegenerateError as exc:
        click.echo("degenerate: %s" % exc, err=True)
        sys.exit(2)
    except (FileFormatError, SeriesError, ValueError) as exc:
        click.echo("error: %s" % exc, err=True)
        sys.exit(1)


def _require_valid(H, where=""):
    rep = validate(H)
    if not rep["ok"]:
        # the pipelines strip pluriharmonic terms themselves
        failed = [k for k, v in rep.items() if v is False and k not in ("ok", "pluriharmonic_free")]
        if not failed:
            return rep
        if "levi_nonzero" in failed:
            raise DegenerateError("zero Levi pivot: F_{1,0,1,0} = 0" + where)
        if failed == ["two_nondegenerate"]:
            raise DegenerateError("not 2-nondegenerate" + where)
        raise Failure(1, "validation failed%s: %s" % (where, ", ".join(failed)))
    return rep


def _parse_point(values):
    try:
        from gmpy2 import mpq
        zr, zi, wr, wi = (mpq(v) for v in values)
    except ValueError:
        raise Failure(1, "--at expects four fractions")
    return GaussRat(zr, zi), GaussRat(wr, wi)


@click.group()
@click.option("--max-degree", default=10, show_default=True, help="Largest accepted jet degree.")
@click.option("--decimals", is_flag=True, help="Add approximate decimal renderings (marked 'approx').")
@click.pass_context
def main(ctx, max_degree, decimals):
    """Normal forms and invariants of rigid hypersurfaces in C^2 and C^3."""
    ctx.ensure_object(dict)
    warnings.showwarning = lambda msg, *a, **k: click.echo("warning: %s" % msg, err=True)
    ctx.obj["max_degree"] = max_degree
    ctx.obj["decimals"] = decimals


@main.command("validate")
@click.argument("files", nargs=-1, required=True, type=click.Path())
@click.pass_context
def cmd_validate(ctx, files):
    """Structural checks: reality, Levi pivot, rank 1, 2-nondegeneracy."""
    def go():
        reports = []
        bad = False
        for path in files:
            H = _load(ctx, path)
            rep = validate(H)
            bad = bad or not rep["ok"]
            reports.append({"file": path, "ambient_dim": H.ambient_dim, "degree": H.degree, "flags": rep})
        _emit(ctx, reports[0] if len(reports) == 1 else reports)
        if bad:
            raise Failure(1, "validation failed")
    _run(go)


@main.command("complete")
@click.argument("file", type=click.Path())
@click.option("--degree", type=int, help="Target degree (defaults to the file degree).")
@click.option("--convention", type=click.Choice(["monomial", "taylor"]), help="Output convention.")
@click.pass_context
def cmd_complete(ctx, file, degree, convention):
    """Recompute the dependent coefficients from the independent ones."""
    def go():
        H = _load(ctx, file)
        d = degree or H.degree
        if d > ctx.obj["max_degree"]:
            raise Failure(1, "degree %d exceeds the configured maximum" % d)
        J = jet_table(H)
        J.degree = d
        J.values = {e: c for e, c in J.values.items() if sum(e) <= d}
        out = complete_dependents(J, H.ambient_dim)
        out = Hypersurface(out.F, d, H.ambient_dim, H.convention)
        _emit(ctx, document(out, convention))
    _run(go)


@main.command("prenormalize")
@click.argument("file", type=click.Path())
@click.option("--convention", type=click.Choice(["monomial", "taylor"]))
@click.pass_context
def cmd_prenormalize(ctx, file, convention):
    """Prenormal form and the steps taken."""
    def go():
        H = _load(ctx, file)
        if H.ambient_dim == 2:
            out, M = prenormalize_c2(H)
            _emit(ctx, {"normal_form": document(out, convention), "rho": M.rho})
            return
        _require_valid(H)
        out, M, log = prenormalize(H)
        _emit(ctx, {"normal_form": document(out, convention), "stage_log": log, "rho": M.rho})
    _run(go)


def _result_doc(res, convention, branch):
    doc = {
        "branch": res.branch,
        "invariants": {"I0": res.invariants.I0, "V0": res.invariants.V0, "Q0": res.invariants.Q0},
        "lambda": res.lam,
        "stage_log": res.stage_log,
        "normal_form": document(res.H_norm, convention),
    }
    if branch:
        doc["branch_data"] = res.branch_data
        if res.branch_form is not None:
            doc["branch_form"] = document(res.branch_form, convention)
    return doc


@main.command("normalize")
@click.argument("file", type=click.Path())
@click.option("--branch", is_flag=True, help="Also fix the residual dilation-rotation.")
@click.option("--convention", type=click.Choice(["monomial", "taylor"]))
@click.pass_context
def cmd_normalize(ctx, file, branch, convention):
    """Full normal form with invariants."""
    def go():
        H = _load(ctx, file)
        if H.ambient_dim == 2:
            out, _ = prenormalize_c2(H)
            doc = {"normal_form": document(out, convention), "sphere": sphere_test(out)}
            if H.degree >= 4:
                doc["R0"] = invariant_R(out).constant()
            _emit(ctx, doc)
            return
        _require_valid(H)
        _emit(ctx, _result_doc(normalize(H, branch=branch), convention, branch))
    _run(go)


@main.command("invariants")
@click.argument("file", type=click.Path())
@click.option("--at", "at", nargs=4, type=FRACTION, help="Base point z_re z_im zeta_re zeta_im.")
@click.option("--route", type=click.Choice(["jet", "diff", "both"]), default="both", show_default=True)
@click.pass_context
def cmd_invariants(ctx, file, at, route):
    """I0, V0, Q0 by the normal-form route, the differential route, or both."""
    def go():
        H = _load(ctx, file)
        if H.ambient_dim == 2:
            R = invariant_R(H)
            _emit(ctx, {"R0": R.constant(), "flat_to_order": R.valid_order if sphere_test(H) else None})
            return
        doc = {}
        if at:
            z0, w0 = _parse_point(at)
            H = recenter(H, z0, w0)
            # a truncated jet moved off the origin is rarely rank 1 to full order;
            # exact germs should be recentered before taking the jet
            doc["at"] = [z0, w0]
        rep = _require_valid(H, " at the recentered point" if at else "")
        doc["rank1_order"] = rep["rank1_order"]
        jet = normalize(H, branch=False) if route in ("jet", "both") else None
        if jet is not None:
            inv = jet.invariants
            doc["jet"] = {"I0": inv.I0, "V0": inv.V0, "Q0": inv.Q0, "lambda": jet.lam, "branch": jet.branch}
        if route in ("diff", "both"):
            d = diff_invariants(H, with_def=False)
            doc["diff"] = {"I0": d.I0, "V0": d.V0, "Q0": d.Q0}
        if jet is not None and "diff" in doc:
            doc["bridge_ok"] = all(
                bridge_prediction(k, getattr(jet.invariants, k), jet.lam) == doc["diff"][k]
                for k in ("I0", "V0", "Q0"))
        _emit(ctx, doc)
    _run(go)


@main.command("equivalence")
@click.argument("file_a", type=click.Path())
@click.argument("file_b", type=click.Path())
@click.pass_context
def cmd_equivalence(ctx, file_a, file_b):
    """Decide equivalence of two jets up to truncation; always exits 0."""
    try:
        A, B = _load(ctx, file_a), _load(ctx, file_b)
        if A.ambient_dim != B.ambient_dim:
            doc = {"verdict": "inequivalent", "witness": {"violated": "ambient dimension"}}
        else:
            dec = equivalent_c2(A, B) if A.ambient_dim == 2 else equivalent_c3(A, B)
            doc = {"verdict": dec.verdict, "witness": dec.witness}
    except (Failure, DegenerateError, FileFormatError, SeriesError, ValueError) as exc:
        doc = {"verdict": "undecided", "error": str(exc)}
    _emit(ctx, doc)


@main.command("model")
@click.argument("kind", type=click.Choice(["gm", "lightcone", "random", "cone", "envelope"]))
@click.option("--degree", type=int, default=6, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the random kinds.")
@click.option("--at", "at", nargs=4, type=FRACTION,
              help="Exact germs only: recenter before taking the jet (parameter point for 'envelope').")
@click.option("--convention", type=click.Choice(["monomial", "taylor"]), default="monomial")
@click.pass_context
def cmd_model(ctx, kind, degree, seed, at, convention):
    """Coefficient file of a model or sample graph.

    gm and lightcone are the flat models; random is a random rank-1 jet;
    cone and envelope are exact rank-1 germs (I0 = 0, resp. V0 = 0 identically)
    which can be recentered exactly with --at.
    """
    def go():
        if degree > ctx.obj["max_degree"] or degree < 2:
            raise Failure(1, "degree must be in 2..%d" % ctx.obj["max_degree"])
        if at and kind not in ("cone", "envelope", "lightcone"):
            raise Failure(1, "--at needs an exact germ kind")
        if kind == "gm":
            H = gm_model(degree)
        elif kind == "random":
            H = random_rank1(seed, degree)
        else:
            from .hypersurface import lightcone_germ
            germ = {"lightcone": lightcone_germ, "cone": lambda: random_germ(seed),
                    "envelope": lambda: envelope_germ(seed)}[kind]()
            if at:
                germ = germ.at(*_parse_point(at))
            H = germ.jet(degree)
        H, _ = remove_pluriharmonic(H)
        _emit(ctx, document(H, convention))
    _run(go)


@main.command("selftest")
@click.option("--samples", type=int, default=5, show_default=True)
@click.pass_context
def cmd_selftest(ctx, samples):
    """Run the transcribed fixture suites and report each one."""
    from .selftest import all_ok, run
    records = run(samples=samples)
    ok = all_ok(records)
    _emit(ctx, {"ok": ok, "fixtures": records})
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
