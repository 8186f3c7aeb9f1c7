"""Command-line front end.

Exit statuses: 0 success, 2 parse or usage error, 3 engine error,
4 verification failure (not spherical, relation FAIL, certification failure).
Every report starts with the header line ``# spherical-an report <version> <command>``.
"""

from __future__ import annotations

import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import click

from . import derived_objects as do
from . import ext_calculus as ec
from . import fuzzing as fz
from . import group_words as gw
from . import linked_sheaves as ls
from . import normalizer as nz
from . import textio
from .chain_core import ChainError, SubchainLineBundle, sigma_bundles
from .twist_engine import OutOfTable, apply_word
from .words import TwistWord, WordSyntaxError, parse_word

REPORT_VERSION = 1
ENV_N = "SPHERICAL_AN_N"

EXIT_PARSE, EXIT_ENGINE, EXIT_VERIFY = 2, 3, 4

ENGINE_ERRORS = (
    ChainError, OutOfTable, ls.UnsupportedTorsion, ec.ExtInconsistency, do.DecodeError,
    do.UnrepresentableClass, nz.NotSpherical, nz.HypothesisError, nz.NoProgress, nz.PreconditionError,
)


class VerificationFailed(Exception):
    pass


def _emit(ctx: click.Context, lines) -> None:
    click.echo(f"# spherical-an report {REPORT_VERSION} {ctx.info_name}")
    for ln in lines:
        click.echo(ln)


def _write_out(path: str | None, docs: list[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("---\n".join(docs))


def _run(fn):
    """Map structured errors to the documented exit statuses."""
    try:
        fn()
    except (textio.FormatError, WordSyntaxError) as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    except (VerificationFailed, nz.CertificationError) as exc:
        click.echo(f"verification failed: {exc}", err=True)
        sys.exit(EXIT_VERIFY)
    except ENGINE_ERRORS as exc:
        click.echo(f"engine error ({type(exc).__name__}): {exc}", err=True)
        sys.exit(EXIT_ENGINE)


def _read_docs(path: str) -> list:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    return textio.load_all(text)


def _objects(path: str | None, sheaf: tuple, n: int | None, kind=do.DerivedObject) -> list:
    objs = []
    if path:
        objs += _read_docs(path)
    for spec in sheaf:
        if n is None:
            raise click.UsageError("--sheaf needs --n (or the SPHERICAL_AN_N environment variable)")
        try:
            objs.append(textio.parse_bundle_spec(spec, n))
        except ChainError as exc:
            raise textio.FormatError(str(exc)) from exc
    for o in objs:
        if not isinstance(o, kind):
            raise textio.FormatError(f"expected {kind.__name__} documents, got {type(o).__name__}")
        if n is not None and o.n != n:
            raise textio.FormatError(f"document has n = {o.n} but --n is {n}")
    if not objs:
        raise click.UsageError("no input: give --in FILE or --sheaf")
    return objs


def _chain_n(n: int | None, objs=()) -> int:
    if n is not None:
        return n
    if objs:
        return objs[0].n
    raise click.UsageError("chain length unknown: pass --n or set SPHERICAL_AN_N")


def _word(text: str | None, n: int) -> TwistWord:
    if text is None:
        raise click.UsageError("--word is required")
    return parse_word(text, n)


n_option = click.option("--n", "n", type=int, envvar=ENV_N, default=None, help="Chain length (env SPHERICAL_AN_N).")
in_option = click.option("--in", "in_path", type=str, default=None, help="Input document file ('-' for stdin).")
out_option = click.option("--out", "out_path", type=str, default=None, help="Write machine-readable output here.")
sheaf_option = click.option("--sheaf", multiple=True, help="Inline sheaf 's t a_s .. a_t[@p]'.")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Symbolic calculator for the derived category of an A_n chain of (-2)-curves."""


@main.command()
@n_option
@in_option
@out_option
def decompose(n, in_path, out_path):
    """Split a linked sheaf into subchain line bundles."""

    def go():
        if not in_path:
            raise click.UsageError("decompose reads a linked-sheaf document via --in")
        docs = _read_docs(in_path)
        outs, lines = [], []
        for e in docs:
            if not isinstance(e, ls.LinkedSheaf):
                raise textio.FormatError("decompose expects 'kind: linked' documents")
            parts = ls.decompose(e)
            lines.append(f"ranks {e.ranks}: " + " + ".join(map(str, parts)))
            outs.append(textio.dump_object(do.DerivedObject.make(e.n, {0: parts})))
        _emit(click.get_current_context(), lines)
        _write_out(out_path, outs)

    _run(go)


@main.command("ext-table")
@n_option
@sheaf_option
@click.option("--bound", type=int, default=None, help="Tabulate all of Sigma(Z) with |degrees| <= bound.")
@click.option("--check-model", is_flag=True, help="Also count in the twisted-complex model and compare.")
def ext_table(n, sheaf, bound, check_model):
    """Hom/Ext^1/Ext^2 dimensions and chi for pairs of subchain line bundles."""

    def go():
        nn = _chain_n(n)
        if bound is not None:
            bundles = list(sigma_bundles(nn, bound))
        else:
            bundles = [textio.parse_bundle_spec(s, nn).H(0)[0] for s in sheaf]
        if not bundles:
            raise click.UsageError("give --sheaf (repeatable) or --bound")
        lines = [f"{'R':>22s} {'S':>22s}  hom ext1 ext2  chi"]
        bad = 0
        for r, s, p in ec.ext_table(bundles, nn):
            flag = ""
            if check_model and ec.ext_profile_model(r, s, nn) != p:
                flag, bad = "  MODEL MISMATCH", bad + 1
            lines.append(f"{str(r):>22s} {str(s):>22s}  {p.hom:3d} {p.ext1:4d} {p.ext2:4d} {p.chi:4d}{flag}")
        _emit(click.get_current_context(), lines)
        if bad:
            raise VerificationFailed(f"{bad} pairs disagree with the model count")

    _run(go)


@main.command()
@n_option
@click.option("--word", required=True, help="Word, letters applied left to right.")
@in_option
@sheaf_option
@out_option
def twist(n, word, in_path, sheaf, out_path):
    """Apply a word to objects."""

    def go():
        objs = _objects(in_path, sheaf, n)
        w = _word(word, objs[0].n)
        lines, outs = [], []
        for d in objs:
            img = apply_word(w, d)
            lines += [f"input: {d}", f"output: {img}", f"l: {d.l_value()} -> {img.l_value()}"]
            outs.append(textio.dump_object(img))
        _emit(click.get_current_context(), lines)
        _write_out(out_path, outs)

    _run(go)


@main.command()
@n_option
@in_option
@sheaf_option
def spherical(n, in_path, sheaf):
    """Decide sphericality from the E_2 page of Hom(D, D)."""

    def go():
        objs = _objects(in_path, sheaf, n)
        lines, failed = [], 0
        for d in objs:
            v = do.is_spherical(d)
            lines.append(f"object: {d}")
            lines.append(f"verdict: {'spherical' if v else 'not spherical'}" + (f" ({v.failed})" if v.failed else ""))
            for k, val in v.certificate.items():
                lines.append(f"  {k}: {val}")
            failed += not v
        _emit(click.get_current_context(), lines)
        if failed:
            raise VerificationFailed(f"{failed} object(s) are not spherical")

    _run(go)


@main.command()
@n_option
@in_option
@sheaf_option
@out_option
@click.option("--check", is_flag=True, help="Re-check sphericality after every step.")
def reduce(n, in_path, sheaf, out_path, check):
    """Reduce a spherical object to a shifted line bundle on one curve."""

    def go():
        objs = _objects(in_path, sheaf, n)
        lines, outs = [], []
        for d in objs:
            tr = nz.reduce_spherical(d, check=check)
            lines += tr.report().splitlines()
            lines.append(f"word: {tr.word or '(empty)'}")
            outs += [textio.dump_trace(d.n, tr.word, tr.steps), textio.dump_object(tr.result)]
        _emit(click.get_current_context(), lines)
        _write_out(out_path, outs)

    _run(go)


@main.command("reduce-pair")
@n_option
@in_option
@click.option("--word", default=None, help="Use (w(O_C1), w(O_C1(-1))) as the pair.")
@out_option
def reduce_pair(n, in_path, word, out_path):
    """Normalize a pair to O_C(a)[i], O_C(a-1)[i]."""

    def go():
        if word is not None:
            nn = _chain_n(n)
            w = _word(word, nn)
            a = apply_word(w, do.sheaf(nn, SubchainLineBundle.curve(1, 0)))
            b = apply_word(w, do.sheaf(nn, SubchainLineBundle.curve(1, -1)))
        else:
            objs = _objects(in_path, (), n)
            if len(objs) != 2:
                raise textio.FormatError("reduce-pair reads exactly two object documents")
            a, b = objs
        pt = nz.reduce_pair(a, b)
        lines = pt.report().splitlines() + [f"landing curve: C_{pt.curve}", f"word: {pt.word or '(empty)'}"]
        _emit(click.get_current_context(), lines)
        _write_out(out_path, [textio.dump_trace(a.n, pt.word, pt.steps),
                              textio.dump_object(pt.alpha_result), textio.dump_object(pt.beta_result)])

    _run(go)


@main.command()
@n_option
@click.option("--word", required=True)
@click.option("--no-certify", is_flag=True, help="Skip the test-set and K-matrix certification.")
def factor(n, word, no_certify):
    """Normal form (B-word, line bundle, flip, shift) of an autoequivalence word."""

    def go():
        w = _word(word, _chain_n(n))
        res = nz.normalize_autoequivalence(w, certify=not no_certify)
        nf = res.normal_form
        lines = [
            f"input: {w}",
            f"B-word: {nf.b_word or '(empty)'}",
            f"line bundle: {' '.join(map(str, nf.pic.degrees))}",
            f"flip: {'yes' if nf.flip else 'no'}",
            f"shift: {nf.shift}",
            f"landing curves: {res.landing}",
            f"certified: {'no (skipped)' if no_certify else 'yes'}",
            f"normal-form word: {nf.as_word() or '(empty)'}",
        ]
        _emit(click.get_current_context(), lines)

    _run(go)


@main.command()
@n_option
@click.option("--word", default=None, help="Left-hand word.")
@click.option("--word2", default=None, help="Right-hand word.")
@click.option("--level", type=click.Choice(["K", "objects"]), default="objects")
def relations(n, word, word2, level):
    """Check w1 = w2, or with no words the braid and commutation relations of T(l,-1)."""

    def go():
        nn = _chain_n(n)
        if (word is None) != (word2 is None):
            raise click.UsageError("give both --word and --word2, or neither")
        if word is not None:
            pairs = [(f"{word} = {word2}", parse_word(word, nn), parse_word(word2, nn))]
        else:
            pairs = [(f"braid {i},{i + 1}", *gw.braid_words(nn, i)) for i in range(1, nn)]
            pairs += [(f"commute {i},{j}", *gw.commute_words(nn, i, j))
                      for i in range(1, nn + 1) for j in range(i + 2, nn + 1)]
        lines, failed = [], 0
        for label, w1, w2 in pairs:
            rep = gw.check_relation(w1, w2, level)
            lines.append(f"{label}: {'PASS' if rep else 'FAIL'} ({level})")
            for obj, ok in rep.rows:
                lines.append(f"  {obj}: {'same' if ok else 'differs'}")
            if not rep:
                lines.append(f"  witness: {rep.witness}")
                failed += 1
        if level == "objects":
            lines.append("note: agreement on a finite test set is evidence, not a proof")
        _emit(click.get_current_context(), lines)
        if failed:
            raise VerificationFailed(f"{failed} relation(s) failed")

    _run(go)


def _fuzz_case(args):
    kind, n, seed, cfg = args
    rng = random.Random(seed)
    t0 = time.time()
    try:
        if kind == "spherical":
            w, start, d = fz.random_spherical(n, rng, cfg)
            tr = nz.reduce_spherical(d)
            info = f"l {d.l_value()} steps {len(tr.steps)} -> {tr.result}"
        elif kind == "pair":
            w = fz.random_autoequivalence(n, rng, cfg)
            a = apply_word(w, do.sheaf(n, SubchainLineBundle.curve(1, 0)))
            b = apply_word(w, do.sheaf(n, SubchainLineBundle.curve(1, -1)))
            pt = nz.reduce_pair(a, b)
            info = f"landing C_{pt.curve}"
        else:
            w = fz.random_autoequivalence(n, rng, cfg)
            info = str(nz.normalize_autoequivalence(w).normal_form)
        ok = True
    except Exception as exc:  # reported per case
        info, ok = f"{type(exc).__name__}: {exc}", False
        w = None
    return seed, ok, str(w) if w is not None else "?", info, time.time() - t0


@main.command()
@n_option
@click.option("--kind", type=click.Choice(["spherical", "pair", "factor"]), default="spherical")
@click.option("--cases", type=int, default=20)
@click.option("--seed", type=int, default=0, help="Base seed; case k uses seed + k.")
@click.option("--max-l", type=int, default=fz.FuzzConfig.max_l, help="Cap on l along the random word.")
@click.option("--workers", type=int, default=1)
def fuzz(n, kind, cases, seed, max_l, workers):
    """Seeded round-trip fuzzing of the reduction algorithms."""

    def go():
        nn = _chain_n(n)
        cfg = fz.FuzzConfig(max_l=max_l)
        jobs = [(kind, nn, seed + k, cfg) for k in range(cases)]
        if workers > 1:
            with ProcessPoolExecutor(workers) as ex:
                results = list(ex.map(_fuzz_case, jobs))
        else:
            results = [_fuzz_case(j) for j in jobs]
        lines = [f"{'PASS' if ok else 'FAIL'} seed {s} [{dt:.1f}s] {w} :: {info}" for s, ok, w, info, dt in results]
        failed = sum(not r[1] for r in results)
        lines.append(f"{cases - failed}/{cases} passed")
        _emit(click.get_current_context(), lines)
        if failed:
            raise VerificationFailed(f"{failed} fuzz case(s) failed")

    _run(go)


if __name__ == "__main__":
    main()
