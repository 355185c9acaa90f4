"""Command-line front end: ``python -m unicellular <command> ...``.

Exit status is 0 for a definite result, 2 for an inconclusive similarity
verdict and 1 for errors (with a one-line diagnostic on stderr).
"""
import argparse
import json
import shlex
import sys

import numpy as np

from . import io
from .exceptions import UnicellularError
from .invariants import PolynomialFamily, arveson_test, norms_match, specht_test
from .linalg_core import eigenvalues, schur, spectral_norm
from .poly import eval_matrix
from .reconstruct import CommandOracle, reconstruct, simulate_oracle
from .similarity import canonical_form, counterexample_pair, decide_unitary_similarity, principal_norm_profile
from .toeplitz import VOLTERRA_NORM, alternating_sum, lemma2_verify, ones_nilpotent, richardson_limit, shift_matrix, volterra_convergence

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class CliError(Exception):
    pass


def _positive(kind):
    def parse(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return parse


def _tol(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"tolerance must lie in (0, 1), got {text}")
    return v


def _seed(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {text}")
    return v


def _load_matrix(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise CliError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: {exc}") from None
    try:
        return io.matrix_from_dict(data)
    except (ValueError, TypeError) as exc:
        raise CliError(f"invalid matrix in {path}: {exc}") from None


def _load_poly(path):
    try:
        with open(path) as fh:
            return io.polynomial_from_dict(json.load(fh))
    except FileNotFoundError:
        raise CliError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise CliError(f"invalid polynomial in {path}: {exc}") from None


def _emit(args, report, table=None):
    out = sys.stdout
    fmt = args.output or ("csv" if table is not None and args.command in ("profile", "volterra") else "json")
    if fmt == "csv":
        if table is None:
            raise CliError(f"--output csv is not available for {args.command}")
        io.write_csv(out, *table)
    elif fmt == "human":
        for key, value in report.items():
            out.write(f"{key}: {io.dumps(value)}\n")
    else:
        out.write(io.dumps(report) + "\n")


def _family(args, n):
    return PolynomialFamily.default(n, size=args.family_size, max_degree=args.max_degree, seed=args.seed)


# -- commands ----------------------------------------------------------------


def cmd_norm(args):
    A = _load_matrix(args.matrix)
    M = A if args.poly is None else eval_matrix(_load_poly(args.poly), A)
    _emit(args, {"norm": spectral_norm(M, method=args.method, tol=min(args.tol, 1e-12), seed=args.seed)})
    return EXIT_OK


def cmd_eig(args):
    ev = sorted(eigenvalues(_load_matrix(args.matrix)), key=lambda z: (z.real, z.imag))
    _emit(args, {"eigenvalues": ev})
    return EXIT_OK


def cmd_schur(args):
    W, T = schur(_load_matrix(args.matrix))
    _emit(args, {"U": io.matrix_to_dict(W.U), "T": io.matrix_to_dict(T), "unitarity_residual": W.unitarity_residual})
    return EXIT_OK


def cmd_similar(args):
    A, B = _load_matrix(args.a), _load_matrix(args.b)
    rep = decide_unitary_similarity(A, B, tol=args.tol)
    out = rep.to_dict()
    if rep.witness is not None:
        out["witness"] = io.matrix_to_dict(rep.witness.U)
    nm = norms_match(A, B, _family(args, A.shape[0]), tol=args.tol)
    out["norms_match"] = {"matched": nm.matched, "worst_gap": nm.worst_gap, "family_size": nm.queries // 2}
    _emit(args, out)
    return EXIT_INCONCLUSIVE if rep.verdict == "inconclusive" else EXIT_OK


def cmd_profile(args):
    A = _load_matrix(args.matrix)
    fam = _family(args, A.shape[0])
    P = principal_norm_profile(A, fam)
    header = ["i"] + [f"f{j}" for j in range(len(fam))]
    rows = [[i + 1, *map(float, P[i])] for i in range(P.shape[0])]
    _emit(args, {"family": fam.description, "profile": P}, (header, rows))
    return EXIT_OK


def cmd_specht(args):
    A, B = _load_matrix(args.a), _load_matrix(args.b)
    words = args.word or None
    rep = specht_test(A, B, max_len=args.max_word_len, tol=args.tol, words=words, certified_bound=args.certified_bound)
    _emit(args, rep.to_dict())
    return EXIT_OK


def cmd_arveson(args):
    A, B = _load_matrix(args.a), _load_matrix(args.b)
    _emit(args, arveson_test(A, B, samples=args.samples, seed=args.seed, tol=args.tol).to_dict())
    return EXIT_OK


def _reconstruction_report(rep, hidden=None):
    out = {
        "recovered": io.matrix_to_dict(rep.recovered),
        "lambda": rep.lambda_,
        "residuals": [{"entry": list(k), "residual": v} for k, v in sorted(rep.residuals.items(), key=lambda kv: (kv[0][1], kv[0][0]))],
        "query_count": rep.query_count,
        "verification_gap": rep.verification_gap,
    }
    if hidden is not None:
        _, C = canonical_form(hidden)
        out["max_entry_error"] = float(np.max(np.abs(rep.recovered - C)))
    return out


def cmd_reconstruct(args):
    kwargs = {"n_samples": args.samples_per_corner, "tol": args.tol, "seed": args.seed}
    if args.hidden:
        A = _load_matrix(args.hidden)
        rep = reconstruct(simulate_oracle(A, tol=1e-7), **kwargs)
        _emit(args, _reconstruction_report(rep, A))
        return EXIT_OK
    if args.n is None:
        raise CliError("--oracle-cmd requires --n (the order of the hidden matrix)")
    try:
        oracle = CommandOracle(shlex.split(args.oracle_cmd), args.n)
    except OSError as exc:
        raise CliError(f"cannot start oracle command: {exc}") from None
    with oracle:
        rep = reconstruct(oracle, **kwargs)
    _emit(args, _reconstruction_report(rep))
    return EXIT_OK


def cmd_counterexample(args):
    A, Ap = counterexample_pair(args.alpha, args.beta)
    paths = {"A": f"{args.out_prefix}_A.json", "Aprime": f"{args.out_prefix}_Aprime.json"}
    io.write_matrix(paths["A"], A)
    io.write_matrix(paths["Aprime"], Ap)
    _emit(args, {"alpha": args.alpha, "beta": args.beta, "written": [paths["A"], paths["Aprime"]]})
    return EXIT_OK


def cmd_volterra(args):
    try:
        ms = [int(m) for m in args.m_list.split(",") if m.strip()]
    except ValueError:
        raise CliError(f"--m-list must be comma-separated integers, got {args.m_list!r}") from None
    if not ms or min(ms) < 1:
        raise CliError("--m-list needs at least one positive size")
    rows = volterra_convergence(ms)
    report = {"limit": VOLTERRA_NORM, "rows": [{"m": m, "estimate": e, "gap": g} for m, e, g in rows]}
    try:
        report["richardson"] = richardson_limit(ms, [e for _, e, _ in rows])
    except ValueError:
        pass
    _emit(args, report, (["m", "estimate", "gap"], rows))
    return EXIT_OK


def cmd_lemmas(args):
    results = []
    for n in range(2, args.n + 1):
        Q, S = ones_nilpotent(n), shift_matrix(n)
        eye = np.eye(n)
        results.append(
            {
                "n": n,
                "alternating_sum_equals_shift": bool(np.array_equal(alternating_sum(Q, tol=args.tol), S)),
                "inverse_identity": bool(np.array_equal((eye - S) @ (eye + Q), eye)),
                "norm_condition_holds_for_Q": bool(lemma2_verify(Q, tol=args.tol)),
            }
        )
    ok = all(all(v for k, v in r.items() if k != "n") for r in results)
    _emit(args, {"exact": ok, "results": results})
    return EXIT_OK if ok else EXIT_ERROR


# -- parser ------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_tol, default=1e-9, help="relative tolerance (default 1e-9)")
    common.add_argument("--seed", type=_seed, default=0, help="seed for random families and samples (default 0)")
    common.add_argument("--output", choices=["json", "csv", "human"], default=None, help="report format")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family-size", type=_positive(int), default=64, help="random polynomials in the family")
    fam.add_argument("--max-degree", type=_positive(int), default=None, help="degree of the family (default n)")

    p = argparse.ArgumentParser(prog="unicellular", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norm", parents=[common], help="spectral norm of A or of f(A)")
    s.add_argument("matrix")
    s.add_argument("--poly", help="polynomial JSON; report ||f(A)||")
    s.add_argument("--method", choices=["svd", "power"], default="svd")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("eig", parents=[common], help="eigenvalues, sorted by (real, imag)")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_eig)

    s = sub.add_parser("schur", parents=[common], help="complex Schur form with ordered diagonal")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_schur)

    s = sub.add_parser("similar", parents=[common, fam], help="decide unitary similarity")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_similar, tol=1e-8)

    s = sub.add_parser("profile", parents=[common, fam], help="norms of f(A_i) over leading blocks")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("specht", parents=[common], help="word trace comparison")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--max-word-len", type=_positive(int), default=None, help="longest word (default 2n)")
    s.add_argument("--word", action="append", help="test only this word (repeatable), e.g. xy^2x^2y")
    s.add_argument("--certified-bound", type=_positive(int), default=None)
    s.set_defaults(func=cmd_specht)

    s = sub.add_parser("arveson", parents=[common], help="sampled tensor norm comparison")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--samples", type=_positive(int), default=32)
    s.set_defaults(func=cmd_arveson)

    s = sub.add_parser("reconstruct", parents=[common], help="recover a matrix from norm queries")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--hidden", help="matrix JSON answered by a simulated oracle")
    g.add_argument("--oracle-cmd", help="external program speaking the JSON-lines protocol")
    s.add_argument("--n", type=_positive(int), help="order of the hidden matrix (with --oracle-cmd)")
    s.add_argument("--samples", dest="samples_per_corner", type=_positive(int), default=6, help="shifts per corner solve")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("counterexample", parents=[common], help="write the equal-norm, non-similar 3x3 pair")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=2.0)
    s.add_argument("--out-prefix", default="p")
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("volterra", parents=[common], help="norms of Volterra discretizations")
    s.add_argument("--m-list", default="500,1000,2000")
    s.set_defaults(func=cmd_volterra)

    s = sub.add_parser("lemmas", parents=[common], help="check the Q/S identities exactly for n = 2..N")
    s.add_argument("--n", type=_positive(int), default=8)
    s.set_defaults(func=cmd_lemmas)
    return p


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except UnicellularError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


def main():
    sys.exit(run())
