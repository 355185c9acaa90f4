"""Serve norm queries for a matrix over stdin/stdout.

``python3 -m unicellular.oracle_server matrix.json`` reads one request
``{"i": int, "poly": {"coeffs": [[re, im], ...]}}`` per line and answers
``{"norm": float}``.  Malformed requests get ``{"error": "..."}``.
"""
import json
import sys

import numpy as np

from .io import dumps, polynomial_from_dict, read_matrix
from .linalg_core import spectral_norm
from .poly import eval_matrix


def serve(A, stdin, stdout):
    n = A.shape[0]
    lam = complex(np.mean(np.diag(A)))
    for line in stdin:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
            i = int(req["i"])
            if not 1 <= i <= n:
                raise ValueError(f"i={i} out of range 1..{n}")
            f = polynomial_from_dict(req["poly"])
            reply = {"norm": spectral_norm(eval_matrix(f, A[:i, :i], center=lam))}
        except (ValueError, KeyError, TypeError) as exc:
            reply = {"error": str(exc)}
        stdout.write(dumps(reply) + "\n")
        stdout.flush()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python3 -m unicellular.oracle_server matrix.json", file=sys.stderr)
        return 1
    serve(read_matrix(argv[0]), sys.stdin, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
