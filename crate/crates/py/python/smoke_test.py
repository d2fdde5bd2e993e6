"""Smoke test for the pyspgamma extension.

Build and install first:  pip install --no-build-isolation crates/py
"""

import json
from fractions import Fraction

import pyspgamma as sp


def frac_rows(rows):
    return [[Fraction(v) for v in row] for row in rows]


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def main():
    n = sp.NilpotentPair.random(2, 1, seed=5)
    assert (n.r, n.m) == (2, 1)
    assert n == sp.NilpotentPair(2, 1, n.x, n.z)
    assert n == sp.NilpotentPair.from_xy(2, 1, n.x, n.y)

    m1, m2, *_ = n.decompose_w0()
    assert len(m1) == 2 and len(m2) == 2

    case, rep, u1, u2 = n.canonical()
    assert case == "r>=2m", case
    again = sp.NilpotentPair(2, 1, rep.x, rep.z)
    assert again.canonical()[1] == rep

    # n(X, Y) is unipotent upper triangular.
    big = frac_rows(n.matrix())
    assert all(big[i][i] == 1 for i in range(len(big)))
    assert all(big[i][j] == 0 for i in range(len(big)) for j in range(i))
    assert len(matmul(big, big)) == 6

    assert n.phi("uniform") == n.phi_oracle()
    printed = n.phi("printed")
    assert [abs(Fraction(v)) for v in printed[0]] == [abs(Fraction(v)) for v in n.phi_oracle()[0]]

    assert len(sp.bessel_support(2, 1)) == 4
    assert sp.padic_abs("9/2", 3) == -2
    assert sp.padic_abs("0", 5) is None
    assert isinstance(n.cutoff(3, 1), bool)

    report = json.loads(sp.run_suite("bruhat", r=(1, 2), m=(0, 1), samples=3, seed=1))
    assert report["status"] == "pass", report

    try:
        sp.run_suite("nope")
    except ValueError as e:
        assert "unknown suite" in str(e)
    else:
        raise AssertionError("expected ValueError")

    print("pyspgamma smoke test: ok")


if __name__ == "__main__":
    main()
