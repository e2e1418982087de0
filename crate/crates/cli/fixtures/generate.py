#!/usr/bin/env python3
"""Regenerate the b-file fixtures in oeis/ and the figure-shift golden CSV by brute force.

The files are produced locally, not downloaded; each carries a header saying so.
Run from this directory: python3 generate.py
"""
import itertools
import math
import os

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "oeis")


def squarefree(n):
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def primes_upto(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, p))]


def a_of_x(x):
    """Max over one removed class mod p^2 per prime p^2 <= x of the survivors in [1, x]."""
    mods = [p * p for p in primes_upto(x) if p * p <= x]
    best = 0
    for choice in itertools.product(*[range(q) for q in mods]):
        alive = sum(1 for n in range(1, x + 1) if all(n % q != r for q, r in zip(mods, choice)))
        best = max(best, alive)
    return best


def write(seq_id, title, pairs):
    path = os.path.join(OUT, seq_id + ".txt")
    with open(path, "w", newline="\n") as f:
        f.write(f"# {seq_id}: {title}\n")
        f.write("# Generated locally by fixtures/generate.py (brute-force enumeration);\n")
        f.write("# not downloaded from the OEIS. Same 'index value' layout as a b-file.\n")
        for i, v in pairs:
            f.write(f"{i} {v}\n")


def fmt(v):
    if v == 0:
        return "0"
    prec = max(0, 9 - math.floor(math.log10(abs(v))))
    return f"{v:.{prec}f}"


def golden(x_max=30):
    path = os.path.join(os.path.dirname(OUT), "..", "tests", "golden", f"figure_shift_{x_max}.csv")
    with open(path, "w", newline="\n") as f:
        f.write("x,a_minus_main,q_minus_main,status\n")
        for x in range(1, x_max + 1):
            main = x / (math.pi * math.pi / 6)
            q = sum(1 for n in range(1, x + 1) if squarefree(n))
            f.write(f"{x},{fmt(a_of_x(x) - main)},{fmt(q - main)},EXACT\n")


def main():
    golden()
    sf = [n for n in range(1, 2000) if squarefree(n)]
    write("A005117", "squarefree numbers", [(i + 1, sf[i]) for i in range(1000)])
    write("A013928", "number of squarefree numbers below n",
          [(n, sum(1 for m in range(1, n) if squarefree(m))) for n in range(1, 1002)])
    write("A083544", "largest survivor count in [1, x] after removing one class mod p^2 per prime",
          [(x, a_of_x(x)) for x in range(1, 121)])
    write("A000051", "2^n + 1", [(n, 2**n + 1) for n in range(0, 61)])
    write("A000225", "2^n - 1", [(n, 2**n - 1) for n in range(0, 61)])
    write("A038507", "n! + 1", [(n, math.factorial(n) + 1) for n in range(0, 31)])
    write("A033312", "n! - 1", [(n, math.factorial(n) - 1) for n in range(0, 31)])


if __name__ == "__main__":
    main()
