"""Independent reference implementations used only by the tests.

Everything here enumerates k-subsets literally and uses exact rational
arithmetic where the quantity is rational.
"""

import itertools
from fractions import Fraction
from math import comb


def subset_ratios(x, k):
    """Ratio of the two largest members for every k-subset."""
    out = []
    for sub in itertools.combinations(sorted(x), k):
        out.append(Fraction(sub[-1]) / Fraction(sub[-2]))
    return out


def H_exact(x, k, t):
    ratios = subset_ratios(x, k)
    t = Fraction(t)
    return Fraction(sum(r < t for r in ratios), len(ratios))


def F_exact(x, t):
    t = Fraction(t)
    return Fraction(sum(Fraction(v) < t for v in x), len(x))


def integral_exact(x, k):
    ratios = subset_ratios(x, k)
    n = len(x)
    total = Fraction(0)
    for xi in x:
        xi = Fraction(xi)
        h = Fraction(sum(r < xi for r in ratios), len(ratios))
        f = Fraction(sum(Fraction(v) < xi for v in x), n)
        total += h - f
    return total / n


def sup_exact(x, k):
    """Sup of |H_n - F_n| over both one-sided limits at every jump point."""
    ratios = subset_ratios(x, k)
    n, m = len(x), len(ratios)
    pts = sorted(set(ratios) | {Fraction(v) for v in x})

    def diff(t, inclusive):
        if inclusive:
            h = sum(r <= t for r in ratios)
            f = sum(Fraction(v) <= t for v in x)
        else:
            h = sum(r < t for r in ratios)
            f = sum(Fraction(v) < t for v in x)
        return abs(Fraction(h, m) - Fraction(f, n))

    return max(max(diff(t, False), diff(t, True)) for t in pts)


def pair_weight_total(n, k):
    """Sum over 1-based position pairs a < b of C(a-1, k-2)."""
    return sum(comb(a - 1, k - 2) for b in range(1, n + 1) for a in range(1, b))
