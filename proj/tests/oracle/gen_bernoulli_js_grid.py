#!/usr/bin/env python3
"""Generate the golden grid for the Bernoulli Jensen-Shannon divergence.

Evaluates JS(Bernoulli(p) || Bernoulli(q)) in bits at 50-digit precision on a
101x101 grid over [0,1]^2 and writes one value per line as
"<i> <j> <js>" where p = i/100 and q = j/100.

Run from the repo root:
    python3 tests/oracle/gen_bernoulli_js_grid.py > tests/golden/bernoulli_js_grid.tsv
"""

import mpmath as mp

mp.mp.dps = 50


def xlog2x(x):
    if x == 0:
        return mp.mpf(0)
    return x * mp.log(x, 2)


def kl_bernoulli_bits(p, m):
    # sum over outcomes {1, 0} with the 0*log(0) = 0 convention
    total = mp.mpf(0)
    for a, b in ((p, m), (1 - p, 1 - m)):
        if a != 0:
            total += a * mp.log(a / b, 2)
    return total


def js_bernoulli_bits(p, q):
    m = (p + q) / 2
    return (kl_bernoulli_bits(p, m) + kl_bernoulli_bits(q, m)) / 2


def main():
    for i in range(101):
        for j in range(101):
            p = mp.mpf(i) / 100
            q = mp.mpf(j) / 100
            v = js_bernoulli_bits(p, q)
            print(f"{i} {j} {mp.nstr(v, 17, strip_zeros=False)}")


if __name__ == "__main__":
    main()
