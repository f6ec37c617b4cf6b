"""Independent high-precision evaluation of the closed-form reference values
frozen into the C++ unit and acceptance tests.

Run with: python3 tests/oracles/compute_oracles.py
Uses mpmath at 40 significant digits and exact Fractions; shares no code with
the C++ library.
"""
from fractions import Fraction
from itertools import combinations
from math import comb

import mpmath as mp

mp.mp.dps = 40


def ln(x):
    return mp.log(mp.mpf(x))


def kl(nu, mu):
    nu, mu = mp.mpf(nu), mp.mpf(mu)
    out = mp.mpf(0)
    if nu > 0:
        out += nu * mp.log(nu / mu)
    if nu < 1:
        out += (1 - nu) * mp.log((1 - nu) / (1 - mu))
    return out


def show(name, value):
    print(f"{name:48s} {mp.nstr(value, 17)}")


print("# log binomial")
for n, r in [(4, 2), (60, 30), (1000, 400), (100000, 1), (1000000, 3),
             (1000000, 500000), (1000000, 123457)]:
    show(f"log_binomial({n},{r})", mp.log(mp.binomial(n, r)))

print("# entropy / divergence")
show("kl(0.5,0.25)", kl(mp.mpf("0.5"), mp.mpf("0.25")))
show("kl(0.4,0.3)", kl(mp.mpf("0.4"), mp.mpf("0.3")))
show("hoeffding_kl(0.3,0.1,50)", mp.exp(-50 * kl(mp.mpf("0.4"), mp.mpf("0.3"))))
show("serfling(N=100,m=50,eps=0.1)", mp.exp(-(2 * 50 * mp.mpf("0.01")) * mp.mpf(100) / 51))
N, m, c, e = 1000, 500, mp.mpf("0.3"), mp.mpf("0.05")
beta = mp.mpf(m) / N
show("direct_binary(1000,500,0.3,0.05)",
     mp.exp(-m * kl(c + e, c) - (N - m) * kl(c - beta * e / (1 - beta), c) + 7 * ln(N + 1)))
show("log direct_binary(1000,500,0.3,0.05)",
     -m * kl(c + e, c) - (N - m) * kl(c - beta * e / (1 - beta), c) + 7 * ln(N + 1))

print("# explicit bounds")
d = mp.mpf("0.01")
theta = ln(100) - ln(d) + 7 * ln(201)  # ln(m/delta) + 7 ln(m+u+1), m=u=100
show("thm18(R=0,D=0,m=u=100,d=.01)", 2 * theta / 99)
show("cor23(R=0.2,p=1,m=u=100,d=.01)",
     mp.mpf("0.2") + mp.sqrt(2 * mp.mpf("0.2") * 2 * theta / 99) + 2 * theta / 99)
show("thm22(R=0,p=1,m=u=100,d=.01)", mp.sqrt(2 * mp.mpf("1.01") * ln(100) / 200))
# thm17, R=0.1, D=2, m=200, u=50, delta=0.05
R, D, mm, uu, dd = mp.mpf("0.1"), mp.mpf(2), 200, 50, mp.mpf("0.05")
cc = D + ln(mm) - ln(dd)
show("thm17(R=.1,D=2,m=200,u=50,d=.05)",
     R + mp.mpf(mm + uu) / uu * (mp.sqrt(2 * R * cc / (mm - 1)) + 2 * cc / (mm - 1)))
cc18 = cc + 7 * ln(mm + uu + 1)
show("thm18(R=.1,D=2,m=200,u=50,d=.05)",
     R + mp.sqrt(2 * R * (mm + uu) / uu * cc18 / (mm - 1)) + 2 * cc18 / (mm - 1))
# thm22 with B=2, R=0.5, p=0.1, m=30, u=20, delta=0.1
show("thm22(B=2,R=.5,p=.1,m=30,u=20,d=.1)",
     mp.mpf("0.5") + 2 * mp.sqrt(mp.mpf(50) / 20 * mp.mpf(21) / 20 * (ln(10) + ln(10)) / 60))
# u = 10 regime
for mval in [100, 100000]:
    s = mp.sqrt(mp.mpf(mval + 10) / 10 * mp.mpf(11) / 10 * ln(100) / (2 * mval))
    t = 2 * (ln(mval) - ln(d) + 7 * ln(mval + 11)) / (mval - 1)
    show(f"u=10 thm22 m={mval}", s)
    show(f"u=10 cor23 m={mval}", t)
for mval in [100, 100000]:
    s = mp.sqrt(mp.mpf(2 * mval) / mval * mp.mpf(mval + 1) / mval * ln(100) / (2 * mval))
    t = 2 * (ln(mval) - ln(d) + 7 * ln(2 * mval + 1)) / (mval - 1)
    show(f"u=m thm22 m={mval}", s)
    show(f"u=m cor23 m={mval}", t)
show("graepel(R=0,s=10,m=100,d=.01)",
     mp.sqrt((10 * mp.log(20 * mp.e) + ln(100) + 2 * ln(100)) / 180))
show("graepel(R=0.05,s=20,m=400,d=.05)",
     mp.mpf(400) / 380 * mp.mpf("0.05")
     + mp.sqrt((20 * mp.log(2 * mp.e * 400 / 20) + ln(20) + 2 * ln(400)) / 760))

print("# priors")
show("compression printed(R=0,s=5,m=u=100,d=.05)",
     mp.sqrt(2 * mp.mpf("1.01") * (5 * mp.log(2 * mp.e * 200 / 5) + ln(2000)) / 100))
show("compression exact(s=1,m=10,u=10)", ln(400))
show("clustering_complexity(2,10,1,exact)", 2 * ln(2) + ln(10))
show("cor27 printed(R=0,t=2,c=20,m=u=50,d=.05)", mp.sqrt(mp.mpf("1.02") * (2 + ln(400)) / 50))
show("cor27 printed(R=0,t=2,c=10,m=u=50,d=.05)", mp.sqrt(mp.mpf("1.02") * (2 + ln(200)) / 50))
show("cor27 exact(R=0,t=2,c=10,m=u=50,d=.05)",
     mp.sqrt(mp.mpf("1.02") * (2 * ln(2) + ln(200)) / 50))
show("prior sweep serfling p=1 m=u=50 d=.01",
     mp.sqrt(2 * mp.mpf("1.02") * ln(100) / 100))

print("# exact enumeration on the 4-point population (m=u=2)")
m, u = 2, 2
pts = range(m + u)


def tails(eps, k, relative):
    errs = set(range(k))
    splits = list(combinations(pts, m))
    hit = 0
    for train in splits:
        r = len(errs.intersection(train))
        dev = Fraction(k - r, u) - Fraction(r, m)
        if relative:
            # compare dev > sqrt(k/N) eps  <=>  dev*sqrt(N/k) > eps
            ok = k > 0 and dev > 0 and float(dev) * (float(m + u) / k) ** 0.5 > eps
        else:
            ok = dev > eps
        hit += ok
    return Fraction(hit, len(splits))


print("pmf(r=1,m=2,u=2,k=2) =", Fraction(comb(2, 1) * comb(2, 1), comb(4, 2)))
print("tail(eps=.5,k=2) =", tails(0.5, 2, False))
print("gamma_abs(0) =", max(tails(0.0, k, False) for k in range(5)))
cands = sorted({float(Fraction(k - r, u) - Fraction(r, m))
                for k in range(5) for r in range(max(0, k - u), min(m, k) + 1)} | {0.0})
cands = [c for c in cands if c >= 0]
for c in cands:
    print("  gamma_abs(", c, ") =", max(tails(c, k, False) for k in range(5)))
eps_star = min(c for c in cands if max(tails(c, k, False) for k in range(5)) <= Fraction(1, 5))
print("eps_star_abs(p=1,delta=0.2) =", eps_star)
