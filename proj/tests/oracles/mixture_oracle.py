"""High-precision reference values for the mixture CDF tests.

Run: python3 tests/oracles/mixture_oracle.py
The printed values are frozen into tests/unit/test_mixture.cpp and
tests/unit/test_fit.cpp.
"""
from mpmath import mp, mpf, erfc, exp, sqrt, log10

mp.dps = 40


def phi(x, mu, sigma):
    return erfc(-(x - mu) / (sigma * sqrt(2))) / 2


def exp_cdf(x, scale):
    return mpf(0) if x < 0 else 1 - exp(-x / scale)


def raw(a, s, mu, sig, x):
    return a * exp_cdf(x, s) + (1 - a) * phi(x, mu, sig)


def numer(a, s, mu, sig, x):
    return a * exp_cdf(x, s) + (1 - a) * (phi(x, mu, sig) - phi(0, mu, sig))


def renorm(a, s, mu, sig, x):
    return numer(a, s, mu, sig, x) / (a + (1 - a) * (1 - phi(0, mu, sig)))


def surv(a, s, mu, sig, x):
    z = a + (1 - a) * (1 - phi(0, mu, sig))
    return (a * exp(-x / s) + (1 - a) * (1 - phi(x, mu, sig))) / z


def trunc(a, s, mu, sig, x, xmax):
    return numer(a, s, mu, sig, x) / numer(a, s, mu, sig, xmax)


th = (mpf("0.5"), mpf(100), mpf(300), mpf(50))
print("raw(300)        ", mp.nstr(raw(*th, 300), 20))
print("renorm(300)     ", mp.nstr(renorm(*th, 300), 20))
print("F_N(0,300,50)   ", mp.nstr(phi(0, 300, 50), 20))
print("trunc(150,600)  ", mp.nstr(trunc(*th, 150, 600), 20))
print("surv(3650)      ", mp.nstr(surv(*th, 3650), 20))
print("renorm(665)     ", mp.nstr(renorm(*th, 665), 20))
print("yearahead(300)  ", mp.nstr(renorm(*th, 300) / renorm(*th, 665), 20))
neg = phi(0, -200, 50)
print("F_N(0,-200,50)  ", mp.nstr(neg, 20))
print("penalty^2       ", mp.nstr(neg ** 2, 20))
th2 = (mpf("0.5"), mpf(100), mpf(-200), mpf(50))
print("surv2(3650)     ", mp.nstr(surv(*th2, 3650), 20))
th3 = (mpf("0.15"), mpf(60), mpf(400), mpf(80))
print("truth renorm(15)", mp.nstr(renorm(*th3, 15), 20))
print("truth surv(1000)", mp.nstr(surv(*th3, 1000), 20))
print("truth log10 surv(1000)", mp.nstr(log10(surv(*th3, 1000)), 20))
