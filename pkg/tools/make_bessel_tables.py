"""Generate frozen Chebyshev tables for the large-argument K0/K1 evaluator.

The small-argument branch (z <= 2) of the production evaluator uses the
ascending power series directly.  For z > 2 a plain truncated asymptotic
expansion cannot reach 1e-10 relative accuracy until z ~ 11, so the scaled
functions

    F_nu(z) = exp(z) * sqrt(z) * K_nu(z)

are fitted once, here, with Chebyshev series on two subranges:

    mid: z in [2, 8],    t = (16/z - 5) / 3
    far: z in [8, inf),  t = 16/z - 1

The fit targets come from the high-precision two-regime oracle (ascending
series / asymptotic expansion in mpmath), so the frozen coefficients are
still "series plus asymptotics", just resummed into a stable double form.

Run:  python tools/make_bessel_tables.py
Paste the printed arrays into src/euleralpha/_bessel_data.py.
"""

import mpmath as mp


def mp_bessel_k(order, z, dps=60):
    """K_order(z) at high precision: ascending series for z<=25, else the
    exponential asymptotic expansion summed to its smallest term."""
    with mp.workdps(dps):
        z = mp.mpf(z)
        if z <= 25:
            return _k_series(order, z)
        return _k_asympt(order, z)


def _k_series(order, z):
    # A&S 9.6.10/9.6.11 ascending series, exact in mpmath arithmetic.
    half = z / 2
    u = half * half
    lg = mp.log(half)
    if order == 0:
        term = mp.mpf(1)          # (z^2/4)^k / (k!)^2
        hk = mp.mpf(0)            # harmonic number H_k
        i0 = mp.mpf(1)
        s = mp.mpf(0)
        k = 0
        while True:
            k += 1
            term *= u / (k * k)
            hk += mp.mpf(1) / k
            i0 += term
            s += term * hk
            if term < mp.eps * i0:
                break
        return -(lg + mp.euler) * i0 + s
    # order 1
    term = mp.mpf(1)              # (z^2/4)^k / (k! (k+1)!)
    i1 = mp.mpf(1)                # I1(z)/(z/2) accumulator
    psum = (1 - 2 * mp.euler)     # psi(1)+psi(2) = -2γ + 1
    s = psum
    hk = mp.mpf(0)
    hk1 = mp.mpf(1)
    k = 0
    while True:
        k += 1
        term *= u / (k * (k + 1))
        hk += mp.mpf(1) / k
        hk1 += mp.mpf(1) / (k + 1)
        i1 += term
        s += term * (-2 * mp.euler + hk + hk1)
        if term < mp.eps * i1:
            break
    i1 *= half
    return 1 / z + lg * i1 - (z / 4) * s


def _k_asympt(order, z):
    # K_nu(z) ~ sqrt(pi/2z) e^-z sum_k a_k(nu)/z^k, summed to smallest term.
    mu = 4 * order * order
    s = mp.mpf(1)
    term = mp.mpf(1)
    k = 0
    while True:
        k += 1
        prev = abs(term)
        term *= (mu - (2 * k - 1) ** 2) / (8 * k * z)
        if k > 1 and abs(term) >= prev:
            break           # smallest term reached; adding more diverges
        s += term
        if abs(term) < mp.eps * abs(s) or k > 400:
            break
    return mp.sqrt(mp.pi / (2 * z)) * mp.exp(-z) * s


def cheb_fit(f, n, dps=40):
    """Chebyshev coefficients of f on t in [-1,1] via the Gauss nodes."""
    with mp.workdps(dps):
        nodes = [mp.cos(mp.pi * (k + mp.mpf(1) / 2) / n) for k in range(n)]
        vals = [f(t) for t in nodes]
        coef = []
        for j in range(n):
            acc = mp.mpf(0)
            for k in range(n):
                acc += vals[k] * mp.cos(j * mp.pi * (k + mp.mpf(1) / 2) / n)
            coef.append(acc * 2 / n)
        return coef


def clenshaw(coef, t):
    b1 = b2 = 0.0
    for c in reversed(coef[1:]):
        b1, b2 = float(c) + 2.0 * t * b1 - b2, b1
    return float(coef[0]) / 2.0 + t * b1 - b2


def scaled(order, z):
    return mp.exp(z) * mp.sqrt(z) * mp_bessel_k(order, z)


def check(tag, coef, zmin, zmax, tmap, order, ngrid=4000):
    worst = 0.0
    import math
    for i in range(ngrid):
        z = zmin * math.exp(i / (ngrid - 1.0) * math.log(zmax / zmin))
        t = tmap(z)
        approx = clenshaw(coef, t)
        exact = float(scaled(order, mp.mpf(z)))
        rel = abs(approx - exact) / abs(exact)
        worst = max(worst, rel)
    print(f"# {tag}: n={len(coef)} max rel err on [{zmin},{zmax}] = {worst:.3e}")
    return worst


def emit(name, coef):
    print(f"{name} = [")
    for c in coef:
        print(f"    {float(c)!r},")
    print("]")


def main():
    jobs = [
        ("CHEB_K0_MID", 0, 2.0, 8.0, lambda z: (16.0 / z - 5.0) / 3.0,
         lambda t: scaled(0, 16 / (3 * t + 5))),
        ("CHEB_K1_MID", 1, 2.0, 8.0, lambda z: (16.0 / z - 5.0) / 3.0,
         lambda t: scaled(1, 16 / (3 * t + 5))),
        ("CHEB_K0_FAR", 0, 8.0, 1e8, lambda z: 16.0 / z - 1.0,
         lambda t: scaled(0, 16 / (t + 1)) if t > -1 else mp.sqrt(mp.pi / 2)),
        ("CHEB_K1_FAR", 1, 8.0, 1e8, lambda z: 16.0 / z - 1.0,
         lambda t: scaled(1, 16 / (t + 1)) if t > -1 else mp.sqrt(mp.pi / 2)),
    ]
    for name, order, zmin, zmax, tmap, g in jobs:
        for n in (20, 24, 28, 32, 40, 48):
            coef = cheb_fit(g, n)
            worst = check(name, coef, zmin, zmax, tmap, order)
            if worst < 2e-15:
                break
        emit(name, coef)


if __name__ == "__main__":
    main()
