"""Regenerate energy_reference.json: ball energies evaluated in 30-digit
arithmetic from the single-frequency kernel form

    E = -(rho^2 / lambda) * int_0^inf alpha(i p / lambda)^2 f(N, p) dp.
"""

import json

import mpmath

mpmath.mp.dps = 30


def kernel(n, p):
    e2, e4 = mpmath.exp(-2 * p), mpmath.exp(-4 * n * p)
    g = (
        n**3 * e2 * (128 + 256 * p + 128 * p**2 + 64 * p**3)
        - n**2 * (e2 * (144 + 288 * p + 120 * p**2 + 48 * p**3) - 96 * p**2 * mpmath.e1(2 * p))
        + e2 * (41 + 34 * p + 14 * p**2 + 4 * p**3)
        + 24 * (mpmath.e1(2 * p) - mpmath.e1(4 * n * p))
        + e4 * (-21 + 12 * n * p)
        - 96 * n**2 * p**2 * mpmath.e1(4 * n * p)
    )
    return mpmath.pi / 48 * g


def energy(a, lam, rho, alpha):
    n = mpmath.mpf(a) / lam
    integrand = lambda p: alpha(p / lam) ** 2 * kernel(n, p)
    return -(rho**2) / lam * mpmath.quad(integrand, [0, 1, 5, 20, mpmath.inf])


def oscillators(pairs):
    return lambda w: sum(mpmath.mpf(s) * r / (mpmath.mpf(r) ** 2 + w**2) for s, r in pairs)


def main():
    cases = [
        {
            "name": "one_oscillator",
            "geometry": {"a": 1.0, "lambda": 0.5, "rho": 1.0},
            "oscillators": [[1.0, 2.0]],
        },
        {
            "name": "two_oscillators",
            "geometry": {"a": 1.0, "lambda": 0.1, "rho": 1.0},
            "oscillators": [[1.0, 0.5], [2.0, 3.0]],
        },
        {
            "name": "static_dilute",
            "geometry": {"a": 1.0, "lambda": 0.5, "rho": float(0.01 / (4 * mpmath.pi))},
            "alpha0": 1.0,
        },
    ]
    for case in cases:
        g = case["geometry"]
        if "alpha0" in case:
            alpha = lambda w, a0=case["alpha0"]: mpmath.mpf(a0)
        else:
            alpha = oscillators(case["oscillators"])
        case["energy"] = mpmath.nstr(energy(g["a"], g["lambda"], mpmath.mpf(g["rho"]), alpha), 20)
    out = {
        "generator": "gen_energy.py (mpmath %s, 30 digits, kernel form)" % mpmath.__version__,
        "cases": cases,
    }
    with open("energy_reference.json", "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
