"""Time every kernel on its numba and numpy paths and print a table.

    python benchmarks/bench_kernels.py [--scale 20] [--repeat 3]

The numba path is warmed up once before timing so JIT compilation is excluded.
"""

import argparse
import timeit

import numpy as np

from multexp import _kernels as K


def cases(scale: int):
    n = 1 << scale
    spf = K.spf_table(n)
    pp, _, rest = K.prime_power_split(spf)
    rng = np.random.default_rng(0)
    ppv = np.exp(2j * np.pi * rng.random(n + 1))
    primes = np.flatnonzero(spf[2:] == np.arange(2, n + 1)) + 2
    small = primes[primes < 1000]
    logp = np.log(primes[: 1 << 14].astype(float))
    w = rng.normal(size=logp.size) + 1j * rng.normal(size=logp.size)
    ts = np.linspace(-100, 100, 2001)
    M = 1 << (scale - 2)
    S = np.fft.fft(rng.normal(size=M) + 1j * rng.normal(size=M))
    dS = np.fft.fft(rng.normal(size=M) + 1j * rng.normal(size=M))
    return {
        f"spf_table(2^{scale})": lambda b: K.spf_table(n, backend=b),
        f"prime_power_split(2^{scale})": lambda b: K.prime_power_split(spf, backend=b),
        f"multiplicative_values(2^{scale})": lambda b: K.multiplicative_values(pp, rest, ppv, n, backend=b),
        f"count_prime_divisors(2^{scale}, p<1000)": lambda b: K.count_prime_divisors(n, small, backend=b),
        f"twisted_prime_sums(2001 t, {logp.size} p)": lambda b: K.twisted_prime_sums(ts, logp, w, backend=b),
        "farey(300)": lambda b: K.farey(300, backend=b),
        f"hermite_abs_integral(M=2^{scale - 2}, m=8)": lambda b: K.hermite_abs_integral(S, dS, 8, backend=b),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=20, help="log2 of the sieve length")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'kernel':48s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, fn in cases(args.scale).items():
        fn("numba")
        t = {b: min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) for b in ("numba", "numpy")}
        print(f"{name:48s} {t['numba']:10.4f} {t['numpy']:10.4f} {t['numpy'] / t['numba']:8.1f}x")


if __name__ == "__main__":
    main()
