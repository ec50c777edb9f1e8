"""Validate the Euler-Maclaurin lattice correction against brute summation.

Brute oracle for H(x) = sum_n mass(n) * E_sf(x/n): direct summation to
N = 16x (numpy blocks), plus an exact series tail using Hurwitz zeta:

    sum_{n>N} C n^-beta E_sf(x/n)

expanded via E_sf(s) = sum_k c_k s^k for small s = x/n (exp: c_k =
(-1)^k/k!; weibull(1/2): expand exp(-sqrt(s)) in powers of sqrt(s)).
"""
import importlib.util
import math
import sys
import time

import numpy as np
from scipy.special import zeta

ROOT = "/root/pkg/src/tailkit"


def load(name):
    spec = importlib.util.spec_from_file_location(
        f"tailkit.{name}", f"{ROOT}/{name}.py")
    mod = importlib.util.module_from_spec(spec)
    sys.modules[f"tailkit.{name}"] = mod
    spec.loader.exec_module(mod)
    return mod


pkg = importlib.util.module_from_spec(
    importlib.util.spec_from_loader("tailkit", loader=None, is_package=True))
pkg.__path__ = [ROOT]
sys.modules["tailkit"] = pkg
load("quadrature")
load("grids")
dist = load("distributions")
conv = load("convolve")

BETA = 3.0
C = 1.0 / zeta(BETA, 1.0)  # zeta(3)


def brute_exp(x: float) -> float:
    """sum_n C n^-3 exp(-x/n), summed to N=16x then Hurwitz tail."""
    N = int(16 * x)
    total = 0.0
    for start in range(1, N + 1, 1 << 22):
        ns = np.arange(start, min(N, start + (1 << 22) - 1) + 1, dtype=float)
        total += float(np.sum(C * ns ** -BETA * np.exp(-x / ns)))
    # tail: sum_{n>N} C n^-3 sum_k (-x)^k / k! n^-k
    tail = 0.0
    term_scale = 1.0
    for k in range(0, 30):
        inc = C * term_scale * zeta(BETA + k, N + 1)
        tail += inc
        term_scale *= -x / (k + 1)
        if abs(inc) < 1e-300 or abs(term_scale * zeta(BETA + k + 1, N + 1)) < abs(tail) * 1e-18:
            tail += C * term_scale * zeta(BETA + k + 1, N + 1)
            break
    return total + tail


def brute_weibull(x: float) -> float:
    """sum_n C n^-3 exp(-sqrt(x/n)), summed to N=4096x then sqrt-series."""
    N = int(4096 * x)
    total = 0.0
    for start in range(1, N + 1, 1 << 22):
        ns = np.arange(start, min(N, start + (1 << 22) - 1) + 1, dtype=float)
        total += float(np.sum(C * ns ** -BETA * np.exp(-np.sqrt(x / ns))))
    # exp(-sqrt(s)) = sum_k (-1)^k s^{k/2} / k!  -> half-integer zeta shifts
    tail = 0.0
    term_scale = 1.0
    for k in range(0, 60):
        inc = C * term_scale * zeta(BETA + 0.5 * k, N + 1)
        tail += inc
        term_scale *= -math.sqrt(x) / (k + 1)
        if abs(inc) < abs(tail) * 1e-18 + 1e-300:
            break
    return total + tail


def run():
    E = dist.Exponential(1.0)
    W = dist.WeibullType(0.5)
    M = dist.LatticePower(3.0)
    q = conv.QuadratureSpec()

    print("lattice3 x Exponential(1)")
    for x in (1e6, 1e8):
        t0 = time.perf_counter()
        got, err = conv._lattice_log_tail(E, M, x, q)
        t1 = time.perf_counter()
        want = brute_exp(x)
        t2 = time.perf_counter()
        rel = abs(math.exp(got) - want) / want
        print(f"  x={x:.0e}  rel={rel:.3e}  declared_err={math.exp(err - got):.3e}"
              f"  new={t1 - t0:.2f}s brute={t2 - t1:.1f}s"
              f"  {'OK' if rel < 1e-9 and rel <= math.exp(err - got) * 1.5 + 1e-12 else 'FAIL'}")

    print("lattice3 x Weibull(1/2)")
    for x in (1e5,):
        t0 = time.perf_counter()
        got, err = conv._lattice_log_tail(W, M, x, q)
        t1 = time.perf_counter()
        want = brute_weibull(x)
        t2 = time.perf_counter()
        rel = abs(math.exp(got) - want) / want
        print(f"  x={x:.0e}  rel={rel:.3e}  declared_err={math.exp(err - got):.3e}"
              f"  new={t1 - t0:.2f}s brute={t2 - t1:.1f}s"
              f"  {'OK' if rel < 1e-9 and rel <= math.exp(err - got) * 1.5 + 1e-12 else 'FAIL'}")


if __name__ == "__main__":
    run()
