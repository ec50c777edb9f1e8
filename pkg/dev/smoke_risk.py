"""Oracle checks for the risk module, run before tests are frozen."""
import importlib.util
import math
import os
import sys
import time

import numpy as np

for m in ["quadrature", "grids", "distributions", "convolve", "diagnostics",
          "risk"]:
    spec = importlib.util.spec_from_file_location(
        f"tailkit.{m}", f"src/tailkit/{m}.py")
    mod = importlib.util.module_from_spec(spec)
    sys.modules[f"tailkit.{m}"] = mod
    spec.loader.exec_module(mod)

D = sys.modules["tailkit.distributions"]
C = sys.modules["tailkit.convolve"]
R = sys.modules["tailkit.risk"]

failures = []


def check(name, ok, detail=""):
    tag = "ok  " if ok else "FAIL"
    print(f"{tag} {name} {detail}")
    if not ok:
        failures.append(name)


pareto1 = D.RegVar(1.0, 1.0)          # survival 1/x on [1, inf)
uni = D.UniformLaw(1.0)               # uniform (0, 1]
fixture = R.RiskModelSpec(Z_law=pareto1, Y_law=uni)

# --- model validation ---------------------------------------------------------
try:
    R.RiskModelSpec(Z_law=pareto1, Y_law=uni, horizon=0)
    check("horizon 0 rejected", False)
except D.ParameterError as e:
    check("horizon 0 rejected", "horizon" in str(e))

bad_y = D.positive_part(D.shift(D.Exponential(1.0), -1.0))  # atom at 0
try:
    R.RiskModelSpec(Z_law=pareto1, Y_law=bad_y)
    check("Y with mass at zero rejected", False)
except D.ParameterError as e:
    check("Y with mass at zero rejected", e.param == "Y_law")

check("horizon inf accepted",
      R.RiskModelSpec(Z_law=pareto1, Y_law=uni, horizon=math.inf).horizon
      == math.inf)

# --- discounted_loss_tail ------------------------------------------------------
t0 = time.time()
deg1_model = R.RiskModelSpec(Z_law=pareto1, Y_law=D.Degenerate(1.0))
for i in (1, 3, 7):
    got = R.discounted_loss_tail(deg1_model, i, 50.0)
    check(f"deg(1) discount i={i}: tail == F tail",
          got == pareto1.log_sf(50.0), f"got={got}")

# analytic: H_i(x) = 2**-i / x for x >= 1
for i in (1, 2, 3, 4):
    got = math.exp(R.discounted_loss_tail(fixture, i, 50.0))
    want = 2.0 ** -i / 50.0
    check(f"uniform discount i={i}: 2^-i/x",
          abs(got - want) / want < 1e-5, f"rel={(got-want)/want:.2e}")

got = R.discounted_loss_tail(fixture, 1, 50.0)
want = C.product_tail(pareto1, uni, 50.0)
check("i=1 equals product_tail exactly", got == want,
      f"diff={got-want:.2e}")
print(f"     discounted_loss_tail block: {time.time()-t0:.1f}s")

# --- finite_ruin_asymptotic ----------------------------------------------------
got = R.finite_ruin_asymptotic(fixture, 1, 50.0)
check("asymptotic n=1 == H_1",
      got == R.discounted_loss_tail(fixture, 1, 50.0))

got = math.exp(R.finite_ruin_asymptotic(fixture, 3, 50.0))
check("asymptotic n=3 x=50 == 0.0175", abs(got - 0.0175) / 0.0175 < 1e-5,
      f"got={got:.8f} rel={(got-0.0175)/0.0175:.2e}")

got = R.finite_ruin_asymptotic(deg1_model, 4, 50.0)
want = math.log(4.0) + pareto1.log_sf(50.0)
check("deg(1) asymptotic n=4 == log(4 F_bar)", abs(got - want) < 1e-12,
      f"diff={got-want:.2e}")

# --- finite_ruin_mc: degenerate staircase --------------------------------------
stair = R.RiskModelSpec(Z_law=D.Degenerate(1.0), Y_law=D.Degenerate(1.0))
est = R.finite_ruin_mc(stair, 3, 2.5, paths=10 ** 4, seed=1)
check("staircase psi(2.5;3) == 1", est.point == 1.0)
est = R.finite_ruin_mc(stair, 3, 3.0, paths=10 ** 4, seed=1)
check("staircase psi(3;3) == 0", est.point == 0.0,
      f"ci={est.ci_halfwidth:.2e}")

# --- finite_ruin_mc: n=1 vs H_1 -------------------------------------------------
t0 = time.time()
est = R.finite_ruin_mc(fixture, 1, 20.0, paths=10 ** 6, seed=7)
want = math.exp(R.discounted_loss_tail(fixture, 1, 20.0))
check("mc n=1 within 4 sigma of H_1",
      abs(est.point - want) <= 4.0 * est.ci_halfwidth / 1.96 + 1e-12,
      f"mc={est.point:.6f} tail={want:.6f} ci={est.ci_halfwidth:.2e}")
check("mc n=1: max == terminal sum for monotone paths",
      est.point == est.terminal_point)

# --- determinism ----------------------------------------------------------------
a1 = R.finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 5, seed=11)
a2 = R.finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 5, seed=11)
check("same seed -> identical estimate",
      a1 == a2, f"p={a1.point}")
os.environ["TAILKIT_WORKERS"] = "1"
b1 = R.finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 5, seed=11)
os.environ["TAILKIT_WORKERS"] = "8"
b2 = R.finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 5, seed=11)
del os.environ["TAILKIT_WORKERS"]
check("worker count does not change the estimate",
      a1 == b1 == b2)

# --- pathwise monotonicity -------------------------------------------------------
ns = [1, 2, 3, 5]
points = [R.finite_ruin_mc(fixture, n, 30.0, paths=10 ** 5, seed=3).point
          for n in ns]
check("psi non-decreasing in n (shared paths)",
      all(p1 <= p2 for p1, p2 in zip(points, points[1:])),
      f"points={points}")

prof = R.finite_ruin_profile(fixture, 3, [10.0, 20.0, 40.0, 80.0],
                             paths=10 ** 5, seed=3)
check("profile non-increasing in x (shared paths)",
      all(a.point >= b.point for a, b in zip(prof, prof[1:])),
      f"points={[e.point for e in prof]}")
check("profile keeps input order", [e.x for e in prof] == [10., 20., 40., 80.])
shuffled = R.finite_ruin_profile(fixture, 3, [40.0, 10.0, 80.0, 20.0],
                                 paths=10 ** 5, seed=3)
check("profile matches pointwise mc across input order",
      sorted((e.x, e.point) for e in shuffled)
      == sorted((e.x, e.point) for e in prof))

mixed = R.RiskModelSpec(Z_law=D.shift(pareto1, -1.5), Y_law=uni)
est = R.finite_ruin_mc(mixed, 4, 5.0, paths=10 ** 5, seed=5)
check("psi >= terminal exceedance pathwise",
      est.point >= est.terminal_point,
      f"psi={est.point:.5f} term={est.terminal_point:.5f}")
print(f"     mc block: {time.time()-t0:.1f}s")

# --- acceptance-scale fixture ----------------------------------------------------
t0 = time.time()
est = R.finite_ruin_mc(fixture, 3, 50.0, paths=10 ** 7, seed=2026)
asym = math.exp(R.finite_ruin_asymptotic(fixture, 3, 50.0))
ratio = est.point / asym
dt = time.time() - t0
check("mc/asymptotic ratio in [0.9, 1.1] (10^7 paths)",
      0.9 <= ratio <= 1.1, f"ratio={ratio:.4f} mc={est.point:.6f} "
      f"asym={asym:.6f} t={dt:.1f}s")
check("10^7-path run under 60 s", dt < 60.0, f"{dt:.1f}s")

# --- divergence guard --------------------------------------------------------------
guard = R.divergence_guard(R.RiskModelSpec(
    Z_law=pareto1, Y_law=D.shift(D.UniformLaw(1.0), 1.0)))
check("uniform [1,2] fails guard", not guard.passed, guard.reason[:60])
check("uniform (0,1] passes guard", R.divergence_guard(fixture).passed)
guard = R.divergence_guard(deg1_model)
check("deg(1) fails guard", not guard.passed)

# --- infinite_lower_bound: pareto/uniform fixture -----------------------------------
t0 = time.time()
series_log, cert = R.infinite_lower_bound(fixture, 50.0, lam=2.0,
                                          epsilon=0.05)
check("a estimate == 1/2", abs(cert.a_estimate - 0.5) < 1e-9,
      f"a={cert.a_estimate}")
check("p == q == 1/2", abs(cert.p_mass - 0.5) < 1e-12
      and abs(cert.q_mass - 0.5) < 1e-12)
check("factor == 0.775", abs(cert.factor - 0.775) < 1e-12)
check("i_star == 22", cert.i_star == 22, f"i_star={cert.i_star}")
want = (1.0 - 2.0 ** -cert.i_star) / 50.0
got = math.exp(series_log)
check("series == sum 2^-i/x", abs(got - want) / want < 1e-5,
      f"rel={(got-want)/want:.2e}")
check("remainder under 1%", cert.remainder_ratio < 0.01,
      f"ratio={cert.remainder_ratio:.4f}")
check("all per-step contraction checks pass",
      cert.passed and len(cert.step_checks) > 0,
      f"{len(cert.step_checks)} checks")
check("geometric term bound 2^-(i+1) <= 0.775^i * 2^-1",
      all(2.0 ** -(i + 1) <= 0.775 ** i * 0.5 for i in range(1, 23)))
print(f"     lower bound block: {time.time()-t0:.1f}s")

# degenerate Y = 1/2: p = 1, q = 0, factor = a + eps
half = R.RiskModelSpec(Z_law=pareto1, Y_law=D.Degenerate(0.5))
series_log, cert = R.infinite_lower_bound(half, 50.0, lam=2.0, epsilon=0.05)
check("deg(1/2): p=1 q=0", cert.p_mass == 1.0 and cert.q_mass == 0.0)
check("deg(1/2): factor == a + eps",
      abs(cert.factor - (cert.a_estimate + 0.05)) < 1e-12,
      f"factor={cert.factor}")
want = (1.0 - 2.0 ** -cert.i_star) / 50.0
check("deg(1/2) series == sum 2^-i/x",
      abs(math.exp(series_log) - want) / want < 1e-9)

# refusals
try:
    R.infinite_lower_bound(R.RiskModelSpec(Z_law=D.Exponential(1.0),
                                           Y_law=uni), 20.0)
    check("exp loss refused (no class-A evidence)", False)
except D.ParameterError as e:
    check("exp loss refused (no class-A evidence)", e.param == "Z_law")

try:
    R.infinite_lower_bound(deg1_model, 50.0)
    check("deg(1) discounts refused", False)
except D.ParameterError as e:
    check("deg(1) discounts refused", e.param == "Y_law")

try:
    R.infinite_lower_bound(R.RiskModelSpec(Z_law=pareto1,
                                           Y_law=D.UniformLaw(2.0)), 50.0)
    check("discounts above 1 refused", False)
except D.ParameterError as e:
    check("discounts above 1 refused", "(0, 1]" in str(e))

try:
    R.infinite_lower_bound(fixture, 50.0, epsilon=0.6)
    check("epsilon >= 1-a refused", False)
except D.ParameterError as e:
    check("epsilon >= 1-a refused", "epsilon" in str(e))

# vanishing series: bounded loss, level beyond reach
bounded = R.RiskModelSpec(Z_law=D.UniformLaw(1.0), Y_law=uni)
try:
    series_log, cert = R.infinite_lower_bound(bounded, 10.0)
    vanished = series_log == sys.modules["tailkit.quadrature"].LOG_ZERO
    check("vanishing series short-circuits", vanished,
          f"i_star={cert.i_star}")
except D.ParameterError as e:
    # bounded uniform may fail the class gate instead; either is honest
    check("vanishing series short-circuits", e.param == "Z_law",
          f"refused: {e}")

# --- asymptotic preconditions -------------------------------------------------------
t0 = time.time()
pre = R.asymptotic_preconditions(fixture)
check("preconditions: subexp verdict agrees",
      pre["product_subexp"].status == "OK"
      and pre["product_subexp"].predicted_member is True
      and pre["product_subexp"].agreement == "agree",
      f"status={pre['product_subexp'].status}")
check("preconditions: EQ11 holds for bounded discounts",
      pre["EQ11"].overall == "HOLDS_EVIDENCE",
      f"{time.time()-t0:.1f}s")

print()
if failures:
    print(f"{len(failures)} FAILURES: {failures}")
    sys.exit(1)
print("ALL OK")
