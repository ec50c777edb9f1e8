"""Isolate where the iterated-uniform product error enters."""
import importlib.util
import math
import sys
import types

import numpy as np
from scipy.integrate import quad as sq

ROOT = "/root/pkg/src/tailkit"
pkg = types.ModuleType("tailkit")
pkg.__path__ = [ROOT]
sys.modules["tailkit"] = pkg
for name in ("quadrature", "grids", "distributions", "convolve"):
    spec = importlib.util.spec_from_file_location(
        f"tailkit.{name}", f"{ROOT}/{name}.py")
    mod = importlib.util.module_from_spec(spec)
    sys.modules[f"tailkit.{name}"] = mod
    spec.loader.exec_module(mod)

D = sys.modules["tailkit.distributions"]
C = sys.modules["tailkit.convolve"]

F = D.RegVar(1.0, 1.0)
G = D.UniformLaw(1.0)
spec2 = C.GridSpec(nodes=1024, eps_lo=1e-5)
W2 = C.product_dist(G, G, spec2)

# exact sf of U*U: 1 - t + t ln t
def sf2(t):
    return 1.0 - t + t * math.log(t)

# 1. engine path
got = math.exp(C.product_tail(F, W2, 50.0)) * 50.0
print(f"E[W2] via product_tail : {got:.12f}  rel={(got/0.25-1):.3e}")

# 2. by-parts from the grid itself: E = x0 + int sf_hat dw
x0 = W2.support_lo
xe = W2._x_end
val, _ = sq(lambda w: math.exp(float(W2.log_sf(w))), x0, xe, limit=800,
            epsrel=1e-12)
e_grid = x0 + val
print(f"E[W2] via grid sf      : {e_grid:.12f}  rel={(e_grid/0.25-1):.3e}")

# 3. exact integral of true sf for reference
val, _ = sq(lambda w: sf2(w), 1e-300, 1.0, limit=800, epsrel=1e-13)
print(f"E[W2] exact            : {val:.12f}")

# pointwise grid sf errors across the range
ts = np.exp(np.linspace(math.log(x0 * 1.01), math.log(0.999999), 4000))
rel = np.abs(np.exp(W2.log_sf(ts) - np.log([sf2(t) for t in ts])) - 1.0)
i = int(np.argmax(rel))
print(f"max pointwise sf rel err {rel[i]:.3e} at t={ts[i]:.6f} "
      f"(d={-math.log(ts[i]):.4f})")
for q in (0.5, 0.9, 0.99):
    print(f"  sf err quantile {q}: {np.quantile(rel, q):.3e}")

# head atom bookkeeping
print("head_atom:", W2.head_atom(), " tail_atom:", W2.tail_atom())
print("x0:", x0, " true P(W<=x0):", 1.0 - sf2(x0))

# engine decomposition: atoms vs density for product_tail(F, W2, 50)
parts = C._measure_parts(W2, 50.0)
atom_terms = parts.atom_log_mass + F.log_sf(50.0 / parts.atom_locs)
print("atom locs:", parts.atom_locs, "log masses:", parts.atom_log_mass)
print("atom contribution:", np.exp(atom_terms) * 50.0)
dens, derr = C._product_density_piece(
    F, parts, 50.0, C.QuadratureSpec(rel_tol=2.5e-9), parts.dens_lo,
    min(parts.dens_hi, 50.0), C.LOG_ZERO)
print(f"density contribution*50: {math.exp(dens)*50.0:.12f} "
      f"(err bound {math.exp(derr)*50.0:.2e})")
atot = float(np.exp(atom_terms).sum()) if atom_terms.size else 0.0
print(f"sum*50 = {(math.exp(dens) + atot) * 50.0:.12f}")

# where is the density integral mass? compare against by-parts on segments
for a, b in [(x0, 0.01), (0.01, 0.2), (0.2, 0.6), (0.6, 0.95),
             (0.95, xe)]:
    vq, _ = sq(lambda w: math.exp(float(W2.log_density(w))) * w, a, b,
               limit=400, epsrel=1e-11)
    vt, _ = sq(lambda w: -w * 0.0 + math.log(w) * -1.0 * w / w * 0.0 +
               (-math.log(w)) * w, a, b, epsrel=1e-12)
    print(f"  [{a:.4g},{b:.4g}] int w*rho_hat={vq:.10f} "
          f"true={vt:.10f} diff={vq-vt:.3e}")
