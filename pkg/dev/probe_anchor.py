import importlib.util
import math
import sys
import types

import numpy as np

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

G = D.UniformLaw(1.0)
spec2 = C.GridSpec(nodes=1024, eps_lo=1e-5)
x_lo, x_hi, hi = C._product_anchors(G, G, spec2)
print("anchors:", x_lo, x_hi, hi, " d_hi:", -math.log(x_hi))

probe = C._product_nodes(x_lo, x_hi, hi, C.GridSpec(
    nodes=96, eps_lo=spec2.eps_lo, eps_hi=spec2.eps_hi))
print("probe range:", probe[0], probe[-1], " n:", len(probe))
qp = C.QuadratureSpec(rel_tol=1e-6)
pv = np.asarray([C.product_tail(G, G, xi, qp) for xi in probe])
sf2 = lambda t: 1.0 - t + t * math.log(t)
exact = np.asarray([math.log(sf2(t)) if sf2(t) > 0 else -np.inf
                    for t in probe])
bad = np.abs(pv - exact) > 1e-4 * np.abs(exact)
print("probe mismatches:", np.count_nonzero(bad))
for i in np.nonzero(bad)[0][:12]:
    print(f"  t={probe[i]!r} d={-math.log(probe[i]):.3e} got={pv[i]:.6f} "
          f"want={exact[i]:.6f}")
tail_t = math.log(spec2.eps_hi)
below = np.nonzero(pv <= tail_t)[0]
print("tail threshold:", tail_t, " below idx:", below[:5],
      " chosen x_hi:", probe[below[0]] if below.size else None,
      " d:", -math.log(probe[below[0]]) if below.size else None)
