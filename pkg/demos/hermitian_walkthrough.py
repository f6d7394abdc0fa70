"""Walk through the hermitian Cauchy formula on the unit sphere in R^4.

Builds g = z1 z2 f1+ f2+ I, checks that it is hermitian monogenic, then compares
the boundary integral with g at an interior point, the Martinelli-Bochner value of
F = z1 z2, and the quadrature convergence of the euclidean formula.

Run with ``python3 demos/hermitian_walkthrough.py``.
"""
import numpy as np

from cliffcauchy import cif_engine as ce
from cliffcauchy.boundary import SurfaceDomain

dom = SurfaceDomain.unit(4)
x = np.array([0.3, -0.2, 0.1, 0.2])

fx = ce.test_function({"kind": "holomorphic-top", "F": [{"z": [1, 1]}]})
print("fixture framework:", fx.framework)
print("monogenicity residuals:", {k: f"{v:.1e}" for k, v in fx.residuals.items()})

for q in (8, 16, 24):
    out = ce.cif_hermitian(fx.field, dom, x, q)
    print(f"q={q:2d}", " ".join(f"{k}={v:.2e}" for k, v in out["residuals"].items()))

z = x[0::2] + 1j * x[1::2]
F = ce.complex_polynomial(4, [{"z": [1, 1]}])
mb = ce.martinelli_bochner(F, dom, z, 24)
print(f"Martinelli-Bochner {mb['value']:.12f}  F(z) {mb['F(z)']:.12f}  "
      f"hermitian top coefficient {mb['hermitian_coefficient']:.12f}")

kernel = ce.test_function({"kind": "shifted-euclidean-kernel", "a": [2 ** 0.5, 2 ** 0.5, 0, 0]}).field
for q in (8, 16, 24, 32):
    r = max(ce.cif_euclidean(kernel, dom, p, q)["residual"] for p in ce.probe_lattice(dom))
    print(f"euclidean formula, q={q:2d}: max residual over 13 probes {r:.2e}")

hil = ce.hilbert_transform(ce.test_function({"kind": "unit"}).field, dom, np.array([1, 1, 1, -1]) / 2, 16)
print(f"H[1] scalar part at a boundary point: {hil['value'][0].real:.5f}")
