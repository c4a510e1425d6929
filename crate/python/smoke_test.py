"""Smoke test for the blockess_py extension.

Build and install with `maturin develop -m crates/python/Cargo.toml`, or put
the compiled library on the path as blockess_py.so.
"""

import math

import blockess_py as be


def close(a, b, tol=1e-9):
    return math.isclose(a, b, rel_tol=tol)


model = be.CorrelationModel("ar1:rho=0.6")
assert model.rho == 0.6 and model.family == "ar1"
assert close(be.ess_full(model, n=900), 225.75)
assert close(be.ess_full_ar1(900, 0.6), 225.75)

rw = be.Blocking("rw:m=30", n=900)
cw = be.Blocking("cw:m=30", n=900)
assert len(rw) == 30 and rw.blocks()[0] == list(range(30))
assert cw.blocks()[0][:3] == [0, 30, 60]
assert f"{be.efficiency(model, rw):.3f}" == "0.961"
assert f"{be.efficiency(model, cw):.3f}" == "0.999"
assert close(be.ess_block(model, rw), be.ess_row_ar1(900, 30, 30, 0.6))

y = be.y_vector(5, 0.5)
assert close(sum(y), be.ess_full_ar1(5, 0.5))

rho, diff = be.max_diff(be.CorrelationModel.ar1(0.5), be.Blocking("rw:m=30", n=900))
assert f"{diff:.3f}" == "9.366", diff

grid_model = be.CorrelationModel.matern_l2_three_half(0.7)
b2d = be.Blocking("cw2d:m1=3,m2=3", grid=(18, 12))
assert 0.0 < be.efficiency(grid_model, b2d, grid=(18, 12)) <= 1.0

try:
    be.CorrelationModel("ar1:rho=1.5")
except ValueError:
    pass
else:
    raise AssertionError("rho out of range accepted")

rows = be.table2(52.0)
assert len(rows) == 27 and all(r["gain"] > -100 for r in rows)

print("smoke test passed")
