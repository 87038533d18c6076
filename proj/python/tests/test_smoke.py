import numpy as np
import pytest
import scipy.sparse as sp

import twophase

SMALL = """[grid]
nx = 6
nz = 4
lx = 3 m
lz = 2 m
gravity = z

[capillary]
model = linear
p0 = 1e5 Pa

[bc:inlet]
side = xmin
cells = * * 3:3
type = neumann
rate = 0.05 m3/day
s_w = 1.0

[bc:outlet]
side = xmax
cells = * * 0:0
type = dirichlet
p_w = 1e5 Pa
s_w = 0.2

[time]
dt = 2 days
t_final = 4 days
"""


def test_load_and_round_trip(scenario_dir):
    s = twophase.load_scenario(scenario_dir / "gravity_diffusion_20.cfg")
    assert s.shape == (20, 1, 20)
    assert s.num_cells == 400
    assert s.method == "bf"
    assert twophase.parse_scenario(s.to_config()) == s


def test_parse_errors():
    with pytest.raises(twophase.ParseError):
        twophase.parse_scenario("[grid]\nnx = four\n")
    with pytest.raises(twophase.ValidationError):
        twophase.parse_scenario(SMALL.replace("dt = 2 days", "dt = -2 days"))


def test_methods_share_newton_iterations():
    s = twophase.parse_scenario(SMALL)
    runs = {m: twophase.run(s, m) for m in ("bf", "cpr-amg1", "cpr-amg2", "exact")}
    ni = {r["NI"] for r in runs.values()}
    assert all(r["converged"] for r in runs.values())
    assert len(ni) == 1
    r = runs["bf"]
    assert r["LI"] == sum(st["linear_iterations"] for st in r["steps"])
    assert r["p_w"].shape == (24,)
    assert np.all((r["s_n"] >= 0) & (r["s_n"] <= 1))
    with pytest.raises(twophase.ValidationError):
        twophase.run(s, "jacobi")


def test_jacobian_matches_finite_differences():
    s = twophase.parse_scenario(SMALL)
    n = s.num_cells
    rng = np.random.default_rng(3)
    p_old, s_old = np.full(n, 1e5), np.full(n, 0.8)
    p = p_old + 1e3 * rng.random(n)
    sn = 0.5 + 0.3 * rng.random(n)
    j = twophase.to_scipy(twophase.jacobian(s, p, sn, p_old, s_old)).toarray()
    assert j.shape == (2 * n, 2 * n)
    u = np.concatenate([p, sn])
    fd = np.empty_like(j)
    for c in range(2 * n):
        h = 1e-6 * (1 + abs(u[c]))
        up, dn = u.copy(), u.copy()
        up[c] += h
        dn[c] -= h
        rp = twophase.residual(s, up[:n], up[n:], p_old, s_old)
        rm = twophase.residual(s, dn[:n], dn[n:], p_old, s_old)
        fd[:, c] = (rp - rm) / (2 * h)
    scale = np.abs(j).max(axis=0)
    assert np.max(np.abs(j - fd).max(axis=0) / scale) < 1e-5


def test_amg_on_poisson():
    m = 32
    lap = sp.diags([-1, 2, -1], [-1, 0, 1], shape=(m, m))
    a = (sp.kron(sp.identity(m), lap) + sp.kron(lap, sp.identity(m))).tocsr()
    a.sort_indices()
    b = np.sin(np.arange(m * m))
    r = twophase.amg_solve(a.indptr, a.indices, a.data, b)
    assert r["converged"]
    assert r["iterations"] <= 12
    assert np.linalg.norm(b - a @ r["x"]) <= 1e-9 * np.linalg.norm(b)


def test_exact_preconditioner_spectrum_is_one():
    s = twophase.parse_scenario(SMALL)
    ev = twophase.spectrum(s, 0, "exact")
    assert len(ev) == 48
    assert np.allclose(ev, 1.0, atol=1e-8)
    bf = twophase.spectrum(s, 0, "bf")
    assert abs(bf[0]) <= abs(bf[-1])


def test_harmonic_mean():
    assert twophase.harmonic_face_permeability(1e-15, 1e-15, 1.0, 1.0) == pytest.approx(1e-15)
