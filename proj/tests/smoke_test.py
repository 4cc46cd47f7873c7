"""Quick import-and-sanity pass over the python bindings."""

import numpy as np

import fracgrad as fg


def rel_err(got, want):
    scale = max(1.0, float(np.max(np.abs(want))))
    return float(np.max(np.abs(got - want))) / scale


def main():
    n, L = 64, 1.0
    x = np.arange(n) / n * L

    # Eigenfunction of the fractional Laplacian.
    f = np.sin(2.0 * np.pi * 3.0 * x)
    lam = (2.0 * np.pi * 3.0) ** 1.2
    assert rel_err(fg.frac_laplacian(f, L, 1.2), lam * f) < 1e-11 * lam

    # Composition: D(I_{1-s} u) recovers D^s u.
    s = 0.6
    u = fg.random_band_limited(1, n, L, 8, 7)
    dv = fg.frac_gradient(fg.lift(u, L, s), L, 1.0)
    dsu = fg.frac_gradient(u, L, s)
    assert dsu.shape == (1, n)
    assert rel_err(dv, dsu) < 1e-11

    # Duality between the fractional gradient and divergence.
    w = fg.random_band_limited(1, n, L, 8, 9)
    gw = fg.frac_gradient(w, L, 0.5)
    du = fg.frac_gradient(u, L, 0.5)
    h = L / n
    lhs = h * float(np.sum(du * gw))
    rhs = -h * float(np.sum(u * fg.frac_divergence(gw, L, 0.5)))
    assert abs(lhs - rhs) < 1e-11

    # p = 2: gradient descent lands on the linear solver's answer.
    g = np.sin(2.0 * np.pi * x)
    boxes = dict(
        omega_lo=[0.20], omega_hi=[0.80],
        omega2_lo=[0.30], omega2_hi=[0.70],
        omega1_lo=[0.40], omega1_hi=[0.60],
    )
    u1, info1 = fg.solve(g, L, s=0.5, p=2.0, tol=1e-11, **boxes)
    u2, info2 = fg.solve(g, L, s=0.5, p=2.0, linear=True, **boxes)
    assert info1["converged"] and info2["converged"]
    assert float(np.max(np.abs(u1 - u2))) < 1e-8
    e = fg.p_energy(u2, L, 0.5, 2.0)
    assert np.isfinite(e) and e >= 0.0
    assert fg.hsp_seminorm(u2, L, 0.5, 2.0) >= 0.0

    # Holder exponent of a square-root cusp.
    n2 = 512
    x2 = np.arange(n2) / n2
    f2 = np.abs(np.sin(np.pi * (x2 - 0.5))) ** 0.5
    region = (x2 >= 0.45) & (x2 < 0.55)
    est = fg.estimate_holder(f2, 1.0, region, [0.1, 0.05, 0.025, 0.0125])
    assert 0.4 <= est["exponent"] <= 0.6, est
    assert est["fit_quality"] >= 0.9, est

    # Validation errors surface as ValueError.
    try:
        fg.frac_laplacian(f, L, 3.0)
    except ValueError:
        pass
    else:
        raise AssertionError("sigma = 3 should have been rejected")

    print("smoke ok")


if __name__ == "__main__":
    main()
