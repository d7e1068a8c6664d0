"""Reference values frozen into the unit tests.

Independent of the C++ library: mpmath for closed forms and root finding,
scipy DOP853 for the radial ODE. Run with `python3 freeze.py`.
"""
import numpy as np
from mpmath import mp, mpf, pi, sin, cbrt, gamma, findroot, matrix, sqrt
from scipy.integrate import solve_ivp, quad

mp.dps = 30
G = 1 / (4 * pi)


def potential(pts, m):
    u = mpf(0)
    for i in range(len(m)):
        for j in range(i + 1, len(m)):
            dx, dy = pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]
            u += G * m[i] * m[j] / sqrt(dx * dx + dy * dy)
    return u + sum(mpf(m[i]) / 2 * (pts[i][0] ** 2 + pts[i][1] ** 2) for i in range(len(m)))


def grad(pts, m):
    g = []
    for i in range(len(m)):
        gx, gy = m[i] * pts[i][0], m[i] * pts[i][1]
        for j in range(len(m)):
            if i == j:
                continue
            dx, dy = pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]
            r3 = sqrt(dx * dx + dy * dy) ** 3
            gx -= G * m[i] * m[j] * dx / r3
            gy -= G * m[i] * m[j] * dy / r3
        g += [gx, gy]
    return g


def show(name, v):
    print(f"{name} = {mp.nstr(v, 17)}")


# generic configuration
pts = [(mpf("0.3"), mpf("-0.1")), (mpf("-0.5"), mpf("0.4")), (mpf("0.2"), mpf("0.7"))]
m = [1, 2, 3]
show("V_generic", potential(pts, m))
print("grad_generic =", [mp.nstr(x, 17) for x in grad(pts, m)])

# polygon sums and radii (m = 1)
for n in (3, 4, 5, 7):
    a = sum(1 / sin(pi * j / n) for j in range(1, n)) / 2
    show(f"a_{n}", a)
    show(f"polygon_r_{n}", cbrt(a / (8 * pi)))

# ring of 4 unit masses around a central mass 2: ring force balance
a4 = sum(1 / sin(pi * j / 4) for j in range(1, 4)) / 2
show("ring4_center2_r", cbrt((a4 / 2 + 2) / (4 * pi)))

# Moulton (1,2,3) in index order on the x axis
def moulton_res(x0, x1, x2):
    p = [(x0, 0), (x1, 0), (x2, 0)]
    g = grad(p, [1, 2, 3])
    return [g[0], g[2], g[4]]
sol = findroot(moulton_res, (mpf(-1), mpf(-0.2), mpf(0.6)))
print("moulton_123 =", [mp.nstr(x, 17) for x in sol])
show("moulton_123_V", potential([(sol[0], 0), (sol[1], 0), (sol[2], 0)], [1, 2, 3]))

# reduced Hessian spectra on the normalized manifold by finite differences of
# U along normalize(q + B t), with B a mass-orthonormal complement of
# translations, dilation and rotation built by Gram-Schmidt.
def interaction(q, m):
    u = mpf(0)
    for i in range(len(m)):
        for j in range(i + 1, len(m)):
            u += G * m[i] * m[j] / sqrt((q[2*i]-q[2*j])**2 + (q[2*i+1]-q[2*j+1])**2)
    return u


def reduced_spectrum(pts, m):
    n = len(m)
    cx = sum(m[i] * pts[i][0] for i in range(n)) / sum(m)
    cy = sum(m[i] * pts[i][1] for i in range(n)) / sum(m)
    q = [c for p in pts for c in (p[0] - cx, p[1] - cy)]
    s = sqrt(sum(mpf(m[i]) / 2 * (q[2*i]**2 + q[2*i+1]**2) for i in range(n)))
    q = [x / s for x in q]
    w = [m[i // 2] for i in range(2 * n)]
    ip = lambda a, b: sum(w[k] * a[k] * b[k] for k in range(2 * n))
    span = [[1 if k % 2 == 0 else 0 for k in range(2 * n)],
            [1 if k % 2 == 1 else 0 for k in range(2 * n)],
            q[:],
            [(-q[k + 1] if k % 2 == 0 else q[k - 1]) for k in range(2 * n)]]
    span += [[1 if k == e else 0 for k in range(2 * n)] for e in range(2 * n)]
    basis = []
    for v in span:
        v = [mpf(x) for x in v]
        for b in basis:
            c = ip(v, b)
            v = [v[k] - c * b[k] for k in range(2 * n)]
        nv = sqrt(ip(v, v))
        if nv > mpf("1e-12"):
            basis.append([x / nv for x in v])
    tang = basis[4:]
    d = len(tang)

    def f(t):
        x = [q[k] + sum(t[j] * tang[j][k] for j in range(d)) for k in range(2 * n)]
        sc = sqrt(sum(mpf(m[i]) / 2 * (x[2*i]**2 + x[2*i+1]**2) for i in range(n)))
        return interaction([y / sc for y in x], m)

    h = mpf("1e-8")
    H = matrix(d, d)
    for i in range(d):
        for j in range(d):
            def e(a, b):
                t = [mpf(0)] * d
                t[i] += a * h
                t[j] += b * h
                return f(t)
            H[i, j] = (e(1, 1) - e(1, -1) - e(-1, 1) + e(-1, -1)) / (4 * h * h)
    ev = mp.eigsy(H)[0]
    return sorted([ev[k] for k in range(d)])


mp.dps = 40
d3 = cbrt(mpf(5) / (16 * pi))
print("euler_equal_spectrum =", [mp.nstr(x, 12) for x in reduced_spectrum([(-d3, 0), (0, 0), (d3, 0)], [1, 1, 1])])
s = cbrt(mpf(6) / (4 * pi))
lag = [(0, 0), (s, 0), (s / 2, s * sqrt(3) / 2)]
print("lagrange_123_spectrum =", [mp.nstr(x, 12) for x in reduced_spectrum(lag, [1, 2, 3])])
mp.dps = 30

# kinetic normalisation constant
for q in (mpf("1.5"), mpf(2), mpf(3)):
    b = q / (q - 1)
    show(f"kappa_{q}", (2 * pi) ** mpf("1.5") * gamma(b) / gamma(mpf("1.5") + b))

# radial cell problem by scipy DOP853
for p in (1.5, 2.0, 2.5, 3.5, 4.0):
    def rhs(r, y):
        z, dz, ig, ing = y
        zp = max(z, 0.0)
        return [dz, -2 * dz / r - zp ** p, r * r * dz * dz, r * r * zp ** (p + 1)]
    r1 = 1e-6
    y1 = [1 - r1 * r1 / 6, -r1 / 3, 0.0, 0.0]
    ev = lambda r, y: y[0]
    ev.terminal = True
    ev.direction = -1
    sol = solve_ivp(rhs, (r1, 100), y1, method="DOP853", rtol=1e-13, atol=1e-15, events=ev)
    r0 = sol.t_events[0][0]
    z, s0, ig, ing = sol.y_events[0][0]
    a = 1 / (r0 * abs(s0))
    k = a ** ((p - 1) / 2)
    R = r0 / k
    mstar = 4 * np.pi * R
    grad_e = 4 * np.pi * a * a * ig / k + mstar * mstar / (4 * np.pi * R)
    nonlin = 4 * np.pi * a ** (p + 1) * k ** -3 * ing
    estar = 0.5 * grad_e - nonlin / (p + 1)
    print(f"cell p={p}: w0={1 + a:.15g} R={R:.15g} m_star={mstar:.15g} e_star={estar:.15g}")
