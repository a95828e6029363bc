#!/usr/bin/env python3
"""Generate frozen oracle values for the C++ test suite.

Every constant pasted into tests/*.cpp is produced here by an independent
route (mpmath high-precision arithmetic, sympy symbolic integration, or a
from-scratch reference implementation).  Re-run and diff when touching the
corresponding test constants:

    python3 tools/gen_oracle_values.py
"""
import mpmath as mp
import numpy as np
import sympy as sp

mp.mp.dps = 40
M64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# 1. Counter-based RNG reference (SplitMix64 finalizer chain).
# This is the normative definition; the C++ implementation must match bit
# for bit.  Constants are the canonical SplitMix64 ones; the two output
# salts are hex digits of pi.
# ---------------------------------------------------------------------------
def smix(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def counter_hash(seed: int, stream: int, slot: int, channel: int) -> int:
    h = smix(seed & M64)
    h = smix(h ^ (stream & M64))
    h = smix(h ^ (slot & M64))
    h = smix(h ^ (channel & M64))
    return h


SALT_A = 0x243F6A8885A308D3
SALT_B = 0x13198A2E03707344


def unit_double(x: int) -> float:
    # (x >> 11) has 53 bits; +0.5 keeps the value strictly inside (0,1).
    return ((x >> 11) + 0.5) * 2.0 ** -53


def gaussian(seed, stream, slot, channel) -> float:
    h = counter_hash(seed, stream, slot, channel)
    ua = unit_double(smix(h ^ SALT_A))
    ub = unit_double(smix(h ^ SALT_B))
    import math
    return math.sqrt(-2.0 * math.log(ua)) * math.cos(2.0 * math.pi * ub)


print("== RNG reference values ==")
for args in [(42, 0, 0, 0), (42, 1, 7, 3), (123456789, 999, 123456, 15),
             (0, 0, 0, 0)]:
    print(f"counter_hash{args} = 0x{counter_hash(*args):016x}ULL")
for args in [(42, 0, 0, 0), (42, 1, 7, 3), (7, 3, 11, 2)]:
    print(f"gaussian{args} = {gaussian(*args)!r}")

# Moments over a big sample (sanity for the C++ statistical test bounds).
import math
n = 200000
vals = [gaussian(1, 0, i, j) for i in range(n // 4) for j in range(4)]
m1 = sum(vals) / len(vals)
m2 = sum(v * v for v in vals) / len(vals)
print(f"sample mean {m1:.6f} var {m2 - m1 * m1:.6f} (n={len(vals)})")


# ---------------------------------------------------------------------------
# 2. k=0 boundary-driven heat recursion: exact covariance by hand / numpy.
# Grid: N cell centers z_{j+1/2}. L0 = second difference with Dirichlet
# ghost at z=0 (ghost = -first) and homogeneous Neumann ghost at z=a
# (ghost = last).  Implicit Euler step with Neumann datum G = impulse/dt:
#   (I - dt*nu*L0) w' = w + nu*e_last*impulse/dz
# Covariance: C' = M C M^T + (sigma_eff^2 * dt) * (nu/dz)^2 * (M e)(M e)^T.
# ---------------------------------------------------------------------------
def heat_matrix(N, a, nu, dt):
    dz = a / N
    L = np.zeros((N, N))
    for j in range(N):
        if j > 0:
            L[j, j - 1] = 1.0
        if j + 1 < N:
            L[j, j + 1] = 1.0
        L[j, j] = -2.0
    L[0, 0] = -3.0          # Dirichlet ghost: w(-1/2) = -w(1/2)
    L[N - 1, N - 1] = -1.0  # Neumann ghost:   w(N+1/2) = w(N-1/2)
    L /= dz * dz
    M = np.linalg.inv(np.eye(N) - dt * nu * L)
    return L, M, dz


def ou_variance(N, a, nu, dt, nsteps, sigma):
    _, M, dz = heat_matrix(N, a, nu, dt)
    e = np.zeros(N)
    e[-1] = 1.0
    d = M @ e * (nu / dz)
    C = np.zeros((N, N))
    for _ in range(nsteps):
        C = M @ C @ M.T + (sigma ** 2 * dt) * np.outer(d, d)
    return C


print("\n== k=0 covariance oracle ==")
# Hand case: N=2, a=1, nu=1, dt=0.1, sigma=1, one step; top-center variance.
r = mp.mpf("0.1") / mp.mpf("0.25")           # dt/dz^2
det = 1 + 4 * r + 2 * r * r
var_hand = (mp.mpf("0.1") / mp.mpf("0.25")) * ((1 + 3 * r) / det) ** 2
print(f"hand N=2 one-step top var = {mp.nstr(var_hand, 20)}")
C = ou_variance(2, 1.0, 1.0, 0.1, 1, 1.0)
print(f"numpy same                = {C[1, 1]!r}")

# Frozen regression case: N=8, a=1, nu=1, dt=0.05, 5 steps, sigma=0.3.
C = ou_variance(8, 1.0, 1.0, 0.05, 5, 0.3)
print(f"N=8 dt=0.05 5 steps sigma=0.3: var(top center) = {C[7, 7]!r}")
print(f"                               var(center 4)   = {C[4, 4]!r}")


# ---------------------------------------------------------------------------
# 3. Analytic mode-k Neumann map (steady Stokes, shear datum at z=a).
# Streamfunction ansatz psi(z) = (A+Bz)e^{kz} + (C+Dz)e^{-kz},
# u1 = psi', u2-coefficient = -ik psi; boundary conditions
# psi(0)=0, psi'(0)=0, psi(a)=0, psi''(a)=ghat.
# For the physical datum g = cos(kx): u1 = psi'(z) cos(kx) with ghat = 1
# applied to the half-coefficient... we freeze the *coefficient* problem
# with ghat = 1 and assemble physical-field norms for g = cos(kx) via
#   u1(x,z) = psi'(z) cos(kx),  u2(x,z) = k psi(z) sin(kx)
# where psi solves the ghat=1 problem (linearity: each half-mode carries
# ghat=1/2, and the cos/sin assembly doubles it back).
# ---------------------------------------------------------------------------
def neumann_psi(k, a, ghat):
    k = mp.mpf(k); a = mp.mpf(a)
    ek = mp.e ** (k * a); emk = mp.e ** (-k * a)
    # rows: psi(0), psi'(0), psi(a), psi''(a) on coeffs (A,B,C,D)
    Mx = mp.matrix([
        [1, 0, 1, 0],
        [k, 1, -k, 1],
        [ek, a * ek, emk, a * emk],
        [k * k * ek, (2 * k + k * k * a) * ek,
         k * k * emk, (-2 * k + k * k * a) * emk],
    ])
    rhs = mp.matrix([0, 0, 0, ghat])
    A, B, Cc, D = mp.lu_solve(Mx, rhs)

    def psi(z):
        z = mp.mpf(z)
        return (A + B * z) * mp.e ** (k * z) + (Cc + D * z) * mp.e ** (-k * z)

    def dpsi(z, order=1):
        return mp.diff(psi, mp.mpf(z), order)

    return psi, dpsi


print("\n== analytic Neumann map, k=3, a=1, ghat=1 ==")
k, a = 3, 1
psi, dpsi = neumann_psi(k, a, 1)
for z in ["0.2578125", "0.5078125", "0.7578125"]:   # centers of N_z=64 grid
    print(f"u1_coef(z={z}) = psi'({z}) = {mp.nstr(dpsi(z, 1), 18)}")
for z in ["0.25", "0.5", "0.75"]:
    print(f"psi(z={z}) = {mp.nstr(psi(z), 18)}  (u2 = k*psi*sin(kx))")
print(f"dz_u1 at a: psi''(a) = {mp.nstr(dpsi(a, 2), 18)} (should be 1)")
print(f"u1 at 0:    psi'(0)  = {mp.nstr(dpsi(0, 1), 18)} (should be 0)")

# Physical-field norms for g = cos(3x): integrals over x give pi.
I_p2 = mp.quad(lambda z: dpsi(z, 1) ** 2, [0, a])
I_psi2 = mp.quad(lambda z: psi(z) ** 2, [0, a])
I_pp2 = mp.quad(lambda z: dpsi(z, 2) ** 2, [0, a])
L2sq = mp.pi * (I_p2 + k * k * I_psi2)
# grad: dx_u1 = -k psi' sin, dz_u1 = psi'' cos, dx_u2 = k^2 psi cos,
#       dz_u2 = k psi' sin
gradsq = mp.pi * (k * k * I_p2 + I_pp2 + k ** 4 * I_psi2 + k * k * I_p2)
print(f"||u||_L2^2   = {mp.nstr(L2sq, 18)}")
print(f"||grad u||^2 = {mp.nstr(gradsq, 18)}")
print(f"||u||_H1     = {mp.nstr(mp.sqrt(L2sq + gradsq), 18)}")


# ---------------------------------------------------------------------------
# 4. Trilinear form on closed-form fields (sympy, exact).
# u = curl^perp(cos x * eta),   eta = z^2 (a-z)^2
# v = curl^perp(sin 2x * theta), theta = z^2 (a-z)
# w1 = cos x * z(a - z/2),  w2 = sin x * z^2 (a-z)    (a = 1)
# curl^perp(psi) = (dz psi, -dx psi).
# b(u,v,w) = int (u . grad v) . w ;  also b(u,w,v) for the skew form.
# ---------------------------------------------------------------------------
print("\n== trilinear form oracle (sympy) ==")
x, z = sp.symbols("x z", real=True)
aa = 1
eta = z ** 2 * (aa - z) ** 2
theta = z ** 2 * (aa - z)
psi_u = sp.cos(x) * eta
psi_v = sp.sin(2 * x) * theta
u1, u2 = sp.diff(psi_u, z), -sp.diff(psi_u, x)
v1, v2 = sp.diff(psi_v, z), -sp.diff(psi_v, x)
w1 = sp.cos(x) * z * (aa - z / sp.Integer(2))
w2 = sp.sin(x) * z ** 2 * (aa - z)


def b_form(a1, a2, b1, b2, c1, c2):
    integrand = ((a1 * sp.diff(b1, x) + a2 * sp.diff(b1, z)) * c1 +
                 (a1 * sp.diff(b2, x) + a2 * sp.diff(b2, z)) * c2)
    return sp.integrate(sp.integrate(integrand, (x, 0, 2 * sp.pi)),
                        (z, 0, aa))


b_uvw = sp.simplify(b_form(u1, u2, v1, v2, w1, w2))
b_uwv = sp.simplify(b_form(u1, u2, w1, w2, v1, v2))
print(f"b(u,v,w) = {b_uvw} = {sp.N(b_uvw, 20)}")
print(f"b(u,w,v) = {b_uwv} = {sp.N(b_uwv, 20)}")
print(f"skew     = {sp.N((b_uvw - b_uwv) / 2, 20)}")
# closures the discrete fields need: dz u1, dz w1 at z=a
print(f"u top shear coef (cos x): {sp.simplify(sp.diff(u1, z).subs(z, aa))}")
print(f"v top shear coef (sin 2x): {sp.simplify(sp.diff(v1, z).subs(z, aa))}")
print(f"w top shear coef (cos x): {sp.simplify(sp.diff(w1, z).subs(z, aa))}")

# L4 norm of w (for the quartic-norm quadrature checks):  ||w||_L4^4
w4 = sp.integrate(sp.integrate((w1 ** 2 + w2 ** 2) ** 2,
                               (x, 0, 2 * sp.pi)), (z, 0, aa))
print(f"||w||_L4^4 = {sp.N(w4, 20)}")


# ---------------------------------------------------------------------------
# 5. Misc closed forms.
# ---------------------------------------------------------------------------
print("\n== misc constants ==")
print(f"sqrt(2*pi)        = {mp.nstr(mp.sqrt(2 * mp.pi), 20)}")
print(f"sqrt(pi)          = {mp.nstr(mp.sqrt(mp.pi), 20)}")
print(f"(3*pi/4)^(1/4)    = {mp.nstr((3 * mp.pi / 4) ** mp.mpf('0.25'), 20)} "
      f" (= ||cos||_L4(T))")
print(f"0.5*sqrt(pi)      = {mp.nstr(mp.sqrt(mp.pi) / 2, 20)} "
      f" (= 2^{{-1}} ||cos 3x||_L2, Besov s=-1/2 block m=2)")
# midpoint rule for int_0^1 z^2 on N=8 cells: a^3/3 - a*dz^2/12
print(f"midpoint z^2 N=8  = {mp.nstr(mp.mpf(1) / 3 - mp.mpf(1) / (12 * 64), 20)}")
# trapezoid on nodes for z^2, N=8 intervals: a^3/3 + a*dz^2/6
print(f"trapezoid z^2 N=8 = {mp.nstr(mp.mpf(1) / 3 + mp.mpf(1) / (6 * 64), 20)}")
