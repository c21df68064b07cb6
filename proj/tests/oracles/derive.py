"""Independent oracle values frozen into the C++ tests.

Run: python3 tests/oracles/derive.py
Uses sympy/mpmath only; nothing here shares code with the library.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 50
t = sp.symbols("t")


def bisect(fn, lo, hi, iters=200):
    flo = fn(lo)
    for _ in range(iters):
        mid = (lo + hi) / 2
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def show(name, value):
    print(f"{name} = {mp.nstr(mp.mpf(value), 17)}")


# Fields
def ml(x, y, z, fm=6, a=mp.mpf("0.25")):
    r = mp.sqrt(x * x + y * y)
    rho = mp.cos(2 * mp.pi * fm * mp.cos(mp.pi * r / 2))
    return (1 - mp.sin(mp.pi * z / 2) + a * (1 + rho)) / (2 * (1 + a))


show("ml(0,0,1)", ml(0, 0, 1))
p = (mp.mpf("0.3"), mp.mpf("-0.2"), mp.mpf("0.4"))
show("ml(0.3,-0.2,0.4)", ml(*p))
x, y, z = p
show("tangle(0.3,-0.2,0.4)", x**4 + y**4 + z**4 - (x**2 + y**2 + z**2 - mp.mpf("0.4")))
show("teardrop(0.3,-0.2,0.4)", mp.mpf("0.5") * x**5 + mp.mpf("0.5") * x**4 - y**2 - z**2)
show("torus(0.3,-0.2,0.4)", (mp.mpf("0.3") - mp.sqrt(x * x + y * y)) ** 2 + z * z - mp.mpf("0.1") ** 2)
s = x + y + z + 1
show("tubey(0.3,-0.2,0.4)",
     -3 * x**8 - 3 * y**8 - 2 * z**8 + 5 * x**4 * y**2 * z**2 + 3 * x**2 * y**4 * z**2
     - 4 * (x**3 + y**3 + z**3 + 1) + s**4 + 1)

# Divided difference == leading coefficient of the interpolating polynomial.
pts = [(sp.Rational(-1, 2), sp.Rational(13, 10)), (sp.Rational(1, 4), sp.Rational(-7, 10)),
       (sp.Rational(11, 10), sp.Rational(29, 10)), (sp.Integer(2), sp.Rational(2, 5))]
poly = sp.Poly(sp.interpolate(pts, t), t)
show("divdiff4", sp.N(poly.LC(), 40))

# Cubic crossing: root in [0, 1] of the cubic through f(-1..2).
x0, h = mp.mpf("0.3"), mp.mpf("0.2")
vals = [mp.sin(x0 + h * m) for m in (-1, 0, 1, 2)]
k = mp.sin(mp.mpf("0.37"))
cub = sp.interpolate([(m, sp.Float(str(v), 40)) for m, v in zip((-1, 0, 1, 2), vals)], t)
fc = sp.lambdify(t, cub - sp.Float(str(k), 40), "mpmath")
show("cubic_alpha_sin", bisect(fc, mp.mpf(0), mp.mpf(1)))
show("true_alpha_sin", (mp.mpf("0.37") - x0) / h)

# x^3 stencil, k = 1/8.
show("cubic_alpha_x3", bisect(lambda a: a**3 - mp.mpf(1) / 8, mp.mpf(0), mp.mpf(1)))

# WENO on the same sin data with a 7-point window.
w7 = [mp.sin(x0 + h * m) for m in range(-3, 4)]
fm2, fm1, f0, f1, f2 = w7[1:6]
b1 = mp.mpf(13) / 12 * (fm2 - 2 * fm1 + f0) ** 2 + mp.mpf(1) / 4 * (fm2 - 4 * fm1 + 3 * f0) ** 2
b2 = mp.mpf(13) / 12 * (fm1 - 2 * f0 + f1) ** 2 + mp.mpf(1) / 4 * (fm1 - f1) ** 2
b3 = mp.mpf(13) / 12 * (f0 - 2 * f1 + f2) ** 2 + mp.mpf(1) / 4 * (3 * f0 - 4 * f1 + f2) ** 2
g = [mp.mpf(1) / 10, mp.mpf(3) / 5, mp.mpf(3) / 10]
eps = mp.mpf("1e-6")
al = [g[j] / (eps + b) ** 2 for j, b in enumerate((b1, b2, b3))]
ws = [a / sum(al) for a in al]
for j in range(3):
    show(f"weno_beta{j + 1}", (b1, b2, b3)[j])
    show(f"weno_w{j + 1}", ws[j])
subs = []
for j in range(3):
    nodes = list(range(j - 3, j + 2))
    subs.append(sp.interpolate([(m, sp.Float(str(w7[m + 3]), 40)) for m in nodes], t))
combo = sum(sp.Float(str(ws[j]), 40) * subs[j] for j in range(3))
fw = sp.lambdify(t, combo - sp.Float(str(k), 40), "mpmath")
show("weno_alpha_sin", bisect(fw, mp.mpf(0), mp.mpf(1)))

# Error estimate on the sin stencil with the linear alpha.
a_lin = (k - vals[1]) / (vals[2] - vals[1])
u1 = (vals[2] - vals[1]) / h
um = (vals[2] - 2 * vals[1] + vals[0]) / (2 * h * h)
up = (vals[3] - 2 * vals[2] + vals[1]) / (2 * h * h)
ratio = max(abs(um), abs(up)) / abs(u1)
show("err_alpha_lin_sin", a_lin)
show("err_approx_sin", ratio * a_lin * (1 - a_lin) * h * h)
show("err_bound_sin", ratio * h * h)
