#!/usr/bin/env python3
# Writes tests/data/bessel_k_oracle.csv: K0, K1, K2 at 500 complex points with
# Re z >= 0 and 1e-3 <= |z| <= 50, evaluated with mpmath at 40 digits.
import csv
import os
import random

import mpmath as mp

mp.mp.dps = 40
rng = random.Random(20240611)

pts = []
# log-uniform modulus, uniform angle in [-pi/2, pi/2]
for _ in range(380):
    r = 10 ** rng.uniform(-3, mp.log10(50))
    th = rng.uniform(-mp.pi / 2, mp.pi / 2)
    pts.append(mp.mpc(r * mp.cos(th), r * mp.sin(th)))
# imaginary axis and real axis
for _ in range(40):
    r = 10 ** rng.uniform(-3, mp.log10(50))
    pts.append(mp.mpc(0, r if rng.random() < 0.5 else -r))
for _ in range(20):
    pts.append(mp.mpc(10 ** rng.uniform(-3, mp.log10(50)), 0))
# around the series / continued-fraction switch at |z| = 2 and at |z| = 8
for rad in (2.0, 8.0):
    for _ in range(30):
        r = rad * (1 + rng.uniform(-0.02, 0.02))
        th = rng.uniform(-mp.pi / 2, mp.pi / 2)
        pts.append(mp.mpc(r * mp.cos(th), r * mp.sin(th)))

out = os.path.join(os.path.dirname(__file__), "..", "data", "bessel_k_oracle.csv")
with open(out, "w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["re_z", "im_z", "re_k0", "im_k0", "re_k1", "im_k1", "re_k2", "im_k2"])
    for z in pts:
        z = mp.mpc(float(z.real), float(z.imag))  # evaluate at the exact double input
        row = [repr(float(z.real)), repr(float(z.imag))]
        for nu in (0, 1, 2):
            k = mp.besselk(nu, z)
            row += [mp.nstr(k.real, 20), mp.nstr(k.imag, 20)]
        w.writerow(row)
print(len(pts), "points ->", out)
