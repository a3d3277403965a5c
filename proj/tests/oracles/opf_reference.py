"""Reference AC-OPF solve for a MATPOWER-style case with SciPy (SLSQP).

Independent of the C++ code: flows are written inline from the pi-model and
inequality limits are passed to the NLP solver directly. Used to freeze the
reference objective asserted by the acceptance suite.

    python3 tests/oracles/opf_reference.py data/case9.m
"""
import re
import sys

import numpy as np
from scipy.optimize import minimize


def section(text, name):
    m = re.search(r"mpc\." + name + r"\s*=\s*\[(.*?)\];", text, re.S)
    rows = []
    for line in m.group(1).splitlines():
        line = line.split("%")[0].strip().rstrip(";")
        if line:
            rows.append([float(t) for t in line.split()])
    return np.array(rows)


def load(path):
    text = open(path).read()
    base = float(re.search(r"mpc\.baseMVA\s*=\s*([0-9.eE+-]+)", text).group(1))
    return base, section(text, "bus"), section(text, "gen"), section(text, "branch"), section(text, "gencost")


def solve(path, restarts=20, seed=0):
    base, bus, gen, br, cost = load(path)
    nb, ng = len(bus), len(gen)
    idx = {int(b): i for i, b in enumerate(bus[:, 0])}
    ref = [i for i in range(nb) if int(bus[i, 1]) == 3][0]
    y = 1.0 / (br[:, 2] + 1j * br[:, 3])
    g, b, bc = y.real, y.imag, br[:, 4]
    f = np.array([idx[int(v)] for v in br[:, 0]])
    t = np.array([idx[int(v)] for v in br[:, 1]])
    smax = br[:, 5] / base
    pd, qd = bus[:, 2] / base, bus[:, 3] / base
    gs, bs = bus[:, 4] / base, bus[:, 5] / base
    gb = np.array([idx[int(v)] for v in gen[:, 0]])

    def unpack(z):
        return z[:nb], z[nb:2 * nb], z[2 * nb:2 * nb + ng], z[2 * nb + ng:]

    def flows(v, th, a, c):
        d = th[a] - th[c]
        p = g * v[a] ** 2 - v[a] * v[c] * (g * np.cos(d) + b * np.sin(d))
        q = -(b + bc / 2) * v[a] ** 2 - v[a] * v[c] * (g * np.sin(d) - b * np.cos(d))
        return p, q

    def obj(z):
        pg = unpack(z)[2] * base
        return float(np.sum(cost[:, 4] * pg ** 2 + cost[:, 5] * pg + cost[:, 6]))

    def balance(z):
        v, th, pg, qg = unpack(z)
        pf, qf = flows(v, th, f, t)
        pt, qt = flows(v, th, t, f)
        P = -pd - gs * v ** 2
        Q = -qd + bs * v ** 2
        np.add.at(P, gb, pg)
        np.add.at(Q, gb, qg)
        np.add.at(P, f, -pf)
        np.add.at(P, t, -pt)
        np.add.at(Q, f, -qf)
        np.add.at(Q, t, -qt)
        return np.concatenate([P, Q, [th[ref]]])

    def limits(z):
        v, th, _, _ = unpack(z)
        pf, qf = flows(v, th, f, t)
        pt, qt = flows(v, th, t, f)
        return np.concatenate([smax ** 2 - pf ** 2 - qf ** 2, smax ** 2 - pt ** 2 - qt ** 2])

    bounds = ([(lo, hi) for lo, hi in zip(bus[:, 12], bus[:, 11])]
              + [(None, None)] * nb
              + [(lo / base, hi / base) for lo, hi in zip(gen[:, 9], gen[:, 8])]
              + [(lo / base, hi / base) for lo, hi in zip(gen[:, 4], gen[:, 3])])
    rng = np.random.default_rng(seed)
    best = None
    for k in range(restarts):
        z0 = np.concatenate([np.ones(nb), np.zeros(nb), (gen[:, 8] + gen[:, 9]) / (2 * base), np.zeros(ng)])
        if k:
            z0 += rng.normal(scale=0.05, size=z0.size)
        r = minimize(obj, z0, method="SLSQP", bounds=bounds,
                     constraints=[{"type": "eq", "fun": balance}, {"type": "ineq", "fun": limits}],
                     options={"maxiter": 1000, "ftol": 1e-12})
        feas = np.linalg.norm(balance(r.x))
        if r.success and feas < 1e-8 and (best is None or r.fun < best[0]):
            best = (r.fun, feas, r.x)
    return best


if __name__ == "__main__":
    fun, feas, x = solve(sys.argv[1] if len(sys.argv) > 1 else "data/case9.m")
    print(f"objective {fun:.6f} feasibility {feas:.3e}")
    print("pg_MW", np.round(x[18:21] * 100, 4))
