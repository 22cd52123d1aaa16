#!/usr/bin/env python3
"""Independent reference computations for the frozen test values.

Uses only fractions and brute force; shares no code with the C++ library.
Run: python3 tools/oracle.py  (prints JSON)
"""
import itertools
import json
from fractions import Fraction as F

# binomial two-period example: (p_up at root, p_up at u, p_up at d)
MODELS = {
    "theta1": (F(1, 4), F(1, 2), F(1, 2)),
    "theta2": (F(1, 2), F(3, 4), F(3, 4)),
    "theta3": (F(1, 2), F(3, 4), F(1, 2)),
    "theta4": (F(1, 2), F(1, 2), F(3, 4)),
    "theta5": (F(1, 2), F(1, 2), F(1, 2)),
    "theta6": (F(1, 4), F(1, 2), F(3, 4)),
    "theta7": (F(1, 4), F(3, 4), F(1, 2)),
    "theta8": (F(1, 4), F(3, 4), F(3, 4)),
}
THETA0 = ["theta1", "theta2", "theta5", "theta8"]
LOSS = {  # leaves uu, ud, du, dd
    "phi": [(8, 0), (0, 8), (0, 0), (8, 8)],
    "psi": [(0, 8), (0, 0), (6, 0), (6, 8)],
}


def mix(p, a, b):
    return tuple(p * x + (1 - p) * y for x, y in zip(a, b))


def cmax(vs):
    return tuple(max(c) for c in zip(*vs))


def fmt(v):
    return "(" + ",".join(str(x) for x in v) + ")"


def expectations(loss, m):
    pr, pu, pd = MODELS[m]
    e_u = mix(pu, loss[0], loss[1])
    e_d = mix(pd, loss[2], loss[3])
    return e_u, e_d, mix(pr, e_u, e_d)


def binomial(family):
    out = {"tables": {}, "sup_t1": {}, "nested_t0": {}, "direct_t0": {}}
    values = set()
    for name, loss in LOSS.items():
        rows = {m: expectations(loss, m) for m in family}
        out["tables"][name] = {m: [fmt(v) for v in r] for m, r in rows.items()}
        su = cmax([r[0] for r in rows.values()])
        sd = cmax([r[1] for r in rows.values()])
        out["sup_t1"][name] = [fmt(su), fmt(sd)]
        nested = cmax([mix(MODELS[m][0], su, sd) for m in family])
        out["nested_t0"][name] = fmt(nested)
        direct = cmax([r[2] for r in rows.values()])
        out["direct_t0"][name] = fmt(direct)
        values.add(direct)
    out["V0"] = sorted(fmt(v) for v in values)
    # backward set: each strategy's time-1 suprema, recombined per root control
    b0 = set()
    for name in LOSS:
        su, sd = (tuple(F(x) for x in s.strip("()").split(",")) for s in out["sup_t1"][name])
        b0.add(cmax([mix(MODELS[m][0], su, sd) for m in family]))
    out["B0"] = sorted(fmt(v) for v in b0)
    return out


def solve(rows, rhs):
    """Unique solution of a square system, or None."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return tuple(a[i][n] / a[i][i] for i in range(n))


def octagon():
    gens = [(1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)]
    gens += [(F(3, 4) * a, F(3, 4) * b, 1) for a in (1, -1) for b in (1, -1)]
    # facet normals: every triple of generators spanning a plane that all generators lie on one side of
    normals = set()
    for g1, g2 in itertools.combinations(gens, 2):
        n = (g1[1] * g2[2] - g1[2] * g2[1], g1[2] * g2[0] - g1[0] * g2[2], g1[0] * g2[1] - g1[1] * g2[0])
        if all(x == 0 for x in n):
            continue
        for s in (1, -1):
            ns = tuple(s * x for x in n)
            if all(sum(a * b for a, b in zip(ns, g)) >= 0 for g in gens):
                k = next(x for x in ns if x != 0)
                normals.add(tuple(F(x) / abs(k) for x in ns))
    normals = sorted(normals)
    x, y = (0, 0, 0), (F(1, 4), F(-1, 4), 0)
    alpha = [max(sum(a * b for a, b in zip(n, p)) for p in (x, y)) for n in normals]
    verts = set()
    for idx in itertools.combinations(range(len(normals)), 3):
        v = solve([normals[i] for i in idx], [alpha[i] for i in idx])
        if v is None:
            continue
        if all(sum(a * b for a, b in zip(n, v)) >= al for n, al in zip(normals, alpha)):
            verts.add(v)
    return {"duals": [fmt(n) for n in normals], "alpha": [str(a) for a in alpha],
            "vertices": sorted(fmt(v) for v in verts)}


def dynamics_two_step():
    """Brute force over all 8 strategies of data/dynamics_two_step.json."""
    doc = json.load(open(__file__.replace("tools/oracle.py", "data/dynamics_two_step.json")))
    loss = {s: tuple(F(x) for x in v) for s, v in doc["problem"]["loss"].items()}
    marg = {n: [tuple(F(x) for x in p) for p in c] for n, c in doc["marginals"].items()}
    models = [dict(zip(["root", "u", "d"], choice)) for choice in itertools.product(marg["root"], marg["u"], marg["d"])]
    values = set()
    for a0, au, ad in itertools.product("ab", repeat=3):
        # state after the root control and the branch; leaves get state + control + branch letter
        leaf = {
            "uu": "s" + a0 + "U" + au + "U", "ud": "s" + a0 + "U" + au + "D",
            "du": "s" + a0 + "D" + ad + "U", "dd": "s" + a0 + "D" + ad + "D",
        }
        exps = []
        for m in models:
            pu, pd, pr = m["u"][0], m["d"][0], m["root"][0]
            eu = mix(pu, loss[leaf["uu"]], loss[leaf["ud"]])
            ed = mix(pd, loss[leaf["du"]], loss[leaf["dd"]])
            exps.append(mix(pr, eu, ed))
        values.add(cmax(exps))
    return sorted(fmt(v) for v in values)


if __name__ == "__main__":
    print(json.dumps({
        "Theta": binomial(list(MODELS)),
        "Theta0": binomial(THETA0),
        "octagon": octagon(),
        "dynamics_two_step_V0": dynamics_two_step(),
    }, indent=1))
