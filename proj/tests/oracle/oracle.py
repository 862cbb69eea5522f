#!/usr/bin/env python3
"""High-precision brute-force oracle for entropylab.

Evaluates the defining traces and sums directly with mpmath at 50 digits.
It shares no code with the C++ library: channels are applied through their
closed-form actions (never through transfer matrices) and adjoints use the
closed-form dual actions.

Usage:
    oracle.py instances <out.json>   # 20 small committed instances + expectations
    oracle.py sample <instance.json> <golden.json>
    oracle.py derived                # prints the frozen unit-test values
"""

import json
import random
import sys

import mpmath as mp

mp.mp.dps = 50


# ---------------------------------------------------------------------------
# matrices

def zeros(n):
    return mp.matrix(n, n)


def eye(n):
    return mp.eye(n)


def mat_from_json(rows):
    n = len(rows)
    m = zeros(n)
    for i, row in enumerate(rows):
        for j, (re, im) in enumerate(row):
            m[i, j] = mp.mpc(re, im)
    return m


def mat_to_json(m):
    return [[[float(mp.re(m[i, j])), float(mp.im(m[i, j]))] for j in range(m.cols)]
            for i in range(m.rows)]


def adj(m):
    return m.transpose_conj()


def trace(m):
    return mp.fsum(m[i, i] for i in range(m.rows))


def fro(m):
    return mp.sqrt(mp.fsum(abs(m[i, j]) ** 2 for i in range(m.rows) for j in range(m.cols)))


def ket(col):
    n = len(col)
    v = mp.matrix(n, 1)
    for i, c in enumerate(col):
        v[i, 0] = c
    return v


def outer(a, b):
    return a * adj(b)


def unit(n, a, b):
    m = zeros(n)
    m[a, b] = 1
    return m


# ---------------------------------------------------------------------------
# entropy

def eta(t):
    if t <= 0:
        return mp.mpf(0)
    return -t * mp.log(t)


def eigh_desc(m):
    """Eigenvalues (non-increasing) and matching eigenvectors as columns."""
    h = (m + adj(m)) / 2
    vals, vecs = mp.eighe(h)
    order = sorted(range(h.rows), key=lambda k: -mp.re(vals[k]))
    values = [mp.re(vals[k]) for k in order]
    columns = [vecs[:, k] for k in order]
    return values, columns


def entropy(m):
    vals, _ = eigh_desc(m)
    return mp.fsum(eta(v) for v in vals)


# ---------------------------------------------------------------------------
# channels: closed-form actions and closed-form dual actions

def apply(ch, x, dual=False):
    kind = ch["kind"]
    n = ch["n"]
    if kind == "identity":
        return x
    if kind == "transpose":
        return x.T
    if kind == "depolarizing":
        return eye(n) * (trace(x) / n)
    if kind == "unitary-conj":
        u = mat_from_json(ch["u"])
        return adj(u) * x * u if dual else u * x * adj(u)
    if kind == "cond-exp":
        ps = [mat_from_json(p) for p in ch["projections"]]
        out = zeros(n)
        for p in ps:
            out += p * trace(p * x)
        return out
    if kind == "weighted-isometry":
        a = ch["a"]
        out = zeros(n)
        for i in range(n):
            for j in range(n):
                v = mat_from_json(ch["v"][i][j])
                w = mp.mpf(a[i][j])
                out += w * (adj(v) * x * v if dual else v * x * adj(v))
        return out
    if kind == "entropy-target":
        es = [mat_from_json(p) for p in ch["basis"]]
        vecs = [projection_vector(e) for e in es]
        mu = [mp.mpf(t) for t in ch["mu"]]
        out = zeros(n)
        # x -> sum_{k,j} mu[(j+k) mod n] v_jk x v_jk*, v_jk = |e_j><e_k|
        for k in range(n):
            for j in range(n):
                v = outer(vecs[j], vecs[k])
                w = mu[(j + k) % n]
                out += w * (adj(v) * x * v if dual else v * x * adj(v))
        return out
    if kind == "convex-combo":
        out = zeros(n)
        for w, sub in zip(ch["weights"], ch["components"]):
            out += mp.mpf(w) * apply(sub, x, dual)
        return out
    if kind == "composed":
        if dual:
            return apply(ch["inner"], apply(ch["outer"], x, True), True)
        return apply(ch["outer"], apply(ch["inner"], x))
    raise ValueError("unknown kind " + kind)


def projection_vector(p):
    """Unit vector spanning a rank-one projection (column of largest norm)."""
    n = p.rows
    best = max(range(n), key=lambda k: mp.re(p[k, k]))
    v = p[:, best] / mp.sqrt(mp.re(p[best, best]))
    return v


# ---------------------------------------------------------------------------
# pair quantities straight from the definitions

def analyze(state, ch):
    n = state.rows
    out = apply(ch, state)
    lam, evecs = eigh_desc(state)
    mu, pvecs = eigh_desc(out)
    e = [outer(v, v) for v in evecs]
    p = [outer(v, v) for v in pvecs]
    phi_e = [apply(ch, ei) for ei in e]
    dual_p = [apply(ch, pj, dual=True) for pj in p]
    b = [[mp.re(trace(phi_e[i] * p[j])) for j in range(n)] for i in range(n)]
    res = {
        "lambda": lam,
        "mu": mu,
        "b": b,
        "S_rho": mp.fsum(eta(t) for t in lam),
        "S_out": mp.fsum(eta(t) for t in mu),
        "H_lambda_b": mp.fsum(lam[i] * mp.fsum(eta(b[i][j]) for j in range(n)) for i in range(n)),
        "H_mu_b": mp.fsum(mu[j] * mp.fsum(eta(b[i][j]) for i in range(n)) for j in range(n)),
        "S_rho_phi": mp.fsum(lam[i] * entropy(phi_e[i]) for i in range(n)),
        "S_rho_phi_star": mp.fsum(mu[j] * entropy(dual_p[j]) for j in range(n)),
    }
    return res


def min_gap(values):
    return min((values[k] - values[k + 1] for k in range(len(values) - 1)), default=mp.inf)


def to_float(res):
    out = {}
    for k, v in res.items():
        if k == "b":
            out[k] = [[float(x) for x in row] for row in v]
        elif isinstance(v, list):
            out[k] = [float(x) for x in v]
        else:
            out[k] = float(v)
    return out


# ---------------------------------------------------------------------------
# instance construction (python's own seeded Mersenne Twister)

def hermitian_json(m):
    """Round an exactly Hermitian mp matrix to doubles keeping exact Hermiticity."""
    n = m.rows
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = [float(mp.re(m[i, i])), 0.0]
        for j in range(i + 1, n):
            re, im = float(mp.re(m[i, j])), float(mp.im(m[i, j]))
            rows[i][j] = [re, im]
            rows[j][i] = [re, -im]
    return rows


def gaussian_matrix(rng, n):
    m = zeros(n)
    for i in range(n):
        for j in range(n):
            m[i, j] = mp.mpc(rng.gauss(0, 1), rng.gauss(0, 1))
    return m


def random_state(rng, n):
    g = gaussian_matrix(rng, n)
    d = g * adj(g)
    return d / trace(d)


def random_unitary(rng, n):
    g = gaussian_matrix(rng, n)
    cols = []
    for k in range(n):
        v = g[:, k]
        for c in cols:
            v = v - c * (adj(c) * v)[0, 0]
        v = v / fro(v)
        cols.append(v)
    u = zeros(n)
    for k, c in enumerate(cols):
        for i in range(n):
            u[i, k] = c[i, 0]
    return u


def random_bistochastic(rng, n):
    perms = []
    weights = []
    for _ in range(n * n):
        perm = list(range(n))
        rng.shuffle(perm)
        perms.append(perm)
        weights.append(-mp.log(1 - rng.random()))
    total = mp.fsum(weights)
    a = [[mp.mpf(0)] * n for _ in range(n)]
    for w, perm in zip(weights, perms):
        for i in range(n):
            a[i][perm[i]] += w / total
    return [[float(x) for x in row] for row in a]


def basis_projections(u):
    n = u.rows
    return [outer(u[:, k], u[:, k]) for k in range(n)]


def isometry_family(evecs, pvecs):
    # v_ij = |p_i><e_j| so that v_ij* v_ij = e_j and v_ij v_ij* = p_i
    n = len(evecs)
    return [[mat_to_json(outer(pvecs[i], evecs[j])) for j in range(n)] for i in range(n)]


def columns(u):
    return [u[:, k] for k in range(u.cols)]


def make_channel(kind, rng, n, state_vecs):
    if kind == "identity":
        return {"kind": "identity", "n": n}
    if kind == "transpose":
        return {"kind": "transpose", "n": n}
    if kind == "depolarizing":
        return {"kind": "depolarizing", "n": n}
    if kind == "unitary-conj":
        return {"kind": "unitary-conj", "n": n, "u": mat_to_json(random_unitary(rng, n))}
    if kind == "cond-exp":
        u = random_unitary(rng, n)
        return {"kind": "cond-exp", "n": n,
                "projections": [hermitian_json(p) for p in basis_projections(u)]}
    if kind == "weighted-isometry":
        a = random_bistochastic(rng, n)
        pvecs = columns(random_unitary(rng, n))
        return {"kind": "weighted-isometry", "n": n, "a": a,
                "v": isometry_family(state_vecs, pvecs)}
    if kind == "random-bistochastic":
        a = random_bistochastic(rng, n)
        std = columns(eye(n))
        return {"kind": "weighted-isometry", "n": n, "a": a, "v": isometry_family(std, std)}
    if kind == "entropy-target":
        raw = sorted((rng.random() for _ in range(n)), reverse=True)
        total = sum(raw)
        mu = [x / total for x in raw]
        u = random_unitary(rng, n)
        return {"kind": "entropy-target", "n": n,
                "basis": [hermitian_json(p) for p in basis_projections(u)], "mu": mu}
    if kind == "convex-combo":
        parts = [make_channel("unitary-conj", rng, n, state_vecs),
                 {"kind": "transpose", "n": n},
                 make_channel("unitary-conj", rng, n, state_vecs)]
        raw = [rng.random() + 0.2 for _ in parts]
        total = sum(raw)
        return {"kind": "convex-combo", "n": n, "weights": [w / total for w in raw],
                "components": parts}
    if kind == "composed":
        return {"kind": "composed", "n": n,
                "outer": make_channel("cond-exp", rng, n, state_vecs),
                "inner": make_channel("unitary-conj", rng, n, state_vecs)}
    raise ValueError(kind)


KINDS = ["identity", "transpose", "depolarizing", "unitary-conj", "cond-exp",
         "weighted-isometry", "random-bistochastic", "entropy-target", "convex-combo",
         "composed"]


def build_instances():
    rng = random.Random(20240601)
    out = []
    for n in (2, 3):
        for kind in KINDS:
            for _attempt in range(100):
                state = random_state(rng, n)
                rows = hermitian_json(state)
                state = mat_from_json(rows)
                _, vecs = eigh_desc(state)
                ch = make_channel(kind, rng, n, vecs)
                res = analyze(state, ch)
                lam_ok = min_gap(res["lambda"]) > mp.mpf("0.02")
                mu_ok = kind == "depolarizing" or min_gap(res["mu"]) > mp.mpf("0.02")
                if lam_ok and mu_ok:
                    break
            else:
                raise RuntimeError("could not draw well-separated instance")
            out.append({
                "name": "n%d-%s" % (n, kind),
                "instance": {"schema_version": 1, "state": rows, "channel": ch},
                "expected": to_float(res),
            })
    return out


# ---------------------------------------------------------------------------

def sample_instance():
    a = [[0.6, 0.3, 0.1], [0.3, 0.5, 0.2], [0.1, 0.2, 0.7]]
    std = columns(eye(3))
    state = [[[0.5, 0.0], [0.0, 0.0], [0.0, 0.0]],
             [[0.0, 0.0], [0.3, 0.0], [0.0, 0.0]],
             [[0.0, 0.0], [0.0, 0.0], [0.2, 0.0]]]
    return {"schema_version": 1, "state": state,
            "channel": {"kind": "weighted-isometry", "n": 3, "a": a,
                        "v": isometry_family(std, std)}}


def derived():
    d = {}
    d["eta_half"] = eta(mp.mpf(1) / 2)
    d["H_532"] = mp.fsum(eta(mp.mpf(x)) for x in ("0.5", "0.3", "0.2"))
    d["fro_diag34"] = mp.sqrt(9 + 16)
    e11, e12 = unit(2, 0, 0), unit(2, 0, 1)
    d["hs_E11_E12"] = trace(adj(e12) * e11)
    vals, _ = eigh_desc(mp.matrix([[2, 1], [1, 2]]))
    d["eig_2112"] = vals
    h = mp.matrix([[1, 1], [1, -1]]) / mp.sqrt(2)
    d["hadamard_conj_diag10"] = h * mp.matrix([[1, 0], [0, 0]]) * adj(h)
    a = mp.matrix([["0.7", "0.3"], ["0.3", "0.7"]])
    lam = [mp.mpf("0.8"), mp.mpf("0.2")]
    d["wiso_D82"] = [mp.fsum(a[j, i] * lam[i] for i in range(2)) for j in range(2)]
    d["H_lambda_7373_uniform"] = mp.fsum(mp.mpf("0.5") * (eta(a[i, 0]) + eta(a[i, 1]))
                                         for i in range(2))
    d["entropy_target_550"] = eta(mp.mpf("0.5")) * 2
    lam3 = [mp.mpf("0.5"), mp.mpf("0.3"), mp.mpf("0.2")]
    d["majorize_flat"] = [mp.fsum(lam3) / 3] * 3
    # pinching raises entropy for a state with off-diagonal mass
    dm = mp.matrix([[mp.mpf("0.6"), mp.mpc("0.2", "0.1")], [mp.mpc("0.2", "-0.1"), mp.mpf("0.4")]])
    d["pinch_S_D"] = entropy(dm)
    d["pinch_S_diag"] = eta(mp.mpf("0.6")) + eta(mp.mpf("0.4"))
    for k, v in d.items():
        print(k, "=", mp.nstr(v, 20) if not isinstance(v, list) else [mp.nstr(x, 20) for x in v])


def main(argv):
    if len(argv) >= 3 and argv[1] == "instances":
        with open(argv[2], "w") as f:
            json.dump({"schema_version": 1, "instances": build_instances()}, f, indent=1)
            f.write("\n")
    elif len(argv) >= 4 and argv[1] == "sample":
        inst = sample_instance()
        with open(argv[2], "w") as f:
            json.dump(inst, f, indent=2)
            f.write("\n")
        res = to_float(analyze(mat_from_json(inst["state"]), inst["channel"]))
        with open(argv[3], "w") as f:
            json.dump({"expected": res}, f, indent=2)
            f.write("\n")
    elif len(argv) >= 2 and argv[1] == "derived":
        derived()
    else:
        print(__doc__)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
