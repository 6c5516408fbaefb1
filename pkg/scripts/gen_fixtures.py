#!/usr/bin/env python3
"""Regenerate the FCIDUMP test fixtures under tests/fixtures/.

Self-contained restricted Hartree-Fock for hydrogen clusters in the STO-6G
minimal basis (s functions only, so every integral has a closed form through
the Boys function).  The emitted FCIDUMP files carry the MO-basis integrals;
the package itself never computes integrals.

Usage: python scripts/gen_fixtures.py [output_dir]
"""

import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
from qjacobi.fcidump import FCIDumpData, emit_fcidump  # noqa: E402

ANGSTROM = 1.8897259886  # bohr per angstrom

# STO-6G hydrogen 1s (zeta = 1.24 folded into the exponents, standard table)
STO6G_H_EXP = np.array([35.52322122, 6.513143725, 1.822142904,
                        0.6259552659, 0.2430767471, 0.1001124280])
STO6G_H_COEF = np.array([0.00916359628, 0.04936149294, 0.16853830490,
                         0.37056279970, 0.41649152980, 0.13033408410])


def boys0(t):
    t = np.asarray(t, dtype=float)
    small = t < 1e-12
    safe = np.where(small, 1.0, t)
    from scipy.special import erf  # only used by this dev script
    val = 0.5 * np.sqrt(np.pi / safe) * erf(np.sqrt(safe))
    return np.where(small, 1.0 - t / 3.0, val)


class Basis:
    """One contracted s function per hydrogen atom."""

    def __init__(self, centers_bohr):
        self.centers = np.asarray(centers_bohr, dtype=float)
        norms = (2.0 * STO6G_H_EXP / np.pi) ** 0.75
        self.coef = STO6G_H_COEF * norms
        self.exp = STO6G_H_EXP
        self.n = len(self.centers)


def one_electron(basis, charges_positions):
    n, ex, cf = basis.n, basis.exp, basis.coef
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            A, B = basis.centers[i], basis.centers[j]
            rab2 = float(np.dot(A - B, A - B))
            for a, ca in zip(ex, cf):
                for b, cb in zip(ex, cf):
                    p = a + b
                    mu = a * b / p
                    pref = ca * cb * math.exp(-mu * rab2)
                    s = pref * (math.pi / p) ** 1.5
                    S[i, j] += s
                    T[i, j] += s * mu * (3.0 - 2.0 * mu * rab2)
                    P = (a * A + b * B) / p
                    for Z, C in charges_positions:
                        rpc2 = float(np.dot(P - C, P - C))
                        V[i, j] -= Z * pref * (2.0 * math.pi / p) * float(boys0(p * rpc2))
    return S, T, V


def two_electron(basis):
    n, ex, cf = basis.n, basis.exp, basis.coef
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            A, B = basis.centers[i], basis.centers[j]
            rab2 = float(np.dot(A - B, A - B))
            for k in range(n):
                for l in range(n):
                    C, D = basis.centers[k], basis.centers[l]
                    rcd2 = float(np.dot(C - D, C - D))
                    val = 0.0
                    for a, ca in zip(ex, cf):
                        for b, cb in zip(ex, cf):
                            p = a + b
                            P = (a * A + b * B) / p
                            kab = math.exp(-a * b / p * rab2)
                            for c, cc in zip(ex, cf):
                                for d, cd in zip(ex, cf):
                                    q = c + d
                                    Q = (c * C + d * D) / q
                                    kcd = math.exp(-c * d / q * rcd2)
                                    rho = p * q / (p + q)
                                    rpq2 = float(np.dot(P - Q, P - Q))
                                    val += (ca * cb * cc * cd * kab * kcd
                                            * 2.0 * math.pi ** 2.5
                                            / (p * q * math.sqrt(p + q))
                                            * float(boys0(rho * rpq2)))
                    eri[i, j, k, l] = val
    return eri


def rhf(S, T, V, eri, n_electrons, max_iter=200, tol=1e-12):
    hcore = T + V
    n = S.shape[0]
    nocc = n_electrons // 2
    evals, evecs = np.linalg.eigh(S)
    X = evecs @ np.diag(evals ** -0.5) @ evecs.T
    D = np.zeros((n, n))
    e_old = 0.0
    diis_f, diis_e = [], []
    for it in range(max_iter):
        J = np.einsum("pqrs,rs->pq", eri, D)
        K = np.einsum("prqs,rs->pq", eri, D)
        F = hcore + 2.0 * J - K
        err = X.T @ (F @ D @ S - S @ D @ F) @ X
        diis_f.append(F.copy())
        diis_e.append(err.copy())
        if len(diis_f) > 8:
            diis_f.pop(0)
            diis_e.pop(0)
        if len(diis_f) > 1:
            m = len(diis_f)
            B = -np.ones((m + 1, m + 1))
            B[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    B[i, j] = np.sum(diis_e[i] * diis_e[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(B, rhs)[:m]
                F = sum(wi * fi for wi, fi in zip(w, diis_f))
            except np.linalg.LinAlgError:
                pass
        Fp = X.T @ F @ X
        _, Cp = np.linalg.eigh(Fp)
        Cmo = X @ Cp
        Cocc = Cmo[:, :nocc]
        D = Cocc @ Cocc.T
        e_el = np.sum(D * (hcore + F))
        if abs(e_el - e_old) < tol and it > 3:
            return Cmo, e_el
        e_old = e_el
    raise RuntimeError("SCF did not converge")


def make_fcidump(centers_angstrom, n_electrons, tag):
    centers = np.asarray(centers_angstrom) * ANGSTROM
    basis = Basis(centers)
    charges = [(1.0, c) for c in centers]
    S, T, V = one_electron(basis, charges)
    eri = two_electron(basis)
    Cmo, e_el = rhf(S, T, V, eri, n_electrons)
    e_nuc = 0.0
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            e_nuc += 1.0 / float(np.linalg.norm(centers[i] - centers[j]))
    h_mo = Cmo.T @ (T + V) @ Cmo
    eri_mo = np.einsum("pi,qj,pqrs,rk,sl->ijkl", Cmo, Cmo, eri, Cmo, Cmo, optimize=True)
    n = basis.n
    data = FCIDumpData(n_spatial=n, n_electrons=n_electrons, ms2=0, core_energy=e_nuc)
    for p in range(n):
        for q in range(p + 1):
            if abs(h_mo[p, q]) > 1e-16:
                data.one_body[(p + 1, q + 1)] = float(h_mo[p, q])
    seen = set()
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    pq = (p, q) if p >= q else (q, p)
                    rs = (r, s) if r >= s else (s, r)
                    key = pq + rs if pq >= rs else rs + pq
                    if key in seen:
                        continue
                    seen.add(key)
                    v = eri_mo[key[0], key[1], key[2], key[3]]
                    if abs(v) > 1e-16:
                        data.two_body[tuple(x + 1 for x in key)] = float(v)
    print(f"{tag}: E_RHF = {e_el + e_nuc:.10f} Ha (electronic {e_el:.10f}, nuclear {e_nuc:.10f})")
    return data


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    systems = {
        "h2_sto6g_0.7414.fcidump": ([[0.0, 0.0, 0.0], [0.0, 0.0, 0.7414]], 2),
        "h4_linear_1.5.fcidump": ([[0.0, 0.0, 1.5 * i] for i in range(4)], 4),
        "h6_linear_1.5.fcidump": ([[0.0, 0.0, 1.5 * i] for i in range(6)], 6),
    }
    for name, (geom, nelec) in systems.items():
        data = make_fcidump(geom, nelec, name)
        (out_dir / name).write_text(emit_fcidump(data), encoding="ascii")
        print(f"wrote {out_dir / name}")


if __name__ == "__main__":
    main()
