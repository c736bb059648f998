"""Regenerates golden_de_qubits2.csv from an independent numpy model.

The teleportation protocol is simulated explicitly (Bell measurement on the
sender's qubits, Pauli correction on the receiver) and the probe derivative
is taken analytically, so no finite differences enter the reference values.

    python3 make_golden.py > golden_de_qubits2.csv
"""

import numpy as np

S = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]
S = [s.astype(complex) for s in S]
h = 1 / np.sqrt(2)
BELL = [
    np.array([0, h, -h, 0], complex),
    np.array([h, 0, 0, -h], complex),
    np.array([h, 0, 0, h], complex),
    np.array([0, h, h, 0], complex),
]


def x_state(c):
    return (np.eye(4) + sum(ck * np.kron(S[k], S[k]) for k, ck in zip((1, 2, 3), c))) / 4


def depolarize(rho, d, mu):
    p = [1 - d, d / 3, d / 3, d / 3]
    uncorr = sum(p[i] * p[j] * np.kron(S[i], S[j]) @ rho @ np.kron(S[i], S[j]) for i in range(4) for j in range(4))
    corr = sum(p[k] * np.kron(S[k], S[k]) @ rho @ np.kron(S[k], S[k]) for k in range(4))
    return (1 - mu) * uncorr + mu * corr


def permute(rho, perm):
    n = len(perm)
    t = rho.reshape([2] * (2 * n))
    t = t.transpose(list(perm) + [n + q for q in perm])
    return t.reshape(2 ** n, 2 ** n)


def teleport_pair(res, probe):
    """Qubits: probe (0, 1), first resource (2, 3), second resource (4, 5)."""
    full = np.kron(probe, np.kron(res, res))
    # Reorder to (0, 2, 1, 4, 3, 5): two Bell pairs, then the receiver qubits.
    full = permute(full, [0, 2, 1, 4, 3, 5])
    out = np.zeros((4, 4), complex)
    for a in range(4):
        for b in range(4):
            bra = np.kron(BELL[a], BELL[b]).conj()
            block = full.reshape(16, 4, 16, 4)
            cond = np.einsum("i,iajb,j->ab", bra, block, bra.conj())
            u = np.kron(S[a], S[b])
            out += u @ cond @ u.conj().T
    return out


def probe(theta, phi):
    v = np.zeros(4, complex)
    v[0], v[3] = np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)
    dv_t = np.zeros(4, complex)
    dv_t[0], dv_t[3] = -np.sin(theta / 2) / 2, np.exp(1j * phi) * np.cos(theta / 2) / 2
    dv_p = np.zeros(4, complex)
    dv_p[3] = 1j * v[3]
    rho = np.outer(v, v.conj())
    return rho, np.outer(dv_t, v.conj()) + np.outer(v, dv_t.conj()), np.outer(dv_p, v.conj()) + np.outer(v, dv_p.conj())


def qfi(rho, drho):
    lam, vec = np.linalg.eigh(rho)
    lam = np.where(np.abs(lam) < 1e-12, 0.0, lam)
    m = vec.conj().T @ drho @ vec
    f = 0.0
    for i in range(len(lam)):
        for j in range(len(lam)):
            s = lam[i] + lam[j]
            if s > 1e-10:
                f += 2 * abs(m[i, j]) ** 2 / s
    return f


def main():
    theta, phi, c = np.pi / 2, 0.0, (1.0, 1.0, -1.0)
    print("kind,D,mu,theta,phi,qubits,f_theta,f_phi,method,residual")
    for d in np.linspace(0, 1, 11):
        for mu in np.linspace(0, 1, 11):
            res = depolarize(x_state(c), d, mu)
            rho, dt, dp = probe(theta, phi)
            out = teleport_pair(res, rho)
            ft = qfi(out, teleport_pair(res, dt))
            fp = qfi(out, teleport_pair(res, dp))
            vals = [d, mu, theta, phi]
            print("de," + ",".join(f"{x:.16e}" for x in vals) + f",2,{ft:.16e},{fp:.16e},spectral,")


if __name__ == "__main__":
    main()
