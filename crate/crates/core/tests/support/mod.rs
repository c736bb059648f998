//! Brute-force reference model built on nalgebra.
//!
//! Shares no code with the library: Kraus operators are written out again,
//! teleportation is simulated with an explicit Bell measurement and Pauli
//! correction, probe derivatives are analytic, and eigenpairs come from
//! nalgebra's Hermitian solver.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

pub type Mat = DMatrix<C>;

pub const AD: &str = "ad";
pub const PD: &str = "pd";
pub const DE: &str = "de";
pub const KINDS: [&str; 3] = [AD, PD, DE];

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn pauli(k: usize) -> Mat {
    let (o, z, i) = (c(1.0), c(0.0), C::new(0.0, 1.0));
    let e = match k {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, -i, i, z],
        3 => [o, z, z, -o],
        _ => panic!("pauli index {k}"),
    };
    Mat::from_row_slice(2, 2, &e)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

fn sandwich(k: &Mat, rho: &Mat) -> Mat {
    k * rho * k.adjoint()
}

/// (memoryless, correlated) Kraus sets of the two-use channel.
pub fn kraus(kind: &str, d: f64) -> (Vec<Mat>, Vec<Mat>) {
    match kind {
        AD => {
            let mut a0 = Mat::identity(2, 2);
            a0[(0, 0)] = c((1.0 - d).sqrt());
            let mut a1 = Mat::zeros(2, 2);
            a1[(1, 0)] = c(d.sqrt());
            let single = [a0, a1];
            let mut u = Vec::new();
            for x in &single {
                for y in &single {
                    u.push(kron(x, y));
                }
            }
            let mut e0 = Mat::identity(4, 4);
            e0[(0, 0)] = c((1.0 - d).sqrt());
            let mut e1 = Mat::zeros(4, 4);
            e1[(3, 0)] = c(d.sqrt());
            (u, vec![e0, e1])
        }
        PD | DE => {
            let p: Vec<(usize, f64)> = if kind == PD {
                vec![(0, 1.0 - d / 2.0), (3, d / 2.0)]
            } else {
                vec![(0, 1.0 - d), (1, d / 3.0), (2, d / 3.0), (3, d / 3.0)]
            };
            let mut u = Vec::new();
            for &(i, pi) in &p {
                for &(j, pj) in &p {
                    u.push(kron(&pauli(i), &pauli(j)) * c((pi * pj).sqrt()));
                }
            }
            let corr = p
                .iter()
                .map(|&(k, pk)| kron(&pauli(k), &pauli(k)) * c(pk.sqrt()))
                .collect();
            (u, corr)
        }
        _ => panic!("kind {kind}"),
    }
}

pub fn memory_channel(kind: &str, d: f64, mu: f64, rho: &Mat) -> Mat {
    let (u, corr) = kraus(kind, d);
    let a: Mat = u.iter().map(|k| sandwich(k, rho)).sum();
    let b: Mat = corr.iter().map(|k| sandwich(k, rho)).sum();
    a * c(1.0 - mu) + b * c(mu)
}

pub fn x_state(c1: f64, c2: f64, c3: f64) -> Mat {
    let mut m = Mat::identity(4, 4);
    for (k, ck) in [(1, c1), (2, c2), (3, c3)] {
        m += kron(&pauli(k), &pauli(k)) * c(ck);
    }
    m * c(0.25)
}

pub fn bell(i: usize) -> DVector<C> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = match i {
        0 => [0.0, h, -h, 0.0],
        1 => [h, 0.0, 0.0, -h],
        2 => [h, 0.0, 0.0, h],
        3 => [0.0, h, h, 0.0],
        _ => panic!("bell index {i}"),
    };
    DVector::from_iterator(4, v.iter().map(|&x| c(x)))
}

/// Reorders the qubits of an n-qubit operator: qubit k of the result is
/// qubit `perm[k]` of the input.
pub fn permute_qubits(m: &Mat, perm: &[usize]) -> Mat {
    let n = perm.len();
    let dim = 1 << n;
    let map = |idx: usize| -> usize {
        let mut out = 0;
        for (k, &src) in perm.iter().enumerate() {
            let bit = (idx >> (n - 1 - k)) & 1;
            out |= bit << (n - 1 - src);
        }
        out
    };
    Mat::from_fn(dim, dim, |i, j| m[(map(i), map(j))])
}

/// Conditional receiver state after projecting the leading qubits onto
/// `bra`, unnormalized: ⟨b| ρ |b⟩ over the first block.
fn condition(full: &Mat, proj: &DVector<C>, rest: usize) -> Mat {
    let lead = proj.len();
    Mat::from_fn(rest, rest, |a, b| {
        let mut s = C::new(0.0, 0.0);
        for i in 0..lead {
            for j in 0..lead {
                s += proj[i].conj() * full[(i * rest + a, j * rest + b)] * proj[j];
            }
        }
        s
    })
}

/// Explicit one-qubit teleportation: probe on qubit 0, resource on (1, 2).
pub fn teleport_single(resource: &Mat, probe: &Mat) -> Mat {
    let full = kron(probe, resource);
    let mut out = Mat::zeros(2, 2);
    for k in 0..4 {
        let cond = condition(&full, &bell(k), 2);
        out += sandwich(&pauli(k), &cond);
    }
    out
}

/// Explicit two-qubit teleportation with two copies of the resource.
/// Qubits: probe (0, 1), resources (2, 3) and (4, 5).
pub fn teleport_double(resource: &Mat, probe: &Mat) -> Mat {
    let full = kron(probe, &kron(resource, resource));
    let full = permute_qubits(&full, &[0, 2, 1, 4, 3, 5]);
    let mut out = Mat::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            let proj = bell(a).kronecker(&bell(b));
            let cond = condition(&full, &proj, 4);
            out += sandwich(&kron(&pauli(a), &pauli(b)), &cond);
        }
    }
    out
}

/// Probe state and its analytic θ and φ derivatives.
pub struct Probe {
    pub rho: Mat,
    pub d_theta: Mat,
    pub d_phi: Mat,
}

fn dyad(u: &DVector<C>, v: &DVector<C>) -> Mat {
    u * v.adjoint()
}

pub fn probe(theta: f64, phi: f64, qubits: usize) -> Probe {
    let dim = 1 << qubits;
    let hi = dim - 1;
    let e = C::from_polar(1.0, phi);
    let mut v = DVector::zeros(dim);
    let mut dt = DVector::zeros(dim);
    let mut dp = DVector::zeros(dim);
    v[0] = c((theta / 2.0).cos());
    v[hi] = e * (theta / 2.0).sin();
    dt[0] = c(-(theta / 2.0).sin() / 2.0);
    dt[hi] = e * ((theta / 2.0).cos() / 2.0);
    dp[hi] = C::new(0.0, 1.0) * v[hi];
    Probe {
        rho: dyad(&v, &v),
        d_theta: dyad(&dt, &v) + dyad(&v, &dt),
        d_phi: dyad(&dp, &v) + dyad(&v, &dp),
    }
}

/// Spectral QFI with exact derivative.
pub fn qfi(rho: &Mat, drho: &Mat) -> f64 {
    let eig = rho.clone().symmetric_eigen();
    let lam: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l.abs() < 1e-12 { 0.0 } else { l })
        .collect();
    let m = eig.eigenvectors.adjoint() * drho * &eig.eigenvectors;
    let mut f = 0.0;
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            let s = lam[i] + lam[j];
            if s > 1e-10 {
                f += 2.0 * m[(i, j)].norm_sqr() / s;
            }
        }
    }
    f
}

/// (F_θ, F_φ) of the teleported probe.
pub fn teleported_qfi(
    kind: &str,
    d: f64,
    mu: f64,
    cs: [f64; 3],
    theta: f64,
    phi: f64,
    qubits: usize,
) -> (f64, f64) {
    let res = memory_channel(kind, d, mu, &x_state(cs[0], cs[1], cs[2]));
    let p = probe(theta, phi, qubits);
    let tel = |m: &Mat| {
        if qubits == 1 {
            teleport_single(&res, m)
        } else {
            teleport_double(&res, m)
        }
    };
    let rho = tel(&p.rho);
    (qfi(&rho, &tel(&p.d_theta)), qfi(&rho, &tel(&p.d_phi)))
}

/// Converts a library matrix by entries.
pub fn from_entries(rows: usize, cols: usize, get: impl Fn(usize, usize) -> C) -> Mat {
    Mat::from_fn(rows, cols, get)
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
