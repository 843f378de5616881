#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use zeno_core::linalg::{cplx, CMatrix};
use zeno_core::pauli::PauliOp;
use zeno_core::simulator::DensityMatrix;

pub fn random_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliOp {
    let mask = (1u64 << n) - 1;
    let x = rng.random::<u64>() & mask;
    let z = rng.random::<u64>() & mask;
    PauliOp::from_bits(n, x, z, rng.random_range(0..4)).unwrap()
}

pub fn random_hermitian_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliOp {
    let p = random_pauli(rng, n).unsigned();
    if rng.random::<bool>() {
        p.negated()
    } else {
        p
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.random::<f64>().max(1e-300);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| cplx(gaussian(rng), gaussian(rng)))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let g = random_matrix(rng, dim);
    (&g + g.adjoint()) * cplx(0.5, 0.0)
}

/// Full-rank random state `G G† / Tr`.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = random_matrix(rng, dim);
    let m = &g * g.adjoint();
    let tr: Complex64 = m.trace();
    DensityMatrix::new(m / tr).unwrap()
}

pub fn random_pure<R: Rng>(rng: &mut R, dim: usize) -> DensityMatrix {
    let psi: Vec<Complex64> = (0..dim).map(|_| cplx(gaussian(rng), gaussian(rng))).collect();
    DensityMatrix::from_pure(&psi).unwrap()
}
