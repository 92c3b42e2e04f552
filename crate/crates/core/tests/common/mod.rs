#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use starkqed::TwoAtomDensityMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `exp(A)` by scaling and squaring with a truncated Taylor series.
pub fn expm2(a: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * c(scale, 0.0);
    let mut term = Matrix2::identity();
    let mut sum = Matrix2::identity();
    for k in 1..=20 {
        term = term * x * c(1.0 / k as f64, 0.0);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// `exp(-i M t)` for a real symmetric 2×2 matrix.
pub fn propagator(m: [[f64; 2]; 2], t: f64) -> Matrix2<Complex64> {
    let a = Matrix2::new(
        c(0.0, -m[0][0] * t),
        c(0.0, -m[0][1] * t),
        c(0.0, -m[1][0] * t),
        c(0.0, -m[1][1] * t),
    );
    expm2(&a)
}

/// Random X state with the coherence at or below its positivity bound.
pub fn random_x_state(rng: &mut impl Rng) -> TwoAtomDensityMatrix {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>().powi(2));
    let total: f64 = w.iter().sum();
    let [alpha, gamma, delta, eta] = w.map(|x| x / total);
    let bound = (gamma * delta).sqrt();
    let modulus = bound * rng.random::<f64>();
    let phase = rng.random::<f64>() * std::f64::consts::TAU;
    TwoAtomDensityMatrix {
        alpha,
        gamma,
        delta,
        eta,
        epsilon: Complex64::from_polar(modulus, phase),
    }
}

/// Random full-rank density matrix `A A† / tr(A A†)`.
pub fn random_density(rng: &mut impl Rng) -> Matrix4<Complex64> {
    let a = Matrix4::from_fn(|_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Random single-qubit unitary.
pub fn random_unitary(rng: &mut impl Rng) -> Matrix2<Complex64> {
    let tau = std::f64::consts::TAU;
    let theta = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
    let (p1, p2, p3) = (
        rng.random::<f64>() * tau,
        rng.random::<f64>() * tau,
        rng.random::<f64>() * tau,
    );
    let a = Complex64::from_polar(theta.cos(), p1);
    let b = Complex64::from_polar(theta.sin(), p2);
    let g = Complex64::from_polar(1.0, p3);
    Matrix2::new(a, -b.conj(), b, a.conj()) * g
}

pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Eigenvalues of a Hermitian 4×4 matrix, ascending.
pub fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> [f64; 4] {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[1], ev[2], ev[3]]
}
