//! Dense complex linear algebra used by the exact oracles.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(dim: usize) -> Mat {
    Mat::identity(dim, dim)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian matrix, from LAPACK `zheev`.
pub fn hermitian_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    use ndarray::ShapeBuilder;
    use ndarray_linalg::{Eigh, UPLO};

    let d = m.nrows();
    if d == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    // Column-major on both sides; a row-major complex input comes back
    // with conjugated eigenvectors.
    let a = ndarray::Array2::from_shape_vec((d, d).f(), m.as_slice().to_vec()).expect("square matrix");
    let (values, vectors) = a.eigh(UPLO::Lower).expect("LAPACK zheev failed");
    let vectors = Mat::from_fn(d, d, |r, c| vectors[(r, c)]);
    (values.to_vec(), vectors)
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &Mat, t: f64) -> Mat {
    let (values, vectors) = hermitian_eigen(h);
    let mut scaled = vectors.clone();
    for (c, lambda) in values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lambda * t);
        for r in 0..h.nrows() {
            scaled[(r, c)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

/// Largest singular value.
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Spectral norm of `u - v`.
pub fn operator_distance(u: &Mat, v: &Mat) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(Error::Shape(format!(
            "operator_distance: {:?} vs {:?}",
            u.shape(),
            v.shape()
        )));
    }
    Ok(spectral_norm(&(u - v)))
}

pub fn max_entry_distance(u: &Mat, v: &Mat) -> f64 {
    u.iter()
        .zip(v.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: &Mat) -> f64 {
    max_entry_distance(&(u.adjoint() * u), &identity(u.nrows()))
}

/// Real orthogonal reflection mapping `e_0` to the real unit vector `v`.
pub fn householder_prep(v: &[f64]) -> Mat {
    let dim = v.len();
    let mut u: Vec<f64> = v.iter().map(|x| -x).collect();
    u[0] += 1.0;
    let norm_sq: f64 = u.iter().map(|x| x * x).sum();
    if norm_sq < 1e-28 {
        return identity(dim);
    }
    Mat::from_fn(dim, dim, |r, c| {
        let delta = if r == c { 1.0 } else { 0.0 };
        C64::new(delta - 2.0 * u[r] * u[c] / norm_sq, 0.0)
    })
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal folded back into `Q`.
pub fn random_unitary<R: rand::Rng>(rng: &mut R, dim: usize) -> Mat {
    use rand_distr::{Distribution, StandardNormal};
    let g = Mat::from_fn(dim, dim, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    q
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}
