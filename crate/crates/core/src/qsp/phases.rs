use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, I, ZERO};

type M2 = Matrix2<C64>;

const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Symmetric phases `φ_0 … φ_d` in the `W(x)` convention, so that
/// `Re⟨0|e^{iφ_0Z} Π_k W(x) e^{iφ_kZ}|0⟩` is the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QspPhaseSequence {
    pub angles: Vec<f64>,
    pub degree: usize,
    pub parity: Parity,
    /// Largest deviation from the target on the 32-point Chebyshev grid.
    pub residual: f64,
}

impl QspPhaseSequence {
    /// Phases for `e^{iφ_0Z} Π_k R(x) e^{iφ_kZ}` with the reflection signal
    /// `R(x) = [[x, √(1−x²)], [√(1−x²), −x]]`; the two responses satisfy
    /// `P_W = i^d P_R`.
    pub fn reflection_angles(&self) -> Vec<f64> {
        let d = self.degree;
        if d == 0 {
            return self.angles.clone();
        }
        self.angles
            .iter()
            .enumerate()
            .map(|(k, &a)| if k == 0 || k == d { a - FRAC_PI_4 } else { a - FRAC_PI_2 })
            .collect()
    }

    /// Re-checks the grid residual against Chebyshev coefficients.
    pub fn verify(&self, coeffs: &[f64], tol: f64) -> Result<f64> {
        let r = grid_residual(&self.angles, coeffs);
        if r > tol {
            return Err(Error::Synthesis { residual: r });
        }
        Ok(r)
    }
}

fn phase(phi: f64) -> M2 {
    M2::new(C64::from_polar(1.0, phi), ZERO, ZERO, C64::from_polar(1.0, -phi))
}

fn signal_w(x: f64) -> M2 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    M2::new(C64::new(x, 0.0), I * s, I * s, C64::new(x, 0.0))
}

fn signal_r(x: f64) -> M2 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    M2::new(C64::new(x, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-x, 0.0))
}

fn response_with(angles: &[f64], signal: M2) -> C64 {
    let mut u = phase(angles[0]);
    for &a in &angles[1..] {
        u = u * signal * phase(a);
    }
    u[(0, 0)]
}

/// `⟨0|e^{iφ_0Z} Π_k W(x) e^{iφ_kZ}|0⟩`.
pub fn response_wx(angles: &[f64], x: f64) -> C64 {
    response_with(angles, signal_w(x))
}

/// Same product with the reflection signal `R(x)`.
pub fn response_reflection(angles: &[f64], x: f64) -> C64 {
    response_with(angles, signal_r(x))
}

/// `Σ_k c_k T_k(x)` by Clenshaw's recurrence.
pub fn chebyshev_eval(coeffs: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// The 32 points `cos((2j−1)π/64)`.
pub fn check_grid() -> Vec<f64> {
    (1..=32).map(|j| ((2 * j - 1) as f64 * PI / 64.0).cos()).collect()
}

pub fn grid_residual(angles: &[f64], coeffs: &[f64]) -> f64 {
    check_grid()
        .into_iter()
        .map(|x| (response_wx(angles, x).re - chebyshev_eval(coeffs, x)).abs())
        .fold(0.0, f64::max)
}

fn degree_of(coeffs: &[f64]) -> usize {
    coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0)
}

fn full_angles(psi: &[f64], d: usize) -> Vec<f64> {
    (0..=d)
        .map(|k| psi[k.min(d - k)] + if k == 0 || k == d { FRAC_PI_4 } else { 0.0 })
        .collect()
}

/// Values and Jacobian of `Re P(x_j)` with respect to the reduced phases.
fn evaluate(psi: &[f64], d: usize, nodes: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let phi = full_angles(psi, d);
    let m = psi.len();
    let mut vals = DVector::zeros(nodes.len());
    let mut jac = DMatrix::zeros(nodes.len(), m);
    let iz = M2::new(I, ZERO, ZERO, -I);
    for (j, &x) in nodes.iter().enumerate() {
        let w = signal_w(x);
        let a: Vec<M2> = phi.iter().map(|&p| phase(p)).collect();
        // prefix[k] = A_0 W … A_{k−1} W; suffix[k] = W A_{k+1} … W A_d.
        let mut prefix = vec![M2::identity(); d + 1];
        for k in 1..=d {
            prefix[k] = prefix[k - 1] * a[k - 1] * w;
        }
        let mut suffix = vec![M2::identity(); d + 1];
        for k in (0..d).rev() {
            suffix[k] = w * a[k + 1] * suffix[k + 1];
        }
        vals[j] = (prefix[d] * a[d])[(0, 0)].re;
        for k in 0..=d {
            let dk = (prefix[k] * iz * a[k] * suffix[k])[(0, 0)].re;
            jac[(j, k.min(d - k))] += dk;
        }
    }
    (vals, jac)
}

/// Phases whose response matches `Σ c_k T_k` (definite parity, sup-norm
/// below 1) on the check grid within `tol`. Newton's method on the reduced
/// symmetric phases at the positive Chebyshev nodes, started from
/// `(π/4, 0, …, 0, π/4)`.
pub fn solve_phases(coeffs: &[f64], tol: f64) -> Result<QspPhaseSequence> {
    let d = degree_of(coeffs);
    let parity = if d.is_multiple_of(2) { Parity::Even } else { Parity::Odd };
    if coeffs.iter().enumerate().any(|(k, c)| k % 2 != d % 2 && *c != 0.0) {
        return Err(Error::Domain("target polynomial has mixed parity".into()));
    }
    let sup = check_grid()
        .into_iter()
        .map(|x| chebyshev_eval(coeffs, x).abs())
        .fold(0.0, f64::max);
    if sup >= 1.0 {
        return Err(Error::Domain(format!("target reaches {sup} on [−1, 1]")));
    }
    if d == 0 {
        let angles = vec![coeffs.first().copied().unwrap_or(0.0).acos()];
        let residual = grid_residual(&angles, coeffs);
        return Ok(QspPhaseSequence {
            angles,
            degree: 0,
            parity,
            residual,
        });
    }
    let m = (d + 2) / 2;
    let nodes: Vec<f64> = (1..=m)
        .map(|j| ((2 * j - 1) as f64 * PI / (4 * m) as f64).cos())
        .collect();
    let target = DVector::from_iterator(m, nodes.iter().map(|&x| chebyshev_eval(coeffs, x)));
    let mut psi = vec![0.0; m];
    let mut best = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let (vals, jac) = evaluate(&psi, d, &nodes);
        let f = vals - &target;
        let err = f.amax();
        best = best.min(err);
        if err < 1e-15 {
            break;
        }
        let step = jac
            .lu()
            .solve(&f)
            .ok_or(Error::Synthesis { residual: err })?;
        for (p, s) in psi.iter_mut().zip(step.iter()) {
            *p -= s;
        }
    }
    let angles = full_angles(&psi, d);
    let residual = grid_residual(&angles, coeffs);
    if !(residual <= tol) {
        log::warn!("phase synthesis stalled: best node error {best:e}, grid residual {residual:e}");
        return Err(Error::Synthesis { residual });
    }
    Ok(QspPhaseSequence {
        angles,
        degree: d,
        parity,
        residual,
    })
}
