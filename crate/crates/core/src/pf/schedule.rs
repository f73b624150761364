use crate::error::{Error, Result};

/// One stage of a product formula: every summand evolves for `coeff · δ`,
/// in forward or reversed summand order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub coeff: f64,
    pub reversed: bool,
}

/// Stage table of a `p`th-order Suzuki formula.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterSchedule {
    p: usize,
    stages: Vec<Stage>,
}

impl TrotterSchedule {
    pub fn order(&self) -> usize {
        self.p
    }

    /// `Υ`.
    pub fn upsilon(&self) -> usize {
        self.stages.len()
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// `a_{(y,e)}`; identical for every summand `e` in a Suzuki formula.
    pub fn coefficient(&self, y: usize, _e: usize) -> f64 {
        self.stages[y].coeff
    }

    /// `π_y` over summand indices `0..m`.
    pub fn permutation(&self, y: usize, m: usize) -> Vec<usize> {
        if self.stages[y].reversed {
            (0..m).rev().collect()
        } else {
            (0..m).collect()
        }
    }
}

fn suzuki_stages(p: usize, scale: f64) -> Vec<Stage> {
    if p == 2 {
        return vec![
            Stage {
                coeff: scale / 2.0,
                reversed: false,
            },
            Stage {
                coeff: scale / 2.0,
                reversed: true,
            },
        ];
    }
    let k = p / 2;
    let u = 1.0 / (4.0 - 4f64.powf(1.0 / (2 * k - 1) as f64));
    let outer = suzuki_stages(p - 2, u * scale);
    let inner = suzuki_stages(p - 2, (1.0 - 4.0 * u) * scale);
    let mut out = Vec::with_capacity(5 * outer.len());
    out.extend_from_slice(&outer);
    out.extend_from_slice(&outer);
    out.extend_from_slice(&inner);
    out.extend_from_slice(&outer);
    out.extend_from_slice(&outer);
    out
}

/// Lie–Trotter for `p = 1`, Suzuki recursion for even `p`.
pub fn suzuki_schedule(p: usize) -> Result<TrotterSchedule> {
    let stages = match p {
        1 => vec![Stage {
            coeff: 1.0,
            reversed: false,
        }],
        p if p >= 2 && p % 2 == 0 && p <= 8 => suzuki_stages(p, 1.0),
        _ => return Err(Error::Domain(format!("unsupported product-formula order {p}"))),
    };
    Ok(TrotterSchedule { p, stages })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_counts() {
        assert_eq!(suzuki_schedule(1).unwrap().upsilon(), 1);
        assert_eq!(suzuki_schedule(2).unwrap().upsilon(), 2);
        assert_eq!(suzuki_schedule(4).unwrap().upsilon(), 10);
        assert_eq!(suzuki_schedule(6).unwrap().upsilon(), 50);
        assert!(suzuki_schedule(3).is_err());
    }

    #[test]
    fn coefficients_bounded_and_sum_to_one() {
        for p in [1, 2, 4, 6] {
            let s = suzuki_schedule(p).unwrap();
            assert!(s.stages().iter().all(|st| st.coeff.abs() <= 1.0));
            // Each summand's total evolution equals one step.
            let per_summand: f64 = s.stages().iter().map(|st| st.coeff).sum();
            assert!((per_summand - 1.0).abs() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn directions_alternate() {
        let s = suzuki_schedule(4).unwrap();
        for (y, st) in s.stages().iter().enumerate() {
            assert_eq!(st.reversed, y % 2 == 1);
        }
    }
}
