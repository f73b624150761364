/// `J_0(x) … J_n(x)` by Miller's downward recurrence, normalized with
/// `J_0 + 2Σ J_{2k} = 1`.
pub fn bessel_j_all(n: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    let ax = x.abs();
    let start = {
        let m = n.max(ax.ceil() as usize) + 30 + (ax.sqrt() * 10.0) as usize;
        m + (m & 1)
    };
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / ax * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            let s = 1e-250;
            for v in vals.iter_mut().skip(k - 1) {
                *v *= s;
            }
            norm *= s;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * vals[k - 1];
        }
    }
    norm += vals[0];
    let mut out: Vec<f64> = vals[..=n].iter().map(|v| v / norm).collect();
    if x < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_all(n, x)[n]
}

/// Power series `Σ_m (−1)^m (x/2)^{2m+n} / (m!(m+n)!)`; accurate for
/// moderate `|x|`.
pub fn bessel_j_series(n: usize, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for m in 1..200 {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}
