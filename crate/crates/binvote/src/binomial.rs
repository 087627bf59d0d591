//! Binomial tail probabilities, stable for `m` up to about `10^6`.

use statrs::function::gamma::ln_gamma;

fn ln_choose(m: usize, l: usize) -> f64 {
    ln_gamma(m as f64 + 1.0) - ln_gamma(l as f64 + 1.0) - ln_gamma((m - l) as f64 + 1.0)
}

/// Log binomial coefficients for a fixed `m`, reused across many `p`.
#[derive(Clone, Debug)]
pub struct TailTable {
    ln_choose: Vec<f64>,
    // Plain coefficients while they stay within f64 range.
    choose: Option<Vec<f64>>,
}

const DIRECT_LIMIT: usize = 1000;

impl TailTable {
    pub fn new(m: usize) -> Self {
        TailTable {
            ln_choose: (0..=m).map(|l| ln_choose(m, l)).collect(),
            choose: (m <= DIRECT_LIMIT).then(|| {
                let mut row = vec![1.0f64];
                for i in 1..=m {
                    let mut next = vec![1.0; i + 1];
                    for l in 1..i {
                        next[l] = row[l - 1] + row[l];
                    }
                    row = next;
                }
                row
            }),
        }
    }

    pub fn m(&self) -> usize {
        self.ln_choose.len() - 1
    }

    /// Probability mass vector of `Bin(m, p)`, entries `0..=m`.
    pub fn pmf(&self, p: f64) -> Vec<f64> {
        let m = self.m();
        let mut out = vec![0.0; m + 1];
        if p <= 0.0 {
            out[0] = 1.0;
            return out;
        }
        if p >= 1.0 {
            out[m] = 1.0;
            return out;
        }
        if let Some(choose) = &self.choose {
            let q = 1.0 - p;
            for (l, slot) in out.iter_mut().enumerate() {
                *slot = choose[l] * p.powi(l as i32) * q.powi((m - l) as i32);
            }
            return out;
        }
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        for (l, slot) in out.iter_mut().enumerate() {
            *slot = (self.ln_choose[l] + l as f64 * lp + (m - l) as f64 * lq).exp();
        }
        out
    }

    /// `t[k] = P(Bin(m, p) ≥ k)` for `k = 0..=m+1`.
    ///
    /// Each entry is taken from whichever tail is smaller, so neither end
    /// loses precision to cancellation. The result is non-increasing in `k`.
    pub fn upper_tails(&self, p: f64) -> Vec<f64> {
        let m = self.m();
        let mass = self.pmf(p);
        let mut upper = vec![0.0; m + 2];
        for k in (0..=m).rev() {
            upper[k] = upper[k + 1] + mass[k];
        }
        let mut tails = vec![0.0; m + 2];
        let mut lower = 0.0;
        for k in 0..=m + 1 {
            tails[k] = if upper[k] < 0.5 { upper[k] } else { 1.0 - lower };
            if k <= m {
                lower += mass[k];
            }
        }
        tails[0] = 1.0;
        for k in 1..=m + 1 {
            tails[k] = tails[k].clamp(0.0, tails[k - 1]);
        }
        tails
    }
}

/// Probability mass vector of `Bin(m, p)`.
pub fn pmf(m: usize, p: f64) -> Vec<f64> {
    TailTable::new(m).pmf(p)
}

/// `t[k] = P(Bin(m, p) ≥ k)` for `k = 0..=m+1`.
pub fn upper_tails(m: usize, p: f64) -> Vec<f64> {
    TailTable::new(m).upper_tails(p)
}

/// `Σ_{ℓ=k}^m C(m, ℓ)` for `k = 0..=m+1`, exact for `m ≤ 64`.
pub fn unnormalized_upper_sums(m: usize) -> Option<Vec<u128>> {
    if m > 64 {
        return None;
    }
    let mut row = vec![1u128; 1];
    for i in 1..=m {
        let mut next = vec![1u128; i + 1];
        for l in 1..i {
            next[l] = row[l - 1] + row[l];
        }
        row = next;
    }
    let mut sums = vec![0u128; m + 2];
    for k in (0..=m).rev() {
        sums[k] = sums[k + 1] + row[k];
    }
    Some(sums)
}
