//! Utility distributions on `[0, 1]` and their order statistics.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::binomial::TailTable;
use crate::error::{Error, Result};

/// Tolerance on the total probability of a finite distribution.
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

const QUAD_START_PANELS: usize = 4096;
const QUAD_MAX_PANELS: usize = 1 << 20;
const QUAD_TOLERANCE: f64 = 1e-8;
const QUAD_MAX_M: usize = 10_000;

/// Finitely many atoms in ascending order with positive probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDiscrete {
    atoms: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    at_least: Vec<f64>,
}

impl FiniteDiscrete {
    pub fn new(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != probs.len() {
            return Err(Error::InvalidDistribution(
                "atoms and probabilities must be non-empty and of equal length".into(),
            ));
        }
        if atoms.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidDistribution("atoms must lie in [0, 1]".into()));
        }
        if atoms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDistribution(
                "atoms must be strictly ascending".into(),
            ));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidDistribution("probabilities must be positive".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        let mut at_least = vec![0.0; probs.len()];
        let mut acc = 0.0;
        for i in (0..probs.len()).rev() {
            acc += probs[i];
            at_least[i] = acc;
        }
        at_least[0] = 1.0;
        Ok(FiniteDiscrete {
            atoms,
            probs,
            cumulative,
            at_least,
        })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `P(X ≥ atoms[i])`, accumulated from the top atom down.
    pub fn at_least(&self) -> &[f64] {
        &self.at_least
    }

    /// Index of the atom selected by a uniform draw `u ∈ [0, 1)`.
    pub fn atom_index(&self, u: f64) -> usize {
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.atoms.len() - 1)
    }

    /// Multiplies every atom by `c ∈ (0, 1]`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::InvalidDistribution(format!("scale {c} outside (0, 1]")));
        }
        FiniteDiscrete::new(self.atoms.iter().map(|a| a * c).collect(), self.probs.clone())
    }
}

/// The utility distribution `D` from which every voter draws `m` values.
#[derive(Clone, Debug, PartialEq)]
pub enum DistributionSpec {
    Uniform01,
    Bernoulli { p: f64 },
    FiniteDiscrete(FiniteDiscrete),
    /// Density `1 + eps·cos(2πx)` on `[0, 1]`.
    PerturbedUniform { eps: f64 },
}

/// The `k`-th smallest of `m` draws (`k = m` is the maximum).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderStatQuery {
    m: usize,
    k: usize,
}

impl OrderStatQuery {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if k == 0 || k > m {
            return Err(Error::Precondition(format!(
                "order statistic {k} of {m} draws"
            )));
        }
        Ok(OrderStatQuery { m, k })
    }

    pub fn m(self) -> usize {
        self.m
    }

    pub fn k(self) -> usize {
        self.k
    }
}

impl DistributionSpec {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "Bernoulli parameter {p} outside (0, 1)"
            )));
        }
        Ok(DistributionSpec::Bernoulli { p })
    }

    pub fn perturbed(eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidDistribution(format!(
                "perturbation {eps} outside [0, 1)"
            )));
        }
        Ok(DistributionSpec::PerturbedUniform { eps })
    }

    pub fn discrete(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        FiniteDiscrete::new(atoms, probs).map(DistributionSpec::FiniteDiscrete)
    }

    pub fn point_mass(c: f64) -> Result<Self> {
        Self::discrete(vec![c], vec![1.0])
    }

    /// Atom view for distributions with finite support.
    pub fn to_discrete(&self) -> Option<FiniteDiscrete> {
        match self {
            DistributionSpec::Bernoulli { p } => {
                Some(FiniteDiscrete::new(vec![0.0, 1.0], vec![1.0 - p, *p]).expect("valid"))
            }
            DistributionSpec::FiniteDiscrete(fd) => Some(fd.clone()),
            _ => None,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            DistributionSpec::Uniform01 | DistributionSpec::PerturbedUniform { .. } => 0.5,
            DistributionSpec::Bernoulli { p } => *p,
            DistributionSpec::FiniteDiscrete(fd) => {
                fd.atoms.iter().zip(&fd.probs).map(|(a, p)| a * p).sum()
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            DistributionSpec::Uniform01 => 1.0 / 12.0,
            // ∫ x² cos(2πx) dx over [0, 1] is 1/(2π²).
            DistributionSpec::PerturbedUniform { eps } => 1.0 / 12.0 + eps / (2.0 * PI * PI),
            DistributionSpec::Bernoulli { p } => p * (1.0 - p),
            DistributionSpec::FiniteDiscrete(fd) => {
                let mu = self.mean();
                fd.atoms
                    .iter()
                    .zip(&fd.probs)
                    .map(|(a, p)| p * (a - mu) * (a - mu))
                    .sum()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self {
            DistributionSpec::Uniform01 => x,
            DistributionSpec::PerturbedUniform { eps } => x + eps * (2.0 * PI * x).sin() / (2.0 * PI),
            DistributionSpec::Bernoulli { p } => 1.0 - p,
            DistributionSpec::FiniteDiscrete(fd) => {
                let i = fd.atoms.partition_point(|&a| a <= x);
                if i == 0 {
                    0.0
                } else {
                    fd.cumulative[i - 1]
                }
            }
        }
    }

    pub fn support_min(&self) -> f64 {
        match self {
            DistributionSpec::FiniteDiscrete(fd) => fd.atoms[0],
            _ => 0.0,
        }
    }

    pub fn support_max(&self) -> f64 {
        match self {
            DistributionSpec::FiniteDiscrete(fd) => *fd.atoms.last().unwrap(),
            _ => 1.0,
        }
    }

    /// `sup { y : P(X ≤ y) ≤ p }`, with `p = 1` mapped to the top of the support.
    pub fn largest_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Precondition(format!("quantile fraction {p} outside (0, 1]")));
        }
        if p == 1.0 {
            return Ok(self.support_max());
        }
        Ok(match self {
            DistributionSpec::Uniform01 => p,
            DistributionSpec::PerturbedUniform { .. } => self.inverse_cdf(p),
            DistributionSpec::Bernoulli { p: b } => {
                if 1.0 - b > p {
                    0.0
                } else {
                    1.0
                }
            }
            DistributionSpec::FiniteDiscrete(fd) => {
                let i = fd.cumulative.partition_point(|&c| c <= p);
                fd.atoms[i.min(fd.atoms.len() - 1)]
            }
        })
    }

    /// The largest median `ν`.
    pub fn largest_median(&self) -> f64 {
        self.largest_quantile(0.5).expect("1/2 is a valid fraction")
    }

    fn inverse_cdf(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        match self {
            DistributionSpec::Uniform01 => u,
            DistributionSpec::PerturbedUniform { eps } => {
                if *eps == 0.0 {
                    u
                } else {
                    self.inverse_cdf(u)
                }
            }
            DistributionSpec::Bernoulli { p } => {
                if u < 1.0 - p {
                    0.0
                } else {
                    1.0
                }
            }
            DistributionSpec::FiniteDiscrete(fd) => fd.atoms[fd.atom_index(u)],
        }
    }

    /// Mass mirrored about 1/2: `P(X ≤ 1/2 − t) = P(X ≥ 1/2 + t)` for all `t`.
    ///
    /// Atoms are paired with a tolerance of `1e-12`. The cosine perturbation
    /// satisfies `cos(2π(1 − x)) = cos(2πx)`, so it is symmetric for every eps.
    pub fn is_symmetric(&self) -> bool {
        match self {
            DistributionSpec::Uniform01 | DistributionSpec::PerturbedUniform { .. } => true,
            DistributionSpec::Bernoulli { p } => *p == 0.5,
            DistributionSpec::FiniteDiscrete(fd) => {
                let n = fd.atoms.len();
                (0..n).all(|i| {
                    let j = n - 1 - i;
                    (fd.atoms[i] + fd.atoms[j] - 1.0).abs() <= 1e-12
                        && (fd.probs[i] - fd.probs[j]).abs() <= 1e-12
                })
            }
        }
    }

    /// `E[X_(k)]` for the query's `m` draws.
    pub fn order_stat_expectation(&self, q: OrderStatQuery) -> Result<f64> {
        match self {
            DistributionSpec::Uniform01 => Ok(q.k as f64 / (q.m as f64 + 1.0)),
            _ => Ok(self.order_stat_expectations(q.m)?[q.k - 1]),
        }
    }

    /// `E[X_(k)]` for `k = 1..=m`, stored at index `k - 1`.
    pub fn order_stat_expectations(&self, m: usize) -> Result<Vec<f64>> {
        if m == 0 {
            return Err(Error::Precondition("order statistics need m ≥ 1".into()));
        }
        match self {
            DistributionSpec::Uniform01 => {
                Ok((1..=m).map(|k| k as f64 / (m as f64 + 1.0)).collect())
            }
            DistributionSpec::Bernoulli { .. } | DistributionSpec::FiniteDiscrete(_) => {
                let fd = self.to_discrete().expect("finite support");
                let table = TailTable::new(m);
                let mut out = vec![fd.atoms[0]; m];
                for i in 1..fd.atoms.len() {
                    let step = fd.atoms[i] - fd.atoms[i - 1];
                    let tails = table.upper_tails(fd.at_least[i]);
                    for (k, e) in out.iter_mut().enumerate() {
                        *e += step * tails[m - k];
                    }
                }
                Ok(out)
            }
            DistributionSpec::PerturbedUniform { eps } => {
                if *eps == 0.0 {
                    return DistributionSpec::Uniform01.order_stat_expectations(m);
                }
                if m > QUAD_MAX_M {
                    return Err(Error::Precondition(format!(
                        "quadrature supports m ≤ {QUAD_MAX_M}"
                    )));
                }
                self.quadrature_order_stats(m)
            }
        }
    }

    /// `E[X_(k)] = ∫₀¹ P(Bin(m, 1 − F(x)) ≥ m − k + 1) dx`, composite Simpson.
    fn quadrature_order_stats(&self, m: usize) -> Result<Vec<f64>> {
        let table = TailTable::new(m);
        let simpson = |panels: usize| -> Vec<f64> {
            let h = 1.0 / panels as f64;
            let mut acc = vec![0.0; m];
            for node in 0..=panels {
                let w = if node == 0 || node == panels {
                    1.0
                } else if node % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let x = node as f64 * h;
                let tails = table.upper_tails(1.0 - self.cdf(x));
                for (k, a) in acc.iter_mut().enumerate() {
                    *a += w * tails[m - k];
                }
            }
            acc.iter().map(|a| a * h / 3.0).collect()
        };
        let mut panels = QUAD_START_PANELS;
        let mut previous = simpson(panels);
        loop {
            panels *= 2;
            let current = simpson(panels);
            let change = previous
                .iter()
                .zip(&current)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if change < QUAD_TOLERANCE {
                return Ok(current);
            }
            if panels >= QUAD_MAX_PANELS {
                return Err(Error::Quadrature { achieved: change });
            }
            previous = current;
        }
    }
}

/// Half the L1 distance over the union of atoms.
pub fn tv_distance_discrete(d1: &FiniteDiscrete, d2: &FiniteDiscrete) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    while i < d1.len() || j < d2.len() {
        let a = d1.atoms.get(i).copied().unwrap_or(f64::INFINITY);
        let b = d2.atoms.get(j).copied().unwrap_or(f64::INFINITY);
        if a == b {
            total += (d1.probs[i] - d2.probs[j]).abs();
            i += 1;
            j += 1;
        } else if a < b {
            total += d1.probs[i];
            i += 1;
        } else {
            total += d2.probs[j];
            j += 1;
        }
    }
    0.5 * total
}

/// Total variation between the perturbed density and the uniform one.
pub fn tv_bound_perturbed(eps: f64) -> f64 {
    eps / PI
}

/// Quantile fractions `p_1 < ... < p_T` in `(0, 1]` with values `Q_1 ≤ ... ≤ Q_T`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantileList {
    fractions: Vec<f64>,
    values: Vec<f64>,
}

impl QuantileList {
    pub fn new(fractions: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if fractions.is_empty() || fractions.len() != values.len() {
            return Err(Error::Precondition(
                "quantile list needs matching non-empty fractions and values".into(),
            ));
        }
        if fractions.iter().any(|p| !(*p > 0.0 && *p <= 1.0))
            || fractions.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Precondition(
                "fractions must be strictly increasing within (0, 1]".into(),
            ));
        }
        if values.iter().any(|q| !(0.0..=1.0).contains(q)) || values.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::Precondition(
                "quantile values must be non-decreasing within [0, 1]".into(),
            ));
        }
        Ok(QuantileList { fractions, values })
    }

    /// Largest quantiles of `d` at the given fractions.
    pub fn from_distribution(d: &DistributionSpec, fractions: Vec<f64>) -> Result<Self> {
        let values = fractions
            .iter()
            .map(|&p| d.largest_quantile(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(fractions, values)
    }

    /// The grid `p_t = t / T`.
    pub fn uniform_grid(d: &DistributionSpec, t: usize) -> Result<Self> {
        Self::from_distribution(d, (1..=t).map(|i| i as f64 / t as f64).collect())
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractions.is_empty()
    }

    /// `β = Σ_t Q_t (p_{t+1} − p_t)` with `p_{T+1} = 1`.
    pub fn guarantee(&self) -> f64 {
        (0..self.len())
            .map(|t| {
                let next = self.fractions.get(t + 1).copied().unwrap_or(1.0);
                self.values[t] * (next - self.fractions[t])
            })
            .sum()
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Uniform01 => write!(f, "uniform"),
            DistributionSpec::Bernoulli { p } => write!(f, "bernoulli:{p}"),
            DistributionSpec::PerturbedUniform { eps } => write!(f, "perturbed:{eps}"),
            DistributionSpec::FiniteDiscrete(fd) => {
                write!(f, "discrete:")?;
                for (i, (a, p)) in fd.atoms.iter().zip(&fd.probs).enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{a},{p}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_f64(text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("`{}` is not a number", text.trim())))
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a)),
            None => (s, None),
        };
        match (kind, arg) {
            ("uniform", None) => Ok(DistributionSpec::Uniform01),
            ("bernoulli", Some(a)) => Self::bernoulli(parse_f64(a)?),
            ("perturbed", Some(a)) => Self::perturbed(parse_f64(a)?),
            ("point", Some(a)) => Self::point_mass(parse_f64(a)?),
            ("discrete", Some(a)) => {
                let mut atoms = Vec::new();
                let mut probs = Vec::new();
                for pair in a.split(';').filter(|t| !t.trim().is_empty()) {
                    let (v, p) = pair
                        .split_once(',')
                        .ok_or_else(|| Error::Parse(format!("atom `{pair}` is not `value,prob`")))?;
                    atoms.push(parse_f64(v)?);
                    probs.push(parse_f64(p)?);
                }
                Self::discrete(atoms, probs)
            }
            _ => Err(Error::Parse(format!("unknown distribution `{s}`"))),
        }
    }
}
