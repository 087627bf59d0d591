//! Generators for the adversarial instances behind the separation results.
//!
//! Every generator checks its parameter constraints, stores the values it
//! actually achieved after rounding, and can re-check them later.

use std::fmt;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::model::{GroupedProfile, PreferenceProfile, Ranking};

/// Largest `groups × m` a generator will materialize.
const MAX_CELLS: usize = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    DistortionRatio,
    WelfareRatio,
    InverseDistortionGap,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::DistortionRatio => "distortion-ratio",
            BoundKind::WelfareRatio => "welfare-ratio",
            BoundKind::InverseDistortionGap => "inverse-distortion-gap",
        })
    }
}

/// Welfare separation: alternative 1 has the most first places, alternative
/// 2 is second everywhere, and a rare huge utility drives the distortion.
#[derive(Clone, Debug, PartialEq)]
pub struct Thm2Params {
    pub m: usize,
    pub n: u64,
    pub first_places_alt1: u64,
    pub max_first_places_other: u64,
    pub atoms: [f64; 3],
    pub probs: [f64; 3],
}

/// No single alternative is near-optimal for two close Bernoulli means.
#[derive(Clone, Debug, PartialEq)]
pub struct Thm4Params {
    pub alpha: f64,
    pub mu: f64,
    pub delta: f64,
    pub m: usize,
    pub n: u64,
    /// `round((μ − δ) m)`.
    pub nominal_rank: usize,
    /// Rank given to alternative 1 by every voter.
    pub rank: usize,
}

/// Uniform versus fair-coin tension over symmetric distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct Thm6Params {
    pub m: usize,
    pub n: u64,
    pub offset: usize,
    pub rank_alt1: usize,
    pub rank_alt2: usize,
    pub voters_p: u64,
    pub voters_q: u64,
    pub p_achieved: f64,
    pub q_achieved: f64,
}

/// Latin square with a rare unit utility: randomization beats every
/// deterministic choice in inverse distortion.
#[derive(Clone, Debug, PartialEq)]
pub struct AppendixCParams {
    pub eps: f64,
    pub n: u64,
    pub m: usize,
    pub small_atom: f64,
    pub rare_prob: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceParams {
    Thm2(Thm2Params),
    Thm4(Thm4Params),
    Thm6(Thm6Params),
    AppendixC(AppendixCParams),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructedInstance {
    pub name: &'static str,
    pub profile: GroupedProfile,
    pub distributions: Vec<DistributionSpec>,
    pub params: InstanceParams,
    pub claimed_bound: f64,
    pub bound_kind: BoundKind,
    pub notes: Vec<String>,
}

impl ConstructedInstance {
    /// Re-checks every constraint on the stored parameters.
    pub fn check(&self) -> Result<()> {
        self.params.check()
    }

    /// Parameter record as name/value pairs, in a fixed order.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        self.params.record()
    }

    /// Plain-text manifest: one `key = value` line per entry.
    pub fn manifest(&self) -> String {
        let mut out = format!("instance = {}\n", self.name);
        for (k, v) in self.parameters() {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str(&format!("claimed_bound = {}\n", self.claimed_bound));
        out.push_str(&format!("bound_kind = {}\n", self.bound_kind));
        for (i, d) in self.distributions.iter().enumerate() {
            out.push_str(&format!("distribution_{} = {d}\n", i + 1));
        }
        for note in &self.notes {
            out.push_str(&format!("note = {note}\n"));
        }
        out
    }
}

fn require(ok: bool, inequality: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Constraint(inequality.into()))
    }
}

impl InstanceParams {
    pub fn check(&self) -> Result<()> {
        match self {
            InstanceParams::Thm2(p) => {
                let n = p.n as f64;
                let m = p.m as f64;
                require(p.m >= 5, format!("m >= 5 (m = {})", p.m))?;
                require(
                    n.sqrt() / n.ln() >= m,
                    format!("sqrt(n)/ln(n) >= m ({:.4} < {m})", n.sqrt() / n.ln()),
                )?;
                require(
                    m >= 2.0 * n.ln() + 2.0,
                    format!("m >= 2 ln(n) + 2 ({m} < {:.4})", 2.0 * n.ln() + 2.0),
                )?;
                require(
                    p.first_places_alt1 > p.max_first_places_other,
                    format!(
                        "first places of alternative 1 exceed every other ({} <= {})",
                        p.first_places_alt1, p.max_first_places_other
                    ),
                )?;
                require(
                    p.max_first_places_other <= p.n.div_ceil(p.m as u64 - 1),
                    "other alternatives are first for at most ceil(n/(m-1)) voters",
                )?;
                let total: f64 = p.probs.iter().sum();
                require((total - 1.0).abs() <= 1e-15, format!("probabilities sum to 1 ({total})"))?;
                require(p.atoms.windows(2).all(|w| w[0] < w[1]), "atoms ascending")?;
                Ok(())
            }
            InstanceParams::Thm4(p) => {
                require(p.alpha > 0.0 && p.alpha <= 0.5, format!("0 < alpha <= 0.5 (alpha = {})", p.alpha))?;
                require((p.mu - p.alpha / 4.0).abs() < 1e-15, "mu = alpha/4")?;
                require((p.delta - p.alpha * p.alpha / 4.0).abs() < 1e-15, "delta = alpha^2/4")?;
                require(
                    exp_bound(p.m, p.delta) <= p.delta,
                    "exp(-2 m delta^2) <= delta",
                )?;
                require(
                    p.m == 1 || exp_bound(p.m - 1, p.delta) > p.delta,
                    "m is the smallest integer with exp(-2 m delta^2) <= delta",
                )?;
                require(p.n + 1 == p.m as u64, "n = m - 1")?;
                require(p.rank >= 1 && p.rank <= p.m, "1 <= rank <= m")?;
                Ok(())
            }
            InstanceParams::Thm6(p) => {
                require(p.m % 2 == 0, format!("m even (m = {})", p.m))?;
                require(
                    p.m / 2 >= p.offset + 2,
                    format!("m/2 - offset >= 2 ({} - {} < 2)", p.m / 2, p.offset),
                )?;
                require(p.rank_alt1 + p.offset == p.m / 2, "rank of alternative 1 = m/2 - offset")?;
                require(p.rank_alt2 == p.m / 2 + p.offset, "rank of alternative 2 = m/2 + offset")?;
                require(
                    p.n % (p.m as u64 - 2) == 0,
                    format!("(m - 2) divides n ({} mod {} != 0)", p.n, p.m - 2),
                )?;
                require(p.voters_q <= p.voters_p && p.voters_p <= p.n, "q n <= p n <= n")?;
                let half_step = 0.5 / p.n as f64 + 1e-15;
                require((p.p_achieved - 0.75f64.sqrt()).abs() <= half_step, "|p' - sqrt(0.75)| <= 1/(2n)")?;
                require((p.q_achieved - 0.5).abs() <= half_step, "|q' - 0.5| <= 1/(2n)")?;
                Ok(())
            }
            InstanceParams::AppendixC(p) => {
                require(p.eps > 0.0 && p.eps < 1.0, format!("0 < eps < 1 (eps = {})", p.eps))?;
                require(p.n == 100 && p.m == 100, "n = m = 100")?;
                let nm = (p.n as f64) * p.m as f64;
                require(p.small_atom == p.eps / (2.0 * nm), "small atom = eps/(2nm)")?;
                require(p.rare_prob == 1.0 / nm, "rare probability = 1/(nm)")?;
                Ok(())
            }
        }
    }

    pub fn record(&self) -> Vec<(&'static str, f64)> {
        match self {
            InstanceParams::Thm2(p) => vec![
                ("m", p.m as f64),
                ("n", p.n as f64),
                ("first_places_alt1", p.first_places_alt1 as f64),
                ("max_first_places_other", p.max_first_places_other as f64),
                ("atom_low", p.atoms[0]),
                ("atom_mid", p.atoms[1]),
                ("atom_high", p.atoms[2]),
                ("prob_low", p.probs[0]),
                ("prob_mid", p.probs[1]),
                ("prob_high", p.probs[2]),
            ],
            InstanceParams::Thm4(p) => vec![
                ("alpha", p.alpha),
                ("mu", p.mu),
                ("delta", p.delta),
                ("m", p.m as f64),
                ("n", p.n as f64),
                ("nominal_rank", p.nominal_rank as f64),
                ("rank", p.rank as f64),
            ],
            InstanceParams::Thm6(p) => vec![
                ("m", p.m as f64),
                ("n", p.n as f64),
                ("offset", p.offset as f64),
                ("rank_alt1", p.rank_alt1 as f64),
                ("rank_alt2", p.rank_alt2 as f64),
                ("voters_p", p.voters_p as f64),
                ("voters_q", p.voters_q as f64),
                ("p_achieved", p.p_achieved),
                ("q_achieved", p.q_achieved),
            ],
            InstanceParams::AppendixC(p) => vec![
                ("eps", p.eps),
                ("n", p.n as f64),
                ("m", p.m as f64),
                ("small_atom", p.small_atom),
                ("rare_prob", p.rare_prob),
            ],
        }
    }
}

fn exp_bound(m: usize, delta: f64) -> f64 {
    (-2.0 * m as f64 * delta * delta).exp()
}

/// Splits `total` voters over `parts` slots, earlier slots taking the extra.
fn spread(total: u64, parts: usize) -> impl Iterator<Item = u64> {
    let base = total / parts as u64;
    let extra = total % parts as u64;
    (0..parts as u64).map(move |i| base + u64::from(i < extra))
}

fn rotated(pool: &[u32], shift: usize) -> impl Iterator<Item = u32> + '_ {
    let len = pool.len();
    (0..len).map(move |s| pool[(s + shift) % len])
}

/// Places `fixed` alternatives at fixed 1-based ranks and fills the free
/// ranks with `pool` rotated by `shift`.
fn ranking_with(m: usize, fixed: &[(usize, u32)], pool: &[u32], shift: usize) -> Ranking {
    let mut order = vec![0u32; m];
    for &(rank, alt) in fixed {
        order[rank - 1] = alt;
    }
    let mut fill = rotated(pool, shift);
    for slot in order.iter_mut().filter(|a| **a == 0) {
        *slot = fill.next().expect("pool covers the free ranks");
    }
    Ranking::new_unchecked(order)
}

fn check_size(groups: usize, m: usize) -> Result<()> {
    require(
        groups.saturating_mul(m) <= MAX_CELLS,
        format!("instance size {groups} x {m} exceeds {MAX_CELLS} ranking cells"),
    )
}

/// Instance separating the expected-welfare winner (alternative 1) from the
/// expected-distortion winner (alternative 2).
///
/// Alternative 1 is first for `⌈n/(m−1)⌉ + 1` voters and last for the rest;
/// the remaining first places go round-robin to alternatives `3..=m`, so none
/// of them exceeds `⌈n/(m−1)⌉`. Exact divisibility of `n` by `m − 1` is not
/// required.
pub fn thm2_instance(m: usize, n: u64) -> Result<ConstructedInstance> {
    require(m >= 5, format!("m >= 5 (m = {m})"))?;
    require(n >= 2, "n >= 2")?;
    let nf = n as f64;
    let mf = m as f64;
    let low = 1.0 - (-(mf.ln()) / mf).exp();
    let high = 1.0 / (nf * nf * mf);
    let mid = (-(mf.ln()) / mf).exp() - high;
    let scale = 1.0 / (nf.powi(4) * mf);
    let atoms = [scale, nf * scale, 1.0];
    let first_alt1 = n.div_ceil(m as u64 - 1) + 1;
    let rest = n.saturating_sub(first_alt1);
    let max_other = rest.div_ceil(m as u64 - 2);
    let params = Thm2Params {
        m,
        n,
        first_places_alt1: first_alt1,
        max_first_places_other: max_other,
        atoms,
        probs: [low, mid, high],
    };
    let params = InstanceParams::Thm2(params);
    params.check()?;
    check_size((m - 2) * (m - 2), m)?;

    let others: Vec<u32> = (3..=m as u32).collect();
    let mut groups = Vec::new();
    for (shift, count) in spread(first_alt1, m - 2).enumerate() {
        groups.push((ranking_with(m, &[(1, 1), (2, 2)], &others, shift), count));
    }
    for (i, first_count) in spread(rest, m - 2).enumerate() {
        let a = others[i];
        let pool: Vec<u32> = others.iter().copied().filter(|&x| x != a).collect();
        for (shift, count) in spread(first_count, m - 3).enumerate() {
            groups.push((ranking_with(m, &[(1, a), (2, 2), (m, 1)], &pool, shift), count));
        }
    }
    let profile = GroupedProfile::new(groups)?;
    let d = DistributionSpec::discrete(atoms.to_vec(), vec![low, mid, high])?;
    Ok(ConstructedInstance {
        name: "thm2",
        profile,
        distributions: vec![d],
        params,
        claimed_bound: 16.0 / mf,
        bound_kind: BoundKind::DistortionRatio,
        notes: vec![
            "utilities scaled by 1/(n^4 m) into [0, 1]".into(),
            "claimed bound is on E[dist(welfare winner)] / E[dist(distortion winner)]".into(),
        ],
    })
}

/// Two Bernoulli distributions no alternative serves within factor `alpha`.
///
/// Alternative 1 sits at rank `round((μ − δ/2) m)` for every voter. The
/// nominal rank `round((μ − δ) m)` is recorded but not used: at that rank
/// alternative 1 keeps about half its top-rank mass under `Bernoulli(μ − δ)`
/// and wins there, which defeats the separation (see
/// [`thm4_instance_at_rank`]).
pub fn thm4_instance(alpha: f64) -> Result<ConstructedInstance> {
    thm4_build(alpha, None)
}

/// The same instance with alternative 1 at an explicit rank.
pub fn thm4_instance_at_rank(alpha: f64, rank: usize) -> Result<ConstructedInstance> {
    thm4_build(alpha, Some(rank))
}

fn thm4_build(alpha: f64, rank: Option<usize>) -> Result<ConstructedInstance> {
    require(alpha > 0.0 && alpha <= 0.5, format!("0 < alpha <= 0.5 (alpha = {alpha})"))?;
    let mu = alpha / 4.0;
    let delta = alpha * alpha / 4.0;
    let mut m = ((1.0 / delta).ln() / (2.0 * delta * delta)).ceil().max(1.0) as usize;
    while m > 1 && exp_bound(m - 1, delta) <= delta {
        m -= 1;
    }
    while exp_bound(m, delta) > delta {
        m += 1;
    }
    require(m >= 2, "m >= 2")?;
    check_size(m - 1, m)?;
    let mf = m as f64;
    let nominal_rank = (((mu - delta) * mf).round() as usize).max(1);
    let rank = rank.unwrap_or_else(|| (((mu - delta / 2.0) * mf).round() as usize).max(1));
    let params = InstanceParams::Thm4(Thm4Params {
        alpha,
        mu,
        delta,
        m,
        n: m as u64 - 1,
        nominal_rank,
        rank,
    });
    params.check()?;
    let pool: Vec<u32> = (2..=m as u32).collect();
    let groups = (0..m - 1)
        .map(|i| (ranking_with(m, &[(rank, 1)], &pool, i), 1))
        .collect();
    Ok(ConstructedInstance {
        name: "thm4",
        profile: GroupedProfile::new(groups)?,
        distributions: vec![
            DistributionSpec::bernoulli(mu - delta)?,
            DistributionSpec::bernoulli(mu)?,
        ],
        params,
        claimed_bound: alpha,
        bound_kind: BoundKind::WelfareRatio,
        notes: vec![format!(
            "alternative 1 placed at rank {rank}; nominal rank round((mu - delta) m) = {nominal_rank}"
        )],
    })
}

/// Uniform versus `Bernoulli(1/2)` instance with `(p, q) = (√0.75, 0.5)`.
///
/// Voters `[0, qn)` put alternative 2 first and alternative 1 at `m/2 − o`;
/// voters `[qn, pn)` put alternative 1 at `m/2 − o` and 2 at `m/2 + o`;
/// the rest put 2 at `m/2 + o` and 1 last, with `o = round(ln(m) √m)`.
pub fn thm6_instance(m: usize, n: u64) -> Result<ConstructedInstance> {
    require(m >= 4 && m.is_multiple_of(2), format!("m even and >= 4 (m = {m})"))?;
    let mf = m as f64;
    let offset = (mf.ln() * mf.sqrt()).round() as usize;
    require(
        m / 2 >= offset + 2,
        format!("m/2 - offset >= 2 ({} - {offset} < 2)", m / 2),
    )?;
    let voters_p = (0.75f64.sqrt() * n as f64).round() as u64;
    let voters_q = (0.5 * n as f64).round() as u64;
    let params = Thm6Params {
        m,
        n,
        offset,
        rank_alt1: m / 2 - offset,
        rank_alt2: m / 2 + offset,
        voters_p,
        voters_q,
        p_achieved: voters_p as f64 / n as f64,
        q_achieved: voters_q as f64 / n as f64,
    };
    let (r1, r2) = (params.rank_alt1, params.rank_alt2);
    let params = InstanceParams::Thm6(params);
    params.check()?;
    check_size(3 * (m - 2), m)?;
    let pool: Vec<u32> = (3..=m as u32).collect();
    let blocks: [(&[(usize, u32)], u64); 3] = [
        (&[(1, 2), (r1, 1)], voters_q),
        (&[(r1, 1), (r2, 2)], voters_p - voters_q),
        (&[(r2, 2), (m, 1)], n - voters_p),
    ];
    let mut groups = Vec::new();
    for (fixed, size) in blocks {
        for (shift, count) in spread(size, m - 2).enumerate() {
            groups.push((ranking_with(m, fixed, &pool, shift), count));
        }
    }
    Ok(ConstructedInstance {
        name: "thm6",
        profile: GroupedProfile::new(groups)?,
        distributions: vec![DistributionSpec::Uniform01, DistributionSpec::bernoulli(0.5)?],
        params,
        claimed_bound: (1.0f64 / 3.0).sqrt(),
        bound_kind: BoundKind::WelfareRatio,
        notes: vec![
            "claimed bound is the large-m target; finite m adds slack of order ln(m)/sqrt(m)".into(),
        ],
    })
}

/// Latin-square instance with a rare unit utility.
pub fn appendix_c_instance(eps: f64) -> Result<ConstructedInstance> {
    require(eps > 0.0 && eps < 1.0, format!("0 < eps < 1 (eps = {eps})"))?;
    let (n, m) = (100u64, 100usize);
    let nm = (n as f64) * m as f64;
    let small_atom = eps / (2.0 * nm);
    let rare_prob = 1.0 / nm;
    let params = InstanceParams::AppendixC(AppendixCParams {
        eps,
        n,
        m,
        small_atom,
        rare_prob,
    });
    params.check()?;
    let profile = GroupedProfile::from(&latin_square_profile(n as usize, m)?);
    Ok(ConstructedInstance {
        name: "appendixC",
        profile,
        distributions: vec![DistributionSpec::discrete(
            vec![small_atom, 1.0],
            vec![1.0 - rare_prob, rare_prob],
        )?],
        params,
        claimed_bound: 1.0 / (2.0 * eps),
        bound_kind: BoundKind::InverseDistortionGap,
        notes: vec!["claimed gap factor holds asymptotically".into()],
    })
}

/// Voter `i` ranks alternative `((i + k − 2) mod m) + 1` at position `k`.
pub fn latin_square_profile(n: usize, m: usize) -> Result<PreferenceProfile> {
    require(n == m && m >= 1, format!("Latin square needs n = m >= 1 (n = {n}, m = {m})"))?;
    let rankings = (1..=n)
        .map(|i| Ranking::new_unchecked((1..=m).map(|k| ((i + k - 2) % m + 1) as u32).collect()))
        .collect();
    PreferenceProfile::new(rankings)
}

/// `k` voters rank `(1, 2)`, the other `n − k` rank `(2, 1)`.
pub fn two_alt_profile(n: usize, k: usize) -> Result<PreferenceProfile> {
    require(n >= 1 && k <= n, format!("need 0 <= k <= n and n >= 1 (n = {n}, k = {k})"))?;
    let rankings = (0..n)
        .map(|i| Ranking::new_unchecked(if i < k { vec![1, 2] } else { vec![2, 1] }))
        .collect();
    PreferenceProfile::new(rankings)
}

/// Generator by name with `key=value` arguments.
pub fn construct(name: &str, args: &[(String, f64)]) -> Result<ConstructedInstance> {
    let get = |key: &str| {
        args.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Parse(format!("construction `{name}` needs `{key}`")))
    };
    let integer = |key: &str| -> Result<u64> {
        let v = get(key)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Parse(format!("`{key}` must be a non-negative integer")));
        }
        Ok(v as u64)
    };
    match name {
        "thm2" => thm2_instance(integer("m")? as usize, integer("n")?),
        "thm4" => thm4_instance(get("alpha")?),
        "thm6" => thm6_instance(integer("m")? as usize, integer("n")?),
        "appendixC" => appendix_c_instance(get("eps")?),
        _ => Err(Error::Parse(format!("unknown construction `{name}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_profile, Alternative, Electorate};

    fn assert_valid(inst: &ConstructedInstance) {
        let orders: Vec<Vec<u32>> = inst
            .profile
            .groups()
            .iter()
            .map(|(r, _)| r.order().to_vec())
            .collect();
        assert!(validate_profile(&orders).is_ok());
        inst.check().unwrap();
    }

    #[test]
    fn thm2_examples() {
        let inst = thm2_instance(32, 1_000_000).unwrap();
        assert_valid(&inst);
        assert_eq!(inst.profile.n(), 1_000_000);
        let d = inst.distributions[0].to_discrete().unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-15);
        let h = inst.profile.histogram();
        let first: Vec<u64> = (1..=32).map(|j| h.count(Alternative::new(j, 32).unwrap(), 1)).collect();
        assert_eq!(first[0], 32_260);
        assert_eq!(first[1], 0);
        assert!(first[2..].iter().all(|&c| c <= 32_259));
        assert_eq!(h.count(Alternative::new(2, 32).unwrap(), 2), 1_000_000);
        assert_eq!(h.count(Alternative::new(1, 32).unwrap(), 32), 1_000_000 - 32_260);

        let err = thm2_instance(5, 100).unwrap_err();
        assert!(err.to_string().contains("sqrt(n)/ln(n) >= m"));
    }

    #[test]
    fn thm4_examples() {
        let inst = thm4_instance(0.4).unwrap();
        assert_valid(&inst);
        let InstanceParams::Thm4(p) = &inst.params else { panic!() };
        assert_eq!((p.m, p.n), (1006, 1005));
        assert!((p.mu - 0.1).abs() < 1e-15 && (p.delta - 0.04).abs() < 1e-15);
        assert_eq!(p.nominal_rank, 60);
        assert!((inst.distributions[0].mean() - (p.mu - p.delta)).abs() < 1e-15);
        assert_eq!(inst.distributions[1].mean(), p.mu);
        assert!(thm4_instance(0.6).is_err());
        let h = inst.profile.histogram();
        assert_eq!(h.count(Alternative::new(1, 1006).unwrap(), p.rank), 1005);
        let j = Alternative::new(500, 1006).unwrap();
        assert!((1..=1006).filter(|&k| k != p.rank).all(|k| h.count(j, k) == 1));
    }

    #[test]
    fn thm6_examples() {
        let inst = thm6_instance(256, 25_400).unwrap();
        assert_valid(&inst);
        let InstanceParams::Thm6(p) = &inst.params else { panic!() };
        assert_eq!((p.offset, p.rank_alt1, p.rank_alt2), (89, 39, 217));
        assert!((p.p_achieved - 0.75f64.sqrt()).abs() <= 0.5 / 25_400.0);
        assert!(thm6_instance(16, 1400).is_err());
        assert!(thm6_instance(256, 25_401).is_err());
        let h = inst.profile.histogram();
        let alt1 = Alternative::new(1, 256).unwrap();
        assert_eq!(h.count(alt1, 39), p.voters_p);
        assert_eq!(h.count(alt1, 256), 25_400 - p.voters_p);
    }

    #[test]
    fn appendix_c_examples() {
        let inst = appendix_c_instance(0.01).unwrap();
        assert_valid(&inst);
        let d = inst.distributions[0].to_discrete().unwrap();
        assert!((d.atoms()[0] - 5e-7).abs() < 1e-20);
        assert_eq!(d.probs()[1], 1e-4);
        assert_eq!(d.probs().iter().sum::<f64>(), 1.0);
        let h = inst.profile.histogram();
        assert!((1..=100).all(|j| (1..=100).all(|k| h.count(Alternative::new(j, 100).unwrap(), k) == 1)));
        assert!(appendix_c_instance(1.0).is_err());
    }

    #[test]
    fn fixtures() {
        let l = latin_square_profile(3, 3).unwrap();
        let orders: Vec<&[u32]> = l.rankings().iter().map(|r| r.order()).collect();
        assert_eq!(orders, vec![&[1, 2, 3][..], &[2, 3, 1], &[3, 1, 2]]);
        let t = two_alt_profile(3, 2).unwrap();
        assert_eq!(t.rankings()[1].order(), &[1, 2]);
        assert_eq!(t.rankings()[2].order(), &[2, 1]);
        assert!(two_alt_profile(3, 4).is_err());
        assert!(latin_square_profile(3, 4).is_err());
        assert_eq!(t.num_voters(), 3);
    }

    #[test]
    fn construct_by_name() {
        let args = vec![("alpha".to_string(), 0.4)];
        assert_eq!(construct("thm4", &args).unwrap().name, "thm4");
        assert!(construct("thm9", &args).is_err());
        assert!(construct("thm2", &args).is_err());
        let manifest = appendix_c_instance(0.01).unwrap().manifest();
        assert!(manifest.contains("bound_kind = inverse-distortion-gap"));
    }
}
