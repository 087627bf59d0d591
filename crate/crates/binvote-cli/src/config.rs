//! Experiment configuration: a `key = value` file merged with flags.

use std::fs;
use std::path::{Path, PathBuf};

use binvote::constructions::{construct, ConstructedInstance};
use binvote::{DistributionSpec, GroupedProfile, PreferenceProfile, RuleSpec};

use crate::CliError;

/// Where the profile comes from. Exactly one per experiment.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileSource {
    Inline(String),
    File(PathBuf),
    Construction(String),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    pub profile: Vec<ProfileSource>,
    pub distribution: Option<String>,
    pub rule: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("`{key}` expects a non-negative integer, got `{value}`")))
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("line {}: expected `key = value`", lineno + 1)));
            };
            let (key, value) = (key.trim(), value.trim().to_string());
            match key {
                "profile" => cfg.profile.push(ProfileSource::Inline(value)),
                "profile_file" => cfg.profile.push(ProfileSource::File(value.into())),
                "construction" => cfg.profile.push(ProfileSource::Construction(value)),
                "distribution" => cfg.distribution = Some(value),
                "rule" => cfg.rule = Some(value),
                "trials" => cfg.trials = Some(parse_num(key, &value)?),
                "seed" => cfg.seed = Some(parse_num(key, &value)?),
                "workers" => cfg.workers = Some(parse_num(key, &value)?),
                "out" => cfg.out = Some(value.into()),
                _ => return Err(CliError::Usage(format!("line {}: unknown key `{key}`", lineno + 1))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Values set in `other` replace ours; profile sources accumulate.
    pub fn merge(mut self, other: ExperimentConfig) -> Self {
        self.profile.extend(other.profile);
        self.distribution = other.distribution.or(self.distribution);
        self.rule = other.rule.or(self.rule);
        self.trials = other.trials.or(self.trials);
        self.seed = other.seed.or(self.seed);
        self.workers = other.workers.or(self.workers);
        self.out = other.out.or(self.out);
        self
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage("a master seed is required (--seed or `seed =`)".into()))
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(1)
    }

    pub fn rule(&self) -> Result<RuleSpec, CliError> {
        let text = self
            .rule
            .as_deref()
            .ok_or_else(|| CliError::Usage("a rule is required (--rule or `rule =`)".into()))?;
        text.parse().map_err(CliError::from)
    }

    /// Resolves the single profile source. A construction also supplies a
    /// default distribution.
    pub fn load_profile(&self) -> Result<(GroupedProfile, Option<ConstructedInstance>), CliError> {
        let source = match self.profile.as_slice() {
            [one] => one,
            [] => return Err(CliError::Usage("no profile source given".into())),
            _ => return Err(CliError::Usage("give exactly one profile source".into())),
        };
        match source {
            ProfileSource::Inline(text) => {
                let p = PreferenceProfile::parse_inline(text).map_err(CliError::from)?;
                Ok((GroupedProfile::from(&p), None))
            }
            ProfileSource::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read profile {}: {e}", path.display())))?;
                let p = PreferenceProfile::parse(&text).map_err(CliError::from)?;
                Ok((GroupedProfile::from(&p), None))
            }
            ProfileSource::Construction(spec) => {
                let inst = parse_construction(spec)?;
                Ok((inst.profile.clone(), Some(inst)))
            }
        }
    }

    pub fn distribution(&self, inst: Option<&ConstructedInstance>) -> Result<DistributionSpec, CliError> {
        match (&self.distribution, inst) {
            (Some(text), _) => text.parse().map_err(CliError::from),
            (None, Some(inst)) => Ok(inst.distributions[0].clone()),
            (None, None) => Err(CliError::Usage("a distribution is required (--dist or `distribution =`)".into())),
        }
    }
}

/// `"thm2 m=32 n=1000"` → the constructed instance.
pub fn parse_construction(spec: &str) -> Result<ConstructedInstance, CliError> {
    let mut parts = spec.split_whitespace();
    let name = parts
        .next()
        .ok_or_else(|| CliError::Usage("empty construction".into()))?;
    let args = parse_args(parts)?;
    Ok(construct(name, &args)?)
}

pub fn parse_args<'a>(parts: impl Iterator<Item = &'a str>) -> Result<Vec<(String, f64)>, CliError> {
    parts
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| CliError::Usage(format!("`{k}` expects a number, got `{v}`")))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_merges() {
        let file = ExperimentConfig::parse("# demo\nprofile = 1 2; 2 1\nrule = borda\nseed = 4\n").unwrap();
        let flags = ExperimentConfig {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = file.merge(flags);
        assert_eq!(cfg.seed().unwrap(), 9);
        assert_eq!(cfg.rule.as_deref(), Some("borda"));
        assert_eq!(cfg.load_profile().unwrap().0.n(), 2);
    }

    #[test]
    fn one_profile_source() {
        let cfg = ExperimentConfig::parse("profile = 1 2\nconstruction = thm4 alpha=0.4\n").unwrap();
        assert!(matches!(cfg.load_profile(), Err(CliError::Usage(_))));
        assert!(matches!(ExperimentConfig::default().load_profile(), Err(CliError::Usage(_))));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(ExperimentConfig::parse("colour = red").is_err());
        assert!(ExperimentConfig::parse("trials = -3").is_err());
        assert!(ExperimentConfig::parse("just words").is_err());
    }
}
