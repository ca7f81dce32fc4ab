//! `key=value` configuration files. Blank lines and `#` comments are ignored.

use std::time::Duration;

use extremal_core::oracle::Budget;
use extremal_core::smoothing::SmoothingConfig;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FileConfig {
    pub smoothing: SmoothingConfig,
    pub budget: Budget,
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("config key {key}: cannot parse {value:?}"))
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = FileConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let s = &mut self.smoothing;
        match key {
            "sigma" => s.sigma = num(key, value)?,
            "sigma_start" => s.sigma_start = num(key, value)?,
            "mu" => s.mu = num(key, value)?,
            "mu1" => s.mu1 = num(key, value)?,
            "mu2" => s.mu2 = num(key, value)?,
            "delta" => s.delta = Some(num(key, value)?),
            "epsilon1" => s.epsilon1 = num(key, value)?,
            "step" => s.step = num(key, value)?,
            "max_iter" => s.max_iter = num(key, value)?,
            "seed" => s.seed = num(key, value)?,
            "penalty_start" => s.penalty_start = num(key, value)?,
            "penalty_end" => s.penalty_end = num(key, value)?,
            "support" => s.support = Some(num(key, value)?),
            "max_nodes" => self.budget.max_nodes = num(key, value)?,
            "max_seconds" => {
                let secs: f64 = num(key, value)?;
                self.budget.max_time = Duration::try_from_secs_f64(secs)
                    .map_err(|_| format!("config key {key}: invalid duration {value:?}"))?;
            }
            _ => return Err(format!("unknown config key {key:?}")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_comments() {
        let cfg = FileConfig::parse("# tuning\nsigma = 0.01\nmax_iter=50 # short\n\nmax_nodes=1000\n").unwrap();
        assert_eq!(cfg.smoothing.sigma, 0.01);
        assert_eq!(cfg.smoothing.max_iter, 50);
        assert_eq!(cfg.budget.max_nodes, 1000);
        assert_eq!(cfg.smoothing.mu1, SmoothingConfig::default().mu1);
    }

    #[test]
    fn rejects_garbage() {
        assert!(FileConfig::parse("sigma").is_err());
        assert!(FileConfig::parse("sigma=abc").is_err());
        assert!(FileConfig::parse("colour=blue").is_err());
    }
}
