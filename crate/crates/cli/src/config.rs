//! Optional TOML budgets. Command-line flags override every value here.

use std::path::Path;

use nearrack::nichols::{NicholsOptions, RankMode};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Degree cutoff for graded dimensions.
    pub cutoff: Option<usize>,
    pub mode: Option<RankMode>,
    /// Largest admissible `dim(V)^n`; the memory budget of a symmetrizer.
    pub max_words: Option<u64>,
    /// Primes that must agree in modular mode.
    pub primes: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    /// Defaults, then the file, then the flags.
    pub fn nichols_options(&self, cutoff: Option<usize>, mode: Option<RankMode>) -> NicholsOptions {
        let mut opts = NicholsOptions::default();
        if let Some(c) = self.cutoff {
            opts.cutoff = c;
        }
        if let Some(m) = self.mode {
            opts.mode = m;
        }
        if let Some(w) = self.max_words {
            opts.max_words = u128::from(w);
        }
        if let Some(p) = self.primes {
            opts.primes = p;
        }
        if let Some(c) = cutoff {
            opts.cutoff = c;
        }
        if let Some(m) = mode {
            opts.mode = m;
        }
        opts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let cfg = Config::parse("cutoff = 5\nmode = \"exact\"\nmax_words = 100\n").unwrap();
        let opts = cfg.nichols_options(None, None);
        assert_eq!((opts.cutoff, opts.mode, opts.max_words), (5, RankMode::Exact, 100));
        let opts = cfg.nichols_options(Some(9), Some(RankMode::Modular));
        assert_eq!((opts.cutoff, opts.mode), (9, RankMode::Modular));
        assert!(Config::parse("budget = 3").is_err());
    }
}
