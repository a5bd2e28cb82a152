//! `key = value` configuration files with `#` comments.
//!
//! | key | meaning |
//! |-----|---------|
//! | `grid.n` | points per axis |
//! | `sweep.taus` | decreasing aspect ratios, comma or space separated |
//! | `time.T` | final time |
//! | `time.dt` | largest time step |
//! | `time.record_every` | spacing of record times (time units) |
//! | `time.cfl` | CFL safety factor in (0, 1] |
//! | `ic.seed` | RNG seed |
//! | `ic.decay` | spectral decay exponent |
//! | `ic.cutoff` | largest mode index per axis |
//! | `ic.amplitude` | rms of `v` and of `ρ` |
//! | `solver.tau` | aspect ratio for single Boussinesq runs |
//! | `out.dir` | output directory |

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::sweep::SweepConfig;

pub const KNOWN_KEYS: [&str; 12] = [
    "grid.n",
    "sweep.taus",
    "time.T",
    "time.dt",
    "time.record_every",
    "time.cfl",
    "ic.seed",
    "ic.decay",
    "ic.cutoff",
    "ic.amplitude",
    "solver.tau",
    "out.dir",
];

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    value: String,
    /// 0 for command-line overrides.
    line: usize,
}

/// Parsed settings, keyed by name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    entries: BTreeMap<String, Entry>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, found `{content}`")))?;
            let key = key.trim();
            if out.entries.contains_key(key) {
                return Err(err(line, format!("duplicate key `{key}`")));
            }
            out.insert(key, value.trim(), line)?;
        }
        Ok(out)
    }

    fn insert(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(err(line, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(err(line, format!("empty value for `{key}`")));
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
            },
        );
        Ok(())
    }

    /// Applies a `key=value` override from the command line.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| err(0, format!("override `{assignment}` is not `key=value`")))?;
        self.insert(key.trim(), value.trim(), 0)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| err(e.line, format!("cannot parse `{}` for `{key}`", e.value))),
        }
    }

    pub fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| err(e.line, format!("cannot parse `{s}` in `{key}`"))))
                .collect::<Result<Vec<f64>>>()
                .map(Some),
        }
    }

    pub fn out_dir(&self) -> Result<Option<PathBuf>> {
        self.get::<PathBuf>("out.dir")
    }

    /// Sweep configuration; missing keys keep their defaults.
    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let mut c = SweepConfig::default();
        if let Some(v) = self.get_list("sweep.taus")? {
            c.taus = v;
        }
        if let Some(v) = self.get("grid.n")? {
            c.n = v;
        }
        if let Some(v) = self.get("time.T")? {
            c.t_end = v;
        }
        if let Some(v) = self.get("time.dt")? {
            c.dt = v;
        }
        if let Some(v) = self.get("time.record_every")? {
            c.record_interval = Some(v);
        }
        if let Some(v) = self.get("time.cfl")? {
            c.cfl_safety = v;
        }
        if let Some(v) = self.get("ic.seed")? {
            c.seed = v;
        }
        if let Some(v) = self.get("ic.decay")? {
            c.spectrum.decay = v;
        }
        if let Some(v) = self.get("ic.cutoff")? {
            c.spectrum.cutoff = v;
        }
        if let Some(v) = self.get("ic.amplitude")? {
            c.spectrum.amplitude = v;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sweep_file() {
        let text = "# sweep\ngrid.n = 16\nsweep.taus = 0.2, 0.1 0.05\n\ntime.T = 0.1   # short\nic.seed=3\nout.dir = out/a\n";
        let s = Settings::parse(text).unwrap();
        let c = s.sweep_config().unwrap();
        assert_eq!(c.n, 16);
        assert_eq!(c.taus, vec![0.2, 0.1, 0.05]);
        assert_eq!(c.t_end, 0.1);
        assert_eq!(c.seed, 3);
        assert_eq!(c.spectrum.decay, 4.0);
        assert_eq!(s.out_dir().unwrap(), Some(PathBuf::from("out/a")));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = Settings::parse("grid.n = 8\n\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 3, .. }), "{e}");
        let e = Settings::parse("grid.n 8\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
        let s = Settings::parse("x\n".replace('x', "time.T = abc").as_str()).unwrap();
        assert!(matches!(s.sweep_config(), Err(Error::Config { line: 1, .. })));
        assert!(Settings::parse("grid.n = 8\ngrid.n = 16\n").is_err());
    }

    #[test]
    fn overrides() {
        let mut s = Settings::parse("grid.n = 8\n").unwrap();
        s.set("grid.n=16").unwrap();
        assert_eq!(s.get::<usize>("grid.n").unwrap(), Some(16));
        assert!(s.set("nope=1").is_err());
        assert!(s.set("grid.n").is_err());
    }
}
