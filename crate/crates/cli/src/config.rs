//! Run configuration: JSON file with a versioned schema, overridden by flags.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub m: u32,
    pub k: u32,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig { m: 2, k: 1 }
    }
}

/// The persistent configuration half of a run; command parameters come from
/// the subcommand flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub schema_version: u32,
    pub space: SpaceConfig,
    pub seed: u64,
    pub xi_max: f64,
    pub refine: usize,
    pub r0: f64,
    pub output: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: 1,
            space: SpaceConfig::default(),
            seed: 42,
            xi_max: 60.0,
            refine: 1,
            r0: 1.0,
            output: "out".into(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&str>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {p}"))?;
                serde_json::from_str::<RunConfig>(&text).with_context(|| format!("parsing config {p}"))?
            }
            None => RunConfig::default(),
        };
        if cfg.schema_version != 1 {
            bail!("unsupported config schema_version {}", cfg.schema_version);
        }
        if cfg.refine == 0 {
            cfg.refine = 1;
        }
        Ok(cfg)
    }
}

/// Parses a complex number of the form `a`, `bi`, `a+bi`, `a-bi`.
pub fn parse_complex(s: &str) -> Result<num_complex::Complex64> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        bail!("empty complex literal");
    }
    if let Some(im_part) = t.strip_suffix('i') {
        // split at the last +/- that is not an exponent sign or leading sign
        let bytes = im_part.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = im_part[..i].parse().with_context(|| format!("bad real part in '{s}'"))?;
                let im_str = &im_part[i..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().with_context(|| format!("bad imaginary part in '{s}'"))?
                };
                Ok(num_complex::Complex64::new(re, im))
            }
            None => {
                let im: f64 = if im_part.is_empty() {
                    1.0
                } else {
                    im_part.parse().with_context(|| format!("bad imaginary part in '{s}'"))?
                };
                Ok(num_complex::Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().with_context(|| format!("bad complex literal '{s}'"))?;
        Ok(num_complex::Complex64::new(re, 0.0))
    }
}

/// Parses `start:stop:count` into a uniform grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("grid must be start:stop:count, got '{s}'");
    }
    let start: f64 = parts[0].parse()?;
    let stop: f64 = parts[1].parse()?;
    let count: usize = parts[2].parse()?;
    if count < 1 || stop < start {
        bail!("bad grid '{s}'");
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1.5").unwrap(), num_complex::Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("1.5+0.2i").unwrap(), num_complex::Complex64::new(1.5, 0.2));
        assert_eq!(parse_complex("-2e-3-4i").unwrap(), num_complex::Complex64::new(-2e-3, -4.0));
        assert_eq!(parse_complex("0.7i").unwrap(), num_complex::Complex64::new(0.0, 0.7));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:2:3").unwrap(), vec![0.0, 1.0, 2.0]);
        assert!(parse_grid("2:0:3").is_err());
    }
}
