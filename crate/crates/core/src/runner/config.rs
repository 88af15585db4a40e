//! Experiment configuration.
//!
//! A config is assembled from an optional flat key=value file plus CLI-style
//! flag pairs; flags override file values, unknown keys are rejected, and
//! every value is range-checked here so the experiment code can assume a
//! valid configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::percolation::Direction;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_RUNS: u64 = 20;
pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const DEFAULT_COLLAPSE_THRESHOLD: f64 = 0.01;
pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_OUT_DIR: &str = "out";
pub const DEFAULT_FR_GRID: &str = "0:0.8:0.2";

const KNOWN_KEYS: &[&str] = &[
    "seed",
    "threads",
    "out-dir",
    "input",
    "comment-prefix",
    "delimiter",
    "generator",
    "n",
    "m",
    "communities",
    "community-size",
    "p-in",
    "k-out",
    "order",
    "grid-step",
    "collapse-threshold",
    "alpha",
    "beta",
    "runs",
    "tmax",
    "epsilon",
    "per-run",
    "paired-seeds",
    "fr-grid",
    "output",
];

/// Where the graph comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    EdgeList {
        path: PathBuf,
        comment_prefix: String,
        delimiter: Option<char>,
    },
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    ScaleFree {
        n: usize,
        m: usize,
    },
    Community {
        communities: usize,
        size: usize,
        p_in: f64,
        k_out: usize,
    },
}

/// Event budget as configured: `auto` resolves to the node count at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TMaxSpec {
    Auto,
    Events(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentKind {
    LoadStats,
    Strength,
    Cdf {
        grid_step: f64,
    },
    Correlate,
    Percolate {
        direction: Direction,
        grid_step: f64,
        collapse_threshold: f64,
    },
    Diffuse {
        alphas: Vec<f64>,
        betas: Vec<f64>,
        t_max: TMaxSpec,
        epsilon: f64,
        per_run: bool,
        paired_seeds: bool,
    },
    RemoveDiffuse {
        direction: Direction,
        fr_grid: Vec<f64>,
        alpha: f64,
        beta: f64,
        t_max: TMaxSpec,
        epsilon: f64,
    },
    Gen {
        output: PathBuf,
    },
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::LoadStats => "load-stats",
            ExperimentKind::Strength => "strength",
            ExperimentKind::Cdf { .. } => "cdf",
            ExperimentKind::Correlate => "correlate",
            ExperimentKind::Percolate { .. } => "percolate",
            ExperimentKind::Diffuse { .. } => "diffuse",
            ExperimentKind::RemoveDiffuse { .. } => "remove-diffuse",
            ExperimentKind::Gen { .. } => "gen",
        }
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub input: InputSpec,
    pub seed: u64,
    pub replications: u64,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Flat key=value echo of the resolved configuration, for the manifest.
    /// Execution-only knobs (threads, output location) are excluded so the
    /// echo is identical across worker counts.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| kv.push((k.to_string(), v));
        push("seed", self.seed.to_string());
        match &self.input {
            InputSpec::EdgeList {
                path,
                comment_prefix,
                delimiter,
            } => {
                push("input", path.display().to_string());
                push("comment-prefix", comment_prefix.clone());
                if let Some(d) = delimiter {
                    push("delimiter", d.to_string());
                }
            }
            InputSpec::Generator(GeneratorSpec::ScaleFree { n, m }) => {
                push("generator", "scale-free".into());
                push("n", n.to_string());
                push("m", m.to_string());
            }
            InputSpec::Generator(GeneratorSpec::Community {
                communities,
                size,
                p_in,
                k_out,
            }) => {
                push("generator", "community".into());
                push("communities", communities.to_string());
                push("community-size", size.to_string());
                push("p-in", p_in.to_string());
                push("k-out", k_out.to_string());
            }
        }
        match &self.kind {
            ExperimentKind::LoadStats | ExperimentKind::Strength | ExperimentKind::Correlate => {}
            ExperimentKind::Cdf { grid_step } => push("grid-step", grid_step.to_string()),
            ExperimentKind::Percolate {
                direction,
                grid_step,
                collapse_threshold,
            } => {
                push("order", direction.as_str().into());
                push("grid-step", grid_step.to_string());
                push("collapse-threshold", collapse_threshold.to_string());
            }
            ExperimentKind::Diffuse {
                alphas,
                betas,
                t_max,
                epsilon,
                per_run,
                paired_seeds,
            } => {
                push("alpha", join_f64(alphas));
                push("beta", join_f64(betas));
                push("runs", self.replications.to_string());
                push("tmax", tmax_string(*t_max));
                push("epsilon", epsilon.to_string());
                push("per-run", per_run.to_string());
                push("paired-seeds", paired_seeds.to_string());
            }
            ExperimentKind::RemoveDiffuse {
                direction,
                fr_grid,
                alpha,
                beta,
                t_max,
                epsilon,
            } => {
                push("order", direction.as_str().into());
                push("fr-grid", join_f64(fr_grid));
                push("alpha", alpha.to_string());
                push("beta", beta.to_string());
                push("runs", self.replications.to_string());
                push("tmax", tmax_string(*t_max));
                push("epsilon", epsilon.to_string());
            }
            ExperimentKind::Gen { output } => push("output", output.display().to_string()),
        }
        kv.sort();
        kv
    }
}

fn join_f64(values: &[f64]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out
}

fn tmax_string(t: TMaxSpec) -> String {
    match t {
        TMaxSpec::Auto => "auto".into(),
        TMaxSpec::Events(n) => n.to_string(),
    }
}

/// Parses the flat key=value config file format. Full-line comments start
/// with `#`; unknown keys are rejected.
pub fn parse_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                index + 1
            )));
        };
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Builds a validated config for the named experiment from file entries plus
/// flag pairs. Flags override file values; unknown keys are rejected.
pub fn parse_config(
    kind: &str,
    file_entries: &[(String, String)],
    flags: &[(String, String)],
) -> Result<ExperimentConfig> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (key, value) in file_entries.iter().chain(flags) {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::UnknownKey(key.clone()));
        }
        map.insert(key.clone(), value.clone());
    }
    let mut bag = Bag { map };

    let seed = bag.take_u64("seed")?.unwrap_or(DEFAULT_SEED);
    let threads = bag.take_u64("threads")?.map(|t| t as usize);
    if threads == Some(0) {
        return Err(Error::Config("threads must be at least 1".into()));
    }
    let out_dir = PathBuf::from(bag.take("out-dir").unwrap_or_else(|| DEFAULT_OUT_DIR.into()));
    let replications = bag.take_u64("runs")?.unwrap_or(DEFAULT_RUNS);
    if replications == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }

    let input = parse_input(&mut bag, kind)?;
    let kind = parse_kind(kind, &mut bag, &input)?;

    Ok(ExperimentConfig {
        kind,
        input,
        seed,
        replications,
        threads,
        out_dir,
    })
}

fn parse_input(bag: &mut Bag, kind: &str) -> Result<InputSpec> {
    let path = bag.take("input");
    let generator = bag.take("generator");
    match (path, generator) {
        (Some(_), Some(_)) => Err(Error::Config(
            "give either an input file or a generator, not both".into(),
        )),
        (Some(path), None) => {
            if kind == "gen" {
                return Err(Error::Config("gen requires a generator, not an input file".into()));
            }
            let path = PathBuf::from(path);
            if !path.exists() {
                return Err(Error::Config(format!(
                    "input file {} does not exist",
                    path.display()
                )));
            }
            let comment_prefix = bag.take("comment-prefix").unwrap_or_else(|| "#".into());
            let delimiter = match bag.take("delimiter") {
                None => None,
                Some(s) => {
                    let mut chars = s.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => Some(c),
                        _ => {
                            return Err(Error::Config(
                                "delimiter must be a single character".into(),
                            ))
                        }
                    }
                }
            };
            Ok(InputSpec::EdgeList {
                path,
                comment_prefix,
                delimiter,
            })
        }
        (None, Some(name)) => match name.as_str() {
            "scale-free" => {
                let n = bag.require_u64("n")? as usize;
                let m = bag.require_u64("m")? as usize;
                Ok(InputSpec::Generator(GeneratorSpec::ScaleFree { n, m }))
            }
            "community" => {
                let communities = bag.require_u64("communities")? as usize;
                let size = bag.require_u64("community-size")? as usize;
                let p_in = bag.require_f64("p-in")?;
                let k_out = bag.require_u64("k-out")? as usize;
                Ok(InputSpec::Generator(GeneratorSpec::Community {
                    communities,
                    size,
                    p_in,
                    k_out,
                }))
            }
            other => Err(Error::Config(format!(
                "unknown generator `{other}` (expected scale-free or community)"
            ))),
        },
        (None, None) => Err(Error::Config(
            "missing input: give an edge-list file or a generator".into(),
        )),
    }
}

fn parse_kind(kind: &str, bag: &mut Bag, input: &InputSpec) -> Result<ExperimentKind> {
    match kind {
        "load-stats" => Ok(ExperimentKind::LoadStats),
        "strength" => Ok(ExperimentKind::Strength),
        "correlate" => Ok(ExperimentKind::Correlate),
        "cdf" => Ok(ExperimentKind::Cdf {
            grid_step: bag.take_grid_step()?,
        }),
        "percolate" => Ok(ExperimentKind::Percolate {
            direction: bag.take_direction()?,
            grid_step: bag.take_grid_step()?,
            collapse_threshold: {
                let t = bag
                    .take_f64("collapse-threshold")?
                    .unwrap_or(DEFAULT_COLLAPSE_THRESHOLD);
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::Config(format!(
                        "collapse-threshold must be in [0, 1], got {t}"
                    )));
                }
                t
            },
        }),
        "diffuse" => {
            let alphas = bag.take_f64_list("alpha")?.unwrap_or_else(|| vec![0.0]);
            let betas = bag
                .take_f64_list("beta")?
                .unwrap_or_else(|| vec![DEFAULT_BETA]);
            check_betas(&betas)?;
            Ok(ExperimentKind::Diffuse {
                alphas,
                betas,
                t_max: bag.take_tmax()?,
                epsilon: bag.take_epsilon()?,
                per_run: bag.take_bool("per-run")?.unwrap_or(false),
                paired_seeds: bag.take_bool("paired-seeds")?.unwrap_or(false),
            })
        }
        "remove-diffuse" => {
            let alpha = bag.take_f64("alpha")?.unwrap_or(0.0);
            let beta = bag.take_f64("beta")?.unwrap_or(DEFAULT_BETA);
            check_betas(&[beta])?;
            Ok(ExperimentKind::RemoveDiffuse {
                direction: bag.take_direction()?,
                fr_grid: parse_fr_grid(
                    &bag.take("fr-grid").unwrap_or_else(|| DEFAULT_FR_GRID.into()),
                )?,
                alpha,
                beta,
                t_max: bag.take_tmax()?,
                epsilon: bag.take_epsilon()?,
            })
        }
        "gen" => {
            if !matches!(input, InputSpec::Generator(_)) {
                return Err(Error::Config("gen requires a generator spec".into()));
            }
            let output = bag
                .take("output")
                .ok_or_else(|| Error::Config("gen requires an output path".into()))?;
            Ok(ExperimentKind::Gen {
                output: PathBuf::from(output),
            })
        }
        other => Err(Error::Config(format!("unknown experiment `{other}`"))),
    }
}

fn check_betas(betas: &[f64]) -> Result<()> {
    for &b in betas {
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::Config(format!("beta must be in [0, 1], got {b}")));
        }
    }
    Ok(())
}

/// `start:stop:step` expansion, inclusive of both ends.
fn parse_fr_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "fr-grid must be start:stop:step, got `{text}`"
        )));
    }
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("fr-grid component `{s}` is not a number")))
    };
    let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || start > stop {
        return Err(Error::Config(
            "fr-grid bounds must satisfy 0 <= start <= stop <= 1".into(),
        ));
    }
    if step <= 0.0 {
        return Err(Error::Config("fr-grid step must be positive".into()));
    }
    let count = ((stop - start) / step).round() as usize;
    if ((start + count as f64 * step) - stop).abs() > 1e-9 {
        return Err(Error::Config(
            "fr-grid step must evenly divide the range".into(),
        ));
    }
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// Grid 0, step, 2*step, ..., 1. The step must evenly divide 1.
pub fn unit_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Config(format!(
            "grid-step must be in (0, 1], got {step}"
        )));
    }
    let count = (1.0 / step).round() as usize;
    if (count as f64 * step - 1.0).abs() > 1e-9 {
        return Err(Error::Config("grid-step must evenly divide 1".into()));
    }
    Ok((0..=count).map(|i| (i as f64 * step).min(1.0)).collect())
}

struct Bag {
    map: BTreeMap<String, String>,
}

impl Bag {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.take(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::Config(format!("`{key}` expects an integer, got `{v}`")))
            })
            .transpose()
    }

    fn require_u64(&mut self, key: &str) -> Result<u64> {
        self.take_u64(key)?
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("`{key}` expects a number, got `{v}`")))
            })
            .transpose()
    }

    fn require_f64(&mut self, key: &str) -> Result<f64> {
        self.take_f64(key)?
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>> {
        self.take(key)
            .map(|v| match v.as_str() {
                "true" | "1" => Ok(true),
                "false" | "0" => Ok(false),
                other => Err(Error::Config(format!(
                    "`{key}` expects true or false, got `{other}`"
                ))),
            })
            .transpose()
    }

    fn take_f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => {
                let values: Result<Vec<f64>> = v
                    .split(',')
                    .map(|part| {
                        part.trim().parse::<f64>().map_err(|_| {
                            Error::Config(format!("`{key}` entry `{part}` is not a number"))
                        })
                    })
                    .collect();
                let values = values?;
                if values.is_empty() {
                    return Err(Error::Config(format!("`{key}` list is empty")));
                }
                Ok(Some(values))
            }
        }
    }

    fn take_direction(&mut self) -> Result<Direction> {
        match self.take("order") {
            None => Ok(Direction::WeakFirst),
            Some(v) => v.parse(),
        }
    }

    fn take_grid_step(&mut self) -> Result<f64> {
        let step = self.take_f64("grid-step")?.unwrap_or(DEFAULT_GRID_STEP);
        unit_grid(step)?;
        Ok(step)
    }

    fn take_tmax(&mut self) -> Result<TMaxSpec> {
        match self.take("tmax") {
            None => Ok(TMaxSpec::Auto),
            Some(v) if v == "auto" => Ok(TMaxSpec::Auto),
            Some(v) => v
                .parse::<u64>()
                .map(TMaxSpec::Events)
                .map_err(|_| Error::Config(format!("tmax expects `auto` or an integer, got `{v}`"))),
        }
    }

    fn take_epsilon(&mut self) -> Result<f64> {
        let epsilon = self.take_f64("epsilon")?.unwrap_or(DEFAULT_EPSILON);
        if !(epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn flags(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|&(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn diffuse_flags_build_a_config() {
        let cfg = parse_config(
            "diffuse",
            &[],
            &flags(&[
                ("alpha", "0"),
                ("beta", "0.01"),
                ("runs", "20"),
                ("generator", "scale-free"),
                ("n", "100"),
                ("m", "2"),
            ]),
        )
        .unwrap();
        assert_eq!(cfg.replications, 20);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        match cfg.kind {
            ExperimentKind::Diffuse { alphas, betas, .. } => {
                assert_eq!(alphas, vec![0.0]);
                assert_eq!(betas, vec![0.01]);
            }
            other => panic!("unexpected kind {other:?}"),
        }
    }

    #[test]
    fn out_of_range_beta_is_rejected() {
        let err = parse_config(
            "diffuse",
            &[],
            &flags(&[("beta", "1.5"), ("generator", "scale-free"), ("n", "10"), ("m", "1")]),
        )
        .unwrap_err();
        assert!(err.is_usage(), "{err}");
    }

    #[test]
    fn flags_override_file_values() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# base config\nbeta = 0.01\nalpha = -1,0,1\nruns = 5").unwrap();
        let entries = parse_config_file(file.path()).unwrap();
        let cfg = parse_config(
            "diffuse",
            &entries,
            &flags(&[("beta", "0.5"), ("generator", "scale-free"), ("n", "10"), ("m", "1")]),
        )
        .unwrap();
        match cfg.kind {
            ExperimentKind::Diffuse { alphas, betas, .. } => {
                assert_eq!(betas, vec![0.5]);
                assert_eq!(alphas, vec![-1.0, 0.0, 1.0]);
            }
            other => panic!("unexpected kind {other:?}"),
        }
        assert_eq!(cfg.replications, 5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config("diffuse", &flags(&[("gamma", "2")]), &[]).unwrap_err();
        assert!(matches!(err, Error::UnknownKey(ref k) if k == "gamma"));
    }

    #[test]
    fn missing_input_and_conflicting_input_fail() {
        assert!(parse_config("strength", &[], &[]).is_err());
        let err = parse_config(
            "strength",
            &[],
            &flags(&[
                ("input", "/no/such/file"),
                ("generator", "community"),
            ]),
        )
        .unwrap_err();
        assert!(err.is_usage());
        // nonexistent paths are caught at validation time
        let err = parse_config("strength", &[], &flags(&[("input", "/no/such/file")])).unwrap_err();
        assert!(err.is_usage());
    }

    #[test]
    fn fr_grid_expansion() {
        let grid = parse_fr_grid("0:0.8:0.2").unwrap();
        assert_eq!(grid.len(), 5);
        for (i, v) in grid.iter().enumerate() {
            assert!((v - 0.2 * i as f64).abs() < 1e-12);
        }
        assert!(parse_fr_grid("0:1:0").is_err());
        assert!(parse_fr_grid("0.5:0.2:0.1").is_err());
        assert!(parse_fr_grid("0:1:0.3").is_err());
        assert!(parse_fr_grid("0:1").is_err());
    }

    #[test]
    fn unit_grid_divisibility() {
        let grid = unit_grid(0.25).unwrap();
        assert_eq!(grid, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(unit_grid(0.3).is_err());
        assert!(unit_grid(0.0).is_err());
        let fine = unit_grid(0.005).unwrap();
        assert_eq!(fine.len(), 201);
        assert_eq!(*fine.last().unwrap(), 1.0);
    }

    #[test]
    fn gen_requires_generator_and_output() {
        let cfg = parse_config(
            "gen",
            &[],
            &flags(&[
                ("generator", "community"),
                ("communities", "4"),
                ("community-size", "5"),
                ("p-in", "0.7"),
                ("k-out", "6"),
                ("output", "graph.txt"),
            ]),
        )
        .unwrap();
        assert!(matches!(cfg.kind, ExperimentKind::Gen { .. }));
        assert!(parse_config(
            "gen",
            &[],
            &flags(&[("generator", "scale-free"), ("n", "10"), ("m", "1")]),
        )
        .is_err());
    }

    #[test]
    fn echo_is_sorted_and_complete() {
        let cfg = parse_config(
            "percolate",
            &[],
            &flags(&[
                ("generator", "scale-free"),
                ("n", "50"),
                ("m", "2"),
                ("order", "strong"),
                ("grid-step", "0.05"),
                ("threads", "4"),
            ]),
        )
        .unwrap();
        let echo = cfg.echo();
        assert!(echo.windows(2).all(|w| w[0].0 <= w[1].0));
        assert!(echo.iter().any(|(k, v)| k == "order" && v == "strong"));
        // execution-only knobs stay out of the echo
        assert!(!echo.iter().any(|(k, _)| k == "threads"));
    }
}
