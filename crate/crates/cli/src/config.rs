//! Flat `key = value` run configuration with section headers.
//!
//! Unknown sections or keys are hard errors, as are keys that do not belong
//! to the selected spectrum source. Every problem invariant is validated
//! before any computation starts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use tdd_core::discrete::Scheme;
use tdd_core::rho::AlgorithmId;
use tdd_core::spectral::{self, SpectralModel};
use tdd_core::ProblemParams;

/// Where the spatial spectrum comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    Laplacian { n: usize, length: f64 },
    File { path: PathBuf },
    List { eigenvalues: Vec<f64> },
}

/// Initial interface guess of the discrete runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialGuess {
    Zero,
    Random,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub d_min: f64,
    pub d_max: f64,
    pub d_count: usize,
    pub thetas: Vec<f64>,
    pub d_inf_proxy: f64,
}

#[derive(Debug, Clone)]
pub struct SolverSpec {
    pub nt: usize,
    pub scheme: Scheme,
    pub tol: f64,
    pub k_max: usize,
    pub f0: InitialGuess,
    pub error_mode: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub spectrum: SpectrumSource,
    pub sweep: SweepSpec,
    pub solver: SolverSpec,
    pub algorithms: Vec<AlgorithmId>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
            .with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let sections = split_sections(text)?;
        for name in sections.keys() {
            if !["problem", "spectrum", "sweep", "solver", "run"].contains(&name.as_str()) {
                bail!("unknown section `[{name}]`");
            }
        }
        let empty = Section::default();

        let problem = sections.get("problem").unwrap_or(&empty);
        let nu = problem.f64("nu")?.unwrap_or(0.1);
        let gamma = problem.f64("gamma")?.unwrap_or(0.0);
        let t_final = problem.f64("T")?.unwrap_or(1.0);
        let alpha = problem.f64("alpha")?.unwrap_or(0.5 * t_final);
        let theta = problem.f64("theta")?.unwrap_or(1.0);
        problem.finish("problem")?;
        let params =
            ProblemParams::new(nu, gamma, t_final, alpha, theta).map_err(|e| anyhow!("{e}"))?;
        if !params.theta_is_canonical() {
            log::warn!(
                "theta = {} lies outside the canonical range (0, 1]",
                params.theta
            );
        }

        let spectrum_section = sections.get("spectrum").unwrap_or(&empty);
        let source = spectrum_section
            .str("source")?
            .unwrap_or_else(|| "laplacian".into());
        let spectrum = match source.as_str() {
            "laplacian" => {
                let n = spectrum_section.usize("n")?.unwrap_or(16);
                let length = spectrum_section.f64("length")?.unwrap_or(1.0);
                SpectrumSource::Laplacian { n, length }
            }
            "file" => {
                let rel = spectrum_section
                    .str("path")?
                    .ok_or_else(|| anyhow!("spectrum source `file` needs key `path`"))?;
                SpectrumSource::File {
                    path: base_dir.join(rel),
                }
            }
            "list" => {
                let eigenvalues = spectrum_section
                    .f64_list("eigenvalues")?
                    .ok_or_else(|| anyhow!("spectrum source `list` needs key `eigenvalues`"))?;
                SpectrumSource::List { eigenvalues }
            }
            other => bail!("unknown spectrum source `{other}`"),
        };
        spectrum_section.finish("spectrum")?;

        let sweep_section = sections.get("sweep").unwrap_or(&empty);
        let sweep = SweepSpec {
            d_min: sweep_section.f64("d_min")?.unwrap_or(1e-2),
            d_max: sweep_section.f64("d_max")?.unwrap_or(1e2),
            d_count: sweep_section.usize("d_count")?.unwrap_or(400),
            thetas: sweep_section
                .f64_list("thetas")?
                .unwrap_or_else(|| vec![params.theta]),
            d_inf_proxy: sweep_section.f64("d_inf_proxy")?.unwrap_or(1e8),
        };
        sweep_section.finish("sweep")?;
        if !(sweep.d_min > 0.0 && sweep.d_max > sweep.d_min) {
            bail!("invalid field `sweep.d_min`/`sweep.d_max`: need 0 < d_min < d_max");
        }
        if sweep.d_count < 1 {
            bail!("invalid field `sweep.d_count`: must be positive");
        }

        let solver_section = sections.get("solver").unwrap_or(&empty);
        let scheme_name = solver_section
            .str("scheme")?
            .unwrap_or_else(|| "trapezoidal".into());
        let solver = SolverSpec {
            nt: solver_section.usize("nt")?.unwrap_or(200),
            scheme: scheme_name
                .parse::<Scheme>()
                .map_err(|e| anyhow!("field `solver.scheme`: {e}"))?,
            tol: solver_section.f64("tol")?.unwrap_or(1e-10),
            k_max: solver_section.usize("k_max")?.unwrap_or(200),
            f0: match solver_section.str("f0")?.as_deref().unwrap_or("zero") {
                "zero" => InitialGuess::Zero,
                "random" => InitialGuess::Random,
                other => bail!("invalid field `solver.f0`: `{other}` (expected zero|random)"),
            },
            error_mode: solver_section.bool("error_mode")?.unwrap_or(true),
        };
        solver_section.finish("solver")?;
        if solver.tol.is_nan() || solver.tol <= 0.0 {
            bail!("invalid field `solver.tol`: must be > 0");
        }
        if solver.nt < 2 {
            bail!("invalid field `solver.nt`: must be >= 2");
        }
        if solver.k_max == 0 {
            bail!("invalid field `solver.k_max`: must be positive");
        }

        let run = sections.get("run").unwrap_or(&empty);
        let algorithms = match run.str("algorithms")?.as_deref().unwrap_or("all") {
            "all" => AlgorithmId::ALL.to_vec(),
            list => {
                let mut algorithms = Vec::new();
                for tok in list.split(',') {
                    let alg = tok
                        .trim()
                        .parse::<AlgorithmId>()
                        .map_err(|e| anyhow!("field `run.algorithms`: {e}"))?;
                    if !algorithms.contains(&alg) {
                        algorithms.push(alg);
                    }
                }
                if algorithms.is_empty() {
                    bail!("invalid field `run.algorithms`: empty list");
                }
                algorithms
            }
        };
        run.finish("run")?;

        Ok(Self {
            params,
            spectrum,
            sweep,
            solver,
            algorithms,
        })
    }

    /// Materializes the spectrum source.
    pub fn build_model(&self) -> Result<SpectralModel> {
        let model = match &self.spectrum {
            SpectrumSource::Laplacian { n, length } => {
                spectral::build_laplacian_1d(*n, *length).map_err(|e| anyhow!("{e}"))?
            }
            SpectrumSource::File { path } => {
                let a = spectral::read_matrix_file(path)
                    .map_err(|e| anyhow!("{e}"))
                    .with_context(|| format!("spectrum file {}", path.display()))?;
                SpectralModel::from_matrix(a)
                    .map_err(|e| anyhow!("{e}"))
                    .with_context(|| format!("spectrum file {}", path.display()))?
            }
            SpectrumSource::List { eigenvalues } => {
                SpectralModel::from_eigenvalues(eigenvalues.clone()).map_err(|e| anyhow!("{e}"))?
            }
        };
        Ok(model)
    }

    /// Log-spaced eigenvalue sweep grid.
    pub fn d_grid(&self) -> Vec<f64> {
        let s = &self.sweep;
        if s.d_count == 1 {
            return vec![s.d_min];
        }
        let (lo, hi) = (s.d_min.log10(), s.d_max.log10());
        (0..s.d_count)
            .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (s.d_count - 1) as f64))
            .collect()
    }
}

#[derive(Default)]
struct Section {
    entries: BTreeMap<String, String>,
    used: std::cell::RefCell<Vec<String>>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&String> {
        let v = self.entries.get(key);
        if v.is_some() {
            self.used.borrow_mut().push(key.to_string());
        }
        v
    }

    fn str(&self, key: &str) -> Result<Option<String>> {
        Ok(self.get(key).cloned())
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| v.parse::<f64>().map_err(|e| anyhow!("field `{key}`: {e}")))
            .transpose()
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|e| anyhow!("field `{key}`: {e}"))
            })
            .transpose()
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| v.parse::<bool>().map_err(|e| anyhow!("field `{key}`: {e}")))
            .transpose()
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|tok| {
                        tok.trim()
                            .parse::<f64>()
                            .map_err(|e| anyhow!("field `{key}`: {e}"))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .transpose()
    }

    /// Rejects keys that were present but never consumed.
    fn finish(&self, section: &str) -> Result<()> {
        let used = self.used.borrow();
        for key in self.entries.keys() {
            if !used.contains(key) {
                bail!("unknown key `{key}` in section `[{section}]`");
            }
        }
        Ok(())
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            sections.entry(name.trim().to_string()).or_default();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected `key = value`, got `{line}`", lineno + 1);
        };
        let section = current.clone().ok_or_else(|| {
            anyhow!(
                "line {}: key `{}` before any section",
                lineno + 1,
                key.trim()
            )
        })?;
        let entry = sections.entry(section.clone()).or_default();
        let key = key.trim().to_string();
        if entry
            .entries
            .insert(key.clone(), value.trim().to_string())
            .is_some()
        {
            bail!("duplicate key `{key}` in section `[{section}]`");
        }
    }
    Ok(sections)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::parse("", Path::new(".")).unwrap();
        assert_eq!(cfg.algorithms.len(), 6);
        assert_eq!(cfg.sweep.d_count, 400);
        assert!(cfg.solver.error_mode);
        assert_eq!(cfg.d_grid().len(), 400);
    }

    #[test]
    fn unknown_key_is_rejected_with_its_name() {
        let err = RunConfig::parse("[problem]\nnuu = 0.2\n", Path::new(".")).unwrap_err();
        assert!(format!("{err}").contains("nuu"), "{err}");
    }

    #[test]
    fn unknown_section_is_rejected() {
        assert!(RunConfig::parse("[problems]\n", Path::new(".")).is_err());
    }

    #[test]
    fn invalid_problem_values_name_the_field() {
        let err = RunConfig::parse("[problem]\nnu = -1\n", Path::new(".")).unwrap_err();
        assert!(format!("{err:#}").contains("nu"), "{err:#}");
    }

    #[test]
    fn parses_a_full_config() {
        let text = "\
[problem]
nu = 0.2      # regularization
gamma = 10
T = 2.0
alpha = 0.6
theta = 0.8

[spectrum]
source = list
eigenvalues = 4.0, 1.0, 2.5

[sweep]
d_min = 1e-1
d_max = 10
d_count = 5
thetas = 0.5, 1.0

[solver]
nt = 100
scheme = implicit-euler
tol = 1e-8
k_max = 50
f0 = random
error_mode = false

[run]
algorithms = DN1, nd2
";
        let cfg = RunConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(cfg.params.gamma, 10.0);
        assert_eq!(cfg.algorithms, vec![AlgorithmId::Dn1, AlgorithmId::Nd2]);
        assert_eq!(cfg.solver.f0, InitialGuess::Random);
        let model = cfg.build_model().unwrap();
        assert_eq!(model.eigenvalues, vec![1.0, 2.5, 4.0]);
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        assert!(RunConfig::parse("[problem]\nnu = 1\nnu = 2\n", Path::new(".")).is_err());
    }

    #[test]
    fn single_point_grid() {
        let cfg = RunConfig::parse(
            "[sweep]\nd_min = 1.0\nd_max = 2.0\nd_count = 1\n",
            Path::new("."),
        )
        .unwrap();
        assert_eq!(cfg.d_grid(), vec![1.0]);
    }
}
