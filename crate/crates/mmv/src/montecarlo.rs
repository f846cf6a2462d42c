//! Randomized experiments: phase-transition sweeps over (k, L, algorithm)
//! grids, plus the empirical oracles used to validate the tail bounds.
//!
//! Trials are independent; per-trial seeds are derived from the base seed and
//! the grid coordinates, so sweeps are reproducible bit-for-bit regardless of
//! thread count or execution order.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::ensembles::{
    alltop_gabor, bernoulli_ensemble, dirac_fourier, gaussian_ensemble, spherical_ensemble,
};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, matmul, C64};
use crate::rng::{derive_seed, seeded_rng};
use crate::signal::{sample_coefficients, CoefficientModel, ModelVariant, Support};
use crate::solvers::{p_somp, p_thresholding, solve_l21, SolverOptions};
use crate::MeasurementMatrix;

/// Recovery algorithms exercised by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    L21,
    Thresholding,
    Somp,
}

impl AlgorithmKind {
    /// Stable numeric code used in seed derivation.
    fn seed_code(self) -> u64 {
        match self {
            AlgorithmKind::L21 => 0,
            AlgorithmKind::Thresholding => 1,
            AlgorithmKind::Somp => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::L21 => "l21",
            AlgorithmKind::Thresholding => "thresh",
            AlgorithmKind::Somp => "somp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "l21" => Ok(AlgorithmKind::L21),
            "thresh" | "thresholding" => Ok(AlgorithmKind::Thresholding),
            "somp" => Ok(AlgorithmKind::Somp),
            other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Measurement matrix family plus its dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum EnsembleSpec {
    Spherical { n: usize, cols: usize },
    Gaussian { n: usize, cols: usize },
    Bernoulli { n: usize, cols: usize },
    DiracFourier { n: usize },
    AlltopGabor { n: usize },
}

impl EnsembleSpec {
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            EnsembleSpec::Spherical { n, cols }
            | EnsembleSpec::Gaussian { n, cols }
            | EnsembleSpec::Bernoulli { n, cols } => (n, cols),
            EnsembleSpec::DiracFourier { n } => (n, 2 * n),
            EnsembleSpec::AlltopGabor { n } => (n, n * n),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(
            self,
            EnsembleSpec::Spherical { .. }
                | EnsembleSpec::Gaussian { .. }
                | EnsembleSpec::Bernoulli { .. }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            EnsembleSpec::Spherical { .. } => "spherical",
            EnsembleSpec::Gaussian { .. } => "gaussian",
            EnsembleSpec::Bernoulli { .. } => "bernoulli",
            EnsembleSpec::DiracFourier { .. } => "dirac-fourier",
            EnsembleSpec::AlltopGabor { .. } => "alltop",
        }
    }

    pub fn build(&self, seed: u64) -> Result<MeasurementMatrix> {
        match *self {
            EnsembleSpec::Spherical { n, cols } => spherical_ensemble(n, cols, seed),
            EnsembleSpec::Gaussian { n, cols } => gaussian_ensemble(n, cols, seed),
            EnsembleSpec::Bernoulli { n, cols } => bernoulli_ensemble(n, cols, seed),
            EnsembleSpec::DiracFourier { n } => dirac_fourier(n),
            EnsembleSpec::AlltopGabor { n } => alltop_gabor(n),
        }
    }
}

/// Policy for the diagonal scale matrix applied to the coefficient rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum SigmaPolicy {
    /// All scales one.
    Identity,
    /// Independent standard-normal magnitudes per support row.
    GaussianMagnitude,
    /// Alternating `ratio` and 1, giving a dynamic range of `ratio`.
    Ratio { ratio: f64 },
}

/// Coefficient distribution used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSpec {
    pub variant: ModelVariant,
    pub sigma: SigmaPolicy,
}

impl CoefficientSpec {
    /// Real Gaussian rows with Gaussian-magnitude scales.
    pub fn model_one() -> Self {
        CoefficientSpec {
            variant: ModelVariant::RealGaussian,
            sigma: SigmaPolicy::GaussianMagnitude,
        }
    }

    /// Complex Gaussian rows with identity scales.
    pub fn model_two() -> Self {
        CoefficientSpec {
            variant: ModelVariant::ComplexGaussian,
            sigma: SigmaPolicy::Identity,
        }
    }

    pub fn label(&self) -> String {
        match (self.variant, self.sigma) {
            (ModelVariant::RealGaussian, SigmaPolicy::GaussianMagnitude) => "1".into(),
            (ModelVariant::ComplexGaussian, SigmaPolicy::Identity) => "2".into(),
            (variant, SigmaPolicy::Identity) => variant.label().to_string(),
            (variant, SigmaPolicy::GaussianMagnitude) => {
                format!("{}:gaussian-sigma", variant.label())
            }
            (variant, SigmaPolicy::Ratio { ratio }) => {
                format!("{}:ratio{ratio}", variant.label())
            }
        }
    }

    fn sigma_for(&self, k: usize, seed: u64) -> Vec<f64> {
        match self.sigma {
            SigmaPolicy::Identity => vec![1.0; k],
            SigmaPolicy::GaussianMagnitude => {
                let mut rng = seeded_rng(seed);
                (0..k)
                    .map(|_| loop {
                        let g: f64 = rng.sample(StandardNormal);
                        if g != 0.0 {
                            break g.abs();
                        }
                    })
                    .collect()
            }
            SigmaPolicy::Ratio { ratio } => (0..k)
                .map(|i| if i % 2 == 0 { ratio } else { 1.0 })
                .collect(),
        }
    }
}

/// Whether random ensembles are redrawn per trial or fixed for the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixMode {
    RedrawPerTrial,
    Fixed,
}

/// Full description of a phase-transition sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleSpec,
    pub matrix_mode: MatrixMode,
    pub k_grid: Vec<usize>,
    pub l_grid: Vec<usize>,
    pub model: CoefficientSpec,
    pub algorithms: Vec<AlgorithmKind>,
    pub trials: usize,
    pub base_seed: u64,
    pub solver: SolverOptions,
    /// Relative Frobenius error below which a trial counts as recovered
    /// (together with exact support agreement).
    pub success_relative_error: f64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.k_grid.is_empty() {
            return Err(Error::Config("k grid must not be empty".into()));
        }
        if self.l_grid.is_empty() {
            return Err(Error::Config("L grid must not be empty".into()));
        }
        if self.l_grid.iter().any(|&l| l == 0) {
            return Err(Error::Config("channel counts must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("algorithm list must not be empty".into()));
        }
        let (n, cols) = self.ensemble.dims();
        if let Some(&k) = self.k_grid.iter().find(|&&k| k > n || k > cols) {
            return Err(Error::Config(format!(
                "sparsity {k} exceeds the {n}x{cols} ensemble"
            )));
        }
        self.solver.validate()?;
        if !(self.success_relative_error > 0.0) {
            return Err(Error::Config(
                "success_relative_error must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One recovery attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub k: usize,
    pub l: usize,
    pub algorithm: AlgorithmKind,
    pub trial: usize,
    pub success: bool,
    pub relative_error: f64,
    pub support_match: bool,
    pub seed: u64,
}

/// Success counts over the sweep grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub algorithm: AlgorithmKind,
    pub k: usize,
    pub l: usize,
    pub trials: usize,
    pub successes: usize,
}

impl PhasePoint {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Aggregated success-rate grid with the provenance needed to re-run it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCurve {
    pub ensemble: String,
    pub n: usize,
    pub cols: usize,
    pub model: String,
    pub points: Vec<PhasePoint>,
}

impl PhaseCurve {
    pub fn rate(&self, algorithm: AlgorithmKind, k: usize, l: usize) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.algorithm == algorithm && p.k == k && p.l == l)
            .map(PhasePoint::rate)
    }

    /// CSV with header `ensemble,n,N,model,algorithm,k,L,trials,successes,rate`,
    /// rows sorted by (algorithm, k, L).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ensemble,n,N,model,algorithm,k,L,trials,successes,rate\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                self.ensemble,
                self.n,
                self.cols,
                self.model,
                p.algorithm,
                p.k,
                p.l,
                p.trials,
                p.successes,
                p.rate()
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<PhaseCurve> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty phase curve file".into()))?;
        if header.trim() != "ensemble,n,N,model,algorithm,k,L,trials,successes,rate" {
            return Err(Error::Parse(format!("unexpected header '{header}'")));
        }
        let mut ensemble = String::new();
        let mut n = 0;
        let mut cols = 0;
        let mut model = String::new();
        let mut points = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 10 {
                return Err(Error::Parse(format!("bad phase curve row '{line}'")));
            }
            ensemble = fields[0].to_string();
            n = fields[1]
                .parse()
                .map_err(|e| Error::Parse(format!("n: {e}")))?;
            cols = fields[2]
                .parse()
                .map_err(|e| Error::Parse(format!("N: {e}")))?;
            model = fields[3].to_string();
            points.push(PhasePoint {
                algorithm: AlgorithmKind::parse(fields[4])?,
                k: fields[5]
                    .parse()
                    .map_err(|e| Error::Parse(format!("k: {e}")))?,
                l: fields[6]
                    .parse()
                    .map_err(|e| Error::Parse(format!("L: {e}")))?,
                trials: fields[7]
                    .parse()
                    .map_err(|e| Error::Parse(format!("trials: {e}")))?,
                successes: fields[8]
                    .parse()
                    .map_err(|e| Error::Parse(format!("successes: {e}")))?,
            });
        }
        Ok(PhaseCurve {
            ensemble,
            n,
            cols,
            model,
            points,
        })
    }
}

/// Uniformly random size-k subset of `0..n` by partial Fisher-Yates.
pub fn sample_support(n: usize, k: usize, seed: u64) -> Support {
    let mut rng = seeded_rng(seed);
    let mut ids: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = rng.gen_range(i..n);
        ids.swap(i, j);
    }
    Support::new(ids[..k.min(n)].to_vec()).expect("sampled indices are distinct")
}

/// Run one recovery trial. Solver errors are recorded as failures.
pub fn run_trial(
    a: &MeasurementMatrix,
    k: usize,
    l: usize,
    algorithm: AlgorithmKind,
    model: &CoefficientSpec,
    opts: &SolverOptions,
    success_relative_error: f64,
    trial_seed: u64,
) -> TrialRecord {
    let support = sample_support(a.n_cols(), k, derive_seed(&[trial_seed, 1]));
    let sigma = model.sigma_for(k, derive_seed(&[trial_seed, 2]));
    let coeff_model =
        CoefficientModel::new(model.variant, sigma).expect("generated scales are positive");
    let x = sample_coefficients(
        &coeff_model,
        &support,
        a.n_cols(),
        l,
        derive_seed(&[trial_seed, 3]),
    )
    .expect("support and sigma sizes agree");
    let y = matmul(a.entries(), x.entries());

    let outcome = match algorithm {
        AlgorithmKind::L21 => solve_l21(a, y.view(), opts),
        AlgorithmKind::Thresholding => p_thresholding(a, y.view(), k, 2.0),
        AlgorithmKind::Somp => p_somp(a, y.view(), k, 2.0),
    };

    let (relative_error, support_match) = match outcome {
        Ok(result) => {
            let truth_norm = frobenius_norm(x.entries());
            let err = frobenius_norm((&result.estimate.entries() - &x.entries()).view());
            let rel = if truth_norm > 0.0 {
                err / truth_norm
            } else if err == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            (rel, result.recovered_support == support)
        }
        Err(_) => (f64::INFINITY, false),
    };
    let success = relative_error <= success_relative_error && support_match;
    TrialRecord {
        k,
        l,
        algorithm,
        trial: 0,
        success,
        relative_error,
        support_match,
        seed: trial_seed,
    }
}

/// All trial records of a sweep in canonical order
/// (algorithm, k, L, trial index).
pub fn collect_trials(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let fixed_matrix = if config.ensemble.is_random() && config.matrix_mode == MatrixMode::Fixed
    {
        Some(config.ensemble.build(derive_seed(&[config.base_seed, 0xf1de]))?)
    } else if !config.ensemble.is_random() {
        Some(config.ensemble.build(0)?)
    } else {
        None
    };

    let mut jobs = Vec::new();
    for &algorithm in &config.algorithms {
        for &k in &config.k_grid {
            for &l in &config.l_grid {
                for trial in 0..config.trials {
                    jobs.push((algorithm, k, l, trial));
                }
            }
        }
    }

    let mut records: Vec<TrialRecord> = jobs
        .into_par_iter()
        .map(|(algorithm, k, l, trial)| {
            let trial_seed = derive_seed(&[
                config.base_seed,
                k as u64,
                l as u64,
                algorithm.seed_code(),
                trial as u64,
            ]);
            let matrix;
            let a = match &fixed_matrix {
                Some(m) => m,
                None => {
                    matrix = config
                        .ensemble
                        .build(derive_seed(&[trial_seed, 0xabcd]))
                        .expect("validated ensemble dimensions");
                    &matrix
                }
            };
            let mut record = run_trial(
                a,
                k,
                l,
                algorithm,
                &config.model,
                &config.solver,
                config.success_relative_error,
                trial_seed,
            );
            record.trial = trial;
            record
        })
        .collect();

    records.sort_by_key(|r| (r.algorithm.seed_code(), r.k, r.l, r.trial));
    Ok(records)
}

/// Sweep the full grid and aggregate success rates.
pub fn phase_curve(config: &ExperimentConfig) -> Result<PhaseCurve> {
    let records = collect_trials(config)?;
    Ok(aggregate(config, &records))
}

/// Fold trial records into a phase curve.
pub fn aggregate(config: &ExperimentConfig, records: &[TrialRecord]) -> PhaseCurve {
    let (n, cols) = config.ensemble.dims();
    let mut points = Vec::new();
    for &algorithm in &config.algorithms {
        for &k in &config.k_grid {
            for &l in &config.l_grid {
                let successes = records
                    .iter()
                    .filter(|r| {
                        r.algorithm == algorithm && r.k == k && r.l == l && r.success
                    })
                    .count();
                points.push(PhasePoint {
                    algorithm,
                    k,
                    l,
                    trials: config.trials,
                    successes,
                });
            }
        }
    }
    points.sort_by_key(|p| (p.algorithm.seed_code(), p.k, p.l));
    PhaseCurve {
        ensemble: config.ensemble.label().to_string(),
        n,
        cols,
        model: config.model.label(),
        points,
    }
}

/// Monte Carlo frequency of the sphere-combination tail event
/// `||sum_j a_j Z_j|| >= u ||a||` with Z_j uniform on the (real or complex)
/// unit sphere.
pub fn empirical_bernstein_tail(
    coefficients: &[f64],
    l: usize,
    u: f64,
    trials: usize,
    seed: u64,
    complex_model: bool,
) -> f64 {
    let a_norm = coefficients.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut rng = seeded_rng(seed);
    let mut hits = 0usize;
    let mut sum = vec![C64::new(0.0, 0.0); l];
    for _ in 0..trials {
        for s in sum.iter_mut() {
            *s = C64::new(0.0, 0.0);
        }
        for &a_j in coefficients {
            // uniform sphere draw: normalized Gaussian
            let mut z: Vec<C64> = (0..l)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = if complex_model {
                        rng.sample(StandardNormal)
                    } else {
                        0.0
                    };
                    C64::new(re, im)
                })
                .collect();
            let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            for v in z.iter_mut() {
                *v /= norm;
            }
            for (s, v) in sum.iter_mut().zip(z.iter()) {
                *s += a_j * v;
            }
        }
        let norm = sum.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm >= u * a_norm {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

/// Sample mean and standard error of the Euclidean norm of an L-dimensional
/// standard Gaussian vector.
pub fn empirical_gaussian_norm(l: usize, trials: usize, seed: u64) -> (f64, f64) {
    let mut rng = seeded_rng(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let norm_sq: f64 = (0..l)
            .map(|_| {
                let g: f64 = rng.sample(StandardNormal);
                g * g
            })
            .sum();
        let norm = norm_sq.sqrt();
        sum += norm;
        sum_sq += norm * norm;
    }
    let mean = sum / trials as f64;
    let var = (sum_sq / trials as f64 - mean * mean).max(0.0) * trials as f64
        / (trials as f64 - 1.0);
    (mean, (var / trials as f64).sqrt())
}
