//! Measurement matrix constructors: random spherical / Gaussian / Bernoulli
//! ensembles, the Dirac+Fourier union, and Gabor time-frequency shifts of the
//! Alltop window.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{vec_norm, C64};
use crate::rng::{derive_seed, seeded_rng};
use crate::signal::Support;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnsembleTag {
    Spherical,
    Gaussian,
    Bernoulli,
    DiracFourier,
    AlltopGabor,
    Custom,
}

impl fmt::Display for EnsembleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EnsembleTag::Spherical => "spherical",
            EnsembleTag::Gaussian => "gaussian",
            EnsembleTag::Bernoulli => "bernoulli",
            EnsembleTag::DiracFourier => "dirac-fourier",
            EnsembleTag::AlltopGabor => "alltop",
            EnsembleTag::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl EnsembleTag {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spherical" => Ok(EnsembleTag::Spherical),
            "gaussian" => Ok(EnsembleTag::Gaussian),
            "bernoulli" => Ok(EnsembleTag::Bernoulli),
            "dirac-fourier" => Ok(EnsembleTag::DiracFourier),
            "alltop" => Ok(EnsembleTag::AlltopGabor),
            "custom" => Ok(EnsembleTag::Custom),
            other => Err(Error::Config(format!("unknown ensemble '{other}'"))),
        }
    }
}

/// Complex `n x N` measurement matrix with unit-norm columns.
///
/// Gaussian and Bernoulli matrices are stored after the `1/sqrt(n)` scaling
/// and are the only tags exempt from the exact unit-norm check.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    entries: Array2<C64>,
    tag: EnsembleTag,
    seed: Option<u64>,
}

impl MeasurementMatrix {
    pub fn from_entries(
        entries: Array2<C64>,
        tag: EnsembleTag,
        seed: Option<u64>,
    ) -> Result<Self> {
        let (n, cols) = entries.dim();
        if n == 0 || cols < n {
            return Err(Error::InvalidDimension(format!(
                "need 1 <= n <= N, got n = {n}, N = {cols}"
            )));
        }
        if !matches!(tag, EnsembleTag::Gaussian | EnsembleTag::Bernoulli) {
            for j in 0..cols {
                let norm = vec_norm(entries.column(j));
                if (norm - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidDimension(format!(
                        "column {j} has norm {norm}, expected 1"
                    )));
                }
            }
        }
        Ok(MeasurementMatrix { entries, tag, seed })
    }

    pub fn entries(&self) -> ArrayView2<'_, C64> {
        self.entries.view()
    }

    pub fn n_rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn tag(&self) -> EnsembleTag {
        self.tag
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, C64> {
        self.entries.column(j)
    }

    /// Submatrix `A_S` of the columns indexed by the support.
    pub fn restricted(&self, support: &Support) -> Array2<C64> {
        let n = self.n_rows();
        let k = support.cardinality();
        let mut out = Array2::<C64>::zeros((n, k));
        for (pos, j) in support.iter().enumerate() {
            for r in 0..n {
                out[[r, pos]] = self.entries[[r, j]];
            }
        }
        out
    }

    /// Validate that a support addresses existing columns.
    pub fn check_support(&self, support: &Support) -> Result<()> {
        if let Some(max) = support.max_index() {
            if max >= self.n_cols() {
                return Err(Error::SupportOutOfRange {
                    index: max,
                    n_cols: self.n_cols(),
                });
            }
        }
        Ok(())
    }
}

fn check_dims(n: usize, cols: usize) -> Result<()> {
    if n == 0 || cols < n {
        return Err(Error::InvalidDimension(format!(
            "need 1 <= n <= N, got n = {n}, N = {cols}"
        )));
    }
    Ok(())
}

/// Columns drawn independently and uniformly from the real unit sphere.
/// Column `j` uses a stream keyed by `(seed, j)`.
pub fn spherical_ensemble(n: usize, cols: usize, seed: u64) -> Result<MeasurementMatrix> {
    check_dims(n, cols)?;
    let mut entries = Array2::<C64>::zeros((n, cols));
    for j in 0..cols {
        let mut rng = seeded_rng(derive_seed(&[seed, j as u64]));
        loop {
            let col: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for r in 0..n {
                    entries[[r, j]] = C64::new(col[r] / norm, 0.0);
                }
                break;
            }
        }
    }
    MeasurementMatrix::from_entries(entries, EnsembleTag::Spherical, Some(seed))
}

/// I.i.d. Normal(0, 1/n) entries.
pub fn gaussian_ensemble(n: usize, cols: usize, seed: u64) -> Result<MeasurementMatrix> {
    check_dims(n, cols)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = Array2::<C64>::zeros((n, cols));
    for j in 0..cols {
        let mut rng = seeded_rng(derive_seed(&[seed, j as u64]));
        for r in 0..n {
            let g: f64 = rng.sample(StandardNormal);
            entries[[r, j]] = C64::new(g * scale, 0.0);
        }
    }
    Ok(MeasurementMatrix {
        entries,
        tag: EnsembleTag::Gaussian,
        seed: Some(seed),
    })
}

/// I.i.d. entries +-1/sqrt(n) with equal probability.
pub fn bernoulli_ensemble(n: usize, cols: usize, seed: u64) -> Result<MeasurementMatrix> {
    check_dims(n, cols)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = Array2::<C64>::zeros((n, cols));
    for j in 0..cols {
        let mut rng = seeded_rng(derive_seed(&[seed, j as u64]));
        for r in 0..n {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            entries[[r, j]] = C64::new(sign * scale, 0.0);
        }
    }
    Ok(MeasurementMatrix {
        entries,
        tag: EnsembleTag::Bernoulli,
        seed: Some(seed),
    })
}

/// Union `(I | F)` of the identity and the unitary DFT, `N = 2n`.
///
/// DFT convention: entry `(j, k)` of `F` is `exp(-2 pi i jk/n)/sqrt(n)`.
pub fn dirac_fourier(n: usize) -> Result<MeasurementMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be >= 1".into()));
    }
    let mut entries = Array2::<C64>::zeros((n, 2 * n));
    let scale = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        entries[[j, j]] = C64::new(1.0, 0.0);
        for k in 0..n {
            // reduce jk mod n in integers to keep the phase exact
            let phase = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
            entries[[j, n + k]] = C64::new(phase.cos() * scale, phase.sin() * scale);
        }
    }
    MeasurementMatrix::from_entries(entries, EnsembleTag::DiracFourier, None)
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Time-frequency shifts of the Alltop window `g_l = exp(2 pi i l^3 / n)/sqrt(n)`
/// for prime `n >= 5`; `N = n^2` columns ordered shift-major: column
/// `r*n + s` holds the window translated by `r` and modulated by `s`.
pub fn alltop_gabor(n: usize) -> Result<MeasurementMatrix> {
    if n < 5 || !is_prime(n) {
        return Err(Error::InvalidGaborOrder(n));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = Array2::<C64>::zeros((n, n * n));
    for r in 0..n {
        for s in 0..n {
            let col = r * n + s;
            for l in 0..n {
                let m = (l + n - r % n) % n;
                // combined phase (s*m + m^3) mod n, exact in u64
                let num = ((s as u64) * (m as u64) + (m as u64).pow(3)) % n as u64;
                let phase = 2.0 * PI * num as f64 / n as f64;
                entries[[l, col]] = C64::new(phase.cos() * scale, phase.sin() * scale);
            }
        }
    }
    MeasurementMatrix::from_entries(entries, EnsembleTag::AlltopGabor, None)
}
