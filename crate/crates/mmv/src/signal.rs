//! Jointly sparse signal model: supports, coefficient matrices, mixed norms,
//! row signs, and random coefficient generation.
//!
//! A signal is an `N x L` complex matrix; it is jointly `k`-sparse when at
//! most `k` rows are nonzero. All ensembles and solvers in the crate share
//! these types.

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{canonical_sum, vec_norm, C64};
use crate::rng::{derive_seed, seeded_rng};

/// Ordered set of row indices, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Support(Vec<usize>);

impl Support {
    /// Build from arbitrary indices; sorts and rejects duplicates.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("support contains duplicate indices".into()));
        }
        Ok(Support(indices))
    }

    pub fn empty() -> Self {
        Support(Vec::new())
    }

    pub fn cardinality(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Indices in `[0, n)` not contained in the support.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&j| !self.contains(j)).collect()
    }
}

/// Complex `N x L` coefficient matrix with an optional declared support.
///
/// When a support is declared, every row outside it is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSignal {
    entries: Array2<C64>,
    declared_support: Option<Support>,
}

impl JointSignal {
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidDimension(format!(
                "signal must have at least one row and one channel, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(JointSignal {
            entries,
            declared_support: None,
        })
    }

    /// Attach a declared support; rows outside it must be exactly zero.
    pub fn with_support(entries: Array2<C64>, support: Support) -> Result<Self> {
        let signal = JointSignal::new(entries)?;
        if let Some(max) = support.max_index() {
            if max >= signal.n_rows() {
                return Err(Error::SupportOutOfRange {
                    index: max,
                    n_cols: signal.n_rows(),
                });
            }
        }
        for j in 0..signal.n_rows() {
            if !support.contains(j)
                && signal.entries.row(j).iter().any(|z| *z != C64::new(0.0, 0.0))
            {
                return Err(Error::Config(format!(
                    "row {j} outside the declared support is nonzero"
                )));
            }
        }
        Ok(JointSignal {
            entries: signal.entries,
            declared_support: Some(support),
        })
    }

    pub fn zero(n_rows: usize, n_channels: usize) -> Result<Self> {
        JointSignal::with_support(Array2::zeros((n_rows, n_channels)), Support::empty())
    }

    pub fn entries(&self) -> ArrayView2<'_, C64> {
        self.entries.view()
    }

    pub fn n_rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_channels(&self) -> usize {
        self.entries.ncols()
    }

    pub fn declared_support(&self) -> Option<&Support> {
        self.declared_support.as_ref()
    }

    /// Euclidean norm of row `j`, canonical reduction.
    pub fn row_norm(&self, j: usize) -> f64 {
        vec_norm(self.entries.row(j))
    }
}

/// Random models for the nonzero coefficient rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelVariant {
    RealGaussian,
    RealSpherical,
    ComplexGaussian,
    ComplexSpherical,
}

impl ModelVariant {
    pub fn is_complex(self) -> bool {
        matches!(self, ModelVariant::ComplexGaussian | ModelVariant::ComplexSpherical)
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelVariant::RealGaussian => "real-gaussian",
            ModelVariant::RealSpherical => "real-spherical",
            ModelVariant::ComplexGaussian => "complex-gaussian",
            ModelVariant::ComplexSpherical => "complex-spherical",
        }
    }
}

/// Coefficient distribution: a row model plus the positive diagonal scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientModel {
    pub variant: ModelVariant,
    pub sigma: Vec<f64>,
}

impl CoefficientModel {
    pub fn new(variant: ModelVariant, sigma: Vec<f64>) -> Result<Self> {
        if sigma.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Config(
                "all diagonal scales must be strictly positive".into(),
            ));
        }
        Ok(CoefficientModel { variant, sigma })
    }

    /// Dynamic range max(sigma) / min(sigma); 1 for an empty diagonal.
    pub fn scale_ratio(&self) -> f64 {
        let max = self.sigma.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.sigma.iter().copied().fold(f64::INFINITY, f64::min);
        if self.sigma.is_empty() {
            1.0
        } else {
            max / min
        }
    }
}

/// Sum over rows of the Euclidean row norms.
pub fn mixed_norm_21(x: &JointSignal) -> f64 {
    let rows = x.entries();
    (0..rows.nrows()).map(|j| vec_norm(rows.row(j))).sum()
}

/// Row-normalized sign matrix: row j is `X^j / ||X^j||` for nonzero rows,
/// zero otherwise. For one channel this reduces to the entrywise sign.
pub fn row_sign(x: &JointSignal) -> Array2<C64> {
    let rows = x.entries();
    let mut out = Array2::<C64>::zeros(rows.dim());
    for j in 0..rows.nrows() {
        let norm = vec_norm(rows.row(j));
        if norm > 0.0 {
            for l in 0..rows.ncols() {
                out[[j, l]] = rows[[j, l]] / norm;
            }
        }
    }
    out
}

/// Indices of rows with Euclidean norm strictly above `tol`, ascending.
pub fn support_of(x: &JointSignal, tol: f64) -> Support {
    let rows = x.entries();
    let indices = (0..rows.nrows())
        .filter(|&j| vec_norm(rows.row(j)) > tol)
        .collect();
    Support(indices)
}

/// Draw a jointly sparse coefficient matrix `X` with `X^S = Sigma * Phi`.
///
/// Row `j` of `Phi` is sampled from a stream keyed by `(seed, j)`, so draws
/// are order-independent and bit-identical for a fixed seed.
pub fn sample_coefficients(
    model: &CoefficientModel,
    support: &Support,
    n_rows: usize,
    n_channels: usize,
    seed: u64,
) -> Result<JointSignal> {
    if support.cardinality() != model.sigma.len() {
        return Err(Error::DimensionMismatch(format!(
            "support size {} vs sigma length {}",
            support.cardinality(),
            model.sigma.len()
        )));
    }
    if let Some(max) = support.max_index() {
        if max >= n_rows {
            return Err(Error::SupportOutOfRange {
                index: max,
                n_cols: n_rows,
            });
        }
    }
    if n_channels == 0 {
        return Err(Error::InvalidDimension("need at least one channel".into()));
    }
    let mut entries = Array2::<C64>::zeros((n_rows, n_channels));
    for (pos, j) in support.iter().enumerate() {
        let mut rng = seeded_rng(derive_seed(&[seed, j as u64]));
        let row = sample_phi_row(model.variant, n_channels, &mut rng);
        let scale = model.sigma[pos];
        for l in 0..n_channels {
            entries[[j, l]] = row[l] * scale;
        }
    }
    JointSignal::with_support(entries, support.clone())
}

fn sample_phi_row<R: Rng>(variant: ModelVariant, n_channels: usize, rng: &mut R) -> Vec<C64> {
    let gaussian_row = |rng: &mut R, complex: bool| -> Vec<C64> {
        (0..n_channels)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
                C64::new(re, im)
            })
            .collect()
    };
    match variant {
        ModelVariant::RealGaussian => gaussian_row(rng, false),
        ModelVariant::ComplexGaussian => gaussian_row(rng, true),
        ModelVariant::RealSpherical | ModelVariant::ComplexSpherical => {
            let complex = variant == ModelVariant::ComplexSpherical;
            loop {
                let row = gaussian_row(rng, complex);
                let norm =
                    canonical_sum(row.iter().map(|z| z.norm_sqr()).collect()).sqrt();
                if norm > 0.0 {
                    return row.into_iter().map(|z| z / norm).collect();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn signal_from_rows(rows: &[Vec<(f64, f64)>]) -> JointSignal {
        let n = rows.len();
        let l = rows[0].len();
        let entries = Array2::from_shape_fn((n, l), |(i, j)| {
            C64::new(rows[i][j].0, rows[i][j].1)
        });
        JointSignal::new(entries).unwrap()
    }

    #[test]
    fn mixed_norm_single_row_of_ones() {
        let l = 5;
        let x = signal_from_rows(&[vec![(1.0, 0.0); l]]);
        assert_abs_diff_eq!(mixed_norm_21(&x), (l as f64).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn mixed_norm_replicated_columns_is_sqrt_l_times_l1() {
        // X = (x|x|...|x) with L identical columns has mixed norm sqrt(L)*||x||_1.
        let x_vec = [(3.0, -1.0), (0.0, 0.0), (-2.5, 0.5), (0.0, 4.0)];
        let l = 7usize;
        let rows: Vec<Vec<(f64, f64)>> = x_vec.iter().map(|&e| vec![e; l]).collect();
        let x = signal_from_rows(&rows);
        let l1: f64 = x_vec
            .iter()
            .map(|&(re, im)| (re * re + im * im).sqrt())
            .sum();
        assert_abs_diff_eq!(
            mixed_norm_21(&x),
            (l as f64).sqrt() * l1,
            epsilon = 1e-12
        );
    }

    #[test]
    fn mixed_norm_hand_evaluated_rows() {
        // rows (3,4), (0,0), (1,0): norms 5 + 0 + 1 = 6
        let x = signal_from_rows(&[
            vec![(3.0, 0.0), (4.0, 0.0)],
            vec![(0.0, 0.0), (0.0, 0.0)],
            vec![(1.0, 0.0), (0.0, 0.0)],
        ]);
        assert_abs_diff_eq!(mixed_norm_21(&x), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn row_sign_single_channel_is_elementwise_sign() {
        let x = signal_from_rows(&[vec![(-2.0, 0.0)], vec![(0.0, 0.0)], vec![(5.0, 0.0)]]);
        let s = row_sign(&x);
        assert_eq!(s[[0, 0]], C64::new(-1.0, 0.0));
        assert_eq!(s[[1, 0]], C64::new(0.0, 0.0));
        assert_eq!(s[[2, 0]], C64::new(1.0, 0.0));
    }

    #[test]
    fn row_sign_zero_matrix_stays_zero() {
        let x = JointSignal::new(Array2::zeros((4, 3))).unwrap();
        assert!(row_sign(&x).iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn row_sign_hand_evaluated_row() {
        let x = signal_from_rows(&[vec![(3.0, 0.0), (4.0, 0.0)]]);
        let s = row_sign(&x);
        assert_abs_diff_eq!(s[[0, 0]].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(s[[0, 1]].re, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn row_sign_rows_have_unit_norm() {
        let support = Support::new(vec![0, 2, 5]).unwrap();
        let model =
            CoefficientModel::new(ModelVariant::ComplexGaussian, vec![2.0, 0.5, 7.0]).unwrap();
        let x = sample_coefficients(&model, &support, 8, 3, 99).unwrap();
        let s = row_sign(&x);
        for j in support.iter() {
            let norm = vec_norm(s.row(j));
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn support_of_zero_matrix_is_empty() {
        let x = JointSignal::new(Array2::zeros((6, 2))).unwrap();
        assert!(support_of(&x, 0.0).is_empty());
        assert!(support_of(&x, 10.0).is_empty());
    }

    #[test]
    fn support_of_detects_nonzero_rows() {
        let mut entries = Array2::<C64>::zeros((6, 2));
        entries[[1, 0]] = C64::new(0.5, 0.0);
        entries[[4, 1]] = C64::new(0.0, -0.25);
        let x = JointSignal::new(entries).unwrap();
        assert_eq!(support_of(&x, 0.0).indices(), &[1, 4]);
    }

    #[test]
    fn support_of_applies_threshold() {
        let mut entries = Array2::<C64>::zeros((8, 1));
        entries[[2, 0]] = C64::new(1e-9, 0.0);
        entries[[7, 0]] = C64::new(1.0, 0.0);
        let x = JointSignal::new(entries).unwrap();
        assert_eq!(support_of(&x, 1e-6).indices(), &[7]);
    }

    #[test]
    fn sample_rejects_sigma_length_mismatch() {
        let support = Support::new(vec![0, 1]).unwrap();
        let model = CoefficientModel::new(ModelVariant::RealGaussian, vec![1.0]).unwrap();
        assert!(sample_coefficients(&model, &support, 4, 2, 0).is_err());
    }

    #[test]
    fn spherical_rows_have_unit_norm_before_scaling() {
        let support = Support::new((0..5).collect()).unwrap();
        let model =
            CoefficientModel::new(ModelVariant::RealSpherical, vec![1.0; 5]).unwrap();
        let x = sample_coefficients(&model, &support, 5, 6, 1234).unwrap();
        for j in 0..5 {
            assert_abs_diff_eq!(x.row_norm(j), 1.0, epsilon = 1e-12);
        }
        let model =
            CoefficientModel::new(ModelVariant::ComplexSpherical, vec![1.0; 5]).unwrap();
        let x = sample_coefficients(&model, &support, 5, 6, 1234).unwrap();
        for j in 0..5 {
            assert_abs_diff_eq!(x.row_norm(j), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gaussian_normalized_by_row_norm_matches_spherical_draw() {
        // Scaling a Gaussian row by its inverse norm lands on the sphere.
        let support = Support::new(vec![3]).unwrap();
        let model = CoefficientModel::new(ModelVariant::RealGaussian, vec![1.0]).unwrap();
        let x = sample_coefficients(&model, &support, 4, 8, 5).unwrap();
        let norm = x.row_norm(3);
        let model_scaled =
            CoefficientModel::new(ModelVariant::RealGaussian, vec![1.0 / norm]).unwrap();
        let y = sample_coefficients(&model_scaled, &support, 4, 8, 5).unwrap();
        assert_abs_diff_eq!(y.row_norm(3), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_row_norms_average_to_expected_norm_constant() {
        // 1e5 draws at L = 4: the mean row norm matches the closed-form
        // expected Gaussian norm within 3 standard errors
        let l = 4;
        let rows_per_call = 1000;
        let calls = 100;
        let support = Support::new((0..rows_per_call).collect()).unwrap();
        let model =
            CoefficientModel::new(ModelVariant::RealGaussian, vec![1.0; rows_per_call])
                .unwrap();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for call in 0..calls {
            let x =
                sample_coefficients(&model, &support, rows_per_call, l, 31_000 + call).unwrap();
            for j in 0..rows_per_call {
                let norm = x.row_norm(j);
                sum += norm;
                sum_sq += norm * norm;
            }
        }
        let n = (rows_per_call * calls as usize) as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        let se = (var / n).sqrt();
        let expected = crate::bounds::expected_gaussian_norm(l).unwrap();
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "mean {mean} vs expected {expected} (se {se})"
        );
    }

    #[test]
    fn sampling_is_bit_identical_per_seed() {
        let support = Support::new(vec![1, 4, 9]).unwrap();
        let model =
            CoefficientModel::new(ModelVariant::ComplexSpherical, vec![1.0, 2.0, 3.0]).unwrap();
        let a = sample_coefficients(&model, &support, 12, 4, 777).unwrap();
        let b = sample_coefficients(&model, &support, 12, 4, 777).unwrap();
        assert_eq!(a, b);
        let c = sample_coefficients(&model, &support, 12, 4, 778).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn declared_support_rejects_nonzero_outside_rows() {
        let mut entries = Array2::<C64>::zeros((4, 2));
        entries[[2, 1]] = C64::new(1.0, 0.0);
        let support = Support::new(vec![0]).unwrap();
        assert!(JointSignal::with_support(entries, support).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_signal(n: usize, l: usize) -> impl Strategy<Value = JointSignal> {
            proptest::collection::vec(-100.0f64..100.0, n * l * 2).prop_map(move |vals| {
                let entries = Array2::from_shape_fn((n, l), |(i, j)| {
                    let base = 2 * (i * l + j);
                    C64::new(vals[base], vals[base + 1])
                });
                JointSignal::new(entries).unwrap()
            })
        }

        proptest! {
            #[test]
            fn mixed_norm_absolutely_homogeneous(x in arb_signal(6, 3), c in -50.0f64..50.0) {
                let scaled_entries = x.entries().mapv(|z| z * c);
                let scaled = JointSignal::new(scaled_entries).unwrap();
                let lhs = mixed_norm_21(&scaled);
                let rhs = c.abs() * mixed_norm_21(&x);
                prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
            }

            #[test]
            fn mixed_norm_triangle_inequality(a in arb_signal(5, 4), b in arb_signal(5, 4)) {
                let sum = JointSignal::new(&a.entries() + &b.entries()).unwrap();
                prop_assert!(
                    mixed_norm_21(&sum) <= mixed_norm_21(&a) + mixed_norm_21(&b) + 1e-9
                );
            }

            #[test]
            fn row_sign_is_idempotent_in_norm(x in arb_signal(6, 3)) {
                let s = row_sign(&x);
                for j in 0..6 {
                    let norm = vec_norm(s.row(j));
                    prop_assert!(norm == 0.0 || (norm - 1.0).abs() <= 1e-12);
                }
            }
        }
    }
}
