//! Power-exponential spatial correlation, the correlation radius it implies,
//! and Pearson correlation of sampled time series.

use crate::error::{check, Error, Result};

/// Correlation and noise parameters of the sensed field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Length scale of the correlation model, meters.
    pub theta1: f64,
    /// Exponent of the correlation model, in `(0, 2]`.
    pub theta2: f64,
    /// Correlation threshold that defines "strongly correlated", in `(0, 1]`.
    pub alpha: f64,
    /// Variance of the sensed event.
    pub sigma_s2: f64,
    /// Variance of the additive observation noise.
    pub sigma_n2: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            theta1: 70.0,
            theta2: 1.0,
            alpha: 0.7,
            sigma_s2: 1.0,
            sigma_n2: 0.1,
        }
    }
}

impl ModelParams {
    pub fn new(theta1: f64, theta2: f64, alpha: f64, sigma_s2: f64, sigma_n2: f64) -> Result<Self> {
        let p = ModelParams {
            theta1,
            theta2,
            alpha,
            sigma_s2,
            sigma_n2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check(
            self.theta1 > 0.0 && self.theta1.is_finite(),
            "theta1",
            self.theta1,
            "> 0",
        )?;
        check(
            self.theta2 > 0.0 && self.theta2 <= 2.0,
            "theta2",
            self.theta2,
            "in (0, 2]",
        )?;
        check(
            self.alpha > 0.0 && self.alpha <= 1.0,
            "alpha",
            self.alpha,
            "in (0, 1]",
        )?;
        check(
            self.sigma_s2 > 0.0 && self.sigma_s2.is_finite(),
            "sigma_s2",
            self.sigma_s2,
            "> 0",
        )?;
        check(self.sigma_n2 >= 0.0, "sigma_n2", self.sigma_n2, ">= 0")
    }

    /// Noise-to-signal ratio `σ_N² / σ_S²` used as the ridge term of every MMSE solve.
    pub fn noise_ratio(&self) -> f64 {
        self.sigma_n2 / self.sigma_s2
    }
}

/// `exp(-(d / θ1)^θ2)`.
pub fn corr_pe(d: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    check(d >= 0.0, "distance", d, ">= 0")?;
    Ok(corr_pe_unchecked(d, params))
}

#[inline]
pub(crate) fn corr_pe_unchecked(d: f64, params: &ModelParams) -> f64 {
    libm::exp(-libm::pow(d / params.theta1, params.theta2))
}

/// Largest distance at which [`corr_pe`] still reaches `alpha`:
/// `θ1 · ln(1/α)^(1/θ2)`.
pub fn correlation_radius(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let log_inv = -libm::log(params.alpha);
    if log_inv <= 0.0 {
        return Ok(0.0);
    }
    Ok(params.theta1 * libm::pow(log_inv, 1.0 / params.theta2))
}

/// Two equally long windows of readings from a pair of nodes.
#[derive(Clone, Copy, Debug)]
pub struct SampleWindow<'a> {
    samples_i: &'a [f64],
    samples_j: &'a [f64],
}

impl<'a> SampleWindow<'a> {
    pub fn new(samples_i: &'a [f64], samples_j: &'a [f64]) -> Result<Self> {
        if samples_i.len() != samples_j.len() {
            return Err(Error::DimensionMismatch {
                expected: samples_i.len(),
                found: samples_j.len(),
            });
        }
        check(
            samples_i.len() >= 2,
            "window length",
            samples_i.len() as f64,
            ">= 2",
        )?;
        Ok(SampleWindow {
            samples_i,
            samples_j,
        })
    }

    pub fn len(&self) -> usize {
        self.samples_i.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples_i.is_empty()
    }
}

/// Pearson correlation over the window, using population (divide-by-n) moments.
pub fn sample_correlation(w: &SampleWindow<'_>) -> Result<f64> {
    let n = w.len() as f64;
    let mean_i = w.samples_i.iter().sum::<f64>() / n;
    let mean_j = w.samples_j.iter().sum::<f64>() / n;
    let (mut var_i, mut var_j, mut cov) = (0.0, 0.0, 0.0);
    for (a, b) in w.samples_i.iter().zip(w.samples_j) {
        let (da, db) = (a - mean_i, b - mean_j);
        var_i += da * da;
        var_j += db * db;
        cov += da * db;
    }
    if var_i <= 0.0 || var_j <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let rho = (cov / n) / libm::sqrt((var_i / n) * (var_j / n));
    Ok(rho.clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn pe(theta1: f64, theta2: f64, alpha: f64) -> ModelParams {
        ModelParams::new(theta1, theta2, alpha, 1.0, 0.1).unwrap()
    }

    #[test]
    fn corr_at_zero_is_one() {
        assert_eq!(corr_pe(0.0, &pe(70.0, 1.3, 0.7)).unwrap(), 1.0);
    }

    #[test]
    fn corr_at_length_scale() {
        let v = corr_pe(70.0, &pe(70.0, 1.0, 0.7)).unwrap();
        assert_abs_diff_eq!(v, 0.367_879_441_171_442_3, epsilon = 1e-12);
        let v = corr_pe(24.967, &pe(70.0, 1.0, 0.7)).unwrap();
        assert_abs_diff_eq!(v, 0.7, epsilon = 1e-4);
    }

    #[test]
    fn radius_values() {
        assert_eq!(correlation_radius(&pe(70.0, 1.0, 1.0)).unwrap(), 0.0);
        let r1 = correlation_radius(&pe(70.0, 1.0, 0.7)).unwrap();
        assert_abs_diff_eq!(r1, 24.967_246_075_711, epsilon = 1e-9);
        let r2 = correlation_radius(&pe(70.0, 2.0, 0.7)).unwrap();
        assert_abs_diff_eq!(r2, 41.805_588_445_802, epsilon = 1e-9);
        assert_abs_diff_eq!(
            corr_pe(r1, &pe(70.0, 1.0, 0.7)).unwrap(),
            0.7,
            epsilon = 1e-12
        );
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(0.0, 1.0, 0.7, 1.0, 0.1).is_err());
        assert!(ModelParams::new(70.0, 2.5, 0.7, 1.0, 0.1).is_err());
        assert!(ModelParams::new(70.0, 1.0, 0.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(70.0, 1.0, 0.7, 0.0, 0.1).is_err());
        assert!(ModelParams::new(70.0, 1.0, 0.7, 1.0, -0.1).is_err());
        assert!(corr_pe(-1.0, &ModelParams::default()).is_err());
    }

    #[test]
    fn sample_correlation_extremes() {
        let s: Vec<f64> = (0..50)
            .map(|i| libm::sin(i as f64 * 0.3) + 0.01 * i as f64)
            .collect();
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let w = SampleWindow::new(&s, &s).unwrap();
        assert_abs_diff_eq!(sample_correlation(&w).unwrap(), 1.0, epsilon = 1e-12);
        let w = SampleWindow::new(&s, &neg).unwrap();
        assert_abs_diff_eq!(sample_correlation(&w).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn sample_correlation_errors() {
        let flat = [2.0; 5];
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        let w = SampleWindow::new(&flat, &s).unwrap();
        assert_eq!(sample_correlation(&w).unwrap_err(), Error::DegenerateSeries);
        assert!(SampleWindow::new(&s[..1], &s[..1]).is_err());
        assert!(SampleWindow::new(&s, &s[..3]).is_err());
    }

    #[test]
    fn independent_series_are_nearly_uncorrelated() {
        let n = 100_000;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let a: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let rho = sample_correlation(&SampleWindow::new(&a, &b).unwrap()).unwrap();
        assert!(rho.abs() < 3.0 / libm::sqrt(n as f64), "rho = {rho}");
    }

    fn valid_params() -> impl Strategy<Value = ModelParams> {
        (1.0f64..500.0, 0.05f64..=2.0, 0.01f64..=1.0)
            .prop_map(|(t1, t2, a)| ModelParams::new(t1, t2, a, 1.0, 0.1).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn corr_is_strictly_decreasing(d1 in 0.0f64..80.0, gap in 0.01f64..80.0) {
            let p = pe(70.0, 1.0, 0.7);
            prop_assert!(corr_pe(d1, &p).unwrap() > corr_pe(d1 + gap, &p).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn radius_hits_threshold(p in valid_params()) {
            let r = correlation_radius(&p).unwrap();
            prop_assert!((corr_pe(r, &p).unwrap() - p.alpha).abs() < 1e-10);
        }

        #[test]
        fn correlation_bounded_and_affine_invariant(
            xs in proptest::collection::vec(-10.0f64..10.0, 3..40),
            ys_seed in proptest::collection::vec(-10.0f64..10.0, 40),
            slope in 0.1f64..10.0,
            shift in -5.0f64..5.0,
        ) {
            let ys = &ys_seed[..xs.len()];
            let w = SampleWindow::new(&xs, ys).unwrap();
            if let Ok(rho) = sample_correlation(&w) {
                prop_assert!((-1.0..=1.0).contains(&rho));
                let scaled: Vec<f64> = xs.iter().map(|v| slope * v + shift).collect();
                let rho2 = sample_correlation(&SampleWindow::new(&scaled, ys).unwrap()).unwrap();
                prop_assert!((rho - rho2).abs() < 1e-9);
                let sym = sample_correlation(&SampleWindow::new(ys, &xs).unwrap()).unwrap();
                prop_assert!((rho - sym).abs() < 1e-12);
            }
        }
    }
}
