//! Estimators and tests used by the Monte Carlo experiments.

use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Smallest sample accepted by the KS tests.
pub const KS_MIN_SAMPLES: usize = 8;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Mean, variance and their standard errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub var: f64,
    /// From the fourth central moment: `sqrt((mu4 - (n-3)/(n-1) s^4) / n)`.
    pub var_se: f64,
}

pub fn moments(xs: &[f64]) -> Result<Moments> {
    let n = xs.len();
    if n < 4 {
        return Err(Error::TooFewSamples { got: n, need: 4 });
    }
    let nf = n as f64;
    let mean = mean(xs);
    let var = variance(xs);
    let mu4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
    let var_var = (mu4 - (nf - 3.0) / (nf - 1.0) * var * var) / nf;
    Ok(Moments { n, mean, mean_se: (var / nf).sqrt(), var, var_se: var_var.max(0.0).sqrt() })
}

/// Delete-one jackknife standard error of a statistic.
pub fn jackknife_se(xs: &[f64], stat: impl Fn(&[f64]) -> f64) -> f64 {
    let n = xs.len();
    let mut buf = Vec::with_capacity(n.saturating_sub(1));
    let leave_out: Vec<f64> = (0..n)
        .map(|k| {
            buf.clear();
            buf.extend(xs[..k].iter().chain(&xs[k + 1..]));
            stat(&buf)
        })
        .collect();
    let m = mean(&leave_out);
    let ss: f64 = leave_out.iter().map(|v| (v - m).powi(2)).sum();
    ((n as f64 - 1.0) / n as f64 * ss).sqrt()
}

/// Jackknife standard error of the sample variance in closed form.
///
/// Leaving out `x_k` changes the variance to
/// `((n-1) s^2 - n/(n-1) (x_k - mean)^2) / (n-2)`, so the full delete-one
/// pass is linear in `n`.
pub fn jackknife_variance_se(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let s2 = variance(xs);
    let loo: Vec<f64> = xs.iter().map(|x| ((n - 1.0) * s2 - n / (n - 1.0) * (x - m).powi(2)) / (n - 2.0)).collect();
    let lm = mean(&loo);
    ((n - 1.0) / n * loo.iter().map(|v| (v - lm).powi(2)).sum::<f64>()).sqrt()
}

/// Standard error of a smooth statistic from its per-sample influence values.
pub fn influence_se(psi: &[f64]) -> f64 {
    (variance(psi) / psi.len() as f64).sqrt()
}

/// Per-sample influence values of the sample variance.
pub fn variance_influence(xs: &[f64]) -> Vec<f64> {
    let m = mean(xs);
    let s2 = variance(xs);
    xs.iter().map(|x| (x - m).powi(2) - s2).collect()
}

pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Linear-interpolation quantile of an already sorted sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(xs: &[f64], p: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, p)
}

/// Two-sided standard normal quantile for confidence `level`.
pub fn normal_quantile(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + level / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Effective sample size used for the asymptotic p-value.
    pub n_eff: f64,
}

impl KsResult {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.3 {
        // The alternating series converges slowly here and the value is 1 to
        // double precision anyway.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value with Stephens' small-sample correction.
fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

/// One-sample KS test of `xs` against a continuous `cdf`.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if xs.len() < KS_MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: xs.len(), need: KS_MIN_SAMPLES });
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (k, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((k as f64 + 1.0) / n - f).max(f - k as f64 / n);
    }
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n), n_eff: n })
}

/// One-sample KS test against `Exp(rate)`.
pub fn ks_exponential(xs: &[f64], rate: f64) -> Result<KsResult> {
    ks_one_sample(xs, |x| if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() })
}

/// Two-sample KS test. Ties (discrete data) are handled by comparing the
/// empirical distribution functions only after all equal values.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    for s in [a, b] {
        if s.len() < KS_MIN_SAMPLES {
            return Err(Error::TooFewSamples { got: s.len(), need: KS_MIN_SAMPLES });
        }
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] == v {
            i += 1;
        }
        while j < y.len() && y[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_eff = na * nb / (na + nb);
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n_eff), n_eff })
}

/// Clopper-Pearson interval for a binomial proportion at confidence `level`.
pub fn binomial_interval(successes: usize, trials: usize, level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    let (k, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0).expect("positive shape").inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k).expect("positive shape").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Binomial standard error `sqrt(p (1 - p) / n)` of an observed frequency.
pub fn binomial_se(successes: usize, trials: usize) -> f64 {
    let p = successes as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Weighted least-squares line `y = intercept + slope x` with known
/// per-point standard errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    /// Sum of squared standardized residuals; `chi2 / (k - 2)` near 1 means
    /// the stated errors explain the scatter.
    pub chi2: f64,
}

impl LineFit {
    /// Normal-theory interval for the slope at confidence `level`.
    pub fn slope_ci(&self, level: f64) -> (f64, f64) {
        let z = normal_quantile(level);
        (self.slope - z * self.slope_se, self.slope + z * self.slope_se)
    }
}

pub fn weighted_line_fit(x: &[f64], y: &[f64], se: &[f64]) -> Result<LineFit> {
    if x.len() < 3 || x.len() != y.len() || x.len() != se.len() {
        return Err(Error::TooFewSamples { got: x.len().min(y.len()).min(se.len()), need: 3 });
    }
    let w: Vec<f64> = se.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(a, b)| b * (a - xm).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).zip(&w).map(|((a, c), b)| b * (a - xm) * (c - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let chi2 = x.iter().zip(y).zip(&w).map(|((a, c), b)| b * (c - intercept - slope * a).powi(2)).sum();
    Ok(LineFit { slope, slope_se: (1.0 / sxx).sqrt(), intercept, chi2 })
}

/// Fit `log y` against `log x`, with `se(log y) = se(y) / y`.
pub fn log_log_fit(x: &[f64], y: &[f64], y_se: &[f64]) -> Result<LineFit> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let lse: Vec<f64> = y.iter().zip(y_se).map(|(v, s)| s / v).collect();
    weighted_line_fit(&lx, &ly, &lse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SiteStream;

    fn exp_sample(seed: u64, n: usize, rate: f64) -> Vec<f64> {
        let s = SiteStream::new(seed);
        (0..n).map(|k| s.exp(k, 0, rate)).collect()
    }

    #[test]
    fn ks_self_calibration() {
        let passes = (0..1000).filter(|&r| ks_exponential(&exp_sample(r, 200, 2.0), 2.0).unwrap().passes(0.01)).count();
        // 99% nominal; binomial sd over 1000 runs is about 0.3%.
        assert!((975..=1000).contains(&passes), "{passes}");
    }

    #[test]
    fn ks_two_sample_calibration() {
        let passes = (0..500)
            .filter(|&r| {
                let a = exp_sample(2 * r, 150, 1.0);
                let b = exp_sample(2 * r + 1, 100, 1.0);
                ks_two_sample(&a, &b).unwrap().passes(0.01)
            })
            .count();
        assert!(passes >= 485, "{passes}");
    }

    #[test]
    fn ks_degenerate_cases() {
        let constant = vec![0.5; 50];
        assert!(ks_exponential(&constant, 1.0).unwrap().p_value < 1e-6);
        let a = exp_sample(3, 40, 1.0);
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        assert!(ks_exponential(&a[..5], 1.0).is_err());
        assert!(ks_exponential(&exp_sample(4, 2000, 1.0), 1.5).unwrap().p_value < 1e-6);
    }

    #[test]
    fn two_sample_handles_ties() {
        let a = vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0];
        let b = vec![1.0, 2.0, 3.0, 4.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, 0.0);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Standard table values of the limiting distribution.
        assert!((kolmogorov_sf(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_sf(1.63) - 0.0098).abs() < 1e-3);
        assert_eq!(kolmogorov_sf(0.1), 1.0);
    }

    #[test]
    fn variance_se_matches_gamma_closed_form() {
        // Sum of k=3 rate-2 exponentials is Gamma(3, 2): variance 3/4,
        // fourth central moment 3k(k+2)/rate^4 = 45/16.
        let s = SiteStream::new(11);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|k| (0..3).map(|c| s.exp(k, c, 2.0)).sum()).collect();
        let m = moments(&xs).unwrap();
        let nf = n as f64;
        let exact_se = ((45.0 / 16.0 - (nf - 3.0) / (nf - 1.0) * 0.5625) / nf).sqrt();
        assert!((m.var - 0.75).abs() < 4.0 * exact_se);
        assert!((m.var_se / exact_se - 1.0).abs() < 0.05, "{} vs {}", m.var_se, exact_se);
        let jk = jackknife_variance_se(&xs);
        assert!((jk / exact_se - 1.0).abs() < 0.05);
        assert!((influence_se(&variance_influence(&xs)) / exact_se - 1.0).abs() < 0.05);
    }

    #[test]
    fn closed_form_jackknife_matches_generic() {
        let xs = exp_sample(5, 60, 1.0);
        let a = jackknife_variance_se(&xs);
        let b = jackknife_se(&xs, variance);
        assert!((a - b).abs() < 1e-10 * b);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 + 2.0 * v).collect();
        let f = weighted_line_fit(&x, &y, &[0.1; 4]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 0.5).abs() < 1e-12);
        let (lo, hi) = f.slope_ci(0.95);
        assert!(lo < 2.0 && hi > 2.0);
        let g = log_log_fit(&[10.0, 100.0, 1000.0], &[1.0, 10.0, 100.0], &[0.1, 1.0, 10.0]).unwrap();
        assert!((g.slope - 1.0).abs() < 1e-12);
        assert!(weighted_line_fit(&x[..2], &y[..2], &[0.1; 2]).is_err());
    }

    #[test]
    fn binomial_bounds() {
        let (lo, hi) = binomial_interval(0, 5000, 0.95);
        assert_eq!(lo, 0.0);
        // Exact: 1 - 0.025^(1/5000).
        assert!((hi - (1.0 - 0.025f64.powf(1.0 / 5000.0))).abs() < 1e-9);
        let (lo, hi) = binomial_interval(50, 100, 0.95);
        assert!(lo < 0.5 && hi > 0.5 && lo > 0.39 && hi < 0.61);
    }

    #[test]
    fn quantiles_and_correlation() {
        let v = [4.0, 1.0, 3.0, 2.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 5.0);
        assert!((correlation(&v, &v) - 1.0).abs() < 1e-12);
        assert_eq!(correlation(&v, &[1.0; 5]), 0.0);
        assert!((normal_quantile(0.95) - 1.959964).abs() < 1e-5);
    }
}
