//! Hypothesis tests backing the selection and duration analyses.
//!
//! Two tests are exposed: a one-sided one-sample t-test on per-fold score
//! differences (is the classifier better than the no-information baseline?)
//! and Welch's unequal-variance two-sample t-test (do edge durations differ
//! between variants?). Both sit on a self-contained Student-t CDF built from
//! a Lanczos log-gamma and a Lentz continued-fraction evaluation of the
//! regularized incomplete beta function.

use serde::Serialize;

use crate::error::{Error, Result};

/// Direction of the alternative hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Alternative {
    Greater,
    TwoSided,
}

/// Outcome of a t-test.
#[derive(Debug, Clone, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    /// Welch–Satterthwaite estimate for the two-sample test, `k - 1` for the
    /// one-sample test.
    pub dof: f64,
    pub p_value: f64,
    pub alternative: Alternative,
}

/// ln Γ(z) for z > 0, Lanczos approximation (g = 5, 6 coefficients).
fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 6] = [
        76.180091729471460,
        -86.505320329416770,
        24.014098240830910,
        -1.2317395724501550,
        0.12086509738661790e-2,
        -0.53952393849530000e-5,
    ];
    debug_assert!(z > 0.0);
    let mut sum = 1.000000000190015;
    for (i, c) in COEFFS.iter().enumerate() {
        sum += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * sum / z).ln()
}

/// Regularized incomplete beta function I_x(a, b) via Lentz's continued
/// fraction, with the symmetry switch for fast convergence.
fn reg_inc_beta(x: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - reg_inc_beta(1.0 - x, b, a);
    }

    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_gamma(a) - ln_gamma(b) + ln_gamma(a + b);
    let front = ln_front.exp();

    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        // Even step.
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // Odd step.
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    front * h / a
}

/// CDF of Student's t-distribution with `dof` degrees of freedom.
pub fn t_cdf(x: f64, dof: f64) -> Result<f64> {
    if !(dof > 0.0) {
        return Err(Error::BadDof(dof));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    if x.is_infinite() {
        return Ok(if x > 0.0 { 1.0 } else { 0.0 });
    }
    let z = dof / (dof + x * x);
    let ib = reg_inc_beta(z, dof / 2.0, 0.5);
    Ok(if x > 0.0 { 1.0 - ib / 2.0 } else { ib / 2.0 })
}

/// Smallest p-value ever reported; tests never emit exactly zero.
const P_FLOOR: f64 = f64::MIN_POSITIVE;

fn clamp_p(p: f64) -> f64 {
    p.clamp(P_FLOOR, 1.0)
}

/// One-sided one-sample t-test of H1: mean(diffs) > 0.
///
/// Zero sample variance short-circuits: the evidence is all one way, so
/// p = 0⁺ when the mean is positive and p = 1 otherwise.
pub fn t_test_one_sample_greater(diffs: &[f64]) -> Result<TestResult> {
    let k = diffs.len();
    if k < 2 {
        return Err(Error::InsufficientSamples { need: 2, got: k });
    }
    let kf = k as f64;
    let mean = diffs.iter().sum::<f64>() / kf;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (kf - 1.0);
    let sd = var.sqrt();
    let dof = kf - 1.0;

    if sd == 0.0 {
        let (statistic, p) = if mean > 0.0 {
            (f64::INFINITY, P_FLOOR)
        } else if mean < 0.0 {
            (f64::NEG_INFINITY, 1.0)
        } else {
            (0.0, 1.0)
        };
        return Ok(TestResult {
            statistic,
            dof,
            p_value: p,
            alternative: Alternative::Greater,
        });
    }

    let statistic = mean / (sd / kf.sqrt());
    let p = clamp_p(1.0 - t_cdf(statistic, dof)?);
    Ok(TestResult {
        statistic,
        dof,
        p_value: p,
        alternative: Alternative::Greater,
    })
}

/// Welch's two-sample t-test (unequal variances), two-sided.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() < 2 {
        return Err(Error::InsufficientSamples {
            need: 2,
            got: a.len(),
        });
    }
    if b.len() < 2 {
        return Err(Error::InsufficientSamples {
            need: 2,
            got: b.len(),
        });
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let ma = a.iter().sum::<f64>() / na;
    let mb = b.iter().sum::<f64>() / nb;
    let va = a.iter().map(|x| (x - ma) * (x - ma)).sum::<f64>() / (na - 1.0);
    let vb = b.iter().map(|x| (x - mb) * (x - mb)).sum::<f64>() / (nb - 1.0);

    if va + vb == 0.0 {
        // Both samples constant: identical means carry no evidence, distinct
        // means are infinitely separated.
        let identical = ma == mb;
        return Ok(TestResult {
            statistic: if identical {
                0.0
            } else if ma > mb {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            dof: na + nb - 2.0,
            p_value: if identical { 1.0 } else { P_FLOOR },
            alternative: Alternative::TwoSided,
        });
    }

    let sa = va / na;
    let sb = vb / nb;
    let statistic = (ma - mb) / (sa + sb).sqrt();
    let dof = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let p = clamp_p(2.0 * (1.0 - t_cdf(statistic.abs(), dof)?));
    Ok(TestResult {
        statistic,
        dof,
        p_value: p,
        alternative: Alternative::TwoSided,
    })
}

/// Benjamini–Hochberg step-up adjustment. Returns adjusted p-values in the
/// input order. Off by default in the selection pipeline.
pub fn benjamini_hochberg(pvals: &[f64]) -> Vec<f64> {
    let m = pvals.len();
    if m == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| pvals[i].partial_cmp(&pvals[j]).expect("NaN p-value"));
    let mut adjusted = vec![0.0f64; m];
    let mut running_min = 1.0f64;
    for rank in (0..m).rev() {
        let idx = order[rank];
        let candidate = (pvals[idx] * m as f64 / (rank + 1) as f64).min(1.0);
        running_min = running_min.min(candidate);
        adjusted[idx] = running_min;
    }
    adjusted
}

/// Render a p-value for reports; values below 1e-16 print as "<1e-16".
pub fn format_p(p: f64) -> String {
    if p < 1e-16 {
        "<1e-16".to_string()
    } else {
        format!("{p:.6e}")
    }
}
