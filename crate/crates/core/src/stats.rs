//! Correlation, significance tests and a binned mutual-information
//! estimator.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn check_pair(xs: &[f64], ys: &[f64], min: usize, xname: &str) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < min {
        return Err(Error::TooFewSamples { name: String::from(xname), min, got: xs.len() });
    }
    Ok(())
}

/// Sample Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    pearson_named(xs, ys, "x", "y")
}

/// [`pearson`] with series names used in error messages.
pub fn pearson_named(xs: &[f64], ys: &[f64], xname: &str, yname: &str) -> Result<f64> {
    check_pair(xs, ys, 3, xname)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ConstantSeries(String::from(xname)));
    }
    if syy == 0.0 {
        return Err(Error::ConstantSeries(String::from(yname)));
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = f64::from(m);
        let m2 = 2.0 * m;
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
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b) + a * libm::log(x) + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Two-tailed p-value of a Pearson `r` over `n` samples (t-test with
/// n - 2 degrees of freedom).
pub fn t_test_p(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooFewSamples { name: String::from("n"), min: 3, got: n });
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidCorrelation(r));
    }
    let df = (n - 2) as f64;
    let one_minus = 1.0 - r * r;
    if one_minus <= 0.0 {
        return Ok(0.0);
    }
    let t2 = r * r * df / one_minus;
    // P(|T| > t) = I_{df / (df + t^2)}(df / 2, 1 / 2)
    Ok(incomplete_beta(df / 2.0, 0.5, df / (df + t2)).clamp(0.0, 1.0))
}

/// Two-tailed p-value that two correlations from independent samples are
/// equal, via Fisher's z transformation.
pub fn fisher_z_compare(r1: f64, n1: usize, r2: f64, n2: usize) -> Result<f64> {
    for n in [n1, n2] {
        if n <= 3 {
            return Err(Error::SampleTooSmall(n));
        }
    }
    for r in [r1, r2] {
        if !(-1.0..=1.0).contains(&r) {
            return Err(Error::InvalidCorrelation(r));
        }
    }
    let se = libm::sqrt(1.0 / (n1 - 3) as f64 + 1.0 / (n2 - 3) as f64);
    let z = (libm::atanh(r1) - libm::atanh(r2)) / se;
    if z.is_nan() {
        // both correlations at the same bound
        return Ok(1.0);
    }
    Ok(libm::erfc(z.abs() / core::f64::consts::SQRT_2).clamp(0.0, 1.0))
}

/// Smallest `b` with `b^3 >= n`.
pub fn default_bins(n: usize) -> usize {
    let mut b = libm::cbrt(n as f64) as usize;
    while b.pow(3) < n {
        b += 1;
    }
    while b > 1 && (b - 1).pow(3) >= n {
        b -= 1;
    }
    b
}

/// Equal-frequency discretization: by rank, `nbins` bins of (near) equal
/// size. Tied values share the bin of their lowest rank.
pub fn equal_frequency_bins(xs: &[f64], nbins: usize) -> Vec<usize> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]).then(i.cmp(&j)));
    let mut bins = vec![0usize; n];
    let mut rank = 0;
    while rank < n {
        let bin = rank * nbins / n;
        let value = xs[order[rank]];
        while rank < n && xs[order[rank]] == value {
            bins[order[rank]] = bin;
            rank += 1;
        }
    }
    bins
}

/// Plug-in mutual information (nats) of two discretized series.
pub fn discrete_mutual_information(xb: &[usize], yb: &[usize], nx: usize, ny: usize) -> f64 {
    let n = xb.len() as f64;
    let mut joint = vec![0usize; nx * ny];
    let mut px = vec![0usize; nx];
    let mut py = vec![0usize; ny];
    for (&x, &y) in xb.iter().zip(yb) {
        joint[x * ny + y] += 1;
        px[x] += 1;
        py[y] += 1;
    }
    let mut mi = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let c = joint[x * ny + y];
            if c == 0 {
                continue;
            }
            let pxy = c as f64 / n;
            mi += pxy * libm::log(pxy * n * n / (px[x] as f64 * py[y] as f64));
        }
    }
    mi
}

/// Binned mutual information in nats. `nbins` defaults to the cube root of
/// the sample count, rounded up.
pub fn mutual_information(xs: &[f64], ys: &[f64], nbins: Option<usize>) -> Result<f64> {
    check_pair(xs, ys, 4, "x")?;
    let nbins = nbins.unwrap_or_else(|| default_bins(xs.len()));
    if nbins < 2 {
        return Err(Error::TooFewBins(nbins));
    }
    let xb = equal_frequency_bins(xs, nbins);
    let yb = equal_frequency_bins(ys, nbins);
    Ok(discrete_mutual_information(&xb, &yb, nbins, nbins))
}

/// Correlation and dependence between a centering score series and a
/// coreference quality series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub pearson_r: f64,
    pub p_value: f64,
    /// Nats.
    pub mi: f64,
    pub nbins: usize,
}

pub fn analyze(
    scores: &[f64],
    quality: &[f64],
    nbins: Option<usize>,
    names: (&str, &str),
) -> Result<AnalysisReport> {
    let pearson_r = pearson_named(scores, quality, names.0, names.1)?;
    let nbins = nbins.unwrap_or_else(|| default_bins(scores.len()));
    Ok(AnalysisReport {
        n: scores.len(),
        pearson_r,
        p_value: t_test_p(pearson_r, scores.len())?,
        mi: mutual_information(scores, quality, Some(nbins))?,
        nbins,
    })
}
