//! Paired t-test and Mann-Whitney U test, both two-sided.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest sample size (per side) for which the U test enumerates the exact
/// permutation distribution.
pub const EXACT_U_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Two-tailed paired Student t-test on `a[i] - b[i]`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::EmptySample);
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1) as f64;
    // Differences that are all equal (including all zero) have no spread.
    let scale = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if scale == 0.0 || libm::sqrt(var) <= scale * 1e-12 {
        return Err(Error::DegenerateDifferences);
    }
    let t = mean / libm::sqrt(var / n as f64);
    let dof = n - 1;
    let p_value = student_t_two_sided(t, dof as f64);
    Ok(TTest { t, dof, p_value })
}

/// `P(|T| >= |t|)` for Student's t with `dof` degrees of freedom.
pub fn student_t_two_sided(t: f64, dof: f64) -> f64 {
    let x = dof / (dof + t * t);
    regularized_incomplete_beta(0.5 * dof, 0.5, x).clamp(0.0, 1.0)
}

/// Student t CDF.
pub fn student_t_cdf(t: f64, dof: f64) -> f64 {
    let tail = 0.5 * student_t_two_sided(t, dof);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Regularized incomplete beta `I_x(a, b)` via Lentz's continued fraction.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
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
    for m in 1..=500 {
        let m = m as f64;
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

/// Standard normal upper tail `P(Z >= z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UMethod {
    /// Full enumeration of group assignments of the pooled (mid-ranked) sample.
    Exact,
    /// Normal approximation with tie and continuity correction.
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UTest {
    /// U statistic of the first sample.
    pub u: f64,
    pub p_value: f64,
    pub method: UMethod,
}

/// Two-sided Mann-Whitney U test.
///
/// Exact when both samples have at most [`EXACT_U_LIMIT`] values, otherwise
/// the tie-corrected normal approximation with a 0.5 continuity correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<UTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let na = a.len();
    let nb = b.len();
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, tie_term) = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    let u = rank_sum_a - (na * (na + 1)) as f64 / 2.0;
    let mean = (na * nb) as f64 / 2.0;

    if na <= EXACT_U_LIMIT && nb <= EXACT_U_LIMIT {
        let p_value = exact_u_p_value(&ranks, na, (u - mean).abs());
        return Ok(UTest { u, p_value, method: UMethod::Exact });
    }

    let n = (na + nb) as f64;
    let var = (na * nb) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mean).abs() - 0.5).max(0.0) / libm::sqrt(var);
        (2.0 * normal_sf(z)).min(1.0)
    };
    Ok(UTest { u, p_value, method: UMethod::NormalApprox })
}

/// Mid-ranks (1-based) of `values` plus the tie term `sum(t^3 - t)`.
fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }
    (ranks, tie_term)
}

fn exact_u_p_value(ranks: &[f64], na: usize, observed_dev: f64) -> f64 {
    let n = ranks.len();
    let mean = (na * (n - na)) as f64 / 2.0;
    let offset = (na * (na + 1)) as f64 / 2.0;
    let mut total = 0u64;
    let mut extreme = 0u64;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let rank_sum: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        total += 1;
        if ((rank_sum - offset) - mean).abs() >= observed_dev - 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}
