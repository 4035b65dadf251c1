//! Storage / repair-bandwidth tradeoff in exact rational arithmetic.
//!
//! Single-failure feasibility, the MSR/MBR extreme points, their cooperative
//! counterparts MSCR/MBCR for `t` jointly repaired nodes, and the sampled
//! single-failure curve used by the `params` subcommand.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TradeoffError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, TradeoffError>;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(TradeoffError::InvalidParams(msg.into()))
}

/// Builds the rational `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// File size and node counts of a cooperative regenerating code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    #[serde(rename = "B")]
    pub b: u64,
    pub n: u64,
    pub k: u64,
    pub d: u64,
    pub t: u64,
}

impl CodeParams {
    /// Checks `B >= 1`, `t >= 1` and `k <= d <= n - t`.
    pub fn validate(&self) -> Result<()> {
        if self.b == 0 {
            return invalid("file size B must be positive");
        }
        if self.t == 0 {
            return invalid("t must be at least 1");
        }
        if self.k == 0 {
            return invalid("k must be at least 1");
        }
        if self.d < self.k {
            return invalid(format!("need d >= k, got d={} k={}", self.d, self.k));
        }
        if self.d + self.t > self.n {
            return invalid(format!(
                "need d <= n - t, got n={} d={} t={}",
                self.n, self.d, self.t
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PointLabel {
    #[serde(rename = "MSR")]
    Msr,
    #[serde(rename = "MBR")]
    Mbr,
    #[serde(rename = "MSCR")]
    Mscr,
    #[serde(rename = "MBCR")]
    Mbcr,
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointLabel::Msr => "MSR",
            PointLabel::Mbr => "MBR",
            PointLabel::Mscr => "MSCR",
            PointLabel::Mbcr => "MBCR",
        })
    }
}

/// One named operating point. `gamma = d * beta1 + (t - 1) * beta2` always.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatingPoint {
    pub label: PointLabel,
    pub d: u64,
    pub t: u64,
    pub alpha: Rational,
    pub gamma: Rational,
    pub beta1: Rational,
    pub beta2: Rational,
}

impl OperatingPoint {
    /// `(alpha, gamma, beta1, beta2)` without the label, for comparing a
    /// cooperative point at `t = 1` with its single-failure counterpart.
    pub fn values(&self) -> (&Rational, &Rational, &Rational, &Rational) {
        (&self.alpha, &self.gamma, &self.beta1, &self.beta2)
    }

    pub fn bandwidth_identity_holds(&self) -> bool {
        self.gamma == int(self.d) * &self.beta1 + int(self.t - 1) * &self.beta2
    }
}

fn check_point_params(b: u64, k: u64, d: u64, t: u64) -> Result<()> {
    if b == 0 {
        return invalid("file size B must be positive");
    }
    if k == 0 {
        return invalid("k must be at least 1");
    }
    if d < k {
        return invalid(format!("need d >= k, got d={d} k={k}"));
    }
    if t == 0 {
        return invalid("t must be at least 1");
    }
    Ok(())
}

/// Single-failure feasibility: `B <= sum_{i<k} min(alpha, (d - i) beta)`.
pub fn feasible_single(b: u64, k: u64, d: u64, alpha: &Rational, beta: &Rational) -> Result<bool> {
    if b == 0 {
        return Ok(true);
    }
    if k > d + 1 {
        return invalid(format!("need k <= d + 1, got k={k} d={d}"));
    }
    if alpha < &Rational::zero() || beta < &Rational::zero() {
        return invalid("alpha and beta must be non-negative");
    }
    let total: Rational = (0..k)
        .map(|i| {
            let cap = int(d - i) * beta;
            if &cap < alpha {
                cap
            } else {
                alpha.clone()
            }
        })
        .sum();
    Ok(int(b) <= total)
}

/// Smallest `alpha` with `B <= sum_{i<k} min(alpha, (d - i) beta)`, or `None`
/// when even unlimited storage cannot reach `B` at this `beta`.
pub fn min_alpha_single(b: u64, k: u64, d: u64, beta: &Rational) -> Result<Option<Rational>> {
    check_point_params(b, k, d, 1)?;
    let target = int(b);
    // Caps (d - i) * beta in ascending order: i = k-1 down to 0.
    let caps: Vec<Rational> = (0..k).rev().map(|i| int(d - i) * beta).collect();
    let mut clipped_sum = Rational::zero();
    let mut lower = Rational::zero();
    for (j, cap) in caps.iter().enumerate() {
        // On [lower, cap] the sum is clipped_sum + (k - j) * alpha.
        let alpha = (&target - &clipped_sum) / int(k - j as u64);
        if alpha <= *cap {
            return Ok(Some(if alpha < lower { lower } else { alpha }));
        }
        clipped_sum += cap;
        lower = cap.clone();
    }
    Ok(None)
}

pub fn msr_point(b: u64, k: u64, d: u64) -> Result<OperatingPoint> {
    check_point_params(b, k, d, 1)?;
    let gamma = int(d * b) / int(k * (d + 1 - k));
    Ok(OperatingPoint {
        label: PointLabel::Msr,
        d,
        t: 1,
        alpha: int(b) / int(k),
        beta1: &gamma / int(d),
        beta2: Rational::zero(),
        gamma,
    })
}

pub fn mbr_point(b: u64, k: u64, d: u64) -> Result<OperatingPoint> {
    check_point_params(b, k, d, 1)?;
    let gamma = int(2 * d * b) / int(k * (2 * d + 1 - k));
    Ok(OperatingPoint {
        label: PointLabel::Mbr,
        d,
        t: 1,
        alpha: gamma.clone(),
        beta1: &gamma / int(d),
        beta2: Rational::zero(),
        gamma,
    })
}

/// Minimum-storage cooperative point. Phase-1 and phase-2 messages carry the
/// same `B / (k (d + t - k))` symbols; with `t = 1` there is no phase 2 and
/// `beta2` is zero.
pub fn mscr_point(b: u64, k: u64, d: u64, t: u64) -> Result<OperatingPoint> {
    check_point_params(b, k, d, t)?;
    let beta = int(b) / int(k * (d + t - k));
    Ok(OperatingPoint {
        label: PointLabel::Mscr,
        d,
        t,
        alpha: int(b) / int(k),
        gamma: &beta * int(d + t - 1),
        beta2: if t == 1 { Rational::zero() } else { beta.clone() },
        beta1: beta,
    })
}

/// Minimum-bandwidth cooperative point. Each helper sends two units of
/// `B / (k (2d + t - k))` and each peer one.
pub fn mbcr_point(b: u64, k: u64, d: u64, t: u64) -> Result<OperatingPoint> {
    check_point_params(b, k, d, t)?;
    let unit = int(b) / int(k * (2 * d + t - k));
    let gamma = &unit * int(2 * d + t - 1);
    Ok(OperatingPoint {
        label: PointLabel::Mbcr,
        d,
        t,
        alpha: gamma.clone(),
        gamma,
        beta1: &unit * int(2),
        beta2: if t == 1 { Rational::zero() } else { unit },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeoffRow {
    pub alpha: Rational,
    pub gamma: Rational,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeoffTable {
    pub rows: Vec<TradeoffRow>,
    /// False for `t >= 2`: only the two cooperative endpoints are known here.
    pub interior_specified: bool,
}

/// For `t = 1`, `samples` points of the single-failure curve from the MSR to
/// the MBR point, each with the least feasible `alpha` at that `gamma`. For
/// `t >= 2`, exactly the MSCR and MBCR endpoints.
pub fn tradeoff_table(b: u64, k: u64, d: u64, t: u64, samples: usize) -> Result<TradeoffTable> {
    check_point_params(b, k, d, t)?;
    if samples < 2 {
        return invalid("samples must be at least 2");
    }
    if t >= 2 {
        let rows = [mscr_point(b, k, d, t)?, mbcr_point(b, k, d, t)?]
            .into_iter()
            .map(|p| TradeoffRow {
                alpha: p.alpha,
                gamma: p.gamma,
                label: p.label.to_string(),
            })
            .collect();
        return Ok(TradeoffTable {
            rows,
            interior_specified: false,
        });
    }
    let msr = msr_point(b, k, d)?;
    let mbr = mbr_point(b, k, d)?;
    let steps = int(samples as u64 - 1);
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let gamma = &msr.gamma + (&mbr.gamma - &msr.gamma) * int(i as u64) / &steps;
        let beta = &gamma / int(d);
        let alpha = min_alpha_single(b, k, d, &beta)?
            .expect("gamma between the MBR and MSR points is always feasible");
        let label = match i {
            0 => "MSR".to_string(),
            i if i + 1 == samples => "MBR".to_string(),
            _ => "curve".to_string(),
        };
        rows.push(TradeoffRow { alpha, gamma, label });
    }
    Ok(TradeoffTable {
        rows,
        interior_specified: true,
    })
}

/// Six-significant-digit decimal rendering.
pub fn to_decimal(x: &Rational) -> String {
    let v = x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN);
    if v == 0.0 {
        return "0.00000".to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

pub const CSV_HEADER: &str = "alpha_num,alpha_den,gamma_num,gamma_den,alpha_dec,gamma_dec,label";

pub fn csv_row(alpha: &Rational, gamma: &Rational, label: &str) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        alpha.numer(),
        alpha.denom(),
        gamma.numer(),
        gamma.denom(),
        to_decimal(alpha),
        to_decimal(gamma),
        label
    )
}
