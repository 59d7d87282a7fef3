//! Portfolio evaluation metrics.
//!
//! Cumulative return is the plain sum of simple daily returns. Annualized
//! return and volatility are computed on daily log returns and scaled with
//! 252 sessions per year. All sums are compensated and run left to right.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, CompensatedSum};
use crate::portfolio::ReturnSeries;

pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// Sum of simple daily returns.
pub fn cumulative_returns(returns: &[f64]) -> Result<f64> {
    if returns.is_empty() {
        return Err(Error::Empty("return series"));
    }
    Ok(numeric::sum(returns.iter().copied()))
}

/// Compounded growth `prod(1 + r) - 1`. Not the default cumulative
/// measure; reported only when asked for.
pub fn cumulative_returns_compounded(returns: &[f64]) -> Result<f64> {
    if returns.is_empty() {
        return Err(Error::Empty("return series"));
    }
    Ok(returns.iter().fold(1.0, |acc, r| acc * (1.0 + r)) - 1.0)
}

/// `ln(1 + r)` for every return; fails on any `r <= -1`.
pub fn log_returns(returns: &[f64]) -> Result<Vec<f64>> {
    returns
        .iter()
        .map(|&r| if r > -1.0 { Ok(r.ln_1p()) } else { Err(Error::Domain(r)) })
        .collect()
}

/// Mean daily log return.
pub fn mean_log_return(returns: &[f64]) -> Result<f64> {
    let logs = log_returns(returns)?;
    numeric::mean(&logs).ok_or(Error::Empty("return series"))
}

/// Mean daily log return times 252.
pub fn annualized_return(returns: &[f64]) -> Result<f64> {
    Ok(mean_log_return(returns)? * TRADING_DAYS_PER_YEAR)
}

/// Sample standard deviation of daily log returns times `sqrt(252)`.
pub fn annualized_volatility(returns: &[f64]) -> Result<f64> {
    if returns.len() < 2 {
        return Err(Error::Value(format!(
            "volatility needs at least 2 returns, got {}",
            returns.len()
        )));
    }
    let logs = log_returns(returns)?;
    let std = numeric::sample_std(&logs).expect("len checked above");
    Ok(std * TRADING_DAYS_PER_YEAR.sqrt())
}

/// `(R_p - R_f) / sigma_p`. Zero volatility is an error, never infinity.
pub fn sharpe_ratio(annual_return: f64, annual_vol: f64, risk_free: f64) -> Result<f64> {
    if annual_vol == 0.0 {
        return Err(Error::UndefinedSharpe);
    }
    if !(annual_vol.is_finite() && annual_vol > 0.0) {
        return Err(Error::Value(format!("volatility must be positive, got {annual_vol}")));
    }
    Ok((annual_return - risk_free) / annual_vol)
}

/// Moving mean and sample standard deviation over trailing windows of
/// `window` values, one pair per position from `window - 1` onward.
pub fn rolling_window_stats(values: &[f64], window: usize) -> Result<Vec<(f64, f64)>> {
    if window < 2 {
        return Err(Error::Value(format!("rolling window must be >= 2, got {window}")));
    }
    if values.len() < window {
        return Err(Error::Value(format!(
            "series of {} values is shorter than the {window}-day window",
            values.len()
        )));
    }
    Ok(values
        .windows(window)
        .map(|w| {
            let mean = numeric::mean(w).expect("non-empty window");
            let mut ss = CompensatedSum::new();
            ss.extend(w.iter().map(|v| (v - mean) * (v - mean)));
            (mean, (ss.value() / (window - 1) as f64).sqrt())
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RollingPoint {
    pub date: NaiveDate,
    pub ma: f64,
    pub mstd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingStats {
    pub window: usize,
    pub points: Vec<RollingPoint>,
}

/// Rolling statistics of the daily long-short return, dated by the last
/// day of each window.
pub fn rolling_stats(series: &ReturnSeries, window: usize) -> Result<RollingStats> {
    let stats = rolling_window_stats(&series.daily_returns(), window)?;
    let points = series.rows()[window - 1..]
        .iter()
        .zip(stats)
        .map(|(row, (ma, mstd))| RollingPoint {
            date: row.date,
            ma,
            mstd,
        })
        .collect();
    Ok(RollingStats { window, points })
}

/// Headline statistics of one return series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub cumulative_return: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulative_return_compounded: Option<f64>,
    pub annualized_return: f64,
    pub annualized_volatility: f64,
    /// `None` when volatility is zero.
    pub sharpe: Option<f64>,
    pub n_days: usize,
    pub mean_log_return: f64,
}

impl MetricsReport {
    /// Computes every metric; needs at least two returns.
    pub fn compute(returns: &[f64], risk_free: f64, include_compounded: bool) -> Result<Self> {
        let annualized_volatility = annualized_volatility(returns)?;
        let mean_log_return = mean_log_return(returns)?;
        let annualized_return = mean_log_return * TRADING_DAYS_PER_YEAR;
        let sharpe = match sharpe_ratio(annualized_return, annualized_volatility, risk_free) {
            Ok(s) => Some(s),
            Err(Error::UndefinedSharpe) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            cumulative_return: cumulative_returns(returns)?,
            cumulative_return_compounded: include_compounded
                .then(|| cumulative_returns_compounded(returns))
                .transpose()?,
            annualized_return,
            annualized_volatility,
            sharpe,
            n_days: returns.len(),
            mean_log_return,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn cumulative_is_a_plain_sum() {
        assert!((cumulative_returns(&[0.01, -0.005, 0.02]).unwrap() - 0.025).abs() < 1e-15);
        assert_eq!(cumulative_returns(&[0.07]).unwrap(), 0.07);
        assert!(cumulative_returns(&[]).is_err());
    }

    #[test]
    fn cumulative_at_table_scale() {
        let per_day = 3.082 / 1672.0;
        let r = vec![per_day; 1672];
        assert!((cumulative_returns(&r).unwrap() - 3.082).abs() < 1e-12);
    }

    #[test]
    fn compounded_variant() {
        let c = cumulative_returns_compounded(&[0.1, 0.1]).unwrap();
        assert!((c - 0.21).abs() < 1e-15);
    }

    #[test]
    fn annualized_return_closed_form() {
        let r = vec![0.001; 252];
        // 252 * ln(1 + 0.001) evaluated at 40 digits
        let expected = 0.251_874_083_937_050_36;
        assert!(close(annualized_return(&r).unwrap(), expected, 1e-13));
        assert!((annualized_return(&r).unwrap() - 0.251874).abs() < 1e-6);
        assert_eq!(annualized_return(&[0.0; 10]).unwrap(), 0.0);
    }

    #[test]
    fn reciprocal_pair_cancels() {
        // the f64 inputs are not an exact reciprocal pair; their true
        // annualized log return is about -1.09e-15
        let r = [0.01, 1.0 / 1.01 - 1.0];
        assert!(annualized_return(&r).unwrap().abs() < 1e-14);
    }

    #[test]
    fn log_domain() {
        assert!(matches!(annualized_return(&[0.1, -1.0]), Err(Error::Domain(_))));
        assert!(matches!(annualized_volatility(&[0.1, -1.5]), Err(Error::Domain(_))));
    }

    #[test]
    fn volatility_hand_variance() {
        // simple returns chosen so the log returns are exactly +-0.01
        let r: Vec<f64> = [0.01f64, -0.01, 0.01, -0.01].iter().map(|l| l.exp_m1()).collect();
        let expected = (4e-4f64 / 3.0).sqrt() * 252f64.sqrt();
        assert!(close(annualized_volatility(&r).unwrap(), expected, 1e-12));
        assert!((annualized_volatility(&r).unwrap() - 0.183303).abs() < 1e-6);
    }

    #[test]
    fn volatility_edge_cases() {
        assert_eq!(annualized_volatility(&[0.02; 5]).unwrap(), 0.0);
        assert!(annualized_volatility(&[0.02]).is_err());
    }

    #[test]
    fn sharpe_against_reported_rows() {
        let s = sharpe_ratio(0.45, 0.186, 0.0).unwrap();
        assert!((s - 2.419).abs() < 1e-3);
        let s = sharpe_ratio(0.303, 0.203, 0.0).unwrap();
        assert!((s - 1.4926).abs() < 1e-3);
        assert_eq!(sharpe_ratio(0.05, 0.2, 0.05).unwrap(), 0.0);
        assert!(matches!(sharpe_ratio(0.1, 0.0, 0.0), Err(Error::UndefinedSharpe)));
    }

    #[test]
    fn rolling_sliding_mean() {
        let stats = rolling_window_stats(&[0.01, 0.02, 0.03], 2).unwrap();
        assert_eq!(stats.len(), 2);
        assert!((stats[0].0 - 0.015).abs() < 1e-15);
        assert!((stats[1].0 - 0.025).abs() < 1e-15);
        let flat = rolling_window_stats(&[0.004; 10], 3).unwrap();
        assert!(flat.iter().all(|(_, s)| *s == 0.0));
        assert!(rolling_window_stats(&[0.1, 0.2], 3).is_err());
        assert!(rolling_window_stats(&[0.1, 0.2], 1).is_err());
    }

    #[test]
    fn rolling_full_window_is_global() {
        let v = [0.01, -0.02, 0.005, 0.03, -0.011];
        let stats = rolling_window_stats(&v, v.len()).unwrap();
        assert_eq!(stats.len(), 1);
        assert!(close(stats[0].0, numeric::mean(&v).unwrap(), 1e-12));
        assert!(close(stats[0].1, numeric::sample_std(&v).unwrap(), 1e-12));
    }

    #[test]
    fn all_zero_series_has_undefined_sharpe() {
        let m = MetricsReport::compute(&[0.0; 20], 0.0, false).unwrap();
        assert_eq!(m.annualized_return, 0.0);
        assert_eq!(m.annualized_volatility, 0.0);
        assert_eq!(m.sharpe, None);
        assert_eq!(m.cumulative_return_compounded, None);
    }

    fn series() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-0.2f64..0.2, 2..200)
    }

    proptest! {
        #[test]
        fn cumulative_is_linear(a in series(), b in series()) {
            let mut ab = a.clone();
            ab.extend(&b);
            let lhs = cumulative_returns(&ab).unwrap();
            let rhs = cumulative_returns(&a).unwrap() + cumulative_returns(&b).unwrap();
            let scale: f64 = ab.iter().map(|x| x.abs()).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * scale.max(1.0));
        }

        #[test]
        fn volatility_nonnegative_and_homogeneous(v in series(), c in 0.1f64..3.0) {
            // scale log returns by c and compare
            let logs = log_returns(&v).unwrap();
            let scaled: Vec<f64> = logs.iter().map(|l| (c * l).exp_m1()).collect();
            let s1 = annualized_volatility(&v).unwrap();
            let s2 = annualized_volatility(&scaled).unwrap();
            prop_assert!(s1 >= 0.0);
            prop_assert!((s2 - c * s1).abs() <= 1e-9 * c * s1 + 1e-14);
        }

        #[test]
        fn rolling_bounded_by_window_extremes(v in series(), w in 2usize..10) {
            prop_assume!(v.len() >= w);
            for (i, (ma, sd)) in rolling_window_stats(&v, w).unwrap().into_iter().enumerate() {
                let win = &v[i..i + w];
                let lo = win.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = win.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(ma >= lo - 1e-15 && ma <= hi + 1e-15);
                prop_assert!(sd >= 0.0);
            }
        }
    }
}
