//! Threshold criteria turning per-sample errors into accept/reject decisions.
//!
//! * `Thr1` cuts at the error of the `round(fracrej·N)`-th worst training
//!   sample.
//! * `Thr2` cuts at `mean + 0.2·std` of the training errors.
//! * `Thr3` is a per-sample rule for reconstruction models: a sample is a
//!   target when at most `condn2_frac·n` of its features have a modified
//!   relative error of at least `condn1`.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::stats;

pub const DEFAULT_FRACREJ: f64 = 0.1;
pub const THR2_STD_MULT: f64 = 0.2;
pub const DEFAULT_CONDN1: f64 = 0.5;
pub const DEFAULT_CONDN2_FRAC: f64 = 0.1;

/// Denominators below this are treated as exact zeros by `Thr3`.
const THR3_SINGULAR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdSpec {
    Thr1 { fracrej: f64 },
    Thr2,
    Thr3 { condn1: f64, condn2_frac: f64 },
}

impl ThresholdSpec {
    pub fn thr1() -> Self {
        Self::Thr1 {
            fracrej: DEFAULT_FRACREJ,
        }
    }

    pub fn thr3() -> Self {
        Self::Thr3 {
            condn1: DEFAULT_CONDN1,
            condn2_frac: DEFAULT_CONDN2_FRAC,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Thr1 { .. } => "thr1",
            Self::Thr2 => "thr2",
            Self::Thr3 { .. } => "thr3",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Self::Thr1 { fracrej } => alloc::vec![fracrej],
            Self::Thr2 => Vec::new(),
            Self::Thr3 {
                condn1,
                condn2_frac,
            } => alloc::vec![condn1, condn2_frac],
        }
    }

    pub fn from_params(name: &str, p: &[f64]) -> Result<Self> {
        let spec = match (name, p) {
            ("thr1", [fracrej]) => Self::Thr1 { fracrej: *fracrej },
            ("thr2", []) => Self::Thr2,
            ("thr3", [condn1, condn2_frac]) => Self::Thr3 {
                condn1: *condn1,
                condn2_frac: *condn2_frac,
            },
            _ => return Err(Error::InvalidParameter("unknown threshold criterion")),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Thr1 { fracrej } if !(0.0..1.0).contains(&fracrej) => {
                Err(Error::InvalidParameter("fracrej must lie in [0, 1)"))
            }
            Self::Thr3 {
                condn1,
                condn2_frac,
            } if !(condn1 >= 0.0) || !(condn2_frac >= 0.0) => {
                Err(Error::InvalidParameter("thr3 conditions must be non-negative"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ThresholdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome for one sample. `score` grows with abnormality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub is_target: bool,
    pub score: f64,
    pub thresh: f64,
}

/// Target iff `score < thresh`.
pub fn apply_threshold(score: f64, thresh: f64) -> Decision {
    Decision {
        is_target: score < thresh,
        score,
        thresh,
    }
}

/// 1-based index into the descending error list used by `Thr1`.
pub fn thr1_index(n: usize, fracrej: f64) -> usize {
    let idx = libm::round(fracrej * n as f64) as usize;
    idx.clamp(1, n.max(1))
}

pub fn thr1_fit(errors: &[f64], fracrej: f64) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptyErrors);
    }
    if !(0.0..1.0).contains(&fracrej) {
        return Err(Error::InvalidParameter("fracrej must lie in [0, 1)"));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted[thr1_index(errors.len(), fracrej) - 1])
}

pub fn thr2_fit(errors: &[f64]) -> Result<f64> {
    if errors.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            found: errors.len(),
        });
    }
    let (mean, std) = stats::mean_std(errors);
    Ok(mean + THR2_STD_MULT * std)
}

/// Modified relative error `|a − p| / |a + p|` of one feature.
pub fn relative_error(actual: f64, predicted: f64) -> f64 {
    let num = (actual - predicted).abs();
    let den = (actual + predicted).abs();
    if den < THR3_SINGULAR {
        if num < THR3_SINGULAR {
            0.0
        } else {
            1.0
        }
    } else {
        num / den
    }
}

/// `Thr3` decision for one reconstructed sample.
///
/// The score is the fraction of badly reconstructed features and the
/// threshold is `condn2_frac`; a sample with exactly `condn2_frac·n` bad
/// features is still a target.
pub fn thr3_decide(actual: &[f64], predicted: &[f64], condn1: f64, condn2_frac: f64) -> Result<Decision> {
    if actual.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            found: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::InvalidParameter("thr3 needs at least one feature"));
    }
    let n = actual.len();
    let not_well = actual
        .iter()
        .zip(predicted)
        .filter(|(&a, &p)| relative_error(a, p) >= condn1)
        .count();
    Ok(Decision {
        is_target: not_well as f64 <= condn2_frac * n as f64,
        score: not_well as f64 / n as f64,
        thresh: condn2_frac,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const TEN: [f64; 10] = [0.9, 0.5, 0.4, 0.3, 0.2, 0.15, 0.1, 0.08, 0.05, 0.01];

    #[test]
    fn thr1_examples() {
        assert_eq!(thr1_index(10, 0.1), 1);
        assert_eq!(thr1_fit(&TEN, 0.1).unwrap(), 0.9);
        // order does not matter
        let mut shuffled = TEN;
        shuffled.reverse();
        assert_eq!(thr1_fit(&shuffled, 0.1).unwrap(), 0.9);
        assert_eq!(thr1_fit(&[0.4; 7], 0.3).unwrap(), 0.4);
        // round(0) clamps to the first entry
        assert_eq!(thr1_index(10, 0.0), 1);
        assert_eq!(thr1_fit(&TEN, 0.0).unwrap(), 0.9);
        // round(0.25·10) = round(2.5) = 3
        assert_eq!(thr1_index(10, 0.25), 3);
        assert_eq!(thr1_fit(&TEN, 0.25).unwrap(), 0.4);
    }

    #[test]
    fn thr1_errors() {
        assert_eq!(thr1_fit(&[], 0.1), Err(Error::EmptyErrors));
        assert!(thr1_fit(&[1.0], 1.0).is_err());
    }

    #[test]
    fn thr2_examples() {
        assert_eq!(thr2_fit(&[0.0; 4]).unwrap(), 0.0);
        assert_eq!(thr2_fit(&[1.0; 3]).unwrap(), 1.0);
        let t = thr2_fit(&[0.0, 2.0]).unwrap();
        assert!((t - 1.282_843).abs() < 1e-6);
        assert!(matches!(thr2_fit(&[1.0]), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn thr3_decision_table() {
        let x = [0.5, -1.0, 2.0, 3.0, 0.1, 0.2, -0.3, 1.0, 4.0, 5.0];
        let d = thr3_decide(&x, &x, 0.5, 0.1).unwrap();
        assert!(d.is_target);
        assert_eq!(d.score, 0.0);

        let d = thr3_decide(&[1.0; 10], &[0.0; 10], 0.5, 0.1).unwrap();
        assert!(!d.is_target);
        assert_eq!(d.score, 1.0);

        // one bad feature out of ten sits on the inclusive boundary
        let mut p = [1.0; 10];
        p[3] = 0.2; // |1 − 0.2| / 1.2 = 0.667
        let d = thr3_decide(&[1.0; 10], &p, 0.5, 0.1).unwrap();
        assert!(d.is_target);
        p[4] = 0.2;
        assert!(!thr3_decide(&[1.0; 10], &p, 0.5, 0.1).unwrap().is_target);
    }

    #[test]
    fn thr3_singular_denominator() {
        // a + p = 0 with a = p = 0 → exact reconstruction
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        // a + p = 0 with a ≠ p → maximal error
        assert_eq!(relative_error(1.0, -1.0), 1.0);
        let d = thr3_decide(&[0.0, 1.0], &[0.0, -1.0], 0.5, 0.1).unwrap();
        assert_eq!(d.score, 0.5);
        assert!(!d.is_target);
        assert!(thr3_decide(&[1.0], &[1.0, 2.0], 0.5, 0.1).is_err());
    }

    #[test]
    fn strict_inequality() {
        assert!(apply_threshold(0.5, 0.9).is_target);
        assert!(!apply_threshold(0.9, 0.9).is_target);
        assert!(!apply_threshold(1.0, 0.9).is_target);
    }

    #[test]
    fn spec_roundtrip() {
        for s in [ThresholdSpec::thr1(), ThresholdSpec::Thr2, ThresholdSpec::thr3()] {
            assert_eq!(ThresholdSpec::from_params(s.name(), &s.params()).unwrap(), s);
        }
        assert!(ThresholdSpec::from_params("thr1", &[1.5]).is_err());
        assert!(ThresholdSpec::from_params("thr4", &vec![]).is_err());
    }
}
