//! Least-squares slope fits of `log₂` measurements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use bilab_core::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    J,
    K,
}

/// How the fitted slope is compared with the prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// `|fitted - predicted| ≤ tolerance`.
    Equal,
    /// `fitted ≤ predicted + tolerance`.
    AtMost,
}

/// A fitted exponent together with everything needed to re-check it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub experiment: String,
    pub variable: Variable,
    pub points: Vec<i64>,
    /// `log₂` of the measured values; `-inf` marks a vanishing measurement.
    #[serde(with = "nonfinite_vec")]
    pub log2_values: Vec<f64>,
    /// Points with `log₂` value below this level are left out of the fit.
    #[serde(with = "nonfinite_opt")]
    pub floor: Option<f64>,
    /// `-inf` when fewer than two points survive the floor.
    #[serde(with = "nonfinite")]
    pub fitted: f64,
    pub predicted: f64,
    pub tolerance: f64,
    pub claim: Claim,
    pub pass: bool,
    /// Measured constants, e.g. the fitted intercept.
    pub constants: BTreeMap<String, f64>,
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn evaluate(points: &[i64], logs: &[f64], floor: Option<f64>) -> (f64, f64) {
    let keep: Vec<(f64, f64)> = points
        .iter()
        .zip(logs)
        .filter(|(_, v)| v.is_finite() && floor.is_none_or(|fl| **v >= fl))
        .map(|(p, v)| (*p as f64, *v))
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = keep.into_iter().unzip();
    least_squares(&x, &y).unwrap_or((f64::NEG_INFINITY, f64::NAN))
}

fn verdict(claim: Claim, fitted: f64, predicted: f64, tolerance: f64) -> bool {
    match claim {
        Claim::Equal => (fitted - predicted).abs() <= tolerance,
        Claim::AtMost => fitted <= predicted + tolerance,
    }
}

impl FitReport {
    /// Fits `log₂ values` against `points`. Fewer than three points is an error.
    #[allow(clippy::too_many_arguments)]
    pub fn fit(
        experiment: impl Into<String>,
        variable: Variable,
        points: Vec<i64>,
        values: &[f64],
        floor: Option<f64>,
        predicted: f64,
        tolerance: f64,
        claim: Claim,
    ) -> Result<Self> {
        if points.len() != values.len() {
            return Err(LabError::InvalidArgument("points and values differ in length".into()));
        }
        if points.len() < 3 {
            return Err(LabError::InvalidArgument("a fit needs at least three points".into()));
        }
        let log2_values: Vec<f64> = values.iter().map(|v| v.log2()).collect();
        let (fitted, intercept) = evaluate(&points, &log2_values, floor);
        let mut constants = BTreeMap::new();
        if intercept.is_finite() {
            constants.insert("intercept".to_string(), intercept);
        }
        Ok(Self {
            experiment: experiment.into(),
            variable,
            points,
            log2_values,
            floor,
            fitted,
            predicted,
            tolerance,
            claim,
            pass: verdict(claim, fitted, predicted, tolerance),
            constants,
        })
    }

    /// Recomputes the slope and the verdict from the stored data.
    pub fn recheck(&self) -> bool {
        let (fitted, _) = evaluate(&self.points, &self.log2_values, self.floor);
        let same = fitted == self.fitted || (fitted.is_nan() && self.fitted.is_nan());
        same && verdict(self.claim, fitted, self.predicted, self.tolerance) == self.pass
    }

    pub fn with_constant(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_string(), value);
        self
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: fitted {:.3} vs predicted {:.3} (tol {:.2}, {:?}) -> {}",
            self.experiment,
            self.fitted,
            self.predicted,
            self.tolerance,
            self.claim,
            if self.pass { "pass" } else { "fail" }
        )
    }
}

/// Non-finite floats are written as the strings `"inf"`, `"-inf"` and `"nan"`.
mod nonfinite {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(super) enum Repr {
        Num(f64),
        Text(String),
    }

    pub(super) fn encode(v: f64) -> Repr {
        if v.is_finite() {
            Repr::Num(v)
        } else if v.is_nan() {
            Repr::Text("nan".into())
        } else if v > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    pub(super) fn decode<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("not a number: {other}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        encode(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        decode(Repr::deserialize(d)?)
    }
}

mod nonfinite_vec {
    use super::nonfinite::{decode, encode, Repr};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| encode(*x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?.into_iter().map(decode).collect()
    }
}

mod nonfinite_opt {
    use super::nonfinite::{decode, encode, Repr};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(encode).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<Repr>::deserialize(d)?.map(decode).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let (s, c) = least_squares(&[2.0, 3.0, 4.0], &[1.0, 0.5, 0.0]).unwrap();
        assert!((s + 0.5).abs() < 1e-15 && (c - 2.0).abs() < 1e-14);
        assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn verdicts_and_recheck() {
        let v: Vec<f64> = (2..7).map(|j| 2f64.powf(-0.25 * j as f64)).collect();
        let r = FitReport::fit("t", Variable::J, (2..7).collect(), &v, None, -0.25, 0.2, Claim::Equal).unwrap();
        assert!(r.pass && r.recheck());
        let mut bad = r.clone();
        bad.pass = false;
        assert!(!bad.recheck());
        let r = FitReport::fit("t", Variable::J, (2..7).collect(), &v, None, -1.0, 0.2, Claim::AtMost).unwrap();
        assert!(!r.pass && r.recheck());
    }

    #[test]
    fn vanishing_values_give_sentinel() {
        let r = FitReport::fit("k", Variable::K, vec![1, 2, 3], &[0.0, 0.0, 0.0], None, -4.0, 0.2, Claim::AtMost)
            .unwrap();
        assert_eq!(r.fitted, f64::NEG_INFINITY);
        assert!(r.pass && r.recheck());
        assert!(FitReport::fit("k", Variable::K, vec![1, 2], &[1.0, 0.5], None, 0.0, 0.2, Claim::AtMost).is_err());
    }

    #[test]
    fn floor_drops_points() {
        let r = FitReport::fit("k", Variable::K, vec![0, 1, 2, 3], &[1.0, 0.25, 1e-20, 1e-20], Some(-80.0), -2.0, 0.2, Claim::AtMost)
            .unwrap();
        assert!(r.pass);
        assert!(r.fitted < -10.0);
        let r = FitReport::fit("k", Variable::K, vec![0, 1, 2, 3], &[1.0, 0.25, 1e-20, 1e-20], Some(-40.0), -2.0, 0.2, Claim::AtMost)
            .unwrap();
        assert!((r.fitted + 2.0).abs() < 1e-12);
    }
}
