use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `(x . y + 1)^degree`
    Polynomial { degree: u32 },
    /// `exp(-|x - y|^2 / (2 sigma^2))`
    Rbf { sigma: f64 },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Polynomial { degree: 1 }
    }
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Polynomial { degree } if degree == 0 => Err(Error::InvalidConfig(
                "polynomial degree must be positive".into(),
            )),
            KernelSpec::Rbf { sigma } if !(sigma.is_finite() && sigma > 0.0) => Err(
                Error::InvalidConfig(format!("rbf sigma must be positive, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Polynomial { degree } => {
                let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                (dot + 1.0).powi(degree as i32)
            }
            KernelSpec::Rbf { sigma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * sigma * sigma)).exp()
            }
        }
    }

    /// Parses `poly:<d>` or `rbf:<sigma>`.
    pub fn parse(s: &str) -> Result<KernelSpec> {
        let bad = || Error::InvalidConfig(format!("bad kernel `{s}`, expected poly:<d> or rbf:<sigma>"));
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        let k = match kind {
            "poly" => KernelSpec::Polynomial {
                degree: arg.parse().map_err(|_| bad())?,
            },
            "rbf" => KernelSpec::Rbf {
                sigma: arg.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        k.validate()?;
        Ok(k)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Polynomial { degree } => write!(f, "poly:{degree}"),
            KernelSpec::Rbf { sigma } => write!(f, "rbf:{sigma}"),
        }
    }
}

pub fn kernel_eval(k: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    Ok(k.eval_unchecked(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_examples() {
        let p2 = KernelSpec::Polynomial { degree: 2 };
        assert_eq!(kernel_eval(&p2, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        let p1 = KernelSpec::Polynomial { degree: 1 };
        // 2*1 + 3*1 + 1
        assert_eq!(kernel_eval(&p1, &[2.0, 3.0], &[1.0, 1.0]).unwrap(), 6.0);
    }

    #[test]
    fn rbf_self_similarity() {
        let k = KernelSpec::Rbf { sigma: 0.7 };
        for x in [[0.0, 0.0], [3.5, -2.0], [1e3, 1e-3]] {
            assert_eq!(kernel_eval(&k, &x, &x).unwrap(), 1.0);
        }
        let v = kernel_eval(&k, &[0.0], &[1.0]).unwrap();
        assert!((v - (-1.0 / (2.0 * 0.49f64)).exp()).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let k = KernelSpec::default();
        assert!(matches!(
            kernel_eval(&k, &[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn parse_display() {
        for s in ["poly:1", "poly:3", "rbf:0.5"] {
            assert_eq!(KernelSpec::parse(s).unwrap().to_string(), s);
        }
        assert!(KernelSpec::parse("poly:0").is_err());
        assert!(KernelSpec::parse("rbf:-1").is_err());
        assert!(KernelSpec::parse("sigmoid:1").is_err());
    }
}
