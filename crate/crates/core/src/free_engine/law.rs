use super::pk::pk_recursion_with;
use super::{EngineConfig, EngineError};

/// Multiplicative semicircular law: the distribution of free unitary
/// Brownian motion at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MscLaw {
    t: f64,
}

impl MscLaw {
    pub fn new(t: f64) -> Result<Self, EngineError> {
        if t.is_finite() && t >= 0.0 {
            Ok(Self { t })
        } else {
            Err(EngineError::BadArea(t))
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `τ(u^k) = e^{-|k|t/2} P_{|k|}(t)`; the adjoint has the same law.
    pub fn moment(&self, k: i64) -> Result<f64, EngineError> {
        self.moment_with(k, &EngineConfig::default())
    }

    pub fn moment_with(&self, k: i64, config: &EngineConfig) -> Result<f64, EngineError> {
        if k == 0 || self.t == 0.0 {
            return Ok(1.0);
        }
        let n = k.unsigned_abs() as usize;
        let p = pk_recursion_with(n, self.t, config)?;
        Ok((-(n as f64) * self.t / 2.0).exp() * p)
    }
}

/// Single-lasso Wilson loop `τ(u_t^k)`.
pub fn msc_moment(t: f64, k: i64) -> Result<f64, EngineError> {
    MscLaw::new(t)?.moment(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        for k in -4..=4 {
            assert_eq!(msc_moment(0.0, k).unwrap(), 1.0);
        }
        assert!((msc_moment(1.0, 1).unwrap() - (-0.5f64).exp()).abs() < 1e-16);
        assert!((msc_moment(1.0, 1).unwrap() - 0.6065307).abs() < 1e-7);
        assert_eq!(msc_moment(1.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn adjoint_symmetry_and_contractivity() {
        for t in [0.05, 0.7, 1.0, 3.0, 4.0, 6.5] {
            let law = MscLaw::new(t).unwrap();
            assert_eq!(law.moment(0).unwrap(), 1.0);
            for k in 1..=40 {
                let m = law.moment(k).unwrap();
                assert_eq!(m, law.moment(-k).unwrap());
                assert!(m.abs() <= 1.0 + 1e-12, "t={t} k={k} m={m}");
            }
        }
    }

    #[test]
    fn rejects_bad_area() {
        assert!(MscLaw::new(-1.0).is_err());
        assert!(MscLaw::new(f64::NAN).is_err());
    }
}
