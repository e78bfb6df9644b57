use std::collections::HashMap;

use super::{EngineConfig, EngineError, MscLaw};

/// Memoized free cumulants `κ(u^{e_1}, …, u^{e_m})` of powers of a single
/// generator with law `law`.
///
/// Powers of one unitary commute, so the moment of any block is the law's
/// moment at the block's exponent sum. Cumulants follow from the
/// moment–cumulant relation split on the block containing the first point:
/// every other block lies inside one gap of that block, and summing over
/// those inner partitions gives back the gap's moment.
#[derive(Debug, Clone)]
pub struct CumulantTable {
    law: MscLaw,
    config: EngineConfig,
    moments: HashMap<i64, f64>,
    cumulants: HashMap<Vec<i64>, f64>,
}

impl CumulantTable {
    pub fn new(law: MscLaw, config: EngineConfig) -> Self {
        Self {
            law,
            config,
            moments: HashMap::new(),
            cumulants: HashMap::new(),
        }
    }

    pub fn law(&self) -> MscLaw {
        self.law
    }

    pub fn moment(&mut self, k: i64) -> Result<f64, EngineError> {
        if let Some(&m) = self.moments.get(&k) {
            return Ok(m);
        }
        let m = self.law.moment_with(k, &self.config)?;
        self.moments.insert(k, m);
        Ok(m)
    }

    pub fn cumulant(&mut self, exponents: &[i64]) -> Result<f64, EngineError> {
        let m = exponents.len();
        if m == 0 {
            return Err(EngineError::EmptyCumulant);
        }
        if m > self.config.max_partition_points {
            return Err(EngineError::NTooLarge {
                n: m,
                cap: self.config.max_partition_points,
            });
        }
        if m == 1 {
            return self.moment(exponents[0]);
        }
        if let Some(&c) = self.cumulants.get(exponents) {
            return Ok(c);
        }

        let mut value = self.moment(exponents.iter().sum())?;
        let rest = m - 1;
        let full = (1usize << rest) - 1;
        let mut block = Vec::with_capacity(m);
        for mask in 0..full {
            block.clear();
            block.push(exponents[0]);
            let mut weight = 1.0;
            let mut gap_sum = 0i64;
            let mut gap_open = false;
            for (i, &e) in exponents[1..].iter().enumerate() {
                if mask >> i & 1 == 1 {
                    if gap_open {
                        weight *= self.moment(gap_sum)?;
                        gap_sum = 0;
                        gap_open = false;
                    }
                    block.push(e);
                } else {
                    gap_sum += e;
                    gap_open = true;
                }
            }
            if gap_open {
                weight *= self.moment(gap_sum)?;
            }
            if weight != 0.0 {
                value -= self.cumulant(&block)? * weight;
            }
        }
        self.cumulants.insert(exponents.to_vec(), value);
        Ok(value)
    }
}

/// `κ(u^{e_1}, …, u^{e_m})` for `u` distributed as `law`.
pub fn free_cumulant(law: &MscLaw, exponents: &[i64]) -> Result<f64, EngineError> {
    CumulantTable::new(*law, EngineConfig::default()).cumulant(exponents)
}
