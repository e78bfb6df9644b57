use std::collections::BTreeMap;

use crate::loop_geometry::{decompose, Grid, LassoKey, LassoWord, LoopWord};

use super::{for_each_nc, CumulantTable, EngineConfig, EngineError, MscLaw};

/// `τ(u^k)` where `u` is the holonomy of a lasso word.
#[derive(Debug, Clone, PartialEq)]
pub struct WordMomentQuery {
    pub word: LassoWord,
    pub power: i64,
}

impl WordMomentQuery {
    pub fn new(word: LassoWord, power: i64) -> Self {
        Self { word, power }
    }
}

/// Merges the last letter into the first while they share a key.
///
/// Under a trace the word is cyclic, so this shortens it without changing
/// its moment.
pub fn cyclic_reduce(letters: &mut Vec<(LassoKey, i64)>) {
    while letters.len() >= 2 && letters[0].0 == letters[letters.len() - 1].0 {
        let (_, e) = letters.pop().expect("len >= 2");
        letters[0].1 += e;
        if letters[0].1 == 0 {
            letters.remove(0);
        }
    }
}

/// A word prepared for evaluation: generator index and exponent per letter.
struct Prepared {
    generators: Vec<usize>,
    exponents: Vec<i64>,
    tables: Vec<CumulantTable>,
}

fn prepare(query: &WordMomentQuery, config: &EngineConfig) -> Result<Prepared, EngineError> {
    let mut letters = query.word.power(query.power).letters().to_vec();
    cyclic_reduce(&mut letters);
    if letters.len() > config.max_alternation {
        return Err(EngineError::WordTooLong {
            len: letters.len(),
            cap: config.max_alternation,
        });
    }
    let mut index: BTreeMap<LassoKey, usize> = BTreeMap::new();
    let mut tables = Vec::new();
    let mut generators = Vec::with_capacity(letters.len());
    for &(key, _) in &letters {
        let next = index.len();
        let g = *index.entry(key).or_insert(next);
        if g == tables.len() {
            let area = query
                .word
                .area(key)
                .ok_or(EngineError::UnknownLassoKey(key))?;
            tables.push(CumulantTable::new(MscLaw::new(area)?, *config));
        }
        generators.push(g);
    }
    Ok(Prepared {
        exponents: letters.iter().map(|&(_, e)| e).collect(),
        generators,
        tables,
    })
}

/// `τ(g_{i_1}^{e_1} ⋯ g_{i_n}^{e_n})` for freely independent multiplicative
/// semicircular generators.
///
/// Equal to the sum over non-crossing partitions with single-generator
/// blocks of products of free cumulants (mixed cumulants vanish). The sum is
/// organized by the block containing the first letter: the remaining blocks
/// fall into the gaps of that block, independently, so each gap contributes
/// the moment of its own contiguous subword. Moments of subwords are
/// memoized by interval.
pub fn word_moment(query: &WordMomentQuery, config: &EngineConfig) -> Result<f64, EngineError> {
    let Prepared {
        generators,
        exponents,
        mut tables,
    } = prepare(query, config)?;
    let n = generators.len();
    let mut interval = IntervalMoments {
        generators: &generators,
        exponents: &exponents,
        tables: &mut tables,
        memo: vec![None; (n + 1) * (n + 1)],
        n,
    };
    interval.tau(0, n)
}

struct IntervalMoments<'a> {
    generators: &'a [usize],
    exponents: &'a [i64],
    tables: &'a mut [CumulantTable],
    memo: Vec<Option<f64>>,
    n: usize,
}

impl IntervalMoments<'_> {
    /// Moment of the subword `[a, b)`.
    fn tau(&mut self, a: usize, b: usize) -> Result<f64, EngineError> {
        if a == b {
            return Ok(1.0);
        }
        let slot = a * (self.n + 1) + b;
        if let Some(v) = self.memo[slot] {
            return Ok(v);
        }
        let g = self.generators[a];
        let partners: Vec<usize> = (a + 1..b).filter(|&p| self.generators[p] == g).collect();

        let mut total = 0.0;
        let mut block_exps = Vec::with_capacity(partners.len() + 1);
        for mask in 0..1usize << partners.len() {
            block_exps.clear();
            block_exps.push(self.exponents[a]);
            let mut weight = 1.0;
            let mut last = a;
            for (i, &p) in partners.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    weight *= self.tau(last + 1, p)?;
                    block_exps.push(self.exponents[p]);
                    last = p;
                }
            }
            if weight == 0.0 {
                continue;
            }
            weight *= self.tau(last + 1, b)?;
            if weight == 0.0 {
                continue;
            }
            total += self.tables[g].cumulant(&block_exps)? * weight;
        }
        self.memo[slot] = Some(total);
        Ok(total)
    }
}

/// Same value as [`word_moment`], by direct summation over every
/// non-crossing partition of the letters.
///
/// Exponential in the word length; meant for cross-checking short words.
pub fn word_moment_nc_sum(
    query: &WordMomentQuery,
    config: &EngineConfig,
) -> Result<f64, EngineError> {
    let Prepared {
        generators,
        exponents,
        mut tables,
    } = prepare(query, config)?;
    let n = generators.len();
    if n > config.max_partition_points {
        return Err(EngineError::NTooLarge {
            n,
            cap: config.max_partition_points,
        });
    }
    let mut total = 0.0;
    let mut failure = None;
    for_each_nc(n, |blocks| {
        if failure.is_some() {
            return;
        }
        let mut prod = 1.0;
        for block in blocks {
            let g = generators[block[0]];
            if block.iter().any(|&p| generators[p] != g) {
                return;
            }
            let exps: Vec<i64> = block.iter().map(|&p| exponents[p]).collect();
            match tables[g].cumulant(&exps) {
                Ok(c) => prod *= c,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
        }
        total += prod;
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Infinite-N Wilson loop `τ(u_c^k)` of a grid loop.
pub fn wilson_loop(
    word: &LoopWord,
    grid: &Grid,
    k: i64,
    config: &EngineConfig,
) -> Result<f64, EngineError> {
    let lassos = decompose(word, grid)?;
    word_moment(&WordMomentQuery::new(lassos, k), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_engine::msc_moment;
    use crate::loop_geometry::{Arc, Letter};
    use std::f64::consts::{PI, TAU};

    fn key(j: usize) -> LassoKey {
        LassoKey::new(j, 1)
    }

    fn word(letters: &[(usize, i64)], areas: &[f64]) -> LassoWord {
        LassoWord::new(
            letters.iter().map(|&(j, e)| (key(j), e)).collect(),
            areas
                .iter()
                .enumerate()
                .map(|(i, &a)| (key(i + 1), a))
                .collect(),
        )
    }

    fn both(w: &LassoWord, k: i64) -> f64 {
        let cfg = EngineConfig::default();
        let q = WordMomentQuery::new(w.clone(), k);
        let fast = word_moment(&q, &cfg).unwrap();
        let slow = word_moment_nc_sum(&q, &cfg).unwrap();
        assert!((fast - slow).abs() < 1e-13, "{w} k={k}: {fast} vs {slow}");
        fast
    }

    #[test]
    fn single_letter_is_msc_moment() {
        let w = word(&[(1, 1)], &[1.0]);
        assert!((both(&w, 1) - 0.6065307).abs() < 1e-7);
        for k in -5..=5 {
            assert!((both(&w, k) - msc_moment(1.0, k).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn product_of_free_means() {
        let (s, t) = (0.7, 1.9);
        let w = word(&[(1, 1), (2, 1)], &[s, t]);
        let want = (-s / 2.0f64).exp() * (-t / 2.0f64).exp();
        assert!((both(&w, 1) - want).abs() < 1e-15);
    }

    #[test]
    fn alternating_square() {
        // τ(u₁u₂u₁u₂) = e^{-(s+t)}(1 - s - t)
        for (s, t) in [(0.5, 0.5), (1.0, 0.3), (2.0, 1.5)] {
            let w = word(&[(1, 1), (2, 1)], &[s, t]);
            let want = (-(s + t)).exp() * (1.0 - s - t);
            assert!((both(&w, 2) - want).abs() < 1e-14, "s={s} t={t}");
        }
    }

    #[test]
    fn commutator() {
        // τ(u₁u₂u₁*u₂*) = e^{-s} + e^{-t} - e^{-s-t}
        for (s, t) in [(1.0, 1.0), (0.2, 3.0)] {
            let w = word(&[(1, 1), (2, 1), (1, -1), (2, -1)], &[s, t]);
            let want = (-s).exp() + (-t).exp() - (-s - t).exp();
            assert!((both(&w, 1) - want).abs() < 1e-14);
        }
        let w = word(&[(1, 1), (2, 1), (1, -1), (2, -1)], &[1.0, 1.0]);
        assert!((both(&w, 1) - 0.6004236).abs() < 1e-7);
    }

    #[test]
    fn semigroup_law() {
        let areas = [0.3, 1.1, 0.6];
        for m in 1..=3 {
            let letters: Vec<(usize, i64)> = (1..=m).map(|j| (j, 1)).collect();
            let w = word(&letters, &areas[..m]);
            let total: f64 = areas[..m].iter().sum();
            for k in 1..=4 {
                let want = msc_moment(total, k).unwrap();
                assert!((both(&w, k) - want).abs() < 1e-9, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn unitarity_and_empty() {
        let w = word(&[(1, 3)], &[0.8]);
        let ww = LassoWord::new(
            [w.letters(), w.inverse().letters()].concat(),
            w.areas().clone(),
        );
        assert_eq!(both(&ww, 1), 1.0);
        assert_eq!(both(&LassoWord::default(), 3), 1.0);
    }

    #[test]
    fn cyclic_reduction_merges_ends() {
        let mut l = vec![(key(1), 1), (key(2), 1), (key(1), -1)];
        cyclic_reduce(&mut l);
        assert_eq!(l, vec![(key(2), 1)]);
        let mut l = vec![(key(1), 2), (key(2), 1), (key(1), 1)];
        cyclic_reduce(&mut l);
        assert_eq!(l, vec![(key(1), 3), (key(2), 1)]);
    }

    #[test]
    fn errors() {
        let cfg = EngineConfig::default();
        let w = word(&[(1, 1), (2, 1)], &[1.0]);
        assert_eq!(
            word_moment(&WordMomentQuery::new(w, 1), &cfg),
            Err(EngineError::UnknownLassoKey(key(2)))
        );
        let w = word(&[(1, 1), (2, 1)], &[1.0, 1.0]);
        assert_eq!(
            word_moment(&WordMomentQuery::new(w, 8), &cfg),
            Err(EngineError::WordTooLong { len: 16, cap: 14 })
        );
    }

    fn circle() -> (Grid, LoopWord) {
        let grid = Grid::new(
            vec![0.0, PI, TAU],
            vec![
                Arc::new("a1", 1, vec![1.0, 1.0]),
                Arc::new("a2", 2, vec![1.0, 1.0]),
            ],
        )
        .unwrap();
        (grid, LoopWord::new(vec![Letter::plus("a1"), Letter::plus("a2")]))
    }

    #[test]
    fn wilson_loop_examples() {
        let cfg = EngineConfig::default();
        let (grid, c) = circle();
        let w1 = wilson_loop(&c, &grid, 1, &cfg).unwrap();
        assert!((w1 - (-PI / 2.0).exp()).abs() < 1e-15);
        assert!((w1 - 0.2078796).abs() < 1e-7);
        let w2 = wilson_loop(&c, &grid, 2, &cfg).unwrap();
        assert!((w2 - (-PI).exp() * (1.0 - PI)).abs() < 1e-14);
        assert!((w2 + 0.0925466).abs() < 1e-7);
        let back = LoopWord::new(vec![Letter::plus("a1"), Letter::minus("a1")]);
        for k in [-3, 1, 4] {
            assert_eq!(wilson_loop(&back, &grid, k, &cfg).unwrap(), 1.0);
        }
    }
}
