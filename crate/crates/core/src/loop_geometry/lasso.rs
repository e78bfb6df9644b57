use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GeometryError, Grid, LoopWord, Sign};

/// Minimal lasso `l_{jk}`: out along the ray at the start of sector `j`,
/// along arc `k`, in along the ray at the end of the sector, back along arc
/// `k - 1` (the origin when `k = 1`) and home.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LassoKey {
    pub sector: usize,
    pub level: usize,
}

impl LassoKey {
    pub const fn new(sector: usize, level: usize) -> Self {
        Self { sector, level }
    }
}

impl fmt::Display for LassoKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.sector, self.level)
    }
}

/// A word over minimal lassos with integer exponents, in traversal order,
/// together with the interior area of every lasso it mentions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LassoWord {
    letters: Vec<(LassoKey, i64)>,
    areas: BTreeMap<LassoKey, f64>,
}

impl LassoWord {
    /// Builds a word as given, without normalizing.
    pub fn new(letters: Vec<(LassoKey, i64)>, areas: BTreeMap<LassoKey, f64>) -> Self {
        Self { letters, areas }
    }

    pub fn letters(&self) -> &[(LassoKey, i64)] {
        &self.letters
    }

    pub fn areas(&self) -> &BTreeMap<LassoKey, f64> {
        &self.areas
    }

    pub fn area(&self, key: LassoKey) -> Option<f64> {
        self.areas.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Merges adjacent letters with equal keys and drops zero exponents,
    /// repeatedly, so that no two neighbours share a key. Areas of keys that
    /// cancel out are dropped.
    pub fn normalize(&mut self) {
        let mut out: Vec<(LassoKey, i64)> = Vec::with_capacity(self.letters.len());
        for &(key, exp) in &self.letters {
            if exp == 0 {
                continue;
            }
            match out.last_mut() {
                Some((top, e)) if *top == key => {
                    *e += exp;
                    if *e == 0 {
                        out.pop();
                    }
                }
                _ => out.push((key, exp)),
            }
        }
        self.areas.retain(|key, _| out.iter().any(|(k, _)| k == key));
        self.letters = out;
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn is_normalized(&self) -> bool {
        self.letters.iter().all(|&(_, e)| e != 0)
            && self.letters.windows(2).all(|w| w[0].0 != w[1].0)
    }

    /// Word of the reversed loop.
    pub fn inverse(&self) -> Self {
        Self::new(
            self.letters.iter().rev().map(|&(k, e)| (k, -e)).collect(),
            self.areas.clone(),
        )
    }

    /// The word traversed `|k|` times (reversed when `k < 0`), normalized.
    pub fn power(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.letters.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        Self::new(letters, base.areas).normalized()
    }

    /// Sum of exponents per key.
    pub fn net_exponents(&self) -> BTreeMap<LassoKey, i64> {
        let mut net = BTreeMap::new();
        for &(key, exp) in &self.letters {
            *net.entry(key).or_insert(0) += exp;
        }
        net.retain(|_, e| *e != 0);
        net
    }

    /// `Σ |net exponent| · area`: the area swept with multiplicity.
    pub fn weighted_area(&self) -> f64 {
        self.net_exponents()
            .iter()
            .map(|(k, e)| e.unsigned_abs() as f64 * self.areas.get(k).copied().unwrap_or(0.0))
            .sum()
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (key, exp)) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{key}^{exp}")?;
        }
        write!(f, "]")
    }
}

/// Lasso word of a loop, before normalization.
///
/// A forward arc `r_{jk}` becomes `l_{jk} l_{j,k-1} … l_{j1}` in traversal
/// order (outermost lasso first: the inner arcs telescope away), so the
/// holonomy reads `h_{j1} ⋯ h_{jk}`. A reversed arc gives the inverse word.
pub fn decompose_raw(word: &LoopWord, grid: &Grid) -> Result<LassoWord, GeometryError> {
    word.check_on(grid)?;
    let mut letters = Vec::new();
    let mut areas = BTreeMap::new();
    for letter in word.letters() {
        // check_on guarantees the arc exists
        let top = grid
            .locate(&letter.arc)
            .ok_or_else(|| GeometryError::ArcNotInGrid(letter.arc.clone()))?;
        let keys = (1..=top.level).map(|k| LassoKey::new(top.sector, k));
        match letter.sign {
            Sign::Plus => letters.extend(keys.rev().map(|k| (k, 1))),
            Sign::Minus => letters.extend(keys.map(|k| (k, -1))),
        }
        for k in 1..=top.level {
            let key = LassoKey::new(top.sector, k);
            areas.insert(key, grid.lasso_area(key).unwrap_or(0.0));
        }
    }
    Ok(LassoWord::new(letters, areas))
}

/// Normalized lasso word of a loop.
pub fn decompose(word: &LoopWord, grid: &Grid) -> Result<LassoWord, GeometryError> {
    Ok(decompose_raw(word, grid)?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_geometry::{Arc, Letter};
    use std::f64::consts::{PI, TAU};

    fn circle_grid() -> Grid {
        Grid::new(
            vec![0.0, PI, TAU],
            vec![
                Arc::new("a1", 1, vec![1.0, 1.0]),
                Arc::new("a2", 2, vec![1.0, 1.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn circle_decomposes_into_two_lassos() {
        let g = circle_grid();
        let w = LoopWord::new(vec![Letter::plus("a1"), Letter::plus("a2")]);
        let d = decompose(&w, &g).unwrap();
        assert_eq!(d.letters(), &[(LassoKey::new(1, 1), 1), (LassoKey::new(2, 1), 1)]);
        assert!((d.area(LassoKey::new(1, 1)).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((d.area(LassoKey::new(2, 1)).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn backtrack_gives_empty_word() {
        let g = circle_grid();
        let w = LoopWord::new(vec![Letter::plus("a1"), Letter::minus("a1")]);
        assert!(decompose(&w, &g).unwrap().is_empty());
    }

    #[test]
    fn third_level_arc_telescopes() {
        let g = Grid::new(
            vec![0.0, TAU],
            vec![
                Arc::new("r1", 1, vec![1.0, 1.0]),
                Arc::new("r2", 1, vec![2.0, 2.0]),
                Arc::new("r3", 1, vec![3.0, 3.0]),
            ],
        )
        .unwrap();
        let d = decompose(&LoopWord::new(vec![Letter::plus("r3")]), &g).unwrap();
        // traversal order l_{13} l_{12} l_{11}; holonomy h_{11} h_{12} h_{13}
        assert_eq!(
            d.letters(),
            &[(LassoKey::new(1, 3), 1), (LassoKey::new(1, 2), 1), (LassoKey::new(1, 1), 1)]
        );
        let back = decompose(&LoopWord::new(vec![Letter::minus("r3")]), &g).unwrap();
        assert_eq!(back, d.inverse());
    }

    #[test]
    fn arc_word_of_a_lasso_reduces_to_that_lasso() {
        // l_{jk} = r_{jk} r_{j,k-1}^{-1} as arcs
        let g = Grid::new(
            vec![0.0, TAU],
            vec![Arc::new("r1", 1, vec![1.0, 1.0]), Arc::new("r2", 1, vec![2.0, 2.0])],
        )
        .unwrap();
        let w = LoopWord::new(vec![Letter::plus("r2"), Letter::minus("r1")]);
        let d = decompose(&w, &g).unwrap();
        assert_eq!(d.letters(), &[(LassoKey::new(1, 2), 1)]);
        assert_eq!(decompose_raw(&w, &g).unwrap().len(), 3);
    }

    #[test]
    fn normalize_merges_and_cancels() {
        let a = LassoKey::new(1, 1);
        let b = LassoKey::new(2, 1);
        let w = LassoWord::new(vec![(a, 1), (b, 2), (b, -2), (a, 1), (b, 0), (a, -3)], BTreeMap::new())
            .normalized();
        assert_eq!(w.letters(), &[(a, -1)]);
        assert!(w.is_normalized());
    }

    #[test]
    fn power_wraps_and_inverts() {
        let a = LassoKey::new(1, 1);
        let b = LassoKey::new(2, 1);
        let w = LassoWord::new(vec![(a, 1), (b, 1)], BTreeMap::new());
        assert_eq!(w.power(2).letters(), &[(a, 1), (b, 1), (a, 1), (b, 1)]);
        assert_eq!(w.power(-1).letters(), &[(b, -1), (a, -1)]);
        assert!(w.power(0).is_empty());
        let c = LassoWord::new(vec![(a, 1), (b, 1), (a, 1)], BTreeMap::new());
        assert_eq!(c.power(2).letters(), &[(a, 1), (b, 1), (a, 2), (b, 1), (a, 1)]);
    }
}
