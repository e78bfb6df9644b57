use std::collections::BTreeMap;

use faer::linalg::matmul::matmul;
use faer::{c64, Accum, Mat, Par};
use masterfield_core::{LassoKey, LassoWord};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::brownian::Workspace;
use crate::{McConfig, McError};

const DOMAIN: [u8; 8] = *b"lassobm1";

/// Random stream for lasso `key` in sample `sample`.
///
/// The stream depends only on `(seed, key, sample)`, so a lasso shared by
/// two words receives the same draw in the same sample, and samples can be
/// computed in any order or on any thread.
pub fn lasso_stream(seed: u64, key: LassoKey, sample: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&(key.sector as u64).to_le_bytes());
    bytes[16..24].copy_from_slice(&(key.level as u64).to_le_bytes());
    bytes[24..].copy_from_slice(&DOMAIN);
    let mut rng = ChaCha8Rng::from_seed(bytes);
    rng.set_stream(sample);
    rng
}

/// One unitary per lasso, drawn independently as Brownian endpoints at the
/// lasso's area.
pub(crate) fn draw_lassos(
    areas: &BTreeMap<LassoKey, f64>,
    config: &McConfig,
    sample: u64,
    ws: &mut Workspace,
) -> Result<BTreeMap<LassoKey, Mat<c64>>, McError> {
    areas
        .iter()
        .map(|(&key, &area)| {
            let mut rng = lasso_stream(config.seed, key, sample);
            let u = ws.endpoint(area, config.steps_for(area), &mut rng)?;
            Ok((key, u))
        })
        .collect()
}

/// Areas of the keys a word mentions; every key must have one.
pub(crate) fn areas_of(word: &LassoWord) -> Result<BTreeMap<LassoKey, f64>, McError> {
    word.letters()
        .iter()
        .map(|&(key, _)| word.area(key).map(|a| (key, a)).ok_or(McError::MissingArea(key)))
        .collect()
}

/// Multiplies the lasso unitaries along a word: letters in traversal order,
/// each new factor on the left, negative exponents through the adjoint.
pub(crate) fn assemble(
    word: &LassoWord,
    draws: &BTreeMap<LassoKey, Mat<c64>>,
    n: usize,
) -> Result<Mat<c64>, McError> {
    let mut h = Mat::<c64>::identity(n, n);
    let mut next = Mat::<c64>::zeros(n, n);
    let one = c64::new(1.0, 0.0);
    for &(key, exp) in word.letters() {
        let u = draws.get(&key).ok_or(McError::MissingArea(key))?;
        for _ in 0..exp.unsigned_abs() {
            if exp > 0 {
                matmul(next.as_mut(), Accum::Replace, u.as_ref(), h.as_ref(), one, Par::Seq);
            } else {
                matmul(next.as_mut(), Accum::Replace, u.adjoint(), h.as_ref(), one, Par::Seq);
            }
            std::mem::swap(&mut h, &mut next);
        }
    }
    Ok(h)
}

/// Holonomy of a lasso word in sample `sample`.
pub fn sample_word_holonomy(
    word: &LassoWord,
    config: &McConfig,
    sample: u64,
) -> Result<Mat<c64>, McError> {
    config.validate()?;
    let areas = areas_of(word)?;
    let mut ws = Workspace::new(config.n);
    let draws = draw_lassos(&areas, config, sample, &mut ws)?;
    assemble(word, &draws, config.n)
}

/// `tr_N(h^k)` for each requested `k`, sharing the matrix powers.
pub fn normalized_traces(h: &Mat<c64>, ks: &[i64]) -> Vec<c64> {
    let n = h.nrows();
    let top = ks.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
    // powers[m] = h^m for m ≤ ⌈top/2⌉; tr(h^k) = tr(h^a h^b) with a + b = k
    let half = top.div_ceil(2);
    let mut powers = vec![Mat::<c64>::identity(n, n)];
    for m in 1..=half {
        let mut next = Mat::<c64>::zeros(n, n);
        matmul(
            next.as_mut(),
            Accum::Replace,
            powers[m - 1].as_ref(),
            h.as_ref(),
            c64::new(1.0, 0.0),
            Par::Seq,
        );
        powers.push(next);
    }
    ks.iter()
        .map(|&k| {
            let m = k.unsigned_abs() as usize;
            let t = trace_of_product(&powers[m.div_ceil(2)], &powers[m / 2]) / n as f64;
            if k < 0 {
                t.conj()
            } else {
                t
            }
        })
        .collect()
}

fn trace_of_product(a: &Mat<c64>, b: &Mat<c64>) -> c64 {
    let n = a.nrows();
    let mut total = c64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            total += a[(i, j)] * b[(j, i)];
        }
    }
    total
}
