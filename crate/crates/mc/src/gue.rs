use faer::{c64, Mat, MatMut};
use rand::Rng;
use rand_distr::StandardNormal;

/// Hermitian `n × n` matrix with `E[tr_N(H²)] = variance`: off-diagonal
/// entries complex with `E|H_ij|² = variance/n`, diagonal entries real with
/// variance `variance/n`.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, variance: f64, rng: &mut R) -> Mat<c64> {
    let mut h = Mat::zeros(n, n);
    fill_gue(h.as_mut(), variance, rng);
    h
}

/// Overwrites a square matrix with a GUE draw, filling the lower triangle
/// from the stream in row order and mirroring it.
pub(crate) fn fill_gue<R: Rng + ?Sized>(mut h: MatMut<'_, c64>, variance: f64, rng: &mut R) {
    let n = h.nrows();
    let diag_sd = (variance / n as f64).sqrt();
    let off_sd = (variance / (2.0 * n as f64)).sqrt();
    for i in 0..n {
        for j in 0..i {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = c64::new(off_sd * re, off_sd * im);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
        let d: f64 = rng.sample(StandardNormal);
        h[(i, i)] = c64::new(diag_sd * d, 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_variance_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = sample_gue(5, 0.0, &mut rng);
        assert!(h.col_iter().flat_map(|c| c.iter().copied().collect::<Vec<_>>()).all(|z| z == c64::new(0.0, 0.0)));
    }

    #[test]
    fn hermitian_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = sample_gue(9, 1.3, &mut rng);
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(h[(i, j)], h[(j, i)].conj());
            }
        }
    }

    #[test]
    fn normalized_second_moment() {
        // tr_N(H²) = (1/N) Σ |H_ij|²
        let (n, draws) = (32, 10_000);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..draws)
            .map(|_| {
                let h = sample_gue(n, 1.0, &mut rng);
                h.squared_norm_l2() / n as f64
            })
            .collect();
        let mean = values.iter().sum::<f64>() / draws as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let stderr = (var / draws as f64).sqrt();
        assert!((mean - 1.0).abs() <= 3.0 * stderr, "{mean} ± {stderr}");
    }
}
