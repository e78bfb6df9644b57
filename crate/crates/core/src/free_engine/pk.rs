use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{EngineConfig, EngineError};

/// The polynomial `P_k` with exact coefficients.
///
/// Coefficients are stored in factorial-scaled form `b_s = s! · c_s`, where
/// `P_k(t) = Σ c_s t^s`. In that basis the recursion stays in the integers:
/// products become binomial convolutions and integration is an index shift.
#[derive(Debug, Clone, PartialEq)]
pub struct PkPolynomial {
    k: usize,
    scaled: Vec<BigInt>,
}

impl PkPolynomial {
    /// Builds `P_k` from `P_0 = P_1 = 1` and
    /// `P_k' = -(k/2) Σ_{j=1}^{k-1} P_j P_{k-j}`, `P_k(0) = 1`,
    /// integrating term by term.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            scaled: scaled_coefficients(k),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Ordinary coefficients `c_s`, lowest degree first.
    pub fn coefficients(&self) -> Vec<BigRational> {
        let mut factorial = BigInt::one();
        self.scaled
            .iter()
            .enumerate()
            .map(|(s, b)| {
                if s > 0 {
                    factorial *= BigInt::from(s);
                }
                BigRational::new(b.clone(), factorial.clone())
            })
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.scaled.len().saturating_sub(1)
    }

    /// Evaluates exactly at the binary value of `t`, rounding once at the end.
    pub fn eval(&self, t: f64) -> f64 {
        let Some(x) = BigRational::from_float(t) else {
            return f64::NAN;
        };
        let (p, q) = (x.numer(), x.denom());
        let d = self.degree();
        // Σ_s b_s (d!/s!) p^s q^{d-s}  /  (d! q^d), homogeneous Horner from s = d
        let mut falling = vec![BigInt::one(); d + 1];
        for s in (0..d).rev() {
            falling[s] = &falling[s + 1] * BigInt::from(s + 1);
        }
        let mut acc = &self.scaled[d] * &falling[d];
        let mut q_pow = BigInt::one();
        for s in (0..d).rev() {
            q_pow *= q;
            acc = acc * p + &self.scaled[s] * &falling[s] * &q_pow;
        }
        let denominator = &falling[0] * q_pow;
        to_f64(&BigRational::new(acc, denominator))
    }
}

fn table() -> &'static Mutex<Vec<Vec<BigInt>>> {
    static TABLE: OnceLock<Mutex<Vec<Vec<BigInt>>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let one = vec![BigInt::one()];
        Mutex::new(vec![one.clone(), one])
    })
}

fn binomial_row(s: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one(); s + 1];
    for a in 1..s {
        row[a] = &row[a - 1] * BigInt::from(s + 1 - a) / BigInt::from(a);
    }
    row
}

/// Scaled coefficients of `P_k`, extending the shared table as needed.
fn scaled_coefficients(k: usize) -> Vec<BigInt> {
    let mut table = table().lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= k {
        let n = table.len();
        // S_s = Σ_j Σ_a C(s,a) b_{j,a} b_{n-j,s-a}: scaled coefficients of
        // Σ_{j=1}^{n-1} P_j P_{n-j}, degree n - 2
        let mut sum = vec![BigInt::zero(); n - 1];
        for (s, slot) in sum.iter_mut().enumerate() {
            let binom = binomial_row(s);
            for j in 1..n {
                let (left, right) = (&table[j], &table[n - j]);
                for a in 0..=s {
                    if let (Some(l), Some(r)) = (left.get(a), right.get(s - a)) {
                        *slot += &binom[a] * l * r;
                    }
                }
            }
        }
        // c_{s+1} = -(n/2) S_s / (s! (s+1))  ⇒  b_{s+1} = -(n/2) S_s
        let mut next = Vec::with_capacity(n);
        next.push(BigInt::one());
        for s_val in sum {
            let twice = -(s_val * BigInt::from(n));
            let (half, rem) = twice.div_rem(&BigInt::from(2));
            assert!(rem.is_zero(), "P_{n}: scaled coefficient is not integral");
            next.push(half);
        }
        table.push(next);
    }
    table[k].clone()
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `P_k(t)` from the defining differential recursion, with the default cap.
pub fn pk_recursion(k: usize, t: f64) -> Result<f64, EngineError> {
    pk_recursion_with(k, t, &EngineConfig::default())
}

pub fn pk_recursion_with(k: usize, t: f64, config: &EngineConfig) -> Result<f64, EngineError> {
    if k > config.max_k {
        return Err(EngineError::KTooLarge {
            k,
            cap: config.max_k,
        });
    }
    Ok(PkPolynomial::new(k).eval(t))
}

/// `P_n(t) = Σ_{k=0}^{n-1} (-1)^k t^k/k! · n^{k-1} · C(n, k+1)`.
///
/// The alternating terms grow like `(nt)^k/k!` while the sum stays of order
/// `e^{nt/2}` or smaller, so the sum is carried out exactly at the binary
/// value of `t` and rounded once.
pub fn pk_closed(n: usize, t: f64) -> Result<f64, EngineError> {
    if n == 0 {
        return Ok(1.0);
    }
    let x = BigRational::from_float(t).ok_or(EngineError::Overflow { n })?;
    let nn = BigInt::from(n);
    // term_0 = C(n,1)/n = 1; term_{k+1}/term_k = -t n (n-k-1) / ((k+1)(k+2))
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for k in 0..n {
        sum += &term;
        let ratio = BigRational::new(
            -(&nn * BigInt::from(n - k - 1)),
            BigInt::from((k + 1) * (k + 2)),
        );
        term = term * &x * ratio;
    }
    let value = to_f64(&sum);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EngineError::Overflow { n })
    }
}

/// `P_n(t) = (1/n) L^{(1)}_{n-1}(n t)` via the three-term Laguerre recurrence
/// `(m+1) L_{m+1} = (2m+1+α-x) L_m - (m+α) L_{m-1}`, run exactly.
pub fn pk_laguerre(n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let Some(t) = BigRational::from_float(t) else {
        return f64::NAN;
    };
    let x = t * BigInt::from(n);
    let alpha = BigRational::one();
    let mut prev = BigRational::one();
    if n == 1 {
        return 1.0;
    }
    let mut cur = BigRational::one() + &alpha - &x;
    for m in 1..n - 1 {
        let mq = BigRational::from_integer(BigInt::from(m));
        let two_m_plus_one = BigRational::from_integer(BigInt::from(2 * m + 1));
        let next = ((two_m_plus_one + &alpha - &x) * &cur - (mq + &alpha) * &prev)
            / BigInt::from(m + 1);
        prev = cur;
        cur = next;
    }
    to_f64(&(cur / BigInt::from(n)))
}
