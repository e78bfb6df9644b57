//! Acceptance checks. Each check runs at its stated tolerance and time limit
//! and reports an [`Outcome`]; the `acceptance` test target prints them.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::time::{Duration, Instant};

use masterfield_core::loop_geometry::decompose_raw;
use masterfield_core::random::{self, GridShape};
use masterfield_core::{
    decompose, face_windings, msc_moment, pk_closed, pk_laguerre, pk_recursion, wilson_loop,
    word_moment, Arc, EngineConfig, Grid, LassoKey, LassoWord, Letter, LoopWord, WordMomentQuery,
};
use masterfield_mc::{estimate_covariance, estimate_trace_moment, estimate_trace_moments, McConfig, DEFAULT_SEED};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    /// Whether the numerical checks held, ignoring the time limit.
    pub checks_passed: bool,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
    pub detail: String,
}

impl Outcome {
    pub fn in_time(&self) -> bool {
        self.limit.is_none_or(|limit| self.elapsed < limit)
    }

    pub fn passed(&self) -> bool {
        self.checks_passed && self.in_time()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{}] {}: {}", self.id, self.name, self.detail)?;
        write!(f, "; {:.2} s", self.elapsed.as_secs_f64())?;
        if let Some(limit) = self.limit {
            let mark = if self.in_time() { "within" } else { "OVER" };
            write!(f, " ({mark} limit {} s)", limit.as_secs())?;
        }
        Ok(())
    }
}

fn timed(
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    body: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (checks_passed, detail) = body();
    Outcome {
        id,
        name,
        checks_passed,
        elapsed: start.elapsed(),
        limit,
        detail,
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn single(letters: &[(usize, i64)], areas: &[f64]) -> LassoWord {
    let key = |j: usize| LassoKey::new(j, 1);
    LassoWord::new(
        letters.iter().map(|&(j, e)| (key(j), e)).collect(),
        areas.iter().enumerate().map(|(i, &a)| (key(i + 1), a)).collect(),
    )
}

/// Recursion, closed form and Laguerre form of `P_k(t)` for `k ≤ 30`.
pub fn pk_identities() -> Outcome {
    timed(1, "P_k evaluators agree", Some(Duration::from_secs(1)), || {
        let mut worst = 0.0f64;
        let mut errors = Vec::new();
        for k in 0..=30 {
            for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
                let values = pk_recursion(k, t).and_then(|r| Ok((r, pk_closed(k, t)?)));
                match values {
                    Ok((r, c)) => {
                        let l = pk_laguerre(k, t);
                        worst = worst.max(relative_gap(r, c)).max(relative_gap(r, l)).max(relative_gap(c, l));
                    }
                    Err(e) => errors.push(format!("k={k} t={t}: {e}")),
                }
            }
        }
        let ok = errors.is_empty() && worst <= 1e-9;
        (ok, format!("155 points, worst relative gap {worst:.1e} (tol 1e-9){}", errors.join("; ")))
    })
}

/// Wilson loops of random simple loops against the semicircular law of
/// their enclosed area.
pub fn simple_loops() -> Outcome {
    timed(2, "simple loops follow the semicircular law", Some(Duration::from_secs(10)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let config = EngineConfig {
            max_alternation: 200,
            ..EngineConfig::default()
        };
        let mut worst = 0.0f64;
        let mut problems = Vec::new();
        for i in 0..5 {
            let grid = random::grid(&mut rng, GridShape::default());
            let simple = if i % 2 == 1 {
                random::patch_loop(&mut rng, &grid).unwrap_or_else(|| random::star_loop(&mut rng, &grid))
            } else {
                random::star_loop(&mut rng, &grid)
            };
            match face_windings(&simple.word, &grid) {
                Ok(w) if w.values().all(|&n| n == 0 || n == 1) => {}
                other => problems.push(format!("loop {i} is not simple and positive: {other:?}")),
            }
            for k in 1..=5 {
                let got = wilson_loop(&simple.word, &grid, k, &config);
                let want = msc_moment(simple.area, k);
                match (got, want) {
                    (Ok(g), Ok(w)) => worst = worst.max((g - w).abs()),
                    (g, w) => problems.push(format!("loop {i} k={k}: {g:?} / {w:?}")),
                }
            }
        }
        let ok = problems.is_empty() && worst <= 1e-9;
        (ok, format!("5 loops, k ≤ 5, worst gap {worst:.1e} (tol 1e-9){}", problems.join("; ")))
    })
}

fn within(mean: f64, stderr: Option<f64>, target: f64) -> bool {
    stderr.is_some_and(|se| (mean - target).abs() <= 3.0 * se + 0.005)
}

fn large_n() -> McConfig {
    McConfig {
        n: 128,
        samples: 2000,
        steps_per_unit_area: 100,
        seed: DEFAULT_SEED,
    }
}

/// Moments of one unitary Brownian motion at time 1 and N = 128.
pub fn finite_n_convergence() -> Outcome {
    timed(3, "finite-N moments of one lasso", Some(Duration::from_secs(120)), || {
        let word = single(&[(1, 1)], &[1.0]);
        // e^{-k/2} P_k(1)
        let frozen = [0.6065307, 0.0, -0.1115651];
        let mut ok = true;
        let mut parts = Vec::new();
        for (k, want) in (1..=3).zip(frozen) {
            let exact = msc_moment(1.0, k).expect("engine value");
            ok &= (exact - want).abs() < 5e-8;
        }
        match estimate_trace_moments(&word, &[1, 2, 3], &large_n()) {
            Ok(estimates) => {
                for (est, want) in estimates.iter().zip(frozen) {
                    let hit = within(est.mean, est.stderr, want);
                    ok &= hit;
                    parts.push(format!(
                        "k={} mean {:.5} ± {:.5} vs {want}",
                        est.k,
                        est.mean,
                        est.stderr.unwrap_or(f64::NAN)
                    ));
                }
            }
            Err(e) => {
                ok = false;
                parts.push(e.to_string());
            }
        }
        (ok, parts.join(", "))
    })
}

/// The commutator of two independent lassos of area 1.
pub fn freeness_cross_check() -> Outcome {
    timed(4, "commutator at N = 128", Some(Duration::from_secs(120)), || {
        let word = single(&[(1, 1), (2, 1), (1, -1), (2, -1)], &[1.0, 1.0]);
        let frozen = 0.6004236;
        let exact = word_moment(&WordMomentQuery::new(word.clone(), 1), &EngineConfig::default());
        let mut ok = matches!(exact, Ok(v) if (v - frozen).abs() < 5e-8);
        let detail = match estimate_trace_moment(&word, 1, &large_n()) {
            Ok(est) => {
                ok &= within(est.mean, est.stderr, frozen);
                format!(
                    "engine {:.7}, mean {:.5} ± {:.5} vs {frozen}",
                    exact.unwrap_or(f64::NAN),
                    est.mean,
                    est.stderr.unwrap_or(f64::NAN)
                )
            }
            Err(e) => {
                ok = false;
                e.to_string()
            }
        };
        (ok, detail)
    })
}

/// Two-sector grid with two rings of arcs: a disk and the annulus around it.
fn disk_and_annulus() -> (Grid, LoopWord, LoopWord) {
    let ring = |id: &str, sector: usize, r: f64| Arc::new(id, sector, vec![r, r]);
    let grid = Grid::new(
        vec![0.0, PI, TAU],
        vec![ring("a1", 1, 0.5), ring("a2", 1, 0.7), ring("b1", 2, 0.5), ring("b2", 2, 0.7)],
    )
    .expect("valid grid");
    let disk = LoopWord::new(vec![Letter::plus("a1"), Letter::plus("b1")]);
    let annulus = LoopWord::new(vec![
        Letter::plus("a2"),
        Letter::plus("b2"),
        Letter::minus("b1"),
        Letter::minus("a1"),
    ]);
    (grid, disk, annulus)
}

/// Covariance of the traces of a disk and the annulus around it. Their lasso
/// words share `l_{11}`, so the estimator really does draw them jointly.
pub fn disjoint_loops_independent() -> Outcome {
    timed(5, "loops with disjoint interiors are uncorrelated", None, || {
        let (grid, disk, annulus) = disk_and_annulus();
        let (Ok(w1), Ok(w2)) = (decompose(&disk, &grid), decompose(&annulus, &grid)) else {
            return (false, "decomposition failed".into());
        };
        let (Ok(f1), Ok(f2)) = (face_windings(&disk, &grid), face_windings(&annulus, &grid)) else {
            return (false, "winding failed".into());
        };
        let disjoint = f1.iter().all(|(key, &n)| n == 0 || f2.get(key).copied().unwrap_or(0) == 0);
        let config = McConfig {
            n: 64,
            samples: 2000,
            steps_per_unit_area: 100,
            seed: DEFAULT_SEED,
        };
        match estimate_covariance(&w1, &w2, &config) {
            Ok(cov) => {
                let se = cov.stderr.unwrap_or(f64::NAN);
                let ok = disjoint && cov.covariance.abs() <= 3.0 * se;
                (ok, format!("{w1} and {w2}: covariance {:.2e} ± {se:.2e}", cov.covariance))
            }
            Err(e) => (false, e.to_string()),
        }
    })
}

/// Engine and Monte Carlo values of random loops before and after removing
/// injected backtracks.
pub fn backtrack_invariance() -> Outcome {
    timed(6, "backtracks change nothing", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let engine = EngineConfig {
            max_alternation: 40,
            ..EngineConfig::default()
        };
        let mut problems = Vec::new();
        let mut worst_z = 0.0f64;
        for i in 0..20u64 {
            let grid = random::grid(
                &mut rng,
                GridShape {
                    max_sectors: 3,
                    max_levels: 2,
                    max_samples: 3,
                },
            );
            let word = random::walk(&mut rng, &grid, 3);
            let extra = rng.random_range(1..=3);
            let noisy = random::inject_backtracks(&mut rng, &grid, &word, extra);
            let reduced = noisy.backtrack_reduce();
            for k in [1, 2, -1] {
                let a = wilson_loop(&noisy, &grid, k, &engine);
                let b = wilson_loop(&reduced, &grid, k, &engine);
                if a.is_err() || a != b {
                    problems.push(format!("loop {i} k={k}: {a:?} vs {b:?}"));
                }
            }
            let (Ok(raw), Ok(clean)) = (decompose_raw(&noisy, &grid), decompose(&reduced, &grid)) else {
                problems.push(format!("loop {i}: decomposition failed"));
                continue;
            };
            let config = |seed| McConfig {
                n: 8,
                samples: 100,
                steps_per_unit_area: 10,
                seed,
            };
            match (
                estimate_trace_moment(&raw, 1, &config(600 + 2 * i)),
                estimate_trace_moment(&clean, 1, &config(601 + 2 * i)),
            ) {
                (Ok(a), Ok(b)) => {
                    let se = a.stderr.unwrap_or(0.0).hypot(b.stderr.unwrap_or(0.0));
                    let gap = (a.mean - b.mean).abs();
                    // loops that reduce to nothing have zero variance; the raw
                    // word still multiplies h h⁻¹ pairs in floating point
                    if gap > 3.0 * se + 1e-12 {
                        problems.push(format!("loop {i}: {} vs {} (se {se:.3})", a.mean, b.mean));
                    } else if gap > 1e-12 {
                        worst_z = worst_z.max(gap / se);
                    }
                }
                (a, b) => problems.push(format!("loop {i}: {a:?} / {b:?}")),
            }
        }
        let detail = format!(
            "20 loops, engine equal for k ∈ {{1, 2, -1}}, largest MC gap {worst_z:.2} combined se{}",
            problems.iter().map(|p| format!("; {p}")).collect::<String>()
        );
        (problems.is_empty(), detail)
    })
}

/// Net lasso exponents against winding numbers from the loop's polygon.
pub fn decomposition_matches_windings() -> Outcome {
    timed(7, "net exponents equal winding numbers", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut mismatches = Vec::new();
        let mut faces = 0;
        for i in 0..50 {
            let grid = random::grid(&mut rng, GridShape::default());
            let steps = rng.random_range(1..12);
            let word = random::walk(&mut rng, &grid, steps);
            let net: BTreeMap<LassoKey, i64> = match decompose(&word, &grid) {
                Ok(w) => w.net_exponents(),
                Err(e) => {
                    mismatches.push(format!("loop {i}: {e}"));
                    continue;
                }
            };
            let windings = match face_windings(&word, &grid) {
                Ok(w) => w,
                Err(e) => {
                    mismatches.push(format!("loop {i}: {e}"));
                    continue;
                }
            };
            if windings.len() != grid.lasso_areas().len() {
                mismatches.push(format!("loop {i}: {} faces without an interior point", grid.lasso_areas().len() - windings.len()));
            }
            for (key, &w) in &windings {
                faces += 1;
                let e = net.get(key).copied().unwrap_or(0);
                if e != w {
                    mismatches.push(format!("loop {i} face {key}: exponent {e}, winding {w}"));
                }
            }
        }
        let detail = format!(
            "50 loops, {faces} faces, {} mismatches{}",
            mismatches.len(),
            mismatches.iter().map(|m| format!("; {m}")).collect::<String>()
        );
        (mismatches.is_empty(), detail)
    })
}

/// Every check with its number; the cheap ones first, the two large-N runs
/// last.
pub fn all() -> Vec<(usize, fn() -> Outcome)> {
    vec![
        (1, pk_identities),
        (2, simple_loops),
        (7, decomposition_matches_windings),
        (6, backtrack_invariance),
        (5, disjoint_loops_independent),
        (3, finite_n_convergence),
        (4, freeness_cross_check),
    ]
}
