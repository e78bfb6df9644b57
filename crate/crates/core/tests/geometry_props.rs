use masterfield_core::loop_geometry::{decompose_raw, RADIUS_TOLERANCE};
use masterfield_core::random::{self, GridShape};
use masterfield_core::{decompose, face_windings, Arc, Grid, LassoKey, Letter, LoopWord, Sign};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup(seed: u64, steps: usize) -> (Grid, LoopWord, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = random::grid(&mut rng, GridShape::default());
    let word = random::walk(&mut rng, &grid, steps);
    (grid, word, rng)
}

/// Splits sector `j` at its middle angle. Arcs are first refined by inserting
/// segment midpoints, which leaves the piecewise-linear radius unchanged and
/// puts a sample exactly on the cut.
fn split_sector(grid: &Grid, j: usize) -> (Grid, impl Fn(&Letter) -> Vec<Letter>) {
    let angles = grid.angles();
    let mid = 0.5 * (angles[j - 1] + angles[j]);
    let mut new_angles = angles.to_vec();
    new_angles.insert(j, mid);
    let mut arcs = Vec::new();
    for arc in grid.arcs() {
        if arc.sector < j {
            arcs.push(arc.clone());
        } else if arc.sector > j {
            arcs.push(Arc::new(arc.id.clone(), arc.sector + 1, arc.samples.clone()));
        } else {
            let mut fine = vec![arc.samples[0]];
            for w in arc.samples.windows(2) {
                fine.push(0.5 * (w[0] + w[1]));
                fine.push(w[1]);
            }
            let half = fine.len() / 2;
            arcs.push(Arc::new(format!("{}:L", arc.id), j, fine[..=half].to_vec()));
            arcs.push(Arc::new(format!("{}:R", arc.id), j + 1, fine[half..].to_vec()));
        }
    }
    let split_ids: Vec<String> = grid.levels(j).iter().map(|a| a.id.clone()).collect();
    let map = move |l: &Letter| {
        if !split_ids.contains(&l.arc) {
            return vec![l.clone()];
        }
        let left = Letter::new(format!("{}:L", l.arc), l.sign);
        let right = Letter::new(format!("{}:R", l.arc), l.sign);
        match l.sign {
            Sign::Plus => vec![left, right],
            Sign::Minus => vec![right, left],
        }
    };
    (Grid::new(new_angles, arcs).unwrap(), map)
}

fn abs_weighted_area(word: &LoopWord, grid: &Grid) -> f64 {
    decompose(word, grid)
        .unwrap()
        .net_exponents()
        .iter()
        .map(|(key, e)| e.unsigned_abs() as f64 * grid.lasso_area(*key).unwrap())
        .sum()
}

/// `½∫ r_top²` by Simpson's rule per linear segment, exact for quadratics.
fn top_area_simpson(grid: &Grid) -> f64 {
    let angles = grid.angles();
    (1..=grid.sector_count())
        .map(|j| {
            let top = grid.levels(j).last().unwrap();
            let h = (angles[j] - angles[j - 1]) / (top.samples.len() - 1) as f64;
            let integral: f64 = top
                .samples
                .windows(2)
                .map(|w| {
                    let m = 0.5 * (w[0] + w[1]);
                    h / 6.0 * (w[0] * w[0] + 4.0 * m * m + w[1] * w[1])
                })
                .sum();
            0.5 * integral
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn net_exponents_match_windings(seed in any::<u64>(), steps in 0usize..12) {
        let (grid, word, _) = setup(seed, steps);
        let net = decompose(&word, &grid).unwrap().net_exponents();
        let windings = face_windings(&word, &grid).unwrap();
        prop_assert_eq!(windings.len(), grid.lasso_areas().len());
        for (key, w) in &windings {
            prop_assert_eq!(*w, net.get(key).copied().unwrap_or(0), "face {}", key);
        }
    }

    #[test]
    fn backtrack_reduction(seed in any::<u64>(), steps in 0usize..10, extra in 0usize..5) {
        let (grid, word, mut rng) = setup(seed, steps);
        let noisy = random::inject_backtracks(&mut rng, &grid, &word, extra);
        let reduced = noisy.backtrack_reduce();
        prop_assert!(reduced.len() <= noisy.len());
        prop_assert_eq!(reduced.backtrack_reduce(), reduced.clone());
        prop_assert_eq!(reduced.clone(), word.backtrack_reduce());
        reduced.check_on(&grid).unwrap();
        prop_assert_eq!(decompose(&noisy, &grid).unwrap(), decompose(&reduced, &grid).unwrap());
    }

    #[test]
    fn raw_decomposition_normalizes(seed in any::<u64>(), steps in 0usize..10) {
        let (grid, word, _) = setup(seed, steps);
        let raw = decompose_raw(&word, &grid).unwrap();
        let expected: usize = word
            .letters()
            .iter()
            .map(|l| grid.locate(&l.arc).unwrap().level)
            .sum();
        prop_assert_eq!(raw.len(), expected);
        let normalized = decompose(&word, &grid).unwrap();
        prop_assert!(normalized.is_normalized());
        prop_assert_eq!(raw.net_exponents(), normalized.net_exponents());
    }

    #[test]
    fn regridding_preserves_weighted_area(seed in any::<u64>(), steps in 0usize..10) {
        let (grid, word, mut rng) = setup(seed, steps);
        let j = rand::Rng::random_range(&mut rng, 1..=grid.sector_count());
        let (fine, map) = split_sector(&grid, j);
        let fine_word: LoopWord = word.letters().iter().flat_map(&map).collect();
        fine_word.check_on(&fine).unwrap();

        for (level, arc) in grid.levels(j).iter().enumerate() {
            let key = LassoKey::new(j, level + 1);
            let left = fine.lasso_area(LassoKey::new(j, level + 1)).unwrap();
            let right = fine.lasso_area(LassoKey::new(j + 1, level + 1)).unwrap();
            prop_assert_eq!(fine.locate(&format!("{}:L", arc.id)), Some(key));
            prop_assert!((left + right - grid.lasso_area(key).unwrap()).abs() <= 1e-12);
        }
        let before = abs_weighted_area(&word, &grid);
        let after = abs_weighted_area(&fine_word, &fine);
        prop_assert!((before - after).abs() <= 1e-12, "{} vs {}", before, after);
    }

    #[test]
    fn areas_nonnegative_and_sum_to_top(seed in any::<u64>()) {
        let (grid, _, _) = setup(seed, 0);
        prop_assert!(grid.lasso_areas().values().all(|&a| a >= 0.0));
        let sum: f64 = grid.lasso_areas().values().sum();
        prop_assert!((sum - grid.total_area()).abs() <= 1e-12);
        prop_assert!((sum - top_area_simpson(&grid)).abs() <= 1e-12);
    }

    #[test]
    fn inverse_negates_exponents(seed in any::<u64>(), steps in 0usize..10) {
        let (grid, word, _) = setup(seed, steps);
        let forward = decompose(&word, &grid).unwrap();
        let backward = decompose(&word.inverse(), &grid).unwrap();
        prop_assert_eq!(backward, forward.inverse());
    }
}

#[test]
fn windings_of_simple_loops_are_zero_or_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let grid = random::grid(&mut rng, GridShape::default());
        let mut loops = vec![random::star_loop(&mut rng, &grid)];
        loops.extend(random::patch_loop(&mut rng, &grid));
        for l in loops {
            let windings = face_windings(&l.word, &grid).unwrap();
            assert!(windings.values().all(|w| *w == 0 || *w == 1));
            let enclosed: f64 = windings
                .iter()
                .filter(|(_, w)| **w == 1)
                .map(|(k, _)| grid.lasso_area(*k).unwrap())
                .sum();
            assert!((enclosed - l.area).abs() < 1e-12);
        }
    }
}

#[test]
fn touching_arcs_within_tolerance_are_rejected() {
    let angles = vec![0.0, std::f64::consts::TAU];
    let arcs = vec![
        Arc::new("a", 1, vec![1.0, 1.0, 1.0]),
        Arc::new("b", 1, vec![2.0, 1.0 + RADIUS_TOLERANCE / 2.0, 2.0]),
    ];
    assert!(Grid::new(angles, arcs).is_err());
}
