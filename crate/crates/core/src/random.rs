//! Random grids and loops, used by property tests and acceptance checks.
//!
//! Generated arcs live in disjoint radial bands (level `k` stays inside
//! `[k - 0.9, k - 0.1]`), so every grid is valid by construction.

use std::f64::consts::TAU;

use rand::Rng;

use crate::loop_geometry::{Arc, Grid, LassoKey, Letter, LoopWord, Sign};

/// Shape limits for [`grid`].
#[derive(Debug, Clone, Copy)]
pub struct GridShape {
    pub max_sectors: usize,
    pub max_levels: usize,
    pub max_samples: usize,
}

impl Default for GridShape {
    fn default() -> Self {
        Self {
            max_sectors: 5,
            max_levels: 4,
            max_samples: 4,
        }
    }
}

/// Arc id used by the generators: `s{sector}l{level}`.
pub fn arc_id(sector: usize, level: usize) -> String {
    format!("s{sector}l{level}")
}

pub fn grid<R: Rng + ?Sized>(rng: &mut R, shape: GridShape) -> Grid {
    let sectors = rng.random_range(1..=shape.max_sectors);
    let angles = angles(rng, sectors);
    let mut arcs = Vec::new();
    for sector in 1..=sectors {
        let levels = rng.random_range(1..=shape.max_levels);
        for level in 1..=levels {
            let count = rng.random_range(2..=shape.max_samples);
            let samples = (0..count)
                .map(|_| level as f64 - 0.9 + 0.8 * rng.random::<f64>())
                .collect();
            arcs.push(Arc::new(arc_id(sector, level), sector, samples));
        }
    }
    Grid::new(angles, arcs).expect("generated grid is valid")
}

/// Random cut of `[0, 2π]` into `sectors` pieces, none narrower than a
/// fifth of the average.
pub fn angles<R: Rng + ?Sized>(rng: &mut R, sectors: usize) -> Vec<f64> {
    let weights: Vec<f64> = (0..sectors).map(|_| 0.2 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let mut out = Vec::with_capacity(sectors + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for w in &weights[..sectors - 1] {
        acc += w / total * TAU;
        out.push(acc);
    }
    out.push(TAU);
    out
}

fn random_level<R: Rng + ?Sized>(rng: &mut R, grid: &Grid, sector: usize) -> Letter {
    let levels = grid.levels(sector);
    let arc = &levels[rng.random_range(0..levels.len())];
    Letter::plus(arc.id.clone())
}

/// Sector entered when leaving `ray` in direction `sign`.
fn sector_from(ray: usize, sign: Sign, sectors: usize) -> usize {
    match sign {
        Sign::Plus => ray + 1,
        Sign::Minus if ray == 0 => sectors,
        Sign::Minus => ray,
    }
}

fn ray_after(sector: usize, sign: Sign, sectors: usize) -> usize {
    match sign {
        Sign::Plus => sector % sectors,
        Sign::Minus => sector - 1,
    }
}

fn step<R: Rng + ?Sized>(rng: &mut R, grid: &Grid, ray: usize, sign: Sign) -> (Letter, usize) {
    let n = grid.sector_count();
    let sector = sector_from(ray, sign, n);
    let mut letter = random_level(rng, grid, sector);
    letter.sign = sign;
    (letter, ray_after(sector, sign, n))
}

/// A closed random walk on the grid: `steps` letters of random direction and
/// level, then forward letters until it is back on ray 0. May wind around the
/// origin and may contain backtracks.
pub fn walk<R: Rng + ?Sized>(rng: &mut R, grid: &Grid, steps: usize) -> LoopWord {
    let mut ray = 0;
    let mut letters = Vec::with_capacity(steps + grid.sector_count());
    for _ in 0..steps {
        let sign = if rng.random_bool(0.5) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let (letter, next) = step(rng, grid, ray, sign);
        letters.push(letter);
        ray = next;
    }
    while ray != 0 || letters.is_empty() {
        let (letter, next) = step(rng, grid, ray, Sign::Plus);
        letters.push(letter);
        ray = next;
    }
    LoopWord::new(letters)
}

/// Inserts `count` random backtracks `d d⁻¹`; later insertions may land
/// inside earlier ones.
pub fn inject_backtracks<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &Grid,
    word: &LoopWord,
    count: usize,
) -> LoopWord {
    let n = grid.sector_count();
    let mut letters = word.letters().to_vec();
    for _ in 0..count {
        let at = rng.random_range(0..=letters.len());
        // ray reached after letters[..at]
        let ray = match at.checked_sub(1) {
            None => letters
                .first()
                .map(|l| start_ray(grid, l))
                .unwrap_or(0),
            Some(i) => {
                let l = &letters[i];
                ray_after(grid.locate(&l.arc).expect("arc in grid").sector, l.sign, n)
            }
        };
        let sign = if rng.random_bool(0.5) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let (d, _) = step(rng, grid, ray, sign);
        let inv = d.inverse();
        letters.splice(at..at, [d, inv]);
    }
    LoopWord::new(letters)
}

fn start_ray(grid: &Grid, letter: &Letter) -> usize {
    let n = grid.sector_count();
    let sector = grid.locate(&letter.arc).expect("arc in grid").sector;
    match letter.sign {
        Sign::Plus => sector - 1,
        Sign::Minus => sector % n,
    }
}

/// A simple positively oriented loop together with the area it encloses.
#[derive(Debug, Clone)]
pub struct SimpleLoop {
    pub word: LoopWord,
    pub area: f64,
}

/// One forward arc per sector, all the way around: a star-shaped loop about
/// the origin.
pub fn star_loop<R: Rng + ?Sized>(rng: &mut R, grid: &Grid) -> SimpleLoop {
    let mut letters = Vec::new();
    let mut area = 0.0;
    for sector in 1..=grid.sector_count() {
        let level = rng.random_range(1..=grid.levels(sector).len());
        letters.push(Letter::plus(grid.levels(sector)[level - 1].id.clone()));
        area += area_between(grid, sector, 0, level);
    }
    SimpleLoop {
        word: LoopWord::new(letters),
        area,
    }
}

/// Region between an outer and an inner arc over a run of consecutive
/// sectors starting at a random ray: out along the outer arcs, back along the
/// inner ones. Over the full circle this is an annulus around the origin.
/// Needs a sector with at least two levels; returns `None` otherwise.
pub fn patch_loop<R: Rng + ?Sized>(rng: &mut R, grid: &Grid) -> Option<SimpleLoop> {
    let n = grid.sector_count();
    if (1..=n).all(|s| grid.levels(s).len() < 2) {
        return None;
    }
    loop {
        let first = rng.random_range(1..=n);
        let run = rng.random_range(1..=n);
        let sectors: Vec<usize> = (0..run).map(|i| (first - 1 + i) % n + 1).collect();
        if sectors.iter().any(|&s| grid.levels(s).len() < 2) {
            continue;
        }
        let mut outer = Vec::new();
        let mut inner = Vec::new();
        let mut area = 0.0;
        for &s in &sectors {
            let levels = grid.levels(s);
            let hi = rng.random_range(2..=levels.len());
            let lo = rng.random_range(1..hi);
            outer.push(Letter::plus(levels[hi - 1].id.clone()));
            inner.push(Letter::minus(levels[lo - 1].id.clone()));
            area += area_between(grid, s, lo, hi);
        }
        inner.reverse();
        outer.extend(inner);
        return Some(SimpleLoop {
            word: LoopWord::new(outer),
            area,
        });
    }
}

fn area_between(grid: &Grid, sector: usize, lo: usize, hi: usize) -> f64 {
    (lo + 1..=hi)
        .map(|level| {
            grid.lasso_area(LassoKey::new(sector, level))
                .expect("level exists")
        })
        .sum()
}
