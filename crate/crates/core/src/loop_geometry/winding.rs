use std::collections::BTreeMap;
use std::f64::consts::TAU;

use super::{GeometryError, Grid, LassoKey, LoopWord, Sign, RADIUS_TOLERANCE};

/// Largest angular step between polygon vertices along an arc.
const MAX_CHORD_ANGLE: f64 = 0.01;

/// Winding number of the loop around an interior point of every minimal
/// lasso face, computed from the loop's plane geometry alone.
///
/// The loop is polygonalized (origin, arcs sampled densely, straight radial
/// connectors, back to the origin) and the signed angle it sweeps around the
/// test point is summed. Faces of zero area have no interior point and are
/// left out of the result.
pub fn face_windings(
    word: &LoopWord,
    grid: &Grid,
) -> Result<BTreeMap<LassoKey, i64>, GeometryError> {
    word.check_on(grid)?;
    let polygon = polygonalize(word, grid)?;
    Ok(grid
        .lasso_areas()
        .keys()
        .filter_map(|&key| interior_point(grid, key).map(|p| (key, winding_number(&polygon, p))))
        .collect())
}

fn polygonalize(word: &LoopWord, grid: &Grid) -> Result<Vec<(f64, f64)>, GeometryError> {
    let mut points = vec![(0.0, 0.0)];
    for letter in word.letters() {
        let key = grid
            .locate(&letter.arc)
            .ok_or_else(|| GeometryError::ArcNotInGrid(letter.arc.clone()))?;
        let arc = grid.arc(key).expect("located arc exists");
        let width = grid.angles()[key.sector] - grid.angles()[key.sector - 1];
        let segments = arc.samples.len() - 1;
        let per_segment = ((width / segments as f64) / MAX_CHORD_ANGLE).ceil().max(4.0) as usize;
        let total = segments * per_segment;
        let mut us: Vec<f64> = (0..=total).map(|i| i as f64 / total as f64).collect();
        if letter.sign == Sign::Minus {
            us.reverse();
        }
        points.extend(us.into_iter().map(|u| {
            let (r, theta) = (arc.radius_at(u), grid.angle_at(key.sector, u));
            (r * theta.cos(), r * theta.sin())
        }));
    }
    points.push((0.0, 0.0));
    Ok(points)
}

/// A point inside face `key`, where the face is widest radially.
fn interior_point(grid: &Grid, key: LassoKey) -> Option<(f64, f64)> {
    let outer = grid.arc(key)?;
    let inner = key
        .level
        .checked_sub(1)
        .filter(|&k| k > 0)
        .and_then(|k| grid.arc(LassoKey::new(key.sector, k)));
    let inner_radius = |u: f64| inner.map_or(0.0, |a| a.radius_at(u));

    let mut knots: Vec<f64> = outer
        .breakpoints()
        .chain(inner.into_iter().flat_map(|a| a.breakpoints()))
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let candidates = knots
        .windows(2)
        .flat_map(|w| [w[0], 0.5 * (w[0] + w[1])])
        .filter(|&u| u > 0.0 && u < 1.0);

    let (u, gap) = candidates
        .map(|u| (u, outer.radius_at(u) - inner_radius(u)))
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    if gap <= RADIUS_TOLERANCE {
        return None;
    }
    let r = inner_radius(u) + 0.5 * gap;
    let theta = grid.angle_at(key.sector, u);
    Some((r * theta.cos(), r * theta.sin()))
}

fn winding_number(polygon: &[(f64, f64)], p: (f64, f64)) -> i64 {
    let swept: f64 = polygon
        .windows(2)
        .map(|w| {
            let (ax, ay) = (w[0].0 - p.0, w[0].1 - p.1);
            let (bx, by) = (w[1].0 - p.0, w[1].1 - p.1);
            (ax * by - ay * bx).atan2(ax * bx + ay * by)
        })
        .sum();
    (swept / TAU).round() as i64
}
