use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{GeometryError, LassoKey};

/// Absolute tolerance on radius comparisons between arcs.
pub const RADIUS_TOLERANCE: f64 = 1e-12;

/// A cross-radial arc over one sector of a grid.
///
/// The radius is piecewise linear in the angle, sampled at uniformly spaced
/// angles from the start of the sector to its end (inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub id: String,
    /// 1-based sector index: sector `j` spans `[θ_{j-1}, θ_j]`.
    pub sector: usize,
    pub samples: Vec<f64>,
}

impl Arc {
    pub fn new(id: impl Into<String>, sector: usize, samples: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            sector,
            samples,
        }
    }

    /// Radius at fraction `u ∈ [0, 1]` of the way across the sector.
    pub fn radius_at(&self, u: f64) -> f64 {
        let segments = self.samples.len() - 1;
        let x = u.clamp(0.0, 1.0) * segments as f64;
        let i = (x.floor() as usize).min(segments - 1);
        let frac = x - i as f64;
        let (a, b) = (self.samples[i], self.samples[i + 1]);
        a + (b - a) * frac
    }

    /// Fractions `u` at which the radius function has a breakpoint.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        let segments = (self.samples.len() - 1) as f64;
        (0..self.samples.len()).map(move |i| i as f64 / segments)
    }

    /// `∫ r(θ)² dθ` over a sector of angular width `width`, in closed form.
    pub fn squared_radius_integral(&self, width: f64) -> f64 {
        let h = width / (self.samples.len() - 1) as f64;
        self.samples
            .windows(2)
            .map(|w| (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) * h / 3.0)
            .sum()
    }
}

/// A validated polar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    angles: Vec<f64>,
    // levels[j - 1][k - 1] is arc r_{jk}
    levels: Vec<Vec<Arc>>,
    index: HashMap<String, LassoKey>,
    lasso_areas: BTreeMap<LassoKey, f64>,
}

impl Grid {
    /// Validates the angles and arcs, sorts arcs outward within each sector
    /// and computes the area of every minimal lasso.
    pub fn new(angles: Vec<f64>, arcs: Vec<Arc>) -> Result<Self, GeometryError> {
        validate_angles(&angles)?;
        let sectors = angles.len() - 1;

        let mut seen = HashSet::new();
        let mut levels: Vec<Vec<Arc>> = vec![Vec::new(); sectors];
        for arc in arcs {
            if !seen.insert(arc.id.clone()) {
                return Err(GeometryError::DuplicateArcId(arc.id));
            }
            if arc.sector == 0 || arc.sector > sectors {
                return Err(GeometryError::BadSector {
                    arc: arc.id,
                    sector: arc.sector,
                    sectors,
                });
            }
            if arc.samples.len() < 2 {
                return Err(GeometryError::TooFewSamples {
                    got: arc.samples.len(),
                    arc: arc.id,
                });
            }
            if let Some(&value) = arc.samples.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
                return Err(GeometryError::NegativeRadius { arc: arc.id, value });
            }
            levels[arc.sector - 1].push(arc);
        }

        for (j, stack) in levels.iter_mut().enumerate() {
            stack.sort_by(|a, b| mean_square_radius(a).total_cmp(&mean_square_radius(b)));
            for pair in stack.windows(2) {
                check_nested(j + 1, &pair[0], &pair[1])?;
            }
        }

        let mut index = HashMap::new();
        let mut lasso_areas = BTreeMap::new();
        for (j, stack) in levels.iter().enumerate() {
            let width = angles[j + 1] - angles[j];
            let mut inner = 0.0;
            for (k, arc) in stack.iter().enumerate() {
                let key = LassoKey::new(j + 1, k + 1);
                let outer = arc.squared_radius_integral(width);
                lasso_areas.insert(key, (0.5 * (outer - inner)).max(0.0));
                index.insert(arc.id.clone(), key);
                inner = outer;
            }
        }

        Ok(Self {
            angles,
            levels,
            index,
            lasso_areas,
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn sector_count(&self) -> usize {
        self.angles.len() - 1
    }

    /// Arcs of sector `sector` (1-based), innermost first.
    pub fn levels(&self, sector: usize) -> &[Arc] {
        &self.levels[sector - 1]
    }

    pub fn arcs(&self) -> impl Iterator<Item = &Arc> {
        self.levels.iter().flatten()
    }

    /// Sector and level of the arc with the given id.
    pub fn locate(&self, id: &str) -> Option<LassoKey> {
        self.index.get(id).copied()
    }

    pub fn arc(&self, key: LassoKey) -> Option<&Arc> {
        self.levels
            .get(key.sector.checked_sub(1)?)?
            .get(key.level.checked_sub(1)?)
    }

    pub fn lasso_area(&self, key: LassoKey) -> Option<f64> {
        self.lasso_areas.get(&key).copied()
    }

    pub fn lasso_areas(&self) -> &BTreeMap<LassoKey, f64> {
        &self.lasso_areas
    }

    /// Area enclosed by the outermost arcs, `½∫ r_top(θ)² dθ`.
    pub fn total_area(&self) -> f64 {
        self.levels
            .iter()
            .enumerate()
            .filter_map(|(j, stack)| {
                let width = self.angles[j + 1] - self.angles[j];
                stack.last().map(|a| 0.5 * a.squared_radius_integral(width))
            })
            .sum()
    }

    /// Boundary angle indices `(start, end)` of a sector, with index `N`
    /// wrapped to `0`.
    pub(crate) fn sector_boundaries(&self, sector: usize) -> (usize, usize) {
        (sector - 1, sector % self.sector_count())
    }

    /// Angle at fraction `u` across a sector.
    pub(crate) fn angle_at(&self, sector: usize, u: f64) -> f64 {
        let (a, b) = (self.angles[sector - 1], self.angles[sector]);
        a + (b - a) * u
    }
}

fn validate_angles(angles: &[f64]) -> Result<(), GeometryError> {
    if angles.len() < 2 {
        return Err(GeometryError::BadAngles(format!(
            "need at least 2 angles, got {}",
            angles.len()
        )));
    }
    if angles[0] != 0.0 {
        return Err(GeometryError::BadAngles(format!(
            "first angle must be 0, got {}",
            angles[0]
        )));
    }
    let last = angles[angles.len() - 1];
    if (last - TAU).abs() > 1e-12 {
        return Err(GeometryError::BadAngles(format!(
            "last angle must be 2π, got {last}"
        )));
    }
    if let Some(w) = angles.windows(2).find(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(GeometryError::BadAngles(format!(
            "angles must be strictly increasing, got {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn mean_square_radius(arc: &Arc) -> f64 {
    arc.squared_radius_integral(1.0)
}

/// Checks that `upper` lies strictly above `lower` at every interior angle.
///
/// Both radii are linear between consecutive breakpoints of the merged
/// sample grids, so testing the merged breakpoints and the midpoints between
/// them decides the ordering exactly.
fn check_nested(sector: usize, lower: &Arc, upper: &Arc) -> Result<(), GeometryError> {
    let mut knots: Vec<f64> = lower.breakpoints().chain(upper.breakpoints()).collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let mut probes: Vec<(f64, bool)> = Vec::with_capacity(2 * knots.len());
    for (i, &u) in knots.iter().enumerate() {
        let interior = i != 0 && i != knots.len() - 1;
        probes.push((u, interior));
        if let Some(&next) = knots.get(i + 1) {
            probes.push((0.5 * (u + next), true));
        }
    }

    let gaps: Vec<(f64, bool)> = probes
        .into_iter()
        .map(|(u, interior)| (upper.radius_at(u) - lower.radius_at(u), interior))
        .collect();
    if gaps.iter().all(|(gap, _)| gap.abs() <= RADIUS_TOLERANCE) {
        return Err(GeometryError::CoincidentArcs {
            sector,
            first: lower.id.clone(),
            second: upper.id.clone(),
        });
    }
    let nested = gaps.iter().all(|&(gap, interior)| {
        if interior {
            gap > RADIUS_TOLERANCE
        } else {
            gap >= -RADIUS_TOLERANCE
        }
    });
    if !nested {
        return Err(GeometryError::CrossingArcs {
            sector,
            lower: lower.id.clone(),
            upper: upper.id.clone(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

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
    fn two_sector_unit_circle_areas() {
        let grid = circle_grid();
        let areas = grid.lasso_areas();
        assert_eq!(areas.len(), 2);
        assert!((areas[&LassoKey::new(1, 1)] - PI / 2.0).abs() < 1e-15);
        assert!((areas[&LassoKey::new(2, 1)] - PI / 2.0).abs() < 1e-15);
        assert!((grid.total_area() - PI).abs() < 1e-15);
    }

    #[test]
    fn zero_arc_has_zero_area() {
        let grid = Grid::new(vec![0.0, TAU], vec![Arc::new("z", 1, vec![0.0, 0.0])]).unwrap();
        assert_eq!(grid.lasso_area(LassoKey::new(1, 1)), Some(0.0));
    }

    #[test]
    fn crossing_arcs_rejected() {
        let err = Grid::new(
            vec![0.0, PI, TAU],
            vec![
                Arc::new("lo", 1, vec![1.0, 2.0]),
                Arc::new("hi", 1, vec![2.0, 1.0]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::CrossingArcs { sector: 1, .. }));
    }

    #[test]
    fn touching_inside_rejected() {
        // equal at the middle sample only
        let err = Grid::new(
            vec![0.0, TAU],
            vec![
                Arc::new("lo", 1, vec![1.0, 2.0, 1.0]),
                Arc::new("hi", 1, vec![2.0, 2.0, 2.0]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::CrossingArcs { .. }));
    }

    #[test]
    fn shared_endpoint_allowed() {
        let grid = Grid::new(
            vec![0.0, TAU],
            vec![
                Arc::new("lo", 1, vec![1.0, 1.0, 1.0]),
                Arc::new("hi", 1, vec![1.0, 2.0]),
            ],
        )
        .unwrap();
        assert_eq!(grid.locate("lo"), Some(LassoKey::new(1, 1)));
        assert_eq!(grid.locate("hi"), Some(LassoKey::new(1, 2)));
    }

    #[test]
    fn coincident_arcs_rejected() {
        let err = Grid::new(
            vec![0.0, TAU],
            vec![
                Arc::new("x", 1, vec![1.0, 1.0]),
                Arc::new("y", 1, vec![1.0, 1.0, 1.0]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::CoincidentArcs { .. }));
    }

    #[test]
    fn bad_angles_rejected() {
        for angles in [
            vec![0.0],
            vec![0.1, TAU],
            vec![0.0, 3.0],
            vec![0.0, 2.0, 2.0, TAU],
            vec![0.0, 4.0, 3.0, TAU],
        ] {
            let err = Grid::new(angles, vec![]).unwrap_err();
            assert!(matches!(err, GeometryError::BadAngles(_)), "{err:?}");
        }
    }

    #[test]
    fn invalid_arcs_rejected() {
        let angles = vec![0.0, TAU];
        assert!(matches!(
            Grid::new(angles.clone(), vec![Arc::new("n", 1, vec![1.0, -0.5])]),
            Err(GeometryError::NegativeRadius { .. })
        ));
        assert!(matches!(
            Grid::new(angles.clone(), vec![Arc::new("n", 1, vec![1.0, f64::NAN])]),
            Err(GeometryError::NegativeRadius { .. })
        ));
        assert!(matches!(
            Grid::new(angles.clone(), vec![Arc::new("s", 2, vec![1.0, 1.0])]),
            Err(GeometryError::BadSector { sector: 2, .. })
        ));
        assert!(matches!(
            Grid::new(angles.clone(), vec![Arc::new("s", 1, vec![1.0])]),
            Err(GeometryError::TooFewSamples { got: 1, .. })
        ));
        assert!(matches!(
            Grid::new(
                angles,
                vec![Arc::new("d", 1, vec![1.0, 1.0]), Arc::new("d", 1, vec![2.0, 2.0])]
            ),
            Err(GeometryError::DuplicateArcId(_))
        ));
    }

    #[test]
    fn piecewise_linear_area_is_exact() {
        // r(θ) = θ on [0, 2π] with 5 samples is exactly linear: ½∫θ² = (2π)³/6.
        let samples: Vec<f64> = (0..5).map(|i| TAU * i as f64 / 4.0).collect();
        let grid = Grid::new(vec![0.0, TAU], vec![Arc::new("spiral", 1, samples)]).unwrap();
        let expected = TAU.powi(3) / 6.0;
        let got = grid.lasso_area(LassoKey::new(1, 1)).unwrap();
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn arcs_sorted_outward_regardless_of_input_order() {
        let grid = Grid::new(
            vec![0.0, 1.0, TAU],
            vec![
                Arc::new("c", 1, vec![3.0, 3.0]),
                Arc::new("a", 1, vec![1.0, 1.0]),
                Arc::new("b", 1, vec![2.0, 2.5]),
            ],
        )
        .unwrap();
        let ids: Vec<&str> = grid.levels(1).iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert!(grid.levels(2).is_empty());
        // ½ · 1 · 3² split into three lassos
        let sum: f64 = grid.lasso_areas().values().sum();
        assert!((sum - 4.5).abs() < 1e-14);
        assert!((sum - grid.total_area()).abs() < 1e-14);
    }
}
