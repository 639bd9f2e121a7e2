//! Subdivision on the flat cylinder `S^1 x [0, 1]` through its universal
//! cover, the strip `R x [0, 1]`.
//!
//! A sequence on the cylinder plus the winding of each connecting segment
//! lifts to the strip; refinement runs there with plain affine averages and
//! the result is projected back by `u mod 2 pi`. Shifting the lift by a deck
//! transformation `u -> u + 2 pi k` commutes with the (affine invariant)
//! strip refinement and disappears under projection.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::manifold::ManifoldPoint;
use crate::mask::Mask;
use crate::subdivision::{refine, Polygon};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderPoint {
    angle: f64,
    height: f64,
}

impl CylinderPoint {
    /// `angle` in `[0, 2 pi)`, `height` in `[0, 1]`.
    pub fn new(angle: f64, height: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&angle) || !(0.0..=1.0).contains(&height) {
            return Err(Error::InvalidPoint(format!(
                "cylinder point ({angle}, {height}) outside [0, 2pi) x [0, 1]"
            )));
        }
        Ok(CylinderPoint { angle, height })
    }

    /// Projection of a strip point; the height is kept even outside `[0, 1]`.
    fn project(u: f64, height: f64) -> Self {
        let mut angle = u.rem_euclid(TAU);
        if angle >= TAU {
            angle = 0.0;
        }
        CylinderPoint { angle, height }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn height(&self) -> f64 {
        self.height
    }
}

/// A point of the strip stored as `(sheet, angle)` so that projecting it back
/// returns the base angle bit for bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftedPoint {
    pub sheet: i64,
    pub angle: f64,
    pub height: f64,
}

impl LiftedPoint {
    pub fn u(&self) -> f64 {
        self.angle + TAU * self.sheet as f64
    }

    pub fn project(&self) -> CylinderPoint {
        CylinderPoint {
            angle: self.angle,
            height: self.height,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftedPath {
    pub base_points: Vec<CylinderPoint>,
    /// Extra full turns of the segment `i -> i + 1` beyond the shortest arc.
    pub winding: Vec<i64>,
    pub lift: Vec<LiftedPoint>,
}

/// Wraps an angle difference to `(-pi, pi]`, returning the sheet carry.
fn wrap(raw: f64) -> (f64, i64) {
    if raw > PI {
        (raw - TAU, -1)
    } else if raw <= -PI {
        (raw + TAU, 1)
    } else {
        (raw, 0)
    }
}

/// Lifts `points` joined by segments with the given windings, starting on
/// sheet `base_choice`.
pub fn lift(points: &[CylinderPoint], winding: &[i64], base_choice: i64) -> Result<LiftedPath> {
    if points.is_empty() {
        return Err(Error::InvalidPoint("empty cylinder path".into()));
    }
    if winding.len() + 1 != points.len() {
        return Err(Error::InvalidPoint(format!(
            "{} points need {} winding numbers, got {}",
            points.len(),
            points.len() - 1,
            winding.len()
        )));
    }
    let mut sheet = base_choice;
    let mut lifted = Vec::with_capacity(points.len());
    lifted.push(LiftedPoint {
        sheet,
        angle: points[0].angle,
        height: points[0].height,
    });
    for (pair, &w) in points.windows(2).zip(winding) {
        let (_, carry) = wrap(pair[1].angle - pair[0].angle);
        sheet += carry + w;
        lifted.push(LiftedPoint {
            sheet,
            angle: pair[1].angle,
            height: pair[1].height,
        });
    }
    Ok(LiftedPath {
        base_points: points.to_vec(),
        winding: winding.to_vec(),
        lift: lifted,
    })
}

/// Lift with every segment taken along the shortest arc.
pub fn lift_shortest(points: &[CylinderPoint], base_choice: i64) -> Result<LiftedPath> {
    let winding = vec![0; points.len().saturating_sub(1)];
    lift(points, &winding, base_choice)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CylinderLevel {
    pub points: Vec<CylinderPoint>,
    /// Indices whose height left `[0, 1]`; the strip has a boundary that signed
    /// masks can overshoot.
    pub out_of_strip: Vec<usize>,
    /// Strip coordinates `(u, h)` before projection.
    pub strip: Vec<[f64; 2]>,
}

/// Refines on the strip and projects levels `0..=k` back to the cylinder.
pub fn subdivide_on_cylinder(
    mask: &Mask,
    path: &LiftedPath,
    k: u32,
    tolerance: f64,
) -> Result<Vec<CylinderLevel>> {
    let strip_points: Vec<ManifoldPoint> = path
        .lift
        .iter()
        .map(|p| ManifoldPoint::euclidean(&[p.u(), p.height]))
        .collect();
    let polygon = Polygon::new(strip_points, false)?;
    let trace = refine(mask, &polygon, k, tolerance)?;
    let mut levels = Vec::with_capacity(trace.levels.len());
    for (idx, level) in trace.levels.iter().enumerate() {
        let strip: Vec<[f64; 2]> = level
            .points()
            .iter()
            .map(|p| [p.coords()[0], p.coords()[1]])
            .collect();
        let points: Vec<CylinderPoint> = if idx == 0 {
            path.lift.iter().map(LiftedPoint::project).collect()
        } else {
            strip.iter().map(|s| CylinderPoint::project(s[0], s[1])).collect()
        };
        let out_of_strip = points
            .iter()
            .enumerate()
            .filter(|(_, p)| !(0.0..=1.0).contains(&p.height))
            .map(|(i, _)| i)
            .collect();
        levels.push(CylinderLevel {
            points,
            out_of_strip,
            strip,
        });
    }
    Ok(levels)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Largest pointwise difference between two projected refinements, with
/// angles compared on the circle.
pub fn projected_difference(a: &[CylinderLevel], b: &[CylinderLevel]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for (la, lb) in a.iter().zip(b) {
        if la.points.len() != lb.points.len() {
            return f64::INFINITY;
        }
        for (p, q) in la.points.iter().zip(&lb.points) {
            worst = worst
                .max(angle_gap(p.angle, q.angle))
                .max((p.height - q.height).abs());
        }
    }
    worst
}

/// Whether refining lifts on the sheets `base_choice + s`, `s in shifts`,
/// projects to the same cylinder sequence (within `1e-12`) for `levels` steps.
pub fn deck_invariance_check(
    mask: &Mask,
    path: &LiftedPath,
    shifts: &[i64],
    levels: u32,
    tolerance: f64,
) -> Result<bool> {
    let base_choice = path.lift.first().map_or(0, |p| p.sheet);
    let reference = subdivide_on_cylinder(mask, path, levels, tolerance)?;
    for &s in shifts {
        let shifted = lift(&path.base_points, &path.winding, base_choice + s)?;
        let out = subdivide_on_cylinder(mask, &shifted, levels, tolerance)?;
        if projected_difference(&reference, &out) > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}
