//! JSON documents: points, polygons, cylinder paths and refinement traces.

use serde::{Deserialize, Serialize};

use crate::covering::{lift, CylinderLevel, CylinderPoint, LiftedPath};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldPoint};
use crate::mask::{format_rational, parse_rational, Mask, MaskDoc};
use crate::subdivision::{
    is_interpolatory, preserves_coarse_points, Diagnostics, Polygon, RefinementTrace,
};

/// `{"manifold": "...", "coords": [...]}`; hyperbolic points may instead give
/// `{"chart": "disk" | "hyperboloid", "coords": [...]}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PointDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifold: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    pub coords: Vec<f64>,
}

impl PointDoc {
    pub fn to_point(&self, default: Option<Manifold>) -> Result<ManifoldPoint> {
        let manifold = match (&self.manifold, default) {
            (Some(m), _) => m.parse::<Manifold>()?,
            (None, Some(m)) => m,
            (None, None) => return Err(Error::Parse("point without manifold".into())),
        };
        match (manifold, self.chart.as_deref()) {
            (Manifold::Hyperbolic2, Some("disk")) => {
                if self.coords.len() != 2 {
                    return Err(Error::InvalidPoint("disk chart needs 2 coordinates".into()));
                }
                ManifoldPoint::from_disk(self.coords[0], self.coords[1])
            }
            (_, None) | (Manifold::Hyperbolic2, Some("hyperboloid")) => {
                ManifoldPoint::new(manifold, self.coords.clone())
            }
            (m, Some(c)) => Err(Error::Parse(format!("chart {c:?} not available on {m}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonDoc {
    pub manifold: String,
    #[serde(default)]
    pub closed: bool,
    pub points: Vec<PointDoc>,
}

impl PolygonDoc {
    pub fn to_polygon(&self) -> Result<Polygon> {
        let m: Manifold = self.manifold.parse()?;
        let points = self
            .points
            .iter()
            .map(|p| p.to_point(Some(m)))
            .collect::<Result<Vec<_>>>()?;
        if let Some(p) = points.iter().find(|p| p.manifold() != m) {
            return Err(Error::ManifoldMismatch {
                left: m.to_string(),
                right: p.manifold().to_string(),
            });
        }
        Polygon::new(points, self.closed)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CylinderPointDoc {
    pub angle: f64,
    pub height: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CylinderPathDoc {
    pub points: Vec<CylinderPointDoc>,
    #[serde(default)]
    pub winding: Option<Vec<i64>>,
    #[serde(default)]
    pub base_choice: i64,
}

impl CylinderPathDoc {
    pub fn to_path(&self) -> Result<LiftedPath> {
        let points = self
            .points
            .iter()
            .map(|p| CylinderPoint::new(p.angle, p.height))
            .collect::<Result<Vec<_>>>()?;
        let winding = self
            .winding
            .clone()
            .unwrap_or_else(|| vec![0; points.len().saturating_sub(1)]);
        lift(&points, &winding, self.base_choice)
    }
}

/// Input data file: either a manifold polygon or a cylinder path.
#[derive(Clone, Debug)]
pub enum DataDoc {
    Polygon(PolygonDoc),
    Cylinder(CylinderPathDoc),
}

impl DataDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let is_cylinder = value.get("winding").is_some()
            || value.get("manifold").and_then(|m| m.as_str()) == Some("cylinder")
            || value
                .get("points")
                .and_then(|p| p.get(0))
                .is_some_and(|p| p.get("angle").is_some());
        if is_cylinder {
            Ok(DataDoc::Cylinder(serde_json::from_value(value)?))
        } else {
            Ok(DataDoc::Polygon(serde_json::from_value(value)?))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsDoc {
    pub rho: f64,
    pub empirical_gammas: Vec<f64>,
    pub displacement_constants: Vec<f64>,
    pub displacement_ratios: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpolation_preserved: Option<Vec<bool>>,
}

impl From<&Diagnostics> for DiagnosticsDoc {
    fn from(d: &Diagnostics) -> Self {
        DiagnosticsDoc {
            rho: d.rho,
            empirical_gammas: d.empirical_gammas.clone(),
            displacement_constants: d.displacement_constants.clone(),
            displacement_ratios: d.displacement_ratios.clone(),
            interpolation_preserved: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelDoc {
    pub level: u32,
    pub origin: String,
    /// Canonical chart coordinates.
    pub points: Vec<Vec<f64>>,
    /// Poincaré-disk coordinates, hyperbolic traces only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disk: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceDoc {
    pub manifold: String,
    pub closed: bool,
    pub dilation: u32,
    pub mask: MaskDoc,
    pub gamma: String,
    pub tolerance: f64,
    pub levels: Vec<LevelDoc>,
    pub diagnostics: DiagnosticsDoc,
}

/// Diagnostics document of a trace, including interpolation flags when the
/// mask is interpolatory.
pub fn diagnostics_doc(trace: &RefinementTrace) -> DiagnosticsDoc {
    let mut doc = DiagnosticsDoc::from(&trace.diagnostics);
    if is_interpolatory(&trace.mask) {
        doc.interpolation_preserved = Some(
            trace
                .levels
                .windows(2)
                .map(|w| preserves_coarse_points(&w[0], &w[1], trace.dilation()))
                .collect(),
        );
    }
    doc
}

impl TraceDoc {
    pub fn from_trace(trace: &RefinementTrace) -> Result<Self> {
        let first = &trace.levels[0];
        let hyperbolic = first.manifold() == Manifold::Hyperbolic2;
        let levels = trace
            .levels
            .iter()
            .map(|p| LevelDoc {
                level: p.level(),
                origin: format_rational(p.parameter_origin()),
                points: p.points().iter().map(|q| q.coords().to_vec()).collect(),
                disk: hyperbolic.then(|| {
                    p.points()
                        .iter()
                        .map(|q| q.to_disk().expect("hyperbolic point"))
                        .collect()
                }),
            })
            .collect();
        Ok(TraceDoc {
            manifold: first.manifold().to_string(),
            closed: first.is_closed(),
            dilation: trace.dilation(),
            mask: MaskDoc::from(&trace.mask),
            gamma: format_rational(&trace.gamma()?),
            tolerance: trace.tolerance,
            levels,
            diagnostics: diagnostics_doc(trace),
        })
    }

    /// Rebuilds the trace (diagnostics recomputed from the points).
    pub fn to_trace(&self) -> Result<RefinementTrace> {
        let mask = Mask::try_from(self.mask.clone())?;
        if mask.dilation() != self.dilation {
            return Err(Error::Parse("dilation does not match mask".into()));
        }
        let m: Manifold = self.manifold.parse()?;
        let levels = self
            .levels
            .iter()
            .map(|l| {
                let points = l
                    .points
                    .iter()
                    .map(|c| ManifoldPoint::new(m, c.clone()))
                    .collect::<Result<Vec<_>>>()?;
                Polygon::with_level(points, self.closed, l.level, parse_rational(&l.origin)?)
            })
            .collect::<Result<Vec<_>>>()?;
        RefinementTrace::from_levels(mask, self.tolerance, levels)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CylinderLevelDoc {
    pub points: Vec<CylinderPointDoc>,
    pub out_of_strip: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CylinderTraceDoc {
    pub manifold: String,
    pub dilation: u32,
    pub mask: MaskDoc,
    pub winding: Vec<i64>,
    pub levels: Vec<CylinderLevelDoc>,
}

impl CylinderTraceDoc {
    pub fn new(mask: &Mask, path: &LiftedPath, levels: &[CylinderLevel]) -> Self {
        CylinderTraceDoc {
            manifold: "cylinder".into(),
            dilation: mask.dilation(),
            mask: MaskDoc::from(mask),
            winding: path.winding.clone(),
            levels: levels
                .iter()
                .map(|l| CylinderLevelDoc {
                    points: l
                        .points
                        .iter()
                        .map(|p| CylinderPointDoc {
                            angle: p.angle(),
                            height: p.height(),
                        })
                        .collect(),
                    out_of_strip: l.out_of_strip.clone(),
                })
                .collect(),
        }
    }
}
