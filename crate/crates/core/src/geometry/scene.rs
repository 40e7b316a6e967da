use super::curve::{PolarCurve, PolarPreset};
use super::shapes::{preset_trapping_polygon, ObstacleShape, TruncationShape};
use super::Point;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Placement of the radial PML annulus `inner_radius < r < inner_radius + width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmlLayout {
    pub inner_radius: f64,
    pub width: f64,
}

impl PmlLayout {
    pub fn outer_radius(&self) -> f64 {
        self.inner_radius + self.width
    }
}

/// Obstacle, truncation boundary and optional PML annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub obstacle: ObstacleShape,
    pub truncation: TruncationShape,
    pub pml: Option<PmlLayout>,
}

impl Scene {
    pub fn new(
        obstacle: ObstacleShape,
        truncation: TruncationShape,
        pml: Option<PmlLayout>,
    ) -> Result<Self> {
        let scene = Scene {
            obstacle,
            truncation,
            pml,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        self.obstacle.validate()?;
        self.truncation.validate()?;
        let obstacle = self.obstacle.curve();
        let truncation = self.truncation.curve();
        let spacing = 1e-3 * obstacle.length().max(1e-3);
        for s in obstacle.resample(spacing) {
            let p = obstacle.point(s);
            if !truncation.contains(p) {
                return Err(Error::Geometry(format!(
                    "obstacle boundary point ({:.4}, {:.4}) is not inside the truncation boundary",
                    p.x, p.y
                )));
            }
        }
        if let Some(pml) = self.pml {
            if !(pml.width > 0.0) {
                return Err(Error::Geometry(format!("PML width {} must be positive", pml.width)));
            }
            if pml.inner_radius < self.truncation.max_radius() * (1.0 - 1e-12) {
                return Err(Error::Geometry(format!(
                    "PML inner radius {} does not enclose the truncation boundary (max radius {})",
                    pml.inner_radius,
                    self.truncation.max_radius()
                )));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScene = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.into_scene()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&RawScene::from_scene(self)).expect("scene serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    obstacle: RawObstacle,
    truncation: RawTruncation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pml: Option<PmlLayout>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstacle {
    kind: String,
    #[serde(default)]
    params: toml::Table,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruncation {
    kind: String,
    #[serde(rename = "R")]
    r: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    corner_radius: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscParams {
    #[serde(default)]
    center: Point,
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolarParams {
    preset: Option<PolarPreset>,
    rho: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonParams {
    preset: Option<String>,
    vertices: Option<Vec<Point>>,
}

fn params<T: for<'de> Deserialize<'de>>(kind: &str, table: toml::Table) -> Result<T> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| Error::Config(format!("obstacle.params for kind \"{kind}\": {e}")))
}

impl RawScene {
    fn into_scene(self) -> Result<Scene> {
        let kind = self.obstacle.kind.as_str();
        let obstacle = match kind {
            "disc" => {
                let p: DiscParams = params(kind, self.obstacle.params)?;
                ObstacleShape::Disc {
                    center: p.center,
                    radius: p.radius,
                }
            }
            "polar" => {
                let p: PolarParams = params(kind, self.obstacle.params)?;
                match (p.preset, p.rho) {
                    (Some(preset), None) => ObstacleShape::Polar(PolarCurve::from_preset(preset)),
                    (None, Some(rho)) => ObstacleShape::Polar(PolarCurve::tabulated(rho)?),
                    _ => {
                        return Err(Error::Config(
                            "polar obstacle needs exactly one of params.preset or params.rho".into(),
                        ))
                    }
                }
            }
            "polygon" => {
                let p: PolygonParams = params(kind, self.obstacle.params)?;
                match (p.preset.as_deref(), p.vertices) {
                    (Some("trapping"), None) => preset_trapping_polygon(),
                    (Some(other), None) => {
                        return Err(Error::Config(format!("unknown polygon preset \"{other}\"")))
                    }
                    (None, Some(vertices)) => ObstacleShape::Polygon { vertices },
                    _ => {
                        return Err(Error::Config(
                            "polygon obstacle needs exactly one of params.preset or params.vertices"
                                .into(),
                        ))
                    }
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown obstacle.kind \"{other}\" (expected disc, polar or polygon)"
                )))
            }
        };
        let truncation = match self.truncation.kind.as_str() {
            "circle" => {
                if self.truncation.corner_radius != 0.0 {
                    return Err(Error::Config("corner_radius applies to squares only".into()));
                }
                TruncationShape::Circle {
                    radius: self.truncation.r,
                }
            }
            "square" => TruncationShape::Square {
                half_side: self.truncation.r,
                corner_radius: self.truncation.corner_radius,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown truncation.kind \"{other}\" (expected circle or square)"
                )))
            }
        };
        Scene::new(obstacle, truncation, self.pml)
    }

    fn from_scene(scene: &Scene) -> Self {
        let mut table = toml::Table::new();
        let kind = match &scene.obstacle {
            ObstacleShape::Disc { center, radius } => {
                table.insert("center".into(), toml::Value::try_from(center).unwrap());
                table.insert("radius".into(), toml::Value::Float(*radius));
                "disc"
            }
            ObstacleShape::Polar(pc) => {
                match pc.preset() {
                    Some(preset) => {
                        table.insert("preset".into(), toml::Value::try_from(preset).unwrap());
                    }
                    None => {
                        table.insert("rho".into(), toml::Value::try_from(pc.samples()).unwrap());
                    }
                }
                "polar"
            }
            ObstacleShape::Polygon { vertices } => {
                table.insert("vertices".into(), toml::Value::try_from(vertices).unwrap());
                "polygon"
            }
        };
        let truncation = match scene.truncation {
            TruncationShape::Circle { radius } => RawTruncation {
                kind: "circle".into(),
                r: radius,
                corner_radius: 0.0,
            },
            TruncationShape::Square {
                half_side,
                corner_radius,
            } => RawTruncation {
                kind: "square".into(),
                r: half_side,
                corner_radius,
            },
        };
        RawScene {
            obstacle: RawObstacle {
                kind: kind.into(),
                params: table,
            },
            truncation,
            pml: scene.pml,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::preset_butterfly;

    #[test]
    fn toml_round_trip() {
        let scenes = [
            Scene::new(
                ObstacleShape::Disc {
                    center: Point::ORIGIN,
                    radius: 1.0,
                },
                TruncationShape::Circle { radius: 2.0 },
                Some(PmlLayout {
                    inner_radius: 2.0,
                    width: 0.5,
                }),
            )
            .unwrap(),
            Scene::new(
                preset_butterfly(),
                TruncationShape::Square {
                    half_side: 2.0,
                    corner_radius: 0.25,
                },
                None,
            )
            .unwrap(),
            Scene::new(preset_trapping_polygon(), TruncationShape::Circle { radius: 2.0 }, None)
                .unwrap(),
        ];
        for scene in scenes {
            let text = scene.to_toml_string();
            assert_eq!(Scene::from_toml_str(&text).unwrap(), scene, "{text}");
        }
    }

    #[test]
    fn documented_keys_parse() {
        let text = r#"
            [obstacle]
            kind = "polar"
            params = { preset = "butterfly" }

            [truncation]
            kind = "circle"
            R = 2.0

            [pml]
            inner_radius = 2.0
            width = 0.5
        "#;
        let scene = Scene::from_toml_str(text).unwrap();
        assert_eq!(scene.truncation, TruncationShape::Circle { radius: 2.0 });
    }

    #[test]
    fn invalid_scenes_rejected() {
        let unknown = "[obstacle]\nkind = \"blob\"\n[truncation]\nkind = \"circle\"\nR = 2.0\n";
        assert!(matches!(Scene::from_toml_str(unknown), Err(Error::Config(_))));
        let extra = "[obstacle]\nkind = \"disc\"\nparams = { radius = 1.0, colour = 3 }\n[truncation]\nkind = \"circle\"\nR = 2.0\n";
        assert!(Scene::from_toml_str(extra).is_err());
        let outside = "[obstacle]\nkind = \"disc\"\nparams = { radius = 3.0 }\n[truncation]\nkind = \"circle\"\nR = 2.0\n";
        assert!(matches!(Scene::from_toml_str(outside), Err(Error::Geometry(_))));
        let pml = "[obstacle]\nkind = \"disc\"\nparams = { radius = 1.0 }\n[truncation]\nkind = \"square\"\nR = 2.0\n[pml]\ninner_radius = 2.0\nwidth = 0.5\n";
        assert!(Scene::from_toml_str(pml).is_err(), "square corners stick out of the PML disc");
    }
}
