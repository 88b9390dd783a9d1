//! JSON instance files: one document per instance.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ofl_core::mechanisms::DualRule;
use ofl_core::spaces::SpaceKind;
use ofl_core::welfare::{Preference, WelfareModel};
use ofl_core::{Instance, LocationProfile, MechanismConfig, Point, Space, TreeGraph, TreePoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "ModelSpec::is_default")]
    pub model: ModelSpec,
    pub agents: Vec<AgentSpec>,
    pub prediction: LocationSpec,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_rule: Option<RuleSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub kind: KindSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    /// `[u, v, length]` triples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindSpec {
    Segment,
    Square,
    Circle,
    Tree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSpec {
    #[default]
    Obnoxious,
    Dual,
}

impl ModelSpec {
    fn is_default(&self) -> bool {
        *self == ModelSpec::Obnoxious
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleSpec {
    AsWritten,
    PredictionFavoring,
}

impl From<RuleSpec> for DualRule {
    fn from(r: RuleSpec) -> Self {
        match r {
            RuleSpec::AsWritten => DualRule::AsWritten,
            RuleSpec::PredictionFavoring => DualRule::PredictionFavoring,
        }
    }
}

impl From<DualRule> for RuleSpec {
    fn from(r: DualRule) -> Self {
        match r {
            DualRule::AsWritten => RuleSpec::AsWritten,
            DualRule::PredictionFavoring => RuleSpec::PredictionFavoring,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub location: LocationSpec,
    /// 0 for facility-averse, 1 for facility-attracted; dual model only.
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub preference: Option<u8>,
}

/// A number on the segment or circle, `[x, y]` in the square, or a tree point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocationSpec {
    Scalar(f64),
    Pair([f64; 2]),
    Vertex(VertexRef),
    Edge(EdgeRef),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRef {
    pub vertex: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRef {
    pub edge: usize,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() || self.path == "." {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for SchemaError {}

fn schema_error(path: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError {
        path: path.into(),
        message: message.into(),
    }
}

impl From<&Point> for LocationSpec {
    fn from(p: &Point) -> Self {
        match p {
            Point::Segment(x) | Point::Circle(x) => LocationSpec::Scalar(*x),
            Point::Square(xy) => LocationSpec::Pair(*xy),
            Point::Tree(TreePoint::Vertex(v)) => LocationSpec::Vertex(VertexRef { vertex: *v }),
            Point::Tree(TreePoint::Edge { edge, offset }) => LocationSpec::Edge(EdgeRef {
                edge: *edge,
                offset: *offset,
            }),
        }
    }
}

impl LocationSpec {
    pub fn to_point(&self, kind: SpaceKind, path: &str) -> Result<Point, SchemaError> {
        match (kind, self) {
            (SpaceKind::Segment, LocationSpec::Scalar(x)) => Ok(Point::Segment(*x)),
            (SpaceKind::Circle, LocationSpec::Scalar(x)) => Ok(Point::Circle(*x)),
            (SpaceKind::Square, LocationSpec::Pair(xy)) => Ok(Point::Square(*xy)),
            (SpaceKind::Tree, LocationSpec::Vertex(v)) => Ok(Point::Tree(TreePoint::Vertex(v.vertex))),
            (SpaceKind::Tree, LocationSpec::Edge(e)) => Ok(Point::Tree(TreePoint::Edge {
                edge: e.edge,
                offset: e.offset,
            })),
            _ => {
                let expected = match kind {
                    SpaceKind::Segment | SpaceKind::Circle => "a number",
                    SpaceKind::Square => "a pair [x, y]",
                    SpaceKind::Tree => "{\"vertex\": v} or {\"edge\": e, \"offset\": t}",
                };
                Err(schema_error(path, format!("expected {expected} for a {kind} location")))
            }
        }
    }
}

/// Parses a document, reporting the offending field path and line on failure.
pub fn parse(text: &str) -> Result<InstanceFile, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| schema_error(e.path().to_string(), e.inner().to_string()))
}

/// A validated instance with the mechanism settings stored beside it.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedInstance {
    pub instance: Instance,
    pub config: MechanismConfig,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, config: &MechanismConfig) -> Self {
        let space = match &instance.space {
            Space::Segment => SpaceSpec::plain(KindSpec::Segment),
            Space::Square => SpaceSpec::plain(KindSpec::Square),
            Space::Circle => SpaceSpec::plain(KindSpec::Circle),
            Space::Tree(t) => SpaceSpec {
                kind: KindSpec::Tree,
                vertices: Some(t.vertex_count()),
                edges: Some(t.edges().iter().map(|e| (e.u, e.v, e.length)).collect()),
            },
        };
        let model = match instance.model {
            WelfareModel::Obnoxious => ModelSpec::Obnoxious,
            WelfareModel::Dual => ModelSpec::Dual,
        };
        let agents = instance
            .profile
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| AgentSpec {
                location: p.into(),
                preference: instance.profile.type_of(i).map(Preference::bit),
            })
            .collect();
        InstanceFile {
            space,
            model,
            agents,
            prediction: instance.prediction.point().into(),
            lambda: config.lambda(),
            dual_rule: (model == ModelSpec::Dual).then(|| config.dual_rule.into()),
        }
    }

    /// Builds the space, profile and prediction, checking every invariant.
    pub fn load(&self) -> Result<LoadedInstance, SchemaError> {
        let (space, kind) = self.space.build()?;
        let mut points = Vec::with_capacity(self.agents.len());
        let mut types = Vec::new();
        for (i, agent) in self.agents.iter().enumerate() {
            points.push(agent.location.to_point(kind, &format!("agents[{i}].location"))?);
            if let Some(bit) = agent.preference {
                let t = Preference::from_bit(bit).map_err(|e| schema_error(format!("agents[{i}].type"), e.to_string()))?;
                types.push(t);
            }
        }
        let typed = !types.is_empty();
        if typed && types.len() != points.len() {
            return Err(schema_error("agents", "either every agent or no agent carries a type"));
        }
        let model = match self.model {
            ModelSpec::Obnoxious => WelfareModel::Obnoxious,
            ModelSpec::Dual => WelfareModel::Dual,
        };
        if model == WelfareModel::Dual && !typed {
            return Err(schema_error("agents", "the dual model needs a type on every agent"));
        }
        let profile = if typed {
            LocationProfile::with_types(points, types).map_err(|e| schema_error("agents", e.to_string()))?
        } else {
            LocationProfile::new(points)
        };
        let prediction = self.prediction.to_point(kind, "prediction")?;
        let instance = Instance::new(space, profile, prediction, model).map_err(|e| schema_error("", e.to_string()))?;
        let config = MechanismConfig::new(self.lambda)
            .map_err(|e| schema_error("lambda", e.to_string()))?
            .with_dual_rule(self.dual_rule.map_or(DualRule::default(), DualRule::from));
        Ok(LoadedInstance { instance, config })
    }

    /// Compact JSON; field order is fixed, so equal instances serialize identically.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("instance files always serialize")
    }

    /// Hex SHA-256 of the canonical JSON.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_json().as_bytes()))
    }
}

impl SpaceSpec {
    fn plain(kind: KindSpec) -> Self {
        SpaceSpec {
            kind,
            vertices: None,
            edges: None,
        }
    }

    fn build(&self) -> Result<(Space, SpaceKind), SchemaError> {
        let tree_fields = self.vertices.is_some() || self.edges.is_some();
        let plain = |space, kind: SpaceKind| {
            if tree_fields {
                Err(schema_error("space", format!("a {kind} takes no vertices or edges")))
            } else {
                Ok((space, kind))
            }
        };
        match self.kind {
            KindSpec::Segment => plain(Space::Segment, SpaceKind::Segment),
            KindSpec::Square => plain(Space::Square, SpaceKind::Square),
            KindSpec::Circle => plain(Space::Circle, SpaceKind::Circle),
            KindSpec::Tree => {
                let vertices = self
                    .vertices
                    .ok_or_else(|| schema_error("space.vertices", "required for a tree"))?;
                let edges = self.edges.clone().unwrap_or_default();
                let tree = TreeGraph::new(vertices, edges).map_err(|e| schema_error("space.edges", e.to_string()))?;
                Ok((Space::Tree(tree), SpaceKind::Tree))
            }
        }
    }
}
