use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mechanisms::Instance;
use crate::spaces::{Point, Space, SpaceKind, TreeGraph, TreePoint};
use crate::welfare::{optimal_location, LocationProfile, Preference, WelfareModel};

/// A space together with the welfare model its instances use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    Segment,
    Square,
    Circle,
    Tree,
    /// Segment with typed agents under dual welfare.
    Dual,
}

impl Setting {
    pub const ALL: [Setting; 5] = [
        Setting::Segment,
        Setting::Square,
        Setting::Circle,
        Setting::Tree,
        Setting::Dual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Setting::Segment => "segment",
            Setting::Square => "square",
            Setting::Circle => "circle",
            Setting::Tree => "tree",
            Setting::Dual => "dual",
        }
    }

    pub fn space_kind(self) -> SpaceKind {
        match self {
            Setting::Segment | Setting::Dual => SpaceKind::Segment,
            Setting::Square => SpaceKind::Square,
            Setting::Circle => SpaceKind::Circle,
            Setting::Tree => SpaceKind::Tree,
        }
    }

    pub fn model(self) -> WelfareModel {
        match self {
            Setting::Dual => WelfareModel::Dual,
            _ => WelfareModel::Obnoxious,
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Setting::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown setting `{s}`")))
    }
}

/// Size limits for random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    /// Agents per instance are drawn from `1..=max_agents`.
    pub max_agents: usize,
    /// Tree vertex counts are drawn from `2..=max_vertices`.
    pub max_vertices: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_agents: 7,
            max_vertices: 20,
        }
    }
}

/// Independent generator for work item `index`: one seed, one stream per item.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Half the draws land on multiples of 1/8 so that ties and midpoints are exercised.
pub(crate) fn coordinate<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        f64::from(rng.gen_range(0..=8u8)) / 8.0
    } else {
        rng.gen::<f64>()
    }
}

fn bit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    f64::from(u8::from(rng.gen_bool(0.5)))
}

pub(crate) fn random_tree<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize) -> TreeGraph<f64> {
    let vertices = rng.gen_range(2..=max_vertices.max(2));
    let edges = (1..vertices).map(|v| {
        let length = if rng.gen_bool(0.5) {
            f64::from(rng.gen_range(1..=8u8)) / 4.0
        } else {
            rng.gen_range(0.1..=2.0)
        };
        (rng.gen_range(0..v), v, length)
    });
    TreeGraph::new(vertices, edges.collect::<Vec<_>>()).expect("random attachment builds a tree")
}

/// A uniformly chosen vertex or edge-interior point.
pub(crate) fn random_tree_point<R: Rng + ?Sized>(rng: &mut R, tree: &TreeGraph<f64>) -> TreePoint<f64> {
    if rng.gen_bool(0.4) {
        return TreePoint::Vertex(rng.gen_range(0..tree.vertex_count()));
    }
    let edge = rng.gen_range(0..tree.edges().len());
    let length = tree.edges()[edge].length;
    let fraction = match rng.gen_range(0..3u8) {
        0 => 0.5,
        1 => f64::from(rng.gen_range(1..8u8)) / 8.0,
        _ => rng.gen_range(0.01..0.99),
    };
    TreePoint::Edge {
        edge,
        offset: length * fraction,
    }
}

pub(crate) fn random_point<R: Rng + ?Sized>(rng: &mut R, space: &Space<f64>) -> Point<f64> {
    match space {
        Space::Segment => Point::Segment(coordinate(rng)),
        Space::Square => Point::Square([coordinate(rng), coordinate(rng)]),
        Space::Circle => Point::Circle(coordinate(rng) % 1.0),
        Space::Tree(tree) => Point::Tree(random_tree_point(rng, tree)),
    }
}

/// Vertices that are endpoints of some diameter.
pub(crate) fn peripheral_vertices(tree: &TreeGraph<f64>) -> Vec<usize> {
    (0..tree.vertex_count())
        .filter(|&v| tree.is_peripheral(&TreePoint::Vertex(v), 1e-9).unwrap_or(false))
        .collect()
}

/// Every admissible prediction of a finite output set; the circle's is drawn at random.
pub(crate) fn random_prediction<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Space<f64>,
    profile: &LocationProfile<f64>,
    model: WelfareModel,
) -> Point<f64> {
    match space {
        Space::Segment => Point::Segment(bit(rng)),
        Space::Square => Point::Square([bit(rng), bit(rng)]),
        Space::Circle => match rng.gen_range(0..3u8) {
            0 => Point::Circle(rng.gen::<f64>()),
            1 => Point::Circle(f64::from(rng.gen_range(0..8u8)) / 8.0),
            _ => optimal_location(space, profile, model).expect("valid profile").0,
        },
        Space::Tree(tree) => {
            let peripheral = peripheral_vertices(tree);
            if rng.gen_bool(1.0 / 3.0) {
                if let Ok((Point::Tree(TreePoint::Vertex(v)), _)) = optimal_location(space, profile, model) {
                    if peripheral.contains(&v) {
                        return Point::Tree(TreePoint::Vertex(v));
                    }
                }
            }
            let v = *peripheral.choose(rng).expect("every tree has a diameter");
            Point::Tree(TreePoint::Vertex(v))
        }
    }
}

/// One random instance of `setting`; tree predictions are always peripheral vertices.
pub fn random_instance<R: Rng + ?Sized>(setting: Setting, rng: &mut R, gen: &GeneratorConfig) -> Instance<f64> {
    let space = match setting {
        Setting::Segment | Setting::Dual => Space::Segment,
        Setting::Square => Space::Square,
        Setting::Circle => Space::Circle,
        Setting::Tree => Space::Tree(random_tree(rng, gen.max_vertices)),
    };
    let n = rng.gen_range(1..=gen.max_agents.max(1));
    let points: Vec<_> = (0..n).map(|_| random_point(rng, &space)).collect();
    let profile = match setting {
        Setting::Dual => {
            let types = (0..n)
                .map(|_| if rng.gen_bool(0.5) { Preference::Attracted } else { Preference::Averse })
                .collect();
            LocationProfile::with_types(points, types).expect("one type per agent")
        }
        _ => LocationProfile::new(points),
    };
    let model = setting.model();
    let prediction = random_prediction(rng, &space, &profile, model);
    Instance::new(space, profile, prediction, model).expect("generated instances are valid")
}

/// `count` instances; item `i` is drawn from `item_rng(seed, i)`.
pub fn corpus(setting: Setting, count: usize, seed: u64, gen: &GeneratorConfig) -> Vec<Instance<f64>> {
    (0..count)
        .map(|i| random_instance(setting, &mut item_rng(seed, i as u64), gen))
        .collect()
}
