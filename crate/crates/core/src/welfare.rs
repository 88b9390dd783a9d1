//! Social welfare, exact optimal locations, and a grid oracle for cross-checking them.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{DistanceTable, Point, Space, SpaceKind, TreePoint};

/// Agent type in the dual-preference setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preference {
    /// Type 0: wants the facility far away.
    Averse,
    /// Type 1: wants the facility close.
    Attracted,
}

impl Preference {
    pub fn bit(self) -> u8 {
        match self {
            Preference::Averse => 0,
            Preference::Attracted => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Preference::Averse),
            1 => Ok(Preference::Attracted),
            other => Err(Error::domain("type", other, "{0, 1}")),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Preference::Averse => Preference::Attracted,
            Preference::Attracted => Preference::Averse,
        }
    }
}

/// Reported agent locations, with optional dual-preference types.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationProfile<S> {
    pub points: Vec<Point<S>>,
    pub types: Option<Vec<Preference>>,
}

impl<S> LocationProfile<S> {
    pub fn new(points: Vec<Point<S>>) -> Self {
        LocationProfile { points, types: None }
    }

    pub fn with_types(points: Vec<Point<S>>, types: Vec<Preference>) -> Result<Self> {
        if points.len() != types.len() {
            return Err(Error::Contract(format!(
                "{} locations but {} types",
                points.len(),
                types.len()
            )));
        }
        Ok(LocationProfile {
            points,
            types: Some(types),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn type_of(&self, agent: usize) -> Option<Preference> {
        self.types.as_ref().map(|t| t[agent])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WelfareModel {
    /// Every agent's utility is its distance to the facility.
    #[default]
    Obnoxious,
    /// Type-1 agents get `1 - d`, type-0 agents get `d`; segment only.
    Dual,
}

/// Checks that `profile` and `model` fit together and every point lies in `space`.
pub fn validate<S: Scalar>(space: &Space<S>, profile: &LocationProfile<S>, model: WelfareModel) -> Result<()> {
    if let Some(types) = &profile.types {
        if types.len() != profile.points.len() {
            return Err(Error::Contract("type list and location list differ in length".into()));
        }
    }
    if model == WelfareModel::Dual {
        if profile.types.is_none() {
            return Err(Error::Contract("dual welfare needs agent types".into()));
        }
        if space.kind() != SpaceKind::Segment {
            return Err(Error::Contract(format!("dual welfare is defined on the segment, not the {}", space.kind())));
        }
    }
    for p in &profile.points {
        space.canonicalize(p)?;
    }
    Ok(())
}

/// Welfare evaluator with per-agent distance tables cached on trees.
pub struct WelfareEvaluator<'a, S> {
    space: &'a Space<S>,
    points: Vec<Point<S>>,
    types: Option<&'a [Preference]>,
    model: WelfareModel,
    tables: Vec<DistanceTable<S>>,
}

impl<'a, S: Scalar> WelfareEvaluator<'a, S> {
    pub fn new(space: &'a Space<S>, profile: &'a LocationProfile<S>, model: WelfareModel) -> Result<Self> {
        validate(space, profile, model)?;
        let points = profile
            .points
            .iter()
            .map(|p| space.canonicalize(p))
            .collect::<Result<Vec<_>>>()?;
        let tables = match space {
            Space::Tree(tree) => points
                .iter()
                .map(|p| match p {
                    Point::Tree(q) => tree.distance_table(q),
                    _ => unreachable!("validated tree points"),
                })
                .collect(),
            _ => Vec::new(),
        };
        Ok(WelfareEvaluator {
            space,
            points,
            types: profile.types.as_deref(),
            model,
            tables,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.points.len()
    }

    /// Distance from agent `i` to a canonical point `y`.
    fn distance(&self, i: usize, y: &Point<S>) -> Result<S> {
        match (self.space, y) {
            (Space::Tree(tree), Point::Tree(q)) => Ok(self.tables[i].to_point(tree, q)),
            _ => self.space.distance(&self.points[i], y),
        }
    }

    pub fn welfare(&self, y: &Point<S>) -> Result<S> {
        let y = self.space.canonicalize(y)?;
        let mut total = S::zero();
        for i in 0..self.points.len() {
            let d = self.distance(i, &y)?;
            let attracted = self.model == WelfareModel::Dual
                && self.types.map(|t| t[i]) == Some(Preference::Attracted);
            total = total + if attracted { S::one() - d } else { d };
        }
        Ok(total)
    }
}

pub fn social_welfare<S: Scalar>(
    space: &Space<S>,
    profile: &LocationProfile<S>,
    model: WelfareModel,
    y: &Point<S>,
) -> Result<S> {
    WelfareEvaluator::new(space, profile, model)?.welfare(y)
}

/// Candidate set on which the welfare maximum is attained, sorted and deduplicated.
pub fn candidates<S: Scalar>(space: &Space<S>, profile: &LocationProfile<S>, model: WelfareModel) -> Result<Vec<Point<S>>> {
    validate(space, profile, model)?;
    let (zero, one) = (S::zero(), S::one());
    let mut out = match (space, model) {
        (Space::Segment, WelfareModel::Dual) => {
            let mut c = vec![Point::Segment(zero), Point::Segment(one)];
            c.extend(profile.points.iter().copied());
            c
        }
        (Space::Segment, _) => vec![Point::Segment(zero), Point::Segment(one)],
        (Space::Square, _) => vec![
            Point::Square([zero, zero]),
            Point::Square([zero, one]),
            Point::Square([one, zero]),
            Point::Square([one, one]),
        ],
        (Space::Circle, _) => {
            let mut c = Vec::with_capacity(2 * profile.len());
            for p in &profile.points {
                if let Point::Circle(x) = space.canonicalize(p)? {
                    c.push(Point::Circle(x));
                    c.push(space.canonicalize(&Point::Circle(x + S::half()))?);
                }
            }
            if c.is_empty() {
                c.push(Point::Circle(zero));
            }
            c
        }
        (Space::Tree(tree), _) => tree
            .leaves()
            .into_iter()
            .map(|v| Point::Tree(TreePoint::Vertex(v)))
            .collect(),
    };
    out.sort_by(|a, b| a.lex_cmp(b));
    out.dedup();
    Ok(out)
}

/// Welfare-maximising location over the exact candidate set; ties go to the smallest candidate.
pub fn optimal_location<S: Scalar>(
    space: &Space<S>,
    profile: &LocationProfile<S>,
    model: WelfareModel,
) -> Result<(Point<S>, S)> {
    let evaluator = WelfareEvaluator::new(space, profile, model)?;
    let mut best: Option<(Point<S>, S)> = None;
    for c in candidates(space, profile, model)? {
        let w = evaluator.welfare(&c)?;
        if best.as_ref().is_none_or(|(_, b)| w > *b) {
            best = Some((c, w));
        }
    }
    Ok(best.expect("candidate sets are never empty"))
}

/// Best point of a uniform grid with `resolution` steps per segment, axis or tree edge.
///
/// Each welfare term is 1-Lipschitz along geodesics, so the result is within
/// `n · h / 2` of the true optimum for grid step `h`. On the square the lattice
/// is searched by branch and bound with Lipschitz bounds; the result is still
/// the exact lattice maximum.
pub fn grid_oracle<S: Scalar>(
    space: &Space<S>,
    profile: &LocationProfile<S>,
    model: WelfareModel,
    resolution: usize,
) -> Result<(Point<S>, S)> {
    if resolution < 2 {
        return Err(Error::domain("resolution", resolution, "m >= 2"));
    }
    let evaluator = WelfareEvaluator::new(space, profile, model)?;
    let m = S::count(resolution);
    let step = |i: usize| S::count(i) / m;
    let mut best: Option<(Point<S>, S)> = None;
    let mut offer = |p: Point<S>| -> Result<()> {
        let w = evaluator.welfare(&p)?;
        if best.as_ref().is_none_or(|(_, b)| w > *b) {
            best = Some((p, w));
        }
        Ok(())
    };
    match space {
        Space::Segment => (0..=resolution).try_for_each(|i| offer(Point::Segment(step(i))))?,
        Space::Circle => (0..resolution).try_for_each(|i| offer(Point::Circle(step(i))))?,
        Space::Tree(tree) => {
            for (edge, e) in tree.edges().iter().enumerate() {
                for i in 0..=resolution {
                    offer(Point::Tree(TreePoint::Edge {
                        edge,
                        offset: e.length * step(i),
                    }))?;
                }
            }
            if tree.edges().is_empty() {
                offer(Point::Tree(TreePoint::Vertex(0)))?;
            }
        }
        Space::Square => return square_lattice_max(&evaluator, resolution),
    }
    Ok(best.expect("grids are never empty"))
}

#[derive(Clone, Copy)]
struct Cell {
    x: (usize, usize),
    y: (usize, usize),
}

fn square_lattice_max<S: Scalar>(evaluator: &WelfareEvaluator<'_, S>, resolution: usize) -> Result<(Point<S>, S)> {
    let m = S::count(resolution);
    let coord = |i: usize| S::count(i) / m;
    let lipschitz = S::count(evaluator.agent_count());
    let two = S::one() + S::one();
    // Upper bound on welfare over the cell: value at the centre plus n times an L1 radius.
    let bound = |c: Cell| -> Result<(Point<S>, S)> {
        let (x0, x1) = (coord(c.x.0), coord(c.x.1));
        let (y0, y1) = (coord(c.y.0), coord(c.y.1));
        let center = Point::Square([(x0 + x1) / two, (y0 + y1) / two]);
        let radius = (x1 - x0) / two + (y1 - y0) / two;
        Ok((center, evaluator.welfare(&center)? + lipschitz * radius))
    };
    let root = Cell {
        x: (0, resolution),
        y: (0, resolution),
    };
    let mut stack = vec![(root, bound(root)?.1)];
    let mut best: Option<(Point<S>, S)> = None;
    while let Some((cell, upper)) = stack.pop() {
        if let Some((_, b)) = &best {
            if upper <= *b {
                continue;
            }
        }
        if cell.x.0 == cell.x.1 && cell.y.0 == cell.y.1 {
            let p = Point::Square([coord(cell.x.0), coord(cell.y.0)]);
            best = Some((p, upper));
            continue;
        }
        let (first, second) = if cell.x.1 - cell.x.0 >= cell.y.1 - cell.y.0 {
            let mid = (cell.x.0 + cell.x.1) / 2;
            (
                Cell { x: (cell.x.0, mid), ..cell },
                Cell {
                    x: (mid + 1, cell.x.1),
                    ..cell
                },
            )
        } else {
            let mid = (cell.y.0 + cell.y.1) / 2;
            (
                Cell { y: (cell.y.0, mid), ..cell },
                Cell {
                    y: (mid + 1, cell.y.1),
                    ..cell
                },
            )
        };
        let (b1, b2) = (bound(first)?.1, bound(second)?.1);
        if b1 > b2 {
            stack.push((second, b2));
            stack.push((first, b1));
        } else {
            stack.push((first, b1));
            stack.push((second, b2));
        }
    }
    Ok(best.expect("the lattice is never empty"))
}
