//! Metric spaces: the unit segment, the unit square, the unit circle and finite trees.

mod tree;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

pub use tree::{DistanceTable, EdgeSpan, MidpointSplit, TreeEdge, TreeGraph, TreePoint};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceKind {
    Segment,
    Square,
    Circle,
    Tree,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 4] = [SpaceKind::Segment, SpaceKind::Square, SpaceKind::Circle, SpaceKind::Tree];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Segment => "segment",
            SpaceKind::Square => "square",
            SpaceKind::Circle => "circle",
            SpaceKind::Tree => "tree",
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpaceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown space kind `{s}`")))
    }
}

/// The metric space an instance lives in.
#[derive(Debug, Clone, PartialEq)]
pub enum Space<S> {
    /// `[0, 1]` with the absolute-difference metric.
    Segment,
    /// `[0, 1]²` with the Euclidean metric.
    Square,
    /// `[0, 1)` with `0` and `1` identified; distances wrap around.
    Circle,
    Tree(TreeGraph<S>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point<S> {
    Segment(S),
    Square([S; 2]),
    Circle(S),
    Tree(TreePoint<S>),
}

impl<S: fmt::Display> fmt::Display for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Segment(x) | Point::Circle(x) => write!(f, "{x}"),
            Point::Square([x, y]) => write!(f, "({x}, {y})"),
            Point::Tree(p) => write!(f, "{p}"),
        }
    }
}

impl<S: Scalar> Point<S> {
    pub fn kind(&self) -> SpaceKind {
        match self {
            Point::Segment(_) => SpaceKind::Segment,
            Point::Square(_) => SpaceKind::Square,
            Point::Circle(_) => SpaceKind::Circle,
            Point::Tree(_) => SpaceKind::Tree,
        }
    }

    /// Total order used for deterministic tie-breaking among candidate locations.
    ///
    /// Tree vertices precede edge-interior points; points of different kinds order by kind.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        fn cmp<S: PartialOrd>(a: &S, b: &S) -> Ordering {
            a.partial_cmp(b).unwrap_or(Ordering::Equal)
        }
        match (self, other) {
            (Point::Segment(a), Point::Segment(b)) | (Point::Circle(a), Point::Circle(b)) => cmp(a, b),
            (Point::Square(a), Point::Square(b)) => cmp(&a[0], &b[0]).then_with(|| cmp(&a[1], &b[1])),
            (Point::Tree(a), Point::Tree(b)) => match (a, b) {
                (TreePoint::Vertex(x), TreePoint::Vertex(y)) => x.cmp(y),
                (TreePoint::Vertex(_), TreePoint::Edge { .. }) => Ordering::Less,
                (TreePoint::Edge { .. }, TreePoint::Vertex(_)) => Ordering::Greater,
                (TreePoint::Edge { edge: e, offset: o }, TreePoint::Edge { edge: f, offset: p }) => {
                    e.cmp(f).then_with(|| cmp(o, p))
                }
            },
            _ => self.kind().cmp(&other.kind()),
        }
    }
}

fn in_unit<S: Scalar>(x: S) -> bool {
    x.is_finite_value() && x >= S::zero() && x <= S::one()
}

impl<S: Scalar> Space<S> {
    pub fn kind(&self) -> SpaceKind {
        match self {
            Space::Segment => SpaceKind::Segment,
            Space::Square => SpaceKind::Square,
            Space::Circle => SpaceKind::Circle,
            Space::Tree(_) => SpaceKind::Tree,
        }
    }

    pub fn tree(&self) -> Option<&TreeGraph<S>> {
        match self {
            Space::Tree(t) => Some(t),
            _ => None,
        }
    }

    fn outside(&self, p: &Point<S>) -> Error {
        Error::OutOfSpace {
            point: p.to_string(),
            space: self.kind(),
        }
    }

    /// Validates `p` against the space and returns its canonical form.
    ///
    /// Circle coordinates are reduced modulo 1; tree edge endpoints become vertices.
    pub fn canonicalize(&self, p: &Point<S>) -> Result<Point<S>> {
        match (self, p) {
            (Space::Segment, Point::Segment(x)) if in_unit(*x) => Ok(*p),
            (Space::Square, Point::Square([x, y])) if in_unit(*x) && in_unit(*y) => Ok(*p),
            (Space::Circle, Point::Circle(x)) if x.is_finite_value() => Ok(Point::Circle(*x - x.floor())),
            (Space::Tree(t), Point::Tree(q)) => t.canonicalize(q).map(Point::Tree),
            _ => Err(self.outside(p)),
        }
    }

    pub fn contains(&self, p: &Point<S>) -> bool {
        self.canonicalize(p).is_ok()
    }

    pub fn distance(&self, p: &Point<S>, q: &Point<S>) -> Result<S> {
        let p = self.canonicalize(p)?;
        let q = self.canonicalize(q)?;
        match (self, p, q) {
            (Space::Segment, Point::Segment(x), Point::Segment(y)) => Ok((x - y).abs()),
            (Space::Square, Point::Square(a), Point::Square(b)) => {
                let dx = a[0] - b[0];
                let dy = a[1] - b[1];
                (dx * dx + dy * dy)
                    .checked_sqrt()
                    .ok_or(Error::Inexact("Euclidean distance"))
            }
            (Space::Circle, Point::Circle(x), Point::Circle(y)) => {
                let d = (x - y).abs();
                Ok(d.min_of(S::one() - d))
            }
            (Space::Tree(t), Point::Tree(a), Point::Tree(b)) => t.distance(&a, &b),
            _ => unreachable!("canonicalize checked both points"),
        }
    }
}
