//! Weighted trees and points on their edges.
//!
//! Distances are path sums along the unique route between two points. Every
//! query is answered from a [`DistanceTable`], filled by one depth-first pass
//! from the source point, so no all-pairs storage is kept.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::SpaceKind;

/// A vertex, or a point strictly inside an edge.
///
/// `offset` is measured from the edge's `u` endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreePoint<S> {
    Vertex(usize),
    Edge { edge: usize, offset: S },
}

impl<S: fmt::Display> fmt::Display for TreePoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreePoint::Vertex(v) => write!(f, "v{v}"),
            TreePoint::Edge { edge, offset } => write!(f, "e{edge}@{offset}"),
        }
    }
}

impl<S> TreePoint<S> {
    pub fn vertex(&self) -> Option<usize> {
        match self {
            TreePoint::Vertex(v) => Some(*v),
            TreePoint::Edge { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge<S> {
    pub u: usize,
    pub v: usize,
    pub length: S,
}

/// Portion of one edge traversed by a path, as offsets from the edge's `u` endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSpan<S> {
    pub edge: usize,
    pub from: S,
    pub to: S,
}

impl<S: Scalar> EdgeSpan<S> {
    pub fn length(&self) -> S {
        (self.to - self.from).abs()
    }
}

/// Connected, acyclic graph with positive edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeGraph<S> {
    vertex_count: usize,
    edges: Vec<TreeEdge<S>>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

/// Distances from one source point to every vertex.
#[derive(Debug, Clone)]
pub struct DistanceTable<S> {
    source: TreePoint<S>,
    to_vertex: Vec<S>,
}

/// Outcome of cutting a tree at the midpoint of the path between `a` and `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct MidpointSplit<S> {
    pub midpoint: TreePoint<S>,
    /// Per agent, whether it lies in the component of `a`.
    pub on_a_side: Vec<bool>,
    pub n_a: usize,
    pub n_b: usize,
}

impl<S: Scalar> TreeGraph<S> {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize, S)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::MalformedTree("a tree needs at least one vertex".into()));
        }
        let edges: Vec<TreeEdge<S>> = edges
            .into_iter()
            .map(|(u, v, length)| TreeEdge { u, v, length })
            .collect();
        if edges.len() != vertex_count - 1 {
            return Err(Error::MalformedTree(format!(
                "{} vertices need {} edges, got {}",
                vertex_count,
                vertex_count - 1,
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (id, e) in edges.iter().enumerate() {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::MalformedTree(format!("edge {id} references a missing vertex")));
            }
            if e.u == e.v {
                return Err(Error::MalformedTree(format!("edge {id} is a self-loop")));
            }
            if !(e.length > S::zero()) || !e.length.is_finite_value() {
                return Err(Error::MalformedTree(format!("edge {id} has non-positive length {}", e.length)));
            }
            adjacency[e.u].push((e.v, id));
            adjacency[e.v].push((e.u, id));
        }
        let mut seen = vec![false; vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != vertex_count {
            return Err(Error::MalformedTree("graph is not connected".into()));
        }
        Ok(TreeGraph {
            vertex_count,
            edges,
            adjacency,
        })
    }

    /// Path `0 - 1 - ... - k` with the given edge lengths.
    pub fn path(lengths: &[S]) -> Result<Self> {
        Self::new(lengths.len() + 1, lengths.iter().enumerate().map(|(i, &l)| (i, i + 1, l)))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[TreeEdge<S>] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Vertices of degree at most one. A single-vertex tree is its own leaf.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.vertex_count).filter(|&v| self.degree(v) <= 1).collect()
    }

    /// Validates a point and maps edge endpoints to vertices.
    pub fn canonicalize(&self, p: &TreePoint<S>) -> Result<TreePoint<S>> {
        match *p {
            TreePoint::Vertex(v) if v < self.vertex_count => Ok(*p),
            TreePoint::Edge { edge, offset } if edge < self.edges.len() => {
                let e = self.edges[edge];
                if !offset.is_finite_value() || offset < S::zero() || offset > e.length {
                    return Err(self.outside(p));
                }
                if offset == S::zero() {
                    Ok(TreePoint::Vertex(e.u))
                } else if offset == e.length {
                    Ok(TreePoint::Vertex(e.v))
                } else {
                    Ok(*p)
                }
            }
            _ => Err(self.outside(p)),
        }
    }

    fn outside(&self, p: &TreePoint<S>) -> Error {
        Error::OutOfSpace {
            point: p.to_string(),
            space: SpaceKind::Tree,
        }
    }

    /// Distances from `from` to every vertex. `from` must be canonical.
    pub fn distance_table(&self, from: &TreePoint<S>) -> DistanceTable<S> {
        let mut to_vertex = vec![S::zero(); self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        let mut stack = Vec::with_capacity(self.vertex_count);
        match *from {
            TreePoint::Vertex(v) => stack.push((v, S::zero())),
            TreePoint::Edge { edge, offset } => {
                let e = self.edges[edge];
                stack.push((e.u, offset));
                stack.push((e.v, e.length - offset));
            }
        }
        for &(x, _) in &stack {
            seen[x] = true;
        }
        while let Some((x, d)) = stack.pop() {
            to_vertex[x] = d;
            for &(y, e) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push((y, d + self.edges[e].length));
                }
            }
        }
        DistanceTable {
            source: *from,
            to_vertex,
        }
    }

    pub fn distance(&self, p: &TreePoint<S>, q: &TreePoint<S>) -> Result<S> {
        let p = self.canonicalize(p)?;
        let q = self.canonicalize(q)?;
        // A fixed source choice keeps the result bitwise symmetric under floating point.
        let (from, to) = if source_first(&p, &q) { (p, q) } else { (q, p) };
        Ok(self.distance_table(&from).to_point(self, &to))
    }

    /// Offset of `p` along edge `edge` when `p` lies on that closed edge.
    fn offset_on(&self, p: &TreePoint<S>, edge: usize) -> Option<S> {
        let e = self.edges[edge];
        match *p {
            TreePoint::Vertex(v) if v == e.u => Some(S::zero()),
            TreePoint::Vertex(v) if v == e.v => Some(e.length),
            TreePoint::Edge { edge: id, offset } if id == edge => Some(offset),
            _ => None,
        }
    }

    fn vertex_offset(&self, v: usize, edge: usize) -> S {
        let e = self.edges[edge];
        if e.u == v {
            S::zero()
        } else {
            e.length
        }
    }

    /// Parent vertex and connecting edge of every vertex, for the tree rooted at `root`.
    fn parents(&self, root: usize) -> Vec<Option<(usize, usize)>> {
        let mut parent = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &(y, e) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, e));
                    stack.push(y);
                }
            }
        }
        parent
    }

    /// The unique path from `a` to `b` as a sequence of edge spans.
    pub fn path_spans(&self, a: &TreePoint<S>, b: &TreePoint<S>) -> Result<Vec<EdgeSpan<S>>> {
        let a = self.canonicalize(a)?;
        let b = self.canonicalize(b)?;
        if a == b {
            return Ok(Vec::new());
        }
        if let TreePoint::Edge { edge, offset } = a {
            if let Some(to) = self.offset_on(&b, edge) {
                return Ok(vec![EdgeSpan { edge, from: offset, to }]);
            }
        }
        if let TreePoint::Edge { edge, offset } = b {
            if let Some(from) = self.offset_on(&a, edge) {
                return Ok(vec![EdgeSpan { edge, from, to: offset }]);
            }
        }

        let root = match b {
            TreePoint::Vertex(v) => v,
            TreePoint::Edge { edge, .. } => self.edges[edge].u,
        };
        let parent = self.parents(root);
        let mut spans = Vec::new();
        let mut current = match a {
            TreePoint::Vertex(v) => v,
            TreePoint::Edge { edge, offset } => {
                let e = self.edges[edge];
                let up = if parent[e.u] == Some((e.v, edge)) { e.v } else { e.u };
                spans.push(EdgeSpan {
                    edge,
                    from: offset,
                    to: self.vertex_offset(up, edge),
                });
                up
            }
        };
        loop {
            if let TreePoint::Edge { edge, offset } = b {
                let e = self.edges[edge];
                if current == e.v || current == e.u {
                    spans.push(EdgeSpan {
                        edge,
                        from: self.vertex_offset(current, edge),
                        to: offset,
                    });
                    break;
                }
            } else if current == root {
                break;
            }
            let (next, edge) = parent[current].expect("walk reaches the root");
            spans.push(EdgeSpan {
                edge,
                from: self.vertex_offset(current, edge),
                to: self.vertex_offset(next, edge),
            });
            current = next;
        }
        Ok(spans)
    }

    /// The point `w` on the `a`–`b` path with `d(a, w) = t · d(a, b)`.
    pub fn path_point(&self, a: &TreePoint<S>, b: &TreePoint<S>, t: S) -> Result<TreePoint<S>> {
        if !(t >= S::zero() && t <= S::one()) {
            return Err(Error::domain("t", t, "[0, 1]"));
        }
        let spans = self.path_spans(a, b)?;
        if t == S::zero() {
            return self.canonicalize(a);
        }
        if t == S::one() {
            return self.canonicalize(b);
        }
        let total = spans.iter().fold(S::zero(), |acc, s| acc + s.length());
        let target = t * total;
        let mut walked = S::zero();
        for span in &spans {
            let len = span.length();
            if len > S::zero() && target <= walked + len {
                let along = target - walked;
                let offset = if span.to >= span.from {
                    span.from + along
                } else {
                    span.from - along
                };
                let length = self.edges[span.edge].length;
                let offset = offset.max_of(S::zero()).min_of(length);
                return self.canonicalize(&TreePoint::Edge {
                    edge: span.edge,
                    offset,
                });
            }
            walked = walked + len;
        }
        self.canonicalize(b)
    }

    /// Farthest vertex from `from`; `prefer` wins any tie it takes part in, then the smallest id.
    pub fn farthest(&self, from: &TreePoint<S>, prefer: Option<&TreePoint<S>>) -> Result<(TreePoint<S>, S)> {
        let from = self.canonicalize(from)?;
        Ok(self.farthest_in(&self.distance_table(&from), prefer))
    }

    pub(crate) fn farthest_in(&self, table: &DistanceTable<S>, prefer: Option<&TreePoint<S>>) -> (TreePoint<S>, S) {
        let distances = table.vertices();
        let max = distances.iter().fold(S::zero(), |m, &d| m.max_of(d));
        let cutoff = max - S::tie_tolerance();
        if let Some(&TreePoint::Vertex(p)) = prefer {
            if p < self.vertex_count && distances[p] >= cutoff {
                return (TreePoint::Vertex(p), distances[p]);
            }
        }
        let v = (0..self.vertex_count)
            .find(|&v| distances[v] >= cutoff)
            .expect("the maximum is attained");
        (TreePoint::Vertex(v), distances[v])
    }

    /// Endpoints and length of a diameter, found by a double sweep from vertex 0.
    pub fn diameter(&self) -> (usize, usize, S) {
        let (first, _) = self.farthest_in(&self.distance_table(&TreePoint::Vertex(0)), None);
        let (second, length) = self.farthest_in(&self.distance_table(&first), None);
        let first = first.vertex().expect("farthest returns vertices");
        let second = second.vertex().expect("farthest returns vertices");
        (first, second, length)
    }

    /// Whether `v` is an endpoint of some diameter, up to `tol`.
    pub fn is_peripheral(&self, v: &TreePoint<S>, tol: S) -> Result<bool> {
        let v = self.canonicalize(v)?;
        if v.vertex().is_none() {
            return Err(Error::Contract(format!("peripheral test needs a vertex, got {v}")));
        }
        let (_, _, diameter) = self.diameter();
        let table = self.distance_table(&v);
        let eccentricity = table.vertices().iter().fold(S::zero(), |m, &d| m.max_of(d));
        Ok(eccentricity >= diameter - tol)
    }

    /// Splits the agents by the component of `a` after cutting at the `a`–`b` midpoint.
    ///
    /// The midpoint itself belongs to the `b` side.
    pub fn split_at_midpoint(
        &self,
        agents: &[TreePoint<S>],
        a: &TreePoint<S>,
        b: &TreePoint<S>,
    ) -> Result<MidpointSplit<S>> {
        let a = self.canonicalize(a)?;
        let b = self.canonicalize(b)?;
        let from_a = self.distance_table(&a);
        let length = from_a.to_point(self, &b);
        if a == b || !(length > S::tie_tolerance()) {
            return Err(Error::DegenerateSplit);
        }
        let midpoint = self.path_point(&a, &b, S::half())?;
        self.split_with_tables(agents, &a, &midpoint, &from_a)
    }

    pub(crate) fn split_with_tables(
        &self,
        agents: &[TreePoint<S>],
        a: &TreePoint<S>,
        midpoint: &TreePoint<S>,
        from_a: &DistanceTable<S>,
    ) -> Result<MidpointSplit<S>> {
        let from_m = self.distance_table(midpoint);
        let half = from_m.to_point(self, a);
        let tol = S::tie_tolerance();
        let mut on_a_side = Vec::with_capacity(agents.len());
        for agent in agents {
            let x = self.canonicalize(agent)?;
            // The midpoint separates x from a exactly when it lies on their path.
            let detour = from_m.to_point(self, &x) + half - from_a.to_point(self, &x);
            on_a_side.push(detour > tol);
        }
        let n_a = on_a_side.iter().filter(|&&s| s).count();
        Ok(MidpointSplit {
            midpoint: *midpoint,
            n_b: agents.len() - n_a,
            on_a_side,
            n_a,
        })
    }

    /// Subdivides edges so every given point becomes a vertex.
    ///
    /// Original vertex ids are kept; new vertices are numbered after them in
    /// edge order, then offset order. Returns the new tree and the vertex of each input point.
    pub fn augment(&self, points: &[TreePoint<S>]) -> Result<(TreeGraph<S>, Vec<usize>)> {
        let canonical = points
            .iter()
            .map(|p| self.canonicalize(p))
            .collect::<Result<Vec<_>>>()?;
        let mut cuts: Vec<Vec<S>> = vec![Vec::new(); self.edges.len()];
        for p in &canonical {
            if let TreePoint::Edge { edge, offset } = *p {
                cuts[edge].push(offset);
            }
        }
        let mut first_new = Vec::with_capacity(self.edges.len());
        let mut next_id = self.vertex_count;
        for offsets in &mut cuts {
            offsets.sort_by(|x, y| x.partial_cmp(y).expect("offsets are finite"));
            offsets.dedup();
            first_new.push(next_id);
            next_id += offsets.len();
        }
        let mut edges = Vec::with_capacity(next_id - 1);
        for (id, e) in self.edges.iter().enumerate() {
            let mut previous = (e.u, S::zero());
            for (k, &offset) in cuts[id].iter().enumerate() {
                let vertex = first_new[id] + k;
                edges.push((previous.0, vertex, offset - previous.1));
                previous = (vertex, offset);
            }
            edges.push((previous.0, e.v, e.length - previous.1));
        }
        let graph = TreeGraph::new(next_id, edges)?;
        let mapping = canonical
            .iter()
            .map(|p| match *p {
                TreePoint::Vertex(v) => v,
                TreePoint::Edge { edge, offset } => {
                    let k = cuts[edge]
                        .iter()
                        .position(|&o| o == offset)
                        .expect("every cut was recorded");
                    first_new[edge] + k
                }
            })
            .collect();
        Ok((graph, mapping))
    }
}

impl<S: Scalar> DistanceTable<S> {
    pub fn source(&self) -> &TreePoint<S> {
        &self.source
    }

    pub fn vertices(&self) -> &[S] {
        &self.to_vertex
    }

    /// Distance from the source to a canonical point of the same tree.
    pub fn to_point(&self, tree: &TreeGraph<S>, p: &TreePoint<S>) -> S {
        match *p {
            TreePoint::Vertex(v) => self.to_vertex[v],
            TreePoint::Edge { edge, offset } => {
                if let TreePoint::Edge {
                    edge: source_edge,
                    offset: source_offset,
                } = self.source
                {
                    if source_edge == edge {
                        return (offset - source_offset).abs();
                    }
                }
                let e = tree.edges[edge];
                (offset + self.to_vertex[e.u]).min_of(e.length - offset + self.to_vertex[e.v])
            }
        }
    }
}

fn source_first<S: Scalar>(p: &TreePoint<S>, q: &TreePoint<S>) -> bool {
    match (p, q) {
        (TreePoint::Vertex(a), TreePoint::Vertex(b)) => a <= b,
        (TreePoint::Vertex(_), TreePoint::Edge { .. }) => true,
        (TreePoint::Edge { .. }, TreePoint::Vertex(_)) => false,
        (TreePoint::Edge { edge: a, offset: x }, TreePoint::Edge { edge: b, offset: y }) => (a, x) <= (b, y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(id: usize) -> TreePoint<f64> {
        TreePoint::Vertex(id)
    }

    /// Center 0 with leaves 1, 2, 3 at lengths 1, 3, 2.
    fn star() -> TreeGraph<f64> {
        TreeGraph::new(4, [(0, 1, 1.0), (0, 2, 3.0), (0, 3, 2.0)]).unwrap()
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(TreeGraph::<f64>::new(0, []).is_err());
        assert!(TreeGraph::new(3, [(0, 1, 1.0)]).is_err());
        assert!(TreeGraph::new(3, [(0, 1, 1.0), (0, 1, 1.0)]).is_err());
        assert!(TreeGraph::new(2, [(0, 0, 1.0)]).is_err());
        assert!(TreeGraph::new(2, [(0, 1, 0.0)]).is_err());
        assert!(TreeGraph::new(2, [(0, 5, 1.0)]).is_err());
    }

    #[test]
    fn path_sum_distance() {
        let t = TreeGraph::path(&[1.0, 2.0]).unwrap();
        assert_eq!(t.distance(&v(0), &v(2)).unwrap(), 3.0);
        let p = TreePoint::Edge { edge: 1, offset: 0.5 };
        let q = TreePoint::Edge { edge: 1, offset: 1.75 };
        assert_eq!(t.distance(&p, &q).unwrap(), 1.25);
        assert_eq!(t.distance(&v(0), &p).unwrap(), 1.5);
    }

    #[test]
    fn endpoints_canonicalize_to_vertices() {
        let t = TreeGraph::path(&[1.0, 2.0]).unwrap();
        assert_eq!(t.canonicalize(&TreePoint::Edge { edge: 1, offset: 0.0 }).unwrap(), v(1));
        assert_eq!(t.canonicalize(&TreePoint::Edge { edge: 1, offset: 2.0 }).unwrap(), v(2));
        assert!(t.canonicalize(&TreePoint::Edge { edge: 1, offset: 2.5 }).is_err());
        assert!(t.canonicalize(&v(3)).is_err());
    }

    #[test]
    fn path_point_on_second_edge() {
        let t = TreeGraph::path(&[1.0, 2.0]).unwrap();
        let w = t.path_point(&v(0), &v(2), 0.5).unwrap();
        assert_eq!(w, TreePoint::Edge { edge: 1, offset: 0.5 });
        assert_eq!(t.path_point(&v(0), &v(2), 0.0).unwrap(), v(0));
        assert_eq!(t.path_point(&v(0), &v(2), 1.0).unwrap(), v(2));
        assert!(t.path_point(&v(0), &v(2), 1.5).is_err());
    }

    #[test]
    fn path_point_between_interior_points() {
        let s = star();
        let a = TreePoint::Edge { edge: 1, offset: 2.0 };
        let b = TreePoint::Edge { edge: 2, offset: 1.0 };
        // d(a, b) = 2 + 1, so a third of the way lands on the center.
        assert_eq!(s.path_point(&a, &b, 2.0 / 3.0).unwrap(), v(0));
        let w = s.path_point(&b, &a, 0.5).unwrap();
        assert_eq!(w, TreePoint::Edge { edge: 1, offset: 0.5 });
    }

    #[test]
    fn farthest_vertex_examples() {
        let s = star();
        assert_eq!(s.farthest(&v(1), None).unwrap(), (v(2), 4.0));
        let t = TreeGraph::path(&[1.0, 1.0]).unwrap();
        assert_eq!(t.farthest(&v(0), None).unwrap(), (v(2), 2.0));
        assert_eq!(t.farthest(&v(1), Some(&v(0))).unwrap(), (v(0), 1.0));
        assert_eq!(t.farthest(&v(1), Some(&v(2))).unwrap(), (v(2), 1.0));
        assert_eq!(t.farthest(&v(1), None).unwrap(), (v(0), 1.0));
    }

    #[test]
    fn split_examples() {
        let t = TreeGraph::path(&[1.0, 1.0]).unwrap();
        let agents = [v(2), v(2), v(2), v(0)];
        let split = t.split_at_midpoint(&agents, &v(2), &v(0)).unwrap();
        assert_eq!((split.n_a, split.n_b), (3, 1));
        assert_eq!(split.midpoint, v(1));

        let at_mid = t.split_at_midpoint(&[v(1)], &v(2), &v(0)).unwrap();
        assert_eq!((at_mid.n_a, at_mid.n_b), (0, 1));

        let all_a = t.split_at_midpoint(&[v(2), v(2)], &v(2), &v(0)).unwrap();
        assert_eq!((all_a.n_a, all_a.n_b), (2, 0));

        assert_eq!(t.split_at_midpoint(&agents, &v(1), &v(1)), Err(Error::DegenerateSplit));
    }

    #[test]
    fn side_branches_at_the_midpoint_go_to_b() {
        let s = star();
        // Path from leaf 2 (length 3) to leaf 3 (length 2) has midpoint on edge 1 at offset 0.5.
        let split = s.split_at_midpoint(&[v(1), v(0), v(2)], &v(2), &v(3)).unwrap();
        assert_eq!(split.midpoint, TreePoint::Edge { edge: 1, offset: 0.5 });
        assert_eq!(split.on_a_side, vec![false, false, true]);
    }

    #[test]
    fn peripheral_examples() {
        let t = TreeGraph::path(&[1.0, 1.0]).unwrap();
        assert!(t.is_peripheral(&v(0), 1e-9).unwrap());
        assert!(!t.is_peripheral(&v(1), 1e-9).unwrap());
        let s = star();
        assert!(!s.is_peripheral(&v(1), 1e-9).unwrap());
        assert!(s.is_peripheral(&v(2), 1e-9).unwrap());
        assert!(s.is_peripheral(&v(3), 1e-9).unwrap());
        let single = TreeGraph::<f64>::new(1, []).unwrap();
        assert!(single.is_peripheral(&v(0), 1e-9).unwrap());
    }

    #[test]
    fn augmentation_keeps_distances() {
        let s = star();
        let points = [
            TreePoint::Edge { edge: 1, offset: 2.0 },
            TreePoint::Edge { edge: 1, offset: 0.5 },
            TreePoint::Edge { edge: 1, offset: 2.0 },
            v(3),
        ];
        let (augmented, map) = s.augment(&points).unwrap();
        assert_eq!(augmented.vertex_count(), 6);
        assert_eq!(map, vec![5, 4, 5, 3]);
        for i in 0..points.len() {
            for j in 0..points.len() {
                let before = s.distance(&points[i], &points[j]).unwrap();
                let after = augmented.distance(&v(map[i]), &v(map[j])).unwrap();
                assert_eq!(before, after);
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(s.distance(&v(a), &v(b)).unwrap(), augmented.distance(&v(a), &v(b)).unwrap());
            }
        }
    }

    #[test]
    fn leaves_of_small_trees() {
        assert_eq!(star().leaves(), vec![1, 2, 3]);
        assert_eq!(TreeGraph::<f64>::new(1, []).unwrap().leaves(), vec![0]);
    }
}
