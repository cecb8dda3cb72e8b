use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{invalid, Result};

/// Finite rooted graph with a symmetric 0/1 adjacency and no loops.
///
/// Optional labels attach a coordinate tuple to each vertex; comb products
/// concatenate the labels of their factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    adjacency: Vec<Vec<usize>>,
    root: usize,
    labels: Option<Vec<Vec<u32>>>,
    exact_radius: Option<usize>,
}

/// Neighbour counts one shell out, in the same shell and one shell in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OmegaProfile {
    pub plus: usize,
    pub zero: usize,
    pub minus: usize,
}

impl RootedGraph {
    /// Validates and wraps neighbour lists (sorted on input or not).
    pub fn new(mut adjacency: Vec<Vec<usize>>, root: usize) -> Result<Self> {
        let n = adjacency.len();
        if root >= n {
            return Err(invalid(format!("root {root} out of range for {n} vertices")));
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if nbrs.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("vertex {v} has a duplicate neighbour")));
            }
            if nbrs.binary_search(&v).is_ok() {
                return Err(invalid(format!("vertex {v} has a self-loop")));
            }
            if nbrs.last().is_some_and(|&w| w >= n) {
                return Err(invalid(format!("vertex {v} has an out-of-range neighbour")));
            }
        }
        for (v, nbrs) in adjacency.iter().enumerate() {
            if let Some(&w) = nbrs.iter().find(|&&w| adjacency[w].binary_search(&v).is_err()) {
                return Err(invalid(format!("edge {v}-{w} is not symmetric")));
            }
        }
        Ok(Self { adjacency, root, labels: None, exact_radius: None })
    }

    pub fn from_edges(vertices: usize, edges: &[(usize, usize)], root: usize) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertices];
        for &(a, b) in edges {
            if a >= vertices || b >= vertices {
                return Err(invalid(format!("edge {a}-{b} out of range")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Self::new(adjacency, root)
    }

    pub(crate) fn from_parts_unchecked(
        adjacency: Vec<Vec<usize>>,
        root: usize,
        labels: Option<Vec<Vec<u32>>>,
        exact_radius: Option<usize>,
    ) -> Self {
        Self { adjacency, root, labels, exact_radius }
    }

    pub fn single_vertex() -> Self {
        Self { adjacency: vec![Vec::new()], root: 0, labels: None, exact_radius: None }
    }

    /// Single edge `o – v` rooted at `o`.
    pub fn edge() -> Self {
        Self { adjacency: vec![vec![1], vec![0]], root: 0, labels: None, exact_radius: None }
    }

    /// Star `K_{1,k}` rooted at its centre.
    pub fn star(k: usize) -> Self {
        let mut adjacency = vec![(1..=k).collect::<Vec<_>>()];
        adjacency.extend((0..k).map(|_| vec![0]));
        Self { adjacency, root: 0, labels: None, exact_radius: None }
    }

    pub fn with_labels(mut self, labels: Vec<Vec<u32>>) -> Result<Self> {
        if labels.len() != self.adjacency.len() {
            return Err(invalid("one label per vertex required"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Marks the graph as a truncation that is faithful to the untruncated
    /// graph within distance `radius` of the root.
    pub fn with_exact_radius(mut self, radius: usize) -> Self {
        self.exact_radius = Some(radius);
        self
    }

    /// `None` for graphs that are not truncations of anything larger.
    pub fn exact_radius(&self) -> Option<usize> {
        self.exact_radius
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Coordinate label of `v`; unlabeled graphs use `[v]`.
    pub fn label(&self, v: usize) -> Vec<u32> {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => vec![v as u32],
        }
    }

    pub fn labels(&self) -> Option<&[Vec<u32>]> {
        self.labels.as_deref()
    }

    /// Breadth-first distances from the root (`None` when unreachable).
    pub fn distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::from([self.root]);
        dist[self.root] = Some(0);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn omega_profile(&self, x: usize) -> Result<OmegaProfile> {
        self.omega_profile_with(&self.distances(), x)
    }

    /// Profile of `x` against precomputed [`RootedGraph::distances`].
    pub fn omega_profile_with(&self, dist: &[Option<usize>], x: usize) -> Result<OmegaProfile> {
        let dx = dist
            .get(x)
            .copied()
            .flatten()
            .ok_or_else(|| invalid(format!("vertex {x} is not reachable from the root")))?;
        let mut p = OmegaProfile { plus: 0, zero: 0, minus: 0 };
        for &y in &self.adjacency[x] {
            match dist[y] {
                Some(d) if d == dx + 1 => p.plus += 1,
                Some(d) if d == dx => p.zero += 1,
                Some(_) => p.minus += 1,
                None => {}
            }
        }
        Ok(p)
    }

    /// Induced subgraph on vertices within distance `radius` of the root,
    /// keeping labels (unlabeled graphs get `[original index]`).
    pub fn ball(&self, radius: usize) -> RootedGraph {
        let dist = self.distances();
        let keep: Vec<usize> = (0..self.vertex_count())
            .filter(|&v| dist[v].is_some_and(|d| d <= radius))
            .collect();
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let adjacency = keep
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter(|&&w| index[w] != usize::MAX)
                    .map(|&w| index[w])
                    .collect()
            })
            .collect();
        let labels = keep.iter().map(|&v| self.label(v)).collect();
        RootedGraph {
            adjacency,
            root: index[self.root],
            labels: Some(labels),
            exact_radius: Some(self.exact_radius.map_or(radius, |e| e.min(radius))),
        }
    }

    /// Labeled adjacency, independent of vertex numbering.
    pub fn labeled_adjacency(&self) -> BTreeMap<Vec<u32>, BTreeSet<Vec<u32>>> {
        (0..self.vertex_count())
            .map(|v| {
                let nbrs = self.adjacency[v].iter().map(|&w| self.label(w)).collect();
                (self.label(v), nbrs)
            })
            .collect()
    }

    /// Same labeled vertices, edges and root.
    pub fn same_labeled_graph(&self, other: &RootedGraph) -> bool {
        self.label(self.root) == other.label(other.root)
            && self.labeled_adjacency() == other.labeled_adjacency()
    }

    /// Checks symmetry, loop-freeness and duplicate-freeness.
    pub fn is_valid(&self) -> bool {
        RootedGraph::new(self.adjacency.clone(), self.root).is_ok()
    }

    /// Text dump: `root <id>` followed by one `id: n1 n2 …` line per vertex.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "root {}", self.root).unwrap();
        for (v, nbrs) in self.adjacency.iter().enumerate() {
            write!(out, "{v}:").unwrap();
            for w in nbrs {
                write!(out, " {w}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}
