use std::collections::{HashMap, VecDeque};

use super::{build_spidernet, RootedGraph, SpidernetSpec};
use crate::error::{invalid, Result};

/// Comb product `G₁ ▷ G₂`.
///
/// Vertex `(x, y)` is stored at index `x·|V₂| + y`; a copy of `G₂` hangs at
/// every vertex of `G₁`, and `G₁`-edges are kept only on the fibre `y = o₂`.
pub fn comb_product(g1: &RootedGraph, g2: &RootedGraph) -> RootedGraph {
    let (n1, n2) = (g1.vertex_count(), g2.vertex_count());
    let o2 = g2.root();
    let mut adjacency = Vec::with_capacity(n1 * n2);
    let mut labels = Vec::with_capacity(n1 * n2);
    for x in 0..n1 {
        let lx = g1.label(x);
        for y in 0..n2 {
            let mut nbrs: Vec<usize> = g2.neighbors(y).iter().map(|&w| x * n2 + w).collect();
            if y == o2 {
                nbrs.extend(g1.neighbors(x).iter().map(|&w| w * n2 + o2));
            }
            nbrs.sort_unstable();
            adjacency.push(nbrs);
            let mut l = lx.clone();
            l.extend(g2.label(y));
            labels.push(l);
        }
    }
    let exact = match (g1.exact_radius(), g2.exact_radius()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    RootedGraph::from_parts_unchecked(adjacency, g1.root() * n2 + o2, Some(labels), exact)
}

/// Left-nested product `((G₁ ▷ G₂) ▷ …) ▷ Gₖ`; the empty word is a point.
pub fn comb_power(word: &[RootedGraph]) -> RootedGraph {
    let mut iter = word.iter();
    let Some(first) = iter.next() else {
        return RootedGraph::single_vertex();
    };
    let mut acc = first.clone();
    for g in iter {
        acc = comb_product(&acc, g);
    }
    acc
}

/// Point of an iterated comb product, storing only the non-root coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseCoord(Vec<(usize, usize)>);

impl SparseCoord {
    pub fn root() -> Self {
        Self(Vec::new())
    }

    /// Highest position whose coordinate is off the root.
    pub fn top(&self) -> Option<usize> {
        self.0.last().map(|&(p, _)| p)
    }

    pub fn get(&self, pos: usize, word: &[RootedGraph]) -> usize {
        match self.0.binary_search_by_key(&pos, |&(p, _)| p) {
            Ok(i) => self.0[i].1,
            Err(_) => word[pos].root(),
        }
    }

    pub fn with(&self, pos: usize, v: usize, word: &[RootedGraph]) -> Self {
        let mut out = self.0.clone();
        match out.binary_search_by_key(&pos, |&(p, _)| p) {
            Ok(i) if v == word[pos].root() => {
                out.remove(i);
            }
            Ok(i) => out[i].1 = v,
            Err(_) if v == word[pos].root() => {}
            Err(i) => out.insert(i, (pos, v)),
        }
        Self(out)
    }

    /// Coordinate `pos` may move iff every later coordinate sits at its root.
    pub fn can_move(&self, pos: usize) -> bool {
        self.top().is_none_or(|t| pos >= t)
    }

    pub fn full(&self, word: &[RootedGraph]) -> Vec<u32> {
        (0..word.len()).map(|p| self.get(p, word) as u32).collect()
    }

    /// Neighbours in the comb product, position by position.
    pub fn neighbors(&self, word: &[RootedGraph]) -> Vec<SparseCoord> {
        let start = self.top().unwrap_or(0);
        let mut out = Vec::new();
        for (pos, g) in word.iter().enumerate().skip(start) {
            let x = self.get(pos, word);
            out.extend(g.neighbors(x).iter().map(|&y| self.with(pos, y, word)));
        }
        out
    }
}

/// Ball of radius `radius` around the root of the comb product of `word`,
/// explored lazily. Labels are full coordinate tuples.
pub fn comb_ball_graphs(word: &[RootedGraph], radius: usize) -> RootedGraph {
    let mut index: HashMap<SparseCoord, usize> = HashMap::new();
    let mut coords = vec![SparseCoord::root()];
    let mut dist = vec![0usize];
    index.insert(SparseCoord::root(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if dist[i] == radius {
            continue;
        }
        for nb in coords[i].neighbors(word) {
            if !index.contains_key(&nb) {
                index.insert(nb.clone(), coords.len());
                coords.push(nb);
                dist.push(dist[i] + 1);
                queue.push_back(coords.len() - 1);
            }
        }
    }
    let adjacency = coords
        .iter()
        .map(|c| {
            let mut nbrs: Vec<usize> =
                c.neighbors(word).iter().filter_map(|nb| index.get(nb).copied()).collect();
            nbrs.sort_unstable();
            nbrs
        })
        .collect();
    let labels = coords.iter().map(|c| c.full(word)).collect();
    let exact = word.iter().filter_map(RootedGraph::exact_radius).fold(radius, usize::min);
    RootedGraph::from_parts_unchecked(adjacency, 0, Some(labels), Some(exact))
}

/// Lazy ball in the comb product of truncated spidernets.
///
/// Each factor must be truncated at depth at least `radius + 1` so that the
/// ball does not see the truncation.
pub fn comb_ball(word: &[SpidernetSpec], radius: usize) -> Result<RootedGraph> {
    if let Some(s) = word.iter().find(|s| s.depth < radius + 1) {
        return Err(invalid(format!(
            "factor {s:?} is truncated at depth {} but radius {radius} needs at least {}",
            s.depth,
            radius + 1
        )));
    }
    let graphs = word.iter().map(build_spidernet).collect::<Result<Vec<_>>>()?;
    Ok(comb_ball_graphs(&graphs, radius))
}
