use super::RootedGraph;
use crate::error::{Error, Result};

/// Spidernet data `(a, b, c)` truncated after `depth` shells.
///
/// The root has `a` neighbours; every other vertex has `c` neighbours one
/// shell out, one shell in and `b − 1 − c` in its own shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpidernetSpec {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub depth: usize,
}

impl SpidernetSpec {
    pub fn new(a: usize, b: usize, c: usize, depth: usize) -> Self {
        Self { a, b, c, depth }
    }

    /// Data `(2n, n + 1 + u, n)`, whose root law is the free Meixner law `m_{2n,n,u}`.
    pub fn meixner(n: usize, u: usize, depth: usize) -> Self {
        Self::new(2 * n, n + 1 + u, n, depth)
    }

    /// Horizontal degree `u = b − 1 − c`.
    pub fn horizontal(&self) -> usize {
        self.b - 1 - self.c
    }

    pub fn shell_size(&self, d: usize) -> usize {
        if d == 0 {
            1
        } else {
            self.a * self.c.pow(d as u32 - 1)
        }
    }

    pub fn vertex_count(&self) -> usize {
        (0..=self.depth).map(|d| self.shell_size(d)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InfeasibleSpec(msg));
        if self.a < 1 {
            return fail(format!("root degree a = {} must be at least 1", self.a));
        }
        if self.b < 2 {
            return fail(format!("b = {} must be at least 2", self.b));
        }
        if self.c < 1 || self.c > self.b - 1 {
            return fail(format!("c = {} must lie in 1..={}", self.c, self.b - 1));
        }
        let u = self.horizontal();
        if u > self.a - 1 {
            return fail(format!(
                "horizontal degree u = {u} exceeds a - 1 = {} (first shell has only a vertices)",
                self.a - 1
            ));
        }
        if u % 2 == 1 && self.depth >= 1 && self.a % 2 == 1 {
            return fail(format!("odd horizontal degree u = {u} needs even shell sizes, a = {}", self.a));
        }
        Ok(())
    }
}

/// Deterministic truncated spidernet.
///
/// Shell `d` holds `a·c^{d−1}` vertices; vertex `i` of shell `d` has children
/// `c·i … c·i + c − 1` in shell `d + 1`; each shell carries the `u`-regular
/// circulant `i ~ i ± 1, …, i ± ⌊u/2⌋` plus `i ~ i + |S_d|/2` for odd `u`.
/// Vertices are numbered shell by shell, the root being 0.
pub fn build_spidernet(spec: &SpidernetSpec) -> Result<RootedGraph> {
    spec.validate()?;
    let u = spec.horizontal();
    let mut offsets = Vec::with_capacity(spec.depth + 2);
    let mut acc = 0;
    for d in 0..=spec.depth {
        offsets.push(acc);
        acc += spec.shell_size(d);
    }
    let mut adjacency = vec![Vec::new(); acc];
    let link = |x: usize, y: usize, adj: &mut Vec<Vec<usize>>| {
        adj[x].push(y);
        adj[y].push(x);
    };
    for d in 0..spec.depth {
        let (here, next) = (offsets[d], offsets[d + 1]);
        let fan = if d == 0 { spec.a } else { spec.c };
        for i in 0..spec.shell_size(d) {
            for j in 0..fan {
                link(here + i, next + i * fan + j, &mut adjacency);
            }
        }
    }
    for d in 1..=spec.depth {
        let (base, size) = (offsets[d], spec.shell_size(d));
        for i in 0..size {
            for s in 1..=u / 2 {
                link(base + i, base + (i + s) % size, &mut adjacency);
            }
            if u % 2 == 1 && i < size / 2 {
                link(base + i, base + i + size / 2, &mut adjacency);
            }
        }
    }
    // Shell D lacks its children, so only the ball of radius D - 1 is faithful.
    Ok(RootedGraph::new(adjacency, 0)?.with_exact_radius(spec.depth.saturating_sub(1)))
}
