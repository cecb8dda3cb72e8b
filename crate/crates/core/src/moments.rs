//! Exact walk counts and mixed moments of embedded adjacency operators.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::graph::{comb_power, RootedGraph, SparseCoord};
use crate::halfplane::MomentSequence;

/// Largest explicit product that [`adjacency_vs_sum`] will build.
pub const EXPLICIT_PRODUCT_LIMIT: usize = 10_000;

/// `⟨δ_o, A^k δ_o⟩` for `k = 0..=order`, in exact integers.
///
/// Truncated graphs must be faithful out to distance `⌊order/2⌋`.
pub fn root_moments(g: &RootedGraph, order: usize) -> Result<MomentSequence<BigInt>> {
    if let Some(exact) = g.exact_radius() {
        if exact < order / 2 {
            return Err(Error::TruncationTooShallow { depth: exact + 1, order });
        }
    }
    let n = g.vertex_count();
    let mut v = vec![BigInt::zero(); n];
    v[g.root()] = BigInt::one();
    let mut out = Vec::with_capacity(order + 1);
    out.push(BigInt::one());
    for _ in 0..order {
        let next = (0..n)
            .map(|x| g.neighbors(x).iter().fold(BigInt::zero(), |acc, &y| acc + &v[y]))
            .collect();
        v = next;
        out.push(v[g.root()].clone());
    }
    Ok(MomentSequence::new(out))
}

/// Sparse vector over product coordinates.
pub type SparseVector = HashMap<SparseCoord, BigInt>;

/// `I ⊗ … ⊗ I ⊗ A ⊗ P ⊗ … ⊗ P` with `A` at `position` (0-based), `P` the
/// projection onto the root.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddedOperator<'a> {
    word: &'a [RootedGraph],
    position: usize,
}

impl<'a> EmbeddedOperator<'a> {
    pub fn new(word: &'a [RootedGraph], position: usize) -> Result<Self> {
        if position >= word.len() {
            return Err(invalid(format!(
                "position {position} outside a word of length {}",
                word.len()
            )));
        }
        Ok(Self { word, position })
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        let mut out = SparseVector::new();
        let g = &self.word[self.position];
        for (coord, weight) in v {
            if !coord.can_move(self.position) {
                continue;
            }
            let x = coord.get(self.position, self.word);
            for &y in g.neighbors(x) {
                *out.entry(coord.with(self.position, y, self.word)).or_default() += weight;
            }
        }
        out.retain(|_, w| !w.is_zero());
        out
    }
}

/// `Φ(X_{j₁}^{p₁} ⋯ X_{jₘ}^{pₘ})` for a pattern `[(j₁, p₁), …]` (0-based positions).
pub fn embedded_moment(word: &[RootedGraph], pattern: &[(usize, usize)]) -> Result<BigInt> {
    let ops = pattern
        .iter()
        .map(|&(j, p)| EmbeddedOperator::new(word, j).map(|op| (op, p)))
        .collect::<Result<Vec<_>>>()?;
    let mut v = SparseVector::from([(SparseCoord::root(), BigInt::one())]);
    for (op, p) in ops.iter().rev() {
        for _ in 0..*p {
            v = op.apply(&v);
        }
    }
    Ok(v.remove(&SparseCoord::root()).unwrap_or_default())
}

/// Checks `Φ(X^p Y^q X^r) = Φ(Y^q) Φ(X^{p+r})` for every pair of positions
/// `i < j` in the word, with `X` at `i` and `Y` at `j`.
pub fn check_monotone_factorization(word: &[RootedGraph], p: usize, q: usize, r: usize) -> Result<bool> {
    if word.len() < 2 {
        return Err(invalid("factorization needs a word of length at least 2"));
    }
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            let mixed = embedded_moment(word, &[(i, p), (j, q), (i, r)])?;
            let inner = embedded_moment(word, &[(j, q)])?;
            let outer = embedded_moment(word, &[(i, p + r)])?;
            if mixed != inner * outer {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Compares the explicit comb product with the sum of the embedded
/// operators, row by row.
pub fn adjacency_vs_sum(word: &[RootedGraph]) -> Result<bool> {
    let size = word
        .iter()
        .try_fold(1usize, |acc, g| acc.checked_mul(g.vertex_count()))
        .filter(|&s| s <= EXPLICIT_PRODUCT_LIMIT)
        .ok_or_else(|| invalid(format!("product exceeds {EXPLICIT_PRODUCT_LIMIT} vertices")))?;
    if word.is_empty() {
        return Ok(true);
    }
    let product = comb_power(word);
    debug_assert_eq!(product.vertex_count(), size);
    let ops = (0..word.len())
        .map(|j| EmbeddedOperator::new(word, j))
        .collect::<Result<Vec<_>>>()?;
    let index_of = |coord: &SparseCoord| {
        word.iter()
            .enumerate()
            .fold(0usize, |acc, (pos, g)| acc * g.vertex_count() + coord.get(pos, word))
    };
    for v in 0..size {
        let coord = coord_from_label(&product.label(v), word);
        let start = SparseVector::from([(coord, BigInt::one())]);
        let mut row: HashMap<usize, BigInt> = HashMap::new();
        for op in &ops {
            for (c, w) in op.apply(&start) {
                *row.entry(index_of(&c)).or_default() += w;
            }
        }
        row.retain(|_, w| !w.is_zero());
        if row.len() != product.degree(v)
            || product.neighbors(v).iter().any(|y| row.get(y) != Some(&BigInt::one()))
        {
            return Ok(false);
        }
    }
    Ok(true)
}

fn coord_from_label(label: &[u32], word: &[RootedGraph]) -> SparseCoord {
    label
        .iter()
        .enumerate()
        .fold(SparseCoord::root(), |c, (pos, &x)| c.with(pos, x as usize, word))
}
