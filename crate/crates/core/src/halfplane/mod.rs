//! F-transforms on the upper half-plane: closed forms, composition
//! (monotone convolution), flows, and recovery of moments, densities and atoms.

mod contour;
mod inversion;
mod measure;

use std::sync::Arc;

pub use contour::{moments_adaptive, moments_by_contour, AdaptiveMoments, ContourSettings};
pub use inversion::{atom_mass, stieltjes_density, DensityEstimate};
pub use measure::{DiscreteMeasure, MomentSequence};

use crate::error::{invalid, Error, Result};
use crate::loewner::FlowMap;
use crate::scalar::{c, finite, Scalar, C};

/// `√((z-u)² - s) + u` on the branch mapping H into H with `F(z) ~ z` at infinity.
///
/// Realized as `u + √(z-u-√s)·√(z-u+√s)` with principal roots. Real `z` is
/// accepted off the cut `[u-√s, u+√s]`; left of the cut the result continues
/// the branch from −∞ and is therefore `u - √((z-u)² - s)`.
pub fn branch_sqrt_slit<S: Scalar>(z: C<S>, u: S, s: S) -> Result<C<S>> {
    if !(s >= S::zero()) {
        return Err(invalid(format!("slit parameter must be non-negative, got {s}")));
    }
    let r = s.sqrt();
    let on_axis = z.im == S::zero();
    if z.im < S::zero() || (on_axis && (z.re - u).abs() <= r) || !finite(z) {
        return Err(domain(z));
    }
    let left = (z - u - r).sqrt();
    let right = (z - u + r).sqrt();
    Ok(left * right + u)
}

fn domain<S: Scalar>(z: C<S>) -> Error {
    Error::Domain {
        re: z.re.to_f64().unwrap_or(f64::NAN),
        im: z.im.to_f64().unwrap_or(f64::NAN),
    }
}

/// A self-map of the upper half-plane standing for the F-transform `1/G_μ`
/// of a probability measure.
#[derive(Debug, Clone)]
pub enum HalfPlaneMap<S: Scalar> {
    Identity,
    /// `z ↦ √((z-u)² - s) + u`.
    Slit { center: S, gap: S },
    /// `z ↦ 1 / Σ wᵢ/(z-aᵢ)`.
    Atomic(DiscreteMeasure<S>),
    /// `F₁ ∘ F₂ ∘ … ∘ F_k`; the last map is applied first.
    Compose(Vec<HalfPlaneMap<S>>),
    /// `z ↦ F(c·z)/c`, the F-transform of `B ↦ μ(c·B)`. `time_factor` records
    /// the matching time rescaling `t ↦ d·t` of the family the map came from.
    Scaled { inner: Box<HalfPlaneMap<S>>, factor: S, time_factor: S },
    /// Backward Loewner flow `f_t` evaluated numerically.
    Flow(Arc<FlowMap<S>>),
}

impl<S: Scalar> HalfPlaneMap<S> {
    pub fn slit(center: S, gap: S) -> Self {
        HalfPlaneMap::Slit { center, gap }
    }

    /// F-transform of the arcsine law with mean 0 and the given variance.
    pub fn arcsine(variance: S) -> Self {
        Self::slit(S::zero(), variance + variance)
    }

    /// F-transform `√((z-u)² - 4n) + u` of the free Meixner law `m_{2n,n,u}`.
    pub fn meixner(n: S, u: S) -> Self {
        Self::slit(u, S::lit(4.0) * n)
    }

    pub fn atomic(measure: DiscreteMeasure<S>) -> Self {
        HalfPlaneMap::Atomic(measure)
    }

    /// Flattening composition `maps[0] ∘ maps[1] ∘ …`.
    pub fn compose(maps: impl IntoIterator<Item = HalfPlaneMap<S>>) -> Self {
        let mut flat = Vec::new();
        for m in maps {
            match m {
                HalfPlaneMap::Compose(inner) => flat.extend(inner),
                HalfPlaneMap::Identity => {}
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => HalfPlaneMap::Identity,
            1 => flat.pop().unwrap(),
            _ => HalfPlaneMap::Compose(flat),
        }
    }

    /// Evaluates the map at `z` with `Im z > 0`.
    pub fn eval(&self, z: C<S>) -> Result<C<S>> {
        if !(z.im > S::zero()) || !finite(z) {
            return Err(domain(z));
        }
        self.eval_inner(z)
    }

    fn eval_inner(&self, z: C<S>) -> Result<C<S>> {
        match self {
            HalfPlaneMap::Identity => Ok(z),
            HalfPlaneMap::Slit { center, gap } => branch_sqrt_slit(z, *center, *gap),
            HalfPlaneMap::Atomic(m) => Ok(m.cauchy(z).inv()),
            HalfPlaneMap::Compose(maps) => maps
                .iter()
                .rev()
                .try_fold(z, |w, m| m.eval_inner(w)),
            HalfPlaneMap::Scaled { inner, factor, .. } => {
                Ok(inner.eval_inner(z * *factor)? / *factor)
            }
            HalfPlaneMap::Flow(flow) => flow.eval(z),
        }
    }

    /// Cauchy transform `G = 1/F`.
    pub fn cauchy(&self, z: C<S>) -> Result<C<S>> {
        Ok(self.eval(z)?.inv())
    }

    /// Crude radius containing the support of the underlying measure, when
    /// one is available in closed form. Compositions add radii (norm bound of
    /// a sum of monotonically independent operators).
    pub fn support_bound(&self) -> Option<S> {
        match self {
            HalfPlaneMap::Identity => Some(S::zero()),
            HalfPlaneMap::Slit { center, gap } => {
                Some(center.abs() + (*gap + *center * *center).sqrt())
            }
            HalfPlaneMap::Atomic(m) => Some(m.max_abs_position()),
            HalfPlaneMap::Compose(maps) => maps
                .iter()
                .try_fold(S::zero(), |acc, m| m.support_bound().map(|b| acc + b)),
            HalfPlaneMap::Scaled { inner, factor, .. } => {
                inner.support_bound().map(|b| b / *factor)
            }
            HalfPlaneMap::Flow(_) => None,
        }
    }
}

/// `A ▷ B`: the F-transform `F_A ∘ F_B` of the monotone convolution.
pub fn monotone_convolve<S: Scalar>(a: HalfPlaneMap<S>, b: HalfPlaneMap<S>) -> HalfPlaneMap<S> {
    HalfPlaneMap::compose([a, b])
}

pub(crate) fn i_times<S: Scalar>(y: S) -> C<S> {
    c(S::zero(), y)
}
