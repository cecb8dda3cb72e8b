use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::scalar::{c, Scalar, C};

/// Finitely supported probability measure on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<S> {
    atoms: Vec<(S, S)>,
}

impl<S: Scalar> DiscreteMeasure<S> {
    /// Builds a measure from `(position, weight)` pairs.
    ///
    /// Positions must be strictly increasing, weights positive and summing to one.
    pub fn new(atoms: Vec<(S, S)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("discrete measure needs at least one atom"));
        }
        let mut total = S::zero();
        for (i, &(x, w)) in atoms.iter().enumerate() {
            if !x.is_finite() || !(w > S::zero()) {
                return Err(invalid(format!("atom {i} has position {x} and weight {w}")));
            }
            if i > 0 && !(atoms[i - 1].0 < x) {
                return Err(invalid("atom positions must be strictly increasing"));
            }
            total += w;
        }
        if (total - S::one()).abs() > S::tol(1e-12) {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    pub fn dirac(x: S) -> Self {
        Self { atoms: vec![(x, S::one())] }
    }

    pub fn atoms(&self) -> &[(S, S)] {
        &self.atoms
    }

    /// `ν(B)` for the interval `(lo, hi]`, or `[lo, hi]` when `closed_left`.
    pub fn mass_in(&self, lo: S, hi: S, closed_left: bool) -> S {
        self.atoms
            .iter()
            .filter(|&&(x, _)| (x > lo || (closed_left && x == lo)) && x <= hi)
            .fold(S::zero(), |acc, &(_, w)| acc + w)
    }

    /// Cauchy transform `Σ w / (z - x)`.
    pub fn cauchy(&self, z: C<S>) -> C<S> {
        self.atoms
            .iter()
            .fold(c(S::zero(), S::zero()), |acc, &(x, w)| acc + (z - x).inv() * w)
    }

    pub fn moment(&self, k: usize) -> S {
        self.atoms
            .iter()
            .fold(S::zero(), |acc, &(x, w)| acc + w * x.powi(k as i32))
    }

    pub fn moments(&self, order: usize) -> MomentSequence<S> {
        MomentSequence::new((0..=order).map(|k| self.moment(k)).collect())
    }

    pub fn max_abs_position(&self) -> S {
        self.atoms
            .iter()
            .fold(S::zero(), |acc, &(x, _)| acc.max(x.abs()))
    }
}

/// Moments `m_0 … m_K` of a (putative) probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<T> {
    values: Vec<T>,
}

impl<T> MomentSequence<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Highest moment order `K`.
    pub fn order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize) -> Option<&T> {
        self.values.get(k)
    }
}

impl<S: Scalar> MomentSequence<S> {
    /// Moments of δ_0: `(1, 0, …, 0)`.
    pub fn dirac_origin(order: usize) -> Self {
        let mut values = vec![S::zero(); order + 1];
        values[0] = S::one();
        Self { values }
    }

    /// Largest absolute difference over the common orders.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        self.values
            .iter()
            .zip(&other.values)
            .fold(S::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }

    /// Checks that every Hankel matrix `(m_{i+j})` up to size `⌊K/2⌋+1` is
    /// positive semidefinite within `tol` (relative to the largest diagonal entry).
    pub fn hankel_psd(&self, tol: S) -> bool {
        let size = self.order() / 2 + 1;
        let scale = (0..size)
            .map(|i| self.values[2 * i].abs())
            .fold(S::one(), S::max);
        let shift = tol * scale;
        // Cholesky of H + shift·I; leading minors cover every smaller Hankel block.
        let mut l = vec![vec![S::zero(); size]; size];
        for i in 0..size {
            for j in 0..=i {
                let mut sum = self.values[i + j];
                if i == j {
                    sum += shift;
                }
                for k in 0..j {
                    sum -= l[i][k] * l[j][k];
                }
                if i == j {
                    if !(sum > S::zero()) {
                        return false;
                    }
                    l[i][i] = sum.sqrt();
                } else {
                    l[i][j] = sum / l[j][j];
                }
            }
        }
        true
    }
}

impl MomentSequence<BigInt> {
    pub fn to_scalar<S: Scalar>(&self) -> MomentSequence<S> {
        MomentSequence::new(
            self.values
                .iter()
                .map(|v| S::lit(v.to_f64().unwrap_or(f64::INFINITY)))
                .collect(),
        )
    }

    pub fn all_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= BigInt::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_atoms() {
        assert!(DiscreteMeasure::new(vec![(0.0, 0.5), (0.0, 0.5)]).is_err());
        assert!(DiscreteMeasure::new(vec![(0.0, 0.6), (1.0, 0.5)]).is_err());
        assert!(DiscreteMeasure::new(vec![(0.0, 1.0), (1.0, 0.0)]).is_err());
        assert!(DiscreteMeasure::<f64>::new(vec![]).is_err());
        assert!(DiscreteMeasure::new(vec![(0.0, 0.5), (1.0, 0.5)]).is_ok());
    }

    #[test]
    fn interval_mass() {
        let m = DiscreteMeasure::new(vec![(0.0, 0.25), (0.5, 0.25), (1.0, 0.5)]).unwrap();
        assert_eq!(m.mass_in(0.0, 0.5, false), 0.25);
        assert_eq!(m.mass_in(0.0, 0.5, true), 0.5);
        assert_eq!(m.mass_in(0.5, 1.0, false), 0.5);
    }

    #[test]
    fn hankel_detects_non_measure() {
        // m_2 < m_1² cannot come from a probability measure.
        let bad = MomentSequence::new(vec![1.0, 1.0, 0.5]);
        assert!(!bad.hankel_psd(1e-8));
        let arcsine = MomentSequence::new(vec![1.0, 0.0, 2.0, 0.0, 6.0, 0.0, 20.0]);
        assert!(arcsine.hankel_psd(1e-8));
        // Two atoms: singular but PSD.
        let two = DiscreteMeasure::new(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!(two.moments(8).hankel_psd(1e-8));
    }
}
