use super::{i_times, HalfPlaneMap};
use crate::error::Result;
use crate::scalar::{c, Scalar};

/// Mollified density value `-(1/π) Im G(x + iε)` and the ε it was taken at.
#[derive(Debug, Clone, Copy)]
pub struct DensityEstimate<S> {
    pub value: S,
    pub eps: S,
    pub converged: bool,
}

/// Stieltjes–Perron density estimate at `x`, halving `eps` until successive
/// values differ by less than `1e-6`.
pub fn stieltjes_density<S: Scalar>(
    map: &HalfPlaneMap<S>,
    x: S,
    eps: S,
) -> Result<DensityEstimate<S>> {
    let tol = S::tol(1e-6);
    let floor = S::epsilon() * S::one().max(x.abs()) * S::lit(16.0);
    let value_at = |e: S| -> Result<S> { Ok(-map.cauchy(c(x, e))?.im / S::PI()) };
    let mut eps = eps.min(S::one());
    let mut prev = value_at(eps)?;
    while eps * S::lit(0.5) > floor {
        let next_eps = eps * S::lit(0.5);
        let next = value_at(next_eps)?;
        eps = next_eps;
        if (next - prev).abs() < tol {
            return Ok(DensityEstimate { value: next, eps, converged: true });
        }
        prev = next;
    }
    Ok(DensityEstimate { value: prev, eps, converged: false })
}

/// Mass of the atom at `x0`: `lim_{ε→0} -ε Im G(x0 + iε)`, extrapolated from
/// `ε = 10^-2, 10^-3, …` by Neville's scheme. Limits below `1e-9` count as 0.
pub fn atom_mass<S: Scalar>(map: &HalfPlaneMap<S>, x0: S) -> Result<S> {
    let smallest = S::epsilon().sqrt() * S::lit(0.1);
    let mut eps = Vec::new();
    let mut vals = Vec::new();
    let mut e = S::lit(1e-2);
    while eps.len() < 4 && e >= smallest {
        let g = map.cauchy(c(x0, S::zero()) + i_times(e))?;
        eps.push(e);
        vals.push(-e * g.im);
        e *= S::lit(0.1);
    }
    // Neville tableau evaluated at ε = 0.
    let n = vals.len();
    let mut p = vals.clone();
    for level in 1..n {
        for i in 0..n - level {
            let (a, b) = (eps[i], eps[i + level]);
            p[i] = (b * p[i] - a * p[i + 1]) / (b - a);
        }
    }
    let mass = p[0];
    Ok(if mass.abs() < S::tol(1e-9) { S::zero() } else { mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfplane::DiscreteMeasure;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn arcsine_density_at_center() {
        let d = stieltjes_density(&HalfPlaneMap::slit(0.0, 2.0), 0.0, 0.1).unwrap();
        assert!(d.converged);
        assert_abs_diff_eq!(d.value, 1.0 / (PI * 2f64.sqrt()), epsilon = 1e-6);
    }

    #[test]
    fn arcsine_density_outside_support() {
        let d = stieltjes_density(&HalfPlaneMap::slit(0.0, 2.0), 3.0, 0.1).unwrap();
        assert!(d.converged);
        assert_abs_diff_eq!(d.value, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn shifted_meixner_density() {
        let d = stieltjes_density(&HalfPlaneMap::slit(1.0, 8.0), 1.0, 0.1).unwrap();
        assert_abs_diff_eq!(d.value, 2.0 * 2f64.sqrt() / (9.0 * PI), epsilon = 1e-6);
    }

    #[test]
    fn meixner_atom_matches_residue() {
        let f = HalfPlaneMap::slit(1.0, 8.0);
        // Residue oracle: 1/F'(-2), F'(z) = (z-1)/√((z-1)²-8) with the branch
        // value -1 of the root at z = -2.
        let root = -((-2.0f64 - 1.0).powi(2) - 8.0).sqrt();
        let residue = 1.0 / ((-2.0 - 1.0) / root);
        assert_abs_diff_eq!(residue, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(atom_mass(&f, -2.0).unwrap(), residue, epsilon = 1e-6);
    }

    #[test]
    fn no_atoms_in_arcsine() {
        assert_eq!(atom_mass(&HalfPlaneMap::slit(0.0, 2.0), 0.0).unwrap(), 0.0);
        assert_eq!(atom_mass(&HalfPlaneMap::slit(0.0, 2.0), 5.0).unwrap(), 0.0);
    }

    #[test]
    fn dirac_has_unit_atom() {
        let f = HalfPlaneMap::atomic(DiscreteMeasure::dirac(0.4));
        assert_abs_diff_eq!(atom_mass(&f, 0.4).unwrap(), 1.0, epsilon = 1e-12);
    }
}
