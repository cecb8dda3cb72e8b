use crate::error::{invalid, Result};
use crate::halfplane::DiscreteMeasure;
use crate::scalar::{Scalar, C};

/// Closed-form driving functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriverFormula<S> {
    /// `a + b·t`
    Linear { intercept: S, slope: S },
    /// `offset + amplitude·cos(frequency·t)`
    CosineShift { offset: S, amplitude: S, frequency: S },
    /// `scale·√t`
    SqrtRamp { scale: S },
}

/// Real driving function `U(t)` of the slit equation.
#[derive(Debug, Clone, PartialEq)]
pub enum DrivingFunction<S> {
    Constant(S),
    /// Value `values[i]` on `(breakpoints[i-1], breakpoints[i]]`, the first
    /// piece closed at 0. The last breakpoint is the horizon.
    PiecewiseConstant { breakpoints: Vec<S>, values: Vec<S> },
    /// Linear interpolation of samples on a uniform grid over `[0, horizon]`.
    Sampled { horizon: S, values: Vec<S> },
    Formula(DriverFormula<S>),
}

impl<S: Scalar> DrivingFunction<S> {
    pub fn piecewise(breakpoints: Vec<S>, values: Vec<S>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(invalid("piecewise driver needs one value per breakpoint"));
        }
        let increasing = breakpoints.windows(2).all(|w| w[0] < w[1]);
        if !increasing || !(breakpoints[0] > S::zero()) {
            return Err(invalid("breakpoints must be positive and strictly increasing"));
        }
        Ok(DrivingFunction::PiecewiseConstant { breakpoints, values })
    }

    pub fn sampled(horizon: S, values: Vec<S>) -> Result<Self> {
        if values.len() < 2 || !(horizon > S::zero()) {
            return Err(invalid("sampled driver needs >= 2 samples on a positive horizon"));
        }
        Ok(DrivingFunction::Sampled { horizon, values })
    }

    /// End of the interval the function is defined on, if bounded.
    pub fn horizon(&self) -> Option<S> {
        match self {
            DrivingFunction::PiecewiseConstant { breakpoints, .. } => breakpoints.last().copied(),
            DrivingFunction::Sampled { horizon, .. } => Some(*horizon),
            _ => None,
        }
    }

    pub fn eval(&self, t: S) -> S {
        match self {
            DrivingFunction::Constant(u) => *u,
            DrivingFunction::PiecewiseConstant { breakpoints, values } => {
                values[piece_index(breakpoints, t)]
            }
            DrivingFunction::Sampled { horizon, values } => {
                let cells = values.len() - 1;
                let x = (t / *horizon).max(S::zero()).min(S::one())
                    * S::from_usize_lossy(cells);
                let i = x.floor().to_usize().unwrap_or(0).min(cells - 1);
                let frac = x - S::from_usize_lossy(i);
                values[i] + (values[i + 1] - values[i]) * frac
            }
            DrivingFunction::Formula(f) => match *f {
                DriverFormula::Linear { intercept, slope } => intercept + slope * t,
                DriverFormula::CosineShift { offset, amplitude, frequency } => {
                    offset + amplitude * (frequency * t).cos()
                }
                DriverFormula::SqrtRamp { scale } => scale * t.max(S::zero()).sqrt(),
            },
        }
    }

    /// Points in the open interval `(lo, hi)` where the function is not smooth.
    pub fn kinks(&self, lo: S, hi: S) -> Vec<S> {
        match self {
            DrivingFunction::PiecewiseConstant { breakpoints, .. } => breakpoints
                .iter()
                .copied()
                .filter(|&b| b > lo && b < hi)
                .collect(),
            DrivingFunction::Sampled { horizon, values } => {
                let cells = values.len() - 1;
                (1..cells)
                    .map(|i| *horizon * S::from_usize_lossy(i) / S::from_usize_lossy(cells))
                    .filter(|&b| b > lo && b < hi)
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Value frozen on a piece between consecutive kinks, when constant there.
    pub(crate) fn constant_on(&self, lo: S, hi: S) -> Option<S> {
        match self {
            DrivingFunction::Constant(u) => Some(*u),
            DrivingFunction::PiecewiseConstant { .. } => {
                Some(self.eval((lo + hi) * S::lit(0.5)))
            }
            _ => None,
        }
    }

    /// `(inf, sup)` of `U` over `[0, horizon]`.
    pub fn range_on(&self, horizon: S) -> (S, S) {
        let fold = |it: &mut dyn Iterator<Item = S>| {
            it.fold((S::infinity(), S::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        match self {
            DrivingFunction::Constant(u) => (*u, *u),
            DrivingFunction::PiecewiseConstant { breakpoints, values } => {
                let last = piece_index(breakpoints, horizon);
                fold(&mut values[..=last].iter().copied())
            }
            DrivingFunction::Sampled { horizon: h, values } => {
                let cells = values.len() - 1;
                let x = (horizon / *h).min(S::one()) * S::from_usize_lossy(cells);
                let whole = x.floor().to_usize().unwrap_or(0).min(cells);
                let end = self.eval(horizon);
                fold(&mut values[..=whole].iter().copied().chain(std::iter::once(end)))
            }
            DrivingFunction::Formula(f) => match *f {
                DriverFormula::Linear { .. } | DriverFormula::SqrtRamp { .. } => {
                    let (a, b) = (self.eval(S::zero()), self.eval(horizon));
                    (a.min(b), a.max(b))
                }
                DriverFormula::CosineShift { offset, amplitude, frequency } => {
                    if (frequency * horizon).abs() >= S::PI() {
                        (offset - amplitude.abs(), offset + amplitude.abs())
                    } else {
                        let (a, b) = (self.eval(S::zero()), self.eval(horizon));
                        (a.min(b), a.max(b))
                    }
                }
            },
        }
    }
}

/// Index of the piece `(b_{i-1}, b_i]` containing `t`; times within a
/// relative 1e-12 of a breakpoint belong to the piece it closes.
pub(crate) fn piece_index<S: Scalar>(breakpoints: &[S], t: S) -> usize {
    let slack = S::tol(1e-12) * S::one().max(breakpoints.last().copied().unwrap_or(S::one()).abs());
    breakpoints
        .iter()
        .position(|&b| t <= b + slack)
        .unwrap_or(breakpoints.len() - 1)
}

/// Herglotz vector field `H(t, z) = ∫ ν_t(du)/(z - u)` with `ν_t` piecewise
/// constant in time.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzField<S> {
    breakpoints: Vec<S>,
    measures: Vec<DiscreteMeasure<S>>,
    bound: S,
}

impl<S: Scalar> HerglotzField<S> {
    /// `breakpoints` are the right ends of the time cells; the last one is the horizon.
    pub fn new(breakpoints: Vec<S>, measures: Vec<DiscreteMeasure<S>>, bound: S) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != measures.len() {
            return Err(invalid("herglotz field needs one measure per time cell"));
        }
        if !(breakpoints[0] > S::zero()) || !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid("time breakpoints must be positive and strictly increasing"));
        }
        if !(bound > S::zero()) {
            return Err(invalid("support bound must be positive"));
        }
        if let Some(m) = measures.iter().find(|m| m.max_abs_position() > bound) {
            return Err(invalid(format!(
                "atom at distance {} exceeds support bound {bound}",
                m.max_abs_position()
            )));
        }
        Ok(Self { breakpoints, measures, bound })
    }

    pub fn constant(measure: DiscreteMeasure<S>, horizon: S, bound: S) -> Result<Self> {
        Self::new(vec![horizon], vec![measure], bound)
    }

    pub fn horizon(&self) -> S {
        *self.breakpoints.last().unwrap()
    }

    pub fn bound(&self) -> S {
        self.bound
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn measures(&self) -> &[DiscreteMeasure<S>] {
        &self.measures
    }

    pub fn measure_at(&self, t: S) -> &DiscreteMeasure<S> {
        &self.measures[piece_index(&self.breakpoints, t)]
    }

    /// Whether every `ν_t` is supported in `[0, bound]`.
    pub fn nonnegative_support(&self) -> bool {
        self.measures
            .iter()
            .all(|m| m.atoms().iter().all(|&(x, _)| x >= S::zero()))
    }

    fn kinks(&self, lo: S, hi: S) -> Vec<S> {
        self.breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect()
    }
}

/// Right-hand side source of a Loewner equation.
#[derive(Debug, Clone, PartialEq)]
pub enum LoewnerField<S> {
    /// `1/(z - U(t))`
    Slit(DrivingFunction<S>),
    Herglotz(HerglotzField<S>),
}

impl<S: Scalar> From<DrivingFunction<S>> for LoewnerField<S> {
    fn from(d: DrivingFunction<S>) -> Self {
        LoewnerField::Slit(d)
    }
}

impl<S: Scalar> From<HerglotzField<S>> for LoewnerField<S> {
    fn from(h: HerglotzField<S>) -> Self {
        LoewnerField::Herglotz(h)
    }
}

/// Field restricted to a piece on which it is smooth in time.
pub(crate) enum PieceRhs<'a, S> {
    Pole(S),
    Measure(&'a DiscreteMeasure<S>),
    Moving(&'a DrivingFunction<S>),
}

impl<S: Scalar> PieceRhs<'_, S> {
    #[inline]
    pub(crate) fn eval(&self, t: S, w: C<S>) -> C<S> {
        match self {
            PieceRhs::Pole(u) => (w - *u).inv(),
            PieceRhs::Measure(m) => m.cauchy(w),
            PieceRhs::Moving(d) => (w - d.eval(t)).inv(),
        }
    }
}

impl<S: Scalar> LoewnerField<S> {
    pub fn horizon(&self) -> Option<S> {
        match self {
            LoewnerField::Slit(d) => d.horizon(),
            LoewnerField::Herglotz(h) => Some(h.horizon()),
        }
    }

    /// `max |u|` over the support of `ν_s`, `s ≤ t`.
    pub fn support_bound(&self, t: S) -> S {
        match self {
            LoewnerField::Slit(d) => {
                let (lo, hi) = d.range_on(t);
                lo.abs().max(hi.abs())
            }
            LoewnerField::Herglotz(h) => h.bound(),
        }
    }

    pub fn eval(&self, t: S, w: C<S>) -> C<S> {
        match self {
            LoewnerField::Slit(d) => (w - d.eval(t)).inv(),
            LoewnerField::Herglotz(h) => h.measure_at(t).cauchy(w),
        }
    }

    /// Splits `[0, t]` into pieces on which the field is smooth in time.
    pub(crate) fn pieces(&self, t: S) -> Vec<(S, S)> {
        let kinks = match self {
            LoewnerField::Slit(d) => d.kinks(S::zero(), t),
            LoewnerField::Herglotz(h) => h.kinks(S::zero(), t),
        };
        let mut edges = Vec::with_capacity(kinks.len() + 2);
        edges.push(S::zero());
        edges.extend(kinks);
        edges.push(t);
        edges.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub(crate) fn on_piece(&self, lo: S, hi: S) -> PieceRhs<'_, S> {
        match self {
            LoewnerField::Slit(d) => match d.constant_on(lo, hi) {
                Some(u) => PieceRhs::Pole(u),
                None => PieceRhs::Moving(d),
            },
            LoewnerField::Herglotz(h) => PieceRhs::Measure(h.measure_at((lo + hi) * S::lit(0.5))),
        }
    }
}
