//! Circle arithmetic on M = R/Z and 1-periodic factor functions.

use std::f64::consts::TAU;
use std::sync::Arc;

/// Reduce a real number into [0, 1).
#[inline]
pub fn mod1(x: f64) -> f64 {
    let r = x - x.floor();
    // x.floor() can round such that r == 1.0 for x slightly below an integer.
    if r >= 1.0 {
        r - 1.0
    } else {
        r
    }
}

/// Signed circle gap a - b with representative in (-1/2, 1/2].
#[inline]
pub fn circle_gap(a: f64, b: f64) -> f64 {
    let d = mod1(a - b);
    if d > 0.5 {
        d - 1.0
    } else {
        d
    }
}

/// Distance on the circle, min(|a-b|, 1-|a-b|).
#[inline]
pub fn circle_dist(a: f64, b: f64) -> f64 {
    circle_gap(a, b).abs()
}

/// A 1-periodic real function together with an exact derivative.
///
/// The closed forms cover every factor used by the built-in couplings; the
/// `Custom` variant takes a closure pair for anything else.
#[derive(Clone)]
pub enum CircleFn {
    /// Constant c.
    Const(f64),
    /// amp * sin(2 pi x).
    Sin(f64),
    /// amp * cos(2 pi x).
    Cos(f64),
    /// Arbitrary 1-periodic function with its derivative.
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl CircleFn {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CircleFn::Const(c) => *c,
            CircleFn::Sin(a) => a * (TAU * x).sin(),
            CircleFn::Cos(a) => a * (TAU * x).cos(),
            CircleFn::Custom { f, .. } => f(x),
        }
    }

    #[inline]
    pub fn eval_derivative(&self, x: f64) -> f64 {
        match self {
            CircleFn::Const(_) => 0.0,
            CircleFn::Sin(a) => a * TAU * (TAU * x).cos(),
            CircleFn::Cos(a) => -a * TAU * (TAU * x).sin(),
            CircleFn::Custom { df, .. } => df(x),
        }
    }

    /// Sup of |f| on a 1024-point grid (enough for the smooth factors used here).
    pub fn sup_abs(&self) -> f64 {
        match self {
            CircleFn::Const(c) => c.abs(),
            CircleFn::Sin(a) | CircleFn::Cos(a) => a.abs(),
            CircleFn::Custom { f, .. } => (0..1024)
                .map(|i| f(i as f64 / 1024.0).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Largest periodicity defect |f(x+1) - f(x)| over 1024 grid points.
    pub fn periodicity_defect(&self) -> f64 {
        match self {
            CircleFn::Const(_) | CircleFn::Sin(_) | CircleFn::Cos(_) => 0.0,
            CircleFn::Custom { f, .. } => (0..1024)
                .map(|i| {
                    let x = i as f64 / 1024.0;
                    (f(x + 1.0) - f(x)).abs()
                })
                .fold(0.0, f64::max),
        }
    }
}

impl std::fmt::Debug for CircleFn {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CircleFn::Const(c) => write!(fmt, "Const({c})"),
            CircleFn::Sin(a) => write!(fmt, "Sin({a})"),
            CircleFn::Cos(a) => write!(fmt, "Cos({a})"),
            CircleFn::Custom { .. } => write!(fmt, "Custom"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod1_stays_in_unit_interval() {
        for &x in &[-3.7, -1.0, -1e-18, 0.0, 0.5, 1.0, 2.3, 1e9 + 0.25] {
            let r = mod1(x);
            assert!((0.0..1.0).contains(&r), "mod1({x}) = {r}");
        }
    }

    #[test]
    fn gap_representative_range() {
        assert_eq!(circle_gap(0.75, 0.25), 0.5); // boundary maps to +1/2
        assert!((circle_gap(0.1, 0.9) - 0.2).abs() < 1e-15);
        assert!((circle_gap(0.9, 0.1) + 0.2).abs() < 1e-15);
        assert_eq!(circle_gap(0.4, 0.4), 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let fns = [CircleFn::Sin(1.3), CircleFn::Cos(-0.7), CircleFn::Const(2.0)];
        let h = 1e-6;
        for f in &fns {
            for i in 0..17 {
                let x = i as f64 / 17.0;
                let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
                assert!((fd - f.eval_derivative(x)).abs() < 1e-7);
            }
        }
    }
}
