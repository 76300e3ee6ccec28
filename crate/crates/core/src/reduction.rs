//! The reduced hub model x(t+1) = f(x) + alpha kappa g(x) + alpha zeta(t)
//! (mod 1): building it, extracting the fluctuation series zeta from full
//! simulations, iterating it, and analyzing fixed points and hub coherence.

use rand::Rng;

use crate::circle::{circle_dist, circle_gap, mod1};
use crate::dynamics::{MapSpec, Trajectory};
use crate::error::{Error, Result};
use crate::measure::EffectiveField;
use crate::rng::{stream_rng, STREAM_NOISE};

/// Effective one-dimensional model for a hub with normalized degree kappa.
#[derive(Debug, Clone)]
pub struct ReducedHubModel {
    pub map: MapSpec,
    pub g: EffectiveField,
    pub alpha: f64,
    pub kappa: f64,
}

impl ReducedHubModel {
    pub fn new(map: MapSpec, g: EffectiveField, alpha: f64, kappa: f64) -> Result<Self> {
        if !(0.0 < kappa && kappa <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa must lie in (0, 1], got {kappa}"
            )));
        }
        if alpha < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be >= 0, got {alpha}"
            )));
        }
        Ok(Self {
            map,
            g,
            alpha,
            kappa,
        })
    }

    /// Deterministic part of the lift: f(x) + alpha kappa g(x).
    #[inline]
    pub fn drift(&self, x: f64) -> f64 {
        self.map.lift(x) + self.alpha * self.kappa * self.g.eval(x)
    }

    /// One step with an explicit fluctuation value.
    #[inline]
    pub fn apply(&self, x: f64, zeta: f64) -> f64 {
        mod1(self.drift(x) + self.alpha * zeta)
    }

    /// Multiplier of the reduced map at x: f'(x) + alpha kappa g'(x).
    #[inline]
    pub fn multiplier(&self, x: f64) -> f64 {
        self.map.derivative(x) + self.alpha * self.kappa * self.g.eval_derivative(x)
    }
}

/// Extracted fluctuation series of one hub.
#[derive(Debug, Clone)]
pub struct FluctuationSeries {
    pub hub: usize,
    /// zeta(t), t = 0 .. t_record - 2 (one fewer than the recorded states).
    pub zeta: Vec<f64>,
}

impl FluctuationSeries {
    /// sup norm of the series.
    pub fn sup_norm(&self) -> f64 {
        self.zeta.iter().map(|z| z.abs()).fold(0.0, f64::max)
    }
}

/// Residual of a recorded state series against the reduced model:
/// zeta(t) = gap(x(t+1), f(x(t)) + alpha kappa g(x(t)) mod 1) / alpha,
/// with the signed circle gap taking values in (-1/2, 1/2].
pub fn extract_zeta_series(xs: &[f64], model: &ReducedHubModel) -> Result<Vec<f64>> {
    if model.alpha == 0.0 {
        return Err(Error::InvalidParameter(
            "zeta is undefined at alpha = 0".into(),
        ));
    }
    if xs.len() < 2 {
        return Err(Error::EmptyInput(
            "need at least two recorded states".into(),
        ));
    }
    Ok(xs
        .windows(2)
        .map(|w| circle_gap(w[1], mod1(model.drift(w[0]))) / model.alpha)
        .collect())
}

/// Extract the fluctuation series of hub `hub` from a recorded trajectory.
pub fn extract_zeta(
    trajectory: &Trajectory,
    model: &ReducedHubModel,
    hub: usize,
) -> Result<FluctuationSeries> {
    if (model.alpha - trajectory.alpha).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "model alpha {} does not match trajectory alpha {}",
            model.alpha, trajectory.alpha
        )));
    }
    let xs = trajectory.node_series(hub).ok_or_else(|| {
        Error::InvalidParameter(format!("hub {hub} has no recorded series"))
    })?;
    Ok(FluctuationSeries {
        hub,
        zeta: extract_zeta_series(xs, model)?,
    })
}

/// Time average of |zeta|.
pub fn zeta_mean_abs(zeta: &[f64]) -> Result<f64> {
    if zeta.is_empty() {
        return Err(Error::EmptyInput("empty fluctuation series".into()));
    }
    Ok(zeta.iter().map(|z| z.abs()).sum::<f64>() / zeta.len() as f64)
}

/// Fluctuation input for iterating the reduced model.
#[derive(Debug, Clone)]
pub enum ZetaSource<'a> {
    /// zeta = 0: the noiseless effective map.
    None,
    /// Replay a recorded series (must cover the requested horizon).
    Recorded(&'a [f64]),
    /// i.i.d. uniform on [-amp, amp] from the given seed.
    Noise { amp: f64, seed: u64 },
}

/// Iterate the reduced model for `t_max` steps; returns x(0..=t_max).
pub fn iterate_reduced(
    model: &ReducedHubModel,
    x0: f64,
    t_max: usize,
    source: ZetaSource<'_>,
) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&x0) {
        return Err(Error::InvalidParameter(format!(
            "x0 must lie in [0, 1), got {x0}"
        )));
    }
    if let ZetaSource::Recorded(z) = &source {
        if z.len() < t_max {
            return Err(Error::InvalidParameter(format!(
                "recorded zeta series has {} entries, need {t_max}",
                z.len()
            )));
        }
    }
    let mut noise_rng = match &source {
        ZetaSource::Noise { seed, .. } => Some(stream_rng(*seed, STREAM_NOISE)),
        _ => None,
    };
    let mut orbit = Vec::with_capacity(t_max + 1);
    orbit.push(x0);
    let mut x = x0;
    for t in 0..t_max {
        let zeta = match &source {
            ZetaSource::None => 0.0,
            ZetaSource::Recorded(z) => z[t],
            ZetaSource::Noise { amp, .. } => {
                let u: f64 = noise_rng.as_mut().unwrap().random();
                amp * (2.0 * u - 1.0)
            }
        };
        x = model.apply(x, zeta);
        orbit.push(x);
    }
    Ok(orbit)
}

/// A fixed point of the reduced map on the circle.
#[derive(Debug, Clone, Copy)]
pub struct FixedPoint {
    pub x: f64,
    /// The integer branch k with f(x) + alpha kappa g(x) - x = k.
    pub branch: i64,
    pub multiplier: f64,
    pub stable: bool,
}

const ROOT_GRID: usize = 4096;
const ROOT_TOL: f64 = 1e-13;

/// All circle fixed points of the noiseless reduced map, found by sign-change
/// bracketing on a 4096-point grid plus bisection. The multiplier is
/// f'(x*) + alpha kappa g'(x*); stability means |multiplier| < 1.
pub fn fixed_points_stability(model: &ReducedHubModel) -> Vec<FixedPoint> {
    let shift = |x: f64| model.drift(x) - x;
    let grid: Vec<f64> = (0..=ROOT_GRID)
        .map(|j| shift(j as f64 / ROOT_GRID as f64))
        .collect();
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut roots: Vec<(f64, i64)> = Vec::new();
    for k in (lo.ceil() as i64)..=(hi.floor() as i64) {
        let kf = k as f64;
        for j in 0..ROOT_GRID {
            let a = grid[j] - kf;
            let b = grid[j + 1] - kf;
            if a.abs() < ROOT_TOL {
                roots.push((j as f64 / ROOT_GRID as f64, k));
                continue;
            }
            if a * b < 0.0 {
                let mut xa = j as f64 / ROOT_GRID as f64;
                let mut xb = (j + 1) as f64 / ROOT_GRID as f64;
                let mut fa = a;
                while xb - xa > ROOT_TOL {
                    let xm = 0.5 * (xa + xb);
                    let fm = shift(xm) - kf;
                    if fm == 0.0 {
                        xa = xm;
                        break;
                    }
                    if fa * fm < 0.0 {
                        xb = xm;
                    } else {
                        xa = xm;
                        fa = fm;
                    }
                }
                roots.push((xa, k));
            }
        }
        // The right endpoint x = 1 represents the same circle point as 0.
        if (grid[ROOT_GRID] - kf).abs() < ROOT_TOL {
            roots.push((0.0, k - (model.map.degree() as i64 - 1)));
        }
    }
    let mut out: Vec<FixedPoint> = Vec::new();
    for (x, k) in roots {
        let x = mod1(x);
        if out.iter().any(|fp| circle_dist(fp.x, x) < 1e-9) {
            continue;
        }
        let m = model.multiplier(x);
        out.push(FixedPoint {
            x,
            branch: k,
            multiplier: m,
            stable: m.abs() < 1.0,
        });
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x));
    out
}

/// Hub coherence r e^{i psi} = (1/T) sum_t e^{i 2 pi (x1(t) - x2(t))}.
#[derive(Debug, Clone, Copy)]
pub struct CoherenceResult {
    /// Modulus in [0, 1]; 1 means phase-locked hubs.
    pub r: f64,
    /// Phase in (-pi, pi].
    pub psi: f64,
}

pub fn coherence(x1: &[f64], x2: &[f64]) -> Result<CoherenceResult> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch(format!(
            "series lengths differ: {} vs {}",
            x1.len(),
            x2.len()
        )));
    }
    if x1.is_empty() {
        return Err(Error::EmptyInput("coherence of empty series".into()));
    }
    let tau = std::f64::consts::TAU;
    let mut re = 0.0;
    let mut im = 0.0;
    for (a, b) in x1.iter().zip(x2) {
        let phase = tau * (a - b);
        re += phase.cos();
        im += phase.sin();
    }
    re /= x1.len() as f64;
    im /= x1.len() as f64;
    let r = re.hypot(im).min(1.0);
    let mut psi = im.atan2(re);
    if psi <= -std::f64::consts::PI {
        psi += tau;
    }
    Ok(CoherenceResult { r, psi })
}

/// Per-hub fluctuation CSV: `t,zeta`.
pub fn write_zeta_csv<W: std::io::Write>(out: &mut W, series: &FluctuationSeries) -> Result<()> {
    writeln!(out, "t,zeta")?;
    for (t, z) in series.zeta.iter().enumerate() {
        writeln!(out, "{t},{z}")?;
    }
    Ok(())
}

/// Stability table CSV: `xstar,k,multiplier,stable`.
pub fn write_stability_csv<W: std::io::Write>(out: &mut W, points: &[FixedPoint]) -> Result<()> {
    writeln!(out, "xstar,k,multiplier,stable")?;
    for fp in points {
        writeln!(
            out,
            "{},{},{},{}",
            fp.x, fp.branch, fp.multiplier, fp.stable
        )?;
    }
    Ok(())
}
