//! Transfer-operator machinery: Ulam discretization, invariant densities,
//! the projective cone metric, the effective mean field, and perturbation
//! gaps between operators of nearby maps.
//!
//! Densities are piecewise constant on a uniform partition of [0,1) into a
//! power-of-two number of bins (so the doubling-map branches align with bin
//! boundaries and its Ulam matrix is exact). A density has unit mass, i.e.
//! mean value 1.

use rayon::prelude::*;

use crate::circle::{circle_dist, circle_gap, mod1, CircleFn};
use crate::dynamics::{CouplingSpec, MapSpec};
use crate::error::{Error, Result};

/// Piecewise-constant density on the uniform N-bin partition of the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    values: Vec<f64>,
}

impl DensityGrid {
    /// Normalize the given non-negative values to mean 1.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if !values.len().is_power_of_two() || values.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "bin count {} must be a power of two >= 2",
                values.len()
            )));
        }
        if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "density values must be finite and non-negative".into(),
            ));
        }
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        if mean <= 0.0 {
            return Err(Error::InvalidParameter("density has zero mass".into()));
        }
        Ok(Self {
            values: values.into_iter().map(|v| v / mean).collect(),
        })
    }

    /// Already-normalized values; used internally by mass-preserving steps.
    fn from_raw(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn uniform(bins: usize) -> Result<Self> {
        Self::from_values(vec![1.0; bins])
    }

    pub fn bins(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Midpoint of bin b.
    pub fn midpoint(&self, b: usize) -> f64 {
        (b as f64 + 0.5) / self.values.len() as f64
    }

    pub fn sup_distance(&self, other: &DensityGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Ulam discretization of the transfer operator: a column-stochastic matrix
/// whose (b', b) entry is the fraction of bin b that f maps into bin b'.
#[derive(Debug, Clone)]
pub struct UlamOperator {
    n: usize,
    /// Row-major N x N matrix.
    matrix: Vec<f64>,
    /// Non-fatal conditions observed during assembly (e.g. a non-expanding map).
    pub assembly_warnings: Vec<String>,
}

impl UlamOperator {
    pub fn bins(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.n + col]
    }

    pub fn column_sum(&self, col: usize) -> f64 {
        (0..self.n).map(|r| self.entry(r, col)).sum()
    }

    /// Apply to a raw value vector (matrix-vector product).
    fn apply_raw(&self, v: &[f64]) -> Vec<f64> {
        self.matrix
            .par_chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
            .collect()
    }
}

/// Assemble the Ulam matrix of `map` on `bins` bins via stratified
/// sub-sampling of each bin (noise plays no part in assembly).
pub fn ulam_matrix(map: &MapSpec, bins: usize, samples_per_bin: usize) -> Result<UlamOperator> {
    if !bins.is_power_of_two() || bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "bin count {bins} must be a power of two >= 2"
        )));
    }
    if samples_per_bin < 16 {
        return Err(Error::InvalidParameter(format!(
            "samples_per_bin {samples_per_bin} below minimum 16"
        )));
    }
    let mut warnings = Vec::new();
    let sampled_min_deriv = (0..1024)
        .map(|i| map.derivative(i as f64 / 1024.0).abs())
        .fold(f64::INFINITY, f64::min);
    if sampled_min_deriv < 1.0 {
        warnings.push(format!(
            "map is not expanding: sampled min |f'| = {sampled_min_deriv}"
        ));
    }
    let nf = bins as f64;
    let columns: Vec<Vec<f64>> = (0..bins)
        .into_par_iter()
        .map(|b| {
            let mut col = vec![0.0f64; bins];
            for s in 0..samples_per_bin {
                let x = (b as f64 + (s as f64 + 0.5) / samples_per_bin as f64) / nf;
                let y = mod1(map.lift(x));
                let target = ((y * nf) as usize).min(bins - 1);
                col[target] += 1.0;
            }
            let total: f64 = col.iter().sum();
            for v in col.iter_mut() {
                *v /= total;
            }
            col
        })
        .collect();
    let mut matrix = vec![0.0f64; bins * bins];
    for (b, col) in columns.iter().enumerate() {
        for (bp, &v) in col.iter().enumerate() {
            matrix[bp * bins + b] = v;
        }
    }
    Ok(UlamOperator {
        n: bins,
        matrix,
        assembly_warnings: warnings,
    })
}

/// Push a density forward: mass and non-negativity are preserved.
pub fn transfer_apply(op: &UlamOperator, density: &DensityGrid) -> Result<DensityGrid> {
    if op.bins() != density.bins() {
        return Err(Error::DimensionMismatch(format!(
            "operator has {} bins, density {}",
            op.bins(),
            density.bins()
        )));
    }
    Ok(DensityGrid::from_raw(op.apply_raw(density.values())))
}

/// Power iteration from the uniform density until the successive sup-distance
/// drops below `tol`.
pub fn invariant_density(op: &UlamOperator, tol: f64, max_iters: usize) -> Result<DensityGrid> {
    let mut phi = DensityGrid::uniform(op.bins())?;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        let next = transfer_apply(op, &phi)?;
        residual = phi.sup_distance(&next);
        phi = next;
        if residual < tol {
            return Ok(phi);
        }
    }
    Err(Error::NoConvergence {
        iters: max_iters,
        residual,
    })
}

/// Parameters of the cone C(a, nu): densities whose log is (a, nu)-Hoelder on
/// rho_0-neighborhoods.
#[derive(Debug, Clone, Copy)]
pub struct ConeParams {
    pub a: f64,
    pub nu: f64,
    pub rho0: f64,
}

impl ConeParams {
    pub fn new(a: f64, nu: f64, rho0: f64) -> Result<Self> {
        if a <= 0.0 || !(0.0 < nu && nu <= 1.0) || !(0.0 < rho0 && rho0 <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "cone parameters out of range: a={a}, nu={nu}, rho0={rho0}"
            )));
        }
        Ok(Self { a, nu, rho0 })
    }
}

/// Does the density satisfy the discrete cone condition
/// phi(x)/phi(y) <= exp(a d(x,y)^nu) on pairs with 0 < d <= rho0?
pub fn in_cone(density: &DensityGrid, cone: &ConeParams) -> bool {
    let n = density.bins();
    let v = density.values();
    if v.iter().any(|&x| x <= 0.0) {
        return false;
    }
    for m in 0..n {
        for l in (m + 1)..n {
            let d = circle_dist(density.midpoint(m), density.midpoint(l));
            if d <= 0.0 || d > cone.rho0 {
                continue;
            }
            let bound = (cone.a * d.powf(cone.nu)).exp();
            let ratio = v[m] / v[l];
            if ratio > bound || 1.0 / ratio > bound {
                return false;
            }
        }
    }
    true
}

/// Discretized Hilbert projective metric on the cone C(a, nu).
///
/// theta = log(beta / alpha) where alpha is the infimum and beta the supremum
/// of the collection { phi2(x)/phi1(x) } union
/// { (e^{a d^nu} phi2(x) - phi2(y)) / (e^{a d^nu} phi1(x) - phi1(y)) } over
/// grid pairs with 0 < d(x,y) <= rho0. Returns +inf when either density
/// leaves the discrete cone. Identical grid points are excluded (the d = 0
/// degeneracy).
pub fn hilbert_metric(phi1: &DensityGrid, phi2: &DensityGrid, cone: &ConeParams) -> Result<f64> {
    if phi1.bins() != phi2.bins() {
        return Err(Error::DimensionMismatch(
            "densities live on different grids".into(),
        ));
    }
    if phi1.values().iter().any(|&v| v <= 0.0) || phi2.values().iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidParameter(
            "hilbert metric needs strictly positive densities".into(),
        ));
    }
    if !in_cone(phi1, cone) || !in_cone(phi2, cone) {
        return Ok(f64::INFINITY);
    }
    let n = phi1.bins();
    let a = phi1.values();
    let b = phi2.values();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for m in 0..n {
        let r = b[m] / a[m];
        lo = lo.min(r);
        hi = hi.max(r);
    }
    for m in 0..n {
        for l in 0..n {
            if m == l {
                continue;
            }
            let d = circle_dist(phi1.midpoint(m), phi1.midpoint(l));
            if d > cone.rho0 {
                continue;
            }
            let e = (cone.a * d.powf(cone.nu)).exp();
            let denom = e * a[m] - a[l];
            let numer = e * b[m] - b[l];
            if denom <= 0.0 || numer <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let r = numer / denom;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok((hi / lo).ln())
}

/// The effective mean field g(x) = sum_q u_q(x) <v_q> with
/// <v_q> = integral of v_q against the density (midpoint quadrature).
///
/// Keeping the u_q factors lets g and g' be evaluated exactly at arbitrary
/// points; tabulated values on the density grid are kept alongside.
#[derive(Debug, Clone)]
pub struct EffectiveField {
    u_terms: Vec<CircleFn>,
    v_means: Vec<f64>,
    table: Vec<f64>,
    derivative_table: Vec<f64>,
}

impl EffectiveField {
    /// The zero field on the given grid.
    pub fn zero(bins: usize) -> Self {
        Self {
            u_terms: Vec::new(),
            v_means: Vec::new(),
            table: vec![0.0; bins],
            derivative_table: vec![0.0; bins],
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.u_terms
            .iter()
            .zip(&self.v_means)
            .map(|(u, m)| u.eval(x) * m)
            .sum()
    }

    #[inline]
    pub fn eval_derivative(&self, x: f64) -> f64 {
        self.u_terms
            .iter()
            .zip(&self.v_means)
            .map(|(u, m)| u.eval_derivative(x) * m)
            .sum()
    }

    pub fn v_means(&self) -> &[f64] {
        &self.v_means
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn derivative_table(&self) -> &[f64] {
        &self.derivative_table
    }

    pub fn bins(&self) -> usize {
        self.table.len()
    }
}

/// Midpoint-quadrature integral of a (periodic) observable against a density.
pub fn observable_mean(f: &CircleFn, density: &DensityGrid) -> f64 {
    let n = density.bins();
    (0..n)
        .map(|b| f.eval(density.midpoint(b)) * density.values()[b])
        .sum::<f64>()
        / n as f64
}

/// Integrate the neighbor factors against `density` and build the field.
pub fn mean_field_g(coupling: &CouplingSpec, density: &DensityGrid) -> EffectiveField {
    let n = density.bins();
    let v_means: Vec<f64> = coupling
        .terms()
        .iter()
        .map(|t| observable_mean(&t.neighbor_factor, density))
        .collect();
    let u_terms: Vec<CircleFn> = coupling
        .terms()
        .iter()
        .map(|t| t.self_factor.clone())
        .collect();
    let mut field = EffectiveField {
        u_terms,
        v_means,
        table: Vec::with_capacity(n),
        derivative_table: Vec::with_capacity(n),
    };
    for b in 0..n {
        let x = density.midpoint(b);
        field.table.push(field.eval(x));
        field.derivative_table.push(field.eval_derivative(x));
    }
    field
}

/// Sup-norm gap between the Ulam operators of two maps over a set of test
/// densities, with the sampled C1 distance of the maps alongside.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationGap {
    /// max over test densities of sup |L phi - L_t phi|.
    pub gap: f64,
    /// Sampled C1 distance: sup circle-gap of lifts + sup |f' - f_t'|.
    pub epsilon: f64,
    /// gap / epsilon^nu (0 when epsilon = 0).
    pub ratio: f64,
}

pub fn perturbation_gap(
    map: &MapSpec,
    perturbed: &MapSpec,
    bins: usize,
    samples_per_bin: usize,
    test_densities: &[DensityGrid],
) -> Result<PerturbationGap> {
    let op = ulam_matrix(map, bins, samples_per_bin)?;
    let op_t = ulam_matrix(perturbed, bins, samples_per_bin)?;
    let mut gap = 0.0f64;
    for phi in test_densities {
        let a = transfer_apply(&op, phi)?;
        let b = transfer_apply(&op_t, phi)?;
        gap = gap.max(a.sup_distance(&b));
    }
    let mut c0 = 0.0f64;
    let mut c1 = 0.0f64;
    for i in 0..1024 {
        let x = i as f64 / 1024.0;
        c0 = c0.max(circle_gap(perturbed.lift(x), map.lift(x)).abs());
        c1 = c1.max((perturbed.derivative(x) - map.derivative(x)).abs());
    }
    let epsilon = c0 + c1;
    let nu = map.holder_nu();
    let ratio = if epsilon > 0.0 {
        gap / epsilon.powf(nu)
    } else {
        0.0
    };
    Ok(PerturbationGap {
        gap,
        epsilon,
        ratio,
    })
}

/// Density CSV: `bin,value`.
pub fn write_density_csv<W: std::io::Write>(out: &mut W, density: &DensityGrid) -> Result<()> {
    writeln!(out, "bin,value")?;
    for (b, v) in density.values().iter().enumerate() {
        writeln!(out, "{b},{v}")?;
    }
    Ok(())
}

/// Sparse operator CSV: `row,col,value` for nonzero entries.
pub fn write_operator_csv<W: std::io::Write>(out: &mut W, op: &UlamOperator) -> Result<()> {
    writeln!(out, "row,col,value")?;
    for r in 0..op.bins() {
        for c in 0..op.bins() {
            let v = op.entry(r, c);
            if v != 0.0 {
                writeln!(out, "{r},{c},{v}")?;
            }
        }
    }
    Ok(())
}
