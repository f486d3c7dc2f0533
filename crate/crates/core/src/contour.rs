//! Floating-point contour oracle.
//!
//! Iterated contour integrals are evaluated with the product trapezoidal
//! rule on concentric circles. For integrands analytic in an annulus around
//! each circle the rule converges geometrically, so agreement between `N`
//! and `2N` samples per circle is a reliable stopping test.
//!
//! Integrands here are evaluated directly from their closed product form,
//! independently of the polynomial machinery used by the exact engine.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ct::Factored;
use crate::error::{CtError, Result};
use crate::exact::{thm_prefactor_exponent, Rational};
use crate::identities::{IdentityFamily, IdentitySpec, PairOrientation};

/// Largest `n` the oracle accepts; cost grows as `N^n`.
pub const MAX_ORACLE_N: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Base radius: circle `j` has radius `scale * j * epsilon`.
    pub epsilon: f64,
    /// Samples per circle, a power of two.
    pub points: usize,
    /// Split the sample grid across rayon workers. Partial sums are reduced
    /// in a fixed order, so the result does not depend on the worker count.
    #[serde(default)]
    pub parallel: bool,
}

impl QuadratureConfig {
    pub const DEFAULT_POINTS: usize = 1024;

    pub fn new(epsilon: f64, points: usize) -> Self {
        QuadratureConfig { epsilon, points, parallel: false }
    }

    /// `epsilon = 0.25 / n` for circles around the origin.
    pub fn default_x(n: u64) -> Self {
        Self::new(0.25 / n.max(1) as f64, Self::DEFAULT_POINTS)
    }

    /// `epsilon = 0.1 / n`, used by the proof chain for all four forms.
    pub fn default_chain(n: u64) -> Self {
        Self::new(0.1 / n.max(1) as f64, Self::DEFAULT_POINTS)
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    fn check_points(&self) -> Result<()> {
        if self.points == 0 || !self.points.is_power_of_two() {
            return Err(CtError::Config(format!("points must be a power of two, got {}", self.points)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(CtError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// `|v1 - v2| <= tol * max(1, |v2|)`.
pub fn converged(v1: Complex64, v2: Complex64, tol: f64) -> bool {
    (v1 - v2).norm() <= tol * v2.norm().max(1.0)
}

/// Relative distance, with the same floor as [`converged`].
pub fn relative_diff(v1: Complex64, v2: Complex64) -> f64 {
    (v1 - v2).norm() / v2.norm().max(1.0)
}

/// Neumaier-compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, x: Complex64) {
        let (s_re, c_re) = two_sum(self.sum.re, x.re);
        let (s_im, c_im) = two_sum(self.sum.im, x.im);
        self.sum = Complex64::new(s_re, s_im);
        self.carry += Complex64::new(c_re, c_im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, err)
}

/// Samples of each circle: `centers[j] + radii[j] e^{2 pi i k / N}`.
fn circle_samples(centers: &[Complex64], radii: &[f64], points: usize) -> Vec<Vec<Complex64>> {
    centers
        .iter()
        .zip(radii)
        .map(|(&c, &r)| {
            (0..points)
                .map(|k| c + Complex64::from_polar(r, 2.0 * PI * k as f64 / points as f64))
                .collect()
        })
        .collect()
}

/// Mean of `h` over the sample torus.
///
/// The grid is split by the index of the last variable; each slice is summed
/// sequentially and the slice sums are combined in index order.
fn torus_mean<H>(samples: &[Vec<Complex64>], parallel: bool, h: H) -> Complex64
where
    H: Fn(&[Complex64]) -> Complex64 + Sync,
{
    let n = samples.len();
    if n == 0 {
        return h(&[]);
    }
    let points = samples[0].len();
    let slice = |outer: usize| {
        let mut idx = vec![0usize; n - 1];
        let mut z: Vec<Complex64> = samples.iter().map(|s| s[0]).collect();
        z[n - 1] = samples[n - 1][outer];
        let mut acc = CompensatedSum::default();
        loop {
            acc.add(h(&z));
            // odometer over the inner n-1 variables
            let mut j = 0;
            loop {
                if j == n - 1 {
                    return acc.value();
                }
                idx[j] += 1;
                if idx[j] < points {
                    z[j] = samples[j][idx[j]];
                    break;
                }
                idx[j] = 0;
                z[j] = samples[j][0];
                j += 1;
            }
        }
    };
    let partials: Vec<Complex64> = if parallel {
        (0..points).into_par_iter().map(slice).collect()
    } else {
        (0..points).map(slice).collect()
    };
    let mut total = CompensatedSum::default();
    for p in partials {
        total.add(p);
    }
    total.value() / (points as f64).powi(n as i32)
}

/// Value of the integrand `f(x)` whose iterated constant term is sought.
fn family_integrand(spec: &IdentitySpec, x: &[Complex64]) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let n = x.len();
    let (a, b, twoc) = (spec.a as i32, spec.b as i32, spec.twoc as i32);
    let mut num = one;
    let mut den = one;
    for &xj in x {
        let omx = one - xj;
        match spec.family {
            IdentityFamily::Cry => den *= omx * omx,
            IdentityFamily::Mm => den *= xj * omx * omx,
            IdentityFamily::Morris => den *= omx.powi(a) * xj.powi(b),
            IdentityFamily::Thm => {
                den *= omx.powi(a);
                if a >= 1 {
                    den *= xj.powi(a - 1);
                } else {
                    num *= xj;
                }
            }
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let d = x[k] - x[j];
            match spec.family {
                IdentityFamily::Cry => den *= d,
                IdentityFamily::Mm => den *= d * (one - x[k] - x[j]),
                IdentityFamily::Morris => den *= d.powi(twoc),
                IdentityFamily::Thm => {
                    let d = match spec.orientation {
                        PairOrientation::KMinusJ => d,
                        PairOrientation::JMinusK => -d,
                    };
                    den *= (d * (one - x[k] - x[j])).powi(twoc);
                }
            }
        }
    }
    num / den
}

/// Circles `|x_j| = j epsilon` must keep `|x_j| + |x_k| < 1`, so that the
/// origin is the only singularity inside each circle. `n epsilon < 1/2`
/// guarantees this.
pub const X_RADIUS_LIMIT: f64 = 0.5;

/// Shifted circles reach `4 n epsilon`; the square-root branch points and
/// the poles at `-1` stay outside when this is below one half.
pub const SHIFTED_RADIUS_LIMIT: f64 = 0.5;

fn check_x_radius(n: u64, cfg: &QuadratureConfig) -> Result<()> {
    cfg.check_points()?;
    if n as f64 * cfg.epsilon >= X_RADIUS_LIMIT {
        return Err(CtError::Config(format!(
            "n * epsilon = {} must stay below {X_RADIUS_LIMIT} for circles |x_j| = j epsilon",
            n as f64 * cfg.epsilon
        )));
    }
    Ok(())
}

fn check_oracle_n(n: u64) -> Result<()> {
    if !(1..=MAX_ORACLE_N).contains(&n) {
        return Err(CtError::Config(format!("oracle supports 1 <= n <= {MAX_ORACLE_N}, got {n}")));
    }
    Ok(())
}

fn x_circles(n: usize, cfg: &QuadratureConfig) -> Vec<Vec<Complex64>> {
    let centers = vec![Complex64::new(0.0, 0.0); n];
    let radii: Vec<f64> = (1..=n).map(|j| j as f64 * cfg.epsilon).collect();
    circle_samples(&centers, &radii, cfg.points)
}

/// Trapezoidal estimate of `CT_{x_n} ... CT_{x_1}` of the instance's
/// integrand, i.e. `(2 pi i)^{-n}` times the integral of `f / (x_1 ... x_n)`
/// over the circles `|x_j| = j epsilon`.
pub fn contour_ct(spec: &IdentitySpec, cfg: &QuadratureConfig) -> Result<Complex64> {
    let spec = spec.normalized()?;
    check_oracle_n(spec.n)?;
    check_x_radius(spec.n, cfg)?;
    let samples = x_circles(spec.n as usize, cfg);
    Ok(torus_mean(&samples, cfg.parallel, |x| family_integrand(&spec, x)))
}

/// Same estimate for an arbitrary factored integrand in `n` variables.
pub fn contour_ct_factored(f: &Factored<Rational>, n: u64, cfg: &QuadratureConfig) -> Result<Complex64> {
    check_oracle_n(n)?;
    check_x_radius(n, cfg)?;
    if let Some(&v) = f.variables().iter().find(|&&v| v as u64 >= n) {
        return Err(CtError::ResidualVariable(v + 1));
    }
    let samples = x_circles(n as usize, cfg);
    Ok(torus_mean(&samples, cfg.parallel, |x| f.eval_complex(x)))
}

/// A converged (or not) oracle estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub re: f64,
    pub im: f64,
    #[serde(rename = "N")]
    pub points: usize,
    pub epsilon: f64,
    pub converged: bool,
}

impl OracleValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl fmt::Display for OracleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:+e}i (N={}, epsilon={}, {})",
            self.re,
            self.im,
            self.points,
            self.epsilon,
            if self.converged { "converged" } else { "NOT converged" }
        )
    }
}

/// Doubles `N` from `cfg.points` until two successive estimates agree to
/// `tol` or `N` would exceed `max_points`. The returned value is the
/// finer of the last two estimates.
pub fn refine<E>(cfg: &QuadratureConfig, tol: f64, max_points: usize, estimate: E) -> Result<OracleValue>
where
    E: Fn(&QuadratureConfig) -> Result<Complex64>,
{
    let mut cur = *cfg;
    let mut prev = estimate(&cur)?;
    loop {
        let next_cfg = cur.with_points(cur.points * 2);
        let next = estimate(&next_cfg)?;
        let ok = converged(prev, next, tol);
        if ok || next_cfg.points * 2 > max_points {
            return Ok(OracleValue {
                re: next.re,
                im: next.im,
                points: next_cfg.points,
                epsilon: cfg.epsilon,
                converged: ok,
            });
        }
        cur = next_cfg;
        prev = next;
    }
}

/// Grid budget: the largest power-of-two `N` with `N^n <= 2^27`, capped at
/// the default point count.
pub fn max_points_for(n: u64) -> usize {
    let per_dim = 27 / n.max(1) as u32;
    (1usize << per_dim.min(20)).min(QuadratureConfig::DEFAULT_POINTS)
}

/// [`contour_ct`] with `N`-doubling.
pub fn contour_ct_converged(spec: &IdentitySpec, cfg: &QuadratureConfig, tol: f64, max_points: usize) -> Result<OracleValue> {
    refine(cfg, tol, max_points, |c| contour_ct(spec, c))
}

/// The four integral forms of the type-D change-of-variables chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChainForm {
    /// `x`: circles `|x_j| = j eps`.
    XForm,
    /// `z = 1 - 2x`: circles `|z_j - 1| = 2 j eps`.
    ZForm,
    /// `y = z^2`: circles `|y_j - 1| = 4 j eps`.
    YForm,
    /// `t = 1 - y`: circles `|t_j| = 4 j eps`.
    TForm,
}

impl ChainForm {
    pub const ALL: [ChainForm; 4] = [ChainForm::XForm, ChainForm::ZForm, ChainForm::YForm, ChainForm::TForm];

    fn center(self) -> f64 {
        match self {
            ChainForm::XForm | ChainForm::TForm => 0.0,
            ChainForm::ZForm | ChainForm::YForm => 1.0,
        }
    }

    fn radius_scale(self) -> f64 {
        match self {
            ChainForm::XForm => 1.0,
            ChainForm::ZForm => 2.0,
            ChainForm::YForm | ChainForm::TForm => 4.0,
        }
    }

    /// Power of two and sign in front of the integral.
    pub fn prefactor(self, n: u64, a: u64, twoc: u64) -> f64 {
        let base = thm_prefactor_exponent(n, a, twoc) + 2 * n as i64;
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        match self {
            ChainForm::XForm => 1.0,
            ChainForm::ZForm => sign * 2f64.powi((base - n as i64) as i32),
            ChainForm::YForm => sign * 2f64.powi((base - 2 * n as i64) as i32),
            ChainForm::TForm => 2f64.powi((base - 2 * n as i64) as i32),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChainForm::XForm => "X_FORM",
            ChainForm::ZForm => "Z_FORM",
            ChainForm::YForm => "Y_FORM",
            ChainForm::TForm => "T_FORM",
        }
    }

    fn check(self, n: u64, cfg: &QuadratureConfig) -> Result<()> {
        cfg.check_points()?;
        let (ok, rule) = match self {
            ChainForm::XForm => (n as f64 * cfg.epsilon < X_RADIUS_LIMIT, "n * epsilon < 1/2"),
            _ => (4.0 * n as f64 * cfg.epsilon < SHIFTED_RADIUS_LIMIT, "4 n * epsilon < 1/2"),
        };
        if !ok {
            return Err(CtError::Config(format!("{}: {rule} violated (epsilon = {})", self.name(), cfg.epsilon)));
        }
        Ok(())
    }

    /// Integrand times the measure factor `prod (w_j - center)`, so that the
    /// torus mean equals `(2 pi i)^{-n}` times the contour integral.
    fn weighted_integrand(self, w: &[Complex64], a: i32, twoc: i32) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let n = w.len();
        let mut num = one;
        let mut den = one;
        for &wj in w {
            match self {
                ChainForm::XForm => {
                    num *= wj;
                    den *= (wj * (one - wj)).powi(a);
                }
                ChainForm::ZForm => {
                    num *= wj - one;
                    den *= (one - wj * wj).powi(a);
                }
                ChainForm::YForm => {
                    debug_assert!(wj.re > 0.0, "y^(1/2) branch cut reached");
                    num *= wj - one;
                    den *= (one - wj).powi(a) * wj.sqrt();
                }
                ChainForm::TForm => {
                    debug_assert!((one - wj).re > 0.0, "(1-t)^(1/2) branch cut reached");
                    num *= wj;
                    den *= wj.powi(a) * (one - wj).sqrt();
                }
            }
        }
        for j in 0..n {
            for k in j + 1..n {
                let pair = match self {
                    ChainForm::XForm => (w[k] - w[j]) * (one - w[k] - w[j]),
                    ChainForm::ZForm => w[j] * w[j] - w[k] * w[k],
                    ChainForm::YForm => w[j] - w[k],
                    ChainForm::TForm => w[k] - w[j],
                };
                den *= pair.powi(twoc);
            }
        }
        num / den
    }
}

impl fmt::Display for ChainForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_chain_params(n: u64, a: u64, twoc: u64) -> Result<()> {
    if !(1..=3).contains(&n) {
        return Err(CtError::Config(format!("chain supports 1 <= n <= 3, got {n}")));
    }
    if a < 1 || twoc < 1 {
        return Err(CtError::Domain("chain needs a >= 1 and twoc >= 1".into()));
    }
    Ok(())
}

/// One form of the chain, prefactor included, at a fixed `N`.
pub fn chain_form_value(form: ChainForm, n: u64, a: u64, twoc: u64, cfg: &QuadratureConfig) -> Result<Complex64> {
    check_chain_params(n, a, twoc)?;
    form.check(n, cfg)?;
    let nu = n as usize;
    let centers = vec![Complex64::new(form.center(), 0.0); nu];
    let radii: Vec<f64> = (1..=nu).map(|j| form.radius_scale() * j as f64 * cfg.epsilon).collect();
    let samples = circle_samples(&centers, &radii, cfg.points);
    let (a_i, c_i) = (a as i32, twoc as i32);
    let mean = torus_mean(&samples, cfg.parallel, |w| form.weighted_integrand(w, a_i, c_i));
    Ok(mean * form.prefactor(n, a, twoc))
}

/// All four forms at a fixed `N`. By the change-of-variables argument they
/// are equal, each to the type-D constant term.
pub fn chain_values(n: u64, a: u64, twoc: u64, cfg: &QuadratureConfig) -> Result<BTreeMap<ChainForm, Complex64>> {
    ChainForm::ALL
        .iter()
        .map(|&form| Ok((form, chain_form_value(form, n, a, twoc, cfg)?)))
        .collect()
}

/// [`chain_values`] with per-form `N`-doubling.
pub fn chain_values_converged(
    n: u64,
    a: u64,
    twoc: u64,
    cfg: &QuadratureConfig,
    tol: f64,
    max_points: usize,
) -> Result<BTreeMap<ChainForm, OracleValue>> {
    ChainForm::ALL
        .iter()
        .map(|&form| Ok((form, refine(cfg, tol, max_points, |c| chain_form_value(form, n, a, twoc, c))?)))
        .collect()
}
