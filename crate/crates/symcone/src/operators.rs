//! Bergman-type integral operators on the tube and the experiments that probe
//! their boundedness.
//!
//! Kernels carry the constant 1. Every statement that involves an unspecified
//! operator constant is tested as ratio-constancy across the free variable.
//!
//! Boundedness is probed on families of test functions: a ratio that stays put
//! across a dyadic dilation sweep is reported as bounded on the sample, a ratio
//! that moves monotonically as a divergence signature. Neither proves anything.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{ConeError, Result};
use crate::jordan::{ConeDescriptor, MultiIndex};
use crate::quad::{integrate, IntegralEstimate, QuadratureSpec, Region, Scheme, MAX_DIM};
use crate::spaces::{
    self, cdet, j_alpha_converges, kernel_arg, lemma4_2_converges, ppow, Cx, TestFunction, TubeFunction,
    TubePoint,
};

// ---------------------------------------------------------------------------
// Experiment results

/// How a ratio behaves across a dilation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    /// Every row drifts by less than the drift tolerance.
    BoundedOnSample,
    /// Every row moves monotonically by more than the drift tolerance.
    Divergence,
    Inconclusive,
    /// Nothing to measure (all cases skipped).
    Vacuous,
}

/// What the hypotheses of the probed statement predict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Bounded,
    Divergent,
    /// The hypotheses fail and the statement says nothing.
    NoClaim,
}

/// Ratios of one experiment: a row per function (or tuple), a column per scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub suite: String,
    pub params: String,
    pub scales: Vec<f64>,
    pub labels: Vec<String>,
    pub ratios: Vec<Vec<f64>>,
    pub divergent: Vec<bool>,
    /// Least-squares slope of `ln ratio` against `ln scale`, per row.
    pub slopes: Vec<f64>,
    /// `max / min - 1` per row.
    pub drift: Vec<f64>,
    pub monotone: Vec<bool>,
    pub max_ratio: f64,
    /// Coefficient of variation over every finite cell.
    pub cv: f64,
    pub expected_slope: Option<f64>,
    pub slope_tol: f64,
    pub drift_tol: f64,
    pub signature: Signature,
    pub expectation: Expectation,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl ExperimentResult {
    pub fn new(suite: &str, params: String, scales: &[f64]) -> Self {
        ExperimentResult {
            suite: suite.to_string(),
            params,
            scales: scales.to_vec(),
            labels: Vec::new(),
            ratios: Vec::new(),
            divergent: Vec::new(),
            slopes: Vec::new(),
            drift: Vec::new(),
            monotone: Vec::new(),
            max_ratio: f64::NAN,
            cv: f64::NAN,
            expected_slope: None,
            slope_tol: 1e-3,
            drift_tol: 0.1,
            signature: Signature::Vacuous,
            expectation: Expectation::NoClaim,
            pass: false,
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, label: String, row: Vec<f64>, divergent: bool) {
        self.labels.push(label);
        self.ratios.push(row);
        self.divergent.push(divergent);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn cells(&self) -> impl Iterator<Item = f64> + '_ {
        self.ratios.iter().flatten().copied().filter(|v| v.is_finite())
    }

    /// Fills slopes, drift, monotonicity, the signature and `pass`.
    ///
    /// With an expected slope, `pass` requires every row's slope within
    /// `slope_tol` of it. Otherwise `pass` compares the signature with
    /// `expectation`.
    pub fn finish_slopes(&mut self) {
        self.slopes = self.ratios.iter().map(|r| fit_slope(&self.scales, r)).collect();
        self.drift = self.ratios.iter().map(|r| drift(r)).collect();
        self.monotone = self.ratios.iter().map(|r| monotone(r)).collect();
        self.max_ratio = self.cells().fold(f64::NAN, f64::max);
        let cells: Vec<f64> = self.cells().collect();
        self.cv = coefficient_of_variation(&cells);
        self.signature = if self.ratios.is_empty() {
            Signature::Vacuous
        } else if self.drift.iter().zip(&self.divergent).all(|(&d, &div)| d < self.drift_tol && !div) {
            Signature::BoundedOnSample
        } else if self.drift.iter().zip(&self.monotone).all(|(&d, &m)| d >= self.drift_tol && m) {
            Signature::Divergence
        } else {
            Signature::Inconclusive
        };
        self.pass = match self.expected_slope {
            Some(e) => {
                !self.ratios.is_empty()
                    && !self.divergent.iter().any(|&d| d)
                    && self.slopes.iter().all(|s| (s - e).abs() <= self.slope_tol)
            }
            None => match self.expectation {
                Expectation::Bounded => self.signature == Signature::BoundedOnSample,
                Expectation::Divergent => self.signature == Signature::Divergence,
                Expectation::NoClaim => self.signature != Signature::Inconclusive,
            },
        };
    }

    /// Ratio-constancy verdict for single-column results: `pass` iff the
    /// complex ratios have coefficient of variation below `tol`.
    fn finish_constancy(&mut self, values: &[Cx], tol: f64) {
        self.max_ratio = self.cells().fold(f64::NAN, f64::max);
        if values.is_empty() {
            self.signature = Signature::Vacuous;
            self.cv = f64::NAN;
            self.pass = true;
            self.note("vacuous: every case was skipped");
            return;
        }
        let mean = values.iter().sum::<Cx>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / values.len() as f64;
        self.cv = var.sqrt() / mean.norm();
        self.signature = Signature::BoundedOnSample;
        self.pass = self.cv < tol && !self.divergent.iter().any(|&d| d);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiment results serialize")
    }

    /// One row per cell: `suite,label,scale,ratio,divergent`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "label", "scale", "ratio", "divergent"]).expect("in-memory write");
        for (i, row) in self.ratios.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let scale = self.scales.get(j).map_or(String::new(), |s| s.to_string());
                w.write_record([
                    self.suite.as_str(),
                    self.labels[i].as_str(),
                    &scale,
                    &v.to_string(),
                    &self.divergent[i].to_string(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Least-squares slope of `ln ratio` against `ln scale`; NaN when a ratio is not positive.
pub fn fit_slope(scales: &[f64], ratios: &[f64]) -> f64 {
    if scales.len() != ratios.len() || scales.len() < 2 {
        return f64::NAN;
    }
    if ratios.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return f64::NAN;
    }
    let xs: Vec<f64> = scales.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn drift(row: &[f64]) -> f64 {
    if row.is_empty() || row.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return f64::INFINITY;
    }
    let max = row.iter().copied().fold(f64::MIN, f64::max);
    let min = row.iter().copied().fold(f64::MAX, f64::min);
    max / min - 1.0
}

fn monotone(row: &[f64]) -> bool {
    row.len() >= 2
        && (row.windows(2).all(|w| w[1] > w[0]) || row.windows(2).all(|w| w[1] < w[0]))
}

fn coefficient_of_variation(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / k;
    var.sqrt() / mean.abs()
}

// ---------------------------------------------------------------------------
// Parameters

/// `(m, beta, nu, p)` for the multifunctional operators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorParams {
    pub cone: ConeDescriptor,
    pub beta: Vec<f64>,
    pub nu: Vec<f64>,
    pub p: f64,
}

impl OperatorParams {
    pub fn new(cone: &ConeDescriptor, beta: Vec<f64>, nu: Vec<f64>, p: f64) -> Result<Self> {
        if beta.is_empty() {
            return Err(ConeError::Config("at least one function is needed (m >= 1)".into()));
        }
        crate::error::check_len(beta.len(), nu.len())?;
        if !(p >= 1.0 && p.is_finite()) {
            return Err(ConeError::Domain(format!("p = {p} must lie in [1, inf)")));
        }
        Ok(OperatorParams { cone: cone.clone(), beta, nu, p })
    }

    pub fn m(&self) -> usize {
        self.beta.len()
    }

    pub fn beta_mean(&self) -> f64 {
        self.beta.iter().sum::<f64>() / self.m() as f64
    }

    fn nu_min(&self) -> f64 {
        self.nu.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn nu_max(&self) -> f64 {
        self.nu.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `mean(beta) > n/r - 1`.
    pub fn c1(&self) -> bool {
        self.beta_mean() > self.cone.n_over_r() - 1.0
    }

    /// `p < 1 + m (min nu / (n/r - 1) - 1)`, reading `x / 0` as `+inf` for `x > 0`
    /// and `-inf` for `x < 0`.
    pub fn c2(&self) -> bool {
        let den = self.cone.n_over_r() - 1.0;
        let num = self.nu_min();
        let q = if den == 0.0 {
            if num > 0.0 {
                f64::INFINITY
            } else if num < 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            }
        } else {
            num / den
        };
        self.p < 1.0 + self.m() as f64 * (q - 1.0)
    }

    /// `min beta > mean(beta) - n/(r p) + (m/p)(2 n/r - 1 + max nu)`.
    pub fn c3(&self) -> bool {
        let nr = self.cone.n_over_r();
        let min_beta = self.beta.iter().copied().fold(f64::INFINITY, f64::min);
        let m = self.m() as f64;
        min_beta > self.beta_mean() - nr / self.p + (m / self.p) * (2.0 * nr - 1.0 + self.nu_max())
    }

    pub fn admissible(&self) -> bool {
        self.c1() && self.c2() && self.c3()
    }

    /// `(n/r + beta_j) / m`, the exponent of the j-th kernel factor of `T_beta`.
    pub fn kernel_exponents(&self) -> Vec<f64> {
        let (nr, m) = (self.cone.n_over_r(), self.m() as f64);
        self.beta.iter().map(|b| (nr + b) / m).collect()
    }

    /// `f_j = Delta^{-(n/r + beta_j)/m}((z - conj(w)) / i)`: on this tuple
    /// `T_beta f (z_1, ..., z_m) = C prod_j f_j(z_j)`.
    pub fn kernel_tuple(&self, w: &TubePoint) -> Result<Vec<TestFunction>> {
        self.kernel_exponents().into_iter().map(|a| TestFunction::kernel(&self.cone, w.clone(), a)).collect()
    }
}

impl fmt::Display for OperatorParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cone={} m={} beta={:?} nu={:?} p={}", self.cone, self.m(), self.beta, self.nu, self.p)
    }
}

/// Membership of parameters in the sets `sigma` and `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamSetMembership {
    pub in_tau: bool,
    pub in_sigma: bool,
}

pub fn membership(cone: &ConeDescriptor, p: f64, q: f64, nu: f64) -> ParamSetMembership {
    ParamSetMembership { in_tau: in_tau(cone, p, q, nu), in_sigma: in_sigma(cone, nu, p) }
}

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Whether `Delta^{-alpha}((z - i e) / i)` lies in `L^{pp, qq}_nu`, with
/// `pp, qq` in `[1, inf]`.
///
/// The inner `L^pp` norm in `x` is `C Delta^{-alpha + n/(r pp)}(y + e)` when
/// `pp alpha > g0* + n/r`; the outer integral then converges under the
/// `s > g0`, `s + beta < -g0*` reading. For `qq = inf` no weight is applied.
pub fn kernel_mixed_integrable(cone: &ConeDescriptor, alpha: f64, pp: f64, qq: f64, nu: f64) -> bool {
    let r = cone.r();
    let nr = cone.n_over_r();
    let inner = if pp.is_infinite() {
        -alpha
    } else {
        if !j_alpha_converges(cone, &MultiIndex::scalar(r, pp * alpha)) {
            return false;
        }
        -alpha + nr / pp
    };
    if qq.is_infinite() {
        return inner <= 0.0;
    }
    lemma4_2_converges(cone, &MultiIndex::scalar(r, qq * inner), &MultiIndex::scalar(r, nu))
}

/// `(nu, p) in sigma`: `nu > n/r - 1` and `Delta^{-(nu + n/r)}((z - i e)/i) in L^{p'}_nu`.
pub fn in_sigma(cone: &ConeDescriptor, nu: f64, p: f64) -> bool {
    if !(nu > cone.n_over_r() - 1.0 && p >= 1.0 && p.is_finite()) {
        return false;
    }
    let pp = conjugate(p);
    kernel_mixed_integrable(cone, nu + cone.n_over_r(), pp, pp, nu)
}

/// `(p, q, nu) in tau`: `B_nu(., i e) in L^{p', q'}_nu`.
pub fn in_tau(cone: &ConeDescriptor, p: f64, q: f64, nu: f64) -> bool {
    if !(p >= 1.0 && q >= 1.0 && p.is_finite() && q.is_finite()) {
        return false;
    }
    kernel_mixed_integrable(cone, nu + cone.n_over_r(), conjugate(p), conjugate(q), nu)
}

/// "`beta` sufficiently large": `B_{beta - margin}(., i e) in L^{p', q'}_nu`.
pub fn beta_large_enough(cone: &ConeDescriptor, beta: f64, p: f64, q: f64, nu: f64, margin: f64) -> bool {
    kernel_mixed_integrable(cone, beta - margin + cone.n_over_r(), conjugate(p), conjugate(q), nu)
}

/// First tuple on the grid that satisfies all three conditions.
pub fn search_admissible(
    cone: &ConeDescriptor,
    m: usize,
    p_grid: &[f64],
    nu_grid: &[f64],
    beta_grid: &[f64],
) -> Option<OperatorParams> {
    for &p in p_grid {
        for &nu in nu_grid {
            for &b_lo in beta_grid {
                for &b_hi in beta_grid {
                    if b_hi < b_lo {
                        continue;
                    }
                    let mut beta = vec![b_hi; m];
                    beta[0] = b_lo;
                    let Ok(params) = OperatorParams::new(cone, beta, vec![nu; m], p) else { continue };
                    if params.admissible() {
                        return Some(params);
                    }
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Operators

fn check_cone(cone: &ConeDescriptor, f: &dyn TubeFunction) -> Result<()> {
    if f.cone() != cone {
        return Err(ConeError::Config(format!("function lives on {} but the operator on {cone}", f.cone())));
    }
    Ok(())
}

fn tube_spec(cone: &ConeDescriptor, spec: &QuadratureSpec, points: &[&TubePoint], hint: f64) -> QuadratureSpec {
    let r = cone.r() as f64;
    let mean = points.iter().map(|z| cone.trace(z.y.coords()) / r).sum::<f64>() / points.len().max(1) as f64;
    spec.clone().with_scale(spec.scale * 0.5 * (mean + hint))
}

fn point_checked(cone: &ConeDescriptor, z: &TubePoint) -> Result<()> {
    crate::error::check_len(cone.n(), z.x.len())?;
    crate::error::check_len(cone.n(), z.y.len())?;
    if !cone.contains(z.y.coords()) {
        return Err(ConeError::Domain(format!("{z} is not in the tube")));
    }
    Ok(())
}

/// `prod_j Delta^{-a_j}((z_j - conj(z)) / i) Delta^{b - n/r}(y)` at `z = x + i y`.
#[inline]
fn kernel_weight(cone: &ConeDescriptor, zs: &[TubePoint], a: &[f64], b: f64, x: &[f64], y: &[f64]) -> Cx {
    let n = cone.n();
    let r = cone.r();
    let mut w = [Cx::new(0.0, 0.0); MAX_DIM];
    let mut acc = Cx::new(1.0, 0.0);
    for (zj, &aj) in zs.iter().zip(a) {
        kernel_arg(&zj.x, zj.y.coords(), x, y, &mut w[..n]);
        acc *= ppow(cdet(cone, &w[..n]), -aj);
    }
    let e = [b - cone.n_over_r(); 2];
    acc * cone.power(&e[..r], y, false)
}

fn tube_integral(
    cone: &ConeDescriptor,
    center: &[f64],
    spec: &QuadratureSpec,
    f: impl Fn(&[f64], &[f64]) -> Cx,
) -> Result<IntegralEstimate<Cx>> {
    let n = cone.n();
    let est = integrate(&Region::tube(cone, center), |t: &[f64]| f(&t[..n], &t[n..]), spec)?;
    if !(est.value.re.is_finite() && est.value.im.is_finite()) {
        return Err(ConeError::Quadrature("operator integral is not finite".into()));
    }
    Ok(est)
}

/// `P_nu f(z) = int B_nu(z, w) f(w) Delta^{nu - n/r}(Im w) dV(w)`.
pub fn bergman_project(
    cone: &ConeDescriptor,
    nu: f64,
    f: &dyn TubeFunction,
    z: &TubePoint,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<Cx>> {
    if !(nu > cone.n_over_r() - 1.0) {
        return Err(ConeError::Domain(format!("Bergman weight nu = {nu} must exceed n/r - 1")));
    }
    check_cone(cone, f)?;
    point_checked(cone, z)?;
    let zs = std::slice::from_ref(z);
    let a = [nu + cone.n_over_r()];
    let sp = tube_spec(cone, spec, &[z], f.scale_hint());
    tube_integral(cone, &f.center(), &sp, |x, y| f.value(x, y) * kernel_weight(cone, zs, &a, nu, x, y))
}

/// `P_nu f`, evaluated by quadrature at every point it is asked for.
pub struct Projected<'a> {
    pub f: &'a dyn TubeFunction,
    pub nu: f64,
    pub spec: QuadratureSpec,
}

impl TubeFunction for Projected<'_> {
    fn cone(&self) -> &ConeDescriptor {
        self.f.cone()
    }

    fn value(&self, x: &[f64], y: &[f64]) -> Cx {
        let z = TubePoint { x: x.to_vec(), y: crate::jordan::AlgebraElement::new(y.to_vec()) };
        bergman_project(self.f.cone(), self.nu, self.f, &z, &self.spec)
            .map_or(Cx::new(f64::NAN, f64::NAN), |e| e.value)
    }

    fn center(&self) -> Vec<f64> {
        self.f.center()
    }

    fn scale_hint(&self) -> f64 {
        self.f.scale_hint()
    }
}

fn check_tuple(params: &OperatorParams, fs: &[&dyn TubeFunction], zs: &[TubePoint]) -> Result<()> {
    crate::error::check_len(params.m(), fs.len())?;
    crate::error::check_len(params.m(), zs.len())?;
    for f in fs {
        check_cone(&params.cone, *f)?;
    }
    for z in zs {
        point_checked(&params.cone, z)?;
    }
    Ok(())
}

fn multi_integral(
    params: &OperatorParams,
    fs: &[&dyn TubeFunction],
    zs: &[TubePoint],
    spec: &QuadratureSpec,
    product: impl Fn(&[f64], &[f64]) -> Cx,
) -> Result<IntegralEstimate<Cx>> {
    let cone = &params.cone;
    let a = params.kernel_exponents();
    let b = params.beta_mean();
    let hint = fs.iter().map(|f| f.scale_hint()).sum::<f64>() / fs.len() as f64;
    let refs: Vec<&TubePoint> = zs.iter().collect();
    let sp = tube_spec(cone, spec, &refs, hint);
    tube_integral(cone, &fs[0].center(), &sp, |x, y| product(x, y) * kernel_weight(cone, zs, &a, b, x, y))
}

/// `T_beta(f)(z_1, ..., z_m)`.
pub fn t_beta_apply(
    params: &OperatorParams,
    fs: &[&dyn TubeFunction],
    zs: &[TubePoint],
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<Cx>> {
    check_tuple(params, fs, zs)?;
    multi_integral(params, fs, zs, spec, |x, y| fs.iter().map(|f| f.value(x, y)).product())
}

/// Which `S_{beta,k}` to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SIndex {
    /// Zero-based `k`.
    One(usize),
    All,
}

/// `S_{beta,k}`: `T_beta` with every factor but the k-th replaced by
/// `P_{nu_j} f_j`, which is computed by quadrature with `inner`. `All` sums
/// the `m` terms inside a single integral.
pub fn s_beta_apply(
    params: &OperatorParams,
    k: SIndex,
    fs: &[&dyn TubeFunction],
    zs: &[TubePoint],
    spec: &QuadratureSpec,
    inner: &QuadratureSpec,
) -> Result<IntegralEstimate<Cx>> {
    check_tuple(params, fs, zs)?;
    let m = params.m();
    if let SIndex::One(k) = k {
        if k >= m {
            return Err(ConeError::OutOfRange { index: k + 1, max: m });
        }
    }
    for &nu in &params.nu {
        if !(nu > params.cone.n_over_r() - 1.0) {
            return Err(ConeError::Domain(format!("projection weight nu = {nu} must exceed n/r - 1")));
        }
    }
    let projected: Vec<Projected> =
        fs.iter().zip(&params.nu).map(|(f, &nu)| Projected { f: *f, nu, spec: inner.clone() }).collect();
    multi_integral(params, fs, zs, spec, |x, y| {
        let direct: Vec<Cx> = fs.iter().map(|f| f.value(x, y)).collect();
        let proj: Vec<Cx> = if m > 1 { projected.iter().map(|p| p.value(x, y)).collect() } else { Vec::new() };
        let term = |k: usize| -> Cx {
            (0..m).map(|j| if j == k { direct[j] } else { proj[j] }).product()
        };
        match k {
            SIndex::One(k) => term(k),
            SIndex::All => (0..m).map(term).sum(),
        }
    })
}

// ---------------------------------------------------------------------------
// Norm-ratio experiments

/// The inequalities probed by [`norm_ratio_experiment`]. Ratios are of the
/// integrals as stated (p-th powers of norms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSuite {
    /// `T_beta` from `prod L^p_{m nu_k + (m-1) n/r}` to `L^p(prod Delta^{nu_k - n/r} dV(z_k))`.
    Thm1,
    /// `S_beta` from `prod L^p_{nu_j}` to the same target.
    Thm7,
    /// `int prod |f_k|^p Delta^{(m-1) n/r + sum nu - n/r} dV <= C prod ||f_k||^p_{A^p_{nu_k}}`.
    Lemma7,
    /// `||P_nu f||^{kp}_{L^{kp}_{k nu + (k-1) n/r}} <= C ||f||^{kp}_{L^p_nu}`.
    Prop1 { k: u32 },
    /// `int prod |P f_k|^{lp} Delta^{l nu_k + l n/r} dV / Delta^{2n/r} <= C prod ||f_k||^{lp}`.
    Prop2 { l: u32 },
    /// `int |box(f_1...f_m)|^q prod |f_j|^{p-q} Delta^{m(nu + n/r) + q} dV / Delta^{2n/r}
    /// <= C m^q prod ||f_j||^p_{A^p_nu}`.
    Boxes { q: f64 },
}

impl NormSuite {
    pub fn id(&self) -> &'static str {
        match self {
            NormSuite::Thm1 => "thm1",
            NormSuite::Thm7 => "thm7",
            NormSuite::Lemma7 => "lemma7",
            NormSuite::Prop1 { .. } => "prop1",
            NormSuite::Prop2 { .. } => "prop2",
            NormSuite::Boxes { .. } => "boxes",
        }
    }
}

impl FromStr for NormSuite {
    type Err = ConeError;

    /// `thm1`, `thm5`, `thm7`, `lemma7`, `prop1[:k]`, `prop2[:l]`, `boxes[:q]`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
        let num = |default: f64| -> Result<f64> {
            arg.map_or(Ok(default), |a| {
                a.trim().parse::<f64>().map_err(|_| ConeError::Config(format!("bad suite argument {a:?}")))
            })
        };
        Ok(match head.trim() {
            "thm1" | "thm5" => NormSuite::Thm1,
            "thm7" => NormSuite::Thm7,
            "lemma7" => NormSuite::Lemma7,
            "prop1" => NormSuite::Prop1 { k: num(2.0)? as u32 },
            "prop2" => NormSuite::Prop2 { l: num(1.0)? as u32 },
            "boxes" => NormSuite::Boxes { q: num(1.0)? },
            other => return Err(ConeError::Config(format!("unknown norm suite {other:?}"))),
        })
    }
}

/// A weighted integral `int |g|^p Delta^{mu - n/r}(y) dV` with its divergence flag.
struct Side {
    value: f64,
    divergent: bool,
}

impl Side {
    fn one() -> Self {
        Side { value: 1.0, divergent: false }
    }

    fn times(self, other: Side) -> Side {
        Side { value: self.value * other.value, divergent: self.divergent || other.divergent }
    }

    fn pow(self, e: f64) -> Side {
        Side { value: self.value.powf(e), divergent: self.divergent }
    }
}

/// `int |f|^p Delta^{mu - n/r}(Im z) dV(z)`.
fn lp_power(f: &dyn TubeFunction, p: f64, mu: f64, spec: &QuadratureSpec) -> Result<Side> {
    let cone = f.cone();
    let res = spaces::mixed_norm(f, p, p, &MultiIndex::scalar(cone.r(), mu), spec)?;
    Ok(Side { value: res.value.powf(p), divergent: res.diverged })
}

fn kernel_side(f: &TestFunction, p: f64, mu: f64, spec: &QuadratureSpec) -> Result<Side> {
    let mut side = lp_power(f, p, mu, spec)?;
    if let spaces::Family::Kernel { mu: a, .. } = &f.family {
        side.divergent |= !kernel_mixed_integrable(&f.cone, *a, p, p, mu);
    }
    Ok(side)
}

/// `P_nu f / f` at two points of the tube; they should agree for analytic `f`.
fn projection_constant(f: &TestFunction, nu: f64, spec: &QuadratureSpec) -> Result<(Cx, f64)> {
    let cone = &f.cone;
    let base = match &f.family {
        spaces::Family::Kernel { w, .. } => w.clone(),
        _ => TubePoint::imaginary(cone, cone.identity().scale(f.scale_hint()))?,
    };
    let z1 = TubePoint { x: base.x.clone(), y: base.y.clone() };
    let mut x2 = base.x.clone();
    x2[0] += 0.5 * f.scale_hint();
    let z2 = TubePoint { x: x2, y: base.y.scale(1.5) };
    let c1 = bergman_project(cone, nu, f, &z1, spec)?.value / f.eval(&z1)?;
    let c2 = bergman_project(cone, nu, f, &z2, spec)?.value / f.eval(&z2)?;
    Ok((c1, (c1 - c2).norm() / c1.norm()))
}

fn common_kernel_center(params: &OperatorParams, tuple: &[TestFunction]) -> Result<TubePoint> {
    let a = params.kernel_exponents();
    let mut center: Option<&TubePoint> = None;
    for (f, &aj) in tuple.iter().zip(&a) {
        match &f.family {
            spaces::Family::Kernel { w, mu, .. } if (mu - aj).abs() < 1e-12 => match center {
                None => center = Some(w),
                Some(c) if c == w => {}
                _ => return Err(ConeError::Config("kernel tuple members must share their centre".into())),
            },
            _ => {
                return Err(ConeError::Config(
                    "the T_beta suites need tuples from OperatorParams::kernel_tuple".into(),
                ))
            }
        }
    }
    center.cloned().ok_or_else(|| ConeError::Config("empty tuple".into()))
}

/// Finds the constant `C` of `T_beta f (z_1..z_m) = C prod f_j(z_j)` at `z_j = w`.
fn t_beta_constant(params: &OperatorParams, tuple: &[TestFunction], spec: &QuadratureSpec) -> Result<Cx> {
    let w = common_kernel_center(params, tuple)?;
    let refs: Vec<&dyn TubeFunction> = tuple.iter().map(|f| f as &dyn TubeFunction).collect();
    let zs = vec![w.clone(); params.m()];
    let t = t_beta_apply(params, &refs, &zs, spec)?;
    let prod: Cx = tuple.iter().map(|f| f.eval(&w)).collect::<Result<Vec<_>>>()?.into_iter().product();
    Ok(t.value / prod)
}

/// Weighted integral of a real nonnegative density `h(x, y)` against `Delta^{mu - n/r}`.
fn density_integral(
    cone: &ConeDescriptor,
    center: Vec<f64>,
    hint: f64,
    mu: f64,
    spec: &QuadratureSpec,
    h: impl Fn(&[f64], &[f64]) -> f64,
) -> Result<Side> {
    let g = spaces::Sampled { cone: cone.clone(), f: |x: &[f64], y: &[f64]| Cx::new(h(x, y), 0.0), scale: hint };
    let centred = Centred { inner: g, center };
    lp_power(&centred, 1.0, mu, spec)
}

struct Centred<F> {
    inner: spaces::Sampled<F>,
    center: Vec<f64>,
}

impl<F: Fn(&[f64], &[f64]) -> Cx> TubeFunction for Centred<F> {
    fn cone(&self) -> &ConeDescriptor {
        &self.inner.cone
    }
    fn value(&self, x: &[f64], y: &[f64]) -> Cx {
        self.inner.value(x, y)
    }
    fn center(&self) -> Vec<f64> {
        self.center.clone()
    }
    fn scale_hint(&self) -> f64 {
        self.inner.scale
    }
}

fn tuple_hint(tuple: &[TestFunction]) -> f64 {
    tuple.iter().map(|f| f.scale_hint()).sum::<f64>() / tuple.len() as f64
}

/// `(LHS, RHS)` of the suite's inequality for one tuple at one scale.
fn suite_sides(
    suite: NormSuite,
    params: &OperatorParams,
    tuple: &[TestFunction],
    spec: &QuadratureSpec,
    notes: &mut Vec<String>,
) -> Result<(Side, Side)> {
    let cone = &params.cone;
    let nr = cone.n_over_r();
    let (m, p) = (params.m() as f64, params.p);
    match suite {
        NormSuite::Thm1 => {
            let c = t_beta_constant(params, tuple, spec)?;
            let mut lhs = Side { value: c.norm().powf(p), divergent: false };
            let mut rhs = Side::one();
            for (f, &nu) in tuple.iter().zip(&params.nu) {
                lhs = lhs.times(kernel_side(f, p, nu, spec)?);
                rhs = rhs.times(kernel_side(f, p, m * nu + (m - 1.0) * nr, spec)?);
            }
            Ok((lhs, rhs))
        }
        NormSuite::Thm7 => {
            let c = t_beta_constant(params, tuple, spec)?;
            let mut consts = Vec::with_capacity(tuple.len());
            for (f, &nu) in tuple.iter().zip(&params.nu) {
                let (cj, spread) = projection_constant(f, nu, spec)?;
                if spread > 1e-2 {
                    notes.push(format!("{}: P_nu f / f varies by {spread:.2e}", f.describe()));
                }
                consts.push(cj);
            }
            let s_const: Cx = (0..tuple.len())
                .map(|k| consts.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, c)| *c).product::<Cx>())
                .sum();
            let mut lhs = Side { value: (c * s_const).norm().powf(p), divergent: false };
            let mut rhs = Side::one();
            for (f, &nu) in tuple.iter().zip(&params.nu) {
                let side = kernel_side(f, p, nu, spec)?;
                lhs = lhs.times(Side { value: side.value, divergent: side.divergent });
                rhs = rhs.times(side);
            }
            Ok((lhs, rhs))
        }
        NormSuite::Lemma7 => {
            let mu = (m - 1.0) * nr + params.nu.iter().sum::<f64>();
            let lhs = density_integral(cone, tuple[0].center(), tuple_hint(tuple), mu, spec, |x, y| {
                tuple.iter().map(|f| f.value(x, y).norm().powf(p)).product()
            })?;
            let mut rhs = Side::one();
            for (f, &nu) in tuple.iter().zip(&params.nu) {
                rhs = rhs.times(lp_power(f, p, nu, spec)?);
            }
            Ok((lhs, rhs))
        }
        NormSuite::Prop1 { k } => {
            let (f, nu, k) = (&tuple[0], params.nu[0], k as f64);
            let (c, spread) = projection_constant(f, nu, spec)?;
            if spread > 1e-2 {
                notes.push(format!("{}: P_nu f / f varies by {spread:.2e}", f.describe()));
            }
            let pf = f.scaled(c);
            let lhs = lp_power(&pf, k * p, k * nu + (k - 1.0) * nr, spec)?;
            let rhs = lp_power(f, p, nu, spec)?.pow(k);
            Ok((lhs, rhs))
        }
        NormSuite::Prop2 { l } => {
            let l = l as f64;
            let mut projected = Vec::with_capacity(tuple.len());
            for (f, &nu) in tuple.iter().zip(&params.nu) {
                let (c, spread) = projection_constant(f, nu, spec)?;
                if spread > 1e-2 {
                    notes.push(format!("{}: P_nu f / f varies by {spread:.2e}", f.describe()));
                }
                projected.push(f.scaled(c));
            }
            let mu = l * params.nu.iter().sum::<f64>() + (l * m - 1.0) * nr;
            let lhs = density_integral(cone, tuple[0].center(), tuple_hint(tuple), mu, spec, |x, y| {
                projected.iter().map(|f| f.value(x, y).norm().powf(l * p)).product()
            })?;
            let mut rhs = Side::one();
            for (f, &nu) in tuple.iter().zip(&params.nu) {
                rhs = rhs.times(lp_power(f, p, nu, spec)?.pow(l));
            }
            Ok((lhs, rhs))
        }
        NormSuite::Boxes { q } => {
            let nu = params.nu[0];
            if !(1.0 <= q && q <= p) {
                return Err(ConeError::Domain(format!("boxes needs 1 <= q <= p, got q = {q}, p = {p}")));
            }
            let refs: Vec<&dyn TubeFunction> = tuple.iter().map(|f| f as &dyn TubeFunction).collect();
            let mu = m * (nu + nr) + q - nr;
            let hint = tuple_hint(tuple);
            let lhs = density_integral(cone, tuple[0].center(), hint, mu, spec, |x, y| {
                let r = cone.r() as f64;
                let h = 1e-3 * cone.trace(y) / r;
                let z = TubePoint { x: x.to_vec(), y: crate::jordan::AlgebraElement::new(y.to_vec()) };
                let b = spaces::box_product(&refs, &z, h).map_or(f64::NAN, |v| v.norm());
                let rest: f64 = refs.iter().map(|f| f.value(x, y).norm().powf(p - q)).product();
                b.powf(q) * rest
            })?;
            let mut rhs = Side { value: m.powf(q), divergent: false };
            for f in tuple {
                rhs = rhs.times(lp_power(f, p, nu, spec)?);
            }
            Ok((lhs, rhs))
        }
    }
}

fn expectation(suite: NormSuite, params: &OperatorParams) -> Expectation {
    let cone = &params.cone;
    let nr = cone.n_over_r();
    let weights_ok = params.nu.iter().all(|&nu| nu > nr - 1.0);
    match suite {
        NormSuite::Thm1 => {
            if params.admissible() {
                Expectation::Bounded
            } else {
                Expectation::Divergent
            }
        }
        NormSuite::Thm7 => {
            let sigma = params.nu.iter().all(|&nu| in_sigma(cone, nu, params.p));
            if params.admissible() && sigma {
                Expectation::Bounded
            } else {
                Expectation::NoClaim
            }
        }
        NormSuite::Lemma7 | NormSuite::Boxes { .. } if weights_ok => Expectation::Bounded,
        NormSuite::Prop1 { .. } | NormSuite::Prop2 { .. }
            if params.nu.iter().all(|&nu| in_sigma(cone, nu, params.p)) =>
        {
            Expectation::Bounded
        }
        _ => Expectation::NoClaim,
    }
}

/// Ratios `LHS / RHS` of the suite's inequality over the sample and a dilation
/// sweep `f -> f(. / lambda)`.
///
/// Each sample entry is an m-tuple (a single function for `prop1`). The
/// `thm1`/`thm7` suites need kernel tuples from [`OperatorParams::kernel_tuple`]:
/// on them `T_beta f = C prod f_j(z_j)`, so the target norm factorises into
/// one-variable norms, with `C` measured by [`t_beta_apply`] at every scale.
/// `pass` compares the observed signature with what the hypotheses predict.
pub fn norm_ratio_experiment(
    suite: NormSuite,
    params: &OperatorParams,
    sample: &[Vec<TestFunction>],
    scales: &[f64],
    spec: &QuadratureSpec,
) -> Result<ExperimentResult> {
    if sample.is_empty() {
        return Err(ConeError::Config("function sample is empty".into()));
    }
    let arity = if matches!(suite, NormSuite::Prop1 { .. }) { 1 } else { params.m() };
    for t in sample {
        crate::error::check_len(arity, t.len())?;
        for f in t {
            check_cone(&params.cone, f)?;
        }
    }
    let mut result = ExperimentResult::new(
        suite.id(),
        format!("{params} suite={suite:?} c1={} c2={} c3={}", params.c1(), params.c2(), params.c3()),
        scales,
    );
    result.expectation = expectation(suite, params);
    let mut notes = Vec::new();
    for tuple in sample {
        let mut row = Vec::with_capacity(scales.len());
        let mut div = false;
        for &lambda in scales {
            let dilated: Vec<TestFunction> = tuple.iter().map(|f| f.dilate(lambda)).collect();
            let (lhs, rhs) = suite_sides(suite, params, &dilated, spec, &mut notes)?;
            div |= lhs.divergent || rhs.divergent;
            row.push(lhs.value / rhs.value);
        }
        let label = tuple.iter().map(|f| f.describe()).collect::<Vec<_>>().join(" x ");
        result.push_row(label, row, div);
    }
    result.notes.extend(notes);
    result.finish_slopes();
    Ok(result)
}

// ---------------------------------------------------------------------------
// Reproducing formulas

/// The reproducing formulas checked by [`reproducing_ratio_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReproFormula {
    /// `P f(z_1) P f(z_2) = C int f P f Delta^{beta - n/r} / (Delta^a((z_1 - conj z)/i) Delta^a((z_2 - conj z)/i)) dV`.
    Repr1,
    /// `prod f_j(z_j) = C T_beta(f)(z_1, ..., z_m)`.
    Repr2,
    /// `prod P_{nu_k} f_k(z_k) = C S_{beta,k}(f)(z_1, ..., z_m)`, zero-based `k`.
    Prod { k: usize },
    /// As `Repr1`, under the `(nu, p) in sigma` hypothesis.
    Rep,
}

impl ReproFormula {
    pub fn id(&self) -> &'static str {
        match self {
            ReproFormula::Repr1 => "repr1",
            ReproFormula::Repr2 => "repr2",
            ReproFormula::Prod { .. } => "prod",
            ReproFormula::Rep => "rep",
        }
    }
}

impl FromStr for ReproFormula {
    type Err = ConeError;

    /// `repr1`, `repr2`, `prod[:k]` (one-based), `rep`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
        Ok(match head.trim() {
            "repr1" => ReproFormula::Repr1,
            "repr2" => ReproFormula::Repr2,
            "rep" => ReproFormula::Rep,
            "prod" => {
                let k: usize = arg.map_or(Ok(1), |a| {
                    a.trim().parse().map_err(|_| ConeError::Config(format!("bad formula index {a:?}")))
                })?;
                if k == 0 {
                    return Err(ConeError::Config("prod index is one-based".into()));
                }
                ReproFormula::Prod { k: k - 1 }
            }
            other => return Err(ConeError::Config(format!("unknown reproducing formula {other:?}"))),
        })
    }
}

/// An estimate whose two resolutions differ by more than 10%.
fn unstable(e: &IntegralEstimate<Cx>) -> bool {
    !(e.rel_error() <= 0.1)
}

/// `unstable`, except that a tensor estimate is first recomputed at three
/// quarters of the nodes; agreement within 2% clears it. Halving is too crude
/// on the small rules used for tube integrals.
fn unstable_after_recheck(
    e: &IntegralEstimate<Cx>,
    spec: &QuadratureSpec,
    recompute: impl FnOnce(&QuadratureSpec) -> Result<IntegralEstimate<Cx>>,
) -> Result<bool> {
    if !unstable(e) || spec.scheme != Scheme::TensorGauss || !e.value.is_finite() || e.value.norm() == 0.0 {
        return Ok(unstable(e));
    }
    let closer = recompute(&QuadratureSpec { nodes: spec.nodes * 3 / 4, ..spec.clone() })?;
    Ok(((e.value - closer.value) / e.value).norm() > 0.02)
}

/// `(n/r + beta) / 2`, the exponent of each kernel factor in the two-point formula.
pub fn two_point_exponent(cone: &ConeDescriptor, beta: f64) -> f64 {
    (cone.n_over_r() + beta) / 2.0
}

/// Ratios `RHS integral / LHS product` over the point tuples.
///
/// `Repr1`/`Rep` use `f[0]`, `params.nu[0]` and `params.beta[0]`, with `P f`
/// inside the integral computed by nested quadrature at `inner`. `pass` is
/// coefficient of variation of the complex ratios below `tol`. Tuples whose
/// LHS vanishes are skipped.
#[allow(clippy::too_many_arguments)]
pub fn reproducing_ratio_check(
    formula: ReproFormula,
    params: &OperatorParams,
    fs: &[&dyn TubeFunction],
    z_tuples: &[Vec<TubePoint>],
    spec: &QuadratureSpec,
    inner: &QuadratureSpec,
    tol: f64,
) -> Result<ExperimentResult> {
    let cone = &params.cone;
    if fs.is_empty() {
        return Err(ConeError::Config("no functions supplied".into()));
    }
    let mut result = ExperimentResult::new(formula.id(), format!("{params} formula={formula:?}"), &[]);
    let two_point = matches!(formula, ReproFormula::Repr1 | ReproFormula::Rep);
    if formula == ReproFormula::Rep && !in_sigma(cone, params.nu[0], params.p) {
        result.note(format!("(nu, p) = ({}, {}) is not in sigma", params.nu[0], params.p));
    }
    let mut values = Vec::new();
    for zs in z_tuples {
        let label = zs.iter().map(|z| z.to_string()).collect::<Vec<_>>().join(" ");
        let (lhs, rhs, div) = if two_point {
            crate::error::check_len(2, zs.len())?;
            let (f, nu, beta) = (fs[0], params.nu[0], params.beta[0]);
            check_cone(cone, f)?;
            let p1 = bergman_project(cone, nu, f, &zs[0], inner)?;
            let p2 = bergman_project(cone, nu, f, &zs[1], inner)?;
            let pf = Projected { f, nu, spec: inner.clone() };
            let two = OperatorParams::new(cone, vec![beta; 2], vec![nu; 2], params.p)?;
            debug_assert!((two.kernel_exponents()[0] - two_point_exponent(cone, beta)).abs() < 1e-12);
            let rhs = multi_integral(&two, &[f, f], zs, spec, |x, y| f.value(x, y) * pf.value(x, y))?;
            let div = unstable_after_recheck(&p1, inner, |sp| bergman_project(cone, nu, f, &zs[0], sp))?
                || unstable_after_recheck(&p2, inner, |sp| bergman_project(cone, nu, f, &zs[1], sp))?
                || unstable_after_recheck(&rhs, spec, |sp| {
                    multi_integral(&two, &[f, f], zs, sp, |x, y| f.value(x, y) * pf.value(x, y))
                })?;
            (p1.value * p2.value, rhs.value, div)
        } else {
            let m = params.m();
            crate::error::check_len(m, zs.len())?;
            crate::error::check_len(m, fs.len())?;
            match formula {
                ReproFormula::Repr2 => {
                    let lhs: Cx = fs.iter().zip(zs).map(|(f, z)| f.value(&z.x, z.y.coords())).product();
                    let t = t_beta_apply(params, fs, zs, spec)?;
                    let div = unstable_after_recheck(&t, spec, |sp| t_beta_apply(params, fs, zs, sp))?;
                    (lhs, t.value, div)
                }
                ReproFormula::Prod { k } => {
                    let mut lhs = Cx::new(1.0, 0.0);
                    let mut div = false;
                    for ((f, z), &nu) in fs.iter().zip(zs).zip(&params.nu) {
                        let e = bergman_project(cone, nu, *f, z, inner)?;
                        div |= unstable_after_recheck(&e, inner, |sp| bergman_project(cone, nu, *f, z, sp))?;
                        lhs *= e.value;
                    }
                    let t = s_beta_apply(params, SIndex::One(k), fs, zs, spec, inner)?;
                    let div = div
                        || unstable_after_recheck(&t, spec, |sp| {
                            s_beta_apply(params, SIndex::One(k), fs, zs, sp, inner)
                        })?;
                    (lhs, t.value, div)
                }
                _ => unreachable!("two-point formulas handled above"),
            }
        };
        if !(lhs.norm() > 1e-300) {
            result.note(format!("skipped {label}: left side vanishes"));
            continue;
        }
        let ratio = rhs / lhs;
        values.push(ratio);
        result.push_row(label, vec![ratio.norm()], div);
    }
    result.finish_constancy(&values, tol);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::AlgebraElement;

    fn h() -> ConeDescriptor {
        ConeDescriptor::halfline()
    }

    fn l3() -> ConeDescriptor {
        ConeDescriptor::lorentz(3).unwrap()
    }

    fn tp(x: f64, y: f64) -> TubePoint {
        TubePoint::new(&h(), vec![x], AlgebraElement::new(vec![y])).unwrap()
    }

    #[test]
    fn slope_fit() {
        let s = [0.25, 0.5, 1.0, 2.0, 4.0];
        let r: Vec<f64> = s.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((fit_slope(&s, &r) + 1.5).abs() < 1e-12);
        assert!(fit_slope(&s, &[1.0, 2.0, -1.0, 1.0, 1.0]).is_nan());
    }

    #[test]
    fn conditions_on_the_halfline() {
        let p = OperatorParams::new(&h(), vec![6.0, 6.0], vec![3.0, 3.0], 1.0).unwrap();
        assert!(p.c1());
        assert!(p.c2(), "division by zero reads as +inf");
        assert!(!p.c3());
        let neg = OperatorParams::new(&h(), vec![6.0, 6.0], vec![-0.5, 3.0], 1.0).unwrap();
        assert!(!neg.c2());
    }

    #[test]
    fn conditions_on_lorentz() {
        let ok = OperatorParams::new(&l3(), vec![4.0, 4.0], vec![2.0, 2.0], 1.5).unwrap();
        // 1 + 2 (2 / 0.5 - 1) = 7.
        assert!(ok.c1() && ok.c2());
        let big_p = OperatorParams::new(&l3(), vec![4.0, 4.0], vec![2.0, 2.0], 7.5).unwrap();
        assert!(!big_p.c2());
        assert!(search_admissible(&l3(), 2, &[1.0, 1.5, 2.0, 4.0], &[0.6, 1.0, 2.0, 5.0], &[0.0, 2.0, 8.0, 32.0])
            .is_none());
    }

    #[test]
    fn sigma_and_tau() {
        assert!(in_sigma(&h(), 1.0, 2.0));
        assert!(in_sigma(&h(), 1.0, 1.0));
        assert!(!in_sigma(&h(), -0.5, 2.0));
        assert!(in_tau(&h(), 2.0, 2.0, 1.0));
        assert!(in_sigma(&l3(), 1.0, 2.0));
    }

    #[test]
    fn projection_reproduces_kernels() {
        let f = TestFunction::kernel_at(&h(), &[1.0], 3.0).unwrap();
        let spec = QuadratureSpec::gauss(48);
        let mut ratios = Vec::new();
        for z in [tp(0.0, 1.0), tp(0.5, 2.0), tp(-1.0, 0.5), tp(2.0, 1.5), tp(0.3, 0.7)] {
            let pf = bergman_project(&h(), 1.0, &f, &z, &spec).unwrap();
            ratios.push(pf.value / f.eval(&z).unwrap());
        }
        for r in &ratios {
            assert!((r / ratios[0] - 1.0).norm() < 1e-2, "{ratios:?}");
        }
    }

    #[test]
    fn m1_reduces_to_projection() {
        let f = TestFunction::kernel_at(&h(), &[1.0], 3.0).unwrap();
        let params = OperatorParams::new(&h(), vec![2.0], vec![2.0], 2.0).unwrap();
        let spec = QuadratureSpec::gauss(32);
        let z = tp(0.4, 0.8);
        let t = t_beta_apply(&params, &[&f], std::slice::from_ref(&z), &spec).unwrap();
        let p = bergman_project(&h(), 2.0, &f, &z, &spec).unwrap();
        assert!((t.value - p.value).norm() <= 1e-12 * p.value.norm() + t.error_estimate + p.error_estimate);
    }

    #[test]
    fn t_beta_factorises_on_kernel_tuples() {
        let params = OperatorParams::new(&h(), vec![6.0, 6.0], vec![3.0, 3.0], 1.0).unwrap();
        let tuple = params.kernel_tuple(&tp(0.0, 1.0)).unwrap();
        let refs: Vec<&dyn TubeFunction> = tuple.iter().map(|f| f as &dyn TubeFunction).collect();
        let spec = QuadratureSpec::gauss(48);
        let pairs = [(tp(0.0, 1.0), tp(0.5, 2.0)), (tp(-1.0, 0.5), tp(1.0, 1.0)), (tp(2.0, 3.0), tp(0.0, 0.4))];
        let mut ratios = Vec::new();
        for (a, b) in pairs {
            let t = t_beta_apply(&params, &refs, &[a.clone(), b.clone()], &spec).unwrap().value;
            ratios.push(t / (tuple[0].eval(&a).unwrap() * tuple[1].eval(&b).unwrap()));
        }
        for r in &ratios {
            assert!((r / ratios[0] - 1.0).norm() < 1e-2, "{ratios:?}");
        }
        let (a, b) = (tp(0.3, 1.0), tp(-0.7, 2.0));
        let ab = t_beta_apply(&params, &refs, &[a.clone(), b.clone()], &spec).unwrap().value;
        let ba = t_beta_apply(&params, &refs, &[b, a], &spec).unwrap().value;
        assert!((ab - ba).norm() < 1e-10 * ab.norm());
    }

    #[test]
    fn s_beta_additivity() {
        let params = OperatorParams::new(&h(), vec![6.0, 6.0], vec![1.0, 1.0], 2.0).unwrap();
        let tuple = params.kernel_tuple(&tp(0.0, 1.0)).unwrap();
        let refs: Vec<&dyn TubeFunction> = tuple.iter().map(|f| f as &dyn TubeFunction).collect();
        let (spec, inner) = (QuadratureSpec::gauss(16), QuadratureSpec::gauss(12));
        let zs = [tp(0.2, 1.0), tp(-0.3, 1.5)];
        let s1 = s_beta_apply(&params, SIndex::One(0), &refs, &zs, &spec, &inner).unwrap().value;
        let s2 = s_beta_apply(&params, SIndex::One(1), &refs, &zs, &spec, &inner).unwrap().value;
        let all = s_beta_apply(&params, SIndex::All, &refs, &zs, &spec, &inner).unwrap().value;
        assert!((all - s1 - s2).norm() < 1e-10 * all.norm());
    }

    #[test]
    fn suite_ids_parse() {
        assert_eq!("thm5".parse::<NormSuite>().unwrap(), NormSuite::Thm1);
        assert_eq!("prop1:3".parse::<NormSuite>().unwrap(), NormSuite::Prop1 { k: 3 });
        assert_eq!("prod:2".parse::<ReproFormula>().unwrap(), ReproFormula::Prod { k: 1 });
        assert!("thm2".parse::<NormSuite>().is_err());
    }

    #[test]
    fn csv_has_a_row_per_cell() {
        let mut r = ExperimentResult::new("x", String::new(), &[1.0, 2.0]);
        r.push_row("f".into(), vec![1.0, 1.01], false);
        r.finish_slopes();
        assert_eq!(r.to_csv().lines().count(), 3);
        assert_eq!(r.signature, Signature::BoundedOnSample);
    }
}
