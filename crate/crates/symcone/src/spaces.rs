//! Holomorphic functions on the tube `T = R^n + i Omega` and their norms.
//!
//! Complex powers use the principal branch factor by factor:
//! `Delta_s(w) = Delta_1(w)^{s_1 - s_2} Delta(w)^{s_2}`. For `w` with real part in
//! the cone, `Delta_1(w)` lies in the right half-plane and `Delta(w)` avoids
//! `(-inf, 0]`, so the principal branch is the holomorphic continuation from the
//! cone. Values on the cut are reported as [`ConeError::BranchCut`].

use std::cell::RefCell;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::conefunc::gamma_closed;
use crate::error::{check_len, ConeError, Result};
use crate::jordan::{check, check_index, in_wallach, AlgebraElement, ConeDescriptor, ConeKind, MultiIndex};
use crate::paleywiener::ProfileFunction;
use crate::quad::{integrate, tensor_level, IntegralEstimate, QuadratureSpec, Region, Scheme, MAX_DIM};

pub(crate) type Cx = Complex64;

const I: Cx = Complex64 { re: 0.0, im: 1.0 };

/// Polynomial determinant of a complex point.
#[inline]
pub(crate) fn cdet(cone: &ConeDescriptor, z: &[Cx]) -> Cx {
    match cone.kind() {
        ConeKind::Halfline => z[0],
        ConeKind::Lorentz => z[0] * z[0] - z[1..].iter().map(|a| a * a).sum::<Cx>(),
    }
}

#[inline]
pub(crate) fn cminor1(cone: &ConeDescriptor, z: &[Cx], rotated: bool) -> Cx {
    match cone.kind() {
        ConeKind::Halfline => z[0],
        ConeKind::Lorentz => {
            let t: Cx = z[1..].iter().zip(cone.frame_direction()).map(|(a, &u)| a * u).sum();
            if rotated {
                z[0] - t
            } else {
                z[0] + t
            }
        }
    }
}

/// Principal `base^e`; NaN when `base` is on the cut and `e` is not an integer.
#[inline]
pub(crate) fn ppow(base: Cx, e: f64) -> Cx {
    if e == 0.0 {
        return Cx::new(1.0, 0.0);
    }
    if base.im == 0.0 && base.re <= 0.0 {
        return Cx::new(f64::NAN, f64::NAN);
    }
    (base.ln() * e).exp()
}

/// `Delta_s(z)` (or `Delta*_s(z)`) without branch reporting.
#[inline]
pub(crate) fn cpow_fast(cone: &ConeDescriptor, z: &[Cx], s: &[f64], rotated: bool) -> Cx {
    match cone.kind() {
        ConeKind::Halfline => ppow(z[0], s[0]),
        ConeKind::Lorentz => {
            let d = ppow(cdet(cone, z), s[1]);
            if s[0] == s[1] {
                d
            } else {
                d * ppow(cminor1(cone, z, rotated), s[0] - s[1])
            }
        }
    }
}

fn on_cut(factor: &'static str, v: Cx) -> Result<()> {
    if v.im == 0.0 && v.re <= 0.0 {
        Err(ConeError::BranchCut { factor, re: v.re, im: v.im })
    } else {
        Ok(())
    }
}

pub fn complex_determinant(cone: &ConeDescriptor, z: &[Cx]) -> Result<Cx> {
    check_len(cone.n(), z.len())?;
    Ok(cdet(cone, z))
}

/// `Delta_k(z)`, or `Delta*_k(z)` with `rotated`.
pub fn complex_minor(cone: &ConeDescriptor, k: usize, z: &[Cx], rotated: bool) -> Result<Cx> {
    check_len(cone.n(), z.len())?;
    if k == 0 || k > cone.r() {
        return Err(ConeError::OutOfRange { index: k, max: cone.r() });
    }
    Ok(if k == cone.r() { cdet(cone, z) } else { cminor1(cone, z, rotated) })
}

fn complex_power_impl(cone: &ConeDescriptor, z: &[Cx], s: &MultiIndex, rotated: bool) -> Result<Cx> {
    check_len(cone.n(), z.len())?;
    check_index(cone, s)?;
    let sv = s.as_slice();
    let d = cdet(cone, z);
    if sv[sv.len() - 1] != 0.0 {
        on_cut("Delta", d)?;
    }
    if cone.r() == 2 && sv[0] != sv[1] {
        on_cut(if rotated { "Delta*_1" } else { "Delta_1" }, cminor1(cone, z, rotated))?;
    }
    Ok(cpow_fast(cone, z, sv, rotated))
}

/// `Delta_s(z)` on complex arguments, principal branch per factor.
pub fn complex_power(cone: &ConeDescriptor, z: &[Cx], s: &MultiIndex) -> Result<Cx> {
    complex_power_impl(cone, z, s, false)
}

/// `Delta*_s(z)` on complex arguments, principal branch per factor.
pub fn complex_power_rotated(cone: &ConeDescriptor, z: &[Cx], s: &MultiIndex) -> Result<Cx> {
    complex_power_impl(cone, z, s, true)
}

/// A point `x + i y` of the tube.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubePoint {
    pub x: Vec<f64>,
    pub y: AlgebraElement,
}

impl TubePoint {
    pub fn new(cone: &ConeDescriptor, x: Vec<f64>, y: AlgebraElement) -> Result<Self> {
        check_len(cone.n(), x.len())?;
        check(cone, &y)?;
        if !cone.contains(y.coords()) {
            return Err(ConeError::Domain(format!("imaginary part {y} is not in the open cone")));
        }
        Ok(TubePoint { x, y })
    }

    /// `i y`.
    pub fn imaginary(cone: &ConeDescriptor, y: AlgebraElement) -> Result<Self> {
        Self::new(cone, vec![0.0; y.len()], y)
    }

    pub fn z(&self) -> Vec<Cx> {
        self.x.iter().zip(self.y.coords()).map(|(&a, &b)| Cx::new(a, b)).collect()
    }

    pub fn scale(&self, lambda: f64) -> Self {
        TubePoint { x: self.x.iter().map(|a| a * lambda).collect(), y: self.y.scale(lambda) }
    }
}

impl fmt::Display for TubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (a, b)) in self.x.iter().zip(self.y.coords()).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}{b:+}i")?;
        }
        write!(f, ")")
    }
}

/// `(z - conj(w)) / i` for `z = zx + i zy`: real part `zy + wy`, imaginary part `wx - zx`.
#[inline]
pub(crate) fn kernel_arg(zx: &[f64], zy: &[f64], wx: &[f64], wy: &[f64], out: &mut [Cx]) {
    for k in 0..out.len() {
        out[k] = Cx::new(zy[k] + wy[k], wx[k] - zx[k]);
    }
}

/// `Delta^{-(nu + n/r)}((z - conj(w)) / i)`, the weighted Bergman kernel with unit constant.
pub fn bergman_kernel(cone: &ConeDescriptor, nu: f64, z: &TubePoint, w: &TubePoint) -> Result<Cx> {
    if !(nu > cone.n_over_r() - 1.0) {
        return Err(ConeError::Domain(format!("Bergman weight nu = {nu} must exceed n/r - 1")));
    }
    let n = cone.n();
    let mut a = [Cx::new(0.0, 0.0); MAX_DIM];
    kernel_arg(&z.x, z.y.coords(), &w.x, w.y.coords(), &mut a[..n]);
    let d = cdet(cone, &a[..n]);
    on_cut("Delta", d)?;
    Ok(ppow(d, -(nu + cone.n_over_r())))
}

/// A holomorphic function on the tube, evaluated at `x + i y`.
pub trait TubeFunction {
    fn cone(&self) -> &ConeDescriptor;
    /// NaN off the domain of definition.
    fn value(&self, x: &[f64], y: &[f64]) -> Cx;
    /// Where the function's mass sits in `x`.
    fn center(&self) -> Vec<f64> {
        vec![0.0; self.cone().n()]
    }
    /// Typical decay length in `x` and `y`, in units of the cone trace per rank.
    fn scale_hint(&self) -> f64 {
        1.0
    }
}

/// A closure viewed as a tube function.
pub struct Sampled<F> {
    pub cone: ConeDescriptor,
    pub f: F,
    pub scale: f64,
}

impl<F: Fn(&[f64], &[f64]) -> Cx> Sampled<F> {
    pub fn new(cone: &ConeDescriptor, f: F) -> Self {
        Sampled { cone: cone.clone(), f, scale: 1.0 }
    }
}

impl<F: Fn(&[f64], &[f64]) -> Cx> TubeFunction for Sampled<F> {
    fn cone(&self) -> &ConeDescriptor {
        &self.cone
    }
    fn value(&self, x: &[f64], y: &[f64]) -> Cx {
        (self.f)(x, y)
    }
    fn scale_hint(&self) -> f64 {
        self.scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Family {
    /// `coef * Delta^{-mu}((z - conj(w)) / i)`.
    Kernel { w: TubePoint, mu: f64, coef: Cx },
    /// Closed-form synthesis of a cone profile with respect to `mu_s`.
    Profile { s: MultiIndex, profile: ProfileFunction },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction {
    pub cone: ConeDescriptor,
    pub family: Family,
}

impl TestFunction {
    pub fn kernel(cone: &ConeDescriptor, w: TubePoint, mu: f64) -> Result<Self> {
        check_len(cone.n(), w.x.len())?;
        Ok(TestFunction { cone: cone.clone(), family: Family::Kernel { w, mu, coef: Cx::new(1.0, 0.0) } })
    }

    /// `Delta^{-mu}((z + i y_w) / i)`, the kernel centred at `i y_w`.
    pub fn kernel_at(cone: &ConeDescriptor, y_w: &[f64], mu: f64) -> Result<Self> {
        Self::kernel(cone, TubePoint::imaginary(cone, AlgebraElement::new(y_w.to_vec()))?, mu)
    }

    pub fn profile(cone: &ConeDescriptor, s: &MultiIndex, profile: ProfileFunction) -> Result<Self> {
        check_index(cone, s)?;
        profile.check(cone)?;
        if !profile.has_closed_form(cone) {
            return Err(ConeError::Config(
                "profile terms need the rotated frame (or scalar exponents) for closed-form synthesis".into(),
            ));
        }
        Ok(TestFunction { cone: cone.clone(), family: Family::Profile { s: s.clone(), profile } })
    }

    pub fn eval(&self, z: &TubePoint) -> Result<Cx> {
        check_len(self.cone.n(), z.x.len())?;
        match &self.family {
            Family::Profile { s, profile } => profile.synthesize_closed(&self.cone, s, &z.x, z.y.coords()),
            Family::Kernel { .. } => {
                let v = self.value(&z.x, z.y.coords());
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(ConeError::BranchCut { factor: "Delta", re: f64::NAN, im: f64::NAN })
                }
            }
        }
    }

    /// `z -> F(z / lambda)` within the same family.
    pub fn dilate(&self, lambda: f64) -> Self {
        let family = match &self.family {
            Family::Kernel { w, mu, coef } => Family::Kernel {
                w: w.scale(lambda),
                mu: *mu,
                coef: coef * lambda.powf(self.cone.r() as f64 * mu),
            },
            Family::Profile { s, profile } => {
                Family::Profile { s: s.clone(), profile: profile.dilate_synthesis(&self.cone, s, lambda) }
            }
        };
        TestFunction { cone: self.cone.clone(), family }
    }

    pub fn scaled(&self, c: Cx) -> Self {
        let family = match &self.family {
            Family::Kernel { w, mu, coef } => Family::Kernel { w: w.clone(), mu: *mu, coef: coef * c },
            Family::Profile { s, profile } => {
                assert!(c.im == 0.0, "profile families are real-scaled");
                Family::Profile { s: s.clone(), profile: profile.scaled(c.re) }
            }
        };
        TestFunction { cone: self.cone.clone(), family }
    }

    pub fn describe(&self) -> String {
        match &self.family {
            Family::Kernel { w, mu, coef } => format!("kernel(w={w}, mu={mu}, coef={coef})"),
            Family::Profile { s, profile } => format!("pw(s=({s}), {profile})"),
        }
    }
}

impl TubeFunction for TestFunction {
    fn cone(&self) -> &ConeDescriptor {
        &self.cone
    }

    fn value(&self, x: &[f64], y: &[f64]) -> Cx {
        match &self.family {
            Family::Kernel { w, mu, coef } => {
                let n = self.cone.n();
                let mut a = [Cx::new(0.0, 0.0); MAX_DIM];
                kernel_arg(x, y, &w.x, w.y.coords(), &mut a[..n]);
                coef * ppow(cdet(&self.cone, &a[..n]), -mu)
            }
            Family::Profile { s, profile } => profile
                .synthesize_closed(&self.cone, s, x, y)
                .unwrap_or(Cx::new(f64::NAN, f64::NAN)),
        }
    }

    fn center(&self) -> Vec<f64> {
        match &self.family {
            Family::Kernel { w, .. } => w.x.clone(),
            Family::Profile { .. } => vec![0.0; self.cone.n()],
        }
    }

    fn scale_hint(&self) -> f64 {
        let r = self.cone.r() as f64;
        match &self.family {
            Family::Kernel { w, .. } => self.cone.trace(w.y.coords()) / r,
            Family::Profile { profile, .. } => profile.decay_scale(&self.cone),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    /// The outer estimate first, then the least accurate inner estimate.
    pub estimates: Vec<IntegralEstimate<f64>>,
    pub params: String,
    /// The outer integral did not stabilise; `value` is unreliable.
    pub diverged: bool,
}

const DIVERGENCE_REL: f64 = 0.1;
// Coarse halving is crude on low node counts; a flagged mixed norm is rechecked
// against the rule at three quarters of the nodes before it counts as divergent.
const STABILITY_REL: f64 = 0.02;

fn add_y(a: &[f64], b: &[f64]) -> [f64; MAX_DIM] {
    let mut out = [0.0; MAX_DIM];
    for k in 0..a.len() {
        out[k] = a[k] + b[k];
    }
    out
}

/// `int_{R^n} |F(x + i y)|^p dx`.
pub fn slab_lp(f: &dyn TubeFunction, y: &[f64], p: f64, spec: &QuadratureSpec) -> Result<IntegralEstimate<f64>> {
    let cone = f.cone();
    check_len(cone.n(), y.len())?;
    let r = cone.r() as f64;
    let s = spec.clone().with_scale(spec.scale * (f.scale_hint() + cone.trace(y) / r));
    let yv = y.to_vec();
    integrate(&Region::slab_centered(cone, &f.center()), move |x: &[f64]| f.value(x, &yv).norm().powf(p), &s)
}

struct Worst(RefCell<(Option<ConeError>, Option<IntegralEstimate<f64>>)>);

impl Worst {
    fn new() -> Self {
        Worst(RefCell::new((None, None)))
    }

    fn record(&self, r: Result<IntegralEstimate<f64>>) -> f64 {
        let mut cell = self.0.borrow_mut();
        match r {
            Ok(est) => {
                let worse = cell.1.is_none_or(|w| est.rel_error() > w.rel_error());
                if worse && est.value > 0.0 {
                    cell.1 = Some(est);
                }
                est.value
            }
            Err(e) => {
                cell.0.get_or_insert(e);
                0.0
            }
        }
    }

    fn finish(self) -> Result<Option<IntegralEstimate<f64>>> {
        let (err, worst) = self.0.into_inner();
        match err {
            Some(e) => Err(e),
            None => Ok(worst),
        }
    }
}

fn check_exponent(name: &str, p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(ConeError::Domain(format!("{name} = {p} must lie in [1, inf)")))
    }
}

fn norm_result(outer: IntegralEstimate<f64>, worst: Option<IntegralEstimate<f64>>, power: f64, params: String) -> NormResult {
    let diverged = !outer.value.is_finite() || outer.rel_error() > DIVERGENCE_REL;
    let mut estimates = vec![outer];
    estimates.extend(worst);
    NormResult { value: outer.value.max(0.0).powf(1.0 / power), estimates, params, diverged }
}

/// Clears the divergence flag when the norm from the rule at three quarters of
/// the nodes agrees.
fn settle(
    mut res: NormResult,
    power: f64,
    region: &Region,
    f: impl Fn(&[f64]) -> f64,
    spec: &QuadratureSpec,
) -> Result<NormResult> {
    let value = res.estimates[0].value;
    if res.diverged && value.is_finite() && value > 0.0 && spec.scheme == Scheme::TensorGauss {
        let closer = tensor_level(region, f, spec, spec.nodes * 3 / 4)?;
        res.diverged = !((closer / value).powf(1.0 / power) - 1.0).abs().le(&STABILITY_REL);
    }
    Ok(res)
}

/// `(int_Omega (int_V |F(x + i y)|^p dx)^{q/p} Delta_nu(y) Delta^{-n/r}(y) dy)^{1/q}`.
pub fn mixed_norm(f: &dyn TubeFunction, p: f64, q: f64, nu: &MultiIndex, spec: &QuadratureSpec) -> Result<NormResult> {
    let cone = f.cone().clone();
    check_index(&cone, nu)?;
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    let weight = nu.shift(-cone.n_over_r());
    let worst = Worst::new();
    let outer_spec = spec.clone().with_scale(spec.scale * f.scale_hint().max(1e-300));
    let integrand = |y: &[f64]| {
        let inner = worst.record(slab_lp(f, y, p, spec));
        inner.powf(q / p) * cone.power(weight.as_slice(), y, false)
    };
    let region = Region::cone(&cone);
    let outer = integrate(&region, integrand, &outer_spec)?;
    let mut res = settle(norm_result(outer, None, q, format!("p={p} q={q} nu=({nu})")), q, &region, integrand, &outer_spec)?;
    res.estimates.extend(worst.finish()?);
    Ok(res)
}

/// `mu_s` realised as a point mass or a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Delta0,
    Density,
}

/// Classifies `s`: the zero index gives `delta_0`, `s > g_0` a density; other
/// Wallach points are singular and rejected.
pub fn measure_kind(cone: &ConeDescriptor, s: &MultiIndex) -> Result<MeasureKind> {
    check_index(cone, s)?;
    if !in_wallach(cone, s) {
        return Err(ConeError::Domain(format!("s = ({s}) is not in the Wallach set")));
    }
    if s.as_slice().iter().all(|&v| v == 0.0) {
        Ok(MeasureKind::Delta0)
    } else if cone.g0().less(s) {
        Ok(MeasureKind::Density)
    } else {
        Err(ConeError::UnsupportedMeasure(format!(
            "s = ({s}) is a singular Wallach point; only s = 0 and s > g0 are realised"
        )))
    }
}

/// `{2^k e : k = -10..=3}`.
pub fn default_t_grid(cone: &ConeDescriptor) -> Vec<AlgebraElement> {
    (-10..=3).map(|k| cone.identity().scale(2f64.powi(k))).collect()
}

/// `sup_t int int |F(x + i(y + t))|^p dx dmu_s(y)` over `t = 0` and the grid, to the power `1/p`.
///
/// `params` records the maximising `t`. The sup is a lower bound of the true one.
pub fn hardy_mu_norm(
    f: &dyn TubeFunction,
    p: f64,
    s: &MultiIndex,
    spec: &QuadratureSpec,
    t_grid: &[AlgebraElement],
) -> Result<NormResult> {
    let cone = f.cone().clone();
    check_exponent("p", p)?;
    let kind = measure_kind(&cone, s)?;
    let n = cone.n();
    let mut grid = vec![AlgebraElement::zeros(n)];
    for t in t_grid {
        check(&cone, t)?;
        if !cone.contains(t.coords()) {
            return Err(ConeError::Domain(format!("grid point {t} is not in the cone")));
        }
        grid.push(t.clone());
    }
    let mut best: Option<(f64, NormResult, usize)> = None;
    for (idx, t) in grid.iter().enumerate() {
        let res = match kind {
            MeasureKind::Delta0 => {
                let est = slab_lp(f, t.coords(), p, spec)?;
                norm_result(est, None, p, String::new())
            }
            MeasureKind::Density => {
                let norm = gamma_closed(&cone, s)?;
                let weight = s.shift(-cone.n_over_r());
                let worst = Worst::new();
                let tc = t.coords();
                let outer_spec = spec.clone().with_scale(spec.scale * f.scale_hint().max(1e-300));
                let integrand = |y: &[f64]| {
                    let yt = add_y(y, tc);
                    let inner = worst.record(slab_lp(f, &yt[..n], p, spec));
                    inner * cone.power(weight.as_slice(), y, false) / norm
                };
                let region = Region::cone(&cone);
                let outer = integrate(&region, integrand, &outer_spec)?;
                let mut res = settle(norm_result(outer, None, p, String::new()), p, &region, integrand, &outer_spec)?;
                res.estimates.extend(worst.finish()?);
                res
            }
        };
        if best.as_ref().is_none_or(|b| res.value > b.0) {
            best = Some((res.value, res, idx));
        }
    }
    let (_, mut res, idx) = best.expect("grid is never empty");
    res.params = format!("p={p} s=({s}) measure={kind:?} argmax_t={}", grid[idx]);
    Ok(res)
}

/// `Delta_{-alpha}((x + i y) / i)` in modulus.
#[inline]
fn modulus_power(cone: &ConeDescriptor, w: &[Cx], alpha: &[f64]) -> f64 {
    match cone.kind() {
        ConeKind::Halfline => w[0].norm().powf(-alpha[0]),
        ConeKind::Lorentz => {
            let d = cdet(cone, w).norm().powf(-alpha[1]);
            if alpha[0] == alpha[1] {
                d
            } else {
                d * cminor1(cone, w, false).norm().powf(alpha[1] - alpha[0])
            }
        }
    }
}

/// True when `alpha > g0* + n/r` componentwise.
pub fn j_alpha_converges(cone: &ConeDescriptor, alpha: &MultiIndex) -> bool {
    alpha.len() == cone.r() && cone.g0().star().shift(cone.n_over_r()).less(alpha)
}

/// `J_alpha(y) = int_{R^n} |Delta_{-alpha}((x + i y) / i)| dx`.
pub fn j_alpha(cone: &ConeDescriptor, alpha: &MultiIndex, y: &AlgebraElement, spec: &QuadratureSpec) -> Result<IntegralEstimate<f64>> {
    check_index(cone, alpha)?;
    check(cone, y)?;
    if !cone.contains(y.coords()) {
        return Err(ConeError::Domain(format!("{y} is not in the open cone")));
    }
    if !j_alpha_converges(cone, alpha) {
        return Err(ConeError::Domain(format!(
            "J_alpha diverges: alpha = ({alpha}) must exceed g0* + n/r = ({})",
            cone.g0().star().shift(cone.n_over_r())
        )));
    }
    let n = cone.n();
    let (c, yv) = (cone.clone(), y.coords().to_vec());
    let s = spec.clone().with_scale(spec.scale * cone.trace(&yv) / cone.r() as f64);
    integrate(
        &Region::slab(cone),
        move |x: &[f64]| {
            let mut w = [Cx::new(0.0, 0.0); MAX_DIM];
            for k in 0..n {
                w[k] = Cx::new(yv[k], -x[k]);
            }
            modulus_power(&c, &w[..n], alpha.as_slice())
        },
        &s,
    )
}

/// `Delta_{-alpha + n/r}(y)`, the y-dependence of [`j_alpha`].
pub fn j_alpha_profile(cone: &ConeDescriptor, alpha: &MultiIndex, y: &AlgebraElement) -> Result<f64> {
    crate::jordan::power_function(cone, &alpha.scale(-1.0).shift(cone.n_over_r()), y, false)
}

/// The convergence reading `s > g0` and `s + beta < -g0*` componentwise.
pub fn lemma4_2_converges(cone: &ConeDescriptor, beta: &MultiIndex, s: &MultiIndex) -> bool {
    let g = cone.g0();
    g.less(s) && s.add(beta).less(&g.star().scale(-1.0))
}

/// `int_Omega Delta_beta(y + t) Delta_s(y) Delta^{-n/r}(y) dy`.
///
/// No threshold is enforced on `s + beta`; a divergent integral shows up as a
/// non-converged estimate. See [`lemma4_2_converges`].
pub fn weighted_cone_integral(
    cone: &ConeDescriptor,
    beta: &MultiIndex,
    s: &MultiIndex,
    t: &AlgebraElement,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    check_index(cone, beta)?;
    check_index(cone, s)?;
    check(cone, t)?;
    if !cone.contains(t.coords()) {
        return Err(ConeError::Domain(format!("{t} is not in the open cone")));
    }
    if !cone.g0().less(s) {
        return Err(ConeError::Domain(format!("s = ({s}) must exceed g0 = ({})", cone.g0())));
    }
    let n = cone.n();
    let weight = s.shift(-cone.n_over_r());
    let (c, tv) = (cone.clone(), t.coords().to_vec());
    let sp = spec.clone().with_scale(spec.scale * cone.trace(&tv) / cone.r() as f64);
    integrate(
        &Region::cone(cone),
        move |y: &[f64]| {
            let yt = add_y(y, &tv);
            (c.ln_power(beta.as_slice(), &yt[..n], false) + c.ln_power(weight.as_slice(), y, false)).exp()
        },
        &sp,
    )
}

/// `Delta_{s + beta}(t)`, the t-dependence of [`weighted_cone_integral`].
pub fn weighted_profile(cone: &ConeDescriptor, beta: &MultiIndex, s: &MultiIndex, t: &AlgebraElement) -> Result<f64> {
    crate::jordan::power_function(cone, &s.add(beta), t, false)
}

/// `max_z |F(z)| Delta_{nu/q + n/(rp)}(Im z) / ||F||_{A^{p,q}_nu}`.
pub fn pointwise_bound_ratio(
    f: &dyn TubeFunction,
    p: f64,
    q: f64,
    nu: &MultiIndex,
    z_grid: &[TubePoint],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let norm = mixed_norm(f, p, q, nu, spec)?;
    if norm.diverged {
        return Err(ConeError::Quadrature(format!("A^{{p,q}}_nu norm did not converge ({})", norm.params)));
    }
    pointwise_ratio_with_norm(f, p, q, nu, z_grid, norm.value)
}

/// As [`pointwise_bound_ratio`] with a known norm.
pub fn pointwise_ratio_with_norm(
    f: &dyn TubeFunction,
    p: f64,
    q: f64,
    nu: &MultiIndex,
    z_grid: &[TubePoint],
    norm: f64,
) -> Result<f64> {
    let cone = f.cone();
    let e = nu.scale(1.0 / q).shift(cone.n_over_r() / p);
    let mut best: f64 = 0.0;
    for z in z_grid {
        let v = f.value(&z.x, z.y.coords()).norm() * crate::jordan::power_function(cone, &e, &z.y, false)?;
        if !v.is_finite() {
            return Err(ConeError::Quadrature(format!("non-finite value at {z}")));
        }
        best = best.max(v);
    }
    Ok(best / norm)
}

/// `Delta(xi)`, the symbol of the box operator.
pub fn box_symbol(cone: &ConeDescriptor, xi: &[f64]) -> Result<f64> {
    check_len(cone.n(), xi.len())?;
    Ok(cone.det(xi))
}

/// `Delta((1/i) d/dx) F` at `z` by central differences of step `h`.
///
/// With the trace form, `d/dx_k e^{i(x|xi)} = 2 i xi_k e^{i(x|xi)}` on the Lorentz
/// cone, so the operator is `(-d_0^2 + sum_k d_k^2) / 4`.
pub fn box_apply(f: &dyn TubeFunction, z: &TubePoint, h: f64) -> Result<Cx> {
    let cone = f.cone();
    check_len(cone.n(), z.x.len())?;
    if !(h > 0.0) {
        return Err(ConeError::Domain(format!("step h = {h} must be positive")));
    }
    let y = z.y.coords();
    let mut x = z.x.clone();
    let out = match cone.kind() {
        ConeKind::Halfline => {
            x[0] = z.x[0] + h;
            let a = f.value(&x, y);
            x[0] = z.x[0] - h;
            let b = f.value(&x, y);
            (a - b) / (2.0 * h) / I
        }
        ConeKind::Lorentz => {
            let f0 = f.value(&z.x, y);
            let mut acc = Cx::new(0.0, 0.0);
            for k in 0..cone.n() {
                x[k] = z.x[k] + h;
                let a = f.value(&x, y);
                x[k] = z.x[k] - h;
                let b = f.value(&x, y);
                x[k] = z.x[k];
                let d2 = (a - f0 * 2.0 + b) / (h * h);
                acc += if k == 0 { -d2 } else { d2 };
            }
            acc * 0.25
        }
    };
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(ConeError::Domain(format!("stencil around {z} left the domain of the function")));
    }
    Ok(out)
}

/// `sum_j f_1 ... (box f_j) ... f_m`.
pub fn box_product(fs: &[&dyn TubeFunction], z: &TubePoint, h: f64) -> Result<Cx> {
    let values: Vec<Cx> = fs.iter().map(|f| f.value(&z.x, z.y.coords())).collect();
    let mut total = Cx::new(0.0, 0.0);
    for (j, f) in fs.iter().enumerate() {
        let mut term = box_apply(*f, z, h)?;
        for (k, v) in values.iter().enumerate() {
            if k != j {
                term *= v;
            }
        }
        total += term;
    }
    Ok(total)
}

/// Discrete norm on the lattice `z_{j,k} = j delta 2^k + i 2^k` of the upper half-plane:
/// `(sum_k (sum_j |F(z_{j,k})|^p)^{q/p} y_k^{nu + q/p})^{1/q}`.
///
/// The sums are truncated adaptively at relative tolerance `spec.target_rel_tol`;
/// the geometric tail of the level sum is extrapolated and counted in the error.
pub fn lattice_norm_rank1(f: &dyn TubeFunction, p: f64, q: f64, nu: f64, delta: f64, spec: &QuadratureSpec) -> Result<NormResult> {
    if f.cone().kind() != ConeKind::Halfline {
        return Err(ConeError::Config("the sampling lattice is constructed for rank 1 only".into()));
    }
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if !(delta > 0.0) {
        return Err(ConeError::Domain(format!("lattice spacing delta = {delta} must be positive")));
    }
    let tol = spec.target_rel_tol;
    let x0 = f.center()[0];
    const MAX_J: i64 = 4_000_000;
    const MAX_K: i32 = 60;
    // `global` is the running total over levels; a level's tail may stop once
    // its weighted contribution is below `tol * global`.
    let level = |k: i32, global: f64| -> Result<(f64, u64)> {
        let yk = 2f64.powi(k);
        let w = yk.powf(nu + q / p);
        let step = delta * yk;
        let j0 = (x0 / step).round() as i64;
        let term = |j: i64| f.value(&[j as f64 * step], &[yk]).norm().powf(p);
        let mut sum = term(j0);
        let mut evals = 1u64;
        for dir in [1i64, -1] {
            let mut j = 1i64;
            let mut quiet = 0;
            loop {
                let t = term(j0 + dir * j);
                evals += 1;
                if !t.is_finite() {
                    return Err(ConeError::Quadrature(format!("non-finite lattice sample at level {k}")));
                }
                sum += t;
                // Tail bound for algebraic decay: the remaining terms are at most ~ j * t.
                let tail = t * j as f64;
                let weighted_tail = w * (q / p) * sum.powf(q / p - 1.0) * tail;
                quiet = if tail <= tol * sum || weighted_tail <= tol * global { quiet + 1 } else { 0 };
                if quiet >= 8 || sum == 0.0 {
                    break;
                }
                j += 1;
                if j > MAX_J {
                    return Err(ConeError::Quadrature(format!(
                        "lattice window too small at level {k}: tail above tolerance after {MAX_J} points"
                    )));
                }
            }
        }
        Ok((sum.powf(q / p) * w, evals))
    };
    let (mut total, mut evals) = level(0, 0.0)?;
    let mut tail = 0.0;
    for dir in [1i32, -1] {
        let mut k = dir;
        let mut quiet = 0;
        let mut prev = f64::INFINITY;
        loop {
            let (v, e) = level(k, total)?;
            total += v;
            evals += e;
            // Levels decay geometrically away from the mass; extrapolate the rest.
            let rho = v / prev;
            let rest = if rho < 0.9 { v * rho / (1.0 - rho) } else { f64::INFINITY };
            prev = v;
            quiet = if v <= tol * total || rest <= tol * total { quiet + 1 } else { 0 };
            if quiet >= 2 {
                if rest.is_finite() {
                    total += rest;
                    tail += rest;
                }
                break;
            }
            k += dir;
            if k.abs() > MAX_K {
                return Err(ConeError::Quadrature(format!(
                    "lattice window too small: levels beyond |k| = {MAX_K} still contribute"
                )));
            }
        }
    }
    let est = IntegralEstimate { value: total, error_estimate: tol * total + tail, evaluations: evals, level: 0, converged: true };
    Ok(NormResult {
        value: total.powf(1.0 / q),
        estimates: vec![est],
        params: format!("p={p} q={q} nu={nu} delta={delta}"),
        diverged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn l3() -> ConeDescriptor {
        ConeDescriptor::lorentz(3).unwrap()
    }

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn complex_determinant_examples() {
        let h = ConeDescriptor::halfline();
        assert_eq!(complex_determinant(&h, &[c(2.0, 0.0)]).unwrap(), c(2.0, 0.0));
        let d = complex_determinant(&l3(), &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(d, c(4.0, 0.0));
        let d = complex_determinant(&l3(), &[c(1.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((d - c(-1.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn branch_cut_is_reported() {
        let h = ConeDescriptor::halfline();
        let r = complex_power(&h, &[c(-2.0, 0.0)], &MultiIndex::new(vec![0.5]));
        assert!(matches!(r, Err(ConeError::BranchCut { factor: "Delta", .. })));
        assert!(complex_power(&h, &[c(-2.0, 0.0)], &MultiIndex::new(vec![0.0])).is_ok());
    }

    #[test]
    fn complex_power_matches_real_on_cone() {
        let cone = l3();
        let s = MultiIndex::new(vec![2.3, -0.7]);
        let x = [3.0, 1.0, -0.5];
        let z: Vec<Cx> = x.iter().map(|&a| c(a, 0.0)).collect();
        for rot in [false, true] {
            let a = complex_power_impl(&cone, &z, &s, rot).unwrap();
            let b = cone.power(s.as_slice(), &x, rot);
            assert!((a.re / b - 1.0).abs() < 1e-13 && a.im.abs() < 1e-13);
        }
    }

    #[test]
    fn bergman_kernel_examples() {
        let h = ConeDescriptor::halfline();
        let i = TubePoint::imaginary(&h, AlgebraElement::new(vec![1.0])).unwrap();
        assert!((bergman_kernel(&h, 1.0, &i, &i).unwrap() - c(0.25, 0.0)).norm() < 1e-15);
        let cone = l3();
        let ie = TubePoint::imaginary(&cone, cone.identity()).unwrap();
        assert!((bergman_kernel(&cone, 2.0, &ie, &ie).unwrap() - c(0.0078125, 0.0)).norm() < 1e-15);
        assert!(bergman_kernel(&cone, 0.4, &ie, &ie).is_err());
    }

    #[test]
    fn halfline_mixed_norm_closed_form() {
        let h = ConeDescriptor::halfline();
        let f = TestFunction::kernel_at(&h, &[1.0], 2.0).unwrap();
        let r = mixed_norm(&f, 2.0, 2.0, &MultiIndex::new(vec![1.0]), &QuadratureSpec::gauss(64)).unwrap();
        assert!((r.value.powi(2) - PI / 4.0).abs() < 1e-10, "{r:?}");
        assert!(!r.diverged);
        // nu = 1/2: int_0^inf (pi/2)(y + 1)^{-3} y^{-1/2} dy = (pi/2) B(1/2, 5/2) = 3 pi^2 / 16.
        let r = mixed_norm(&f, 2.0, 2.0, &MultiIndex::new(vec![0.5]), &QuadratureSpec::gauss(64)).unwrap();
        assert!((r.value.powi(2) - 3.0 * PI * PI / 16.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn halfline_hardy_delta0() {
        let h = ConeDescriptor::halfline();
        let f = TestFunction::kernel_at(&h, &[1.0], 1.0).unwrap();
        let r = hardy_mu_norm(&f, 2.0, &MultiIndex::new(vec![0.0]), &QuadratureSpec::gauss(64), &default_t_grid(&h))
            .unwrap();
        assert!((r.value.powi(2) - PI).abs() < 1e-10, "{r:?}");
        assert!(r.params.contains("argmax_t=0"));
    }

    #[test]
    fn singular_wallach_point_rejected() {
        let cone = l3();
        // u = (0, 0.2): s = (0, 0.2) is in the Wallach set but neither 0 nor > g0.
        let s = MultiIndex::new(vec![0.0, 0.2]);
        assert!(matches!(measure_kind(&cone, &s), Err(ConeError::UnsupportedMeasure(_))));
        assert!(matches!(measure_kind(&cone, &MultiIndex::new(vec![-1.0, 0.0])), Err(ConeError::Domain(_))));
    }

    #[test]
    fn j_alpha_halfline() {
        let h = ConeDescriptor::halfline();
        let a = MultiIndex::new(vec![2.0]);
        let spec = QuadratureSpec::gauss(64);
        let j1 = j_alpha(&h, &a, &AlgebraElement::new(vec![1.0]), &spec).unwrap();
        let j2 = j_alpha(&h, &a, &AlgebraElement::new(vec![2.0]), &spec).unwrap();
        assert!((j1.value - PI).abs() < 1e-10);
        assert!((j2.value - PI / 2.0).abs() < 1e-10);
        assert!(j_alpha(&h, &MultiIndex::new(vec![1.0]), &h.identity(), &spec).is_err());
    }

    #[test]
    fn weighted_halfline() {
        let h = ConeDescriptor::halfline();
        let (b, s) = (MultiIndex::new(vec![-3.0]), MultiIndex::new(vec![1.0]));
        let spec = QuadratureSpec::gauss(64);
        let w1 = weighted_cone_integral(&h, &b, &s, &AlgebraElement::new(vec![1.0]), &spec).unwrap();
        let w2 = weighted_cone_integral(&h, &b, &s, &AlgebraElement::new(vec![2.0]), &spec).unwrap();
        assert!((w1.value - 0.5).abs() < 1e-12);
        assert!((w2.value - 0.125).abs() < 1e-12);
        assert!(lemma4_2_converges(&h, &b, &s));
        assert!(!lemma4_2_converges(&h, &MultiIndex::new(vec![-0.5]), &s));
    }

    #[test]
    fn box_symbol_identity() {
        let cone = l3();
        let xi = [2.0, 1.0, 0.0];
        let plane = Sampled::new(&cone, move |x: &[f64], _y: &[f64]| {
            let t: f64 = 2.0 * x.iter().zip(&xi).map(|(a, b)| a * b).sum::<f64>();
            Cx::new(0.0, t).exp()
        });
        let z = TubePoint::new(&cone, vec![0.3, -0.2, 0.1], cone.identity()).unwrap();
        let v = box_apply(&plane, &z, 1e-3).unwrap();
        let expect = plane.value(&z.x, z.y.coords()) * box_symbol(&cone, &xi).unwrap();
        assert!((v - expect).norm() < 1e-4, "{v} {expect}");
        let h = ConeDescriptor::halfline();
        let wave = Sampled::new(&h, |x: &[f64], _y: &[f64]| Cx::new(0.0, 3.0 * x[0]).exp());
        let z = TubePoint::new(&h, vec![0.4], h.identity()).unwrap();
        let v = box_apply(&wave, &z, 1e-4).unwrap();
        assert!((v - wave.value(&z.x, z.y.coords()) * 3.0).norm() < 1e-6);
    }

    #[test]
    fn lattice_sum_near_riemann_estimate() {
        let h = ConeDescriptor::halfline();
        let f = TestFunction::kernel_at(&h, &[1.0], 2.0).unwrap();
        let spec = QuadratureSpec::default();
        let l = lattice_norm_rank1(&f, 2.0, 2.0, 1.0, 1.0, &spec).unwrap();
        let ratio = l.value.powi(2) / (PI / 4.0);
        assert!(ratio > 0.5 && ratio < 2.0, "{ratio}");
    }
}
