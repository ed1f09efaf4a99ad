//! Paley-Wiener synthesis `F(z) = (2 pi)^{-n/2} int_Omega e^{i(z|xi)} f(xi) Delta*_{s*}(2 xi) d xi`
//! for profiles `f(xi) = sum c Delta_a(xi) e^{-(b|xi)}`, the `mu_s` measures, and
//! the embedding experiments built on them.
//!
//! A profile term in the rotated frame (or with scalar `a`, or on the half-line)
//! has the closed form
//! `c 2^{|s|} Gamma_Omega(sigma) Delta*_sigma(w^{-1})`, `sigma = a + s* + n/r`,
//! `w = b - i z`, which is evaluated as `Delta_1(w)^{sigma_1 - sigma_2} Delta(w)^{-sigma_1}`
//! so that each principal power is the holomorphic one.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::conefunc::{gamma_closed, ConvergenceDomain};
use crate::error::{check_len, ConeError, Result};
use crate::jordan::{check, check_index, inverse, AlgebraElement, ConeDescriptor, ConeKind, MultiIndex};
use crate::operators::{fit_slope, ExperimentResult};
use crate::quad::{integrate, IntegralEstimate, QuadratureSpec, Region, MAX_DIM};
use crate::spaces::{self, cdet, cminor1, ppow, Cx, MeasureKind, TestFunction};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSpec {
    pub s: MultiIndex,
    pub kind: MeasureKind,
}

impl MeasureSpec {
    pub fn new(cone: &ConeDescriptor, s: &MultiIndex) -> Result<Self> {
        Ok(MeasureSpec { s: s.clone(), kind: spaces::measure_kind(cone, s)? })
    }
}

/// `Delta_s(t) Delta^{-n/r}(t) / Gamma_Omega(s)` on the cone, 0 outside.
pub fn mu_density(cone: &ConeDescriptor, ms: &MeasureSpec, t: &AlgebraElement) -> Result<f64> {
    check(cone, t)?;
    if ms.kind == MeasureKind::Delta0 {
        return Err(ConeError::UnsupportedMeasure("delta_0 has no density".into()));
    }
    if !cone.contains(t.coords()) {
        return Ok(0.0);
    }
    let e = ms.s.shift(-cone.n_over_r());
    Ok(cone.power(e.as_slice(), t.coords(), false) / gamma_closed(cone, &ms.s)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileTerm {
    pub coef: f64,
    pub a: MultiIndex,
    pub b: AlgebraElement,
}

/// `f(xi) = sum_k coef_k Delta_{a_k}(xi) e^{-(b_k|xi)}`; `rotated` selects `Delta*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileFunction {
    pub terms: Vec<ProfileTerm>,
    pub rotated: bool,
}

impl ProfileFunction {
    pub fn single(coef: f64, a: MultiIndex, b: AlgebraElement) -> Self {
        ProfileFunction { terms: vec![ProfileTerm { coef, a, b }], rotated: false }
    }

    /// `e^{-(b|xi)}`.
    pub fn exponential(cone: &ConeDescriptor, b: AlgebraElement) -> Self {
        Self::single(1.0, MultiIndex::scalar(cone.r(), 0.0), b)
    }

    pub fn rotated(mut self) -> Self {
        self.rotated = true;
        self
    }

    pub fn plus(mut self, other: ProfileFunction) -> Self {
        assert_eq!(self.rotated, other.rotated, "cannot mix frames in one profile");
        self.terms.extend(other.terms);
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coef *= c;
        }
        out
    }

    pub fn check(&self, cone: &ConeDescriptor) -> Result<()> {
        if self.terms.is_empty() {
            return Err(ConeError::Config("profile has no terms".into()));
        }
        for t in &self.terms {
            check_index(cone, &t.a)?;
            check(cone, &t.b)?;
            if !cone.contains(t.b.coords()) {
                return Err(ConeError::Domain(format!("profile decay {} is not in the cone", t.b)));
            }
        }
        Ok(())
    }

    /// Each term combines with `Delta*_{s*}` into a single rotated power.
    pub fn has_closed_form(&self, cone: &ConeDescriptor) -> bool {
        self.rotated || cone.r() == 1 || self.terms.iter().all(|t| t.a.is_scalar())
    }

    pub fn value(&self, cone: &ConeDescriptor, xi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * (cone.ln_power(t.a.as_slice(), xi, self.rotated) - cone.inner(t.b.coords(), xi)).exp())
            .sum()
    }

    /// Smallest decay length `tr(b) / r` among the terms.
    pub fn decay_scale(&self, cone: &ConeDescriptor) -> f64 {
        self.terms
            .iter()
            .map(|t| cone.trace(t.b.coords()) / cone.r() as f64)
            .fold(f64::INFINITY, f64::min)
    }

    fn sigma(&self, cone: &ConeDescriptor, t: &ProfileTerm, s: &MultiIndex) -> Result<MultiIndex> {
        let sigma = t.a.add(&s.star()).shift(cone.n_over_r());
        ConvergenceDomain::of(cone).check(&sigma).map_err(|_| {
            ConeError::Domain(format!(
                "synthesis integral diverges: a + s* + n/r = ({sigma}) must exceed g0 = ({})",
                cone.g0()
            ))
        })?;
        Ok(sigma)
    }

    /// Closed-form `F(x + i y)`; `y` may lie on the boundary when every `b` is in the cone.
    pub fn synthesize_closed(&self, cone: &ConeDescriptor, s: &MultiIndex, x: &[f64], y: &[f64]) -> Result<Cx> {
        check_len(cone.n(), x.len())?;
        check_len(cone.n(), y.len())?;
        check_index(cone, s)?;
        if !self.has_closed_form(cone) {
            return Err(ConeError::Config("no closed form for fixed-frame multi-index profiles".into()));
        }
        let n = cone.n();
        let front = (2.0 * PI).powf(-(n as f64) / 2.0) * 2f64.powf(s.sum());
        let mut total = Cx::new(0.0, 0.0);
        let mut w = [Cx::new(0.0, 0.0); MAX_DIM];
        for t in &self.terms {
            let sigma = self.sigma(cone, t, s)?;
            for k in 0..n {
                w[k] = Cx::new(t.b[k] + y[k], -x[k]);
            }
            let w = &w[..n];
            let sv = sigma.as_slice();
            let power = match cone.kind() {
                ConeKind::Halfline => ppow(w[0], -sv[0]),
                ConeKind::Lorentz => ppow(cdet(cone, w), -sv[0]) * ppow(cminor1(cone, w, false), sv[0] - sv[1]),
            };
            total += power * (t.coef * gamma_closed(cone, &sigma)?);
        }
        let v = total * front;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(ConeError::BranchCut { factor: "Delta", re: v.re, im: v.im });
        }
        Ok(v)
    }

    /// The profile whose synthesis is `z -> F(z / lambda)`.
    pub fn dilate_synthesis(&self, cone: &ConeDescriptor, s: &MultiIndex, lambda: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coef *= lambda.powf(cone.n() as f64 + s.sum() + t.a.sum());
            t.b = t.b.scale(lambda);
        }
        out
    }
}

impl fmt::Display for ProfileFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = if self.rotated { "Delta*" } else { "Delta" };
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*{d}_({})*exp(-(({})|xi))", t.coef, t.a, t.b)?;
        }
        Ok(())
    }
}

fn closed_estimate<T>(value: T) -> IntegralEstimate<T> {
    IntegralEstimate { value, error_estimate: 0.0, evaluations: 0, level: 0, converged: true }
}

/// `F(z)`, in closed form when the profile allows it and by quadrature otherwise.
pub fn pw_synthesize(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    f: &ProfileFunction,
    z: &spaces::TubePoint,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<Cx>> {
    f.check(cone)?;
    if f.has_closed_form(cone) {
        Ok(closed_estimate(f.synthesize_closed(cone, s, &z.x, z.y.coords())?))
    } else {
        pw_synthesize_quadrature(cone, s, f, z, spec)
    }
}

/// `F(z)` by direct quadrature of the synthesis integral.
pub fn pw_synthesize_quadrature(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    f: &ProfileFunction,
    z: &spaces::TubePoint,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<Cx>> {
    check_index(cone, s)?;
    f.check(cone)?;
    check_len(cone.n(), z.x.len())?;
    let n = cone.n();
    let front = (2.0 * PI).powf(-(n as f64) / 2.0) * 2f64.powf(s.sum());
    let ss = s.star();
    let (c, x, y) = (cone.clone(), z.x.clone(), z.y.coords().to_vec());
    let decay = f.decay_scale(cone) + cone.eigenvalues(&y)[1];
    let sp = spec.clone().with_scale(spec.scale / decay);
    let est = integrate(
        &Region::cone(cone),
        move |xi: &[f64]| {
            let phase = Cx::new(-c.inner(&y, xi), c.inner(&x, xi)).exp();
            phase * (f.value(&c, xi) * c.power(ss.as_slice(), xi, true) * front)
        },
        &sp,
    )?;
    Ok(est)
}

/// `||f||^2_{L^2_{s*}}` by the Gamma closed form.
pub fn h2mu_norm_sq_closed(cone: &ConeDescriptor, s: &MultiIndex, f: &ProfileFunction) -> Result<f64> {
    weighted_profile_sq_closed(cone, s, 0.0, f, &cone.identity().scale(0.0), s.sum())
}

/// `sum_{ij} c_i c_j int e^{-(2y + b_i + b_j|xi)} Delta*_{a_i + a_j + k s*}(xi) dxi * 2^{shift}`.
fn weighted_profile_sq_closed(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    extra: f64,
    f: &ProfileFunction,
    y2: &AlgebraElement,
    log2_factor: f64,
) -> Result<f64> {
    f.check(cone)?;
    check_index(cone, s)?;
    if !f.has_closed_form(cone) {
        return Err(ConeError::Config("no closed form for fixed-frame multi-index profiles".into()));
    }
    let mult = 1.0 + extra;
    let mut total = 0.0;
    for ti in &f.terms {
        for tj in &f.terms {
            let sigma = ti.a.add(&tj.a).add(&s.star().scale(mult)).shift(cone.n_over_r());
            ConvergenceDomain::of(cone).check(&sigma).map_err(|_| {
                ConeError::Domain(format!("profile is not in L^2: exponent ({sigma}) fails the gamma condition"))
            })?;
            let w = ti.b.add(&tj.b).add(y2);
            let inv = inverse(cone, &w)?;
            total += ti.coef * tj.coef * gamma_closed(cone, &sigma)? * cone.power(sigma.as_slice(), inv.coords(), true);
        }
    }
    Ok(total * 2f64.powf(log2_factor))
}

/// `||f||_{L^2_{s*}} = (int_Omega |f(xi)|^2 Delta*_{s*}(2 xi) dxi)^{1/2}`, the `H^2_mu` norm of its synthesis.
pub fn h2mu_norm_closed(cone: &ConeDescriptor, s: &MultiIndex, f: &ProfileFunction) -> Result<f64> {
    Ok(h2mu_norm_sq_closed(cone, s, f)?.sqrt())
}

/// [`h2mu_norm_closed`] by quadrature; works for every profile.
pub fn h2mu_norm_via_profile(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    f: &ProfileFunction,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    check_index(cone, s)?;
    f.check(cone)?;
    let ss = s.star();
    let c = cone.clone();
    let sp = spec.clone().with_scale(spec.scale * f.decay_scale(cone).recip());
    let two = 2f64.powf(s.sum());
    let est = integrate(
        &Region::cone(cone),
        move |xi: &[f64]| f.value(&c, xi).powi(2) * c.power(ss.as_slice(), xi, true) * two,
        &sp,
    )?;
    let v = est.value.sqrt();
    Ok(IntegralEstimate { value: v, error_estimate: est.error_estimate / (2.0 * v), ..est })
}

/// Both sides of the slice Plancherel identity at one `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlancherelCheck {
    pub y: AlgebraElement,
    /// `int_{R^n} |F(x + i y)|^2 dx`.
    pub lhs: IntegralEstimate<f64>,
    /// `int_Omega e^{-2(y|xi)} |f(xi)|^2 Delta*_{2 s*}(xi) dxi`.
    pub rhs: f64,
    pub ratio: f64,
}

pub fn plancherel_residual(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    f: &ProfileFunction,
    y: &AlgebraElement,
    spec: &QuadratureSpec,
) -> Result<PlancherelCheck> {
    check(cone, y)?;
    if !cone.contains(y.coords()) {
        return Err(ConeError::Domain(format!("{y} is not in the open cone")));
    }
    let big_f = TestFunction::profile(cone, s, f.clone())?;
    let lhs = spaces::slab_lp(&big_f, y.coords(), 2.0, spec)?;
    let rhs = weighted_profile_sq_closed(cone, s, 1.0, f, &y.scale(2.0), 0.0)?;
    Ok(PlancherelCheck { y: y.clone(), lhs, rhs, ratio: lhs.value / rhs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EmbeddingTarget {
    /// `p = 2`, `nu = (q/2) s`.
    Thm11 { q: f64 },
    /// `p = 4`, `nu = (q/4)(2 s + n/r)`.
    Thm12 { q: f64 },
    Free { p: f64, q: f64, nu: MultiIndex },
}

impl EmbeddingTarget {
    /// `(p, q, nu)` for the measure index `s`.
    pub fn resolve(&self, cone: &ConeDescriptor, s: &MultiIndex) -> (f64, f64, MultiIndex) {
        match self {
            EmbeddingTarget::Thm11 { q } => (2.0, *q, s.scale(q / 2.0)),
            EmbeddingTarget::Thm12 { q } => (4.0, *q, s.scale(2.0).shift(cone.n_over_r()).scale(q / 4.0)),
            EmbeddingTarget::Free { p, q, nu } => (*p, *q, nu.clone()),
        }
    }

    /// Dilation exponent of `||F||_{A^{p,q}_nu} / ||F||_{H^2_mu}` under `F -> F(. / lambda)`.
    pub fn expected_slope(&self, cone: &ConeDescriptor, s: &MultiIndex) -> f64 {
        let (p, q, nu) = self.resolve(cone, s);
        let n = cone.n() as f64;
        n / p + nu.sum() / q - (n + s.sum()) / 2.0
    }
}

/// Default dilation sweep: five dyadic scales around 1.
pub fn dyadic_scales() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0, 4.0]
}

/// Ratios `||F||_{A^{p,q}_nu} / ||F||_{H^2_mu}` over the sample and a dilation sweep.
///
/// The fitted log-log slope of the ratio against the dilation is 0 exactly when
/// `n/(2r) + s/2 = nu/q + n/(rp)` summed over components.
pub fn embedding_ratio(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    target: &EmbeddingTarget,
    f_sample: &[ProfileFunction],
    scales: &[f64],
    spec: &QuadratureSpec,
) -> Result<ExperimentResult> {
    let (p, q, nu) = target.resolve(cone, s);
    if !cone.g0().less(&nu) {
        return Err(ConeError::Domain(format!("target weight nu = ({nu}) must exceed g0")));
    }
    if f_sample.is_empty() {
        return Err(ConeError::Config("empty profile sample".into()));
    }
    let mut result = ExperimentResult::new(
        "embedding",
        format!("cone={cone} s=({s}) p={p} q={q} nu=({nu})"),
        scales,
    );
    for f in f_sample {
        let mut row = Vec::with_capacity(scales.len());
        let mut div = false;
        for &lambda in scales {
            let fl = f.dilate_synthesis(cone, s, lambda);
            let big_f = TestFunction::profile(cone, s, fl.clone())?;
            let a = spaces::mixed_norm(&big_f, p, q, &nu, spec)?;
            let h = h2mu_norm_closed(cone, s, &fl)?;
            div |= a.diverged;
            row.push(a.value / h);
        }
        result.push_row(f.to_string(), row, div);
    }
    result.expected_slope = Some(target.expected_slope(cone, s));
    result.finish_slopes();
    Ok(result)
}

/// `g(u) = int_{Omega n (u - Omega)} f(u - xi) f(xi) Delta*_{s*}(2(u - xi)) Delta*_{s*}(2 xi) dxi`.
pub fn square_pw_coefficient(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    f: &ProfileFunction,
    u: &AlgebraElement,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    check_index(cone, s)?;
    f.check(cone)?;
    let region = Region::cone_cap(cone, u)?;
    let n = cone.n();
    let ss = s.star();
    let two = 4f64.powf(s.sum());
    let (c, uv) = (cone.clone(), u.coords().to_vec());
    integrate(
        &region,
        move |xi: &[f64]| {
            let mut d = [0.0f64; MAX_DIM];
            for k in 0..n {
                d[k] = uv[k] - xi[k];
            }
            let d = &d[..n];
            f.value(&c, d) * f.value(&c, xi) * two * c.power(ss.as_slice(), d, true) * c.power(ss.as_slice(), xi, true)
        },
        spec,
    )
}

/// `int_Omega g(u)^2 / Delta*_{2 s* + n/r}(u) du` by nested quadrature.
pub fn square_coefficient_norm(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    f: &ProfileFunction,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    let e = s.star().scale(2.0).shift(cone.n_over_r());
    let err = std::cell::RefCell::new(None);
    let sp = spec.clone().with_scale(spec.scale * f.decay_scale(cone).recip());
    let est = integrate(
        &Region::cone(cone),
        |u: &[f64]| {
            let ue = AlgebraElement::new(u.to_vec());
            match square_pw_coefficient(cone, s, f, &ue, spec) {
                Ok(g) => g.value * g.value / cone.power(e.as_slice(), u, true),
                Err(x) => {
                    err.borrow_mut().get_or_insert(x);
                    0.0
                }
            }
        },
        &sp,
    )?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(est),
    }
}

/// `(2 pi)^{-n} int_Omega e^{i(z|u)} g(u) du`, which reproduces `F(z)^2`.
pub fn synthesize_from_g(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    f: &ProfileFunction,
    z: &spaces::TubePoint,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<Cx>> {
    check_len(cone.n(), z.x.len())?;
    let n = cone.n();
    let front = (2.0 * PI).powf(-(n as f64));
    let err = std::cell::RefCell::new(None);
    let (x, y) = (z.x.clone(), z.y.coords().to_vec());
    let sp = spec.clone().with_scale(spec.scale / (f.decay_scale(cone) + cone.eigenvalues(&y)[1]));
    let est = integrate(
        &Region::cone(cone),
        |u: &[f64]| {
            let ue = AlgebraElement::new(u.to_vec());
            match square_pw_coefficient(cone, s, f, &ue, spec) {
                Ok(g) => Cx::new(-cone.inner(&y, u), cone.inner(&x, u)).exp() * (g.value * front),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    Cx::new(0.0, 0.0)
                }
            }
        },
        &sp,
    )?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(est),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma8Result {
    /// `||f||` in `L^2(Omega, Delta*_{2(1 - 1/q) nu*}(2 xi) dxi)`.
    pub profile_norm: f64,
    /// `||F||_{A^{2,q}_nu}` of the synthesis with `s = nu`.
    pub bergman_norm: spaces::NormResult,
    pub ratio: f64,
    pub finite: bool,
}

/// Synthesises `F` with `s = nu` and compares its `A^{2,q}_nu` norm with the profile norm.
pub fn lemma8_membership(
    cone: &ConeDescriptor,
    nu: &MultiIndex,
    q: f64,
    f: &ProfileFunction,
    spec: &QuadratureSpec,
) -> Result<Lemma8Result> {
    check_index(cone, nu)?;
    if !cone.g0().less(nu) {
        return Err(ConeError::Domain(format!("nu = ({nu}) must exceed g0")));
    }
    if !(q >= 2.0) {
        return Err(ConeError::Domain(format!("q = {q} must be at least 2")));
    }
    let weight = nu.scale(2.0 * (1.0 - 1.0 / q));
    let profile_norm = h2mu_norm_closed(cone, &weight, f)?;
    let big_f = TestFunction::profile(cone, nu, f.clone())?;
    let bergman_norm = spaces::mixed_norm(&big_f, 2.0, q, nu, spec)?;
    let ratio = bergman_norm.value / profile_norm;
    let finite = ratio.is_finite() && !bergman_norm.diverged;
    Ok(Lemma8Result { profile_norm, bergman_norm, ratio, finite })
}

/// Slope of `ln ratio` against `ln lambda`.
pub fn dilation_slope(scales: &[f64], ratios: &[f64]) -> f64 {
    fit_slope(scales, ratios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::TubePoint;

    fn h() -> ConeDescriptor {
        ConeDescriptor::halfline()
    }

    fn one() -> MultiIndex {
        MultiIndex::new(vec![1.0])
    }

    fn exp1() -> ProfileFunction {
        ProfileFunction::exponential(&h(), AlgebraElement::new(vec![1.0]))
    }

    #[test]
    fn densities() {
        let ms = MeasureSpec::new(&h(), &one()).unwrap();
        assert!((mu_density(&h(), &ms, &AlgebraElement::new(vec![3.7])).unwrap() - 1.0).abs() < 1e-15);
        let ms2 = MeasureSpec::new(&h(), &MultiIndex::new(vec![2.0])).unwrap();
        assert!((mu_density(&h(), &ms2, &AlgebraElement::new(vec![3.0])).unwrap() - 3.0).abs() < 1e-13);
        assert_eq!(mu_density(&h(), &ms2, &AlgebraElement::new(vec![-1.0])).unwrap(), 0.0);
        let d0 = MeasureSpec::new(&h(), &MultiIndex::new(vec![0.0])).unwrap();
        assert!(mu_density(&h(), &d0, &h().identity()).is_err());
    }

    #[test]
    fn halfline_synthesis_closed_form() {
        // F(z) = (2 pi)^{-1/2} 2 / (1 - i z)^2; F(i) = (2 pi)^{-1/2} / 2.
        let z = TubePoint::imaginary(&h(), h().identity()).unwrap();
        let v = pw_synthesize(&h(), &one(), &exp1(), &z, &QuadratureSpec::gauss(64)).unwrap().value;
        assert!((v.re - 0.5 / (2.0 * PI).sqrt()).abs() < 1e-14 && v.im.abs() < 1e-15);
        let z = TubePoint::new(&h(), vec![0.7], AlgebraElement::new(vec![0.3])).unwrap();
        let closed = pw_synthesize(&h(), &one(), &exp1(), &z, &QuadratureSpec::gauss(64)).unwrap().value;
        let w = Cx::new(1.0, 0.0) - Cx::new(0.0, 1.0) * Cx::new(0.7, 0.3);
        let oracle = 2.0 / (w * w) / (2.0 * PI).sqrt();
        assert!((closed - oracle).norm() < 1e-14);
        let quad = pw_synthesize_quadrature(&h(), &one(), &exp1(), &z, &QuadratureSpec::gauss(64)).unwrap();
        assert!((quad.value - oracle).norm() < 1e-9, "{quad:?}");
    }

    #[test]
    fn halfline_profile_norm() {
        let n = h2mu_norm_closed(&h(), &one(), &exp1()).unwrap();
        assert!((n - 0.5f64.sqrt()).abs() < 1e-15);
        let q = h2mu_norm_via_profile(&h(), &one(), &exp1(), &QuadratureSpec::gauss(64)).unwrap();
        assert!((q.value - n).abs() < 1e-12);
    }

    #[test]
    fn g_closed_form_halfline() {
        let spec = QuadratureSpec::gauss(32);
        for u in [0.5, 1.0, 2.0] {
            let g = square_pw_coefficient(&h(), &one(), &exp1(), &AlgebraElement::new(vec![u]), &spec).unwrap();
            let oracle = 2.0 / 3.0 * u.powi(3) * (-u).exp();
            assert!((g.value - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn dilation_of_profile_matches_direct() {
        let s = one();
        let f = exp1();
        let lambda = 1.7;
        let fl = f.dilate_synthesis(&h(), &s, lambda);
        let (x, y) = ([0.4], [0.9]);
        let a = fl.synthesize_closed(&h(), &s, &x, &y).unwrap();
        let b = f.synthesize_closed(&h(), &s, &[x[0] / lambda], &[y[0] / lambda]).unwrap();
        assert!((a - b).norm() < 1e-14 * b.norm());
    }
}
