//! Gamma and beta functions of the cone, each with a closed form and a
//! quadrature form, plus the Laplace transform of `Delta_s`.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{ConeError, Result};
use crate::jordan::{check, check_index, AlgebraElement, ConeDescriptor, MultiIndex};
use crate::quad::{integrate, IntegralEstimate, QuadratureSpec, Region};

/// Componentwise thresholds `(j - 1) d / 2` for convergence of `Gamma_Omega(s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceDomain {
    pub lower_bounds: MultiIndex,
}

impl ConvergenceDomain {
    pub fn of(cone: &ConeDescriptor) -> Self {
        ConvergenceDomain { lower_bounds: cone.g0().clone() }
    }

    pub fn contains(&self, s: &MultiIndex) -> bool {
        s.len() == self.lower_bounds.len() && self.lower_bounds.less(s)
    }

    /// Domain error naming the first component with `s_j <= (j - 1) d / 2`.
    pub fn check(&self, s: &MultiIndex) -> Result<()> {
        crate::error::check_len(self.lower_bounds.len(), s.len())?;
        for (j, (&sj, &g)) in s.as_slice().iter().zip(self.lower_bounds.as_slice()).enumerate() {
            if !(sj > g) {
                return Err(ConeError::Domain(format!(
                    "gamma integral diverges: s_{} = {sj} must exceed {g}",
                    j + 1
                )));
            }
        }
        Ok(())
    }
}

/// `ln Gamma_Omega(s) = ((n - r)/2) ln(2 pi) + sum_j ln Gamma(s_j - (j - 1) d / 2)`.
pub fn ln_gamma_closed(cone: &ConeDescriptor, s: &MultiIndex) -> Result<f64> {
    check_index(cone, s)?;
    ConvergenceDomain::of(cone).check(s)?;
    let half_d = cone.d() / 2.0;
    let base = (cone.n() - cone.r()) as f64 / 2.0 * (2.0 * std::f64::consts::PI).ln();
    Ok(base
        + s.as_slice()
            .iter()
            .enumerate()
            .map(|(j, &sj)| ln_gamma(sj - j as f64 * half_d))
            .sum::<f64>())
}

fn exp_checked(ln: f64, what: &str) -> Result<f64> {
    if ln > 700.0 {
        return Err(ConeError::Domain(format!("{what} overflows: ln value {ln:.3} exceeds 700")));
    }
    Ok(ln.exp())
}

pub fn gamma_closed(cone: &ConeDescriptor, s: &MultiIndex) -> Result<f64> {
    exp_checked(ln_gamma_closed(cone, s)?, "gamma")
}

/// `int_Omega e^{-(e|xi)} Delta_s(xi) Delta^{-n/r}(xi) d xi`.
pub fn gamma_integral(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    check_index(cone, s)?;
    ConvergenceDomain::of(cone).check(s)?;
    let e = s.shift(-cone.n_over_r());
    let c = cone.clone();
    integrate(
        &Region::cone(cone),
        move |x: &[f64]| (c.ln_power(e.as_slice(), x, false) - c.trace(x)).exp(),
        spec,
    )
}

pub fn beta_closed(cone: &ConeDescriptor, p: &MultiIndex, q: &MultiIndex) -> Result<f64> {
    let ln = ln_gamma_closed(cone, p)? + ln_gamma_closed(cone, q)? - ln_gamma_closed(cone, &p.add(q))?;
    exp_checked(ln, "beta")
}

/// `int_{Omega n (e - Omega)} Delta_{p - n/r}(x) Delta_{q - n/r}(e - x) dx`.
pub fn beta_integral(
    cone: &ConeDescriptor,
    p: &MultiIndex,
    q: &MultiIndex,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    cap_integral(cone, p, q, &cone.identity(), false, spec)
}

/// `F(y) = int_{(y - Omega) n Omega} Delta*_{p* - n/r}(x) Delta*_{q* - n/r}(y - x) dx`,
/// which equals `B_Omega(p*, q*) Delta*_{p* + q* - n/r}(y)`.
pub fn rotated_beta_integral(
    cone: &ConeDescriptor,
    p: &MultiIndex,
    q: &MultiIndex,
    y: &AlgebraElement,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    cap_integral(cone, &p.star(), &q.star(), y, true, spec)
}

/// `Delta*_{p* + q* - n/r}(y)`, the y-dependence of [`rotated_beta_integral`].
pub fn rotated_beta_profile(
    cone: &ConeDescriptor,
    p: &MultiIndex,
    q: &MultiIndex,
    y: &AlgebraElement,
) -> Result<f64> {
    let e = p.star().add(&q.star()).shift(-cone.n_over_r());
    crate::jordan::power_function(cone, &e, y, true)
}

fn cap_integral(
    cone: &ConeDescriptor,
    p: &MultiIndex,
    q: &MultiIndex,
    y: &AlgebraElement,
    rotated: bool,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    check_index(cone, p)?;
    check_index(cone, q)?;
    check(cone, y)?;
    let dom = ConvergenceDomain::of(cone);
    dom.check(p)?;
    dom.check(q)?;
    let region = Region::cone_cap(cone, y)?;
    let nr = cone.n_over_r();
    let (a, b) = (p.shift(-nr), q.shift(-nr));
    let (c, y) = (cone.clone(), y.coords().to_vec());
    integrate(
        &region,
        move |x: &[f64]| {
            let mut yx = [0.0f64; crate::quad::MAX_DIM];
            for k in 0..x.len() {
                yx[k] = y[k] - x[k];
            }
            (c.ln_power(a.as_slice(), x, rotated) + c.ln_power(b.as_slice(), &yx[..x.len()], rotated)).exp()
        },
        spec,
    )
}

/// `int_Omega e^{-(y|xi)} Delta_s(xi) Delta^{-n/r}(xi) d xi`, to be compared with
/// `Gamma_Omega(s) Delta_s(y^{-1})`.
pub fn laplace_power(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    y: &AlgebraElement,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<f64>> {
    check_index(cone, s)?;
    check(cone, y)?;
    ConvergenceDomain::of(cone).check(s)?;
    if !cone.contains(y.coords()) {
        return Err(ConeError::Domain(format!("{y} is not in the open cone {cone}")));
    }
    let e = s.shift(-cone.n_over_r());
    let (c, yv) = (cone.clone(), y.coords().to_vec());
    // Match the map scale to the decay rate along the slowest eigendirection.
    let spec = spec.clone().with_scale(spec.scale / cone.eigenvalues(y.coords())[1]);
    integrate(
        &Region::cone(cone),
        move |x: &[f64]| (c.ln_power(e.as_slice(), x, false) - c.inner(&yv, x)).exp(),
        &spec,
    )
}

/// `Gamma_Omega(s) Delta_s(y^{-1})`.
pub fn laplace_power_closed(cone: &ConeDescriptor, s: &MultiIndex, y: &AlgebraElement) -> Result<f64> {
    let inv = crate::jordan::inverse(cone, y)?;
    Ok(gamma_closed(cone, s)? * crate::jordan::power_function(cone, s, &inv, false)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn l3() -> ConeDescriptor {
        ConeDescriptor::lorentz(3).unwrap()
    }

    fn mi(v: &[f64]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn closed_gamma_values() {
        let h = ConeDescriptor::halfline();
        assert!((gamma_closed(&h, &mi(&[3.0])).unwrap() - 2.0).abs() < 1e-12);
        let g = gamma_closed(&l3(), &mi(&[2.0, 1.5])).unwrap();
        assert!((g - (2.0 * PI).sqrt()).abs() < 1e-12);
        match gamma_closed(&l3(), &mi(&[1.0, 0.4])) {
            Err(ConeError::Domain(msg)) => assert!(msg.contains("s_2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(gamma_closed(&h, &mi(&[200.0])).is_err());
    }

    #[test]
    fn halfline_recursion() {
        let h = ConeDescriptor::halfline();
        for s in [0.5, 1.3, 4.0, 9.5] {
            let a = gamma_closed(&h, &mi(&[s + 1.0])).unwrap();
            let b = s * gamma_closed(&h, &mi(&[s])).unwrap();
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_beta_values() {
        let h = ConeDescriptor::halfline();
        assert!((beta_closed(&h, &mi(&[2.0]), &mi(&[3.0])).unwrap() - 1.0 / 12.0).abs() < 1e-14);
        let p = mi(&[2.0, 1.5]);
        let b = beta_closed(&l3(), &p, &p).unwrap();
        // Gamma_Omega(4, 3) = sqrt(2 pi) Gamma(4) Gamma(2.5).
        let oracle = 2.0 * PI / ((2.0 * PI).sqrt() * 6.0 * (0.75 * PI.sqrt()));
        assert!((b - oracle).abs() < 1e-12, "{b} {oracle}");
    }

    #[test]
    fn halfline_integrals() {
        let h = ConeDescriptor::halfline();
        let spec = QuadratureSpec::gauss(64);
        let g = gamma_integral(&h, &mi(&[2.0]), &spec).unwrap();
        assert!((g.value - 1.0).abs() < 1e-10);
        let b = beta_integral(&h, &mi(&[1.0]), &mi(&[1.0]), &spec).unwrap();
        assert!((b.value - 1.0).abs() < 1e-12);
        let y = AlgebraElement::new(vec![2.0]);
        let l = laplace_power(&h, &mi(&[1.0]), &y, &spec).unwrap();
        assert!((l.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lorentz_gamma_integral() {
        let est = gamma_integral(&l3(), &mi(&[3.0, 2.0]), &QuadratureSpec::gauss(48)).unwrap();
        let oracle = (2.0 * PI).sqrt() * 2.0 * PI.sqrt() / 2.0;
        assert!((est.value / oracle - 1.0).abs() < 1e-6, "{est:?}");
    }

    #[test]
    fn laplace_homogeneity() {
        let c = l3();
        let s = mi(&[2.0, 1.5]);
        let y = AlgebraElement::new(vec![2.0, 1.0, 0.0]);
        let spec = QuadratureSpec::gauss(40);
        let a = laplace_power(&c, &s, &y, &spec).unwrap().value;
        let b = laplace_power(&c, &s, &y.scale(3.0), &spec).unwrap().value;
        assert!((b / a - 3f64.powf(-3.5)).abs() < 1e-6 * b / a);
    }

    #[test]
    fn rotated_beta_on_halfline() {
        let h = ConeDescriptor::halfline();
        let (p, q) = (mi(&[2.0]), mi(&[3.0]));
        let y = AlgebraElement::new(vec![1.7]);
        let f = rotated_beta_integral(&h, &p, &q, &y, &QuadratureSpec::gauss(32)).unwrap();
        assert!((f.value - 1.7f64.powi(4) / 12.0).abs() < 1e-12);
    }
}
