//! Euclidean Jordan algebra of a concrete symmetric cone.
//!
//! Two cones are supported: the half-line `(0, inf)` (rank 1) and the Lorentz
//! cone `x0 > |x'|` in `R^n`, `n >= 3` (rank 2, spin factor). The inner product
//! is the trace form `(x|y) = tr(x o y)`, which on the Lorentz cone is twice the
//! Euclidean dot product.
//!
//! The slice methods on [`ConeDescriptor`] (`det`, `minor`, `ln_power`, ...)
//! skip dimension checks and are meant for integrand inner loops. The free
//! functions check their inputs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, ConeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    Halfline,
    Lorentz,
}

/// A real multi-index `(s_1, ..., s_r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiIndex(Vec<f64>);

impl MultiIndex {
    pub fn new(exponents: Vec<f64>) -> Self {
        MultiIndex(exponents)
    }

    /// `(v, ..., v)` of length `r`.
    pub fn scalar(r: usize, v: f64) -> Self {
        MultiIndex(vec![v; r])
    }

    /// Parses a comma-separated list such as `2,1.5`.
    pub fn parse(text: &str) -> Result<Self> {
        parse_list(text).map(MultiIndex)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Reversal `s* = (s_r, ..., s_1)`.
    pub fn star(&self) -> Self {
        MultiIndex(self.0.iter().rev().copied().collect())
    }

    /// Componentwise shift `s + a`.
    pub fn shift(&self, a: f64) -> Self {
        MultiIndex(self.0.iter().map(|v| v + a).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        MultiIndex(self.0.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Strict componentwise order `s < t`.
    pub fn less(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a < b)
    }

    pub fn is_scalar(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.0)
    }
}

/// A point of `V = R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement(Vec<f64>);

impl AlgebraElement {
    pub fn new(coords: Vec<f64>) -> Self {
        AlgebraElement(coords)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_list(text).map(AlgebraElement)
    }

    pub fn zeros(n: usize) -> Self {
        AlgebraElement(vec![0.0; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &AlgebraElement) -> Self {
        AlgebraElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &AlgebraElement) -> Self {
        AlgebraElement(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        AlgebraElement(self.0.iter().map(|a| a * c).collect())
    }

    /// Euclidean norm of the coordinates.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<usize> for AlgebraElement {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.0)
    }
}

/// `x = sum_i lambda_i c_i`, eigenvalues in decreasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub idempotents: Vec<AlgebraElement>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> AlgebraElement {
        let n = self.idempotents[0].len();
        let mut out = vec![0.0; n];
        for (l, c) in self.eigenvalues.iter().zip(&self.idempotents) {
            for (o, ci) in out.iter_mut().zip(c.coords()) {
                *o += l * ci;
            }
        }
        AlgebraElement(out)
    }
}

/// A concrete symmetric cone with its structure constants and Jordan frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeDescriptor {
    kind: ConeKind,
    n: usize,
    r: usize,
    d: f64,
    g0: MultiIndex,
    frame_direction: Vec<f64>,
}

impl ConeDescriptor {
    pub fn halfline() -> Self {
        ConeDescriptor {
            kind: ConeKind::Halfline,
            n: 1,
            r: 1,
            d: 0.0,
            g0: MultiIndex(vec![0.0]),
            frame_direction: Vec::new(),
        }
    }

    /// Lorentz cone in `R^n` with frame direction `u = (1, 0, ..., 0)`.
    pub fn lorentz(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(ConeError::Config(format!("lorentz cone needs n >= 3, got {n}")));
        }
        let mut u = vec![0.0; n - 1];
        u[0] = 1.0;
        Self::lorentz_with_frame(n, &u)
    }

    /// Lorentz cone with frame `c1 = (1, u)/2`, `c2 = (1, -u)/2`. `u` is normalized.
    pub fn lorentz_with_frame(n: usize, u: &[f64]) -> Result<Self> {
        if n < 3 {
            return Err(ConeError::Config(format!("lorentz cone needs n >= 3, got {n}")));
        }
        check_len(n - 1, u.len())?;
        let len = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(len > 0.0) || !len.is_finite() {
            return Err(ConeError::Config("frame direction must be a nonzero vector".into()));
        }
        let d = (n - 2) as f64;
        Ok(ConeDescriptor {
            kind: ConeKind::Lorentz,
            n,
            r: 2,
            d,
            g0: MultiIndex(vec![0.0, d / 2.0]),
            frame_direction: u.iter().map(|a| a / len).collect(),
        })
    }

    /// Parses `halfline`, `lorentz:<n>` or `lorentz:<n>:u=<comma list>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "halfline" {
            return Ok(Self::halfline());
        }
        let mut parts = spec.splitn(3, ':');
        if parts.next() != Some("lorentz") {
            return Err(ConeError::Config(format!("unknown cone `{spec}`")));
        }
        let n: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| ConeError::Config(format!("bad dimension in `{spec}`")))?;
        match parts.next() {
            None => Self::lorentz(n),
            Some(rest) => {
                let u = rest
                    .strip_prefix("u=")
                    .ok_or_else(|| ConeError::Config(format!("expected `u=...` in `{spec}`")))?;
                Self::lorentz_with_frame(n, &parse_list(u)?)
            }
        }
    }

    pub fn kind(&self) -> ConeKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn g0(&self) -> &MultiIndex {
        &self.g0
    }

    pub fn frame_direction(&self) -> &[f64] {
        &self.frame_direction
    }

    pub fn n_over_r(&self) -> f64 {
        self.n as f64 / self.r as f64
    }

    pub fn identity(&self) -> AlgebraElement {
        let mut e = vec![0.0; self.n];
        e[0] = 1.0;
        AlgebraElement(e)
    }

    /// The fixed Jordan frame `c_1, ..., c_r`.
    pub fn frame(&self) -> Vec<AlgebraElement> {
        match self.kind {
            ConeKind::Halfline => vec![AlgebraElement(vec![1.0])],
            ConeKind::Lorentz => vec![self.rank_one(1.0), self.rank_one(-1.0)],
        }
    }

    fn rank_one(&self, sign: f64) -> AlgebraElement {
        let mut c = Vec::with_capacity(self.n);
        c.push(0.5);
        c.extend(self.frame_direction.iter().map(|u| 0.5 * sign * u));
        AlgebraElement(c)
    }

    /// Short text form, inverse of [`ConeDescriptor::parse`] for the default frame.
    pub fn spec_string(&self) -> String {
        match self.kind {
            ConeKind::Halfline => "halfline".into(),
            ConeKind::Lorentz => {
                let default = self.frame_direction[0] == 1.0
                    && self.frame_direction[1..].iter().all(|&a| a == 0.0);
                if default {
                    format!("lorentz:{}", self.n)
                } else {
                    let u: Vec<String> = self.frame_direction.iter().map(|a| a.to_string()).collect();
                    format!("lorentz:{}:u={}", self.n, u.join(","))
                }
            }
        }
    }

    /// `<x', u>` for the Lorentz cone.
    #[inline]
    fn along_u(&self, x: &[f64]) -> f64 {
        x[1..].iter().zip(&self.frame_direction).map(|(a, b)| a * b).sum()
    }

    /// Trace form `(x|y)`.
    #[inline]
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            ConeKind::Halfline => x[0] * y[0],
            ConeKind::Lorentz => 2.0 * x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>(),
        }
    }

    /// `tr(x)`.
    #[inline]
    pub fn trace(&self, x: &[f64]) -> f64 {
        match self.kind {
            ConeKind::Halfline => x[0],
            ConeKind::Lorentz => 2.0 * x[0],
        }
    }

    /// Determinant `Delta(x)`.
    #[inline]
    pub fn det(&self, x: &[f64]) -> f64 {
        match self.kind {
            ConeKind::Halfline => x[0],
            ConeKind::Lorentz => x[0] * x[0] - x[1..].iter().map(|a| a * a).sum::<f64>(),
        }
    }

    /// Principal minor `Delta_k` (k = 1..r), fixed frame if `!rotated`, reversed frame otherwise.
    #[inline]
    pub fn minor(&self, k: usize, x: &[f64], rotated: bool) -> f64 {
        match self.kind {
            ConeKind::Halfline => x[0],
            ConeKind::Lorentz => {
                if k >= 2 {
                    self.det(x)
                } else if rotated {
                    x[0] - self.along_u(x)
                } else {
                    x[0] + self.along_u(x)
                }
            }
        }
    }

    /// `ln Delta_s(x)` (or `ln Delta*_s(x)`); NaN or -inf off the cone.
    #[inline]
    pub fn ln_power(&self, s: &[f64], x: &[f64], rotated: bool) -> f64 {
        match self.kind {
            ConeKind::Halfline => s[0] * x[0].ln(),
            ConeKind::Lorentz => {
                let d = self.det(x);
                let m1 = self.minor(1, x, rotated);
                let mut out = s[1] * d.ln();
                if s[0] != s[1] {
                    out += (s[0] - s[1]) * m1.ln();
                }
                out
            }
        }
    }

    /// `Delta_s(x)` without checks.
    #[inline]
    pub fn power(&self, s: &[f64], x: &[f64], rotated: bool) -> f64 {
        self.ln_power(s, x, rotated).exp()
    }

    /// Eigenvalues in decreasing order.
    #[inline]
    pub fn eigenvalues(&self, x: &[f64]) -> [f64; 2] {
        match self.kind {
            ConeKind::Halfline => [x[0], x[0]],
            ConeKind::Lorentz => {
                let rho = x[1..].iter().map(|a| a * a).sum::<f64>().sqrt();
                [x[0] + rho, x[0] - rho]
            }
        }
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        match self.kind {
            ConeKind::Halfline => x[0] > 0.0,
            ConeKind::Lorentz => self.eigenvalues(x)[1] > 0.0,
        }
    }

    /// Jordan product into `out`.
    #[inline]
    pub fn product_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        match self.kind {
            ConeKind::Halfline => out[0] = x[0] * y[0],
            ConeKind::Lorentz => {
                out[0] = x.iter().zip(y).map(|(a, b)| a * b).sum();
                for k in 1..self.n {
                    out[k] = x[0] * y[k] + y[0] * x[k];
                }
            }
        }
    }

    /// Spectral decomposition; for `x' = 0` the frame direction supplies the idempotents.
    pub fn spectral_of(&self, x: &[f64]) -> SpectralDecomposition {
        match self.kind {
            ConeKind::Halfline => SpectralDecomposition {
                eigenvalues: vec![x[0]],
                idempotents: vec![AlgebraElement(vec![1.0])],
            },
            ConeKind::Lorentz => {
                let rho = x[1..].iter().map(|a| a * a).sum::<f64>().sqrt();
                let dir: Vec<f64> = if rho > 0.0 {
                    x[1..].iter().map(|a| a / rho).collect()
                } else {
                    self.frame_direction.clone()
                };
                let c = |sign: f64| {
                    let mut v = Vec::with_capacity(self.n);
                    v.push(0.5);
                    v.extend(dir.iter().map(|a| 0.5 * sign * a));
                    AlgebraElement(v)
                };
                SpectralDecomposition {
                    eigenvalues: vec![x[0] + rho, x[0] - rho],
                    idempotents: vec![c(1.0), c(-1.0)],
                }
            }
        }
    }

    /// `sum_i f(lambda_i) c_i`.
    pub fn spectral_map(&self, x: &[f64], f: impl Fn(f64) -> f64) -> AlgebraElement {
        let sd = self.spectral_of(x);
        SpectralDecomposition {
            eigenvalues: sd.eigenvalues.iter().map(|&l| f(l)).collect(),
            idempotents: sd.idempotents,
        }
        .reconstruct()
    }

    /// Quadratic representation `P(a)w = 2 a o (a o w) - a^2 o w`.
    pub fn quadratic_rep(&self, a: &[f64], w: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut aw = vec![0.0; n];
        let mut a_aw = vec![0.0; n];
        let mut a2 = vec![0.0; n];
        let mut a2w = vec![0.0; n];
        self.product_into(a, w, &mut aw);
        self.product_into(a, &aw, &mut a_aw);
        self.product_into(a, a, &mut a2);
        self.product_into(&a2, w, &mut a2w);
        a_aw.iter().zip(&a2w).map(|(p, q)| 2.0 * p - q).collect()
    }

    /// Reflection `m` exchanging the frame idempotents: `x' -> x' - 2<x',u>u`.
    pub fn reflect(&self, x: &[f64]) -> Vec<f64> {
        match self.kind {
            ConeKind::Halfline => x.to_vec(),
            ConeKind::Lorentz => {
                let t = self.along_u(x);
                let mut out = x.to_vec();
                for (o, u) in out[1..].iter_mut().zip(&self.frame_direction) {
                    *o -= 2.0 * t * u;
                }
                out
            }
        }
    }
}

impl fmt::Display for ConeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, v: &[f64]) -> fmt::Result {
    for (i, a) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

pub(crate) fn parse_list(text: &str) -> Result<Vec<f64>> {
    let out: std::result::Result<Vec<f64>, _> =
        text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match out {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(ConeError::Config(format!("cannot parse number list `{text}`"))),
    }
}

pub(crate) fn check(cone: &ConeDescriptor, x: &AlgebraElement) -> Result<()> {
    check_len(cone.n(), x.len())
}

pub(crate) fn check_index(cone: &ConeDescriptor, s: &MultiIndex) -> Result<()> {
    check_len(cone.r(), s.len())
}

pub fn jordan_product(
    cone: &ConeDescriptor,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> Result<AlgebraElement> {
    check(cone, x)?;
    check(cone, y)?;
    let mut out = vec![0.0; cone.n()];
    cone.product_into(x.coords(), y.coords(), &mut out);
    Ok(AlgebraElement(out))
}

pub fn trace_inner(cone: &ConeDescriptor, x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    check(cone, x)?;
    check(cone, y)?;
    Ok(cone.inner(x.coords(), y.coords()))
}

pub fn spectral(cone: &ConeDescriptor, x: &AlgebraElement) -> Result<SpectralDecomposition> {
    check(cone, x)?;
    Ok(cone.spectral_of(x.coords()))
}

pub fn determinant(cone: &ConeDescriptor, x: &AlgebraElement) -> Result<f64> {
    check(cone, x)?;
    Ok(cone.det(x.coords()))
}

fn minor_checked(cone: &ConeDescriptor, k: usize, x: &AlgebraElement, rotated: bool) -> Result<f64> {
    check(cone, x)?;
    if k == 0 || k > cone.r() {
        return Err(ConeError::OutOfRange { index: k, max: cone.r() });
    }
    Ok(cone.minor(k, x.coords(), rotated))
}

/// `Delta_k(x)` for the fixed frame.
pub fn principal_minor(cone: &ConeDescriptor, k: usize, x: &AlgebraElement) -> Result<f64> {
    minor_checked(cone, k, x, false)
}

/// `Delta*_k(x)` for the reversed frame.
pub fn rotated_minor(cone: &ConeDescriptor, k: usize, x: &AlgebraElement) -> Result<f64> {
    minor_checked(cone, k, x, true)
}

/// `Delta_s(x)` or, with `rotated`, `Delta*_s(x)`. Requires `x` in the open cone.
pub fn power_function(
    cone: &ConeDescriptor,
    s: &MultiIndex,
    x: &AlgebraElement,
    rotated: bool,
) -> Result<f64> {
    check(cone, x)?;
    check_index(cone, s)?;
    if !cone.contains(x.coords()) {
        return Err(ConeError::Domain(format!("{x} is not in the open cone {cone}")));
    }
    Ok(cone.power(s.as_slice(), x.coords(), rotated))
}

pub fn inverse(cone: &ConeDescriptor, x: &AlgebraElement) -> Result<AlgebraElement> {
    check(cone, x)?;
    let d = cone.det(x.coords());
    if d == 0.0 || !d.is_finite() {
        return Err(ConeError::Singular(format!("{x} has determinant {d}")));
    }
    let c = x.coords();
    Ok(match cone.kind() {
        ConeKind::Halfline => AlgebraElement(vec![1.0 / c[0]]),
        ConeKind::Lorentz => {
            let mut out = Vec::with_capacity(c.len());
            out.push(c[0] / d);
            out.extend(c[1..].iter().map(|a| -a / d));
            AlgebraElement(out)
        }
    })
}

/// All eigenvalues strictly positive; false on dimension mismatch.
pub fn in_cone(cone: &ConeDescriptor, x: &AlgebraElement) -> bool {
    x.len() == cone.n() && cone.contains(x.coords())
}

pub fn multiindex_star(s: &MultiIndex) -> MultiIndex {
    s.star()
}

pub fn multiindex_shift(s: &MultiIndex, a: f64) -> MultiIndex {
    s.shift(a)
}

pub fn multiindex_less(s: &MultiIndex, t: &MultiIndex) -> bool {
    s.less(t)
}

/// Wallach set membership, reading the parametrization as
/// `s_1 = u_1`, `s_j = u_j + (d/2) sum_{i<j} sgn(u_i)` with all `u_j >= 0`.
///
/// The `u_j` are recovered one at a time, so membership is decided exactly.
pub fn in_wallach(cone: &ConeDescriptor, s: &MultiIndex) -> bool {
    wallach_parameters(cone, s).is_some()
}

/// The `u` of [`in_wallach`], if `s` is in the Wallach set.
pub fn wallach_parameters(cone: &ConeDescriptor, s: &MultiIndex) -> Option<Vec<f64>> {
    if s.len() != cone.r() {
        return None;
    }
    let half_d = cone.d() / 2.0;
    let mut positives = 0usize;
    let mut u = Vec::with_capacity(s.len());
    for &sj in s.as_slice() {
        let uj = sj - half_d * positives as f64;
        if !(uj >= 0.0) {
            return None;
        }
        if uj > 0.0 {
            positives += 1;
        }
        u.push(uj);
    }
    Some(u)
}
