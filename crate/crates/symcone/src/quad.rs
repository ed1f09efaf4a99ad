//! Integration over the cone, cone caps `Omega n (y - Omega)`, the real space
//! `R^n`, and tube regions.
//!
//! Every region is cut into pieces whose coordinates live on products of
//! intervals. Each axis is either bounded, periodic, or unbounded (rational map
//! `t = a u / (1 - u)`, or Gauss-Laguerre on request). Bounded and unbounded
//! axes use a sigmoidal grading `u = w^m / (w^m + (1 - w)^m)` so that
//! integrable endpoint singularities become smooth in `w`.
//!
//! Lorentz cone coordinates: `xi = l1 c(w) + l2 c(-w)` with `c(w) = (1, w)/2`,
//! `l2 = v l1`, `w` on the unit sphere of `R^{n-1}`. The Lebesgue measure is the
//! one induced by the trace form, `2^{n/2}` times the Euclidean one, which gives
//! `d xi = 2^{1 - n/2} l1^{n-1} (1 - v)^{n-2} dl1 dv dw`. The real space uses
//! light-cone coordinates `a = |x'| - x0`, `b = |x'| + x0` split along the light
//! cone.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::rc::Rc;
use std::sync::Arc;

use gauss_quad::laguerre::GaussLaguerre;
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{ConeError, Result};
use crate::jordan::{AlgebraElement, ConeDescriptor, ConeKind};

/// Largest supported number of real integration dimensions.
pub const MAX_DIM: usize = 6;

/// Largest tensor grid evaluated before asking for Monte Carlo instead.
const MAX_TENSOR_POINTS: f64 = 4.0e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    TensorGauss,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnboundedMap {
    Rational,
    Laguerre,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub nodes: usize,
    pub samples: usize,
    /// Scale `a` of the rational map on unbounded axes.
    pub scale: f64,
    /// Grading exponent `m`; 1 disables grading.
    pub grading: u32,
    pub unbounded: UnboundedMap,
    pub seed: u64,
    pub target_rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            scheme: Scheme::TensorGauss,
            nodes: 64,
            samples: 2_000_000,
            scale: 1.0,
            grading: 2,
            unbounded: UnboundedMap::Rational,
            seed: 42,
            target_rel_tol: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn gauss(nodes: usize) -> Self {
        QuadratureSpec { nodes, ..Default::default() }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadratureSpec { scheme: Scheme::MonteCarlo, samples, seed, ..Default::default() }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.target_rel_tol = tol;
        self
    }

    pub fn with_grading(mut self, m: u32) -> Self {
        self.grading = m;
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn laguerre(mut self) -> Self {
        self.unbounded = UnboundedMap::Laguerre;
        self
    }

    /// The same spec at doubled resolution.
    pub fn doubled(&self) -> Self {
        let mut s = self.clone();
        s.nodes *= 2;
        s.samples *= 2;
        s
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.scheme {
            Scheme::TensorGauss => self.nodes > 0,
            Scheme::MonteCarlo => self.samples > 1,
        };
        if !ok || !(self.scale > 0.0) || self.grading == 0 || !(self.target_rel_tol > 0.0) {
            return Err(ConeError::Config(format!("invalid quadrature spec: {}", self.to_kv())));
        }
        Ok(())
    }

    /// Plain-text `key=value` form.
    pub fn to_kv(&self) -> String {
        let scheme = match self.scheme {
            Scheme::TensorGauss => "tensor_gauss",
            Scheme::MonteCarlo => "monte_carlo",
        };
        let unb = match self.unbounded {
            UnboundedMap::Rational => "rational",
            UnboundedMap::Laguerre => "laguerre",
        };
        format!(
            "scheme={scheme} nodes={} samples={} scale={} grading={} unbounded={unb} seed={} tol={}",
            self.nodes, self.samples, self.scale, self.grading, self.seed, self.target_rel_tol
        )
    }

    /// Applies `key=value` pairs (whitespace or newline separated) on top of `self`.
    pub fn apply_kv(mut self, text: &str) -> Result<Self> {
        for tok in text.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| ConeError::Config(format!("expected key=value, got `{tok}`")))?;
            let bad = || ConeError::Config(format!("bad value for {k}: `{v}`"));
            match k {
                "scheme" => {
                    self.scheme = match v {
                        "tensor_gauss" => Scheme::TensorGauss,
                        "monte_carlo" => Scheme::MonteCarlo,
                        _ => return Err(bad()),
                    }
                }
                "nodes" => self.nodes = v.parse().map_err(|_| bad())?,
                "samples" => self.samples = parse_count(v).ok_or_else(bad)?,
                "scale" => self.scale = v.parse().map_err(|_| bad())?,
                "grading" => self.grading = v.parse().map_err(|_| bad())?,
                "unbounded" => {
                    self.unbounded = match v {
                        "rational" => UnboundedMap::Rational,
                        "laguerre" => UnboundedMap::Laguerre,
                        _ => return Err(bad()),
                    }
                }
                "seed" => self.seed = v.parse().map_err(|_| bad())?,
                "tol" => self.target_rel_tol = v.parse().map_err(|_| bad())?,
                _ => return Err(ConeError::Config(format!("unknown quadrature key `{k}`"))),
            }
        }
        Ok(self)
    }
}

fn parse_count(v: &str) -> Option<usize> {
    v.parse::<usize>().ok().or_else(|| {
        let f: f64 = v.parse().ok()?;
        (f >= 1.0 && f.fract() == 0.0).then_some(f as usize)
    })
}

/// Values the engine can integrate: reals and complex numbers.
pub trait QuadValue:
    Copy + Send + Sync + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
    fn finite(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A value with an absolute error estimate.
///
/// `error_estimate` is `|I_N - I_{N/2}|` for tensor rules (or `|I_{2N} - I_N|`
/// after [`refine`]) and the standard error for Monte Carlo. `converged` is the
/// soft non-convergence flag: false when the error exceeds `QuadratureSpec::target_rel_tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralEstimate<T> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: u64,
    /// Nodes per axis or sample count used for `value`.
    pub level: usize,
    pub converged: bool,
}

impl<T: QuadValue> IntegralEstimate<T> {
    pub fn rel_error(&self) -> f64 {
        self.error_estimate / self.value.modulus()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RegionKind {
    /// The open cone.
    Cone,
    /// `Omega n (y - Omega)`.
    ConeCap(AlgebraElement),
    /// `R^n`, coordinates centred at `center`.
    Slab { center: Vec<f64> },
    /// `x` in a box times `y` in a box inside the cone. Points are `(x, y)`.
    TubeBox { x_lo: Vec<f64>, x_hi: Vec<f64>, y_lo: Vec<f64>, y_hi: Vec<f64> },
    /// The whole tube `R^n + i Omega`. Points are `(x, y)`.
    Tube { center: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub kind: RegionKind,
    pub cone: ConeDescriptor,
}

impl Region {
    pub fn cone(cone: &ConeDescriptor) -> Self {
        Region { kind: RegionKind::Cone, cone: cone.clone() }
    }

    pub fn cone_cap(cone: &ConeDescriptor, y: &AlgebraElement) -> Result<Self> {
        crate::error::check_len(cone.n(), y.len())?;
        if !cone.contains(y.coords()) {
            return Err(ConeError::Domain(format!("cap apex {y} is not in the cone")));
        }
        Ok(Region { kind: RegionKind::ConeCap(y.clone()), cone: cone.clone() })
    }

    pub fn slab(cone: &ConeDescriptor) -> Self {
        Self::slab_centered(cone, &vec![0.0; cone.n()])
    }

    pub fn slab_centered(cone: &ConeDescriptor, center: &[f64]) -> Self {
        Region { kind: RegionKind::Slab { center: center.to_vec() }, cone: cone.clone() }
    }

    pub fn tube(cone: &ConeDescriptor, center: &[f64]) -> Self {
        Region { kind: RegionKind::Tube { center: center.to_vec() }, cone: cone.clone() }
    }

    pub fn tube_box(
        cone: &ConeDescriptor,
        x_lo: &[f64],
        x_hi: &[f64],
        y_lo: &[f64],
        y_hi: &[f64],
    ) -> Result<Self> {
        let n = cone.n();
        for v in [x_lo, x_hi, y_lo, y_hi] {
            crate::error::check_len(n, v.len())?;
        }
        if x_lo.iter().zip(x_hi).chain(y_lo.iter().zip(y_hi)).any(|(a, b)| !(a < b)) {
            return Err(ConeError::Domain("tube box corners must satisfy lo < hi".into()));
        }
        // The cone is convex, so the box lies inside iff every corner does.
        let mut corner = vec![0.0; n];
        for mask in 0..(1usize << n) {
            for k in 0..n {
                corner[k] = if mask >> k & 1 == 1 { y_hi[k] } else { y_lo[k] };
            }
            if !cone.contains(&corner) {
                return Err(ConeError::Domain(format!(
                    "tube box window corner {corner:?} is not inside the cone"
                )));
            }
        }
        Ok(Region {
            kind: RegionKind::TubeBox {
                x_lo: x_lo.to_vec(),
                x_hi: x_hi.to_vec(),
                y_lo: y_lo.to_vec(),
                y_hi: y_hi.to_vec(),
            },
            cone: cone.clone(),
        })
    }

    /// Length of the point slice handed to integrands.
    pub fn point_dim(&self) -> usize {
        match self.kind {
            RegionKind::Tube { .. } | RegionKind::TubeBox { .. } => 2 * self.cone.n(),
            _ => self.cone.n(),
        }
    }

    /// Number of integration variables.
    pub fn dim(&self) -> usize {
        self.point_dim()
    }

    fn pieces(&self, scale: f64) -> Vec<Piece> {
        let c = &self.cone;
        match &self.kind {
            RegionKind::Cone => cone_pieces(c, scale),
            RegionKind::ConeCap(y) => cap_pieces(c, y.coords()),
            RegionKind::Slab { center } => slab_pieces(c, center, scale),
            RegionKind::Tube { center } => product(&slab_pieces(c, center, scale), &cone_pieces(c, scale)),
            RegionKind::TubeBox { x_lo, x_hi, y_lo, y_hi } => {
                product(&box_pieces(c, x_lo, x_hi), &box_pieces(c, y_lo, y_hi))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Axis {
    Bounded(f64, f64),
    Periodic(f64, f64),
    Unbounded(f64),
}

type MapFn = Arc<dyn Fn(&[f64], &mut [f64]) -> f64 + Send + Sync>;

/// Coordinates -> (point, Jacobian).
#[derive(Clone)]
struct Piece {
    axes: Vec<Axis>,
    out_dim: usize,
    map: MapFn,
}

fn product(a: &[Piece], b: &[Piece]) -> Vec<Piece> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for pa in a {
        for pb in b {
            let ka = pa.axes.len();
            let na = pa.out_dim;
            let (ma, mb) = (pa.map.clone(), pb.map.clone());
            let mut axes = pa.axes.clone();
            axes.extend(&pb.axes);
            out.push(Piece {
                axes,
                out_dim: na + pb.out_dim,
                map: Arc::new(move |t, x| {
                    let (xa, xb) = x.split_at_mut(na);
                    ma(&t[..ka], xa) * mb(&t[ka..], xb)
                }),
            });
        }
    }
    out
}

/// Orthonormal basis of `R^m` whose first vector is `first` (unit length).
fn basis_from(first: &[f64]) -> Vec<Vec<f64>> {
    let m = first.len();
    let mut basis = vec![first.to_vec()];
    for k in 0..m {
        if basis.len() == m {
            break;
        }
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len > 1e-8 {
            basis.push(v.iter().map(|a| a / len).collect());
        }
    }
    basis
}

/// Sphere angle axes for `S^{m-1}` in `R^m`, `m >= 3`: polar angles then an azimuth.
fn sphere_axes(m: usize) -> Vec<Axis> {
    let mut axes = vec![Axis::Bounded(0.0, PI); m - 2];
    axes.push(Axis::Periodic(0.0, 2.0 * PI));
    axes
}

/// Unit vector for hyperspherical angles in `basis`, with the surface Jacobian.
fn sphere_point(angles: &[f64], basis: &[Vec<f64>], out: &mut [f64]) -> f64 {
    let m = basis.len();
    out.iter_mut().for_each(|o| *o = 0.0);
    if m == 1 {
        out[0] = basis[0][0];
        return 1.0;
    }
    let mut sin_prod = 1.0;
    let mut jac = 1.0;
    let k = angles.len();
    for (j, &phi) in angles.iter().enumerate() {
        let coef = sin_prod * phi.cos();
        for (o, b) in out.iter_mut().zip(&basis[j]) {
            *o += coef * b;
        }
        if j + 1 < k {
            jac *= phi.sin().powi((k - 1 - j) as i32);
        }
        sin_prod *= phi.sin();
    }
    for (o, b) in out.iter_mut().zip(&basis[k]) {
        *o += sin_prod * b;
    }
    jac
}

fn angle_in(basis: &[Vec<f64>], v: &[f64]) -> f64 {
    let c: f64 = v.iter().zip(&basis[0]).map(|(a, b)| a * b).sum();
    let s: f64 = v.iter().zip(&basis[1]).map(|(a, b)| a * b).sum();
    s.atan2(c).rem_euclid(2.0 * PI)
}

/// Splits the circle at the given angles into arcs.
fn arcs(mut cuts: Vec<f64>) -> Vec<(f64, f64)> {
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    if cuts.len() > 1 && (cuts[0] + 2.0 * PI - cuts[cuts.len() - 1]).abs() < 1e-10 {
        cuts.pop();
    }
    let k = cuts.len();
    (0..k)
        .map(|i| {
            let lo = cuts[i];
            let hi = if i + 1 < k { cuts[i + 1] } else { cuts[0] + 2.0 * PI };
            (lo, hi)
        })
        .collect()
}

/// Spectral-coordinate pieces. `first` maps the leading axis to `l1`; the point is
/// `xi = l1 c(w) + v l1 c(-w)`, optionally pushed through a linear map.
fn spectral_pieces(
    cone: &ConeDescriptor,
    first: Axis,
    cut_dirs: &[Vec<f64>],
    post: Option<(Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>, f64)>,
) -> Vec<Piece> {
    let n = cone.n();
    let m = n - 1;
    let base = 2f64.powf(1.0 - n as f64 / 2.0);
    let polar = cut_dirs.first().cloned().unwrap_or_else(|| cone.frame_direction().to_vec());
    let basis = Arc::new(basis_from(&polar));
    let angle_sets: Vec<Vec<Axis>> = if m == 2 {
        let cuts: Vec<f64> = cut_dirs.iter().map(|d| angle_in(&basis, d)).collect();
        arcs(cuts).into_iter().map(|(lo, hi)| vec![Axis::Bounded(lo, hi)]).collect()
    } else {
        vec![sphere_axes(m)]
    };
    angle_sets
        .into_iter()
        .map(|ang| {
            let mut axes = vec![first, Axis::Bounded(0.0, 1.0)];
            axes.extend(ang);
            let basis = basis.clone();
            let post = post.clone();
            Piece {
                axes,
                out_dim: n,
                map: Arc::new(move |t, x| {
                    let (l1, v) = (t[0], t[1]);
                    let mut omega = [0.0f64; MAX_DIM];
                    let sj = if m == 2 {
                        let (c, s) = (t[2].cos(), t[2].sin());
                        for k in 0..2 {
                            omega[k] = c * basis[0][k] + s * basis[1][k];
                        }
                        1.0
                    } else {
                        sphere_point(&t[2..], &basis, &mut omega[..m])
                    };
                    let rho = 0.5 * l1 * (1.0 - v);
                    let mut w = [0.0f64; MAX_DIM + 1];
                    w[0] = 0.5 * l1 * (1.0 + v);
                    for k in 0..m {
                        w[k + 1] = rho * omega[k];
                    }
                    let jac = base * l1.powi(n as i32 - 1) * (1.0 - v).powi(m as i32 - 1) * sj;
                    match &post {
                        None => {
                            x.copy_from_slice(&w[..n]);
                            jac
                        }
                        Some((f, det)) => {
                            f(&w[..n], x);
                            jac * det
                        }
                    }
                }),
            }
        })
        .collect()
}

fn cone_pieces(cone: &ConeDescriptor, scale: f64) -> Vec<Piece> {
    match cone.kind() {
        ConeKind::Halfline => vec![Piece {
            axes: vec![Axis::Unbounded(scale)],
            out_dim: 1,
            map: Arc::new(|t, x| {
                x[0] = t[0];
                1.0
            }),
        }],
        ConeKind::Lorentz => {
            let u = cone.frame_direction().to_vec();
            let mu: Vec<f64> = u.iter().map(|a| -a).collect();
            spectral_pieces(cone, Axis::Unbounded(scale), &[u, mu], None)
        }
    }
}

fn cap_pieces(cone: &ConeDescriptor, y: &[f64]) -> Vec<Piece> {
    match cone.kind() {
        ConeKind::Halfline => {
            let y0 = y[0];
            vec![Piece {
                axes: vec![Axis::Bounded(0.0, y0)],
                out_dim: 1,
                map: Arc::new(|t, x| {
                    x[0] = t[0];
                    1.0
                }),
            }]
        }
        ConeKind::Lorentz => {
            let a = cone.spectral_map(y, f64::sqrt).into_coords();
            let det = cone.det(y).powf(cone.n_over_r());
            // Boundary directions where a frame minor of x or y - x vanishes.
            let mut cuts = Vec::new();
            for c in cone.frame() {
                let pc = cone.quadratic_rep(&a, c.coords());
                let len = pc[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                let dir: Vec<f64> = pc[1..].iter().map(|v| v / len).collect();
                cuts.push(dir.iter().map(|v| -v).collect::<Vec<_>>());
                cuts.push(dir);
            }
            let c2 = cone.clone();
            let post: Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync> = Arc::new(move |w, x| {
                let p = c2.quadratic_rep(&a, w);
                x.copy_from_slice(&p);
            });
            spectral_pieces(cone, Axis::Bounded(0.0, 1.0), &cuts, Some((post, det)))
        }
    }
}

fn slab_pieces(cone: &ConeDescriptor, center: &[f64], scale: f64) -> Vec<Piece> {
    let n = cone.n();
    match cone.kind() {
        ConeKind::Halfline => {
            let c = center[0];
            [1.0f64, -1.0]
                .iter()
                .map(|&sign| Piece {
                    axes: vec![Axis::Unbounded(scale)],
                    out_dim: 1,
                    map: Arc::new(move |t, x| {
                        x[0] = c + sign * t[0];
                        1.0
                    }),
                })
                .collect()
        }
        ConeKind::Lorentz => {
            let m = n - 1;
            let factor = 2f64.powf(n as f64 / 2.0) * 0.5;
            let basis = Arc::new(basis_from(cone.frame_direction()));
            let center: Arc<Vec<f64>> = Arc::new(center.to_vec());
            // (a, b) -> (rho, x0) for the three light-cone pieces.
            let quads: [fn(f64, f64) -> (f64, f64); 3] = [
                |a, b| (0.5 * (a + b), 0.5 * (b - a)),
                |al, be| (0.5 * be, al + 0.5 * be),
                |al, be| (0.5 * be, -al - 0.5 * be),
            ];
            quads
                .iter()
                .map(|&q| {
                    let mut axes = vec![Axis::Unbounded(scale), Axis::Unbounded(scale)];
                    if m == 2 {
                        axes.push(Axis::Periodic(0.0, 2.0 * PI));
                    } else {
                        axes.extend(sphere_axes(m));
                    }
                    let basis = basis.clone();
                    let center = center.clone();
                    Piece {
                        axes,
                        out_dim: n,
                        map: Arc::new(move |t, x| {
                            let (rho, x0) = q(t[0], t[1]);
                            let mut omega = [0.0f64; MAX_DIM];
                            let sj = if m == 2 {
                                let (c, s) = (t[2].cos(), t[2].sin());
                                for k in 0..2 {
                                    omega[k] = c * basis[0][k] + s * basis[1][k];
                                }
                                1.0
                            } else {
                                sphere_point(&t[2..], &basis, &mut omega[..m])
                            };
                            x[0] = center[0] + x0;
                            for k in 0..m {
                                x[k + 1] = center[k + 1] + rho * omega[k];
                            }
                            factor * rho.powi(m as i32 - 1) * sj
                        }),
                    }
                })
                .collect()
        }
    }
}

fn box_pieces(cone: &ConeDescriptor, lo: &[f64], hi: &[f64]) -> Vec<Piece> {
    let n = cone.n();
    let factor = match cone.kind() {
        ConeKind::Halfline => 1.0,
        ConeKind::Lorentz => 2f64.powf(n as f64 / 2.0),
    };
    vec![Piece {
        axes: lo.iter().zip(hi).map(|(&a, &b)| Axis::Bounded(a, b)).collect(),
        out_dim: n,
        map: Arc::new(move |t, x| {
            x.copy_from_slice(t);
            factor
        }),
    }]
}

thread_local! {
    static LEGENDRE: RefCell<HashMap<usize, Rc<Vec<(f64, f64)>>>> = RefCell::new(HashMap::new());
    static LAGUERRE: RefCell<HashMap<usize, Rc<Vec<(f64, f64)>>>> = RefCell::new(HashMap::new());
}

/// Gauss-Legendre nodes and weights on (0, 1).
fn legendre01(n: usize) -> Rc<Vec<(f64, f64)>> {
    LEGENDRE.with(|cache| {
        cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let rule = GaussLegendre::new(n.try_into().expect("n > 0"));
                let mut v: Vec<(f64, f64)> = rule
                    .as_node_weight_pairs()
                    .iter()
                    .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
                    .collect();
                v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                Rc::new(v)
            })
            .clone()
    })
}

/// Gauss-Laguerre nodes with weights multiplied by `e^x`.
fn laguerre_scaled(n: usize) -> Rc<Vec<(f64, f64)>> {
    LAGUERRE.with(|cache| {
        cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let rule = GaussLaguerre::new(n.try_into().expect("n > 0"), 0.0.try_into().unwrap());
                Rc::new(rule.as_node_weight_pairs().iter().map(|&(x, w)| (x, w * x.exp())).collect())
            })
            .clone()
    })
}

#[inline]
fn grade(w: f64, m: u32) -> (f64, f64) {
    if m == 1 {
        return (w, 1.0);
    }
    let a = w.powi(m as i32);
    let b = (1.0 - w).powi(m as i32);
    let s = a + b;
    let da = m as f64 * w.powi(m as i32 - 1) * (1.0 - w).powi(m as i32 - 1);
    (a / s, da / (s * s))
}

#[inline]
fn map_axis(axis: Axis, u: f64) -> (f64, f64) {
    match axis {
        Axis::Bounded(lo, hi) | Axis::Periodic(lo, hi) => (lo + (hi - lo) * u, hi - lo),
        Axis::Unbounded(a) => {
            let om = 1.0 - u;
            (a * u / om, a / (om * om))
        }
    }
}

fn axis_rule(axis: Axis, n: usize, spec: &QuadratureSpec) -> Vec<(f64, f64)> {
    match axis {
        Axis::Periodic(lo, hi) => {
            let h = (hi - lo) / n as f64;
            (0..n).map(|i| (lo + (i as f64 + 0.5) * h, h)).collect()
        }
        Axis::Unbounded(a) if spec.unbounded == UnboundedMap::Laguerre => {
            laguerre_scaled(n).iter().map(|&(x, w)| (a * x, a * w)).collect()
        }
        _ => legendre01(n)
            .iter()
            .map(|&(w, wt)| {
                let (u, du) = grade(w, spec.grading);
                let (t, dt) = map_axis(axis, u);
                (t, wt * du * dt)
            })
            .collect(),
    }
}

fn non_finite(point: &[f64]) -> ConeError {
    ConeError::Quadrature(format!("non-finite integrand at point {point:?}"))
}

fn tensor_sum<T: QuadValue>(
    pieces: &[Piece],
    f: &impl Fn(&[f64]) -> T,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<(T, u64)> {
    let mut total = T::zero();
    let mut evals = 0u64;
    let mut t = [0.0f64; MAX_DIM];
    let mut x = [0.0f64; 2 * MAX_DIM];
    for piece in pieces {
        let dim = piece.axes.len();
        let rules: Vec<Vec<(f64, f64)>> = piece.axes.iter().map(|&a| axis_rule(a, n, spec)).collect();
        let mut idx = vec![0usize; dim];
        let mut acc = T::zero();
        'outer: loop {
            let mut w = 1.0;
            for k in 0..dim {
                let (tk, wk) = rules[k][idx[k]];
                t[k] = tk;
                w *= wk;
            }
            let point = &mut x[..piece.out_dim];
            let jac = (piece.map)(&t[..dim], point);
            let weight = w * jac;
            if weight != 0.0 && weight.is_finite() {
                let v = f(point);
                evals += 1;
                if !v.finite() {
                    return Err(non_finite(point));
                }
                acc = acc + v * weight;
            }
            let mut k = dim;
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < rules[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        total = total + acc;
    }
    Ok((total, evals))
}

fn mc_sum<T: QuadValue>(
    pieces: &[Piece],
    f: &impl Fn(&[f64]) -> T,
    samples: usize,
    spec: &QuadratureSpec,
) -> Result<(T, f64, u64)> {
    let per = (samples / pieces.len()).max(2);
    let mut total = T::zero();
    let mut var = 0.0;
    let mut x = [0.0f64; 2 * MAX_DIM];
    let mut t = [0.0f64; MAX_DIM];
    for (pi, piece) in pieces.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(pi as u64);
        let dim = piece.axes.len();
        let mut sum = T::zero();
        let mut sum_sq = 0.0;
        for _ in 0..per {
            let mut w = 1.0;
            for k in 0..dim {
                let r: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                let (u, du) = match piece.axes[k] {
                    Axis::Periodic(..) => (r, 1.0),
                    _ => grade(r, spec.grading),
                };
                let (tk, dt) = map_axis(piece.axes[k], u);
                t[k] = tk;
                w *= du * dt;
            }
            let point = &mut x[..piece.out_dim];
            let jac = (piece.map)(&t[..dim], point);
            let weight = w * jac;
            if weight != 0.0 && weight.is_finite() {
                let v = f(point) * weight;
                if !v.finite() {
                    return Err(non_finite(point));
                }
                sum = sum + v;
                sum_sq += v.modulus().powi(2);
            }
        }
        let mean = sum * (1.0 / per as f64);
        let piece_var = (sum_sq / per as f64 - mean.modulus().powi(2)).max(0.0);
        var += piece_var / (per as f64 - 1.0);
        total = total + mean;
    }
    Ok((total, var.sqrt(), (per * pieces.len()) as u64))
}

fn check_size(region: &Region, pieces: &[Piece], spec: &QuadratureSpec) -> Result<()> {
    let dim = pieces.first().map(|p| p.axes.len()).unwrap_or(0);
    if dim > MAX_DIM {
        return Err(ConeError::Config(format!(
            "{dim}-dimensional integral exceeds the supported {MAX_DIM} dimensions"
        )));
    }
    if spec.scheme == Scheme::TensorGauss {
        let pts = pieces.len() as f64 * (spec.nodes as f64).powi(dim as i32);
        if pts > MAX_TENSOR_POINTS {
            return Err(ConeError::Config(format!(
                "tensor grid of {pts:.1e} points over {:?} is too large; use monte_carlo",
                region.kind
            )));
        }
    }
    Ok(())
}

fn finish<T: QuadValue>(value: T, err: f64, evals: u64, level: usize, spec: &QuadratureSpec) -> IntegralEstimate<T> {
    let scale = value.modulus().max(f64::MIN_POSITIVE);
    IntegralEstimate {
        value,
        error_estimate: err,
        evaluations: evals,
        level,
        converged: err <= spec.target_rel_tol * scale,
    }
}

/// Integrates `f` over `region`. Deterministic for a given region, spec and seed.
pub fn integrate<T: QuadValue>(
    region: &Region,
    f: impl Fn(&[f64]) -> T,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<T>> {
    spec.validate()?;
    let pieces = region.pieces(spec.scale);
    check_size(region, &pieces, spec)?;
    match spec.scheme {
        Scheme::TensorGauss => {
            let (fine, e1) = tensor_sum(&pieces, &f, spec.nodes, spec)?;
            let coarse_n = (spec.nodes / 2).max(1);
            let (coarse, e2) = tensor_sum(&pieces, &f, coarse_n, spec)?;
            Ok(finish(fine, (fine - coarse).modulus(), e1 + e2, spec.nodes, spec))
        }
        Scheme::MonteCarlo => {
            let (v, se, e) = mc_sum(&pieces, &f, spec.samples, spec)?;
            Ok(finish(v, se, e, spec.samples, spec))
        }
    }
}

/// The tensor rule at `nodes` per axis alone, with no second level.
///
/// Monte Carlo specs are rejected.
pub fn tensor_level<T: QuadValue>(
    region: &Region,
    f: impl Fn(&[f64]) -> T,
    spec: &QuadratureSpec,
    nodes: usize,
) -> Result<T> {
    if spec.scheme != Scheme::TensorGauss {
        return Err(ConeError::Config("tensor_level needs a tensor_gauss spec".into()));
    }
    spec.validate()?;
    let pieces = region.pieces(spec.scale);
    check_size(region, &pieces, spec)?;
    Ok(tensor_sum(&pieces, &f, nodes.max(1), spec)?.0)
}

/// Re-evaluates at twice the resolution of `previous`.
///
/// Tensor rules report `|I_{2N} - I_N|`. Monte Carlo extends the same random
/// stream, so the first `N` samples are those of `previous`.
pub fn refine<T: QuadValue>(
    previous: &IntegralEstimate<T>,
    region: &Region,
    f: impl Fn(&[f64]) -> T,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate<T>> {
    spec.validate()?;
    let pieces = region.pieces(spec.scale);
    let level = previous.level * 2;
    let mut s = spec.clone();
    s.nodes = level;
    s.samples = level;
    check_size(region, &pieces, &s)?;
    match spec.scheme {
        Scheme::TensorGauss => {
            let (v, e) = tensor_sum(&pieces, &f, level, spec)?;
            Ok(finish(v, (v - previous.value).modulus(), e, level, spec))
        }
        Scheme::MonteCarlo => {
            let (v, se, e) = mc_sum(&pieces, &f, level, spec)?;
            Ok(finish(v, se, e, level, spec))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfline_exponential() {
        let h = ConeDescriptor::halfline();
        let est = integrate(&Region::cone(&h), |x: &[f64]| (-x[0]).exp(), &QuadratureSpec::gauss(64)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12, "{est:?}");
    }

    #[test]
    fn cap_length() {
        let h = ConeDescriptor::halfline();
        let r = Region::cone_cap(&h, &h.identity()).unwrap();
        let est = integrate(&r, |_: &[f64]| 1.0, &QuadratureSpec::gauss(32)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-13);
        let plain = integrate(&r, |_: &[f64]| 1.0, &QuadratureSpec::gauss(2).with_grading(1)).unwrap();
        assert!((plain.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cap_apex_outside_is_rejected() {
        let c = ConeDescriptor::lorentz(3).unwrap();
        let y = AlgebraElement::new(vec![1.0, 2.0, 0.0]);
        assert!(matches!(Region::cone_cap(&c, &y), Err(ConeError::Domain(_))));
    }

    #[test]
    fn slab_gaussian_volume() {
        // Trace-form Lebesgue measure on R^n is 2^{n/2} times the Euclidean one.
        for n in [3usize, 4] {
            let c = ConeDescriptor::lorentz(n).unwrap();
            let est = integrate(
                &Region::slab(&c),
                |x: &[f64]| (-x.iter().map(|a| a * a).sum::<f64>()).exp(),
                &QuadratureSpec::gauss(if n == 3 { 48 } else { 40 }),
            )
            .unwrap();
            let expect = 2f64.powf(n as f64 / 2.0) * PI.powf(n as f64 / 2.0);
            let tol = if n == 3 { 1e-6 } else { 1e-4 };
            assert!((est.value / expect - 1.0).abs() < tol, "n={n} {est:?}");
        }
    }

    #[test]
    fn halfline_slab() {
        let h = ConeDescriptor::halfline();
        let est = integrate(&Region::slab(&h), |x: &[f64]| 1.0 / (1.0 + x[0] * x[0]), &QuadratureSpec::gauss(64))
            .unwrap();
        assert!((est.value - PI).abs() < 1e-10);
    }

    #[test]
    fn non_finite_sample_is_an_error() {
        let h = ConeDescriptor::halfline();
        let r = integrate(&Region::cone(&h), |_: &[f64]| f64::NAN, &QuadratureSpec::gauss(4));
        match r {
            Err(ConeError::Quadrature(msg)) => assert!(msg.contains("point")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tensor_box_and_tube_box() {
        let c = ConeDescriptor::lorentz(3).unwrap();
        let r = Region::tube_box(&c, &[0.0; 3], &[1.0; 3], &[2.0, -0.5, -0.5], &[3.0, 0.5, 0.5]).unwrap();
        let est = integrate(&r, |_: &[f64]| 1.0, &QuadratureSpec::gauss(2).with_grading(1)).unwrap();
        // Each factor carries the 2^{3/2} trace-measure constant.
        assert!((est.value - 8.0).abs() < 1e-12);
        assert!(Region::tube_box(&c, &[0.0; 3], &[1.0; 3], &[0.5, -1.0, 0.0], &[1.0, 0.0, 0.1]).is_err());
    }

    #[test]
    fn spec_kv_round_trip() {
        let s = QuadratureSpec::monte_carlo(1000, 7).with_scale(2.5).with_tol(1e-3);
        let back = QuadratureSpec::default().apply_kv(&s.to_kv()).unwrap();
        assert_eq!(s, back);
        assert!(QuadratureSpec::default().apply_kv("nodes=abc").is_err());
        assert!(QuadratureSpec::default().apply_kv("bogus=1").is_err());
    }

    #[test]
    fn sphere_basis_is_orthonormal() {
        let b = basis_from(&[0.0, 0.6, 0.8]);
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = b[i].iter().zip(&b[j]).map(|(a, c)| a * c).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn arcs_cover_circle() {
        let a = arcs(vec![3.0, 1.0, 1.0 + 1e-12, 5.0]);
        assert_eq!(a.len(), 3);
        let total: f64 = a.iter().map(|(lo, hi)| hi - lo).sum();
        assert!((total - 2.0 * PI).abs() < 1e-12);
    }
}
