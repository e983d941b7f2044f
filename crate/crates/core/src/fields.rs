//! Bounded scalar fields on R^N: an analytic catalog (radial profiles,
//! boundary barriers, directional profiles, indicator constructions) plus
//! grid-backed fields with a declared zero exterior extension.

use crate::error::{Error, Result};
use crate::frames::Partition;
use crate::grid::GridField;
use crate::kernels::check_s;
use crate::linalg;

/// One-dimensional profile g(t) evaluated at t = |x - c|^2.
#[derive(Clone, Debug, PartialEq)]
pub enum RadialProfile {
    /// e^{-alpha t}
    ExpDecay { alpha: f64 },
    /// alpha (a^2 + t)^{-q}
    InversePower { alpha: f64, a: f64, q: f64 },
    /// alpha (r^2 - t)_+^gamma
    CompactPower { alpha: f64, radius: f64, gamma: f64 },
    /// e^{-1/(1-t)} for t < 1, zero beyond
    Bump,
    /// 1 on [0, r0], cosine-squared taper to 0 at r1 (in the radius, not t)
    CosineBump { r0: f64, r1: f64 },
}

impl RadialProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            RadialProfile::ExpDecay { alpha } => (-alpha * t).exp(),
            RadialProfile::InversePower { alpha, a, q } => alpha * (a * a + t).powf(-q),
            RadialProfile::CompactPower { alpha, radius, gamma } => {
                let d = radius * radius - t;
                if d > 0.0 {
                    alpha * d.powf(gamma)
                } else {
                    0.0
                }
            }
            RadialProfile::Bump => {
                if t < 1.0 {
                    (-1.0 / (1.0 - t)).exp()
                } else {
                    0.0
                }
            }
            RadialProfile::CosineBump { r0, r1 } => {
                let r = t.max(0.0).sqrt();
                if r <= r0 {
                    1.0
                } else if r >= r1 {
                    0.0
                } else {
                    let u = std::f64::consts::FRAC_PI_2 * (r - r0) / (r1 - r0);
                    u.cos().powi(2)
                }
            }
        }
    }

    /// dg/dt, where defined.
    pub fn deriv1(&self, t: f64) -> Option<f64> {
        match *self {
            RadialProfile::ExpDecay { alpha } => Some(-alpha * (-alpha * t).exp()),
            RadialProfile::InversePower { alpha, a, q } => {
                Some(-alpha * q * (a * a + t).powf(-q - 1.0))
            }
            RadialProfile::CompactPower { alpha, radius, gamma } => {
                let d = radius * radius - t;
                if d > 0.0 {
                    Some(-alpha * gamma * d.powf(gamma - 1.0))
                } else if d < 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            RadialProfile::Bump => {
                if t < 1.0 {
                    let w = 1.0 - t;
                    Some(-(-1.0 / w).exp() / (w * w))
                } else {
                    Some(0.0)
                }
            }
            RadialProfile::CosineBump { r0, r1 } => {
                let r = t.max(0.0).sqrt();
                if r < r0 || r > r1 {
                    Some(0.0)
                } else if r < 1e-300 {
                    Some(0.0)
                } else {
                    let k = std::f64::consts::FRAC_PI_2 / (r1 - r0);
                    let u = k * (r - r0);
                    // d/dt = d/dr / (2r)
                    Some(-k * (2.0 * u).sin() / (2.0 * r))
                }
            }
        }
    }

    pub fn deriv2(&self, t: f64) -> Option<f64> {
        match *self {
            RadialProfile::ExpDecay { alpha } => Some(alpha * alpha * (-alpha * t).exp()),
            RadialProfile::InversePower { alpha, a, q } => {
                Some(alpha * q * (q + 1.0) * (a * a + t).powf(-q - 2.0))
            }
            RadialProfile::CompactPower { alpha, radius, gamma } => {
                let d = radius * radius - t;
                if d > 0.0 {
                    Some(alpha * gamma * (gamma - 1.0) * d.powf(gamma - 2.0))
                } else if d < 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            RadialProfile::Bump => {
                if t < 1.0 {
                    let w = 1.0 - t;
                    Some((-1.0 / w).exp() * (1.0 / w.powi(4) - 2.0 / w.powi(3)))
                } else {
                    Some(0.0)
                }
            }
            RadialProfile::CosineBump { .. } => None,
        }
    }

    /// True when g is convex on [0, infinity).
    pub fn is_convex(&self) -> bool {
        match *self {
            RadialProfile::ExpDecay { alpha } => alpha > 0.0,
            RadialProfile::InversePower { alpha, q, .. } => alpha > 0.0 && q > 0.0,
            RadialProfile::CompactPower { alpha, gamma, .. } => alpha > 0.0 && gamma >= 1.0,
            RadialProfile::Bump => false,
            RadialProfile::CosineBump { .. } => false,
        }
    }

    /// t beyond which the profile vanishes, when compactly supported.
    pub fn support_t(&self) -> Option<f64> {
        match *self {
            RadialProfile::CompactPower { radius, .. } => Some(radius * radius),
            RadialProfile::Bump => Some(1.0),
            RadialProfile::CosineBump { r1, .. } => Some(r1 * r1),
            _ => None,
        }
    }

    pub fn peak(&self) -> f64 {
        self.value(0.0)
    }

    /// Length scale used to pick truncation radii for globally supported
    /// profiles.
    fn length_scale(&self) -> f64 {
        match *self {
            RadialProfile::ExpDecay { alpha } => (1.0 / alpha.max(1e-12)).sqrt(),
            RadialProfile::InversePower { a, .. } => a.abs().max(1.0),
            RadialProfile::CompactPower { radius, .. } => radius,
            RadialProfile::Bump => 1.0,
            RadialProfile::CosineBump { r1, .. } => r1,
        }
    }

    /// Spheres (radii about the center) where the profile is not C^2.
    fn kink_radii(&self) -> Vec<f64> {
        match *self {
            RadialProfile::CompactPower { radius, gamma, .. } => {
                if gamma >= 2.0 {
                    vec![]
                } else {
                    vec![radius]
                }
            }
            RadialProfile::CosineBump { r0, r1 } => vec![r0, r1],
            _ => vec![],
        }
    }
}

/// Indicator-type catalog entries with exactly known region geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorField {
    pub kind: IndicatorKind,
    pub partition: Partition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndicatorKind {
    /// 0 on the unit ball and on each block coordinate subspace, -1 elsewhere.
    Discontinuity,
    /// 0 on the unit ball and on each block coordinate subspace, +1 elsewhere.
    ZeroSet,
    /// e^{-x_N} on the exterior half region (restricted to a coordinate slab
    /// when there are several blocks), 0 elsewhere.
    Nonattain,
}

impl IndicatorField {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.partition.ambient_dim();
        debug_assert_eq!(x.len(), n);
        match self.kind {
            IndicatorKind::Discontinuity | IndicatorKind::ZeroSet => {
                let outside = if linalg::norm(x) <= 1.0 {
                    false
                } else {
                    !(0..self.partition.num_blocks()).any(|i| self.in_block_subspace(x, i))
                };
                let v = if self.kind == IndicatorKind::Discontinuity { -1.0 } else { 1.0 };
                if outside {
                    v
                } else {
                    0.0
                }
            }
            IndicatorKind::Nonattain => {
                let xn = x[n - 1];
                if xn <= 0.0 || linalg::norm(x) <= 1.0 {
                    return 0.0;
                }
                if self.partition.num_blocks() >= 2 {
                    let k1 = self.partition.ks()[0];
                    // coordinates x_1 .. x_{N-k1-1} must vanish exactly
                    if x[..n.saturating_sub(k1 + 1)].iter().any(|&c| c != 0.0) {
                        return 0.0;
                    }
                }
                (-xn).exp()
            }
        }
    }

    /// True when x lies in the span of the block-i coordinate axes.
    pub fn in_block_subspace(&self, x: &[f64], i: usize) -> bool {
        let range = self.partition.block_range(i);
        x.iter().enumerate().all(|(m, &c)| range.contains(&m) || c == 0.0)
    }
}

/// Support classification used to pick truncation radii.
#[derive(Clone, Debug, PartialEq)]
pub enum Support {
    /// Vanishes outside the ball |x - center| <= radius.
    Compact { center: Vec<f64>, radius: f64 },
    /// Globally supported; `length_scale` calibrates decay-aware truncation.
    Global { length_scale: f64 },
}

/// A bounded scalar field on R^N.
#[derive(Clone, Debug)]
pub enum Field {
    Constant { dim: usize, value: f64 },
    /// g(|x - center|^2) for a catalog profile g.
    Radial { center: Vec<f64>, profile: RadialProfile },
    /// phi(<x, dir>) with phi(t) = t^2 / (1 + t^2); bounded, minimum 0 at the
    /// hyperplane <x, dir> = 0.
    ProfileAlong { dim: usize, dir: Vec<f64> },
    Indicator(IndicatorField),
    Grid(GridField),
    Scaled { factor: f64, inner: Box<Field> },
    Sum { a: Box<Field>, b: Box<Field> },
}

fn phi(t: f64) -> f64 {
    t * t / (1.0 + t * t)
}
fn phi_d1(t: f64) -> f64 {
    2.0 * t / (1.0 + t * t).powi(2)
}
fn phi_d2(t: f64) -> f64 {
    (2.0 - 6.0 * t * t) / (1.0 + t * t).powi(3)
}

impl Field {
    pub fn dim(&self) -> usize {
        match self {
            Field::Constant { dim, .. } => *dim,
            Field::Radial { center, .. } => center.len(),
            Field::ProfileAlong { dim, .. } => *dim,
            Field::Indicator(f) => f.partition.ambient_dim(),
            Field::Grid(g) => g.dim(),
            Field::Scaled { inner, .. } => inner.dim(),
            Field::Sum { a, .. } => a.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Field::Constant { value, .. } => *value,
            Field::Radial { center, profile } => {
                let t = sq_dist(x, center);
                profile.value(t)
            }
            Field::ProfileAlong { dir, .. } => phi(linalg::dot(x, dir)),
            Field::Indicator(f) => f.eval(x),
            Field::Grid(g) => g.eval(x),
            Field::Scaled { factor, inner } => factor * inner.eval(x),
            Field::Sum { a, b } => a.eval(x) + b.eval(x),
        }
    }

    /// Finite bound on |u| over R^N.
    pub fn bound(&self) -> f64 {
        match self {
            Field::Constant { value, .. } => value.abs(),
            Field::Radial { profile, .. } => profile.peak().abs(),
            Field::ProfileAlong { .. } => 1.0,
            Field::Indicator(_) => 1.0,
            Field::Grid(g) => g.value_bound(),
            Field::Scaled { factor, inner } => factor.abs() * inner.bound(),
            Field::Sum { a, b } => a.bound() + b.bound(),
        }
    }

    /// Whether the field is C^2 in a neighbourhood of x.
    pub fn smooth_at(&self, x: &[f64]) -> bool {
        match self {
            Field::Constant { .. } => true,
            Field::Radial { center, profile } => {
                let r = sq_dist(x, center).sqrt();
                profile
                    .kink_radii()
                    .iter()
                    .all(|&rk| (r - rk).abs() > 1e-9 * rk.max(1.0))
            }
            Field::ProfileAlong { .. } => true,
            Field::Indicator(_) => false,
            Field::Grid(_) => false,
            Field::Scaled { inner, .. } => inner.smooth_at(x),
            Field::Sum { a, b } => a.smooth_at(x) && b.smooth_at(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            Field::Constant { dim, .. } => Some(vec![0.0; *dim]),
            Field::Radial { center, profile } => {
                let t = sq_dist(x, center);
                let g1 = profile.deriv1(t)?;
                Some(x.iter().zip(center).map(|(xi, ci)| 2.0 * g1 * (xi - ci)).collect())
            }
            Field::ProfileAlong { dir, .. } => {
                let t = linalg::dot(x, dir);
                Some(linalg::scaled(dir, phi_d1(t)))
            }
            Field::Indicator(_) | Field::Grid(_) => None,
            Field::Scaled { factor, inner } => {
                Some(linalg::scaled(&inner.gradient(x)?, *factor))
            }
            Field::Sum { a, b } => {
                let ga = a.gradient(x)?;
                let gb = b.gradient(x)?;
                Some(ga.iter().zip(&gb).map(|(p, q)| p + q).collect())
            }
        }
    }

    pub fn hessian(&self, x: &[f64]) -> Option<Vec<Vec<f64>>> {
        match self {
            Field::Constant { dim, .. } => Some(vec![vec![0.0; *dim]; *dim]),
            Field::Radial { center, profile } => {
                let t = sq_dist(x, center);
                let g1 = profile.deriv1(t)?;
                let g2 = profile.deriv2(t)?;
                let n = x.len();
                let d = linalg::sub(x, center);
                let mut h = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        h[i][j] = 4.0 * g2 * d[i] * d[j] + if i == j { 2.0 * g1 } else { 0.0 };
                    }
                }
                Some(h)
            }
            Field::ProfileAlong { dir, dim } => {
                let t = linalg::dot(x, dir);
                let c = phi_d2(t);
                let mut h = vec![vec![0.0; *dim]; *dim];
                for i in 0..*dim {
                    for j in 0..*dim {
                        h[i][j] = c * dir[i] * dir[j];
                    }
                }
                Some(h)
            }
            Field::Indicator(_) | Field::Grid(_) => None,
            Field::Scaled { factor, inner } => {
                let mut h = inner.hessian(x)?;
                for row in h.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= factor;
                    }
                }
                Some(h)
            }
            Field::Sum { a, b } => {
                let ha = a.hessian(x)?;
                let hb = b.hessian(x)?;
                Some(
                    ha.iter()
                        .zip(&hb)
                        .map(|(ra, rb)| ra.iter().zip(rb).map(|(p, q)| p + q).collect())
                        .collect(),
                )
            }
        }
    }

    pub fn support(&self) -> Support {
        match self {
            Field::Constant { dim, value } => {
                if *value == 0.0 {
                    Support::Compact { center: vec![0.0; *dim], radius: 0.0 }
                } else {
                    Support::Global { length_scale: 1.0 }
                }
            }
            Field::Radial { center, profile } => match profile.support_t() {
                Some(t) => Support::Compact { center: center.clone(), radius: t.sqrt() },
                None => Support::Global { length_scale: profile.length_scale() },
            },
            Field::ProfileAlong { .. } => Support::Global { length_scale: 10.0 },
            Field::Indicator(_) => Support::Global { length_scale: 1.0 },
            Field::Grid(g) => {
                let (center, radius) = g.domain().bounding_ball();
                Support::Compact { center, radius }
            }
            Field::Scaled { inner, .. } => inner.support(),
            Field::Sum { a, b } => match (a.support(), b.support()) {
                (
                    Support::Compact { center: ca, radius: ra },
                    Support::Compact { center: cb, radius: rb },
                ) => {
                    let sep = linalg::norm(&linalg::sub(&ca, &cb));
                    Support::Compact { center: ca, radius: ra.max(sep + rb) }
                }
                (Support::Global { length_scale: la }, Support::Global { length_scale: lb }) => {
                    Support::Global { length_scale: la.max(lb) }
                }
                (Support::Global { length_scale }, Support::Compact { radius, .. })
                | (Support::Compact { radius, .. }, Support::Global { length_scale }) => {
                    Support::Global { length_scale: length_scale.max(radius) }
                }
            },
        }
    }

    /// Radii r > 0 at which the pair of rays x +- r dir meets a surface where
    /// the field is not C^2. Appended to `out`, unsorted.
    pub fn ray_breakpoints(&self, x: &[f64], dir: &[f64], out: &mut Vec<f64>) {
        match self {
            Field::Constant { .. } | Field::ProfileAlong { .. } => {}
            Field::Radial { center, profile } => {
                for rk in profile.kink_radii() {
                    push_sphere_crossings(x, dir, center, rk, out);
                }
            }
            Field::Indicator(_) => {}
            Field::Grid(g) => {
                for (c, r) in g.domain().spheres() {
                    push_sphere_crossings(x, dir, &c, r, out);
                }
            }
            Field::Scaled { inner, .. } => inner.ray_breakpoints(x, dir, out),
            Field::Sum { a, b } => {
                a.ray_breakpoints(x, dir, out);
                b.ray_breakpoints(x, dir, out);
            }
        }
    }

    /// Radial view (center, profile, scale) when the field is a scaled
    /// radial catalog entry.
    pub fn radial_structure(&self) -> Option<RadialView<'_>> {
        match self {
            Field::Radial { center, profile } => {
                Some(RadialView { center, profile, scale: 1.0 })
            }
            Field::Scaled { factor, inner } => {
                let mut v = inner.radial_structure()?;
                v.scale *= factor;
                Some(v)
            }
            _ => None,
        }
    }

    pub fn indicator_structure(&self) -> Option<(&IndicatorField, f64)> {
        match self {
            Field::Indicator(f) => Some((f, 1.0)),
            Field::Scaled { factor, inner } => {
                let (f, s) = inner.indicator_structure()?;
                Some((f, s * factor))
            }
            _ => None,
        }
    }

    pub fn negated(&self) -> Field {
        Field::Scaled { factor: -1.0, inner: Box::new(self.clone()) }
    }
}

#[derive(Clone, Debug)]
pub struct RadialView<'a> {
    pub center: &'a [f64],
    pub profile: &'a RadialProfile,
    pub scale: f64,
}

fn sq_dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn push_sphere_crossings(x: &[f64], dir: &[f64], center: &[f64], rho: f64, out: &mut Vec<f64>) {
    // |x + r dir - center|^2 = rho^2 along the full line; kinks of the ray
    // pair sit at the absolute values of the real roots
    let d = linalg::sub(x, center);
    let b = linalg::dot(&d, dir);
    let c = linalg::dot(&d, &d) - rho * rho;
    let disc = b * b - c;
    if disc <= 0.0 {
        return;
    }
    let sq = disc.sqrt();
    for root in [-b + sq, -b - sq] {
        let r = root.abs();
        if r > 1e-14 {
            out.push(r);
        }
    }
}

// --- catalog constructors ---------------------------------------------------

/// (R^2 - |x - center|^2)_+^s, the boundary barrier with exact operator value.
pub fn barrier_field(radius: f64, s: f64, center: &[f64]) -> Result<Field> {
    if radius <= 0.0 {
        return Err(Error::InvalidParameter("barrier radius must be positive".into()));
    }
    check_s(s)?;
    Ok(Field::Radial {
        center: center.to_vec(),
        profile: RadialProfile::CompactPower { alpha: 1.0, radius, gamma: s },
    })
}

/// The indicator-type field that witnesses discontinuity of the operator map
/// at the origin. Rejects the single full block, for which the construction
/// degenerates to zero.
pub fn discontinuity_example(partition: &Partition) -> Result<Field> {
    if partition.num_blocks() == 1 && partition.is_full() {
        return Err(Error::RegimeMismatch(
            "single full block reduces to the fractional Laplacian; construction is trivial".into(),
        ));
    }
    Ok(Field::Indicator(IndicatorField {
        kind: IndicatorKind::Discontinuity,
        partition: partition.clone(),
    }))
}

/// The exterior exponential field for which the supremum is approached but
/// not attained.
pub fn nonattain_example(partition: &Partition) -> Field {
    Field::Indicator(IndicatorField {
        kind: IndicatorKind::Nonattain,
        partition: partition.clone(),
    })
}

/// Radial catalog field g(|x - center|^2) for a validated profile.
pub fn radial_field(profile: RadialProfile, center: &[f64]) -> Result<Field> {
    match profile {
        RadialProfile::ExpDecay { alpha } if alpha <= 0.0 => {
            return Err(Error::InvalidParameter("exp-decay rate must be positive".into()))
        }
        RadialProfile::InversePower { alpha, a, q } if alpha <= 0.0 || a == 0.0 || q <= 0.0 => {
            return Err(Error::InvalidParameter("inverse-power profile needs alpha>0, a!=0, q>0".into()))
        }
        RadialProfile::CompactPower { alpha, radius, gamma }
            if alpha <= 0.0 || radius <= 0.0 || gamma <= 0.0 =>
        {
            return Err(Error::InvalidParameter("compact-power profile needs positive parameters".into()))
        }
        RadialProfile::CosineBump { r0, r1 } if !(r0 > 0.0 && r1 > r0) => {
            return Err(Error::InvalidParameter("cosine bump needs 0 < r0 < r1".into()))
        }
        _ => {}
    }
    Ok(Field::Radial { center: center.to_vec(), profile })
}

/// Catalog counterexample for the strong minimum principle: a directional
/// profile when k < N, the exterior zero-set indicator when k = N with more
/// than one block.
pub fn smp_counterexample(partition: &Partition) -> Result<Field> {
    let n = partition.ambient_dim();
    if partition.total_dim() < n {
        Ok(Field::ProfileAlong { dim: n, dir: linalg::unit(n, n - 1) })
    } else if partition.num_blocks() > 1 {
        Ok(Field::Indicator(IndicatorField {
            kind: IndicatorKind::ZeroSet,
            partition: partition.clone(),
        }))
    } else {
        Err(Error::RegimeMismatch(
            "k = N with a single block: both minimum-principle statements hold".into(),
        ))
    }
}

/// Profiles for the zero-order power nonlinearity K^- u + u^p = 0: an
/// inverse power for p > 1, a Gaussian for p = 1, a compact power for
/// p in (0, 1). `alpha` is the free multiplicative constant (the Gaussian
/// uses it as the exponent rate).
pub fn liouville_profile(p: f64, s: f64, scale_param: f64, alpha: f64) -> Result<RadialProfile> {
    check_s(s)?;
    if p <= 0.0 {
        return Err(Error::InvalidParameter("exponent p must be positive".into()));
    }
    if (p - 1.0).abs() < 1e-12 {
        if alpha <= 0.0 {
            return Err(Error::InvalidParameter("Gaussian rate must be positive".into()));
        }
        Ok(RadialProfile::ExpDecay { alpha })
    } else if p > 1.0 {
        if scale_param == 0.0 {
            return Err(Error::InvalidParameter("inverse-power parameter a must be nonzero".into()));
        }
        Ok(RadialProfile::InversePower { alpha, a: scale_param, q: s / (p - 1.0) })
    } else {
        if scale_param <= 0.0 {
            return Err(Error::InvalidParameter("compact-power radius must be positive".into()));
        }
        Ok(RadialProfile::CompactPower { alpha, radius: scale_param, gamma: s / (1.0 - p) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn barrier_values() {
        let u = barrier_field(1.0, 0.5, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(u.eval(&[0.0, 0.0]), 1.0);
        assert_eq!(u.eval(&[1.0, 0.0]), 0.0);
        assert_eq!(u.eval(&[2.0, 3.0]), 0.0);
        let u2 = barrier_field(2.0, 0.5, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(u2.eval(&[1.0, 0.0]), 3f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(u2.bound(), 2.0, epsilon = 1e-14); // R^{2s}
        assert!(barrier_field(-1.0, 0.5, &[0.0]).is_err());
    }

    #[test]
    fn discontinuity_example_regions() {
        let p = Partition::new(&[1, 1], 3).unwrap();
        let u = discontinuity_example(&p).unwrap();
        assert_eq!(u.eval(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(u.eval(&[2.0, 0.0, 0.0]), 0.0); // on <e_1>
        assert_eq!(u.eval(&[0.0, 3.0, 0.0]), 0.0); // on <e_2>
        assert_eq!(u.eval(&[2.0, 2.0, 2.0]), -1.0);
        assert_eq!(u.eval(&[0.0, 0.0, 1.5]), -1.0); // e_3 is not a block axis
        let full = Partition::new(&[3], 3).unwrap();
        assert!(discontinuity_example(&full).is_err());
        // nonpositive everywhere, zero on the unit ball
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            assert!(u.eval(&x) <= 0.0);
            if crate::linalg::norm(&x) <= 1.0 {
                assert_eq!(u.eval(&x), 0.0);
            }
        }
    }

    #[test]
    fn nonattain_example_cases() {
        let p1 = Partition::new(&[2], 3).unwrap();
        let u1 = nonattain_example(&p1);
        assert_relative_eq!(u1.eval(&[0.0, 0.0, 3.0]), (-3.0f64).exp());
        assert_eq!(u1.eval(&[0.0, 0.0, 0.5]), 0.0); // inside B_1
        assert_eq!(u1.eval(&[0.0, 0.0, -2.0]), 0.0);

        let p2 = Partition::new(&[1, 1], 3).unwrap();
        let u2 = nonattain_example(&p2);
        // N - k1 - 1 = 1 leading coordinate must vanish
        assert_eq!(u2.eval(&[1.0, 0.0, 3.0]), 0.0);
        assert_relative_eq!(u2.eval(&[0.0, 1.0, 3.0]), (-3.0f64).exp());
    }

    #[test]
    fn radial_catalog_values() {
        let u = radial_field(RadialProfile::ExpDecay { alpha: 1.0 }, &[0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(u.eval(&[0.0; 3]), 1.0);
        assert!(u.radial_structure().unwrap().profile.is_convex());

        // Liouville p = 2: u = alpha / (a^2 + |x|^2)^{s/(p-1)}
        let prof = liouville_profile(2.0, 0.5, 1.0, 1.0).unwrap();
        let v = radial_field(prof, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(v.eval(&[0.0, 0.0]), 1.0);
        assert!(v.radial_structure().unwrap().profile.is_convex());

        assert!(radial_field(RadialProfile::ExpDecay { alpha: -1.0 }, &[0.0]).is_err());
    }

    #[test]
    fn smp_counterexample_regimes() {
        let p = Partition::new(&[1, 1], 3).unwrap(); // k < N
        let u = smp_counterexample(&p).unwrap();
        assert_eq!(u.eval(&[0.3, -0.4, 0.0]), 0.0); // minimum at the hyperplane
        assert!(u.eval(&[0.0, 0.0, 0.5]) > 0.0);

        let p_full = Partition::new(&[1, 2], 3).unwrap(); // k = N, l > 1
        let v = smp_counterexample(&p_full).unwrap();
        assert_eq!(v.eval(&[0.5, 0.0, 0.0]), 0.0);
        assert_eq!(v.eval(&[2.0, 2.0, 2.0]), 1.0);

        let p_one = Partition::new(&[3], 3).unwrap();
        assert!(smp_counterexample(&p_one).is_err());
    }

    #[test]
    fn bounds_hold_on_samples() {
        let p = Partition::new(&[1, 1], 3).unwrap();
        let fields: Vec<Field> = vec![
            barrier_field(1.5, 0.25, &[0.2, 0.0, 0.0]).unwrap(),
            radial_field(RadialProfile::ExpDecay { alpha: 2.0 }, &[0.0; 3]).unwrap(),
            radial_field(RadialProfile::Bump, &[0.0; 3]).unwrap(),
            discontinuity_example(&p).unwrap(),
            nonattain_example(&p),
            smp_counterexample(&p).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for u in &fields {
            let b = u.bound();
            for _ in 0..10_000 {
                let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
                assert!(u.eval(&x).abs() <= b + 1e-12);
            }
        }
    }

    #[test]
    fn convex_profiles_satisfy_midpoint_convexity() {
        let profiles = [
            RadialProfile::ExpDecay { alpha: 1.3 },
            RadialProfile::InversePower { alpha: 2.0, a: 1.0, q: 0.5 },
            RadialProfile::CompactPower { alpha: 1.0, radius: 2.0, gamma: 1.0 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in &profiles {
            assert!(p.is_convex());
            for _ in 0..500 {
                let t1: f64 = rng.gen_range(0.0..6.0);
                let t2: f64 = rng.gen_range(0.0..6.0);
                let mid = p.value(0.5 * (t1 + t2));
                assert!(mid <= 0.5 * (p.value(t1) + p.value(t2)) + 1e-12);
            }
        }
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let u = radial_field(RadialProfile::ExpDecay { alpha: 0.7 }, &[0.1, -0.2, 0.3]).unwrap();
        let x = [0.4, 0.5, -0.6];
        let g = u.gradient(&x).unwrap();
        let h = u.hessian(&x).unwrap();
        let eps = 1e-5;
        for i in 0..3 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += eps;
            xm[i] -= eps;
            let fd = (u.eval(&xp) - u.eval(&xm)) / (2.0 * eps);
            assert_relative_eq!(g[i], fd, epsilon = 1e-8);
            for j in 0..3 {
                let mut xpp = x.to_vec();
                let mut xpm = x.to_vec();
                let mut xmp = x.to_vec();
                let mut xmm = x.to_vec();
                xpp[i] += eps;
                xpp[j] += eps;
                xpm[i] += eps;
                xpm[j] -= eps;
                xmp[i] -= eps;
                xmp[j] += eps;
                xmm[i] -= eps;
                xmm[j] -= eps;
                let fd2 = (u.eval(&xpp) - u.eval(&xpm) - u.eval(&xmp) + u.eval(&xmm))
                    / (4.0 * eps * eps);
                assert_relative_eq!(h[i][j], fd2, epsilon = 1e-6, max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn breakpoints_find_support_crossings() {
        let u = barrier_field(1.0, 0.5, &[0.0, 0.0]).unwrap();
        let mut out = Vec::new();
        u.ray_breakpoints(&[0.5, 0.0], &[1.0, 0.0], &mut out);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(out.len(), 2);
        assert_relative_eq!(out[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(out[1], 1.5, epsilon = 1e-12);
    }
}
