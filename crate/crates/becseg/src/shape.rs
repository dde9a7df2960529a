//! Weighted isoperimetric functionals on the disk: the perimeter
//! `F(E) = ∫_{∂E} ρ̄^{3/2}` and volume `V(E) = ∫_E ρ̄` with
//! `ρ̄(x) = (R² − |x|²)₊`, the combined functional
//! `G_ξ(E) = σ_K F(E) + (ξ/2)∫_{E^c} ρ̄²`, the second-order expansion of
//! `F` around the centered ball with its mode-by-mode stability spectrum,
//! and the sublinear isoperimetric ratio `F/V^{5/6}`.
//!
//! Competitor families beyond star-shaped boundaries (off-center disks,
//! boundary caps, radial ring unions) carry their own closed-form or
//! 1D-quadrature evaluators.

use crate::error::{Error, Result};
use crate::quad::trapezoid_periodic;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default angular resolution; trapezoid sums of smooth periodic
/// integrands at this size are accurate to machine precision.
pub const THETA_NODES: usize = 4096;

/// Weight data: `ρ̄(x) = (R² − |x|²)₊` with the comparison ball of radius
/// one, so `R > 1` keeps the weight positive on its boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub big_r: f64,
    /// Target weighted volume for constrained comparisons.
    pub alpha1: f64,
}

impl WeightParams {
    pub fn new(big_r: f64, alpha1: f64) -> Result<Self> {
        if !(big_r > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "R must exceed 1, got {big_r}"
            )));
        }
        let total = 0.5 * PI * big_r.powi(4);
        if !(alpha1 > 0.0 && alpha1 < total) {
            return Err(Error::InvalidParameter(format!(
                "alpha1 must lie in (0, {total}), got {alpha1}"
            )));
        }
        Ok(WeightParams { big_r, alpha1 })
    }

    /// Total weighted mass `∫ ρ̄ = πR⁴/2`.
    pub fn alpha_bar(&self) -> f64 {
        0.5 * PI * self.big_r.powi(4)
    }

    #[inline]
    pub fn rho(&self, r: f64) -> f64 {
        (self.big_r * self.big_r - r * r).max(0.0)
    }

    /// Per-angle volume primitive `∫₀^s ρ̄ ρ dρ = R²s²/2 − s⁴/4`.
    #[inline]
    pub fn vol_prim(&self, s: f64) -> f64 {
        0.5 * self.big_r * self.big_r * s * s - 0.25 * s.powi(4)
    }

    /// Per-angle primitive of `ρ̄²`: `∫₀^s ρ̄² ρ dρ = (R⁶ − (R²−s²)³)/6`.
    #[inline]
    pub fn rho2_prim(&self, s: f64) -> f64 {
        let a = self.big_r * self.big_r - s * s;
        (self.big_r.powi(6) - a * a * a) / 6.0
    }

    /// `∫_{R²} ρ̄² = πR⁶/3`.
    pub fn rho2_total(&self) -> f64 {
        PI * self.big_r.powi(6) / 3.0
    }

    /// `F` of the centered ball: `2πr (R²−r²)^{3/2}`.
    pub fn ball_perimeter(&self, r: f64) -> f64 {
        2.0 * PI * r * self.rho(r).powf(1.5)
    }

    /// `V` of the centered ball: `π(R²r² − r⁴/2)`.
    pub fn ball_volume(&self, r: f64) -> f64 {
        2.0 * PI * self.vol_prim(r)
    }

    pub fn ball_rho2(&self, r: f64) -> f64 {
        2.0 * PI * self.rho2_prim(r)
    }

    /// `∫_{r}^{R} (R²−ρ²)^{3/2} dρ` in closed form.
    pub fn radial_perimeter_band(&self, r: f64) -> f64 {
        let big_r = self.big_r;
        let phi0 = (r / big_r).clamp(0.0, 1.0).asin();
        let prim = |phi: f64| 3.0 * phi / 8.0 + (2.0 * phi).sin() / 4.0 + (4.0 * phi).sin() / 32.0;
        big_r.powi(4) * (prim(PI / 2.0) - prim(phi0))
    }
}

/// Radius of the centered ball with weighted volume `alpha`, the branch in
/// `(0, R)` of the quartic `π(R²r² − r⁴/2) = alpha`.
pub fn ball_radius_for_volume(alpha: f64, w: &WeightParams) -> Result<f64> {
    if !(alpha > 0.0 && alpha < w.alpha_bar()) {
        return Err(Error::Domain(format!(
            "alpha {alpha} outside (0, {})",
            w.alpha_bar()
        )));
    }
    let r4 = w.big_r.powi(4);
    let y = w.big_r * w.big_r - (r4 - 2.0 * alpha / PI).sqrt();
    Ok(y.sqrt())
}

/// Star-shaped boundary `r(θ) = r_b (1 + u(θ))` with
/// `u(θ) = Σ_k a_k cos kθ + b_k sin kθ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarShape {
    pub base_radius: f64,
    /// `a_k`, index `k = 0..=k_max`.
    pub cos_coeffs: Vec<f64>,
    /// `b_k`; index 0 is unused.
    pub sin_coeffs: Vec<f64>,
}

impl StarShape {
    pub fn circle(r: f64) -> Self {
        StarShape {
            base_radius: r,
            cos_coeffs: vec![],
            sin_coeffs: vec![],
        }
    }

    /// Single cosine mode `u = t·cos(kθ)` over the unit ball.
    pub fn single_mode(k: usize, t: f64) -> Self {
        let mut cos_coeffs = vec![0.0; k + 1];
        cos_coeffs[k] = t;
        StarShape {
            base_radius: 1.0,
            cos_coeffs,
            sin_coeffs: vec![],
        }
    }

    pub fn u(&self, theta: f64) -> f64 {
        let mut s = 0.0;
        for (k, a) in self.cos_coeffs.iter().enumerate() {
            s += a * (k as f64 * theta).cos();
        }
        for (k, b) in self.sin_coeffs.iter().enumerate().skip(1) {
            s += b * (k as f64 * theta).sin();
        }
        s
    }

    pub fn u_prime(&self, theta: f64) -> f64 {
        let mut s = 0.0;
        for (k, a) in self.cos_coeffs.iter().enumerate().skip(1) {
            s -= a * k as f64 * (k as f64 * theta).sin();
        }
        for (k, b) in self.sin_coeffs.iter().enumerate().skip(1) {
            s += b * k as f64 * (k as f64 * theta).cos();
        }
        s
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.base_radius * (1.0 + self.u(theta))
    }

    fn validate(&self, w: &WeightParams) -> Result<()> {
        for m in 0..THETA_NODES {
            let theta = 2.0 * PI * m as f64 / THETA_NODES as f64;
            let r = self.radius(theta);
            if r <= 0.0 {
                return Err(Error::Domain(format!(
                    "boundary not star-shaped: r({theta}) = {r}"
                )));
            }
            if r >= w.big_r {
                return Err(Error::Domain(format!(
                    "boundary exits the weight support: r({theta}) = {r} >= {}",
                    w.big_r
                )));
            }
        }
        Ok(())
    }

    /// Shift the `k = 0` coefficient so the weighted volume matches
    /// `target` exactly (bisection; the volume is monotone in the mean
    /// radius while the boundary stays inside the support).
    pub fn with_volume(mut self, w: &WeightParams, target: f64) -> Result<StarShape> {
        if self.cos_coeffs.is_empty() {
            self.cos_coeffs.push(0.0);
        }
        let (mut lo, mut hi) = (-0.9, w.big_r / self.base_radius - 1.0 - 1e-9);
        let vol = |shape: &StarShape, a0: f64| -> f64 {
            let mut s = shape.clone();
            s.cos_coeffs[0] = a0;
            trapezoid_periodic(|t| w.vol_prim(s.radius(t).clamp(0.0, w.big_r)), THETA_NODES)
        };
        if vol(&self, lo) - target > 0.0 || vol(&self, hi) - target < 0.0 {
            return Err(Error::Domain(format!(
                "volume {target} not reachable by shifting the mean radius"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if vol(&self, mid) - target < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        self.cos_coeffs[0] = 0.5 * (lo + hi);
        self.validate(w)?;
        Ok(self)
    }
}

/// Weighted perimeter `∫₀^{2π} ρ̄(r(θ))^{3/2} √(r² + r'²) dθ`.
pub fn weighted_perimeter(shape: &StarShape, w: &WeightParams) -> Result<f64> {
    shape.validate(w)?;
    Ok(trapezoid_periodic(
        |theta| {
            let r = shape.radius(theta);
            let rp = shape.base_radius * shape.u_prime(theta);
            w.rho(r).powf(1.5) * (r * r + rp * rp).sqrt()
        },
        THETA_NODES,
    ))
}

/// Weighted volume by analytic radial integration per angle.
pub fn weighted_volume(shape: &StarShape, w: &WeightParams) -> Result<f64> {
    shape.validate(w)?;
    Ok(trapezoid_periodic(
        |t| w.vol_prim(shape.radius(t)),
        THETA_NODES,
    ))
}

fn star_rho2(shape: &StarShape, w: &WeightParams) -> f64 {
    trapezoid_periodic(|t| w.rho2_prim(shape.radius(t)), THETA_NODES)
}

/// Which coefficient multiplies `ξ` in front of the complement term.
/// Both conventions appear in the literature; the default is `ξ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiCoefficient {
    /// `(ξ/2) ∫_{E^c} ρ̄²`.
    Half,
    /// `ξ ∫_{E^c} ρ̄²`.
    Full,
}

impl Default for XiCoefficient {
    fn default() -> Self {
        XiCoefficient::Half
    }
}

impl XiCoefficient {
    fn factor(self) -> f64 {
        match self {
            XiCoefficient::Half => 0.5,
            XiCoefficient::Full => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShapeReport {
    pub f_value: f64,
    pub v_value: f64,
    pub complement_term: f64,
    pub g_value: f64,
}

/// Evaluate `G_ξ` on a competitor region.
pub fn g_xi(
    region: &Region,
    w: &WeightParams,
    xi: f64,
    sigma_k: f64,
    coeff: XiCoefficient,
) -> Result<ShapeReport> {
    let f_value = region.weighted_perimeter(w)?;
    let v_value = region.volume(w)?;
    let complement_term = w.rho2_total() - region.rho2(w)?;
    Ok(ShapeReport {
        f_value,
        v_value,
        complement_term,
        g_value: sigma_k * f_value + coeff.factor() * xi * complement_term,
    })
}

/// Second-order prediction for `F(E) − F(B)` around the unit ball under
/// the exact volume constraint:
/// `(R²−1)^{3/2} · ½ · [∫|∇u|² − R²(2+R²)/(R²−1)² ∫u²]`,
/// evaluated by Parseval on the Fourier coefficients.
pub fn fuglede_form(w: &WeightParams, shape: &StarShape) -> f64 {
    let kappa = mode_weight(w);
    let mut grad = 0.0;
    let mut l2 = 0.0;
    for (k, a) in shape.cos_coeffs.iter().enumerate() {
        let (g, m) = if k == 0 {
            (0.0, 2.0 * PI)
        } else {
            ((k * k) as f64 * PI, PI)
        };
        grad += g * a * a;
        l2 += m * a * a;
    }
    for (k, b) in shape.sin_coeffs.iter().enumerate().skip(1) {
        grad += (k * k) as f64 * PI * b * b;
        l2 += PI * b * b;
    }
    (w.big_r * w.big_r - 1.0).powf(1.5) * 0.5 * (grad - kappa * l2)
}

fn mode_weight(w: &WeightParams) -> f64 {
    let r2 = w.big_r * w.big_r;
    r2 * (2.0 + r2) / ((r2 - 1.0) * (r2 - 1.0))
}

/// Stability coefficient of the `k`-th boundary mode,
/// `k² − R²(2+R²)/(R²−1)²`; a negative value means the mode lowers the
/// weighted perimeter at second order.
pub fn mode_coefficient(w: &WeightParams, k: usize) -> f64 {
    (k * k) as f64 - mode_weight(w)
}

/// `F/V^{5/6}`, defined for `V(E) ≤ ᾱ/2`.
pub fn isoperimetric_ratio(region: &Region, w: &WeightParams) -> Result<f64> {
    let v = region.volume(w)?;
    if v > 0.5 * w.alpha_bar() {
        return Err(Error::Domain(format!(
            "isoperimetric ratio needs V <= alpha_bar/2, got {v}"
        )));
    }
    Ok(region.weighted_perimeter(w)? / v.powf(5.0 / 6.0))
}

/// Volume-term stability data against the volume-matched centered ball:
/// `gap = ∫_{E^c}ρ̄² − ∫_{B_r^c}ρ̄²` and `symdiff = ∫_{EΔB_r}ρ̄`.
pub fn volume_stability_gap(region: &Region, w: &WeightParams) -> Result<(f64, f64)> {
    let v = region.volume(w)?;
    let r = ball_radius_for_volume(v, w)?;
    let gap = w.ball_rho2(r) - region.rho2(w)?;
    let symdiff = region.symdiff_ball(w, r)?;
    Ok((gap, symdiff))
}

/// Competitor region in the disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Region {
    Star(StarShape),
    /// Disk `B_s(c·e₁)`; admissible while `c + s ≤ R` (tangency allowed).
    OffCenterDisk {
        center: f64,
        radius: f64,
    },
    /// Annular wedge `{ |θ| ≤ θ₀, r_in ≤ ρ ≤ R }` hugging the boundary,
    /// `0 < θ₀ < π`.  Its outer arc carries zero weight.
    Cap {
        half_angle: f64,
        inner_radius: f64,
    },
    /// Union of disjoint radial rings `(lo, hi)`, sorted.
    Rings(Vec<(f64, f64)>),
}

impl Region {
    pub fn family_name(&self) -> &'static str {
        match self {
            Region::Star(s) if s.cos_coeffs.len() <= 1 && s.sin_coeffs.is_empty() => {
                "centered-ball"
            }
            Region::Star(_) => "fourier",
            Region::OffCenterDisk { .. } => "off-center-disk",
            Region::Cap { .. } => "boundary-cap",
            Region::Rings(_) => "radial-rings",
        }
    }

    pub fn volume(&self, w: &WeightParams) -> Result<f64> {
        match self {
            Region::Star(s) => weighted_volume(s, w),
            Region::OffCenterDisk { center, radius } => {
                check_disk(*center, *radius, w)?;
                let a = w.big_r * w.big_r - center * center;
                Ok(PI * radius * radius * a - 0.5 * PI * radius.powi(4))
            }
            Region::Cap {
                half_angle,
                inner_radius,
            } => {
                check_cap(*half_angle, *inner_radius, w)?;
                Ok(2.0 * half_angle * (w.vol_prim(w.big_r) - w.vol_prim(*inner_radius)))
            }
            Region::Rings(rings) => {
                check_rings(rings, w)?;
                Ok(2.0
                    * PI
                    * rings
                        .iter()
                        .map(|&(lo, hi)| w.vol_prim(hi) - w.vol_prim(lo))
                        .sum::<f64>())
            }
        }
    }

    pub fn rho2(&self, w: &WeightParams) -> Result<f64> {
        match self {
            Region::Star(s) => {
                s.validate(w)?;
                Ok(star_rho2(s, w))
            }
            Region::OffCenterDisk { center, radius } => {
                check_disk(*center, *radius, w)?;
                let a = w.big_r * w.big_r - center * center;
                let b = a - radius * radius;
                Ok(PI / 3.0 * (a * a * a - b * b * b) + PI * center * center * radius.powi(4))
            }
            Region::Cap {
                half_angle,
                inner_radius,
            } => {
                check_cap(*half_angle, *inner_radius, w)?;
                Ok(2.0 * half_angle * (w.rho2_prim(w.big_r) - w.rho2_prim(*inner_radius)))
            }
            Region::Rings(rings) => {
                check_rings(rings, w)?;
                Ok(2.0
                    * PI
                    * rings
                        .iter()
                        .map(|&(lo, hi)| w.rho2_prim(hi) - w.rho2_prim(lo))
                        .sum::<f64>())
            }
        }
    }

    pub fn weighted_perimeter(&self, w: &WeightParams) -> Result<f64> {
        match self {
            Region::Star(s) => weighted_perimeter(s, w),
            Region::OffCenterDisk { center, radius } => {
                check_disk(*center, *radius, w)?;
                let a = w.big_r * w.big_r - center * center - radius * radius;
                let (c, s) = (*center, *radius);
                Ok(s * trapezoid_periodic(
                    |phi| (a - 2.0 * c * s * phi.cos()).max(0.0).powf(1.5),
                    THETA_NODES,
                ))
            }
            Region::Cap {
                half_angle,
                inner_radius,
            } => {
                check_cap(*half_angle, *inner_radius, w)?;
                let radial = 2.0 * w.radial_perimeter_band(*inner_radius);
                let arc = 2.0 * half_angle * inner_radius * w.rho(*inner_radius).powf(1.5);
                Ok(radial + arc)
            }
            Region::Rings(rings) => {
                check_rings(rings, w)?;
                let mut f = 0.0;
                for &(lo, hi) in rings {
                    if lo > 0.0 {
                        f += 2.0 * PI * lo * w.rho(lo).powf(1.5);
                    }
                    if hi < w.big_r {
                        f += 2.0 * PI * hi * w.rho(hi).powf(1.5);
                    }
                }
                Ok(f)
            }
        }
    }

    /// Boundary trace along the ray at angle `theta`: every radius where
    /// the ray crosses `∂E` (polar dump format).
    pub fn boundary_radii(&self, theta: f64) -> Vec<f64> {
        match self {
            Region::Star(s) => vec![s.radius(theta)],
            Region::OffCenterDisk { center, radius } => {
                let disc = radius * radius - center * center * theta.sin().powi(2);
                if disc < 0.0 {
                    return vec![];
                }
                let root = disc.sqrt();
                let mut out = Vec::new();
                let lo = center * theta.cos() - root;
                let hi = center * theta.cos() + root;
                if lo > 0.0 {
                    out.push(lo);
                }
                if hi > 0.0 {
                    out.push(hi);
                }
                out
            }
            Region::Cap {
                half_angle,
                inner_radius,
            } => {
                let wrapped = theta.rem_euclid(2.0 * PI);
                let wrapped = if wrapped > PI {
                    wrapped - 2.0 * PI
                } else {
                    wrapped
                };
                if wrapped.abs() <= *half_angle {
                    vec![*inner_radius]
                } else {
                    vec![]
                }
            }
            Region::Rings(rings) => {
                let mut out = Vec::new();
                for &(lo, hi) in rings {
                    if lo > 0.0 {
                        out.push(lo);
                    }
                    out.push(hi);
                }
                out
            }
        }
    }

    /// `∫_{E Δ B_r} ρ̄` against the centered ball of radius `r`.
    pub fn symdiff_ball(&self, w: &WeightParams, r: f64) -> Result<f64> {
        match self {
            Region::Star(s) => {
                s.validate(w)?;
                Ok(trapezoid_periodic(
                    |t| (w.vol_prim(s.radius(t)) - w.vol_prim(r)).abs(),
                    THETA_NODES,
                ))
            }
            Region::OffCenterDisk { center, radius } => {
                check_disk(*center, *radius, w)?;
                let (c, s) = (*center, *radius);
                Ok(trapezoid_periodic(
                    |theta| {
                        let disc = s * s - c * c * theta.sin().powi(2);
                        let section = if disc >= 0.0 {
                            let root = disc.sqrt();
                            let hi = c * theta.cos() + root;
                            let lo = (c * theta.cos() - root).max(0.0);
                            (hi > 0.0).then_some((lo, hi))
                        } else {
                            None
                        };
                        xor_mass(section, (0.0, r), w)
                    },
                    2 * THETA_NODES,
                ))
            }
            Region::Cap {
                half_angle,
                inner_radius,
            } => {
                check_cap(*half_angle, *inner_radius, w)?;
                let inside = xor_mass(Some((*inner_radius, w.big_r)), (0.0, r), w);
                let outside = w.vol_prim(r);
                Ok(2.0 * half_angle * inside + (2.0 * PI - 2.0 * half_angle) * outside)
            }
            Region::Rings(rings) => {
                check_rings(rings, w)?;
                let mut events: Vec<f64> = vec![0.0, r, w.big_r];
                for &(lo, hi) in rings {
                    events.push(lo);
                    events.push(hi);
                }
                events.sort_by(|a, b| a.partial_cmp(b).unwrap());
                events.dedup();
                let mut mass = 0.0;
                for win in events.windows(2) {
                    let (lo, hi) = (win[0], win[1]);
                    let mid = 0.5 * (lo + hi);
                    let in_e = rings.iter().any(|&(a, b)| mid >= a && mid < b);
                    let in_b = mid < r;
                    if in_e != in_b {
                        mass += w.vol_prim(hi) - w.vol_prim(lo);
                    }
                }
                Ok(2.0 * PI * mass)
            }
        }
    }
}

/// Weighted mass of the symmetric difference of two radial sections at a
/// fixed angle.
fn xor_mass(section: Option<(f64, f64)>, ball: (f64, f64), w: &WeightParams) -> f64 {
    match section {
        None => w.vol_prim(ball.1) - w.vol_prim(ball.0),
        Some((lo, hi)) => {
            let mut events = [ball.0, ball.1, lo, hi];
            events.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut mass = 0.0;
            for i in 0..3 {
                let (a, b) = (events[i], events[i + 1]);
                if b <= a {
                    continue;
                }
                let mid = 0.5 * (a + b);
                let in_e = mid >= lo && mid < hi;
                let in_b = mid >= ball.0 && mid < ball.1;
                if in_e != in_b {
                    mass += w.vol_prim(b) - w.vol_prim(a);
                }
            }
            mass
        }
    }
}

fn check_disk(center: f64, radius: f64, w: &WeightParams) -> Result<()> {
    if !(radius > 0.0) || center < 0.0 {
        return Err(Error::Domain(
            "disk needs radius > 0 and center >= 0".into(),
        ));
    }
    if center + radius > w.big_r + 1e-12 {
        return Err(Error::Domain(format!(
            "disk exits the support: c + s = {} > R = {}",
            center + radius,
            w.big_r
        )));
    }
    Ok(())
}

fn check_cap(half_angle: f64, inner_radius: f64, w: &WeightParams) -> Result<()> {
    if !(half_angle > 0.0 && half_angle < PI) {
        return Err(Error::Domain(format!(
            "cap half-angle must lie in (0, π), got {half_angle}"
        )));
    }
    if !(inner_radius >= 0.0 && inner_radius < w.big_r) {
        return Err(Error::Domain(format!(
            "cap inner radius must lie in [0, R), got {inner_radius}"
        )));
    }
    Ok(())
}

fn check_rings(rings: &[(f64, f64)], w: &WeightParams) -> Result<()> {
    let mut prev = 0.0;
    for &(lo, hi) in rings {
        if lo < prev - 1e-15 || hi <= lo || hi > w.big_r + 1e-12 {
            return Err(Error::Domain(format!("invalid ring ({lo}, {hi})")));
        }
        prev = hi;
    }
    Ok(())
}

/// Off-center disk of the given weighted volume at distance `center` from
/// the origin (smaller root of the volume quartic).
pub fn off_center_disk_with_volume(center: f64, target: f64, w: &WeightParams) -> Result<Region> {
    let a = w.big_r * w.big_r - center * center;
    let disc = a * a - 2.0 * target / PI;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "volume {target} not reachable at center {center}"
        )));
    }
    let s2 = a - disc.sqrt();
    if s2 <= 0.0 {
        return Err(Error::Domain("degenerate disk".into()));
    }
    let radius = s2.sqrt();
    check_disk(center, radius, w)?;
    Ok(Region::OffCenterDisk { center, radius })
}

/// Boundary cap of the given weighted volume at wedge half-angle `θ₀`:
/// `r_in² = R² − √(2·target/θ₀)`.
pub fn cap_with_volume(half_angle: f64, target: f64, w: &WeightParams) -> Result<Region> {
    let s = (2.0 * target / half_angle).sqrt();
    let r_in_sq = w.big_r * w.big_r - s;
    if r_in_sq < 0.0 {
        return Err(Error::Domain(format!(
            "volume {target} not reachable at half-angle {half_angle}"
        )));
    }
    let inner_radius = r_in_sq.sqrt();
    check_cap(half_angle, inner_radius, w)?;
    Ok(Region::Cap {
        half_angle,
        inner_radius,
    })
}

/// Internally tangent disk of radius `s` (touching `∂B_R`), the sharpness
/// family for the `5/6` exponent.  Closed forms:
/// `V = 2πRs³ − (3/2)πs⁴`, `F = (64/3)·s^{5/2}(R−s)^{3/2}`.
pub fn tangent_disk(s: f64, w: &WeightParams) -> Result<Region> {
    if !(s > 0.0 && s < w.big_r / 2.0) {
        return Err(Error::Domain(format!("tangent radius {s} out of range")));
    }
    Ok(Region::OffCenterDisk {
        center: w.big_r - s,
        radius: s,
    })
}
