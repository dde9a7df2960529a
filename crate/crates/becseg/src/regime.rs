//! Symmetry-breaking / rigidity detector for the weighted isoperimetric
//! functional `G_ξ`, plus randomized volume-matched families for the
//! quantitative stability and instability ratios.
//!
//! Verdicts compare the best tested non-radial competitor against the
//! best radially symmetric one; they are always relative to the tested
//! families, never claimed global.

use crate::error::{Error, Result};
use crate::exec::{map_collect, ExecMode};
use crate::shape::{
    ball_radius_for_volume, cap_with_volume, g_xi, off_center_disk_with_volume,
    volume_stability_gap, Region, StarShape, WeightParams, XiCoefficient,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One ξ-slice of the detector sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeVerdict {
    pub xi: f64,
    pub best_family: String,
    pub best_energy: f64,
    pub ball_energy: f64,
    pub symmetry_broken: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeSweep {
    pub verdicts: Vec<RegimeVerdict>,
    /// Smallest swept ξ from which the ball wins for every larger ξ.
    pub empirical_threshold: Option<f64>,
    /// True when the verdict flips at most once, from broken to ball.
    pub monotone: bool,
}

/// Volume-matched competitor families: the centered ball and ring splits
/// (radial), and off-center disks, boundary caps and seeded Fourier
/// perturbations (non-radial).
pub fn build_families(w: &WeightParams, seed: u64) -> Result<Vec<Region>> {
    let alpha = w.alpha1;
    let mut regions: Vec<Region> = Vec::new();
    let r_ball = ball_radius_for_volume(alpha, w)?;
    regions.push(Region::Star(StarShape::circle(r_ball)));

    // Boundary annulus with the same weighted volume.
    let c = w.vol_prim(w.big_r) - alpha / (2.0 * PI);
    let disc = w.big_r.powi(4) - 4.0 * c;
    if disc > 0.0 {
        let inner_sq = w.big_r * w.big_r - disc.sqrt();
        if inner_sq > 0.0 {
            regions.push(Region::Rings(vec![(inner_sq.sqrt(), w.big_r)]));
        }
    }

    // Off-center disks on a grid of centers.
    for frac in [0.15, 0.3, 0.45, 0.6] {
        if let Ok(region) = off_center_disk_with_volume(frac * w.big_r, alpha, w) {
            regions.push(region);
        }
    }

    // Boundary caps on a grid of wedge half-angles.
    let theta_min = 2.0 * alpha / w.big_r.powi(4);
    for frac in [1.05, 1.3, 1.8, 2.5] {
        let theta = theta_min * frac;
        if theta < PI {
            if let Ok(region) = cap_with_volume(theta, alpha, w) {
                regions.push(region);
            }
        }
    }

    // Seeded Fourier perturbations of the matched ball.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..6 {
        let k_max = 6;
        let mut cos_coeffs = vec![0.0; k_max + 1];
        let mut sin_coeffs = vec![0.0; k_max + 1];
        for k in 2..=k_max {
            let scale = 0.12 / (k as f64);
            cos_coeffs[k] = rng.random_range(-scale..scale);
            sin_coeffs[k] = rng.random_range(-scale..scale);
        }
        let star = StarShape {
            base_radius: r_ball,
            cos_coeffs,
            sin_coeffs,
        };
        if let Ok(star) = star.with_volume(w, alpha) {
            regions.push(Region::Star(star));
        }
    }
    Ok(regions)
}

fn is_radial(region: &Region) -> bool {
    matches!(region.family_name(), "centered-ball" | "radial-rings")
}

/// Sweep ξ and compare family minima of `G_ξ`.
pub fn regime_detector(
    w: &WeightParams,
    xis: &[f64],
    sigma_k: f64,
    coeff: XiCoefficient,
    seed: u64,
    mode: ExecMode,
) -> Result<RegimeSweep> {
    let regions = build_families(w, seed)?;
    // F and the complement term are ξ-independent; evaluate once per
    // region and assemble the sweep from them.
    let evals = map_collect(mode, &regions, |region| {
        g_xi(region, w, 0.0, 1.0, coeff).map(|rep| {
            (
                region.family_name().to_string(),
                rep.f_value,
                rep.complement_term,
                is_radial(region),
            )
        })
    });
    let mut rows = Vec::with_capacity(evals.len());
    for e in evals {
        rows.push(e?);
    }

    let factor = coeff_factor(coeff);
    let mut verdicts = Vec::with_capacity(xis.len());
    for &xi in xis {
        let mut best_radial = f64::INFINITY;
        let mut best_name = "";
        let mut best_energy = f64::INFINITY;
        for (name, f, compl, radial) in &rows {
            let g = sigma_k * f + factor * xi * compl;
            if *radial {
                best_radial = best_radial.min(g);
            }
            if g < best_energy {
                best_energy = g;
                best_name = name;
            }
        }
        let broken = best_energy < best_radial - 1e-10 * best_radial.abs().max(1.0);
        verdicts.push(RegimeVerdict {
            xi,
            best_family: best_name.to_string(),
            best_energy,
            ball_energy: best_radial,
            symmetry_broken: broken,
        });
    }

    let mut threshold = None;
    for v in verdicts.iter().rev() {
        if v.symmetry_broken {
            break;
        }
        threshold = Some(v.xi);
    }
    let flips = verdicts
        .windows(2)
        .filter(|p| p[0].symmetry_broken != p[1].symmetry_broken)
        .count();
    let monotone = flips <= 1
        && verdicts
            .last()
            .map(|v| !v.symmetry_broken || flips == 0)
            .unwrap_or(true);
    Ok(RegimeSweep {
        verdicts,
        empirical_threshold: threshold,
        monotone,
    })
}

fn coeff_factor(coeff: XiCoefficient) -> f64 {
    match coeff {
        XiCoefficient::Half => 0.5,
        XiCoefficient::Full => 1.0,
    }
}

/// Empirical constants of the volume-stability and perimeter-instability
/// inequalities over a randomized volume-matched family:
/// `min gap/symdiff²` (positive) and `max (F(B)−F(E))/symdiff²` (finite).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityConstants {
    pub samples: usize,
    pub min_gap_ratio: f64,
    pub max_instability_ratio: f64,
}

/// Randomized V-matched shapes near the ball: Fourier perturbations,
/// off-center disks and thin ring transfers, with bounded symmetric
/// difference so the quadratic ratios stay well-conditioned.
pub fn stability_family(w: &WeightParams, n_samples: usize, seed: u64) -> Result<Vec<Region>> {
    let alpha = w.alpha1;
    let r_ball = ball_radius_for_volume(alpha, w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut regions = Vec::with_capacity(n_samples);
    let mut attempts = 0;
    while regions.len() < n_samples && attempts < 50 * n_samples {
        attempts += 1;
        let kind = regions.len() % 3;
        let candidate: Result<Region> = match kind {
            0 => {
                let k_max = 8;
                let mut cos_coeffs = vec![0.0; k_max + 1];
                let mut sin_coeffs = vec![0.0; k_max + 1];
                let amp = rng.random_range(0.02..0.15);
                for k in 2..=k_max {
                    let scale = 4.0 * amp / (k * k) as f64;
                    cos_coeffs[k] = rng.random_range(-scale..scale);
                    sin_coeffs[k] = rng.random_range(-scale..scale);
                }
                StarShape {
                    base_radius: r_ball,
                    cos_coeffs,
                    sin_coeffs,
                }
                .with_volume(w, alpha)
                .map(Region::Star)
            }
            1 => {
                let c = rng.random_range(0.01..0.25) * r_ball;
                off_center_disk_with_volume(c, alpha, w)
            }
            _ => {
                // Ball with an annular notch pushed to an outer ring.
                let a = rng.random_range(0.55..0.9) * r_ball;
                let b = rng.random_range(1.02..1.15) * r_ball;
                let notch = w.vol_prim(r_ball) - w.vol_prim(a);
                let target_outer = w.vol_prim(b) + notch;
                let disc = w.big_r.powi(4) - 4.0 * target_outer;
                if disc <= 0.0 {
                    continue;
                }
                let hi_sq = w.big_r * w.big_r - disc.sqrt();
                if hi_sq <= b * b {
                    continue;
                }
                Ok(Region::Rings(vec![(0.0, a), (b, hi_sq.sqrt())]))
            }
        };
        if let Ok(region) = candidate {
            regions.push(region);
        }
    }
    if regions.len() < n_samples {
        return Err(Error::Convergence(format!(
            "only generated {} of {n_samples} admissible shapes",
            regions.len()
        )));
    }
    Ok(regions)
}

/// Evaluate both ratio constants over the family.
pub fn stability_constants(
    w: &WeightParams,
    regions: &[Region],
    mode: ExecMode,
) -> Result<StabilityConstants> {
    let r_ball = ball_radius_for_volume(w.alpha1, w)?;
    let f_ball = w.ball_perimeter(r_ball);
    let results = map_collect(mode, regions, |region| -> Result<(f64, f64)> {
        let (gap, sd) = volume_stability_gap(region, w)?;
        let f = region.weighted_perimeter(w)?;
        if sd <= 1e-10 {
            return Err(Error::Precondition("degenerate symdiff".into()));
        }
        Ok((gap / (sd * sd), (f_ball - f) / (sd * sd)))
    });
    let mut min_gap = f64::INFINITY;
    let mut max_inst = f64::NEG_INFINITY;
    let mut samples = 0;
    for r in results {
        let (g, i) = r?;
        min_gap = min_gap.min(g);
        max_inst = max_inst.max(i);
        samples += 1;
    }
    Ok(StabilityConstants {
        samples,
        min_gap_ratio: min_gap,
        max_instability_ratio: max_inst,
    })
}
