//! Quadrature helpers: radial midpoint rules that respect integrand
//! breakpoints, composite Simpson, and periodic trapezoid sums.

/// Midpoint cells on `[0, r_max]`, split at known breakpoints so that each
/// cell lies inside one smooth piece of the integrand.  Profiles with kinks
/// or jumps at their support radii then integrate at second order; without
/// the split a jump costs a full order.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    cells: Vec<(f64, f64)>, // (midpoint, width)
}

impl RadialGrid {
    /// Uniform midpoint cells, no interior breakpoints.
    pub fn uniform(r_max: f64, h: f64) -> Self {
        Self::with_breakpoints(r_max, h, &[])
    }

    /// Midpoint cells of target width `h`, with cell boundaries placed on
    /// every breakpoint in `(0, r_max)`.
    pub fn with_breakpoints(r_max: f64, h: f64, breakpoints: &[f64]) -> Self {
        assert!(r_max > 0.0 && h > 0.0, "radial grid needs r_max > 0, h > 0");
        let mut edges: Vec<f64> = vec![0.0, r_max];
        edges.extend(
            breakpoints
                .iter()
                .copied()
                .filter(|&b| b > 0.0 && b < r_max),
        );
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * r_max);

        let mut cells = Vec::new();
        for seg in edges.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let len = hi - lo;
            let n = ((len / h).ceil() as usize).max(1);
            let w = len / n as f64;
            for i in 0..n {
                cells.push((lo + (i as f64 + 0.5) * w, w));
            }
        }
        RadialGrid { cells }
    }

    pub fn cells(&self) -> &[(f64, f64)] {
        &self.cells
    }

    /// Integral of `f` over the plane for a radial integrand:
    /// `2π ∫ f(r) r dr` by the composite midpoint rule.
    pub fn integrate_plane(&self, f: impl Fn(f64) -> f64) -> f64 {
        let sum: f64 = self.cells.iter().map(|&(r, w)| f(r) * r * w).sum();
        2.0 * std::f64::consts::PI * sum
    }
}

/// Composite Simpson rule on `[a, b]` with `n` subintervals (`n` rounded up
/// to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = if n % 2 == 0 { n.max(2) } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Composite Simpson split at the given interior breakpoints.
pub fn simpson_with_breakpoints(
    f: impl Fn(f64) -> f64 + Copy,
    a: f64,
    b: f64,
    n_per_piece: usize,
    breakpoints: &[f64],
) -> f64 {
    let mut edges: Vec<f64> = vec![a, b];
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup_by(|x, y| (*x - *y).abs() < 1e-14 * (b - a).abs().max(1.0));
    edges
        .windows(2)
        .map(|seg| simpson(f, seg[0], seg[1], n_per_piece))
        .sum()
}

/// Trapezoid sum of a `2π`-periodic integrand sampled at `n` equispaced
/// angles; spectrally accurate for smooth periodic integrands.
pub fn trapezoid_periodic(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let dt = 2.0 * std::f64::consts::PI / n as f64;
    (0..n).map(|m| f(m as f64 * dt)).sum::<f64>() * dt
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn plane_integral_of_truncated_parabola() {
        // 2π ∫_0^1 (1 - r²) r dr = π/2, with the integrand kinked at r = 1.
        let grid = RadialGrid::with_breakpoints(2.0, 1e-3, &[1.0]);
        let v = grid.integrate_plane(|r| (1.0 - r * r).max(0.0));
        // Midpoint is second order: error ≈ h²/24 · 2π ∫|F''| ≈ 7.9e-7 here.
        assert!((v - PI / 2.0).abs() < 2e-6, "got {v}");
        let fine = RadialGrid::with_breakpoints(2.0, 2.5e-4, &[1.0]);
        let v_fine = fine.integrate_plane(|r| (1.0 - r * r).max(0.0));
        assert!((v - PI / 2.0).abs() / (v_fine - PI / 2.0).abs() > 12.0);
    }

    #[test]
    fn breakpoint_split_beats_plain_midpoint_on_jumps() {
        // Jump integrand: 2π ∫_0^1 r dr = π exactly on [0, 2].
        let f = |r: f64| if r < 1.0 { 1.0 } else { 0.0 };
        let split = RadialGrid::with_breakpoints(2.0, 1e-2, &[1.0]);
        assert!((split.integrate_plane(f) - PI).abs() < 1e-12);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn periodic_trapezoid_is_spectral() {
        let v = trapezoid_periodic(|t| (2.0 + t.cos()).powi(2), 64);
        // ∫ (2 + cos t)² = 4·2π/2... = 2π·(4 + 1/2)
        assert!((v - 2.0 * PI * 4.5).abs() < 1e-12);
    }
}
