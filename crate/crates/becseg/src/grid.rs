//! Uniform 2D Cartesian grid and real scalar fields on it.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Cell-centered uniform grid: node `(i, j)` sits at
/// `origin + ((i + ½)h, (j + ½)h)`.  Values are stored row-major,
/// `index = j·nx + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2d {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: (f64, f64),
}

impl Grid2d {
    pub fn new(nx: usize, ny: usize, h: f64, origin: (f64, f64)) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid needs nx, ny >= 8, got {nx} x {ny}"
            )));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive, got {h}"
            )));
        }
        Ok(Grid2d { nx, ny, h, origin })
    }

    /// Square grid of `n × n` cells covering `[-half_width, half_width]²`.
    pub fn centered_square(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidParameter(
                "half_width must be positive".into(),
            ));
        }
        let h = 2.0 * half_width / n as f64;
        Grid2d::new(n, n, h, (-half_width, -half_width))
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.origin.0 + (i as f64 + 0.5) * self.h
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.origin.1 + (j as f64 + 0.5) * self.h
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }
}

/// Real-valued field on a [`Grid2d`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2d,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid2d) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid2d, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values.push(f(grid.x(i), grid.y(j)));
            }
        }
        ScalarField { grid, values }
    }

    /// `∫ f² = Σ f² h²`.
    pub fn mass(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()
    }

    /// `⟨f, g⟩ = Σ f g h²`.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_area()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    /// Rescale so the mass `∫ f²` equals `target` exactly.  A zero field
    /// with a nonzero target is left unchanged.
    pub fn rescale_mass(&mut self, target: f64) {
        let m = self.mass();
        if m > 0.0 && target >= 0.0 {
            let s = (target / m).sqrt();
            for v in &mut self.values {
                *v *= s;
            }
        }
    }

    /// Two passes of a 3×3 binomial kernel (zero outside the domain);
    /// used to mollify seeds over about two grid cells.
    pub fn mollify(&self) -> ScalarField {
        let mut out = self.clone();
        for _ in 0..2 {
            let src = out.values.clone();
            let (nx, ny) = (self.grid.nx, self.grid.ny);
            let get = |i: isize, j: isize| -> f64 {
                if i < 0 || j < 0 || i >= nx as isize || j >= ny as isize {
                    0.0
                } else {
                    src[j as usize * nx + i as usize]
                }
            };
            for j in 0..ny {
                for i in 0..nx {
                    let (ii, jj) = (i as isize, j as isize);
                    let mut s = 0.25 * get(ii, jj);
                    s += 0.125
                        * (get(ii - 1, jj) + get(ii + 1, jj) + get(ii, jj - 1) + get(ii, jj + 1));
                    s += 0.0625
                        * (get(ii - 1, jj - 1)
                            + get(ii + 1, jj - 1)
                            + get(ii - 1, jj + 1)
                            + get(ii + 1, jj + 1));
                    out.values[j * nx + i] = s;
                }
            }
        }
        out
    }

    pub fn same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{}x{} (h={}) vs {}x{} (h={})",
                self.grid.nx, self.grid.ny, self.grid.h, other.grid.nx, other.grid.ny, other.grid.h
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid2d::new(4, 32, 0.1, (0.0, 0.0)).is_err());
        assert!(Grid2d::new(32, 32, 0.0, (0.0, 0.0)).is_err());
        let g = Grid2d::centered_square(2.0, 16).unwrap();
        assert!((g.x(0) + 2.0 - 0.5 * g.h).abs() < 1e-15);
        assert!((g.x(15) - (2.0 - 0.5 * g.h)).abs() < 1e-14);
        assert_eq!(g.len(), 256);
    }

    #[test]
    fn mass_and_rescale() {
        let g = Grid2d::centered_square(1.0, 16).unwrap();
        let mut f = ScalarField::from_fn(g, |x, y| 1.0 + x * y);
        f.rescale_mass(2.5);
        assert!((f.mass() - 2.5).abs() < 1e-13);
    }

    #[test]
    fn mollify_preserves_interior_constants() {
        let g = Grid2d::centered_square(1.0, 32).unwrap();
        let f = ScalarField::from_fn(g, |_, _| 1.0);
        let m = f.mollify();
        // Away from the boundary the kernel sums to one.
        let mid = g.idx(16, 16);
        assert!((m.values[mid] - 1.0).abs() < 1e-14);
    }
}
