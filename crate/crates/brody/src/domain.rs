//! Planar integration and search domains.
//!
//! Disks, squares, lattice cells and thickened sets `D_r(Λ)` (finite unions
//! of disks over a center set).  Domains know how to produce sampling grids
//! of a requested spacing; all grid sweeps in the crate go through these.

use num_complex::Complex64;

use crate::error::{BrodyError, Result};
use crate::lattice::PlaneLattice;

#[derive(Debug, Clone)]
pub enum Domain {
    Disk { center: Complex64, radius: f64 },
    Square { corner: Complex64, side: f64 },
    Cell(PlaneLattice),
    /// `D_r(Λ)`: all points within `r` of one of the stored centers.
    Thickened { centers: Vec<Complex64>, r: f64 },
}

impl Domain {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(BrodyError::InvalidDomain("disk radius must be positive".into()));
        }
        Ok(Domain::Disk { center, radius })
    }

    pub fn square(corner: Complex64, side: f64) -> Result<Self> {
        if side <= 0.0 {
            return Err(BrodyError::InvalidDomain("square side must be positive".into()));
        }
        Ok(Domain::Square { corner, side })
    }

    pub fn cell(lattice: PlaneLattice) -> Self {
        Domain::Cell(lattice)
    }

    pub fn thickened(centers: Vec<Complex64>, r: f64) -> Result<Self> {
        if r <= 0.0 {
            return Err(BrodyError::InvalidDomain("thickening radius must be positive".into()));
        }
        if centers.is_empty() {
            return Err(BrodyError::EmptyDomain);
        }
        Ok(Domain::Thickened { centers, r })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Domain::Disk { center, radius } => (z - center).norm() <= *radius,
            Domain::Square { corner, side } => {
                let d = z - corner;
                (0.0..=*side).contains(&d.re) && (0.0..=*side).contains(&d.im)
            }
            Domain::Cell(lat) => {
                // Fundamental cell {s ω₁ + t ω₂ : 0 ≤ s,t < 1}.
                let det = lat.omega1().re * lat.omega2().im - lat.omega1().im * lat.omega2().re;
                let s = (z.re * lat.omega2().im - z.im * lat.omega2().re) / det;
                let t = (lat.omega1().re * z.im - lat.omega1().im * z.re) / det;
                (0.0..1.0).contains(&s) && (0.0..1.0).contains(&t)
            }
            Domain::Thickened { centers, r } => {
                centers.iter().any(|&c| (z - c).norm() <= *r)
            }
        }
    }

    /// Axis-aligned bounding box `(lower-left corner, width, height)`.
    pub fn bounding_box(&self) -> (Complex64, f64, f64) {
        match self {
            Domain::Disk { center, radius } => (
                center - Complex64::new(*radius, *radius),
                2.0 * radius,
                2.0 * radius,
            ),
            Domain::Square { corner, side } => (*corner, *side, *side),
            Domain::Cell(lat) => {
                let corners = [
                    Complex64::new(0.0, 0.0),
                    lat.omega1(),
                    lat.omega2(),
                    lat.omega1() + lat.omega2(),
                ];
                let xmin = corners.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
                let xmax = corners.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
                let ymin = corners.iter().map(|c| c.im).fold(f64::INFINITY, f64::min);
                let ymax = corners.iter().map(|c| c.im).fold(f64::NEG_INFINITY, f64::max);
                (Complex64::new(xmin, ymin), xmax - xmin, ymax - ymin)
            }
            Domain::Thickened { centers, r } => {
                let xmin = centers.iter().map(|c| c.re - r).fold(f64::INFINITY, f64::min);
                let xmax = centers.iter().map(|c| c.re + r).fold(f64::NEG_INFINITY, f64::max);
                let ymin = centers.iter().map(|c| c.im - r).fold(f64::INFINITY, f64::min);
                let ymax = centers.iter().map(|c| c.im + r).fold(f64::NEG_INFINITY, f64::max);
                (Complex64::new(xmin, ymin), xmax - xmin, ymax - ymin)
            }
        }
    }

    /// Sampling grid of spacing at most `resolution` covering the domain.
    ///
    /// Grid nodes lie at cell midpoints of a uniform subdivision of the
    /// bounding box, filtered by membership.
    pub fn grid(&self, resolution: f64) -> Result<Vec<Complex64>> {
        if resolution <= 0.0 {
            return Err(BrodyError::InvalidDomain("resolution must be positive".into()));
        }
        let (corner, w, h) = self.bounding_box();
        let nx = (w / resolution).ceil().max(1.0) as usize;
        let ny = (h / resolution).ceil().max(1.0) as usize;
        let dx = w / nx as f64;
        let dy = h / ny as f64;
        let mut pts = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let z = corner + Complex64::new((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dy);
                if self.contains(z) {
                    pts.push(z);
                }
            }
        }
        if pts.is_empty() {
            return Err(BrodyError::EmptyDomain);
        }
        Ok(pts)
    }

    /// Exact area where a closed form exists, grid estimate otherwise.
    pub fn area(&self) -> f64 {
        match self {
            Domain::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            Domain::Square { side, .. } => side * side,
            Domain::Cell(lat) => lat.cell_area(),
            Domain::Thickened { centers, r } => {
                // Disks may overlap; estimate by grid membership.
                let res = (r / 20.0).max(1e-3);
                match self.grid(res) {
                    Ok(pts) => pts.len() as f64 * res * res,
                    Err(_) => centers.len() as f64 * std::f64::consts::PI * r * r,
                }
            }
        }
    }

    /// Translate the domain by `a` (lattice cells cannot be translated).
    pub fn translate(&self, a: Complex64) -> Domain {
        match self {
            Domain::Disk { center, radius } => Domain::Disk {
                center: center + a,
                radius: *radius,
            },
            Domain::Square { corner, side } => Domain::Square {
                corner: corner + a,
                side: *side,
            },
            Domain::Cell(lat) => Domain::Thickened {
                // Approximate translated cell by its bounding disks; callers
                // that need exact translated cells use squares instead.
                centers: vec![a + (lat.omega1() + lat.omega2()) / 2.0],
                r: ((lat.omega1() + lat.omega2()) / 2.0).norm(),
            },
            Domain::Thickened { centers, r } => Domain::Thickened {
                centers: centers.iter().map(|c| c + a).collect(),
                r: *r,
            },
        }
    }
}
