//! Sampled real scalar fields on flat tori and plane rectangles.
//!
//! A [`ScalarField`] is an `n×m` row-major grid of real samples together with
//! its geometry.  Torus fields are implicitly periodic — sample `(i, j)` sits
//! at `(i/n)ω₁ + (j/m)ω₂` and no boundary row or column is duplicated — which
//! is exactly the layout the spectral solver in [`crate::pde`] wants.

use num_complex::Complex64;

use crate::error::{BrodyError, Result};
use crate::lattice::PlaneLattice;

/// Where a field's samples live.
#[derive(Debug, Clone)]
pub enum FieldGeometry {
    /// The torus `ℂ/Γ`; periodic in both lattice directions.
    Torus(PlaneLattice),
    /// An axis-aligned rectangle, sampled at cell midpoints.
    Rect {
        corner: Complex64,
        width: f64,
        height: f64,
    },
}

/// An `n×m` grid of real samples with geometry.
#[derive(Debug, Clone)]
pub struct ScalarField {
    geometry: FieldGeometry,
    n: usize,
    m: usize,
    /// Row-major: `values[j*n + i]` is the sample at grid index `(i, j)`.
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(geometry: FieldGeometry, n: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if n < 8 || m < 8 {
            return Err(BrodyError::GridTooSmall(n, m));
        }
        if values.len() != n * m {
            return Err(BrodyError::InvalidDomain(format!(
                "field needs {} values, got {}",
                n * m,
                values.len()
            )));
        }
        Ok(ScalarField {
            geometry,
            n,
            m,
            values,
        })
    }

    /// Sample a function on the grid.
    pub fn from_fn(
        geometry: FieldGeometry,
        n: usize,
        m: usize,
        mut f: impl FnMut(Complex64) -> f64,
    ) -> Result<Self> {
        let mut field = ScalarField::new(geometry, n, m, vec![0.0; n * m])?;
        for j in 0..m {
            for i in 0..n {
                field.values[j * n + i] = f(field.point(i, j));
            }
        }
        Ok(field)
    }

    pub fn geometry(&self) -> &FieldGeometry {
        &self.geometry
    }

    /// Grid dimensions `(n, m)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    /// Grid spacing per axis (lattice-direction step lengths on a torus).
    pub fn spacing(&self) -> (f64, f64) {
        match &self.geometry {
            FieldGeometry::Torus(lat) => (
                lat.omega1().norm() / self.n as f64,
                lat.omega2().norm() / self.m as f64,
            ),
            FieldGeometry::Rect { width, height, .. } => {
                (width / self.n as f64, height / self.m as f64)
            }
        }
    }

    /// Physical location of grid index `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        match &self.geometry {
            FieldGeometry::Torus(lat) => {
                lat.omega1() * (i as f64 / self.n as f64)
                    + lat.omega2() * (j as f64 / self.m as f64)
            }
            FieldGeometry::Rect {
                corner,
                width,
                height,
            } => {
                corner
                    + Complex64::new(
                        (i as f64 + 0.5) * width / self.n as f64,
                        (j as f64 + 0.5) * height / self.m as f64,
                    )
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.n + i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &v| a.min(v))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Grid integral: mean value times the area of the geometry.
    pub fn integral(&self) -> f64 {
        let area = match &self.geometry {
            FieldGeometry::Torus(lat) => lat.cell_area(),
            FieldGeometry::Rect { width, height, .. } => width * height,
        };
        self.mean() * area
    }

    /// Pointwise map, keeping geometry and grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            geometry: self.geometry.clone(),
            n: self.n,
            m: self.m,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    // -- serialization ------------------------------------------------------

    /// Text form: header (geometry, grid, spacing) then one row per line.
    /// Floats are shortest-round-trip, so `parse_text` is exact.
    pub fn to_text(&self) -> String {
        let mut out = String::from("brody-field v1\n");
        match &self.geometry {
            FieldGeometry::Torus(lat) => {
                out.push_str(&format!(
                    "geometry torus {} {} {} {}\n",
                    lat.omega1().re,
                    lat.omega1().im,
                    lat.omega2().re,
                    lat.omega2().im
                ));
            }
            FieldGeometry::Rect {
                corner,
                width,
                height,
            } => {
                out.push_str(&format!(
                    "geometry rect {} {} {} {}\n",
                    corner.re, corner.im, width, height
                ));
            }
        }
        out.push_str(&format!("grid {} {}\n", self.n, self.m));
        let (dx, dy) = self.spacing();
        out.push_str(&format!("spacing {} {}\n", dx, dy));
        for j in 0..self.m {
            let row: Vec<String> = (0..self.n).map(|i| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| BrodyError::Parse("empty field file".into()))?;
        if header != "brody-field v1" {
            return Err(BrodyError::Parse(format!("bad header: {header}")));
        }
        let geom_line = lines
            .next()
            .ok_or_else(|| BrodyError::Parse("missing geometry".into()))?;
        let toks: Vec<&str> = geom_line.split_whitespace().collect();
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| BrodyError::Parse(format!("bad number: {s}")))
        };
        let geometry = match toks.as_slice() {
            ["geometry", "torus", a, b, c, d] => FieldGeometry::Torus(PlaneLattice::new(
                Complex64::new(num(a)?, num(b)?),
                Complex64::new(num(c)?, num(d)?),
            )?),
            ["geometry", "rect", a, b, w, h] => FieldGeometry::Rect {
                corner: Complex64::new(num(a)?, num(b)?),
                width: num(w)?,
                height: num(h)?,
            },
            _ => return Err(BrodyError::Parse(format!("bad geometry line: {geom_line}"))),
        };
        let grid_line = lines
            .next()
            .ok_or_else(|| BrodyError::Parse("missing grid".into()))?;
        let gt: Vec<&str> = grid_line.split_whitespace().collect();
        let (n, m) = match gt.as_slice() {
            ["grid", n, m] => (
                n.parse::<usize>()
                    .map_err(|_| BrodyError::Parse(format!("bad grid size: {n}")))?,
                m.parse::<usize>()
                    .map_err(|_| BrodyError::Parse(format!("bad grid size: {m}")))?,
            ),
            _ => return Err(BrodyError::Parse(format!("bad grid line: {grid_line}"))),
        };
        // Spacing is derived data; validate its shape and discard.
        let sp_line = lines
            .next()
            .ok_or_else(|| BrodyError::Parse("missing spacing".into()))?;
        if !sp_line.starts_with("spacing ") {
            return Err(BrodyError::Parse(format!("bad spacing line: {sp_line}")));
        }
        let mut values = Vec::with_capacity(n * m);
        for line in lines {
            for tok in line.split_whitespace() {
                values.push(num(tok)?);
            }
        }
        ScalarField::new(geometry, n, m, values)
    }

    /// CSV export `x,y,value`, one sample per line, for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,value\n");
        for j in 0..self.m {
            for i in 0..self.n {
                let z = self.point(i, j);
                out.push_str(&format!("{},{},{}\n", z.re, z.im, self.get(i, j)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_too_small_rejected() {
        let lat = PlaneLattice::square(1.0).unwrap();
        let r = ScalarField::new(FieldGeometry::Torus(lat), 4, 16, vec![0.0; 64]);
        assert!(matches!(r, Err(BrodyError::GridTooSmall(4, 16))));
    }

    #[test]
    fn torus_sampling_layout() {
        let lat = PlaneLattice::rectangular(2.0, 1.0).unwrap();
        let f = ScalarField::from_fn(FieldGeometry::Torus(lat), 8, 8, |z| z.re).unwrap();
        // Sample (0,0) is the origin; no duplicated boundary row.
        assert_eq!(f.get(0, 0), 0.0);
        assert_eq!(f.get(4, 0), 1.0);
        let (dx, dy) = f.spacing();
        assert!((dx - 0.25).abs() < 1e-15 && (dy - 0.125).abs() < 1e-15);
    }

    #[test]
    fn integral_of_constant() {
        let lat = PlaneLattice::rectangular(3.0, 2.0).unwrap();
        let f = ScalarField::from_fn(FieldGeometry::Torus(lat), 8, 8, |_| 1.5).unwrap();
        assert!((f.integral() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn text_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lat = PlaneLattice::rectangular(1.0, 1.7).unwrap();
        let f = ScalarField::from_fn(FieldGeometry::Torus(lat), 16, 8, |_| {
            rng.gen_range(-1.0..1.0)
        })
        .unwrap();
        let text = f.to_text();
        let g = ScalarField::parse_text(&text).unwrap();
        assert_eq!(f.values(), g.values());
        assert_eq!(text, g.to_text());
    }

    #[test]
    fn rect_roundtrip_and_csv() {
        let f = ScalarField::from_fn(
            FieldGeometry::Rect {
                corner: Complex64::new(-1.0, 0.5),
                width: 2.0,
                height: 1.0,
            },
            8,
            8,
            |z| z.norm_sqr(),
        )
        .unwrap();
        let g = ScalarField::parse_text(&f.to_text()).unwrap();
        assert_eq!(f.values(), g.values());
        let csv = f.to_csv();
        assert!(csv.starts_with("x,y,value\n"));
        assert_eq!(csv.lines().count(), 65);
    }
}
