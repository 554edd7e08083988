//! Uniform 1+1D space-time grid.
//!
//! Vertices carry the scalar field, spatial edges `(i,j)->(i+1,j)` carry
//! `phi_x` and temporal edges `(i,j)->(i,j+1)` carry `phi_t`. The dual mesh
//! of a rectangular grid is never stored: every interior dual cell is the
//! `dx * dt` rectangle centred on its vertex and the two end vertices own
//! half of that.
//!
//! All indices are zero based: vertex `i` sits at `x_min + i * dx`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeGrid {
    nx: usize,
    dx: f64,
    dt: f64,
    x_min: f64,
}

impl SpacetimeGrid {
    /// Grid with `nx` vertices per time slice.
    pub fn new(nx: usize, dx: f64, dt: f64, x_min: f64) -> Result<Self> {
        Self::check(nx, dx, dt, x_min)?;
        if dt >= dx {
            return Err(SimError::Unstable { dx, dt });
        }
        Ok(Self { nx, dx, dt, x_min })
    }

    fn check(nx: usize, dx: f64, dt: f64, x_min: f64) -> Result<()> {
        if nx < 3 {
            return Err(SimError::InvalidGrid(format!(
                "at least 3 vertices per slice are required, got {nx}"
            )));
        }
        if !(dx > 0.0 && dx.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
            return Err(SimError::InvalidGrid(format!(
                "spacings must be positive and finite (dx = {dx}, dt = {dt})"
            )));
        }
        if !x_min.is_finite() {
            return Err(SimError::InvalidGrid("x_min must be finite".into()));
        }
        Ok(())
    }

    /// Like [`SpacetimeGrid::new`] without the `dt < dx` bound, for
    /// implicit reference schemes only. The explicit stepper rejects it.
    pub fn implicit(nx: usize, dx: f64, dt: f64, x_min: f64) -> Result<Self> {
        Self::check(nx, dx, dt, x_min)?;
        Ok(Self { nx, dx, dt, x_min })
    }

    /// True when `dt < dx`.
    pub fn is_explicit_stable(&self) -> bool {
        self.dt < self.dx
    }

    /// Grid covering `[x_min, x_min + length]`; `nx = round(length / dx) + 1`.
    pub fn build(length: f64, dx: f64, dt: f64, x_min: f64) -> Result<Self> {
        if !(dx > 0.0) || !(dt > 0.0) {
            return Err(SimError::InvalidGrid(format!(
                "spacings must be positive (dx = {dx}, dt = {dt})"
            )));
        }
        if !(length >= 2.0 * dx) {
            return Err(SimError::InvalidGrid(format!(
                "domain length {length} must be at least 2*dx = {}",
                2.0 * dx
            )));
        }
        let nx = (length / dx).round() as usize + 1;
        Self::new(nx, dx, dt, x_min)
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }
    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }
    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }
    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x(self.nx - 1)
    }
    pub fn length(&self) -> f64 {
        (self.nx - 1) as f64 * self.dx
    }
    pub fn courant(&self) -> f64 {
        self.dt / self.dx
    }

    /// Coordinate of vertex `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// Time of slice `j`.
    #[inline]
    pub fn t(&self, j: u64) -> f64 {
        j as f64 * self.dt
    }

    /// Vertex nearest to `x`, or `None` outside the domain (half a cell of slack).
    pub fn nearest_vertex(&self, x: f64) -> Option<usize> {
        let s = (x - self.x_min) / self.dx;
        if !(s >= -0.5 && s <= (self.nx - 1) as f64 + 0.5) {
            return None;
        }
        Some((s.round().max(0.0) as usize).min(self.nx - 1))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max()
    }

    pub fn spatial_edges_per_slice(&self) -> usize {
        self.nx - 1
    }
    pub fn temporal_edges_per_slice(&self) -> usize {
        self.nx
    }
    pub fn faces_per_step(&self) -> usize {
        self.nx - 1
    }

    /// Width of the dual cell of vertex `i` (`dx`, or `dx/2` at the ends).
    #[inline]
    pub fn dual_width(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.nx {
            0.5 * self.dx
        } else {
            self.dx
        }
    }

    /// Area of the space-time dual cell of an interior vertex.
    pub fn dual_area(&self) -> f64 {
        self.dx * self.dt
    }

    pub fn edge_in_range(&self, e: EdgeId) -> bool {
        match e.kind {
            EdgeKind::Spatial => e.i + 1 < self.nx,
            EdgeKind::Temporal => e.i < self.nx,
        }
    }

    /// Oriented boundary of a primal face, counter-clockwise in the
    /// `(x, t)` plane: bottom, right, top (reversed), left (reversed).
    pub fn face_boundary(&self, f: FaceId) -> Result<[(EdgeId, i8); 4]> {
        if f.i + 1 >= self.nx {
            return Err(SimError::OutOfRange(format!(
                "face ({}, {}) needs vertex {} but the grid has {} per slice",
                f.i,
                f.j,
                f.i + 1,
                self.nx
            )));
        }
        Ok(f.boundary())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Spatial,
    Temporal,
}

/// `Spatial`: `(i,j)->(i+1,j)`; `Temporal`: `(i,j)->(i,j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub kind: EdgeKind,
    pub i: usize,
    pub j: u64,
}

impl EdgeId {
    pub fn spatial(i: usize, j: u64) -> Self {
        Self {
            kind: EdgeKind::Spatial,
            i,
            j,
        }
    }
    pub fn temporal(i: usize, j: u64) -> Self {
        Self {
            kind: EdgeKind::Temporal,
            i,
            j,
        }
    }

    /// Tail and head vertices `(i, j)`.
    pub fn endpoints(&self) -> ((usize, u64), (usize, u64)) {
        match self.kind {
            EdgeKind::Spatial => ((self.i, self.j), (self.i + 1, self.j)),
            EdgeKind::Temporal => ((self.i, self.j), (self.i, self.j + 1)),
        }
    }
}

/// Face with corners `(i,j)`, `(i+1,j)`, `(i,j+1)`, `(i+1,j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceId {
    pub i: usize,
    pub j: u64,
}

impl FaceId {
    pub fn new(i: usize, j: u64) -> Self {
        Self { i, j }
    }

    pub fn boundary(&self) -> [(EdgeId, i8); 4] {
        let (i, j) = (self.i, self.j);
        [
            (EdgeId::spatial(i, j), 1),
            (EdgeId::temporal(i + 1, j), 1),
            (EdgeId::spatial(i, j + 1), -1),
            (EdgeId::temporal(i, j), -1),
        ]
    }
}

/// Oriented sum of the four edge values around one face. Zero whenever the
/// edge values are differences of a vertex field.
#[inline]
pub fn face_circulation<T>(bottom: T, right: T, top: T, left: T) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    bottom + right - top - left
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fluxon_grid_dimensions() {
        let g = SpacetimeGrid::build(100.0, 0.05, 0.04, 0.0).unwrap();
        assert_eq!(g.nx(), 2001);
        assert!((g.courant() - 0.8).abs() < 1e-15);
        assert_eq!(g.spatial_edges_per_slice(), 2000);
        assert_eq!(g.temporal_edges_per_slice(), 2001);
    }

    #[test]
    fn minimal_grid() {
        let g = SpacetimeGrid::build(1.0, 0.5, 0.4, 0.0).unwrap();
        assert_eq!(g.nx(), 3);
        assert_eq!(g.faces_per_step(), 2);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            SpacetimeGrid::build(100.0, 0.05, 0.06, 0.0),
            Err(SimError::Unstable { .. })
        ));
        assert!(matches!(
            SpacetimeGrid::build(100.0, 0.05, 0.05, 0.0),
            Err(SimError::Unstable { .. })
        ));
        assert!(SpacetimeGrid::build(100.0, -0.05, 0.04, 0.0).is_err());
        assert!(SpacetimeGrid::build(0.09, 0.05, 0.04, 0.0).is_err());
        assert!(SpacetimeGrid::new(2, 0.05, 0.04, 0.0).is_err());
    }

    #[test]
    fn first_face_boundary() {
        let g = SpacetimeGrid::build(1.0, 0.5, 0.4, 0.0).unwrap();
        let b = g.face_boundary(FaceId::new(0, 0)).unwrap();
        assert_eq!(
            b,
            [
                (EdgeId::spatial(0, 0), 1),
                (EdgeId::temporal(1, 0), 1),
                (EdgeId::spatial(0, 1), -1),
                (EdgeId::temporal(0, 0), -1),
            ]
        );
        assert!(g.face_boundary(FaceId::new(2, 0)).is_err());
    }

    #[test]
    fn dual_widths_sum_to_length() {
        let g = SpacetimeGrid::build(10.0, 0.1, 0.08, -5.0).unwrap();
        let total: f64 = (0..g.nx()).map(|i| g.dual_width(i)).sum();
        assert!((total - g.length()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn oriented_sum_of_differences_vanishes(
            vals in prop::collection::vec(-50.0f64..50.0, 4),
        ) {
            // vertices: a=(i,j) b=(i+1,j) c=(i,j+1) d=(i+1,j+1)
            let (a, b, c, d) = (vals[0], vals[1], vals[2], vals[3]);
            let f = FaceId::new(0, 0);
            let value = |e: EdgeId| {
                let v = |(i, j): (usize, u64)| match (i, j) {
                    (0, 0) => a,
                    (1, 0) => b,
                    (0, 1) => c,
                    _ => d,
                };
                let (tail, head) = e.endpoints();
                v(head) - v(tail)
            };
            let s: f64 = f
                .boundary()
                .iter()
                .map(|&(e, o)| o as f64 * value(e))
                .sum();
            prop_assert!(s.abs() <= 8.0 * f64::EPSILON * 50.0);
        }

        #[test]
        fn vertex_index_round_trip(i in 0usize..2001) {
            let g = SpacetimeGrid::build(100.0, 0.05, 0.04, -50.0).unwrap();
            prop_assert_eq!(g.nearest_vertex(g.x(i)), Some(i));
        }

        #[test]
        fn edge_endpoints_round_trip(i in 0usize..100, j in 0u64..100) {
            for e in [EdgeId::spatial(i, j), EdgeId::temporal(i, j)] {
                let (tail, head) = e.endpoints();
                let back = match e.kind {
                    EdgeKind::Spatial => { prop_assert_eq!(head, (tail.0 + 1, tail.1)); EdgeId::spatial(tail.0, tail.1) }
                    EdgeKind::Temporal => { prop_assert_eq!(head, (tail.0, tail.1 + 1)); EdgeId::temporal(tail.0, tail.1) }
                };
                prop_assert_eq!(back, e);
            }
        }
    }
}
