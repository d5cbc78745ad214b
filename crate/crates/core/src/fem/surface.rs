//! Constrained interface spaces as orthonormal bases over the unconstrained
//! per-curve nodal values.
//!
//! Scalar values are indexed by the global curve vertex `offset[i] + k`;
//! vector values by `2 * (offset[i] + k) + component`. The curvature space
//! imposes the signed junction sum; the displacement space identifies the
//! three copies of a junction vertex and removes the wall-normal component at
//! boundary points.

use crate::geom::{Vec2, Wall};
use crate::solver::{CsrMatrix, TripletBuilder};
use crate::network::{CurveEnd, CurveNetwork, EndRole};

/// Sparse matrix with orthonormal columns.
#[derive(Clone, Debug)]
pub struct ConstraintBasis {
    rows: usize,
    cols: Vec<Vec<(usize, f64)>>,
}

impl ConstraintBasis {
    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    /// `Z c`.
    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (col, &cj) in self.cols.iter().zip(c) {
            for &(r, z) in col {
                out[r] += z * cj;
            }
        }
        out
    }

    /// `Z^T v`.
    pub fn apply_t(&self, v: &[f64]) -> Vec<f64> {
        self.cols.iter().map(|col| col.iter().map(|&(r, z)| z * v[r]).sum()).collect()
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let mut b = TripletBuilder::new(self.rows, self.cols.len());
        for (j, col) in self.cols.iter().enumerate() {
            for &(r, z) in col {
                b.add(r, j, z);
            }
        }
        b.build()
    }

    /// Orthogonal projection `Z Z^T v`.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        self.apply(&self.apply_t(v))
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceSpaces {
    offsets: Vec<usize>,
    num_vertices: usize,
    pub w: ConstraintBasis,
    pub v: ConstraintBasis,
}

fn tangential_component(wall: Wall) -> usize {
    match wall {
        Wall::Left | Wall::Right => 1,
        Wall::Bottom | Wall::Top => 0,
    }
}

impl SurfaceSpaces {
    pub fn new(net: &CurveNetwork) -> Self {
        let mut offsets = Vec::with_capacity(net.num_curves());
        let mut n = 0;
        for c in net.curves() {
            offsets.push(n);
            n += c.num_vertices();
        }
        let gid = |curve: usize, end: CurveEnd| offsets[curve] + net.curve(curve).endpoint_index(end);

        let mut w_cols: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut v_cols: Vec<Vec<(usize, f64)>> = Vec::new();
        for (i, c) in net.curves().iter().enumerate() {
            for k in 0..c.num_vertices() {
                let g = offsets[i] + k;
                let role = if c.is_closed() {
                    None
                } else if k == 0 {
                    net.end_role(i, CurveEnd::Start)
                } else if k + 1 == c.num_vertices() {
                    net.end_role(i, CurveEnd::End)
                } else {
                    None
                };
                match role {
                    Some(EndRole::Junction { .. }) => {}
                    Some(EndRole::Boundary(b)) => {
                        w_cols.push(vec![(g, 1.0)]);
                        let comp = tangential_component(net.boundary_points()[b].wall);
                        v_cols.push(vec![(2 * g + comp, 1.0)]);
                    }
                    None => {
                        w_cols.push(vec![(g, 1.0)]);
                        v_cols.push(vec![(2 * g, 1.0)]);
                        v_cols.push(vec![(2 * g + 1, 1.0)]);
                    }
                }
            }
        }
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let s6 = 6f64.sqrt();
        for jn in net.junctions() {
            let g = jn.members.map(|m| gid(m.curve, m.end));
            let o = jn.orientation.map(f64::from);
            w_cols.push(vec![(g[0], o[0] / s2), (g[1], -o[1] / s2)]);
            w_cols.push(vec![(g[0], o[0] / s6), (g[1], o[1] / s6), (g[2], -2.0 * o[2] / s6)]);
            for comp in 0..2 {
                v_cols.push(g.iter().map(|&gi| (2 * gi + comp, 1.0 / s3)).collect());
            }
        }
        Self {
            offsets,
            num_vertices: n,
            w: ConstraintBasis { rows: n, cols: w_cols },
            v: ConstraintBasis { rows: 2 * n, cols: v_cols },
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn offset(&self, curve: usize) -> usize {
        self.offsets[curve]
    }

    /// Flattens per-curve scalars into the global vertex order.
    pub fn flatten_scalars(&self, values: &[Vec<f64>]) -> Vec<f64> {
        values.iter().flatten().copied().collect()
    }

    pub fn flatten_vectors(&self, values: &[Vec<Vec2>]) -> Vec<f64> {
        values.iter().flatten().flat_map(|v| [v.x, v.y]).collect()
    }

    pub fn split_scalars(&self, flat: &[f64]) -> Vec<Vec<f64>> {
        self.ranges().map(|(a, b)| flat[a..b].to_vec()).collect()
    }

    pub fn split_vectors(&self, flat: &[f64]) -> Vec<Vec<Vec2>> {
        self.ranges()
            .map(|(a, b)| (a..b).map(|g| Vec2::new(flat[2 * g], flat[2 * g + 1])).collect())
            .collect()
    }

    fn ranges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.offsets.len()).map(move |i| {
            let end = self.offsets.get(i + 1).copied().unwrap_or(self.num_vertices);
            (self.offsets[i], end)
        })
    }
}

/// Orthogonal projection onto the curvature space: at each junction the
/// signed sum is removed along the orientation vector.
pub fn project_w(values: &[Vec<f64>], net: &CurveNetwork) -> Vec<Vec<f64>> {
    let s = SurfaceSpaces::new(net);
    s.split_scalars(&s.w.project(&s.flatten_scalars(values)))
}

/// Orthogonal projection onto the displacement space: junction copies are
/// replaced by their mean and boundary points lose their wall-normal part.
pub fn project_v_partial(values: &[Vec<Vec2>], net: &CurveNetwork) -> Vec<Vec<Vec2>> {
    let s = SurfaceSpaces::new(net);
    s.split_vectors(&s.v.project(&s.flatten_vectors(values)))
}
