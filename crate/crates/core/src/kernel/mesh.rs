//! Half-edge triangulations of translation surfaces.
//!
//! Triangle `t` owns half-edges `3t, 3t+1, 3t+2` in counterclockwise order.
//! Every half-edge stores its holonomy vector; twins carry opposite vectors.
//! All vertices of the mesh are singularities or marked points.

use crate::geom::{Mat2, Vec2};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub(crate) vecs: Vec<Vec2>,
    pub(crate) twin: Vec<usize>,
    pub(crate) origin: Vec<usize>,
    pub(crate) n_vertices: usize,
}

/// A point of the surface, given by a triangle and coordinates relative to
/// the triangle's corner 0 (the origin of half-edge `3t`).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SurfacePoint {
    pub tri: usize,
    pub pos: Vec2,
}

#[inline]
pub fn next(h: usize) -> usize {
    3 * (h / 3) + (h % 3 + 1) % 3
}

#[inline]
pub fn prev(h: usize) -> usize {
    3 * (h / 3) + (h % 3 + 2) % 3
}

#[inline]
pub fn tri_of(h: usize) -> usize {
    h / 3
}

impl Mesh {
    pub(crate) fn from_parts(vecs: Vec<Vec2>, twin: Vec<usize>, origin: Vec<usize>, n_vertices: usize) -> Self {
        Mesh { vecs, twin, origin, n_vertices }
    }

    pub fn n_triangles(&self) -> usize {
        self.vecs.len() / 3
    }

    pub fn n_halfedges(&self) -> usize {
        self.vecs.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn vec(&self, h: usize) -> Vec2 {
        self.vecs[h]
    }

    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    pub fn origin(&self, h: usize) -> usize {
        self.origin[h]
    }

    /// One representative half-edge per undirected edge.
    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vecs.len()).filter(move |&h| h < self.twin[h])
    }

    /// Corner positions of triangle `t` with corner 0 at the origin.
    pub fn corners(&self, t: usize) -> [Vec2; 3] {
        let a = Vec2::ZERO;
        let b = self.vecs[3 * t];
        let c = b + self.vecs[3 * t + 1];
        [a, b, c]
    }

    /// Local position of the origin of half-edge `h` inside its triangle.
    pub fn start_of(&self, h: usize) -> Vec2 {
        self.corners(tri_of(h))[h % 3]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        self.vecs[3 * t].cross(-self.vecs[3 * t + 2]) / 2.0
    }

    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn edge_length(&self, h: usize) -> f64 {
        self.vecs[h].norm()
    }

    pub fn transformed(&self, m: &Mat2) -> Mesh {
        let mut out = self.clone();
        for v in &mut out.vecs {
            *v = m.apply(*v);
        }
        out
    }

    /// Euler characteristic `V - E + F` of the triangulated surface.
    pub fn euler_characteristic(&self) -> i64 {
        let f = self.n_triangles() as i64;
        let e = (self.vecs.len() / 2) as i64;
        self.n_vertices as i64 - e + f
    }

    /// Interior angle of the corner at the origin of half-edge `h`.
    pub fn corner_angle(&self, h: usize) -> f64 {
        let out = self.vecs[h];
        let inc = -self.vecs[prev(h)];
        out.cross(inc).atan2(out.dot(inc))
    }

    /// Sum of the two angles opposite the edge of `h`.
    pub fn opposite_angle_sum(&self, h: usize) -> f64 {
        let g = self.twin[h];
        self.corner_angle(prev(h)) + self.corner_angle(prev(g))
    }

    /// Whether the quadrilateral formed by the two triangles at `h` is
    /// strictly convex, so that the diagonal can be flipped.
    pub fn is_flippable(&self, h: usize) -> bool {
        let g = self.twin[h];
        // quad A, D, B, C around the edge A->B
        let a = Vec2::ZERO;
        let b = self.vecs[h];
        let c = b + self.vecs[next(h)];
        let d = a + self.vecs[next(g)];
        let quad = [a, d, b, c];
        (0..4).all(|i| {
            let p = quad[i];
            let q = quad[(i + 1) % 4];
            let r = quad[(i + 2) % 4];
            (q - p).cross(r - q) > 1e-14 * (q - p).norm() * (r - q).norm()
        })
    }

    /// Flips the diagonal of the quadrilateral formed by the triangles on
    /// both sides of `h`. Half-edge `h` and its twin keep their slots and
    /// become the new diagonal.
    pub fn flip(&mut self, h: usize) {
        let g = self.twin[h];
        let (h1, h2) = (next(h), next(next(h)));
        let (g1, g2) = (next(g), next(next(g)));
        let old = |m: &Mesh, k: usize| (m.vecs[k], m.origin[k], m.twin[k]);
        let (vh1, oh1, th1) = old(self, h1);
        let (vh2, oh2, th2) = old(self, h2);
        let (vg1, og1, tg1) = old(self, g1);
        let (vg2, og2, tg2) = old(self, g2);
        // old slot -> new slot
        let remap = |k: usize| -> usize {
            if k == h2 {
                h1
            } else if k == g1 {
                h2
            } else if k == g2 {
                g1
            } else if k == h1 {
                g2
            } else {
                k
            }
        };
        let dc = -vh2 - vg1;
        self.vecs[h] = dc;
        self.origin[h] = og2;
        self.vecs[g] = -dc;
        self.origin[g] = oh2;

        let moves = [(h1, vh2, oh2, th2), (h2, vg1, og1, tg1), (g1, vg2, og2, tg2), (g2, vh1, oh1, th1)];
        for (slot, v, o, t) in moves {
            self.vecs[slot] = v;
            self.origin[slot] = o;
            let nt = remap(t);
            self.twin[slot] = nt;
            self.twin[nt] = slot;
        }
    }

    /// Locates the triangle containing `p` given in the frame of triangle
    /// `t`, walking across edges when `p` lies outside. Returns `None` if the
    /// walk passes too close to a vertex.
    pub fn normalize_point(&self, mut pt: SurfacePoint) -> Option<SurfacePoint> {
        for _ in 0..10_000 {
            let c = self.corners(pt.tri);
            let mut moved = false;
            for i in 0..3 {
                let a = c[i];
                let e = self.vecs[3 * pt.tri + i];
                if e.cross(pt.pos - a) < -1e-13 * e.norm() {
                    let h = 3 * pt.tri + i;
                    let g = self.twin[h];
                    // express p relative to the far end of h, which is the origin of g
                    let rel = pt.pos - (a + e);
                    let np = self.start_of(g) + rel;
                    pt = SurfacePoint { tri: tri_of(g), pos: np };
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Some(pt);
            }
        }
        None
    }

    /// Barycentric inside test with tolerance.
    pub fn contains(&self, t: usize, p: Vec2, tol: f64) -> bool {
        let c = self.corners(t);
        (0..3).all(|i| {
            let e = self.vecs[3 * t + i];
            e.cross(p - c[i]) >= -tol * e.norm()
        })
    }

    /// Uniformly distributed point (with respect to area).
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint {
        let total = self.area();
        let mut target = rng.gen::<f64>() * total;
        let mut tri = self.n_triangles() - 1;
        for t in 0..self.n_triangles() {
            let a = self.triangle_area(t);
            if target < a {
                tri = t;
                break;
            }
            target -= a;
        }
        let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        let c = self.corners(tri);
        SurfacePoint { tri, pos: c[1] * u + c[2] * v }
    }

    /// Local corner index (0..3) of vertex classes in triangle `t`.
    pub fn corner_vertices(&self, t: usize) -> [usize; 3] {
        [self.origin[3 * t], self.origin[3 * t + 1], self.origin[3 * t + 2]]
    }

    /// Combinatorial fingerprint used to detect repeated flip states.
    pub(crate) fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut hs = std::collections::hash_map::DefaultHasher::new();
        self.twin.hash(&mut hs);
        self.origin.hash(&mut hs);
        for v in &self.vecs {
            ((v.x * 1e9).round() as i64).hash(&mut hs);
            ((v.y * 1e9).round() as i64).hash(&mut hs);
        }
        hs.finish()
    }

    /// Structural checks: twins are an involution with opposite vectors and
    /// triangles close up with positive area.
    pub fn check(&self, tol: f64) -> Result<(), String> {
        for h in 0..self.vecs.len() {
            let g = self.twin[h];
            if self.twin[g] != h || g == h {
                return Err(format!("twin of {h} is not an involution"));
            }
            if !(self.vecs[h] + self.vecs[g]).approx_eq(Vec2::ZERO, tol * (1.0 + self.vecs[h].sup())) {
                return Err(format!("half-edges {h},{g} are not opposite"));
            }
            if self.origin[g] != self.origin[next(h)] {
                return Err(format!("origin mismatch across {h}"));
            }
        }
        for t in 0..self.n_triangles() {
            let s = self.vecs[3 * t] + self.vecs[3 * t + 1] + self.vecs[3 * t + 2];
            if !s.approx_eq(Vec2::ZERO, tol * (1.0 + self.vecs[3 * t].sup())) {
                return Err(format!("triangle {t} does not close"));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(format!("triangle {t} has non-positive area"));
            }
        }
        Ok(())
    }
}
