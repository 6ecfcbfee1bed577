//! Translation surfaces glued from planar polygons.

use super::mesh::{Mesh, SurfacePoint};
use crate::error::{Error, Result};
use crate::geom::{interior_angle, polygon_area, Mat2, Vec2, TOL};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// On-disk surface description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDescription {
    /// Vertex coordinate lists, counterclockwise.
    pub polygons: Vec<Vec<[f64; 2]>>,
    /// Pairs `[[pi, ei], [pj, ej]]`; edge `e` of a polygon runs from vertex
    /// `e` to vertex `e + 1`.
    pub gluings: Vec<[[usize; 2]; 2]>,
    #[serde(default)]
    pub normalize_area: bool,
}

impl SurfaceDescription {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("description serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    /// Vertex class id (also the mesh vertex id).
    pub vertex: usize,
    /// A representative `(polygon, vertex index)`.
    pub location: (usize, usize),
    pub angle: f64,
}

impl ConePoint {
    /// Cone angle divided by 2π.
    pub fn multiplicity(&self) -> usize {
        (self.angle / (2.0 * PI)).round() as usize
    }

    pub fn is_marked(&self) -> bool {
        self.multiplicity() == 1
    }
}

/// A validated translation surface. Immutable; deformations build new values.
#[derive(Debug, Clone)]
pub struct FlatSurface {
    polygons: Vec<Vec<Vec2>>,
    gluings: Vec<((usize, usize), (usize, usize))>,
    vertex_class: Vec<Vec<usize>>,
    cone_points: Vec<ConePoint>,
    genus: usize,
    area: f64,
    mesh: Mesh,
    /// Mesh triangles of each polygon as `(triangle, polygon vertex of corner 0)`.
    poly_tris: Vec<Vec<(usize, usize)>>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Triangulates a simple counterclockwise polygon: a fan from vertex 0 when
/// every fan triangle is proper, otherwise ear clipping.
fn triangulate_polygon(pts: &[Vec2]) -> Result<Vec<[usize; 3]>> {
    let n = pts.len();
    let scale = pts.iter().map(|p| p.sup()).fold(1.0, f64::max);
    let proper = |a: usize, b: usize, c: usize| (pts[b] - pts[a]).cross(pts[c] - pts[a]) > 1e-12 * scale * scale;
    let fan: Vec<[usize; 3]> = (1..n - 1).map(|i| [0, i, i + 1]).collect();
    if fan.iter().all(|t| proper(t[0], t[1], t[2])) {
        return Ok(fan);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n - 2);
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (a, b, c) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            if !proper(a, b, c) {
                continue;
            }
            let inside = idx.iter().any(|&j| {
                if j == a || j == b || j == c {
                    return false;
                }
                let p = pts[j];
                let s1 = (pts[b] - pts[a]).cross(p - pts[a]);
                let s2 = (pts[c] - pts[b]).cross(p - pts[b]);
                let s3 = (pts[a] - pts[c]).cross(p - pts[c]);
                s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0
            });
            if inside {
                continue;
            }
            out.push([b, c, a]);
            idx.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(Error::Parse("polygon could not be triangulated".into()));
        }
    }
    if !proper(idx[0], idx[1], idx[2]) {
        return Err(Error::Parse("degenerate polygon".into()));
    }
    out.push([idx[0], idx[1], idx[2]]);
    Ok(out)
}

impl FlatSurface {
    /// Validates a raw description: gluings, connectivity, cone angles and
    /// Gauss–Bonnet.
    pub fn from_description(desc: &SurfaceDescription) -> Result<Self> {
        let polygons: Vec<Vec<Vec2>> = desc
            .polygons
            .iter()
            .map(|p| p.iter().map(|&[x, y]| Vec2::new(x, y)).collect())
            .collect();
        let gluings: Vec<((usize, usize), (usize, usize))> =
            desc.gluings.iter().map(|g| ((g[0][0], g[0][1]), (g[1][0], g[1][1]))).collect();
        let s = Self::build(polygons, gluings)?;
        if desc.normalize_area {
            Ok(s.normalized())
        } else {
            Ok(s)
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_description(&SurfaceDescription::from_json(s)?)
    }

    pub fn build(polygons: Vec<Vec<Vec2>>, gluings: Vec<((usize, usize), (usize, usize))>) -> Result<Self> {
        if polygons.is_empty() {
            return Err(Error::Parse("no polygons".into()));
        }
        for (i, p) in polygons.iter().enumerate() {
            if p.len() < 3 {
                return Err(Error::Parse(format!("polygon {i} has fewer than 3 vertices")));
            }
            if polygon_area(p) <= 0.0 {
                return Err(Error::Parse(format!("polygon {i} is not counterclockwise")));
            }
            for k in 0..p.len() {
                if (p[(k + 1) % p.len()] - p[k]).norm() <= TOL {
                    return Err(Error::Parse(format!("polygon {i} has a degenerate edge {k}")));
                }
            }
        }
        let edge_vec = |p: usize, e: usize| {
            let poly = &polygons[p];
            poly[(e + 1) % poly.len()] - poly[e]
        };
        // partner[p][e]
        let mut partner: Vec<Vec<Option<(usize, usize)>>> = polygons.iter().map(|p| vec![None; p.len()]).collect();
        for &((p, e), (q, f)) in &gluings {
            if p >= polygons.len() || q >= polygons.len() || e >= polygons[p].len() || f >= polygons[q].len() {
                return Err(Error::Parse(format!("gluing ({p},{e})-({q},{f}) out of range")));
            }
            if (p, e) == (q, f) {
                return Err(Error::Parse(format!("edge ({p},{e}) glued to itself")));
            }
            if partner[p][e].is_some() || partner[q][f].is_some() {
                return Err(Error::Parse(format!("edge in gluing ({p},{e})-({q},{f}) glued twice")));
            }
            partner[p][e] = Some((q, f));
            partner[q][f] = Some((p, e));
            let mismatch = (edge_vec(p, e) + edge_vec(q, f)).sup();
            if mismatch > TOL {
                return Err(Error::GluingMismatch { p, e, q, f, mismatch });
            }
        }
        for (p, row) in partner.iter().enumerate() {
            if let Some(e) = row.iter().position(|x| x.is_none()) {
                return Err(Error::Parse(format!("edge ({p},{e}) is not glued")));
            }
        }

        // connectivity of polygons
        let mut dsu = Dsu::new(polygons.len());
        for &((p, _), (q, _)) in &gluings {
            dsu.union(p, q);
        }
        if (0..polygons.len()).any(|p| dsu.find(p) != dsu.find(0)) {
            return Err(Error::Disconnected);
        }

        // vertex classes
        let offsets: Vec<usize> = polygons
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.len();
                Some(o)
            })
            .collect();
        let total: usize = polygons.iter().map(|p| p.len()).sum();
        let mut vdsu = Dsu::new(total);
        for &((p, e), (q, f)) in &gluings {
            let np = polygons[p].len();
            let nq = polygons[q].len();
            vdsu.union(offsets[p] + e, offsets[q] + (f + 1) % nq);
            vdsu.union(offsets[p] + (e + 1) % np, offsets[q] + f);
        }
        let mut class_id = vec![usize::MAX; total];
        let mut vertex_class: Vec<Vec<usize>> = Vec::with_capacity(polygons.len());
        let mut cone_points: Vec<ConePoint> = Vec::new();
        for (p, poly) in polygons.iter().enumerate() {
            let mut row = Vec::with_capacity(poly.len());
            for k in 0..poly.len() {
                let r = vdsu.find(offsets[p] + k);
                if class_id[r] == usize::MAX {
                    class_id[r] = cone_points.len();
                    cone_points.push(ConePoint { vertex: cone_points.len(), location: (p, k), angle: 0.0 });
                }
                let c = class_id[r];
                let n = poly.len();
                cone_points[c].angle += interior_angle(poly[(k + n - 1) % n], poly[k], poly[(k + 1) % n]);
                row.push(c);
            }
            vertex_class.push(row);
        }
        let mut excess_turns = 0i64;
        for cp in &cone_points {
            let k = cp.angle / (2.0 * PI);
            if k.round() < 1.0 || (k - k.round()).abs() > 1e-9 * k.max(1.0) {
                return Err(Error::BadConeAngle { vertex: cp.vertex, angle: cp.angle });
            }
            excess_turns += k.round() as i64 - 1;
        }
        // Gauss–Bonnet: Σ (k_i - 1) = 2g - 2, cross-checked against V - E + F.
        let chi = cone_points.len() as i64 - gluings.len() as i64 + polygons.len() as i64;
        if excess_turns != -chi || (2 - chi) % 2 != 0 || chi > 2 {
            return Err(Error::BadConeAngle { vertex: 0, angle: f64::NAN });
        }
        let genus = ((2 - chi) / 2) as usize;

        // mesh
        let mut vecs = Vec::new();
        let mut origin = Vec::new();
        let mut poly_tris = Vec::with_capacity(polygons.len());
        // (polygon, a, b) -> half-edge id running from vertex a to vertex b
        let mut dir_map = std::collections::HashMap::new();
        for (p, poly) in polygons.iter().enumerate() {
            let mut tris = Vec::new();
            for [a, b, c] in triangulate_polygon(poly)? {
                let t = vecs.len() / 3;
                for (u, w) in [(a, b), (b, c), (c, a)] {
                    dir_map.insert((p, u, w), vecs.len());
                    vecs.push(poly[w] - poly[u]);
                    origin.push(vertex_class[p][u]);
                }
                tris.push((t, a));
            }
            poly_tris.push(tris);
        }
        let mut twin = vec![usize::MAX; vecs.len()];
        for (&(p, u, w), &h) in &dir_map {
            if let Some(&g) = dir_map.get(&(p, w, u)) {
                twin[h] = g;
            }
        }
        for &((p, e), (q, f)) in &gluings {
            let np = polygons[p].len();
            let nq = polygons[q].len();
            let h = dir_map[&(p, e, (e + 1) % np)];
            let g = dir_map[&(q, f, (f + 1) % nq)];
            twin[h] = g;
            twin[g] = h;
            // use exactly opposite vectors so the mesh is consistent
            vecs[g] = -vecs[h];
        }
        let area: f64 = polygons.iter().map(|p| polygon_area(p)).sum();
        let mesh = Mesh::from_parts(vecs, twin, origin, cone_points.len());
        mesh.check(1e-9).map_err(Error::Parse)?;
        Ok(FlatSurface { polygons, gluings, vertex_class, cone_points, genus, area, mesh, poly_tris })
    }

    pub fn description(&self) -> SurfaceDescription {
        SurfaceDescription {
            polygons: self.polygons.iter().map(|p| p.iter().map(|v| [v.x, v.y]).collect()).collect(),
            gluings: self.gluings.iter().map(|&((p, e), (q, f))| [[p, e], [q, f]]).collect(),
            normalize_area: false,
        }
    }

    pub fn polygons(&self) -> &[Vec<Vec2>] {
        &self.polygons
    }

    pub fn gluings(&self) -> &[((usize, usize), (usize, usize))] {
        &self.gluings
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn cone_points(&self) -> &[ConePoint] {
        &self.cone_points
    }

    /// Cone points of angle greater than 2π.
    pub fn singularities(&self) -> impl Iterator<Item = &ConePoint> {
        self.cone_points.iter().filter(|c| !c.is_marked())
    }

    pub fn n_vertices(&self) -> usize {
        self.cone_points.len()
    }

    pub fn vertex_of(&self, polygon: usize, vertex: usize) -> usize {
        self.vertex_class[polygon][vertex]
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Euler characteristic of the closed surface.
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64
    }

    /// Applies a linear map of positive determinant to every chart.
    pub fn transform(&self, m: &Mat2) -> FlatSurface {
        let det = m.det();
        assert!(det > 0.0, "orientation-reversing map");
        let mut s = self.clone();
        for p in &mut s.polygons {
            for v in p.iter_mut() {
                *v = m.apply(*v);
            }
        }
        s.mesh = self.mesh.transformed(m);
        s.area = self.area * det;
        s
    }

    /// Teichmüller deformation: `(x, y) -> (e^{t/2} x, e^{-t/2} y)`.
    pub fn apply_flow(&self, t: f64) -> FlatSurface {
        self.transform(&Mat2::flow(t))
    }

    /// Rotation taking direction `dir` to the vertical `(0, 1)`.
    pub fn rotate_to_vertical(&self, dir: Vec2) -> Result<FlatSurface> {
        if dir.norm() == 0.0 || !dir.x.is_finite() || !dir.y.is_finite() {
            return Err(Error::ZeroDirection);
        }
        Ok(self.transform(&Mat2::rotate_to_vertical(dir)))
    }

    /// Rescaled copy of area one.
    pub fn normalized(&self) -> FlatSurface {
        let s = 1.0 / self.area.sqrt();
        self.transform(&Mat2::diag(s, s))
    }

    /// Converts a point given in polygon coordinates to a mesh point.
    pub fn point(&self, polygon: usize, xy: Vec2) -> Result<SurfacePoint> {
        let poly = self
            .polygons
            .get(polygon)
            .ok_or_else(|| Error::OutOfRange(format!("polygon {polygon}")))?;
        for &(t, apex) in &self.poly_tris[polygon] {
            let local = xy - poly[apex];
            if self.mesh.contains(t, local, 1e-12) {
                return Ok(SurfacePoint { tri: t, pos: local });
            }
        }
        Err(Error::OutOfRange(format!("point ({}, {}) outside polygon {polygon}", xy.x, xy.y)))
    }

    /// Inverse of [`FlatSurface::point`]: polygon coordinates of a mesh point.
    /// Only meaningful on the mesh built from the polygons.
    pub fn polygon_coords(&self, p: SurfacePoint) -> Option<(usize, Vec2)> {
        for (pi, tris) in self.poly_tris.iter().enumerate() {
            for &(t, apex) in tris {
                if t == p.tri {
                    return Some((pi, self.polygons[pi][apex] + p.pos));
                }
            }
        }
        None
    }
}

/// The square torus `C / Z[i]` with its single marked point.
pub fn square_torus() -> FlatSurface {
    let d = SurfaceDescription {
        polygons: vec![vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.]]],
        gluings: vec![[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
        normalize_area: false,
    };
    FlatSurface::from_description(&d).expect("square torus is valid")
}

/// Torus `C / (Z u + Z w)` for a positively oriented basis `u, w`.
pub fn lattice_torus(u: Vec2, w: Vec2) -> Result<FlatSurface> {
    FlatSurface::build(vec![vec![Vec2::ZERO, u, u + w, w]], vec![((0, 0), (0, 2)), ((0, 1), (0, 3))])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_torus_invariants() {
        let t = square_torus();
        assert_eq!(t.genus(), 1);
        assert_eq!(t.cone_points().len(), 1);
        assert!((t.cone_points()[0].angle - 2.0 * PI).abs() < 1e-12);
        assert!(t.cone_points()[0].is_marked());
        assert!((t.area() - 1.0).abs() < 1e-15);
        assert_eq!(t.singularities().count(), 0);
    }

    #[test]
    fn reversed_gluing_is_rejected() {
        // glue bottom to right: vectors (1,0) and (0,1) are not opposite
        let d = SurfaceDescription {
            polygons: vec![vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.]]],
            gluings: vec![[[0, 0], [0, 1]], [[0, 2], [0, 3]]],
            normalize_area: false,
        };
        assert!(matches!(FlatSurface::from_description(&d), Err(Error::GluingMismatch { .. })));
    }

    #[test]
    fn disconnected_is_rejected() {
        let sq = vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.]];
        let d = SurfaceDescription {
            polygons: vec![sq.clone(), sq],
            gluings: vec![[[0, 0], [0, 2]], [[0, 1], [0, 3]], [[1, 0], [1, 2]], [[1, 1], [1, 3]]],
            normalize_area: false,
        };
        assert_eq!(FlatSurface::from_description(&d).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn flow_preserves_area_and_composes() {
        let t = lattice_torus(Vec2::new(1.0, 0.2), Vec2::new(0.3, 1.1)).unwrap();
        let a = t.apply_flow(7.3);
        assert!((a.area() - t.area()).abs() < 1e-12);
        let ab = t.apply_flow(1.25).apply_flow(-0.5);
        let c = t.apply_flow(0.75);
        for (p, q) in ab.polygons()[0].iter().zip(&c.polygons()[0]) {
            assert!(p.approx_eq(*q, 1e-9));
        }
        let id = t.apply_flow(0.0);
        assert_eq!(id.polygons(), t.polygons());
    }

    #[test]
    fn rotation_round_trip() {
        let t = lattice_torus(Vec2::new(1.0, 0.2), Vec2::new(0.3, 1.1)).unwrap();
        let dir = Vec2::new(0.4, 0.9);
        let r = t.rotate_to_vertical(dir).unwrap();
        let back = r.transform(&Mat2::rotate_to_vertical(dir).inverse());
        for (p, q) in back.polygons()[0].iter().zip(&t.polygons()[0]) {
            assert!(p.approx_eq(*q, 1e-12));
        }
        assert_eq!(t.rotate_to_vertical(Vec2::ZERO).unwrap_err(), Error::ZeroDirection);
        let v = square_torus().rotate_to_vertical(Vec2::new(0., 1.)).unwrap();
        assert_eq!(v.polygons(), square_torus().polygons());
    }

    #[test]
    fn normalization() {
        let t = lattice_torus(Vec2::new(2.0, 0.0), Vec2::new(0.0, 3.0)).unwrap().normalized();
        assert!((t.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_point_round_trip() {
        let t = square_torus();
        let p = t.point(0, Vec2::new(0.7, 0.2)).unwrap();
        let (pi, xy) = t.polygon_coords(p).unwrap();
        assert_eq!(pi, 0);
        assert!(xy.approx_eq(Vec2::new(0.7, 0.2), 1e-15));
    }
}
