//! Combinatorics of a family of saddle connections drawn on a triangulation:
//! pairwise disjointness and the Euler characteristics of the pieces left
//! after cutting.

use super::enumerate::{crossing_params, end_corner, SaddleConnection};
use crate::kernel::mesh::{tri_of, Mesh};
use std::collections::HashMap;

/// A boundary point of a triangle: a corner (with the angle of the chord
/// measured from the outgoing edge) or a point on a local edge.
#[derive(Debug, Clone, Copy, PartialEq)]
enum BPos {
    Corner { k: usize, angle: f64 },
    Edge { j: usize, u: f64 },
}

impl BPos {
    /// Key for the counterclockwise order along the triangle boundary.
    /// Chords at the same corner are ordered by decreasing angle.
    fn key(&self) -> (f64, f64) {
        match *self {
            BPos::Corner { k, angle } => (k as f64, -angle),
            BPos::Edge { j, u } => (j as f64 + u, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Chord {
    conn: usize,
    a: BPos,
    b: BPos,
}

/// The family drawn on the mesh.
pub struct Drawing<'m> {
    mesh: &'m Mesh,
    chords: HashMap<usize, Vec<Chord>>,
    /// Undirected edges (smaller half-edge id) that belong to the family.
    edges: HashMap<usize, usize>,
    /// Crossing parameters on each undirected edge, along the smaller id.
    params: HashMap<usize, Vec<f64>>,
    on_family: Vec<bool>,
}

fn corner_angle_to(mesh: &Mesh, t: usize, k: usize, dir: crate::geom::Vec2) -> f64 {
    let out = mesh.vec(3 * t + k);
    out.cross(dir).atan2(out.dot(dir))
}

fn rep(mesh: &Mesh, h: usize) -> (usize, bool) {
    let g = mesh.twin(h);
    if h < g {
        (h, false)
    } else {
        (g, true)
    }
}

impl<'m> Drawing<'m> {
    pub fn new(mesh: &'m Mesh, family: &[&SaddleConnection]) -> Self {
        let mut d = Drawing {
            mesh,
            chords: HashMap::new(),
            edges: HashMap::new(),
            params: HashMap::new(),
            on_family: vec![false; mesh.n_vertices()],
        };
        for (ci, c) in family.iter().enumerate() {
            d.on_family[c.start] = true;
            d.on_family[c.end] = true;
            if let Some(h) = c.edge {
                let (r, _) = rep(mesh, h);
                *d.edges.entry(r).or_insert(0) += 1;
                continue;
            }
            let us = crossing_params(mesh, c);
            let (t0, k0) = c.corner;
            let mut entry = BPos::Corner { k: k0, angle: corner_angle_to(mesh, t0, k0, c.holonomy) };
            let mut tri = t0;
            for (i, &h) in c.path.iter().enumerate() {
                let exit = BPos::Edge { j: h % 3, u: us[i] };
                d.chords.entry(tri).or_default().push(Chord { conn: ci, a: entry, b: exit });
                let (r, flipped) = rep(mesh, h);
                d.params.entry(r).or_default().push(if flipped { 1.0 - us[i] } else { us[i] });
                let g = mesh.twin(h);
                tri = tri_of(g);
                entry = BPos::Edge { j: g % 3, u: 1.0 - us[i] };
            }
            let (te, ke) = end_corner(mesh, c);
            debug_assert_eq!(te, tri);
            let exit = BPos::Corner { k: ke, angle: corner_angle_to(mesh, te, ke, -c.holonomy) };
            d.chords.entry(tri).or_default().push(Chord { conn: ci, a: entry, b: exit });
        }
        for v in d.params.values_mut() {
            v.sort_by(f64::total_cmp);
        }
        d
    }

    /// True when no two members meet away from their endpoints.
    pub fn is_disjoint(&self) -> bool {
        const EPS: f64 = 1e-12;
        if self.edges.values().any(|&n| n > 1) {
            return false;
        }
        for (&r, ps) in &self.params {
            if self.edges.contains_key(&r) {
                return false;
            }
            if ps.windows(2).any(|w| w[1] - w[0] <= EPS) {
                return false;
            }
        }
        for chords in self.chords.values() {
            for (i, x) in chords.iter().enumerate() {
                for y in &chords[i + 1..] {
                    if x.conn == y.conn {
                        continue;
                    }
                    if interleave(x, y) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Euler characteristic of every connected component of the complement.
    pub fn component_euler_characteristics(&self) -> Vec<i64> {
        let mesh = self.mesh;
        let nt = mesh.n_triangles();
        // faces: per triangle, classes of boundary arcs
        let mut face_base = vec![0usize; nt];
        let mut arc_face: Vec<Vec<usize>> = vec![Vec::new(); nt];
        let mut ends: Vec<Vec<(f64, f64)>> = vec![Vec::new(); nt];
        let mut n_faces = 0;
        for t in 0..nt {
            face_base[t] = n_faces;
            let chords = self.chords.get(&t).map(|v| v.as_slice()).unwrap_or(&[]);
            if chords.is_empty() {
                arc_face[t] = vec![0];
                n_faces += 1;
                continue;
            }
            let mut pts: Vec<((f64, f64), usize, bool)> = Vec::new();
            for (i, c) in chords.iter().enumerate() {
                pts.push((c.a.key(), i, false));
                pts.push((c.b.key(), i, true));
            }
            pts.sort_by(|x, y| x.0 .0.total_cmp(&y.0 .0).then(x.0 .1.total_cmp(&y.0 .1)));
            let m = pts.len();
            let mut idx = vec![[0usize; 2]; chords.len()];
            for (p, &(_, ci, is_b)) in pts.iter().enumerate() {
                idx[ci][is_b as usize] = p;
            }
            let mut dsu = Dsu::new(m);
            for &[ia, ib] in &idx {
                dsu.union((ia + m - 1) % m, ib);
                dsu.union((ib + m - 1) % m, ia);
            }
            let mut local = HashMap::new();
            let mut classes = vec![0; m];
            for (i, cls) in classes.iter_mut().enumerate() {
                let r = dsu.find(i);
                let n = local.len();
                *cls = *local.entry(r).or_insert(n);
            }
            n_faces += local.len();
            arc_face[t] = classes;
            ends[t] = pts.iter().map(|p| p.0).collect();
        }
        // face containing a boundary position of triangle t
        let face_at = |t: usize, pos: f64| -> usize {
            let e = &ends[t];
            if e.is_empty() {
                return face_base[t];
            }
            // arc i runs from endpoint i to endpoint i+1; positions before the
            // first endpoint lie on the wrapping arc
            let i = e.iter().rposition(|k| k.0 < pos).unwrap_or(e.len() - 1);
            face_base[t] + arc_face[t][i]
        };
        let mut dsu = Dsu::new(n_faces);
        let mut edge_cells: Vec<usize> = Vec::new();
        for r in mesh.edges() {
            if self.edges.contains_key(&r) {
                continue;
            }
            let g = mesh.twin(r);
            let empty = Vec::new();
            let ps = self.params.get(&r).unwrap_or(&empty);
            let mut cuts = vec![0.0];
            cuts.extend(ps.iter().copied());
            cuts.push(1.0);
            for w in cuts.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let f1 = face_at(tri_of(r), (r % 3) as f64 + mid);
                let f2 = face_at(tri_of(g), (g % 3) as f64 + 1.0 - mid);
                dsu.union(f1, f2);
                edge_cells.push(f1);
            }
        }
        let mut vertex_cells: Vec<usize> = Vec::new();
        let mut seen = vec![false; mesh.n_vertices()];
        for h in 0..mesh.n_halfedges() {
            let v = mesh.origin(h);
            if self.on_family[v] || seen[v] {
                continue;
            }
            seen[v] = true;
            vertex_cells.push(face_at(tri_of(h), (h % 3) as f64));
        }
        let mut comp: HashMap<usize, i64> = HashMap::new();
        for f in 0..n_faces {
            *comp.entry(dsu.find(f)).or_insert(0) += 1;
        }
        for f in edge_cells {
            *comp.entry(dsu.find(f)).or_insert(0) -= 1;
        }
        for f in vertex_cells {
            *comp.entry(dsu.find(f)).or_insert(0) += 1;
        }
        let mut v: Vec<(usize, i64)> = comp.into_iter().collect();
        v.sort();
        v.into_iter().map(|x| x.1).collect()
    }

    /// Complement has at least two components that are not disks.
    pub fn is_separating_system(&self) -> bool {
        self.component_euler_characteristics().iter().filter(|&&x| x <= 0).count() >= 2
    }

    /// Some complementary component is a disk.
    pub fn bounds_disk(&self) -> bool {
        self.component_euler_characteristics().contains(&1)
    }
}

fn interleave(x: &Chord, y: &Chord) -> bool {
    let (a, b) = (x.a.key(), x.b.key());
    let (c, d) = (y.a.key(), y.b.key());
    let same = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).abs() <= 1e-12 && (p.1 - q.1).abs() <= 1e-12;
    let shared_edge_point = |p: &BPos, q: &BPos| {
        matches!((p, q), (BPos::Edge { j: j1, u: u1 }, BPos::Edge { j: j2, u: u2 }) if j1 == j2 && (u1 - u2).abs() <= 1e-12)
    };
    if shared_edge_point(&x.a, &y.a) || shared_edge_point(&x.a, &y.b) || shared_edge_point(&x.b, &y.a) || shared_edge_point(&x.b, &y.b) {
        return true;
    }
    if same(a, c) || same(a, d) || same(b, c) || same(b, d) {
        // identical corner chords overlap
        return true;
    }
    let lt = |p: (f64, f64), q: (f64, f64)| p.0 < q.0 || (p.0 == q.0 && p.1 < q.1);
    let (lo, hi) = if lt(a, b) { (a, b) } else { (b, a) };
    let inside = |p: (f64, f64)| lt(lo, p) && lt(p, hi);
    inside(c) != inside(d)
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
