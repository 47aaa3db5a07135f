//! Cell decompositions, quad-graph doubles, strips, and the combinatorial
//! rhombic-embeddability test.
//!
//! A *quad-graph* here is a bipartite cell complex all of whose 2-cells are
//! quadrilaterals with color-alternating corners, oriented consistently
//! (counterclockwise when positions are present). The *double* of a cell
//! decomposition `G` has the vertices of `G` (black) and one white vertex per
//! face of `G` (plus one for the unbounded face of a finite patch); every
//! primal/dual edge pair spans one quadrilateral.
//!
//! A *strip* is a maximal chain of faces glued along opposite sides. A finite
//! quad-graph admits a rhombic embedding exactly when no strip crosses itself
//! or is periodic and two distinct strips cross at most once; the check below
//! reports the offending strips as a certificate when this fails.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::C64;

/// Vertex color of the bipartition. Black vertices form the primal graph `G`,
/// white vertices the dual `G*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

/// A finite cell decomposition patch: faces are counterclockwise vertex
/// cycles; the unbounded face is implicit. Positions are advisory — the
/// combinatorics is authoritative.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDecomposition {
    n_vertices: usize,
    faces: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    positions: Option<Vec<C64>>,
}

fn norm_edge(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl CellDecomposition {
    /// Validating constructor for simple planar patches: every edge on at
    /// most two faces, consistent orientation, and the Euler count of a disk
    /// patch (`V - E + F = 1`, the unbounded face being implicit) or of a
    /// closed sphere (`V - E + F = 2`).
    pub fn new(
        n_vertices: usize,
        faces: Vec<Vec<usize>>,
        positions: Option<Vec<C64>>,
    ) -> Result<Self> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &faces {
            for i in 0..f.len() {
                let (u, v) = (f[i], f[(i + 1) % f.len()]);
                *directed.entry((u, v)).or_insert(0) += 1;
                if directed[&(u, v)] > 1 {
                    return Err(Error::InconsistentOrientation(u, v));
                }
                let count = seen.entry(norm_edge(u, v)).or_insert(0);
                *count += 1;
                if *count > 2 {
                    return Err(Error::EdgeTooManyFaces(u.min(v), u.max(v)));
                }
            }
        }
        let cd = Self::raw(n_vertices, faces, positions)?;
        let euler = cd.n_vertices as i64 - cd.edges.len() as i64 + cd.faces.len() as i64;
        if euler != 1 && euler != 2 {
            return Err(Error::InvalidDocument(format!(
                "not a planar patch: V - E + F = {euler}, expected 1 (disk) or 2 (sphere)"
            )));
        }
        Ok(cd)
    }

    /// Multigraph-tolerant constructor used for extracted duals, where
    /// parallel edges and bigon faces occur legitimately. Edge multiplicity
    /// between a vertex pair is the larger directed side count.
    pub fn raw(
        n_vertices: usize,
        faces: Vec<Vec<usize>>,
        positions: Option<Vec<C64>>,
    ) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::EmptyDecomposition);
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &faces {
            for i in 0..f.len() {
                let (u, v) = (f[i], f[(i + 1) % f.len()]);
                if u >= n_vertices || v >= n_vertices {
                    return Err(Error::VertexOutOfRange(u.max(v)));
                }
                *directed.entry((u, v)).or_insert(0) += 1;
            }
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (&(u, v), &k) in &directed {
            if u > v && directed.contains_key(&(v, u)) {
                continue; // counted from the other direction
            }
            let back = directed.get(&(v, u)).copied().unwrap_or(0);
            for _ in 0..k.max(back) {
                edges.push(norm_edge(u, v));
            }
        }
        edges.sort_unstable();
        Ok(Self {
            n_vertices,
            faces,
            edges,
            positions,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n_vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn positions(&self) -> Option<&[C64]> {
        self.positions.as_deref()
    }

    /// Canonical form for comparisons up to face rotation: each cycle starts
    /// at its smallest vertex, faces sorted lexicographically.
    pub fn canonical_faces(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .faces
            .iter()
            .map(|f| {
                let k = f
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, v)| **v)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                let mut g = f.clone();
                g.rotate_left(k);
                g
            })
            .collect();
        out.sort();
        out
    }
}

/// One quadrilateral face of a quad-graph, corners in counterclockwise order
/// with `x0`, `x1` black and `y0`, `y1` white.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadFace {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl QuadFace {
    pub fn corners(&self) -> [usize; 4] {
        [self.x0, self.y0, self.x1, self.y1]
    }

    /// Side `i` joins corner `i` and corner `i+1 (mod 4)`. Sides 0 and 2 are
    /// opposite, as are 1 and 3.
    pub fn side(&self, i: u8) -> (usize, usize) {
        let c = self.corners();
        (c[i as usize], c[(i as usize + 1) % 4])
    }
}

/// Bipartite quad-graph with oriented quadrilateral faces.
#[derive(Debug, Clone)]
pub struct QuadGraph {
    colors: Vec<Color>,
    faces: Vec<QuadFace>,
    positions: Option<Vec<Option<C64>>>,
    outer_white: Option<usize>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    /// Per edge: up to two (face, side) incidences.
    edge_faces: Vec<[Option<(usize, u8)>; 2]>,
    /// Per vertex: incident face list.
    vertex_faces: Vec<Vec<usize>>,
}

impl QuadGraph {
    pub fn new(
        colors: Vec<Color>,
        face_tuples: Vec<[usize; 4]>,
        positions: Option<Vec<Option<C64>>>,
        outer_white: Option<usize>,
    ) -> Result<Self> {
        let n = colors.len();
        if face_tuples.is_empty() {
            return Err(Error::EmptyDecomposition);
        }
        if let Some(p) = &positions {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.len(),
                });
            }
        }
        let mut faces = Vec::with_capacity(face_tuples.len());
        for (fi, t) in face_tuples.iter().enumerate() {
            for &v in t {
                if v >= n {
                    return Err(Error::VertexOutOfRange(v));
                }
            }
            let ok = colors[t[0]] == Color::Black
                && colors[t[1]] == Color::White
                && colors[t[2]] == Color::Black
                && colors[t[3]] == Color::White;
            if !ok {
                return Err(Error::NotAlternating { face: fi });
            }
            faces.push(QuadFace {
                x0: t[0],
                y0: t[1],
                x1: t[2],
                y1: t[3],
            });
        }

        let mut edge_index = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_faces: Vec<[Option<(usize, u8)>; 2]> = Vec::new();
        let mut directed: HashMap<(usize, usize), ()> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for s in 0..4u8 {
                let (u, v) = f.side(s);
                if directed.insert((u, v), ()).is_some() {
                    return Err(Error::InconsistentOrientation(u, v));
                }
                let key = norm_edge(u, v);
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_faces.push([None, None]);
                    edges.len() - 1
                });
                let slot = &mut edge_faces[id];
                if slot[0].is_none() {
                    slot[0] = Some((fi, s));
                } else if slot[1].is_none() {
                    slot[1] = Some((fi, s));
                } else {
                    return Err(Error::EdgeTooManyFaces(key.0, key.1));
                }
            }
        }

        let mut vertex_faces = vec![Vec::new(); n];
        for (fi, f) in faces.iter().enumerate() {
            for v in f.corners() {
                vertex_faces[v].push(fi);
            }
        }

        Ok(Self {
            colors,
            faces,
            positions,
            outer_white,
            edges,
            edge_index,
            edge_faces,
            vertex_faces,
        })
    }

    /// Build from face tuples alone, inferring the bipartition by breadth
    /// first 2-coloring (the first vertex of the first face is black). Face
    /// tuples are rotated by one position when they start at a white vertex,
    /// which preserves orientation. Fails on odd cycles.
    pub fn from_faces(
        face_tuples: Vec<[usize; 4]>,
        n_vertices: usize,
        positions: Option<Vec<Option<C64>>>,
    ) -> Result<Self> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_vertices];
        for t in &face_tuples {
            for i in 0..4 {
                let (u, v) = (t[i], t[(i + 1) % 4]);
                if u >= n_vertices || v >= n_vertices {
                    return Err(Error::VertexOutOfRange(u.max(v)));
                }
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut colors = vec![None; n_vertices];
        for start in 0..n_vertices {
            if colors[start].is_some() || adj[start].is_empty() {
                continue;
            }
            colors[start] = Some(Color::Black);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let cu = colors[u].unwrap();
                for &v in &adj[u] {
                    match colors[v] {
                        None => {
                            colors[v] = Some(cu.flip());
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return Err(Error::NotBipartite(v)),
                        _ => {}
                    }
                }
            }
        }
        let colors: Vec<Color> = colors
            .into_iter()
            .map(|c| c.unwrap_or(Color::Black))
            .collect();
        let rotated = face_tuples
            .into_iter()
            .map(|t| {
                if colors[t[0]] == Color::White {
                    [t[1], t[2], t[3], t[0]]
                } else {
                    t
                }
            })
            .collect();
        Self::new(colors, rotated, positions, None)
    }

    pub fn vertex_count(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn is_black(&self, v: usize) -> bool {
        self.colors[v] == Color::Black
    }

    pub fn faces(&self) -> &[QuadFace] {
        &self.faces
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&norm_edge(u, v)).copied()
    }

    pub fn edge_faces(&self, edge: usize) -> &[Option<(usize, u8)>; 2] {
        &self.edge_faces[edge]
    }

    pub fn faces_at(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn outer_white(&self) -> Option<usize> {
        self.outer_white
    }

    pub fn positions(&self) -> Option<&[Option<C64>]> {
        self.positions.as_deref()
    }

    pub fn position(&self, v: usize) -> Result<C64> {
        self.positions
            .as_ref()
            .and_then(|p| p[v])
            .ok_or(Error::MissingPosition(v))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .vertex_faces[v]
            .iter()
            .flat_map(|&fi| {
                let f = &self.faces[fi];
                let c = f.corners();
                let k = c.iter().position(|&u| u == v).unwrap();
                [c[(k + 1) % 4], c[(k + 3) % 4]]
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Counterclockwise rotation around `v`: for each incident face, the pair
    /// (incoming neighbor, outgoing neighbor) so that the face lies between
    /// them in positive order.
    fn rotation(&self, v: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &fi in &self.vertex_faces[v] {
            let f = &self.faces[fi];
            let c = f.corners();
            let k = c.iter().position(|&u| u == v).unwrap();
            // At corner k the face spans counterclockwise from neighbor k+1
            // to neighbor k-1 when k is even (black corners x0, x1), and the
            // same rule holds at white corners; see the face orientation
            // convention. Map: next(c[k+1]) = c[k+3].
            out.push((c[(k + 1) % 4], c[(k + 3) % 4], fi));
        }
        out
    }

    /// The cyclic (or boundary-terminated) flower of faces around a vertex.
    pub fn flower(&self, v: usize) -> Result<Flower> {
        let rot = self.rotation(v);
        if rot.is_empty() {
            return Ok(Flower {
                entries: Vec::new(),
                closed: false,
            });
        }
        let mut next: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for &(from, to, fi) in &rot {
            if next.insert(from, (to, fi)).is_some() {
                return Err(Error::InconsistentOrientation(v, from));
            }
        }
        // A boundary chain starts at a neighbor that is nobody's successor.
        let targets: Vec<usize> = next.values().map(|&(t, _)| t).collect();
        let start = next
            .keys()
            .copied()
            .find(|k| !targets.contains(k))
            .unwrap_or_else(|| *next.keys().next().unwrap());
        let mut entries = Vec::new();
        let mut cur = start;
        let mut closed = false;
        for _ in 0..next.len() {
            let Some(&(to, fi)) = next.get(&cur) else {
                break;
            };
            entries.push(FlowerPetal {
                from: cur,
                to,
                face: fi,
            });
            cur = to;
            if cur == start {
                closed = true;
                break;
            }
        }
        if entries.len() != next.len() {
            // Disconnected rotation: pinched (non-manifold) vertex.
            return Err(Error::InconsistentOrientation(v, cur));
        }
        Ok(Flower { entries, closed })
    }

    /// A vertex is interior when its flower closes up.
    pub fn is_interior(&self, v: usize) -> bool {
        self.flower(v).map(|f| f.closed).unwrap_or(false)
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .filter(|&v| self.is_interior(v))
            .collect()
    }

    /// Black diagonal (primal edge) of a face.
    pub fn primal_diagonal(&self, face: usize) -> (usize, usize) {
        let f = &self.faces[face];
        (f.x0, f.x1)
    }

    /// White diagonal (dual edge) of a face.
    pub fn dual_diagonal(&self, face: usize) -> (usize, usize) {
        let f = &self.faces[face];
        (f.y0, f.y1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowerPetal {
    pub from: usize,
    pub to: usize,
    pub face: usize,
}

#[derive(Debug, Clone)]
pub struct Flower {
    pub entries: Vec<FlowerPetal>,
    pub closed: bool,
}

/// Construct the double of a cell decomposition: black vertices are the
/// vertices of `g`, white vertices its faces plus one for the unbounded face
/// when `g` has boundary edges. Every edge of `g` spans one quadrilateral
/// `(x0, y0, x1, y1)` with `y0` the face right of `x0 -> x1` and `y1` the
/// face to its left, so that the primal and dual diagonals cross positively.
pub fn build_double(g: &CellDecomposition) -> Result<QuadGraph> {
    double_impl(g, true)
}

/// Like [`build_double`] but keeping only quadrilaterals over interior edges
/// of `g` (both flanking faces present). This is the clean rhombic patch used
/// by the tiling generators.
pub fn interior_double(g: &CellDecomposition) -> Result<QuadGraph> {
    double_impl(g, false)
}

fn double_impl(g: &CellDecomposition, include_outer: bool) -> Result<QuadGraph> {
    let nb = g.vertex_count();
    let nf = g.faces().len();
    // Directed side -> face id.
    let mut side_face: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in g.faces().iter().enumerate() {
        for i in 0..f.len() {
            let key = (f[i], f[(i + 1) % f.len()]);
            if side_face.insert(key, fi).is_some() {
                return Err(Error::InconsistentOrientation(key.0, key.1));
            }
        }
    }
    let has_boundary = g
        .edges()
        .iter()
        .any(|&(u, v)| !(side_face.contains_key(&(u, v)) && side_face.contains_key(&(v, u))));
    let outer = if has_boundary { Some(nb + nf) } else { None };
    let n_vertices = nb + nf + usize::from(has_boundary);

    let mut colors = vec![Color::Black; nb];
    colors.extend(std::iter::repeat(Color::White).take(n_vertices - nb));

    let mut positions: Option<Vec<Option<C64>>> = g.positions().map(|p| {
        let mut out: Vec<Option<C64>> = p.iter().map(|&z| Some(z)).collect();
        for f in g.faces() {
            let bary = f.iter().map(|&v| p[v]).sum::<C64>() / f.len() as f64;
            out.push(Some(bary));
        }
        if has_boundary {
            out.push(None);
        }
        out
    });
    if positions.is_none() {
        positions = None;
    }

    let mut quads = Vec::new();
    for &(u, v) in g.edges() {
        let left = side_face.get(&(u, v)).copied();
        let right = side_face.get(&(v, u)).copied();
        if left.is_none() && right.is_none() {
            return Err(Error::InvalidDocument(format!(
                "edge ({u}, {v}) has no incident face"
            )));
        }
        let white = |f: Option<usize>| f.map(|fi| nb + fi).or(outer);
        let (y0, y1) = (white(right), white(left));
        match (y0, y1) {
            (Some(y0), Some(y1)) => {
                if include_outer || (right.is_some() && left.is_some()) {
                    quads.push([u, y0, v, y1]);
                }
            }
            _ => unreachable!("outer vertex exists whenever a flank is missing"),
        }
    }
    if !include_outer {
        // Drop vertices no interior quad references (the outer vertex and
        // any cells stranded on the boundary).
        let mut used = vec![false; n_vertices];
        for q in &quads {
            for &v in q {
                used[v] = true;
            }
        }
        let mut remap = vec![usize::MAX; n_vertices];
        let mut kept = 0usize;
        for v in 0..n_vertices {
            if used[v] {
                remap[v] = kept;
                kept += 1;
            }
        }
        let quads: Vec<[usize; 4]> = quads
            .iter()
            .map(|q| [remap[q[0]], remap[q[1]], remap[q[2]], remap[q[3]]])
            .collect();
        let colors: Vec<Color> = (0..n_vertices)
            .filter(|&v| used[v])
            .map(|v| colors[v])
            .collect();
        let positions = positions.map(|p| {
            (0..n_vertices)
                .filter(|&v| used[v])
                .map(|v| p[v])
                .collect()
        });
        return QuadGraph::new(colors, quads, positions, None);
    }
    QuadGraph::new(colors, quads, positions, outer)
}

/// Recover the primal and dual decompositions from a quad-graph: edges of `G`
/// are the black diagonals, faces of `G` the flowers around interior white
/// vertices (the flower of the marked outer vertex, when present, is the
/// unbounded face and is skipped). Swapping colors swaps the two outputs.
pub fn extract_primal_dual(d: &QuadGraph) -> Result<(CellDecomposition, CellDecomposition)> {
    let (primal, _) = extract_one(d, Color::Black)?;
    let (dual, _) = extract_one(d, Color::White)?;
    Ok((primal, dual))
}

fn extract_one(d: &QuadGraph, color: Color) -> Result<(CellDecomposition, Vec<usize>)> {
    // Re-index vertices of the chosen color.
    let ids: Vec<usize> = (0..d.vertex_count())
        .filter(|&v| d.color(v) == color)
        .collect();
    let back: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut faces = Vec::new();
    for v in 0..d.vertex_count() {
        if d.color(v) == color || Some(v) == d.outer_white() {
            continue;
        }
        let flower = d.flower(v)?;
        if !flower.closed {
            continue; // boundary flower: unbounded region, not a face
        }
        let cycle: Vec<usize> = flower.entries.iter().map(|p| back[&p.from]).collect();
        faces.push(cycle);
    }
    let positions = d.positions().map(|p| {
        ids.iter()
            .map(|&v| p[v].unwrap_or(C64::new(0.0, 0.0)))
            .collect()
    });
    let cd = CellDecomposition::raw(ids.len(), faces, positions)?;
    Ok((cd, ids))
}

/// A maximal strip: the face sequence, the axis (opposite-side pair) used in
/// each face, and the traverse edges in order. For a periodic strip the face
/// sequence is one full period.
#[derive(Debug, Clone)]
pub struct Strip {
    pub faces: Vec<(usize, u8)>,
    pub traverse_edges: Vec<usize>,
    pub periodic: bool,
}

/// Every face lies on exactly two strips, one per pair of opposite sides.
pub fn enumerate_strips(d: &QuadGraph) -> Vec<Strip> {
    let mut visited = vec![[false; 2]; d.faces().len()];
    let mut strips = Vec::new();
    for f0 in 0..d.faces().len() {
        for axis in 0..2u8 {
            if visited[f0][axis as usize] {
                continue;
            }
            let strip = trace_strip(d, f0, axis, &mut visited);
            strips.push(strip);
        }
    }
    strips
}

fn side_axis(side: u8) -> u8 {
    side % 2
}

fn trace_strip(d: &QuadGraph, f0: usize, axis: u8, visited: &mut Vec<[bool; 2]>) -> Strip {
    // Walk forward through side `axis + 2`, then backward through `axis`,
    // and stitch the two halves together.
    let walk = |mut face: usize, mut exit_side: u8, visited: &mut Vec<[bool; 2]>| {
        let mut faces = Vec::new();
        let mut edges = Vec::new();
        let mut periodic = false;
        loop {
            let (u, v) = d.faces()[face].side(exit_side);
            let eid = d.edge_id(u, v).expect("face side is an edge");
            edges.push(eid);
            let slots = d.edge_faces(eid);
            let next = slots
                .iter()
                .flatten()
                .find(|&&(fi, _)| fi != face)
                .copied();
            let Some((nf, nside)) = next else { break };
            if visited[nf][side_axis(nside) as usize] {
                periodic = true;
                break;
            }
            visited[nf][side_axis(nside) as usize] = true;
            faces.push((nf, side_axis(nside)));
            exit_side = (nside + 2) % 4;
            face = nf;
        }
        (faces, edges, periodic)
    };

    visited[f0][axis as usize] = true;
    let (fwd_faces, fwd_edges, fwd_periodic) = walk(f0, axis + 2, visited);
    if fwd_periodic {
        // One full period collected; the backward walk would retrace it.
        let mut faces = vec![(f0, axis)];
        faces.extend(fwd_faces);
        return Strip {
            faces,
            traverse_edges: fwd_edges,
            periodic: true,
        };
    }
    let (bwd_faces, bwd_edges, bwd_periodic) = walk(f0, axis, visited);

    let mut faces: Vec<(usize, u8)> = bwd_faces.into_iter().rev().collect();
    faces.push((f0, axis));
    faces.extend(fwd_faces);
    let mut traverse_edges: Vec<usize> = bwd_edges.into_iter().rev().collect();
    traverse_edges.extend(fwd_edges);
    Strip {
        faces,
        traverse_edges,
        periodic: bwd_periodic,
    }
}

/// Certificate returned when the Kenyon–Schlenker conditions fail.
#[derive(Debug, Clone)]
pub enum EmbeddabilityDefect {
    /// Strip visiting some face along both of its axes.
    SelfCrossing { strip: usize, face: usize },
    /// Strip closing up into a cycle.
    Periodic { strip: usize },
    /// Two strips sharing more than one face.
    DoubleCrossing {
        strip_a: usize,
        strip_b: usize,
        faces: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct EmbeddabilityReport {
    pub embeddable: bool,
    pub strips: Vec<Strip>,
    pub defects: Vec<EmbeddabilityDefect>,
}

/// Combinatorial test for the existence of a rhombic embedding: no strip
/// self-crosses or is periodic, and two distinct strips cross at most once.
pub fn check_rhombic_embeddable(d: &QuadGraph) -> EmbeddabilityReport {
    let strips = enumerate_strips(d);
    let mut defects = Vec::new();

    // face -> strip per axis
    let mut at = vec![[usize::MAX; 2]; d.faces().len()];
    for (si, s) in strips.iter().enumerate() {
        if s.periodic {
            defects.push(EmbeddabilityDefect::Periodic { strip: si });
        }
        for &(f, axis) in &s.faces {
            at[f][axis as usize] = si;
        }
    }
    for (f, pair) in at.iter().enumerate() {
        if pair[0] == pair[1] && pair[0] != usize::MAX {
            defects.push(EmbeddabilityDefect::SelfCrossing {
                strip: pair[0],
                face: f,
            });
        }
    }
    let mut crossings: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (f, pair) in at.iter().enumerate() {
        let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if a != b && b != usize::MAX {
            crossings.entry((a, b)).or_default().push(f);
        }
    }
    for ((a, b), faces) in crossings {
        if faces.len() > 1 {
            defects.push(EmbeddabilityDefect::DoubleCrossing {
                strip_a: a,
                strip_b: b,
                faces,
            });
        }
    }
    EmbeddabilityReport {
        embeddable: defects.is_empty(),
        strips,
        defects,
    }
}
