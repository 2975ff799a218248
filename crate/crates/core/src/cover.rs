//! Finite-sheeted covers from voltage assignments: one permutation of the
//! sheets per edge, identity on a spanning tree. Connected covers of
//! degree at most n are enumerated by coset-table style backtracking with
//! canonical sheet labeling, so each cover appears exactly once, in a
//! deterministic order.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::complex::{
    CubeComplex, CubeSpec, DirectedEdge, EdgeData, SquareId, SquareSides, VertexId, CORNERS,
};
use crate::error::{Error, Result};
use crate::presentation::{presentation, Presentation};

/// Permutation of {0..n-1}, stored as the image vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::Cover("not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation((0..n).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// Apply `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&i| other.0[i]).collect())
    }

    /// Disjoint cycle notation, 1-based; `id` for the identity.
    pub fn cycles(&self) -> String {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.0[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut at = self.0[start];
            while at != start {
                seen[at] = true;
                cycle.push(at);
                at = self.0[at];
            }
            out.push('(');
            out.push_str(
                &cycle.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" "),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("id");
        }
        out
    }

    /// Parse cycle notation produced by [`Permutation::cycles`].
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
        let mut images: Vec<usize> = (0..degree).collect();
        if text == "id" {
            return Ok(Permutation(images));
        }
        let bad = || Error::Cover(format!("bad cycle notation {text:?}"));
        let mut rest = text;
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(bad());
            }
            let close = rest.find(')').ok_or_else(bad)?;
            let inner = &rest[1..close];
            let cycle: Vec<usize> = inner
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if cycle.iter().any(|&i| i == 0 || i > degree) || cycle.len() < 2 {
                return Err(bad());
            }
            for w in cycle.windows(2) {
                images[w[0] - 1] = w[1] - 1;
            }
            images[cycle[cycle.len() - 1] - 1] = cycle[0] - 1;
            rest = &rest[close + 1..];
        }
        Permutation::new(images)
    }
}

/// Sheet permutations per edge of a base complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoltageAssignment {
    pub degree: usize,
    pub perms: Vec<Permutation>,
}

impl VoltageAssignment {
    pub fn identity(base: &CubeComplex) -> VoltageAssignment {
        VoltageAssignment {
            degree: 1,
            perms: vec![Permutation::identity(1); base.n_edges()],
        }
    }

    /// Sheet reached when traversing `d` from `sheet`.
    pub fn transition(&self, d: DirectedEdge, sheet: usize) -> usize {
        let p = &self.perms[d.edge.idx()];
        if d.forward {
            p.apply(sheet)
        } else {
            p.inverse().apply(sheet)
        }
    }

    pub fn is_transitive(&self) -> bool {
        let mut seen = vec![false; self.degree];
        let mut queue = vec![0usize];
        seen[0] = true;
        while let Some(s) = queue.pop() {
            for p in &self.perms {
                for t in [p.apply(s), p.inverse().apply(s)] {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push(t);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Order of the permutation group the voltages generate, giving up
    /// (with `None`) once more than `cap` elements are found.
    pub fn group_order_capped(&self, cap: usize) -> Option<usize> {
        let group = self.group_elements(cap)?;
        Some(group.len())
    }

    pub fn group_elements(&self, cap: usize) -> Option<Vec<Permutation>> {
        let mut set = std::collections::BTreeSet::new();
        set.insert(Permutation::identity(self.degree));
        let mut frontier: Vec<Permutation> = vec![Permutation::identity(self.degree)];
        while let Some(g) = frontier.pop() {
            for p in &self.perms {
                let next = g.then(p);
                if set.insert(next.clone()) {
                    if set.len() > cap {
                        return None;
                    }
                    frontier.push(next);
                }
            }
        }
        Some(set.into_iter().collect())
    }
}

/// A finite-sheeted cover together with its voltage data and projection.
#[derive(Clone, Debug)]
pub struct CoveringSpace {
    pub base: Arc<CubeComplex>,
    pub total: Arc<CubeComplex>,
    pub projection: crate::map::CubicalMap,
    pub voltages: VoltageAssignment,
    pub regular: bool,
    /// Total vertex over (base vertex, sheet).
    pub vertex_lift: Vec<Vec<VertexId>>,
    /// (base vertex, sheet) of each total vertex.
    pub vertex_fiber: Vec<(VertexId, usize)>,
}

impl CoveringSpace {
    pub fn degree(&self) -> usize {
        self.voltages.degree
    }

    pub fn lifted_vertex(&self, v: VertexId, sheet: usize) -> VertexId {
        self.vertex_lift[v.idx()][sheet]
    }
}

/// Cells lifted along a sheet-transition function. Shared by the cover
/// construction and the fiber product.
pub(crate) struct LiftedCells {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeData>,
    pub squares: Vec<(String, SquareSides)>,
    pub cubes: Vec<CubeSpec>,
    /// (cell, sheet) of each lifted cell, per dimension.
    pub vertex_fiber: Vec<(VertexId, usize)>,
    pub edge_fiber: Vec<(crate::complex::EdgeId, usize)>,
    pub square_fiber: Vec<(SquareId, usize)>,
    pub cube_fiber: Vec<(crate::complex::Cube3Id, usize)>,
}

/// Sheets of the four corners of a square lifted with anchor sheet at the
/// corner s(0,0).
fn square_corner_sheets(
    sides: &SquareSides,
    anchor: usize,
    transition: &dyn Fn(DirectedEdge, usize) -> usize,
) -> [usize; 4] {
    let s10 = transition(sides.bottom, anchor);
    let s01 = transition(sides.left, anchor);
    let s11 = transition(sides.right, s10);
    [anchor, s10, s01, s11]
}

pub(crate) fn lift_cells(
    base: &CubeComplex,
    degree: usize,
    transition: &dyn Fn(DirectedEdge, usize) -> usize,
) -> Result<LiftedCells> {
    // Square boundaries must close up sheet-wise.
    for s in base.square_ids() {
        let sides = base.square(s).sides;
        for sheet in 0..degree {
            let s10 = transition(sides.bottom, sheet);
            let s01 = transition(sides.left, sheet);
            if transition(sides.right, s10) != transition(sides.top, s01) {
                return Err(Error::Cover(format!(
                    "square {} does not close up over sheet {}",
                    base.square(s).name,
                    sheet + 1
                )));
            }
        }
    }

    let nv = base.n_vertices();
    let ne = base.n_edges();
    let ns = base.n_squares();
    let vid = |v: VertexId, sheet: usize| VertexId((sheet * nv + v.idx()) as u32);
    let eid = |e: crate::complex::EdgeId, sheet: usize| {
        crate::complex::EdgeId((sheet * ne + e.idx()) as u32)
    };
    let sid = |s: SquareId, sheet: usize| SquareId((sheet * ns + s.idx()) as u32);
    // Lift of a directed edge starting at `sheet`: traversing backward uses
    // the instance anchored at the arrival sheet.
    let lift_directed = |d: DirectedEdge, sheet: usize| -> DirectedEdge {
        let anchor = if d.forward { sheet } else { transition(d, sheet) };
        DirectedEdge { edge: eid(d.edge, anchor), forward: d.forward }
    };

    let mut out = LiftedCells {
        vertices: Vec::new(),
        edges: Vec::new(),
        squares: Vec::new(),
        cubes: Vec::new(),
        vertex_fiber: Vec::new(),
        edge_fiber: Vec::new(),
        square_fiber: Vec::new(),
        cube_fiber: Vec::new(),
    };
    for sheet in 0..degree {
        for v in base.vertex_ids() {
            out.vertices.push(format!("{}@{}", base.vertex_name(v), sheet + 1));
            out.vertex_fiber.push((v, sheet));
        }
    }
    for sheet in 0..degree {
        for e in base.edge_ids() {
            let data = base.edge(e);
            out.edges.push(EdgeData {
                name: format!("{}@{}", data.name, sheet + 1),
                init: vid(data.init, sheet),
                term: vid(data.term, transition(DirectedEdge::fwd(e), sheet)),
            });
            out.edge_fiber.push((e, sheet));
        }
    }
    for sheet in 0..degree {
        for s in base.square_ids() {
            let data = base.square(s);
            let corners = square_corner_sheets(&data.sides, sheet, transition);
            out.squares.push((
                format!("{}@{}", data.name, sheet + 1),
                SquareSides {
                    bottom: lift_directed(data.sides.bottom, corners[0]),
                    right: lift_directed(data.sides.right, corners[1]),
                    top: lift_directed(data.sides.top, corners[2]),
                    left: lift_directed(data.sides.left, corners[0]),
                },
            ));
            out.square_fiber.push((s, sheet));
        }
    }
    for sheet in 0..degree {
        for c in base.cube_ids() {
            let data = base.cube(c);
            let bottom_sides = base.square(data.bottom).sides;
            let corners = square_corner_sheets(&bottom_sides, sheet, transition);
            let lifted_corners: [DirectedEdge; 4] = [
                lift_directed(data.corners[0], corners[0]),
                lift_directed(data.corners[1], corners[1]),
                lift_directed(data.corners[2], corners[2]),
                lift_directed(data.corners[3], corners[3]),
            ];
            // Anchor sheet of the top square: follow the corner edge that
            // lands on the top square's corner (0,0).
            let k0 = corner_position(data.twist.inverse().corner((0, 0)));
            let top_anchor = transition(data.corners[k0], corners[k0]);
            out.cubes.push(CubeSpec {
                name: format!("{}@{}", data.name, sheet + 1),
                bottom: sid(data.bottom, sheet),
                top: sid(data.top, top_anchor),
                corners: lifted_corners,
                twist: Some(data.twist),
            });
            out.cube_fiber.push((c, sheet));
        }
    }
    Ok(out)
}

fn corner_position(c: crate::complex::Corner) -> usize {
    CORNERS.iter().position(|&k| k == c).expect("corner coordinates are 0/1")
}

/// Construct the cover determined by a voltage assignment.
pub fn build_cover(base: &Arc<CubeComplex>, voltages: VoltageAssignment) -> Result<CoveringSpace> {
    if voltages.perms.len() != base.n_edges() {
        return Err(Error::Cover("one permutation per edge is required".into()));
    }
    let degree = voltages.degree;
    let transition = |d: DirectedEdge, s: usize| voltages.transition(d, s);
    let cells = lift_cells(base, degree, &transition)?;
    let total = Arc::new(CubeComplex::assemble(
        format!("{}^{}", base.name(), degree),
        cells.vertices,
        cells.edges,
        cells.squares,
        cells.cubes,
    )?);
    let vertex_map = cells.vertex_fiber.iter().map(|(v, _)| *v).collect();
    let edge_map = cells
        .edge_fiber
        .iter()
        .map(|(e, _)| crate::map::EdgeImage::Edge(DirectedEdge::fwd(*e)))
        .collect();
    let projection = crate::map::CubicalMap::new(
        format!("p_{}", total.name()),
        Arc::clone(&total),
        Arc::clone(base),
        vertex_map,
        edge_map,
    )?;
    let mut vertex_lift = vec![vec![VertexId(0); degree]; base.n_vertices()];
    for (i, (v, sheet)) in cells.vertex_fiber.iter().enumerate() {
        vertex_lift[v.idx()][*sheet] = VertexId(i as u32);
    }
    let regular = voltages.is_transitive()
        && voltages.group_order_capped(degree).map(|o| o == degree).unwrap_or(false);
    Ok(CoveringSpace {
        base: Arc::clone(base),
        total,
        projection,
        voltages,
        regular,
        vertex_lift,
        vertex_fiber: cells.vertex_fiber,
    })
}

/// The regular cover associated to the kernel of the voltage action: the
/// generated permutation group acting on itself by right multiplication.
pub fn regular_closure(cover: &CoveringSpace, cap: usize) -> Result<CoveringSpace> {
    let group = cover
        .voltages
        .group_elements(cap)
        .ok_or(Error::GroupOrderCap { order: cap + 1, cap })?;
    let degree = group.len();
    let index_of = |p: &Permutation| -> usize {
        group.binary_search(p).expect("closure contains all products")
    };
    let perms = cover
        .voltages
        .perms
        .iter()
        .map(|p| {
            Permutation::new(group.iter().map(|g| index_of(&g.then(p))).collect())
                .expect("right multiplication permutes the group")
        })
        .collect();
    let closed = build_cover(&cover.base, VoltageAssignment { degree, perms })?;
    debug_assert!(closed.regular, "the closure acts regularly");
    Ok(closed)
}

/// Enumerates all connected covers of degree up to `max_degree`, one per
/// equivalence class, ordered by degree then by table order.
pub struct CoverEnumerator {
    base: Arc<CubeComplex>,
    pres: Presentation,
    max_degree: usize,
    next_degree: usize,
    buffer: VecDeque<VoltageAssignment>,
}

pub fn enumerate_covers(base: &Arc<CubeComplex>, max_degree: usize) -> Result<CoverEnumerator> {
    let pres = presentation(base, VertexId(0))?;
    Ok(CoverEnumerator {
        base: Arc::clone(base),
        pres,
        max_degree,
        next_degree: 1,
        buffer: VecDeque::new(),
    })
}

impl Iterator for CoverEnumerator {
    type Item = CoveringSpace;

    fn next(&mut self) -> Option<CoveringSpace> {
        loop {
            if let Some(voltages) = self.buffer.pop_front() {
                let cover = build_cover(&self.base, voltages)
                    .expect("enumerated voltage assignments satisfy all relators");
                return Some(cover);
            }
            if self.next_degree > self.max_degree {
                return None;
            }
            let degree = self.next_degree;
            self.next_degree += 1;
            for tables in transitive_tables(&self.pres, degree) {
                let mut perms = vec![Permutation::identity(degree); self.base.n_edges()];
                for (i, &e) in self.pres.generators.iter().enumerate() {
                    perms[e.idx()] =
                        Permutation::new(tables[i].clone()).expect("tables are permutations");
                }
                self.buffer.push_back(VoltageAssignment { degree, perms });
            }
        }
    }
}

/// Backtracking over generator action tables with fresh sheet numbering;
/// only lexicographically minimal relabelings are kept.
fn transitive_tables(pres: &Presentation, degree: usize) -> Vec<Vec<Vec<usize>>> {
    let k = pres.generators.len();
    if degree == 1 {
        return vec![vec![vec![0]; k]];
    }
    if k == 0 {
        return Vec::new();
    }
    let mut state = Search {
        relators: &pres.relators,
        k,
        degree,
        img: vec![vec![None; degree]; k],
        pre: vec![vec![None; degree]; k],
        used: 1,
        out: Vec::new(),
    };
    state.recurse(0);
    state.out
}

struct Search<'a> {
    relators: &'a [crate::presentation::Word],
    k: usize,
    degree: usize,
    img: Vec<Vec<Option<usize>>>,
    pre: Vec<Vec<Option<usize>>>,
    used: usize,
    out: Vec<Vec<Vec<usize>>>,
}

impl Search<'_> {
    fn recurse(&mut self, position: usize) {
        if position == self.k * self.degree {
            if self.used != self.degree {
                return;
            }
            let tables: Vec<Vec<usize>> = self
                .img
                .iter()
                .map(|row| row.iter().map(|v| v.unwrap()).collect())
                .collect();
            if self.is_canonical(&tables) {
                self.out.push(tables);
            }
            return;
        }
        let (sheet, gen) = (position / self.k, position % self.k);
        if sheet >= self.used {
            // Unreached sheet: the table cannot become transitive in fresh
            // numbering order.
            return;
        }
        if self.img[gen][sheet].is_some() {
            self.recurse(position + 1);
            return;
        }
        let limit = (self.used + 1).min(self.degree);
        for t in 0..limit {
            if self.pre[gen][t].is_some() {
                continue;
            }
            let fresh = t == self.used;
            self.img[gen][sheet] = Some(t);
            self.pre[gen][t] = Some(sheet);
            if fresh {
                self.used += 1;
            }
            if self.relators_consistent() {
                self.recurse(position + 1);
            }
            self.img[gen][sheet] = None;
            self.pre[gen][t] = None;
            if fresh {
                self.used -= 1;
            }
        }
    }

    fn relators_consistent(&self) -> bool {
        for word in self.relators {
            for start in 0..self.used {
                let mut at = start;
                let mut complete = true;
                for &(gen, inverted) in word {
                    let next = if inverted { self.pre[gen][at] } else { self.img[gen][at] };
                    match next {
                        Some(n) => at = n,
                        None => {
                            complete = false;
                            break;
                        }
                    }
                }
                if complete && at != start {
                    return false;
                }
            }
        }
        true
    }

    fn is_canonical(&self, tables: &[Vec<usize>]) -> bool {
        let flat = self.flatten(tables, 0);
        for start in 1..self.degree {
            if self.flatten(tables, start) < flat {
                return false;
            }
        }
        true
    }

    /// Relabel sheets by first appearance when scanning from `start`.
    fn flatten(&self, tables: &[Vec<usize>], start: usize) -> Vec<usize> {
        let d = self.degree;
        let mut old_of_new = vec![usize::MAX; d];
        let mut new_of_old = vec![usize::MAX; d];
        old_of_new[0] = start;
        new_of_old[start] = 0;
        let mut introduced = 1;
        let mut flat = Vec::with_capacity(d * self.k);
        for new_s in 0..d {
            let old_s = old_of_new[new_s];
            for table in tables {
                let old_t = table[old_s];
                if new_of_old[old_t] == usize::MAX {
                    new_of_old[old_t] = introduced;
                    old_of_new[introduced] = old_t;
                    introduced += 1;
                }
                flat.push(new_of_old[old_t]);
            }
        }
        flat
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::map::check_local_isometry;

    #[test]
    fn permutation_cycles_roundtrip() {
        let p = Permutation::new(vec![1, 2, 0, 4, 3]).unwrap();
        let text = p.cycles();
        assert_eq!(text, "(1 2 3)(4 5)");
        assert_eq!(Permutation::parse_cycles(&text, 5).unwrap(), p);
        assert_eq!(Permutation::parse_cycles("id", 3).unwrap(), Permutation::identity(3));
    }

    #[test]
    fn circle_has_one_connected_double_cover() {
        let base = Arc::new(corpus::cycle(1));
        let covers: Vec<_> =
            enumerate_covers(&base, 2).unwrap().filter(|c| c.degree() == 2).collect();
        assert_eq!(covers.len(), 1);
        assert_eq!(covers[0].total.cell_counts(), [2, 2, 0, 0]);
    }

    #[test]
    fn rose_has_three_connected_double_covers() {
        let base = Arc::new(corpus::rose(2));
        let covers: Vec<_> =
            enumerate_covers(&base, 2).unwrap().filter(|c| c.degree() == 2).collect();
        assert_eq!(covers.len(), 3);
    }

    #[test]
    fn degree_one_cover_is_identity() {
        let base = Arc::new(corpus::torus());
        let first = enumerate_covers(&base, 3).unwrap().next().unwrap();
        assert_eq!(first.degree(), 1);
        assert_eq!(first.total.cell_counts(), base.cell_counts());
        assert!(first.regular);
    }

    #[test]
    fn covers_are_local_isometries_with_multiplied_cells() {
        let base = Arc::new(corpus::klein_square());
        for cover in enumerate_covers(&base, 3).unwrap() {
            let d = cover.degree();
            for (i, n) in base.cell_counts().into_iter().enumerate() {
                assert_eq!(cover.total.cell_counts()[i], d * n);
            }
            assert_eq!(
                cover.total.euler_characteristic(),
                d as i64 * base.euler_characteristic()
            );
            assert!(check_local_isometry(&cover.projection).is_local_isometry());
            assert!(cover.total.validate().is_npc());
        }
    }

    #[test]
    fn klein_square_has_a_double_cover_with_all_hyperplanes_two_sided() {
        let base = Arc::new(corpus::klein_square());
        let found = enumerate_covers(&base, 2).unwrap().any(|cover| {
            cover.degree() == 2
                && crate::hyperplane::compute_hyperplanes(&cover.total)
                    .hyperplanes
                    .iter()
                    .all(|h| h.two_sided)
        });
        assert!(found);
    }

    #[test]
    fn torus_times_circle_covers_lift_cubes() {
        let torus = Arc::new(corpus::torus());
        let id = crate::map::CubicalMap::identity(&torus);
        let (g, _lc) = crate::goc::mapping_torus(&id, "tc").unwrap();
        let total = crate::goc::total_space(&g).unwrap();
        let covers: Vec<_> = enumerate_covers(&total.complex, 2).unwrap().collect();
        // All three loops survive to degree-2 covers: 2^3 - 1 transitive
        // commuting triples in S2.
        assert_eq!(covers.iter().filter(|c| c.degree() == 2).count(), 7);
        for cover in covers {
            assert!(cover.total.validate().is_npc());
            assert_eq!(cover.total.n_cubes(), cover.degree());
            assert!(check_local_isometry(&cover.projection).is_local_isometry());
        }
    }

    #[test]
    fn regular_closure_of_symmetric_voltages_has_order_six() {
        let base = Arc::new(corpus::rose(2));
        let voltages = VoltageAssignment {
            degree: 3,
            perms: vec![
                Permutation::new(vec![1, 0, 2]).unwrap(),
                Permutation::new(vec![0, 2, 1]).unwrap(),
            ],
        };
        let cover = build_cover(&base, voltages).unwrap();
        assert!(!cover.regular);
        let closed = regular_closure(&cover, 64).unwrap();
        assert!(closed.regular);
        assert_eq!(closed.degree(), 6);
        // All point stabilizers of the closed action are trivial.
        let group = closed.voltages.group_elements(64).unwrap();
        assert_eq!(group.len(), 6);
        for g in &group {
            if !g.is_identity() {
                assert!((0..6).all(|i| g.apply(i) != i));
            }
        }
    }

    #[test]
    fn regular_closure_is_stable_on_regular_covers() {
        let base = Arc::new(corpus::cycle(1));
        let cover = enumerate_covers(&base, 2).unwrap().find(|c| c.degree() == 2).unwrap();
        assert!(cover.regular);
        let closed = regular_closure(&cover, 64).unwrap();
        assert_eq!(closed.degree(), 2);
    }

    #[test]
    fn group_cap_is_reported() {
        let base = Arc::new(corpus::rose(2));
        let voltages = VoltageAssignment {
            degree: 3,
            perms: vec![
                Permutation::new(vec![1, 0, 2]).unwrap(),
                Permutation::new(vec![0, 2, 1]).unwrap(),
            ],
        };
        let cover = build_cover(&base, voltages).unwrap();
        assert!(matches!(
            regular_closure(&cover, 4),
            Err(Error::GroupOrderCap { cap: 4, .. })
        ));
    }
}
