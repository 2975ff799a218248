//! Hyperplanes as parallelism classes of edges, and the specialness
//! pathology detectors.
//!
//! Opposite sides of a square are elementarily parallel, on undirected and
//! on directed edges; the transitive closures give the undirected class of
//! a hyperplane and its one or two directed classes. A hyperplane is
//! 2-sided exactly when no edge is parallel to its own reverse, i.e. the
//! directed classes come in a pair.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{
    CubeComplex, DirectedEdge, EdgeId, Subcomplex, VertexId, CORNERS,
};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

#[derive(Clone, Debug)]
pub struct Hyperplane {
    pub id: usize,
    /// Undirected parallelism class.
    pub edges: BTreeSet<EdgeId>,
    /// One (1-sided) or two (2-sided) directed classes, sorted.
    pub directed_classes: Vec<BTreeSet<DirectedEdge>>,
    pub two_sided: bool,
}

#[derive(Clone, Debug)]
pub struct HyperplaneSet {
    pub hyperplanes: Vec<Hyperplane>,
    edge_class: Vec<usize>,
    directed_class: Vec<usize>,
}

impl HyperplaneSet {
    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    /// Hyperplane dual to an edge.
    pub fn class_of(&self, e: EdgeId) -> usize {
        self.edge_class[e.idx()]
    }

    /// Directed parallelism class of a directed edge (global index).
    pub fn directed_class_of(&self, d: DirectedEdge) -> usize {
        self.directed_class[d.slot()]
    }
}

/// Union-find closure of elementary parallelism over all squares.
pub fn compute_hyperplanes(c: &CubeComplex) -> HyperplaneSet {
    let n = c.n_edges();
    let mut und = UnionFind::new(n);
    let mut dir = UnionFind::new(2 * n);
    for s in c.square_ids() {
        let sides = c.square(s).sides;
        for (a, b) in [(sides.bottom, sides.top), (sides.left, sides.right)] {
            und.union(a.edge.idx(), b.edge.idx());
            dir.union(a.slot(), b.slot());
            dir.union(a.reversed().slot(), b.reversed().slot());
        }
    }

    let und_roots = und.roots();
    let dir_roots = dir.roots();

    // Hyperplanes ordered by smallest member edge.
    let mut by_root: BTreeMap<usize, BTreeSet<EdgeId>> = BTreeMap::new();
    for e in c.edge_ids() {
        by_root.entry(und_roots[e.idx()]).or_default().insert(e);
    }
    let mut classes: Vec<BTreeSet<EdgeId>> = by_root.into_values().collect();
    classes.sort_by_key(|set| *set.iter().next().expect("classes are nonempty"));

    let mut edge_class = vec![0; n];
    let mut directed_class = vec![0; 2 * n];
    let mut hyperplanes = Vec::with_capacity(classes.len());
    let mut next_dir_class = 0usize;
    for (id, edges) in classes.into_iter().enumerate() {
        for e in &edges {
            edge_class[e.idx()] = id;
        }
        let mut dir_sets: BTreeMap<usize, BTreeSet<DirectedEdge>> = BTreeMap::new();
        for e in &edges {
            for d in [DirectedEdge::fwd(*e), DirectedEdge::rev(*e)] {
                dir_sets.entry(dir_roots[d.slot()]).or_default().insert(d);
            }
        }
        let mut directed_classes: Vec<BTreeSet<DirectedEdge>> = dir_sets.into_values().collect();
        directed_classes.sort_by_key(|set| *set.iter().next().expect("nonempty"));
        debug_assert!(matches!(directed_classes.len(), 1 | 2));
        for set in &directed_classes {
            for d in set {
                directed_class[d.slot()] = next_dir_class;
            }
            next_dir_class += 1;
        }
        let two_sided = directed_classes.len() == 2;
        debug_assert!(
            two_sided
                || directed_classes[0].len() == 2 * edges.len(),
            "a 1-sided class contains both directions of each member"
        );
        hyperplanes.push(Hyperplane { id, edges, directed_classes, two_sided });
    }
    HyperplaneSet { hyperplanes, edge_class, directed_class }
}

/// How self-osculation is promoted to *direct* self-osculation.
///
/// `DirectedClass` requires the two edge-ends to lie in the same directed
/// parallelism class (they leave the vertex on the same side of the
/// hyperplane); `Literal` only requires them to be distinct directed edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OsculationSemantics {
    #[default]
    DirectedClass,
    Literal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexWitness {
    pub vertex: VertexId,
    pub ends: (DirectedEdge, DirectedEdge),
}

#[derive(Clone, Debug)]
pub struct PathologyReport {
    pub self_crossings: Vec<(usize, VertexWitness)>,
    pub one_sided: Vec<usize>,
    pub direct_self_osculations: Vec<(usize, VertexWitness)>,
    pub inter_osculations: Vec<InterOsculation>,
}

#[derive(Clone, Debug)]
pub struct InterOsculation {
    pub pair: (usize, usize),
    pub crossing: VertexWitness,
    pub osculation: VertexWitness,
}

impl PathologyReport {
    pub fn is_clean(&self) -> bool {
        self.self_crossings.is_empty()
            && self.one_sided.is_empty()
            && self.direct_self_osculations.is_empty()
            && self.inter_osculations.is_empty()
    }
}

/// Exhaustive scan of all unordered pairs of edge-ends at every vertex.
///
/// A pair is consecutive when it is a corner pair of some square; witness
/// lists are ordered by (hyperplane, vertex, ends).
pub fn detect_pathologies(
    c: &CubeComplex,
    hs: &HyperplaneSet,
    semantics: OsculationSemantics,
) -> PathologyReport {
    // Corner pairs per vertex.
    let mut consecutive: BTreeMap<VertexId, BTreeSet<(DirectedEdge, DirectedEdge)>> =
        BTreeMap::new();
    for s in c.square_ids() {
        let sides = c.square(s).sides;
        for corner in CORNERS {
            let v = c.square_corner_vertex(&sides, corner);
            let (x, y) = c.square_corner_ends(&sides, corner);
            consecutive.entry(v).or_default().insert(sorted_pair(x, y));
        }
    }

    let mut self_crossings = Vec::new();
    let mut direct_self_osculations = Vec::new();
    let mut crossings: BTreeMap<(usize, usize), VertexWitness> = BTreeMap::new();
    let mut osculations: BTreeMap<(usize, usize), VertexWitness> = BTreeMap::new();

    for v in c.vertex_ids() {
        let ends = c.ends_at(v);
        let consec = consecutive.get(&v);
        for i in 0..ends.len() {
            for j in i + 1..ends.len() {
                let (x, y) = (ends[i], ends[j]);
                let is_consecutive =
                    consec.map(|set| set.contains(&sorted_pair(x, y))).unwrap_or(false);
                let (h1, h2) = (hs.class_of(x.edge), hs.class_of(y.edge));
                if h1 == h2 {
                    if is_consecutive {
                        self_crossings.push((h1, VertexWitness { vertex: v, ends: (x, y) }));
                    } else {
                        let direct = match semantics {
                            OsculationSemantics::DirectedClass => {
                                hs.directed_class_of(x) == hs.directed_class_of(y)
                            }
                            OsculationSemantics::Literal => true,
                        };
                        if direct {
                            direct_self_osculations
                                .push((h1, VertexWitness { vertex: v, ends: (x, y) }));
                        }
                    }
                } else {
                    let key = (h1.min(h2), h1.max(h2));
                    let witness = VertexWitness { vertex: v, ends: (x, y) };
                    if is_consecutive {
                        crossings.entry(key).or_insert(witness);
                    } else {
                        osculations.entry(key).or_insert(witness);
                    }
                }
            }
        }
    }

    let one_sided: Vec<usize> =
        hs.hyperplanes.iter().filter(|h| !h.two_sided).map(|h| h.id).collect();

    let mut inter_osculations = Vec::new();
    for (pair, crossing) in &crossings {
        if let Some(osculation) = osculations.get(pair) {
            inter_osculations.push(InterOsculation {
                pair: *pair,
                crossing: crossing.clone(),
                osculation: osculation.clone(),
            });
        }
    }

    self_crossings.sort_by_key(|(h, w)| (*h, w.vertex, w.ends));
    direct_self_osculations.sort_by_key(|(h, w)| (*h, w.vertex, w.ends));
    inter_osculations.sort_by_key(|io| io.pair);

    PathologyReport { self_crossings, one_sided, direct_self_osculations, inter_osculations }
}

/// First pathology witness in the fixed clause order, or none.
#[derive(Clone, Debug)]
pub enum SpecialWitness {
    SelfCrossing(usize, VertexWitness),
    OneSided(usize),
    DirectSelfOsculation(usize, VertexWitness),
    InterOsculation(InterOsculation),
}

#[derive(Clone, Debug)]
pub struct SpecialVerdict {
    pub special: bool,
    pub witness: Option<SpecialWitness>,
    pub report: PathologyReport,
    pub hyperplanes: HyperplaneSet,
}

pub fn check_special(c: &CubeComplex, semantics: OsculationSemantics) -> SpecialVerdict {
    let hyperplanes = compute_hyperplanes(c);
    let report = detect_pathologies(c, &hyperplanes, semantics);
    let witness = if let Some((h, w)) = report.self_crossings.first() {
        Some(SpecialWitness::SelfCrossing(*h, w.clone()))
    } else if let Some(h) = report.one_sided.first() {
        Some(SpecialWitness::OneSided(*h))
    } else if let Some((h, w)) = report.direct_self_osculations.first() {
        Some(SpecialWitness::DirectSelfOsculation(*h, w.clone()))
    } else {
        report.inter_osculations.first().map(|io| SpecialWitness::InterOsculation(io.clone()))
    };
    SpecialVerdict { special: witness.is_none(), witness, report, hyperplanes }
}

/// Crossing and osculation of one hyperplane against a subcomplex.
#[derive(Clone, Debug)]
pub struct OsculationFinding {
    pub hyperplane: usize,
    /// First edge of the subcomplex dual to the hyperplane, when any.
    pub crossing_edge: Option<EdgeId>,
    /// (vertex of the subcomplex, external edge-end dual to the hyperplane).
    pub osculations: Vec<(VertexId, DirectedEdge)>,
    pub inter_osculates: bool,
}

/// For each hyperplane: crossing iff an edge of `y` is dual to it,
/// osculation witnesses are external dual edge-ends at vertices of `y`.
pub fn subcomplex_osculation(
    c: &CubeComplex,
    hs: &HyperplaneSet,
    y: &Subcomplex,
) -> Result<Vec<OsculationFinding>> {
    if !y.is_face_closed(c) {
        return Err(Error::structure(c.name(), "subcomplex is not face-closed"));
    }
    let mut crossing_edge: Vec<Option<EdgeId>> = vec![None; hs.len()];
    for &e in &y.edges {
        let h = hs.class_of(e);
        if crossing_edge[h].is_none() {
            crossing_edge[h] = Some(e);
        }
    }
    let mut osculations: Vec<Vec<(VertexId, DirectedEdge)>> = vec![Vec::new(); hs.len()];
    for &v in &y.vertices {
        for d in c.ends_at(v) {
            if !y.contains_edge(d.edge) {
                osculations[hs.class_of(d.edge)].push((v, *d));
            }
        }
    }
    Ok((0..hs.len())
        .map(|h| OsculationFinding {
            hyperplane: h,
            crossing_edge: crossing_edge[h],
            osculations: osculations[h].clone(),
            inter_osculates: crossing_edge[h].is_some() && !osculations[h].is_empty(),
        })
        .collect())
}

fn sorted_pair(x: DirectedEdge, y: DirectedEdge) -> (DirectedEdge, DirectedEdge) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn single_edge_has_one_two_sided_hyperplane() {
        let c = corpus::path(1);
        let hs = compute_hyperplanes(&c);
        assert_eq!(hs.len(), 1);
        assert!(hs.hyperplanes[0].two_sided);
        assert_eq!(hs.hyperplanes[0].directed_classes.len(), 2);
        assert!(hs.hyperplanes[0].directed_classes.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn torus_has_two_two_sided_hyperplanes_and_is_special() {
        let c = corpus::torus();
        let hs = compute_hyperplanes(&c);
        assert_eq!(hs.len(), 2);
        assert!(hs.hyperplanes.iter().all(|h| h.two_sided));
        let verdict = check_special(&c, OsculationSemantics::DirectedClass);
        assert!(verdict.special);
        // The literal reading of direct self-osculation rejects the torus:
        // a+ and a- meet at the vertex without a filling corner.
        let literal = check_special(&c, OsculationSemantics::Literal);
        assert!(!literal.special);
    }

    #[test]
    fn klein_square_hyperplane_a_is_one_sided() {
        let c = corpus::klein_square();
        let hs = compute_hyperplanes(&c);
        let ha = &hs.hyperplanes[hs.class_of(EdgeId(0))];
        assert!(!ha.two_sided);
        assert_eq!(ha.directed_classes.len(), 1);
        let hb = &hs.hyperplanes[hs.class_of(EdgeId(1))];
        assert!(hb.two_sided);
        let verdict = check_special(&c, OsculationSemantics::DirectedClass);
        assert!(!verdict.special);
        assert!(matches!(verdict.witness, Some(SpecialWitness::OneSided(_))));
    }

    #[test]
    fn graphs_are_special() {
        for c in [corpus::rose(3), corpus::cycle(5), corpus::path(4)] {
            let verdict = check_special(&c, OsculationSemantics::DirectedClass);
            assert!(verdict.special);
            let report = &verdict.report;
            assert!(report.is_clean());
        }
    }

    #[test]
    fn strip_directly_self_osculates_at_v() {
        let c = corpus::self_osculating_strip();
        assert!(c.validate().is_npc());
        let verdict = check_special(&c, OsculationSemantics::DirectedClass);
        assert!(!verdict.special);
        assert_eq!(verdict.report.direct_self_osculations.len(), 1);
        let (h, w) = &verdict.report.direct_self_osculations[0];
        assert_eq!(*h, verdict.hyperplanes.class_of(c.edge_by_name("e1").unwrap()));
        assert_eq!(c.vertex_name(w.vertex), "v");
        let tokens: Vec<String> =
            [w.ends.0, w.ends.1].iter().map(|d| c.edge_token(*d)).collect();
        assert_eq!(tokens, vec!["e1+", "e2+"]);
        assert!(verdict.report.self_crossings.is_empty());
        assert!(verdict.report.one_sided.is_empty());
    }

    #[test]
    fn square_with_identified_corners_inter_osculates() {
        let c = corpus::crossing_osculating_square();
        assert!(c.validate().is_npc());
        let verdict = check_special(&c, OsculationSemantics::DirectedClass);
        assert!(!verdict.special);
        assert!(verdict.report.self_crossings.is_empty());
        assert!(verdict.report.one_sided.is_empty());
        assert!(verdict.report.direct_self_osculations.is_empty());
        assert_eq!(verdict.report.inter_osculations.len(), 1);
        // Under the literal semantics the same complex also reports a
        // direct self-osculation (the two ends lie on opposite sides).
        let literal = check_special(&c, OsculationSemantics::Literal);
        assert!(!literal.report.direct_self_osculations.is_empty());
    }

    #[test]
    fn whole_complex_never_osculates_with_itself() {
        let c = corpus::torus();
        let hs = compute_hyperplanes(&c);
        let y = Subcomplex::full(&c);
        for finding in subcomplex_osculation(&c, &hs, &y).unwrap() {
            assert!(finding.crossing_edge.is_some());
            assert!(finding.osculations.is_empty());
            assert!(!finding.inter_osculates);
        }
    }

    #[test]
    fn rose_loop_subcomplex_crosses_or_osculates_but_not_both() {
        let c = corpus::rose(2);
        let hs = compute_hyperplanes(&c);
        let mut y = Subcomplex::default();
        y.vertices.insert(VertexId(0));
        y.edges.insert(EdgeId(0));
        let findings = subcomplex_osculation(&c, &hs, &y).unwrap();
        let ha = &findings[hs.class_of(EdgeId(0))];
        assert!(ha.crossing_edge.is_some());
        assert!(ha.osculations.is_empty());
        let hb = &findings[hs.class_of(EdgeId(1))];
        assert!(hb.crossing_edge.is_none());
        assert_eq!(hb.osculations.len(), 2);
        assert!(findings.iter().all(|f| !f.inter_osculates));
    }

    #[test]
    fn dual_edge_subcomplex_of_interosc_square_interosculates() {
        let c = corpus::crossing_osculating_square();
        let hs = compute_hyperplanes(&c);
        let f2 = c.edge_by_name("f2").unwrap();
        let mut y = Subcomplex::default();
        y.edges.insert(f2);
        let y = Subcomplex::closure(&c, y);
        let findings = subcomplex_osculation(&c, &hs, &y).unwrap();
        assert!(findings[hs.class_of(f2)].inter_osculates);
    }

    #[test]
    fn no_squares_means_empty_pathology_lists() {
        let c = corpus::rose(4);
        let hs = compute_hyperplanes(&c);
        let report = detect_pathologies(&c, &hs, OsculationSemantics::DirectedClass);
        assert!(report.is_clean());
    }
}
