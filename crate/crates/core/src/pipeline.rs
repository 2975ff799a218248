//! End-to-end construction of a certified special finite cover of the
//! total space of a graph of cube complexes with locally constant vertex
//! spaces.
//!
//! Stages: trivialize the monodromy by a cover of the underlying graph,
//! identify the vertex spaces with a model space, derive one immersion per
//! edge into the base vertex space, search for a regular special cover of
//! it in which every elevation of every immersion embeds without
//! inter-osculation, pull the cover back through the retraction by a fiber
//! product, and scan the resulting complex directly. A certificate records
//! the voltage data needed to replay the construction; it is emitted only
//! when the direct scan is clean.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::complex::{CubeComplex, DirectedEdge, EdgeId, Subcomplex};
use crate::cover::{
    build_cover, enumerate_covers, regular_closure, CoveringSpace, Permutation,
    VoltageAssignment,
};
use crate::error::{Error, Result};
use crate::fiber::{fiber_product, FiberProduct};
use crate::goc::{total_space, Gamma, GammaEdge, GraphOfComplexes};
use crate::hyperplane::{check_special, subcomplex_osculation, OsculationSemantics};
use crate::map::{extract_subcomplex, CubicalMap, EdgeImage};
use crate::monodromy::{
    compute_monodromy, gamma_cover, make_constant, pull_back, trivialize_monodromy,
    ConstantStructure, GammaCover, LocallyConstantStructure,
};
use crate::parse::{input_hash, GocEntry};
use crate::retract::{build_retraction, check_corollary_hypotheses};

#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    /// Largest vertex-cover degree tried in the search.
    pub vertex_degree: usize,
    /// Largest acceptable monodromy order (degree of the graph cover).
    pub gamma_degree: usize,
    /// Cap on the deck group order in regular closures.
    pub group_cap: usize,
    /// Cap on the monodromy closure.
    pub monodromy_cap: usize,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets { vertex_degree: 8, gamma_degree: 8, group_cap: 64, monodromy_cap: 1024 }
    }
}

/// Derive the per-edge immersion into the base vertex space and verify the
/// two defining formulas agree.
pub fn derive_edge_immersions(
    g: &GraphOfComplexes,
    cs: &ConstantStructure,
    base: usize,
) -> Result<Vec<CubicalMap>> {
    let into_base = cs.psi[base].inverse()?;
    let mut out = Vec::with_capacity(g.gamma.edges.len());
    for (i, e) in g.gamma.edges.iter().enumerate() {
        let via_minus = g.attach_minus[i].then(&cs.psi[e.init])?.then(&into_base)?;
        let via_plus = g.attach_plus[i].then(&cs.psi[e.term])?.then(&into_base)?;
        if !via_minus.eq_data(&via_plus) {
            return Err(Error::goc(
                &g.name,
                format!("edge immersion over {} disagrees between the two ends", e.name),
            ));
        }
        if !crate::map::check_local_isometry(&via_minus).is_local_isometry() {
            return Err(Error::goc(
                &g.name,
                format!("edge immersion over {} is not a local isometry", e.name),
            ));
        }
        let mut named = via_minus;
        named.set_name(format!("f.{}", e.name));
        out.push(named);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ElevationFinding {
    pub immersion: usize,
    pub component: usize,
    pub embedded: bool,
    pub embedding_witness: Option<String>,
    /// Hyperplane of the cover inter-osculating with the elevation image.
    pub inter_osculation: Option<usize>,
}

impl ElevationFinding {
    pub fn good(&self) -> bool {
        self.embedded && self.inter_osculation.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct AcceptedCover {
    pub cover: CoveringSpace,
    pub findings: Vec<ElevationFinding>,
    pub covers_tried: usize,
}

#[derive(Clone, Debug)]
pub enum GoodCoverSearch {
    Found(Box<AcceptedCover>),
    Exhausted { covers_tried: usize, caps_hit: usize },
}

/// Elevation findings of one immersion against a cover.
fn elevation_findings(
    immersion: usize,
    f: &CubicalMap,
    cover: &CoveringSpace,
    hs: &crate::hyperplane::HyperplaneSet,
) -> Result<Vec<ElevationFinding>> {
    let fp = fiber_product(f, cover)?;
    let mut out = Vec::with_capacity(fp.elevations.len());
    for (c, el) in fp.elevations.iter().enumerate() {
        let embedded = el.to_cover.is_embedding();
        let embedding_witness = el.to_cover.embedding_witness();
        let inter_osculation = if embedded {
            let image = el.to_cover.image_subcomplex()?;
            subcomplex_osculation(&cover.total, hs, &image)?
                .into_iter()
                .find(|f| f.inter_osculates)
                .map(|f| f.hyperplane)
        } else {
            None
        };
        out.push(ElevationFinding {
            immersion,
            component: c,
            embedded,
            embedding_witness,
            inter_osculation,
        });
    }
    Ok(out)
}

/// Iterate covers of the base vertex space in canonical order, pass each
/// through the regular closure, and accept the first whose total complex
/// is special and whose elevations of every immersion are embedded and
/// inter-osculation-free.
pub fn find_good_vertex_cover(
    base: &Arc<CubeComplex>,
    immersions: &[CubicalMap],
    budgets: Budgets,
) -> Result<GoodCoverSearch> {
    let mut covers_tried = 0;
    let mut caps_hit = 0;
    for candidate in enumerate_covers(base, budgets.vertex_degree)? {
        covers_tried += 1;
        let cover = match regular_closure(&candidate, budgets.group_cap) {
            Ok(c) => c,
            Err(Error::GroupOrderCap { .. }) => {
                caps_hit += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let verdict = check_special(&cover.total, OsculationSemantics::DirectedClass);
        if !verdict.special {
            continue;
        }
        let mut findings = Vec::new();
        let mut all_good = true;
        for (i, f) in immersions.iter().enumerate() {
            let fs = elevation_findings(i, f, &cover, &verdict.hyperplanes)?;
            all_good &= fs.iter().all(|f| f.good());
            findings.extend(fs);
            if !all_good {
                break;
            }
        }
        if all_good {
            return Ok(GoodCoverSearch::Found(Box::new(AcceptedCover {
                cover,
                findings,
                covers_tried,
            })));
        }
    }
    Ok(GoodCoverSearch::Exhausted { covers_tried, caps_hit })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialnessCertificate {
    pub input_hash: String,
    pub gamma_base: String,
    pub gamma_degree: usize,
    /// (underlying-graph edge, permutation in cycle notation).
    pub gamma_voltages: Vec<(String, String)>,
    /// Name of the cover-graph vertex whose space carries the search.
    pub vertex_base: String,
    pub vertex_degree: usize,
    /// (base vertex space edge, permutation in cycle notation).
    pub vertex_voltages: Vec<(String, String)>,
    pub final_cells: [usize; 4],
    pub transcript: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum SpecializeOutcome {
    Certificate(Box<SpecialnessCertificate>),
    Inconclusive { stage: &'static str, reason: String, transcript: Vec<String> },
}

/// The full pipeline. Budget exhaustion yields `Inconclusive`; an internal
/// contradiction with the guaranteed statements is an error.
pub fn specialize(
    g: &GraphOfComplexes,
    lc: &LocallyConstantStructure,
    budgets: Budgets,
) -> Result<SpecializeOutcome> {
    g.validate()?;
    lc.validate(g)?;
    let hash = input_hash(&GocEntry { goc: g.clone(), lc: Some(lc.clone()), constant: None })?;
    let mut transcript = Vec::new();
    let mut log = |line: String| transcript.push(line);

    // Stage 1: trivialize the monodromy.
    let base = 0usize;
    let m = compute_monodromy(g, lc, base, budgets.monodromy_cap)?;
    log(format!("monodromy order {} at base {}", m.order(), g.gamma.vertices[base]));
    if m.order() > budgets.gamma_degree {
        return Ok(SpecializeOutcome::Inconclusive {
            stage: "trivialize",
            reason: format!(
                "monodromy order {} exceeds the graph-cover budget {}",
                m.order(),
                budgets.gamma_degree
            ),
            transcript,
        });
    }
    let (g2, lc2, gcover) = trivialize_monodromy(g, lc, &m, budgets.monodromy_cap)?;
    log(format!("trivializing graph cover of degree {}", gcover.degree));

    // Stage 2: constant structure on the trivialized datum.
    let base2 = gcover
        .vertex_fiber
        .iter()
        .position(|&(u, s)| u == base && s == 0)
        .expect("the base lifts to sheet 0");
    let m2 = compute_monodromy(&g2, &lc2, base2, budgets.monodromy_cap)?;
    let cs = make_constant(&g2, &m2)?;
    log(format!(
        "constant structure over {} verified on {} edges",
        g2.gamma.vertices[base2],
        g2.gamma.edges.len()
    ));

    // Stage 3: one immersion per edge into the base vertex space.
    let immersions = derive_edge_immersions(&g2, &cs, base2)?;
    let x_v = Arc::clone(&g2.vertex_spaces[base2]);
    log(format!("derived {} edge immersions into {}", immersions.len(), x_v.name()));

    // Stage 4: search for a good regular special cover.
    let accepted = match find_good_vertex_cover(&x_v, &immersions, budgets)? {
        GoodCoverSearch::Found(a) => a,
        GoodCoverSearch::Exhausted { covers_tried, caps_hit } => {
            return Ok(SpecializeOutcome::Inconclusive {
                stage: "vertex-cover-search",
                reason: format!(
                    "no cover of degree <= {} works ({} tried, {} closures over the group cap)",
                    budgets.vertex_degree, covers_tried, caps_hit
                ),
                transcript,
            });
        }
    };
    log(format!(
        "accepted regular special cover of degree {} after {} candidates; all {} elevations embedded and inter-osculation-free",
        accepted.cover.degree(),
        accepted.covers_tried,
        accepted.findings.len()
    ));

    // Stage 5: pull the cover back through the retraction.
    let total = total_space(&g2)?;
    let r = build_retraction(&g2, &cs, &total, base2)?;
    log(format!("retraction onto {} verified", g2.gamma.vertices[base2]));
    let fp = fiber_product(&r.map, &accepted.cover)?;
    if fp.elevations.len() != 1 {
        return Err(Error::Internal(
            "the retraction has a section, so the pulled-back cover must be connected".into(),
        ));
    }
    log(format!(
        "pulled-back cover of the total space: degree {}, cells {:?}",
        accepted.cover.degree(),
        fp.total.cell_counts()
    ));

    // Stage 6: induced splitting, hypothesis check, direct scan.
    let (split, split_cs) = induced_splitting(&g2, &total, &r.map, &fp, &accepted.cover)?;
    log(format!(
        "induced splitting: {} vertex spaces isomorphic to {}, {} edge spaces",
        split.gamma.vertices.len(),
        accepted.cover.total.name(),
        split.gamma.edges.len()
    ));
    let rebuilt = total_space(&split)?;
    if rebuilt.complex.cell_counts() != fp.total.cell_counts() {
        return Err(Error::Internal(
            "the induced splitting does not reassemble the pulled-back cover".into(),
        ));
    }
    let cor = check_corollary_hypotheses(&split, &split_cs)?;
    log(format!("hypothesis check on the induced splitting: {}", if cor.pass { "pass" } else { "fail" }));
    let scan = check_special(&fp.total, OsculationSemantics::DirectedClass);
    log(format!("direct scan: {}", if scan.special { "special" } else { "not special" }));
    if cor.pass && !scan.special {
        return Err(Error::Internal(
            "hypotheses hold but the direct scan found a pathology".into(),
        ));
    }
    if !scan.special {
        return Ok(SpecializeOutcome::Inconclusive {
            stage: "direct-scan",
            reason: "accepted cover fails the direct specialness scan".into(),
            transcript,
        });
    }

    let cert = SpecialnessCertificate {
        input_hash: hash,
        gamma_base: g.gamma.vertices[base].clone(),
        gamma_degree: gcover.degree,
        gamma_voltages: g
            .gamma
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.name.clone(), gcover.voltages[i].cycles()))
            .collect(),
        vertex_base: g2.gamma.vertices[base2].clone(),
        vertex_degree: accepted.cover.degree(),
        vertex_voltages: x_v
            .edge_ids()
            .map(|e| (x_v.edge(e).name.clone(), accepted.cover.voltages.perms[e.idx()].cycles()))
            .collect(),
        final_cells: fp.total.cell_counts(),
        transcript,
    };
    Ok(SpecializeOutcome::Certificate(Box::new(cert)))
}

/// The splitting of the pulled-back cover: one vertex per vertex of the
/// cover graph, all vertex spaces the cover total, one edge per elevation
/// of each edge immersion, attached on both ends by the elevation map.
/// Each vertex-space preimage inside the pulled-back cover is extracted
/// and checked to be isomorphic to the cover total.
fn induced_splitting(
    g2: &GraphOfComplexes,
    total: &crate::goc::TotalSpace,
    retraction: &CubicalMap,
    fp: &FiberProduct,
    cover: &CoveringSpace,
) -> Result<(GraphOfComplexes, ConstantStructure)> {
    let nv_base = cover.base.n_edges();
    // Preimage of each vertex space, with its natural map to the cover.
    for u in 0..g2.gamma.vertices.len() {
        let mut sub = Subcomplex::default();
        for v in fp.total.vertex_ids() {
            let (tv, _) = fp.vertex_fiber[v.idx()];
            if total.vertex_origin[tv.idx()].0 == u {
                sub.vertices.insert(v);
            }
        }
        for e in fp.total.edge_ids() {
            let (te, _) = fp.edge_fiber[e.idx()];
            if matches!(total.edge_origin[te.idx()], crate::goc::EdgeOrigin::Space { gv, .. } if gv == u)
            {
                sub.edges.insert(e);
            }
        }
        sub = Subcomplex::closure(&fp.total, sub);
        let extracted = extract_subcomplex(
            &fp.total,
            &sub,
            format!("{}_over_{}", fp.total.name(), g2.gamma.vertices[u]),
        )?;
        let vertex_map = extracted
            .vertex_to_parent
            .iter()
            .map(|&v| {
                let (tv, sheet) = fp.vertex_fiber[v.idx()];
                cover.lifted_vertex(retraction.apply_vertex(tv), sheet)
            })
            .collect();
        let mut edge_to_parent: Vec<EdgeId> = vec![EdgeId(0); extracted.edge_from_parent.len()];
        for (&parent, &child) in &extracted.edge_from_parent {
            edge_to_parent[child.idx()] = parent;
        }
        let edge_map = edge_to_parent
            .iter()
            .map(|&e| {
                let (te, sheet) = fp.edge_fiber[e.idx()];
                let d = retraction
                    .apply_edge(DirectedEdge::fwd(te))
                    .as_edge()
                    .expect("vertex-space edges do not collapse");
                let anchor = if d.forward { sheet } else { cover.voltages.transition(d, sheet) };
                EdgeImage::Edge(DirectedEdge {
                    edge: EdgeId((anchor * nv_base + d.edge.idx()) as u32),
                    forward: d.forward,
                })
            })
            .collect();
        let iso = CubicalMap::new(
            format!("phi_{}", g2.gamma.vertices[u]),
            Arc::clone(&extracted.complex),
            Arc::clone(&cover.total),
            vertex_map,
            edge_map,
        )?;
        if !iso.is_isomorphism() {
            return Err(Error::Internal(format!(
                "vertex-space preimage over {} is not isomorphic to the vertex cover",
                g2.gamma.vertices[u]
            )));
        }
    }

    // Edge spaces: elevations of each derived immersion.
    let mut edges = Vec::new();
    let mut edge_spaces = Vec::new();
    let mut attach = Vec::new();
    for (i, e) in g2.gamma.edges.iter().enumerate() {
        // The edge immersion, written through the retraction so the sheets
        // agree with the fiber product.
        let immersion = g2.attach_minus[i]
            .then(&total.inclusions[e.init])?
            .then(retraction)?;
        let elev = fiber_product(&immersion, cover)?;
        for (c, el) in elev.elevations.iter().enumerate() {
            edges.push(GammaEdge {
                name: format!("{}#{}", e.name, c + 1),
                init: e.init,
                term: e.term,
            });
            edge_spaces.push(Arc::clone(&el.complex));
            attach.push(el.to_cover.clone());
        }
    }
    let split = GraphOfComplexes {
        name: format!("split_{}", fp.total.name()),
        gamma: Gamma {
            name: format!("split_{}", fp.total.name()),
            vertices: g2.gamma.vertices.clone(),
            edges,
        },
        vertex_spaces: vec![Arc::clone(&cover.total); g2.gamma.vertices.len()],
        edge_spaces,
        attach_minus: attach.clone(),
        attach_plus: attach,
    };
    split.validate()?;
    let cs = ConstantStructure {
        space: Arc::clone(&cover.total),
        psi: vec![CubicalMap::identity(&cover.total); split.gamma.vertices.len()],
    };
    cs.verify(&split)?;
    Ok((split, cs))
}

pub fn certificate_to_text(cert: &SpecialnessCertificate) -> String {
    let mut out = String::from("cubex-cert v1\n");
    out.push_str(&format!("input-hash {}\n", cert.input_hash));
    out.push_str(&format!("gamma-base {}\n", cert.gamma_base));
    out.push_str(&format!("gamma-degree {}\n", cert.gamma_degree));
    for (e, p) in &cert.gamma_voltages {
        out.push_str(&format!("gamma-voltage {e} {p}\n"));
    }
    out.push_str(&format!("vertex-base {}\n", cert.vertex_base));
    out.push_str(&format!("vertex-degree {}\n", cert.vertex_degree));
    for (e, p) in &cert.vertex_voltages {
        out.push_str(&format!("vertex-voltage {e} {p}\n"));
    }
    out.push_str(&format!(
        "final-cells {} {} {} {}\n",
        cert.final_cells[0], cert.final_cells[1], cert.final_cells[2], cert.final_cells[3]
    ));
    out.push_str("verdict special\n");
    out.push_str("transcript-begin\n");
    for line in &cert.transcript {
        out.push_str(&format!("t {line}\n"));
    }
    out.push_str("transcript-end\n");
    out
}

pub fn parse_certificate(text: &str) -> Result<SpecialnessCertificate> {
    let bad = |line: usize, msg: &str| Error::Certificate(format!("line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty certificate"))?;
    if header.trim() != "cubex-cert v1" {
        return Err(bad(1, "expected header `cubex-cert v1`"));
    }
    let mut cert = SpecialnessCertificate {
        input_hash: String::new(),
        gamma_base: String::new(),
        gamma_degree: 0,
        gamma_voltages: Vec::new(),
        vertex_base: String::new(),
        vertex_degree: 0,
        vertex_voltages: Vec::new(),
        final_cells: [0; 4],
        transcript: Vec::new(),
    };
    let mut verdict_seen = false;
    let mut in_transcript = false;
    for (i, raw) in lines {
        let n = i + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        if in_transcript {
            if line == "transcript-end" {
                in_transcript = false;
            } else if let Some(rest) = line.strip_prefix("t ") {
                cert.transcript.push(rest.to_string());
            } else if line == "t" {
                cert.transcript.push(String::new());
            } else {
                return Err(bad(n, "transcript lines start with `t `"));
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["input-hash", h] => cert.input_hash = h.to_string(),
            ["gamma-base", v] => cert.gamma_base = v.to_string(),
            ["gamma-degree", d] => {
                cert.gamma_degree = d.parse().map_err(|_| bad(n, "bad degree"))?
            }
            ["gamma-voltage", e, p] => {
                cert.gamma_voltages.push((e.to_string(), p.to_string()))
            }
            ["vertex-base", v] => cert.vertex_base = v.to_string(),
            ["vertex-degree", d] => {
                cert.vertex_degree = d.parse().map_err(|_| bad(n, "bad degree"))?
            }
            ["vertex-voltage", e, p] => {
                cert.vertex_voltages.push((e.to_string(), p.to_string()))
            }
            ["final-cells", v, e, s, c] => {
                cert.final_cells = [
                    v.parse().map_err(|_| bad(n, "bad cell count"))?,
                    e.parse().map_err(|_| bad(n, "bad cell count"))?,
                    s.parse().map_err(|_| bad(n, "bad cell count"))?,
                    c.parse().map_err(|_| bad(n, "bad cell count"))?,
                ]
            }
            ["verdict", "special"] => verdict_seen = true,
            ["transcript-begin"] => in_transcript = true,
            _ => return Err(bad(n, "unrecognized certificate line")),
        }
    }
    if in_transcript {
        return Err(Error::Certificate("unterminated transcript".into()));
    }
    if !verdict_seen || cert.input_hash.is_empty() || cert.gamma_degree == 0 || cert.vertex_degree == 0 {
        return Err(Error::Certificate("certificate is missing required fields".into()));
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Pass,
    Fail(String),
}

/// Replay a certificate against an input datum: rebuild the graph cover
/// and the vertex cover from the recorded voltages, reassemble the final
/// complex, and re-run the specialness scan.
pub fn verify_certificate(
    cert: &SpecialnessCertificate,
    g: &GraphOfComplexes,
    lc: &LocallyConstantStructure,
    budgets: Budgets,
) -> Result<VerifyOutcome> {
    let fail = |msg: String| Ok(VerifyOutcome::Fail(msg));
    if let Err(e) = g.validate() {
        return fail(format!("input is invalid: {e}"));
    }
    if let Err(e) = lc.validate(g) {
        return fail(format!("input structure is invalid: {e}"));
    }
    let hash = input_hash(&GocEntry { goc: g.clone(), lc: Some(lc.clone()), constant: None })?;
    if hash != cert.input_hash {
        return fail("input hash does not match the certificate".into());
    }

    // Rebuild the graph cover.
    let mut by_name: BTreeMap<&str, usize> =
        g.gamma.edges.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect();
    let mut gvolt = vec![None; g.gamma.edges.len()];
    for (name, cyc) in &cert.gamma_voltages {
        let Some(i) = by_name.remove(name.as_str()) else {
            return fail(format!("certificate names unknown graph edge {name:?}"));
        };
        match Permutation::parse_cycles(cyc, cert.gamma_degree) {
            Ok(p) => gvolt[i] = Some(p),
            Err(e) => return fail(format!("bad graph voltage: {e}")),
        }
    }
    if gvolt.iter().any(|p| p.is_none()) {
        return fail("certificate is missing a graph voltage".into());
    }
    let gcover: GammaCover =
        match gamma_cover(&g.gamma, cert.gamma_degree, gvolt.into_iter().flatten().collect()) {
            Ok(c) => c,
            Err(e) => return fail(format!("graph cover rebuild failed: {e}")),
        };
    if !gcover.cover.is_connected() {
        return fail("rebuilt graph cover is not connected".into());
    }
    let (g2, lc2) = pull_back(g, lc, &gcover);

    let base2 = match g2.gamma.vertices.iter().position(|n| n == &cert.vertex_base) {
        Some(i) => i,
        None => return fail(format!("certificate base {:?} not in the cover graph", cert.vertex_base)),
    };
    let m2 = match compute_monodromy(&g2, &lc2, base2, budgets.monodromy_cap) {
        Ok(m) => m,
        Err(e) => return fail(format!("monodromy recomputation failed: {e}")),
    };
    if !m2.trivial {
        return fail("monodromy of the rebuilt cover datum is not trivial".into());
    }
    let cs = match make_constant(&g2, &m2) {
        Ok(cs) => cs,
        Err(e) => return fail(format!("constant structure failed: {e}")),
    };

    // Rebuild the vertex cover.
    let x_v = Arc::clone(&g2.vertex_spaces[base2]);
    let mut by_name: BTreeMap<&str, EdgeId> = x_v
        .edge_ids()
        .map(|e| (x_v.edge(e).name.as_str(), e))
        .collect();
    let mut vvolt: Vec<Option<Permutation>> = vec![None; x_v.n_edges()];
    for (name, cyc) in &cert.vertex_voltages {
        let Some(e) = by_name.remove(name.as_str()) else {
            return fail(format!("certificate names unknown edge {name:?} of {}", x_v.name()));
        };
        match Permutation::parse_cycles(cyc, cert.vertex_degree) {
            Ok(p) => vvolt[e.idx()] = Some(p),
            Err(err) => return fail(format!("bad vertex voltage: {err}")),
        }
    }
    if vvolt.iter().any(|p| p.is_none()) {
        return fail("certificate is missing a vertex voltage".into());
    }
    let voltages = VoltageAssignment {
        degree: cert.vertex_degree,
        perms: vvolt.into_iter().flatten().collect(),
    };
    let cover = match build_cover(&x_v, voltages) {
        Ok(c) => c,
        Err(e) => return fail(format!("vertex cover rebuild failed: {e}")),
    };

    // Reassemble the final complex and scan it.
    let total = match total_space(&g2) {
        Ok(t) => t,
        Err(e) => return fail(format!("total space rebuild failed: {e}")),
    };
    let r = match build_retraction(&g2, &cs, &total, base2) {
        Ok(r) => r,
        Err(e) => return fail(format!("retraction rebuild failed: {e}")),
    };
    let fp = match fiber_product(&r.map, &cover) {
        Ok(fp) => fp,
        Err(e) => return fail(format!("fiber product rebuild failed: {e}")),
    };
    if fp.total.cell_counts() != cert.final_cells {
        return fail(format!(
            "final cell counts {:?} do not match the certificate {:?}",
            fp.total.cell_counts(),
            cert.final_cells
        ));
    }
    if !fp.total.validate().is_npc() {
        return fail("rebuilt final complex is not nonpositively curved".into());
    }
    let verdict = check_special(&fp.total, OsculationSemantics::DirectedClass);
    if !verdict.special {
        return fail("rebuilt final complex is not special".into());
    }
    Ok(VerifyOutcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::goc::double;

    fn double_entry(
        f: &CubicalMap,
        base: &Arc<CubeComplex>,
        name: &str,
    ) -> (GraphOfComplexes, LocallyConstantStructure) {
        double(base, f, name).unwrap()
    }

    #[test]
    fn embedded_loop_double_gets_a_degree_one_certificate() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::loop_a_inclusion(&rose);
        let (g, lc) = double_entry(&f, &rose, "double_a");
        let outcome = specialize(&g, &lc, Budgets::default()).unwrap();
        let cert = match outcome {
            SpecializeOutcome::Certificate(c) => c,
            SpecializeOutcome::Inconclusive { stage, reason, .. } => {
                panic!("inconclusive at {stage}: {reason}")
            }
        };
        assert_eq!(cert.gamma_degree, 1);
        assert_eq!(cert.vertex_degree, 1);
        assert_eq!(verify_certificate(&cert, &g, &lc, Budgets::default()).unwrap(), VerifyOutcome::Pass);
    }

    #[test]
    fn aab_double_gets_a_certificate_within_budget() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        let (g, lc) = double_entry(&f, &rose, "double_aab");
        let outcome = specialize(&g, &lc, Budgets::default()).unwrap();
        let cert = match outcome {
            SpecializeOutcome::Certificate(c) => c,
            SpecializeOutcome::Inconclusive { stage, reason, .. } => {
                panic!("inconclusive at {stage}: {reason}")
            }
        };
        assert_eq!(cert.gamma_degree, 1);
        assert!(cert.vertex_degree <= 8);
        assert!(cert.vertex_degree > 1, "the aab cycle does not embed in the rose");
        assert_eq!(verify_certificate(&cert, &g, &lc, Budgets::default()).unwrap(), VerifyOutcome::Pass);

        // Determinism: a second run emits the identical certificate.
        let again = specialize(&g, &lc, Budgets::default()).unwrap();
        match again {
            SpecializeOutcome::Certificate(c) => assert_eq!(*c, *cert),
            _ => panic!("second run inconclusive"),
        }
    }

    #[test]
    fn certificate_text_roundtrips() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::loop_a_inclusion(&rose);
        let (g, lc) = double_entry(&f, &rose, "double_a");
        let outcome = specialize(&g, &lc, Budgets::default()).unwrap();
        let cert = match outcome {
            SpecializeOutcome::Certificate(c) => *c,
            _ => panic!("expected a certificate"),
        };
        let text = certificate_to_text(&cert);
        let parsed = parse_certificate(&text).unwrap();
        assert_eq!(parsed, cert);
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        let (g, lc) = double_entry(&f, &rose, "double_aab");
        let cert = match specialize(&g, &lc, Budgets::default()).unwrap() {
            SpecializeOutcome::Certificate(c) => *c,
            _ => panic!("expected a certificate"),
        };

        // Perturb one vertex voltage.
        let mut bad = cert.clone();
        bad.vertex_voltages[0].1 = "id".into();
        assert!(matches!(
            verify_certificate(&bad, &g, &lc, Budgets::default()).unwrap(),
            VerifyOutcome::Fail(_)
        ));

        // Replay against a different input.
        let f2 = corpus::loop_a_inclusion(&rose);
        let (g2, lc2) = double_entry(&f2, &rose, "double_a");
        assert!(matches!(
            verify_certificate(&cert, &g2, &lc2, Budgets::default()).unwrap(),
            VerifyOutcome::Fail(_)
        ));
    }

    #[test]
    fn tiny_budget_is_inconclusive_for_nonembedded_attachments() {
        let rose = Arc::new(corpus::rose(2));
        let f = corpus::aab_immersion(&rose);
        let (g, lc) = double_entry(&f, &rose, "double_aab");
        let budgets = Budgets { vertex_degree: 1, ..Budgets::default() };
        match specialize(&g, &lc, budgets).unwrap() {
            SpecializeOutcome::Inconclusive { stage, .. } => {
                assert_eq!(stage, "vertex-cover-search")
            }
            SpecializeOutcome::Certificate(_) => panic!("degree 1 cannot embed the aab cycle"),
        }
    }

    #[test]
    fn swap_mapping_torus_with_immersed_edge_space_specializes() {
        // Loop edge with an order-2 twist and an immersed (non-embedded)
        // attaching cycle.
        let rose = Arc::new(corpus::rose(2));
        let aab = corpus::aab_immersion(&rose);
        let swap = corpus::rose_loop_permutation(&rose, &[1, 0]);
        let plus = aab.then(&swap).unwrap();
        let gamma = Gamma {
            name: "swaptorus".into(),
            vertices: vec!["u0".into()],
            edges: vec![GammaEdge { name: "d0".into(), init: 0, term: 0 }],
        };
        let g = GraphOfComplexes {
            name: "swaptorus".into(),
            gamma,
            vertex_spaces: vec![Arc::clone(&rose)],
            edge_spaces: vec![Arc::clone(aab.source())],
            attach_minus: vec![aab],
            attach_plus: vec![plus],
        };
        let lc = LocallyConstantStructure { thetas: vec![swap] };
        g.validate().unwrap();
        lc.validate(&g).unwrap();
        let outcome = specialize(&g, &lc, Budgets::default()).unwrap();
        match outcome {
            SpecializeOutcome::Certificate(cert) => {
                assert_eq!(cert.gamma_degree, 2);
                assert_eq!(
                    verify_certificate(&cert, &g, &lc, Budgets::default()).unwrap(),
                    VerifyOutcome::Pass
                );
            }
            SpecializeOutcome::Inconclusive { stage, reason, .. } => {
                panic!("inconclusive at {stage}: {reason}")
            }
        }
    }
}
