//! Line-oriented text formats and the workspace resolving names across
//! them.
//!
//! A document may hold several items. `#` starts a comment.
//!
//! ```text
//! complex NAME
//! vertex ID
//! edge ID INIT TERM
//! square ID BOTTOM RIGHT TOP LEFT        # side tokens: EDGEID+ or EDGEID-
//! cube3 ID BOTTOMSQ TOPSQ E00 E10 E01 E11
//!
//! map NAME SRC DST
//! v SRCVERT DSTVERT
//! e SRCEDGE DSTEDGETOKEN
//!
//! goc NAME
//! gvertex U COMPLEX
//! gedge E U W EDGECOMPLEX MAPMINUS MAPPLUS
//! theta E MAP
//! psi U MAP
//! constant COMPLEX
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::complex::{CubeComplex, CubeSpec, DirectedEdge, EdgeData, SquareSides};
use crate::error::{Error, Result};
use crate::goc::{Gamma, GammaEdge, GraphOfComplexes};
use crate::map::{same_complex, CubicalMap, EdgeImage};
use crate::monodromy::{ConstantStructure, LocallyConstantStructure};

/// A graph-of-complexes datum with its optional structures, as loaded.
#[derive(Clone, Debug)]
pub struct GocEntry {
    pub goc: GraphOfComplexes,
    pub lc: Option<LocallyConstantStructure>,
    pub constant: Option<ConstantStructure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadedItem {
    Complex(String),
    Map(String),
    Goc(String),
}

/// Loaded items by kind and name.
#[derive(Default)]
pub struct Workspace {
    pub complexes: BTreeMap<String, Arc<CubeComplex>>,
    pub maps: BTreeMap<String, CubicalMap>,
    pub gocs: BTreeMap<String, GocEntry>,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let stripped = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = stripped.split_whitespace().collect();
            if tokens.is_empty() {
                None
            } else {
                Some(Line { number: i + 1, tokens })
            }
        })
        .collect()
}

impl Workspace {
    pub fn new() -> Workspace {
        Workspace::default()
    }

    pub fn complex(&self, name: &str) -> Result<&Arc<CubeComplex>> {
        self.complexes.get(name).ok_or(Error::NotFound { kind: "complex", name: name.into() })
    }

    pub fn map(&self, name: &str) -> Result<&CubicalMap> {
        self.maps.get(name).ok_or(Error::NotFound { kind: "map", name: name.into() })
    }

    pub fn goc(&self, name: &str) -> Result<&GocEntry> {
        self.gocs.get(name).ok_or(Error::NotFound { kind: "goc", name: name.into() })
    }

    /// First loaded item of each kind, for CLI defaults.
    pub fn single_complex(&self) -> Result<&Arc<CubeComplex>> {
        match self.complexes.len() {
            1 => Ok(self.complexes.values().next().unwrap()),
            0 => Err(Error::NotFound { kind: "complex", name: "<any>".into() }),
            _ => Err(Error::Parse {
                line: 0,
                msg: "several complexes in the file; pass --name".into(),
            }),
        }
    }

    pub fn single_goc(&self) -> Result<&GocEntry> {
        match self.gocs.len() {
            1 => Ok(self.gocs.values().next().unwrap()),
            0 => Err(Error::NotFound { kind: "goc", name: "<any>".into() }),
            _ => Err(Error::Parse {
                line: 0,
                msg: "several graph-of-complex data in the file; pass --name".into(),
            }),
        }
    }

    /// Parse a document and add its items, resolving names against what is
    /// already loaded.
    pub fn load_str(&mut self, text: &str) -> Result<Vec<LoadedItem>> {
        let lines = tokenize(text);
        let mut loaded = Vec::new();
        let mut at = 0;
        while at < lines.len() {
            let header = &lines[at];
            match header.tokens[0] {
                "complex" => {
                    let (item, next) = self.parse_complex_block(&lines, at)?;
                    loaded.push(LoadedItem::Complex(item));
                    at = next;
                }
                "map" => {
                    let (item, next) = self.parse_map_block(&lines, at)?;
                    loaded.push(LoadedItem::Map(item));
                    at = next;
                }
                "goc" => {
                    let (item, next) = self.parse_goc_block(&lines, at)?;
                    loaded.push(LoadedItem::Goc(item));
                    at = next;
                }
                other => {
                    return Err(Error::parse(
                        header.number,
                        format!("expected a complex/map/goc header, found {other:?}"),
                    ))
                }
            }
        }
        Ok(loaded)
    }

    fn parse_complex_block(&mut self, lines: &[Line], start: usize) -> Result<(String, usize)> {
        let header = &lines[start];
        if header.tokens.len() != 2 {
            return Err(Error::parse(header.number, "usage: complex NAME"));
        }
        let name = header.tokens[1].to_string();
        let mut vertices: Vec<String> = Vec::new();
        let mut vertex_index: BTreeMap<String, u32> = BTreeMap::new();
        let mut edge_rows: Vec<(usize, String, String, String)> = Vec::new();
        let mut square_rows: Vec<(usize, String, [String; 4])> = Vec::new();
        let mut cube_rows: Vec<(usize, String, [String; 6])> = Vec::new();
        let mut at = start + 1;
        while at < lines.len() {
            let line = &lines[at];
            let t = &line.tokens;
            match t[0] {
                "vertex" if t.len() == 2 => {
                    vertex_index.insert(t[1].to_string(), vertices.len() as u32);
                    vertices.push(t[1].to_string());
                }
                "edge" if t.len() == 4 => {
                    edge_rows.push((line.number, t[1].into(), t[2].into(), t[3].into()));
                }
                "square" if t.len() == 6 => {
                    square_rows.push((
                        line.number,
                        t[1].into(),
                        [t[2].into(), t[3].into(), t[4].into(), t[5].into()],
                    ));
                }
                "cube3" if t.len() == 8 => {
                    cube_rows.push((
                        line.number,
                        t[1].into(),
                        [t[2].into(), t[3].into(), t[4].into(), t[5].into(), t[6].into(), t[7].into()],
                    ));
                }
                "complex" | "map" | "goc" => break,
                _ => {
                    return Err(Error::parse(
                        line.number,
                        format!("unexpected line in complex block: {}", t.join(" ")),
                    ))
                }
            }
            at += 1;
        }

        let mut edges = Vec::with_capacity(edge_rows.len());
        let mut edge_index: BTreeMap<String, u32> = BTreeMap::new();
        for (ln, ename, init, term) in edge_rows {
            let lookup = |v: &str| {
                vertex_index
                    .get(v)
                    .copied()
                    .map(crate::complex::VertexId)
                    .ok_or_else(|| Error::parse(ln, format!("unknown vertex {v:?}")))
            };
            edge_index.insert(ename.clone(), edges.len() as u32);
            edges.push(EdgeData { name: ename, init: lookup(&init)?, term: lookup(&term)? });
        }
        let parse_token = |ln: usize, token: &str| -> Result<DirectedEdge> {
            let (name, forward) = match token.as_bytes().last() {
                Some(b'+') => (&token[..token.len() - 1], true),
                Some(b'-') => (&token[..token.len() - 1], false),
                _ => {
                    return Err(Error::parse(
                        ln,
                        format!("edge token {token:?} must end in + or -"),
                    ))
                }
            };
            let id = edge_index
                .get(name)
                .copied()
                .map(crate::complex::EdgeId)
                .ok_or_else(|| Error::parse(ln, format!("unknown edge {name:?}")))?;
            Ok(DirectedEdge { edge: id, forward })
        };
        let mut squares = Vec::with_capacity(square_rows.len());
        let mut square_index: BTreeMap<String, u32> = BTreeMap::new();
        for (ln, sname, tokens) in square_rows {
            let sides = SquareSides {
                bottom: parse_token(ln, &tokens[0])?,
                right: parse_token(ln, &tokens[1])?,
                top: parse_token(ln, &tokens[2])?,
                left: parse_token(ln, &tokens[3])?,
            };
            square_index.insert(sname.clone(), squares.len() as u32);
            squares.push((sname, sides));
        }
        let mut cubes = Vec::with_capacity(cube_rows.len());
        for (ln, cname, tokens) in cube_rows {
            let sq = |t: &str| {
                square_index
                    .get(t)
                    .copied()
                    .map(crate::complex::SquareId)
                    .ok_or_else(|| Error::parse(ln, format!("unknown square {t:?}")))
            };
            cubes.push(CubeSpec {
                name: cname,
                bottom: sq(&tokens[0])?,
                top: sq(&tokens[1])?,
                corners: [
                    parse_token(ln, &tokens[2])?,
                    parse_token(ln, &tokens[3])?,
                    parse_token(ln, &tokens[4])?,
                    parse_token(ln, &tokens[5])?,
                ],
                twist: None,
            });
        }
        let complex = CubeComplex::assemble(&name, vertices, edges, squares, cubes)
            .map_err(|e| Error::parse(header.number, e.to_string()))?;
        if self.complexes.insert(name.clone(), Arc::new(complex)).is_some() {
            return Err(Error::parse(header.number, format!("complex {name:?} already loaded")));
        }
        Ok((name, at))
    }

    fn parse_map_block(&mut self, lines: &[Line], start: usize) -> Result<(String, usize)> {
        let header = &lines[start];
        if header.tokens.len() != 4 {
            return Err(Error::parse(header.number, "usage: map NAME SRC DST"));
        }
        let name = header.tokens[1].to_string();
        let source = Arc::clone(
            self.complexes.get(header.tokens[2]).ok_or_else(|| {
                Error::parse(header.number, format!("unknown complex {:?}", header.tokens[2]))
            })?,
        );
        let target = Arc::clone(
            self.complexes.get(header.tokens[3]).ok_or_else(|| {
                Error::parse(header.number, format!("unknown complex {:?}", header.tokens[3]))
            })?,
        );
        let mut vertex_map: Vec<Option<crate::complex::VertexId>> =
            vec![None; source.n_vertices()];
        let mut edge_map: Vec<Option<EdgeImage>> = vec![None; source.n_edges()];
        let mut at = start + 1;
        while at < lines.len() {
            let line = &lines[at];
            let t = &line.tokens;
            match t[0] {
                "v" if t.len() == 3 => {
                    let sv = source.vertex_by_name(t[1]).ok_or_else(|| {
                        Error::parse(line.number, format!("unknown source vertex {:?}", t[1]))
                    })?;
                    let dv = target.vertex_by_name(t[2]).ok_or_else(|| {
                        Error::parse(line.number, format!("unknown target vertex {:?}", t[2]))
                    })?;
                    if vertex_map[sv.idx()].replace(dv).is_some() {
                        return Err(Error::parse(
                            line.number,
                            format!("vertex {:?} mapped twice", t[1]),
                        ));
                    }
                }
                "e" if t.len() == 3 => {
                    let se = source.edge_by_name(t[1]).ok_or_else(|| {
                        Error::parse(line.number, format!("unknown source edge {:?}", t[1]))
                    })?;
                    let token = t[2];
                    let (ename, forward) = match token.as_bytes().last() {
                        Some(b'+') => (&token[..token.len() - 1], true),
                        Some(b'-') => (&token[..token.len() - 1], false),
                        _ => {
                            return Err(Error::parse(
                                line.number,
                                format!("edge token {token:?} must end in + or -"),
                            ))
                        }
                    };
                    let de = target.edge_by_name(ename).ok_or_else(|| {
                        Error::parse(line.number, format!("unknown target edge {ename:?}"))
                    })?;
                    let image = EdgeImage::Edge(DirectedEdge { edge: de, forward });
                    if edge_map[se.idx()].replace(image).is_some() {
                        return Err(Error::parse(
                            line.number,
                            format!("edge {:?} mapped twice", t[1]),
                        ));
                    }
                }
                "complex" | "map" | "goc" => break,
                _ => {
                    return Err(Error::parse(
                        line.number,
                        format!("unexpected line in map block: {}", t.join(" ")),
                    ))
                }
            }
            at += 1;
        }
        let vertex_map = vertex_map
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::parse(
                        header.number,
                        format!("vertex {:?} has no image", source.vertex_name(crate::complex::VertexId(i as u32))),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let edge_map = edge_map
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                e.ok_or_else(|| {
                    Error::parse(
                        header.number,
                        format!("edge {:?} has no image", source.edge(crate::complex::EdgeId(i as u32)).name),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let map = CubicalMap::new(&name, source, target, vertex_map, edge_map)
            .map_err(|e| Error::parse(header.number, e.to_string()))?;
        if self.maps.insert(name.clone(), map).is_some() {
            return Err(Error::parse(header.number, format!("map {name:?} already loaded")));
        }
        Ok((name, at))
    }

    fn parse_goc_block(&mut self, lines: &[Line], start: usize) -> Result<(String, usize)> {
        let header = &lines[start];
        if header.tokens.len() != 2 {
            return Err(Error::parse(header.number, "usage: goc NAME"));
        }
        let name = header.tokens[1].to_string();
        let mut gvertices: Vec<(String, String)> = Vec::new();
        let mut gedges: Vec<(usize, String, String, String, String, String, String)> = Vec::new();
        let mut thetas: Vec<(usize, String, String)> = Vec::new();
        let mut psis: Vec<(usize, String, String)> = Vec::new();
        let mut constant: Option<(usize, String)> = None;
        let mut at = start + 1;
        while at < lines.len() {
            let line = &lines[at];
            let t = &line.tokens;
            match t[0] {
                "gvertex" if t.len() == 3 => gvertices.push((t[1].into(), t[2].into())),
                "gedge" if t.len() == 7 => gedges.push((
                    line.number,
                    t[1].into(),
                    t[2].into(),
                    t[3].into(),
                    t[4].into(),
                    t[5].into(),
                    t[6].into(),
                )),
                "theta" if t.len() == 3 => thetas.push((line.number, t[1].into(), t[2].into())),
                "psi" if t.len() == 3 => psis.push((line.number, t[1].into(), t[2].into())),
                "constant" if t.len() == 2 => constant = Some((line.number, t[1].into())),
                "complex" | "map" | "goc" => break,
                _ => {
                    return Err(Error::parse(
                        line.number,
                        format!("unexpected line in goc block: {}", t.join(" ")),
                    ))
                }
            }
            at += 1;
        }

        let vertex_names: Vec<String> = gvertices.iter().map(|(n, _)| n.clone()).collect();
        let gv_index: BTreeMap<String, usize> =
            vertex_names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut vertex_spaces = Vec::new();
        for (gv, cname) in &gvertices {
            let c = self.complexes.get(cname).ok_or_else(|| {
                Error::parse(header.number, format!("unknown complex {cname:?} for gvertex {gv:?}"))
            })?;
            vertex_spaces.push(Arc::clone(c));
        }
        let mut edges = Vec::new();
        let mut edge_spaces = Vec::new();
        let mut attach_minus = Vec::new();
        let mut attach_plus = Vec::new();
        let mut ge_index: BTreeMap<String, usize> = BTreeMap::new();
        for (ln, ename, u, w, espace, mminus, mplus) in &gedges {
            let init = *gv_index
                .get(u.as_str())
                .ok_or_else(|| Error::parse(*ln, format!("unknown gvertex {u:?}")))?;
            let term = *gv_index
                .get(w.as_str())
                .ok_or_else(|| Error::parse(*ln, format!("unknown gvertex {w:?}")))?;
            let space = self
                .complexes
                .get(espace)
                .ok_or_else(|| Error::parse(*ln, format!("unknown complex {espace:?}")))?;
            let minus = self
                .maps
                .get(mminus)
                .ok_or_else(|| Error::parse(*ln, format!("unknown map {mminus:?}")))?;
            let plus = self
                .maps
                .get(mplus)
                .ok_or_else(|| Error::parse(*ln, format!("unknown map {mplus:?}")))?;
            ge_index.insert(ename.clone(), edges.len());
            edges.push(GammaEdge { name: ename.clone(), init, term });
            edge_spaces.push(Arc::clone(space));
            attach_minus.push(minus.clone());
            attach_plus.push(plus.clone());
        }
        let goc = GraphOfComplexes {
            name: name.clone(),
            gamma: Gamma { name: name.clone(), vertices: vertex_names, edges },
            vertex_spaces,
            edge_spaces,
            attach_minus,
            attach_plus,
        };

        let lc = if thetas.is_empty() {
            None
        } else {
            let mut maps: Vec<Option<CubicalMap>> = vec![None; goc.gamma.edges.len()];
            for (ln, ename, mname) in &thetas {
                let i = *ge_index
                    .get(ename)
                    .ok_or_else(|| Error::parse(*ln, format!("unknown gedge {ename:?}")))?;
                let m = self
                    .maps
                    .get(mname)
                    .ok_or_else(|| Error::parse(*ln, format!("unknown map {mname:?}")))?;
                maps[i] = Some(m.clone());
            }
            let maps = maps
                .into_iter()
                .enumerate()
                .map(|(i, m)| {
                    m.ok_or_else(|| {
                        Error::parse(
                            header.number,
                            format!("gedge {:?} has no theta", goc.gamma.edges[i].name),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Some(LocallyConstantStructure { thetas: maps })
        };

        let constant = match (psis.is_empty(), constant) {
            (true, None) => None,
            (false, Some((ln, cname))) => {
                let space = Arc::clone(self.complexes.get(&cname).ok_or_else(|| {
                    Error::parse(ln, format!("unknown complex {cname:?}"))
                })?);
                let mut maps: Vec<Option<CubicalMap>> = vec![None; goc.gamma.vertices.len()];
                for (pln, gv, mname) in &psis {
                    let u = *gv_index
                        .get(gv.as_str())
                        .ok_or_else(|| Error::parse(*pln, format!("unknown gvertex {gv:?}")))?;
                    let m = self
                        .maps
                        .get(mname)
                        .ok_or_else(|| Error::parse(*pln, format!("unknown map {mname:?}")))?;
                    maps[u] = Some(m.clone());
                }
                let maps = maps
                    .into_iter()
                    .enumerate()
                    .map(|(u, m)| {
                        m.ok_or_else(|| {
                            Error::parse(
                                header.number,
                                format!("gvertex {:?} has no psi", goc.gamma.vertices[u]),
                            )
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(ConstantStructure { space, psi: maps })
            }
            _ => {
                return Err(Error::parse(
                    header.number,
                    "psi lines and the constant line must appear together",
                ))
            }
        };

        if self
            .gocs
            .insert(name.clone(), GocEntry { goc, lc, constant })
            .is_some()
        {
            return Err(Error::parse(header.number, format!("goc {name:?} already loaded")));
        }
        Ok((name, at))
    }
}

pub fn write_cux(c: &CubeComplex) -> String {
    let mut out = format!("complex {}\n", c.name());
    for v in c.vertex_ids() {
        out.push_str(&format!("vertex {}\n", c.vertex_name(v)));
    }
    for e in c.edge_ids() {
        let d = c.edge(e);
        out.push_str(&format!(
            "edge {} {} {}\n",
            d.name,
            c.vertex_name(d.init),
            c.vertex_name(d.term)
        ));
    }
    for s in c.square_ids() {
        let d = c.square(s);
        out.push_str(&format!(
            "square {} {} {} {} {}\n",
            d.name,
            c.edge_token(d.sides.bottom),
            c.edge_token(d.sides.right),
            c.edge_token(d.sides.top),
            c.edge_token(d.sides.left)
        ));
    }
    for id in c.cube_ids() {
        let d = c.cube(id);
        out.push_str(&format!(
            "cube3 {} {} {} {} {} {} {}\n",
            d.name,
            c.square(d.bottom).name,
            c.square(d.top).name,
            c.edge_token(d.corners[0]),
            c.edge_token(d.corners[1]),
            c.edge_token(d.corners[2]),
            c.edge_token(d.corners[3])
        ));
    }
    out
}

pub fn write_map(m: &CubicalMap) -> Result<String> {
    if !m.is_plain() {
        return Err(Error::map(m.name(), "collapsing maps have no text form"));
    }
    let source = m.source();
    let target = m.target();
    let mut out = format!("map {} {} {}\n", m.name(), source.name(), target.name());
    for v in source.vertex_ids() {
        out.push_str(&format!(
            "v {} {}\n",
            source.vertex_name(v),
            target.vertex_name(m.apply_vertex(v))
        ));
    }
    for e in source.edge_ids() {
        let image = m.apply_edge(DirectedEdge::fwd(e)).as_edge().unwrap();
        out.push_str(&format!(
            "e {} {}\n",
            source.edge(e).name,
            target.edge_token(image)
        ));
    }
    Ok(out)
}

pub fn write_goc_block(entry: &GocEntry) -> String {
    let g = &entry.goc;
    let mut out = format!("goc {}\n", g.name);
    for (u, name) in g.gamma.vertices.iter().enumerate() {
        out.push_str(&format!("gvertex {} {}\n", name, g.vertex_spaces[u].name()));
    }
    for (i, e) in g.gamma.edges.iter().enumerate() {
        out.push_str(&format!(
            "gedge {} {} {} {} {} {}\n",
            e.name,
            g.gamma.vertices[e.init],
            g.gamma.vertices[e.term],
            g.edge_spaces[i].name(),
            g.attach_minus[i].name(),
            g.attach_plus[i].name()
        ));
    }
    if let Some(lc) = &entry.lc {
        for (i, e) in g.gamma.edges.iter().enumerate() {
            out.push_str(&format!("theta {} {}\n", e.name, lc.thetas[i].name()));
        }
    }
    if let Some(cs) = &entry.constant {
        for (u, name) in g.gamma.vertices.iter().enumerate() {
            out.push_str(&format!("psi {} {}\n", name, cs.psi[u].name()));
        }
        out.push_str(&format!("constant {}\n", cs.space.name()));
    }
    out
}

/// Self-contained document for a datum: referenced complexes, maps, then
/// the goc block. Also the canonical form hashed into certificates.
pub fn write_goc_document(entry: &GocEntry) -> Result<String> {
    let g = &entry.goc;
    let mut complexes: BTreeMap<String, Arc<CubeComplex>> = BTreeMap::new();
    let mut push_complex = |c: &Arc<CubeComplex>| -> Result<()> {
        if let Some(prev) = complexes.get(c.name()) {
            if !same_complex(prev, c) {
                return Err(Error::goc(
                    &g.name,
                    format!("two different complexes named {:?}", c.name()),
                ));
            }
        } else {
            complexes.insert(c.name().to_string(), Arc::clone(c));
        }
        Ok(())
    };
    for c in g.vertex_spaces.iter().chain(g.edge_spaces.iter()) {
        push_complex(c)?;
    }
    if let Some(cs) = &entry.constant {
        push_complex(&cs.space)?;
    }

    let mut maps: BTreeMap<String, CubicalMap> = BTreeMap::new();
    let mut push_map = |m: &CubicalMap| -> Result<()> {
        if let Some(prev) = maps.get(m.name()) {
            if !prev.eq_data(m) {
                return Err(Error::goc(
                    &g.name,
                    format!("two different maps named {:?}", m.name()),
                ));
            }
        } else {
            maps.insert(m.name().to_string(), m.clone());
        }
        Ok(())
    };
    for m in g.attach_minus.iter().chain(g.attach_plus.iter()) {
        push_map(m)?;
    }
    if let Some(lc) = &entry.lc {
        for m in &lc.thetas {
            push_map(m)?;
        }
    }
    if let Some(cs) = &entry.constant {
        for m in &cs.psi {
            push_map(m)?;
        }
    }

    let mut out = String::new();
    for c in complexes.values() {
        out.push_str(&write_cux(c));
        out.push('\n');
    }
    for m in maps.values() {
        out.push_str(&write_map(m)?);
        out.push('\n');
    }
    out.push_str(&write_goc_block(entry));
    Ok(out)
}

/// SHA-256 of the canonical document of a datum.
pub fn input_hash(entry: &GocEntry) -> Result<String> {
    let doc = write_goc_document(entry)?;
    let mut hasher = Sha256::new();
    hasher.update(doc.as_bytes());
    Ok(hex::encode(hasher.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn smallest_loop_parses() {
        let mut ws = Workspace::new();
        ws.load_str("complex c\nvertex v\nedge a v v\n").unwrap();
        let c = ws.complex("c").unwrap();
        assert_eq!(c.cell_counts(), [1, 1, 0, 0]);
    }

    #[test]
    fn torus_file_parses_and_roundtrips() {
        let text = "\
complex torus
vertex v
edge a v v
edge b v v
square s a+ b+ a+ b+
";
        let mut ws = Workspace::new();
        ws.load_str(text).unwrap();
        let t = ws.complex("torus").unwrap();
        assert_eq!(t.cell_counts(), [1, 2, 1, 0]);
        assert_eq!(**t, corpus::torus());

        let serialized = write_cux(t);
        let mut ws2 = Workspace::new();
        ws2.load_str(&serialized).unwrap();
        assert_eq!(**ws2.complex("torus").unwrap(), **t);
    }

    #[test]
    fn loop_square_parses_validation_rejects_later() {
        let mut ws = Workspace::new();
        ws.load_str("complex c\nvertex v\nedge a v v\nsquare s a+ a+ a+ a+\n").unwrap();
        let c = ws.complex("c").unwrap();
        assert!(!c.validate().is_npc());
    }

    #[test]
    fn dangling_identifier_reports_line() {
        let mut ws = Workspace::new();
        let err = ws.load_str("complex c\nvertex v\nedge a v w\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn corner_incompatibility_is_rejected() {
        let text = "\
complex c
vertex v
vertex w
edge a v w
edge b v w
square s a+ b+ a+ b+
";
        let mut ws = Workspace::new();
        assert!(ws.load_str(text).is_err());
    }

    #[test]
    fn solid_cube_roundtrips_through_text() {
        let cube = corpus::solid_cube();
        let text = write_cux(&cube);
        let mut ws = Workspace::new();
        ws.load_str(&text).unwrap();
        assert_eq!(**ws.complex("solidcube").unwrap(), cube);
    }

    #[test]
    fn map_and_goc_blocks_resolve() {
        let rose = corpus::rose(2);
        let cycle3 = corpus::cycle(3);
        let mut text = write_cux(&rose);
        text.push_str(&write_cux(&cycle3));
        text.push_str("\nmap f cycle3 rose2\nv v0 v\nv v1 v\nv v2 v\ne c0 a+\ne c1 a+\ne c2 b+\n");
        text.push_str("map idrose rose2 rose2\nv v v\ne a a+\ne b b+\n");
        text.push_str("\ngoc d\ngvertex u0 rose2\ngvertex u1 rose2\ngedge d0 u0 u1 cycle3 f f\ntheta d0 idrose\n");
        let mut ws = Workspace::new();
        let items = ws.load_str(&text).unwrap();
        assert_eq!(items.len(), 5);
        let entry = ws.goc("d").unwrap();
        entry.goc.validate().unwrap();
        entry.lc.as_ref().unwrap().validate(&entry.goc).unwrap();
        let doc = write_goc_document(entry).unwrap();
        let mut ws2 = Workspace::new();
        ws2.load_str(&doc).unwrap();
        let again = write_goc_document(ws2.goc("d").unwrap()).unwrap();
        assert_eq!(doc, again);
        assert_eq!(input_hash(entry).unwrap(), input_hash(ws2.goc("d").unwrap()).unwrap());
    }
}
