//! Canonical JSON form of atlases.
//!
//! Numbers in ℚ(ζ_m) are arrays of m "p/q" strings (power basis coefficients),
//! points are arrays of numbers, matrices are row-major. Charts are referenced by id.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::atlas::{Atlas, AtlasParts, Chart, Embedding, OracleSpec, Span, SpanWitness};
use crate::error::{Error, Result};
use crate::numerics::{AffineMap, Ball, CycNum, PointC};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    #[serde(rename = "A")]
    pub a: Vec<Vec<CycNum>>,
    pub b: Vec<CycNum>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ChartDoc {
    pub id: String,
    pub center: Vec<CycNum>,
    pub radius2: CycNum,
    pub group: Vec<MapDoc>,
}

impl ChartDoc {
    pub fn from_chart(c: &Chart) -> ChartDoc {
        ChartDoc {
            id: c.id.clone(),
            center: c.domain.center.0.clone(),
            radius2: c.domain.r2.clone(),
            group: c.group.iter().map(MapDoc::from_map).collect(),
        }
    }

    pub fn to_chart(&self, m: u32, n: usize, at: &str) -> Result<Chart> {
        let center = check_point(&self.center, m, n, &format!("{at}.center"))?;
        if self.radius2.conductor() != m {
            return Err(Error::parse(format!("{at}.radius2"), "wrong conductor"));
        }
        let group = self
            .group
            .iter()
            .enumerate()
            .map(|(g, d)| d.to_map(m, &format!("{at}.group[{g}]")))
            .collect::<Result<Vec<_>>>()?;
        if group.iter().any(|g| g.dim() != n) {
            return Err(Error::parse(format!("{at}.group"), "wrong dimension"));
        }
        Ok(Chart::new(self.id.clone(), Ball::new(center, self.radius2.clone()), group))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct EmbeddingDoc {
    src: String,
    dst: String,
    #[serde(rename = "A")]
    a: Vec<Vec<CycNum>>,
    b: Vec<CycNum>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct OracleParams {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    entries: Vec<[String; 3]>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct OracleDoc {
    kind: String,
    #[serde(default)]
    params: OracleParams,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct WitnessDoc {
    i: String,
    j: String,
    k: String,
    point: Vec<CycNum>,
    left: MapDoc,
    right: MapDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct ProbeDoc {
    chart: String,
    point: Vec<CycNum>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct AtlasDoc {
    conductor: u32,
    dimension: usize,
    charts: Vec<ChartDoc>,
    embeddings: Vec<EmbeddingDoc>,
    oracle: OracleDoc,
    #[serde(default)]
    witnesses: Vec<WitnessDoc>,
    #[serde(default)]
    probes: Vec<ProbeDoc>,
}

impl MapDoc {
    pub fn from_map(f: &AffineMap) -> MapDoc {
        MapDoc {
            a: f.matrix().to_vec(),
            b: f.offset().0.clone(),
        }
    }

    pub fn to_map(&self, m: u32, at: &str) -> Result<AffineMap> {
        AffineMap::new(m, self.a.clone(), PointC::new(self.b.clone())).map_err(|e| Error::parse(at, e.to_string()))
    }
}

pub(crate) fn check_point(p: &[CycNum], m: u32, n: usize, at: &str) -> Result<PointC> {
    if p.len() != n {
        return Err(Error::parse(at, format!("expected {n} coordinates, found {}", p.len())));
    }
    if let Some(c) = p.iter().find(|c| c.conductor() != m) {
        return Err(Error::parse(at, format!("coordinate has {} coefficients, conductor is {m}", c.conductor())));
    }
    Ok(PointC::new(p.to_vec()))
}

pub(crate) const MAX_CONDUCTOR: u32 = 240;

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

/// Serializes any document with the crate's canonical layout: pretty JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

/// Parses a document, reporting the line and column of syntax errors.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn atlas_to_json(atlas: &Atlas) -> String {
    to_canonical_json(&to_doc(atlas))
}

/// Parses an atlas document. Structural problems are parse errors; mathematical
/// invariants are left to `validate_atlas`.
pub fn atlas_from_json(text: &str) -> Result<Atlas> {
    let doc: AtlasDoc = from_json(text)?;
    from_doc(doc)
}

pub fn parse_atlas(path: &std::path::Path) -> Result<Atlas> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    atlas_from_json(&text)
}

/// SHA-256 of the canonical serialization, as lowercase hex.
pub fn atlas_hash(atlas: &Atlas) -> String {
    hex::encode(Sha256::digest(atlas_to_json(atlas).as_bytes()))
}

fn to_doc(atlas: &Atlas) -> AtlasDoc {
    let id = |k: usize| atlas.chart(k).id.clone();
    let charts = atlas
        .charts()
        .iter()
        .map(ChartDoc::from_chart)
        .collect();
    let embeddings = atlas
        .embeddings()
        .iter()
        .map(|e| EmbeddingDoc {
            src: id(e.src),
            dst: id(e.dst),
            a: e.map.matrix().to_vec(),
            b: e.map.offset().0.clone(),
        })
        .collect();
    let oracle = match atlas.oracle() {
        OracleSpec::GlobalQuotient => OracleDoc {
            kind: "global_quotient".into(),
            params: OracleParams::default(),
        },
        OracleSpec::Gluing => OracleDoc {
            kind: "gluing".into(),
            params: OracleParams::default(),
        },
        OracleSpec::SpanTable(entries) => OracleDoc {
            kind: "span_table".into(),
            params: OracleParams {
                entries: entries.iter().map(|e| [id(e[0]), id(e[1]), id(e[2])]).collect(),
            },
        },
    };
    let witnesses = atlas
        .witnesses()
        .iter()
        .map(|w| WitnessDoc {
            i: id(w.i),
            j: id(w.j),
            k: id(w.span.k),
            point: w.span.x_k.0.clone(),
            left: MapDoc::from_map(&w.span.left),
            right: MapDoc::from_map(&w.span.right),
        })
        .collect();
    let probes = atlas
        .probes()
        .iter()
        .map(|(c, p)| ProbeDoc {
            chart: id(*c),
            point: p.0.clone(),
        })
        .collect();
    AtlasDoc {
        conductor: atlas.conductor(),
        dimension: atlas.dim(),
        charts,
        embeddings,
        oracle,
        witnesses,
        probes,
    }
}

fn from_doc(doc: AtlasDoc) -> Result<Atlas> {
    let m = doc.conductor;
    let n = doc.dimension;
    if m == 0 || m > MAX_CONDUCTOR {
        return Err(Error::parse("conductor", format!("unsupported conductor {m}")));
    }
    let ids: Vec<&str> = doc.charts.iter().map(|c| c.id.as_str()).collect();
    let lookup = |s: &str, at: &str| -> Result<usize> {
        ids.iter()
            .position(|x| *x == s)
            .ok_or_else(|| Error::parse(at, format!("unknown chart id {s:?}")))
    };
    let charts = doc
        .charts
        .iter()
        .enumerate()
        .map(|(k, c)| c.to_chart(m, n, &format!("charts[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let mut embeddings = Vec::new();
    for (k, e) in doc.embeddings.iter().enumerate() {
        let at = format!("embeddings[{k}]");
        let map = MapDoc {
            a: e.a.clone(),
            b: e.b.clone(),
        }
        .to_map(m, &at)?;
        embeddings.push(Embedding {
            src: lookup(&e.src, &format!("{at}.src"))?,
            dst: lookup(&e.dst, &format!("{at}.dst"))?,
            map,
        });
    }
    let oracle = match doc.oracle.kind.as_str() {
        "global_quotient" => OracleSpec::GlobalQuotient,
        "gluing" => OracleSpec::Gluing,
        "span_table" => OracleSpec::SpanTable(
            doc.oracle
                .params
                .entries
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    let at = format!("oracle.params.entries[{k}]");
                    Ok([lookup(&e[0], &at)?, lookup(&e[1], &at)?, lookup(&e[2], &at)?])
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        other => return Err(Error::parse("oracle.kind", format!("unknown oracle kind {other:?}"))),
    };
    let mut witnesses = Vec::new();
    for (k, w) in doc.witnesses.iter().enumerate() {
        let at = format!("witnesses[{k}]");
        witnesses.push(SpanWitness {
            i: lookup(&w.i, &format!("{at}.i"))?,
            j: lookup(&w.j, &format!("{at}.j"))?,
            span: Span {
                k: lookup(&w.k, &format!("{at}.k"))?,
                x_k: check_point(&w.point, m, n, &format!("{at}.point"))?,
                left: w.left.to_map(m, &format!("{at}.left"))?,
                right: w.right.to_map(m, &format!("{at}.right"))?,
            },
        });
    }
    let mut probes = Vec::new();
    for (k, p) in doc.probes.iter().enumerate() {
        let at = format!("probes[{k}]");
        probes.push((lookup(&p.chart, &format!("{at}.chart"))?, check_point(&p.point, m, n, &format!("{at}.point"))?));
    }
    Atlas::new(AtlasParts {
        conductor: m,
        dim: n,
        charts,
        embeddings,
        oracle,
        witnesses,
        probes,
    })
    .map_err(|e| Error::parse("atlas", e.to_string()))
}
