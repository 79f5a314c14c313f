//! The quiver Ã(p,q) with one source and one sink, and its finite-dimensional
//! representations over Q.
//!
//! Vertices are `0..p+q`. Vertex `p+q-1` is the source and `0` the sink. The
//! top path runs through `p-1, ..., 1`, the bottom path through
//! `p+q-2, ..., p`. Arrows are stored top path first, each path listed from
//! the source towards the sink; that order is part of the serialized format.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{format_rational, parse_rational, ExactError, Matrix};

/// Dimension vectors; entries may go negative in intermediate Coxeter
/// arithmetic, never in the dimension vector of an actual representation.
pub type DimVector = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("maps do not fit the dimension vector: {}", describe(.0))]
    Shape(Vec<ShapeMismatch>),
    #[error("representations live over different quivers")]
    QuiverMismatch,
    #[error("malformed representation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn describe(list: &[ShapeMismatch]) -> String {
    list.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quiver {
    p: usize,
    q: usize,
    arrows: Vec<Arrow>,
}

impl Quiver {
    /// Requires `1 <= p <= q` and `q >= 2`; `p > q` is rejected, not swapped.
    pub fn new(p: usize, q: usize) -> Result<Self, QuiverError> {
        if p < 1 {
            return Err(QuiverError::InvalidParameters(format!(
                "p must be at least 1 (got p={p})"
            )));
        }
        if q < 2 {
            return Err(QuiverError::InvalidParameters(format!(
                "q must be at least 2 (got q={q})"
            )));
        }
        if q < p {
            return Err(QuiverError::InvalidParameters(format!(
                "p must not exceed q (got p={p}, q={q})"
            )));
        }
        let n = p + q;
        let s = n - 1;
        let mut arrows = Vec::with_capacity(n);
        if p == 1 {
            arrows.push(Arrow { src: s, dst: 0 });
        } else {
            arrows.push(Arrow { src: s, dst: p - 1 });
            for v in (1..p).rev() {
                arrows.push(Arrow { src: v, dst: v - 1 });
            }
        }
        for v in (p + 1..=s).rev() {
            arrows.push(Arrow { src: v, dst: v - 1 });
        }
        arrows.push(Arrow { src: p, dst: 0 });
        Ok(Quiver { p, q, arrows })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn num_vertices(&self) -> usize {
        self.p + self.q
    }

    pub fn source(&self) -> usize {
        self.p + self.q - 1
    }

    pub fn sink(&self) -> usize {
        0
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    /// Index of the last top-path arrow, the one entering the sink along the
    /// top (`1 -> 0`, or `s -> 0` when p = 1).
    pub fn top_sink_arrow(&self) -> usize {
        self.p - 1
    }

    /// Vertices strictly inside the top path, `1..p`.
    pub fn top_vertices(&self) -> std::ops::Range<usize> {
        1..self.p
    }

    /// Vertices strictly inside the bottom path, `p..p+q-1`.
    pub fn bottom_vertices(&self) -> std::ops::Range<usize> {
        self.p..self.p + self.q - 1
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), QuiverError> {
        if v < self.num_vertices() {
            Ok(())
        } else {
            Err(QuiverError::VertexOutOfRange {
                vertex: v,
                n: self.num_vertices(),
            })
        }
    }

    /// Number of paths from `u` to `w` (0, 1, or 2 for source to sink).
    pub fn path_count(&self, u: usize, w: usize) -> usize {
        if u == w {
            return 1;
        }
        let s = self.source();
        let on_top = |v: usize| v >= 1 && v < self.p;
        let on_bottom = |v: usize| v >= self.p && v < s;
        match (u, w) {
            (u, 0) if u == s => 2,
            (u, _) if u == s => 1,
            (u, 0) if on_top(u) || on_bottom(u) => 1,
            (u, w) if on_top(u) && on_top(w) && w < u => 1,
            (u, w) if on_bottom(u) && on_bottom(w) && w < u => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A~({},{})", self.p, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeMismatch {
    pub arrow: usize,
    pub src: usize,
    pub dst: usize,
    pub expected: (usize, usize),
    pub found: (usize, usize),
}

impl fmt::Display for ShapeMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "arrow {} ({} -> {}) expects {}x{}, found {}x{}",
            self.arrow,
            self.src,
            self.dst,
            self.expected.0,
            self.expected.1,
            self.found.0,
            self.found.1
        )
    }
}

/// Checks dims and map shapes against the quiver. An arrow `u -> v` needs a
/// `dims[v] x dims[u]` matrix.
pub fn validate(quiver: &Quiver, dims: &[usize], maps: &[Matrix]) -> Result<(), Vec<ShapeMismatch>> {
    let mut bad = Vec::new();
    for (i, a) in quiver.arrows().iter().enumerate() {
        let expected = (
            dims.get(a.dst).copied().unwrap_or(0),
            dims.get(a.src).copied().unwrap_or(0),
        );
        let found = maps.get(i).map_or((usize::MAX, usize::MAX), |m| (m.rows(), m.cols()));
        if expected != found {
            bad.push(ShapeMismatch {
                arrow: i,
                src: a.src,
                dst: a.dst,
                expected,
                found,
            });
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    quiver: Quiver,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

impl Representation {
    pub fn new(quiver: Quiver, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self, QuiverError> {
        if dims.len() != quiver.num_vertices() {
            return Err(QuiverError::Malformed(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                quiver.num_vertices()
            )));
        }
        if maps.len() != quiver.arrows().len() {
            return Err(QuiverError::Malformed(format!(
                "{} maps for {} arrows",
                maps.len(),
                quiver.arrows().len()
            )));
        }
        validate(&quiver, &dims, &maps).map_err(QuiverError::Shape)?;
        Ok(Representation { quiver, dims, maps })
    }

    pub fn zero(quiver: &Quiver) -> Self {
        let n = quiver.num_vertices();
        Representation {
            quiver: quiver.clone(),
            dims: vec![0; n],
            maps: vec![Matrix::zeros(0, 0); n],
        }
    }

    pub fn simple(quiver: &Quiver, v: usize) -> Result<Self, QuiverError> {
        quiver.check_vertex(v)?;
        let mut dims = vec![0; quiver.num_vertices()];
        dims[v] = 1;
        let maps = quiver
            .arrows()
            .iter()
            .map(|a| Matrix::zeros(dims[a.dst], dims[a.src]))
            .collect();
        Representation::new(quiver.clone(), dims, maps)
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_vector(&self) -> DimVector {
        self.dims.iter().map(|&d| d as i64).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn map(&self, arrow: usize) -> &Matrix {
        &self.maps[arrow]
    }

    pub fn validate(&self) -> Result<(), Vec<ShapeMismatch>> {
        validate(&self.quiver, &self.dims, &self.maps)
    }

    /// Multiplicity of the simple at `v` as a composition factor, which for
    /// a quiver representation is the dimension at `v`.
    pub fn comp_factor_mult(&self, v: usize) -> Result<usize, QuiverError> {
        self.quiver.check_vertex(v)?;
        Ok(self.dims[v])
    }

    pub fn supp(&self) -> BTreeSet<usize> {
        (0..self.dims.len()).filter(|&v| self.dims[v] > 0).collect()
    }

    pub fn sincere(&self) -> bool {
        self.dims.iter().all(|&d| d > 0)
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Block-diagonal sum; the empty sum needs the quiver to be known, so the
    /// caller passes it.
    pub fn direct_sum(quiver: &Quiver, reps: &[&Representation]) -> Result<Self, QuiverError> {
        if reps.iter().any(|r| r.quiver != *quiver) {
            return Err(QuiverError::QuiverMismatch);
        }
        let n = quiver.num_vertices();
        let dims: Vec<usize> = (0..n).map(|v| reps.iter().map(|r| r.dims[v]).sum()).collect();
        let maps = quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let mut m = Matrix::zeros(dims[a.dst], dims[a.src]);
                let (mut r0, mut c0) = (0, 0);
                for rep in reps {
                    let block = &rep.maps[i];
                    for r in 0..block.rows() {
                        for c in 0..block.cols() {
                            m.set(r0 + r, c0 + c, block.get(r, c).clone());
                        }
                    }
                    r0 += rep.dims[a.dst];
                    c0 += rep.dims[a.src];
                }
                m
            })
            .collect();
        Representation::new(quiver.clone(), dims, maps)
    }

    pub fn to_json(&self) -> RepresentationJson {
        RepresentationJson {
            p: self.quiver.p(),
            q: self.quiver.q(),
            dims: self.dims.clone(),
            maps: self
                .quiver
                .arrows()
                .iter()
                .zip(&self.maps)
                .map(|(a, m)| MapJson {
                    src: a.src,
                    dst: a.dst,
                    rows: m.rows(),
                    cols: m.cols(),
                    entries: m.entries().iter().map(format_rational).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &RepresentationJson) -> Result<Self, QuiverError> {
        let quiver = Quiver::new(json.p, json.q)?;
        if json.maps.len() != quiver.arrows().len() {
            return Err(QuiverError::Malformed(format!(
                "{} maps for {} arrows",
                json.maps.len(),
                quiver.arrows().len()
            )));
        }
        let mut maps = Vec::with_capacity(json.maps.len());
        for (a, m) in quiver.arrows().iter().zip(&json.maps) {
            if (m.src, m.dst) != (a.src, a.dst) {
                return Err(QuiverError::Malformed(format!(
                    "map for {} -> {} listed where {} -> {} belongs",
                    m.src, m.dst, a.src, a.dst
                )));
            }
            let entries = m
                .entries
                .iter()
                .map(|e| parse_rational(e))
                .collect::<Result<Vec<_>, _>>()?;
            maps.push(Matrix::from_entries(m.rows, m.cols, entries)?);
        }
        Representation::new(quiver, json.dims.clone(), maps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub src: usize,
    pub dst: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub p: usize,
    pub q: usize,
    pub dims: Vec<usize>,
    pub maps: Vec<MapJson>,
}

/// Union of supports.
pub fn supp_union<'a, I>(reps: I) -> BTreeSet<usize>
where
    I: IntoIterator<Item = &'a Representation>,
{
    reps.into_iter().flat_map(|r| r.supp()).collect()
}
