//! Named modules over Ã(p,q): projectives, injectives, simples, their
//! τ-shifts, the quasi-simples of the two exceptional tubes and the
//! homogeneous modules E^(λ).
//!
//! Base modules are written down explicitly. τ-shifts of projectives and
//! injectives are realized by a seeded generic construction (see
//! [`strings`]) and certified exceptional before being handed out.

mod strings;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{format_rational, parse_rational, Matrix, Rational};
use crate::homcalc::{self, coxeter_apply, HomError};
use crate::quiverrep::{DimVector, Quiver, QuiverError, Representation};

pub use strings::{realize_generic, MAX_RETRIES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("cannot parse descriptor at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("{desc} is not valid for {quiver}: {reason}")]
    InvalidIndex {
        desc: String,
        quiver: String,
        reason: String,
    },
    #[error("{0} vanishes under τ")]
    Vanishes(String),
    #[error("{0} is only defined when p > 1")]
    NeedsTopPath(String),
    #[error("dimension vector {0:?} is not a positive real root")]
    NotRealRoot(DimVector),
    #[error("certification of {desc} failed after {attempts} attempts (seeds {seeds:?})")]
    CertificationFailed {
        desc: String,
        attempts: usize,
        seeds: Vec<u64>,
    },
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// Symbolic name of a catalog module.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Descriptor {
    Proj(usize),
    Inj(usize),
    Simple(usize),
    /// τ^{-t} P_v, t >= 1.
    TauProj(usize, usize),
    /// τ^{t} I_v, t >= 1.
    TauInj(usize, usize),
    /// E_i^(∞), i in [1,p].
    RegInf(usize),
    /// E_j^(0), j in [1,q].
    RegZero(usize),
    /// E^(λ), λ != 0.
    Homog(Rational),
    /// F_i = E_{p-i}^(∞), i in [1,p-1].
    F(usize),
    /// G_i = E_{q-i}^(0), i in [1,q-1].
    G(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModuleClass {
    Preprojective,
    Regular,
    Preinjective,
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Proj(v) => write!(f, "P({v})"),
            Descriptor::Inj(v) => write!(f, "I({v})"),
            Descriptor::Simple(v) => write!(f, "S({v})"),
            Descriptor::TauProj(t, v) => write!(f, "tP({t},{v})"),
            Descriptor::TauInj(t, v) => write!(f, "tI({t},{v})"),
            Descriptor::RegInf(i) => write!(f, "Einf({i})"),
            Descriptor::RegZero(j) => write!(f, "Ezero({j})"),
            Descriptor::Homog(l) => write!(f, "Ehom({})", format_rational(l)),
            Descriptor::F(i) => write!(f, "F({i})"),
            Descriptor::G(i) => write!(f, "G({i})"),
        }
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    base: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> CatalogError {
        CatalogError::Parse {
            position: self.base + self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn expect(&mut self, c: char) -> Result<(), CatalogError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn number(&mut self) -> Result<usize, CatalogError> {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a non-negative integer"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| CatalogError::Parse {
                position: self.base + start,
                message: "integer too large".into(),
            })
    }

    fn rational(&mut self) -> Result<Rational, CatalogError> {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '/') {
            self.pos += 1;
        }
        parse_rational(&self.text[start..self.pos]).map_err(|_| CatalogError::Parse {
            position: self.base + start,
            message: "expected a rational `num/den`".into(),
        })
    }
}

impl Descriptor {
    /// Parses one descriptor; `offset` is added to reported error positions
    /// so callers parsing lists can point into the original string.
    pub fn parse_at(text: &str, offset: usize) -> Result<Descriptor, CatalogError> {
        let mut cur = Cursor {
            text,
            pos: 0,
            base: offset,
        };
        cur.skip_ws();
        let name_pos = cur.pos;
        let name = cur.ident();
        cur.expect('(')?;
        let desc = match name {
            "P" => Descriptor::Proj(cur.number()?),
            "I" => Descriptor::Inj(cur.number()?),
            "S" => Descriptor::Simple(cur.number()?),
            "tP" | "tI" => {
                let t = cur.number()?;
                cur.expect(',')?;
                let v = cur.number()?;
                if name == "tP" {
                    Descriptor::TauProj(t, v)
                } else {
                    Descriptor::TauInj(t, v)
                }
            }
            "Einf" => Descriptor::RegInf(cur.number()?),
            "Ezero" => Descriptor::RegZero(cur.number()?),
            "Ehom" => Descriptor::Homog(cur.rational()?),
            "F" => Descriptor::F(cur.number()?),
            "G" => Descriptor::G(cur.number()?),
            "" => return Err(cur.err("expected a descriptor name")),
            other => {
                return Err(CatalogError::Parse {
                    position: offset + name_pos,
                    message: format!("unknown descriptor `{other}`"),
                })
            }
        };
        cur.expect(')')?;
        cur.skip_ws();
        if cur.pos != text.len() {
            return Err(cur.err("trailing characters"));
        }
        Ok(desc)
    }

    /// Checks index ranges against the quiver.
    pub fn validate(&self, quiver: &Quiver) -> Result<(), CatalogError> {
        let (p, q, n) = (quiver.p(), quiver.q(), quiver.num_vertices());
        let bad = |reason: String| {
            Err(CatalogError::InvalidIndex {
                desc: self.to_string(),
                quiver: quiver.to_string(),
                reason,
            })
        };
        match self {
            Descriptor::Proj(v) | Descriptor::Inj(v) | Descriptor::Simple(v) if *v >= n => {
                bad(format!("vertex must lie in [0,{}]", n - 1))
            }
            Descriptor::TauProj(t, v) | Descriptor::TauInj(t, v) => {
                if *t == 0 {
                    bad("shift must be at least 1".into())
                } else if *v >= n {
                    bad(format!("vertex must lie in [0,{}]", n - 1))
                } else {
                    Ok(())
                }
            }
            Descriptor::RegInf(i) if !(1..=p).contains(i) => bad(format!("index must lie in [1,{p}]")),
            Descriptor::RegZero(j) if !(1..=q).contains(j) => bad(format!("index must lie in [1,{q}]")),
            Descriptor::Homog(l) if l.is_zero() => bad("λ must be nonzero".into()),
            Descriptor::F(i) if !(1..p).contains(i) => {
                if p == 1 {
                    bad("F is empty when p = 1".into())
                } else {
                    bad(format!("index must lie in [1,{}]", p - 1))
                }
            }
            Descriptor::G(i) if !(1..q).contains(i) => bad(format!("index must lie in [1,{}]", q - 1)),
            _ => Ok(()),
        }
    }

    /// Replaces the aliases F and G by the tube quasi-simples they name.
    pub fn normalize(&self, quiver: &Quiver) -> Descriptor {
        match self {
            Descriptor::F(i) => Descriptor::RegInf(quiver.p() - i),
            Descriptor::G(i) => Descriptor::RegZero(quiver.q() - i),
            d => d.clone(),
        }
    }

    /// Canonical name for the isomorphism class: aliases are resolved, and
    /// simples that coincide with other catalog modules take their name
    /// (S_0 = P_0, S_{n-1} = I_{n-1}, interior simples are tube mouths).
    pub fn iso_key(&self, quiver: &Quiver) -> Descriptor {
        let (p, n) = (quiver.p(), quiver.num_vertices());
        match self.normalize(quiver) {
            Descriptor::Simple(0) => Descriptor::Proj(0),
            Descriptor::Simple(v) if v == n - 1 => Descriptor::Inj(v),
            Descriptor::Simple(v) if v < p => Descriptor::RegInf(v),
            Descriptor::Simple(v) => Descriptor::RegZero(v - p + 1),
            d => d,
        }
    }

    pub fn class(&self, quiver: &Quiver) -> ModuleClass {
        match self.iso_key(quiver) {
            Descriptor::Proj(_) | Descriptor::TauProj(..) => ModuleClass::Preprojective,
            Descriptor::Inj(_) | Descriptor::TauInj(..) => ModuleClass::Preinjective,
            _ => ModuleClass::Regular,
        }
    }

    /// Position in the preprojective component as `(t, v)` for τ^{-t}P_v.
    pub fn preprojective_position(&self, quiver: &Quiver) -> Option<(usize, usize)> {
        match self.iso_key(quiver) {
            Descriptor::Proj(v) => Some((0, v)),
            Descriptor::TauProj(t, v) => Some((t, v)),
            _ => None,
        }
    }

    /// Position in the preinjective component as `(t, v)` for τ^{t}I_v.
    pub fn preinjective_position(&self, quiver: &Quiver) -> Option<(usize, usize)> {
        match self.iso_key(quiver) {
            Descriptor::Inj(v) => Some((0, v)),
            Descriptor::TauInj(t, v) => Some((t, v)),
            _ => None,
        }
    }
}

impl FromStr for Descriptor {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Descriptor::parse_at(s, 0)
    }
}

/// Splits a comma-separated descriptor list, respecting parentheses. The
/// tokens `F*` and `G*` expand to the full F and G systems.
pub fn parse_sequence(text: &str, quiver: &Quiver) -> Result<Vec<Descriptor>, CatalogError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    let mut pieces = Vec::new();
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                pieces.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    pieces.push((start, &text[start..]));
    for (offset, piece) in pieces {
        match piece.trim() {
            "F*" => out.extend(f_system(quiver)),
            "G*" => out.extend(g_system(quiver)),
            "" => {
                return Err(CatalogError::Parse {
                    position: offset,
                    message: "empty descriptor".into(),
                })
            }
            _ => {
                let d = Descriptor::parse_at(piece, offset)?;
                d.validate(quiver)?;
                out.push(d);
            }
        }
    }
    Ok(out)
}

/// F = (F_1, ..., F_{p-1}); empty when p = 1.
pub fn f_system(quiver: &Quiver) -> Vec<Descriptor> {
    (1..quiver.p()).map(Descriptor::F).collect()
}

/// G = (G_1, ..., G_{q-1}).
pub fn g_system(quiver: &Quiver) -> Vec<Descriptor> {
    (1..quiver.q()).map(Descriptor::G).collect()
}

fn unit(n: usize, v: usize) -> DimVector {
    let mut x = vec![0; n];
    x[v] = 1;
    x
}

pub fn proj_dim(quiver: &Quiver, v: usize) -> DimVector {
    (0..quiver.num_vertices())
        .map(|w| quiver.path_count(v, w) as i64)
        .collect()
}

pub fn inj_dim(quiver: &Quiver, v: usize) -> DimVector {
    (0..quiver.num_vertices())
        .map(|w| quiver.path_count(w, v) as i64)
        .collect()
}

/// Dimension vector without building matrices.
pub fn descriptor_dim(desc: &Descriptor, quiver: &Quiver) -> Result<DimVector, CatalogError> {
    desc.validate(quiver)?;
    let (p, n) = (quiver.p(), quiver.num_vertices());
    let x = match desc.normalize(quiver) {
        Descriptor::Proj(v) => proj_dim(quiver, v),
        Descriptor::Inj(v) => inj_dim(quiver, v),
        Descriptor::Simple(v) => unit(n, v),
        Descriptor::TauProj(t, v) => coxeter_apply(quiver, &proj_dim(quiver, v), -(t as i64))?,
        Descriptor::TauInj(t, v) => coxeter_apply(quiver, &inj_dim(quiver, v), t as i64)?,
        Descriptor::RegInf(i) if i < p => unit(n, i),
        Descriptor::RegInf(_) => (0..n).map(|v| i64::from(v == 0 || v >= p)).collect(),
        Descriptor::RegZero(j) if j < quiver.q() => unit(n, p + j - 1),
        Descriptor::RegZero(_) => (0..n).map(|v| i64::from(v < p || v == n - 1)).collect(),
        Descriptor::Homog(_) => vec![1; n],
        Descriptor::F(_) | Descriptor::G(_) => unreachable!("normalized away"),
    };
    if x.iter().any(|&d| d < 0) {
        return Err(CatalogError::NotRealRoot(x));
    }
    Ok(x)
}

/// Symbolic τ^k: tube indices cycle, homogeneous modules are fixed, and
/// shifts of projectives/injectives move along their components. Fails when
/// a projective is pushed past τ or an injective past τ⁻.
pub fn tau_desc(desc: &Descriptor, k: i64, quiver: &Quiver) -> Result<Descriptor, CatalogError> {
    desc.validate(quiver)?;
    let (p, q) = (quiver.p() as i64, quiver.q() as i64);
    let vanish = || CatalogError::Vanishes(desc.to_string());
    Ok(match desc.iso_key(quiver) {
        Descriptor::Proj(v) => shift_proj(0, v, k).ok_or_else(vanish)?,
        Descriptor::TauProj(t, v) => shift_proj(t as i64, v, k).ok_or_else(vanish)?,
        Descriptor::Inj(v) => shift_inj(0, v, k).ok_or_else(vanish)?,
        Descriptor::TauInj(t, v) => shift_inj(t as i64, v, k).ok_or_else(vanish)?,
        Descriptor::RegInf(i) => Descriptor::RegInf(((i as i64 - 1 - k).rem_euclid(p) + 1) as usize),
        Descriptor::RegZero(j) => Descriptor::RegZero(((j as i64 - 1 - k).rem_euclid(q) + 1) as usize),
        d @ Descriptor::Homog(_) => d,
        other => unreachable!("iso_key never yields {other}"),
    })
}

fn shift_proj(t: i64, v: usize, k: i64) -> Option<Descriptor> {
    match t - k {
        0 => Some(Descriptor::Proj(v)),
        s if s > 0 => Some(Descriptor::TauProj(s as usize, v)),
        _ => None,
    }
}

fn shift_inj(t: i64, v: usize, k: i64) -> Option<Descriptor> {
    match t + k {
        0 => Some(Descriptor::Inj(v)),
        s if s > 0 => Some(Descriptor::TauInj(s as usize, v)),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    F,
    G,
}

/// τ^n applied to the set F or G, by the case analysis on `n` modulo the
/// tube rank: the set returns to itself after a full period, and otherwise
/// one member is traded for the remaining quasi-simple of the tube.
pub fn tau_power_set(which: Family, n: i64, quiver: &Quiver) -> Result<Vec<Descriptor>, CatalogError> {
    let (rank, members, mouth): (i64, Vec<Descriptor>, Descriptor) = match which {
        Family::F => {
            if quiver.p() == 1 {
                return Err(CatalogError::NeedsTopPath("τ-powers of F".into()));
            }
            (quiver.p() as i64, f_system(quiver), Descriptor::RegInf(quiver.p()))
        }
        Family::G => (quiver.q() as i64, g_system(quiver), Descriptor::RegZero(quiver.q())),
    };
    let r = n.rem_euclid(rank);
    if r == 0 {
        return Ok(members);
    }
    // τ^r drops the r-th member; τ^{-r} (i.e. n ≡ rank - r) drops member rank - r.
    let dropped = r as usize;
    let make = |i: usize| match which {
        Family::F => Descriptor::F(i),
        Family::G => Descriptor::G(i),
    };
    let mut out: Vec<Descriptor> = (1..rank as usize).filter(|&i| i != dropped).map(make).collect();
    out.push(mouth);
    Ok(out)
}

/// What the certification of a realization found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationCertificate {
    pub end_dim: usize,
    pub self_ext: usize,
    pub retries: usize,
    pub seed: u64,
}

/// Builds a representation of `desc`. Base modules are deterministic;
/// τ-shifts of projectives and injectives are sampled from `seed` and
/// certified exceptional, retrying at most [`MAX_RETRIES`] times.
pub fn realize(
    desc: &Descriptor,
    quiver: &Quiver,
    seed: u64,
) -> Result<(Representation, RealizationCertificate), CatalogError> {
    desc.validate(quiver)?;
    match desc.normalize(quiver) {
        Descriptor::TauProj(..) | Descriptor::TauInj(..) => {
            let x = descriptor_dim(desc, quiver)?;
            realize_generic(desc, &x, quiver, seed)
        }
        base => {
            let rep = realize_base(&base, quiver)?;
            let end_dim = homcalc::end_dim(&rep);
            let self_ext = homcalc::ext1_from_hom(&rep, &rep, end_dim)?;
            Ok((
                rep,
                RealizationCertificate {
                    end_dim,
                    self_ext,
                    retries: 0,
                    seed,
                },
            ))
        }
    }
}

/// Representation only; see [`realize`].
pub fn realize_rep(desc: &Descriptor, quiver: &Quiver, seed: u64) -> Result<Representation, CatalogError> {
    realize(desc, quiver, seed).map(|(r, _)| r)
}

fn realize_base(desc: &Descriptor, quiver: &Quiver) -> Result<Representation, CatalogError> {
    let (p, n) = (quiver.p(), quiver.num_vertices());
    let rep = match desc {
        Descriptor::Proj(v) => projective(quiver, *v)?,
        Descriptor::Inj(v) => injective(quiver, *v)?,
        Descriptor::Simple(v) => Representation::simple(quiver, *v)?,
        Descriptor::RegInf(i) if *i < p => Representation::simple(quiver, *i)?,
        Descriptor::RegZero(j) if *j < quiver.q() => Representation::simple(quiver, p + j - 1)?,
        Descriptor::RegInf(_) => {
            // K at the sink, along the bottom path and at the source; bottom
            // maps are the identity, the top path is zero.
            let dims: Vec<usize> = (0..n).map(|v| usize::from(v == 0 || v >= p)).collect();
            thin(quiver, dims, |arrow| arrow >= p, None)?
        }
        Descriptor::RegZero(_) => {
            let dims: Vec<usize> = (0..n).map(|v| usize::from(v < p || v == n - 1)).collect();
            thin(quiver, dims, |arrow| arrow < p, None)?
        }
        Descriptor::Homog(l) => {
            let dims = vec![1; n];
            thin(quiver, dims, |_| true, Some((quiver.top_sink_arrow(), l.clone())))?
        }
        other => unreachable!("{other} is not a base module"),
    };
    Ok(rep)
}

/// Representation with all spaces of dimension at most one; arrows chosen by
/// `live` carry 1 (or the override), all others 0.
fn thin(
    quiver: &Quiver,
    dims: Vec<usize>,
    live: impl Fn(usize) -> bool,
    special: Option<(usize, Rational)>,
) -> Result<Representation, QuiverError> {
    let maps = quiver
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut m = Matrix::zeros(dims[a.dst], dims[a.src]);
            if dims[a.dst] == 1 && dims[a.src] == 1 && live(i) {
                let val = match &special {
                    Some((idx, l)) if *idx == i => l.clone(),
                    _ => Rational::one(),
                };
                m.set(0, 0, val);
            }
            m
        })
        .collect();
    Representation::new(quiver.clone(), dims, maps)
}

/// Paths starting at `v`, as arrow-index sequences, grouped by end vertex.
fn paths_from(quiver: &Quiver, v: usize) -> Vec<Vec<Vec<usize>>> {
    let mut by_end = vec![Vec::new(); quiver.num_vertices()];
    let mut stack = vec![(v, Vec::new())];
    while let Some((at, path)) = stack.pop() {
        by_end[at].push(path.clone());
        for (i, a) in quiver.arrows().iter().enumerate() {
            if a.src == at {
                let mut next = path.clone();
                next.push(i);
                stack.push((a.dst, next));
            }
        }
    }
    for paths in &mut by_end {
        paths.sort();
    }
    by_end
}

/// P_v: at `w` the span of paths `v -> w`; arrows extend paths.
pub fn projective(quiver: &Quiver, v: usize) -> Result<Representation, QuiverError> {
    quiver.check_vertex(v)?;
    let by_end = paths_from(quiver, v);
    let dims: Vec<usize> = by_end.iter().map(Vec::len).collect();
    let maps = quiver
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut m = Matrix::zeros(dims[a.dst], dims[a.src]);
            for (col, path) in by_end[a.src].iter().enumerate() {
                let mut ext = path.clone();
                ext.push(i);
                let row = by_end[a.dst]
                    .iter()
                    .position(|p| *p == ext)
                    .expect("extended path ends at the target");
                m.set(row, col, Rational::one());
            }
            m
        })
        .collect();
    Representation::new(quiver.clone(), dims, maps)
}

/// I_v: at `w` the dual of the span of paths `w -> v`; an arrow `a` sends
/// the dual of a path starting with `a` to the dual of its remainder.
pub fn injective(quiver: &Quiver, v: usize) -> Result<Representation, QuiverError> {
    quiver.check_vertex(v)?;
    let n = quiver.num_vertices();
    let mut into: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    for w in 0..n {
        let from_w = paths_from(quiver, w);
        into[w] = from_w[v].clone();
    }
    let dims: Vec<usize> = into.iter().map(Vec::len).collect();
    let maps = quiver
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut m = Matrix::zeros(dims[a.dst], dims[a.src]);
            for (col, path) in into[a.src].iter().enumerate() {
                if path.first() == Some(&i) {
                    let rest = &path[1..];
                    let row = into[a.dst]
                        .iter()
                        .position(|p| p.as_slice() == rest)
                        .expect("remainder is a path from the target");
                    m.set(row, col, Rational::one());
                }
            }
            m
        })
        .collect();
    Representation::new(quiver.clone(), dims, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn q23() -> Quiver {
        Quiver::new(2, 3).unwrap()
    }

    #[test]
    fn grammar_roundtrip() {
        for s in ["P(4)", "I(0)", "S(3)", "tP(2,1)", "tI(6,2)", "Einf(2)", "Ezero(3)", "Ehom(-1/2)", "F(1)", "G(2)"] {
            let d: Descriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert_eq!("Ehom(1/1)".parse::<Descriptor>().unwrap(), Descriptor::Homog(rat(1)));
        assert_eq!(" tP( 3 , 1 ) ".parse::<Descriptor>().unwrap(), Descriptor::TauProj(3, 1));
    }

    #[test]
    fn grammar_errors_carry_positions() {
        match "tP(2;1)".parse::<Descriptor>() {
            Err(CatalogError::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        match "Q(1)".parse::<Descriptor>() {
            Err(CatalogError::Parse { position, .. }) => assert_eq!(position, 0),
            other => panic!("unexpected {other:?}"),
        }
        let q = q23();
        match parse_sequence("P(0),X(1)", &q) {
            Err(CatalogError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sequence_expands_family_tokens() {
        let q = q23();
        let seq = parse_sequence("S(4),F*,G*,P(0)", &q).unwrap();
        assert_eq!(
            seq,
            vec![
                Descriptor::Simple(4),
                Descriptor::F(1),
                Descriptor::G(1),
                Descriptor::G(2),
                Descriptor::Proj(0)
            ]
        );
    }

    #[test]
    fn descriptor_dims() {
        let q = q23();
        assert_eq!(descriptor_dim(&Descriptor::Proj(4), &q).unwrap(), vec![2, 1, 1, 1, 1]);
        assert_eq!(descriptor_dim(&Descriptor::Simple(3), &q).unwrap(), vec![0, 0, 0, 1, 0]);
        assert_eq!(descriptor_dim(&Descriptor::RegInf(2), &q).unwrap(), vec![1, 0, 1, 1, 1]);
        assert_eq!(descriptor_dim(&Descriptor::RegZero(3), &q).unwrap(), vec![1, 1, 0, 0, 1]);
        assert_eq!(descriptor_dim(&Descriptor::Homog(rat(3)), &q).unwrap(), vec![1; 5]);
        let x = descriptor_dim(&Descriptor::TauProj(1, 0), &q).unwrap();
        assert!(x.iter().all(|&d| d >= 0));
        assert_eq!(x, vec![1, 1, 1, 0, 0]);
    }

    #[test]
    fn symbolic_tau() {
        let q = q23();
        assert_eq!(tau_desc(&Descriptor::RegInf(2), 1, &q).unwrap(), Descriptor::RegInf(1));
        assert_eq!(tau_desc(&Descriptor::RegInf(1), 1, &q).unwrap(), Descriptor::RegInf(2));
        assert!(matches!(tau_desc(&Descriptor::Proj(3), 1, &q), Err(CatalogError::Vanishes(_))));
        assert_eq!(tau_desc(&Descriptor::Homog(rat(2)), 5, &q).unwrap(), Descriptor::Homog(rat(2)));
        assert_eq!(tau_desc(&Descriptor::Proj(3), -2, &q).unwrap(), Descriptor::TauProj(2, 3));
        assert_eq!(tau_desc(&Descriptor::TauProj(2, 3), 2, &q).unwrap(), Descriptor::Proj(3));
        assert!(tau_desc(&Descriptor::TauProj(2, 3), 3, &q).is_err());
        assert_eq!(tau_desc(&Descriptor::Inj(1), 1, &q).unwrap(), Descriptor::TauInj(1, 1));
        assert!(tau_desc(&Descriptor::Inj(1), -1, &q).is_err());
        // G_1 = E_2^(0) -> G_2 = E_1^(0) -> E_3^(0) -> G_1.
        assert_eq!(tau_desc(&Descriptor::G(1), 1, &q).unwrap(), Descriptor::G(2).normalize(&q));
        assert_eq!(tau_desc(&Descriptor::G(2), 1, &q).unwrap(), Descriptor::RegZero(3));
        assert_eq!(tau_desc(&Descriptor::RegZero(3), 1, &q).unwrap(), Descriptor::G(1).normalize(&q));
    }

    #[test]
    fn family_systems() {
        let q = q23();
        assert_eq!(f_system(&q), vec![Descriptor::F(1)]);
        assert_eq!(g_system(&q), vec![Descriptor::G(1), Descriptor::G(2)]);
        assert_eq!(f_system(&q).iter().map(|d| d.iso_key(&q)).collect::<Vec<_>>(), vec![Descriptor::RegInf(1)]);
        let q12 = Quiver::new(1, 2).unwrap();
        assert!(f_system(&q12).is_empty());
        assert_eq!(g_system(&q12), vec![Descriptor::G(1)]);
        let q33 = Quiver::new(3, 3).unwrap();
        assert_eq!((f_system(&q33).len(), g_system(&q33).len()), (2, 2));
    }

    #[test]
    fn tau_power_sets() {
        let q = Quiver::new(3, 3).unwrap();
        assert_eq!(tau_power_set(Family::F, 3, &q).unwrap(), f_system(&q));
        assert_eq!(
            tau_power_set(Family::F, 1, &q).unwrap(),
            vec![Descriptor::F(2), Descriptor::RegInf(3)]
        );
        assert_eq!(
            tau_power_set(Family::G, -1, &q).unwrap(),
            vec![Descriptor::G(1), Descriptor::RegZero(3)]
        );
        assert!(tau_power_set(Family::F, 1, &Quiver::new(1, 2).unwrap()).is_err());
    }

    #[test]
    fn base_realizations() {
        let q = q23();
        let (p4, cert) = realize(&Descriptor::Proj(4), &q, 0).unwrap();
        assert_eq!(p4.dims(), &[2, 1, 1, 1, 1]);
        assert_eq!((cert.end_dim, cert.self_ext), (1, 0));
        let i0 = realize_rep(&Descriptor::Inj(0), &q, 0).unwrap();
        assert_eq!(i0.dims(), &[1, 1, 1, 1, 2]);
        let e = realize_rep(&Descriptor::RegInf(2), &q, 0).unwrap();
        assert_eq!(e.dims(), &[1, 0, 1, 1, 1]);
        for idx in 2..5 {
            assert!(e.map(idx).get(0, 0).is_one());
        }
        let h = realize_rep(&Descriptor::Homog(rat(5)), &q, 0).unwrap();
        assert_eq!(*h.map(q.top_sink_arrow()).get(0, 0), rat(5));
        assert_eq!(h.map(0).get(0, 0), &rat(1));
    }

    #[test]
    fn iso_keys_identify_simples() {
        let q = q23();
        assert_eq!(Descriptor::Simple(0).iso_key(&q), Descriptor::Proj(0));
        assert_eq!(Descriptor::Simple(4).iso_key(&q), Descriptor::Inj(4));
        assert_eq!(Descriptor::Simple(1).iso_key(&q), Descriptor::RegInf(1));
        assert_eq!(Descriptor::Simple(3).iso_key(&q), Descriptor::RegZero(2));
        assert_eq!(Descriptor::F(1).iso_key(&q), Descriptor::RegInf(1));
        assert_eq!(Descriptor::G(1).iso_key(&q), Descriptor::RegZero(2));
    }
}
