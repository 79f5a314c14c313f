//! Stratifying systems (exceptional sequences) built from F, G and one
//! preprojective or preinjective module, checked by direct computation and
//! compared against the closed-form classification.
//!
//! A sequence `(X_1, ..., X_t)` passes when every member is exceptional and
//! `Hom(X_j, X_i) = 0 = Ext¹(X_j, X_i)` whenever `j > i`.
//!
//! Searches lean on one cheap necessary condition: `Hom = 0 = Ext¹` forces
//! the Euler form of the two dimension vectors to vanish, so candidates are
//! filtered on dimension vectors before anything is realized.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{self, descriptor_dim, f_system, g_system, CatalogError, Descriptor, RealizationCertificate};
use crate::exactnum::{rat, Rational};
use crate::homcalc::{self, euler_form, HomError};
use crate::quiverrep::{DimVector, Quiver, Representation};

#[derive(Debug, Error)]
pub enum StrataError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error("{0} is outside every family of the classification")]
    OutsideFamilies(String),
    #[error("unknown side `{0}` (expected postprojective or preinjective)")]
    UnknownSide(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Postprojective,
    Preinjective,
}

impl FromStr for Side {
    type Err = StrataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "postprojective" | "preprojective" | "pp" => Ok(Side::Postprojective),
            "preinjective" | "pi" => Ok(Side::Preinjective),
            other => Err(StrataError::UnknownSide(other.to_string())),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Postprojective => "postprojective",
            Side::Preinjective => "preinjective",
        })
    }
}

/// `τ^{-t}P_v`, written `P(v)` when `t = 0`.
pub fn shifted_proj(t: usize, v: usize) -> Descriptor {
    if t == 0 {
        Descriptor::Proj(v)
    } else {
        Descriptor::TauProj(t, v)
    }
}

/// `τ^{t}I_v`, written `I(v)` when `t = 0`.
pub fn shifted_inj(t: usize, v: usize) -> Descriptor {
    if t == 0 {
        Descriptor::Inj(v)
    } else {
        Descriptor::TauInj(t, v)
    }
}

pub struct Realized {
    pub rep: Representation,
    pub cert: RealizationCertificate,
}

/// Realizations and Hom dimensions, memoized by isomorphism class. All
/// realizations use the bank's seed, so results do not depend on the order
/// in which workers ask for them.
pub struct ModuleBank {
    quiver: Quiver,
    seed: u64,
    lambda: Rational,
    dims: Mutex<HashMap<Descriptor, DimVector>>,
    reps: Mutex<HashMap<Descriptor, Arc<Realized>>>,
    homs: Mutex<HashMap<(Descriptor, Descriptor), usize>>,
}

impl ModuleBank {
    pub fn new(quiver: &Quiver, seed: u64) -> Self {
        ModuleBank {
            quiver: quiver.clone(),
            seed,
            lambda: rat(1),
            dims: Mutex::new(HashMap::new()),
            reps: Mutex::new(HashMap::new()),
            homs: Mutex::new(HashMap::new()),
        }
    }

    /// Parameter of the homogeneous module offered as a completion candidate.
    pub fn with_lambda(mut self, lambda: Rational) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self, d: &Descriptor) -> Result<DimVector, CatalogError> {
        let key = d.iso_key(&self.quiver);
        if let Some(x) = self.dims.lock().expect("bank lock").get(&key) {
            return Ok(x.clone());
        }
        let x = descriptor_dim(d, &self.quiver)?;
        self.dims.lock().expect("bank lock").insert(key, x.clone());
        Ok(x)
    }

    pub fn get(&self, d: &Descriptor) -> Result<Arc<Realized>, CatalogError> {
        let key = d.iso_key(&self.quiver);
        if let Some(r) = self.reps.lock().expect("bank lock").get(&key) {
            return Ok(Arc::clone(r));
        }
        let (rep, cert) = catalog::realize(d, &self.quiver, self.seed)?;
        let r = Arc::new(Realized { rep, cert });
        self.reps
            .lock()
            .expect("bank lock")
            .entry(key)
            .or_insert_with(|| Arc::clone(&r));
        Ok(r)
    }

    pub fn euler(&self, a: &Descriptor, b: &Descriptor) -> Result<i64, StrataError> {
        Ok(euler_form(&self.quiver, &self.dim(a)?, &self.dim(b)?)?)
    }

    pub fn hom(&self, a: &Descriptor, b: &Descriptor) -> Result<usize, StrataError> {
        let key = (a.iso_key(&self.quiver), b.iso_key(&self.quiver));
        if let Some(&h) = self.homs.lock().expect("bank lock").get(&key) {
            return Ok(h);
        }
        let (ra, rb) = (self.get(a)?, self.get(b)?);
        let h = homcalc::hom_dim(&ra.rep, &rb.rep)?;
        self.homs.lock().expect("bank lock").insert(key, h);
        Ok(h)
    }

    pub fn ext(&self, a: &Descriptor, b: &Descriptor) -> Result<usize, StrataError> {
        let h = self.hom(a, b)?;
        let e = h as i64 - self.euler(a, b)?;
        if e < 0 {
            return Err(HomError::NegativeExt {
                hom: h,
                euler: self.euler(a, b)?,
            }
            .into());
        }
        Ok(e as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Hom,
    Ext,
    SelfExt,
    NotIndecomposable,
    /// Predicted by the classification, not found by search.
    YMissing,
    /// Found by search, not predicted.
    YUnexpected,
    /// Number of completions found differs from one.
    CompletionCount,
    /// The completion found is not the predicted one.
    CompletionMismatch,
    /// A predicted complete sequence fails the axioms.
    Quadruple,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant serializes");
        f.write_str(s.as_str().expect("string"))
    }
}

/// One failed condition. For sequence checks `j`, `i` are 1-based positions
/// and `dim` the offending dimension; theorem-level entries carry a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub j: usize,
    pub i: usize,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
    pub found: Vec<String>,
    pub expected: Vec<String>,
    pub p: usize,
    pub q: usize,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub seed: u64,
    /// Length of the checked sequence (sequence checks only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    /// Size of a complete sequence, the number of vertices.
    pub complete_size: usize,
    /// Nonzero Hom dimensions met while checking, as (j, i, dim).
    #[serde(skip)]
    pub nonzero_homs: Vec<(usize, usize, usize)>,
}

impl VerificationReport {
    fn new(bank: &ModuleBank, t: Option<usize>) -> Self {
        let q = bank.quiver();
        VerificationReport {
            passed: true,
            violations: Vec::new(),
            found: Vec::new(),
            expected: Vec::new(),
            p: q.p(),
            q: q.q(),
            t,
            seed: bank.seed(),
            size: None,
            complete_size: q.num_vertices(),
            nonzero_homs: Vec::new(),
        }
    }

    fn push(&mut self, kind: ViolationKind, j: usize, i: usize, dim: usize, witness: Option<String>) {
        self.passed = false;
        self.violations.push(Violation {
            kind,
            j,
            i,
            dim,
            witness,
        });
    }
}

/// An ordered sequence of catalog modules together with their realizations.
pub struct StratSequence {
    pub items: Vec<Descriptor>,
    pub realized: Vec<Arc<Realized>>,
}

impl StratSequence {
    pub fn new(items: Vec<Descriptor>, bank: &ModuleBank) -> Result<Self, CatalogError> {
        let realized = items.iter().map(|d| bank.get(d)).collect::<Result<_, _>>()?;
        Ok(StratSequence { items, realized })
    }
}

/// Full check of the stratifying-system axioms, listing every violation.
pub fn is_stratifying(seq: &[Descriptor], bank: &ModuleBank) -> Result<VerificationReport, StrataError> {
    let seq = StratSequence::new(seq.to_vec(), bank)?;
    let mut report = VerificationReport::new(bank, None);
    report.size = Some(seq.items.len());
    report.found = seq.items.iter().map(ToString::to_string).collect();
    for (k, r) in seq.realized.iter().enumerate() {
        if r.cert.end_dim != 1 {
            report.push(ViolationKind::NotIndecomposable, k + 1, k + 1, r.cert.end_dim, None);
        }
        if r.cert.self_ext != 0 {
            report.push(ViolationKind::SelfExt, k + 1, k + 1, r.cert.self_ext, None);
        }
    }
    for j in 0..seq.items.len() {
        for i in 0..j {
            let (xj, xi) = (&seq.items[j], &seq.items[i]);
            let h = bank.hom(xj, xi)?;
            if h != 0 {
                report.nonzero_homs.push((j + 1, i + 1, h));
                report.push(ViolationKind::Hom, j + 1, i + 1, h, None);
            }
            let e = bank.ext(xj, xi)?;
            if e != 0 {
                report.push(ViolationKind::Ext, j + 1, i + 1, e, None);
            }
        }
    }
    Ok(report)
}

/// Whether appending `x` after `prev` keeps the axioms, assuming `prev`
/// already passes. Cheap tests first.
fn extends(prev: &[Descriptor], x: &Descriptor, bank: &ModuleBank) -> Result<bool, StrataError> {
    for y in prev {
        if bank.euler(x, y)? != 0 {
            return Ok(false);
        }
    }
    let r = bank.get(x)?;
    if r.cert.end_dim != 1 || r.cert.self_ext != 0 {
        return Ok(false);
    }
    for y in prev {
        if bank.hom(x, y)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether prepending `x` before `next` keeps the axioms.
fn precedes(x: &Descriptor, next: &[Descriptor], bank: &ModuleBank) -> Result<bool, StrataError> {
    for y in next {
        if bank.euler(y, x)? != 0 {
            return Ok(false);
        }
    }
    let r = bank.get(x)?;
    if r.cert.end_dim != 1 || r.cert.self_ext != 0 {
        return Ok(false);
    }
    for y in next {
        if bank.hom(y, x)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Short-circuiting version of [`is_stratifying`].
pub fn passes(seq: &[Descriptor], bank: &ModuleBank) -> Result<bool, StrataError> {
    for k in 0..seq.len() {
        if !extends(&seq[..k], &seq[k], bank)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn fg(quiver: &Quiver) -> Vec<Descriptor> {
    let mut v = f_system(quiver);
    v.extend(g_system(quiver));
    v
}

fn run_parallel<T, F>(jobs: usize, items: Vec<T>, f: F) -> Result<Vec<(T, bool)>, StrataError>
where
    T: Send + Sync + Clone,
    F: Fn(&T) -> Result<bool, StrataError> + Send + Sync,
{
    let eval = || -> Result<Vec<(T, bool)>, StrataError> {
        items
            .par_iter()
            .map(|x| f(x).map(|b| (x.clone(), b)))
            .collect()
    };
    if jobs <= 1 {
        return items.iter().map(|x| f(x).map(|b| (x.clone(), b))).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| StrataError::Pool(e.to_string()))?;
    pool.install(eval)
}

/// All `Y = τ^{-t}P_j` (resp. `τ^{t}I_j`) with `t <= T` such that `(F, G, Y)`
/// is a stratifying system, by direct computation.
pub fn enumerate_y(side: Side, tau_max: usize, bank: &ModuleBank, jobs: usize) -> Result<BTreeSet<Descriptor>, StrataError> {
    let quiver = bank.quiver().clone();
    let base = fg(&quiver);
    let n = quiver.num_vertices();
    let candidates: Vec<Descriptor> = (0..=tau_max)
        .flat_map(|t| {
            (0..n).map(move |v| match side {
                Side::Postprojective => shifted_proj(t, v),
                Side::Preinjective => shifted_inj(t, v),
            })
        })
        .collect();
    let results = run_parallel(jobs, candidates, |y| extends(&base, y, bank))?;
    Ok(results.into_iter().filter(|(_, ok)| *ok).map(|(d, _)| d).collect())
}

/// Which numbered family of the classification a member belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classified {
    pub y: Descriptor,
    pub item: usize,
}

fn modp(t: usize, m: usize) -> usize {
    t % m
}

/// The closed-form list of `Y` with `t <= T`, each tagged with its family
/// (1-6 on each side).
pub fn predicted_y_items(side: Side, tau_max: usize, quiver: &Quiver) -> Vec<Classified> {
    let (p, q) = (quiver.p(), quiver.q());
    let n = p + q;
    let mut out = Vec::new();
    let mut add = |y: Descriptor, item: usize| out.push(Classified { y, item });
    match side {
        Side::Postprojective => {
            add(Descriptor::Proj(0), 1);
            add(Descriptor::Proj(n - 1), 2);
            for t in 1..=tau_max {
                if t % p == 0 && t % q == 0 {
                    add(Descriptor::TauProj(t, 0), 3);
                    add(Descriptor::TauProj(t, n - 1), 4);
                }
                if t % q == 0 {
                    let r = modp(t, p);
                    if (1..p).contains(&r) {
                        add(Descriptor::TauProj(t, p - r), 5);
                    }
                }
                if t % p == 0 {
                    let r = modp(t, q);
                    if (1..q).contains(&r) {
                        add(Descriptor::TauProj(t, p + q - r - 1), 6);
                    }
                }
            }
        }
        Side::Preinjective => {
            for t in 1..=tau_max {
                let (rp, rq) = (modp(t, p), modp(t, q));
                let last_p = rp == (p - 1) % p;
                let last_q = rq == q - 1;
                if last_p && rq == 0 {
                    add(Descriptor::TauInj(t, p), 1);
                }
                if last_q && rp == 0 {
                    add(Descriptor::TauInj(t, 1), 2);
                }
                if last_p && last_q {
                    add(Descriptor::TauInj(t, 0), 3);
                    add(Descriptor::TauInj(t, n - 1), 4);
                }
                for r in 1..p.saturating_sub(1) {
                    if rp == r && last_q {
                        add(Descriptor::TauInj(t, r + 1), 5);
                    }
                }
                for r in 1..q - 1 {
                    if rq == r && last_p {
                        add(Descriptor::TauInj(t, p + r), 6);
                    }
                }
            }
        }
    }
    out
}

pub fn predicted_y(side: Side, tau_max: usize, quiver: &Quiver) -> BTreeSet<Descriptor> {
    predicted_y_items(side, tau_max, quiver).into_iter().map(|c| c.y).collect()
}

/// The completion `M` of `(M, F, G, Y)` given by the classification, with
/// the number (1-12) of the item used.
pub fn predicted_completion_item(y: &Descriptor, quiver: &Quiver) -> Result<(Descriptor, usize), StrataError> {
    let (p, q) = (quiver.p(), quiver.q());
    let n = p + q;
    let outside = || StrataError::OutsideFamilies(y.to_string());
    if let Some((t, j)) = y.preprojective_position(quiver) {
        let both = t % p == 0 && t % q == 0;
        return match (t, j) {
            (0, 0) => Ok((Descriptor::Simple(n - 1), 1)),
            (0, j) if j == n - 1 => Ok((shifted_proj(p - 1, if p == q { 0 } else { q - 1 }), 2)),
            (t, j) if j == n - 1 && both => Ok((shifted_proj(t + p - 1, if p == q { 0 } else { q - 1 }), 3)),
            (t, 0) if both => Ok((shifted_proj(t - 1, n - 1), 4)),
            (t, j) if t >= 1 && t % q == 0 && (1..p).contains(&(t % p)) && j == p - t % p => {
                let r = t % p;
                Ok((shifted_proj(t + p - r - 1, q + r - 1), 5))
            }
            (t, j) if t >= 1 && t % p == 0 && (1..q).contains(&(t % q)) && j == p + q - t % q - 1 => {
                let r = t % q;
                if p >= q - r {
                    Ok((shifted_proj(t + q - r - 1, p + r - q), 6))
                } else {
                    Ok((shifted_proj(t + p - 1, q - r - 1), 6))
                }
            }
            _ => Err(outside()),
        };
    }
    if let Some((t, j)) = y.preinjective_position(quiver) {
        if t == 0 {
            return Err(outside());
        }
        let (rp, rq) = (t % p, t % q);
        let last_p = rp == (p - 1) % p;
        let last_q = rq == q - 1;
        if j == p && last_p && rq == 0 {
            return Ok((shifted_inj(t, p - 1), 7));
        }
        if j == 1 && last_q && rp == 0 {
            return Ok((shifted_inj(t, n - 2), 8));
        }
        if last_p && last_q {
            if j == 0 {
                return Ok((shifted_inj(t + 1, n - 1), 9));
            }
            if j == n - 1 {
                return Ok((shifted_inj(t + 1 - p, q - 1), 10));
            }
        }
        if last_q && (2..p).contains(&j) && rp == j - 1 {
            let r = j - 1;
            return Ok((shifted_inj(t - r, p + q - r - 2), 11));
        }
        if last_p && j > p && j < n - 1 && rq == j - p && (1..q - 1).contains(&(j - p)) {
            let r = j - p;
            return Ok(if r < p {
                (shifted_inj(t - r, p - r - 1), 12)
            } else {
                (shifted_inj(t + 1 - p, r), 12)
            });
        }
    }
    Err(outside())
}

pub fn predicted_completion(y: &Descriptor, quiver: &Quiver) -> Result<Descriptor, StrataError> {
    predicted_completion_item(y, quiver).map(|(m, _)| m)
}

/// Candidate completions: shifts of projectives and injectives up to
/// `tau_max`, every quasi-simple of the two exceptional tubes and E^(λ).
/// Modules that are simple are listed under their simple name.
pub fn completion_pool(tau_max: usize, quiver: &Quiver, lambda: &Rational) -> Vec<Descriptor> {
    let (p, q, n) = (quiver.p(), quiver.q(), quiver.num_vertices());
    let mut pool = Vec::new();
    pool.push(Descriptor::Simple(0));
    pool.extend((1..n).map(Descriptor::Proj));
    pool.extend((0..n - 1).map(Descriptor::Inj));
    pool.push(Descriptor::Simple(n - 1));
    for t in 1..=tau_max {
        pool.extend((0..n).map(|v| Descriptor::TauProj(t, v)));
        pool.extend((0..n).map(|v| Descriptor::TauInj(t, v)));
    }
    pool.extend((1..p).map(Descriptor::Simple));
    pool.push(Descriptor::RegInf(p));
    pool.extend((p..n - 1).map(Descriptor::Simple));
    pool.push(Descriptor::RegZero(q));
    pool.push(Descriptor::Homog(lambda.clone()));
    pool
}

/// All `M` in the pool for which `(M, F, G, Y)` is a stratifying system,
/// assuming `(F, G, Y)` is one.
pub fn find_completion(y: &Descriptor, tau_max: usize, bank: &ModuleBank, jobs: usize) -> Result<Vec<Descriptor>, StrataError> {
    let quiver = bank.quiver().clone();
    let mut tail = fg(&quiver);
    tail.push(y.clone());
    let pool = completion_pool(tau_max, &quiver, bank.lambda());
    let results = run_parallel(jobs, pool, |m| precedes(m, &tail, bank))?;
    Ok(results.into_iter().filter(|(_, ok)| *ok).map(|(d, _)| d).collect())
}

fn quadruple(m: &Descriptor, y: &Descriptor, quiver: &Quiver) -> Vec<Descriptor> {
    let mut seq = vec![m.clone()];
    seq.extend(fg(quiver));
    seq.push(y.clone());
    seq
}

fn show_quadruple(m: &Descriptor, y: &Descriptor) -> String {
    format!("({m},F*,G*,{y})")
}

/// Compares search against the classification: the Y lists on both sides,
/// the uniqueness and identity of each completion (searched up to
/// `tau_max + p + q`, since completions sit further out than their Y), and
/// the axioms for every predicted complete sequence.
pub fn check_theorem(tau_max: usize, bank: &ModuleBank, jobs: usize) -> Result<VerificationReport, StrataError> {
    let quiver = bank.quiver().clone();
    let mut report = VerificationReport::new(bank, Some(tau_max));
    let pool_max = tau_max + quiver.num_vertices();
    for side in [Side::Postprojective, Side::Preinjective] {
        let found = enumerate_y(side, tau_max, bank, jobs)?;
        let expected = predicted_y(side, tau_max, &quiver);
        let key = |s: &BTreeSet<Descriptor>| -> BTreeMap<Descriptor, Descriptor> {
            s.iter().map(|d| (d.iso_key(&quiver), d.clone())).collect()
        };
        let (fk, ek) = (key(&found), key(&expected));
        for (k, d) in &ek {
            if !fk.contains_key(k) {
                report.push(ViolationKind::YMissing, 0, 0, 0, Some(format!("{side} {d}")));
            }
        }
        for (k, d) in &fk {
            if !ek.contains_key(k) {
                report.push(ViolationKind::YUnexpected, 0, 0, 0, Some(format!("{side} {d}")));
            }
        }

        for y in &found {
            let comps = find_completion(y, pool_max, bank, jobs)?;
            for m in &comps {
                report.found.push(show_quadruple(m, y));
            }
            let predicted = match predicted_completion(y, &quiver) {
                Ok(m) => m,
                Err(_) => {
                    report.push(
                        ViolationKind::CompletionMismatch,
                        0,
                        0,
                        comps.len(),
                        Some(format!("{y} has no predicted completion; found {}", join_descriptors(&comps))),
                    );
                    continue;
                }
            };
            if comps.len() != 1 {
                report.push(
                    ViolationKind::CompletionCount,
                    0,
                    0,
                    comps.len(),
                    Some(format!("{y}: found {}", join_descriptors(&comps))),
                );
                continue;
            }
            let a = catalog::realize_rep(&comps[0], &quiver, bank.seed())?;
            let b = catalog::realize_rep(&predicted, &quiver, bank.seed().wrapping_add(1))?;
            let verdict = homcalc::is_isomorphic(&a, &b, bank.seed())?;
            if !verdict.isomorphic {
                report.push(
                    ViolationKind::CompletionMismatch,
                    0,
                    0,
                    1,
                    Some(format!("{y}: found {}, predicted {predicted} ({})", comps[0], verdict.note)),
                );
            }
        }

        for y in &expected {
            let Ok(m) = predicted_completion(y, &quiver) else {
                report.push(
                    ViolationKind::Quadruple,
                    0,
                    0,
                    0,
                    Some(format!("{y} is listed but has no completion formula")),
                );
                continue;
            };
            report.expected.push(show_quadruple(&m, y));
            let seq = quadruple(&m, y, &quiver);
            let sub = is_stratifying(&seq, bank)?;
            let size_ok = seq.len() == quiver.num_vertices();
            if !sub.passed || !size_ok {
                let detail = sub
                    .violations
                    .iter()
                    .map(|v| format!("{}@({},{})={}", v.kind, v.j, v.i, v.dim))
                    .collect::<Vec<_>>()
                    .join(" ");
                report.push(
                    ViolationKind::Quadruple,
                    0,
                    0,
                    seq.len(),
                    Some(format!("{} fails: {detail}", show_quadruple(&m, y))),
                );
            }
        }
    }
    Ok(report)
}

/// Comma-separated descriptors, or `nothing`.
pub fn join_descriptors(ds: &[Descriptor]) -> String {
    if ds.is_empty() {
        return "nothing".into();
    }
    ds.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Default window `2·lcm(p,q) + p + q`.
pub fn default_tau_max(quiver: &Quiver) -> usize {
    2 * quiver.p().lcm(&quiver.q()) + quiver.p() + quiver.q()
}

/// Longest passing sequence built from `pool` (each member used at most
/// once), by depth-first extension.
pub fn longest_sequence(pool: &[Descriptor], bank: &ModuleBank) -> Result<Vec<Descriptor>, StrataError> {
    fn grow(
        cur: &mut Vec<Descriptor>,
        used: &mut Vec<bool>,
        pool: &[Descriptor],
        bank: &ModuleBank,
        best: &mut Vec<Descriptor>,
    ) -> Result<(), StrataError> {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        for k in 0..pool.len() {
            if used[k] || !extends(cur, &pool[k], bank)? {
                continue;
            }
            used[k] = true;
            cur.push(pool[k].clone());
            grow(cur, used, pool, bank, best)?;
            cur.pop();
            used[k] = false;
        }
        Ok(())
    }
    let mut best = Vec::new();
    grow(&mut Vec::new(), &mut vec![false; pool.len()], pool, bank, &mut best)?;
    Ok(best)
}

/// The quasi-simples of all tubes in the catalog: both exceptional tubes
/// and the homogeneous modules for the given parameters.
pub fn quasi_simple_pool(quiver: &Quiver, lambdas: &[i64]) -> Vec<Descriptor> {
    let mut pool: Vec<Descriptor> = (1..=quiver.p()).map(Descriptor::RegInf).collect();
    pool.extend((1..=quiver.q()).map(Descriptor::RegZero));
    pool.extend(lambdas.iter().map(|&l| Descriptor::Homog(rat(l))));
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank(p: usize, q: usize) -> ModuleBank {
        ModuleBank::new(&Quiver::new(p, q).unwrap(), 0)
    }

    #[test]
    fn f_g_pass_in_both_orders() {
        let b = bank(2, 3);
        let q = b.quiver().clone();
        assert!(is_stratifying(&fg(&q), &b).unwrap().passed);
        let mut swapped = g_system(&q);
        swapped.extend(f_system(&q));
        assert!(passes(&swapped, &b).unwrap());
    }

    #[test]
    fn repeated_sink_simple_fails_on_hom() {
        let b = bank(2, 3);
        let r = is_stratifying(&[Descriptor::Simple(0), Descriptor::Simple(0)], &b).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violations.len(), 1);
        let v = &r.violations[0];
        assert_eq!((v.kind, v.j, v.i, v.dim), (ViolationKind::Hom, 2, 1, 1));
    }

    #[test]
    fn small_enumerations() {
        let b = bank(2, 3);
        let found = enumerate_y(Side::Postprojective, 0, &b, 1).unwrap();
        assert_eq!(found, [Descriptor::Proj(0), Descriptor::Proj(4)].into_iter().collect());
        assert!(enumerate_y(Side::Preinjective, 0, &b, 1).unwrap().is_empty());
        let b = bank(2, 2);
        let found = enumerate_y(Side::Postprojective, 4, &b, 1).unwrap();
        let want: BTreeSet<_> = [
            Descriptor::Proj(0),
            Descriptor::Proj(3),
            Descriptor::TauProj(2, 0),
            Descriptor::TauProj(2, 3),
            Descriptor::TauProj(4, 0),
            Descriptor::TauProj(4, 3),
        ]
        .into_iter()
        .collect();
        assert_eq!(found, want);
    }

    #[test]
    fn predicted_lists() {
        let q = Quiver::new(2, 3).unwrap();
        let post = predicted_y(Side::Postprojective, 0, &q);
        assert_eq!(post, [Descriptor::Proj(0), Descriptor::Proj(4)].into_iter().collect());
        let post = predicted_y(Side::Postprojective, 3, &q);
        assert!(post.contains(&Descriptor::TauProj(3, 1)));
        let pre = predicted_y(Side::Preinjective, 3, &q);
        assert!(pre.contains(&Descriptor::TauInj(3, 2)));
        // t = 6 is even, so the first family does not fire there.
        let pre = predicted_y(Side::Preinjective, 6, &q);
        assert!(!pre.contains(&Descriptor::TauInj(6, 2)));
    }

    #[test]
    fn completion_formulas() {
        let q = Quiver::new(2, 3).unwrap();
        assert_eq!(predicted_completion(&Descriptor::Proj(0), &q).unwrap(), Descriptor::Simple(4));
        assert_eq!(predicted_completion(&Descriptor::Proj(4), &q).unwrap(), Descriptor::TauProj(1, 2));
        assert_eq!(predicted_completion(&Descriptor::TauProj(6, 0), &q).unwrap(), Descriptor::TauProj(5, 4));
        assert_eq!(predicted_completion(&Descriptor::TauInj(5, 0), &q).unwrap(), Descriptor::TauInj(6, 4));
        assert_eq!(predicted_completion(&Descriptor::TauProj(3, 1), &q).unwrap(), Descriptor::TauProj(3, 3));
        let q22 = Quiver::new(2, 2).unwrap();
        assert_eq!(predicted_completion(&Descriptor::Proj(3), &q22).unwrap(), Descriptor::TauProj(1, 0));
        assert!(predicted_completion(&Descriptor::TauProj(1, 2), &q).is_err());
    }

    #[test]
    fn completion_search_small() {
        let b = bank(2, 3);
        assert_eq!(find_completion(&Descriptor::Proj(0), 4, &b, 1).unwrap(), vec![Descriptor::Simple(4)]);
        assert_eq!(find_completion(&Descriptor::Proj(4), 4, &b, 1).unwrap(), vec![Descriptor::TauProj(1, 2)]);
        let b = bank(2, 2);
        assert_eq!(find_completion(&Descriptor::Proj(3), 4, &b, 1).unwrap(), vec![Descriptor::TauProj(1, 0)]);
    }

    #[test]
    fn report_json_shape() {
        let b = bank(2, 3);
        let r = is_stratifying(&[Descriptor::Simple(0), Descriptor::Simple(0)], &b).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["passed", "violations", "found", "expected", "p", "q", "T", "seed"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["violations"][0]["kind"], "hom");
    }
}
