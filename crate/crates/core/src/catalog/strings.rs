//! Generic realization of exceptional modules with a prescribed real-root
//! dimension vector.
//!
//! Deleting the arrow that enters the sink along the top path leaves a quiver
//! of type A. An exceptional module restricts there to the generic
//! representation of that type-A quiver, and for a fixed generic restriction
//! the exceptional ones form a dense open set of choices for the deleted
//! arrow. So we lay out the type-A part as the restriction of a string module
//! (a walk around the cycle, which gives partial permutation matrices),
//! draw the remaining matrix at random, and certify End = K with no
//! self-extensions.
//!
//! Keeping all but one map combinatorial is what makes the Hom systems
//! tractable: their rows are almost all two-term relations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CatalogError, Descriptor, RealizationCertificate};
use crate::exactnum::{rat, Matrix, Rational};
use crate::homcalc;
use crate::quiverrep::{Quiver, QuiverError, Representation};

/// Retries allowed after the first attempt.
pub const MAX_RETRIES: usize = 32;
/// Attempts using the narrow entry range before widening it.
const NARROW_ATTEMPTS: usize = 8;
const NARROW_RANGE: i64 = 7;
const WIDE_RANGE: i64 = 97;

/// Vertices in cyclic order: sink, up the top path, source, down the bottom
/// path. Consecutive entries (and last/first) are joined by one arrow; the
/// pair (first, second) is joined by the arrow we randomize.
fn cycle_order(quiver: &Quiver) -> Vec<usize> {
    let mut order = vec![0];
    order.extend(quiver.top_vertices());
    order.push(quiver.source());
    order.extend(quiver.bottom_vertices().rev());
    order
}

fn arrow_between(quiver: &Quiver, u: usize, w: usize) -> usize {
    quiver
        .arrows()
        .iter()
        .position(|a| (a.src, a.dst) == (u, w) || (a.src, a.dst) == (w, u))
        .expect("cycle neighbours are joined by an arrow")
}

/// Maps of the string module walking around the cycle, with the randomized
/// arrow left as a zero matrix. Fails unless `x = k·δ + (indicator of a
/// proper arc)`.
fn skeleton(quiver: &Quiver, x: &[i64]) -> Result<(Vec<usize>, Vec<Matrix>), CatalogError> {
    let n = quiver.num_vertices();
    let order = cycle_order(quiver);
    let not_root = || CatalogError::NotRealRoot(x.to_vec());
    let k = *x.iter().min().ok_or_else(not_root)?;
    if k < 0 {
        return Err(not_root());
    }
    let rest: Vec<i64> = order.iter().map(|&v| x[v] - k).collect();
    if rest.iter().any(|&r| r > 1) {
        return Err(not_root());
    }
    let m = rest.iter().filter(|&&r| r == 1).count();
    if m == 0 || m == n {
        return Err(not_root());
    }
    let starts: Vec<usize> = (0..n)
        .filter(|&i| rest[i] == 1 && rest[(i + n - 1) % n] == 0)
        .collect();
    if starts.len() != 1 {
        return Err(not_root());
    }
    let start = starts[0];
    let len = k as usize * n + m;

    let dims: Vec<usize> = x.iter().map(|&d| d as usize).collect();
    let mut maps: Vec<Matrix> = quiver
        .arrows()
        .iter()
        .map(|a| Matrix::zeros(dims[a.dst], dims[a.src]))
        .collect();
    let special = quiver.top_sink_arrow();
    let mut seen = vec![0usize; n];
    let mut prev: Option<(usize, usize)> = None;
    for step in 0..len {
        let v = order[(start + step) % n];
        let local = seen[v];
        seen[v] += 1;
        if let Some((u, lu)) = prev {
            let a = arrow_between(quiver, u, v);
            if a != special {
                let arrow = quiver.arrows()[a];
                let (row, col) = if arrow.src == u { (local, lu) } else { (lu, local) };
                maps[a].set(row, col, Rational::from_integer(1.into()));
            }
        }
        prev = Some((v, local));
    }
    debug_assert_eq!(seen, dims);
    Ok((dims, maps))
}

fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    // splitmix64 step so neighbouring seeds give unrelated streams
    let mut z = seed.wrapping_add((attempt as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Realizes the exceptional module with dimension vector `x` (the class of
/// `desc`), certifying each sample.
pub fn realize_generic(
    desc: &Descriptor,
    x: &[i64],
    quiver: &Quiver,
    seed: u64,
) -> Result<(Representation, RealizationCertificate), CatalogError> {
    let (dims, base_maps) = skeleton(quiver, x)?;
    let special = quiver.top_sink_arrow();
    let arrow = quiver.arrows()[special];
    let (rows, cols) = (dims[arrow.dst], dims[arrow.src]);
    let euler = homcalc::euler_form(quiver, x, x)?;
    let mut trail = Vec::new();
    for attempt in 0..=MAX_RETRIES {
        let s = attempt_seed(seed, attempt);
        trail.push(s);
        let range = if attempt < NARROW_ATTEMPTS {
            NARROW_RANGE
        } else {
            WIDE_RANGE
        };
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let entries = (0..rows * cols)
            .map(|_| rat(rng.gen_range(-range..=range)))
            .collect();
        let mut maps = base_maps.clone();
        maps[special] = Matrix::from_entries(rows, cols, entries).map_err(QuiverError::from)?;
        let rep = Representation::new(quiver.clone(), dims.clone(), maps)?;
        let end_dim = homcalc::end_dim(&rep);
        let self_ext = end_dim as i64 - euler;
        if end_dim == 1 && self_ext == 0 {
            return Ok((
                rep,
                RealizationCertificate {
                    end_dim,
                    self_ext: 0,
                    retries: attempt,
                    seed: s,
                },
            ));
        }
    }
    Err(CatalogError::CertificationFailed {
        desc: desc.to_string(),
        attempts: MAX_RETRIES + 1,
        seeds: trail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{descriptor_dim, realize};

    #[test]
    fn cycle_order_examples() {
        assert_eq!(cycle_order(&Quiver::new(2, 3).unwrap()), vec![0, 1, 4, 3, 2]);
        assert_eq!(cycle_order(&Quiver::new(1, 2).unwrap()), vec![0, 2, 1]);
    }

    #[test]
    fn skeleton_rejects_imaginary_roots() {
        let q = Quiver::new(2, 3).unwrap();
        assert!(skeleton(&q, &[1; 5]).is_err());
        assert!(skeleton(&q, &[1, 0, 1, 0, 1]).is_err());
        assert!(skeleton(&q, &[2, 1, 1, 1, 1]).is_ok());
    }

    #[test]
    fn small_shifts_certify() {
        let q = Quiver::new(2, 3).unwrap();
        for t in 1..=4 {
            for v in 0..5 {
                for d in [Descriptor::TauProj(t, v), Descriptor::TauInj(t, v)] {
                    let (rep, cert) = realize(&d, &q, 7).unwrap();
                    assert_eq!(rep.dim_vector(), descriptor_dim(&d, &q).unwrap());
                    assert_eq!((cert.end_dim, cert.self_ext), (1, 0), "{d}");
                }
            }
        }
    }
}
