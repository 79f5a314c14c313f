use std::collections::BTreeSet;

use apq_core::catalog::{self, descriptor_dim, tau_desc, Descriptor};
use apq_core::exactnum::{modular, rat, LinearSystem, Matrix, Rational};
use apq_core::homcalc;
use apq_core::quiverrep::{Quiver, Representation};
use apq_core::strata;
use num_bigint::BigInt;
use proptest::prelude::*;

fn small_matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |e| Matrix::from_i64(r, c, &e))
    })
}

fn square_matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max).prop_flat_map(|n| prop::collection::vec(-2i64..=2, n * n).prop_map(move |e| Matrix::from_i64(n, n, &e)))
}

fn coefficient() -> impl Strategy<Value = Rational> {
    prop_oneof![
        6 => (-5i64..=5).prop_map(rat),
        2 => (-9i64..=9, 1i64..=7).prop_map(|(n, d)| Rational::new(n.into(), d.into())),
        1 => any::<i64>().prop_map(|n| Rational::from_integer(BigInt::from(n) * BigInt::from(n))),
    ]
}

fn sparse_system() -> impl Strategy<Value = (usize, Vec<Vec<(usize, Rational)>>)> {
    (1usize..=14).prop_flat_map(|n| {
        let term = (0..n, coefficient());
        let row = prop::collection::vec(term, 1..=4);
        (Just(n), prop::collection::vec(row, 0..=18))
    })
}

fn quiver() -> impl Strategy<Value = Quiver> {
    prop_oneof![Just((1, 2)), Just((1, 3)), Just((2, 2)), Just((2, 3)), Just((3, 3)), Just((2, 4))]
        .prop_map(|(p, q)| Quiver::new(p, q).unwrap())
}

fn descriptor(q: &Quiver) -> impl Strategy<Value = Descriptor> {
    let (p, qq, n) = (q.p(), q.q(), q.num_vertices());
    prop_oneof![
        (0..n).prop_map(Descriptor::Proj),
        (0..n).prop_map(Descriptor::Inj),
        (0..n).prop_map(Descriptor::Simple),
        (1usize..=5, 0..n).prop_map(|(t, v)| Descriptor::TauProj(t, v)),
        (1usize..=5, 0..n).prop_map(|(t, v)| Descriptor::TauInj(t, v)),
        (1..=p).prop_map(Descriptor::RegInf),
        (1..=qq).prop_map(Descriptor::RegZero),
        (1i64..=4).prop_map(|l| Descriptor::Homog(rat(l))),
    ]
}

fn quiver_and_descriptor() -> impl Strategy<Value = (Quiver, Descriptor)> {
    quiver().prop_flat_map(|q| {
        let d = descriptor(&q);
        (Just(q), d)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_plus_nullity(m in small_matrix(6)) {
        let basis = m.nullspace_basis();
        prop_assert_eq!(m.rank() + basis.len(), m.cols());
        for v in &basis {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| *x == rat(0)));
        }
    }

    #[test]
    fn rank_of_transpose(m in small_matrix(6)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn determinant_detects_full_rank(m in square_matrix(5)) {
        let det = m.det().unwrap();
        prop_assert_eq!(det != rat(0), m.rank() == m.rows());
        if let Some(inv) = m.inverse() {
            prop_assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(m.rows()));
        }
    }

    #[test]
    fn modular_rank_matches_exact(m in small_matrix(7), k in 0usize..8) {
        let f = modular::Field::nth(k);
        let rows: Vec<Vec<u64>> = (0..m.rows())
            .map(|i| m.row(i).iter().map(|x| f.from_rational(x).unwrap()).collect())
            .collect();
        prop_assert_eq!(modular::rank(&f, rows, m.cols()), m.rank());
    }

    #[test]
    fn linear_system_matches_dense_oracle((n, rows) in sparse_system()) {
        let mut sys = LinearSystem::new(n);
        for r in &rows {
            sys.add_row(r.iter().cloned());
        }
        let dense = sys.to_matrix();
        let oracle = n - if dense.rows() == 0 { 0 } else { dense.rank() };
        prop_assert_eq!(sys.kernel_dim(), oracle);
        let basis = sys.kernel_basis();
        prop_assert_eq!(basis.len(), oracle);
        if dense.rows() > 0 {
            for v in &basis {
                prop_assert!(dense.mul_vec(v).unwrap().iter().all(|x| *x == rat(0)));
            }
        }
        if !basis.is_empty() {
            prop_assert_eq!(Matrix::from_rows(&basis).unwrap().rank(), basis.len());
        }
    }

    #[test]
    fn hom_from_projective_and_into_injective((q, d) in quiver_and_descriptor(), v in 0usize..7) {
        let v = v % q.num_vertices();
        let m = catalog::realize_rep(&d, &q, 3).unwrap();
        let pv = catalog::projective(&q, v).unwrap();
        let iv = catalog::injective(&q, v).unwrap();
        prop_assert_eq!(homcalc::hom_dim(&pv, &m).unwrap(), m.dims()[v]);
        prop_assert_eq!(homcalc::hom_dim(&m, &iv).unwrap(), m.dims()[v]);
    }

    #[test]
    fn symbolic_tau_matches_coxeter((q, d) in quiver_and_descriptor(), k in -3i64..=3) {
        if let Ok(moved) = tau_desc(&d, k, &q) {
            let x = descriptor_dim(&d, &q).unwrap();
            prop_assert_eq!(homcalc::coxeter_apply(&q, &x, k).unwrap(), descriptor_dim(&moved, &q).unwrap());
            prop_assert_eq!(tau_desc(&moved, -k, &q).unwrap().iso_key(&q), d.iso_key(&q));
        }
    }

    #[test]
    fn realization_matches_descriptor((q, d) in quiver_and_descriptor(), seed in any::<u64>()) {
        let (rep, cert) = catalog::realize(&d, &q, seed).unwrap();
        prop_assert_eq!(rep.dim_vector(), descriptor_dim(&d, &q).unwrap());
        prop_assert_eq!(cert.end_dim, 1);
        // modules in tubes of rank one (E^(λ), and E_1^(∞) when p = 1) have
        // dimension vector δ and are the only non-rigid ones in the catalog
        let rank_one_tube = matches!(d, Descriptor::Homog(_)) || (q.p() == 1 && d == Descriptor::RegInf(1));
        prop_assert_eq!(cert.self_ext, usize::from(rank_one_tube));
        let euler = homcalc::euler_form(&q, &rep.dim_vector(), &rep.dim_vector()).unwrap();
        prop_assert_eq!(euler, 1 - i64::from(rank_one_tube));
    }

    #[test]
    fn support_of_direct_sum((q, a) in quiver_and_descriptor(), b_idx in 0usize..64) {
        let others: Vec<Descriptor> = (0..q.num_vertices()).map(Descriptor::Simple).collect();
        let b = &others[b_idx % others.len()];
        let ra = catalog::realize_rep(&a, &q, 1).unwrap();
        let rb = catalog::realize_rep(b, &q, 2).unwrap();
        let sum = Representation::direct_sum(&q, &[&ra, &rb]).unwrap();
        let union: BTreeSet<usize> = ra.supp().union(&rb.supp()).copied().collect();
        prop_assert_eq!(sum.supp(), union);
        prop_assert_eq!(sum.total_dim(), ra.total_dim() + rb.total_dim());
        prop_assert_eq!(homcalc::end_dim(&sum), homcalc::end_dim(&ra) + homcalc::end_dim(&rb)
            + homcalc::hom_dim(&ra, &rb).unwrap() + homcalc::hom_dim(&rb, &ra).unwrap());
    }

    #[test]
    fn json_roundtrip((q, d) in quiver_and_descriptor()) {
        let rep = catalog::realize_rep(&d, &q, 5).unwrap();
        let text = serde_json::to_string(&rep.to_json()).unwrap();
        let back = Representation::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, rep);
    }

    #[test]
    fn descriptor_text_roundtrip((q, d) in quiver_and_descriptor()) {
        let parsed: Descriptor = d.to_string().parse().unwrap();
        prop_assert_eq!(&parsed, &d);
        prop_assert!(parsed.validate(&q).is_ok());
    }

    #[test]
    fn no_sequence_exceeds_vertex_count(picks in prop::collection::vec((0usize..4, 0usize..5, 1usize..=4), 4..=9)) {
        let q = Quiver::new(2, 3).unwrap();
        let pool: BTreeSet<Descriptor> = picks
            .into_iter()
            .map(|(kind, v, t)| match kind {
                0 => Descriptor::Proj(v),
                1 => Descriptor::TauProj(t, v),
                2 => Descriptor::TauInj(t, v),
                _ => Descriptor::Inj(v),
            })
            .collect();
        let pool: Vec<Descriptor> = pool.into_iter().collect();
        let bank = strata::ModuleBank::new(&q, 0);
        let best = strata::longest_sequence(&pool, &bank).unwrap();
        prop_assert!(best.len() <= q.num_vertices());
        prop_assert!(strata::is_stratifying(&best, &bank).unwrap().passed);
    }
}

#[test]
fn enumeration_is_stable_under_window_growth() {
    for (p, q) in [(2, 2), (2, 3), (1, 3)] {
        let quiver = Quiver::new(p, q).unwrap();
        let t = strata::default_tau_max(&quiver);
        let bank = strata::ModuleBank::new(&quiver, 0);
        for side in [strata::Side::Postprojective, strata::Side::Preinjective] {
            let small = strata::enumerate_y(side, t, &bank, 1).unwrap();
            let large = strata::enumerate_y(side, t + 2 * (p + q), &bank, 1).unwrap();
            let clipped: BTreeSet<Descriptor> = large
                .into_iter()
                .filter(|d| match d {
                    Descriptor::TauProj(s, _) | Descriptor::TauInj(s, _) => *s <= t,
                    _ => true,
                })
                .collect();
            assert_eq!(small, clipped, "({p},{q}) {side}");
        }
    }
}
