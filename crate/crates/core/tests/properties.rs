use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

use neighborlat::corpus;
use neighborlat::disc_form;
use neighborlat::kummer::{self, HomMatrix};
use neighborlat::linalg::{self, IntMatrix};
use neighborlat::neighbors;
use neighborlat::padic;
use neighborlat::Lattice;

fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut t = IntMatrix::identity(n);
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        if i != j {
            t.add_row_multiple(i, j, &BigInt::from(k));
        }
    }
    t
}

fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..8, 0usize..8, -2i64..=2), 0..12)
}

fn block_data(l: &Lattice, p: u64) -> Vec<(u32, usize, i8)> {
    let jd = padic::jordan_decomposition(l, p, padic::default_precision(l, p, 1)).unwrap();
    jd.blocks.iter().map(|b| (b.scale, b.rank(), b.det_class(p))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jordan_data_is_a_base_change_invariant(ops in ops(), which in 0usize..4) {
        let u = corpus::hyperbolic;
        let (l, p) = [
            (corpus::sum(&[corpus::diag(&[18]), u(), u()]), 3),
            (corpus::sum(&[corpus::a(2), corpus::a(2).scaled(-1), u()]), 3),
            (corpus::sum(&[corpus::diag(&[50]), u()]), 5),
            (corpus::sum(&[corpus::a(4), corpus::diag(&[10])]), 5),
        ][which].clone();
        let t = unimodular(l.rank(), &ops);
        let moved = l.restricted(&t).unwrap();
        prop_assert_eq!(block_data(&l, p), block_data(&moved, p));
    }

    #[test]
    fn discriminant_form_is_a_base_change_invariant(ops in ops(), which in 0usize..5) {
        let c = corpus::neighbor_corpus();
        let l = &c[[2, 8, 12, 17, 19][which]].lattice;
        let moved = l.restricted(&unimodular(l.rank(), &ops)).unwrap();
        let a = disc_form::discriminant_form(l).unwrap();
        let b = disc_form::discriminant_form(&moved).unwrap();
        prop_assert_eq!(BigInt::from(a.order().unwrap()), l.discriminant().abs());
        prop_assert!(disc_form::finite_form_isomorphic(&a, &b, 10_000).unwrap().is_some());
    }

    #[test]
    fn hom_norm_is_determinant(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
        let t = kummer::kummer_transcendental();
        let m = HomMatrix::new(a, b, c, d);
        let v = kummer::hom_to_vector(&m);
        prop_assert_eq!(t.half_norm(&v), BigInt::from(m.det()));
    }

    #[test]
    fn hermite_basis_ignores_generator_order(rows in prop::collection::vec(prop::collection::vec(-9i64..10, 3), 3..6)) {
        let a = IntMatrix::from_i64(&rows);
        let mut rev = rows.clone();
        rev.reverse();
        let b = IntMatrix::from_i64(&rev);
        prop_assert_eq!(linalg::row_lattice_basis(&a), linalg::row_lattice_basis(&b));
    }

    #[test]
    fn neighbors_round_trip_after_base_change(ops in ops(), d in prop::sample::select(vec![2u64, 5, 7])) {
        let l = corpus::sum(&[corpus::hyperbolic(), corpus::a(2)]);
        let moved = l.restricted(&unimodular(l.rank(), &ops)).unwrap();
        let lines = neighbors::enumerate_isotropic_lines(&moved, d, 100_000).unwrap();
        prop_assert_eq!(lines.len(), neighbors::enumerate_isotropic_lines(&l, d, 100_000).unwrap().len());
        for line in lines.iter().take(12) {
            let n = neighbors::neighbor_from_line(line).unwrap();
            prop_assert_eq!(&neighbors::line_from_neighbor(&moved, &n).unwrap(), line);
            prop_assert!(neighbors::same_genus_invariants(&moved, &n.to_lattice().unwrap(), 10_000).unwrap());
        }
    }
}

#[test]
fn dictionary_is_a_bijection_for_small_odd_d() {
    for (d, pairs) in [(3u64, 16usize), (5, 36), (7, 64), (9, 144)] {
        let dict = kummer::line_subgroup_dictionary(d).unwrap();
        assert_eq!(dict.len(), pairs, "d = {d}");
        for entry in &dict {
            // f and u f give the same line and pair
            for u in 2..d {
                if num_integer::Integer::gcd(&u, &d) != 1 {
                    continue;
                }
                let h = &entry.hom;
                let scaled = HomMatrix::new(h.a * u as i64, h.b * u as i64, h.c * u as i64, h.d * u as i64);
                assert_eq!(kummer::kernel_and_image(&scaled, d).unwrap(), entry.pair);
            }
            let kn = kummer::kummer_neighbor(entry.pair, d).unwrap();
            assert_eq!(kn.neighbor, neighbors::neighbor_from_line(&entry.line).unwrap());
        }
    }
}

#[test]
fn unimodular_parts_have_coprime_discriminant() {
    for (l, p) in [
        (corpus::sum(&[corpus::diag(&[18]), corpus::hyperbolic()]), 3u64),
        (corpus::sum(&[corpus::a(2), corpus::a(2)]), 3),
        (corpus::sum(&[corpus::a(4), corpus::hyperbolic()]), 5),
    ] {
        let part = padic::maximal_unimodular_sublattice(&l, p).unwrap();
        let u = part.lattice(&l).unwrap();
        assert!(!num_integer::Integer::is_multiple_of(&u.discriminant(), &BigInt::from(p)));
        let jd = padic::jordan_decomposition(&l, p, padic::default_precision(&l, p, 1)).unwrap();
        assert_eq!(jd.blocks[0].scale, 0);
        assert_eq!(jd.blocks[0].rank(), part.rank());
    }
}
