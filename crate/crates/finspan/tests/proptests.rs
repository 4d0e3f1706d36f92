//! Property tests for the exact arithmetic layer and cardinality laws.

use finspan::groupoid::{cardinality, disjoint_union, product};
use finspan::linalg::{rref_rank_kernel, RatMatrix, Rational};
use proptest::prelude::*;

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| Rational::new(n, d))
}

fn arb_matrix(max: usize) -> impl Strategy<Value = RatMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(arb_rational(), r * c).prop_map(move |data| {
            let mut m = RatMatrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, data[i * c + j].clone());
                }
            }
            m
        })
    })
}

proptest! {
    #[test]
    fn rational_print_parse_roundtrip(x in arb_rational()) {
        let s = x.to_string();
        let back: Rational = s.parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn rational_field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!(
            (a.clone() + b.clone()) + c.clone(),
            a.clone() + (b.clone() + c.clone())
        );
        prop_assert_eq!(
            a.clone() * (b.clone() + c.clone()),
            a.clone() * b.clone() + a.clone() * c
        );
        if !b.is_zero() {
            let  ratio = a.clone() / b.clone();
            prop_assert_eq!(ratio * b, a);
        }
    }

    #[test]
    fn kernel_vectors_annihilate(m in arb_matrix(4)) {
        let (rank, kernel, _) = rref_rank_kernel(&m);
        prop_assert_eq!(rank + kernel.cols(), m.cols());
        let product = m.mul(&kernel);
        prop_assert!(product.is_zero());
    }

    #[test]
    fn constructed_systems_solve_exactly(
        m in arb_matrix(4),
        coeffs in proptest::collection::vec(-100i64..100, 4),
    ) {
        let x0: Vec<Rational> = (0..m.cols())
            .map(|j| Rational::from_integer(coeffs[j % coeffs.len()]))
            .collect();
        let b = m.apply(&x0);
        let (_, _, solver) = rref_rank_kernel(&m);
        let x = solver.solve(&b).unwrap().expect("constructed system is consistent");
        prop_assert_eq!(m.apply(&x), b);
    }

    #[test]
    fn matrix_print_parse_roundtrip(m in arb_matrix(3)) {
        // Round-trip each entry through the string form used by the JSON
        // layer.
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let s = m.get(i, j).to_string();
                let back: Rational = s.parse().unwrap();
                prop_assert_eq!(&back, m.get(i, j));
            }
        }
    }

    #[test]
    fn cardinality_is_additive_and_multiplicative(a in 0usize..4, b in 0usize..4) {
        let corpus_list = finspan::corpus::groupoid_corpus();
        let x = &corpus_list[a % corpus_list.len()];
        let y = &corpus_list[(a + b) % corpus_list.len()];
        prop_assert_eq!(
            cardinality(&disjoint_union(x, y)),
            cardinality(x) + cardinality(y)
        );
        prop_assert_eq!(
            cardinality(&product(x, y)),
            cardinality(x) * cardinality(y)
        );
    }
}
