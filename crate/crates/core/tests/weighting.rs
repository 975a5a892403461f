mod common;

use common::brute_ppmi;
use dsmkit::cooccurrence::CoocMatrix;
use dsmkit::weighting::{apply_co, apply_ppmi, apply_smoothed_ppmi, WeightedMatrix};
use proptest::prelude::*;

fn counts(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(
            prop::collection::vec(prop_oneof![3 => Just(0u64), 2 => 1u64..50, 1 => 50u64..5000], c),
            r,
        )
    })
}

fn matrix(dense: &[Vec<u64>]) -> CoocMatrix {
    let cols = dense[0].len();
    let triples = dense
        .iter()
        .enumerate()
        .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, &v)| (a as u32, b as u32, v)));
    CoocMatrix::from_triples(dense.len(), cols, triples).unwrap()
}

fn nonempty(dense: &[Vec<u64>]) -> bool {
    dense.iter().flatten().any(|&v| v > 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ppmi_matches_the_dense_oracle(dense in counts(100, 100)) {
        prop_assume!(nonempty(&dense));
        let w = apply_ppmi(&matrix(&dense)).unwrap();
        let want = brute_ppmi(&dense);
        for (a, row) in want.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                prop_assert_eq!(w.get(a, b), v);
            }
        }
    }

    #[test]
    fn ppmi_never_adds_cells(dense in counts(30, 30)) {
        prop_assume!(nonempty(&dense));
        let m = matrix(&dense);
        let w = apply_ppmi(&m).unwrap();
        prop_assert!(w.nnz() <= m.nnz());
        prop_assert!(w.triples().all(|(_, _, v)| v > 0.0 && v.is_finite()));
    }

    #[test]
    fn ppmi_is_invariant_under_power_of_two_scaling(dense in counts(30, 30), shift in 1u32..10) {
        prop_assume!(nonempty(&dense));
        let s = 1u64 << shift;
        let scaled: Vec<Vec<u64>> = dense.iter().map(|r| r.iter().map(|v| v * s).collect()).collect();
        let (a, b) = (apply_ppmi(&matrix(&dense)).unwrap(), apply_ppmi(&matrix(&scaled)).unwrap());
        prop_assert_eq!(a.triples().collect::<Vec<_>>(), b.triples().collect::<Vec<_>>());
    }

    #[test]
    fn ppmi_is_invariant_under_integer_scaling(dense in counts(30, 30), s in 2u64..1000) {
        prop_assume!(nonempty(&dense));
        let scaled: Vec<Vec<u64>> = dense.iter().map(|r| r.iter().map(|v| v * s).collect()).collect();
        let (a, b) = (apply_ppmi(&matrix(&dense)).unwrap(), apply_ppmi(&matrix(&scaled)).unwrap());
        prop_assert_eq!(a.nnz(), b.nnz());
        for ((ra, ca, va), (rb, cb, vb)) in a.triples().zip(b.triples()) {
            prop_assert_eq!((ra, ca), (rb, cb));
            prop_assert!((va - vb).abs() <= 1e-12 * va.abs().max(1.0));
        }
    }

    #[test]
    fn raw_counts_pass_through(dense in counts(20, 20)) {
        let w = apply_co(&matrix(&dense));
        for (a, row) in dense.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                prop_assert_eq!(w.get(a, b), v as f64);
            }
        }
    }

    #[test]
    fn weights_round_trip_through_text(dense in counts(20, 20)) {
        prop_assume!(nonempty(&dense));
        let w = apply_ppmi(&matrix(&dense)).unwrap();
        let mut buf = Vec::new();
        w.write(&mut buf).unwrap();
        prop_assert_eq!(WeightedMatrix::read(&buf[..]).unwrap(), w);
    }
}

#[test]
fn smoothing_with_unit_exponent_is_plain_ppmi() {
    let dense = vec![vec![4, 0, 1], vec![2, 3, 0], vec![0, 1, 7]];
    let m = matrix(&dense);
    let plain = apply_ppmi(&m).unwrap();
    let smooth = apply_smoothed_ppmi(&m, 1.0).unwrap();
    for (a, b, v) in plain.triples() {
        assert!((smooth.get(a as usize, b as usize) - v).abs() < 1e-12);
    }
    assert!(apply_smoothed_ppmi(&m, 0.0).is_err());
}

#[test]
fn empty_matrices_are_degenerate() {
    let m = CoocMatrix::from_triples(2, 2, []).unwrap();
    assert_eq!(apply_ppmi(&m).unwrap_err().exit_code(), 3);
}
