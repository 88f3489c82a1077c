use grassmann_hf::fixtures::{desk_integrals, random_integrals, random_pair};
use grassmann_hf::formats::{
    load_integrals, parse_integrals, parse_orbitals, write_integrals, write_orbitals, FormatError,
};
use grassmann_hf::hf::IntegralSet;
use proptest::prelude::*;

fn assert_identical(a: &IntegralSet, b: &IntegralSet) {
    assert_eq!((a.d(), a.n_alpha(), a.n_beta()), (b.d(), b.n_alpha(), b.n_beta()));
    assert_eq!(a.e_nuc(), b.e_nuc());
    assert_eq!(a.s(), b.s());
    assert_eq!(a.h(), b.h());
    assert_eq!(a.g().as_slice(), b.g().as_slice());
}

#[test]
fn shipped_desk_file_matches_fixture() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/desk4.gfi");
    assert_identical(&load_integrals(path).unwrap(), &desk_integrals());
}

#[test]
fn written_file_lists_each_symmetry_class_once() {
    let ints = random_integrals(3, 1, 1, 2);
    let text = write_integrals(&ints);
    let g_lines = text.lines().filter(|l| l.starts_with("G ")).count();
    // d = 3 has (m² + m)/2 classes with m = d(d+1)/2 = 6
    assert_eq!(g_lines, 21);
    assert_eq!(text.lines().filter(|l| l.starts_with("S ")).count(), 6);
}

#[test]
fn one_record_fills_its_whole_orbit() {
    let text = "GFI 1\nd 2 na 1 nb 0 enuc 0\nS 1 1 1\nS 2 2 1\nG 1 2 1 1 0.25\n";
    let ints = parse_integrals(text).unwrap();
    let g = ints.g();
    for idx in [[0, 1, 0, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 0, 1, 0]] {
        assert_eq!(g.get(idx[0], idx[1], idx[2], idx[3]), 0.25, "{idx:?}");
    }
    assert_eq!(g.get(0, 0, 0, 0), 0.0);
    assert_eq!(g.get(0, 1, 0, 1), 0.0);
}

#[test]
fn errors_carry_line_numbers() {
    let text = "GFI 1\nd 2 na 1 nb 1 enuc 0\nS 1 1 1\nS 2 2 1\nH 3 1 0.5\n";
    match parse_integrals(text) {
        Err(FormatError::Parse { line, .. }) => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }
    let text = "GFI 1\nd 2 na 1 nb 1 enuc 0\nS 1 1 1\nS 2 2 1\nG 1 1 1 2 0.1\nG 2 1 1 1 0.2\n";
    match parse_integrals(text) {
        Err(FormatError::Symmetry { line, first_line, .. }) => assert_eq!((line, first_line), (6, 5)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn orbitals_round_trip_bit_exactly() {
    let ints = desk_integrals();
    let pair = random_pair(&ints, 8);
    let back = parse_orbitals(&write_orbitals(&pair), 4, 2, 2).unwrap();
    assert_eq!(back.c_alpha, pair.c_alpha);
    assert_eq!(back.c_beta, pair.c_beta);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn integrals_round_trip_bit_exactly(seed in 0u64..100_000, d in 1usize..6) {
        let na = 1 + seed as usize % d;
        let nb = seed as usize % (d + 1);
        let ints = random_integrals(d, na, nb, seed);
        let back = parse_integrals(&write_integrals(&ints)).unwrap();
        assert_identical(&ints, &back);
    }
}
