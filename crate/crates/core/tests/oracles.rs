mod common;

use common::oracle;

#[test]
fn monodromy_matches_factorial_scan() {
    oracle::monodromy_matches_factorial_scan();
}

#[test]
fn fixed_point_count_is_determinant() {
    oracle::fixed_point_count_is_determinant();
}

#[test]
fn gl_order_matches_companion_matrices() {
    oracle::gl_order_matches_companion_matrices();
}

#[test]
fn is_critical_matches_reduction_oracle() {
    oracle::is_critical_matches_reduction_oracle();
}

#[test]
fn binary_forms_reduce_exhaustively() {
    oracle::binary_forms_reduce_exhaustively();
}

#[test]
fn class_label_is_conjugation_invariant() {
    oracle::class_label_is_conjugation_invariant();
}

#[test]
fn embeddings_verify_on_full_tables() {
    oracle::embeddings_verify_on_full_tables();
}

#[test]
fn continuation_closed_forms_match_search() {
    oracle::continuation_closed_forms_match_search();
}
