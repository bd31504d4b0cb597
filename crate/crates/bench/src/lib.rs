//! Lattices shared by the benchmarks.

use padiq::FormMatrix;

fn diag(a: &[i64]) -> FormMatrix {
    FormMatrix::diagonal(a).expect("nonsingular")
}

/// Named positive definite forms of increasing size.
pub fn positive_forms() -> Vec<(&'static str, FormMatrix)> {
    vec![
        ("1,1,1,9", diag(&[1, 1, 1, 9])),
        ("1,1,25,25", diag(&[1, 1, 25, 25])),
        ("1,2,5,10", diag(&[1, 2, 5, 10])),
        ("1,1,1,1,1", diag(&[1, 1, 1, 1, 1])),
    ]
}

/// Forms with deep Jordan splittings at 2 and 3.
pub fn local_forms() -> Vec<(&'static str, u64, FormMatrix)> {
    vec![
        (
            "ahat+a",
            2,
            FormMatrix::a_plane_hat().orthogonal_sum(&FormMatrix::a_plane()),
        ),
        ("1,1,1,1", 2, diag(&[1, 1, 1, 1])),
        ("1,2,4,8,16", 2, diag(&[1, 2, 4, 8, 16])),
        ("1,1,3,3", 3, diag(&[1, 1, 3, 3])),
        ("1,3,9,27", 3, diag(&[1, 3, 9, 27])),
    ]
}
