//! Randomized invariants: diagonalization certificates, kernel and solve
//! contracts, Tor symmetry, and parser round-trips.

use findim_core::dsl::parse_script;
use findim_core::module::presentation;
use findim_core::ring::RingHandle;
use findim_core::scalar::Domain;
use findim_core::snf::{kernel_lattice, smith_normal_form, try_solve, verify_snf};
use findim_core::{derived, linalg, Mat};
use proptest::prelude::*;

fn small_mat(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, cols), rows)
}

fn to_mat(dom: Domain, rows: &[Vec<i64>]) -> Mat {
    let r = rows.len();
    let c = rows.first().map(|x| x.len()).unwrap_or(0);
    Mat::from_fn(dom, r, c, |i, j| dom.from_i64(rows[i][j]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_is_certified(rows in small_mat(4, 3)) {
        let m = to_mat(Domain::Int, &rows);
        let snf = smith_normal_form(&m).unwrap();
        prop_assert!(verify_snf(&m, &snf));
    }

    #[test]
    fn kernel_columns_annihilate(rows in small_mat(3, 4)) {
        let m = to_mat(Domain::Int, &rows);
        let k = kernel_lattice(&m).unwrap();
        prop_assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn solve_solutions_check_out(rows in small_mat(3, 3), x in prop::collection::vec(-4i64..=4, 3)) {
        let a = to_mat(Domain::Int, &rows);
        let xv = Mat::from_fn(Domain::Int, 3, 1, |i, _| Domain::Int.from_i64(x[i]));
        let b = a.mul(&xv);
        // a solution must exist (xv is one); the returned one must verify
        let s = try_solve(&a, &b).expect("consistent system");
        prop_assert_eq!(a.mul(&s), b);
    }

    #[test]
    fn rank_is_transpose_invariant(rows in small_mat(3, 4)) {
        let m = to_mat(Domain::Field(findim_core::scalar::Field::Rational), &rows);
        prop_assert_eq!(linalg::rank(&m), linalg::rank(&m.transpose()));
    }

    #[test]
    fn tor_is_symmetric_over_z(a in small_mat(2, 2), b in small_mat(2, 2), deg in 0usize..=2) {
        let z = RingHandle::Integers;
        let ma = presentation(&z, 2, to_mat(Domain::Int, &a)).unwrap();
        let mb = presentation(&z, 2, to_mat(Domain::Int, &b)).unwrap();
        let left = derived::tor(deg, &ma, &mb).unwrap();
        let right = derived::tor(deg, &mb, &ma).unwrap();
        prop_assert_eq!(left.describe(), right.describe());
    }

    #[test]
    fn presentation_scripts_round_trip(rows in small_mat(2, 2), deg in 0usize..=2) {
        let entries: Vec<String> = rows
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        let text = format!(
            "ring Z = integers\nmodule M = presentation(Z; [{}])\npd M\ntor {deg} M M over Z\n",
            entries.join(",")
        );
        let s1 = parse_script(&text).unwrap();
        let s2 = parse_script(&s1.to_string()).unwrap();
        let kinds = |s: &findim_core::dsl::Script| {
            s.statements.iter().map(|st| st.kind.clone()).collect::<Vec<_>>()
        };
        prop_assert_eq!(kinds(&s1), kinds(&s2));
    }
}
