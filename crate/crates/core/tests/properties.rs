use proptest::prelude::*;

use asymspec::expr::{parse, BinOp, Expression, Func, Node};
use asymspec::oracle::{count_boundary_walks, eig_tridiagonal, staircase, sturm_count};
use asymspec::sequence::TridiagonalMatrix;

fn node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        (0u32..100_000).prop_map(|v| Node::Num(v as f64 / 1000.0)),
        Just(Node::X),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow)
        ];
        let func = prop_oneof![Just(Func::Sqrt), Just(Func::Sin), Just(Func::Exp), Just(Func::Abs), Just(Func::Acos)];
        prop_oneof![
            inner.clone().prop_map(|a| Node::Neg(Box::new(a))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, l, r)| Node::Binary(o, Box::new(l), Box::new(r))),
            (func, inner).prop_map(|(f, a)| Node::Call(f, Box::new(a))),
        ]
    })
}

fn tridiagonal() -> impl Strategy<Value = TridiagonalMatrix> {
    (2usize..60).prop_flat_map(|d| {
        (
            proptest::collection::vec(-3.0f64..3.0, d),
            proptest::collection::vec(-2.0f64..2.0, d - 1),
        )
            .prop_map(|(diag, off)| TridiagonalMatrix::new(diag, off).unwrap())
    })
}

proptest! {
    #[test]
    fn printed_expressions_reparse_to_the_same_tree(root in node()) {
        let e = Expression { source: String::new(), root };
        let back = parse(&e.to_string()).unwrap();
        prop_assert_eq!(back.root, e.root);
    }

    #[test]
    fn reparsed_expressions_evaluate_identically(root in node(), x in -2.0f64..2.0) {
        let e = Expression { source: String::new(), root };
        let back = parse(&e.to_string()).unwrap();
        match (e.eval(x), back.eval(x)) {
            (Ok(a), Ok(b)) => prop_assert!(a == b || (a.is_nan() && b.is_nan())),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn sturm_count_matches_staircase(m in tridiagonal(), probes in proptest::collection::vec(-8.0f64..8.0, 50)) {
        let e = eig_tridiagonal(&m, false).unwrap();
        for l in probes {
            let near = e.eigenvalues.iter().any(|v| (v - l).abs() < 1e-9);
            if !near {
                prop_assert_eq!(sturm_count(&m, l) as f64, (staircase(&e, l) * e.dim() as f64).round());
            }
        }
    }

    #[test]
    fn eigenpairs_are_orthonormal_with_small_residuals(m in tridiagonal()) {
        let e = eig_tridiagonal(&m, true).unwrap();
        let v = e.eigenvectors.as_ref().unwrap();
        let norm = m.norm_inf().max(1.0);
        for (l, x) in e.eigenvalues.iter().zip(v) {
            let r = m.mul_vec(x);
            let res = r.iter().zip(x).map(|(a, b)| (a - l * b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-9 * norm, "residual {res}");
        }
        for i in 0..v.len() {
            for k in 0..v.len() {
                let dot: f64 = v[i].iter().zip(&v[k]).map(|(a, b)| a * b).sum();
                let want = if i == k { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() <= 1e-8, "({i},{k}) {dot}");
            }
        }
        let trace: f64 = m.diag.iter().sum();
        let sum: f64 = e.eigenvalues.iter().sum();
        prop_assert!((trace - sum).abs() <= 1e-9 * e.dim() as f64 * norm);
    }
}

fn choose(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn walk_counts_follow_the_binomial_formula() {
    for m in (0..=12).step_by(2) {
        for n in 0..=m / 2 {
            assert_eq!(count_boundary_walks(m, n).unwrap(), choose(m as u64, (n + m / 2) as u64), "m={m} n={n}");
        }
    }
    assert_eq!(count_boundary_walks(4, 0).unwrap(), 6);
    assert_eq!(count_boundary_walks(4, 2).unwrap(), 1);
    assert_eq!(count_boundary_walks(2, 0).unwrap(), 2);
    assert!(count_boundary_walks(3, 0).is_err());
    assert!(count_boundary_walks(18, 0).is_err());
}
