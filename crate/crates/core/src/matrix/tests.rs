use super::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn x_perm() -> MatrixRepr {
    MatrixRepr::Permutation(PermMatrix::new(vec![1, 0], vec![ONE, ONE]).unwrap())
}

fn iswap() -> MatrixRepr {
    MatrixRepr::Permutation(
        PermMatrix::from_one_based(&[1, 3, 2, 4], vec![ONE, c(0.0, 1.0), c(0.0, 1.0), ONE]).unwrap(),
    )
}

fn shift(theta: f64) -> MatrixRepr {
    MatrixRepr::Diagonal(vec![ONE, C64::from_polar(1.0, theta)])
}

#[test]
fn identity_times_diagonal_is_diagonal() {
    let d = MatrixRepr::Diagonal(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5)]);
    let p = MatrixRepr::Identity(4).mul(&d).unwrap();
    assert_eq!(p, d);
}

#[test]
fn perm_product_stays_perm() {
    let a = iswap();
    let b = MatrixRepr::Permutation(PermMatrix::new(vec![3, 2, 1, 0], vec![ONE; 4]).unwrap());
    let p = a.mul(&b).unwrap();
    assert_eq!(p.format(), Format::Permutation);
    assert!(p.max_abs_diff(&MatrixRepr::Dense(a.to_dense() * b.to_dense())) < 1e-14);
}

#[test]
fn dense_times_identity() {
    let m = MatrixRepr::dense_from_rows(2, &[ONE, c(2.0, 0.0), c(0.0, 3.0), ONE]).unwrap();
    assert_eq!(m.mul(&MatrixRepr::Identity(2)).unwrap(), m);
    assert!(m.mul(&MatrixRepr::Identity(4)).is_err());
}

#[test]
fn kron_examples() {
    assert_eq!(MatrixRepr::Identity(2).kron(&MatrixRepr::Identity(2)), MatrixRepr::Identity(4));
    let z = MatrixRepr::Diagonal(vec![ONE, -ONE]);
    assert_eq!(
        z.kron(&MatrixRepr::Identity(2)),
        MatrixRepr::Diagonal(vec![ONE, ONE, -ONE, -ONE])
    );
    match x_perm().kron(&x_perm()) {
        MatrixRepr::Permutation(p) => assert_eq!(p.perm_one_based(), vec![4, 3, 2, 1]),
        other => panic!("expected permutation, got {:?}", other.format()),
    }
}

#[test]
fn add_and_hadamard_examples() {
    assert_eq!(
        MatrixRepr::Identity(2).add(&MatrixRepr::Identity(2)).unwrap(),
        MatrixRepr::Diagonal(vec![c(2.0, 0.0); 2])
    );
    let s = MatrixRepr::Sparse(CscMatrix::from_triplets(2, [(0, 1, ONE), (1, 1, c(0.5, 0.0))]));
    assert_eq!(s.add(&s).unwrap().format(), Format::Sparse);
    let m = MatrixRepr::dense_from_rows(2, &[c(1.0, 1.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, -1.0)]).unwrap();
    let h = m.hadamard(&MatrixRepr::Identity(2)).unwrap();
    assert_eq!(h, MatrixRepr::Diagonal(vec![c(1.0, 1.0), c(4.0, -1.0)]));
    assert!(m.add(&MatrixRepr::Identity(4)).is_err());
}

#[test]
fn adjoint_examples() {
    let theta = 0.3;
    assert_eq!(
        shift(theta).adjoint(),
        MatrixRepr::Diagonal(vec![ONE, C64::from_polar(1.0, -theta)])
    );
    assert_eq!(MatrixRepr::Identity(8).adjoint(), MatrixRepr::Identity(8));
    let u = iswap();
    let prod = u.adjoint().mul(&u).unwrap();
    assert!(prod.max_abs_diff(&MatrixRepr::Identity(4)) < 1e-14);
    assert_eq!(u.adjoint().format(), Format::Permutation);
}

#[test]
fn matvec_cols_examples() {
    let mut buf = vec![ONE, ZERO];
    x_perm().matvec_cols(&mut buf).unwrap();
    assert_eq!(buf, vec![ZERO, ONE]);

    let mut buf = vec![c(0.3, 0.1), c(-0.2, 0.9), ONE, ZERO];
    let before = buf.clone();
    MatrixRepr::Identity(2).matvec_cols(&mut buf).unwrap();
    assert_eq!(buf, before);

    let u = [c(1.0, 2.0), c(0.0, -1.0), c(0.5, 0.5)];
    let v = [c(0.25, 0.0), c(-1.0, 1.0), c(2.0, 0.0)];
    let o = MatrixRepr::OuterProduct(OuterProduct::from_vectors(&u, &v).unwrap());
    let col = vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5)];
    let mut got = col.clone();
    o.matvec_cols(&mut got).unwrap();
    let dense = o.to_dense() * nalgebra::DVector::from_column_slice(&col);
    for (g, d) in got.iter().zip(dense.iter()) {
        assert!((g - d).norm() < 1e-14);
    }
    assert!(MatrixRepr::Identity(2).matvec_cols(&mut [ONE; 3]).is_err());
}

#[test]
fn props_examples() {
    assert_eq!(x_perm().props(), OpProps::known(true, true, true));
    let p = shift(0.3).props();
    assert_eq!((p.hermitian, p.unitary, p.reflexive), (Some(false), Some(true), Some(false)));
    let p = iswap().props();
    assert_eq!((p.hermitian, p.unitary), (Some(false), Some(true)));
    let h = MatrixRepr::dense_from_rows(2, &[ONE, ONE, ONE, -ONE])
        .unwrap()
        .scale(c(1.0 / 2f64.sqrt(), 0.0));
    assert_eq!(h.props(), OpProps::known(true, true, true));
    assert!(!shift(PI).props().is_reflexive() || shift(PI).props().is_hermitian());
}

#[test]
fn dump_round_trip() {
    let mats = [
        MatrixRepr::Identity(4),
        shift(0.7),
        iswap(),
        MatrixRepr::Sparse(CscMatrix::from_triplets(4, [(0, 3, c(0.1, 0.2)), (2, 1, c(-3.0, 0.0))])),
        MatrixRepr::dense_from_rows(2, &[ONE, c(0.1, 1e-17), c(1.0 / 3.0, 0.0), -ONE]).unwrap(),
    ];
    for m in mats {
        let text = io::dump_to_string(&m);
        let back = io::load_from_str(&text).unwrap();
        assert_eq!(back, m, "{text}");
    }
    assert!(io::load_from_str("2 Q 0\n").is_err());
    assert!(io::load_from_str("2 S 1\n5 0 1 0\n").is_err());
}

mod conformance {
    use super::*;
    use proptest::prelude::*;

    fn arb_c() -> impl Strategy<Value = C64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
    }

    fn arb_matrix(format: Format, dim: usize) -> BoxedStrategy<MatrixRepr> {
        match format {
            Format::Identity => Just(MatrixRepr::Identity(dim)).boxed(),
            Format::Diagonal => proptest::collection::vec(arb_c(), dim)
                .prop_map(MatrixRepr::Diagonal)
                .boxed(),
            Format::Permutation => (
                Just((0..dim).collect::<Vec<_>>()).prop_shuffle(),
                proptest::collection::vec(arb_c(), dim),
            )
                .prop_map(|(p, v)| MatrixRepr::Permutation(PermMatrix::new(p, v).unwrap()))
                .boxed(),
            Format::Sparse => proptest::collection::vec((0..dim, 0..dim, arb_c()), 1..2 * dim)
                .prop_map(move |t| MatrixRepr::Sparse(CscMatrix::from_triplets(dim, t)))
                .boxed(),
            _ => proptest::collection::vec(arb_c(), dim * dim)
                .prop_map(move |v| MatrixRepr::dense_from_rows(dim, &v).unwrap())
                .boxed(),
        }
    }

    fn dense_kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
        a.kronecker(b)
    }

    fn check(op: BinaryOp, a: &MatrixRepr, b: &MatrixRepr) -> std::result::Result<(), TestCaseError> {
        let (da, db) = (a.to_dense(), b.to_dense());
        let (got, want) = match op {
            BinaryOp::Mul => (a.mul(b).unwrap(), &da * &db),
            BinaryOp::Kron => (a.kron(b), dense_kron(&da, &db)),
            BinaryOp::Add => (a.add(b).unwrap(), &da + &db),
            BinaryOp::Hadamard => (a.hadamard(b).unwrap(), da.component_mul(&db)),
        };
        prop_assert_eq!(got.format(), promote(op, a.format(), b.format()));
        prop_assert!(got.max_abs_diff(&MatrixRepr::Dense(want)) <= 1e-12);
        Ok(())
    }

    fn pair() -> impl Strategy<Value = (MatrixRepr, MatrixRepr)> {
        let classes = Format::TABLE.to_vec();
        (
            proptest::sample::select(classes.clone()),
            proptest::sample::select(classes),
            prop_oneof![Just(4usize), Just(8usize)],
        )
            .prop_flat_map(|(fa, fb, d)| (arb_matrix(fa, d), arb_matrix(fb, d)))
    }

    proptest! {
        #[test]
        fn all_ops_follow_table((a, b) in pair()) {
            for op in BinaryOp::ALL {
                check(op, &a, &b)?;
            }
        }

        #[test]
        fn perm_product_is_composition(
            p in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
            q in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
        ) {
            let a = PermMatrix::new(p.clone(), vec![ONE; 8]).unwrap();
            let b = PermMatrix::new(q.clone(), vec![ONE; 8]).unwrap();
            let prod = MatrixRepr::Permutation(a).mul(&MatrixRepr::Permutation(b)).unwrap();
            let MatrixRepr::Permutation(r) = prod else { panic!("not a permutation") };
            let want: Vec<usize> = p.iter().map(|&i| q[i]).collect();
            prop_assert_eq!(r.perm(), &want[..]);
        }

        #[test]
        fn outer_product_matvec(
            n in 1usize..=64,
            seed in proptest::collection::vec(arb_c(), 3 * 64),
        ) {
            let (u, rest) = seed.split_at(64);
            let (v, x) = rest.split_at(64);
            let o = MatrixRepr::OuterProduct(OuterProduct::from_vectors(&u[..n], &v[..n]).unwrap());
            let mut got = x[..n].to_vec();
            o.matvec_cols(&mut got).unwrap();
            let want = o.to_dense() * nalgebra::DVector::from_column_slice(&x[..n]);
            for (g, w) in got.iter().zip(want.iter()) {
                prop_assert!((g - w).norm() <= 1e-12);
            }
        }
    }
}
