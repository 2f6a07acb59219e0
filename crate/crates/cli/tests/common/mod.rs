use proptest::prelude::*;
use tlcalc::dsl::{Expr, ExprKind};
use tlcalc_core::{Complex64, Flavor};

fn label() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z][A-Za-z0-9_]{0,4}",
        "[0-9]{1,2}",
        "#[0-9a-f]{4}",
        Just("cup".to_string()),
    ]
}

fn flavor() -> impl Strategy<Value = Flavor> {
    prop_oneof![
        Just(Flavor::Plain),
        Just(Flavor::Adjoint),
        Just(Flavor::Transpose),
        Just(Flavor::Conjugate),
    ]
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(-0.0),
        (-20i32..20).prop_map(f64::from),
        -1e3..1e3f64,
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
    ]
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0usize..5).prop_map(ExprKind::Id),
        Just(ExprKind::Cup),
        Just(ExprKind::Cap),
        Just(ExprKind::Proj),
        (label(), flavor()).prop_map(|(l, f)| ExprKind::Op(l, f)),
        label().prop_map(ExprKind::Ket),
        label().prop_map(ExprKind::Bra),
        (real(), real()).prop_map(|(re, im)| ExprKind::Scalar(Complex64::new(re, im))),
    ]
    .prop_map(Expr::bare)
}

/// Arbitrary expressions, arity-correct or not.
pub fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::tensor(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::compose(a, b)),
        ]
    })
}
