//! Randomized property suites: tensor algebra laws, the dimension-2
//! degeneracies, jet derivatives against finite differences, and parser
//! robustness.

use proptest::prelude::*;

use siblings::expr::Expr;
use siblings::tensor::{check_riemann_symmetries, kn_product, SymBilinear};

fn sym_from(dim: usize, entries: &[f64]) -> SymBilinear {
    let mut s = SymBilinear::zeros(dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            s.set(i, j, entries[k]);
            k += 1;
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn kn_product_has_riemann_symmetries(
        dim in 2usize..=5,
        entries in prop::collection::vec(-1.0f64..1.0, 2 * 15),
    ) {
        let tri = dim * (dim + 1) / 2;
        let a = sym_from(dim, &entries[..tri]);
        let b = sym_from(dim, &entries[15..15 + tri]);
        let r = kn_product(&a, &b).unwrap();
        let rep = check_riemann_symmetries(&r, 1e-12);
        prop_assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn kn_product_is_bilinear_and_symmetric(
        dim in 2usize..=4,
        entries in prop::collection::vec(-1.0f64..1.0, 3 * 10),
        scale in -2.0f64..2.0,
    ) {
        let tri = dim * (dim + 1) / 2;
        let a = sym_from(dim, &entries[..tri]);
        let b = sym_from(dim, &entries[10..10 + tri]);
        let c = sym_from(dim, &entries[20..20 + tri]);

        // kn(a*A + B, C) = a*kn(A,C) + kn(B,C)
        let lhs = kn_product(&a.scale(scale).add(&b), &c).unwrap();
        let rhs = kn_product(&a, &c).unwrap().scale(scale)
            .add(&kn_product(&b, &c).unwrap());
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12);

        // kn(A, B) = kn(B, A)
        let ab = kn_product(&a, &b).unwrap();
        let ba = kn_product(&b, &a).unwrap();
        prop_assert!(ab.sub(&ba).max_abs() <= 1e-12);
    }

    #[test]
    fn dimension_two_degeneracies(
        l in prop::collection::vec(-1.0f64..1.0, 4),
        v in prop::collection::vec(0.1f64..1.0, 2),
        w in prop::collection::vec(-1.0f64..1.0, 2),
    ) {
        // random SPD metric in dimension 2
        let g = SymBilinear::from_fn(2, |i, j| {
            let mut s = if i == j { 0.1 } else { 0.0 };
            for k in 0..2 {
                s += l[i * 2 + k] * l[j * 2 + k];
            }
            s
        });
        // unit vector and its lowered form
        let norm = g.apply(&v, &v).sqrt();
        let t: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let tflat = g.lower(&t);
        let ttf = SymBilinear::outer(&tflat);

        // g kn (T# ⊗ T#) = 1/2 g kn g for unit T in dimension 2
        let lhs = kn_product(&g, &ttf).unwrap();
        let rhs = kn_product(&g, &g).unwrap().scale(0.5);
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12);

        // symmetric rank-1 tensors (the shape of nabla T# in dimension 2)
        // square to zero under the product
        let rank1 = SymBilinear::outer(&w);
        let sq = kn_product(&rank1, &rank1).unwrap();
        prop_assert!(sq.max_abs() <= 1e-12);
    }

    #[test]
    fn broken_symmetry_is_detected(
        dim in 2usize..=4,
        entries in prop::collection::vec(-1.0f64..1.0, 2 * 10),
        bump in 0.01f64..1.0,
    ) {
        let tri = dim * (dim + 1) / 2;
        let a = sym_from(dim, &entries[..tri]);
        let g = sym_from(dim, &entries[10..10 + tri]).add(&SymBilinear::identity(dim).scale(2.0));
        let mut r = kn_product(&a, &g).unwrap();
        // break antisymmetry in the first slot pair
        r.set(0, 0, 1, 1, r.get(0, 0, 1, 1) + bump);
        let rep = check_riemann_symmetries(&r, 1e-9);
        prop_assert!(!rep.passed);
    }
}

/// Random multivariate polynomial of degree <= 4 in <= 4 variables, as an
/// expression tree plus a closure evaluating it directly.
fn poly_strategy() -> impl Strategy<Value = (usize, Vec<(f64, Vec<u32>)>)> {
    (1usize..=4).prop_flat_map(|nvars| {
        let term = (
            -2.0f64..2.0,
            prop::collection::vec(0u32..=4, nvars).prop_filter("degree <= 4", |exps| {
                exps.iter().sum::<u32>() <= 4
            }),
        );
        (
            Just(nvars),
            prop::collection::vec(term, 1..6),
        )
    })
}

fn poly_expr(nvars: usize, terms: &[(f64, Vec<u32>)]) -> Expr {
    let mut acc = Expr::constant(nvars, 0.0);
    for (coeff, exps) in terms {
        let mut term = Expr::constant(nvars, *coeff);
        for (var, &e) in exps.iter().enumerate() {
            if e > 0 {
                term = term.mul(&Expr::coord(nvars, var).powi(e as i64));
            }
        }
        acc = acc.add(&term);
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jet_derivatives_match_central_differences(
        (nvars, terms) in poly_strategy(),
        raw_point in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let e = poly_expr(nvars, &terms);
        let p = &raw_point[..nvars];
        let jet = e.eval_jet(p).unwrap();
        let h = 1e-4;
        let at = |q: &[f64]| e.eval(q).unwrap();
        for i in 0..nvars {
            let mut hi = p.to_vec();
            let mut lo = p.to_vec();
            hi[i] += h;
            lo[i] -= h;
            let fd = (at(&hi) - at(&lo)) / (2.0 * h);
            prop_assert!(
                (jet.grad[i] - fd).abs() <= 1e-6 * (1.0 + jet.grad[i].abs()),
                "grad[{i}]: jet {} fd {fd}", jet.grad[i]
            );
        }
        let h2 = 1e-4;
        for i in 0..nvars {
            for j in i..nvars {
                let fd = if i == j {
                    let mut hi = p.to_vec();
                    let mut lo = p.to_vec();
                    hi[i] += h2;
                    lo[i] -= h2;
                    (at(&hi) - 2.0 * at(p) + at(&lo)) / (h2 * h2)
                } else {
                    let mut pp = p.to_vec();
                    let mut pm = p.to_vec();
                    let mut mp = p.to_vec();
                    let mut mm = p.to_vec();
                    pp[i] += h2; pp[j] += h2;
                    pm[i] += h2; pm[j] -= h2;
                    mp[i] -= h2; mp[j] += h2;
                    mm[i] -= h2; mm[j] -= h2;
                    (at(&pp) - at(&pm) - at(&mp) + at(&mm)) / (4.0 * h2 * h2)
                };
                prop_assert!(
                    (jet.hess(i, j) - fd).abs() <= 2e-6 * (1.0 + jet.hess(i, j).abs()),
                    "hess[{i}{j}]: jet {} fd {fd}", jet.hess(i, j)
                );
            }
        }
    }

    #[test]
    fn rendered_expressions_round_trip(
        (nvars, terms) in poly_strategy(),
        raw_point in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let names: Vec<String> = (0..nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let e = poly_expr(nvars, &terms);
        let text = e.render(&refs);
        let back = Expr::parse(&text, &refs).unwrap();
        let p = &raw_point[..nvars];
        prop_assert_eq!(e.eval(p).unwrap(), back.eval(p).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parser_never_panics(source in "[ -~]{0,40}") {
        let _ = Expr::parse(&source, &["x", "y"]);
    }

    #[test]
    fn parser_never_panics_on_math_like_input(
        source in r#"[0-9a-z+\-*/^(). ]{0,60}"#,
    ) {
        let _ = Expr::parse(&source, &["x", "y", "z"]);
    }
}
