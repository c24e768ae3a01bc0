use super::*;
use proptest::prelude::*;

fn k2() -> Tower {
    Tower::new(3, 2).unwrap()
}

fn lv(a: &[i64]) -> LexVal {
    LexVal::from_ints(a.iter().copied())
}

#[test]
fn valuation_of_monomials_in_a_box() {
    let k = k2();
    for a in -3..=3 {
        for b in -3..=3 {
            let m = k.monomial(&lv(&[a, b])).unwrap();
            assert_eq!(m.val(), lv(&[a, b]));
            let direct = &k.uniformizer().pow(a) * &k.var(1).pow(b);
            assert_eq!(m, direct);
        }
    }
}

#[test]
fn worked_valuations() {
    let k = k2();
    let f = k.parse("t^2*u + t^3").unwrap();
    assert_eq!(f.val(), lv(&[2, 1]));
    let g = k.parse("(u^2 + t)/(t*u)").unwrap();
    assert_eq!(g.val(), lv(&[-1, 1]));
    assert_eq!(k.zero().val(), LexVal::Infinite);
    assert_eq!(k.parse("1 + u").unwrap().val(), lv(&[0, 0]));
}

#[test]
fn residue_examples() {
    let k = k2();
    let f = k.parse("u + t").unwrap();
    let r = f.residue().unwrap();
    assert_eq!(r, Tower::new(3, 1).unwrap().var(1));
    assert!(k.parse("t/u").unwrap().residue().unwrap().is_zero());
    assert_eq!(
        k.parse("1/t").unwrap().residue(),
        Err(FieldError::NotInValuationRing)
    );
    // full residue down to F_p
    let g = k.parse("2 + u + t").unwrap();
    assert_eq!(g.residue_n(2).unwrap().as_prime(), Some(2));
    assert!(k.parse("u^(-1)").unwrap().residue_n(2).is_err());
}

#[test]
fn canonical_form_is_structural() {
    let k = k2();
    let a = k.parse("(t^2 - u^2)/(t - u)").unwrap();
    let b = k.parse("t + u").unwrap();
    assert_eq!(a, b);
    let c = k.parse("1/(2*t)").unwrap();
    assert_eq!(k.format(&c), "2/t");
}

#[test]
fn formatting() {
    let k = k2();
    assert_eq!(
        k.format(&k.parse("t^2*u + t + 2").unwrap()),
        "u*t^2 + t + 2"
    );
    assert_eq!(k.format(&k.parse("-u").unwrap()), "2*u");
    assert_eq!(k.format(&k.parse("t/(u+1)").unwrap()), "(1/(u + 1))*t");
    let k3 = Tower::new(2, 3).unwrap();
    assert_eq!(k3.format(&k3.parse("u3*u1 + u2").unwrap()), "u1*u3 + u2");
}

#[test]
fn parse_errors() {
    let k = k2();
    assert!(matches!(
        k.parse("1/0"),
        Err(FieldError::Parse(ParseError::DivisionByZero(_)))
    ));
    assert!(matches!(
        k.parse("v"),
        Err(FieldError::Parse(ParseError::UnknownVariable(_)))
    ));
    assert!(matches!(
        k.parse("u3"),
        Err(FieldError::Parse(ParseError::UnknownVariable(_)))
    ));
    assert!(matches!(
        k.parse("(t"),
        Err(FieldError::Parse(ParseError::UnexpectedEnd))
    ));
    assert!(matches!(
        k.parse(""),
        Err(FieldError::Parse(ParseError::Empty))
    ));
    assert!(k.parse("t^1000").is_err());
}

#[test]
fn field_op_guards() {
    let k = k2();
    let t = k.uniformizer();
    assert_eq!(
        k.field_op(FieldOp::Div, &t, &k.zero()),
        Err(FieldError::DivisionByZero)
    );
    let small = Tower::new(3, 2).unwrap().with_degree_bound(3);
    let big = t.pow(2);
    assert!(small.field_op(FieldOp::Mul, &big, &big).is_err());
    assert_eq!(small.field_op(FieldOp::Mul, &t, &t).unwrap(), big);
    assert!(Tower::new(4, 1).is_err());
}

// Random elements: sums of a few monomials over small numerators and
// denominators, so that every case of the arithmetic is reached.
fn elem(k: Tower) -> impl Strategy<Value = FieldElem> {
    let mono = (0u32..3, -3i64..=3, -3i64..=3);
    (
        prop::collection::vec(mono.clone(), 0..4),
        prop::collection::vec(mono, 1..3),
    )
        .prop_map(move |(n, d)| {
            let sum = |terms: &[(u32, i64, i64)]| {
                terms.iter().fold(k.zero(), |acc, &(c, a, b)| {
                    &acc + &(&k.int(c as i64) * &k.monomial(&lv(&[a, b])).unwrap())
                })
            };
            let den = sum(&d);
            let den = if den.is_zero() { k.one() } else { den };
            &sum(&n) / &den
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn valuation_multiplicative(f in elem(k2()), g in elem(k2())) {
        let prod = &f * &g;
        match (f.val(), g.val()) {
            (LexVal::Finite(_), LexVal::Finite(_)) => prop_assert_eq!(prod.val(), &f.val() + &g.val()),
            _ => prop_assert!(prod.val().is_infinite()),
        }
    }

    #[test]
    fn valuation_ultrametric(f in elem(k2()), g in elem(k2())) {
        let s = &f + &g;
        let m = f.val().min(g.val());
        prop_assert!(s.val() >= m);
        if f.val() != g.val() {
            prop_assert_eq!(s.val(), m);
        }
    }

    #[test]
    fn field_axioms(f in elem(k2()), g in elem(k2()), h in elem(k2())) {
        prop_assert_eq!(&(&f + &g) * &h, &(&f * &h) + &(&g * &h));
        prop_assert_eq!(&(&f - &g) + &g, f.clone());
        if !g.is_zero() {
            prop_assert_eq!(&(&f / &g) * &g, f.clone());
        }
    }

    #[test]
    fn residue_is_a_ring_map(f in elem(k2()), g in elem(k2())) {
        let nonneg = |x: &FieldElem| x.coarse_order().is_none_or(|o| o >= 0);
        prop_assume!(nonneg(&f) && nonneg(&g));
        let (rf, rg) = (f.residue().unwrap(), g.residue().unwrap());
        prop_assert_eq!((&f + &g).residue().unwrap(), &rf + &rg);
        prop_assert_eq!((&f * &g).residue().unwrap(), &rf * &rg);
    }

    #[test]
    fn text_round_trip(f in elem(k2())) {
        let k = k2();
        prop_assert_eq!(k.parse(&k.format(&f)).unwrap(), f.clone());
        prop_assert_eq!(k.parse(&f.to_string().replace("u2", "t").replace("u1", "u")).unwrap(), f);
    }
}
