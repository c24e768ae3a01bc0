use lambda_building::lattice::*;
use lambda_building::matrix::Matrix;
use lambda_building::sampling::Sampler;
use lambda_building::{LexVal, Tower};

fn k() -> Tower {
    Tower::new(3, 2).unwrap()
}

fn ctx() -> ValuationContext {
    ValuationContext::full(k())
}

fn lv(a: i64, b: i64) -> LexVal {
    LexVal::from_ints([a, b])
}

fn class(rows: &[&[&str]]) -> LatticeClass {
    LatticeClass::new(ctx(), Matrix::parse(k(), rows).unwrap()).unwrap()
}

fn id2() -> LatticeClass {
    LatticeClass::standard(ctx(), 2)
}

#[test]
fn smith_examples() {
    let m = Matrix::parse(k(), &[&["t", "0"], &["0", "1"]]).unwrap();
    assert_eq!(
        smith_form(&ctx(), &m).unwrap().invariants,
        vec![lv(0, 0), lv(1, 0)]
    );
    let i = Matrix::identity(k(), 2);
    let sf = smith_form(&ctx(), &i).unwrap();
    assert!(sf.d.is_identity());
    let m = Matrix::parse(k(), &[&["1", "1"], &["0", "u"]]).unwrap();
    let sf = smith_form(&ctx(), &m).unwrap();
    assert_eq!(sf.invariants, vec![lv(0, 0), lv(0, 1)]);
    assert_eq!(&(&sf.p * &sf.d) * &sf.q, m);
    assert!(ctx().is_unimodular(&sf.p) && ctx().is_unimodular(&sf.q));
    let singular = Matrix::parse(k(), &[&["1", "t"], &["u", "t*u"]]).unwrap();
    assert_eq!(
        smith_form(&ctx(), &singular).unwrap_err(),
        LatticeError::Singular
    );
}

#[test]
fn smith_invariants_ignore_pivot_order() {
    let mut s = Sampler::new(k(), 11);
    for seed in 0..30 {
        let m = s.sl_word(3, 4, 2);
        let base = smith_form(&ctx(), &m).unwrap();
        for r in 0..3 {
            let sf = smith_form_with(&ctx(), &m, PivotRule::Shuffled(seed * 10 + r)).unwrap();
            assert_eq!(sf.invariants, base.invariants);
            assert_eq!(&(&sf.p * &sf.d) * &sf.q, m);
            assert!(ctx().is_unimodular(&sf.p) && ctx().is_unimodular(&sf.q));
        }
    }
}

#[test]
fn class_equality_examples() {
    assert!(class_eq(&id2(), &class(&[&["t", "0"], &["0", "t"]])).unwrap());
    assert!(!class_eq(&id2(), &class(&[&["1", "0"], &["0", "t"]])).unwrap());
    assert!(class_eq(&id2(), &class(&[&["1", "0"], &["u", "1"]])).unwrap());
    let other = LatticeClass::standard(ctx(), 3);
    assert_eq!(
        class_eq(&id2(), &other).unwrap_err(),
        LatticeError::Dimension(2, 3)
    );
    let coarse = LatticeClass::standard(ValuationContext::new(k(), 1).unwrap(), 2);
    assert_eq!(
        class_eq(&id2(), &coarse).unwrap_err(),
        LatticeError::Context
    );
}

#[test]
fn relative_position_and_distances() {
    let d1t = class(&[&["1", "0"], &["0", "t"]]);
    assert_eq!(
        rel_position(&id2(), &d1t).unwrap(),
        vec![lv(0, 0), lv(1, 0)]
    );
    assert_eq!(rel_position(&d1t, &d1t).unwrap(), vec![lv(0, 0), lv(0, 0)]);
    let du = class(&[&["1/u", "0"], &["0", "u"]]);
    assert_eq!(rel_position(&id2(), &du).unwrap(), vec![lv(0, 0), lv(0, 2)]);

    assert_eq!(dist_max(&id2(), &d1t).unwrap(), lv(1, 0));
    assert_eq!(dist_max(&d1t, &d1t).unwrap(), lv(0, 0));
    assert_eq!(dist_max(&id2(), &du).unwrap(), lv(0, 2));

    assert_eq!(dist_sum(&id2(), &d1t).unwrap(), lv(1, 0));
    assert_eq!(dist_sum(&id2(), &id2()).unwrap(), lv(0, 0));
    let i3 = LatticeClass::standard(ctx(), 3);
    let d3 = LatticeClass::new(
        ctx(),
        Matrix::parse(
            k(),
            &[&["1", "0", "0"], &["0", "t", "0"], &["0", "0", "t^2"]],
        )
        .unwrap(),
    )
    .unwrap();
    assert_eq!(dist_sum(&i3, &d3).unwrap(), lv(4, 0));
}

#[test]
fn common_apartment_examples() {
    let l = class(&[&["1", "u"], &["t", "1"]]);
    let ca = common_apartment(&l, &l).unwrap();
    assert_eq!(ca.x1, ca.x2);
    assert_eq!(ca.x1, ApartmentPoint::origin(2, 2));

    let d1t = class(&[&["1", "0"], &["0", "t"]]);
    let ca = common_apartment(&id2(), &d1t).unwrap();
    assert!(ca.basis.is_identity());
    assert_eq!(
        ca.x2,
        ApartmentPoint::from_ints(&[&[0, 0], &[1, 0]]).unwrap()
    );

    let l2 = class(&[&["1", "1"], &["0", "u"]]);
    let ca = common_apartment(&id2(), &l2).unwrap();
    assert_eq!(
        ca.x2,
        ApartmentPoint::from_ints(&[&[0, 0], &[0, 1]]).unwrap()
    );
    check_apartment(&id2(), &l2, &ca);
}

fn check_apartment(l1: &LatticeClass, l2: &LatticeClass, ca: &CommonApartment) {
    // both classes are the diagonal classes x1, x2 in the returned basis
    for (l, x) in [(l1, &ca.x1), (l2, &ca.x2)] {
        let c = LatticeClass::new(
            *l.context(),
            ca.basis.inverse().unwrap() * l.basis().clone(),
        )
        .unwrap();
        assert_eq!(&psi(&c).unwrap(), x);
    }
    let enc = enclosure(&[ca.x1.clone(), ca.x2.clone()]).unwrap();
    assert!(enc.contains(&ca.x1) && enc.contains(&ca.x2));
}

#[test]
fn common_apartment_always_exists() {
    let mut s = Sampler::new(k(), 5);
    for n in [2, 3] {
        for _ in 0..40 {
            let (a, b) = (s.lattice(&ctx(), n), s.lattice(&ctx(), n));
            let ca = common_apartment(&a, &b).unwrap();
            check_apartment(&a, &b, &ca);
            let mut gaps: Vec<LexVal> = ca
                .x2
                .coords()
                .iter()
                .map(|c| c - &ca.x2.coords()[0])
                .collect();
            gaps.sort();
            let base = gaps[0].clone();
            let gaps: Vec<LexVal> = gaps.iter().map(|g| g - &base).collect();
            assert_eq!(gaps, rel_position(&a, &b).unwrap());
        }
    }
}

#[test]
fn psi_examples() {
    let l = class(&[&["t", "0"], &["0", "1"]]);
    assert_eq!(
        psi(&l).unwrap(),
        ApartmentPoint::from_ints(&[&[0, 0], &[-1, 0]]).unwrap()
    );
    assert_eq!(psi(&id2()).unwrap(), ApartmentPoint::origin(2, 2));
    let x = ApartmentPoint::from_ints(&[&[0, 0], &[2, -1]]).unwrap();
    let l = psi_inv(&ctx(), &x).unwrap();
    assert_eq!(
        l.basis(),
        &Matrix::parse(k(), &[&["1", "0"], &["0", "t^2/u"]]).unwrap()
    );
    assert_eq!(psi(&l).unwrap(), x);
    // another representative of the same diagonal class
    let l = class(&[&["t", "t*u"], &["0", "1"]]);
    assert_eq!(
        psi(&l).unwrap(),
        ApartmentPoint::from_ints(&[&[0, 0], &[-1, 0]]).unwrap()
    );
    let off = class(&[&["1", "0"], &["1/t", "1"]]);
    assert_eq!(psi(&off).unwrap_err(), LatticeError::NotInApartment);
}

#[test]
fn enclosure_examples() {
    let o = ApartmentPoint::origin(2, 2);
    let e = enclosure(std::slice::from_ref(&o)).unwrap();
    assert!(e.iter().all(|(_, l)| l.is_zero()));
    let y = ApartmentPoint::from_ints(&[&[0, 0], &[1, 0]]).unwrap();
    let e = enclosure(&[o.clone(), y.clone()]).unwrap();
    assert_eq!(e.get(1, 0), Some(&lv(1, 0)));
    assert_eq!(e.get(0, 1), Some(&lv(0, 0)));
    assert!(e.contains(&o) && e.contains(&y));
    let far = ApartmentPoint::from_ints(&[&[0, 0], &[2, 0]]).unwrap();
    assert!(!e.contains(&far));
    let x = ApartmentPoint::from_ints(&[&[0, 0], &[3, 1], &[-1, 2]]).unwrap();
    let e = enclosure(std::slice::from_ref(&x)).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert_eq!(e.get(i, j).unwrap(), &-x.root(i, j));
            }
        }
    }
    assert_eq!(enclosure(&[]).unwrap_err(), LatticeError::Empty);
}

#[test]
fn action_examples() {
    let i = Matrix::identity(k(), 2);
    let l = class(&[&["1", "u"], &["t", "1"]]);
    assert!(class_eq(&act(&i, &l).unwrap(), &l).unwrap());
    let d = Matrix::parse(k(), &[&["t", "0"], &["0", "1/t"]]).unwrap();
    assert!(class_eq(
        &act(&d, &id2()).unwrap(),
        &class(&[&["t", "0"], &["0", "1/t"]])
    )
    .unwrap());
    let x = Matrix::parse(k(), &[&["1", "u"], &["0", "1"]]).unwrap();
    assert!(class_eq(&act(&x, &id2()).unwrap(), &id2()).unwrap());
    let bad = Matrix::parse(k(), &[&["t", "0"], &["0", "1"]]).unwrap();
    assert_eq!(
        act(&bad, &id2()).unwrap_err(),
        LatticeError::NotSpecialLinear
    );
}

#[test]
fn distances_are_invariant_and_metric() {
    let mut s = Sampler::new(k(), 21);
    for n in [2, 3] {
        for _ in 0..40 {
            let (a, b, c) = (
                s.lattice(&ctx(), n),
                s.lattice(&ctx(), n),
                s.lattice(&ctx(), n),
            );
            let g = s.sl_word(n, 3, 2);
            for dist in [dist_max, dist_sum] {
                let ab = dist(&a, &b).unwrap();
                assert_eq!(ab, dist(&b, &a).unwrap());
                assert!(dist(&a, &c).unwrap() <= &ab + &dist(&b, &c).unwrap());
                assert_eq!(ab.is_zero(), class_eq(&a, &b).unwrap());
                let (ga, gb) = (act(&g, &a).unwrap(), act(&g, &b).unwrap());
                assert_eq!(dist(&ga, &gb).unwrap(), ab);
            }
        }
    }
}

#[test]
fn psi_is_an_isometry() {
    let mut s = Sampler::new(k(), 8);
    for n in [2, 3] {
        for _ in 0..50 {
            let (x, y) = (s.apartment_point(n, 3), s.apartment_point(n, 3));
            let (lx, ly) = (psi_inv(&ctx(), &x).unwrap(), psi_inv(&ctx(), &y).unwrap());
            assert_eq!(dist_sum(&lx, &ly).unwrap(), apartment_dist_sum(&x, &y));
            assert_eq!(psi(&lx).unwrap(), x);
        }
    }
}

#[test]
fn stabilizer_of_the_standard_lattice() {
    let mut s = Sampler::new(k(), 3);
    let o = LatticeClass::standard(ctx(), 3);
    for _ in 0..30 {
        let g = s.sl_integral(&ctx(), 3, 5);
        assert!(g.is_integral());
        assert!(class_eq(&act(&g, &o).unwrap(), &o).unwrap());
        let w = s.sl_word(3, 4, 3);
        assert_eq!(
            w.is_integral(),
            class_eq(&act(&w, &o).unwrap(), &o).unwrap()
        );
    }
}
