use lambda_building::boundary::*;
use lambda_building::lattice::*;
use lambda_building::matrix::Matrix;
use lambda_building::projections::{coarsen, CoarseContext};
use lambda_building::sampling::Sampler;
use lambda_building::{LexVal, Tower};

fn k() -> Tower {
    Tower::new(3, 2).unwrap()
}

fn m(tower: Tower, rows: &[&[&str]]) -> Matrix {
    Matrix::parse(tower, rows).unwrap()
}

fn end(rows: &[&[&str]]) -> End {
    End::new(m(k(), rows)).unwrap()
}

fn bp(rows: &[&[&str]]) -> BoundaryPoint {
    BoundaryPoint::new(m(k(), rows)).unwrap()
}

fn coarse(rows: &[&[&str]]) -> LatticeClass {
    let cc = CoarseContext::new(k(), 1).unwrap();
    LatticeClass::new(cc.coarse(), m(k(), rows)).unwrap()
}

fn random_end(s: &mut Sampler) -> End {
    let g = s.sl_word(2, 4, 2);
    let c = s.term(2);
    End::new(g.scale(&c)).unwrap()
}

// Membership of h in End(𝕆e₁ ⊕ 𝒪e₂), written out directly.
fn in_ring(h: &Matrix) -> bool {
    let full = |i, j| h.get(i, j).val();
    let coarse = |i, j| h.get(i, j).val().to_i64s().map(|v| v[0]);
    full(0, 0).is_nonnegative()
        && coarse(1, 0).is_none_or(|v| v >= 0)
        && coarse(0, 1).is_none_or(|v| v >= 1)
        && coarse(1, 1).is_none_or(|v| v >= 0)
}

fn brute_force_eq(a: &BoundaryPoint, b: &BoundaryPoint) -> bool {
    let g = &a.basis().inverse().unwrap() * b.basis();
    let gi = g.inverse().unwrap();
    (-4..=4).any(|x| {
        (-4..=4).any(|y| {
            let lam = k().monomial(&LexVal::from_ints([x, y])).unwrap();
            in_ring(&g.scale(&lam.inv())) && in_ring(&gi.scale(&lam))
        })
    })
}

#[test]
fn boundary_point_equality_matches_brute_force() {
    let entries = [
        "0", "1", "2", "u", "1/u", "t", "t/u^2", "u^2/t", "1 + u", "t + u*t",
    ];
    let mut checked = 0;
    let mut equal = 0;
    for a in &entries {
        for b in &entries {
            for c in &entries {
                for d in ["1", "u", "t", "1/t"] {
                    let g = m(k(), &[&[a, b], &[c, d]]);
                    if g.det().unwrap().is_zero() {
                        continue;
                    }
                    let p = bp(&[&["1", "0"], &["0", "1"]]);
                    let q = BoundaryPoint::new(g).unwrap();
                    let fast = bp_eq(&p, &q).unwrap();
                    assert_eq!(fast, brute_force_eq(&p, &q), "{:?}", q.basis());
                    checked += 1;
                    equal += fast as usize;
                }
            }
        }
    }
    assert!(checked > 300 && equal > 20 && equal < checked);
}

#[test]
fn boundary_point_equality_is_homothety_invariant() {
    let mut s = Sampler::new(k(), 1);
    for _ in 0..30 {
        let e = random_end(&mut s);
        let p = lim(&e, Sign::Minus);
        let c = s.nonzero_elem();
        let q = BoundaryPoint::new(p.basis().scale(&c)).unwrap();
        assert!(bp_eq(&p, &q).unwrap());
        let shifted = &p.basis().clone() * &m(k(), &[&["1", "0"], &["0", "u"]]);
        assert!(bp_eq(&p, &BoundaryPoint::new(shifted).unwrap()).unwrap());
        let moved = &p.basis().clone() * &m(k(), &[&["t", "0"], &["0", "1"]]);
        assert!(!bp_eq(&p, &BoundaryPoint::new(moved).unwrap()).unwrap());
    }
}

#[test]
fn end_equality_examples() {
    let e = end(&[&["1", "0"], &["0", "1"]]);
    assert!(end_eq(&e, &end(&[&["1", "0"], &["0", "u"]])).unwrap());
    assert!(!end_eq(&e, &end(&[&["0", "1"], &["1", "0"]])).unwrap());
    assert!(end_eq(&e, &e).unwrap());
    assert!(end_eq(&e, &end(&[&["u", "0"], &["0", "1"]])).unwrap());
    assert!(end_eq(&e, &end(&[&["1", "0"], &["t/u", "1"]])).unwrap());
    assert!(!end_eq(&e, &end(&[&["1", "0"], &["u^3", "1"]])).unwrap());
    assert!(End::new(m(k(), &[&["1", "u"], &["1", "u"]])).is_err());
    let flat = Tower::new(3, 1).unwrap();
    assert!(matches!(
        End::new(Matrix::identity(flat, 2)),
        Err(BoundaryError::Unsupported { n: 2, d: 1 })
    ));
}

#[test]
fn limit_examples() {
    let e = end(&[&["1", "0"], &["0", "1"]]);
    assert!(bp_eq(&lim(&e, Sign::Minus), &bp(&[&["1", "0"], &["0", "t"]])).unwrap());
    assert!(bp_eq(&lim(&e, Sign::Plus), &bp(&[&["0", "1"], &["1", "0"]])).unwrap());
    let shifted = end(&[&["1", "0"], &["0", "u^5"]]);
    for sign in [Sign::Plus, Sign::Minus] {
        assert!(bp_eq(&lim(&e, sign), &lim(&shifted, sign)).unwrap());
    }
    assert!(!bp_eq(&lim(&e, Sign::Plus), &lim(&e, Sign::Minus)).unwrap());
}

#[test]
fn limits_are_constant_on_ends() {
    let mut s = Sampler::new(k(), 2);
    let cc = CoarseContext::new(k(), 1).unwrap();
    let full = cc.fine();
    for _ in 0..30 {
        let e = random_end(&mut s);
        let a = s.unit(&full);
        let d = s.unit(&full);
        let x = s.maximal_ideal(&cc.coarse());
        let y = s.integral(&full);
        let shift = s.gen_range(0, 3);
        let u = k().var(1).pow(shift);
        let change = Matrix::from_rows(k(), vec![vec![a, y], vec![x, &d * &u]]).unwrap();
        let f = End::new(e.basis() * &change).unwrap();
        assert!(end_eq(&e, &f).unwrap());
        for n in 0..3 {
            assert!(class_eq(&e.vertex(n + 10 + shift), &f.vertex(n + 10)).unwrap());
        }
    }
}

#[test]
fn random_ends_have_distinct_limits() {
    let mut s = Sampler::new(k(), 3);
    for _ in 0..50 {
        let e = random_end(&mut s);
        assert!(!bp_eq(&lim(&e, Sign::Plus), &lim(&e, Sign::Minus)).unwrap());
    }
}

#[test]
fn glue_examples() {
    let e = end(&[&["1", "0"], &["0", "1"]]);
    let g = glue(&e);
    assert_eq!(g.basis(), &m(k(), &[&["0", "1"], &["t", "0"]]));
    assert!(end_eq(&glue(&g), &e).unwrap());
}

#[test]
fn glue_solves_the_limit_equations() {
    let cc = CoarseContext::new(k(), 1).unwrap();
    let mut s = Sampler::new(k(), 4);
    for _ in 0..50 {
        let e = random_end(&mut s);
        let g = glue(&e);
        assert!(bp_eq(&lim(&g, Sign::Plus), &lim(&e, Sign::Minus)).unwrap());
        assert!(bp_eq(&lim(&g, Sign::Minus), &lim(&e, Sign::Plus)).unwrap());
        let below = lim(&e, Sign::Minus).outer();
        assert!(class_eq(&g.fiber_base(), &below).unwrap());
        assert!(class_eq(&coarsen(&g.vertex(0), &cc).unwrap(), &below).unwrap());
        assert!(end_eq(&glue(&g), &e).unwrap());
    }
}

#[test]
fn upsilon_examples() {
    let e = end(&[&["1", "0"], &["0", "1"]]);
    let edge = upsilon(&e, Sign::Plus);
    assert!(class_eq(&edge.from, &coarse(&[&["1", "0"], &["0", "1"]])).unwrap());
    assert!(class_eq(&edge.to, &coarse(&[&["1", "0"], &["0", "t"]])).unwrap());
    assert!(edge.same_oriented(&apartment_edge(k(), 0)).unwrap());
    let minus = upsilon(&e, Sign::Minus);
    assert!(minus
        .same_oriented(&apartment_edge(k(), 0).reversed())
        .unwrap());
    for n in -2..=2 {
        let plus = edge_of(&apartment_boundary_point(k(), n, Sign::Plus));
        let minus = edge_of(&apartment_boundary_point(k(), n + 1, Sign::Minus));
        let target = apartment_edge(k(), n);
        assert!(plus.same_oriented(&target.reversed()).unwrap());
        assert!(minus.same_oriented(&target).unwrap());
    }
}

#[test]
fn upsilon_edges_are_coarse_edges() {
    let mut s = Sampler::new(k(), 5);
    for _ in 0..30 {
        let e = random_end(&mut s);
        for sign in [Sign::Plus, Sign::Minus] {
            let edge = upsilon(&e, sign);
            assert_eq!(
                dist_max(&edge.from, &edge.to).unwrap(),
                LexVal::from_ints([1])
            );
        }
        assert!(class_eq(&upsilon(&e, Sign::Plus).from, &e.fiber_base()).unwrap());
    }
}

#[test]
fn upsilon_is_two_to_one_on_apartment_edges() {
    let t = |e: i64| format!("t^({e})");
    let mut pool = Vec::new();
    for a in -3..=4 {
        for extra in ["0", "1", "u", "1/u"] {
            pool.push(end(&[&["1", "0"], &[extra, &t(a)]]));
            pool.push(end(&[&["0", "1"], &[&t(a), extra]]));
            pool.push(end(&[&["u", extra], &["0", &t(a)]]));
        }
    }
    let mut points: Vec<BoundaryPoint> = Vec::new();
    for e in &pool {
        for sign in [Sign::Plus, Sign::Minus] {
            let p = lim(e, sign);
            if !points.iter().any(|q| bp_eq(q, &p).unwrap()) {
                points.push(p);
            }
        }
    }
    for n in -2..=2 {
        let target = apartment_edge(k(), n);
        let over: Vec<&BoundaryPoint> = points
            .iter()
            .filter(|p| edge_of(p).same_unoriented(&target).unwrap())
            .collect();
        assert_eq!(over.len(), 2, "edge ]{n},{}[", n + 1);
        let expected = [
            apartment_boundary_point(k(), n, Sign::Plus),
            apartment_boundary_point(k(), n + 1, Sign::Minus),
        ];
        for x in &expected {
            assert!(over.iter().any(|p| bp_eq(p, x).unwrap()));
        }
    }
}

#[test]
fn fiber_neighbors_over_f2() {
    let k2 = Tower::new(2, 2).unwrap();
    let ctx = ValuationContext::full(k2);
    let center = LatticeClass::standard(ctx, 2);
    let nbs = fiber_neighbors(&center).unwrap();
    assert_eq!(nbs.len(), 3);
    for rows in [
        [["u", "0"], ["0", "1"]],
        [["1", "0"], ["0", "u"]],
        [["1", "0"], ["1", "u"]],
    ] {
        let c = LatticeClass::new(ctx, m(k2, &[&rows[0], &rows[1]])).unwrap();
        assert_eq!(nbs.iter().filter(|n| class_eq(n, &c).unwrap()).count(), 1);
    }
    for (i, a) in nbs.iter().enumerate() {
        assert_eq!(dist_max(a, &center).unwrap(), LexVal::from_ints([0, 1]));
        for b in &nbs[i + 1..] {
            assert!(!class_eq(a, b).unwrap());
        }
        let back = fiber_neighbors(a).unwrap();
        assert_eq!(
            back.iter()
                .filter(|n| class_eq(n, &center).unwrap())
                .count(),
            1
        );
    }
}

#[test]
fn fiber_neighbors_of_random_vertices() {
    let ctx = ValuationContext::full(k());
    let mut s = Sampler::new(k(), 6);
    for _ in 0..15 {
        let l = s.lattice(&ctx, 2);
        let nbs = fiber_neighbors(&l).unwrap();
        assert_eq!(nbs.len(), 4);
        for (i, a) in nbs.iter().enumerate() {
            assert_eq!(dist_max(a, &l).unwrap(), LexVal::from_ints([0, 1]));
            for b in &nbs[i + 1..] {
                assert!(!class_eq(a, b).unwrap());
            }
        }
    }
    let three = LatticeClass::standard(ctx, 3);
    assert!(matches!(
        fiber_neighbors(&three),
        Err(BoundaryError::Unsupported { n: 3, d: 2 })
    ));
}

#[test]
fn fiber_balls_are_regular_trees() {
    let k2 = Tower::new(2, 2).unwrap();
    let ball = fiber_ball(&LatticeClass::standard(ValuationContext::full(k2), 2), 3).unwrap();
    assert_eq!(ball.vertices.len(), 22);
    assert!(ball.is_regular(3));
    assert!(ball.is_tree());
    assert_eq!(ball.leaves().count(), 12);

    let mut s = Sampler::new(k(), 8);
    let center = s.lattice(&ValuationContext::full(k()), 2);
    let ball = fiber_ball(&center, 2).unwrap();
    assert_eq!(ball.vertices.len(), 1 + 4 + 12);
    assert!(ball.is_regular(4) && ball.is_tree());
}

#[test]
fn outward_ends_separate_the_fiber_boundary() {
    let k2 = Tower::new(2, 2).unwrap();
    let center = LatticeClass::standard(ValuationContext::full(k2), 2);
    let ball = fiber_ball(&center, 3).unwrap();
    let base = coarsen(&center, &CoarseContext::new(k2, 1).unwrap()).unwrap();
    let ends: Vec<End> = ball.leaves().map(|(i, _)| ball.outward_end(i)).collect();
    for (i, a) in ends.iter().enumerate() {
        let pa = lim(a, Sign::Plus);
        assert!(class_eq(&pa.outer(), &base).unwrap());
        assert!(class_eq(
            &a.vertex(0),
            &ball.vertices[ball.leaves().nth(i).unwrap().0].class
        )
        .unwrap());
        for b in &ends[i + 1..] {
            assert!(!end_eq(a, b).unwrap());
            assert!(!bp_eq(&pa, &lim(b, Sign::Plus)).unwrap());
        }
    }
}

#[test]
fn ball_exports_to_dot() {
    let k2 = Tower::new(2, 2).unwrap();
    let ball = fiber_ball(&LatticeClass::standard(ValuationContext::full(k2), 2), 1).unwrap();
    let dot = ball.to_dot();
    assert!(dot.starts_with("graph fiber_tree {"));
    assert_eq!(dot.matches(" -- ").count(), 3 + 3);
    assert!(dot.contains("v0 [label=\"(0,0) (0,0) []\"]"));
    assert!(dot.contains("Upsilon+"));
}
