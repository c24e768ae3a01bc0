//! The acceptance suite: ten randomized but seeded checks, each reported as
//! a pass or a failure with the first counterexample found.
//!
//! Samples are drawn from `p ∈ {2, 3}`, `d = 2`, `n ∈ {2, 3}` in rotation.
//! Every sample has its own seed derived from the suite seed, so reports
//! do not depend on how the samples are scheduled across threads.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::boundary::{
    apartment_boundary_point, apartment_edge, bp_eq, edge_of, fiber_ball, glue, lim, BoundaryPoint,
    End, Sign,
};
use crate::field::Tower;
use crate::group::{
    bruhat_with, is_in_iwahori, iwasawa_with, nu_action, retract_to_apartment, root_elem,
    AffineWeylElem, Bruhat, ChamberSign, Iwasawa,
};
use crate::lattice::{
    act, apartment_dist_sum, class_eq, dist_max, dist_sum, is_scaled_unimodular, psi, psi_inv,
    LatticeClass, PivotRule, ValuationContext,
};
use crate::matrix::Matrix;
use crate::ordered_values::LexVal;
use crate::projections::{coarsen, in_fiber, lift, residue_class, CoarseContext};
use crate::sampling::Sampler;

pub const CRITERIA: [(usize, &str); 10] = [
    (1, "valuation law"),
    (2, "stabilizer of the standard lattice"),
    (3, "metric axioms"),
    (4, "projection, residue and lift"),
    (5, "Iwasawa decomposition"),
    (6, "affine Bruhat decomposition"),
    (7, "psi isometry and nu compatibility"),
    (8, "boundary limits, gluing and Upsilon"),
    (9, "fiber tree regularity"),
    (10, "retraction does not expand"),
];

#[derive(Debug, Clone)]
pub struct Report {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    /// Number of individual checks that ran.
    pub checks: usize,
    /// The first failure, verbatim.
    pub detail: Option<String>,
    pub elapsed: Duration,
}

impl Report {
    /// `PASS  5 Iwasawa decomposition (1200 checks)`.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} {:>2} {} ({} checks)",
            self.id, self.title, self.checks
        );
        if let Some(d) = &self.detail {
            s.push_str(": ");
            s.push_str(d);
        }
        s
    }
}

type Outcome = Result<usize, String>;

/// Runs the given criteria in parallel; unknown ids are skipped.
pub fn run(ids: &[usize], seed: u64) -> Vec<Report> {
    ids.par_iter().filter_map(|&id| run_one(id, seed)).collect()
}

pub fn run_all(seed: u64) -> Vec<Report> {
    run(&CRITERIA.map(|(id, _)| id), seed)
}

pub fn run_one(id: usize, seed: u64) -> Option<Report> {
    let &(_, title) = CRITERIA.iter().find(|(i, _)| *i == id)?;
    let f: fn(u64) -> Outcome = match id {
        1 => valuation_law,
        2 => stabilizer,
        3 => metric_axioms,
        4 => projections,
        5 => iwasawa_suite,
        6 => bruhat_suite,
        7 => psi_and_nu,
        8 => boundary_suite,
        9 => fiber_regularity,
        _ => retraction,
    };
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| f(seed)))
        .unwrap_or_else(|e| Err(format!("panic: {}", panic_message(&e))));
    let elapsed = start.elapsed();
    let (passed, checks, detail) = match outcome {
        Ok(c) => (true, c, None),
        Err(d) => (false, 0, Some(d)),
    };
    Some(Report {
        id,
        title,
        passed,
        checks,
        detail,
        elapsed,
    })
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown".into())
}

fn mix(seed: u64, criterion: u64, i: u64) -> u64 {
    let mut z = seed
        ^ criterion.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ i.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn tower(p: u32) -> Tower {
    Tower::new(p, 2).expect("small prime")
}

/// `(p, n)` for sample `i`.
fn shape(i: usize) -> (u32, usize) {
    (
        if i.is_multiple_of(2) { 2 } else { 3 },
        if (i / 2).is_multiple_of(2) { 2 } else { 3 },
    )
}

/// Runs `count` samples in parallel, each with its shape and own sampler,
/// and returns the total check count or the failure of the lowest index.
fn samples(
    count: usize,
    seed: u64,
    tag: u64,
    f: impl Fn(&mut Sampler, usize) -> Outcome + Sync,
) -> Outcome {
    let results: Vec<Outcome> = (0..count)
        .into_par_iter()
        .map(|i| {
            let (p, n) = shape(i);
            let mut s = Sampler::new(tower(p), mix(seed, tag, i as u64));
            f(&mut s, n).map_err(|e| format!("sample {i} (p = {p}, n = {n}): {e}"))
        })
        .collect();
    results.into_iter().sum()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn valuation_law(seed: u64) -> Outcome {
    let mut checks = 0;
    for p in [2, 3] {
        let k = tower(p);
        for a in -3..=3 {
            for b in -3..=3 {
                let f = k.parse(&format!("t^({a})*u^({b})")).map_err(err)?;
                ensure(f.val() == LexVal::from_ints([a, b]), || {
                    format!("val(t^{a} u^{b}) = {}", f.val())
                })?;
                checks += 1;
            }
        }
    }
    let random = samples(500, seed, 1, |s, _| {
        let x = s.elem();
        let y = s.elem();
        let (vx, vy) = (x.val(), y.val());
        let prod = (&x * &y).val();
        ensure(prod == &vx + &vy, || format!("val({x} * {y}) = {prod}"))?;
        let sum = (&x + &y).val();
        ensure(sum >= vx.clone().min(vy.clone()), || {
            format!("val({x} + {y}) = {sum}")
        })?;
        if vx != vy {
            ensure(sum == vx.min(vy), || {
                format!("val({x} + {y}) = {sum} is not the minimum")
            })?;
        }
        Ok(3)
    })?;
    Ok(checks + random)
}

fn negative_lexval(s: &mut Sampler) -> LexVal {
    loop {
        let v = s.lexval(2, 3);
        if v.is_negative() {
            return v;
        }
    }
}

fn stabilizer(seed: u64) -> Outcome {
    let fixes = samples(200, seed, 2, |s, _| {
        let ctx = ValuationContext::full(s.tower());
        let std = LatticeClass::standard(ctx, 3);
        let g = s.sl_integral(&ctx, 3, 6);
        ensure(g.det().map_err(err)?.is_one(), || "det is not 1".into())?;
        ensure(
            class_eq(&act(&g, &std).map_err(err)?, &std).map_err(err)?,
            || format!("{g:?} moves the standard lattice"),
        )?;
        Ok(1)
    })?;
    let moves = samples(200, seed, 102, |s, _| {
        let ctx = ValuationContext::full(s.tower());
        let k = s.tower();
        let std = LatticeClass::standard(ctx, 3);
        let i = s.gen_range(0, 2) as usize;
        let j = (i + s.gen_range(1, 2) as usize) % 3;
        let v = negative_lexval(s);
        let c = s.term_with_val(&v);
        let x = if s.gen_bool() {
            root_elem(k, 3, i, j, &c).map_err(err)?
        } else {
            let mut d = vec![k.one(); 3];
            d[i] = c.inv();
            d[j] = c.clone();
            Matrix::diag(k, &d)
        };
        let g = &(&s.sl_integral(&ctx, 3, 3) * &x) * &s.sl_integral(&ctx, 3, 3);
        ensure(ctx.min_val(&g).is_negative(), || {
            format!("{g:?} has no negative entry")
        })?;
        ensure(!is_scaled_unimodular(&ctx, &g), || {
            format!("{g:?} passes the scaled test")
        })?;
        ensure(
            !class_eq(&act(&g, &std).map_err(err)?, &std).map_err(err)?,
            || format!("{g:?} fixes the standard lattice"),
        )?;
        Ok(1)
    })?;
    Ok(fixes + moves)
}

fn equivalent(s: &mut Sampler, l: &LatticeClass) -> LatticeClass {
    let k = s.sl_integral(l.context(), l.n(), 3);
    let c = s.term(2);
    LatticeClass::new(*l.context(), (l.basis() * &k).scale(&c)).expect("invertible")
}

fn metric_axioms(seed: u64) -> Outcome {
    samples(500, seed, 3, |s, n| {
        let ctx = ValuationContext::full(s.tower());
        let a = s.lattice(&ctx, n);
        let b = s.lattice(&ctx, n);
        let c = s.lattice(&ctx, n);
        let a2 = equivalent(s, &a);
        let mut checks = 0;
        for (name, d) in [
            (
                "dist_max",
                dist_max as fn(&LatticeClass, &LatticeClass) -> _,
            ),
            ("dist_sum", dist_sum),
        ] {
            let dd = |x: &LatticeClass, y: &LatticeClass| d(x, y).map_err(err);
            let (ab, ba) = (dd(&a, &b)?, dd(&b, &a)?);
            ensure(ab == ba, || {
                format!("{name} not symmetric: {ab} vs {ba} for {a:?}, {b:?}")
            })?;
            let (bc, ac) = (dd(&b, &c)?, dd(&a, &c)?);
            for (x, y, z) in [(&ac, &ab, &bc), (&ab, &ac, &bc), (&bc, &ab, &ac)] {
                ensure(*x <= y + z, || {
                    format!("{name} triangle fails: {x} > {y} + {z} for {a:?}, {b:?}, {c:?}")
                })?;
            }
            let same = dd(&a, &a2)?;
            ensure(same.is_zero() && class_eq(&a, &a2).map_err(err)?, || {
                format!("{name}({a:?}, {a2:?}) = {same} for equal classes")
            })?;
            ensure(ab.is_zero() == class_eq(&a, &b).map_err(err)?, || {
                format!("{name} zero test disagrees with class_eq for {a:?}, {b:?}")
            })?;
            checks += 6;
        }
        Ok(checks)
    })
}

fn projections(seed: u64) -> Outcome {
    let equivariant = samples(200, seed, 4, |s, n| {
        let cc = CoarseContext::new(s.tower(), 1).map_err(err)?;
        let l = s.lattice(&cc.fine(), n);
        let g = s.sl_word(n, 4, 2);
        let lhs = coarsen(&act(&g, &l).map_err(err)?, &cc).map_err(err)?;
        let rhs = act(&g, &coarsen(&l, &cc).map_err(err)?).map_err(err)?;
        ensure(class_eq(&lhs, &rhs).map_err(err)?, || {
            format!("g = {g:?}, L = {l:?}")
        })?;
        Ok(1)
    })?;
    let section = samples(100, seed, 104, |s, n| {
        let cc = CoarseContext::new(s.tower(), 1).map_err(err)?;
        let base = s.lattice(&cc.coarse(), n);
        let mut rs = Sampler::new(cc.residue_tower(), s.seed_for_rerun());
        let r = rs.lattice(&cc.residue(), n);
        let up = lift(&r, &base, &cc).map_err(err)?;
        let back = residue_class(&up, &base, &cc).map_err(err)?;
        ensure(back.basis() == r.basis(), || {
            format!("residue of lift of {r:?} is {back:?}")
        })?;
        Ok(1)
    })?;
    let round_trip = samples(100, seed, 204, |s, n| {
        let cc = CoarseContext::new(s.tower(), 1).map_err(err)?;
        let base = s.lattice(&cc.coarse(), n);
        let lt = s.fiber_member(&cc, &base);
        let up = lift(&residue_class(&lt, &base, &cc).map_err(err)?, &base, &cc).map_err(err)?;
        ensure(in_fiber(&up, &base, &cc).map_err(err)?, || {
            format!("{up:?} left the fiber")
        })?;
        ensure(class_eq(&up, &lt).map_err(err)?, || {
            format!("{lt:?} lifts back to {up:?}")
        })?;
        Ok(2)
    })?;
    let kernel = samples(100, seed, 304, |s, n| {
        let cc = CoarseContext::new(s.tower(), 1).map_err(err)?;
        let base = s.lattice(&cc.coarse(), n);
        let lt = s.fiber_member(&cc, &base);
        let c = s.congruence_elem(&cc.coarse(), n, 3);
        let b = base.basis();
        let g = &(b * &c) * &b.inverse().map_err(err)?;
        ensure(
            class_eq(&act(&g, &lt).map_err(err)?, &lt).map_err(err)?,
            || format!("{g:?} moves {lt:?}"),
        )?;
        Ok(1)
    })?;
    Ok(equivariant + section + round_trip + kernel)
}

fn check_iwasawa(g: &Matrix, d: &Iwasawa) -> Result<AffineWeylElem, String> {
    ensure(d.u.is_upper_unitriangular(), || format!("u = {:?}", d.u))?;
    ensure(d.m.is_monomial_shape(), || format!("m = {:?}", d.m))?;
    ensure(is_in_iwahori(&d.k).map_err(err)?, || {
        format!("k = {:?}", d.k)
    })?;
    ensure(&(&d.u * &d.m) * &d.k == *g, || {
        format!("u·m·k differs from {g:?}")
    })?;
    nu_action(&d.m).map_err(err)
}

fn iwasawa_suite(seed: u64) -> Outcome {
    samples(200, seed, 5, |s, n| {
        let g = s.sl_word(n, 8, 3);
        let w = check_iwasawa(&g, &iwasawa_with(&g, PivotRule::Canonical).map_err(err)?)?;
        for _ in 0..5 {
            let rule = PivotRule::Shuffled(s.seed_for_rerun());
            let v = check_iwasawa(&g, &iwasawa_with(&g, rule).map_err(err)?)?;
            ensure(v == w, || format!("{g:?}: {v:?} after rerun, {w:?} before"))?;
        }
        Ok(6)
    })
}

fn check_bruhat(g: &Matrix, d: &Bruhat) -> Result<AffineWeylElem, String> {
    ensure(is_in_iwahori(&d.b1).map_err(err)?, || {
        format!("b1 = {:?}", d.b1)
    })?;
    ensure(is_in_iwahori(&d.b2).map_err(err)?, || {
        format!("b2 = {:?}", d.b2)
    })?;
    ensure(d.m.is_monomial_shape(), || format!("m = {:?}", d.m))?;
    ensure(&(&d.b1 * &d.m) * &d.b2 == *g, || {
        format!("b1·m·b2 differs from {g:?}")
    })?;
    nu_action(&d.m).map_err(err)
}

fn bruhat_suite(seed: u64) -> Outcome {
    samples(200, seed, 6, |s, n| {
        let g = s.sl_word(n, 8, 3);
        let w = check_bruhat(&g, &bruhat_with(&g, PivotRule::Canonical).map_err(err)?)?;
        for _ in 0..5 {
            let rule = PivotRule::Shuffled(s.seed_for_rerun());
            let v = check_bruhat(&g, &bruhat_with(&g, rule).map_err(err)?)?;
            ensure(v == w, || format!("{g:?}: {v:?} after rerun, {w:?} before"))?;
        }
        Ok(6)
    })
}

fn psi_and_nu(seed: u64) -> Outcome {
    let isometry = samples(200, seed, 7, |s, n| {
        let ctx = ValuationContext::full(s.tower());
        let x = s.apartment_point(n, 3);
        let y = s.apartment_point(n, 3);
        let d = dist_sum(
            &psi_inv(&ctx, &x).map_err(err)?,
            &psi_inv(&ctx, &y).map_err(err)?,
        )
        .map_err(err)?;
        let expected = apartment_dist_sum(&x, &y);
        ensure(d == expected, || format!("{x:?}, {y:?}: {d} vs {expected}"))?;
        Ok(1)
    })?;
    let compatible = samples(100, seed, 107, |s, n| {
        let ctx = ValuationContext::full(s.tower());
        let m = s.monomial_sl(n, 3);
        let x = s.apartment_point(n, 3);
        let lhs = psi(&act(&m, &psi_inv(&ctx, &x).map_err(err)?).map_err(err)?).map_err(err)?;
        let rhs = nu_action(&m).map_err(err)?.apply(&x);
        ensure(lhs == rhs, || {
            format!("m = {m:?}, x = {x:?}: {lhs:?} vs {rhs:?}")
        })?;
        Ok(1)
    })?;
    Ok(isometry + compatible)
}

fn random_end(s: &mut Sampler) -> End {
    let g = s.sl_word(2, 4, 2);
    let c = s.term(2);
    End::new(g.scale(&c)).expect("invertible 2x2")
}

fn boundary_suite(seed: u64) -> Outcome {
    let ends = samples(50, seed, 8, |s, _| {
        let e = random_end(s);
        let plus = lim(&e, Sign::Plus);
        let minus = lim(&e, Sign::Minus);
        let b = e.basis();
        ensure(!bp_eq(&plus, &minus).map_err(err)?, || {
            format!("lim+ = lim- for {b:?}")
        })?;
        let g = glue(&e);
        ensure(bp_eq(&lim(&g, Sign::Plus), &minus).map_err(err)?, || {
            format!("lim+(glue E) differs from lim-(E) for {b:?}")
        })?;
        ensure(bp_eq(&lim(&g, Sign::Minus), &plus).map_err(err)?, || {
            format!("lim-(glue E) differs from lim+(E) for {b:?}")
        })?;
        ensure(
            class_eq(&g.fiber_base(), &minus.outer()).map_err(err)?,
            || format!("glue E is not over the coarse projection of lim-(E) for {b:?}"),
        )?;
        Ok(4)
    })?;
    let mut checks = ends;
    for p in [2, 3] {
        checks += two_to_one(tower(p))?;
    }
    Ok(checks)
}

/// Collects the limits of a pool of ends near the standard apartment and
/// checks that exactly two of them lie over each edge `]n, n+1[`,
/// `n ∈ [−2, 2]`, namely `(n, +∞)` and `(n+1, −∞)`.
fn two_to_one(k: Tower) -> Outcome {
    let parse = |rows: [[String; 2]; 2]| {
        let m = Matrix::parse(
            k,
            &[&[&rows[0][0], &rows[0][1]], &[&rows[1][0], &rows[1][1]]],
        )
        .map_err(err)?;
        End::new(m).map_err(err)
    };
    let mut pool = Vec::new();
    for a in -3..=4 {
        let ta = format!("t^({a})");
        for x in ["0", "1", "u", "1/u"] {
            let x = x.to_string();
            let (z, o, u) = ("0".to_string(), "1".to_string(), "u".to_string());
            pool.push(parse([[o.clone(), z.clone()], [x.clone(), ta.clone()]])?);
            pool.push(parse([[z.clone(), o], [ta.clone(), x.clone()]])?);
            pool.push(parse([[u, x], [z, ta.clone()]])?);
        }
    }
    let mut points: Vec<BoundaryPoint> = Vec::new();
    for e in &pool {
        for sign in [Sign::Plus, Sign::Minus] {
            let q = lim(e, sign);
            let mut seen = false;
            for r in &points {
                if bp_eq(r, &q).map_err(err)? {
                    seen = true;
                    break;
                }
            }
            if !seen {
                points.push(q);
            }
        }
    }
    let mut checks = 0;
    for n in -2..=2 {
        let target = apartment_edge(k, n);
        let mut over = Vec::new();
        for q in &points {
            if edge_of(q).same_unoriented(&target).map_err(err)? {
                over.push(q);
            }
        }
        ensure(over.len() == 2, || {
            format!(
                "p = {}: {} boundary points over ]{n},{}[",
                k.p(),
                over.len(),
                n + 1
            )
        })?;
        for expected in [
            apartment_boundary_point(k, n, Sign::Plus),
            apartment_boundary_point(k, n + 1, Sign::Minus),
        ] {
            let mut hit = false;
            for q in &over {
                hit |= bp_eq(q, &expected).map_err(err)?;
            }
            ensure(hit, || {
                format!(
                    "p = {}: {:?} missing over ]{n},{}[",
                    k.p(),
                    expected.basis(),
                    n + 1
                )
            })?;
        }
        checks += 3;
    }
    Ok(checks)
}

fn fiber_regularity(_seed: u64) -> Outcome {
    let start = Instant::now();
    let k = tower(2);
    let center = LatticeClass::standard(ValuationContext::full(k), 2);
    let ball = fiber_ball(&center, 3).map_err(err)?;
    let elapsed = start.elapsed();
    if let Some(v) = ball.vertices.iter().find(|v| v.valence != 3) {
        return Err(format!("vertex {:?} has {} neighbours", v.class, v.valence));
    }
    ensure(ball.is_tree(), || {
        format!(
            "{} vertices but {} edges",
            ball.vertices.len(),
            ball.edges.len()
        )
    })?;
    ensure(ball.vertices.len() == 22, || {
        format!("{} vertices", ball.vertices.len())
    })?;
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(ball.vertices.len() + 2)
}

fn retraction(seed: u64) -> Outcome {
    samples(200, seed, 10, |s, n| {
        let ctx = ValuationContext::full(s.tower());
        let a = s.lattice(&ctx, n);
        let b = s.lattice(&ctx, n);
        let d = dist_sum(&a, &b).map_err(err)?;
        for sign in [ChamberSign::Plus, ChamberSign::Minus] {
            let ra = retract_to_apartment(&a, sign).map_err(err)?;
            let rb = retract_to_apartment(&b, sign).map_err(err)?;
            let r = apartment_dist_sum(&ra, &rb);
            ensure(r <= d, || {
                format!("{sign:?} retraction expands {a:?}, {b:?}: {r} > {d}")
            })?;
        }
        Ok(2)
    })
}
