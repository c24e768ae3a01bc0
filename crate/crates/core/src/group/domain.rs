//! Brute-force search for a fundamental domain of the affine Weyl group of
//! `SL_2` with `Λ = Z^2` acting on `Λ ⊗ R = R^2`.
//!
//! The generators `m_α(1)`, `m_α(u)`, `m_α(t)` act on the apartment
//! coordinate `λ = x_2 − x_1` by `λ ↦ −λ`, `λ ↦ −λ − 2(0,1)` and
//! `λ ↦ −λ − 2(1,0)`, so the group is `{λ ↦ ±λ + 2v : v ∈ Z^2}`. Points are
//! sampled on a grid of step `1/Q` and stored as integer multiples of it.

use std::collections::BTreeMap;
use std::fmt;

/// Grid denominator.
pub const Q: i64 = 4;

/// A grid point `(x/Q, y/Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPoint(pub i64, pub i64);

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", frac(self.0), frac(self.1))
    }
}

fn frac(v: i64) -> String {
    let g = gcd(v.abs(), Q);
    if v % Q == 0 {
        (v / Q).to_string()
    } else {
        format!("{}/{}", v / g, Q / g)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The representative of the orbit of `p` in `[0,2)^2` that is smallest
/// for the order comparing `y` first.
pub fn orbit_key(p: GridPoint) -> GridPoint {
    let period = 2 * Q;
    let reduce = |x: i64, y: i64| GridPoint(x.rem_euclid(period), y.rem_euclid(period));
    let a = reduce(p.0, p.1);
    let b = reduce(-p.0, -p.1);
    if (a.1, a.0) <= (b.1, b.0) {
        a
    } else {
        b
    }
}

/// `([0,2) × (0,1)) ∪ ([0,1] × {0,1})`, the section picked by [`orbit_key`].
pub fn canonical_domain(p: GridPoint) -> bool {
    orbit_key(p) == p
}

/// `[0,1]^2 ∪ (1,2) × (0,1]`.
pub fn candidate_a(p: GridPoint) -> bool {
    let GridPoint(x, y) = p;
    ((0..=Q).contains(&x) && (0..=Q).contains(&y)) || (Q < x && x < 2 * Q && 0 < y && y <= Q)
}

/// `([0,2) × [0,1]) ∖ ([1,2] × {0})`.
pub fn candidate_b(p: GridPoint) -> bool {
    let GridPoint(x, y) = p;
    (0..2 * Q).contains(&x) && (0..=Q).contains(&y) && !((Q..=2 * Q).contains(&x) && y == 0)
}

/// How a candidate set meets the orbits of the grid.
#[derive(Debug, Clone)]
pub struct DomainReport {
    pub orbits: usize,
    /// Orbit representatives the set misses.
    pub missed: Vec<GridPoint>,
    /// Groups of distinct members of the set lying in one orbit.
    pub repeated: Vec<Vec<GridPoint>>,
}

impl DomainReport {
    pub fn is_fundamental_domain(&self) -> bool {
        self.missed.is_empty() && self.repeated.is_empty()
    }
}

/// Checks on the grid `[-2,4]^2` whether `set` meets every orbit once.
pub fn check_domain(set: impl Fn(GridPoint) -> bool) -> DomainReport {
    let mut hits: BTreeMap<GridPoint, Vec<GridPoint>> = BTreeMap::new();
    for x in -2 * Q..=4 * Q {
        for y in -2 * Q..=4 * Q {
            let p = GridPoint(x, y);
            let entry = hits.entry(orbit_key(p)).or_default();
            if set(p) {
                entry.push(p);
            }
        }
    }
    DomainReport {
        orbits: hits.len(),
        missed: hits
            .iter()
            .filter(|(_, v)| v.is_empty())
            .map(|(k, _)| *k)
            .collect(),
        repeated: hits.into_values().filter(|v| v.len() > 1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_section_is_a_domain() {
        assert!(check_domain(canonical_domain).is_fundamental_domain());
    }

    #[test]
    fn the_two_candidate_descriptions_disagree() {
        let a = check_domain(candidate_a);
        let b = check_domain(candidate_b);
        assert!(candidate_a(GridPoint(Q, 0)) && !candidate_b(GridPoint(Q, 0)));
        assert!(b.missed.contains(&GridPoint(Q, 0)));
        assert!(a
            .repeated
            .iter()
            .any(|g| g.contains(&GridPoint(Q / 2, Q)) && g.contains(&GridPoint(3 * Q / 2, Q))));
        assert!(!a.is_fundamental_domain());
        assert!(!b.is_fundamental_domain());
        assert_eq!(GridPoint(Q / 2, Q).to_string(), "(1/2, 1)");
    }
}
