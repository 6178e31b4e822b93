//! Finite permutations of `{0, .., n-1}`.
//!
//! Elements are 0-based in memory. Every textual form (cycle notation, JSON
//! documents, `Display`) is 1-based, so `(1,2)` swaps the elements stored as
//! `0` and `1`.
//!
//! Composition is the left action: `f.compose(&g)` maps `x` to `f(g(x))`.
//! A cycle `(a1, a2, .., at)` sends `a1` to `a2`, `a2` to `a3` and `at` back
//! to `a1`.

use std::fmt;
use std::ops::Mul;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("entry {value} is outside 1..={degree}")]
    OutOfRange { value: usize, degree: usize },
    #[error("entry {0} appears more than once")]
    Repeated(usize),
    #[error("malformed cycle notation {text:?}: {reason}")]
    Malformed { text: String, reason: String },
    #[error("image table is not a bijection")]
    NotBijective,
}

/// A bijection of `{0, .., n-1}` stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// Builds a permutation from a 0-based image table.
    pub fn from_images(map: Vec<usize>) -> Result<Self, PermError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n {
                return Err(PermError::OutOfRange { value: v + 1, degree: n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(PermError::NotBijective);
            }
        }
        Ok(Self { map })
    }

    /// Builds a permutation from a 1-based image table, e.g. `[1, 5, 4, 3, 2]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self, PermError> {
        let n = images.len();
        let mut map = Vec::with_capacity(n);
        for &v in images {
            if v == 0 || v > n {
                return Err(PermError::OutOfRange { value: v, degree: n });
            }
            map.push(v - 1);
        }
        Self::from_images(map)
    }

    /// The transposition swapping the 0-based points `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Self { map }
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.map.iter().map(|v| v + 1).collect()
    }

    /// `self ∘ g`, i.e. `x ↦ self(g(x))`.
    pub fn compose(&self, g: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != g.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), g.degree()));
        }
        Ok(Permutation { map: g.map.iter().map(|&x| self.map[x]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Permutation { map: inv }
    }

    /// `g ∘ self ∘ g⁻¹`; relabels every cycle of `self` through `g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        let mut map = vec![0; self.degree()];
        for x in 0..self.degree() {
            map[g.apply(x)] = g.apply(self.apply(x));
        }
        Permutation { map }
    }

    pub fn pow(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Permutation::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            acc = &base * &acc;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn is_involution(&self) -> bool {
        self.map.iter().enumerate().all(|(x, &y)| self.map[y] == x)
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.iter().enumerate().filter(|(x, y)| x == *y).map(|(x, _)| x)
    }

    /// Non-trivial cycles in canonical order: each cycle starts at its
    /// smallest point, cycles are sorted by that point. 0-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.map[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.map[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.map[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted cycle lengths including fixed points.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.extend(std::iter::repeat(1).take(self.fixed_points().count()));
        t.sort_unstable();
        t
    }

    pub fn order(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(1u64, |acc, l| num_integer::lcm(acc, l as u64))
    }

    /// Parses 1-based disjoint cycle notation such as `(2,5)(3,4)` or `id`.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Permutation, PermError> {
        let malformed = |reason: &str| PermError::Malformed {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "id" || compact == "()" {
            return Ok(Permutation::identity(n));
        }
        if compact.is_empty() {
            return Err(malformed("empty"));
        }
        let mut map: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| malformed("expected '('"))?;
            let close = body.find(')').ok_or_else(|| malformed("missing ')'"))?;
            let inner = &body[..close];
            if inner.contains('(') {
                return Err(malformed("nested '('"));
            }
            let mut cycle = Vec::new();
            for tok in inner.split(',') {
                let v: usize = tok.parse().map_err(|_| malformed("expected an integer"))?;
                if v == 0 || v > n {
                    return Err(PermError::OutOfRange { value: v, degree: n });
                }
                if std::mem::replace(&mut used[v - 1], true) {
                    return Err(PermError::Repeated(v));
                }
                cycle.push(v - 1);
            }
            for (k, &a) in cycle.iter().enumerate() {
                map[a] = cycle[(k + 1) % cycle.len()];
            }
            rest = &body[close + 1..];
        }
        Ok(Permutation { map })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("id");
        }
        for c in cycles {
            f.write_str("(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self)
    }
}

/// Left-action composition; panics on a degree mismatch.
impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs).expect("composing permutations of different degree")
    }
}

/// Lazily enumerates every non-identity involution of degree `n`, each once.
pub fn involutions(n: usize, fixed_point_free: bool) -> Involutions {
    Involutions {
        n,
        fixed_point_free,
        img: vec![UNSET; n],
        stack: Vec::new(),
        started: false,
    }
}

const UNSET: usize = usize::MAX;

struct Frame {
    x: usize,
    candidates: Vec<usize>,
    pos: usize,
}

pub struct Involutions {
    n: usize,
    fixed_point_free: bool,
    img: Vec<usize>,
    stack: Vec<Frame>,
    started: bool,
}

impl Involutions {
    fn push_frame(&mut self, x: usize) {
        let mut candidates = Vec::new();
        if !self.fixed_point_free {
            candidates.push(x);
        }
        candidates.extend((x + 1..self.n).filter(|&y| self.img[y] == UNSET));
        self.stack.push(Frame { x, candidates, pos: 0 });
    }
}

impl Iterator for Involutions {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if !self.started {
            self.started = true;
            if self.n == 0 {
                return None;
            }
            self.push_frame(0);
        }
        loop {
            let top = self.stack.last_mut()?;
            if top.pos > 0 {
                let y = top.candidates[top.pos - 1];
                self.img[top.x] = UNSET;
                self.img[y] = UNSET;
            }
            if top.pos == top.candidates.len() {
                self.stack.pop();
                continue;
            }
            let (x, y) = (top.x, top.candidates[top.pos]);
            top.pos += 1;
            self.img[x] = y;
            self.img[y] = x;
            match self.img.iter().position(|&v| v == UNSET) {
                Some(next) => self.push_frame(next),
                None => {
                    let p = Permutation { map: self.img.clone() };
                    if !p.is_identity() {
                        return Some(p);
                    }
                }
            }
        }
    }
}

/// All `n!` permutations in lexicographic order of their image tables.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut current: Option<Vec<usize>> = Some((0..n).collect());
    std::iter::from_fn(move || {
        let out = current.take()?;
        let mut next = out.clone();
        if next_lexicographic(&mut next) {
            current = Some(next);
        }
        Some(Permutation { map: out })
    })
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(text, n).unwrap()
    }

    #[test]
    fn compose_examples() {
        assert!(p("(1,2)", 2).compose(&p("(1,2)", 2)).unwrap().is_identity());
        assert_eq!(p("(1,2,3)", 3).compose(&Permutation::identity(3)).unwrap(), p("(1,2,3)", 3));
        // x=1 -> f(2)=3, x=2 -> f(3)=2, x=3 -> f(1)=1
        let h = p("(2,3)", 3).compose(&p("(1,2,3)", 3)).unwrap();
        assert_eq!(h.one_based(), vec![3, 2, 1]);
        assert_eq!(h.to_string(), "(1,3)");
        assert_eq!(
            p("(1,2)", 2).compose(&Permutation::identity(3)),
            Err(PermError::DegreeMismatch(2, 3))
        );
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("(2,5)(3,4)", 5).one_based(), vec![1, 5, 4, 3, 2]);
        assert!(p("id", 4).is_identity());
        assert_eq!(p("(1,2,4)(3,6,5)", 6).one_based(), vec![2, 4, 6, 1, 3, 5]);
        assert_eq!(p(" (1, 2) ( 3 ,4)", 4).to_string(), "(1,2)(3,4)");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Permutation::parse_cycles("(1,6)", 5),
            Err(PermError::OutOfRange { value: 6, degree: 5 })
        ));
        assert_eq!(Permutation::parse_cycles("(1,2)(2,3)", 3), Err(PermError::Repeated(2)));
        for bad in ["1,2", "(1,2", "(1,x)", "", "(1,2))", "((1,2))"] {
            assert!(
                matches!(Permutation::parse_cycles(bad, 3), Err(PermError::Malformed { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn canonical_printing() {
        assert_eq!(p("(3,1,2)(5,4)", 5).to_string(), "(1,2,3)(4,5)");
        assert_eq!(p("(4,5)(2,3)", 5).to_string(), "(2,3)(4,5)");
        assert_eq!(Permutation::identity(3).to_string(), "id");
    }

    #[test]
    fn involution_examples() {
        let two: Vec<_> = involutions(2, false).collect();
        assert_eq!(two, vec![p("(1,2)", 2)]);
        assert_eq!(involutions(4, false).count(), 9);
        assert_eq!(involutions(3, true).count(), 0);
        assert_eq!(involutions(4, true).count(), 3);
    }

    #[test]
    fn involutions_match_brute_force() {
        for n in 1..=7 {
            let mut brute: Vec<Permutation> = all_permutations(n)
                .filter(|q| !q.is_identity() && (q * q).is_identity())
                .collect();
            let mut lazy: Vec<Permutation> = involutions(n, false).collect();
            brute.sort();
            lazy.sort();
            assert_eq!(lazy, brute, "n = {n}");
            // telephone numbers 1, 2, 4, 10, 26, 76, 232 minus the identity
            let telephone = [1usize, 1, 2, 4, 10, 26, 76, 232][n];
            assert_eq!(lazy.len(), telephone - 1);
            let fpf = involutions(n, true).count();
            let brute_fpf = brute.iter().filter(|q| q.fixed_points().count() == 0).count();
            assert_eq!(fpf, brute_fpf);
        }
    }

    #[test]
    fn exhaustive_inverse_and_print_roundtrip() {
        for n in 1..=6 {
            for f in all_permutations(n) {
                assert!(f.compose(&f.inverse()).unwrap().is_identity());
                assert_eq!(Permutation::parse_cycles(&f.to_string(), n).unwrap(), f);
            }
        }
    }

    #[test]
    fn conjugation_relabels_cycles() {
        let x = p("(1,2,3)", 4);
        let y = p("(1,3,4)", 4);
        let c = y.conjugate_by(&x);
        assert_eq!(c, x.compose(&y).unwrap().compose(&x.inverse()).unwrap());
        assert_eq!(c.to_string(), "(1,4,2)");
    }

    fn arb_perm(max: usize) -> impl Strategy<Value = Permutation> {
        (1..=max).prop_flat_map(|n| {
            Just((0..n).collect::<Vec<usize>>())
                .prop_shuffle()
                .prop_map(|m| Permutation::from_images(m).unwrap())
        })
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(f in arb_perm(12)) {
            prop_assert!(f.compose(&f.inverse()).unwrap().is_identity());
            prop_assert!(f.inverse().compose(&f).unwrap().is_identity());
        }

        #[test]
        fn order_kills(f in arb_perm(9)) {
            prop_assert!(f.pow(f.order() as i64).is_identity());
        }
    }
}
