//! Coset combinatorics for Ekedahl-Oort strata.
//!
//! Permutations are stored in one-line notation on {1..n}; cycle notation is
//! parse/print sugar. `CosetRep` carries the minimal-length representatives
//! gamma_{u_1,...,u_b} of (S_a x S_b) \ S_{a+b}, which index the strata of
//! the unitary moduli space of signature (a, b). The forgetful map to the
//! Siegel side is a fixed lookup table at signature (3, 2).

use std::fmt;

use crate::error::{Error, Result};

/// A permutation of {1..n} in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// Builds from one-line notation; `images[i]` is the image of `i + 1`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v < 1 || v > n || seen[v - 1] {
                return Err(Error::ParseError(format!(
                    "{images:?} is not a bijection of 1..={n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images })
    }

    /// Parses a product of cycles such as "(2,6,8,4)(3,7,9,5)" acting on
    /// {1..n}. Cycles compose right to left (the rightmost is applied
    /// first); they need not be disjoint. "()" and "" denote the identity.
    pub fn from_cycles(s: &str, n: usize) -> Result<Self> {
        let cycles = parse_cycle_groups(s, n)?;
        let mut result = Permutation::identity(n);
        for cycle in cycles.iter().rev() {
            let c = Permutation::from_single_cycle(cycle, n);
            result = c.compose_after(&result);
        }
        Ok(result)
    }

    fn from_single_cycle(cycle: &[usize], n: usize) -> Self {
        let mut images: Vec<usize> = (1..=n).collect();
        for w in 0..cycle.len() {
            let from = cycle[w];
            let to = cycle[(w + 1) % cycle.len()];
            images[from - 1] = to;
        }
        Permutation { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of `i` (1-based).
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { images: inv }
    }

    /// `self` composed after `first`: (self * first)(i) = self(first(i)).
    pub fn compose_after(&self, first: &Permutation) -> Self {
        assert_eq!(self.n(), first.n());
        let images = (1..=self.n()).map(|i| self.apply(first.apply(i))).collect();
        Permutation { images }
    }

    /// Coxeter length: the number of inversions |{(i,j) : i<j, p(i)>p(j)}|.
    pub fn length(&self) -> usize {
        let n = self.n();
        let mut count = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if self.images[i] > self.images[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Canonical disjoint-cycle string: each cycle led by its smallest
    /// element, cycles ordered by leading element, fixed points omitted.
    /// The identity prints as "()".
    pub fn cycle_string(&self) -> String {
        let mut seen = vec![false; self.n()];
        let mut out = String::new();
        for start in 1..=self.n() {
            if seen[start - 1] || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start - 1] = true;
            let mut cur = self.apply(start);
            while cur != start {
                seen[cur - 1] = true;
                cycle.push(cur);
                cur = self.apply(cur);
            }
            out.push('(');
            out.push_str(
                &cycle
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_string())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}

fn parse_cycle_groups(s: &str, n: usize) -> Result<Vec<Vec<usize>>> {
    let s = s.trim();
    let mut cycles = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let open = rest
            .find('(')
            .ok_or_else(|| Error::ParseError(format!("expected '(' in cycle string '{s}'")))?;
        if !rest[..open].trim().is_empty() {
            return Err(Error::ParseError(format!(
                "unexpected text before '(' in '{s}'"
            )));
        }
        let close = rest[open..]
            .find(')')
            .ok_or_else(|| Error::ParseError(format!("unbalanced '(' in '{s}'")))?
            + open;
        let inner = rest[open + 1..close].trim();
        if !inner.is_empty() {
            let mut cycle = Vec::new();
            for tok in inner.split(',') {
                let v: usize = tok.trim().parse().map_err(|_| {
                    Error::ParseError(format!("'{tok}' is not an integer in '{s}'"))
                })?;
                if v < 1 || v > n {
                    return Err(Error::ParseError(format!(
                        "cycle entry {v} outside 1..={n} in '{s}'"
                    )));
                }
                if cycle.contains(&v) {
                    return Err(Error::ParseError(format!(
                        "repeated entry {v} within one cycle in '{s}'"
                    )));
                }
                cycle.push(v);
            }
            cycles.push(cycle);
        }
        rest = rest[close + 1..].trim_start();
    }
    Ok(cycles)
}

/// The minimal-length coset representative gamma_{u_1,...,u_b} for the
/// signature (a, b), given by the strictly increasing list u in 1..=a+b.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CosetRep {
    a: usize,
    b: usize,
    u: Vec<usize>,
}

impl CosetRep {
    pub fn new(a: usize, b: usize, u: Vec<usize>) -> Result<Self> {
        let q = a + b;
        if u.len() != b {
            return Err(Error::ParseError(format!(
                "expected {b} indices for signature ({a},{b}), got {}",
                u.len()
            )));
        }
        for (i, &ui) in u.iter().enumerate() {
            if ui < 1 || ui > q || (i > 0 && u[i - 1] >= ui) {
                return Err(Error::ParseError(format!(
                    "{u:?} is not strictly increasing within 1..={q}"
                )));
            }
        }
        Ok(CosetRep { a, b, u })
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn q(&self) -> usize {
        self.a + self.b
    }

    pub fn u(&self) -> &[usize] {
        &self.u
    }

    /// Expands the cycle product (b,b+1,...,u_b)···(2,3,...,u_2)(1,2,...,u_1)
    /// into one-line notation; the rightmost cycle acts first.
    pub fn permutation(&self) -> Permutation {
        let q = self.q();
        let mut result = Permutation::identity(q);
        for (idx, &ui) in self.u.iter().enumerate() {
            let start = idx + 1;
            // (start, start+1, ..., ui); degenerate when ui <= start.
            if ui > start {
                let cycle: Vec<usize> = (start..=ui).collect();
                let c = Permutation::from_single_cycle(&cycle, q);
                result = c.compose_after(&result);
            }
        }
        result
    }

    /// Dimension of the corresponding stratum: sum of (u_i - i). Always
    /// equals `self.permutation().length()`.
    pub fn dimension(&self) -> usize {
        self.u.iter().enumerate().map(|(i, &ui)| ui - (i + 1)).sum()
    }

    /// Label in the form "γ_{3,4}" (or "γ_{}" when b = 0).
    pub fn label(&self) -> String {
        let inner = self
            .u
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!("γ_{{{inner}}}")
    }
}

impl fmt::Display for CosetRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// All C(a+b, b) coset representatives for signature (a, b), in
/// lexicographic order of the index list u.
pub fn enumerate_w(a: usize, b: usize) -> Vec<CosetRep> {
    let q = a + b;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(b);
    subsets(1, q, b, &mut current, &mut out, a);
    out
}

fn subsets(
    from: usize,
    q: usize,
    need: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<CosetRep>,
    a: usize,
) {
    if need == 0 {
        out.push(CosetRep {
            a,
            b: current.len(),
            u: current.clone(),
        });
        return;
    }
    for v in from..=(q + 1 - need) {
        current.push(v);
        subsets(v + 1, q, need - 1, current, out, a);
        current.pop();
    }
}

/// Membership in W_q, the permutations of {1..2q} classifying symplectic
/// final types: the preimages of 1..q appear in increasing order and
/// w(i) + w(2q+1-i) = 2q+1 for all i.
pub fn is_in_wq(w: &Permutation, q: usize) -> bool {
    if w.n() != 2 * q {
        return false;
    }
    for i in 1..=2 * q {
        if w.apply(i) + w.apply(2 * q + 1 - i) != 2 * q + 1 {
            return false;
        }
    }
    let inv = w.inverse();
    for v in 1..q {
        if inv.apply(v) >= inv.apply(v + 1) {
            return false;
        }
    }
    true
}

/// All 2^q elements of W_q, ordered lexicographically by one-line notation.
pub fn enumerate_wq(q: usize) -> Vec<Permutation> {
    let n = 2 * q;
    let mut images = vec![0usize; n];
    let mut used = vec![false; n + 1];
    let mut out = Vec::new();
    fill_wq(&mut images, &mut used, 0, q, &mut out);
    out
}

fn fill_wq(
    images: &mut Vec<usize>,
    used: &mut Vec<bool>,
    i: usize,
    q: usize,
    out: &mut Vec<Permutation>,
) {
    let n = 2 * q;
    if i == q {
        let w = Permutation {
            images: images.clone(),
        };
        if is_in_wq(&w, q) {
            out.push(w);
        }
        return;
    }
    for v in 1..=n {
        let mirror = n + 1 - v;
        if used[v] || used[mirror] {
            continue;
        }
        used[v] = true;
        used[mirror] = true;
        images[i] = v;
        images[n - 1 - i] = mirror;
        fill_wq(images, used, i + 1, q, out);
        used[v] = false;
        used[mirror] = false;
    }
}

/// Tabulated values of the forgetful map from signature (3, 2) to the
/// Siegel side. Only the images stated for gamma_{2,4}, gamma_{1,4},
/// gamma_{1,5} and gamma_{2,3} are known here; the defining formula lives
/// in external work and is deliberately not reimplemented, so every other
/// representative reports `NotTabulated`.
pub fn forget_unitary_32(r: &CosetRep) -> Result<Permutation> {
    if (r.a(), r.b()) != (3, 2) {
        return Err(Error::WrongSignature {
            want_a: 3,
            want_b: 2,
            got_a: r.a(),
            got_b: r.b(),
        });
    }
    let cycles = match (r.u()[0], r.u()[1]) {
        (2, 4) => "(2,6,8,4)(3,7,9,5)",
        (1, 4) => "(3,6,4)(5,7,8)",
        // gamma_{1,5} and gamma_{2,3} share one Siegel image: the same
        // polarized p-torsion group scheme with two different gradings.
        (1, 5) | (2, 3) => "(2,6,4,3)(5,7,8,9)",
        _ => return Err(Error::NotTabulated(r.label())),
    };
    Permutation::from_cycles(cycles, 10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn gamma(u: &[usize]) -> CosetRep {
        CosetRep::new(3, 2, u.to_vec()).unwrap()
    }

    #[test]
    fn length_of_identity_is_zero() {
        assert_eq!(Permutation::identity(5).length(), 0);
    }

    #[test]
    fn length_of_gamma_34_is_four() {
        let w = Permutation::from_cycles("(1,3)(2,4)", 5).unwrap();
        assert_eq!(w.length(), 4);
    }

    #[test]
    fn length_of_gamma_45_is_six() {
        assert_eq!(gamma(&[4, 5]).permutation().length(), 6);
    }

    #[test]
    fn coset_rep_degenerate_cycles_give_identity() {
        assert_eq!(gamma(&[1, 2]).permutation(), Permutation::identity(5));
    }

    #[test]
    fn coset_rep_gamma_34_equals_double_transposition() {
        let expected = Permutation::from_cycles("(1,3)(2,4)", 5).unwrap();
        assert_eq!(gamma(&[3, 4]).permutation(), expected);
    }

    #[test]
    fn coset_rep_gamma_45_expands_correctly() {
        // (2,3,4,5)(1,2,3,4) expanded by hand: 1->3, 2->4, 3->5, 4->1, 5->2.
        assert_eq!(gamma(&[4, 5]).permutation().images(), &[3, 4, 5, 1, 2]);
    }

    #[test]
    fn enumerate_w_32_lists_the_ten_strata() {
        let reps = enumerate_w(3, 2);
        let us: Vec<Vec<usize>> = reps.iter().map(|r| r.u().to_vec()).collect();
        assert_eq!(
            us,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![1, 5],
                vec![2, 3],
                vec![2, 4],
                vec![2, 5],
                vec![3, 4],
                vec![3, 5],
                vec![4, 5],
            ]
        );
    }

    #[test]
    fn enumerate_w_with_b_zero_is_single_empty_rep() {
        let reps = enumerate_w(4, 0);
        assert_eq!(reps.len(), 1);
        assert!(reps[0].u().is_empty());
        assert_eq!(reps[0].dimension(), 0);
    }

    #[test]
    fn enumerate_w_11() {
        let reps = enumerate_w(1, 1);
        let us: Vec<Vec<usize>> = reps.iter().map(|r| r.u().to_vec()).collect();
        assert_eq!(us, vec![vec![1], vec![2]]);
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(gamma(&[1, 2]).dimension(), 0);
        assert_eq!(gamma(&[3, 4]).dimension(), 4);
        assert_eq!(gamma(&[4, 5]).dimension(), 6);
    }

    #[test]
    fn dimension_equals_length_over_all_small_signatures() {
        for q in 1..=8 {
            for b in 0..=q {
                let a = q - b;
                for r in enumerate_w(a, b) {
                    assert_eq!(
                        r.dimension(),
                        r.permutation().length(),
                        "length/dimension mismatch at {r}"
                    );
                }
            }
        }
    }

    #[test]
    fn enumerate_w_count_is_binomial() {
        let binom = |n: usize, k: usize| -> usize {
            (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
        };
        for q in 1..=8 {
            for b in 0..=q {
                let reps = enumerate_w(q - b, b);
                assert_eq!(reps.len(), binom(q, b));
                let distinct: std::collections::HashSet<_> =
                    reps.iter().map(|r| r.u().to_vec()).collect();
                assert_eq!(distinct.len(), reps.len());
            }
        }
    }

    #[test]
    fn identity_is_in_wq() {
        assert!(is_in_wq(&Permutation::identity(10), 5));
    }

    #[test]
    fn omega_24_is_in_wq() {
        let w = Permutation::from_cycles("(2,6,8,4)(3,7,9,5)", 10).unwrap();
        assert!(is_in_wq(&w, 5));
    }

    #[test]
    fn wq_count_at_q2_by_brute_force() {
        // Independent oracle: filter all 24 permutations of {1..4}.
        let members = (1..=4usize)
            .permutations(4)
            .filter(|imgs| is_in_wq(&Permutation::from_images(imgs.clone()).unwrap(), 2))
            .count();
        assert_eq!(members, 4);
    }

    #[test]
    fn enumerate_wq_matches_brute_force_at_q2() {
        let fast: std::collections::HashSet<Vec<usize>> = enumerate_wq(2)
            .into_iter()
            .map(|w| w.images().to_vec())
            .collect();
        let slow: std::collections::HashSet<Vec<usize>> = (1..=4usize)
            .permutations(4)
            .filter(|imgs| is_in_wq(&Permutation::from_images(imgs.clone()).unwrap(), 2))
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn enumerate_wq_has_two_to_the_q_elements() {
        for q in 1..=5 {
            assert_eq!(enumerate_wq(q).len(), 1 << q);
        }
    }

    #[test]
    fn forgetful_map_tabulated_values() {
        let w24 = forget_unitary_32(&gamma(&[2, 4])).unwrap();
        assert_eq!(w24.cycle_string(), "(2,6,8,4)(3,7,9,5)");

        let w15 = forget_unitary_32(&gamma(&[1, 5])).unwrap();
        let w23 = forget_unitary_32(&gamma(&[2, 3])).unwrap();
        assert_eq!(w15, w23);
        assert_eq!(w15.cycle_string(), "(2,6,4,3)(5,7,8,9)");
    }

    #[test]
    fn forgetful_map_rejects_untabulated() {
        assert_eq!(
            forget_unitary_32(&gamma(&[3, 4])).unwrap_err().name(),
            "NotTabulated"
        );
    }

    #[test]
    fn tabulated_images_lie_in_w5() {
        for u in [[2, 4], [1, 4], [1, 5], [2, 3]] {
            let w = forget_unitary_32(&gamma(&u)).unwrap();
            assert!(is_in_wq(&w, 5), "forgetful image of {u:?} not in W_5");
        }
    }

    #[test]
    fn cycle_string_round_trip() {
        for s in ["(1,3)(2,4)", "(2,6,8,4)(3,7,9,5)", "()"] {
            let w = Permutation::from_cycles(s, 10).unwrap();
            assert_eq!(w.cycle_string(), s);
            let back = Permutation::from_cycles(&w.cycle_string(), 10).unwrap();
            assert_eq!(back, w);
        }
    }

    #[test]
    fn cycle_parse_rejects_garbage() {
        assert!(Permutation::from_cycles("(1,2", 5).is_err());
        assert!(Permutation::from_cycles("(1,9)", 5).is_err());
        assert!(Permutation::from_cycles("(1,1)", 5).is_err());
        assert!(Permutation::from_cycles("x(1,2)", 5).is_err());
    }

    #[test]
    fn non_disjoint_cycles_compose_right_to_left() {
        // (2,3,4)(1,2,3) must agree with the gamma_{3,4} expansion.
        let w = Permutation::from_cycles("(2,3,4)(1,2,3)", 5).unwrap();
        assert_eq!(w.images(), &[3, 4, 1, 2, 5]);
    }
}
