//! Final sequences and the generic first slope.
//!
//! A final sequence is the step function phi: {0..2q} -> {0..q} attached to
//! a symplectic final type; phi(0) = 0, steps are 0 or 1, and
//! phi(2q-i) = q-i+phi(i). The generic first slope of the stratum is
//! Harashita's invariant #C/#D, computed from the stable set of the
//! phi-tilde iteration. It lower-bounds the first slope of every Newton
//! polygon occurring on the stratum.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::rat::{rat, Rat};
use crate::weyl::{is_in_wq, Permutation};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinalSequence {
    q: usize,
    phi: Vec<usize>, // indices 0..=2q, phi[0] = 0
}

impl FinalSequence {
    /// Validates the three defining conditions.
    pub fn new(q: usize, phi: Vec<usize>) -> Result<Self> {
        if q == 0 || phi.len() != 2 * q + 1 {
            return Err(Error::InvariantViolation(format!(
                "final sequence for q={q} needs {} values, got {}",
                2 * q + 1,
                phi.len()
            )));
        }
        if phi[0] != 0 {
            return Err(Error::InvariantViolation(
                "final sequence must start at phi(0) = 0".into(),
            ));
        }
        for i in 1..=2 * q {
            if phi[i] < phi[i - 1] || phi[i] > phi[i - 1] + 1 {
                return Err(Error::InvariantViolation(format!(
                    "phi({i}) = {} breaks the 0/1-step condition after phi({}) = {}",
                    phi[i],
                    i - 1,
                    phi[i - 1]
                )));
            }
        }
        for i in 0..=2 * q {
            // phi(2q-i) = q-i+phi(i), rearranged to stay in the naturals.
            if phi[2 * q - i] + i != q + phi[i] {
                return Err(Error::InvariantViolation(format!(
                    "phi({}) = {} violates phi(2q-i) = q-i+phi(i) at i = {i}",
                    2 * q - i,
                    phi[2 * q - i]
                )));
            }
        }
        Ok(FinalSequence { q, phi })
    }

    /// Builds from the display tuple [phi(1), ..., phi(2q)].
    pub fn from_tuple(q: usize, tuple: &[usize]) -> Result<Self> {
        let mut phi = Vec::with_capacity(2 * q + 1);
        phi.push(0);
        phi.extend_from_slice(tuple);
        FinalSequence::new(q, phi)
    }

    /// The final sequence of a W_q element: phi steps up exactly where the
    /// permutation value exceeds q.
    pub fn from_permutation(w: &Permutation, q: usize) -> Result<Self> {
        if !is_in_wq(w, q) {
            return Err(Error::NotInWq(w.cycle_string(), q));
        }
        let mut phi = vec![0usize; 2 * q + 1];
        for i in 1..=2 * q {
            phi[i] = phi[i - 1] + usize::from(w.apply(i) > q);
        }
        FinalSequence::new(q, phi)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// phi(i) for 0 <= i <= 2q.
    pub fn phi(&self, i: usize) -> usize {
        self.phi[i]
    }

    /// The display tuple [phi(1), ..., phi(2q)].
    pub fn tuple(&self) -> &[usize] {
        &self.phi[1..]
    }

    /// phi-tilde(i): phi(i) when nonzero, else q + i. Defined on 1..=2q.
    pub fn phi_tilde(&self, i: usize) -> Result<usize> {
        if i < 1 || i > 2 * self.q {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: 2 * self.q,
            });
        }
        Ok(if self.phi[i] != 0 {
            self.phi[i]
        } else {
            self.q + i
        })
    }

    /// The stable set D of the phi-tilde iteration started at {1..2q},
    /// together with C = D intersected with {q+1..2q}. The iteration is
    /// decreasing, so it stabilizes within 2q steps.
    pub fn stable_sets(&self) -> (Vec<usize>, Vec<usize>) {
        let mut s: BTreeSet<usize> = (1..=2 * self.q).collect();
        for _ in 0..=2 * self.q {
            let next: BTreeSet<usize> =
                s.iter().map(|&i| self.phi_tilde(i).unwrap()).collect();
            if next == s {
                break;
            }
            s = next;
        }
        let d: Vec<usize> = s.iter().copied().collect();
        let c: Vec<usize> = s.iter().copied().filter(|&i| i > self.q).collect();
        (d, c)
    }

    /// Harashita's generic first slope #C/#D, in lowest terms.
    pub fn generic_first_slope(&self) -> Rat {
        let (d, c) = self.stable_sets();
        rat(c.len() as i64, d.len() as i64)
    }
}

impl fmt::Display for FinalSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tuple().iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Debug for FinalSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinalSequence(q={}, {})", self.q, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::enumerate_wq;

    fn phi_14() -> FinalSequence {
        let w = Permutation::from_cycles("(3,6,4)(5,7,8)", 10).unwrap();
        FinalSequence::from_permutation(&w, 5).unwrap()
    }

    fn phi_15() -> FinalSequence {
        let w = Permutation::from_cycles("(2,6,4,3)(5,7,8,9)", 10).unwrap();
        FinalSequence::from_permutation(&w, 5).unwrap()
    }

    #[test]
    fn from_permutation_omega_14() {
        assert_eq!(phi_14().tuple(), &[0, 0, 1, 1, 2, 2, 3, 3, 4, 5]);
    }

    #[test]
    fn from_permutation_omega_15() {
        assert_eq!(phi_15().tuple(), &[0, 1, 1, 1, 2, 2, 3, 4, 4, 5]);
    }

    #[test]
    fn from_identity_permutation() {
        let f = FinalSequence::from_permutation(&Permutation::identity(10), 5).unwrap();
        assert_eq!(f.tuple(), &[0, 0, 0, 0, 0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn from_permutation_rejects_non_wq() {
        let w = Permutation::from_cycles("(1,2)", 10).unwrap();
        assert_eq!(
            FinalSequence::from_permutation(&w, 5).unwrap_err().name(),
            "NotInWq"
        );
    }

    #[test]
    fn phi_tilde_values() {
        let f = phi_15();
        assert_eq!(f.phi_tilde(1).unwrap(), 6); // phi(1) = 0 -> q + 1
        assert_eq!(f.phi_tilde(2).unwrap(), 1);
        assert_eq!(f.phi_tilde(10).unwrap(), 5); // phi(2q) = q always
        assert_eq!(f.phi_tilde(11).unwrap_err().name(), "IndexOutOfRange");
        assert_eq!(f.phi_tilde(0).unwrap_err().name(), "IndexOutOfRange");
    }

    #[test]
    fn generic_first_slope_of_phi_14_is_two_fifths() {
        assert_eq!(phi_14().generic_first_slope(), rat(2, 5));
    }

    #[test]
    fn generic_first_slope_of_phi_15_is_one_third_with_d_126() {
        let f = phi_15();
        let (d, c) = f.stable_sets();
        assert_eq!(d, vec![1, 2, 6]);
        assert_eq!(c, vec![6]);
        assert_eq!(f.generic_first_slope(), rat(1, 3));
    }

    #[test]
    fn superspecial_sequence_has_slope_one_half() {
        let f = FinalSequence::from_tuple(5, &[0, 0, 0, 0, 0, 1, 2, 3, 4, 5]).unwrap();
        let (d, c) = f.stable_sets();
        assert_eq!(d, (1..=10).collect::<Vec<_>>());
        assert_eq!(c, (6..=10).collect::<Vec<_>>());
        assert_eq!(f.generic_first_slope(), rat(1, 2));
    }

    #[test]
    fn validation_rejects_bad_sequences() {
        assert!(FinalSequence::from_tuple(5, &[1, 1, 1, 1, 1, 2, 3, 4, 4, 5]).is_err()); // symmetry
        assert!(FinalSequence::from_tuple(5, &[0, 2, 2, 2, 2, 3, 3, 4, 4, 5]).is_err()); // step 2
        assert!(FinalSequence::new(5, vec![1; 11]).is_err()); // phi(0) != 0
        assert!(FinalSequence::from_tuple(5, &[0, 0, 1]).is_err()); // length
    }

    #[test]
    fn all_w5_sequences_satisfy_invariants() {
        // from_permutation re-validates through new(); the point here is
        // that construction succeeds across the whole of W_5 and the
        // increment count is q.
        let ws = enumerate_wq(5);
        assert_eq!(ws.len(), 32);
        for w in ws {
            let f = FinalSequence::from_permutation(&w, 5).unwrap();
            let increments: usize = (1..=10).map(|i| f.phi(i) - f.phi(i - 1)).sum();
            assert_eq!(increments, 5);
        }
    }

    #[test]
    fn iteration_is_decreasing_and_stabilizes_within_2q_steps() {
        for w in enumerate_wq(5) {
            let f = FinalSequence::from_permutation(&w, 5).unwrap();
            let mut s: BTreeSet<usize> = (1..=10).collect();
            let mut steps = 0;
            loop {
                let next: BTreeSet<usize> =
                    s.iter().map(|&i| f.phi_tilde(i).unwrap()).collect();
                assert!(next.is_subset(&s), "iteration not decreasing for {w}");
                if next == s {
                    break;
                }
                s = next;
                steps += 1;
                assert!(steps <= 10, "no stabilization within 2q steps for {w}");
            }
        }
    }

    #[test]
    fn slope_lies_in_unit_half_interval_over_w5() {
        for w in enumerate_wq(5) {
            let f = FinalSequence::from_permutation(&w, 5).unwrap();
            let lambda = f.generic_first_slope();
            assert!(lambda >= rat(0, 1) && lambda <= rat(1, 2), "{w}: {lambda}");
        }
    }
}
