//! Newton polygons as multisets of simple isoclinic factors.
//!
//! A factor (m, n, mult) stands for `mult` copies of the isoclinic group of
//! dimension m, codimension n and slope m/(m+n); gcd(m, n) = 1. A polygon
//! for abelian-variety dimension q has total height 2q and total dimension
//! q, and polarization forces the slope multiset to be symmetric under
//! s -> 1 - s. Geometrically the slopes, sorted ascending, trace a convex
//! piecewise-linear path from (0,0) to (2q,q); the polygon with all slopes
//! 1/2 is the straight line (supersingular), the mu-ordinary polygon is the
//! lowest one admissible for the signature.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rat::{display_rat, rat, Rat};

/// (m, n, multiplicity) with gcd(m, n) = 1; slope m/(m+n).
pub type Factor = (u32, u32, u32);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NewtonPolygon {
    q: usize,
    factors: Vec<Factor>,
}

fn slope_of(m: u32, n: u32) -> Rat {
    rat(m as i64, (m + n) as i64)
}

impl NewtonPolygon {
    /// Validates and canonicalizes: zero multiplicities are dropped, equal
    /// factors merged, factors sorted by slope ascending.
    pub fn new(q: usize, factors: Vec<Factor>) -> Result<Self> {
        let mut canon: Vec<Factor> = Vec::new();
        for (m, n, mult) in factors {
            if mult == 0 {
                continue;
            }
            if m.gcd(&n) != 1 {
                return Err(Error::NotCoprime { m, n });
            }
            match canon.iter_mut().find(|(fm, fn_, _)| (*fm, *fn_) == (m, n)) {
                Some(entry) => entry.2 += mult,
                None => canon.push((m, n, mult)),
            }
        }
        canon.sort_by_key(|&(m, n, _)| slope_of(m, n));

        let dim: usize = canon.iter().map(|&(m, _, l)| m as usize * l as usize).sum();
        if dim != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                actual: dim,
            });
        }
        let height: usize = canon
            .iter()
            .map(|&(m, n, l)| (m + n) as usize * l as usize)
            .sum();
        if height != 2 * q {
            return Err(Error::HeightMismatch {
                expected: 2 * q,
                actual: height,
            });
        }
        for &(m, n, mult) in &canon {
            let mirror = canon
                .iter()
                .find(|&&(fm, fn_, _)| (fm, fn_) == (n, m))
                .map(|&(_, _, l)| l);
            if mirror != Some(mult) {
                return Err(Error::NotSymmetric { m, n });
            }
        }
        Ok(NewtonPolygon { q, factors: canon })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Smallest slope in the multiset.
    pub fn first_slope(&self) -> Rat {
        let (m, n, _) = self.factors[0];
        slope_of(m, n)
    }

    /// Multiplicity of the slope-0 factor; equals the p-rank of any
    /// abelian variety with this polygon.
    pub fn p_rank(&self) -> u32 {
        self.factors
            .iter()
            .find(|&&(m, n, _)| (m, n) == (0, 1))
            .map(|&(_, _, l)| l)
            .unwrap_or(0)
    }

    /// Height of the polygon path at integer abscissa x in 0..=2q.
    pub fn height_at(&self, x: usize) -> Rat {
        let mut remaining = x as i64;
        let mut y = rat(0, 1);
        for &(m, n, l) in &self.factors {
            let width = ((m + n) * l) as i64;
            let step = remaining.min(width);
            if step <= 0 {
                break;
            }
            y += slope_of(m, n) * rat(step, 1);
            remaining -= step;
        }
        y
    }

    /// x-coordinates where the slope changes (strictly between 0 and 2q).
    pub fn breakpoints(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut x = 0usize;
        for (i, &(m, n, l)) in self.factors.iter().enumerate() {
            x += (m + n) as usize * l as usize;
            if i + 1 < self.factors.len() {
                out.push(x);
            }
        }
        out
    }

    /// True iff `self` lies on or above `other` at every integer abscissa.
    /// Both polygons are linear between consecutive integers, so checking
    /// integer points decides the whole path. Defines a partial order.
    pub fn lies_on_or_above(&self, other: &NewtonPolygon) -> Result<bool> {
        if self.q != other.q {
            return Err(Error::QMismatch {
                left: self.q,
                right: other.q,
            });
        }
        Ok((0..=2 * self.q).all(|x| self.height_at(x) >= other.height_at(x)))
    }

    /// The slope multiset with heights: factor (m, n, l) contributes the
    /// slope m/(m+n) with height l*(m+n).
    pub fn slope_multiset(&self) -> SlopeMultiset {
        SlopeMultiset::new(
            self.factors
                .iter()
                .map(|&(m, n, l)| (slope_of(m, n), (m + n) as usize * l as usize))
                .collect(),
        )
    }

    /// Expanded slope list [a_1 <= a_2 <= ...] with each factor repeated
    /// `mult` times (one entry per factor, not per height unit).
    pub fn slope_list(&self) -> Vec<Rat> {
        let mut out = Vec::new();
        for &(m, n, l) in &self.factors {
            for _ in 0..l {
                out.push(slope_of(m, n));
            }
        }
        out
    }

    /// Sum of `height_at` over integer abscissae; a strictly monotone
    /// linear extension of `lies_on_or_above`.
    fn height_sum(&self) -> Rat {
        (0..=2 * self.q).map(|x| self.height_at(x)).sum()
    }
}

impl fmt::Display for NewtonPolygon {
    /// E.g. "[0^4, 1/2, 1^4]": slopes in lowest terms with the factor
    /// multiplicity as exponent when above 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(m, n, l)| {
                let s = display_rat(&slope_of(m, n));
                if l > 1 {
                    format!("{s}^{l}")
                } else {
                    s
                }
            })
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// A multiset of exact slopes with heights. Unlike `NewtonPolygon` this is
/// a plain result carrier: `validate_for` checks the polygon contract but
/// construction does not force it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SlopeMultiset {
    entries: Vec<(Rat, usize)>,
}

impl SlopeMultiset {
    pub fn new(entries: Vec<(Rat, usize)>) -> Self {
        let mut canon: Vec<(Rat, usize)> = Vec::new();
        let mut sorted = entries;
        sorted.sort_by_key(|&(s, _)| s);
        for (s, h) in sorted {
            if h == 0 {
                continue;
            }
            match canon.last_mut() {
                Some((last, lh)) if *last == s => *lh += h,
                _ => canon.push((s, h)),
            }
        }
        SlopeMultiset { entries: canon }
    }

    pub fn entries(&self) -> &[(Rat, usize)] {
        &self.entries
    }

    pub fn total_height(&self) -> usize {
        self.entries.iter().map(|&(_, h)| h).sum()
    }

    /// Checks heights sum to 2q, slope-weighted sum equals q, and every
    /// slope lies in [0, 1].
    pub fn validate_for(&self, q: usize) -> Result<()> {
        if self.total_height() != 2 * q {
            return Err(Error::HeightMismatch {
                expected: 2 * q,
                actual: self.total_height(),
            });
        }
        let weighted: Rat = self
            .entries
            .iter()
            .map(|&(s, h)| s * rat(h as i64, 1))
            .sum();
        if weighted != rat(q as i64, 1) {
            return Err(Error::DimensionMismatch {
                expected: q,
                actual: 0,
            });
        }
        for &(s, _) in &self.entries {
            if s < rat(0, 1) || s > rat(1, 1) {
                return Err(Error::InvariantViolation(format!(
                    "slope {} outside [0,1]",
                    display_rat(&s)
                )));
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.iter().all(|&(s, h)| {
            self.entries
                .iter()
                .any(|&(t, k)| t == rat(1, 1) - s && k == h)
        })
    }

    pub fn is_constant(&self) -> bool {
        self.entries.len() == 1
    }
}

impl fmt::Display for SlopeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(s, h)| {
                let d = display_rat(s);
                if *h > 1 {
                    format!("{d}^{h}")
                } else {
                    d
                }
            })
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The straight-line polygon [1/2^q]: all slopes 1/2 (supersingular).
pub fn supersingular(q: usize) -> NewtonPolygon {
    NewtonPolygon::new(q, vec![(1, 1, q as u32)]).expect("straight line is always valid")
}

/// The mu-ordinary polygon for signature (a, b):
/// factors {(0,1,2b), (1,1,a-b), (1,0,2b)} with zero multiplicities
/// omitted. Reproduces [0^4, 1/2, 1^4] at (3,2); other signatures follow
/// the same shape but are only cross-checked at small q.
pub fn mu_ordinary(a: usize, b: usize) -> Result<NewtonPolygon> {
    if a < b || a + b == 0 {
        return Err(Error::BadSignature { a, b });
    }
    NewtonPolygon::new(
        a + b,
        vec![
            (0, 1, 2 * b as u32),
            (1, 1, (a - b) as u32),
            (1, 0, 2 * b as u32),
        ],
    )
}

/// All Newton polygons admissible for signature (a, b): symmetric, lying
/// between the mu-ordinary polygon (lowest) and the straight line
/// (highest), with every breakpoint at an even abscissa. Sorted from the
/// straight line downwards (height-sum descending, ties by lexicographic
/// slope list).
pub fn admissible_polygons(a: usize, b: usize) -> Result<Vec<NewtonPolygon>> {
    if a < b || a + b == 0 {
        return Err(Error::BadSignature { a, b });
    }
    let q = a + b;
    let lowest = mu_ordinary(a, b)?;
    let highest = supersingular(q);

    let mut admissible: Vec<NewtonPolygon> = enumerate_symmetric_polygons(q)
        .into_iter()
        .filter(|p| p.breakpoints().iter().all(|x| x % 2 == 0))
        .filter(|p| {
            highest.lies_on_or_above(p).unwrap() && p.lies_on_or_above(&lowest).unwrap()
        })
        .collect();

    admissible.sort_by(|x, y| {
        y.height_sum()
            .cmp(&x.height_sum())
            .then_with(|| x.slope_list().cmp(&y.slope_list()))
    });
    Ok(admissible)
}

/// Every symmetric polygon of total height 2q and dimension q, by direct
/// search over coprime factor multisets.
pub fn enumerate_symmetric_polygons(q: usize) -> Vec<NewtonPolygon> {
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for m in 0..=(2 * q as u32) {
        for n in 0..=(2 * q as u32) {
            if m + n >= 1 && m + n <= 2 * q as u32 && m.gcd(&n) == 1 {
                pairs.push((m, n));
            }
        }
    }
    pairs.sort_by_key(|&(m, n)| (slope_of(m, n), m + n));

    let mut out = Vec::new();
    let mut chosen: Vec<Factor> = Vec::new();
    search_polygons(q, &pairs, 0, 0, 0, &mut chosen, &mut out);
    out
}

fn search_polygons(
    q: usize,
    pairs: &[(u32, u32)],
    idx: usize,
    height: usize,
    dim: usize,
    chosen: &mut Vec<Factor>,
    out: &mut Vec<NewtonPolygon>,
) {
    if height == 2 * q && dim == q {
        if let Ok(p) = NewtonPolygon::new(q, chosen.clone()) {
            out.push(p);
        }
        return;
    }
    if idx == pairs.len() || height >= 2 * q {
        return;
    }
    let (m, n) = pairs[idx];
    let unit = (m + n) as usize;
    let max_mult = (2 * q - height) / unit;
    for mult in 0..=max_mult {
        if dim + m as usize * mult <= q {
            if mult > 0 {
                chosen.push((m, n, mult as u32));
            }
            search_polygons(
                q,
                pairs,
                idx + 1,
                height + unit * mult,
                dim + m as usize * mult,
                chosen,
                out,
            );
            if mult > 0 {
                chosen.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn beta_ss() -> NewtonPolygon {
        NewtonPolygon::new(5, vec![(1, 1, 5)]).unwrap()
    }

    pub(crate) fn beta_1() -> NewtonPolygon {
        NewtonPolygon::new(5, vec![(1, 3, 1), (1, 1, 1), (3, 1, 1)]).unwrap()
    }

    pub(crate) fn beta_2() -> NewtonPolygon {
        NewtonPolygon::new(5, vec![(0, 1, 2), (1, 1, 3), (1, 0, 2)]).unwrap()
    }

    pub(crate) fn beta_max() -> NewtonPolygon {
        NewtonPolygon::new(5, vec![(0, 1, 4), (1, 1, 1), (1, 0, 4)]).unwrap()
    }

    #[test]
    fn construction_accepts_the_four_32_polygons() {
        beta_ss();
        beta_1();
        beta_2();
        beta_max();
    }

    #[test]
    fn construction_rejects_dimension_mismatch() {
        let err = NewtonPolygon::new(5, vec![(0, 1, 4), (1, 0, 4)]).unwrap_err();
        assert_eq!(err.name(), "DimensionMismatch");
    }

    #[test]
    fn construction_rejects_height_mismatch() {
        // Dimension 5 checks out, height 5 != 10 does not.
        let err = NewtonPolygon::new(5, vec![(1, 0, 5)]).unwrap_err();
        assert_eq!(err.name(), "HeightMismatch");
    }

    #[test]
    fn construction_rejects_asymmetric() {
        // Heights 1+3+2 = 6 and dims 0+2+1 = 3 check out, but (0,1) has no
        // mirror (1,0).
        let err = NewtonPolygon::new(3, vec![(0, 1, 1), (2, 1, 1), (1, 1, 1)]).unwrap_err();
        assert_eq!(err.name(), "NotSymmetric");
    }

    #[test]
    fn construction_rejects_non_coprime() {
        let err = NewtonPolygon::new(4, vec![(2, 2, 2)]).unwrap_err();
        assert_eq!(err.name(), "NotCoprime");
    }

    #[test]
    fn first_slopes() {
        assert_eq!(beta_1().first_slope(), rat(1, 4));
        assert_eq!(beta_ss().first_slope(), rat(1, 2));
        assert_eq!(beta_max().first_slope(), rat(0, 1));
    }

    #[test]
    fn p_ranks() {
        assert_eq!(beta_max().p_rank(), 4);
        assert_eq!(beta_2().p_rank(), 2);
        assert_eq!(beta_ss().p_rank(), 0);
        assert_eq!(beta_1().p_rank(), 0);
    }

    #[test]
    fn lies_on_or_above_chain() {
        assert!(beta_ss().lies_on_or_above(&beta_ss()).unwrap());
        assert!(beta_ss().lies_on_or_above(&beta_1()).unwrap());
        assert!(beta_1().lies_on_or_above(&beta_2()).unwrap());
        assert!(beta_2().lies_on_or_above(&beta_max()).unwrap());
        assert!(!beta_max().lies_on_or_above(&beta_2()).unwrap());
    }

    #[test]
    fn lies_on_or_above_rejects_q_mismatch() {
        let p = supersingular(2);
        assert_eq!(
            beta_ss().lies_on_or_above(&p).unwrap_err().name(),
            "QMismatch"
        );
    }

    #[test]
    fn mu_ordinary_32_is_beta_max() {
        assert_eq!(mu_ordinary(3, 2).unwrap(), beta_max());
    }

    #[test]
    fn mu_ordinary_b_zero_is_straight_line() {
        for q in 1..=6 {
            assert_eq!(mu_ordinary(q, 0).unwrap(), supersingular(q));
        }
    }

    #[test]
    fn mu_ordinary_21() {
        let p = mu_ordinary(2, 1).unwrap();
        assert_eq!(p.factors(), &[(0, 1, 2), (1, 1, 1), (1, 0, 2)]);
    }

    #[test]
    fn mu_ordinary_rejects_bad_signature() {
        assert_eq!(mu_ordinary(1, 2).unwrap_err().name(), "BadSignature");
    }

    #[test]
    fn admissible_32_is_the_four_polygons_in_order() {
        let polys = admissible_polygons(3, 2).unwrap();
        assert_eq!(polys, vec![beta_ss(), beta_1(), beta_2(), beta_max()]);
    }

    #[test]
    fn admissible_32_excludes_odd_breakpoint_pretender() {
        // [1/3, 1/2^2, 2/3] is symmetric and between the bounds but breaks
        // at x = 3 and x = 7.
        let pretender = NewtonPolygon::new(5, vec![(1, 2, 1), (1, 1, 2), (2, 1, 1)]).unwrap();
        assert!(supersingular(5).lies_on_or_above(&pretender).unwrap());
        assert!(pretender
            .lies_on_or_above(&mu_ordinary(3, 2).unwrap())
            .unwrap());
        assert_eq!(pretender.breakpoints(), vec![3, 7]);
        assert!(!admissible_polygons(3, 2).unwrap().contains(&pretender));
    }

    #[test]
    fn admissible_11() {
        let polys = admissible_polygons(1, 1).unwrap();
        let expected = vec![
            supersingular(2),
            NewtonPolygon::new(2, vec![(0, 1, 2), (1, 0, 2)]).unwrap(),
        ];
        assert_eq!(polys, expected);
    }

    #[test]
    fn admissible_10() {
        let polys = admissible_polygons(1, 0).unwrap();
        assert_eq!(polys, vec![supersingular(1)]);
    }

    #[test]
    fn admissible_p_ranks_at_32() {
        for p in admissible_polygons(3, 2).unwrap() {
            assert!(matches!(p.p_rank(), 0 | 2 | 4), "{p}");
        }
    }

    #[test]
    fn display_matches_bracket_notation() {
        assert_eq!(beta_max().to_string(), "[0^4, 1/2, 1^4]");
        assert_eq!(beta_1().to_string(), "[1/4, 1/2, 3/4]");
        assert_eq!(beta_ss().to_string(), "[1/2^5]");
        assert_eq!(beta_2().to_string(), "[0^2, 1/2^3, 1^2]");
    }

    #[test]
    fn slope_multiset_contract_for_generated_polygons() {
        for q in 1..=5 {
            for p in enumerate_symmetric_polygons(q) {
                let ms = p.slope_multiset();
                ms.validate_for(q).unwrap();
                assert!(ms.is_symmetric(), "{p}");
            }
        }
    }

    #[test]
    fn partial_order_laws_on_admissible_pairs() {
        let polys = admissible_polygons(3, 2).unwrap();
        for x in &polys {
            assert!(x.lies_on_or_above(x).unwrap());
            for y in &polys {
                if x.lies_on_or_above(y).unwrap() && y.lies_on_or_above(x).unwrap() {
                    assert_eq!(x, y);
                }
                for z in &polys {
                    if x.lies_on_or_above(y).unwrap() && y.lies_on_or_above(z).unwrap() {
                        assert!(x.lies_on_or_above(z).unwrap());
                    }
                }
            }
        }
    }
}
