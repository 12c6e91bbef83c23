//! Cross-dimensional vector algebra on R^∞.
//!
//! Two vectors of dimensions `m` and `n` are compared by stretching both to
//! `t = lcm(m, n)`: every entry of `x` is repeated `t / m` times and every
//! entry of `y` is repeated `t / n` times. The inner product is the ordinary
//! dot product of the stretched vectors scaled by `1 / t`.
//!
//! Nothing here materializes the stretched vectors unless the result is itself
//! a stretched vector (`stretch`, `vadd`, `vsub`). Entry `x_i` occupies the
//! interval `[i·t/m, (i+1)·t/m)` and `y_j` occupies `[j·t/n, (j+1)·t/n)`;
//! [`Overlaps`] walks both partitions with two pointers and reports the length
//! of every non-empty intersection, which is all the inner product needs.

use crate::error::{Result, StpError};

/// Absolute tolerance used by [`equivalent`] and zero-distance checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A finite real vector of any positive dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct XVector(Vec<f64>);

impl XVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(StpError::EmptyVector);
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(StpError::NonFinite { index, value });
        }
        Ok(XVector(entries))
    }

    /// Builds from a slice. Panics on empty or non-finite input; meant for
    /// literals in tests and fixtures.
    pub fn from_slice(entries: &[f64]) -> Self {
        Self::new(entries.to_vec()).expect("invalid XVector literal")
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.0
    }

    pub fn scale(&self, alpha: f64) -> Result<XVector> {
        XVector::new(self.0.iter().map(|v| alpha * v).collect())
    }
}

impl AsRef<[f64]> for XVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Least common multiple, with overflow reported.
pub fn lcm(m: usize, n: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return Err(StpError::ZeroSize {
            what: "lcm operand",
        });
    }
    (m / gcd(m, n))
        .checked_mul(n)
        .ok_or(StpError::LcmOverflow { m, n })
}

/// One non-empty intersection of the two interval partitions of `[0, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    /// Index into the `m`-dimensional operand.
    pub left: usize,
    /// Index into the `n`-dimensional operand.
    pub right: usize,
    /// Intersection length, in units where the whole line has length `t`.
    pub len: u128,
}

/// Two-pointer merge over the lcm partitions of an `m`- and an `n`-vector.
///
/// Yields at most `m + n - 1` items. All arithmetic is in `u128`, so no
/// pair of `usize` dimensions can overflow.
#[derive(Debug, Clone)]
pub struct Overlaps {
    m: usize,
    n: usize,
    step_left: u128,
    step_right: u128,
    total: u128,
    left: usize,
    right: usize,
    pos: u128,
    end_left: u128,
    end_right: u128,
}

impl Overlaps {
    pub fn new(m: usize, n: usize) -> Self {
        assert!(m > 0 && n > 0, "overlap merge needs positive dimensions");
        let g = gcd(m, n) as u128;
        let step_left = n as u128 / g;
        let step_right = m as u128 / g;
        Overlaps {
            m,
            n,
            step_left,
            step_right,
            total: step_left * m as u128,
            left: 0,
            right: 0,
            pos: 0,
            end_left: step_left,
            end_right: step_right,
        }
    }

    /// `t = lcm(m, n)`.
    pub fn total(&self) -> u128 {
        self.total
    }
}

impl Iterator for Overlaps {
    type Item = Overlap;

    fn next(&mut self) -> Option<Overlap> {
        if self.left >= self.m || self.right >= self.n {
            return None;
        }
        let next = self.end_left.min(self.end_right);
        let item = Overlap {
            left: self.left,
            right: self.right,
            len: next - self.pos,
        };
        self.pos = next;
        if self.end_left == next {
            self.left += 1;
            self.end_left += self.step_left;
        }
        if self.end_right == next {
            self.right += 1;
            self.end_right += self.step_right;
        }
        Some(item)
    }
}

/// `x ⊗ 1_k`: every entry repeated `k` times, order preserved.
pub fn stretch(x: &XVector, k: usize) -> Result<XVector> {
    if k == 0 {
        return Err(StpError::ZeroMultiplicity);
    }
    x.dim()
        .checked_mul(k)
        .ok_or(StpError::LcmOverflow { m: x.dim(), n: k })?;
    let entries = x
        .entries()
        .iter()
        .flat_map(|&v| std::iter::repeat_n(v, k))
        .collect();
    Ok(XVector(entries))
}

fn combine(x: &XVector, y: &XVector, op: impl Fn(f64, f64) -> f64) -> Result<XVector> {
    let t = lcm(x.dim(), y.dim())?;
    let (kx, ky) = (t / x.dim(), t / y.dim());
    let entries = (0..t)
        .map(|p| op(x.entries()[p / kx], y.entries()[p / ky]))
        .collect();
    XVector::new(entries)
}

/// Cross-dimensional addition; the result lives in `R^lcm(m, n)`.
pub fn vadd(x: &XVector, y: &XVector) -> Result<XVector> {
    combine(x, y, |a, b| a + b)
}

/// Cross-dimensional subtraction; the result lives in `R^lcm(m, n)`.
pub fn vsub(x: &XVector, y: &XVector) -> Result<XVector> {
    combine(x, y, |a, b| a - b)
}

/// Weighted sum `(1/t) Σ f(x_i, y_j) · |overlap(i, j)|` over the merge.
fn merge_sum(x: &[f64], y: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    let overlaps = Overlaps::new(x.len(), y.len());
    let total = overlaps.total() as f64;
    let sum: f64 = overlaps
        .map(|o| f(x[o.left], y[o.right]) * o.len as f64)
        .sum();
    sum / total
}

/// Inner product on raw slices; both must be non-empty.
pub fn stp_inner_slices(x: &[f64], y: &[f64]) -> f64 {
    merge_sum(x, y, |a, b| a * b)
}

/// STP inner product `(1/t)⟨x ⊗ 1_{t/m}, y ⊗ 1_{t/n}⟩`, computed in O(m + n).
pub fn stp_inner(x: &XVector, y: &XVector) -> f64 {
    stp_inner_slices(x.entries(), y.entries())
}

pub fn xnorm(x: &XVector) -> f64 {
    // The self-overlap is the diagonal, so this is the root mean square.
    let m = x.dim() as f64;
    (x.entries().iter().map(|v| v * v).sum::<f64>() / m).sqrt()
}

/// `‖x − y‖` without materializing `x − y`.
pub fn xdist(x: &XVector, y: &XVector) -> f64 {
    merge_sum(x.entries(), y.entries(), |a, b| (a - b) * (a - b))
        .max(0.0)
        .sqrt()
}

pub fn equivalent(x: &XVector, y: &XVector) -> bool {
    equivalent_with_tol(x, y, DEFAULT_TOLERANCE)
}

/// True iff the two lcm-stretched vectors agree entrywise within `tol`.
pub fn equivalent_with_tol(x: &XVector, y: &XVector, tol: f64) -> bool {
    let (a, b) = (x.entries(), y.entries());
    Overlaps::new(a.len(), b.len()).all(|o| (a[o.left] - b[o.right]).abs() <= tol)
}

/// An element of Ω = R^∞ / ↔, held by its unique shortest representative.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivClass {
    canonical: XVector,
}

impl EquivClass {
    pub fn canonical(&self) -> &XVector {
        &self.canonical
    }

    pub fn contains(&self, x: &XVector) -> bool {
        equivalent(&self.canonical, x)
    }
}

/// Shortest representative of the class of `x`.
///
/// Divisors of `x.dim()` are tried in increasing order; for a candidate
/// length `p` the vector must consist of `p` constant runs of length
/// `dim / p`, compared with exact equality.
pub fn canonicalize(x: &XVector) -> EquivClass {
    let dim = x.dim();
    let v = x.entries();
    let p = (1..=dim)
        .filter(|p| dim.is_multiple_of(*p))
        .find(|&p| {
            let run = dim / p;
            v.chunks(run).all(|c| c.iter().all(|&e| e == c[0]))
        })
        .unwrap_or(dim);
    let run = dim / p;
    let canonical = XVector(v.iter().step_by(run).copied().collect());
    EquivClass { canonical }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xv(v: &[f64]) -> XVector {
        XVector::from_slice(v)
    }

    /// Literal Kronecker expansion; independent of the merge.
    fn expanded_inner(x: &[f64], y: &[f64]) -> f64 {
        let t = lcm(x.len(), y.len()).unwrap();
        let ex: Vec<f64> = x.iter().flat_map(|&v| vec![v; t / x.len()]).collect();
        let ey: Vec<f64> = y.iter().flat_map(|&v| vec![v; t / y.len()]).collect();
        ex.iter().zip(&ey).map(|(a, b)| a * b).sum::<f64>() / t as f64
    }

    #[test]
    fn rejects_bad_vectors() {
        assert_eq!(XVector::new(vec![]), Err(StpError::EmptyVector));
        assert!(matches!(
            XVector::new(vec![1.0, f64::NAN]),
            Err(StpError::NonFinite { index: 1, .. })
        ));
        assert!(XVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn stretch_examples() {
        assert_eq!(stretch(&xv(&[1., 2.]), 1).unwrap(), xv(&[1., 2.]));
        assert_eq!(
            stretch(&xv(&[1., 2.]), 3).unwrap(),
            xv(&[1., 1., 1., 2., 2., 2.])
        );
        assert_eq!(
            stretch(&xv(&[-2., 1., 1.]), 4).unwrap(),
            xv(&[-2., -2., -2., -2., 1., 1., 1., 1., 1., 1., 1., 1.])
        );
        assert_eq!(stretch(&xv(&[1.]), 0), Err(StpError::ZeroMultiplicity));
    }

    #[test]
    fn vadd_vsub_examples() {
        assert_eq!(vadd(&xv(&[1., 2.]), &xv(&[0.])).unwrap(), xv(&[1., 2.]));
        assert_eq!(
            vadd(&xv(&[1., 2.]), &xv(&[1., 1., 1.])).unwrap(),
            xv(&[2., 2., 2., 3., 3., 3.])
        );
        assert_eq!(
            vsub(&xv(&[1., 1.]), &xv(&[1., 1., 1., 1.])).unwrap(),
            xv(&[0., 0., 0., 0.])
        );
    }

    #[test]
    fn lcm_overflow_is_reported() {
        let big = usize::MAX / 2 + 1;
        assert!(matches!(lcm(big, 3), Err(StpError::LcmOverflow { .. })));
        assert_eq!(lcm(4, 6).unwrap(), 12);
    }

    #[test]
    fn inner_examples() {
        assert!((stp_inner(&xv(&[1.]), &xv(&[1., 0.6, 0.4, 1.5])) - 0.875).abs() < 1e-12);
        assert!((stp_inner(&xv(&[1., 2.]), &xv(&[3., 4.])) - 5.5).abs() < 1e-12);
        assert!((stp_inner(&xv(&[-2., 1., 1.]), &xv(&[1., 0.6, 0.4, 1.5])) + 0.025).abs() < 1e-12);
    }

    #[test]
    fn merge_never_forms_huge_lcm() {
        // lcm(2^31-1, 2^31-3) is far beyond anything that could be expanded.
        let overlaps = Overlaps::new(2_147_483_647, 2_147_483_645);
        assert_eq!(overlaps.total(), 2_147_483_647u128 * 2_147_483_645);
        let o = Overlaps::new(3, 4).collect::<Vec<_>>();
        let lens: Vec<u128> = o.iter().map(|o| o.len).collect();
        assert_eq!(lens, vec![3, 1, 2, 2, 1, 3]);
        assert_eq!(o.iter().map(|o| o.len).sum::<u128>(), 12);
    }

    #[test]
    fn norm_and_distance_examples() {
        assert!((xnorm(&xv(&[-3., -3., -3.])) - 3.).abs() < 1e-12);
        assert!((xnorm(&xv(&[1., 2.])) - 2.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(xnorm(&xv(&[0.])), 0.);
        assert_eq!(xdist(&xv(&[1., 2.]), &xv(&[1., 2.])), 0.);
        assert_eq!(xdist(&xv(&[1., 2.]), &xv(&[1., 1., 2., 2.])), 0.);
        assert!((xdist(&xv(&[1., 0.]), &xv(&[0., 1.])) - 1.).abs() < 1e-12);
    }

    #[test]
    fn equivalence_examples() {
        assert!(equivalent(&xv(&[1., 2.]), &xv(&[1., 1., 2., 2.])));
        assert!(!equivalent(&xv(&[1., 2.]), &xv(&[2., 1.])));
        assert!(equivalent(&xv(&[3.]), &xv(&[3., 3., 3.])));
        assert!(!equivalent_with_tol(&xv(&[1.]), &xv(&[1.001]), 1e-9));
        assert!(equivalent_with_tol(&xv(&[1.]), &xv(&[1.001]), 1e-2));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(
            canonicalize(&xv(&[1., 1., 2., 2.])).canonical(),
            &xv(&[1., 2.])
        );
        assert_eq!(
            canonicalize(&xv(&[1., 2., 3.])).canonical(),
            &xv(&[1., 2., 3.])
        );
        assert_eq!(canonicalize(&xv(&[5., 5., 5., 5.])).canonical(), &xv(&[5.]));
        // (1,2,1,2) is periodic but not a stretch; it is its own representative.
        assert_eq!(canonicalize(&xv(&[1., 2., 1., 2.])).canonical().dim(), 4);
        assert!(canonicalize(&xv(&[7., 7., 8., 8., 9., 9.])).contains(&xv(&[7., 8., 9.])));
    }

    fn vec_strategy() -> impl Strategy<Value = XVector> {
        prop::collection::vec(-10.0f64..10.0, 1..=12).prop_map(|v| XVector::from_slice(&v))
    }

    proptest! {
        #[test]
        fn merge_matches_expansion(x in vec_strategy(), y in vec_strategy()) {
            let a = stp_inner(&x, &y);
            let b = expanded_inner(x.entries(), y.entries());
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }

        #[test]
        fn representative_independence(x in vec_strategy(), y in vec_strategy(), k in 1usize..5, j in 1usize..5) {
            let xs = stretch(&x, k).unwrap();
            let ys = stretch(&y, j).unwrap();
            prop_assert!((stp_inner(&xs, &ys) - stp_inner(&x, &y)).abs() <= 1e-10);
            prop_assert!((xdist(&xs, &ys) - xdist(&x, &y)).abs() <= 1e-9);
            prop_assert!(equivalent(&vadd(&xs, &y).unwrap(), &vadd(&x, &y).unwrap()));
        }

        #[test]
        fn symmetric_and_cauchy_schwarz(x in vec_strategy(), y in vec_strategy()) {
            prop_assert!((stp_inner(&x, &y) - stp_inner(&y, &x)).abs() <= 1e-12);
            prop_assert!(stp_inner(&x, &y).abs() <= xnorm(&x) * xnorm(&y) + 1e-12);
        }

        #[test]
        fn distance_is_norm_of_difference(x in vec_strategy(), y in vec_strategy()) {
            let d = xnorm(&vsub(&x, &y).unwrap());
            prop_assert!((xdist(&x, &y) - d).abs() <= 1e-9);
        }

        #[test]
        fn canonicalize_idempotent(x in vec_strategy(), k in 1usize..4) {
            let xs = stretch(&x, k).unwrap();
            let c = canonicalize(&xs);
            let again = canonicalize(c.canonical());
            prop_assert_eq!(again.canonical(), c.canonical());
            prop_assert!(equivalent(c.canonical(), &xs));
            prop_assert_eq!(xs.dim() % c.canonical().dim(), 0);
            prop_assert!(c.canonical().dim() <= x.dim());
        }
    }
}
