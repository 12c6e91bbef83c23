//! One-dimensional convolution: finite-support discrete convolution and its
//! flipped and cross-correlation forms, the domain-based convolution, and
//! the padding-free STP convolution of masked sequences.

use std::collections::BTreeMap;

use crate::error::{Axis, Result, StpError};
use crate::grid::window_count;
use crate::xvec::{stp_inner_slices, XVector};

/// A real signal with finite, sorted, non-empty integer support.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSignal {
    support: Vec<i64>,
    values: Vec<f64>,
}

impl FiniteSignal {
    /// Builds from `(index, value)` pairs in any order. Repeated indices are
    /// rejected.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, (n, v)) in pairs.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(StpError::NonFinite { index: i, value: v });
            }
            if map.insert(n, v).is_some() {
                return Err(StpError::CellCount {
                    what: "signal index multiplicity",
                    expected: 1,
                    got: 2,
                });
            }
        }
        Self::from_map(map)
    }

    fn from_map(map: BTreeMap<i64, f64>) -> Result<Self> {
        if map.is_empty() {
            return Err(StpError::ZeroSize {
                what: "signal support",
            });
        }
        let (support, values) = map.into_iter().unzip();
        Ok(FiniteSignal { support, values })
    }

    /// Consecutive samples starting at index `start`.
    pub fn from_values(start: i64, values: &[f64]) -> Result<Self> {
        Self::from_pairs(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (start + i as i64, v)),
        )
    }

    pub fn impulse(at: i64) -> Self {
        FiniteSignal {
            support: vec![at],
            values: vec![1.0],
        }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.support
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn get(&self, n: i64) -> Option<f64> {
        self.support.binary_search(&n).ok().map(|i| self.values[i])
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    /// Largest absolute difference, or `None` when supports differ.
    pub fn max_abs_diff(&self, other: &FiniteSignal) -> Option<f64> {
        (self.support == other.support).then(|| {
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvVariant {
    /// `s(n) = Σ_τ f(τ)·k(n−τ)`
    Convolution,
    /// `s(n) = Σ_τ f(n−τ)·k(τ)`
    Flipped,
    /// `s(n) = Σ_τ f(n+τ)·k(τ)`
    CrossCorrelation,
}

/// Sums over every index pair where both factors are in support. The output
/// support is every `n` that received at least one term, even if the terms
/// cancel.
pub fn discrete_conv1d(f: &FiniteSignal, k: &FiniteSignal, variant: ConvVariant) -> FiniteSignal {
    let mut acc: BTreeMap<i64, f64> = BTreeMap::new();
    match variant {
        ConvVariant::Convolution => {
            for (tau, fv) in f.iter() {
                for (u, kv) in k.iter() {
                    *acc.entry(tau + u).or_default() += fv * kv;
                }
            }
        }
        ConvVariant::Flipped => {
            for (tau, kv) in k.iter() {
                for (u, fv) in f.iter() {
                    *acc.entry(u + tau).or_default() += fv * kv;
                }
            }
        }
        ConvVariant::CrossCorrelation => {
            for (tau, kv) in k.iter() {
                for (u, fv) in f.iter() {
                    *acc.entry(u - tau).or_default() += fv * kv;
                }
            }
        }
    }
    FiniteSignal::from_map(acc).expect("non-empty operands give non-empty output")
}

/// Domain-based convolution `s(n) = Σ_{τ∈D} f(τ)·w(n−τ)` with `D` the
/// support of `f`.
pub fn domain_conv1d(f: &FiniteSignal, w: &FiniteSignal) -> FiniteSignal {
    discrete_conv1d(f, w, ConvVariant::Convolution)
}

/// The same sum taken over the reflected domain:
/// `s(n) = Σ_{τ∈D'} w(τ)·f(n−τ)` with `D' = {τ | n−τ ∈ D}`.
pub fn domain_conv1d_reflected(f: &FiniteSignal, w: &FiniteSignal) -> FiniteSignal {
    let mut outputs: Vec<i64> = f
        .support()
        .iter()
        .flat_map(|d| w.support().iter().map(move |u| d + u))
        .collect();
    outputs.sort_unstable();
    outputs.dedup();
    let map = outputs
        .into_iter()
        .map(|n| {
            let s = w
                .iter()
                .filter_map(|(tau, wv)| f.get(n - tau).map(|fv| wv * fv))
                .sum();
            (n, s)
        })
        .collect();
    FiniteSignal::from_map(map).expect("non-empty operands give non-empty output")
}

/// Window length, stride and per-side padding for 1D STP convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conv1dConfig {
    pub window: usize,
    pub stride: usize,
    pub pad: usize,
}

impl Conv1dConfig {
    pub fn new(window: usize) -> Self {
        Conv1dConfig {
            window,
            stride: 1,
            pad: 0,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_pad(mut self, pad: usize) -> Self {
        self.pad = pad;
        self
    }
}

/// STP convolution of a masked sequence: each window's defined samples, in
/// index order, against the kernel. Padding is undefined. Windows with no
/// defined sample give `None`.
pub fn stp_conv1d(f: &[Option<f64>], k: &XVector, cfg: &Conv1dConfig) -> Result<Vec<Option<f64>>> {
    if cfg.window == 0 {
        return Err(StpError::ZeroSize {
            what: "window length",
        });
    }
    if let Some((index, value)) = f
        .iter()
        .enumerate()
        .find_map(|(i, c)| c.filter(|v| !v.is_finite()).map(|v| (i, v)))
    {
        return Err(StpError::NonFinite { index, value });
    }
    let padded: Vec<Option<f64>> = std::iter::repeat_n(None, cfg.pad)
        .chain(f.iter().copied())
        .chain(std::iter::repeat_n(None, cfg.pad))
        .collect();
    let count = window_count(Axis::Signal, padded.len(), cfg.window, cfg.stride)?;
    Ok((0..count)
        .map(|w| {
            let start = w * cfg.stride;
            let avail: Vec<f64> = padded[start..start + cfg.window]
                .iter()
                .flatten()
                .copied()
                .collect();
            (!avail.is_empty()).then(|| stp_inner_slices(&avail, k.entries()))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(pairs: &[(i64, f64)]) -> FiniteSignal {
        FiniteSignal::from_pairs(pairs.iter().copied()).unwrap()
    }

    /// Double loop straight from the definition, over a bounding index range.
    fn brute_conv(f: &FiniteSignal, k: &FiniteSignal) -> BTreeMap<i64, f64> {
        let lo = f.support()[0] + k.support()[0];
        let hi = f.support().last().unwrap() + k.support().last().unwrap();
        let mut out = BTreeMap::new();
        for n in lo..=hi {
            let mut hit = false;
            let mut s = 0.0;
            for tau in f.support()[0]..=*f.support().last().unwrap() {
                if let (Some(a), Some(b)) = (f.get(tau), k.get(n - tau)) {
                    s += a * b;
                    hit = true;
                }
            }
            if hit {
                out.insert(n, s);
            }
        }
        out
    }

    #[test]
    fn signal_construction() {
        let s = sig(&[(3, 1.0), (-1, 2.0)]);
        assert_eq!(s.support(), &[-1, 3]);
        assert_eq!(s.get(3), Some(1.0));
        assert_eq!(s.get(0), None);
        assert!(FiniteSignal::from_pairs([(1, 1.0), (1, 2.0)]).is_err());
        assert!(FiniteSignal::from_pairs(std::iter::empty()).is_err());
    }

    #[test]
    fn impulse_is_identity() {
        let f = sig(&[(-2, 1.5), (0, -0.25), (4, 3.0)]);
        let out = discrete_conv1d(&f, &FiniteSignal::impulse(0), ConvVariant::Convolution);
        assert_eq!(out, f);
    }

    #[test]
    fn box_with_box() {
        let f = FiniteSignal::from_values(0, &[1., 1.]).unwrap();
        let out = discrete_conv1d(&f, &f, ConvVariant::Convolution);
        assert_eq!(out, FiniteSignal::from_values(0, &[1., 2., 1.]).unwrap());
    }

    #[test]
    fn cross_correlation_reverses_kernel() {
        let f = FiniteSignal::from_values(0, &[1., 2., 3.]).unwrap();
        let k = FiniteSignal::from_values(0, &[1., -1.]).unwrap();
        let out = discrete_conv1d(&f, &k, ConvVariant::CrossCorrelation);
        // s(n) = f(n) − f(n+1)
        assert_eq!(out, sig(&[(-1, -1.), (0, -1.), (1, -1.), (2, 3.)]));
    }

    #[test]
    fn support_keeps_cancelling_terms() {
        let f = FiniteSignal::from_values(0, &[1., -1.]).unwrap();
        let k = FiniteSignal::from_values(0, &[1., 1.]).unwrap();
        let out = discrete_conv1d(&f, &k, ConvVariant::Convolution);
        assert_eq!(out.support(), &[0, 1, 2]);
        assert_eq!(out.get(1), Some(0.0));
    }

    #[test]
    fn domain_singleton() {
        let f = sig(&[(0, 2.0)]);
        let w = sig(&[(-1, 1.0), (2, 3.0)]);
        assert_eq!(domain_conv1d(&f, &w), sig(&[(-1, 2.0), (2, 6.0)]));
    }

    #[test]
    fn domain_matches_brute_force() {
        let f = sig(&[(0, 0.7), (2, -1.3), (3, 2.1)]);
        let w = sig(&[(-1, 0.4), (0, 1.1), (1, -0.6), (5, 2.0)]);
        let out = domain_conv1d(&f, &w);
        let brute = brute_conv(&f, &w);
        assert_eq!(
            out.support(),
            brute.keys().copied().collect::<Vec<_>>().as_slice()
        );
        for (n, v) in out.iter() {
            assert!((v - brute[&n]).abs() < 1e-12);
        }
    }

    #[test]
    fn stp1d_examples() {
        let k = XVector::from_slice(&[1., 0.6, 0.4, 1.5]);
        let out = stp_conv1d(&[Some(1.0)], &k, &Conv1dConfig::new(1)).unwrap();
        assert!((out[0].unwrap() - 0.875).abs() < 1e-12);

        let f: Vec<Option<f64>> = [1., -2., 3., 0.5, 2.].iter().map(|&v| Some(v)).collect();
        let out = stp_conv1d(&f, &k, &Conv1dConfig::new(4)).unwrap();
        for (w, v) in out.iter().enumerate() {
            let dot: f64 = (0..4).map(|i| f[w + i].unwrap() * k.entries()[i]).sum();
            assert!((v.unwrap() - dot / 4.0).abs() < 1e-12);
        }

        let out = stp_conv1d(&[None, None], &k, &Conv1dConfig::new(2)).unwrap();
        assert_eq!(out, vec![None]);
        assert!(matches!(
            stp_conv1d(&f, &k, &Conv1dConfig::new(2).with_stride(2)),
            Err(StpError::StrideMismatch { .. })
        ));
    }

    #[test]
    fn stp1d_masked_sample_is_compressed_out() {
        let k = XVector::from_slice(&[0.5, -1.0, 2.0]);
        let f = [Some(1.0), None, Some(3.0), Some(-2.0)];
        let single = stp_conv1d(&f, &k, &Conv1dConfig::new(4)).unwrap();
        let compressed = stp_conv1d(
            &[Some(1.0), Some(3.0), Some(-2.0)],
            &k,
            &Conv1dConfig::new(3),
        )
        .unwrap();
        assert_eq!(single, compressed);
    }

    fn signal_strategy() -> impl Strategy<Value = FiniteSignal> {
        prop::collection::btree_map(-6i64..6, -5.0f64..5.0, 1..6)
            .prop_map(|m| FiniteSignal::from_pairs(m).unwrap())
    }

    proptest! {
        #[test]
        fn conv_matches_brute(f in signal_strategy(), k in signal_strategy()) {
            let out = discrete_conv1d(&f, &k, ConvVariant::Convolution);
            let brute = brute_conv(&f, &k);
            prop_assert_eq!(out.support().len(), brute.len());
            for (n, v) in out.iter() {
                prop_assert!((v - brute[&n]).abs() < 1e-12);
            }
        }

        #[test]
        fn flipped_equals_convolution(f in signal_strategy(), k in signal_strategy()) {
            let a = discrete_conv1d(&f, &k, ConvVariant::Convolution);
            let b = discrete_conv1d(&f, &k, ConvVariant::Flipped);
            prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        }

        #[test]
        fn reflected_domain_identity(f in signal_strategy(), w in signal_strategy()) {
            let a = domain_conv1d(&f, &w);
            let b = domain_conv1d_reflected(&f, &w);
            prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        }

        #[test]
        fn young_inequality(f in signal_strategy(), w in signal_strategy()) {
            let s = domain_conv1d(&f, &w);
            prop_assert!(s.l1_norm() <= f.l1_norm() * w.l1_norm() + 1e-12);
        }
    }
}
