//! Exhaustive minimisation over subsets encoded as `u32` bitmasks.

use rayon::prelude::*;

use crate::scalar::Scalar;

/// Largest state space enumerated exhaustively.
pub const MAX_ENUMERATION: usize = 24;

const CHUNK_BITS: u32 = 12;

/// A ground set with measure `pi`, internal pairs, and per-state mass that
/// always crosses the boundary (jumps to states outside the ground set).
pub(crate) struct SetSystem<S> {
    pub pi: Vec<S>,
    pub edges: Vec<(usize, usize, S)>,
    pub boundary: Vec<S>,
    pub killing: Vec<S>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Best<S> {
    pub value: S,
    pub mask: u32,
}

impl<S: Scalar> Best<S> {
    fn none() -> Self {
        Self {
            value: S::infinity(),
            mask: 0,
        }
    }

    /// Smaller value wins; equal values keep the smaller mask. This is
    /// associative, so chunked evaluation matches a sequential scan.
    fn offer(&mut self, value: S, mask: u32) {
        if value < self.value || (value == self.value && mask < self.mask && self.mask != 0) {
            self.value = value;
            self.mask = mask;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        if other.mask != 0 {
            self.offer(other.value, other.mask);
        }
        self
    }
}

/// Minima of the four set functionals over the ground set.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Minima<S> {
    /// `(cut + K(A)) / π(A)` over nonempty `A`, the full set included.
    pub h: Best<S>,
    /// `cut / (π(A) π(Aᶜ))` over proper nonempty `A`.
    pub k: Best<S>,
    /// `cut / π(A)` over proper `A` with `π(A) ≤ 1/2`.
    pub k_prime: Best<S>,
    /// `cut / (π(A) ∧ π(Aᶜ))` over proper nonempty `A`.
    pub k_prime_wedge: Best<S>,
}

impl<S: Scalar> Minima<S> {
    fn none() -> Self {
        Self {
            h: Best::none(),
            k: Best::none(),
            k_prime: Best::none(),
            k_prime_wedge: Best::none(),
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            h: self.h.merge(other.h),
            k: self.k.merge(other.k),
            k_prime: self.k_prime.merge(other.k_prime),
            k_prime_wedge: self.k_prime_wedge.merge(other.k_prime_wedge),
        }
    }
}

impl<S: Scalar> SetSystem<S> {
    pub fn n(&self) -> usize {
        self.pi.len()
    }

    fn scan(&self, lo: u32, hi: u32) -> Minima<S> {
        let n = self.n();
        let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let half = S::of(0.5);
        let mut out = Minima::none();
        for mask in lo.max(1)..hi {
            let mut inside = S::zero();
            let mut outside = S::zero();
            let mut kill = S::zero();
            let mut cut = S::zero();
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    inside += self.pi[i];
                    kill += self.killing[i];
                    cut += self.boundary[i];
                } else {
                    outside += self.pi[i];
                }
            }
            for &(i, j, w) in &self.edges {
                if (mask >> i & 1) != (mask >> j & 1) {
                    cut += w;
                }
            }
            out.h.offer((cut + kill) / inside, mask);
            if mask == full {
                continue;
            }
            out.k.offer(cut / (inside * outside), mask);
            if inside <= half {
                out.k_prime.offer(cut / inside, mask);
            }
            let small = if inside < outside { inside } else { outside };
            out.k_prime_wedge.offer(cut / small, mask);
        }
        out
    }

    /// Exhaustive minima, evaluated in parallel over fixed bitmask chunks.
    pub fn minima(&self) -> Minima<S> {
        let n = self.n();
        assert!(n <= MAX_ENUMERATION, "enumeration over {n} states");
        let end: u32 = 1u32 << n;
        let chunk = 1u32 << CHUNK_BITS;
        let chunks = end.div_ceil(chunk);
        let parts: Vec<Minima<S>> = (0..chunks)
            .into_par_iter()
            .map(|c| self.scan(c * chunk, ((c + 1) * chunk).min(end)))
            .collect();
        parts.into_iter().fold(Minima::none(), Minima::merge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SetSystem<f64> {
        let w = 1.0 / 3.0;
        SetSystem {
            pi: vec![w; 3],
            edges: vec![(0, 1, w), (1, 2, w)],
            boundary: vec![0.0; 3],
            killing: vec![0.0; 3],
        }
    }

    #[test]
    fn path_prefix_witness() {
        let m = path3().minima();
        assert_eq!(m.k_prime.mask, 0b001);
        assert!((m.k_prime.value - 1.0).abs() < 1e-15);
        assert!((m.k_prime.value - m.k_prime_wedge.value).abs() < 1e-15);
        assert_eq!(m.h.value, 0.0);
        assert_eq!(m.h.mask, 0b111);
    }

    #[test]
    fn chunked_equals_sequential() {
        let n = 14;
        let sys = SetSystem {
            pi: vec![1.0 / n as f64; n],
            edges: (0..n).map(|i| (i, (i + 1) % n, 0.1)).collect(),
            boundary: vec![0.0; n],
            killing: vec![0.0; n],
        };
        let par = sys.minima();
        let seq = sys.scan(1, 1 << n);
        assert_eq!(par.k.mask, seq.k.mask);
        assert_eq!(par.k_prime.mask, seq.k_prime.mask);
        assert_eq!(par.k.value, seq.k.value);
    }
}
