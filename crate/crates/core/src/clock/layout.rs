//! Unary and k-dimensional clock registers.
//!
//! A k-dimensional clock for times `0..=T` uses base `d = ⌈T^{1/k}⌉ + 1` and
//! k registers `R_1 … R_k` of `d − 1` qubits each. Register `R_i` holds a
//! value `c_i ∈ {0, …, d−1}` written in unary: qubit `R_i(s)` is `|1⟩` iff
//! `s ≤ c_i`. The register values run through the base-d digits of `t` in
//! reflected (boustrophedon) order, so consecutive times differ in exactly one
//! register by ±1 and every transition flips a single qubit.
//!
//! Within a register the qubits are laid out like a unary clock written
//! `|0^{d−1−c} 1^c⟩`: position `s` sits at offset `d − 1 − s`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{BasisState, RegisterShape};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ClockLayout {
    pub k: usize,
    pub t_max: usize,
    pub base: usize,
}

/// Everything known about one clock reading.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClockLabel {
    pub k: usize,
    pub t: usize,
    pub t_max: usize,
    pub base: usize,
    /// Base-d digits `a_1 … a_k` with `t = Σ a_i d^{i−1}`.
    pub digits: Vec<usize>,
    /// Values actually stored in `R_1 … R_k`.
    pub register_values: Vec<usize>,
}

/// How register `register` moves on the step into time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub register: usize,
    pub from: usize,
    pub to: usize,
}

/// Smallest `b` with `b^k ≥ t`.
pub fn ceil_root(t: usize, k: usize) -> usize {
    let mut b = (t as f64).powf(1.0 / k as f64).floor() as usize;
    b = b.saturating_sub(1);
    while pow_sat(b, k) < t {
        b += 1;
    }
    b
}

fn pow_sat(b: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, _| acc.saturating_mul(b))
}

impl ClockLayout {
    pub fn new(k: usize, t_max: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("clock dimension k must be at least 1".into()));
        }
        let base = ceil_root(t_max, k) + 1;
        Ok(Self { k, t_max, base })
    }

    pub fn unary(t_max: usize) -> Self {
        Self { k: 1, t_max, base: t_max + 1 }
    }

    /// Qubits per register, `d − 1`.
    pub fn register_len(&self) -> usize {
        self.base - 1
    }

    pub fn num_sites(&self) -> usize {
        self.k * self.register_len()
    }

    pub fn shape(&self) -> RegisterShape {
        RegisterShape::qubits(self.num_sites())
    }

    /// Number of distinct register configurations, `d^k` (saturating).
    pub fn capacity(&self) -> usize {
        pow_sat(self.base, self.k)
    }

    fn check(&self, t: usize) -> Result<()> {
        if t > self.t_max {
            return Err(Error::TimeOutOfRange { t, max: self.t_max });
        }
        Ok(())
    }

    pub fn digits(&self, t: usize) -> Vec<usize> {
        let mut rem = t;
        (0..self.k)
            .map(|_| {
                let a = rem % self.base;
                rem /= self.base;
                a
            })
            .collect()
    }

    /// Reflected register values for any `t < d^k`.
    pub fn register_values_unchecked(&self, t: usize) -> Vec<usize> {
        let d = self.base;
        let mut out = Vec::with_capacity(self.k);
        let mut rest = t;
        for _ in 0..self.k {
            let a = rest % d;
            rest /= d;
            out.push(if rest.is_multiple_of(2) { a } else { d - 1 - a });
        }
        out
    }

    pub fn register_values(&self, t: usize) -> Result<Vec<usize>> {
        self.check(t)?;
        Ok(self.register_values_unchecked(t))
    }

    /// Inverse of [`ClockLayout::register_values_unchecked`].
    pub fn time_of_values(&self, values: &[usize]) -> usize {
        let d = self.base;
        let mut t = 0usize;
        for &c in values.iter().rev() {
            let a = if t.is_multiple_of(2) { c } else { d - 1 - c };
            t = t * d + a;
        }
        t
    }

    pub fn label(&self, t: usize) -> Result<ClockLabel> {
        self.check(t)?;
        Ok(ClockLabel {
            k: self.k,
            t,
            t_max: self.t_max,
            base: self.base,
            digits: self.digits(t),
            register_values: self.register_values_unchecked(t),
        })
    }

    /// Site index of `R_i(s)` for register `i ∈ 0..k` and position `s ∈ 1..d`.
    pub fn site(&self, register: usize, position: usize) -> usize {
        debug_assert!(register < self.k && position >= 1 && position < self.base);
        register * self.register_len() + (self.register_len() - position)
    }

    pub fn levels_for_values(&self, values: &[usize]) -> Vec<usize> {
        let mut levels = vec![0; self.num_sites()];
        for (i, &c) in values.iter().enumerate() {
            for s in 1..=c {
                levels[self.site(i, s)] = 1;
            }
        }
        levels
    }

    pub fn levels(&self, t: usize) -> Result<Vec<usize>> {
        Ok(self.levels_for_values(&self.register_values(t)?))
    }

    pub fn basis_state(&self, t: usize) -> Result<BasisState> {
        BasisState::new(self.shape(), self.levels(t)?)
    }

    /// Clock reading as a bit string, site 0 most significant.
    pub fn key(&self, t: usize) -> Result<u128> {
        Ok(levels_to_key(&self.levels(t)?))
    }

    /// Time encoded by a basis key, if it is a legal reading with `t ≤ T`.
    pub fn time_of_key(&self, key: u128) -> Option<usize> {
        let n = self.num_sites();
        let mut values = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let mut c = 0;
            let mut ended = false;
            for s in 1..self.base {
                let bit = (key >> (n - 1 - self.site(i, s))) & 1;
                if bit == 1 {
                    if ended {
                        return None;
                    }
                    c = s;
                } else {
                    ended = true;
                }
            }
            values.push(c);
        }
        let t = self.time_of_values(&values);
        (t <= self.t_max).then_some(t)
    }

    /// The single register change on the step `t − 1 → t`.
    pub fn transition(&self, t: usize) -> Result<Transition> {
        if t == 0 {
            return Err(Error::TimeOutOfRange { t, max: self.t_max });
        }
        self.check(t)?;
        let before = self.register_values_unchecked(t - 1);
        let after = self.register_values_unchecked(t);
        let changed: Vec<usize> = (0..self.k).filter(|&i| before[i] != after[i]).collect();
        debug_assert_eq!(changed.len(), 1);
        let i = changed[0];
        debug_assert_eq!(before[i].abs_diff(after[i]), 1);
        Ok(Transition { register: i, from: before[i], to: after[i] })
    }
}

pub fn levels_to_key(levels: &[usize]) -> u128 {
    assert!(levels.len() <= 128, "clock keys hold at most 128 qubits");
    levels.iter().fold(0u128, |acc, &l| (acc << 1) | l as u128)
}

/// `|0^{T−t} 1^t⟩`.
pub fn unary_state(t: usize, t_max: usize) -> Result<BasisState> {
    ClockLayout::unary(t_max).basis_state(t)
}

/// `|clock_k(t)⟩` for times `0..=T`.
pub fn clock_state(k: usize, t: usize, t_max: usize) -> Result<BasisState> {
    ClockLayout::new(k, t_max)?.basis_state(t)
}
