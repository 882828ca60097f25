//! Small CSS codes with explicit encoders and lookup-table decoders.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::circuits::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{ops, Ensemble, RegisterShape, StateVector, C64};
use crate::tolerances::EQ_TOL;

/// Brute-force distance certification is limited to this many qubits.
pub const BRUTE_FORCE_MAX_N: usize = 10;

/// A qubit CSS code. Supports are lists of qubits; an X-type generator acts as
/// `X` on its support and detects `Z` errors, and vice versa.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub q: usize,
    pub x_stabilizers: Vec<Vec<usize>>,
    pub z_stabilizers: Vec<Vec<usize>>,
    pub logical_x: Vec<Vec<usize>>,
    pub logical_z: Vec<Vec<usize>>,
    /// Maps `|ψ⟩|0^{n−k}⟩` to the encoded state; the message sits on sites `0..k`.
    pub encoder: Circuit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliKind {
    X,
    Z,
}

fn mask(support: &[usize]) -> u64 {
    support.iter().fold(0u64, |m, &s| m | (1 << s))
}

fn parity(x: u64) -> usize {
    (x.count_ones() & 1) as usize
}

impl CssCode {
    /// The [[7,1,3]] Steane code. The encoder uses three Hadamards and nine
    /// CNOTs; codewords of `|0⟩` are the even-weight Hamming codewords.
    pub fn steane7() -> Self {
        let mut gates = vec![Gate::h(1), Gate::h(2), Gate::h(3)];
        for (c, t) in [(1, 4), (2, 4), (4, 0), (3, 4), (0, 5), (4, 5), (5, 6), (1, 5), (2, 6)] {
            gates.push(Gate::cnot(c, t));
        }
        let encoder = Circuit::with_gates(RegisterShape::qubits(7), 1, gates).expect("valid encoder");
        let checks = vec![vec![0, 1, 4, 5], vec![0, 2, 4, 6], vec![3, 4, 5, 6]];
        Self {
            name: "steane7".into(),
            n: 7,
            k: 1,
            d: 3,
            q: 2,
            x_stabilizers: checks.clone(),
            z_stabilizers: checks,
            logical_x: vec![vec![0, 5, 6]],
            logical_z: vec![vec![0, 5, 6]],
            encoder,
        }
    }

    /// The [[4,2,2]] code with stabilizers `XXXX` and `ZZZZ`.
    pub fn code422() -> Self {
        let mut gates = vec![Gate::h(3)];
        for (c, t) in [(3, 2), (1, 2), (1, 0), (3, 0), (0, 1)] {
            gates.push(Gate::cnot(c, t));
        }
        let encoder = Circuit::with_gates(RegisterShape::qubits(4), 2, gates).expect("valid encoder");
        Self {
            name: "code422".into(),
            n: 4,
            k: 2,
            d: 2,
            q: 2,
            x_stabilizers: vec![vec![0, 1, 2, 3]],
            z_stabilizers: vec![vec![0, 1, 2, 3]],
            logical_x: vec![vec![0, 1], vec![0, 2]],
            logical_z: vec![vec![1, 3], vec![2, 3]],
            encoder,
        }
    }

    /// `k` bare qubits with no checks; the encoder is a single labeled identity.
    pub fn identity(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("identity code needs k ≥ 1".into()));
        }
        let encoder = Circuit::with_gates(RegisterShape::qubits(k), k, vec![Gate::identity(0, 2)])?;
        Ok(Self {
            name: format!("identity{k}"),
            n: k,
            k,
            d: 1,
            q: 2,
            x_stabilizers: Vec::new(),
            z_stabilizers: Vec::new(),
            logical_x: (0..k).map(|i| vec![i]).collect(),
            logical_z: (0..k).map(|i| vec![i]).collect(),
            encoder,
        })
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "steane7" | "steane" => Ok(Self::steane7()),
            "code422" | "422" => Ok(Self::code422()),
            _ => match name.strip_prefix("identity").map(str::parse::<usize>) {
                Some(Ok(k)) => Self::identity(k),
                _ => Err(Error::InvalidParameter(format!("unknown inner code {name:?}"))),
            },
        }
    }

    pub fn encoder_len(&self) -> usize {
        self.encoder.len()
    }

    /// Number of errors the lookup decoder is guaranteed to correct.
    pub fn correctable(&self) -> usize {
        self.d.saturating_sub(1) / 2
    }

    fn stabilizers(&self, kind: PauliKind) -> &[Vec<usize>] {
        match kind {
            PauliKind::X => &self.x_stabilizers,
            PauliKind::Z => &self.z_stabilizers,
        }
    }

    /// Every X-type generator overlaps every Z-type generator on an even set.
    pub fn stabilizers_commute(&self) -> bool {
        self.x_stabilizers.iter().all(|x| self.z_stabilizers.iter().all(|z| parity(mask(x) & mask(z)) == 0))
    }

    /// Largest deviation of `⟨S⟩` from 1 over all generators and all
    /// computational-basis messages.
    pub fn encoder_stabilizer_error(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..(1usize << self.k) {
            let w = StateVector::basis(RegisterShape::qubits(self.k), i);
            let enc = self.encoder.apply(&self.encoder.input_state(&w)?)?;
            for kind in [PauliKind::X, PauliKind::Z] {
                for s in self.stabilizers(kind) {
                    let v = pauli_expectation(&enc, kind, s)?;
                    worst = worst.max((v - 1.0).abs());
                }
            }
        }
        Ok(worst)
    }

    fn check_mask(&self, kind: PauliKind) -> Vec<u64> {
        self.stabilizers(kind).iter().map(|s| mask(s)).collect()
    }

    /// Syndrome of an error of the opposite type measured by `kind` checks.
    fn syndrome(checks: &[u64], e: u64) -> usize {
        checks.iter().enumerate().fold(0, |s, (i, &c)| s | (parity(c & e) << i))
    }

    fn in_span(gens: &[u64], v: u64) -> bool {
        let mut basis: Vec<u64> = Vec::new();
        for &g in gens {
            let mut x = g;
            for &b in &basis {
                x = x.min(x ^ b);
            }
            if x != 0 {
                basis.push(x);
            }
        }
        let mut x = v;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        x == 0
    }

    /// Smallest weight of an undetected, nontrivial error of type `kind`
    /// (X errors are checked by Z stabilizers and compared to the X span).
    fn type_distance(&self, kind: PauliKind) -> Option<usize> {
        let (checks, span) = match kind {
            PauliKind::X => (self.check_mask(PauliKind::Z), self.check_mask(PauliKind::X)),
            PauliKind::Z => (self.check_mask(PauliKind::X), self.check_mask(PauliKind::Z)),
        };
        (1u64..(1 << self.n))
            .filter(|&e| Self::syndrome(&checks, e) == 0 && !Self::in_span(&span, e))
            .map(|e| e.count_ones() as usize)
            .min()
    }

    /// Minimum distance by exhaustive search, for `n ≤ 10`.
    pub fn brute_force_distance(&self) -> Result<usize> {
        if self.n > BRUTE_FORCE_MAX_N {
            return Err(Error::InvalidParameter(format!("brute-force distance is limited to n ≤ {BRUTE_FORCE_MAX_N}")));
        }
        let dx = self.type_distance(PauliKind::X);
        let dz = self.type_distance(PauliKind::Z);
        Ok(match (dx, dz) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => self.n + 1,
        })
    }

    /// Whether the Pauli `X^x Z^z` (bit masks) is detected by some generator or
    /// acts as a stabilizer.
    pub fn detects(&self, x: u64, z: u64) -> bool {
        let sx = Self::syndrome(&self.check_mask(PauliKind::Z), x);
        let sz = Self::syndrome(&self.check_mask(PauliKind::X), z);
        if sx != 0 || sz != 0 {
            return true;
        }
        Self::in_span(&self.check_mask(PauliKind::X), x) && Self::in_span(&self.check_mask(PauliKind::Z), z)
    }

    /// Minimum-weight correction for each syndrome of errors of type `kind`.
    pub fn lookup_table(&self, kind: PauliKind) -> BTreeMap<usize, u64> {
        let checks = match kind {
            PauliKind::X => self.check_mask(PauliKind::Z),
            PauliKind::Z => self.check_mask(PauliKind::X),
        };
        let mut errors: Vec<u64> = (0u64..(1 << self.n)).collect();
        errors.sort_by_key(|e| (e.count_ones(), *e));
        let mut table = BTreeMap::new();
        for e in errors {
            table.entry(Self::syndrome(&checks, e)).or_insert(e);
        }
        table
    }

    /// Measures every generator and applies the lookup correction, acting on
    /// the code sites `offset..offset+n` of a qubit register. Each syndrome
    /// outcome becomes a separate ensemble member.
    pub fn correct(&self, e: &Ensemble, offset: usize) -> Result<Ensemble> {
        let total = e.shape.len();
        if offset + self.n > total || e.shape.dims().iter().any(|&d| d != 2) {
            return Err(Error::ShapeMismatch("code sites must be qubits inside the register".into()));
        }
        let sites: Vec<usize> = (offset..offset + self.n).collect();
        // Bit position of code qubit j inside a basis index.
        let shift = |j: usize| total - 1 - (offset + j);
        let lift =
            |local: u64| -> usize { (0..self.n).filter(|&j| local >> j & 1 == 1).fold(0usize, |m, j| m | (1 << shift(j))) };
        let restrict =
            |index: usize| -> u64 { (0..self.n).filter(|&j| index >> shift(j) & 1 == 1).fold(0u64, |m, j| m | (1 << j)) };
        let hadamard = Gate::h(0).unitary;
        let mut members = e.members.clone();
        for kind in [PauliKind::X, PauliKind::Z] {
            let checks = match kind {
                PauliKind::X => self.check_mask(PauliKind::Z),
                PauliKind::Z => self.check_mask(PauliKind::X),
            };
            if checks.is_empty() {
                continue;
            }
            let table = self.lookup_table(kind);
            if kind == PauliKind::Z {
                members = conjugate_all(&e.shape, &sites, &hadamard, members)?;
            }
            let mut next = Vec::with_capacity(members.len());
            for v in &members {
                let mut parts: BTreeMap<usize, DVector<C64>> = BTreeMap::new();
                for (i, &a) in v.iter().enumerate() {
                    if a == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let s = Self::syndrome(&checks, restrict(i));
                    let flip = lift(table[&s]);
                    parts.entry(s).or_insert_with(|| DVector::zeros(v.len()))[i ^ flip] += a;
                }
                next.extend(parts.into_values().filter(|p| p.norm_squared() > 1e-30));
            }
            members = next;
            if kind == PauliKind::Z {
                members = conjugate_all(&e.shape, &sites, &hadamard, members)?;
            }
        }
        Ok(Ensemble { shape: e.shape.clone(), members })
    }
}

fn conjugate_all(
    shape: &RegisterShape,
    sites: &[usize],
    u: &DMatrix<C64>,
    members: Vec<DVector<C64>>,
) -> Result<Vec<DVector<C64>>> {
    let idx: Vec<ops::LocalIndexer> = sites.iter().map(|&s| ops::LocalIndexer::new(shape, &[s])).collect::<Result<_>>()?;
    Ok(members
        .into_iter()
        .map(|mut v| {
            for ix in &idx {
                v = ops::apply_with_indexer(ix, u, &v);
            }
            v
        })
        .collect())
}

/// `⟨ψ|P|ψ⟩` for `P` the tensor power of `X` or `Z` on `support`.
pub fn pauli_expectation(state: &StateVector, kind: PauliKind, support: &[usize]) -> Result<f64> {
    let single = match kind {
        PauliKind::X => Gate::x(0).unitary,
        PauliKind::Z => Gate::z(0).unitary,
    };
    let mut v = state.clone();
    for &s in support {
        v = v.apply_local(&[s], &single)?;
    }
    let e = state.inner(&v);
    if e.im.abs() > EQ_TOL {
        return Err(Error::InvalidParameter("Pauli expectation is not real".into()));
    }
    Ok(e.re)
}
