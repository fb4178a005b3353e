//! Phase-exact n-qubit Pauli strings.
//!
//! A Pauli operator is stored in symplectic form `i^phase · X^x · Z^z`, where
//! `x` and `z` are bit masks over the qubits and `phase` is an exponent of the
//! imaginary unit modulo 4.  Qubit 0 corresponds to the *most significant* bit
//! of the masks, so masks read left-to-right exactly like the string label
//! ("XZ" acts with X on qubit 0 and Z on qubit 1).
//!
//! The Hermitian representative of the support `(x, z)` is
//! `i^{|x∧z|} X^x Z^z` (so that `Y = iXZ`); [`PauliString::hermitian_sign`]
//! reports the ±1 sign of a Hermitian element relative to that representative.

use crate::error::{Error, Result};
use std::fmt;

/// One of the three non-identity single-qubit Pauli axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// All axes in canonical order.
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Symplectic bits `(x, z)` of this axis.
    pub fn bits(self) -> (u64, u64) {
        match self {
            Axis::X => (1, 0),
            Axis::Y => (1, 1),
            Axis::Z => (0, 1),
        }
    }

    /// Axis from single-qubit symplectic bits; `None` for the identity.
    pub fn from_bits(x: u64, z: u64) -> Option<Axis> {
        match (x & 1, z & 1) {
            (1, 0) => Some(Axis::X),
            (1, 1) => Some(Axis::Y),
            (0, 1) => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn label(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// A phased n-qubit Pauli operator `i^phase · X^x · Z^z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    /// Exponent of `i`, modulo 4.
    phase: u8,
}

impl PauliString {
    /// Largest supported qubit count (masks are single `u64` words and basis
    /// indices pack both masks into one `usize`).
    pub const MAX_QUBITS: usize = 31;

    fn check_n(n: usize) -> Result<()> {
        if n == 0 || n > Self::MAX_QUBITS {
            return Err(Error::InvalidParameter(format!(
                "qubit count must be in 1..={}, got {n}",
                Self::MAX_QUBITS
            )));
        }
        Ok(())
    }

    /// The identity operator on `n` qubits.
    pub fn identity(n: usize) -> Self {
        Self { n, x: 0, z: 0, phase: 0 }
    }

    /// Build from raw symplectic data. `phase` is reduced modulo 4 and masks
    /// are truncated to `n` bits.
    pub fn from_parts(n: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        Self::check_n(n)?;
        let mask = Self::full_mask(n);
        Ok(Self { n, x: x & mask, z: z & mask, phase: phase & 3 })
    }

    /// The Hermitian representative `i^{|x∧z|} X^x Z^z` of a support.
    pub fn hermitian(n: usize, x: u64, z: u64) -> Result<Self> {
        let mut p = Self::from_parts(n, x, z, 0)?;
        p.phase = ((p.x & p.z).count_ones() & 3) as u8;
        Ok(p)
    }

    /// The Hermitian single-qubit Pauli `axis` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, axis: Axis) -> Result<Self> {
        Self::check_n(n)?;
        if qubit >= n {
            return Err(Error::InvalidParameter(format!(
                "qubit {qubit} out of range for n = {n}"
            )));
        }
        let (x, z) = axis.bits();
        let shift = n - 1 - qubit;
        Self::hermitian(n, x << shift, z << shift)
    }

    /// Parse a label like `"XIZY"`, `"-YZ"`, or `"+Z"`.  The resulting
    /// operator is the signed Hermitian Pauli named by the label.
    pub fn parse(label: &str) -> Result<Self> {
        let (sign, body) = match label.strip_prefix('-') {
            Some(rest) => (false, rest),
            None => (true, label.strip_prefix('+').unwrap_or(label)),
        };
        let n = body.chars().count();
        Self::check_n(n)?;
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in body.chars().enumerate() {
            let bit = 1u64 << (n - 1 - q);
            match c {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                }
                'Z' => z |= bit,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "invalid Pauli character '{other}' in \"{label}\""
                    )))
                }
            }
        }
        let mut p = Self::hermitian(n, x, z)?;
        if !sign {
            p = p.negated();
        }
        Ok(p)
    }

    /// Mask with the low `n` bits set.
    pub fn full_mask(n: usize) -> u64 {
        if n >= 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    /// Exponent of `i` in the stored form, modulo 4.
    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    /// Mask of qubits on which the operator acts non-trivially.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity_support(&self) -> bool {
        self.support() == 0
    }

    /// Axis on `qubit`, or `None` if the operator acts as identity there.
    pub fn axis_on(&self, qubit: usize) -> Option<Axis> {
        let shift = self.n - 1 - qubit;
        Axis::from_bits(self.x >> shift, self.z >> shift)
    }

    /// Group product `self · rhs` with exact phase tracking.
    ///
    /// Moving `Z^{z₁}` through `X^{x₂}` contributes `(-1)^{|z₁∧x₂|}`.
    pub fn mul(&self, rhs: &PauliString) -> PauliString {
        debug_assert_eq!(self.n, rhs.n, "pauli product across different widths");
        let swap_parity = ((self.z & rhs.x).count_ones() & 1) as u8;
        PauliString {
            n: self.n,
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
            phase: (self.phase + rhs.phase + 2 * swap_parity) & 3,
        }
    }

    /// Hermitian adjoint.
    pub fn dagger(&self) -> PauliString {
        let xz_parity = ((self.x & self.z).count_ones() & 1) as u8;
        PauliString {
            phase: (4 - self.phase + 2 * xz_parity) & 3,
            ..*self
        }
    }

    /// `-self`.
    pub fn negated(&self) -> PauliString {
        PauliString { phase: (self.phase + 2) & 3, ..*self }
    }

    /// `i^k · self`.
    pub fn times_i_pow(&self, k: u8) -> PauliString {
        PauliString { phase: (self.phase + (k & 3)) & 3, ..*self }
    }

    /// True when the operator is Hermitian (phase matches the support parity).
    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + (self.x & self.z).count_ones()) & 1 == 0
    }

    /// Sign relative to the Hermitian representative of the same support.
    ///
    /// Panics in debug builds if the operator is not Hermitian.
    pub fn hermitian_sign(&self) -> f64 {
        debug_assert!(self.is_hermitian());
        let canonical = ((self.x & self.z).count_ones() & 3) as u8;
        if (self.phase + 4 - canonical) & 3 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Same operator with phase reset to the Hermitian representative's.
    pub fn unsigned(&self) -> PauliString {
        PauliString {
            phase: ((self.x & self.z).count_ones() & 3) as u8,
            ..*self
        }
    }

    /// Whether `self` and `rhs` commute as operators.
    pub fn commutes_with(&self, rhs: &PauliString) -> bool {
        ((self.x & rhs.z).count_ones() + (self.z & rhs.x).count_ones()) & 1 == 0
    }

    /// Tensor product; `self` occupies the leading (leftmost) qubits.
    pub fn tensor(&self, rhs: &PauliString) -> Result<PauliString> {
        let n = self.n + rhs.n;
        Self::check_n(n)?;
        Ok(PauliString {
            n,
            x: (self.x << rhs.n) | rhs.x,
            z: (self.z << rhs.n) | rhs.z,
            phase: (self.phase + rhs.phase) & 3,
        })
    }

    /// Index of this support in the Liouville basis ordering: the identity
    /// first, then lexicographic in the `(x, z)` masks.
    pub fn basis_index(&self) -> usize {
        ((self.x as usize) << self.n) | self.z as usize
    }

    /// Hermitian representative for a Liouville basis index.
    pub fn from_basis_index(n: usize, index: usize) -> Result<Self> {
        Self::check_n(n)?;
        if index >= 1usize << (2 * n) {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for n = {n}"
            )));
        }
        let x = (index >> n) as u64;
        let z = index as u64 & Self::full_mask(n);
        Self::hermitian(n, x, z)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let canonical = ((self.x & self.z).count_ones() & 3) as u8;
        match (self.phase + 4 - canonical) & 3 {
            0 => {}
            1 => write!(f, "i")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i")?,
        }
        for q in 0..self.n {
            match self.axis_on(q) {
                None => write!(f, "I")?,
                Some(a) => write!(f, "{}", a.label())?,
            }
        }
        Ok(())
    }
}
