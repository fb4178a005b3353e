//! Clifford-group elements in symplectic (tableau) form.
//!
//! An n-qubit Clifford is stored by the signed Hermitian Paulis it conjugates
//! the generators to: `C X_q C†` and `C Z_q C†` for each qubit.  This fixes
//! the element up to global phase, which is irrelevant for channel action.
//! Uniform sampling builds a random symplectic basis of `F₂^{2n}` pair by
//! pair (rejection-free) and assigns independent random signs.
//!
//! Single-qubit Cliffords additionally get a frozen canonical indexing
//! `0..24` (see [`LocalCliffordElement`]): enumerate the image-axis pairs
//! `(X→a, Z→b)` with `a ≠ b` lexicographically in `(a, b)` over the axis
//! order `X < Y < Z`, then the four sign patterns `(+,+), (+,-), (-,+),
//! (-,-)`; `index = 4·pair + pattern`.  The identity is index 4, the
//! Hadamard 16, and the phase gate S index 12.

use crate::error::{Error, Result};
use crate::liouville::{check_dense_cap, pauli_dim, PauliVec, SuperOperator};
use crate::pauli::{Axis, PauliString};
use nalgebra::DMatrix;
use once_cell::sync::Lazy;
use rand::Rng;

/// A symplectic vector: the `(x, z)` support masks of a Pauli.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SympVec {
    x: u64,
    z: u64,
}

impl SympVec {
    const ZERO: SympVec = SympVec { x: 0, z: 0 };

    fn xor(self, o: SympVec) -> SympVec {
        SympVec { x: self.x ^ o.x, z: self.z ^ o.z }
    }

    /// Symplectic form: 1 when the underlying Paulis anticommute.
    fn sp(self, o: SympVec) -> u8 {
        (((self.x & o.z).count_ones() + (self.z & o.x).count_ones()) & 1) as u8
    }

    /// Pack into a single word: x bits low, z bits high (qubit-indexed).
    fn pack(self, n: usize) -> u64 {
        let mut out = 0u64;
        for q in 0..n {
            let bit = 1u64 << (n - 1 - q);
            if self.x & bit != 0 {
                out |= 1 << q;
            }
            if self.z & bit != 0 {
                out |= 1 << (n + q);
            }
        }
        out
    }
}

/// An n-qubit Clifford element, stored as the signed images of the Pauli
/// generators under conjugation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordElement {
    n: usize,
    /// `C X_q C†` for each qubit, Hermitian with tracked sign.
    x_images: Vec<PauliString>,
    /// `C Z_q C†` for each qubit.
    z_images: Vec<PauliString>,
}

impl CliffordElement {
    /// The identity element.
    pub fn identity(n: usize) -> Result<Self> {
        let x_images = (0..n)
            .map(|q| PauliString::single(n, q, Axis::X))
            .collect::<Result<Vec<_>>>()?;
        let z_images = (0..n)
            .map(|q| PauliString::single(n, q, Axis::Z))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, x_images, z_images })
    }

    /// Build from explicit generator images; validates the symplectic and
    /// Hermiticity constraints.
    pub fn from_images(
        n: usize,
        x_images: Vec<PauliString>,
        z_images: Vec<PauliString>,
    ) -> Result<Self> {
        let c = Self { n, x_images, z_images };
        c.validate()?;
        Ok(c)
    }

    /// Check that the stored images form a valid Clifford tableau.
    pub fn validate(&self) -> Result<()> {
        if self.x_images.len() != self.n || self.z_images.len() != self.n {
            return Err(Error::Dimension(format!(
                "tableau must hold {n} X-images and {n} Z-images",
                n = self.n
            )));
        }
        let img = |r: usize| -> &PauliString {
            if r < self.n {
                &self.x_images[r]
            } else {
                &self.z_images[r - self.n]
            }
        };
        for r in 0..2 * self.n {
            let p = img(r);
            if p.num_qubits() != self.n {
                return Err(Error::Dimension("tableau image width mismatch".into()));
            }
            if !p.is_hermitian() {
                return Err(Error::InvalidParameter(
                    "tableau images must be Hermitian Paulis".into(),
                ));
            }
            if p.is_identity_support() {
                return Err(Error::InvalidParameter(
                    "tableau images must be non-identity".into(),
                ));
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let want_anti = i == j;
                let anti = !self.x_images[i].commutes_with(&self.z_images[j]);
                if anti != want_anti {
                    return Err(Error::InvalidParameter(
                        "tableau violates X/Z commutation pattern".into(),
                    ));
                }
                if i < j {
                    if !self.x_images[i].commutes_with(&self.x_images[j])
                        || !self.z_images[i].commutes_with(&self.z_images[j])
                    {
                        return Err(Error::InvalidParameter(
                            "tableau images of commuting generators must commute".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, qubit: usize) -> &PauliString {
        &self.x_images[qubit]
    }

    pub fn z_image(&self, qubit: usize) -> &PauliString {
        &self.z_images[qubit]
    }

    /// Conjugate an arbitrary phased Pauli: `P ↦ C P C†`.
    ///
    /// Writes `P = i^φ Π_q X_q^{x_q} Π_q Z_q^{z_q}` and multiplies the
    /// generator images in that order; the phase bookkeeping of
    /// [`PauliString::mul`] keeps the result exact.
    pub fn conjugate_pauli(&self, p: &PauliString) -> PauliString {
        debug_assert_eq!(p.num_qubits(), self.n);
        let mut acc = PauliString::from_parts(self.n, 0, 0, p.phase_exponent())
            .expect("identity with phase");
        let (x, z) = (p.x_bits(), p.z_bits());
        for q in 0..self.n {
            if x & (1u64 << (self.n - 1 - q)) != 0 {
                acc = acc.mul(&self.x_images[q]);
            }
        }
        for q in 0..self.n {
            if z & (1u64 << (self.n - 1 - q)) != 0 {
                acc = acc.mul(&self.z_images[q]);
            }
        }
        acc
    }

    /// Group product: the element acting as `self` after `rhs` (i.e. the
    /// unitary `U_self · U_rhs`).
    pub fn compose(&self, rhs: &CliffordElement) -> Result<CliffordElement> {
        if self.n != rhs.n {
            return Err(Error::Dimension("composing Cliffords of different widths".into()));
        }
        let x_images = rhs.x_images.iter().map(|p| self.conjugate_pauli(p)).collect();
        let z_images = rhs.z_images.iter().map(|p| self.conjugate_pauli(p)).collect();
        Ok(CliffordElement { n: self.n, x_images, z_images })
    }

    /// The inverse element, via GF(2) inversion of the symplectic action
    /// followed by a sign-correction pass.
    pub fn invert(&self) -> Result<CliffordElement> {
        let n = self.n;
        // Rows of the symplectic matrix: packed images in generator order
        // X_0..X_{n-1}, Z_0..Z_{n-1}.
        let dim = 2 * n;
        let mut rows: Vec<(u64, u64)> = (0..dim)
            .map(|r| {
                let p = if r < n { &self.x_images[r] } else { &self.z_images[r - n] };
                let v = SympVec { x: p.x_bits(), z: p.z_bits() };
                (v.pack(n), 1u64 << r)
            })
            .collect();
        // Gauss-Jordan over GF(2): reduce [M | I] to [I | M^{-1}].
        for col in 0..dim {
            let pivot = (col..dim)
                .find(|&r| rows[r].0 & (1 << col) != 0)
                .ok_or_else(|| Error::InvalidParameter("tableau is not symplectic".into()))?;
            rows.swap(col, pivot);
            let (pm, pa) = rows[col];
            for r in 0..dim {
                if r != col && rows[r].0 & (1 << col) != 0 {
                    rows[r].0 ^= pm;
                    rows[r].1 ^= pa;
                }
            }
        }
        let solve = |target_row: usize| -> PauliString {
            // vec(P) = e_target · M^{-1}: read row `target_row` of the inverse.
            // The support of P in generator coordinates is exactly that
            // coefficient pattern: bit r set means generator r participates.
            let coeffs = rows[target_row].1;
            let mut v = SympVec::ZERO;
            for r in 0..dim {
                if coeffs & (1 << r) != 0 {
                    let bit = if r < n {
                        SympVec { x: 1u64 << (n - 1 - r), z: 0 }
                    } else {
                        SympVec { x: 0, z: 1u64 << (n - 1 - (r - n)) }
                    };
                    v = v.xor(bit);
                }
            }
            PauliString::hermitian(n, v.x, v.z).expect("valid support")
        };
        let mut x_images = Vec::with_capacity(n);
        let mut z_images = Vec::with_capacity(n);
        for r in 0..dim {
            let candidate = solve(r);
            let image = self.conjugate_pauli(&candidate);
            let target = if r < n {
                PauliString::single(n, r, Axis::X)?
            } else {
                PauliString::single(n, r - n, Axis::Z)?
            };
            debug_assert_eq!(image.unsigned(), target);
            let fixed = if image.hermitian_sign() < 0.0 {
                candidate.negated()
            } else {
                candidate
            };
            if r < n {
                x_images.push(fixed);
            } else {
                z_images.push(fixed);
            }
        }
        Ok(CliffordElement { n, x_images, z_images })
    }

    /// Dense transfer matrix of the conjugation channel.
    pub fn to_ptm(&self) -> Result<SuperOperator> {
        Ok(self.action()?.to_superoperator())
    }

    /// Compile the signed-permutation action on the Pauli basis.
    pub fn action(&self) -> Result<PauliPermutation> {
        PauliPermutation::from_clifford(self)
    }

    /// The Hadamard gate on one qubit of `n`.
    pub fn hadamard(n: usize, q: usize) -> Result<Self> {
        let mut c = Self::identity(n)?;
        c.x_images[q] = PauliString::single(n, q, Axis::Z)?;
        c.z_images[q] = PauliString::single(n, q, Axis::X)?;
        Ok(c)
    }

    /// The phase gate S (`X → Y`, `Z → Z`) on one qubit of `n`.
    pub fn phase_s(n: usize, q: usize) -> Result<Self> {
        let mut c = Self::identity(n)?;
        c.x_images[q] = PauliString::single(n, q, Axis::Y)?;
        Ok(c)
    }

    /// Controlled-NOT with the given control and target.
    pub fn cnot(n: usize, control: usize, target: usize) -> Result<Self> {
        if control == target {
            return Err(Error::InvalidParameter("CNOT control equals target".into()));
        }
        let mut c = Self::identity(n)?;
        c.x_images[control] = PauliString::single(n, control, Axis::X)?
            .mul(&PauliString::single(n, target, Axis::X)?);
        c.z_images[target] = PauliString::single(n, target, Axis::Z)?
            .mul(&PauliString::single(n, control, Axis::Z)?);
        Ok(c)
    }
}

/// Draw a uniformly random Clifford element.
///
/// The symplectic part is built pair by pair: pick a uniform nonzero vector
/// `a` of the remaining symplectic complement, a uniform partner `b` with
/// `⟨a, b⟩ = 1` (particular solution plus a uniform kernel element), project
/// the rest of the basis onto the complement of `span{a, b}`, and repeat.
/// Every symplectic matrix arises from exactly one choice path, and the 2n
/// image signs are independent fair bits.
pub fn sample_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CliffordElement> {
    if n == 0 || n > PauliString::MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "qubit count must be in 1..={}, got {n}",
            PauliString::MAX_QUBITS
        )));
    }
    let mut basis: Vec<SympVec> = Vec::with_capacity(2 * n);
    for q in 0..n {
        basis.push(SympVec { x: 1u64 << (n - 1 - q), z: 0 });
        basis.push(SympVec { x: 0, z: 1u64 << (n - 1 - q) });
    }
    let mut pairs: Vec<(SympVec, SympVec)> = Vec::with_capacity(n);
    while !basis.is_empty() {
        let k = basis.len();
        let coeffs: u64 = rng.gen_range(1..(1u64 << k));
        let mut a = SympVec::ZERO;
        for (j, v) in basis.iter().enumerate() {
            if coeffs & (1 << j) != 0 {
                a = a.xor(*v);
            }
        }
        let j0 = (0..k)
            .find(|&j| a.sp(basis[j]) == 1)
            .expect("symplectic form is nondegenerate on the complement");
        let b0 = basis[j0];
        let mut b = b0;
        for (j, v) in basis.iter().enumerate() {
            if j == j0 {
                continue;
            }
            // Kernel basis element of ⟨a, ·⟩ associated with this vector.
            let kj = if a.sp(*v) == 1 { v.xor(b0) } else { *v };
            if rng.gen::<bool>() {
                b = b.xor(kj);
            }
        }
        // Project every basis vector onto the symplectic complement of
        // span{a, b} (v ↦ v + ⟨v,b⟩a + ⟨v,a⟩b maps the span onto the whole
        // complement) and keep a maximal independent subset.
        let mut pivots: Vec<u64> = Vec::new();
        let mut next: Vec<SympVec> = Vec::new();
        for v in basis.iter() {
            let ca = v.sp(b);
            let cb = v.sp(a);
            let mut w = *v;
            if ca == 1 {
                w = w.xor(a);
            }
            if cb == 1 {
                w = w.xor(b);
            }
            let mut key = w.pack(n);
            for &p in &pivots {
                let high = 1u64 << (63 - p.leading_zeros());
                if key & high != 0 {
                    key ^= p;
                }
            }
            if key != 0 {
                pivots.push(key);
                next.push(w);
            }
        }
        debug_assert_eq!(next.len(), k - 2);
        pairs.push((a, b));
        basis = next;
    }
    let mut x_images = Vec::with_capacity(n);
    let mut z_images = Vec::with_capacity(n);
    for (a, b) in pairs {
        let mut xi = PauliString::hermitian(n, a.x, a.z)?;
        if rng.gen::<bool>() {
            xi = xi.negated();
        }
        let mut zi = PauliString::hermitian(n, b.x, b.z)?;
        if rng.gen::<bool>() {
            zi = zi.negated();
        }
        x_images.push(xi);
        z_images.push(zi);
    }
    Ok(CliffordElement { n, x_images, z_images })
}

/// Draw a uniformly random (phase-free) Pauli, identity included.
pub fn sample_pauli<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PauliString> {
    let mask = PauliString::full_mask(n);
    let x = rng.gen::<u64>() & mask;
    let z = rng.gen::<u64>() & mask;
    PauliString::hermitian(n, x, z)
}

/// The signed permutation a Clifford induces on the normalized Pauli basis.
#[derive(Debug, Clone)]
pub struct PauliPermutation {
    n: usize,
    perm: Vec<u32>,
    sign: Vec<f64>,
}

impl PauliPermutation {
    pub fn from_clifford(c: &CliffordElement) -> Result<Self> {
        check_dense_cap(c.num_qubits())?;
        let n = c.num_qubits();
        let d = pauli_dim(n);
        let mut perm = vec![0u32; d];
        let mut sign = vec![0.0f64; d];
        for idx in 0..d {
            let p = PauliString::from_basis_index(n, idx)?;
            let q = c.conjugate_pauli(&p);
            perm[idx] = q.basis_index() as u32;
            sign[idx] = q.hermitian_sign();
        }
        Ok(Self { n, perm, sign })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_dense_cap(n)?;
        let d = pauli_dim(n);
        Ok(Self {
            n,
            perm: (0..d as u32).collect(),
            sign: vec![1.0; d],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Image index and sign of one basis element.
    pub fn map_index(&self, idx: usize) -> (usize, f64) {
        (self.perm[idx] as usize, self.sign[idx])
    }

    /// Apply to a Pauli-basis vector.
    pub fn apply(&self, v: &PauliVec) -> PauliVec {
        debug_assert_eq!(v.len(), self.perm.len());
        let mut out = PauliVec::zeros(v.len());
        for i in 0..v.len() {
            out[self.perm[i] as usize] = self.sign[i] * v[i];
        }
        out
    }

    /// Apply in place using a scratch buffer.
    pub fn apply_into(&self, v: &PauliVec, out: &mut PauliVec) {
        out.fill(0.0);
        for i in 0..v.len() {
            out[self.perm[i] as usize] = self.sign[i] * v[i];
        }
    }

    /// Expand to a dense transfer matrix.
    pub fn to_superoperator(&self) -> SuperOperator {
        let d = self.perm.len();
        let mut mat = DMatrix::zeros(d, d);
        for i in 0..d {
            mat[(self.perm[i] as usize, i)] = self.sign[i];
        }
        SuperOperator::from_matrix(self.n, mat).expect("permutation dims")
    }
}

/// Number of single-qubit Clifford elements (modulo phase).
pub const C1_SIZE: u8 = 24;

/// Canonical index of the single-qubit identity.
pub const C1_IDENTITY: u8 = 4;

/// Canonical index of the Hadamard gate.
pub const C1_HADAMARD: u8 = 16;

/// Canonical index of the phase gate S.
pub const C1_PHASE_S: u8 = 12;

/// Image axes and signs of one single-qubit Clifford.
#[derive(Debug, Clone, Copy)]
pub struct C1Entry {
    pub x_axis: Axis,
    pub x_sign: i8,
    pub z_axis: Axis,
    pub z_sign: i8,
}

/// The frozen canonical table of the 24 single-qubit Cliffords.
pub static C1_TABLE: Lazy<[C1Entry; 24]> = Lazy::new(|| {
    let mut entries = Vec::with_capacity(24);
    for &xa in &Axis::ALL {
        for &za in &Axis::ALL {
            if xa == za {
                continue;
            }
            for xs in [1i8, -1] {
                for zs in [1i8, -1] {
                    entries.push(C1Entry { x_axis: xa, x_sign: xs, z_axis: za, z_sign: zs });
                }
            }
        }
    }
    entries.try_into().expect("exactly 24 single-qubit Cliffords")
});

/// Per-element conjugation table: `C1_CONJ[idx][code]` maps the input
/// single-qubit support code `(x << 1) | z` to `(output code, sign)`.
static C1_CONJ: Lazy<[[(u8, i8); 4]; 24]> = Lazy::new(|| {
    let mut table = [[(0u8, 1i8); 4]; 24];
    for idx in 0..24 {
        let e = &C1_TABLE[idx];
        let imgs = c1_images(e);
        for code in 0..4u8 {
            let (x, z) = ((code >> 1) as u64, (code & 1) as u64);
            let p = PauliString::hermitian(1, x, z).unwrap();
            // Conjugate via the generic generator-product rule.
            let mut acc = PauliString::from_parts(1, 0, 0, p.phase_exponent()).unwrap();
            if x == 1 {
                acc = acc.mul(&imgs.0);
            }
            if z == 1 {
                acc = acc.mul(&imgs.1);
            }
            let out_code = ((acc.x_bits() << 1) | acc.z_bits()) as u8;
            let sign = if code == 0 { 1 } else { acc.hermitian_sign() as i8 };
            table[idx][code as usize] = (out_code, sign);
        }
    }
    table
});

/// Signed single-qubit generator images of a table entry.
fn c1_images(e: &C1Entry) -> (PauliString, PauliString) {
    let mk = |axis: Axis, sign: i8| {
        let p = PauliString::single(1, 0, axis).unwrap();
        if sign < 0 {
            p.negated()
        } else {
            p
        }
    };
    (mk(e.x_axis, e.x_sign), mk(e.z_axis, e.z_sign))
}

/// Composition table `C1_COMPOSE[a][b] = index of a∘b` (b acts first).
static C1_COMPOSE: Lazy<[[u8; 24]; 24]> = Lazy::new(|| {
    let mut table = [[0u8; 24]; 24];
    for a in 0..24 {
        for b in 0..24 {
            let ca = c1_to_clifford(a as u8);
            let cb = c1_to_clifford(b as u8);
            table[a][b] = c1_index_of(&ca.compose(&cb).unwrap()).unwrap();
        }
    }
    table
});

/// Inversion table for the canonical single-qubit indexing.
static C1_INVERT: Lazy<[u8; 24]> = Lazy::new(|| {
    let mut table = [0u8; 24];
    for a in 0..24 {
        table[a] = c1_index_of(&c1_to_clifford(a as u8).invert().unwrap()).unwrap();
    }
    table
});

/// Single-qubit tableau for a canonical index.
pub fn c1_to_clifford(index: u8) -> CliffordElement {
    assert!(index < C1_SIZE, "single-qubit Clifford index out of range");
    let (xi, zi) = c1_images(&C1_TABLE[index as usize]);
    CliffordElement { n: 1, x_images: vec![xi], z_images: vec![zi] }
}

/// Canonical index of a single-qubit tableau.
pub fn c1_index_of(c: &CliffordElement) -> Result<u8> {
    if c.num_qubits() != 1 {
        return Err(Error::Dimension("canonical indexing is single-qubit".into()));
    }
    let axis_rank = |a: Axis| match a {
        Axis::X => 0u8,
        Axis::Y => 1,
        Axis::Z => 2,
    };
    let xi = &c.x_images[0];
    let zi = &c.z_images[0];
    let xa = xi.axis_on(0).ok_or_else(|| {
        Error::InvalidParameter("X image must be a non-identity Pauli".into())
    })?;
    let za = zi.axis_on(0).ok_or_else(|| {
        Error::InvalidParameter("Z image must be a non-identity Pauli".into())
    })?;
    let (ra, rb) = (axis_rank(xa), axis_rank(za));
    // Pair rank inside the 6 ordered axis pairs with distinct entries.
    let pair = ra * 2 + if rb > ra { rb - 1 } else { rb };
    let pattern = (if xi.hermitian_sign() < 0.0 { 2 } else { 0 })
        + (if zi.hermitian_sign() < 0.0 { 1 } else { 0 });
    Ok(pair * 4 + pattern)
}

/// A layer of independent single-qubit Cliffords, one per qubit, referenced
/// by canonical index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCliffordElement {
    indices: Vec<u8>,
}

impl LocalCliffordElement {
    pub fn identity(n: usize) -> Self {
        Self { indices: vec![C1_IDENTITY; n] }
    }

    pub fn from_indices(indices: Vec<u8>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("empty local-Clifford layer".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= C1_SIZE) {
            return Err(Error::InvalidParameter(format!(
                "single-qubit Clifford index {bad} out of range"
            )));
        }
        Ok(Self { indices })
    }

    pub fn num_qubits(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    /// Qubits on which the layer differs from the identity.
    pub fn support(&self) -> u64 {
        let n = self.indices.len();
        let mut w = 0u64;
        for (q, &i) in self.indices.iter().enumerate() {
            if i != C1_IDENTITY {
                w |= 1u64 << (n - 1 - q);
            }
        }
        w
    }

    /// Conjugate a phased Pauli through the layer, qubit by qubit.
    pub fn conjugate_pauli(&self, p: &PauliString) -> PauliString {
        let n = self.indices.len();
        debug_assert_eq!(p.num_qubits(), n);
        let mut x = 0u64;
        let mut z = 0u64;
        let mut negative = false;
        for (q, &idx) in self.indices.iter().enumerate() {
            let bit = 1u64 << (n - 1 - q);
            let code = (((p.x_bits() & bit != 0) as u8) << 1) | ((p.z_bits() & bit != 0) as u8);
            let (out, s) = C1_CONJ[idx as usize][code as usize];
            if out & 2 != 0 {
                x |= bit;
            }
            if out & 1 != 0 {
                z |= bit;
            }
            if s < 0 {
                negative = !negative;
            }
        }
        // Phase: tensor of per-qubit Hermitian results, adjusted by the
        // input's offset from its own Hermitian representative.
        let delta = (p.phase_exponent() + 4
            - (((p.x_bits() & p.z_bits()).count_ones() & 3) as u8))
            & 3;
        let mut out = PauliString::hermitian(n, x, z).expect("valid support");
        if negative {
            out = out.negated();
        }
        out.times_i_pow(delta)
    }

    /// Expand to a full tableau.
    pub fn to_clifford(&self) -> Result<CliffordElement> {
        let n = self.indices.len();
        if n > PauliString::MAX_QUBITS {
            return Err(Error::InvalidParameter("too many qubits".into()));
        }
        let mut x_images = Vec::with_capacity(n);
        let mut z_images = Vec::with_capacity(n);
        for q in 0..n {
            x_images.push(self.conjugate_pauli(&PauliString::single(n, q, Axis::X)?));
            z_images.push(self.conjugate_pauli(&PauliString::single(n, q, Axis::Z)?));
        }
        Ok(CliffordElement { n, x_images, z_images })
    }

    /// Per-qubit composition (`self` after `rhs`).
    pub fn compose(&self, rhs: &LocalCliffordElement) -> Result<LocalCliffordElement> {
        if self.num_qubits() != rhs.num_qubits() {
            return Err(Error::Dimension("layer widths differ".into()));
        }
        let indices = self
            .indices
            .iter()
            .zip(&rhs.indices)
            .map(|(&a, &b)| C1_COMPOSE[a as usize][b as usize])
            .collect();
        Ok(LocalCliffordElement { indices })
    }

    /// Per-qubit inverse.
    pub fn invert(&self) -> LocalCliffordElement {
        LocalCliffordElement {
            indices: self.indices.iter().map(|&i| C1_INVERT[i as usize]).collect(),
        }
    }

    /// Compile the signed-permutation action on the Pauli basis.
    pub fn action(&self) -> Result<PauliPermutation> {
        let n = self.indices.len();
        check_dense_cap(n)?;
        let d = pauli_dim(n);
        let mut perm = vec![0u32; d];
        let mut sign = vec![0.0f64; d];
        for idx in 0..d {
            let p = PauliString::from_basis_index(n, idx)?;
            let q = self.conjugate_pauli(&p);
            perm[idx] = q.basis_index() as u32;
            sign[idx] = q.hermitian_sign();
        }
        Ok(PauliPermutation { n, perm, sign })
    }
}

/// Draw a uniformly random layer of independent single-qubit Cliffords.
pub fn sample_local_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LocalCliffordElement {
    LocalCliffordElement {
        indices: (0..n).map(|_| rng.gen_range(0..C1_SIZE)).collect(),
    }
}

/// Hard cap on the enumeration support size (24³ elements).
pub const ENUMERATION_SUPPORT_CAP: u32 = 3;

/// Enumerate all local-Clifford layers acting non-trivially only on the
/// qubits set in `support` (identity index elsewhere), in lexicographic
/// index order.  Refused for supports larger than
/// [`ENUMERATION_SUPPORT_CAP`] qubits.
pub fn enumerate_local_cliffords(n: usize, support: u64) -> Result<Vec<LocalCliffordElement>> {
    if support >= (1u64 << n) {
        return Err(Error::InvalidParameter(format!(
            "support pattern {support:#b} out of range for n = {n}"
        )));
    }
    let k = support.count_ones();
    if k > ENUMERATION_SUPPORT_CAP {
        return Err(Error::Unsupported(format!(
            "enumeration over {k} qubits refused (cap {ENUMERATION_SUPPORT_CAP}: 24^{k} elements)"
        )));
    }
    let qubits: Vec<usize> = (0..n)
        .filter(|&q| support & (1u64 << (n - 1 - q)) != 0)
        .collect();
    let total = 24usize.pow(k);
    let mut out = Vec::with_capacity(total);
    for combo in 0..total {
        let mut indices = vec![C1_IDENTITY; n];
        let mut rem = combo;
        for &q in qubits.iter().rev() {
            indices[q] = (rem % 24) as u8;
            rem /= 24;
        }
        out.push(LocalCliffordElement { indices });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn p(label: &str) -> PauliString {
        PauliString::parse(label).unwrap()
    }

    #[test]
    fn hadamard_and_s_conjugation() {
        let h = CliffordElement::hadamard(1, 0).unwrap();
        assert_eq!(h.conjugate_pauli(&p("X")), p("Z"));
        assert_eq!(h.conjugate_pauli(&p("Z")), p("X"));
        assert_eq!(h.conjugate_pauli(&p("Y")), p("-Y"));
        let s = CliffordElement::phase_s(1, 0).unwrap();
        assert_eq!(s.conjugate_pauli(&p("X")), p("Y"));
        assert_eq!(s.conjugate_pauli(&p("Y")), p("-X"));
        assert_eq!(s.conjugate_pauli(&p("Z")), p("Z"));
    }

    #[test]
    fn cnot_conjugation() {
        let cx = CliffordElement::cnot(2, 0, 1).unwrap();
        assert_eq!(cx.conjugate_pauli(&p("XI")), p("XX"));
        assert_eq!(cx.conjugate_pauli(&p("IX")), p("IX"));
        assert_eq!(cx.conjugate_pauli(&p("ZI")), p("ZI"));
        assert_eq!(cx.conjugate_pauli(&p("IZ")), p("ZZ"));
        assert_eq!(cx.conjugate_pauli(&p("YY")), p("-XZ"));
    }

    #[test]
    fn compose_matches_sequential_conjugation() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in 1..=3 {
            for _ in 0..20 {
                let a = sample_clifford(n, &mut rng).unwrap();
                let b = sample_clifford(n, &mut rng).unwrap();
                let ab = a.compose(&b).unwrap();
                for idx in 0..pauli_dim(n) {
                    let q = PauliString::from_basis_index(n, idx).unwrap();
                    assert_eq!(
                        ab.conjugate_pauli(&q),
                        a.conjugate_pauli(&b.conjugate_pauli(&q))
                    );
                }
            }
        }
    }

    #[test]
    fn sampled_elements_are_valid_and_invertible() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..25 {
                let c = sample_clifford(n, &mut rng).unwrap();
                c.validate().unwrap();
                let inv = c.invert().unwrap();
                inv.validate().unwrap();
                let id = c.compose(&inv).unwrap();
                assert_eq!(id, CliffordElement::identity(n).unwrap());
                let id2 = inv.compose(&c).unwrap();
                assert_eq!(id2, CliffordElement::identity(n).unwrap());
            }
        }
    }

    #[test]
    fn action_matches_conjugation_and_is_orthogonal() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let c = sample_clifford(2, &mut rng).unwrap();
        let ptm = c.to_ptm().unwrap();
        let m = ptm.matrix();
        // Signed permutation: M Mᵀ = I.
        let prod = m * m.transpose();
        assert!((prod - DMatrix::<f64>::identity(16, 16)).abs().max() < 1e-12);
        // Identity component is fixed.
        assert_eq!(m[(0, 0)], 1.0);
    }

    #[test]
    fn c1_table_is_consistent() {
        // Round trip index → tableau → index, all distinct, all valid.
        let mut seen = std::collections::HashSet::new();
        for i in 0..24u8 {
            let c = c1_to_clifford(i);
            c.validate().unwrap();
            assert_eq!(c1_index_of(&c).unwrap(), i);
            seen.insert(format!(
                "{}{}",
                c.x_image(0), c.z_image(0)
            ));
        }
        assert_eq!(seen.len(), 24);
        assert_eq!(c1_to_clifford(C1_IDENTITY), CliffordElement::identity(1).unwrap());
        assert_eq!(c1_to_clifford(C1_HADAMARD), CliffordElement::hadamard(1, 0).unwrap());
        assert_eq!(c1_to_clifford(C1_PHASE_S), CliffordElement::phase_s(1, 0).unwrap());
    }

    #[test]
    fn local_layer_matches_full_tableau() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..20 {
            let layer = sample_local_clifford(3, &mut rng);
            let full = layer.to_clifford().unwrap();
            full.validate().unwrap();
            for idx in 0..pauli_dim(3) {
                let q = PauliString::from_basis_index(3, idx).unwrap();
                assert_eq!(layer.conjugate_pauli(&q), full.conjugate_pauli(&q));
            }
            let inv = layer.invert();
            let composed = layer.compose(&inv).unwrap();
            assert_eq!(composed, LocalCliffordElement::identity(3));
        }
    }

    #[test]
    fn local_conjugation_preserves_per_qubit_support() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for _ in 0..50 {
            let layer = sample_local_clifford(2, &mut rng);
            let q = sample_pauli(2, &mut rng).unwrap();
            let out = layer.conjugate_pauli(&q);
            assert_eq!(out.support(), q.support());
        }
    }

    #[test]
    fn enumeration_counts_and_cap() {
        assert_eq!(enumerate_local_cliffords(2, 0b10).unwrap().len(), 24);
        assert_eq!(enumerate_local_cliffords(2, 0b11).unwrap().len(), 576);
        assert_eq!(enumerate_local_cliffords(1, 0).unwrap().len(), 1);
        assert!(enumerate_local_cliffords(5, 0b11110).is_err());
        for e in enumerate_local_cliffords(2, 0b01).unwrap() {
            assert_eq!(e.support() & !0b01, 0);
        }
    }

    #[test]
    fn inverse_distribution_of_samples_is_well_formed() {
        // Smoke test: inverses of samples stay valid across widths.
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..10 {
            let c = sample_clifford(5, &mut rng).unwrap();
            let i = c.invert().unwrap();
            assert_eq!(c.compose(&i).unwrap(), CliffordElement::identity(5).unwrap());
        }
    }
}
