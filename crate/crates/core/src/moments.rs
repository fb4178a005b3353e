//! Exact and sampled moment operators of random-gate ensembles.
//!
//! The estimators in this crate are built on low moments of the uniform
//! distribution over the n-qubit Clifford group (and over products of
//! independent single-qubit Cliffords).  This module provides
//!
//! * closed-form second-moment operators `E[ω(C) ⊗ ω(C)]` on the doubled
//!   Pauli-basis space for both ensembles,
//! * the exact third moment `E[ω(C)^{⊗3}]` via Weingarten calculus on
//!   `U(2^n)` — valid because the multi-qubit Clifford group is a unitary
//!   3-design,
//! * Monte-Carlo versions of both, used to validate the closed forms and
//!   to diagnose sampling quality.
//!
//! Doubled (tripled) indices follow Kronecker convention: the leftmost
//! tensor factor is the most significant digit, `(i₁, i₂) ↦ i₁·4^n + i₂`.

use crate::clifford::{sample_clifford, sample_local_clifford};
use crate::error::{Error, Result};
use crate::liouville::pauli_dim;
use crate::pauli::PauliString;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

/// Cap on dense doubled-space operators: `(4^n)²` entries grow fast.
pub const DOUBLED_QUBIT_CAP: usize = 3;

fn check_doubled_cap(n: usize) -> Result<()> {
    if n == 0 || n > DOUBLED_QUBIT_CAP {
        return Err(Error::TooManyQubits { n, cap: DOUBLED_QUBIT_CAP });
    }
    Ok(())
}

/// Which gate ensemble a moment refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwirlScheme {
    /// Uniform over the full n-qubit Clifford group.
    MultiQubit,
    /// Uniform product of independent single-qubit Cliffords.
    Local,
}

/// Exact second moment `E[ω(C) ⊗ ω(C)]` over the full Clifford group.
///
/// The twirl projects onto the span of the identity component and the
/// normalized flat state on the traceless block:
/// `M[(j,j'),(i,i')] = δ_{j0}δ_{j'0}δ_{i0}δ_{i'0}
///  + [j=j'≠0][i=i'≠0]/(4^n−1)`.
pub fn second_moment_oracle(n: usize) -> Result<DMatrix<f64>> {
    check_doubled_cap(n)?;
    let dim = pauli_dim(n);
    let d2 = dim * dim;
    let mut m = DMatrix::<f64>::zeros(d2, d2);
    m[(0, 0)] = 1.0;
    let w = 1.0 / (dim as f64 - 1.0);
    for j in 1..dim {
        for i in 1..dim {
            m[(j * dim + j, i * dim + i)] = w;
        }
    }
    Ok(m)
}

/// Exact second moment over independent single-qubit Cliffords.
///
/// Diagonal pairs with matching support mix uniformly within their
/// support class: `M[(j,j),(i,i)] = [supp j = supp i]·3^{-|supp i|}`.
pub fn local_second_moment_oracle(n: usize) -> Result<DMatrix<f64>> {
    check_doubled_cap(n)?;
    let dim = pauli_dim(n);
    let d2 = dim * dim;
    let supports: Vec<u64> = (0..dim)
        .map(|i| PauliString::from_basis_index(n, i).expect("index").support())
        .collect();
    let mut m = DMatrix::<f64>::zeros(d2, d2);
    for j in 0..dim {
        for i in 0..dim {
            if supports[j] == supports[i] {
                let w = 3.0f64.powi(-(supports[i].count_ones() as i32));
                m[(j * dim + j, i * dim + i)] = w;
            }
        }
    }
    Ok(m)
}

/// `S₃` as mappings `t ↦ π(t)`, in the frozen order
/// `{e, (12), (23), (13), (123), (132)}`.
const S3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [0, 2, 1],
    [2, 1, 0],
    [1, 2, 0],
    [2, 0, 1],
];

/// Index of `π⁻¹` in [`S3`].
const S3_INV: [usize; 6] = [0, 1, 2, 3, 5, 4];

fn s3_compose(p: usize, q: usize) -> usize {
    let r = [S3[p][S3[q][0]], S3[p][S3[q][1]], S3[p][S3[q][2]]];
    S3.iter().position(|&s| s == r).expect("closed group")
}

fn s3_cycle_count(p: usize) -> usize {
    let pi = S3[p];
    let mut seen = [false; 3];
    let mut cycles = 0;
    for start in 0..3 {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut t = start;
        while !seen[t] {
            seen[t] = true;
            t = pi[t];
        }
    }
    cycles
}

/// Gram matrix of the permutation operators on `(C^{2^n})^{⊗3}`:
/// `G_{πσ} = tr(P_π† P_σ) = (2^n)^{#cycles(π⁻¹σ)}`.
pub fn permutation_gram_matrix(n: usize) -> DMatrix<f64> {
    let d = (1u64 << n) as f64;
    DMatrix::from_fn(6, 6, |p, q| d.powi(s3_cycle_count(s3_compose(S3_INV[p], q)) as i32))
}

/// Third-order Weingarten matrix of `U(2^n)` in the frozen `S₃` order.
///
/// Inverse of the permutation Gram matrix for `2^n ≥ 3`; at one qubit the
/// Gram matrix is singular and no inverse exists.
pub fn weingarten_matrix(n: usize) -> Result<DMatrix<f64>> {
    let d = (1u64 << n) as f64;
    if n < 2 {
        return Err(Error::Unsupported(
            "third-order Weingarten matrix is singular for a single qubit".into(),
        ));
    }
    let pre = 1.0 / (d * (d * d - 1.0) * (d * d - 4.0));
    let dd = d * d;
    let rows: [[f64; 6]; 6] = [
        [dd - 2.0, -d, -d, -d, 2.0, 2.0],
        [-d, dd - 2.0, 2.0, 2.0, -d, -d],
        [-d, 2.0, dd - 2.0, 2.0, -d, -d],
        [-d, 2.0, 2.0, dd - 2.0, -d, -d],
        [2.0, -d, -d, -d, dd - 2.0, 2.0],
        [2.0, -d, -d, -d, 2.0, dd - 2.0],
    ];
    Ok(DMatrix::from_fn(6, 6, |r, c| pre * rows[r][c]))
}

/// `tr(τ_{t₁} ⊗ τ_{t₂} ⊗ τ_{t₃} · P_π)`: product of per-cycle traces,
/// each cycle traversed in `π⁻¹` order.
fn permuted_trace(n: usize, triple: [usize; 3], p: usize) -> Complex64 {
    let pi = S3[p];
    let mut inv = [0usize; 3];
    for t in 0..3 {
        inv[pi[t]] = t;
    }
    let d = (1u64 << n) as f64;
    let tau_scale = d.sqrt().recip();
    let mut seen = [false; 3];
    let mut out = Complex64::new(1.0, 0.0);
    for start in 0..3 {
        if seen[start] {
            continue;
        }
        let mut acc = PauliString::identity(n);
        let mut len = 0u32;
        let mut t = start;
        while !seen[t] {
            seen[t] = true;
            let factor = PauliString::from_basis_index(n, triple[t]).expect("index");
            acc = acc.mul(&factor);
            len += 1;
            t = inv[t];
        }
        if !acc.is_identity_support() {
            return Complex64::new(0.0, 0.0);
        }
        let mag = d * tau_scale.powi(len as i32);
        let phase = match acc.phase_exponent() {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        out *= phase * mag;
    }
    out
}

/// Exact third moment `E[ω(C)^{⊗3}]` on the tripled Pauli-basis space.
///
/// Uses the `U(2^n)` Weingarten expansion, exact for the Clifford ensemble
/// because the multi-qubit Clifford group is a unitary 3-design.  Only
/// `n = 2` is accepted: the single-qubit Gram matrix is singular, and
/// larger systems exceed sensible dense storage (`(4^n)³` squared).
pub fn third_moment_weingarten(n: usize) -> Result<DMatrix<f64>> {
    if n != 2 {
        return Err(Error::Unsupported(format!(
            "dense third moment is provided for exactly two qubits, got {n}"
        )));
    }
    let dim = pauli_dim(n);
    let d3 = dim * dim * dim;
    let w = weingarten_matrix(n)?;
    // C[p][t] = tr(τ-triple · P_π); split into real and imaginary parts so
    // the assembly below stays in real arithmetic.
    let mut c_re = DMatrix::<f64>::zeros(6, d3);
    let mut c_im = DMatrix::<f64>::zeros(6, d3);
    for t in 0..d3 {
        let triple = [t / (dim * dim), (t / dim) % dim, t % dim];
        for p in 0..6 {
            let v = permuted_trace(n, triple, p);
            c_re[(p, t)] = v.re;
            c_im[(p, t)] = v.im;
        }
    }
    // Row side uses tr(T_j P_σ); column side tr(T_i P_{π⁻¹}).
    let mut v_re = DMatrix::<f64>::zeros(6, d3);
    let mut v_im = DMatrix::<f64>::zeros(6, d3);
    for p in 0..6 {
        v_re.row_mut(p).copy_from(&c_re.row(S3_INV[p]));
        v_im.row_mut(p).copy_from(&c_im.row(S3_INV[p]));
    }
    // M3 = Re(Uᵀ W V) with U = C, V as above; W is real.
    let m_re = c_re.transpose() * (&w * &v_re);
    let m_im = c_im.transpose() * (&w * &v_im);
    Ok(m_re - m_im)
}

/// Monte-Carlo estimate of the second moment of a gate ensemble.
pub fn sample_second_moment<R: Rng + ?Sized>(
    n: usize,
    scheme: TwirlScheme,
    draws: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    check_doubled_cap(n)?;
    if draws == 0 {
        return Err(Error::InvalidParameter("draws must be positive".into()));
    }
    let dim = pauli_dim(n);
    let mut acc = DMatrix::<f64>::zeros(dim * dim, dim * dim);
    for _ in 0..draws {
        let action = match scheme {
            TwirlScheme::MultiQubit => sample_clifford(n, rng)?.action()?,
            TwirlScheme::Local => sample_local_clifford(n, rng).action()?,
        };
        for i1 in 0..dim {
            let (p1, s1) = action.map_index(i1);
            for i2 in 0..dim {
                let (p2, s2) = action.map_index(i2);
                acc[(p1 * dim + p2, i1 * dim + i2)] += s1 * s2;
            }
        }
    }
    Ok(acc / draws as f64)
}

/// Monte-Carlo estimate of the third moment of the full Clifford ensemble.
pub fn sample_third_moment<R: Rng + ?Sized>(
    n: usize,
    draws: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    if n != 2 {
        return Err(Error::Unsupported(
            "sampled third moment mirrors the dense oracle: two qubits only".into(),
        ));
    }
    if draws == 0 {
        return Err(Error::InvalidParameter("draws must be positive".into()));
    }
    let dim = pauli_dim(n);
    let mut acc = DMatrix::<f64>::zeros(dim * dim * dim, dim * dim * dim);
    for _ in 0..draws {
        let action = sample_clifford(n, rng)?.action()?;
        for i1 in 0..dim {
            let (p1, s1) = action.map_index(i1);
            for i2 in 0..dim {
                let (p2, s2) = action.map_index(i2);
                let row12 = (p1 * dim + p2) * dim;
                let col12 = (i1 * dim + i2) * dim;
                let s12 = s1 * s2;
                for i3 in 0..dim {
                    let (p3, s3) = action.map_index(i3);
                    acc[(row12 + p3, col12 + i3)] += s12 * s3;
                }
            }
        }
    }
    Ok(acc / draws as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn second_moments_are_projections() {
        for n in 1..=2 {
            for scheme in [TwirlScheme::MultiQubit, TwirlScheme::Local] {
                let m = match scheme {
                    TwirlScheme::MultiQubit => second_moment_oracle(n).unwrap(),
                    TwirlScheme::Local => local_second_moment_oracle(n).unwrap(),
                };
                let sq = &m * &m;
                assert!((sq - &m).abs().max() < 1e-12, "n={n} {scheme:?}");
                // Symmetric, and the identity pair is fixed.
                assert!((m.transpose() - &m).abs().max() < 1e-12);
                assert_eq!(m[(0, 0)], 1.0);
            }
        }
    }

    #[test]
    fn single_qubit_ensembles_coincide() {
        let a = second_moment_oracle(1).unwrap();
        let b = local_second_moment_oracle(1).unwrap();
        assert!((a - b).abs().max() < 1e-15);
    }

    #[test]
    fn second_moment_ranks() {
        // Full twirl: two invariant components.  Local twirl: one per
        // support class, i.e. 2^n.
        let m = second_moment_oracle(2).unwrap();
        assert!((m.trace() - 2.0).abs() < 1e-12);
        let l = local_second_moment_oracle(2).unwrap();
        assert!((l.trace() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn weingarten_inverts_gram() {
        for n in 2..=3 {
            let w = weingarten_matrix(n).unwrap();
            let g = permutation_gram_matrix(n);
            let prod = &w * &g;
            assert!(
                (prod - DMatrix::<f64>::identity(6, 6)).abs().max() < 1e-12,
                "n={n}"
            );
        }
        assert!(weingarten_matrix(1).is_err());
    }

    #[test]
    fn third_moment_restricts_to_second() {
        let dim = 16;
        let m3 = third_moment_weingarten(2).unwrap();
        let m2 = second_moment_oracle(2).unwrap();
        let mut worst = 0.0f64;
        for j in 0..dim * dim {
            for i in 0..dim * dim {
                let diff = (m3[(j * dim, i * dim)] - m2[(j, i)]).abs();
                worst = worst.max(diff);
            }
        }
        assert!(worst < 1e-12, "worst deviation {worst}");
    }

    #[test]
    fn third_moment_is_symmetric_and_invariant() {
        let dim = 16usize;
        let m3 = third_moment_weingarten(2).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        // Spot-check symmetry on random entries.
        for _ in 0..500 {
            let r = rng.gen_range(0..dim * dim * dim);
            let c = rng.gen_range(0..dim * dim * dim);
            assert!((m3[(r, c)] - m3[(c, r)]).abs() < 1e-12);
        }
        // Right invariance: composing with a fixed Clifford leaves the
        // moment unchanged.
        let action = sample_clifford(2, &mut rng).unwrap().action().unwrap();
        let v = nalgebra::DVector::<f64>::from_fn(dim * dim * dim, |_, _| {
            rng.gen_range(-1.0..1.0)
        });
        let mut w = nalgebra::DVector::<f64>::zeros(dim * dim * dim);
        for t in 0..dim * dim * dim {
            let (i1, i2, i3) = (t / (dim * dim), (t / dim) % dim, t % dim);
            let (p1, s1) = action.map_index(i1);
            let (p2, s2) = action.map_index(i2);
            let (p3, s3) = action.map_index(i3);
            w[(p1 * dim + p2) * dim + p3] = s1 * s2 * s3 * v[t];
        }
        let lhs = &m3 * w;
        let rhs = &m3 * v;
        assert!((lhs - rhs).abs().max() < 1e-10);
    }

    #[test]
    fn sampled_second_moment_converges_loosely() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let m = sample_second_moment(1, TwirlScheme::MultiQubit, 4000, &mut rng).unwrap();
        let oracle = second_moment_oracle(1).unwrap();
        assert!((m - oracle).abs().max() < 0.05);
        let ml = sample_second_moment(1, TwirlScheme::Local, 4000, &mut rng).unwrap();
        let oracle_l = local_second_moment_oracle(1).unwrap();
        assert!((ml - oracle_l).abs().max() < 0.05);
    }
}
