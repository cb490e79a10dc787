//! Two-qubit entanglement measures.
//!
//! `σ_y` is the standard Pauli matrix with `−i` above the diagonal, and `ρ*`
//! is entry-wise conjugation in the computational basis.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntanglementError {
    #[error("eigen-decomposition failed: {0}")]
    EigenSolve(&'static str),
    #[error("{what} = {value} lies outside [0, 1]")]
    Domain { what: &'static str, value: f64 },
}

/// Below this smallest eigenvalue of ρ the square-root route loses accuracy.
const ILL_CONDITIONED: f64 = 1e-12;

/// `σ_y ⊗ σ_y` is real: anti-diagonal (−1, 1, 1, −1).
fn spin_flip(rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    const SIGN: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    Matrix4::from_fn(|i, j| rho[(3 - i, 3 - j)].conj() * (SIGN[i] * SIGN[j]))
}

fn hermitian_part(rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (rho + rho.adjoint()) * Complex64::from(0.5)
}

fn wootters(mut lambda: [f64; 4]) -> f64 {
    lambda.sort_by(|a, b| b.total_cmp(a));
    (lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0)
}

/// Wootters concurrence.
///
/// With `ρ = VV†`, `V = U·diag(√p)` from the eigen-decomposition, the λ's are
/// the singular values of the complex-symmetric `τ = Vᵀ(σ_y⊗σ_y)V`. Only one
/// square root enters, so round-off eigenvalues of ρ near zero produce pairs
/// of equal λ's that cancel, rather than an O(√ε) floor. When ρ has
/// eigenvalues below −1e-12 the general eigenvalues of `ρρ̃` are used instead.
pub fn concurrence(rho: &Matrix4<Complex64>) -> Result<f64, EntanglementError> {
    const SIGN: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    let eig = SymmetricEigen::new(hermitian_part(rho));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -ILL_CONDITIONED {
        return concurrence_general(rho);
    }
    let v = Matrix4::from_fn(|i, k| eig.eigenvectors[(i, k)] * libm::sqrt(eig.eigenvalues[k].max(0.0)));
    let flipped = Matrix4::from_fn(|i, k| v[(3 - i, k)] * SIGN[i]);
    let tau = v.transpose() * flipped;
    let s = tau.svd(false, false).singular_values;
    Ok(wootters([s[0], s[1], s[2], s[3]]))
}

/// Concurrence from the eigenvalues of the non-Hermitian product `ρρ̃`.
pub fn concurrence_general(rho: &Matrix4<Complex64>) -> Result<f64, EntanglementError> {
    let product = rho * spin_flip(rho);
    let schur = product
        .try_schur(1e-15, 10_000)
        .ok_or(EntanglementError::EigenSolve("Schur iteration did not converge"))?;
    let ev = schur.eigenvalues().ok_or(EntanglementError::EigenSolve("no eigenvalues"))?;
    let mut lambda = [0.0; 4];
    for (l, z) in lambda.iter_mut().zip(ev.iter()) {
        // tiny negative eigenvalues are round-off
        *l = libm::sqrt(z.re.max(0.0));
    }
    Ok(wootters(lambda))
}

/// Populations and coherence in the triplet/singlet parametrisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsMeasures {
    pub g_t: f64,
    pub g_s: f64,
    pub re_g_ts: f64,
    pub im_g_ts: f64,
    pub g11: f64,
    pub g44: f64,
}

impl TsMeasures {
    pub fn of(rho: &Matrix4<Complex64>) -> Self {
        let (a, b, x) = (rho[(1, 1)].re, rho[(2, 2)].re, rho[(1, 2)]);
        Self {
            g_t: 0.5 * (a + b) + x.re,
            g_s: 0.5 * (a + b) - x.re,
            re_g_ts: 0.5 * (a - b),
            im_g_ts: -x.im,
            g11: rho[(0, 0)].re,
            g44: rho[(3, 3)].re,
        }
    }

    pub fn concurrence(&self) -> f64 {
        concurrence_ts_form(self.g_t, self.g_s, self.im_g_ts, self.g11, self.g44)
    }
}

/// `max{0, |G_t − G_s − 2i Im G_ts| − 2√(G₁₁G₄₄)}`.
///
/// Equals the Wootters concurrence when the only coherence is between
/// |↑↓⟩ and |↓↑⟩.
pub fn concurrence_ts_form(g_t: f64, g_s: f64, im_g_ts: f64, g11: f64, g44: f64) -> f64 {
    let coherence = libm::hypot(g_t - g_s, 2.0 * im_g_ts);
    (coherence - 2.0 * libm::sqrt((g11 * g44).max(0.0))).max(0.0)
}

fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * libm::log2(p) };
    term(x) + term(1.0 - x)
}

/// Entanglement of formation `h((1 + √(1 − C²))/2)`.
pub fn entanglement_of_formation(c: f64) -> Result<f64, EntanglementError> {
    if !(-1e-9..=1.0 + 1e-9).contains(&c) {
        return Err(EntanglementError::Domain { what: "concurrence", value: c });
    }
    let c = c.clamp(0.0, 1.0);
    Ok(binary_entropy(0.5 * (1.0 + libm::sqrt(1.0 - c * c))))
}

/// Lower bound on the entanglement of formation from the singlet fidelity F.
pub fn werner_lower_bound(f: f64) -> f64 {
    if f <= 0.5 {
        return 0.0;
    }
    let f = f.min(1.0);
    binary_entropy(0.5 + libm::sqrt(f * (1.0 - f)))
}

/// `⟨S|ρ|S⟩` with `|S⟩ = (|↑↓⟩ − |↓↑⟩)/√2`.
pub fn singlet_fidelity(rho: &Matrix4<Complex64>) -> f64 {
    TsMeasures::of(rho).g_s
}

/// Werner state `F|S⟩⟨S| + (1 − F)(𝟙 − |S⟩⟨S|)/3`.
pub fn werner_state(f: f64) -> Matrix4<Complex64> {
    let mut singlet = Matrix4::zeros();
    singlet[(1, 1)] = Complex64::from(0.5);
    singlet[(2, 2)] = Complex64::from(0.5);
    singlet[(1, 2)] = Complex64::from(-0.5);
    singlet[(2, 1)] = Complex64::from(-0.5);
    let rest = (Matrix4::identity() - singlet) * Complex64::from((1.0 - f) / 3.0);
    singlet * Complex64::from(f) + rest
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{c, kron2, projector, random_density, random_ket, random_unitary2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket(v: [Complex64; 4]) -> Matrix4<Complex64> {
        projector(&v)
    }

    fn product_ket<R: Rng>(rng: &mut R) -> [Complex64; 4] {
        let a = crate::testutil::random_ket(rng);
        // reduce to two single-qubit states
        let n1 = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
        let n2 = (a[2].norm_sqr() + a[3].norm_sqr()).sqrt();
        let (u0, u1) = (a[0] / n1, a[1] / n1);
        let (v0, v1) = (a[2] / n2, a[3] / n2);
        [u0 * v0, u0 * v1, u1 * v0, u1 * v1]
    }

    /// Pure-state oracle |⟨ψ|σ_y⊗σ_y|ψ*⟩| = 2|ψ₀ψ₃ − ψ₁ψ₂|.
    fn pure_concurrence(v: &[Complex64; 4]) -> f64 {
        2.0 * (v[0] * v[3] - v[1] * v[2]).norm()
    }

    #[test]
    fn bell_states_are_maximal() {
        let h = FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let bells = [
            [z, c(h, 0.0), c(h, 0.0), z],
            [z, c(h, 0.0), c(-h, 0.0), z],
            [c(h, 0.0), z, z, c(h, 0.0)],
            [c(h, 0.0), z, z, c(-h, 0.0)],
            [z, c(h, 0.0), c(0.0, h), z],
        ];
        for b in bells {
            let rho = ket(b);
            assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-10);
            assert!((concurrence_general(&rho).unwrap() - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn product_states_have_zero_concurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let v = product_ket(&mut rng);
            assert!(pure_concurrence(&v) < 1e-12);
            assert!(concurrence(&ket(v)).unwrap() < 1e-7);
        }
    }

    #[test]
    fn half_triplet_half_singlet_example() {
        // ½|↑↑⟩⟨↑↑| + ½|S⟩⟨S|
        let mut rho = werner_state(1.0) * c(0.5, 0.0);
        rho[(0, 0)] = c(0.5, 0.0);
        assert!((concurrence(&rho).unwrap() - 0.5).abs() < 1e-10);
        assert!((TsMeasures::of(&rho).concurrence() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pure_states_match_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let v = random_ket(&mut rng);
            let got = concurrence(&ket(v)).unwrap();
            assert!((got - pure_concurrence(&v)).abs() < 1e-7, "{got} vs {}", pure_concurrence(&v));
        }
    }

    #[test]
    fn routes_agree_on_mixed_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let rho = random_density(&mut rng);
            let a = concurrence(&rho).unwrap();
            let b = concurrence_general(&rho).unwrap();
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in 0..300 {
            let rho = if k % 2 == 0 {
                random_density(&mut rng)
            } else {
                // rank-deficient draws with sizable concurrence
                ket(random_ket(&mut rng))
            };
            let u = kron2(&random_unitary2(&mut rng), &random_unitary2(&mut rng));
            let rotated = u * rho * u.adjoint();
            let (a, b) = (concurrence(&rho).unwrap(), concurrence(&rotated).unwrap());
            let tol = if k % 2 == 0 { 1e-10 } else { 1e-7 };
            assert!((a - b).abs() < tol, "{a} vs {b}");
        }
    }

    #[test]
    fn separable_mixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let n = rng.random_range(1..=8usize);
            let mut rho = Matrix4::zeros();
            let mut total = 0.0;
            for _ in 0..n {
                let w: f64 = rng.random();
                total += w;
                rho += ket(product_ket(&mut rng)) * c(w, 0.0);
            }
            let rho = rho / c(total, 0.0);
            // single product projectors are rank one: λ's vanish only to √ε
            let tol = if n == 1 { 1e-7 } else { 1e-9 };
            assert!(concurrence(&rho).unwrap() < tol);
        }
    }

    #[test]
    fn ts_form_matches_wootters() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            // X-block state: positive 2×2 middle block plus diagonal corners
            let mut w = [rng.random::<f64>(), rng.random(), rng.random(), rng.random()];
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let bound = (w[1] * w[2]).sqrt();
            let x = Complex64::from_polar(bound * rng.random::<f64>(), rng.random::<f64>() * core::f64::consts::TAU);
            let mut rho = Matrix4::from_diagonal(&nalgebra::Vector4::new(c(w[0], 0.0), c(w[1], 0.0), c(w[2], 0.0), c(w[3], 0.0)));
            rho[(1, 2)] = x;
            rho[(2, 1)] = x.conj();
            let m = TsMeasures::of(&rho);
            let full = concurrence(&rho).unwrap();
            assert!((m.concurrence() - full).abs() < 1e-10, "{} vs {full}", m.concurrence());
        }
        assert_eq!(concurrence_ts_form(0.3, 0.3, 0.0, 0.0, 0.0), 0.0);
        assert_eq!(concurrence_ts_form(0.0, 0.5, 0.0, 0.0, 0.0), 0.5);
    }

    #[test]
    fn entanglement_of_formation_properties() {
        assert_eq!(entanglement_of_formation(0.0).unwrap(), 0.0);
        assert!((entanglement_of_formation(1.0).unwrap() - 1.0).abs() < 1e-15);
        let mut last = -1.0;
        for k in 0..=100 {
            let e = entanglement_of_formation(k as f64 / 100.0).unwrap();
            assert!(e > last);
            last = e;
        }
        assert!(entanglement_of_formation(1.1).is_err());
        assert!(entanglement_of_formation(-0.01).is_err());
    }

    #[test]
    fn werner_bound() {
        assert_eq!(werner_lower_bound(0.5), 0.0);
        assert!((werner_lower_bound(1.0) - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..500 {
            let rho = if k % 2 == 0 {
                random_density(&mut rng)
            } else {
                // bias towards the singlet so the bound is not trivially zero
                let s = werner_state(1.0);
                let mix: f64 = rng.random();
                s * c(mix, 0.0) + random_density(&mut rng) * c(1.0 - mix, 0.0)
            };
            let f = singlet_fidelity(&rho);
            let ef = entanglement_of_formation(concurrence(&rho).unwrap()).unwrap();
            assert!(werner_lower_bound(f) <= ef + 1e-10, "H({f}) > {ef}");
        }
    }

    #[test]
    fn werner_states_saturate_bound() {
        for k in 1..=50 {
            let f = 0.5 + 0.5 * k as f64 / 50.0;
            let rho = werner_state(f);
            let ef = entanglement_of_formation(concurrence(&rho).unwrap()).unwrap();
            assert!((ef - werner_lower_bound(f)).abs() < 1e-10, "F={f}");
        }
    }

    #[test]
    fn singlet_fidelity_examples() {
        assert!((singlet_fidelity(&werner_state(1.0)) - 1.0).abs() < 1e-15);
        let h = FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        assert!(singlet_fidelity(&ket([z, c(h, 0.0), c(h, 0.0), z])).abs() < 1e-15);
        let mixed = Matrix4::<Complex64>::identity() * c(0.25, 0.0);
        assert!((singlet_fidelity(&mixed) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pure_product_states_have_no_round_off_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let v = product_ket(&mut rng);
            assert!(concurrence(&ket(v)).unwrap() < 1e-14);
        }
    }
}
