//! Two-spin density matrices and Wootters concurrence.

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::linalg::{CMat, ZERO};

/// Concurrences below this are reported as exactly zero.
pub const CONCURRENCE_FLOOR: f64 = 1e-12;
/// Forbidden X-form entries above this make the state non-X.
pub const X_FORM_TOL: f64 = 1e-12;

/// Index of the two-spin basis `(↑↑, ↑↓, ↓↑, ↓↓)`.
pub const UU: usize = 0;
pub const UD: usize = 1;
pub const DU: usize = 2;
pub const DD: usize = 3;

/// Reduced density matrix of a spin pair `(a, b)`, `a < b`, in the basis
/// `(↑↑, ↑↓, ↓↑, ↓↓)` with site `a` as the left factor.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteState {
    sites: (usize, usize),
    rho: [[c64; 4]; 4],
}

impl TwoSiteState {
    pub fn new(sites: (usize, usize), rho: [[c64; 4]; 4]) -> Self {
        Self { sites, rho }
    }

    pub fn from_real(sites: (usize, usize), rho: [[f64; 4]; 4]) -> Self {
        let mut out = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = c64::new(rho[i][j], 0.0);
            }
        }
        Self::new(sites, out)
    }

    /// Projector onto a normalized pure state.
    pub fn pure(sites: (usize, usize), psi: [c64; 4]) -> Self {
        let mut rho = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::new(sites, rho)
    }

    /// `(|↑↓⟩ + s|↓↑⟩)/√2` with `s = ±1`.
    pub fn bell(sites: (usize, usize), sign: f64) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure(
            sites,
            [ZERO, c64::new(h, 0.0), c64::new(sign * h, 0.0), ZERO],
        )
    }

    pub fn sites(&self) -> (usize, usize) {
        self.sites
    }

    pub fn entry(&self, i: usize, j: usize) -> c64 {
        self.rho[i][j]
    }

    pub fn entries(&self) -> &[[c64; 4]; 4] {
        &self.rho
    }

    pub fn matrix(&self) -> CMat {
        Mat::from_fn(4, 4, |i, j| self.rho[i][j])
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.rho[i][i].re).sum()
    }

    /// Largest entry outside the diagonal and the anti-diagonal.
    pub fn x_form_defect(&self) -> f64 {
        let mut out = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let allowed = i == j || i + j == 3;
                if !allowed {
                    out = out.max(self.rho[i][j].norm());
                }
            }
        }
        out
    }

    /// `(⟨σᶻ_a⟩, ⟨σᶻ_b⟩)` from the partial traces.
    pub fn magnetizations(&self) -> (f64, f64) {
        let p = |i: usize| self.rho[i][i].re;
        (
            p(UU) + p(UD) - p(DU) - p(DD),
            p(UU) - p(UD) + p(DU) - p(DD),
        )
    }

    /// Fidelity `⟨ψ|ρ|ψ⟩` with a pure state.
    pub fn fidelity(&self, psi: [c64; 4]) -> f64 {
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += psi[i].conj() * self.rho[i][j] * psi[j];
            }
        }
        acc.re
    }

    /// Distance to another state, entrywise maximum.
    pub fn distance(&self, other: &TwoSiteState) -> f64 {
        let mut out = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                out = out.max((self.rho[i][j] - other.rho[i][j]).norm());
            }
        }
        out
    }
}

fn floor(c: f64) -> f64 {
    if c < CONCURRENCE_FLOOR {
        0.0
    } else {
        c.min(1.0)
    }
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`, with `λ` the square roots
/// of the eigenvalues of `ρ ρ̃` in descending order and
/// `ρ̃ = (σʸ⊗σʸ) ρ̄ (σʸ⊗σʸ)`.
pub fn concurrence_wootters(state: &TwoSiteState) -> f64 {
    // σʸ⊗σʸ in the (↑↑, ↑↓, ↓↑, ↓↓) basis
    let flip = [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ];
    let rho = state.matrix();
    let yy = Mat::from_fn(4, 4, |i, j| c64::new(flip[i][j], 0.0));
    let tilde = &yy * rho.conjugate() * &yy;
    let r = &rho * &tilde;
    let Ok(ev) = r.eigenvalues() else {
        return f64::NAN;
    };
    let mut lambda: Vec<f64> = ev.iter().map(|v| v.re.max(0.0).sqrt()).collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    floor(lambda[0] - lambda[1] - lambda[2] - lambda[3])
}

/// Closed form for X states,
/// `2 max(0, |ρ_{↑↓,↓↑}| − √(ρ_{↑↑}ρ_{↓↓}), |ρ_{↑↑,↓↓}| − √(ρ_{↑↓}ρ_{↓↑}))`.
///
/// States reconstructed from a correlation matrix conserve the magnetization,
/// so their `(↑↑, ↓↓)` coherence vanishes and only the first branch matters.
pub fn concurrence_x_state(state: &TwoSiteState) -> Result<f64> {
    let defect = state.x_form_defect();
    if defect > X_FORM_TOL {
        return Err(Error::NotXState(defect));
    }
    let pop = |i: usize| state.rho[i][i].re.max(0.0);
    let flip = state.rho[UD][DU].norm() - (pop(UU) * pop(DD)).sqrt();
    let pair = state.rho[UU][DD].norm() - (pop(UD) * pop(DU)).sqrt();
    Ok(floor(2.0 * flip.max(pair)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn werner(p: f64) -> TwoSiteState {
        let bell = TwoSiteState::pure(
            (0, 1),
            [
                c64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ZERO,
                ZERO,
                c64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        );
        let mut rho = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = bell.entry(i, j) * p;
            }
            rho[i][i] += c64::new(0.25 * (1.0 - p), 0.0);
        }
        TwoSiteState::new((0, 1), rho)
    }

    #[test]
    fn bell_states_are_maximally_entangled() {
        for sign in [1.0, -1.0] {
            let s = TwoSiteState::bell((0, 1), sign);
            assert!((concurrence_wootters(&s) - 1.0).abs() < 1e-12);
            assert!((concurrence_x_state(&s).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn product_states_are_separable() {
        let up = TwoSiteState::from_real((0, 1), {
            let mut r = [[0.0; 4]; 4];
            r[UU][UU] = 1.0;
            r
        });
        assert_eq!(concurrence_wootters(&up), 0.0);
        let mixed = TwoSiteState::from_real((0, 1), {
            let mut r = [[0.0; 4]; 4];
            r[UU][UU] = 0.5;
            r[DD][DD] = 0.5;
            r
        });
        assert_eq!(concurrence_x_state(&mixed).unwrap(), 0.0);
        assert_eq!(concurrence_wootters(&mixed), 0.0);
    }

    #[test]
    fn werner_state_closed_form() {
        for p in [0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let expected = f64::max(0.0, (3.0 * p - 1.0) / 2.0);
            let w = werner(p);
            assert!((concurrence_wootters(&w) - expected).abs() < 1e-10, "p = {p}");
        }
        assert!((concurrence_wootters(&werner(0.5)) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn x_state_formula_covers_the_corner_branch() {
        // entanglement carried by the (↑↑, ↓↓) coherence
        for p in [0.2, 0.5, 0.8, 1.0] {
            let w = werner(p);
            assert!((concurrence_x_state(&w).unwrap() - concurrence_wootters(&w)).abs() < 1e-10);
        }
    }

    #[test]
    fn x_state_formula_rejects_general_states() {
        // |+⟩ ⊗ |+⟩ has every entry equal to 1/4
        let h = c64::new(0.5, 0.0);
        let s = TwoSiteState::pure((0, 1), [h, h, h, h]);
        assert!(matches!(concurrence_x_state(&s), Err(Error::NotXState(_))));
    }

    #[test]
    fn marginals_of_a_product_state() {
        // |↑⟩ ⊗ (|↑⟩⟨↑| + |↓⟩⟨↓|)/2
        let s = TwoSiteState::from_real((2, 3), {
            let mut r = [[0.0; 4]; 4];
            r[UU][UU] = 0.5;
            r[UD][UD] = 0.5;
            r
        });
        assert_eq!(s.magnetizations(), (1.0, 0.0));
        assert_eq!(s.trace(), 1.0);
    }
}
