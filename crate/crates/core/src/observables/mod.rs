//! Spin observables reconstructed from the fermionic correlation matrix.
//!
//! Spins and fermions are related by a Jordan–Wigner string running over the
//! `2N` chain sites in internal order. The Bell pair currently colliding with
//! the chains sits between the two contact sites in the full string; it is
//! prepared with exactly one excitation, so every string that crosses from
//! chain 1 to chain 2 picks up an extra factor `−1`.

mod concurrence;
mod pfaffian;

pub use concurrence::{
    concurrence_wootters, concurrence_x_state, TwoSiteState, CONCURRENCE_FLOOR, DD, DU, UD, UU,
    X_FORM_TOL,
};
pub use pfaffian::{pfaffian, pfaffian_real, ANTISYMMETRY_TOL};

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::linalg::{self, ZERO};
use crate::model::{Chain, CorrelationMatrix, SiteIndexMap, SystemSpec};

/// Tolerance on negative eigenvalues of a reconstructed two-site state.
pub const PSD_TOL: f64 = 1e-9;

/// `m_n = ⟨σᶻ_n⟩ = 2 G_nn − 1`, internal order.
pub fn magnetization_profile(g: &CorrelationMatrix) -> Vec<f64> {
    (0..g.dim()).map(|i| 2.0 * g.occupation(i) - 1.0).collect()
}

/// Magnetization on chain 1 indexed by the distance `p` from the contact.
pub fn chain_magnetization(g: &CorrelationMatrix) -> Vec<f64> {
    let map = SiteIndexMap::new(g.sites());
    (0..g.sites())
        .map(|p| 2.0 * g.occupation(map.chain1_site(p)) - 1.0)
        .collect()
}

/// Magnetization current `2K i (G_ft − G_tf)` carried from site `f` to site `t`.
pub fn bond_current(g: &CorrelationMatrix, hopping: f64, from: usize, to: usize) -> f64 {
    let d = g.get(from, to) - g.get(to, from);
    (c64::new(0.0, 2.0 * hopping) * d).re
}

/// Bond currents of both chains, indexed by the bond `p` joining the sites at
/// distances `p + 1` and `p` from the contact.
///
/// Positive values flow towards the contact site. With this orientation the
/// currents satisfy `dm_q/dt = j_q − j_{q−1}` and the drive, which pulls the
/// chains towards zero magnetization, registers as a positive current into
/// the bulk for a fully polarized start.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentProfile {
    pub chain1: Vec<f64>,
    pub chain2: Vec<f64>,
}

pub fn current_profile(g: &CorrelationMatrix, spec: &SystemSpec) -> Result<CurrentProfile> {
    if g.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: g.dim(),
        });
    }
    let n = spec.sites();
    let k = spec.hopping();
    let bonds = n.saturating_sub(1);
    let chain1 = (0..bonds)
        .map(|p| bond_current(g, k, n - 2 - p, n - 1 - p))
        .collect();
    let chain2 = (0..bonds)
        .map(|p| bond_current(g, k, n + p + 1, n + p))
        .collect();
    Ok(CurrentProfile { chain1, chain2 })
}

fn check_pair(g: &CorrelationMatrix, a: usize, b: usize) -> Result<()> {
    if a >= b {
        return Err(Error::InvalidSites {
            a,
            b,
            reason: "need a < b",
        });
    }
    if b >= g.dim() {
        return Err(Error::InvalidSites {
            a,
            b,
            reason: "site out of range",
        });
    }
    Ok(())
}

/// Majorana operators `A_j = c†_j + c_j`, `B_j = c†_j − c_j`.
#[derive(Debug, Clone, Copy)]
enum Majorana {
    A(usize),
    B(usize),
}

/// `⟨γ γ'⟩` for a number-conserving state.
fn majorana_contraction(g: &CorrelationMatrix, x: Majorana, y: Majorana) -> c64 {
    let pair = |i: usize, j: usize| (g.get(i, j), g.get(j, i), if i == j { 1.0 } else { 0.0 });
    match (x, y) {
        (Majorana::A(i), Majorana::A(j)) => {
            let (cij, cji, d) = pair(i, j);
            cij - cji + d
        }
        (Majorana::B(i), Majorana::B(j)) => {
            let (cij, cji, d) = pair(i, j);
            cji - cij - d
        }
        (Majorana::A(i), Majorana::B(j)) => {
            let (cij, cji, d) = pair(i, j);
            -cij - cji + d
        }
        (Majorana::B(i), Majorana::A(j)) => {
            let (cij, cji, d) = pair(i, j);
            cij + cji - d
        }
    }
}

/// `⟨c†_a ∏_{a<j<b}(1 − 2n_j) c_b⟩` by Wick's theorem on Majorana operators:
/// expanding `c†_a` and `c_b` gives four strings of `2(b − a)` Majoranas, each
/// evaluated as a Pfaffian.
pub fn string_two_point(g: &CorrelationMatrix, a: usize, b: usize) -> Result<c64> {
    check_pair(g, a, b)?;
    let m = 2 * (b - a);
    let mut ops = Vec::with_capacity(m);
    ops.push(Majorana::A(a));
    for j in (a + 1)..b {
        ops.push(Majorana::A(j));
        ops.push(Majorana::B(j));
    }
    ops.push(Majorana::A(b));
    let mut total = ZERO;
    for (left, lw) in [(Majorana::A(a), 1.0), (Majorana::B(a), 1.0)] {
        for (right, rw) in [(Majorana::A(b), 1.0), (Majorana::B(b), -1.0)] {
            ops[0] = left;
            ops[m - 1] = right;
            let mat = Mat::<c64>::from_fn(m, m, |k, l| {
                if k < l {
                    majorana_contraction(g, ops[k], ops[l])
                } else if k > l {
                    -majorana_contraction(g, ops[l], ops[k])
                } else {
                    ZERO
                }
            });
            total += pfaffian::pfaffian_unchecked(mat) * (0.25 * lw * rw);
        }
    }
    Ok(total)
}

/// Same quantity as [`string_two_point`] through a `(b − a) × (b − a)`
/// determinant of fermionic contractions:
/// `det [[G_ab, G_aS], [−2 G_Sb, 𝟙 − 2 G_SS]]` with `S = {a+1, …, b−1}`.
pub fn string_two_point_det(g: &CorrelationMatrix, a: usize, b: usize) -> Result<c64> {
    check_pair(g, a, b)?;
    let size = b - a;
    // row/column 0 carry a and b; rows/columns k ≥ 1 carry site a + k
    let mat = Mat::<c64>::from_fn(size, size, |r, c| {
        let row_site = if r == 0 { a } else { a + r };
        let col_site = if c == 0 { b } else { a + c };
        let v = g.get(row_site, col_site);
        match (r, c) {
            (0, _) => v,
            (_, 0) => v * -2.0,
            _ => {
                let d = if r == c { 1.0 } else { 0.0 };
                c64::new(d, 0.0) - v * 2.0
            }
        }
    });
    Ok(linalg::determinant(mat))
}

/// `⟨σ⁺_a σ⁻_b⟩` including the parity of the Bell pair between the chains.
pub fn spin_flip_correlator(g: &CorrelationMatrix, a: usize, b: usize) -> Result<c64> {
    // the determinant is an order of magnitude cheaper than four Pfaffians
    let string = string_two_point_det(g, a, b)?;
    let map = SiteIndexMap::new(g.sites());
    if map.chain(a) != map.chain(b) {
        Ok(-string)
    } else {
        Ok(string)
    }
}

/// `⟨σᶻ_a σᶻ_b⟩ = 4(G_aa G_bb − |G_ab|²) − 2G_aa − 2G_bb + 1`.
pub fn zz_correlator(g: &CorrelationMatrix, a: usize, b: usize) -> Result<f64> {
    if a == b {
        return Err(Error::InvalidSites {
            a,
            b,
            reason: "need distinct sites",
        });
    }
    if a.max(b) >= g.dim() {
        return Err(Error::InvalidSites {
            a,
            b,
            reason: "site out of range",
        });
    }
    let (na, nb) = (g.occupation(a), g.occupation(b));
    Ok(4.0 * (na * nb - g.get(a, b).norm_sqr()) - 2.0 * na - 2.0 * nb + 1.0)
}

/// Two-spin reduced density matrix. Number conservation makes it an X state:
/// populations from `m_a`, `m_b`, `⟨σᶻσᶻ⟩` and one coherence
/// `ρ_{↑↓,↓↑} = ⟨σ⁻_a σ⁺_b⟩`.
pub fn two_site_rdm(g: &CorrelationMatrix, a: usize, b: usize) -> Result<TwoSiteState> {
    check_pair(g, a, b)?;
    let ma = 2.0 * g.occupation(a) - 1.0;
    let mb = 2.0 * g.occupation(b) - 1.0;
    let zz = zz_correlator(g, a, b)?;
    let flip = spin_flip_correlator(g, a, b)?;
    let mut pop = [
        0.25 * (1.0 + ma + mb + zz),
        0.25 * (1.0 + ma - mb - zz),
        0.25 * (1.0 - ma + mb - zz),
        0.25 * (1.0 - ma - mb + zz),
    ];
    let mut coherence = flip.conj();
    // spectrum: the two corners plus the (↑↓, ↓↑) block
    let mean = 0.5 * (pop[UD] + pop[DU]);
    let radius = (0.25 * (pop[UD] - pop[DU]).powi(2) + coherence.norm_sqr()).sqrt();
    let smallest = pop[UU].min(pop[DD]).min(mean - radius);
    if smallest < -PSD_TOL {
        return Err(Error::NotPositive(smallest));
    }
    for k in [UU, DD] {
        pop[k] = pop[k].max(0.0);
    }
    if mean - radius < 0.0 {
        // drop the small negative eigenvalue of the coherence block
        let upper = mean + radius;
        let (vx, vy) = if coherence.norm() > 0.0 {
            let dx = upper - pop[DU];
            let norm = (dx * dx + coherence.norm_sqr()).sqrt();
            (c64::new(dx / norm, 0.0), coherence.conj() / norm)
        } else if pop[UD] >= pop[DU] {
            (c64::new(1.0, 0.0), ZERO)
        } else {
            (ZERO, c64::new(1.0, 0.0))
        };
        pop[UD] = upper * vx.norm_sqr();
        pop[DU] = upper * vy.norm_sqr();
        coherence = vx * vy.conj() * upper;
    }
    let mut rho = [[ZERO; 4]; 4];
    for k in 0..4 {
        rho[k][k] = c64::new(pop[k], 0.0);
    }
    rho[UD][DU] = coherence;
    rho[DU][UD] = coherence.conj();
    Ok(TwoSiteState::new((a, b), rho))
}

/// Concurrence between facing spins for every pair distance `p = 0..N`.
pub fn cross_concurrence_profile(g: &CorrelationMatrix) -> Result<Vec<f64>> {
    let map = SiteIndexMap::new(g.sites());
    (0..g.sites())
        .map(|p| {
            let (a, b) = map.mirror_pair(p);
            concurrence_x_state(&two_site_rdm(g, a, b)?)
        })
        .collect()
}

/// Nearest-neighbour concurrence along chain 1 between the sites at distances
/// `p` and `p + 1` from the contact, `p = 0..N−1`.
pub fn longitudinal_concurrence_profile(g: &CorrelationMatrix) -> Result<Vec<f64>> {
    let n = g.sites();
    (0..n.saturating_sub(1))
        .map(|p| concurrence_x_state(&two_site_rdm(g, n - 2 - p, n - 1 - p)?))
        .collect()
}

/// Samples of one observable over a set of times and pair/site parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSeries {
    pub observable: String,
    pub parameters: Vec<usize>,
    pub times: Vec<f64>,
    /// `values[t][k]` belongs to `times[t]` and `parameters[k]`.
    pub values: Vec<Vec<f64>>,
}

impl ProfileSeries {
    pub fn new(observable: impl Into<String>, parameters: Vec<usize>) -> Self {
        Self {
            observable: observable.into(),
            parameters,
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn push(&mut self, time: f64, row: Vec<f64>) -> Result<()> {
        if row.len() != self.parameters.len() {
            return Err(Error::DimensionMismatch {
                expected: self.parameters.len(),
                found: row.len(),
            });
        }
        if let Some(&last) = self.times.last() {
            if time <= last {
                return Err(Error::invalid("time", "profile times must increase"));
            }
        }
        self.times.push(time);
        self.values.push(row);
        Ok(())
    }

    /// Time series of parameter index `k`.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[k]).collect()
    }
}

/// Which chain a site belongs to, for callers that only hold a matrix.
pub fn chain_of(g: &CorrelationMatrix, site: usize) -> Chain {
    SiteIndexMap::new(g.sites()).chain(site)
}
