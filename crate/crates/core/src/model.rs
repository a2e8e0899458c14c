//! Static matrices, initial states and site indexing for two XX chains driven
//! at their facing ends by a stream of Bell pairs.
//!
//! Internal indexing is contiguous and 0-based: chain 1 occupies `0..N` and
//! chain 2 occupies `N..2N`. The contact sites (the only ones touched by the
//! drive) are `N − 1` (last site of chain 1) and `N` (first site of chain 2).
//! Published site labels skip the two bath sites, so chain 2 is labelled
//! `N + 3 ..= 2N + 2`; [`SiteIndexMap`] converts between the two.

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ZERO};

/// Hopping amplitude giving unit sound velocity.
pub const DEFAULT_HOPPING: f64 = 0.5;

/// Full parameterization of the driven two-chain model.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    sites: usize,
    hopping: f64,
    field: f64,
    coupling: f64,
    interaction_time: Option<f64>,
    magnetization: Vec<f64>,
}

impl SystemSpec {
    /// Chains of `sites` spins with a uniform initial magnetization `mu`.
    pub fn uniform(sites: usize, coupling: f64, mu: f64) -> Result<Self> {
        Self::with_profile(sites, coupling, vec![mu; 2 * sites])
    }

    /// Chains with an explicit per-site initial magnetization (internal order).
    pub fn with_profile(sites: usize, coupling: f64, magnetization: Vec<f64>) -> Result<Self> {
        let spec = Self {
            sites,
            hopping: DEFAULT_HOPPING,
            field: 0.0,
            coupling,
            interaction_time: None,
            magnetization,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn hopping_amplitude(mut self, hopping: f64) -> Result<Self> {
        self.hopping = hopping;
        self.validate()?;
        Ok(self)
    }

    /// The transverse field. It never enters a propagation matrix.
    pub fn field_strength(mut self, field: f64) -> Result<Self> {
        self.field = field;
        self.validate()?;
        Ok(self)
    }

    /// Duration of a single system/Bell-pair collision (discrete mode).
    pub fn interaction_time(mut self, tau: f64) -> Result<Self> {
        self.interaction_time = Some(tau);
        self.validate()?;
        Ok(self)
    }

    pub fn coupling_strength(mut self, coupling: f64) -> Result<Self> {
        self.coupling = coupling;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::invalid("N", "chains need at least one site"));
        }
        if !self.hopping.is_finite() {
            return Err(Error::invalid("K", "must be finite"));
        }
        if !self.field.is_finite() {
            return Err(Error::invalid("h", "must be finite"));
        }
        // Γ = 0 is accepted as the decoupled limit; steady-state solvers reject it.
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::invalid("gamma", "must be finite and non-negative"));
        }
        if let Some(tau) = self.interaction_time {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(Error::invalid("tau", "must be positive"));
            }
        }
        if self.magnetization.len() != 2 * self.sites {
            return Err(Error::invalid(
                "mu",
                format!(
                    "profile has {} entries, expected 2N = {}",
                    self.magnetization.len(),
                    2 * self.sites
                ),
            ));
        }
        if let Some(bad) = self
            .magnetization
            .iter()
            .find(|m| !(m.is_finite() && (-1.0..=1.0).contains(*m)))
        {
            return Err(Error::invalid("mu", format!("{bad} is outside [-1, 1]")));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Dimension of the system correlation matrix, `2N`.
    pub fn dim(&self) -> usize {
        2 * self.sites
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    /// Rescaled coupling Γ.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn tau(&self) -> Option<f64> {
        self.interaction_time
    }

    /// Bare collision coupling γ = Γ/√τ.
    pub fn bare_coupling(&self) -> Option<f64> {
        self.interaction_time.map(|tau| self.coupling / tau.sqrt())
    }

    pub fn magnetization(&self) -> &[f64] {
        &self.magnetization
    }

    pub fn index_map(&self) -> SiteIndexMap {
        SiteIndexMap::new(self.sites)
    }

    pub(crate) fn require_dissipative(&self) -> Result<()> {
        if self.coupling > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid("gamma", "must be positive for a unique steady state"))
        }
    }
}

/// Which chain an internal site belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chain {
    First,
    Second,
}

/// Conversion between internal indices, published labels and mirror pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteIndexMap {
    sites: usize,
}

impl SiteIndexMap {
    pub fn new(sites: usize) -> Self {
        Self { sites }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        2 * self.sites
    }

    pub fn contact_sites(&self) -> (usize, usize) {
        (self.sites - 1, self.sites)
    }

    pub fn chain(&self, site: usize) -> Chain {
        if site < self.sites {
            Chain::First
        } else {
            Chain::Second
        }
    }

    /// Site facing `site` on the other chain.
    pub fn mirror_site(&self, site: usize) -> usize {
        2 * self.sites - 1 - site
    }

    /// Internal sites `(a, b)`, `a < b`, of the facing pair at distance `p`
    /// from the drive.
    pub fn mirror_pair(&self, p: usize) -> (usize, usize) {
        assert!(p < self.sites, "pair parameter {p} out of range");
        (self.sites - 1 - p, self.sites + p)
    }

    /// Distance of `site` from its chain's contact site.
    pub fn distance_from_contact(&self, site: usize) -> usize {
        match self.chain(site) {
            Chain::First => self.sites - 1 - site,
            Chain::Second => site - self.sites,
        }
    }

    /// Site on chain 1 at distance `p` from the contact.
    pub fn chain1_site(&self, p: usize) -> usize {
        self.sites - 1 - p
    }

    /// Published label: chain 1 is `1..=N`, chain 2 is `N+3..=2N+2`.
    pub fn label(&self, site: usize) -> usize {
        match self.chain(site) {
            Chain::First => site + 1,
            Chain::Second => site + 3,
        }
    }

    pub fn from_label(&self, label: usize) -> Option<usize> {
        let n = self.sites;
        if (1..=n).contains(&label) {
            Some(label - 1)
        } else if (n + 3..=2 * n + 2).contains(&label) {
            Some(label - 3)
        } else {
            None
        }
    }
}

/// Two-point function `G_ij = ⟨c†_i c_j⟩` of the chain fermions.
///
/// The state is Gaussian and number conserving, so this matrix is the whole
/// state: anomalous correlators `⟨c_i c_j⟩` vanish identically and are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    matrix: CMat,
}

/// Hermiticity tolerance accepted on construction.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Allowed spectral overshoot outside `[0, 1]`.
pub const SPECTRUM_TOL: f64 = 1e-9;

impl CorrelationMatrix {
    /// Wraps a square matrix, rejecting non-Hermitian input and symmetrizing
    /// away round-off.
    pub fn from_matrix(mut matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let defect = linalg::hermiticity_defect(matrix.as_ref());
        if defect > HERMITICITY_TOL {
            return Err(Error::invalid(
                "G",
                format!("not Hermitian (defect {defect:.3e})"),
            ));
        }
        linalg::hermitize(&mut matrix);
        Ok(Self { matrix })
    }

    pub(crate) fn from_hermitian(mut matrix: CMat) -> Self {
        linalg::hermitize(&mut matrix);
        Self { matrix }
    }

    pub fn from_real_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::from_matrix(Mat::from_fn(dim, dim, |i, j| c64::new(f(i, j), 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn sites(&self) -> usize {
        self.dim() / 2
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.matrix[(i, j)]
    }

    pub fn occupation(&self, i: usize) -> f64 {
        self.matrix[(i, i)].re
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_inner(self) -> CMat {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Smallest and largest eigenvalue.
    pub fn spectrum_range(&self) -> Result<(f64, f64)> {
        let ev = linalg::hermitian_eigenvalues(self.matrix.as_ref())?;
        Ok((
            ev.first().copied().unwrap_or(0.0),
            ev.last().copied().unwrap_or(0.0),
        ))
    }

    /// Whether every eigenvalue lies in `[−tol, 1 + tol]`.
    pub fn is_physical(&self, tol: f64) -> Result<bool> {
        let (lo, hi) = self.spectrum_range()?;
        Ok(lo >= -tol && hi <= 1.0 + tol)
    }

    /// Largest entry-wise distance to another matrix of the same size.
    pub fn distance(&self, other: &CorrelationMatrix) -> f64 {
        linalg::max_abs((&self.matrix - &other.matrix).as_ref())
    }
}

/// Two-point function of a single Bell pair `(|↑↓⟩ + |↓↑⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathCorrelation {
    entries: [[f64; 2]; 2],
}

impl BathCorrelation {
    pub fn bell_pair() -> Self {
        Self {
            entries: [[0.5, 0.5], [0.5, 0.5]],
        }
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.entries
    }

    pub fn matrix(&self) -> CMat {
        Mat::from_fn(2, 2, |i, j| c64::new(self.entries[i][j], 0.0))
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Ascending eigenvalues of the symmetric 2×2 matrix.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let [[a, b], [_, d]] = self.entries;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [mean - radius, mean + radius]
    }
}

pub fn bath_correlation() -> BathCorrelation {
    BathCorrelation::bell_pair()
}

/// Block-diagonal intra-chain hopping `A ⊕ A`, with `A` tridiagonal (−K).
pub fn system_hopping(spec: &SystemSpec) -> Mat<f64> {
    let n = spec.sites();
    let k = spec.hopping();
    Mat::from_fn(2 * n, 2 * n, |i, j| {
        let same_chain = (i < n) == (j < n);
        if same_chain && i.abs_diff(j) == 1 {
            -k
        } else {
            0.0
        }
    })
}

/// System-to-bath coupling pattern Θ (2N × 2): −1 at the two contact sites.
pub fn theta(spec: &SystemSpec) -> Mat<f64> {
    let n = spec.sites();
    Mat::from_fn(2 * n, 2, |i, j| match (i, j) {
        (r, 0) if r == n - 1 => -1.0,
        (r, 1) if r == n => -1.0,
        _ => 0.0,
    })
}

/// The `(2N+2)`-dimensional single-collision hopping matrix
/// `[[T_S, γΘ], [γΘᵀ, 0]]`, system modes first.
pub fn full_hopping(spec: &SystemSpec) -> Result<Mat<f64>> {
    let gamma = spec
        .bare_coupling()
        .ok_or_else(|| Error::invalid("tau", "required for the discrete collision map"))?;
    Ok(full_hopping_with(spec, gamma, 0.0))
}

/// As [`full_hopping`] but keeping the uniform `−h𝟙` shift. Only useful to
/// demonstrate that the field drops out of every propagated quantity.
pub fn full_hopping_including_field(spec: &SystemSpec) -> Result<Mat<f64>> {
    let gamma = spec
        .bare_coupling()
        .ok_or_else(|| Error::invalid("tau", "required for the discrete collision map"))?;
    Ok(full_hopping_with(spec, gamma, spec.field()))
}

fn full_hopping_with(spec: &SystemSpec, gamma: f64, field: f64) -> Mat<f64> {
    let dim = spec.dim();
    let ts = system_hopping(spec);
    let th = theta(spec);
    Mat::from_fn(dim + 2, dim + 2, |i, j| {
        let base = match (i < dim, j < dim) {
            (true, true) => ts[(i, j)],
            (true, false) => gamma * th[(i, j - dim)],
            (false, true) => gamma * th[(j, i - dim)],
            (false, false) => 0.0,
        };
        if i == j {
            base - field
        } else {
            base
        }
    })
}

/// Product state with `⟨c†_n c_n⟩ = (1 + μ_n)/2`.
pub fn initial_correlation(spec: &SystemSpec) -> CorrelationMatrix {
    let mu = spec.magnetization();
    let dim = spec.dim();
    CorrelationMatrix::from_hermitian(Mat::from_fn(dim, dim, |i, j| {
        if i == j {
            c64::new(0.5 * (1.0 + mu[i]), 0.0)
        } else {
            ZERO
        }
    }))
}
