//! Time evolution of the chain correlation matrix.
//!
//! Two routes are provided. The discrete route conjugates the system plus one
//! fresh Bell pair by `exp(−iτT)` and traces the pair out again, once per
//! collision. The continuous route integrates the limiting equation
//!
//! ```text
//! dG/dt = −i[T_S, G] − (Γ²/2){G, ΘΘ†} + Γ² Θ G_B Θ†
//!       = W G + G W† + Q,     W = −i T_S − (Γ²/2) ΘΘ†
//! ```
//!
//! either with fixed-step RK4 or exactly through the eigendecomposition of the
//! drift matrix `W`. `W` never couples the two chains, so it is decomposed one
//! `N × N` chain block at a time.
//!
//! The sign of the commutator follows the collision map `exp(−iτT) G exp(iτT)`.
//! For `G_ij = ⟨c†_i c_j⟩` this is the evolution generated by `−H`; the two
//! differ by complex conjugation of `G`, which leaves occupations, density
//! correlations and concurrences unchanged and reverses currents.

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Eigensystem, I, ZERO};
use crate::model::{
    self, BathCorrelation, Chain, CorrelationMatrix, SystemSpec, SPECTRUM_TOL,
};

/// Largest eigenvector condition number accepted by the exact propagator.
pub const MAX_CONDITION: f64 = 1e10;
/// Spectral range tolerated along an RK4 trajectory before the step is rejected.
pub const RK4_SPECTRUM_TOL: f64 = 1e-6;
/// Largest chain for which the Kronecker-product Lyapunov fallback is used.
const KRONECKER_MAX_SITES: usize = 40;

/// `W = −i T_S − (Γ²/2) ΘΘ†`.
#[derive(Debug, Clone)]
pub struct DriftMatrix {
    sites: usize,
    matrix: CMat,
}

impl DriftMatrix {
    pub fn new(spec: &SystemSpec) -> Self {
        let ts = model::system_hopping(spec);
        let th = model::theta(spec);
        let rate = spec.coupling() * spec.coupling();
        let proj = &th * th.transpose();
        let dim = spec.dim();
        let matrix = Mat::from_fn(dim, dim, |i, j| {
            -I * ts[(i, j)] - c64::new(0.5 * rate * proj[(i, j)], 0.0)
        });
        Self {
            sites: spec.sites(),
            matrix,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// The `N × N` diagonal block acting on one chain.
    pub fn chain_block(&self, chain: Chain) -> CMat {
        let off = chain_offset(chain, self.sites);
        self.matrix
            .as_ref()
            .submatrix(off, off, self.sites, self.sites)
            .to_owned()
    }

    pub fn decompose(&self) -> Result<DriftEigen> {
        let first = Eigensystem::new(self.chain_block(Chain::First).as_ref())?;
        let second = Eigensystem::new(self.chain_block(Chain::Second).as_ref())?;
        Ok(DriftEigen {
            sites: self.sites,
            blocks: [first, second],
        })
    }

    /// All eigenvalues (chain 1 block first).
    pub fn eigenvalues(&self) -> Result<Vec<c64>> {
        let mut out = Vec::with_capacity(2 * self.sites);
        for chain in [Chain::First, Chain::Second] {
            let block = self.chain_block(chain);
            out.extend(block.eigenvalues().map_err(|_| Error::EigenFailure)?);
        }
        Ok(out)
    }
}

/// Per-chain eigendecompositions of the drift matrix.
#[derive(Debug, Clone)]
pub struct DriftEigen {
    sites: usize,
    blocks: [Eigensystem; 2],
}

impl DriftEigen {
    pub fn block(&self, chain: Chain) -> &Eigensystem {
        &self.blocks[chain_index(chain)]
    }

    pub fn condition(&self) -> f64 {
        self.blocks[0].condition.max(self.blocks[1].condition)
    }

    pub fn eigenvalues(&self) -> Vec<c64> {
        self.blocks
            .iter()
            .flat_map(|b| b.values.iter().copied())
            .collect()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }
}

fn chain_index(chain: Chain) -> usize {
    match chain {
        Chain::First => 0,
        Chain::Second => 1,
    }
}

fn chain_offset(chain: Chain, sites: usize) -> usize {
    chain_index(chain) * sites
}

/// Structured right-hand side of the continuous equation. `T_S` is applied as
/// a tridiagonal stencil so one evaluation costs `O(N²)`.
#[derive(Debug, Clone)]
struct Generator {
    sites: usize,
    hopping: f64,
    rate: f64,
    bath: [[f64; 2]; 2],
}

impl Generator {
    fn new(spec: &SystemSpec) -> Self {
        Self {
            sites: spec.sites(),
            hopping: spec.hopping(),
            rate: spec.coupling() * spec.coupling(),
            bath: model::bath_correlation().entries(),
        }
    }

    fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> {
        let n = self.sites;
        let (lo, hi) = if i < n { (0, n) } else { (n, 2 * n) };
        let left = (i > lo).then(|| i - 1);
        let right = (i + 1 < hi).then(|| i + 1);
        left.into_iter().chain(right)
    }

    fn apply(&self, g: &CMat, out: &mut CMat) {
        let dim = 2 * self.sites;
        let k = self.hopping;
        let contacts = [self.sites - 1, self.sites];
        for j in 0..dim {
            for i in 0..dim {
                // [T, G]_ij with T_{i,i±1} = −K inside each chain
                let mut tg = ZERO;
                for m in self.neighbours(i) {
                    tg += g[(m, j)];
                }
                let mut gt = ZERO;
                for m in self.neighbours(j) {
                    gt += g[(i, m)];
                }
                out[(i, j)] = -I * (-k) * (tg - gt);
            }
        }
        let half = 0.5 * self.rate;
        for &c in &contacts {
            for j in 0..dim {
                let v = g[(c, j)];
                out[(c, j)] -= v * half;
            }
            for i in 0..dim {
                let v = g[(i, c)];
                out[(i, c)] -= v * half;
            }
        }
        for (a, &ca) in contacts.iter().enumerate() {
            for (b, &cb) in contacts.iter().enumerate() {
                out[(ca, cb)] += c64::new(self.rate * self.bath[a][b], 0.0);
            }
        }
    }
}

/// `dG/dt` of the continuous equation.
pub fn lindblad_rhs(g: &CorrelationMatrix, spec: &SystemSpec) -> Result<CMat> {
    check_dim(g, spec)?;
    let gen = Generator::new(spec);
    let mut out = Mat::zeros(spec.dim(), spec.dim());
    gen.apply(g.matrix(), &mut out);
    Ok(out)
}

fn check_dim(g: &CorrelationMatrix, spec: &SystemSpec) -> Result<()> {
    if g.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: g.dim(),
        });
    }
    Ok(())
}

/// How a trajectory was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Rk4 { dt: f64 },
    Exact,
    Discrete { tau: f64 },
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub state: CorrelationMatrix,
}

/// Time-ordered correlation-matrix snapshots.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: SystemSpec,
    pub method: Method,
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("sample_times", "no sample times requested"));
    }
    if times[0] < 0.0 || !times.iter().all(|t| t.is_finite()) {
        return Err(Error::invalid("sample_times", "times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("sample_times", "times must be strictly increasing"));
    }
    Ok(())
}

/// Largest RK4 step accepted for `spec`: resolves both the ballistic scale and
/// the dissipative rate.
pub fn max_step(spec: &SystemSpec) -> f64 {
    let rate = spec.coupling() * spec.coupling();
    if rate > 0.0 {
        (0.5 / rate).min(0.05)
    } else {
        0.05
    }
}

/// Fixed-step classical RK4 from `t = 0`, recording the state at each of
/// `times`. Between samples the interval is split into equal steps no larger
/// than `dt`.
pub fn propagate_rk4(
    g0: &CorrelationMatrix,
    spec: &SystemSpec,
    times: &[f64],
    dt: f64,
) -> Result<Trajectory> {
    check_dim(g0, spec)?;
    check_times(times)?;
    let limit = max_step(spec);
    if !(dt > 0.0 && dt <= limit) {
        return Err(Error::StepTooLarge { dt, max: limit });
    }
    let gen = Generator::new(spec);
    let dim = spec.dim();
    let mut g = g0.matrix().clone();
    let mut k1 = Mat::zeros(dim, dim);
    let mut k2 = Mat::zeros(dim, dim);
    let mut k3 = Mat::zeros(dim, dim);
    let mut k4 = Mat::zeros(dim, dim);
    let mut tmp = Mat::zeros(dim, dim);
    let mut now = 0.0;
    let mut snapshots = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - now;
        let steps = if span > 0.0 { (span / dt).ceil() as usize } else { 0 };
        if steps > 0 {
            let h = span / steps as f64;
            for _ in 0..steps {
                gen.apply(&g, &mut k1);
                combine(&mut tmp, &g, 0.5 * h, &k1);
                gen.apply(&tmp, &mut k2);
                combine(&mut tmp, &g, 0.5 * h, &k2);
                gen.apply(&tmp, &mut k3);
                combine(&mut tmp, &g, h, &k3);
                gen.apply(&tmp, &mut k4);
                let w = h / 6.0;
                for j in 0..dim {
                    for i in 0..dim {
                        g[(i, j)] += (k1[(i, j)] + (k2[(i, j)] + k3[(i, j)]) * 2.0 + k4[(i, j)]) * w;
                    }
                }
                linalg::hermitize(&mut g);
            }
        }
        now = target;
        let state = CorrelationMatrix::from_hermitian(g.clone());
        let (lo, hi) = state.spectrum_range()?;
        if lo < -RK4_SPECTRUM_TOL || hi > 1.0 + RK4_SPECTRUM_TOL {
            return Err(Error::Unphysical {
                time: now,
                min: lo,
                max: hi,
            });
        }
        snapshots.push(Snapshot { time: now, state });
    }
    Ok(Trajectory {
        spec: spec.clone(),
        method: Method::Rk4 { dt },
        snapshots,
    })
}

/// `out = base + h · slope`
fn combine(out: &mut CMat, base: &CMat, h: f64, slope: &CMat) {
    for j in 0..base.ncols() {
        for i in 0..base.nrows() {
            out[(i, j)] = base[(i, j)] + slope[(i, j)] * h;
        }
    }
}

/// Source term `Γ² Θ G_B Θ†`, split into chain blocks.
fn source_blocks(spec: &SystemSpec) -> [[CMat; 2]; 2] {
    let n = spec.sites();
    let rate = spec.coupling() * spec.coupling();
    let bath = model::bath_correlation().entries();
    // chain 1 couples through its last site, chain 2 through its first
    let local = [n - 1, 0];
    let mut out = [
        [Mat::zeros(n, n), Mat::zeros(n, n)],
        [Mat::zeros(n, n), Mat::zeros(n, n)],
    ];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c][(local[r], local[c])] = c64::new(rate * bath[r][c], 0.0);
        }
    }
    out
}

/// Solves `W X + X W† = −Q` in the eigenbasis of `W`.
fn lyapunov_eigen(eig: &DriftEigen, q: &[[CMat; 2]; 2]) -> Result<[[CMat; 2]; 2]> {
    let n = eig.sites;
    let mut out = [
        [Mat::zeros(n, n), Mat::zeros(n, n)],
        [Mat::zeros(n, n), Mat::zeros(n, n)],
    ];
    for r in 0..2 {
        for c in 0..2 {
            let br = &eig.blocks[r];
            let bc = &eig.blocks[c];
            let qt = &br.inverse * &q[r][c] * bc.inverse.adjoint();
            let mut y = Mat::<c64>::zeros(n, n);
            for l in 0..n {
                for k in 0..n {
                    let denom = br.values[k] + bc.values[l].conj();
                    if denom.norm() < 1e-300 {
                        return Err(Error::SingularLyapunov);
                    }
                    y[(k, l)] = -qt[(k, l)] / denom;
                }
            }
            out[r][c] = &br.vectors * &y * bc.vectors.adjoint();
        }
    }
    Ok(out)
}

/// Dense vectorized solve, used when `W` is too close to defective.
fn lyapunov_kronecker(drift: &DriftMatrix, q: &[[CMat; 2]; 2]) -> Result<[[CMat; 2]; 2]> {
    let n = drift.sites;
    let blocks = [drift.chain_block(Chain::First), drift.chain_block(Chain::Second)];
    let mut out = [
        [Mat::zeros(n, n), Mat::zeros(n, n)],
        [Mat::zeros(n, n), Mat::zeros(n, n)],
    ];
    let m = n * n;
    for r in 0..2 {
        for c in 0..2 {
            let wr = &blocks[r];
            let wc = &blocks[c];
            // vec(W_r X + X W_c†) = (I ⊗ W_r + conj(W_c) ⊗ I) vec(X), column-major
            let op = Mat::<c64>::from_fn(m, m, |row, col| {
                let (i, j) = (row % n, row / n);
                let (k, l) = (col % n, col / n);
                let mut v = ZERO;
                if j == l {
                    v += wr[(i, k)];
                }
                if i == k {
                    v += wc[(j, l)].conj();
                }
                v
            });
            let rhs = Mat::<c64>::from_fn(m, 1, |row, _| -q[r][c][(row % n, row / n)]);
            let x = linalg::solve(op.as_ref(), rhs.as_ref());
            if !x.as_ref().norm_max().is_finite() {
                return Err(Error::SingularLyapunov);
            }
            out[r][c] = Mat::from_fn(n, n, |i, j| x[(i + j * n, 0)]);
        }
    }
    Ok(out)
}

fn assemble(blocks: &[[CMat; 2]; 2], n: usize) -> CMat {
    Mat::from_fn(2 * n, 2 * n, |i, j| blocks[i / n][j / n][(i % n, j % n)])
}

/// Unique stationary correlation matrix, from the Lyapunov equation
/// `W X + X W† = −Γ² Θ G_B Θ†`. Independent of the initial magnetization.
pub fn steady_state(spec: &SystemSpec) -> Result<CorrelationMatrix> {
    spec.require_dissipative()?;
    let drift = DriftMatrix::new(spec);
    let q = source_blocks(spec);
    let eig = drift.decompose()?;
    let blocks = if eig.condition() <= MAX_CONDITION {
        lyapunov_eigen(&eig, &q)?
    } else if spec.sites() <= KRONECKER_MAX_SITES {
        lyapunov_kronecker(&drift, &q)?
    } else {
        return Err(Error::IllConditioned {
            condition: eig.condition(),
        });
    };
    Ok(CorrelationMatrix::from_hermitian(assemble(&blocks, spec.sites())))
}

/// Closed-form stationary state: half filling on every site and `1/2` between
/// facing sites, nothing else.
pub fn analytic_steady_state(sites: usize) -> CorrelationMatrix {
    let dim = 2 * sites;
    CorrelationMatrix::from_hermitian(Mat::from_fn(dim, dim, |i, j| {
        if i == j || i + j == dim - 1 {
            c64::new(0.5, 0.0)
        } else {
            ZERO
        }
    }))
}

/// Exact solution of the continuous equation, `G(t) = G* + e^{Wt}(G₀ − G*)e^{W†t}`.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    spec: SystemSpec,
    eigen: DriftEigen,
    steady: CorrelationMatrix,
    steady_blocks: [[CMat; 2]; 2],
}

impl ExactPropagator {
    /// Decomposes `W` once. Refuses near-defective drift matrices.
    pub fn new(spec: &SystemSpec) -> Result<Self> {
        spec.require_dissipative()?;
        let eigen = DriftMatrix::new(spec).decompose()?;
        if eigen.condition() > MAX_CONDITION {
            return Err(Error::IllConditioned {
                condition: eigen.condition(),
            });
        }
        let steady_blocks = lyapunov_eigen(&eigen, &source_blocks(spec))?;
        let steady = CorrelationMatrix::from_hermitian(assemble(&steady_blocks, spec.sites()));
        Ok(Self {
            spec: spec.clone(),
            eigen,
            steady,
            steady_blocks,
        })
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn steady_state(&self) -> &CorrelationMatrix {
        &self.steady
    }

    pub fn eigen(&self) -> &DriftEigen {
        &self.eigen
    }

    /// Projects `g0 − G*` onto the eigenbasis; the result evaluates `G(t)` cheaply.
    pub fn prepare(&self, g0: &CorrelationMatrix) -> Result<Evolution<'_>> {
        check_dim(g0, &self.spec)?;
        let n = self.spec.sites();
        let mut x0 = [
            [Mat::zeros(n, n), Mat::zeros(n, n)],
            [Mat::zeros(n, n), Mat::zeros(n, n)],
        ];
        for r in 0..2 {
            for c in 0..2 {
                let (ro, co) = (r * n, c * n);
                let diff = Mat::<c64>::from_fn(n, n, |i, j| {
                    g0.get(ro + i, co + j) - self.steady.get(ro + i, co + j)
                });
                x0[r][c] = &self.eigen.blocks[r].inverse
                    * &diff
                    * self.eigen.blocks[c].inverse.adjoint();
            }
        }
        Ok(Evolution { prop: self, x0 })
    }

    pub fn evolve(&self, g0: &CorrelationMatrix, t: f64) -> Result<CorrelationMatrix> {
        Ok(self.prepare(g0)?.state(t))
    }

    pub fn trajectory(&self, g0: &CorrelationMatrix, times: &[f64]) -> Result<Trajectory> {
        check_times(times)?;
        let evo = self.prepare(g0)?;
        let snapshots = times
            .iter()
            .map(|&t| Snapshot {
                time: t,
                state: evo.state(t),
            })
            .collect();
        Ok(Trajectory {
            spec: self.spec.clone(),
            method: Method::Exact,
            snapshots,
        })
    }
}

/// An initial condition expressed in the drift eigenbasis.
#[derive(Debug, Clone)]
pub struct Evolution<'a> {
    prop: &'a ExactPropagator,
    x0: [[CMat; 2]; 2],
}

impl Evolution<'_> {
    fn phases(&self, chain: usize, t: f64) -> Vec<c64> {
        self.prop.eigen.blocks[chain]
            .values
            .iter()
            .map(|&l| (l * t).exp())
            .collect()
    }

    /// One `N × N` block of `G(t)`.
    pub fn block(&self, t: f64, row: Chain, col: Chain) -> CMat {
        let (r, c) = (chain_index(row), chain_index(col));
        let n = self.prop.spec.sites();
        let er = self.phases(r, t);
        let ec = self.phases(c, t);
        let scaled = Mat::<c64>::from_fn(n, n, |k, l| er[k] * self.x0[r][c][(k, l)] * ec[l].conj());
        let vr = &self.prop.eigen.blocks[r].vectors;
        let vc = &self.prop.eigen.blocks[c].vectors;
        let mut out = vr * &scaled * vc.adjoint();
        out += &self.prop.steady_blocks[r][c];
        out
    }

    pub fn state(&self, t: f64) -> CorrelationMatrix {
        let n = self.prop.spec.sites();
        let blocks = [
            [
                self.block(t, Chain::First, Chain::First),
                self.block(t, Chain::First, Chain::Second),
            ],
            [
                self.block(t, Chain::Second, Chain::First),
                self.block(t, Chain::Second, Chain::Second),
            ],
        ];
        CorrelationMatrix::from_hermitian(assemble(&blocks, n))
    }

    /// Selected entries `G_ij(t)` at `O(N²)` cost each, without forming `G(t)`.
    pub fn entries(&self, pairs: &[(usize, usize)], t: f64) -> Vec<c64> {
        let n = self.prop.spec.sites();
        let phases = [self.phases(0, t), self.phases(1, t)];
        let row_vec = |site: usize| -> (usize, Vec<c64>) {
            let chain = site / n;
            let local = site % n;
            let v = &self.prop.eigen.blocks[chain].vectors;
            (chain, (0..n).map(|k| v[(local, k)] * phases[chain][k]).collect())
        };
        pairs
            .iter()
            .map(|&(i, j)| {
                let (ci, ui) = row_vec(i);
                let (cj, uj) = row_vec(j);
                let x = &self.x0[ci][cj];
                let mut acc = ZERO;
                for k in 0..n {
                    let mut inner = ZERO;
                    for l in 0..n {
                        inner += x[(k, l)] * uj[l].conj();
                    }
                    acc += ui[k] * inner;
                }
                acc + self.prop.steady.get(i, j)
            })
            .collect()
    }
}

/// `G₀` evolved to time `t` with the exact propagator.
pub fn exact_propagate(
    g0: &CorrelationMatrix,
    spec: &SystemSpec,
    t: f64,
) -> Result<CorrelationMatrix> {
    ExactPropagator::new(spec)?.evolve(g0, t)
}

/// Smallest decay rate `min −Re λ(W)`.
pub fn spectral_gap(spec: &SystemSpec) -> Result<f64> {
    let values = DriftMatrix::new(spec).eigenvalues()?;
    Ok(values
        .iter()
        .map(|l| -l.re)
        .fold(f64::INFINITY, f64::min))
}

/// One collision with a fresh Bell pair per step, at finite `τ`.
#[derive(Debug, Clone)]
pub struct DiscreteRip {
    dim: usize,
    tau: f64,
    propagator: CMat,
    bath: BathCorrelation,
}

impl DiscreteRip {
    pub fn new(spec: &SystemSpec) -> Result<Self> {
        let hopping = model::full_hopping(spec)?;
        Self::from_hopping(spec, hopping.as_ref())
    }

    /// Uses a caller-supplied `(2N+2)`-dimensional hopping matrix.
    pub fn from_hopping(spec: &SystemSpec, hopping: faer::MatRef<'_, f64>) -> Result<Self> {
        let tau = spec
            .tau()
            .ok_or_else(|| Error::invalid("tau", "required for the discrete collision map"))?;
        let dim = spec.dim();
        if hopping.nrows() != dim + 2 || hopping.ncols() != dim + 2 {
            return Err(Error::DimensionMismatch {
                expected: dim + 2,
                found: hopping.nrows(),
            });
        }
        Ok(Self {
            dim,
            tau,
            propagator: linalg::unitary_propagator(hopping, tau)?,
            bath: model::bath_correlation(),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Embeds `g` next to an uncorrelated fresh pair, evolves for `τ`, and
    /// keeps the system block.
    pub fn step(&self, g: &CorrelationMatrix) -> Result<CorrelationMatrix> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: g.dim(),
            });
        }
        let d = self.dim;
        let bath = self.bath.entries();
        let full = Mat::<c64>::from_fn(d + 2, d + 2, |i, j| match (i < d, j < d) {
            (true, true) => g.get(i, j),
            (false, false) => c64::new(bath[i - d][j - d], 0.0),
            _ => ZERO,
        });
        let evolved = &self.propagator * &full * self.propagator.adjoint();
        Ok(CorrelationMatrix::from_hermitian(
            evolved.as_ref().submatrix(0, 0, d, d).to_owned(),
        ))
    }

    pub fn run(&self, g0: &CorrelationMatrix, steps: usize) -> Result<CorrelationMatrix> {
        let mut g = g0.clone();
        for _ in 0..steps {
            g = self.step(&g)?;
        }
        Ok(g)
    }

    /// Snapshots after each multiple of `every` collisions, up to `steps`.
    pub fn trajectory(
        &self,
        spec: &SystemSpec,
        g0: &CorrelationMatrix,
        steps: usize,
        every: usize,
    ) -> Result<Trajectory> {
        let every = every.max(1);
        let mut g = g0.clone();
        let mut snapshots = vec![Snapshot {
            time: 0.0,
            state: g.clone(),
        }];
        for k in 1..=steps {
            g = self.step(&g)?;
            if k % every == 0 || k == steps {
                snapshots.push(Snapshot {
                    time: k as f64 * self.tau,
                    state: g.clone(),
                });
            }
        }
        Ok(Trajectory {
            spec: spec.clone(),
            method: Method::Discrete { tau: self.tau },
            snapshots,
        })
    }
}

/// A single collision step.
pub fn rip_step_discrete(g: &CorrelationMatrix, spec: &SystemSpec) -> Result<CorrelationMatrix> {
    DiscreteRip::new(spec)?.step(g)
}

/// Correlators of the single-site (two-qubit) problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitCorrelators {
    /// `⟨c†₁c₁⟩`
    pub first: f64,
    /// `⟨c†₄c₄⟩`
    pub second: f64,
    /// `⟨c†₁c₄⟩`
    pub cross: f64,
}

/// Closed-form correlators for `N = 1`, where the equation reduces to
/// `dG/dt = −Γ²(G − G_B)`.
pub fn two_qubit_analytic(t: f64, mu1: f64, mu4: f64, coupling: f64) -> TwoQubitCorrelators {
    let decay = (-coupling * coupling * t).exp();
    TwoQubitCorrelators {
        first: 0.5 * (1.0 + mu1 * decay),
        second: 0.5 * (1.0 + mu4 * decay),
        cross: 0.5 * (1.0 - decay),
    }
}

/// Checks the spectral range of every snapshot.
pub fn check_trajectory(traj: &Trajectory) -> Result<()> {
    for snap in &traj.snapshots {
        let (lo, hi) = snap.state.spectrum_range()?;
        if lo < -SPECTRUM_TOL || hi > 1.0 + SPECTRUM_TOL {
            return Err(Error::Unphysical {
                time: snap.time,
                min: lo,
                max: hi,
            });
        }
    }
    Ok(())
}
