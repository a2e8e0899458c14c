//! Reference evolution in the full 2^(2N)-dimensional spin space.
//!
//! Chain 1 is spins 0..N, chain 2 is spins N..2N. The two bath spins are
//! placed after both chains in the Jordan-Wigner ordering. In that ordering
//! tracing out the bath spins is the same as tracing out the bath fermion
//! modes, and the contact-bath hoppings become nonlocal spin operators
//! carrying the full strings. The generator is
//!
//!   dρ/dt = -i[H, ρ] - (Γ²/2) Tr_B [V, [V, ρ ⊗ Φ]]
//!
//! H carries the opposite sign to the physical chain Hamiltonian so that
//! expectation values line up with the library's ⟨c†_i c_j⟩ convention
//! (the two differ by complex conjugation).
//!
//! Physical spin observables assume a fresh Bell pair sitting between the
//! chains, so a spin flip carried across the contact picks up the bath parity
//! −1. That mapping is applied in [`SpinModel::flip`] and
//! [`SpinModel::two_site`]. No Wick contraction or Gaussian formula is used.

#![allow(dead_code)]

use faer::{c64, Mat};
use replichain::dynamics::ExactPropagator;
use replichain::model::{initial_correlation, CorrelationMatrix, SystemSpec};
use replichain::observables::{
    current_profile, magnetization_profile, spin_flip_correlator, two_site_rdm, zz_correlator,
};

pub type DMat = Mat<c64>;

const Z: c64 = c64 { re: 0.0, im: 0.0 };

/// Sparse operator with at most one nonzero per column: `col -> (row, coef)`.
#[derive(Clone)]
struct Monomial {
    map: Vec<Option<(usize, c64)>>,
}

/// Sum of monomials.
#[derive(Clone)]
struct Op {
    terms: Vec<Monomial>,
}

impl Monomial {
    fn identity(dim: usize) -> Self {
        Self {
            map: (0..dim).map(|i| Some((i, c64::new(1.0, 0.0)))).collect(),
        }
    }

    /// self ∘ other (apply `other` first).
    fn after(&self, other: &Monomial) -> Monomial {
        Monomial {
            map: other
                .map
                .iter()
                .map(|e| e.and_then(|(r, c)| self.map[r].map(|(r2, c2)| (r2, c * c2))))
                .collect(),
        }
    }

    fn scale(&self, s: c64) -> Monomial {
        Monomial {
            map: self.map.iter().map(|e| e.map(|(r, c)| (r, c * s))).collect(),
        }
    }
}

impl Op {
    fn from(m: Monomial) -> Self {
        Self { terms: vec![m] }
    }

    fn plus(mut self, other: Op) -> Op {
        self.terms.extend(other.terms);
        self
    }

    fn after(&self, other: &Op) -> Op {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.after(b));
            }
        }
        Op { terms }
    }

    fn scale(&self, s: c64) -> Op {
        Op {
            terms: self.terms.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// out += s · (self · rho)
    fn left_into(&self, rho: &DMat, s: c64, out: &mut DMat) {
        let d = rho.nrows();
        for m in &self.terms {
            for (k, e) in m.map.iter().enumerate() {
                if let Some((r, c)) = e {
                    let f = *c * s;
                    for j in 0..d {
                        out[(*r, j)] += f * rho[(k, j)];
                    }
                }
            }
        }
    }

    /// out += s · (rho · self)
    fn right_into(&self, rho: &DMat, s: c64, out: &mut DMat) {
        let d = rho.nrows();
        for m in &self.terms {
            for (col, e) in m.map.iter().enumerate() {
                if let Some((row, c)) = e {
                    let f = *c * s;
                    for i in 0..d {
                        out[(i, col)] += f * rho[(i, *row)];
                    }
                }
            }
        }
    }

    fn dense(&self, dim: usize) -> DMat {
        let mut m = DMat::zeros(dim, dim);
        for t in &self.terms {
            for (col, e) in t.map.iter().enumerate() {
                if let Some((row, c)) = e {
                    m[(*row, col)] += *c;
                }
            }
        }
        m
    }
}

/// Spins `0..count`; spin `s` is bit `count - 1 - s`, set bit = up.
#[derive(Clone, Copy)]
struct Register {
    count: usize,
}

impl Register {
    fn dim(self) -> usize {
        1 << self.count
    }

    fn bit(self, s: usize) -> usize {
        1 << (self.count - 1 - s)
    }

    fn raise(self, s: usize) -> Monomial {
        let b = self.bit(s);
        Monomial {
            map: (0..self.dim())
                .map(|i| (i & b == 0).then(|| (i | b, c64::new(1.0, 0.0))))
                .collect(),
        }
    }

    fn lower(self, s: usize) -> Monomial {
        let b = self.bit(s);
        Monomial {
            map: (0..self.dim())
                .map(|i| (i & b != 0).then(|| (i & !b, c64::new(1.0, 0.0))))
                .collect(),
        }
    }

    fn sz(self, s: usize) -> Monomial {
        let b = self.bit(s);
        Monomial {
            map: (0..self.dim())
                .map(|i| Some((i, c64::new(if i & b != 0 { 1.0 } else { -1.0 }, 0.0))))
                .collect(),
        }
    }

    /// `Π_{j in range} (−σᶻ_j)` as a diagonal operator.
    fn string(self, range: std::ops::Range<usize>) -> Monomial {
        let mask: usize = range.map(|j| self.bit(j)).sum();
        Monomial {
            map: (0..self.dim())
                .map(|i| {
                    // −σᶻ is −1 on up spins
                    let sign = if (i & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    Some((i, c64::new(sign, 0.0)))
                })
                .collect(),
        }
    }

    fn up(self, i: usize, s: usize) -> bool {
        i & self.bit(s) != 0
    }
}

/// Driven pair of spin chains.
pub struct SpinModel {
    sites: usize,
    hopping: f64,
    gamma: f64,
    reg: Register,
    hamiltonian: Op,
    /// `A_k` on the system side of the coupling.
    jumps: Vec<Op>,
    /// `⟨B_k B_l⟩` in the Bell pair.
    bath: Vec<Vec<c64>>,
    /// Cached `A_k A_l`.
    products: Vec<Vec<Op>>,
}

impl SpinModel {
    pub fn new(sites: usize, hopping: f64, gamma: f64) -> Self {
        assert!((1..=3).contains(&sites));
        let reg = Register { count: 2 * sites };
        let dim = reg.dim();
        // +K Σ (σ⁺σ⁻ + σ⁻σ⁺) on each chain's bonds
        let mut h = Op { terms: vec![] };
        for (lo, hi) in [(0, sites), (sites, 2 * sites)] {
            for i in lo..hi - 1 {
                let t = Op::from(reg.raise(i).after(&reg.lower(i + 1)))
                    .plus(Op::from(reg.lower(i).after(&reg.raise(i + 1))));
                h = h.plus(t.scale(c64::new(hopping, 0.0)));
            }
        }
        if h.terms.is_empty() {
            h = Op::from(Monomial::identity(dim).scale(Z));
        }

        // bath register after the system: f1 = spin 0, f2 = spin 1;
        // Φ = (|↑↓⟩ + |↓↑⟩)/√2, so ⟨f1† f2⟩ = 1/2
        let breg = Register { count: 2 };
        let mut phi = DMat::zeros(4, 4);
        for &(i, j) in &[(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
            phi[(i, j)] = c64::new(0.5, 0.0);
        }
        // c_i = S_{<i} σ⁻_i on the system, f_a = P_S ⊗ S_{<a} σ⁻_a on the bath
        let parity = reg.string(0..2 * sites);
        let create = |i: usize| reg.raise(i).after(&reg.string(0..i));
        let annihilate = |i: usize| reg.string(0..i).after(&reg.lower(i));
        let bath_create = |a: usize| breg.raise(a).after(&breg.string(0..a));
        let bath_annihilate = |a: usize| breg.string(0..a).after(&breg.lower(a));
        let contact1 = sites - 1;
        let contact2 = sites;
        // V = Σ_k A_k ⊗ B_k with c†_c f_a = (c†_c P_S) ⊗ β_a and f_a† c_c = (P_S c_c) ⊗ β_a†
        let mut pairs: Vec<(Monomial, Monomial)> = Vec::new();
        for (c, a) in [(contact1, 0), (contact2, 1)] {
            pairs.push((create(c).after(&parity), bath_annihilate(a)));
            pairs.push((parity.after(&annihilate(c)), bath_create(a)));
        }
        let jumps: Vec<Op> = pairs.iter().map(|(a, _)| Op::from(a.clone())).collect();
        let bops: Vec<DMat> = pairs.iter().map(|(_, b)| Op::from(b.clone()).dense(4)).collect();
        let bath: Vec<Vec<c64>> = (0..4)
            .map(|k| {
                (0..4)
                    .map(|l| {
                        let prod = &bops[k] * &bops[l] * &phi;
                        (0..4).map(|i| prod[(i, i)]).fold(Z, |a, b| a + b)
                    })
                    .collect()
            })
            .collect();
        let products = (0..4)
            .map(|k| (0..4).map(|l| jumps[k].after(&jumps[l])).collect())
            .collect();
        Self {
            sites,
            hopping,
            gamma,
            reg,
            hamiltonian: h,
            jumps,
            bath,
            products,
        }
    }

    pub fn dim(&self) -> usize {
        self.reg.dim()
    }

    /// Product state with `⟨σᶻ_s⟩ = mu[s]`.
    pub fn product_state(&self, mu: &[f64]) -> DMat {
        assert_eq!(mu.len(), 2 * self.sites);
        let d = self.dim();
        DMat::from_fn(d, d, |i, j| {
            if i != j {
                return Z;
            }
            let p: f64 = (0..2 * self.sites)
                .map(|s| {
                    if self.reg.up(i, s) {
                        0.5 * (1.0 + mu[s])
                    } else {
                        0.5 * (1.0 - mu[s])
                    }
                })
                .product();
            c64::new(p, 0.0)
        })
    }

    pub fn rhs(&self, rho: &DMat) -> DMat {
        let d = self.dim();
        let mut out = DMat::zeros(d, d);
        let i = c64::new(0.0, 1.0);
        self.hamiltonian.left_into(rho, -i, &mut out);
        self.hamiltonian.right_into(rho, i, &mut out);
        let rate = -0.5 * self.gamma * self.gamma;
        for k in 0..4 {
            for l in 0..4 {
                let kl = self.bath[k][l];
                if kl != Z {
                    self.products[k][l].left_into(rho, kl * rate, &mut out);
                    self.products[k][l].right_into(rho, kl * rate, &mut out);
                }
                let lk = self.bath[l][k];
                if lk != Z {
                    // -2 ⟨B_l B_k⟩ A_k ρ A_l
                    let mut tmp = DMat::zeros(d, d);
                    self.jumps[k].left_into(rho, c64::new(1.0, 0.0), &mut tmp);
                    self.jumps[l].right_into(&tmp, lk * (-2.0 * rate), &mut out);
                }
            }
        }
        out
    }

    /// Classical RK4 from `rho` over `t` with steps no larger than `dt`.
    pub fn evolve(&self, rho: &DMat, t: f64, dt: f64) -> DMat {
        let steps = (t / dt).ceil().max(1.0) as usize;
        let h = t / steps as f64;
        let mut r = rho.clone();
        for _ in 0..steps {
            let k1 = self.rhs(&r);
            let k2 = self.rhs(&(&r + &k1 * faer::Scale(c64::new(0.5 * h, 0.0))));
            let k3 = self.rhs(&(&r + &k2 * faer::Scale(c64::new(0.5 * h, 0.0))));
            let k4 = self.rhs(&(&r + &k3 * faer::Scale(c64::new(h, 0.0))));
            let incr = (&k1 + &k2 * faer::Scale(c64::new(2.0, 0.0)) + &k3 * faer::Scale(c64::new(2.0, 0.0)) + &k4)
                * faer::Scale(c64::new(h / 6.0, 0.0));
            r += incr;
        }
        r
    }

    fn expect(&self, rho: &DMat, op: &Op) -> c64 {
        let d = self.dim();
        let mut tmp = DMat::zeros(d, d);
        op.left_into(rho, c64::new(1.0, 0.0), &mut tmp);
        (0..d).map(|i| tmp[(i, i)]).fold(Z, |a, b| a + b)
    }

    pub fn trace(&self, rho: &DMat) -> c64 {
        (0..self.dim()).map(|i| rho[(i, i)]).fold(Z, |a, b| a + b)
    }

    pub fn magnetization(&self, rho: &DMat, s: usize) -> f64 {
        self.expect(rho, &Op::from(self.reg.sz(s))).re
    }

    pub fn zz(&self, rho: &DMat, a: usize, b: usize) -> f64 {
        self.expect(rho, &Op::from(self.reg.sz(a).after(&self.reg.sz(b)))).re
    }

    /// Bath parity seen by a spin flip carried between `a` and `b`.
    fn crossing_sign(&self, a: usize, b: usize) -> f64 {
        if (a < self.sites) == (b < self.sites) {
            1.0
        } else {
            -1.0
        }
    }

    /// `⟨σ⁺_a σ⁻_b⟩`.
    pub fn flip(&self, rho: &DMat, a: usize, b: usize) -> c64 {
        let raw = self.expect(rho, &Op::from(self.reg.raise(a).after(&self.reg.lower(b))));
        raw * self.crossing_sign(a, b)
    }

    /// Current `2K i(⟨σ⁺_f σ⁻_t⟩ − ⟨σ⁺_t σ⁻_f⟩)` from spin `f` to adjacent spin `t`.
    pub fn current(&self, rho: &DMat, from: usize, to: usize) -> f64 {
        let d = self.flip(rho, from, to) - self.flip(rho, to, from);
        (c64::new(0.0, 2.0 * self.hopping) * d).re
    }

    /// Reduced state of spins `a < b` in the basis (↑↑, ↑↓, ↓↑, ↓↓).
    pub fn two_site(&self, rho: &DMat, a: usize, b: usize) -> [[c64; 4]; 4] {
        let idx = |i: usize| {
            let ua = self.reg.up(i, a) as usize;
            let ub = self.reg.up(i, b) as usize;
            2 * (1 - ua) + (1 - ub)
        };
        let mask = self.reg.bit(a) | self.reg.bit(b);
        let mut out = [[Z; 4]; 4];
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if i & !mask == j & !mask {
                    out[idx(i)][idx(j)] += rho[(i, j)];
                }
            }
        }
        let sign = self.crossing_sign(a, b);
        for (r, c) in [(1, 2), (2, 1), (0, 3), (3, 0)] {
            out[r][c] *= sign;
        }
        out
    }
}

/// Largest deviation between the Gaussian state `g` and `rho` over every
/// observable the pipeline exposes.
pub fn worst_deviation(model: &SpinModel, rho: &DMat, g: &CorrelationMatrix, spec: &SystemSpec) -> f64 {
    let d = spec.dim();
    let mut worst = 0.0f64;
    let m = magnetization_profile(g);
    for s in 0..d {
        worst = worst.max((m[s] - model.magnetization(rho, s)).abs());
    }
    for a in 0..d {
        for b in (a + 1)..d {
            let f = spin_flip_correlator(g, a, b).unwrap();
            worst = worst.max((f - model.flip(rho, a, b)).norm());
            let zz = zz_correlator(g, a, b).unwrap();
            worst = worst.max((zz - model.zz(rho, a, b)).abs());
            let lib = two_site_rdm(g, a, b).unwrap();
            let bf = model.two_site(rho, a, b);
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((lib.entry(i, j) - bf[i][j]).norm());
                }
            }
        }
    }
    let n = spec.sites();
    let j = current_profile(g, spec).unwrap();
    for p in 0..n.saturating_sub(1) {
        worst = worst.max((j.chain1[p] - model.current(rho, n - 2 - p, n - 1 - p)).abs());
        worst = worst.max((j.chain2[p] - model.current(rho, n + p + 1, n + p)).abs());
    }
    worst
}

/// Worst deviation along an exact trajectory sampled at `times`.
pub fn compare(n: usize, hopping: f64, gamma: f64, mu: Vec<f64>, times: &[f64]) -> f64 {
    let spec = SystemSpec::with_profile(n, gamma, mu.clone())
        .unwrap()
        .hopping_amplitude(hopping)
        .unwrap();
    let model = SpinModel::new(n, hopping, gamma);
    let prop = ExactPropagator::new(&spec).unwrap();
    let g0 = initial_correlation(&spec);
    let mut rho = model.product_state(&mu);
    let mut worst = worst_deviation(&model, &rho, &g0, &spec);
    let mut t_prev = 0.0;
    for &t in times {
        rho = model.evolve(&rho, t - t_prev, 2e-3);
        t_prev = t;
        let g = prop.evolve(&g0, t).unwrap();
        worst = worst.max(worst_deviation(&model, &rho, &g, &spec));
        assert!((model.trace(&rho).re - 1.0).abs() < 1e-9);
    }
    worst
}

