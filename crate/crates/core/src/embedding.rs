//! An area-preserving odd map `f : C → R²` pushing `π|z|²` forward to the
//! convex function `G_N(q, p) = c_N (|q|^{αN} + |p|^{βN})^{1/N}`, and the
//! resulting embedding of the ball `B^{2N}(R)` into the product of the unit
//! `ℓ_α` and `ℓ_β` balls.
//!
//! The disc of area `A` goes onto `{G_N ≤ A}`. Angles are matched by swept
//! area: the sector of the disc from angle 0 to `φ` corresponds to the region
//! of `{G_N ≤ A}` swept by the quasi-homogeneous rays `t ↦ (t^{1/α} q,
//! t^{1/β} p)` through the corresponding arc of the level curve. On the
//! first quadrant the level curve is `(S_q (1−x)^{1/a}, S_p x^{1/b})` with
//! `a = αN`, `b = βN`, and the swept fraction is the regularized incomplete
//! beta function `I_x(1/b, 1/a)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::sampling::par_blocks;

pub const DEFAULT_NODES: usize = 4096;

/// `√(4/π)`, the radius at which the ball has the capacity of the product.
pub fn critical_radius() -> f64 {
    (4.0 / PI).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileKind {
    /// `G_N` with the given smoothing exponent.
    Smooth { n_exp: u32 },
    /// The limit `G = 4 max(|q|^α, |p|^β)`, whose level sets are rectangles.
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridConfig {
    /// Inversion table nodes per level curve.
    pub nodes: usize,
    /// Largest `|z|` accepted by the planar map.
    pub r_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { nodes: DEFAULT_NODES, r_max: 2.0 * critical_radius() }
    }
}

/// Inverse of `x ↦ I_x(a, b)` on targets in `[0, ½]`, in the variable
/// `w = ln x`.
#[derive(Clone, Debug)]
struct InverseBeta {
    a: f64,
    b: f64,
    ln_b: f64,
    /// `ln x` at targets `k / (2 (len − 1))`; the first entry is unused.
    nodes: Vec<f64>,
}

impl InverseBeta {
    fn new(a: f64, b: f64, count: usize) -> Self {
        let mut inv = InverseBeta { a, b, ln_b: ln_beta(a, b), nodes: Vec::new() };
        let count = count.max(2);
        let mut nodes = vec![f64::NEG_INFINITY; count];
        let (mut lo, hi) = (-750.0, 0.0);
        for (k, node) in nodes.iter_mut().enumerate().skip(1) {
            let t = k as f64 / (2 * (count - 1)) as f64;
            *node = inv.newton(t, inv.asymptotic(t).clamp(lo, hi), lo, hi);
            lo = *node;
        }
        inv.nodes = nodes;
        inv
    }

    /// `ln x` from `I_x ≈ x^a / (a B(a, b))`, exact as `x → 0`.
    fn asymptotic(&self, t: f64) -> f64 {
        (t.ln() + self.a.ln() + self.ln_b) / self.a
    }

    fn solve(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let w0 = self.asymptotic(t);
        if w0 < -700.0 {
            return w0;
        }
        let m = self.nodes.len() - 1;
        let pos = t * 2.0 * m as f64;
        let k = (pos.floor() as usize).min(m - 1);
        let hi = self.nodes[k + 1];
        let (lo, guess) = if k == 0 {
            (-750.0, w0.min(hi))
        } else {
            let lo = self.nodes[k];
            (lo, lo + (hi - lo) * (pos - k as f64))
        };
        self.newton(t, guess, lo, hi)
    }

    /// Safeguarded Newton on `I(e^w) − t` within `[lo, hi]`.
    fn newton(&self, t: f64, mut w: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let x = w.exp();
            let f = beta_reg(self.a, self.b, x) - t;
            if f == 0.0 {
                return w;
            }
            if f > 0.0 {
                hi = w;
            } else {
                lo = w;
            }
            let df = (self.a * w + (self.b - 1.0) * (-x).ln_1p() - self.ln_b).exp();
            let mut next = w - f / df;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - w).abs() <= 1e-14 * w.abs().max(1.0) || hi - lo <= 1e-15 * w.abs().max(1.0) {
                return next;
            }
            w = next;
        }
        w
    }
}

#[derive(Clone, Debug)]
enum Tables {
    Smooth { lower: InverseBeta, upper: InverseBeta },
    Max,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingProfile {
    pub alpha: f64,
    pub beta: f64,
    pub kind: ProfileKind,
    /// Normalization so that `area{G_N ≤ A} = A`.
    pub c_n: f64,
    pub grid: GridConfig,
    #[serde(skip)]
    tables: Tables,
}

/// `4 Γ(1 + 1/a) Γ(1 + 1/b) / Γ(1 + 1/a + 1/b)`, the area of
/// `{|q|^a + |p|^b ≤ 1}`.
fn superellipse_area(a: f64, b: f64) -> f64 {
    4.0 * (ln_gamma(1.0 + 1.0 / a) + ln_gamma(1.0 + 1.0 / b) - ln_gamma(1.0 + 1.0 / a + 1.0 / b)).exp()
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must exceed 1, got {alpha}")));
    }
    Ok(alpha / (alpha - 1.0))
}

impl EmbeddingProfile {
    pub fn build(alpha: f64, n_exp: u32, grid: GridConfig) -> Result<Self> {
        let beta = check_alpha(alpha)?;
        if n_exp == 0 {
            return Err(Error::InvalidParameter("smoothing exponent must be at least 1".into()));
        }
        check_grid(&grid)?;
        let (a, b) = (alpha * n_exp as f64, beta * n_exp as f64);
        let c_n = superellipse_area(a, b);
        let half = grid.nodes / 2 + 1;
        let tables = Tables::Smooth { lower: InverseBeta::new(1.0 / b, 1.0 / a, half), upper: InverseBeta::new(1.0 / a, 1.0 / b, half) };
        Ok(EmbeddingProfile { alpha, beta, kind: ProfileKind::Smooth { n_exp }, c_n, grid, tables })
    }

    pub fn max_limit(alpha: f64, grid: GridConfig) -> Result<Self> {
        let beta = check_alpha(alpha)?;
        check_grid(&grid)?;
        Ok(EmbeddingProfile { alpha, beta, kind: ProfileKind::Max, c_n: 4.0, grid, tables: Tables::Max })
    }

    pub fn n_exp(&self) -> Option<u32> {
        match self.kind {
            ProfileKind::Smooth { n_exp } => Some(n_exp),
            ProfileKind::Max => None,
        }
    }

    fn exponents(&self) -> (f64, f64, f64) {
        let n = self.n_exp().unwrap_or(1) as f64;
        (self.alpha * n, self.beta * n, n)
    }

    /// `G_N(q, p)`; for the max profile, `4 max(|q|^α, |p|^β)`.
    pub fn g(&self, q: f64, p: f64) -> f64 {
        match self.kind {
            ProfileKind::Max => 4.0 * q.abs().powf(self.alpha).max(p.abs().powf(self.beta)),
            ProfileKind::Smooth { .. } => {
                let (a, b, n) = self.exponents();
                // factor out the larger term to stay in range
                let (lq, lp) = (a * q.abs().ln(), b * p.abs().ln());
                let m = lq.max(lp);
                if m == f64::NEG_INFINITY {
                    return 0.0;
                }
                self.c_n * ((m + ((lq - m).exp() + (lp - m).exp()).ln()) / n).exp()
            }
        }
    }

    /// Area of `{G ≤ area}` by quadrature of `½ ρ(θ)²` over the polar angle,
    /// with the radius found by root-finding on `G`.
    pub fn sublevel_area(&self, level: f64) -> f64 {
        if level <= 0.0 {
            return 0.0;
        }
        let gl = GaussLegendre::new(8);
        // the level curve turns sharply near the corner of its box
        let sq = (level / self.c_n).powf(1.0 / self.alpha);
        let sp = (level / self.c_n).powf(1.0 / self.beta);
        let corner = sp.atan2(sq);
        let pieces = self.grid.nodes / 2;
        let f = |theta: f64| {
            let (s, c) = theta.sin_cos();
            let r = self.radial(level, c, s, sq.max(sp));
            0.5 * r * r
        };
        4.0 * (gl.integrate_composite(0.0, corner, pieces, f) + gl.integrate_composite(corner, FRAC_PI_2, pieces, f))
    }

    /// `ρ` with `G(ρ c, ρ s) = level`; `G` grows along rays.
    fn radial(&self, level: f64, c: f64, s: f64, scale: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, scale);
        while self.g(hi * c, hi * s) < level {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.g(mid * c, mid * s) < level {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// First-quadrant point of `{G = s c_N}` at swept fraction `t`, with
    /// `tc = 1 − t` supplied separately to keep precision.
    fn quadrant_point(&self, t: f64, tc: f64, s: f64) -> (f64, f64) {
        let sq = s.powf(1.0 / self.alpha);
        let sp = s.powf(1.0 / self.beta);
        match &self.tables {
            Tables::Max => {
                if t <= 1.0 / self.alpha {
                    (sq, sp * t * self.alpha)
                } else {
                    (sq * self.beta * tc, sp)
                }
            }
            Tables::Smooth { lower, upper } => {
                let (a, b, _) = self.exponents();
                if t <= 0.5 {
                    let w = lower.solve(t);
                    (sq * ((-w.exp()).ln_1p() / a).exp(), sp * (w / b).exp())
                } else {
                    let w = upper.solve(tc);
                    (sq * (w / a).exp(), sp * ((-w.exp()).ln_1p() / b).exp())
                }
            }
        }
    }

    /// `f(z) = (q, p)` for `z = x + iy`.
    pub fn planar_map(&self, z: [f64; 2]) -> Result<[f64; 2]> {
        let r2 = z[0] * z[0] + z[1] * z[1];
        if !r2.is_finite() || r2 > self.grid.r_max * self.grid.r_max * (1.0 + 1e-12) {
            return Err(Error::OutOfRange(format!("|z| = {} exceeds {}", r2.sqrt(), self.grid.r_max)));
        }
        Ok(self.map_unchecked(z))
    }

    fn map_unchecked(&self, z: [f64; 2]) -> [f64; 2] {
        let (x, y) = (z[0], z[1]);
        if x == 0.0 && y == 0.0 {
            return [0.0, 0.0];
        }
        // oddness is structural: the lower half-plane is the negated upper one
        if y < 0.0 || (y == 0.0 && x < 0.0) {
            let [q, p] = self.map_unchecked([-x, -y]);
            return [-q, -p];
        }
        let s = PI * (x * x + y * y) / self.c_n;
        let phi = y.atan2(x);
        if phi <= FRAC_PI_2 {
            let (q, p) = self.quadrant_point(phi / FRAC_PI_2, (FRAC_PI_2 - phi) / FRAC_PI_2, s);
            [q, p]
        } else {
            // second quadrant mirrors the first: fraction measured from the p-axis
            let (q, p) = self.quadrant_point((PI - phi) / FRAC_PI_2, (phi - FRAC_PI_2) / FRAC_PI_2, s);
            [-q, p]
        }
    }

    /// `f⁻¹(q, p)`.
    pub fn inverse_map(&self, w: [f64; 2]) -> [f64; 2] {
        let (q, p) = (w[0], w[1]);
        let level = self.g(q, p);
        if level == 0.0 {
            return [0.0, 0.0];
        }
        let r = (level / PI).sqrt();
        let t = match self.kind {
            ProfileKind::Max => {
                let s = level / 4.0;
                let (qq, pp) = (q.abs() / s.powf(1.0 / self.alpha), p.abs() / s.powf(1.0 / self.beta));
                if qq >= pp {
                    pp / self.alpha
                } else {
                    1.0 - qq / self.beta
                }
            }
            ProfileKind::Smooth { .. } => {
                let (a, b, _) = self.exponents();
                let (lq, lp) = (a * q.abs().ln(), b * p.abs().ln());
                // x = |p|^b / (|q|^a + |p|^b)
                let x = 1.0 / (1.0 + (lq - lp).exp());
                if x <= 0.5 {
                    beta_reg(1.0 / b, 1.0 / a, x)
                } else {
                    1.0 - beta_reg(1.0 / a, 1.0 / b, 1.0 / (1.0 + (lp - lq).exp()))
                }
            }
        };
        let quarter = t * FRAC_PI_2;
        let phi = match (q >= 0.0, p >= 0.0) {
            (true, true) => quarter,
            (false, true) => PI - quarter,
            (false, false) => PI + quarter,
            (true, false) => 2.0 * PI - quarter,
        };
        [r * phi.cos(), r * phi.sin()]
    }

    /// `sup (|q|^α − π r²/4)` over the disc of radius `r_max`, attained on
    /// the axes; zero for the max profile.
    pub fn epsilon_bound(&self, r_max: f64) -> f64 {
        PI * r_max * r_max * (1.0 / self.c_n - 0.25)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        write_key(&mut out, self.alpha, &self.kind, &self.grid);
        out.extend_from_slice(&self.c_n.to_le_bytes());
        if let Tables::Smooth { lower, upper } = &self.tables {
            for t in [lower, upper] {
                out.extend_from_slice(&(t.nodes.len() as u64).to_le_bytes());
                for v in &t.nodes {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        fs::File::create(path)?.write_all(&out)?;
        Ok(())
    }

    /// Reads a cache written by [`save`](Self::save); fails unless it was
    /// built for the same `(α, N_exp, grid)`.
    pub fn load(path: &Path, alpha: f64, kind: ProfileKind, grid: GridConfig) -> Result<Self> {
        let mut buf = Vec::new();
        fs::File::open(path)?.read_to_end(&mut buf)?;
        let mut key = Vec::new();
        key.extend_from_slice(MAGIC);
        write_key(&mut key, alpha, &kind, &grid);
        if !buf.starts_with(&key) {
            return Err(Error::Malformed(format!("{} is not a profile cache for this key", path.display())));
        }
        let mut r = Cursor { buf: &buf, pos: key.len() };
        let beta = check_alpha(alpha)?;
        let c_n = r.f64()?;
        let tables = match kind {
            ProfileKind::Max => Tables::Max,
            ProfileKind::Smooth { n_exp } => {
                let (a, b) = (alpha * n_exp as f64, beta * n_exp as f64);
                let mut read = |pa: f64, pb: f64| -> Result<InverseBeta> {
                    let len = r.u64()? as usize;
                    let nodes = (0..len).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
                    Ok(InverseBeta { a: pa, b: pb, ln_b: ln_beta(pa, pb), nodes })
                };
                let lower = read(1.0 / b, 1.0 / a)?;
                let upper = read(1.0 / a, 1.0 / b)?;
                if lower.nodes.len() < 2 || upper.nodes.len() < 2 {
                    return Err(Error::Malformed("truncated profile table".into()));
                }
                Tables::Smooth { lower, upper }
            }
        };
        if r.pos != buf.len() {
            return Err(Error::Malformed("trailing bytes in profile cache".into()));
        }
        Ok(EmbeddingProfile { alpha, beta, kind, c_n, grid, tables })
    }

    /// Loads the cache at `path` when it matches, otherwise builds and
    /// writes it.
    pub fn cached(path: &Path, alpha: f64, n_exp: u32, grid: GridConfig) -> Result<Self> {
        let kind = ProfileKind::Smooth { n_exp };
        match Self::load(path, alpha, kind, grid) {
            Ok(p) => Ok(p),
            Err(_) => {
                let p = Self::build(alpha, n_exp, grid)?;
                p.save(path)?;
                Ok(p)
            }
        }
    }
}

const MAGIC: &[u8; 8] = b"MLPROF01";

fn write_key(out: &mut Vec<u8>, alpha: f64, kind: &ProfileKind, grid: &GridConfig) {
    out.extend_from_slice(&alpha.to_le_bytes());
    match kind {
        ProfileKind::Smooth { n_exp } => {
            out.push(0);
            out.extend_from_slice(&n_exp.to_le_bytes());
        }
        ProfileKind::Max => {
            out.push(1);
            out.extend_from_slice(&0u32.to_le_bytes());
        }
    }
    out.extend_from_slice(&(grid.nodes as u64).to_le_bytes());
    out.extend_from_slice(&grid.r_max.to_le_bytes());
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take8(&mut self) -> Result<[u8; 8]> {
        let s = self.buf.get(self.pos..self.pos + 8).ok_or_else(|| Error::Malformed("truncated profile cache".into()))?;
        self.pos += 8;
        Ok(s.try_into().expect("slice of length 8"))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take8()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take8()?))
    }
}

fn check_grid(grid: &GridConfig) -> Result<()> {
    if grid.nodes < 4 || !(grid.r_max.is_finite() && grid.r_max > 0.0) {
        return Err(Error::InvalidParameter(format!("grid {grid:?}")));
    }
    Ok(())
}

/// Polar grid `r_i = r_max i / radii`, `θ_j = 2π j / angles`.
fn polar_grid(r_max: f64, radii: usize, angles: usize) -> impl Iterator<Item = [f64; 2]> {
    (1..=radii).flat_map(move |i| {
        let r = r_max * i as f64 / radii as f64;
        (0..angles).map(move |j| {
            let t = 2.0 * PI * j as f64 / angles as f64;
            [r * t.cos(), r * t.sin()]
        })
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsReport {
    pub epsilon: f64,
    /// Separate maxima of `|q|^α − π|z|²/4` and `|p|^β − π|z|²/4`.
    pub epsilon_q: f64,
    pub epsilon_p: f64,
    /// The same supremum over the whole disc, in closed form.
    pub epsilon_bound: f64,
    pub r_max: f64,
    pub points: usize,
}

/// The smallest `ε ≥ 0` with `|q|^α, |p|^β ≤ π|z|²/4 + ε` on a polar grid of
/// the disc of radius `r_max` (angles include the axes).
pub fn eps_rect_check(profile: &EmbeddingProfile, r_max: f64, radii: usize, angles: usize) -> Result<EpsReport> {
    let (mut eq, mut ep, mut points) = (0.0f64, 0.0f64, 0);
    for z in polar_grid(r_max, radii, angles) {
        let [q, p] = profile.planar_map(z)?;
        let base = PI * (z[0] * z[0] + z[1] * z[1]) / 4.0;
        eq = eq.max(q.abs().powf(profile.alpha) - base);
        ep = ep.max(p.abs().powf(profile.beta) - base);
        points += 1;
    }
    Ok(EpsReport { epsilon: eq.max(ep), epsilon_q: eq, epsilon_p: ep, epsilon_bound: profile.epsilon_bound(r_max), r_max, points })
}

/// `√((4/π)(1 − N ε))`.
pub fn certified_radius(copies: usize, epsilon: f64) -> f64 {
    (4.0 / PI * (1.0 - copies as f64 * epsilon)).max(0.0).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct Offender {
    pub point: Vec<f64>,
    pub q_sum: f64,
    pub p_sum: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub alpha: f64,
    pub kind: ProfileKind,
    pub copies: usize,
    pub radius: f64,
    pub epsilon: f64,
    pub certified_radius: f64,
    pub samples: u64,
    pub seed: u64,
    pub contained: u64,
    pub fraction: f64,
    pub max_q_sum: f64,
    pub max_p_sum: f64,
    /// The sample with the largest `max(Σ|q|^α, Σ|p|^β)` when any exceeds 1.
    pub worst: Option<Offender>,
}

/// Maps uniform samples of `B^{2N}(R)` coordinatewise by `f` and checks
/// `Σ|q_i|^α ≤ 1` and `Σ|p_i|^β ≤ 1`.
pub fn product_embedding_check(
    profile: &EmbeddingProfile,
    copies: usize,
    radius: f64,
    epsilon: f64,
    samples: u64,
    seed: u64,
) -> Result<EmbeddingReport> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if copies == 0 || !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("copies {copies}, radius {radius}")));
    }
    if radius > profile.grid.r_max {
        return Err(Error::OutOfRange(format!("radius {radius} exceeds the table range {}", profile.grid.r_max)));
    }
    let d = 2 * copies;
    let (alpha, beta) = (profile.alpha, profile.beta);
    struct Block {
        contained: u64,
        max_q: f64,
        max_p: f64,
        worst: Option<(f64, Vec<f64>, f64, f64)>,
    }
    let blocks = par_blocks(seed, samples, |_, count, rng| {
        let mut b = Block { contained: 0, max_q: 0.0, max_p: 0.0, worst: None };
        let mut z = vec![0.0; d];
        for _ in 0..count {
            z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            let rad = radius * rng.random::<f64>().powf(1.0 / d as f64) / norm;
            z.iter_mut().for_each(|v| *v *= rad);
            let (mut qs, mut ps) = (0.0, 0.0);
            for pair in z.chunks(2) {
                let [q, p] = profile.map_unchecked([pair[0], pair[1]]);
                qs += q.abs().powf(alpha);
                ps += p.abs().powf(beta);
            }
            b.max_q = b.max_q.max(qs);
            b.max_p = b.max_p.max(ps);
            let excess = qs.max(ps);
            if excess <= 1.0 {
                b.contained += 1;
            } else if b.worst.as_ref().is_none_or(|w| excess > w.0) {
                b.worst = Some((excess, z.clone(), qs, ps));
            }
        }
        b
    });
    let mut contained = 0;
    let (mut max_q, mut max_p) = (0.0f64, 0.0f64);
    let mut worst: Option<(f64, Vec<f64>, f64, f64)> = None;
    for b in blocks {
        contained += b.contained;
        max_q = max_q.max(b.max_q);
        max_p = max_p.max(b.max_p);
        if let Some(w) = b.worst {
            if worst.as_ref().is_none_or(|cur| w.0 > cur.0) {
                worst = Some(w);
            }
        }
    }
    Ok(EmbeddingReport {
        alpha,
        kind: profile.kind,
        copies,
        radius,
        epsilon,
        certified_radius: certified_radius(copies, epsilon),
        samples,
        seed,
        contained,
        fraction: contained as f64 / samples as f64,
        max_q_sum: max_q,
        max_p_sum: max_p,
        worst: worst.map(|(_, point, q_sum, p_sum)| Offender { point, q_sum, p_sum }),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MapChecks {
    /// `max |det Df − 1|` by central differences, away from the axes.
    pub jacobian: f64,
    /// `max |f(−z) + f(z)|`.
    pub oddness: f64,
    /// `max |G(f(z)) − π|z|²| / π|z|²`.
    pub level: f64,
    /// `max |f⁻¹(f(z)) − z|`.
    pub inverse: f64,
    pub points: usize,
}

/// Grid checks of the planar map on the disc of radius `r_max`. Points
/// within `axis_gap` of a coordinate axis are left out of the Jacobian.
pub fn map_checks(profile: &EmbeddingProfile, r_max: f64, radii: usize, angles: usize, axis_gap: f64) -> Result<MapChecks> {
    let mut out = MapChecks { jacobian: 0.0, oddness: 0.0, level: 0.0, inverse: 0.0, points: 0 };
    // a half-step phase keeps the grid off the axes
    for z0 in polar_grid(r_max, radii, angles) {
        let rot = PI / angles as f64;
        let z = [z0[0] * rot.cos() - z0[1] * rot.sin(), z0[0] * rot.sin() + z0[1] * rot.cos()];
        let f = profile.planar_map(z)?;
        let g = profile.planar_map([-z[0], -z[1]])?;
        out.oddness = out.oddness.max((f[0] + g[0]).abs().max((f[1] + g[1]).abs()));
        let target = PI * (z[0] * z[0] + z[1] * z[1]);
        out.level = out.level.max((profile.g(f[0], f[1]) - target).abs() / target);
        let back = profile.inverse_map(f);
        out.inverse = out.inverse.max((back[0] - z[0]).abs().max((back[1] - z[1]).abs()));
        let r = target.sqrt();
        if z[0].abs() > axis_gap && z[1].abs() > axis_gap {
            let h = 1e-6 * r.max(1e-3);
            let d = |dx: f64, dy: f64| -> Result<[f64; 2]> {
                let a = profile.planar_map([z[0] + dx, z[1] + dy])?;
                let b = profile.planar_map([z[0] - dx, z[1] - dy])?;
                Ok([(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)])
            };
            let fx = d(h, 0.0)?;
            let fy = d(0.0, h)?;
            out.jacobian = out.jacobian.max((fx[0] * fy[1] - fx[1] * fy[0] - 1.0).abs());
        }
        out.points += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityChecks {
    /// Smallest Hessian eigenvalue of `G`, relative to the largest, over
    /// grid points away from the axes.
    pub min_relative_eigenvalue: f64,
    /// Largest `G((x+y)/2) − (G(x)+G(y))/2` over random pairs, relative to
    /// the larger endpoint value.
    pub midpoint_violation: f64,
    /// The same for `Σ_i G(q_i, p_i)` on `R^{2N}`.
    pub sum_midpoint_violation: f64,
    /// `max |G(±q, ±p) − G(q, p)|`.
    pub evenness: f64,
}

pub fn convexity_checks(profile: &EmbeddingProfile, copies: usize, pairs: u64, seed: u64) -> ConvexityChecks {
    let g = |q: f64, p: f64| profile.g(q, p);
    let mut min_eig = f64::INFINITY;
    let mut even = 0.0f64;
    for i in 1..=24 {
        for j in 1..=24 {
            let (q, p) = (0.06 * i as f64, 0.06 * j as f64);
            let h = 1e-4;
            let f0 = g(q, p);
            let hqq = (g(q + h, p) - 2.0 * f0 + g(q - h, p)) / (h * h);
            let hpp = (g(q, p + h) - 2.0 * f0 + g(q, p - h)) / (h * h);
            let hqp = (g(q + h, p + h) - g(q + h, p - h) - g(q - h, p + h) + g(q - h, p - h)) / (4.0 * h * h);
            let tr = hqq + hpp;
            let disc = ((hqq - hpp).powi(2) + 4.0 * hqp * hqp).sqrt();
            let (lo, hi) = (0.5 * (tr - disc), 0.5 * (tr + disc));
            min_eig = min_eig.min(lo / hi.abs().max(f64::MIN_POSITIVE));
            for (sq, sp) in [(-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
                even = even.max((g(sq * q, sp * p) - f0).abs());
            }
        }
    }
    let sum = |x: &[f64]| x.chunks(2).map(|c| g(c[0], c[1])).sum::<f64>();
    let worst = |dim: usize, f: &(dyn Fn(&[f64]) -> f64 + Sync)| -> f64 {
        par_blocks(seed, pairs, |_, count, rng| {
            let mut w = f64::NEG_INFINITY;
            for _ in 0..count {
                let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect();
                let y: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect();
                let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
                let (fx, fy) = (f(&x), f(&y));
                w = w.max((f(&m) - 0.5 * (fx + fy)) / fx.max(fy).max(1e-300));
            }
            w
        })
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    };
    ConvexityChecks {
        min_relative_eigenvalue: min_eig,
        midpoint_violation: worst(2, &sum),
        sum_midpoint_violation: worst(2 * copies.max(1), &sum),
        evenness: even,
    }
}
