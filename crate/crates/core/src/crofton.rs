//! Hopf circles, signed slices of spheres by odd Hamiltonians, and the
//! Crofton-type identity relating symplectic area to intersection counts.
//!
//! Points of `R^{2N}` are laid out as `(p_1..p_N, q_1..q_N)` with complex
//! coordinates `z_j = q_j + i p_j`. The circle through `z` is `θ ↦ e^{iθ} z`,
//! whose velocity is `(ṗ, q̇) = (q, −p)`.

use std::f64::consts::PI;
use std::fmt;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::sampling::par_blocks;
use crate::symplectic::omega;
use crate::volume::Z95;

/// Initial θ-scan resolution and root tolerances.
const SCAN: usize = 512;
const ROOT_TOL: f64 = 1e-12;
const TANGENCY: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    P(usize),
    Q(usize),
}

impl Var {
    fn index(self, n: usize) -> usize {
        match self {
            Var::P(i) => i,
            Var::Q(i) => n + i,
        }
    }

    fn slot(self) -> usize {
        match self {
            Var::P(i) | Var::Q(i) => i,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<(Var, u32)>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.powers.iter().map(|&(_, e)| e).sum()
    }
}

/// A real polynomial in the variables `p1, q1, p2, ...`, parsed from text
/// such as `"q2^3 - 0.5*q1*p2^2"`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser { s: text.as_bytes(), i: 0 }.polynomial()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.iter().flat_map(|t| t.powers.iter().map(|&(v, _)| v.slot())).max()
    }

    pub fn involves(&self, var: Var) -> bool {
        self.terms.iter().any(|t| t.powers.iter().any(|&(v, _)| v == var))
    }

    pub fn is_odd(&self) -> bool {
        self.terms.iter().all(|t| t.degree() % 2 == 1)
    }

    /// `Σ |c| · deg · R^{deg−1}`, a bound for the gradient norm of the
    /// polynomial on the ball of radius `r` (each variable is at most `r`).
    pub fn lipschitz_bound(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let d = t.degree();
                t.coeff.abs() * d as f64 * r.powi(d as i32 - 1)
            })
            .sum()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let c = if k == 0 {
                t.coeff
            } else {
                write!(f, " {} ", if t.coeff < 0.0 { '-' } else { '+' })?;
                t.coeff.abs()
            };
            write!(f, "{c}")?;
            for &(v, e) in &t.powers {
                let (name, i) = match v {
                    Var::P(i) => ('p', i),
                    Var::Q(i) => ('q', i),
                };
                write!(f, "*{name}{}", i + 1)?;
                if e != 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err<T>(&self, what: &str) -> Result<T> {
        Err(Error::Malformed(format!("polynomial: {what} at byte {}", self.i)))
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn polynomial(mut self) -> Result<Polynomial> {
        let mut terms: Vec<Monomial> = Vec::new();
        let mut sign = 1.0;
        if self.peek().is_none() {
            return self.err("empty input");
        }
        loop {
            match self.peek() {
                Some(b'+') => self.i += 1,
                Some(b'-') => {
                    self.i += 1;
                    sign = -sign;
                }
                _ => {}
            }
            let mut t = self.term()?;
            t.coeff *= sign;
            sign = 1.0;
            // merge like monomials
            if let Some(m) = terms.iter_mut().find(|m| m.powers == t.powers) {
                m.coeff += t.coeff;
            } else {
                terms.push(t);
            }
            match self.peek() {
                None => break,
                Some(b'+') | Some(b'-') => {}
                Some(_) => return self.err("expected '+' or '-'"),
            }
        }
        terms.retain(|t| t.coeff != 0.0);
        Ok(Polynomial { terms })
    }

    fn term(&mut self) -> Result<Monomial> {
        let mut coeff = 1.0;
        let mut powers: Vec<(Var, u32)> = Vec::new();
        loop {
            match self.peek() {
                Some(b'p') | Some(b'q') => {
                    let v = self.var()?;
                    let e = if self.peek() == Some(b'^') {
                        self.i += 1;
                        self.uint()?
                    } else {
                        1
                    };
                    if let Some(slot) = powers.iter_mut().find(|(w, _)| *w == v) {
                        slot.1 += e;
                    } else {
                        powers.push((v, e));
                    }
                }
                Some(c) if c.is_ascii_digit() || c == b'.' => coeff *= self.number()?,
                _ => return self.err("expected a number or a variable"),
            }
            if self.peek() == Some(b'*') {
                self.i += 1;
            } else {
                break;
            }
        }
        powers.retain(|&(_, e)| e > 0);
        powers.sort_by_key(|&(v, _)| (v.slot(), matches!(v, Var::Q(_))));
        Ok(Monomial { coeff, powers })
    }

    fn var(&mut self) -> Result<Var> {
        let c = self.s[self.i];
        self.i += 1;
        let k = self.uint()? as usize;
        if k == 0 {
            return self.err("variable indices start at 1");
        }
        Ok(if c == b'p' { Var::P(k - 1) } else { Var::Q(k - 1) })
    }

    fn uint(&mut self) -> Result<u32> {
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        match std::str::from_utf8(&self.s[start..self.i]).ok().and_then(|t| t.parse().ok()) {
            Some(v) => Ok(v),
            None => self.err("expected an unsigned integer"),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.i;
        while self.i < self.s.len() {
            let c = self.s[self.i];
            let exp_sign = (c == b'+' || c == b'-') && self.i > start && matches!(self.s[self.i - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.i += 1;
            } else {
                break;
            }
        }
        match std::str::from_utf8(&self.s[start..self.i]).ok().and_then(|t| t.parse().ok()) {
            Some(v) => Ok(v),
            None => self.err("malformed number"),
        }
    }
}

/// `H = p_1 + ε g` on `R^{2N}` with `g` odd, together with the sphere of
/// radius `R` it slices.
#[derive(Clone, Debug, Serialize)]
pub struct SignedSlice {
    pub n: usize,
    pub radius: f64,
    pub epsilon: f64,
    pub g: Polynomial,
    #[serde(skip)]
    compiled: Vec<(f64, Vec<(usize, u32)>)>,
}

impl SignedSlice {
    pub fn new(n: usize, radius: f64, epsilon: f64, g: Polynomial) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        if !(radius.is_finite() && radius > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("radius {radius}, epsilon {epsilon}")));
        }
        if !g.is_odd() {
            return Err(Error::NotOdd(g.to_string()));
        }
        if let Some(k) = g.max_index() {
            if k >= n {
                return Err(Error::DimensionMismatch { expected: n, got: k + 1 });
            }
        }
        let compiled = g
            .terms
            .iter()
            .map(|t| (t.coeff, t.powers.iter().map(|&(v, e)| (v.index(n), e)).collect()))
            .collect();
        Ok(SignedSlice { n, radius, epsilon, g, compiled })
    }

    pub fn linear(n: usize, radius: f64) -> Result<Self> {
        Self::new(n, radius, 0.0, Polynomial::zero())
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    fn g_value(&self, x: &[f64]) -> f64 {
        self.compiled.iter().map(|(c, pw)| c * pw.iter().map(|&(i, e)| x[i].powi(e as i32)).product::<f64>()).sum()
    }

    /// Adds `scale · ∇g(x)` to `out`.
    fn add_g_grad(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        for (c, pw) in &self.compiled {
            for (k, &(i, e)) in pw.iter().enumerate() {
                let mut d = c * e as f64 * x[i].powi(e as i32 - 1);
                for (l, &(j, f)) in pw.iter().enumerate() {
                    if l != k {
                        d *= x[j].powi(f as i32);
                    }
                }
                out[i] += scale * d;
            }
        }
    }

    pub fn h(&self, x: &[f64]) -> f64 {
        x[0] + if self.epsilon == 0.0 { 0.0 } else { self.epsilon * self.g_value(x) }
    }

    pub fn grad_h(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        out[0] = 1.0;
        if self.epsilon != 0.0 {
            self.add_g_grad(x, self.epsilon, &mut out);
        }
        out
    }

    /// `dH/dθ` along the circle through `x`; positive on Σ⁺.
    pub fn sign_field(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let gh = self.grad_h(x);
        (0..n).map(|j| gh[j] * x[n + j] - gh[n + j] * x[j]).sum()
    }
}

/// The circle `θ ↦ e^{iθ} z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HopfCircle {
    pub z: Vec<f64>,
}

impl HopfCircle {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if z.is_empty() || z.len() % 2 == 1 {
            return Err(Error::InvalidParameter("base point needs even positive dimension".into()));
        }
        Ok(HopfCircle { z })
    }

    pub fn n(&self) -> usize {
        self.z.len() / 2
    }

    pub fn radius(&self) -> f64 {
        self.z.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn point(&self, theta: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.z.len()];
        self.point_into(theta, &mut out);
        out
    }

    fn point_into(&self, theta: f64, out: &mut [f64]) {
        let n = self.n();
        let (s, c) = theta.sin_cos();
        for j in 0..n {
            let (p, q) = (self.z[j], self.z[n + j]);
            out[j] = q * s + p * c;
            out[n + j] = q * c - p * s;
        }
    }
}

/// Base points uniform on `S^{2N−1}(R)`.
pub fn sample_hopf_circles(n: usize, r: f64, count: u64, seed: u64) -> Result<Vec<HopfCircle>> {
    if count == 0 {
        return Err(Error::ZeroSamples);
    }
    if n == 0 || !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!("N = {n}, R = {r}")));
    }
    let blocks = par_blocks(seed, count, |_, k, rng| {
        (0..k)
            .map(|_| loop {
                let z: Vec<f64> = (0..2 * n).map(|_| StandardNormal.sample(rng)).collect();
                let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1e-300 {
                    break HopfCircle { z: z.into_iter().map(|v| r * v / norm).collect() };
                }
            })
            .collect::<Vec<_>>()
    });
    Ok(blocks.concat())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Crossings {
    pub positive: u32,
    pub negative: u32,
    /// H vanishes identically on the circle or some root is tangential.
    pub degenerate: bool,
}

/// Zeros of `θ ↦ H(e^{iθ}z)` on `[0, 2π)`, split by the sign of `dH/dθ`.
pub fn signed_intersections(circle: &HopfCircle, slice: &SignedSlice) -> Result<Crossings> {
    if circle.z.len() != slice.dim() {
        return Err(Error::DimensionMismatch { expected: slice.dim(), got: circle.z.len() });
    }
    let step = 2.0 * PI / SCAN as f64;
    let mut x = vec![0.0; circle.z.len()];
    let mut vals = [0.0; SCAN];
    for (k, v) in vals.iter_mut().enumerate() {
        circle.point_into(k as f64 * step, &mut x);
        *v = slice.h(&x);
    }
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = Crossings::default();
    if scale <= 1e-14 * circle.radius().max(1.0) {
        out.degenerate = true;
        return Ok(out);
    }
    for k in 0..SCAN {
        let (a, b) = (vals[k], vals[(k + 1) % SCAN]);
        if (a < 0.0) == (b < 0.0) {
            continue;
        }
        let (mut lo, mut hi) = (k as f64 * step, (k + 1) as f64 * step);
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            circle.point_into(mid, &mut x);
            if (slice.h(&x) < 0.0) == (a < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        circle.point_into(0.5 * (lo + hi), &mut x);
        let d = slice.sign_field(&x);
        if d.abs() < TANGENCY {
            out.degenerate = true;
        }
        if b > a {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
    }
    Ok(out)
}

/// Angular resolution of the area quadrature.
const PSI_NODES: usize = 256;
const CHI_SCAN: usize = 256;

/// `∫_{Σ⁺} ω` for `N = 2`, with Σ⁺ written as the graph `p_1 = −ε g` over
/// the sphere-like surface `ρ(χ, ψ)·(cos χ, sin χ cos ψ, sin χ sin ψ)` in the
/// coordinates `(q_1, p_2, q_2)`. Orientation `(∂_χ, ∂_ψ)` makes the linear
/// case positive.
pub fn sigma_plus_area(slice: &SignedSlice) -> Result<f64> {
    check_graph(slice)?;
    let gl = GaussLegendre::new(24);
    let parts: Vec<f64> = (0..PSI_NODES)
        .into_par_iter()
        .map(|k| {
            let psi = 2.0 * PI * k as f64 / PSI_NODES as f64;
            chi_integral(slice, psi, &gl)
        })
        .collect();
    // periodic trapezoid rule in ψ
    Ok(parts.iter().sum::<f64>() * 2.0 * PI / PSI_NODES as f64)
}

fn check_graph(slice: &SignedSlice) -> Result<()> {
    if slice.n != 2 {
        return Err(Error::InvalidParameter(format!("surface integration needs N = 2, got {}", slice.n)));
    }
    if slice.g.involves(Var::P(0)) {
        return Err(Error::GraphCondition("perturbation depends on p1".into()));
    }
    let bound = slice.epsilon.abs() * slice.g.lipschitz_bound(slice.radius);
    if bound > 0.5 {
        return Err(Error::GraphCondition(format!("|ε|·Lip(g) bound {bound} exceeds 1/2")));
    }
    Ok(())
}

/// Point and tangents of the graph at `(χ, ψ)`, plus the sign field there.
struct GraphPoint {
    z: [f64; 4],
    d_chi: [f64; 4],
    d_psi: [f64; 4],
}

fn graph_point(slice: &SignedSlice, chi: f64, psi: f64) -> GraphPoint {
    let (sc, cc) = chi.sin_cos();
    let (sp, cp) = psi.sin_cos();
    // v = (q1, p2, q2)
    let dir = [cc, sc * cp, sc * sp];
    let dir_chi = [-sc, cc * cp, cc * sp];
    let dir_psi = [0.0, -sc * sp, sc * cp];
    let eps = slice.epsilon;
    let r = slice.radius;
    let to_x = |v: [f64; 3]| [0.0, v[1], v[0], v[2]];
    let gv = |rho: f64| {
        let x = to_x(dir.map(|d| rho * d));
        let mut g = [0.0; 4];
        slice.add_g_grad(&x, 1.0, &mut g);
        (slice.g_value(&x), [g[2], g[1], g[3]])
    };
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    // ρ² + ε²g(ρ·dir)² = R², increasing in ρ under the graph condition
    let mut rho = r;
    if eps != 0.0 {
        let (mut lo, mut hi) = (0.0, r);
        for _ in 0..100 {
            let (g, dg) = gv(rho);
            let f = rho * rho + eps * eps * g * g - r * r;
            if f > 0.0 {
                hi = rho;
            } else {
                lo = rho;
            }
            let df = 2.0 * rho + 2.0 * eps * eps * g * dot(dg, dir);
            let mut next = rho - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - rho).abs() <= 1e-16 * r {
                rho = next;
                break;
            }
            rho = next;
        }
    }
    let (g, dg) = gv(rho);
    let denom = rho + eps * eps * g * dot(dg, dir);
    let rho_chi = -eps * eps * g * rho * dot(dg, dir_chi) / denom;
    let rho_psi = -eps * eps * g * rho * dot(dg, dir_psi) / denom;
    let v_chi: [f64; 3] = std::array::from_fn(|i| rho_chi * dir[i] + rho * dir_chi[i]);
    let v_psi: [f64; 3] = std::array::from_fn(|i| rho_psi * dir[i] + rho * dir_psi[i]);
    let lift = |p1: f64, v: [f64; 3]| [p1, v[1], v[0], v[2]];
    GraphPoint {
        z: lift(-eps * g, dir.map(|d| rho * d)),
        d_chi: lift(-eps * dot(dg, v_chi), v_chi),
        d_psi: lift(-eps * dot(dg, v_psi), v_psi),
    }
}

fn chi_integral(slice: &SignedSlice, psi: f64, gl: &GaussLegendre) -> f64 {
    let s = |chi: f64| slice.sign_field(&graph_point(slice, chi, psi).z);
    let form = |chi: f64| {
        let gp = graph_point(slice, chi, psi);
        omega(&gp.d_chi, &gp.d_psi)
    };
    let h = PI / CHI_SCAN as f64;
    let mut total = 0.0;
    let mut start: Option<f64> = None;
    let mut prev = s(0.0);
    if prev > 0.0 {
        start = Some(0.0);
    }
    for k in 1..=CHI_SCAN {
        let chi = k as f64 * h;
        let cur = s(chi);
        if (prev > 0.0) != (cur > 0.0) {
            let (mut lo, mut hi) = (chi - h, chi);
            while hi - lo > 1e-15 {
                let mid = 0.5 * (lo + hi);
                if (s(mid) > 0.0) == (prev > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            match start.take() {
                Some(a) => total += piece(gl, a, root, &form),
                None => start = Some(root),
            }
        }
        prev = cur;
    }
    if let Some(a) = start {
        total += piece(gl, a, PI, &form);
    }
    total
}

fn piece(gl: &GaussLegendre, a: f64, b: f64, f: &impl Fn(f64) -> f64) -> f64 {
    let pieces = ((b - a) / PI * 16.0).ceil().max(1.0) as usize;
    gl.integrate_composite(a, b, pieces, f)
}

/// The constant in `∫_M ω = c_2 R² · E[#(C ∩ M)]`, fixed by the linear slice.
pub const C2: f64 = PI;

#[derive(Clone, Debug, Serialize)]
pub struct CroftonReport {
    pub slice: SignedSlice,
    pub lhs: f64,
    pub rhs: f64,
    pub c_n: f64,
    pub mean_positive: f64,
    pub mean_negative: f64,
    pub ci_halfwidth: f64,
    pub samples: u64,
    pub seed: u64,
    /// Circles flagged degenerate and left out of the means.
    pub degenerate: u64,
    /// Circles meeting Σ⁺ less than once.
    pub missing_positive: u64,
}

impl CroftonReport {
    /// `|lhs − rhs| ≤ abs + k · CI`.
    pub fn agrees(&self, abs: f64, k: f64) -> bool {
        (self.lhs - self.rhs).abs() <= abs + k * self.ci_halfwidth
    }
}

pub fn crofton_check(slice: &SignedSlice, samples: u64, seed: u64) -> Result<CroftonReport> {
    let lhs = sigma_plus_area(slice)?;
    let circles = sample_hopf_circles(slice.n, slice.radius, samples, seed)?;
    let counts: Vec<Crossings> = circles
        .par_iter()
        .map(|c| signed_intersections(c, slice))
        .collect::<Result<Vec<_>>>()?;
    let good: Vec<&Crossings> = counts.iter().filter(|c| !c.degenerate).collect();
    if good.is_empty() {
        return Err(Error::InvalidParameter("every sampled circle was degenerate".into()));
    }
    let m = good.len() as f64;
    let mean_positive = good.iter().map(|c| c.positive as f64).sum::<f64>() / m;
    let mean_negative = good.iter().map(|c| c.negative as f64).sum::<f64>() / m;
    let var = good.iter().map(|c| (c.positive as f64 - mean_positive).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    let scale = C2 * slice.radius * slice.radius;
    Ok(CroftonReport {
        slice: slice.clone(),
        lhs,
        rhs: scale * mean_positive,
        c_n: C2,
        mean_positive,
        mean_negative,
        ci_halfwidth: Z95 * scale * (var / m).sqrt(),
        samples,
        seed,
        degenerate: counts.len() as u64 - good.len() as u64,
        missing_positive: good.iter().filter(|c| c.positive == 0).count() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let g = Polynomial::parse("q2^3 - 0.5*q1*p2^2 + 2 q1").unwrap_err();
        assert!(matches!(g, Error::Malformed(_)));
        let g = Polynomial::parse("q2^3 - 0.5*q1*p2^2 + 2*q1 - q1").unwrap();
        assert_eq!(g.terms.len(), 3);
        assert!(g.is_odd());
        assert_eq!(Polynomial::parse(&g.to_string()).unwrap(), g);
        assert!(!Polynomial::parse("q1*q2").unwrap().is_odd());
        assert!(Polynomial::parse("0").unwrap().is_zero());
        assert_eq!(Polynomial::parse("1e-2*q1").unwrap().terms[0].coeff, 0.01);
        assert!(Polynomial::parse("").is_err());
        assert!(Polynomial::parse("q0").is_err());
    }

    #[test]
    fn slice_rejects_even_terms() {
        let even = Polynomial::parse("q1^2").unwrap();
        assert!(matches!(SignedSlice::new(2, 1.0, 0.1, even), Err(Error::NotOdd(_))));
        let far = Polynomial::parse("q3").unwrap();
        assert!(SignedSlice::new(2, 1.0, 0.1, far).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = Polynomial::parse("q2^3 - 0.5*q1*p2^2 + p1*q1*q2").unwrap();
        let s = SignedSlice::new(2, 1.0, 0.3, g).unwrap();
        let x = [0.3, -0.2, 0.5, 0.7];
        let gr = s.grad_h(&x);
        for i in 0..4 {
            let mut a = x;
            let mut b = x;
            a[i] += 1e-6;
            b[i] -= 1e-6;
            assert!(((s.h(&a) - s.h(&b)) / 2e-6 - gr[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn circles_stay_on_the_sphere() {
        let cs = sample_hopf_circles(2, 1.5, 1000, 4).unwrap();
        assert_eq!(cs, sample_hopf_circles(2, 1.5, 1000, 4).unwrap());
        for c in &cs {
            assert!((c.radius() - 1.5).abs() < 1e-12);
            let x = c.point(0.7);
            assert!((x.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_slice_counts() {
        let s = SignedSlice::linear(2, 1.0).unwrap();
        for c in sample_hopf_circles(2, 1.0, 500, 1).unwrap() {
            assert_eq!(signed_intersections(&c, &s).unwrap(), Crossings { positive: 1, negative: 1, degenerate: false });
        }
        let flat = HopfCircle::new(vec![0.0, 0.6, 0.0, 0.8]).unwrap();
        assert!(signed_intersections(&flat, &s).unwrap().degenerate);
    }

    #[test]
    fn linear_area_is_pi_r_squared() {
        for r in [1.0, 2.0] {
            let a = sigma_plus_area(&SignedSlice::linear(2, r).unwrap()).unwrap();
            assert!((a - PI * r * r).abs() < 1e-10, "{a}");
        }
    }

    #[test]
    fn graph_condition_is_enforced() {
        let g = Polynomial::parse("q2^3").unwrap();
        assert!(matches!(sigma_plus_area(&SignedSlice::new(2, 1.0, 0.2, g.clone()).unwrap()), Err(Error::GraphCondition(_))));
        assert!(sigma_plus_area(&SignedSlice::new(2, 1.0, 0.1, g).unwrap()).is_ok());
        let p1 = Polynomial::parse("p1^3").unwrap();
        assert!(sigma_plus_area(&SignedSlice::new(2, 1.0, 0.01, p1).unwrap()).is_err());
    }
}
