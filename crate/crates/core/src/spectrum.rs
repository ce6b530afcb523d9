//! The semisimple side of `QH*(Gr(r, r+s))` at `q = 1`.
//!
//! `Spec QH*` is a set of `binomial(r+s, r)` reduced points `ζ^I`, one per
//! `r`-subset `I ⊂ {1, …, r+s}`. Schubert classes evaluate there as Schur
//! polynomials in the chosen roots. Everything here is double-precision;
//! the exact engine in [`crate::tqft`] is the reference these values are
//! reconciled against.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::QuantumRing;
use crate::partitions::{enumerate_partitions, BoxContext, Partition};

/// A point `ζ^I` of `Spec QH*`.
#[derive(Clone, Debug)]
pub struct SpectralPoint {
    /// 1-based indices in increasing order.
    pub subset: Vec<usize>,
    /// `ζ^j` (r odd) or `ζ^{j+1/2}` (r even) for `j ∈ I`, same order.
    pub roots: Vec<Complex64>,
}

impl SpectralPoint {
    pub fn new(ctx: BoxContext, subset: Vec<usize>) -> Result<Self> {
        let n = ctx.n();
        if subset.len() != ctx.r()
            || subset.iter().any(|&j| j == 0 || j > n)
            || !subset.windows(2).all(|w| w[0] < w[1])
        {
            return Err(Error::OutOfRange(format!(
                "{subset:?} is not an increasing {}-subset of 1..={n}",
                ctx.r()
            )));
        }
        let half = if ctx.r().is_multiple_of(2) { 0.5 } else { 0.0 };
        let roots = subset
            .iter()
            .map(|&j| Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + half) / n as f64))
            .collect();
        Ok(Self { subset, roots })
    }

    /// The complementary subset `Ī`.
    pub fn complement_subset(&self, ctx: BoxContext) -> Vec<usize> {
        (1..=ctx.n()).filter(|j| !self.subset.contains(j)).collect()
    }
}

/// JSON view of a complex number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl Serialize for SpectralPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            subset: &'a [usize],
            roots: Vec<ComplexJson>,
        }
        View {
            subset: &self.subset,
            roots: self.roots.iter().map(|&z| z.into()).collect(),
        }
        .serialize(serializer)
    }
}

/// All `r`-subsets in lexicographic order.
pub fn spectral_points(ctx: BoxContext) -> Vec<SpectralPoint> {
    let mut out = Vec::with_capacity(ctx.basis_count());
    let mut cur = Vec::with_capacity(ctx.r());
    subsets(ctx.n(), ctx.r(), 1, &mut cur, &mut |s| {
        out.push(SpectralPoint::new(ctx, s.to_vec()).expect("generated subset is valid"));
    });
    out
}

fn subsets(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if cur.len() == r {
        emit(cur);
        return;
    }
    for j in start..=n {
        if n - j + 1 < r - cur.len() {
            break;
        }
        cur.push(j);
        subsets(n, r, j + 1, cur, emit);
        cur.pop();
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .expect("non-empty range");
        if m[pivot][col].norm() == 0.0 {
            return Complex64::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..n {
            let factor = m[row][col] / p;
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let sub = factor * m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det
}

/// Schur polynomial `s_a` at the roots of `point`, via the bialternant
/// `det(x_j^{a_i + r − i}) / det(x_j^{r − i})`.
pub fn schur_eval(a: &Partition, point: &SpectralPoint) -> Complex64 {
    let r = point.roots.len();
    debug_assert_eq!(a.len(), r);
    let alternant = |shift: &dyn Fn(usize) -> usize| {
        let m: Vec<Vec<Complex64>> = (0..r)
            .map(|i| point.roots.iter().map(|x| x.powu((shift(i) + r - 1 - i) as u32)).collect())
            .collect();
        determinant(m)
    };
    let parts = a.parts();
    alternant(&|i| parts[i]) / alternant(&|_| 0)
}

/// `Vand(ζ^I) = Π_{j<k} |x_j − x_k|²` (1 when `r = 1`).
pub fn vand(point: &SpectralPoint) -> f64 {
    let x = &point.roots;
    let mut prod = 1.0;
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            prod *= (x[j] - x[k]).norm_sqr();
        }
    }
    prod
}

/// `a_I = (r+s)^r / Vand(ζ^I)`.
pub fn coupling_a(ctx: BoxContext, point: &SpectralPoint) -> f64 {
    (ctx.n() as f64).powi(ctx.r() as i32) / vand(point)
}

/// `Π_{(j,k) ∈ I × Ī} |2 sin π(j−k)/(r+s)|`.
pub fn sine_product(ctx: BoxContext, point: &SpectralPoint) -> f64 {
    let n = ctx.n() as f64;
    let comp = point.complement_subset(ctx);
    point
        .subset
        .iter()
        .flat_map(|&j| comp.iter().map(move |&k| (2.0 * (PI * (j as f64 - k as f64) / n).sin()).abs()))
        .product()
}

/// The Verlinde number `V_g^{r,s}` from the sine-product formula.
pub fn verlinde_sine(ctx: BoxContext, g: u32) -> f64 {
    spectral_points(ctx)
        .iter()
        .map(|p| sine_product(ctx, p).powi(g as i32 - 1))
        .sum()
}

/// `Σ_I a_I^{g−1}`: the closed genus-`g` invariant of Witten's TQFT as a
/// trace over the semisimple basis.
pub fn witten_trace(ctx: BoxContext, g: u32) -> f64 {
    spectral_points(ctx)
        .iter()
        .map(|p| coupling_a(ctx, p).powi(g as i32 - 1))
        .sum()
}

/// `Σ_I (a_I σ_{s^r}(ζ^I))^{g−1} σ_{1^r}(ζ^I)^{−d}`.
pub fn closed_invariant_spectral(ctx: BoxContext, g: u32, d: i64) -> Complex64 {
    let full = ctx.full();
    let column = ctx.column();
    spectral_points(ctx)
        .iter()
        .map(|p| {
            let lambda_sq = coupling_a(ctx, p) * schur_eval(&full, p);
            lambda_sq.powi(g as i32 - 1) * schur_eval(&column, p).powi(-(d as i32))
        })
        .sum()
}

/// `gcd(r, s)` together with `r' = r/gcd` and `s' = s/gcd`.
pub fn reduced_box(ctx: BoxContext) -> (usize, usize, usize) {
    let a = ctx.r().gcd(&ctx.s());
    (a, ctx.r() / a, ctx.s() / a)
}

fn check_gamma(ctx: BoxContext, gamma: usize) -> Result<()> {
    let (a, _, _) = reduced_box(ctx);
    if gamma >= a {
        return Err(Error::OutOfRange(format!("gamma {gamma} not in [0, gcd(r, s) = {a})")));
    }
    Ok(())
}

/// `(r+s)^{r(g−1)} Σ_I σ_{1^r}(ζ^I)^{(r'+s')γ} / Vand(ζ^I)^{g−1}`, the trace
/// of `g − 1` Witten handles composed with `(r'+s')γ` degree-lowerings.
pub fn holla_spectral_complex(ctx: BoxContext, g: u32, gamma: usize) -> Result<Complex64> {
    check_gamma(ctx, gamma)?;
    let (_, rp, sp) = reduced_box(ctx);
    let power = ((rp + sp) * gamma) as i32;
    let column = ctx.column();
    Ok(spectral_points(ctx)
        .iter()
        .map(|p| schur_eval(&column, p).powi(power) * coupling_a(ctx, p).powi(g as i32 - 1))
        .sum())
}

/// Real part of [`holla_spectral_complex`]; fails when the imaginary
/// residue exceeds `1e-6` relative.
pub fn holla_spectral(ctx: BoxContext, g: u32, gamma: usize) -> Result<f64> {
    let z = holla_spectral_complex(ctx, g, gamma)?;
    if z.im.abs() > 1e-6 * z.re.abs().max(1.0) {
        return Err(Error::Integrity(format!("holla sum has imaginary residue {}", z.im)));
    }
    Ok(z.re)
}

/// The variant with the root-of-unity factor also raised to `g − 1`:
/// `(r+s)^{r(g−1)} Σ_I (σ_{1^r}(ζ^I)^{(r'+s')γ} / Vand(ζ^I))^{g−1}`.
/// Agrees with [`holla_spectral`] for `g ≤ 2` and `γ = 0` only.
pub fn holla_spectral_displayed(ctx: BoxContext, g: u32, gamma: usize) -> Result<Complex64> {
    check_gamma(ctx, gamma)?;
    let (_, rp, sp) = reduced_box(ctx);
    let power = ((rp + sp) * gamma) as i32;
    let column = ctx.column();
    let scale = (ctx.n() as f64).powi((ctx.r() as i32) * (g as i32 - 1));
    Ok(spectral_points(ctx)
        .iter()
        .map(|p| (schur_eval(&column, p).powi(power) / vand(p)).powi(g as i32 - 1) * scale)
        .sum())
}

/// `σ_a(ζ^I)` for every basis label `a` (canonical order) at `point`.
pub fn schur_vector(ctx: BoxContext, point: &SpectralPoint) -> Vec<Complex64> {
    enumerate_partitions(ctx).iter().map(|a| schur_eval(a, point)).collect()
}

/// Largest deviation in `Σ_a conj(σ_a(ζ^I)) σ_a(ζ^J) = δ_{IJ} (r+s)^r / Vand(ζ^I)`.
pub fn orthogonality_deviation(ctx: BoxContext) -> f64 {
    let points = spectral_points(ctx);
    let vectors: Vec<Vec<Complex64>> = points.iter().map(|p| schur_vector(ctx, p)).collect();
    let mut worst: f64 = 0.0;
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate() {
            let dot: Complex64 = vi.iter().zip(vj).map(|(x, y)| x.conj() * y).sum();
            let expected = if i == j { coupling_a(ctx, &points[i]) } else { 0.0 };
            worst = worst.max((dot - expected).norm());
        }
    }
    worst
}

/// Largest `|(r+s)^r − Vand(ζ^I) Π_{I×Ī} |2 sin π(j−k)/(r+s)||` over subsets.
pub fn sine_identity_deviation(ctx: BoxContext) -> f64 {
    let lhs = (ctx.n() as f64).powi(ctx.r() as i32);
    spectral_points(ctx)
        .iter()
        .map(|p| (lhs - vand(p) * sine_product(ctx, p)).abs())
        .fold(0.0, f64::max)
}

/// `|n − Π_{k=1}^{n−1} 2 sin(πk/n)|`.
pub fn root_count_deviation(n: usize) -> f64 {
    let prod: f64 = (1..n).map(|k| 2.0 * (PI * k as f64 / n as f64).sin()).product();
    (n as f64 - prod).abs()
}

/// Largest deviation in `|σ_{s^r}(ζ^I)| = 1` and `σ_{s^r}(ζ^I) = σ_{1^r}(ζ^I)^s`.
pub fn point_class_deviation(ctx: BoxContext) -> f64 {
    let full = ctx.full();
    let column = ctx.column();
    spectral_points(ctx)
        .iter()
        .map(|p| {
            let top = schur_eval(&full, p);
            let col = schur_eval(&column, p);
            (top.norm() - 1.0).abs().max((top - col.powu(ctx.s() as u32)).norm())
        })
        .fold(0.0, f64::max)
}

/// Largest deviation of `M_a v_I = σ_a(ζ^I) v_I` over every basis `a` and
/// point `I`, where `M_a` is exact multiplication by `σ_a` at `q = 1` and
/// `v_I` has components `conj(σ_b(ζ^I))`.
pub fn eigenvector_deviation(ring: &QuantumRing) -> f64 {
    let ctx = ring.ctx();
    let basis = ring.basis().to_vec();
    let points = spectral_points(ctx);
    let vectors: Vec<Vec<Complex64>> = points
        .iter()
        .map(|p| schur_vector(ctx, p).into_iter().map(|z| z.conj()).collect())
        .collect();
    let mut worst: f64 = 0.0;
    for a in &basis {
        let m = ring.multiplication_matrix_at_one(a).expect("basis label");
        let m: Vec<Vec<f64>> = m
            .iter()
            .map(|row| row.iter().map(|c| c.to_f64().expect("finite")).collect())
            .collect();
        for (p, v) in points.iter().zip(&vectors) {
            let eig = schur_eval(a, p);
            for (row, vc) in m.iter().zip(v) {
                let mv: Complex64 = row.iter().zip(v).map(|(&x, y)| y * x).sum();
                worst = worst.max((mv - eig * vc).norm());
            }
        }
    }
    worst
}

/// `σ_a * σ_b` at `q = 1` reconstructed spectrally:
/// `Σ_I σ_a(ζ^I) σ_b(ζ^I) σ_I / a_I`, with `σ_I = Σ_c conj(σ_c(ζ^I)) σ_c`.
pub fn spectral_product(ctx: BoxContext, a: &Partition, b: &Partition) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); ctx.basis_count()];
    for p in spectral_points(ctx) {
        let weight = schur_eval(a, &p) * schur_eval(b, &p) / coupling_a(ctx, &p);
        for (slot, z) in out.iter_mut().zip(schur_vector(ctx, &p)) {
            *slot += weight * z.conj();
        }
    }
    out
}
