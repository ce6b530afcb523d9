//! The weighted TQFT `F(g|d)_m^n` over `Z[q, q^-1]`.
//!
//! Every coefficient is a closed-surface integral
//!
//! ```text
//! integrate(g, d, [a_1, …, a_N]) = counit(σ_{a_1} * … * σ_{a_N} * h^g * D(d))
//! ```
//!
//! where `h = Σ_a σ_a * σ_{a^c}` adds a handle and `D(d)` is the weight-`d`
//! cylinder: `σ_{1^r}^{-d}` for `d ≤ 0` and `(σ_s q^{-1})^d` for `d > 0`.
//! The `q^e` coefficient is the intersection number on the Quot scheme
//! `Q_{e,V}` of a general degree-`d` bundle on a genus-`g` curve, so it can
//! only be nonzero when `Σ|a_i| = rd + (r+s)e − rs(g−1)`.
//!
//! Tensors key their output side by the label after complementation: the
//! entry at `(a⃗, c⃗)` is the coefficient of `σ_{c_1} ⊗ … ⊗ σ_{c_n}` in the
//! image of `σ_{a_1} ⊗ … ⊗ σ_{a_m}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{column_class, row_class, QClass, QuantumRing};
use crate::laurent::LaurentInt;
use crate::partitions::{BoxContext, Partition};
use crate::spectrum::reduced_box;

/// Default cap on `basis_count^{m+n}`.
pub const DEFAULT_MAX_ENTRIES: u128 = 1_000_000;

/// Genus, weight, and boundary arities of a cobordism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceSignature {
    pub g: u32,
    pub d: i64,
    pub m: usize,
    pub n: usize,
}

impl SurfaceSignature {
    pub fn new(g: u32, d: i64, m: usize, n: usize) -> Self {
        Self { g, d, m, n }
    }
}

impl fmt::Display for SurfaceSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({}|{})_{}^{}", self.g, self.d, self.m, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorKey {
    pub inputs: Vec<Partition>,
    pub outputs: Vec<Partition>,
}

/// Sparse coefficients of `F(g|d)_m^n` in the Schubert basis.
#[derive(Clone, PartialEq, Eq)]
pub struct TqftTensor {
    ctx: BoxContext,
    sig: SurfaceSignature,
    entries: BTreeMap<TensorKey, LaurentInt>,
}

impl TqftTensor {
    pub fn new(ctx: BoxContext, sig: SurfaceSignature) -> Self {
        Self { ctx, sig, entries: BTreeMap::new() }
    }

    pub fn ctx(&self) -> BoxContext {
        self.ctx
    }

    pub fn signature(&self) -> SurfaceSignature {
        self.sig
    }

    pub fn entries(&self) -> &BTreeMap<TensorKey, LaurentInt> {
        &self.entries
    }

    pub fn get(&self, inputs: &[Partition], outputs: &[Partition]) -> LaurentInt {
        self.entries
            .get(&TensorKey { inputs: inputs.to_vec(), outputs: outputs.to_vec() })
            .cloned()
            .unwrap_or_default()
    }

    pub fn insert(&mut self, key: TensorKey, value: &LaurentInt) -> Result<()> {
        if key.inputs.len() != self.sig.m || key.outputs.len() != self.sig.n {
            return Err(Error::Arity(format!(
                "key with {} inputs and {} outputs in a tensor of shape {}",
                key.inputs.len(),
                key.outputs.len(),
                self.sig
            )));
        }
        if let Some(bad) = key.inputs.iter().chain(&key.outputs).find(|p| !self.ctx.contains(p)) {
            return Err(Error::InvalidPartition { parts: bad.parts().to_vec(), r: self.ctx.r(), s: self.ctx.s() });
        }
        self.add_entry(key, value);
        Ok(())
    }

    fn add_entry(&mut self, key: TensorKey, value: &LaurentInt) {
        if value.is_zero() {
            return;
        }
        let slot = self.entries.entry(key.clone()).or_default();
        *slot += value;
        if slot.is_zero() {
            self.entries.remove(&key);
        }
    }

    /// Same entries, different label. Used when a slot operation changes
    /// the surface in a way only the caller knows.
    pub fn relabel(mut self, sig: SurfaceSignature) -> Result<Self> {
        if sig.m != self.sig.m || sig.n != self.sig.n {
            return Err(Error::Arity(format!("cannot relabel {} as {sig}", self.sig)));
        }
        self.sig = sig;
        Ok(self)
    }

    /// Entries specialized at `q = 1`.
    pub fn at_one(&self) -> BTreeMap<TensorKey, BigInt> {
        self.entries
            .iter()
            .map(|(k, v)| (k.clone(), v.at_one()))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }
}

impl fmt::Debug for TqftTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{} entries]", self.sig, self.entries.len())?;
        for (k, v) in self.entries.iter().take(16) {
            write!(f, "\n  {:?} -> {:?}: {v}", k.inputs, k.outputs)?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct EntryRef<'a> {
    #[serde(rename = "in")]
    inputs: &'a [Partition],
    #[serde(rename = "out")]
    outputs: &'a [Partition],
    laurent: &'a LaurentInt,
}

#[derive(Deserialize)]
struct EntryOwned {
    #[serde(rename = "in")]
    inputs: Vec<Partition>,
    #[serde(rename = "out")]
    outputs: Vec<Partition>,
    laurent: LaurentInt,
}

/// `{signature, entries: [{in, out, laurent}]}` in canonical key order.
impl Serialize for TqftTensor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            signature: SurfaceSignature,
            entries: Vec<EntryRef<'a>>,
        }
        View {
            signature: self.sig,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| EntryRef { inputs: &k.inputs, outputs: &k.outputs, laurent: v })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl TqftTensor {
    pub fn from_json<'de, D: serde::Deserializer<'de>>(ctx: BoxContext, deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct View {
            signature: SurfaceSignature,
            entries: Vec<EntryOwned>,
        }
        let view = View::deserialize(deserializer)?;
        let mut out = TqftTensor::new(ctx, view.signature);
        for e in view.entries {
            out.insert(TensorKey { inputs: e.inputs, outputs: e.outputs }, &e.laurent)
                .map_err(serde::de::Error::custom)?;
        }
        Ok(out)
    }
}

/// A finite Quot scheme count extracted from a closed invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCount {
    /// The unique `e` with `rd + (r+s)e = rs(g−1)`.
    pub e: i64,
    pub count: BigInt,
}

/// The weighted TQFT of `Gr(r, r+s)`.
pub struct WeightedTqft {
    ring: Arc<QuantumRing>,
    max_entries: u128,
    handle: OnceLock<QClass>,
}

impl WeightedTqft {
    pub fn new(ctx: BoxContext) -> Self {
        Self::with_ring(Arc::new(QuantumRing::new(ctx)))
    }

    pub fn with_ring(ring: Arc<QuantumRing>) -> Self {
        Self { ring, max_entries: DEFAULT_MAX_ENTRIES, handle: OnceLock::new() }
    }

    pub fn with_max_entries(mut self, cap: u128) -> Self {
        self.max_entries = cap;
        self
    }

    pub fn ring(&self) -> &QuantumRing {
        &self.ring
    }

    pub fn ctx(&self) -> BoxContext {
        self.ring.ctx()
    }

    /// `Σ_a σ_a * σ_{a^c}`.
    pub fn handle_element(&self) -> &QClass {
        self.handle.get_or_init(|| {
            let ctx = self.ctx();
            let mut acc = QClass::zero(ctx);
            for a in self.ring.basis() {
                let ac = a.complement(ctx).expect("basis label");
                let prod = self.ring.basis_product(a, &ac).expect("basis labels");
                acc = acc.add(&prod).expect("same context");
            }
            acc
        })
    }

    /// `σ_{1^r}^{-d}` for `d ≤ 0`, `σ_s^d q^{-d}` for `d > 0`.
    pub fn degree_element(&self, d: i64) -> QClass {
        let ctx = self.ctx();
        let base = if d <= 0 { column_class(ctx) } else { row_class(ctx).shift(-1) };
        self.ring.power(&base, d.unsigned_abs() as u32).expect("same context")
    }

    /// `h^g * D(d)`: the closed surface with all insertions removed.
    pub fn closed_class(&self, g: u32, d: i64) -> QClass {
        let h = self.ring.power(self.handle_element(), g).expect("same context");
        self.ring.quantum_product(&h, &self.degree_element(d)).expect("same context")
    }

    /// The linear functional `x ↦ counit(x * h^g * D(d))`, tabulated on the
    /// basis so many integrals at the same `(g, d)` share one closed class.
    pub fn closed_functional(&self, g: u32, d: i64) -> ClosedFunctional<'_> {
        let closed = self.closed_class(g, d);
        let values = self
            .ring
            .basis()
            .iter()
            .map(|c| {
                let sigma = QClass::basis(self.ctx(), c.clone());
                self.ring.quantum_product(&sigma, &closed).expect("same context").counit()
            })
            .collect();
        ClosedFunctional { tqft: self, values }
    }

    /// `counit(σ_{a_1} * … * σ_{a_N} * h^g * D(d))`.
    pub fn integrate(&self, g: u32, d: i64, insertions: &[Partition]) -> Result<LaurentInt> {
        let ctx = self.ctx();
        let classes = insertions
            .iter()
            .map(|a| QClass::try_basis(ctx, a.clone()))
            .collect::<Result<Vec<_>>>()?;
        let prod = self.ring.product_all(classes.iter())?;
        let closed = self.closed_class(g, d);
        Ok(self.ring.quantum_product(&prod, &closed)?.counit())
    }

    /// The only `e` for which `integrate(g, d, insertions)` may have a
    /// nonzero `q^e` term, if one exists.
    pub fn expected_exponent(&self, g: u32, d: i64, total_size: usize) -> Option<i64> {
        let ctx = self.ctx();
        let (r, s, n) = (ctx.r() as i64, ctx.s() as i64, ctx.n() as i64);
        let num = total_size as i64 - r * d + r * s * (g as i64 - 1);
        (num % n == 0).then_some(num / n)
    }

    fn check_cap(&self, slots: usize) -> Result<()> {
        let count = self.ctx().basis_count() as u128;
        let mut entries: u128 = 1;
        for _ in 0..slots {
            entries = entries.saturating_mul(count);
        }
        if entries > self.max_entries {
            return Err(Error::ResourceCap { entries, cap: self.max_entries });
        }
        Ok(())
    }

    /// `F(g|d)_m^n` with entry `(a⃗, c⃗) = integrate(g, d, a⃗ ++ (c_1^c, …, c_n^c))`.
    pub fn weighted_map(&self, g: u32, d: i64, m: usize, n: usize) -> Result<TqftTensor> {
        self.check_cap(m + n)?;
        let ctx = self.ctx();
        let functional = self.closed_functional(g, d);
        let basis = self.ring.basis().to_vec();
        let tuples = cartesian(&basis, m + n);
        let values: Vec<(TensorKey, LaurentInt)> = tuples
            .into_par_iter()
            .map(|labels| {
                let (inputs, outputs) = labels.split_at(m);
                let mut insertions = inputs.to_vec();
                insertions.extend(outputs.iter().map(|c| c.complement_unchecked(ctx.s())));
                let v = functional.eval(&insertions).expect("basis labels");
                (TensorKey { inputs: inputs.to_vec(), outputs: outputs.to_vec() }, v)
            })
            .collect();
        let mut out = TqftTensor::new(ctx, SurfaceSignature::new(g, d, m, n));
        for (k, v) in values {
            out.add_entry(k, &v);
        }
        Ok(out)
    }

    /// Witten's `F(g)_m^n = F(g | s(g−1+n))_m^n`.
    pub fn witten_map(&self, g: u32, m: usize, n: usize) -> Result<TqftTensor> {
        let s = self.ctx().s() as i64;
        self.weighted_map(g, s * (g as i64 - 1 + n as i64), m, n)
    }

    /// `η_{g,d,N} = F(g|d)_0^N`.
    pub fn eta_class(&self, g: u32, d: i64, slots: usize) -> Result<TqftTensor> {
        self.weighted_map(g, d, 0, slots)
    }

    /// Multiply output slot `k` (1-based) by `z`. The signature is kept;
    /// use [`TqftTensor::relabel`] when `z` changes the surface.
    pub fn slot_multiply(&self, t: &TqftTensor, k: usize, z: &QClass) -> Result<TqftTensor> {
        if t.ctx != self.ctx() || z.ctx() != self.ctx() {
            return Err(Error::ContextMismatch(t.ctx.r(), t.ctx.s(), z.ctx().r(), z.ctx().s()));
        }
        if k == 0 || k > t.sig.n {
            return Err(Error::OutOfRange(format!("slot {k} not in [1, {}]", t.sig.n)));
        }
        let mut out = TqftTensor::new(t.ctx, t.sig);
        let mut cache: BTreeMap<Partition, QClass> = BTreeMap::new();
        for (key, v) in &t.entries {
            let label = &key.outputs[k - 1];
            if !cache.contains_key(label) {
                let prod = self.ring.quantum_product(&QClass::basis(t.ctx, label.clone()), z)?;
                cache.insert(label.clone(), prod);
            }
            for (c, w) in cache[label].terms() {
                let mut outputs = key.outputs.clone();
                outputs[k - 1] = c.clone();
                out.add_entry(TensorKey { inputs: key.inputs.clone(), outputs }, &(v * w));
            }
        }
        Ok(out)
    }

    /// Integrate over the `k`-th factor (1-based): keep entries whose slot
    /// label is the point class and drop that slot.
    pub fn slot_pushforward(&self, t: &TqftTensor, k: usize) -> Result<TqftTensor> {
        if k == 0 || k > t.sig.n {
            return Err(Error::OutOfRange(format!("slot {k} not in [1, {}]", t.sig.n)));
        }
        let full = t.ctx.full();
        let mut sig = t.sig;
        sig.n -= 1;
        let mut out = TqftTensor::new(t.ctx, sig);
        for (key, v) in &t.entries {
            if key.outputs[k - 1] == full {
                let mut outputs = key.outputs.clone();
                outputs.remove(k - 1);
                out.add_entry(TensorKey { inputs: key.inputs.clone(), outputs }, v);
            }
        }
        Ok(out)
    }

    /// Closed invariant `integrate(g, d, [])` read as a point count.
    ///
    /// `Ok(None)` when `rd + (r+s)e = rs(g−1)` has no integer solution (no
    /// finite Quot scheme exists). Fails with an integrity error if the
    /// invariant is not a single nonnegative monomial at the solved `e`.
    pub fn finite_count(&self, g: u32, d: i64) -> Result<Option<FiniteCount>> {
        let value = self.integrate(g, d, &[])?;
        let Some(e) = self.expected_exponent(g, d, 0) else {
            if !value.is_zero() {
                return Err(Error::Integrity(format!(
                    "closed invariant at g={g}, d={d} is {value} but no exponent balances the dimension"
                )));
            }
            return Ok(None);
        };
        let count = value.coeff(e);
        if value != LaurentInt::monomial(count.clone(), e) {
            return Err(Error::Integrity(format!("closed invariant at g={g}, d={d} is {value}, not a multiple of q^{e}")));
        }
        if count.is_negative() {
            return Err(Error::Integrity(format!("negative point count {count} at g={g}, d={d}")));
        }
        Ok(Some(FiniteCount { e, count }))
    }

    /// `V_g^{r,s}`: the `q^0` coefficient of `integrate(g, s(g−1), [])`.
    pub fn verlinde_exact(&self, g: u32) -> Result<BigInt> {
        let d = self.ctx().s() as i64 * (g as i64 - 1);
        match self.finite_count(g, d)? {
            Some(FiniteCount { e: 0, count }) => Ok(count),
            other => Err(Error::Integrity(format!("Verlinde extraction at g={g} produced {other:?}"))),
        }
    }

    /// Points of `Q_{r'γ, V}` for general `V` of degree `−(r'+s')γ + s(g−1)`.
    pub fn holla_exact(&self, g: u32, gamma: usize) -> Result<BigInt> {
        let ctx = self.ctx();
        let (a, rp, sp) = reduced_box(ctx);
        if gamma >= a {
            return Err(Error::OutOfRange(format!("gamma {gamma} not in [0, gcd(r, s) = {a})")));
        }
        let d = -(((rp + sp) * gamma) as i64) + ctx.s() as i64 * (g as i64 - 1);
        let e = (rp * gamma) as i64;
        match self.finite_count(g, d)? {
            Some(fc) if fc.e == e => Ok(fc.count),
            other => Err(Error::Integrity(format!("Holla extraction at g={g}, gamma={gamma} produced {other:?}"))),
        }
    }

    /// Whether every entry of an `m = 0` tensor sits in the degree
    /// `Σ|c_j| + e(r+s) = (N+g−1)rs − rd`.
    pub fn eta_is_homogeneous(&self, t: &TqftTensor) -> bool {
        let ctx = self.ctx();
        let (rs, n, r) = (ctx.dim() as i64, ctx.n() as i64, ctx.r() as i64);
        let sig = t.sig;
        let target = (sig.n as i64 + sig.g as i64 - 1) * rs - r * sig.d;
        t.entries.iter().all(|(key, v)| {
            let size: i64 = key.outputs.iter().map(|c| c.size() as i64).sum();
            v.terms().all(|(e, _)| size + e * n == target)
        })
    }
}

/// See [`WeightedTqft::closed_functional`].
pub struct ClosedFunctional<'a> {
    tqft: &'a WeightedTqft,
    values: Vec<LaurentInt>,
}

impl ClosedFunctional<'_> {
    /// `integrate(g, d, insertions)` for the `(g, d)` this was built at.
    pub fn eval(&self, insertions: &[Partition]) -> Result<LaurentInt> {
        let ring = self.tqft.ring();
        let classes = insertions
            .iter()
            .map(|a| QClass::try_basis(ring.ctx(), a.clone()))
            .collect::<Result<Vec<_>>>()?;
        let prod = ring.product_all(classes.iter())?;
        let table = ring.structure_table();
        let mut out = LaurentInt::zero();
        for (c, v) in prod.terms() {
            let idx = table.index_of(c).expect("basis label");
            out.add_product(v, &self.values[idx]);
        }
        Ok(out)
    }

    /// Value on a single class `x`.
    pub fn eval_class(&self, x: &QClass) -> Result<LaurentInt> {
        let table = self.tqft.ring().structure_table();
        let mut out = LaurentInt::zero();
        for (c, v) in x.terms() {
            let idx = table.index_of(c).ok_or_else(|| Error::InvalidPartition {
                parts: c.parts().to_vec(),
                r: table.ctx().r(),
                s: table.ctx().s(),
            })?;
            out.add_product(v, &self.values[idx]);
        }
        Ok(out)
    }
}

impl fmt::Debug for WeightedTqft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedTqft")
            .field("ring", &self.ring)
            .field("max_entries", &self.max_entries)
            .finish()
    }
}

/// `T2 ∘ T1`, gluing all `k = t1.n = t2.m ≥ 1` circles.
///
/// Entry `(a⃗, c⃗) = Σ_{b⃗} T1[a⃗][b⃗] · T2[b⃗][c⃗]`; the glued surface has genus
/// `g1 + g2 + k − 1` and weight `d1 + d2`.
pub fn compose(t2: &TqftTensor, t1: &TqftTensor) -> Result<TqftTensor> {
    if t1.ctx != t2.ctx {
        return Err(Error::ContextMismatch(t1.ctx.r(), t1.ctx.s(), t2.ctx.r(), t2.ctx.s()));
    }
    let k = t1.sig.n;
    if k != t2.sig.m {
        return Err(Error::Arity(format!("cannot compose {} after {}", t2.sig, t1.sig)));
    }
    if k == 0 {
        return Err(Error::Arity("composition must glue at least one circle".into()));
    }
    let sig = SurfaceSignature {
        g: t1.sig.g + t2.sig.g + k as u32 - 1,
        d: t1.sig.d + t2.sig.d,
        m: t1.sig.m,
        n: t2.sig.n,
    };
    let mut by_input: BTreeMap<&[Partition], Vec<(&[Partition], &LaurentInt)>> = BTreeMap::new();
    for (key, v) in &t2.entries {
        by_input.entry(&key.inputs).or_default().push((&key.outputs, v));
    }
    let mut acc: BTreeMap<TensorKey, LaurentInt> = BTreeMap::new();
    for (key, v1) in &t1.entries {
        let Some(row) = by_input.get(key.outputs.as_slice()) else { continue };
        for (outputs, v2) in row {
            acc.entry(TensorKey { inputs: key.inputs.clone(), outputs: outputs.to_vec() })
                .or_default()
                .add_product(v1, v2);
        }
    }
    let mut out = TqftTensor::new(t1.ctx, sig);
    for (k, v) in acc {
        out.add_entry(k, &v);
    }
    Ok(out)
}

/// All `len`-tuples over `basis`, lexicographic in basis order.
fn cartesian(basis: &[Partition], len: usize) -> Vec<Vec<Partition>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                basis.iter().map(move |b| {
                    let mut next = prefix.clone();
                    next.push(b.clone());
                    next
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(r: usize, s: usize) -> BoxContext {
        BoxContext::new(r, s).unwrap()
    }

    fn p(c: BoxContext, parts: &[usize]) -> Partition {
        Partition::from_loose(c, parts).unwrap()
    }

    #[test]
    fn handle_examples() {
        let c = ctx(1, 1);
        let t = WeightedTqft::new(c);
        assert_eq!(t.handle_element(), &QClass::monomial(c, p(c, &[1]), LaurentInt::constant(2)));
        let c = ctx(2, 2);
        let t = WeightedTqft::new(c);
        assert_eq!(t.handle_element().counit(), LaurentInt::constant(6));
    }

    #[test]
    fn degree_examples() {
        let c = ctx(2, 3);
        let t = WeightedTqft::new(c);
        assert_eq!(t.degree_element(0), QClass::one(c));
        assert_eq!(t.degree_element(-1), column_class(c));
        for d in -6..=6 {
            let prod = t.ring().quantum_product(&t.degree_element(d), &t.degree_element(-d)).unwrap();
            assert_eq!(prod, QClass::one(c), "d={d}");
        }
        let c = ctx(1, 1);
        let t = WeightedTqft::new(c);
        assert_eq!(t.degree_element(1), QClass::basis(c, p(c, &[1])).shift(-1));
    }

    #[test]
    fn integrate_examples() {
        let c = ctx(2, 2);
        let t = WeightedTqft::new(c);
        for a in c.partitions() {
            let ac = a.complement(c).unwrap();
            assert_eq!(t.integrate(0, 0, &[a, ac]).unwrap(), LaurentInt::one());
        }
        let one = p(c, &[1]);
        assert_eq!(t.integrate(0, 0, &vec![one; 4]).unwrap(), LaurentInt::constant(2));

        let t = WeightedTqft::new(ctx(1, 1));
        assert_eq!(t.integrate(2, 1, &[]).unwrap(), LaurentInt::constant(4));
    }

    #[test]
    fn integrate_rejects_foreign_partitions() {
        let t = WeightedTqft::new(ctx(2, 2));
        let bad = Partition::from_loose(ctx(2, 3), &[3]).unwrap();
        assert!(t.integrate(0, 0, &[bad]).is_err());
    }

    #[test]
    fn tensor_examples() {
        let c = ctx(2, 2);
        let t = WeightedTqft::new(c);
        let id = t.weighted_map(0, 0, 1, 1).unwrap();
        assert_eq!(id.entries().len(), c.basis_count());
        for a in c.partitions() {
            assert_eq!(id.get(std::slice::from_ref(&a), std::slice::from_ref(&a)), LaurentInt::one());
        }

        let lower = t.weighted_map(0, -1, 1, 1).unwrap();
        for a in c.partitions() {
            let prod = t.ring().quantum_product(&QClass::basis(c, a.clone()), &column_class(c)).unwrap();
            for cc in c.partitions() {
                assert_eq!(lower.get(std::slice::from_ref(&a), std::slice::from_ref(&cc)), prod.coeff(&cc));
            }
        }

        let mult = t.weighted_map(0, 0, 2, 1).unwrap();
        let one = p(c, &[1]);
        assert_eq!(mult.get(&[one.clone(), one], &[p(c, &[2])]), LaurentInt::one());
    }

    #[test]
    fn resource_cap() {
        let t = WeightedTqft::new(ctx(2, 2)).with_max_entries(100);
        assert!(t.weighted_map(0, 0, 1, 1).is_ok());
        assert!(matches!(t.weighted_map(0, 0, 2, 1), Err(Error::ResourceCap { entries: 216, cap: 100 })));
    }

    #[test]
    fn compose_examples() {
        let c = ctx(1, 2);
        let t = WeightedTqft::new(c);
        let tensor = t.weighted_map(1, 0, 1, 1).unwrap();
        let id = t.weighted_map(0, 0, 1, 1).unwrap();
        assert_eq!(compose(&id, &tensor).unwrap(), tensor);
        assert_eq!(compose(&tensor, &id).unwrap(), tensor);

        let c = ctx(1, 1);
        let t = WeightedTqft::new(c);
        let glued = compose(&t.weighted_map(1, 0, 1, 1).unwrap(), &t.weighted_map(1, 0, 0, 1).unwrap()).unwrap();
        assert_eq!(glued, t.weighted_map(2, 0, 0, 1).unwrap());

        for (g1, d1, g2, d2) in [(0, 1, 2, 0), (1, -1, 1, 2)] {
            let cap = t.weighted_map(g2, d2, 1, 0).unwrap();
            let cup = t.weighted_map(g1, d1, 0, 1).unwrap();
            let closed = compose(&cap, &cup).unwrap();
            assert_eq!(closed.get(&[], &[]), t.integrate(g1 + g2, d1 + d2, &[]).unwrap());
        }
    }

    #[test]
    fn compose_rejects_bad_arity() {
        let t = WeightedTqft::new(ctx(1, 1));
        let a = t.weighted_map(0, 0, 0, 1).unwrap();
        let b = t.weighted_map(0, 0, 2, 1).unwrap();
        assert!(matches!(compose(&b, &a), Err(Error::Arity(_))));
        let closed = t.weighted_map(1, 0, 0, 0).unwrap();
        assert!(matches!(compose(&closed, &closed), Err(Error::Arity(_))));
    }

    #[test]
    fn double_gluing_adds_a_handle() {
        let c = ctx(2, 2);
        let t = WeightedTqft::new(c);
        let pants = t.weighted_map(0, 1, 1, 2).unwrap();
        let copants = t.weighted_map(0, -2, 2, 1).unwrap();
        let torus = compose(&copants, &pants).unwrap();
        assert_eq!(torus.signature(), SurfaceSignature::new(1, -1, 1, 1));
        assert_eq!(torus, t.weighted_map(1, -1, 1, 1).unwrap());
    }

    #[test]
    fn witten_examples() {
        let t = WeightedTqft::new(ctx(2, 1));
        let closed = t.witten_map(2, 0, 0).unwrap();
        assert_eq!(closed.get(&[], &[]), LaurentInt::constant(9));

        let c = ctx(2, 2);
        let t = WeightedTqft::new(c);
        let pairing = t.witten_map(0, 2, 0).unwrap();
        for a in c.partitions() {
            for b in c.partitions() {
                let prod = t.ring().basis_product(&a, &b).unwrap();
                assert_eq!(pairing.get(&[a.clone(), b.clone()], &[]).at_one(), prod.coeff(&c.empty()).at_one());
            }
        }
    }

    #[test]
    fn eta_examples() {
        let c = ctx(2, 2);
        let t = WeightedTqft::new(c);
        let eta = t.eta_class(0, 0, 1).unwrap();
        assert_eq!(eta.entries().len(), 1);
        assert_eq!(eta.get(&[], &[c.empty()]), LaurentInt::one());
        assert!(t.eta_is_homogeneous(&eta));

        let pushed = t.slot_pushforward(&eta, 1).unwrap();
        assert_eq!(pushed.get(&[], &[]), t.integrate(0, 0, &[]).unwrap());

        let z = QClass::one(c);
        assert_eq!(t.slot_multiply(&eta, 1, &z).unwrap(), eta);
        assert!(t.slot_multiply(&eta, 2, &z).is_err());
        assert!(t.slot_pushforward(&eta, 0).is_err());
    }

    #[test]
    fn pushforward_slots_commute() {
        let c = ctx(1, 2);
        let t = WeightedTqft::new(c);
        let eta = t.eta_class(1, 1, 3).unwrap();
        for k in 1..=3 {
            for j in k + 1..=3 {
                let a = t.slot_pushforward(&t.slot_pushforward(&eta, k).unwrap(), j - 1).unwrap();
                let b = t.slot_pushforward(&t.slot_pushforward(&eta, j).unwrap(), k).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn verlinde_and_holla_exact() {
        let t = WeightedTqft::new(ctx(1, 1));
        for g in 1..=5 {
            assert_eq!(t.verlinde_exact(g).unwrap(), BigInt::from(2u32.pow(g)));
        }
        let t = WeightedTqft::new(ctx(1, 2));
        for g in 1..=4 {
            assert_eq!(t.verlinde_exact(g).unwrap(), BigInt::from(3u32.pow(g)));
        }
        let t = WeightedTqft::new(ctx(2, 2));
        assert_eq!(t.holla_exact(2, 0).unwrap(), BigInt::from(40));
        assert_eq!(t.verlinde_exact(2).unwrap(), BigInt::from(40));
        assert_eq!(t.holla_exact(3, 1).unwrap(), BigInt::from(224));
        assert!(matches!(t.holla_exact(2, 2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn unsolvable_degree_has_no_count() {
        // (1,1), g=1: d + 2e = 0 has no solution for odd d.
        let t = WeightedTqft::new(ctx(1, 1));
        assert_eq!(t.finite_count(1, 1).unwrap(), None);
        assert!(t.finite_count(1, 2).unwrap().is_some());
    }

    #[test]
    fn tensor_json_round_trip() {
        let c = ctx(1, 1);
        let t = WeightedTqft::new(c);
        let tensor = t.weighted_map(0, 0, 1, 1).unwrap();
        let s = serde_json::to_string(&tensor).unwrap();
        assert!(s.starts_with(r#"{"signature":{"g":0,"d":0,"m":1,"n":1},"entries":[{"in":[[0]],"out":[[0]],"laurent":{"0":"1"}}"#));
        let mut de = serde_json::Deserializer::from_str(&s);
        assert_eq!(TqftTensor::from_json(c, &mut de).unwrap(), tensor);
    }
}
