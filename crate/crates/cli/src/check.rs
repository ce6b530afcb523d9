//! Self-check suite: every structural invariant of the engine, evaluated on
//! one box and reported with its measured deviation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use qtqft_core::fusion::{column_class, direct_basis_product, row_class};
use qtqft_core::partitions::binomial;
use qtqft_core::spectrum::{
    closed_invariant_spectral, eigenvector_deviation, holla_spectral, orthogonality_deviation,
    point_class_deviation, reduced_box, root_count_deviation, sine_identity_deviation, spectral_product,
    verlinde_sine,
};
use qtqft_core::{compose, BoxContext, ClosedFunctional, LaurentInt, Partition, QClass, TqftTensor, WeightedTqft};
use serde::Serialize;

const SPECTRAL_TOL: f64 = 1e-8;
const RECONCILE_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Fast,
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Mismatch count for exact checks, measured error for floating ones.
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub r: usize,
    pub s: usize,
    pub suite: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct Limits {
    genus: u32,
    degree_span: i64,
    arity: usize,
    verlinde_genus: u32,
    holla_genera: &'static [u32],
}

/// Outcome of one check body: `(deviation, detail)` or an error message.
type Measured = Result<(f64, String), String>;

type Job<'a> = Box<dyn Fn() -> Measured + 'a>;

fn exact(mismatches: usize, total: usize, first: Option<String>) -> Measured {
    match first {
        Some(msg) => Ok((mismatches as f64, format!("{mismatches}/{total} mismatched, first: {msg}"))),
        None => Ok((0.0, format!("{total} exact"))),
    }
}

struct Tally {
    total: usize,
    bad: usize,
    first: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Self { total: 0, bad: 0, first: None }
    }

    fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.bad += 1;
            self.first.get_or_insert_with(msg);
        }
    }

    fn finish(self) -> Measured {
        exact(self.bad, self.total, self.first)
    }
}

fn tuples(basis: &[Partition], len: usize) -> Vec<Vec<Partition>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                basis.iter().map(move |b| {
                    let mut next = t.clone();
                    next.push(b.clone());
                    next
                })
            })
            .collect();
    }
    out
}

fn err(e: qtqft_core::Error) -> String {
    e.to_string()
}

pub fn run_suite(tqft: &WeightedTqft, suite: Suite) -> SuiteReport {
    let c = tqft.ctx();
    let limits = &match suite {
        Suite::Fast => Limits { genus: 2, degree_span: c.n() as i64, arity: 1, verlinde_genus: 3, holla_genera: &[2] },
        Suite::All => {
            Limits { genus: 4, degree_span: 2 * c.n() as i64, arity: 2, verlinde_genus: 5, holla_genera: &[2, 3] }
        }
    };
    let mut checks: Vec<(&'static str, f64, Job<'_>)> = vec![
        ("partitions.count", 0.0, Box::new(move || check_count(c))),
        ("partitions.complement_involution", 0.0, Box::new(move || check_involution(c))),
        ("fusion.unit", 0.0, Box::new(move || check_unit(tqft))),
        ("fusion.commutativity", 0.0, Box::new(move || check_commutativity(tqft))),
        ("fusion.associativity", 0.0, Box::new(move || check_associativity(tqft))),
        ("fusion.grading", 0.0, Box::new(move || check_grading(tqft))),
        ("fusion.nonnegativity", 0.0, Box::new(move || check_nonnegativity(tqft))),
        ("fusion.special_identities", 0.0, Box::new(move || check_special(tqft))),
        ("fusion.two_point_pairing", 0.0, Box::new(move || check_two_point(tqft))),
        ("spectrum.root_count", SPECTRAL_TOL, Box::new(move || float(root_count_deviation(c.n())))),
        ("spectrum.orthogonality", SPECTRAL_TOL, Box::new(move || float(orthogonality_deviation(c)))),
        ("spectrum.sine_identity", SPECTRAL_TOL, Box::new(move || float(sine_identity_deviation(c)))),
        ("spectrum.point_class", SPECTRAL_TOL, Box::new(move || float(point_class_deviation(c)))),
        ("spectrum.eigenvectors", SPECTRAL_TOL, Box::new(move || float(eigenvector_deviation(tqft.ring())))),
        ("tqft.torus", 0.0, Box::new(move || check_torus(tqft))),
        ("tqft.handle_counit", 0.0, Box::new(move || check_handle(tqft))),
        ("tqft.monomial", 0.0, Box::new(move || check_monomial(tqft, limits))),
        ("tqft.periodicity", 0.0, Box::new(move || check_periodicity(tqft, limits))),
        ("tqft.gluing", 0.0, Box::new(move || check_gluing(tqft, suite))),
        ("tqft.eta_homogeneity", 0.0, Box::new(move || check_eta_homogeneity(tqft, suite))),
        ("tqft.verlinde", RECONCILE_TOL, Box::new(move || check_verlinde(tqft, limits))),
        ("tqft.holla", RECONCILE_TOL, Box::new(move || check_holla(tqft, limits))),
        ("tqft.reconciliation", RECONCILE_TOL, Box::new(move || check_reconciliation(tqft, limits))),
    ];
    if suite == Suite::All {
        let extra: [(&'static str, f64, Job<'_>); 5] = [
            ("fusion.frobenius", 0.0, Box::new(move || check_frobenius(tqft))),
            ("fusion.table_vs_direct", 0.0, Box::new(move || check_direct(tqft))),
            ("spectrum.reconstruction", SPECTRAL_TOL, Box::new(move || check_reconstruction(c))),
            ("tqft.degeneration", 0.0, Box::new(move || check_degeneration(tqft, limits))),
            ("tqft.eta_identities", 0.0, Box::new(move || check_eta_identities(tqft))),
        ];
        checks.extend(extra);
    }
    let checks: Vec<CheckResult> = checks
        .into_iter()
        .map(|(name, tolerance, job)| match job() {
            Ok((deviation, detail)) => {
                let passed = if tolerance == 0.0 { deviation == 0.0 } else { deviation < tolerance };
                CheckResult { name, passed, deviation, tolerance, detail }
            }
            Err(detail) => CheckResult { name, passed: false, deviation: f64::INFINITY, tolerance, detail },
        })
        .collect();
    let passed = checks.iter().filter(|c| c.passed).count();
    SuiteReport {
        r: c.r(),
        s: c.s(),
        suite: match suite {
            Suite::Fast => "fast",
            Suite::All => "all",
        },
        passed,
        failed: checks.len() - passed,
        checks,
    }
}

fn float(dev: f64) -> Measured {
    if dev.is_finite() {
        Ok((dev, format!("max deviation {dev:.3e}")))
    } else {
        Err(format!("non-finite deviation {dev}"))
    }
}

fn check_count(c: BoxContext) -> Measured {
    let count = c.partitions().len();
    let expected = binomial(c.n(), c.r());
    let mut t = Tally::new();
    t.record(count == expected, || format!("{count} partitions, expected {expected}"));
    t.finish()
}

fn check_involution(c: BoxContext) -> Measured {
    let mut t = Tally::new();
    for a in c.partitions() {
        let back = a.complement(c).and_then(|b| b.complement(c)).map_err(err)?;
        t.record(back == a, || format!("{a} -> {back}"));
    }
    t.finish()
}

fn basis_classes(c: BoxContext) -> Vec<QClass> {
    c.partitions().into_iter().map(|a| QClass::basis(c, a)).collect()
}

fn check_unit(tqft: &WeightedTqft) -> Measured {
    let c = tqft.ctx();
    let one = QClass::one(c);
    let mut t = Tally::new();
    for x in basis_classes(c) {
        let got = tqft.ring().quantum_product(&one, &x).map_err(err)?;
        t.record(got == x, || format!("1 * {x} = {got}"));
    }
    t.finish()
}

fn check_commutativity(tqft: &WeightedTqft) -> Measured {
    let basis = tqft.ctx().partitions();
    let mut t = Tally::new();
    for a in &basis {
        for b in &basis {
            let ab = tqft.ring().basis_product(a, b).map_err(err)?;
            let ba = tqft.ring().basis_product(b, a).map_err(err)?;
            t.record(ab == ba, || format!("{a}*{b}"));
        }
    }
    t.finish()
}

fn check_associativity(tqft: &WeightedTqft) -> Measured {
    let ring = tqft.ring();
    let basis = basis_classes(tqft.ctx());
    let pairs: Vec<Vec<QClass>> = basis
        .iter()
        .map(|x| basis.iter().map(|y| ring.quantum_product(x, y)).collect())
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let mut t = Tally::new();
    for (i, x) in basis.iter().enumerate() {
        for j in 0..basis.len() {
            for (k, z) in basis.iter().enumerate() {
                let left = ring.quantum_product(&pairs[i][j], z).map_err(err)?;
                let right = ring.quantum_product(x, &pairs[j][k]).map_err(err)?;
                t.record(left == right, || format!("basis triple ({i},{j},{k})"));
            }
        }
    }
    t.finish()
}

fn check_grading(tqft: &WeightedTqft) -> Measured {
    let n = tqft.ctx().n() as i64;
    let mut t = Tally::new();
    for rec in tqft.ring().structure_table().records() {
        let lhs = rec.c.size() as i64 + rec.q_exp * n;
        let rhs = (rec.a.size() + rec.b.size()) as i64;
        t.record(lhs == rhs, || format!("{}*{} -> q^{} {}", rec.a, rec.b, rec.q_exp, rec.c));
    }
    t.finish()
}

fn check_nonnegativity(tqft: &WeightedTqft) -> Measured {
    let mut t = Tally::new();
    for rec in tqft.ring().structure_table().records() {
        t.record(!rec.coeff.is_negative(), || format!("{}*{} -> {} has {}", rec.a, rec.b, rec.c, rec.coeff));
    }
    t.finish()
}

fn check_special(tqft: &WeightedTqft) -> Measured {
    let c = tqft.ctx();
    let ring = tqft.ring();
    let (col, row) = (column_class(c), row_class(c));
    let one = QClass::one(c);
    let n = c.n() as u32;
    let cases = [
        ("σ_{1^r}*σ_s = q", ring.quantum_product(&col, &row).map_err(err)?, one.shift(1)),
        ("σ_{1^r}^{r+s} = q^r", ring.power(&col, n).map_err(err)?, one.shift(c.r() as i64)),
        ("σ_s^{r+s} = q^s", ring.power(&row, n).map_err(err)?, one.shift(c.s() as i64)),
    ];
    let mut t = Tally::new();
    for (name, got, want) in cases {
        t.record(got == want, || format!("{name}: got {got}"));
    }
    t.finish()
}

fn check_two_point(tqft: &WeightedTqft) -> Measured {
    let c = tqft.ctx();
    let mut t = Tally::new();
    for a in c.partitions() {
        let dual = a.complement(c).map_err(err)?;
        for b in c.partitions() {
            let pair = tqft
                .ring()
                .poincare_pair(&QClass::basis(c, a.clone()), &QClass::basis(c, b.clone()))
                .map_err(err)?;
            let want = if b == dual { LaurentInt::one() } else { LaurentInt::zero() };
            t.record(pair == want, || format!("<{a},{b}> = {pair}"));
        }
    }
    t.finish()
}

fn check_frobenius(tqft: &WeightedTqft) -> Measured {
    let ring = tqft.ring();
    let basis = basis_classes(tqft.ctx());
    let mut t = Tally::new();
    for x in &basis {
        for y in &basis {
            let xy = ring.quantum_product(x, y).map_err(err)?;
            for z in &basis {
                let lhs = ring.poincare_pair(&xy, z).map_err(err)?;
                let rhs = ring.poincare_pair(x, &ring.quantum_product(y, z).map_err(err)?).map_err(err)?;
                t.record(lhs == rhs, || format!("<{x}*{y},{z}>"));
            }
        }
    }
    t.finish()
}

fn check_direct(tqft: &WeightedTqft) -> Measured {
    let c = tqft.ctx();
    let basis = c.partitions();
    let mut t = Tally::new();
    for a in &basis {
        for b in &basis {
            let direct = direct_basis_product(c, a, b).map_err(err)?;
            let table = tqft.ring().basis_product(a, b).map_err(err)?;
            t.record(direct == table, || format!("{a}*{b}"));
        }
    }
    t.finish()
}

fn check_reconstruction(c: BoxContext) -> Measured {
    let ring = qtqft_core::QuantumRing::new(c);
    let basis = c.partitions();
    let mut worst: f64 = 0.0;
    for a in &basis {
        for b in &basis {
            let exact = ring.basis_product(a, b).map_err(err)?.at_one();
            for (label, z) in basis.iter().zip(spectral_product(c, a, b)) {
                let e = exact.get(label).and_then(|v| v.to_f64()).unwrap_or(0.0);
                worst = worst.max((z - Complex64::new(e, 0.0)).norm());
            }
        }
    }
    float(worst)
}

fn check_torus(tqft: &WeightedTqft) -> Measured {
    let v = tqft.integrate(1, 0, &[]).map_err(err)?;
    let want = LaurentInt::constant(tqft.ctx().basis_count() as i64);
    let mut t = Tally::new();
    t.record(v == want, || format!("torus invariant {v}, expected {want}"));
    t.finish()
}

fn check_handle(tqft: &WeightedTqft) -> Measured {
    let got = tqft.handle_element().counit();
    let want = LaurentInt::constant(tqft.ctx().basis_count() as i64);
    let mut t = Tally::new();
    t.record(got == want, || format!("counit of handle {got}"));
    t.finish()
}

fn check_monomial(tqft: &WeightedTqft, limits: &Limits) -> Measured {
    let mut t = Tally::new();
    for g in 0..=limits.genus {
        for d in -limits.degree_span..=limits.degree_span {
            let v = tqft.integrate(g, d, &[]).map_err(err)?;
            let ok = match tqft.expected_exponent(g, d, 0) {
                Some(e) => v == LaurentInt::monomial(v.coeff(e), e),
                None => v.is_zero(),
            };
            t.record(ok, || format!("g={g} d={d}: {v}"));
        }
    }
    t.finish()
}

fn check_periodicity(tqft: &WeightedTqft, limits: &Limits) -> Measured {
    let c = tqft.ctx();
    let basis = c.partitions();
    let mut t = Tally::new();
    for g in 0..=limits.genus.min(2) {
        for d in -2..=2i64 {
            let f = tqft.closed_functional(g, d);
            let shifted = tqft.closed_functional(g, d + c.n() as i64);
            for len in 0..=limits.arity {
                for tuple in tuples(&basis, len) {
                    let a = f.eval(&tuple).map_err(err)?.shift(-(c.r() as i64));
                    let b = shifted.eval(&tuple).map_err(err)?;
                    t.record(a == b, || format!("g={g} d={d} {tuple:?}"));
                }
            }
        }
    }
    t.finish()
}

fn check_gluing(tqft: &WeightedTqft, suite: Suite) -> Measured {
    let (gmax, dmax) = match suite {
        Suite::Fast => (1, 1),
        Suite::All => (2, 2),
    };
    let mut maps: BTreeMap<(u32, i64, usize, usize), TqftTensor> = BTreeMap::new();
    let mut map = |g, d, m, n| -> Result<TqftTensor, String> {
        if let Some(t) = maps.get(&(g, d, m, n)) {
            return Ok(t.clone());
        }
        let t = tqft.weighted_map(g, d, m, n).map_err(err)?;
        maps.insert((g, d, m, n), t.clone());
        Ok(t)
    };
    let mut t = Tally::new();
    for g1 in 0..=gmax {
        for g2 in 0..=gmax {
            for d1 in -dmax..=dmax {
                for d2 in -dmax..=dmax {
                    for m in 0..=1 {
                        for n in 0..=1 {
                            let composed = compose(&map(g2, d2, 1, n)?, &map(g1, d1, m, 1)?).map_err(err)?;
                            let direct = map(g1 + g2, d1 + d2, m, n)?;
                            t.record(composed == direct, || format!("g=({g1},{g2}) d=({d1},{d2}) m={m} n={n}"));
                        }
                    }
                }
            }
        }
    }
    t.finish()
}

fn check_degeneration(tqft: &WeightedTqft, limits: &Limits) -> Measured {
    let c = tqft.ctx();
    let basis = c.partitions();
    let params: Vec<(u32, i64)> = (0..=1).flat_map(|g| (-1..=1).map(move |d| (g, d))).collect();
    // Integrals are symmetric in their insertions, so memoize on the sorted list.
    let functionals: BTreeMap<(u32, i64), ClosedFunctional<'_>> = (0..=2)
        .flat_map(|g| (-2..=2).map(move |d| (g, d)))
        .map(|(g, d)| ((g, d), tqft.closed_functional(g, d)))
        .collect();
    let mut memo: BTreeMap<(u32, i64, Vec<Partition>), LaurentInt> = BTreeMap::new();
    let mut eval = |g: u32, d: i64, insertions: Vec<Partition>| -> Result<LaurentInt, String> {
        let mut key = insertions;
        key.sort();
        let key = (g, d, key);
        if let Some(v) = memo.get(&key) {
            return Ok(v.clone());
        }
        let v = functionals[&(g, d)].eval(&key.2).map_err(err)?;
        memo.insert(key, v.clone());
        Ok(v)
    };
    let mut t = Tally::new();
    for &(g1, d1) in &params {
        for &(g2, d2) in &params {
            for len in 0..=limits.arity {
                for tuple in tuples(&basis, len) {
                    for split in 0..=len {
                        let (a1, a2) = tuple.split_at(split);
                        let mut rhs = LaurentInt::zero();
                        for b in &basis {
                            let mut left = a1.to_vec();
                            left.push(b.clone());
                            let mut right = a2.to_vec();
                            right.push(b.complement(c).map_err(err)?);
                            rhs.add_product(&eval(g1, d1, left)?, &eval(g2, d2, right)?);
                        }
                        let lhs = eval(g1 + g2, d1 + d2, tuple.clone())?;
                        t.record(lhs == rhs, || format!("g=({g1},{g2}) d=({d1},{d2}) {a1:?}|{a2:?}"));
                    }
                }
            }
        }
    }
    t.finish()
}

fn check_eta_homogeneity(tqft: &WeightedTqft, suite: Suite) -> Measured {
    let nmax = match suite {
        Suite::Fast => 1,
        Suite::All => 2,
    };
    let mut t = Tally::new();
    for g in 0..=2 {
        for d in -2..=2 {
            for n in 0..=nmax {
                let eta = tqft.eta_class(g, d, n).map_err(err)?;
                t.record(tqft.eta_is_homogeneous(&eta), || format!("η({g},{d},{n})"));
            }
        }
    }
    t.finish()
}

fn check_eta_identities(tqft: &WeightedTqft) -> Measured {
    let c = tqft.ctx();
    let handle = tqft.handle_element().clone();
    let lower = column_class(c);
    let raise = tqft.degree_element(1);
    let mut t = Tally::new();
    for g in 0..=1u32 {
        for d in -1..=1i64 {
            for n in 1..=2usize {
                let eta = tqft.eta_class(g, d, n).map_err(err)?;
                for k in 1..=n {
                    let cases = [
                        ("genus-addition", &handle, tqft.eta_class(g + 1, d, n).map_err(err)?),
                        ("degree-lowering", &lower, tqft.eta_class(g, d - 1, n).map_err(err)?),
                        ("degree-raising", &raise, tqft.eta_class(g, d + 1, n).map_err(err)?),
                    ];
                    for (name, z, expected) in cases {
                        let got = tqft.slot_multiply(&eta, k, z).map_err(err)?;
                        t.record(got.entries() == expected.entries(), || format!("{name} η({g},{d},{n}) slot {k}"));
                    }
                    let pushed = tqft.slot_pushforward(&eta, k).map_err(err)?;
                    let want = tqft.eta_class(g, d, n - 1).map_err(err)?;
                    t.record(pushed == want, || format!("forgetful η({g},{d},{n}) slot {k}"));
                }
            }
        }
    }
    t.finish()
}

fn relative(exact: f64, approx: f64) -> f64 {
    (exact - approx).abs() / exact.abs().max(1.0)
}

fn check_verlinde(tqft: &WeightedTqft, limits: &Limits) -> Measured {
    let c = tqft.ctx();
    let mut worst: f64 = 0.0;
    for g in 1..=limits.verlinde_genus {
        let exact = tqft.verlinde_exact(g).map_err(err)?;
        let sine = verlinde_sine(c, g);
        worst = worst.max(relative(exact.to_f64().unwrap_or(f64::INFINITY), sine));
    }
    Ok((worst, format!("g=1..{}, max relative deviation {worst:.3e}", limits.verlinde_genus)))
}

fn check_holla(tqft: &WeightedTqft, limits: &Limits) -> Measured {
    let c = tqft.ctx();
    let (a, _, _) = reduced_box(c);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for gamma in 0..a {
        for &g in limits.holla_genera {
            let exact = tqft.holla_exact(g, gamma).map_err(err)?;
            let spectral = holla_spectral(c, g, gamma).map_err(err)?;
            worst = worst.max(relative(exact.to_f64().unwrap_or(f64::INFINITY), spectral));
            count += 1;
        }
    }
    Ok((worst, format!("{count} counts, max relative deviation {worst:.3e}")))
}

fn check_reconciliation(tqft: &WeightedTqft, limits: &Limits) -> Measured {
    let c = tqft.ctx();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for g in 1..=limits.genus {
        for d in -limits.degree_span..=limits.degree_span {
            let exact = tqft.integrate(g, d, &[]).map_err(err)?.at_one().to_f64().unwrap_or(f64::INFINITY);
            let z = closed_invariant_spectral(c, g, d);
            worst = worst.max((z.re - exact).abs().max(z.im.abs()) / exact.abs().max(1.0));
            count += 1;
        }
    }
    Ok((worst, format!("{count} closed invariants, max relative deviation {worst:.3e}")))
}
