//! Seeded verification suites for the structural laws of the convolution.
//!
//! Each suite draws its instances from a counter-based stream, so a fixed
//! seed reproduces the identical run. Exact mode requires every identity to
//! hold with equality (`max_dev = 0`); float mode substitutes a tolerance.
//! The suites are what `verify` runs from the CLI and what the acceptance
//! gate drives at its pinned instance counts.

use serde::Serialize;

use crate::convolution::{
    convolve, convolve_group, fubini_triple, fubini_triple_sampled, mass_via_group_integral,
    mass_via_section_integral, FubiniBudgets,
};
use crate::ellis::measure_action_matrix;
use crate::group::GroupIndex;
use crate::measure::{pushforward, FiniteMeasure};
use crate::product::{Axis, ProductMeasure};
use crate::rng::SampleKey;
use crate::sampled::SampledMeasure;
use crate::sets::IndexSet;
use crate::system::{FiniteSystem, PairSet, PointIndex, System};
use crate::testfn::TestFunction;
use crate::weak::{member, pull_back_neighborhood, Membership, WeakNeighborhood};
use crate::weight::Weight;


fn worst_of<W: Weight>(a: W, b: W) -> W {
    if b > a {
        b
    } else {
        a
    }
}

/// Outcome of one suite run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: u64,
    pub violations: u64,
    pub passed: bool,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn exact(name: &str, cases: u64, violations: u64, first_failure: Option<String>) -> Self {
        Self { name: name.to_string(), cases, violations, passed: violations == 0, first_failure }
    }
}

// Sequential draws from one stream; each generator call advances the cursor.
struct Draws {
    key: SampleKey,
    cursor: u64,
}

impl Draws {
    fn new(seed: u64, stream: u64) -> Self {
        Self { key: SampleKey::new(seed, stream), cursor: 0 }
    }

    fn next_u64(&mut self) -> u64 {
        let v = self.key.value_at(self.cursor);
        self.cursor += 1;
        v
    }

    /// Random measure with denominator-bounded weights over `0..universe`.
    fn measure<P: crate::system::Point, W: Weight>(
        &mut self,
        universe: usize,
        point: impl Fn(usize) -> P,
    ) -> FiniteMeasure<P, W> {
        let mut raw: Vec<u64> = (0..universe).map(|_| self.next_u64() % 17).collect();
        if raw.iter().all(|&v| v == 0) {
            raw[0] = 1;
        }
        let den: u64 = raw.iter().sum();
        FiniteMeasure::new(
            raw.iter()
                .enumerate()
                .map(|(i, &num)| (point(i), W::from_ratio(num as i64, den)))
                .collect(),
        )
        .expect("weights sum to one by construction")
    }

    fn group_measure<W: Weight>(&mut self, sys: &FiniteSystem) -> FiniteMeasure<GroupIndex, W> {
        self.measure(sys.group().order(), GroupIndex)
    }

    fn space_measure<W: Weight>(&mut self, sys: &FiniteSystem) -> FiniteMeasure<PointIndex, W> {
        self.measure(sys.space_size(), PointIndex)
    }

    fn subset(&mut self, universe: usize) -> IndexSet {
        IndexSet::from_mask(universe, self.next_u64())
    }

    fn pair_set(&mut self, sys: &FiniteSystem) -> PairSet<GroupIndex, PointIndex> {
        let mask = self.next_u64();
        let mut bit = 0;
        let mut pairs = Vec::new();
        for g in sys.group().elements() {
            for x in sys.points() {
                if mask >> (bit % 64) & 1 == 1 {
                    pairs.push((g, x));
                }
                bit += 1;
            }
        }
        PairSet::new(pairs)
    }

    /// Random test function with values in `[-1, 1]` on eighths.
    fn test_function<W: Weight>(&mut self, space: usize) -> TestFunction<PointIndex, W> {
        let values: Vec<W> = (0..space)
            .map(|_| W::from_ratio((self.next_u64() % 17) as i64 - 8, 8))
            .collect();
        TestFunction::new("random", W::one(), move |x: &PointIndex| values[x.0].clone())
    }

    fn scalar_in_unit_band<W: Weight>(&mut self) -> W {
        W::from_ratio((self.next_u64() % 33) as i64 - 16, 16)
    }
}

/// `(μ₁∗μ₂)∗ν = μ₁∗(μ₂∗ν)` on random triples.
pub fn associativity_suite<W: Weight>(
    sys: &FiniteSystem,
    cases: u64,
    seed: u64,
    max_dev: &W,
) -> SuiteResult {
    let mut draws = Draws::new(seed, 1);
    let mut violations = 0;
    let mut first_failure = None;
    for case in 0..cases {
        let mu1 = draws.group_measure::<W>(sys);
        let mu2 = draws.group_measure::<W>(sys);
        let nu = draws.space_measure::<W>(sys);
        let left = convolve(sys, &convolve_group(sys.group(), &mu1, &mu2), &nu);
        let right = convolve(sys, &mu1, &convolve(sys, &mu2, &nu));
        let dev = left.tv_distance(&right);
        if dev > *max_dev {
            violations += 1;
            first_failure.get_or_insert_with(|| format!("case {case}: tv distance {dev}"));
        }
    }
    SuiteResult::exact("associativity", cases, violations, first_failure)
}

/// `δ₁∗ν = ν`, `δ_g∗ν = g∗ν` for every `g`, and `δ_g∗δ_x = δ_{g·x}`
/// exhaustively; `ν` redrawn per case.
pub fn identity_dirac_suite<W: Weight>(
    sys: &FiniteSystem,
    cases: u64,
    seed: u64,
    max_dev: &W,
) -> SuiteResult {
    let mut draws = Draws::new(seed, 2);
    let mut checks = 0;
    let mut violations = 0;
    let mut first_failure: Option<String> = None;
    let mut record = |ok: bool, what: &dyn Fn() -> String| {
        if !ok {
            violations += 1;
            first_failure.get_or_insert_with(what);
        }
    };
    for _ in 0..cases {
        let nu = draws.space_measure::<W>(sys);
        let e: FiniteMeasure<GroupIndex, W> = FiniteMeasure::dirac(sys.identity());
        checks += 1;
        let dev = convolve(sys, &e, &nu).tv_distance(&nu);
        record(dev <= *max_dev, &|| format!("δ₁∗ν deviates by {dev}"));
        for g in sys.group().elements() {
            let dg: FiniteMeasure<GroupIndex, W> = FiniteMeasure::dirac(g);
            checks += 1;
            let dev = convolve(sys, &dg, &nu).tv_distance(&pushforward(sys, &g, &nu));
            record(dev <= *max_dev, &|| format!("δ_{g}∗ν vs push-forward: {dev}"));
        }
    }
    for g in sys.group().elements() {
        for x in sys.points() {
            let dg: FiniteMeasure<GroupIndex, W> = FiniteMeasure::dirac(g);
            let dx: FiniteMeasure<PointIndex, W> = FiniteMeasure::dirac(x);
            checks += 1;
            let dev = convolve(sys, &dg, &dx)
                .tv_distance(&FiniteMeasure::dirac(sys.act(&g, &x)));
            record(dev <= *max_dev, &|| format!("δ_{g}∗δ_{x} off target: {dev}"));
        }
    }
    SuiteResult::exact("identity-dirac", checks, violations, first_failure)
}

/// Direct convolution mass, the group-integral formula, and the
/// section-integral formula agree on every tested set. Subsets are exhaustive
/// for spaces of at most 4 points, sampled otherwise.
pub fn three_formula_suite<W: Weight>(
    sys: &FiniteSystem,
    cases: u64,
    seed: u64,
    max_dev: &W,
) -> SuiteResult {
    let mut draws = Draws::new(seed, 3);
    let exhaustive = sys.space_size() <= 4;
    let mut checks = 0;
    let mut violations = 0;
    let mut first_failure: Option<String> = None;
    for case in 0..cases {
        let mu = draws.group_measure::<W>(sys);
        let nu = draws.space_measure::<W>(sys);
        let conv = convolve(sys, &mu, &nu);
        let sets = if exhaustive {
            sys.all_space_subsets()
        } else {
            (0..16).map(|_| draws.subset(sys.space_size())).collect()
        };
        for e_set in sets {
            let direct = conv.mass_in(&e_set);
            let via_group = mass_via_group_integral(sys, &mu, &nu, &e_set);
            let via_section = mass_via_section_integral(sys, &mu, &nu, &e_set);
            checks += 1;
            let worst = worst_of(
                (direct.clone() - via_group.clone()).abs(),
                (direct.clone() - via_section.clone()).abs(),
            );
            if worst > *max_dev {
                violations += 1;
                first_failure.get_or_insert_with(|| {
                    format!(
                        "case {case}, E={e_set:?}: direct {direct}, group {via_group}, section {via_section}"
                    )
                });
            }
        }
    }
    SuiteResult::exact("three-formula", checks, violations, first_failure)
}

/// Iterated slice integrals over both axes equal the direct grid mass.
pub fn slice_suite<W: Weight>(
    sys: &FiniteSystem,
    cases: u64,
    seed: u64,
    max_dev: &W,
) -> SuiteResult {
    let mut draws = Draws::new(seed, 4);
    let mut violations = 0;
    let mut first_failure = None;
    for case in 0..cases {
        let mu = draws.group_measure::<W>(sys);
        let nu = draws.space_measure::<W>(sys);
        let w_set = draws.pair_set(sys);
        let lambda = ProductMeasure::new(mu, nu);
        let direct = lambda.mass_of(sys, &w_set);
        let left = lambda.slice_integral(sys, &w_set, Axis::Left);
        let right = lambda.slice_integral(sys, &w_set, Axis::Right);
        let worst = worst_of((direct.clone() - left).abs(), (direct - right).abs());
        if worst > *max_dev {
            violations += 1;
            first_failure.get_or_insert_with(|| format!("case {case}: slices deviate by {worst}"));
        }
    }
    SuiteResult::exact("slice-formula", cases, violations, first_failure)
}

/// The three Fubini routes return one value on random `(μ, ν, f)`.
pub fn fubini_suite<W: Weight>(
    sys: &FiniteSystem,
    cases: u64,
    seed: u64,
    max_dev: &W,
) -> SuiteResult {
    let mut draws = Draws::new(seed, 5);
    let mut violations = 0;
    let mut first_failure = None;
    for case in 0..cases {
        let mu = draws.group_measure::<W>(sys);
        let nu = draws.space_measure::<W>(sys);
        let f = draws.test_function::<W>(sys.space_size());
        let (direct, mu_first, nu_first) = fubini_triple(sys, &f, &mu, &nu);
        let worst = worst_of((direct.clone() - mu_first).abs(), (direct - nu_first).abs());
        if worst > *max_dev {
            violations += 1;
            first_failure
                .get_or_insert_with(|| format!("case {case}: fubini routes deviate by {worst}"));
        }
    }
    SuiteResult::exact("fubini", cases, violations, first_failure)
}

/// Soundness of the continuity witness: `∫f d(μ∗ν′) = ∫H dν′` exactly, and
/// membership pulled back through `H` transports to membership after
/// convolution.
pub fn pull_back_suite<W: Weight>(
    sys: &FiniteSystem,
    cases: u64,
    seed: u64,
    max_dev: &W,
) -> SuiteResult {
    let mut draws = Draws::new(seed, 6);
    let mut checks = 0;
    let mut violations = 0;
    let mut first_failure: Option<String> = None;
    for case in 0..cases {
        let mu = draws.group_measure::<W>(sys);
        let nu_prime = draws.space_measure::<W>(sys);
        let f = draws.test_function::<W>(sys.space_size());
        let (a, b) = (draws.scalar_in_unit_band::<W>(), draws.scalar_in_unit_band::<W>());
        let (lower, upper) = if a < b {
            (a, b)
        } else if b < a {
            (b, a)
        } else {
            (a.clone(), a + W::from_ratio(1, 8))
        };
        let neighborhood =
            WeakNeighborhood::new([(f, lower, upper)]).expect("lower < upper by construction");
        let pulled = pull_back_neighborhood(sys, &mu, &neighborhood);

        let convolved = convolve(sys, &mu, &nu_prime);
        let lhs = convolved.integrate(&neighborhood.constraints()[0].test_fn);
        let rhs = nu_prime.integrate(&pulled.constraints()[0].test_fn);
        checks += 1;
        let gap = (lhs - rhs).abs();
        if gap > *max_dev {
            violations += 1;
            first_failure
                .get_or_insert_with(|| format!("case {case}: integral chain deviates by {gap}"));
        }
        checks += 1;
        if member(&nu_prime, &pulled) == Membership::Inside
            && member(&convolved, &neighborhood) != Membership::Inside
        {
            violations += 1;
            first_failure
                .get_or_insert_with(|| format!("case {case}: inside(N') without inside(N)"));
        }
    }
    SuiteResult::exact("pull-back-soundness", checks, violations, first_failure)
}

/// `P_{μ₁∗μ₂} = P_{μ₁}·P_{μ₂}` on random pairs, with the products staying
/// column-stochastic and the matrix action matching the convolution.
pub fn homomorphism_suite<W: Weight>(
    sys: &FiniteSystem,
    cases: u64,
    seed: u64,
    max_dev: &W,
) -> SuiteResult {
    let mut draws = Draws::new(seed, 7);
    let mut checks = 0;
    let mut violations = 0;
    let mut first_failure: Option<String> = None;
    for case in 0..cases {
        let mu1 = draws.group_measure::<W>(sys);
        let mu2 = draws.group_measure::<W>(sys);
        let nu = draws.space_measure::<W>(sys);
        checks += 3;
        let composed = measure_action_matrix(sys, &convolve_group(sys.group(), &mu1, &mu2));
        let product =
            measure_action_matrix(sys, &mu1).matmul(&measure_action_matrix(sys, &mu2));
        let gap = composed.max_abs_diff(&product);
        if gap > *max_dev {
            violations += 1;
            first_failure
                .get_or_insert_with(|| format!("case {case}: homomorphism deviates by {gap}"));
        }
        let defect = product.stochasticity_defect();
        if defect > *max_dev {
            violations += 1;
            first_failure
                .get_or_insert_with(|| format!("case {case}: stochasticity defect {defect}"));
        }
        let action_gap = measure_action_matrix(sys, &mu1)
            .apply(&nu)
            .tv_distance(&convolve(sys, &mu1, &nu));
        if action_gap > *max_dev {
            violations += 1;
            first_failure.get_or_insert_with(|| {
                format!("case {case}: matrix action deviates from convolution by {action_gap}")
            });
        }
    }
    SuiteResult::exact("matrix-homomorphism", checks, violations, first_failure)
}

/// The verify bundle for a finite system in one arithmetic mode.
pub fn finite_verify_suites<W: Weight>(
    sys: &FiniteSystem,
    cases: u64,
    seed: u64,
    max_dev: &W,
) -> Vec<SuiteResult> {
    vec![
        associativity_suite(sys, cases, seed, max_dev),
        identity_dirac_suite(sys, cases.min(200), seed, max_dev),
        three_formula_suite(sys, cases.min(200), seed, max_dev),
        slice_suite(sys, cases, seed, max_dev),
        fubini_suite(sys, cases, seed, max_dev),
        pull_back_suite(sys, cases, seed, max_dev),
        homomorphism_suite::<W>(sys, cases, seed, max_dev),
    ]
}

/// Monte Carlo Fubini agreement on the circle: the share of seeded runs in
/// which all three routes agree pairwise within combined half-widths must
/// reach `required_rate`.
pub fn circle_fubini_suite(
    runs: u64,
    seed: u64,
    budgets: FubiniBudgets,
    delta: f64,
    required_rate: f64,
) -> SuiteResult {
    let uniform = SampledMeasure::uniform();
    let functions = ["cos:1", "sin:1", "cos2:1"];
    let mut agreeing = 0;
    let mut first_failure = None;
    for run in 0..runs {
        let mut run_ok = true;
        for (lane, label) in functions.iter().enumerate() {
            let f = crate::testfn::circle_catalog(label).expect("catalog label");
            let key = SampleKey::new(seed, 100 + run).substream(lane as u64);
            let (a, b, c) = fubini_triple_sampled(&f, &uniform, &uniform, key, budgets, delta)
                .expect("positive budgets");
            if !(a.agrees_with(&b) && a.agrees_with(&c) && b.agrees_with(&c)) {
                run_ok = false;
                first_failure.get_or_insert_with(|| {
                    format!("run {run}, {label}: {a:?} / {b:?} / {c:?} disagree")
                });
            }
        }
        if run_ok {
            agreeing += 1;
        }
    }
    let rate = agreeing as f64 / runs as f64;
    SuiteResult {
        name: "circle-fubini-mc".to_string(),
        cases: runs,
        violations: runs - agreeing,
        passed: rate >= required_rate,
        first_failure,
    }
}

/// Exact rotation invariance of the uniform measure through arc evaluators.
pub fn circle_invariance_suite(cases: u64, seed: u64, tolerance: f64) -> SuiteResult {
    let uniform = SampledMeasure::uniform();
    let key = SampleKey::new(seed, 11);
    let mut violations = 0;
    let mut first_failure = None;
    for case in 0..cases {
        let g = crate::circle::Angle::new(key.unit_at(3 * case));
        let a = key.unit_at(3 * case + 1);
        let len = key.unit_at(3 * case + 2) * 0.9;
        let set = crate::circle::ArcUnion::new([(a, (a + len).rem_euclid(1.0))])
            .expect("valid arc");
        let rotated = uniform.rotate(g);
        let before = uniform.exact_mass(&set).expect("uniform has evaluator");
        let after = rotated.exact_mass(&set).expect("rotation keeps evaluator");
        if (before - after).abs() > tolerance {
            violations += 1;
            first_failure.get_or_insert_with(|| {
                format!("case {case}: |{before} - {after}| > {tolerance}")
            });
        }
    }
    SuiteResult::exact("circle-rotation-invariance", cases, violations, first_failure)
}

/// Success rate of the approximation scenario over many seeds (the law behind
/// the sample-size bound: failures at most `delta` of the time).
pub fn wlln_success_suite(
    request: &crate::approx::ApproximationRequest<crate::system::CircleRotation, f64>,
    seeds: u64,
    base_seed: u64,
    required_rate: f64,
) -> SuiteResult {
    let uniform = SampledMeasure::uniform();
    let mut inside = 0;
    let mut first_failure = None;
    for run in 0..seeds {
        // single attempt per seed: retries would mask the failure rate
        let mut single = request.clone();
        single.max_attempts = 1;
        match crate::approx::approximate_action(
            &crate::system::CircleRotation,
            &uniform,
            &single,
            base_seed + run,
        ) {
            Ok(outcome) if outcome.inside => inside += 1,
            Ok(_) => {
                first_failure.get_or_insert_with(|| format!("seed {} missed", base_seed + run));
            }
            Err(err) => {
                first_failure.get_or_insert_with(|| format!("seed {}: {err}", base_seed + run));
            }
        }
    }
    let rate = inside as f64 / seeds as f64;
    SuiteResult {
        name: "wlln-approximation".to_string(),
        cases: seeds,
        violations: seeds - inside,
        passed: rate >= required_rate,
        first_failure,
    }
}
