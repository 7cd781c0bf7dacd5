//! The convolution `μ∗ν`: the push-forward of `μ×ν` through the action map,
//! its two integral formulas, and the Fubini identities.
//!
//! Finite mode is the exactness backbone: `μ∗ν = Σ_{g,x} μ(g)ν(x) δ_{g·x}`
//! with total mass exactly 1, and
//!
//! * `(μ∗ν)(E) = Σ_g μ(g)·ν(g⁻¹E)`   (group-integral formula)
//! * `(μ∗ν)(E) = Σ_x ν(x)·μ(E:x)`    (section-integral formula)
//! * `∫f d(μ∗ν) = ∫∫f(g·x)dμ dν = ∫∫f(g·x)dν dμ`   (Fubini)
//!
//! agree with the direct mass as identical scalars (identical rationals in
//! exact mode). Sampled mode pushes paired independent draws through the
//! action and reports Hoeffding half-widths.


use crate::circle::Angle;
use crate::group::{FiniteGroup, GroupIndex};
use crate::measure::FiniteMeasure;
use crate::rng::SampleKey;
use crate::sampled::{hoeffding_half_width, McError, McEstimate, SampledMeasure};
use crate::system::{FiniteSelfAction, System};
use crate::testfn::TestFunction;
use crate::weight::Weight;

/// `μ∗ν` for finitely supported measures: relabel the product grid through
/// the action and merge collisions in canonical point order.
pub fn convolve<S: System, W: Weight>(
    sys: &S,
    mu: &FiniteMeasure<S::GroupElem, W>,
    nu: &FiniteMeasure<S::SpacePoint, W>,
) -> FiniteMeasure<S::SpacePoint, W> {
    let mut terms = Vec::with_capacity(mu.support_size() * nu.support_size());
    for (g, wg) in mu.entries() {
        for (x, wx) in nu.entries() {
            terms.push((sys.act(g, x), wg.clone() * wx.clone()));
        }
    }
    FiniteMeasure::from_unchecked(terms)
}

/// Convolution of two measures on a finite group, through the action of the
/// group on itself by left translation.
pub fn convolve_group<W: Weight>(
    group: &FiniteGroup,
    first: &FiniteMeasure<GroupIndex, W>,
    second: &FiniteMeasure<GroupIndex, W>,
) -> FiniteMeasure<GroupIndex, W> {
    convolve(&FiniteSelfAction::new(group), first, second)
}

/// `(μ∗ν)(E)` by the group-integral formula `Σ_g μ(g)·ν(g⁻¹E)`.
pub fn mass_via_group_integral<S: System, W: Weight>(
    sys: &S,
    mu: &FiniteMeasure<S::GroupElem, W>,
    nu: &FiniteMeasure<S::SpacePoint, W>,
    set: &S::SpaceSet,
) -> W {
    mu.entries().iter().fold(W::zero(), |acc, (g, wg)| {
        acc + wg.clone() * nu.mass_in(&sys.preimage(g, set))
    })
}

/// `(μ∗ν)(E)` by the section-integral formula `Σ_x ν(x)·μ(E:x)`.
pub fn mass_via_section_integral<S: System, W: Weight>(
    sys: &S,
    mu: &FiniteMeasure<S::GroupElem, W>,
    nu: &FiniteMeasure<S::SpacePoint, W>,
    set: &S::SpaceSet,
) -> W {
    nu.entries().iter().fold(W::zero(), |acc, (x, wx)| {
        acc + wx.clone() * mu.mass_in(&sys.section(set, x))
    })
}

/// The three routes to `∫f d(μ∗ν)`: direct, inner integral over `μ` first,
/// inner integral over `ν` first. Exact mode returns identical scalars.
pub fn fubini_triple<S: System, W: Weight>(
    sys: &S,
    f: &TestFunction<S::SpacePoint, W>,
    mu: &FiniteMeasure<S::GroupElem, W>,
    nu: &FiniteMeasure<S::SpacePoint, W>,
) -> (W, W, W) {
    let direct = convolve(sys, mu, nu).integrate(f);
    let mu_then_nu = nu.entries().iter().fold(W::zero(), |acc, (x, wx)| {
        let inner = mu.entries().iter().fold(W::zero(), |acc, (g, wg)| {
            acc + wg.clone() * f.evaluate(&sys.act(g, x))
        });
        acc + wx.clone() * inner
    });
    let nu_then_mu = mu.entries().iter().fold(W::zero(), |acc, (g, wg)| {
        let inner = nu.entries().iter().fold(W::zero(), |acc, (x, wx)| {
            acc + wx.clone() * f.evaluate(&sys.act(g, x))
        });
        acc + wg.clone() * inner
    });
    (direct, mu_then_nu, nu_then_mu)
}

// ---------------------------------------------------------------------------
// Sampled mode (circle rotation)
// ---------------------------------------------------------------------------

/// `μ∗ν` of two sampled measures: the sampler pairs independent draws and
/// pushes them through the action, `(seed, i) ↦ g_i + x_i`.
pub fn convolve_sampled(mu: &SampledMeasure, nu: &SampledMeasure) -> SampledMeasure {
    let (mu_inner, nu_inner) = (mu.clone(), nu.clone());
    SampledMeasure::new(format!("{}∗{}", mu.label(), nu.label()), move |key, index| {
        let g = mu_inner.sample(key.substream(0), index);
        let x = nu_inner.sample(key.substream(1), index);
        x.rotate(g)
    })
}

/// Finite `μ` convolved with a sampled `ν`. When `ν` carries an exact
/// evaluator the result does too, through the group-integral formula
/// `(μ∗ν)(E) = Σ_g μ(g)·ν(E − g)`.
pub fn convolve_finite_sampled<W: Weight>(
    mu: &FiniteMeasure<Angle, W>,
    nu: &SampledMeasure,
) -> SampledMeasure {
    let atoms: Vec<(Angle, f64)> =
        mu.entries().iter().map(|(g, w)| (*g, w.to_f64())).collect();
    let mu_for_sampler = mu.clone();
    let nu_inner = nu.clone();
    let label = format!("finite∗{}", nu.label());
    let sampler = move |key: SampleKey, index: u64| {
        let g = *mu_for_sampler.sample_at(key.substream(0), index);
        let x = nu_inner.sample(key.substream(1), index);
        x.rotate(g)
    };
    let out = SampledMeasure::new(label, sampler);
    if nu.has_exact_evaluator() {
        let nu_eval = nu.clone();
        out.with_exact_evaluator(move |set| {
            atoms.iter().fold(0.0, |acc, (g, w)| {
                acc + w * nu_eval.exact_mass(&set.rotate(g.negate())).expect("evaluator present")
            })
        })
    } else {
        out
    }
}

/// Sampled `μ` convolved with a finite `ν`. When `μ` carries an exact
/// evaluator the result does too, through the section-integral formula
/// `(μ∗ν)(E) = Σ_x ν(x)·μ(E − x)`.
pub fn convolve_sampled_finite<W: Weight>(
    mu: &SampledMeasure,
    nu: &FiniteMeasure<Angle, W>,
) -> SampledMeasure {
    let atoms: Vec<(Angle, f64)> =
        nu.entries().iter().map(|(x, w)| (*x, w.to_f64())).collect();
    let nu_for_sampler = nu.clone();
    let mu_inner = mu.clone();
    let label = format!("{}∗finite", mu.label());
    let sampler = move |key: SampleKey, index: u64| {
        let g = mu_inner.sample(key.substream(0), index);
        let x = *nu_for_sampler.sample_at(key.substream(1), index);
        x.rotate(g)
    };
    let out = SampledMeasure::new(label, sampler);
    if mu.has_exact_evaluator() {
        let mu_eval = mu.clone();
        out.with_exact_evaluator(move |set| {
            atoms.iter().fold(0.0, |acc, (x, w)| {
                acc + w * mu_eval.exact_mass(&set.rotate(x.negate())).expect("evaluator present")
            })
        })
    } else {
        out
    }
}

/// `(μ∗ν)(E) = ∫ν(g⁻¹E)dμ(g)` with sampled `μ`: the empirical mean over
/// draws of the exact slice mass `ν(E − g)`. `ν` must carry an evaluator.
pub fn group_integral_sampled(
    mu: &SampledMeasure,
    nu: &SampledMeasure,
    set: &crate::circle::ArcUnion,
    key: SampleKey,
    budget: u64,
    delta: f64,
) -> Result<McEstimate, McError> {
    if budget == 0 {
        return Err(McError::ZeroBudget);
    }
    if !nu.has_exact_evaluator() {
        return Err(McError::NoEvaluator(nu.label().to_string()));
    }
    let mut sum = 0.0;
    for index in 0..budget {
        let g = mu.sample(key, index);
        sum += nu.exact_mass(&set.rotate(g.negate())).expect("evaluator checked");
    }
    Ok(McEstimate {
        value: sum / budget as f64,
        half_width: hoeffding_half_width(1.0, delta, budget),
        samples: budget,
    })
}

/// Per-route sample budgets for the Monte Carlo Fubini comparison.
#[derive(Clone, Copy, Debug)]
pub struct FubiniBudgets {
    /// Draw pairs for the direct estimate.
    pub direct: u64,
    /// Outer draws of each iterated estimate.
    pub outer: u64,
    /// Frozen inner-sample size of each iterated estimate.
    pub inner: u64,
}

impl Default for FubiniBudgets {
    fn default() -> Self {
        Self { direct: 4096, outer: 512, inner: 512 }
    }
}

/// The three Monte Carlo routes to `∫f d(μ∗ν)` on the circle.
///
/// The iterated estimates freeze one inner sample and share it across all
/// outer draws; their reported half-width is the sum of the inner and outer
/// Hoeffding widths, since the frozen inner error does not average out.
pub fn fubini_triple_sampled(
    f: &TestFunction<Angle, f64>,
    mu: &SampledMeasure,
    nu: &SampledMeasure,
    key: SampleKey,
    budgets: FubiniBudgets,
    delta: f64,
) -> Result<(McEstimate, McEstimate, McEstimate), McError> {
    if budgets.direct == 0 || budgets.outer == 0 || budgets.inner == 0 {
        return Err(McError::ZeroBudget);
    }
    let bound = *f.bound();

    // direct: mean of f(g_i + x_i) over paired draws
    let mut sum = 0.0;
    for index in 0..budgets.direct {
        let g = mu.sample(key.substream(0), index);
        let x = nu.sample(key.substream(1), index);
        sum += f.evaluate(&x.rotate(g));
    }
    let direct = McEstimate {
        value: sum / budgets.direct as f64,
        half_width: hoeffding_half_width(bound, delta, budgets.direct),
        samples: budgets.direct,
    };

    let nested_width = hoeffding_half_width(bound, delta, budgets.inner)
        + hoeffding_half_width(bound, delta, budgets.outer);

    // inner μ, outer ν: mean_x mean_g f(g + x)
    let frozen_g = mu.sample_block(key.substream(2), 0, budgets.inner);
    let mut outer_sum = 0.0;
    for index in 0..budgets.outer {
        let x = nu.sample(key.substream(3), index);
        let inner_sum: f64 = frozen_g.iter().map(|g| f.evaluate(&x.rotate(*g))).sum();
        outer_sum += inner_sum / budgets.inner as f64;
    }
    let mu_then_nu = McEstimate {
        value: outer_sum / budgets.outer as f64,
        half_width: nested_width,
        samples: budgets.outer * budgets.inner,
    };

    // inner ν, outer μ: mean_g mean_x f(g + x)
    let frozen_x = nu.sample_block(key.substream(4), 0, budgets.inner);
    let mut outer_sum = 0.0;
    for index in 0..budgets.outer {
        let g = mu.sample(key.substream(5), index);
        let inner_sum: f64 = frozen_x.iter().map(|x| f.evaluate(&x.rotate(g))).sum();
        outer_sum += inner_sum / budgets.inner as f64;
    }
    let nu_then_mu = McEstimate {
        value: outer_sum / budgets.outer as f64,
        half_width: nested_width,
        samples: budgets.outer * budgets.inner,
    };

    Ok((direct, mu_then_nu, nu_then_mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::circle::ArcUnion;
    use crate::measure::pushforward;
    use crate::sampled::DEFAULT_DELTA;
    use crate::sets::IndexSet;
    use crate::system::PointIndex;
    use crate::testfn::{circle_catalog, TestFunction};
    use crate::weight::{ratio, Rational};

    fn uniform_z2() -> FiniteMeasure<GroupIndex, Rational> {
        FiniteMeasure::new(vec![(GroupIndex(0), ratio(1, 2)), (GroupIndex(1), ratio(1, 2))])
            .unwrap()
    }

    #[test]
    fn dirac_convolves_to_dirac_at_image() {
        // δ_g ∗ δ_x = δ_{g·x}, exhaustively on every finite built-in
        for (_, sys) in builtin::all_finite() {
            for g in sys.group().elements() {
                for x in sys.points() {
                    let left: FiniteMeasure<GroupIndex, Rational> = FiniteMeasure::dirac(g);
                    let right = FiniteMeasure::dirac(x);
                    let conv = convolve(&sys, &left, &right);
                    assert_eq!(conv, FiniteMeasure::dirac(sys.act(&g, &x)));
                }
            }
        }
    }

    #[test]
    fn identity_dirac_is_neutral() {
        let sys = builtin::s3_natural();
        let nu = FiniteMeasure::new(vec![
            (PointIndex(0), ratio(2, 5)),
            (PointIndex(2), ratio(3, 5)),
        ])
        .unwrap();
        let e: FiniteMeasure<GroupIndex, Rational> = FiniteMeasure::dirac(sys.identity());
        assert_eq!(convolve(&sys, &e, &nu), nu);
    }

    #[test]
    fn z2_example_from_group_integral_oracle() {
        // oracle: Σ_g μ(g)·ν(g⁻¹E) evaluated over both elements by hand
        let sys = builtin::z2_swap();
        let mu = uniform_z2();
        let nu: FiniteMeasure<PointIndex, Rational> = FiniteMeasure::dirac(PointIndex(0));
        let conv = convolve(&sys, &mu, &nu);
        let expected = FiniteMeasure::new(vec![
            (PointIndex(0), ratio(1, 2)),
            (PointIndex(1), ratio(1, 2)),
        ])
        .unwrap();
        assert_eq!(conv, expected);

        let e_set = IndexSet::from_indices(2, [0]);
        assert_eq!(mass_via_group_integral(&sys, &mu, &nu, &e_set), ratio(1, 2));
        assert_eq!(mass_via_section_integral(&sys, &mu, &nu, &e_set), ratio(1, 2));
        assert_eq!(conv.mass_in(&e_set), ratio(1, 2));
    }

    #[test]
    fn single_point_formula_degenerations() {
        let sys = builtin::z3_rotation();
        let nu = FiniteMeasure::new(vec![
            (PointIndex(0), ratio(1, 4)),
            (PointIndex(1), ratio(3, 4)),
        ])
        .unwrap();
        let e_set = IndexSet::from_indices(3, [1]);
        // μ = δ_g reduces the group integral to ν(g⁻¹E)
        for g in sys.group().elements() {
            let dg: FiniteMeasure<GroupIndex, Rational> = FiniteMeasure::dirac(g);
            assert_eq!(
                mass_via_group_integral(&sys, &dg, &nu, &e_set),
                nu.mass_in(&sys.preimage(&g, &e_set))
            );
        }
        // ν = δ_x reduces the section integral to μ(E:x)
        let mu = FiniteMeasure::new(vec![
            (GroupIndex(0), ratio(1, 3)),
            (GroupIndex(2), ratio(2, 3)),
        ])
        .unwrap();
        for x in sys.points() {
            let dx: FiniteMeasure<PointIndex, Rational> = FiniteMeasure::dirac(x);
            assert_eq!(
                mass_via_section_integral(&sys, &mu, &dx, &e_set),
                mu.mass_in(&sys.section(&e_set, &x))
            );
        }
        // E = X gives 1 by every route
        let full = IndexSet::full(3);
        assert_eq!(mass_via_group_integral(&sys, &mu, &nu, &full), ratio(1, 1));
        assert_eq!(mass_via_section_integral(&sys, &mu, &nu, &full), ratio(1, 1));
    }

    #[test]
    fn convolution_mass_is_one() {
        let sys = builtin::dihedral_4();
        let mu = FiniteMeasure::new(vec![
            (GroupIndex(1), ratio(1, 8)),
            (GroupIndex(4), ratio(7, 8)),
        ])
        .unwrap();
        let nu = FiniteMeasure::new(vec![
            (PointIndex(0), ratio(5, 9)),
            (PointIndex(3), ratio(4, 9)),
        ])
        .unwrap();
        assert_eq!(convolve(&sys, &mu, &nu).total_mass(), ratio(1, 1));
    }

    #[test]
    fn dirac_convolution_is_pushforward() {
        let sys = builtin::dihedral_4();
        let nu = FiniteMeasure::new(vec![
            (PointIndex(0), ratio(1, 6)),
            (PointIndex(1), ratio(1, 3)),
            (PointIndex(2), ratio(1, 2)),
        ])
        .unwrap();
        for g in sys.group().elements() {
            let dg: FiniteMeasure<GroupIndex, Rational> = FiniteMeasure::dirac(g);
            assert_eq!(convolve(&sys, &dg, &nu), pushforward(&sys, &g, &nu));
        }
    }

    #[test]
    fn group_convolution_examples() {
        let sys = builtin::z2_swap();
        let group = sys.group();
        // δ_g ∗ δ_h = δ_{gh}
        for g in group.elements() {
            for h in group.elements() {
                let conv = convolve_group(
                    group,
                    &FiniteMeasure::<GroupIndex, Rational>::dirac(g),
                    &FiniteMeasure::dirac(h),
                );
                assert_eq!(conv, FiniteMeasure::dirac(group.compose(g, h)));
            }
        }
        // uniform ∗ uniform = uniform on Z₂ (4-term grid oracle)
        let u = uniform_z2();
        assert_eq!(convolve_group(group, &u, &u), u);
        // δ₁ ∗ μ = μ
        let mu = FiniteMeasure::new(vec![
            (GroupIndex(0), ratio(1, 3)),
            (GroupIndex(1), ratio(2, 3)),
        ])
        .unwrap();
        let e: FiniteMeasure<GroupIndex, Rational> = FiniteMeasure::dirac(group.identity());
        assert_eq!(convolve_group(group, &e, &mu), mu);
    }

    #[test]
    fn fubini_examples() {
        let sys = builtin::z2_swap();
        let mu = uniform_z2();
        let nu: FiniteMeasure<PointIndex, Rational> = FiniteMeasure::dirac(PointIndex(0));
        // constant function: all three routes give the constant
        let c = TestFunction::constant(ratio(5, 7));
        let (a, b, d) = fubini_triple(&sys, &c, &mu, &nu);
        assert_eq!((a.clone(), b, d), (ratio(5, 7), ratio(5, 7), a));
        // indicator of {a} on the Z₂ example: all three equal 1/2 (grid oracle)
        let ind = TestFunction::indicator("point:0", IndexSet::from_indices(2, [0]));
        let (a, b, d) = fubini_triple(&sys, &ind, &mu, &nu);
        assert_eq!(a, ratio(1, 2));
        assert_eq!(b, ratio(1, 2));
        assert_eq!(d, ratio(1, 2));
        // μ = δ₁: all three equal ∫f dν
        let e: FiniteMeasure<GroupIndex, Rational> = FiniteMeasure::dirac(sys.identity());
        let (a, b, d) = fubini_triple(&sys, &ind, &e, &nu);
        let direct = nu.integrate(&ind);
        assert_eq!(a, direct);
        assert_eq!(b, direct);
        assert_eq!(d, direct);
    }

    #[test]
    fn sampled_convolution_of_uniforms_stays_uniform() {
        // uniform ∗ uniform on the circle is uniform: empirical frequency of
        // any arc matches its length
        let conv = convolve_sampled(&SampledMeasure::uniform(), &SampledMeasure::uniform());
        let set = ArcUnion::new([(0.1, 0.35)]).unwrap();
        let key = SampleKey::new(21, 0);
        let budget = 20_000;
        let hits = (0..budget).filter(|&i| set.contains(conv.sample(key, i))).count();
        let freq = hits as f64 / budget as f64;
        assert!((freq - 0.25).abs() < 0.02, "freq={freq}");
    }

    #[test]
    fn finite_sampled_convolution_has_exact_evaluator() {
        // rotate uniform by a two-point measure: still uniform on arcs
        let mu: FiniteMeasure<Angle, f64> = FiniteMeasure::new(vec![
            (Angle::new(0.125), 0.5),
            (Angle::new(0.625), 0.5),
        ])
        .unwrap();
        let conv = convolve_finite_sampled(&mu, &SampledMeasure::uniform());
        let set = ArcUnion::new([(0.2, 0.45)]).unwrap();
        assert_eq!(conv.exact_mass(&set), Some(0.25));
        // and the sampler tracks the evaluator
        let key = SampleKey::new(8, 0);
        let hits = (0..20_000).filter(|&i| set.contains(conv.sample(key, i))).count();
        assert!((hits as f64 / 20_000.0 - 0.25).abs() < 0.02);
    }

    #[test]
    fn sampled_group_integral_matches_exact() {
        // μ uniform (sampled), ν uniform with evaluator: ∫ν(E−g)dμ(g) = |E|
        let mu = SampledMeasure::uniform();
        let nu = SampledMeasure::uniform();
        let set = ArcUnion::new([(0.0, 0.3)]).unwrap();
        let est = group_integral_sampled(&mu, &nu, &set, SampleKey::new(31, 0), 4096, DEFAULT_DELTA)
            .unwrap();
        // ν(E−g) = 0.3 for every g, so the estimate is exact
        assert!((est.value - 0.3).abs() < 1e-12, "{est:?}");
        // convolve_sampled_finite carries the section-formula evaluator
        let nu_fin: FiniteMeasure<Angle, f64> =
            FiniteMeasure::new(vec![(Angle::new(0.25), 1.0)]).unwrap();
        let conv = convolve_sampled_finite(&mu, &nu_fin);
        let mass = conv.exact_mass(&set).unwrap();
        assert!((mass - 0.3).abs() < 1e-15, "mass={mass}");
    }

    #[test]
    fn fubini_sampled_routes_agree() {
        let mu = SampledMeasure::uniform();
        let nu = SampledMeasure::uniform();
        let f = circle_catalog("cos:1").unwrap();
        let (a, b, c) = fubini_triple_sampled(
            &f,
            &mu,
            &nu,
            SampleKey::new(17, 0),
            FubiniBudgets::default(),
            DEFAULT_DELTA,
        )
        .unwrap();
        assert!(a.agrees_with(&b), "{a:?} vs {b:?}");
        assert!(a.agrees_with(&c), "{a:?} vs {c:?}");
        assert!(b.agrees_with(&c), "{b:?} vs {c:?}");
    }

    #[test]
    fn fubini_sampled_rejects_zero_budget() {
        let f = circle_catalog("cos:1").unwrap();
        let err = fubini_triple_sampled(
            &f,
            &SampledMeasure::uniform(),
            &SampledMeasure::uniform(),
            SampleKey::new(1, 0),
            FubiniBudgets { direct: 0, outer: 1, inner: 1 },
            DEFAULT_DELTA,
        )
        .unwrap_err();
        assert_eq!(err, McError::ZeroBudget);
    }
}
