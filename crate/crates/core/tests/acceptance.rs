//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails. Every comparison is exact.

use std::process::ExitCode;
use std::time::Instant;

use qform_core::bounds::{
    invariant_generators, stability_bound, stability_bound_for_rank, verify_fg_module, StabilityBound,
    VirtuallyAbelianInput,
};
use qform_core::factorization::{factorize, verify_certificate, CertificateFactor};
use qform_core::pairs::{
    check_transitivity, complete_pair, transport, CoefficientDomain, Family, SearchLimits, StabilizedSpace,
    TransportOutcome,
};
use qform_core::sampling::Sampler;
use qform_core::{
    compose, verify_isometry, FiniteGroup, Group, GroupElement, ModuleVector, QuadraticModule, RingElement,
    Transvection, UnitaryRing,
};

const SEED: u64 = 0x5eed_2024;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Rings cycling through the finite, free-abelian and infinite dihedral families.
fn ring_for(s: &mut Sampler, i: usize) -> UnitaryRing {
    UnitaryRing::standard(match i % 3 {
        0 => s.finite_group(),
        1 => s.free_abelian_group(),
        _ => s.dihedral_group(),
    })
}

fn factorization_certificates() -> Outcome {
    let mut s = Sampler::new(SEED);
    let total = 600;
    let mut failures = 0;
    let mut factors = 0;
    let mut max_v0 = 0;
    let mut max_v1 = 0;
    for i in 0..total {
        let ring = ring_for(&mut s, i);
        let input = s.factorization_input(&ring);
        max_v0 = max_v0.max(input.v0().rank());
        max_v1 = max_v1.max(input.v1().rank());
        match factorize(&input) {
            Ok(cert) => {
                factors += cert.factors.len();
                if !verify_certificate(&input, &cert).passed {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && max_v0 == 2 && max_v1 == 2,
        format!(
            "{}/{total} certificates verified ({factors} factors, dim V0 <= {max_v0}, dim V1 <= {max_v1})",
            total - failures
        ),
    )
}

fn isometry_suite() -> Outcome {
    let mut s = Sampler::new(SEED ^ 1);
    let total = 1200;
    let mut failures = 0;
    for i in 0..total {
        let ring = ring_for(&mut s, i);
        let (m, t) = s.transvection(&ring);
        let samples: Vec<ModuleVector> = (0..3).map(|_| s.vector(&ring, m.rank())).collect();
        match verify_isometry(&m, &t, &samples) {
            Ok(r) if r.passed => {}
            _ => failures += 1,
        }
    }

    // mutations that provably break a defining condition
    let mutations = 300;
    let mut false_passes = 0;
    let mut rejected = 0;
    let mut fail_verification = 0;
    for i in 0..mutations {
        let ring = ring_for(&mut s, i);
        let k = 2;
        let v_rank = i % 2;
        let m = s.stabilized_module(&ring, v_rank, k);
        let t = s.transvection_on(&m, v_rank, k);
        let n = m.rank();
        let set_u = (0..k).find(|&j| !t.u.coords[v_rank + j].is_zero());
        let unset_u = (0..k).find(|&j| t.u.coords[v_rank + j].is_zero());
        let mutated = match (i % 3, set_u, unset_u) {
            // <u, v + q_j> = u_j != 0
            (1, Some(j), _) => {
                Transvection::unchecked(t.u.clone(), t.a.clone(), &t.v + &ModuleVector::basis(&ring, n, v_rank + k + j))
            }
            // mu(u + p_j + q_j) = [1] when u_j = 0
            (2, _, Some(j)) => {
                let w = &ModuleVector::basis(&ring, n, v_rank + j) + &ModuleVector::basis(&ring, n, v_rank + k + j);
                Transvection::unchecked(&t.u + &w, t.a.clone(), t.v.clone())
            }
            // [a + 1] differs from mu(v): the unit coefficient is never reduced
            _ => Transvection::unchecked(t.u.clone(), &t.a + &ring.one(), t.v.clone()),
        };
        let accepted = mutated.validate(&m).is_ok();
        let samples: Vec<ModuleVector> = (0..3).map(|_| s.vector(&ring, n)).collect();
        let verified = verify_isometry(&m, &mutated, &samples).map(|r| r.passed).unwrap_or(false);
        if !accepted {
            rejected += 1;
        }
        if !verified {
            fail_verification += 1;
        }
        if accepted && verified {
            false_passes += 1;
        }
    }
    outcome(
        failures == 0 && false_passes == 0,
        format!(
            "{}/{total} transvections preserve form and refinement; {mutations} mutants: {rejected} rejected, \
             {fail_verification} fail verification, {false_passes} false passes",
            total - failures
        ),
    )
}

fn three_factor_identity() -> Outcome {
    let mut s = Sampler::new(SEED ^ 2);
    let total = 240;
    let mut failures = 0;
    for i in 0..total {
        let ring = ring_for(&mut s, i);
        let input = s.factorization_input(&ring);
        let ok = input
            .three_factor_split()
            .and_then(|[t0, t1, t2]| {
                // rightmost first: v_0 is applied first
                let composite = compose(input.ambient(), &[t2, t1, t0])?;
                Ok(composite == input.stabilized_target_matrix()?)
            })
            .unwrap_or(false);
        if !ok {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{}/{total} three-factor composites equal the stabilized target", total - failures),
    )
}

fn composite(m: &QuadraticModule, factors: &[CertificateFactor]) -> qform_core::Result<qform_core::Matrix> {
    let ts: Vec<Transvection> = factors.iter().rev().map(CertificateFactor::transvection).collect();
    compose(m, &ts)
}

fn commutation() -> Outcome {
    let mut s = Sampler::new(SEED ^ 3);
    let wanted = 120;
    let mut certificates = 0;
    let mut swaps = 0;
    let mut failures = 0;
    let mut i = 0;
    while certificates < wanted && i < 50 * wanted {
        let ring = ring_for(&mut s, i);
        i += 1;
        let input = s.factorization_input(&ring);
        let Ok(cert) = factorize(&input) else {
            failures += 1;
            continue;
        };
        if cert.p_split[0] < 2 {
            continue;
        }
        certificates += 1;
        let m = input.ambient();
        let Ok(base) = composite(m, &cert.factors) else {
            failures += 1;
            continue;
        };
        let mut offset = 0;
        for &len in &cert.p_split {
            for k in offset..offset + len - 1 {
                let mut swapped = cert.factors.clone();
                swapped.swap(k, k + 1);
                swaps += 1;
                if composite(m, &swapped).ok() != Some(base.clone()) {
                    failures += 1;
                }
            }
            offset += len;
        }
    }
    outcome(
        failures == 0 && certificates >= 100,
        format!("{certificates} certificates, {swaps} adjacent same-block swaps, {failures} changed the composite"),
    )
}

fn completion() -> Outcome {
    let mut s = Sampler::new(SEED ^ 4);
    let total = 240;
    let mut failures = 0;
    for i in 0..total {
        let ring = ring_for(&mut s, i);
        let ok = s
            .completion_instance(&ring)
            .and_then(|(m, p, y)| {
                let pair = complete_pair(&m, &p, &y)?;
                Ok(pair.p == p && m.inner(&pair.p, &pair.q)? == ring.one() && m.mu(&pair.q)?.is_zero())
            })
            .unwrap_or(false);
        if !ok {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{}/{total} completed pairs satisfy <p,q> = 1 and mu(q) = 0", total - failures),
    )
}

fn transitivity() -> Outcome {
    let run = || -> qform_core::Result<(bool, String)> {
        let ring = UnitaryRing::standard(Group::trivial());
        let space = StabilizedSpace::new(&QuadraticModule::zero(ring)?, 2, CoefficientDomain::Modular(2))?;
        let gens = space.enumerate_generators(&Family::ALL, 1_000_000)?.generators;
        let limits = SearchLimits {
            max_depth: 16,
            node_budget: 100_000,
        };
        let report = check_transitivity(&space, &gens, limits, 1_000_000)?;
        // independent confirmation: a verified word for every pair
        let source = space.standard_pair();
        let mut words = 0;
        for target in space.hyperbolic_pairs(1_000_000)? {
            let r = transport(&space, &gens, &source, &target, limits)?;
            if let TransportOutcome::Found { word } = r.outcome {
                if space.apply_word(&word, &source)? == target {
                    words += 1;
                }
            }
        }
        let ok = report.transitive() && words == report.total_pairs && report.total_pairs > 0;
        Ok((
            ok,
            format!(
                "{}/{} hyperbolic pairs of H((Z/2)^2) reachable, {words} verified words, {} generators, {} unreachable",
                report.reachable,
                report.total_pairs,
                gens.len(),
                report.unreachable.len()
            ),
        ))
    };
    match run() {
        Ok((ok, detail)) => outcome(ok, detail),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn bounds() -> Outcome {
    let mut ok = stability_bound(&Group::trivial()) == StabilityBound { d: 1, summands: 2 };
    ok &= stability_bound(&Group::Finite(FiniteGroup::symmetric3(true))) == StabilityBound { d: 1, summands: 2 };
    ok &= stability_bound(&Group::infinite_dihedral(-1, -1).unwrap()) == StabilityBound { d: 2, summands: 3 };
    for n in 0..=5 {
        let g = Group::free_abelian(n, vec![1; n]).unwrap();
        ok &= stability_bound(&g) == StabilityBound { d: n + 1, summands: n + 2 };
        ok &= stability_bound_for_rank(n) == stability_bound(&g);
    }
    outcome(ok, "finite (1,2), infinite dihedral (2,3), Z^n (n+1,n+2) for n = 0..5")
}

fn invariants() -> Outcome {
    let run = || -> qform_core::Result<(bool, String)> {
        let input = VirtuallyAbelianInput::new(
            1,
            FiniteGroup::cyclic(2, 1)?,
            vec![vec![vec![1]], vec![vec![-1]]],
            vec![1],
        )?;
        let ring = input.ring();
        let u = |k: i64| RingElement::monomial(1, GroupElement::FreeAbelian(vec![k]));
        let cert = invariant_generators(&input, 2)?;
        let expected = vec![ring.one(), &u(1) + &u(-1), &u(2) + &u(-2)];
        let s = &expected[1];
        let relation = &(&ring.mul(s, s) - &expected[2]) - &ring.int(2);
        let fg = verify_fg_module(ring, &cert.generators, &[ring.one(), u(1)], 3)?;
        let ok = cert.generators == expected && relation.is_zero() && fg.passed && cert.all_invariant;
        Ok((
            ok,
            format!(
                "R-generators {}; relation residue {}; finite generation by {{1, u}} to degree 3: {}",
                cert.generators.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
                relation,
                if fg.passed { "pass" } else { "fail" }
            ),
        ))
    };
    match run() {
        Ok((ok, detail)) => outcome(ok, detail),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn canonicalization() -> Outcome {
    let mut s = Sampler::new(SEED ^ 9);
    let total = 1500;
    let mut failures = 0;
    for i in 0..total {
        let ring = ring_for(&mut s, i);
        let x = s.element(&ring);
        let a = s.element(&ring);
        let skew = &a - &ring.involute(&a);
        let ok = (|| -> qform_core::Result<bool> {
            let r = ring.reduce_mod_lambda(&x)?;
            Ok(ring.reduce_mod_lambda(&r)? == r
                && ring.reduce_mod_lambda(&skew)?.is_zero()
                && ring.reduce_mod_lambda(&(&x + &skew))? == r)
        })()
        .unwrap_or(false);
        if !ok {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{}/{total} elements: reduction idempotent and a - conj(a) reduces to 0", total - failures),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("factorization certificates verify", factorization_certificates),
        ("transvections are isometries, mutants rejected", isometry_suite),
        ("three-factor identity", three_factor_identity),
        ("same-block factors commute", commutation),
        ("pair completion", completion),
        ("transitivity on hyperbolic pairs over Z/2, rank 2", transitivity),
        ("stability bounds", bounds),
        ("invariant ring and finite generation", invariants),
        ("canonical reduction", canonicalization),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        all &= o.passed;
        println!(
            "criterion {} {:<50} {} [{:.2}s] {}",
            i + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
