//! The invariant suite run by `verify-all`.

use std::f64::consts::PI;

use adjlab::algebra::{build_compact_form, AdjointMatrix, CompactAlgebraBasis};
use adjlab::character::{haar_character_integral, normalized_character, weight_multiplicities, weyl_dimension, TorusPoint};
use adjlab::class_power::{
    bch_scaling_fit, class_power_identity_check, default_bch_grid, greedy_class_tuple, product_radius_mu,
    tangent_rank_l_n, word_map, ConjugacyClass, IdentityCheckOptions,
};
use adjlab::disk::{
    arc_constants, character_scan, delta_lower_bound_check, disk_requirement, empirical_disk_constant,
    final_inequality_check, frobenius_deviation, pigeonhole_k, random_unitary, re_power_nonpositive,
    telescoping_check, ArcSpec, DiskParam,
};
use adjlab::orbit::hull::{zero_in_hull_interior, HullVerdict};
use adjlab::orbit::replication::replication_plan;
use adjlab::orbit::walk::{bounded_partial_sum_sequence, distance_to_ray, lattice_ray_walk, partial_sum_bound};
use adjlab::orbit::{find_vanishing_submersive_tuple, orbit_sum, orbit_sum_rank, VanishingOptions};
use adjlab::{build_root_system, enumerate_adjoint_dominant_weights, generate_weyl_group, CartanType, RootSystemSpec};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::commands::{stream_rng, Events};
use crate::output::{num, Artifacts, Table};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub check: &'static str,
    pub passed: bool,
    /// The quantity the check thresholds, for the record.
    pub metric: f64,
}

const GROUPS: [&str; 4] = ["A1", "A2", "B2", "G2"];

fn rs(label: &str) -> RootSystemSpec {
    build_root_system(label.parse::<CartanType>().expect("known label")).expect("supported")
}

fn compact(label: &str) -> CompactAlgebraBasis {
    build_compact_form(&rs(label)).expect("supported")
}

struct Suite {
    seed: u64,
    stream: u64,
    results: Vec<CheckResult>,
}

impl Suite {
    fn rng(&mut self) -> rand_chacha::ChaCha8Rng {
        self.stream += 1;
        stream_rng(self.seed, 10_000 + self.stream)
    }

    fn record(&mut self, module: &'static str, check: &'static str, passed: bool, metric: f64) {
        self.results.push(CheckResult { module, check, passed, metric });
    }
}

fn root_system_checks(s: &mut Suite) {
    let mut ok = true;
    for label in ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2"] {
        let r = rs(label);
        ok &= generate_weyl_group(&r).map(|w| w.len() as u64) == Ok(r.cartan_type.weyl_order());
    }
    s.record("root_system", "weyl_group_orders", ok, 0.0);
    let mut worst = 0u64;
    for label in GROUPS {
        let r = rs(label);
        for w in enumerate_adjoint_dominant_weights(&r, 4) {
            let t = weight_multiplicities(&r, &w).expect("table");
            worst = worst.max(t.total_multiplicity().abs_diff(weyl_dimension(&r, &w).expect("dim")));
        }
    }
    s.record("root_system", "multiplicities_sum_to_weyl_dimension", worst == 0, worst as f64);
}

fn character_checks(s: &mut Suite) {
    let mut rng = s.rng();
    let (mut conj, mut weyl, mut period, mut modulus): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for label in ["A2", "B2", "G2"] {
        let r = rs(label);
        let group = generate_weyl_group(&r).expect("group");
        for w in enumerate_adjoint_dominant_weights(&r, 3) {
            let t = weight_multiplicities(&r, &w).expect("table");
            for _ in 0..50 {
                let th: Vec<f64> = (0..r.rank).map(|_| rng.random_range(-7.0..7.0)).collect();
                let p = TorusPoint::new(th.clone());
                let z = normalized_character(&t, &p).z;
                let neg = TorusPoint::new(th.iter().map(|x| -x).collect());
                conj = conj.max((normalized_character(&t, &neg).z - z.conj()).norm());
                let g = &group[rng.random_range(0..group.len())];
                let wt = g.weight_action.map(|v| v as f64).transpose() * DVector::from_column_slice(&th);
                weyl = weyl.max((normalized_character(&t, &TorusPoint::new(wt.iter().copied().collect())).z - z).norm());
                let mut y = p.root_angles(&r);
                y[rng.random_range(0..r.rank)] += 2.0 * PI;
                period = period.max((normalized_character(&t, &TorusPoint::from_root_angles(&r, &y)).z - z).norm());
                modulus = modulus.max(z.norm());
            }
        }
    }
    s.record("character_engine", "conjugation_symmetry", conj <= 1e-12, conj);
    s.record("character_engine", "weyl_invariance", weyl <= 1e-12, weyl);
    s.record("character_engine", "adjoint_periodicity", period <= 1e-12, period);
    s.record("character_engine", "modulus_at_most_one", modulus <= 1.0 + 1e-9, modulus);
    let mut haar: f64 = 0.0;
    for (label, bound, n) in [("A1", 20, 512), ("A2", 6, 64)] {
        let r = rs(label);
        for w in enumerate_adjoint_dominant_weights(&r, bound).into_iter().filter(|w| !w.is_zero()) {
            let t = weight_multiplicities(&r, &w).expect("table");
            haar = haar.max(haar_character_integral(&r, &t, n).expect("rank <= 2").norm());
        }
    }
    s.record("character_engine", "haar_orthogonality", haar <= 1e-6, haar);
}

fn adjoint_checks(s: &mut Suite) {
    let mut rng = s.rng();
    let (mut jacobi, mut max_eig, mut roundtrip, mut orth, mut hom): (f64, f64, f64, f64, f64) =
        (0.0, f64::NEG_INFINITY, 0.0, 0.0, 0.0);
    for label in GROUPS {
        let b = compact(label);
        jacobi = jacobi.max(b.jacobi_residual());
        let eig = b.killing_gram.clone().symmetric_eigen().eigenvalues;
        max_eig = max_eig.max(eig.max());
        for _ in 0..20 {
            let x = b.random_vector(&mut rng, 0.5);
            let g = b.group_exp(&x);
            roundtrip = roundtrip.max((b.group_log(&g).expect("small") - &x).amax());
            orth = orth.max(b.random_group_element(&mut rng).orthogonality_defect());
            let (p, q) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let u = b.random_unit_vector(&mut rng);
            let lhs = b.group_exp(&(&u * (p + q)));
            let rhs = b.group_exp(&(&u * p)).mul(&b.group_exp(&(&u * q)));
            hom = hom.max((&lhs.0 - &rhs.0).amax());
        }
    }
    s.record("adjoint_realization", "jacobi_identity", jacobi <= 1e-10, jacobi);
    s.record("adjoint_realization", "killing_negative_definite", max_eig < 0.0, max_eig);
    s.record("adjoint_realization", "exp_log_roundtrip", roundtrip <= 1e-9, roundtrip);
    s.record("adjoint_realization", "killing_orthogonality", orth <= 1e-9, orth);
    s.record("adjoint_realization", "exp_homomorphism_on_lines", hom <= 1e-10, hom);
}

fn cube<R: Rng>(d: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0))
}

fn orbit_checks(s: &mut Suite) {
    let mut rng = s.rng();
    let mut dichotomy_ok = true;
    for trial in 0..200 {
        let d = rng.random_range(1..=6);
        let n = rng.random_range(1..=2 * d + 2);
        let mut vs: Vec<DVector<f64>> = (0..n).map(|_| cube(d, &mut rng)).collect();
        let interior = trial % 2 == 0;
        if interior {
            for k in 0..d {
                let e = DVector::from_fn(d, |i, _| (i == k) as u8 as f64);
                vs.push(e.clone());
                vs.push(-e);
            }
        } else {
            let y = cube(d, &mut rng).normalize();
            for x in vs.iter_mut() {
                let along = x.dot(&y);
                *x += &y * (0.1 + along.abs() - along.min(0.0));
            }
        }
        dichotomy_ok &= match zero_in_hull_interior(&vs, 1e-9) {
            HullVerdict::Interior(c) => interior && c.is_valid(),
            HullVerdict::Separated { functional } => {
                let y = DVector::from_column_slice(&functional);
                !interior && vs.iter().all(|x| y.dot(x) >= -1e-9)
            }
            _ => false,
        };
    }
    s.record("convex_orbit_lab", "hull_certificate_separator_dichotomy", dichotomy_ok, 0.0);
    let mut worst_walk = f64::NEG_INFINITY;
    let mut worst_sum = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
        let bound = (2.0 * n as f64).sqrt();
        for x in lattice_ray_walk(&a, 2000).expect("positive") {
            worst_walk = worst_walk.max(distance_to_ray(&x, &a) - bound);
        }
        let (vs, a) = null_system(n.max(2), 3, &mut rng);
        let idx = bounded_partial_sum_sequence(&vs, &a, 2000).expect("null system");
        let r = partial_sum_bound(&vs);
        let mut p = DVector::zeros(3);
        for i in idx {
            p += &vs[i];
            worst_sum = worst_sum.max(p.norm() / r);
        }
    }
    s.record("convex_orbit_lab", "ray_distance_bound", worst_walk <= 0.0, worst_walk);
    s.record("convex_orbit_lab", "partial_sum_bound", worst_sum <= 1.0, worst_sum);
    let mut exact = true;
    for _ in 0..100 {
        let m = rng.random_range(1..=5);
        let a: Vec<f64> = (0..m).map(|_| rng.random_range(0.02..1.0)).collect();
        let plan = replication_plan(&a, 1e-3).expect("positive");
        exact &= plan.counts.iter().sum::<BigUint>() == plan.n;
    }
    s.record("convex_orbit_lab", "replication_count_identity", exact, 0.0);
    let a1 = compact("A1");
    let x = DVector::from_column_slice(&[0.0, 1.0, 0.0]);
    let axis = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
    let triple: Vec<AdjointMatrix> = (0..3).map(|k| a1.group_exp(&(&axis * (2.0 * PI * k as f64 / 3.0)))).collect();
    let res = a1.killing_norm(&orbit_sum(&x, &triple));
    let rank = orbit_sum_rank(&a1, &x, &triple);
    s.record("convex_orbit_lab", "a1_triple_vanishes_submersively", res <= 1e-10 && rank == 3, res);
    let a2 = compact("A2");
    let x = a2.random_unit_vector(&mut rng);
    let found = find_vanishing_submersive_tuple(&a2, &x, &mut rng, &VanishingOptions::default());
    let ok = found.as_ref().is_ok_and(|t| t.rank == 8 && t.n <= 16 && t.residual <= 1e-8);
    s.record("convex_orbit_lab", "a2_vanishing_submersive_tuple", ok, found.map_or(f64::NAN, |t| t.n as f64));
}

/// `n` random vectors in `R^d` with positive weights summing them to zero.
pub fn null_system<R: Rng>(n: usize, d: usize, rng: &mut R) -> (Vec<DVector<f64>>, Vec<f64>) {
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let mut vs: Vec<DVector<f64>> = (0..n - 1).map(|_| cube(d, rng)).collect();
    let acc = vs.iter().zip(&a).fold(DVector::zeros(d), |s, (v, ai)| s + v * *ai);
    vs.push(-acc / a[n - 1]);
    (vs, a)
}

fn class_power_checks(s: &mut Suite) {
    let mut rng = s.rng();
    let mut equiv: f64 = 0.0;
    let mut monotone = true;
    let mut greedy = true;
    for label in GROUPS {
        let b = compact(label);
        let class = ConjugacyClass::new(&b, b.random_unit_vector(&mut rng), rng.random_range(0.2..2.5)).expect("class");
        let gs: Vec<AdjointMatrix> = (0..3).map(|_| b.random_group_element(&mut rng)).collect();
        let h = b.random_group_element(&mut rng);
        let hg: Vec<AdjointMatrix> = gs.iter().map(|g| h.mul(g)).collect();
        let lhs = word_map(&b, &hg, &class);
        let rhs = h.mul(&word_map(&b, &gs, &class)).mul(&h.inverse());
        equiv = equiv.max((&lhs.0 - &rhs.0).amax());
        let xs: Vec<AdjointMatrix> = (0..4).map(|_| class.conjugate(&b, &b.random_group_element(&mut rng))).collect();
        for k in 1..xs.len() {
            monotone &= tangent_rank_l_n(&xs[k - 1..]) >= tangent_rank_l_n(&xs[k..]);
        }
        greedy &= greedy_class_tuple(&b, &class, b.dim, &mut rng).is_ok_and(|g| g.elements.len() <= b.dim);
    }
    s.record("class_power_lab", "word_map_equivariance", equiv <= 1e-12, equiv);
    s.record("class_power_lab", "tangent_rank_monotone", monotone, 0.0);
    s.record("class_power_lab", "greedy_reaches_full_rank", greedy, 0.0);
    let a1 = compact("A1");
    let class = ConjugacyClass::new(&a1, a1.random_unit_vector(&mut rng), 1.0).expect("class");
    let rep = class_power_identity_check(&a1, &class, 2, &IdentityCheckOptions { base_seed: s.seed, ..Default::default() });
    s.record("class_power_lab", "a1_identity_interior_in_c2", rep.reachable && rep.interior, rep.min_residual);
    let mut worst_exp: f64 = 0.0;
    let mut zero = true;
    for (label, k) in [("A1", 2), ("A2", 2), ("G2", 3)] {
        let b = compact(label);
        let xs: Vec<_> = (0..k).map(|_| b.random_unit_vector(&mut rng)).collect();
        let fit = bch_scaling_fit(&b, &xs, &default_bch_grid()).expect("fit");
        worst_exp = worst_exp.max(fit.exponent.map_or(f64::INFINITY, |e| (e - 2.0).abs()));
        let u = b.random_unit_vector(&mut rng);
        let comm: Vec<_> = (0..k).map(|i| &u * (1.0 + i as f64)).collect();
        zero &= bch_scaling_fit(&b, &comm, &default_bch_grid()).expect("fit").exact_zero;
    }
    s.record("class_power_lab", "bch_exponent_two", worst_exp <= 0.05, worst_exp);
    s.record("class_power_lab", "bch_commuting_zero", zero, 0.0);
    let mu = product_radius_mu(&a1, 4, 0.05, 500, &mut rng).expect("small delta");
    s.record("class_power_lab", "product_radius_bound", mu.mu_hat <= mu.mu_bound, mu.mu_bound - mu.mu_hat);
}

fn disk_checks(s: &mut Suite) {
    let mut rng = s.rng();
    let mut consistent = true;
    for _ in 0..10_000 {
        let z = Complex64::from_polar(rng.random::<f64>().sqrt(), rng.random_range(0.0..2.0 * PI));
        let c = rng.random_range(-0.99..0.99);
        let h = disk_requirement(z).expect("inside");
        if (h - c).abs() > 1e-12 {
            consistent &= DiskParam::new(c).expect("in range").contains(z) == (c <= h);
        }
    }
    s.record("disk_estimator", "membership_matches_h", consistent, 0.0);
    let real: f64 = (0..1000)
        .map(|i| -1.0 + 1.999 * i as f64 / 1000.0)
        .map(|r| (disk_requirement(Complex64::new(r, 0.0)).expect("r < 1") - r).abs())
        .fold(0.0, f64::max);
    s.record("disk_estimator", "h_identity_on_reals", real <= 1e-14, real);
    let a1 = rs("A1");
    let so3 = empirical_disk_constant(&a1, 20, 2000, None).expect("scan");
    let err = (so3.c_hat + 1.0 / 3.0).abs();
    s.record("disk_estimator", "so3_constant", err <= 1e-9, so3.c_hat);
    let mut band = true;
    let mut series_ok = true;
    for label in ["A2", "B2", "G2"] {
        let r = rs(label);
        let cs: Vec<f64> = [2, 4, 6]
            .iter()
            .map(|&w| empirical_disk_constant(&r, w, 24, None).expect("scan").c_hat)
            .collect();
        band &= cs.iter().all(|c| *c > -1.0 && *c < 0.0);
        series_ok &= cs.windows(2).all(|w| w[1] <= w[0]);
    }
    s.record("disk_estimator", "rank_two_constants_in_band", band, 0.0);
    s.record("disk_estimator", "constants_monotone_in_weight_bound", series_ok, 0.0);
    let mut contract = true;
    for _ in 0..5 {
        let lo = rng.random_range(0.05..0.5);
        let hi = rng.random_range(lo..0.95);
        let b = rng.random_range(1..5);
        let c = arc_constants(ArcSpec::new(lo, hi).expect("arc"), b).expect("constants");
        for _ in 0..2000 {
            let x = rng.random_range(lo..=hi);
            let r = pigeonhole_k(x, &c).expect("in arc");
            contract &= re_power_nonpositive(r.k, x) && r.k <= c.k_bound() && r.k >= b && r.brute_k <= r.k;
        }
    }
    s.record("disk_estimator", "pigeonhole_contract", contract, 0.0);
    let mut frob: f64 = 0.0;
    for k in 0..100 {
        let p = random_unitary(1 + k % 8, &mut rng);
        let omega = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
        frob = frob.max(frobenius_deviation(&p, omega).expect("unitary").identity_residual);
    }
    s.record("disk_estimator", "frobenius_identity", frob <= 1e-12, frob);
    let mut tele = true;
    for k in 0..200 {
        let ps: Vec<DMatrix<Complex64>> = (0..1 + k % 8).map(|_| random_unitary(1 + k % 6, &mut rng)).collect();
        let omega = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
        tele &= telescoping_check(&ps, omega).expect("unitary").holds;
    }
    s.record("disk_estimator", "telescoping_estimate", tele, 0.0);
    let mut delta_ok = true;
    let mut margin = f64::INFINITY;
    for (label, bound, grid, arc) in [("A1", 20, 2000, (0.45, 0.55)), ("A2", 6, 32, (0.3, 0.7)), ("G2", 4, 24, (0.3, 0.7))] {
        let r = rs(label);
        let samples = character_scan(&r, &enumerate_adjoint_dominant_weights(&r, bound), grid, None).expect("scan");
        let c = arc_constants(ArcSpec::new(arc.0, arc.1).expect("arc"), 3).expect("constants");
        let rep = delta_lower_bound_check(&samples, &c);
        delta_ok &= rep.passes;
        if let Some(m) = rep.margin {
            margin = margin.min(m);
        }
    }
    s.record("disk_estimator", "delta_at_least_epsilon", delta_ok, margin);
    let mut sweep = true;
    for i in 1..1000 {
        for k in 1..=100 {
            let f = final_inequality_check(k, i as f64 / 1000.0).expect("valid");
            sweep &= f.bound_holds && f.contradiction;
        }
    }
    s.record("disk_estimator", "final_inequality_sweep", sweep, 0.0);
}

pub fn run_suite(seed: u64) -> Vec<CheckResult> {
    let mut s = Suite { seed, stream: 0, results: Vec::new() };
    root_system_checks(&mut s);
    character_checks(&mut s);
    adjoint_checks(&mut s);
    orbit_checks(&mut s);
    class_power_checks(&mut s);
    disk_checks(&mut s);
    s.results
}

pub fn verify_all(seed: u64, out: &mut Artifacts) -> Result<Events, CliError> {
    let results = run_suite(seed);
    let mut ev = Events::default();
    let mut table = Table::new(["module", "check", "passed", "metric"]);
    for r in &results {
        ev.check(r.passed, || format!("{}::{} failed (metric {})", r.module, r.check, r.metric));
        table.push(vec![r.module.into(), r.check.into(), r.passed.to_string(), num(r.metric)]);
    }
    out.csv("verify_all.csv", &table)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    out.json(
        "verify_all.json",
        "verify-all",
        seed,
        json!({"checks": results, "total": results.len(), "failed": failed}),
    )?;
    Ok(ev)
}
