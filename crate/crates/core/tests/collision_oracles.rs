use std::f64::consts::PI;

use bogoscatter_core::mc::LOSS_NORMALIZATION;
use bogoscatter_core::*;
use proptest::prelude::*;

fn scale(nbar: f64) -> CondensateScale {
    CondensateScale::new(nbar).unwrap()
}

fn bose(e: f64) -> f64 {
    1.0 / e.exp_m1()
}

/// Momentum from `(p² + n̄)² = E² + n̄²`.
fn momentum(e: f64, nbar: f64) -> f64 {
    ((e * e + nbar * nbar).sqrt() - nbar).sqrt()
}

fn chi(e: f64, nbar: f64) -> f64 {
    e / (e * e + nbar * nbar).sqrt()
}

const ENERGIES: [f64; 5] = [1e-3, 1e-2, 0.1, 1.0, 5.0];
const NBARS: [f64; 5] = [1e-4, 1e-3, 1e-2, 0.04, 0.1];

/// Midpoint sum for the free-gas NN loss at `E1 = 1` with unit kernel.
/// `E2 = x²` and `E3 = S sin²(πy/2)` remove the endpoint singularities.
fn free_nn_loss_riemann(n: usize) -> f64 {
    let e1: f64 = 1.0;
    let xmax = 40f64.sqrt();
    let (hx, hy) = (xmax / n as f64, 1.0 / n as f64);
    let p1 = e1.sqrt();
    let mut sum = 0.0;
    for i in 0..n {
        let x = (i as f64 + 0.5) * hx;
        let e2 = x * x;
        let s = e1 + e2;
        let p2 = x;
        let mut inner = 0.0;
        for j in 0..n {
            let y = (j as f64 + 0.5) * hy;
            let e3 = s * (0.5 * PI * y).sin().powi(2);
            let e4 = s - e3;
            if e4 <= 0.0 || e3 <= 0.0 {
                continue;
            }
            let (p3, p4) = (e3.sqrt(), e4.sqrt());
            let window = ((p1 + p3).min(p2 + p4) - (p1 - p3).abs().max((p2 - p4).abs())).max(0.0);
            let jac = 0.5 * s * PI * (PI * y).sin();
            inner += window * (1.0 + bose(e3)) * (1.0 + bose(e4)) * jac;
        }
        sum += 2.0 * x * bose(e2) * inner * hy;
    }
    bose(e1) * sum * hx / p1
}

#[test]
fn nn_loss_matches_riemann_sum() {
    let e1 = 1.0;
    // the window has kinks, so the midpoint error is O(h); extrapolate it away
    let oracle = 2.0 * free_nn_loss_riemann(4000) - free_nn_loss_riemann(2000);
    let q = q_collision(
        e1,
        &IsotropicDistribution::bose_einstein(),
        scale(0.0),
        &KernelMode::ConstantOne,
        CollisionParts::LossOnly,
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert!(q.value > 0.0 && q.value.is_finite());
    assert!((q.value / oracle - 1.0).abs() < 1e-4, "{} vs {oracle}", q.value);
}

#[test]
fn nc_loss_matches_riemann_sum() {
    let (e1, nbar) = (0.04, 0.04);
    let h = 1e-5;
    let w = |e2: f64, e3: f64| chi(e2, nbar) * chi(e3, nbar);
    let mut plus = 0.0;
    let steps = (40.0 / h) as usize;
    for i in 0..steps {
        let e2 = (i as f64 + 0.5) * h;
        let e3 = e1 + e2;
        plus += 2.0 * bose(e2) * (1.0 + bose(e3)) * w(e2, e3);
    }
    let mut minus = 0.0;
    let steps = (e1 / h).round() as usize;
    for i in 0..steps {
        let e2 = (i as f64 + 0.5) * h;
        let e3 = e1 - e2;
        minus += (1.0 + bose(e2)) * (1.0 + bose(e3)) * w(e2, e3);
    }
    let oracle = bose(e1) * (plus + minus) * h / momentum(e1, nbar);
    let v = w_collision(
        e1,
        &IsotropicDistribution::bose_einstein(),
        scale(nbar),
        &KernelMode::ConstantOne,
        CollisionParts::LossOnly,
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert!(v.value > 0.0 && v.value.is_finite());
    assert!((v.value / oracle - 1.0).abs() < 1e-4, "{} vs {oracle}", v.value);
}

#[test]
fn detailed_balance_grid() {
    let spec = QuadratureSpec::default();
    let eq = IsotropicDistribution::bose_einstein();
    for &e in &ENERGIES {
        for &nbar in &NBARS {
            let q = q_collision(e, &eq, scale(nbar), &KernelMode::FullT(KernelForm::AsPrinted), CollisionParts::Both, &spec)
                .unwrap();
            let w = w_collision(e, &eq, scale(nbar), &KernelMode::FullS(KernelForm::AsPrinted), CollisionParts::Both, &spec)
                .unwrap();
            assert!(q.value.abs() < 1e-8, "Q({e}, {nbar}) = {}", q.value);
            assert!(w.value.abs() < 1e-8, "W({e}, {nbar}) = {}", w.value);
        }
    }
}

proptest! {
    #[test]
    fn equilibrium_brackets_vanish_pointwise(e1 in 1e-6f64..30.0, e2 in 1e-6f64..30.0, w in 0.0f64..1.0) {
        let f = IsotropicDistribution::bose_einstein();
        let occ = |e: f64| f.occupation(e);
        let e3 = (e1 + e2) * w.clamp(1e-9, 1.0 - 1e-9);
        let e4 = e1 + e2 - e3;
        let ((f1, g1), (f2, g2), (f3, g3), (f4, g4)) = (occ(e1), occ(e2), occ(e3), occ(e4));
        let gain = g1 * g2 * f3 * f4;
        let loss = f1 * f2 * g3 * g4;
        prop_assert!((gain - loss).abs() <= 1e-12 * loss.max(gain));
        // NC shell E3 = E1 + E2
        let (f3, g3) = occ(e1 + e2);
        let gain = g1 * g2 * f3;
        let loss = f1 * f2 * g3;
        prop_assert!((gain - loss).abs() <= 1e-12 * loss.max(gain));
    }
}

#[test]
fn gain_minus_loss_decomposition() {
    let spec = QuadratureSpec::default();
    let f = IsotropicDistribution::bose_einstein().scaled(1.1).unwrap();
    for (e, nbar) in [(0.01, 0.04), (0.5, 1e-3), (2.0, 0.1)] {
        let n = scale(nbar);
        let t = KernelMode::FullT(KernelForm::AsPrinted);
        let s = KernelMode::FullS(KernelForm::AsPrinted);
        let q = |p| q_collision(e, &f, n, &t, p, &spec).unwrap();
        let w = |p| w_collision(e, &f, n, &s, p, &spec).unwrap();
        let (qb, qg, ql) = (q(CollisionParts::Both), q(CollisionParts::GainOnly), q(CollisionParts::LossOnly));
        assert!((qb.value - (qg.value - ql.value)).abs() <= 1e-6 * ql.value, "{qb:?} {qg:?} {ql:?}");
        let (wb, wg, wl) = (w(CollisionParts::Both), w(CollisionParts::GainOnly), w(CollisionParts::LossOnly));
        assert!((wb.value - (wg.value - wl.value)).abs() <= 1e-6 * wl.value, "{wb:?} {wg:?} {wl:?}");
        assert!(ql.value > 0.0 && wl.value > 0.0);
    }
}

#[test]
fn sigma_kernel_is_linear() {
    let spec = QuadratureSpec::default();
    let eq = IsotropicDistribution::bose_einstein();
    let n = scale(0.04);
    let base = q_collision(0.3, &eq, n, &KernelMode::sigma(|_| 1.0), CollisionParts::LossOnly, &spec).unwrap();
    let one = q_collision(0.3, &eq, n, &KernelMode::ConstantOne, CollisionParts::LossOnly, &spec).unwrap();
    assert_eq!(base.value, one.value);
    for c in [0.5, 2.5, 7.0] {
        let q = q_collision(0.3, &eq, n, &KernelMode::sigma(move |_| c), CollisionParts::LossOnly, &spec).unwrap();
        assert!((q.value / (c * base.value) - 1.0).abs() < 1e-14);
        let w = w_collision(0.3, &eq, n, &KernelMode::sigma(move |_| c), CollisionParts::LossOnly, &spec).unwrap();
        let w1 = w_collision(0.3, &eq, n, &KernelMode::ConstantOne, CollisionParts::LossOnly, &spec).unwrap();
        assert!((w.value / (c * w1.value) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn halving_the_tolerance_is_self_consistent() {
    let coarse = QuadratureSpec::default();
    let fine = coarse.clone().with_rel_tol(0.5 * coarse.rel_tol);
    let eq = IsotropicDistribution::bose_einstein();
    let t = KernelMode::FullT(KernelForm::AsPrinted);
    let s = KernelMode::FullS(KernelForm::AsPrinted);
    for &e in &ENERGIES {
        for &nbar in &NBARS {
            let n = scale(nbar);
            let a = q_collision(e, &eq, n, &t, CollisionParts::LossOnly, &coarse).unwrap().value;
            let b = q_collision(e, &eq, n, &t, CollisionParts::LossOnly, &fine).unwrap().value;
            assert!((a - b).abs() <= coarse.rel_tol * b.abs(), "Q({e}, {nbar}): {a} vs {b}");
            let a = w_collision(e, &eq, n, &s, CollisionParts::LossOnly, &coarse).unwrap().value;
            let b = w_collision(e, &eq, n, &s, CollisionParts::LossOnly, &fine).unwrap().value;
            assert!((a - b).abs() <= coarse.rel_tol * b.abs(), "W({e}, {nbar}): {a} vs {b}");
        }
    }
}

#[test]
fn loss_matches_monte_carlo() {
    let spec = QuadratureSpec::default();
    let mc = McSpec { samples: 2_000_000, ..Default::default() };
    for (e1, nbar) in [(1.0, 0.0), (0.04, 0.04), (0.5, 0.01)] {
        let q = q_collision(
            e1,
            &IsotropicDistribution::bose_einstein(),
            scale(nbar),
            &KernelMode::ConstantOne,
            CollisionParts::LossOnly,
            &spec,
        )
        .unwrap();
        let target = LOSS_NORMALIZATION * q.value;
        let est = mc_q_loss(ScaledEnergy(e1), scale(nbar), &mc).unwrap();
        assert!(est.within_sigmas(target, 3.0), "E1={e1} nbar={nbar}: {est:?} vs {target}");
        assert!(est.rel_error() < 0.05);
    }
}
