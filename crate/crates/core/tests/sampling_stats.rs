use nkspin::sampling::{mc_integrate, uniform_s3};
use nkspin::UnitQuat;

/// χ² quantile of 15 degrees of freedom at upper tail 1e−4.
const CHI2_15_CRIT: f64 = 44.263_224_944_175_28;

#[test]
fn component_means_obey_clt_bound() {
    let n = 100_000;
    let s = uniform_s3(2718, n);
    let bound = 4.0 / (n as f64).sqrt();
    for c in 0..4 {
        let e = mc_integrate(|g: UnitQuat| g.quat().to_array()[c], &s).unwrap();
        assert!(e.mean.abs() <= bound, "component {c}: mean {}", e.mean);
    }
}

#[test]
fn orthant_counts_pass_chi_square() {
    // the 16 sign orthants of ℝ⁴ cut S³ into cells of equal measure
    let n = 100_000;
    let s = uniform_s3(314, n);
    let mut counts = [0usize; 16];
    for g in s.iter() {
        let idx = g
            .quat()
            .to_array()
            .iter()
            .enumerate()
            .fold(0, |acc, (i, c)| acc | (((*c >= 0.0) as usize) << i));
        counts[idx] += 1;
    }
    let expected = n as f64 / 16.0;
    let chi2: f64 = counts.iter().map(|c| (*c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < CHI2_15_CRIT, "χ² = {chi2}");
}

/// Composite Simpson rule for `∫_{−1}^{1} w² ρ(w) dw`, where `ρ(w) = (2/π)√(1−w²)`
/// is the density of one coordinate of a uniform point on S³.
fn quadrature_second_moment() -> f64 {
    let n = 20_000;
    let h = 2.0 / n as f64;
    let f = |w: f64| w * w * (2.0 / std::f64::consts::PI) * (1.0 - w * w).max(0.0).sqrt();
    let mut acc = f(-1.0) + f(1.0);
    for i in 1..n {
        let w = -1.0 + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(w);
    }
    acc * h / 3.0
}

#[test]
fn second_moment_of_real_part() {
    let exact = 0.25;
    assert!((quadrature_second_moment() - exact).abs() < 1e-5);
    let s = uniform_s3(99, 20_000);
    let e = mc_integrate(|g: UnitQuat| g.quat().w.powi(2), &s).unwrap();
    assert!(e.agrees_with(exact, 3.0, 0.0), "{e:?}");
}
