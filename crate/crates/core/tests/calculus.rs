use std::f64::consts::PI;

use nkspin::quat::{exp_im, ImQuat, Quat, UnitQuat};
use nkspin::s3calc::{
    covariant_derivative, directional_derivative, divergence, flow_orbit, DerivMode,
    ScalarFieldS3, TangentS3, VectorFieldS3,
};
use nkspin::sampling::{point_at, uniform_s3};
use nkspin::spinor::{decompose_valpha, xi_field, SpinorField};

const H: f64 = 1e-4;

fn random_im(seed: u64) -> ImQuat {
    point_at(seed, 0).quat().im()
}

#[test]
fn metric_compatibility() {
    let s = uniform_s3(31, 300);
    let y = xi_field(&SpinorField::random_poly(4, &s.points), ImQuat::J);
    let z = VectorFieldS3::new(|g| g.quat().im() * 2.0 + ImQuat::new(0.0, g.quat().w, 0.0));
    let mode = DerivMode::Fd { h: H };
    let mut worst: f64 = 0.0;
    for (n, g) in s.iter().enumerate() {
        let x = random_im(1000 + n as u64);
        let (yc, zc) = (y.clone(), z.clone());
        let inner = move |p: UnitQuat| yc.component(p).dot(zc.component(p));
        let lhs = directional_derivative(&inner, None, *g, x, mode).unwrap();
        let ny = covariant_derivative(&y, TangentS3::new(*g, x), mode).unwrap().lie;
        let nz = covariant_derivative(&z, TangentS3::new(*g, x), mode).unwrap().lie;
        let rhs = ny.dot(z.component(*g)) + y.component(*g).dot(nz);
        worst = worst.max((lhs - rhs).abs());
    }
    assert!(worst <= 1e-6, "metric compatibility residual {worst:e}");
}

#[test]
fn torsion_free_on_left_invariant_fields() {
    let s = uniform_s3(32, 200);
    for (n, g) in s.iter().enumerate() {
        let x = random_im(2000 + n as u64);
        let y = random_im(3000 + n as u64);
        let nxy = covariant_derivative(&VectorFieldS3::left_invariant(y), TangentS3::new(*g, x), DerivMode::Analytic).unwrap();
        let nyx = covariant_derivative(&VectorFieldS3::left_invariant(x), TangentS3::new(*g, y), DerivMode::Analytic).unwrap();
        // the bracket of left-invariant fields g·x, g·y is g·[x, y]
        let res = (nxy.lie - nyx.lie - x.bracket(y)).norm();
        assert!(res <= 1e-12, "torsion residual {res:e}");
    }
}

fn fd_gap_vector(field: &VectorFieldS3, g: UnitQuat, x: ImQuat) -> f64 {
    let a = field.differential(g, x, DerivMode::Analytic).unwrap();
    let n = field.differential(g, x, DerivMode::Fd { h: H }).unwrap();
    (a - n).norm()
}

#[test]
fn registered_differentials_match_central_differences() {
    let s = uniform_s3(33, 100);
    let b = ImQuat::new(0.0, 0.6, -0.8);
    let spinors = [
        SpinorField::constant(Quat::new(0.5, 0.5, 0.5, 0.5)),
        SpinorField::inverse(),
        SpinorField::conj_b(b),
        SpinorField::b_inverse(b),
        SpinorField::identity(),
    ];
    let fields = [
        VectorFieldS3::left_invariant(b),
        VectorFieldS3::right_invariant(b),
        VectorFieldS3::imaginary_part(),
    ];
    let mut worst: f64 = 0.0;
    let mut worst_xi: f64 = 0.0;
    for (n, g) in s.iter().enumerate() {
        let x = random_im(4000 + n as u64);
        for f in &fields {
            worst = worst.max(fd_gap_vector(f, *g, x));
        }
        for psi in &spinors {
            let a = psi.differential(*g, x, DerivMode::Analytic).unwrap();
            let fd = psi.differential(*g, x, DerivMode::Fd { h: H }).unwrap();
            worst = worst.max((a - fd).norm());
            for e in ImQuat::BASIS {
                worst_xi = worst_xi.max(fd_gap_vector(&xi_field(psi, e), *g, x));
            }
            let d = decompose_valpha(psi);
            worst = worst.max(fd_gap_vector(&d.v, *g, x));
            let da = d.alpha.derivative(*g, x, DerivMode::Analytic).unwrap()
                - d.alpha.derivative(*g, x, DerivMode::Fd { h: H }).unwrap();
            worst = worst.max(da.abs());
        }
        let re = ScalarFieldS3::real_part();
        let gap = re.derivative(*g, x, DerivMode::Analytic).unwrap()
            - re.derivative(*g, x, DerivMode::Fd { h: H }).unwrap();
        worst = worst.max(gap.abs());
    }
    assert!(worst <= 1e-7, "analytic vs FD gap {worst:e}");
    // ξ_a = g h a h⁻¹ with h = g⁻¹bg oscillates at frequency 4|x| along g·e^{tx},
    // so the central-difference truncation error reaches 64 h²/6 ≈ 1.07e-7
    let truncation = 64.0 * H * H / 6.0;
    assert!(worst_xi <= 1.05 * truncation, "ξ_a analytic vs FD gap {worst_xi:e}");
}

#[test]
fn random_test_maps_have_consistent_differentials() {
    // |p| may dip to 0.1, which inflates the third derivatives of p/|p| well
    // beyond those of the named families; compare against Richardson too
    let s = uniform_s3(34, 100);
    for seed in 0..5 {
        let psi = SpinorField::random_poly(seed, &s.points);
        let (mut worst_fd, mut worst_rich): (f64, f64) = (0.0, 0.0);
        for (n, g) in s.iter().enumerate() {
            let x = random_im(5000 + n as u64);
            let a = psi.differential(*g, x, DerivMode::Analytic).unwrap();
            let fd = psi.differential(*g, x, DerivMode::Fd { h: H }).unwrap();
            let rich = psi.differential(*g, x, DerivMode::Richardson { h: H }).unwrap();
            worst_fd = worst_fd.max((a - fd).norm());
            worst_rich = worst_rich.max((a - rich).norm());
            for e in ImQuat::BASIS {
                let xi = xi_field(&psi, e);
                let exact = xi.differential(*g, x, DerivMode::Analytic).unwrap();
                let rich = xi.differential(*g, x, DerivMode::Richardson { h: H }).unwrap();
                worst_rich = worst_rich.max((exact - rich).norm());
            }
        }
        assert!(worst_fd <= 1e-4, "seed {seed}: {worst_fd:e}");
        assert!(worst_rich <= 1e-7, "seed {seed}: {worst_rich:e}");
    }
}

#[test]
fn hopf_orbits_return_after_two_pi() {
    for seed in 0..6u64 {
        let a = random_im(seed).normalized().unwrap();
        let g0 = point_at(77, seed);
        for field in [VectorFieldS3::left_invariant(a), VectorFieldS3::right_invariant(a)] {
            let orbit = flow_orbit(&field, g0, 2.0 * PI, 2000).unwrap();
            let end = orbit.last().unwrap().1;
            assert!(end.distance(g0) <= 1e-8, "orbit misses start by {:e}", end.distance(g0));
        }
    }
}

#[test]
fn divergence_vanishes_along_a_family_three_orbit() {
    // for f = g⁻¹bg the vector part V is the right-invariant field b·g
    let psi = SpinorField::conj_b(ImQuat::new(0.0, 0.0, 1.0));
    let v = decompose_valpha(&psi).v;
    let g0 = exp_im(ImQuat::new(0.3, -0.2, 0.5));
    let orbit = flow_orbit(&v, g0, 2.0 * PI, 1000).unwrap();
    let frame: Vec<_> = ImQuat::BASIS.iter().map(|a| xi_field(&psi, *a)).collect();
    for (_, g) in orbit.iter().step_by(25) {
        assert!(divergence(&v, *g, DerivMode::Analytic).unwrap().abs() <= 1e-6);
        assert!(divergence(&v, *g, DerivMode::Fd { h: H }).unwrap().abs() <= 1e-6);
        for xi in &frame {
            assert!(divergence(xi, *g, DerivMode::Analytic).unwrap().abs() <= 1e-6);
        }
    }
    assert!(orbit.last().unwrap().1.distance(g0) <= 1e-8);
}
