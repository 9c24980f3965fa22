use std::f64::consts::PI;

use polyaforge::crt::{broutin_flajolet_c, crt_diameter_moment, crt_diameter_tail, integrated_tail};

fn moment(k: u32) -> f64 {
    crt_diameter_moment::<f64>(k).unwrap().value
}

#[test]
fn moments_match_broutin_flajolet_constants() {
    for r in 1..=10u32 {
        let expected = broutin_flajolet_c::<f64>(r).unwrap() * (2.0 * 2f64.sqrt()).powi(-(r as i32));
        assert!((moment(r) - expected).abs() <= 1e-12 * expected.max(1.0), "r = {r}");
    }
}

#[test]
fn closed_form_low_moments() {
    assert!((moment(1) - 4.0 / 3.0 * (PI / 2.0).sqrt()).abs() < 1e-12);
    assert!((moment(1) - 1.6710855).abs() < 1e-7);
    assert!((moment(2) - 2.0 / 3.0 * (1.0 + PI * PI / 3.0)).abs() < 1e-12);
    assert!((moment(3) - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-12);
}

#[test]
fn tail_integrals_give_moments() {
    assert!((integrated_tail(1, 1e-11) - moment(1)).abs() < 1e-8);
    for k in 1..=4 {
        let m = moment(k);
        assert!((integrated_tail(k, 1e-9) - m).abs() < 1e-6 * m, "k = {k}");
    }
    // the general formula for k >= 4 against quadrature
    for k in 5..=8 {
        let m = moment(k);
        assert!((integrated_tail(k, 1e-9) - m).abs() < 1e-6 * m, "k = {k}");
    }
}

#[test]
fn lyapunov_inequality() {
    for k in 2..=9 {
        assert!(moment(k).powi(2) <= moment(k - 1) * moment(k + 1), "k = {k}");
    }
}

#[test]
fn tail_on_grid() {
    let mut prev = 1.0;
    for i in 0..1000 {
        let x = i as f64 * 0.01;
        let v = crt_diameter_tail(x, 1e-13).unwrap().value;
        assert!((0.0..=1.0).contains(&v));
        assert!(v <= prev + 1e-13, "x = {x}");
        prev = v;
    }
}

#[test]
fn generic_scalar() {
    let t32 = crt_diameter_tail(2.0f32, 1e-6).unwrap().value;
    let t64 = crt_diameter_tail(2.0f64, 1e-12).unwrap().value;
    assert!((t32 as f64 - t64).abs() < 1e-5);
}
