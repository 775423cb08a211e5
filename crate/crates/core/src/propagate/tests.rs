use super::*;
use crate::grid::{build_grid, GridScheme};
use crate::linkspec::{build_spectrum, LinkKind};
use crate::perturbres::PotentialShape;

fn grid_n(dim: u32, n_nodes: usize, r_max: f64) -> Arc<RadialGrid> {
    build_grid(dim, r_max, n_nodes, GridScheme::Geometric { panel_order: 16 }).unwrap()
}

fn gaussian_data(grid: &Arc<RadialGrid>) -> ModeFunction {
    ModeFunction::from_real_fn(grid, |r| (-((r - 4.0) / 1.3).powi(2)).exp())
}

#[test]
fn cutoff_shape_and_partition() {
    let chi = CutoffSpec::default();
    assert_eq!(chi.chi(0.0), 1.0);
    assert_eq!(chi.chi(0.5), 1.0);
    assert_eq!(chi.chi(-0.3), 1.0);
    assert_eq!(chi.chi(1.0), 0.0);
    assert_eq!(chi.chi(-2.0), 0.0);
    let mut x = -1.3;
    while x < 1.3 {
        let v = chi.chi(x);
        assert!((0.0..=1.0).contains(&v));
        assert!((chi.chi(x) + (1.0 - chi.chi(x)) - 1.0).abs() < 1e-16);
        // evenness
        assert!((chi.chi(-x) - v).abs() < 1e-15);
        x += 0.037;
    }
    // monotone decay on the transition band
    assert!(chi.chi(0.6) > chi.chi(0.8) && chi.chi(0.8) > chi.chi(0.95));
}

#[test]
fn cutoff_jet_matches_finite_differences() {
    let chi = CutoffSpec::default();
    for &x0 in &[0.62, 0.8, 0.93, -0.7] {
        let jet = chi.chi_jet(x0, 3);
        let h = 1e-5;
        let d1 = (chi.chi(x0 + h) - chi.chi(x0 - h)) / (2.0 * h);
        let d2 = (chi.chi(x0 + h) - 2.0 * chi.chi(x0) + chi.chi(x0 - h)) / (h * h);
        assert!((jet.value() - chi.chi(x0)).abs() < 1e-15);
        assert!((jet.derivative(1) - d1).abs() < 1e-6 * d1.abs().max(1.0), "x0={x0}");
        assert!((jet.derivative(2) - d2).abs() < 1e-4 * d2.abs().max(1.0), "x0={x0}");
    }
    // flat regions are flat to all orders
    let flat = chi.chi_jet(0.2, 4);
    for k in 1..=4 {
        assert_eq!(flat.derivative(k), 0.0);
    }
}

#[test]
fn weber_kernel_magnitude_and_half_integer_form() {
    // |K| = (1/(2t)) (r1 r2)^{-(n-2)/2} |J_nu(r1 r2 / 2t)|
    let (t, r1, r2) = (0.7, 1.3, 2.9);
    for (dim, nu) in [(3u32, 0.5f64), (3, 1.5), (2, 0.0), (4, 2.0)] {
        let k = weber_mode_kernel(dim, nu, t, r1, r2).unwrap();
        let x = r1 * r2 / (2.0 * t);
        let j = bessel(BesselKind::J, nu, x).unwrap().re;
        let want = (0.5 / t) * (r1 * r2).powf(-0.5 * (dim as f64 - 2.0)) * j.abs();
        assert!((k.norm() - want).abs() <= 1e-12 * want, "dim={dim} nu={nu}");
    }
    // n = 3, nu = 1/2 closed form: |K| = |sin(r1 r2/(2t))| / (sqrt(pi t) r1 r2)
    let k = weber_mode_kernel(3, 0.5, t, r1, r2).unwrap();
    let want = (r1 * r2 / (2.0 * t)).sin().abs() / ((std::f64::consts::PI * t).sqrt() * r1 * r2);
    assert!((k.norm() - want).abs() <= 1e-12 * want);
}

#[test]
fn weber_heat_consistency() {
    // the same closed form at imaginary time matches direct non-oscillatory
    // quadrature of the spectral integral: for s > 0,
    // int_0^inf e^{-s l^2} J_nu(l r1) J_nu(l r2) l dl = (1/2s) e^{-(r1^2+r2^2)/4s} I_nu(r1 r2/2s)
    let (s, r1, r2, nu) = (0.8f64, 1.1f64, 1.9f64, 1.5f64);
    let closed = (0.5 / s)
        * (-(r1 * r1 + r2 * r2) / (4.0 * s)).exp()
        * bessel(BesselKind::I, nu, r1 * r2 / (2.0 * s)).unwrap().re;
    let (gx, gw) = gauss_legendre(32);
    let mut quad = 0.0;
    let panels = 60;
    let lmax = 12.0;
    for p in 0..panels {
        let a = lmax * p as f64 / panels as f64;
        let b = lmax * (p + 1) as f64 / panels as f64;
        let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
        for (x, w) in gx.iter().zip(&gw) {
            let l = mid + half * x;
            if l <= 0.0 {
                continue;
            }
            quad += w
                * half
                * (-s * l * l).exp()
                * bessel(BesselKind::J, nu, l * r1).unwrap().re
                * bessel(BesselKind::J, nu, l * r2).unwrap().re
                * l;
        }
    }
    assert!((quad - closed).abs() <= 1e-8 * closed.abs(), "{quad} vs {closed}");
}

#[test]
fn free_propagation_matches_weber_oracle() {
    let g = grid_n(3, 128, 20.0);
    let nu = 1.5;
    let t = 1.0;
    let f = gaussian_data(&g);
    let req = PropagatorRequest {
        t,
        nu,
        potential: None,
        alpha: 0.0,
        tolerance: 1e-6,
        cutoff: CutoffSpec::default(),
    };
    let by_quad = mode_propagate(&g, &req, &f).unwrap();
    let by_weber = weber_apply(&g, 3, nu, t, &f).unwrap();
    let scale = by_weber.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let defect = by_quad
        .values
        .iter()
        .zip(&by_weber.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(defect <= 1e-6 * scale, "defect {:.3e} scale {:.3e}", defect, scale);
}

#[test]
fn quadrature_defect_contracts_with_tolerance()
{
    let g = grid_n(3, 96, 18.0);
    let nu = 0.5;
    let t = 0.8;
    let f = gaussian_data(&g);
    let oracle = weber_apply(&g, 3, nu, t, &f).unwrap();
    let scale = oracle.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let defect_at = |tol: f64| {
        let req = PropagatorRequest {
            t,
            nu,
            potential: None,
            alpha: 0.0,
            tolerance: tol,
            cutoff: CutoffSpec::default(),
        };
        let u = mode_propagate(&g, &req, &f).unwrap();
        u.values
            .iter()
            .zip(&oracle.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale
    };
    let d1 = defect_at(2e-3);
    let d2 = defect_at(1e-3);
    assert!(d2 > 0.0, "defect vanished, cannot measure order");
    assert!(d1 / d2 >= 4.0, "contraction {:.2} (defects {d1:.3e} -> {d2:.3e})", d1 / d2);
}

#[test]
fn short_time_continuity_and_unitarity() {
    let g = grid_n(3, 128, 25.0);
    let nu = 0.5;
    let f = gaussian_data(&g);
    // small t: u close to f
    let u = weber_apply(&g, 3, nu, 0.01, &f).unwrap();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..g.len() {
        num += g.weights()[i] * (u.values[i] - f.values[i]).norm_sqr();
        den += g.weights()[i] * f.values[i].norm_sqr();
    }
    assert!((num / den).sqrt() < 0.05, "short-time drift {}", (num / den).sqrt());
    // L2 norm preserved on continuous-spectrum data (truncation-limited)
    let u1 = weber_apply(&g, 3, nu, 1.0, &f).unwrap();
    let ratio = u1.norm_l2() / f.norm_l2();
    assert!((ratio - 1.0).abs() < 1e-4, "unitarity defect {}", (ratio - 1.0).abs());
}

#[test]
fn phase_symmetry_under_time_reversal() {
    let g = grid_n(3, 96, 18.0);
    let f = gaussian_data(&g);
    let req = |t: f64| PropagatorRequest {
        t,
        nu: 0.5,
        potential: None,
        alpha: 0.0,
        tolerance: 1e-5,
        cutoff: CutoffSpec::default(),
    };
    let up = mode_propagate(&g, &req(0.9), &f).unwrap();
    let um = mode_propagate(&g, &req(-0.9), &f).unwrap();
    let scale = up.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for i in 0..g.len() {
        assert!((um.values[i] - up.values[i].conj()).norm() <= 1e-10 * scale);
    }
}

#[test]
fn s_operator_small_x_limits() {
    // circle of circumference 2 pi: limit 1/(2 pi)
    let circ = build_spectrum(
        LinkKind::Circle { circumference: 2.0 * std::f64::consts::PI },
        2,
        24,
    )
    .unwrap();
    let p = LinkPoint::Angle(0.7);
    let (s, tail) = s_operator_entry(1e-3, &circ, p, p).unwrap();
    let want = s_operator_limit(&circ);
    assert!((want.re - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    assert!((s - want).norm() <= 1e-3 * want.norm(), "{s} vs {want}");
    assert!(tail < 1e-10);

    // unit two-sphere
    let sph = build_spectrum(LinkKind::UnitSphere { dim: 2 }, 3, 24).unwrap();
    let q = LinkPoint::Sphere { polar: 1.1, azimuth: 0.3 };
    let (s, _) = s_operator_entry(1e-3, &sph, q, q).unwrap();
    let want = s_operator_limit(&sph);
    assert!((s - want).norm() <= 1e-3 * want.norm(), "{s} vs {want}");
}

#[test]
fn s_operator_error_exponent() {
    // |S(x) - S(0)| ~ x^alpha with alpha = min(2, nu_1 - (n-2)/2)
    let circ = build_spectrum(
        LinkKind::Circle { circumference: 2.0 * std::f64::consts::PI },
        2,
        40,
    )
    .unwrap();
    let p = LinkPoint::Angle(0.0);
    let s0 = s_operator_limit(&circ);
    let xs: Vec<f64> = (0..12).map(|i| 1e-3 * 1.6f64.powi(i)).collect();
    let errs: Vec<f64> =
        xs.iter().map(|&x| (s_operator_entry(x, &circ, p, p).unwrap().0 - s0).norm()).collect();
    let fit = crate::numerics::fit::fit_power_law(&xs, &errs);
    // nu_1 = 1, (n-2)/2 = 0 for the flat circle: alpha = 1
    assert!((fit.slope - 1.0).abs() < 0.2, "slope {}", fit.slope);
}

#[test]
fn s_operator_norm_uniformly_bounded() {
    // L2(X) -> L2(X) norm of the truncated S(x) stays bounded over a wide
    // range of x; on the diagonal basis the norm is max_j x^{-(n-2)/2} |J_{nu_j}(x)|
    let sph = build_spectrum(LinkKind::UnitSphere { dim: 2 }, 3, 30).unwrap();
    let n = sph.dim() as f64;
    let mut worst: f64 = 0.0;
    let mut x = 1e-3;
    while x <= 1e3 {
        let mut opnorm: f64 = 0.0;
        for level in 0..sph.levels().len() {
            let nu = sph.nu_of_level(level);
            let j = crate::specfun::scaled_bessel(
                crate::specfun::ScaledBesselRequest { nu, x, power_shift: -0.5 * (n - 2.0) },
                BesselKind::J,
            )
            .unwrap()
            .re;
            opnorm = opnorm.max(j.abs());
        }
        worst = worst.max(opnorm);
        x *= 2.0;
    }
    assert!(worst < 2.0, "S operator norm grew to {worst}");
}

#[test]
fn full_cone_single_mode_is_theta_independent() {
    let g = grid_n(3, 64, 15.0);
    let sph = build_spectrum(LinkKind::UnitSphere { dim: 2 }, 3, 4).unwrap();
    let f = gaussian_data(&g);
    let points = [
        LinkPoint::Sphere { polar: 0.3, azimuth: 0.1 },
        LinkPoint::Sphere { polar: 1.2, azimuth: 2.0 },
        LinkPoint::Sphere { polar: 2.4, azimuth: 4.4 },
    ];
    let field = full_cone_propagate(&g, &sph, 0.7, &[f], &points, None, 1e-6).unwrap();
    for a in (0..g.len()).step_by(11) {
        let v0 = field[(a, 0)];
        for p in 1..points.len() {
            assert!((field[(a, p)] - v0).norm() <= 1e-13 * v0.norm().max(1e-300));
        }
    }
}

#[test]
fn full_cone_l2_conservation() {
    // || field ||_{L2(cone)}^2 = sum_j || u_j ||^2 by orthonormality; check
    // the assembled field against the mode functions through the link
    // quadrature
    let g = grid_n(2, 96, 20.0);
    let circ = build_spectrum(
        LinkKind::Circle { circumference: 2.0 * std::f64::consts::PI },
        2,
        3,
    )
    .unwrap();
    let f0 = ModeFunction::from_real_fn(&g, |r| (-((r - 4.0) / 1.2).powi(2)).exp());
    let f1 = ModeFunction::from_real_fn(&g, |r| 0.4 * (-((r - 6.0) / 1.5).powi(2)).exp());
    let quad = crate::linkspec::link_quadrature(&circ, circ.levels().len()).unwrap();
    let t = 0.9;
    let field =
        full_cone_propagate(&g, &circ, t, &[f0.clone(), f1.clone()], &quad.points, None, 1e-6)
            .unwrap();
    let mut field_norm2 = 0.0;
    for (p, wp) in quad.weights.iter().enumerate() {
        for a in 0..g.len() {
            field_norm2 += g.weights()[a] * wp * field[(a, p)].norm_sqr();
        }
    }
    let data_norm2: f64 =
        f0.norm_l2().powi(2) + f1.norm_l2().powi(2);
    assert!(
        (field_norm2 / data_norm2 - 1.0).abs() < 1e-4,
        "conservation defect {}",
        field_norm2 / data_norm2 - 1.0
    );
}
