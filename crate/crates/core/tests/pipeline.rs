use btps_core::pseudomode::{localize, optimal_pseudomode, residual_decay, residual_decay_with, torus_packet_at};
use btps_core::spectral::{eigenvalues, pseudospectrum_grid, sigma_min, szego_trace, Window};
use btps_core::{BTMatrix, Family, FitModel, MatrixFamily, Mode, Poly, SphereSymbol, Symbol, SymbolJson, TorusSymbol, Verdict};
use num_complex::Complex64;

fn twisted() -> TorusSymbol {
    TorusSymbol::from_terms([((1, 0), Complex64::new(1.0, 0.0)), ((0, -1), Complex64::new(0.5, 0.0))])
}

#[test]
fn json_symbol_builds_the_same_matrices() {
    let f = Symbol::Torus(twisted());
    let text = serde_json::to_string(&f.to_json()).unwrap();
    let g = SymbolJson::parse(&text).unwrap();
    let a = Family::for_symbol(&f, Mode::Exact).build(24).unwrap();
    let b = Family::for_symbol(&g, Mode::Exact).build(24).unwrap();
    assert_eq!(a.entries(), b.entries());
    assert_eq!(a.provenance(), b.provenance());
}

#[test]
fn grid_nodes_agree_with_pointwise_sigma_min() {
    let t = Family::Torus { symbol: twisted(), mode: Mode::Exact }.build(20).unwrap();
    let g = pseudospectrum_grid(&t, Window::new(-1.5, 1.5, -1.0, 1.0).unwrap(), 7, 5).unwrap();
    for (z, s) in g.nodes() {
        assert!((sigma_min(&t, z).unwrap() - s).abs() < 1e-12);
    }
}

#[test]
fn optimal_mode_attains_sigma_min_and_sits_on_the_level_set() {
    let f = twisted();
    let lam = f.eval(0.3, 0.45);
    let t = Family::Torus { symbol: f.clone(), mode: Mode::Exact }.build(64).unwrap();
    let p = optimal_pseudomode(&t, lam).unwrap();
    let s = sigma_min(&t, lam).unwrap();
    assert!((p.residual - s).abs() <= 1e-10 * s.max(1.0));
    let loc = localize(&p, &Symbol::Torus(f)).unwrap();
    assert!(loc.mass_on_level_set > 0.8, "{}", loc.mass_on_level_set);
}

#[test]
fn packets_beat_every_power_only_on_the_good_side() {
    let f = twisted();
    let fam = Family::Torus { symbol: f.clone(), mode: Mode::Exact };
    let levels = [32, 64, 128, 256];
    let decay = |x: f64, y: f64| {
        let lam = f.eval(x, y);
        let modes = move |t: &BTMatrix| torus_packet_at(x, y, t.n(), 1.0);
        residual_decay_with(&fam, &modes, lam, &levels, FitModel::Loglog).unwrap()
    };
    let good = decay(0.3, 0.45);
    let bad = decay(0.1, 0.15);
    assert!(good.slope < bad.slope);
    assert!(bad.values.iter().all(|&r| r > 1e-2), "{:?}", bad.values);
}

#[test]
fn self_adjoint_sphere_family_has_real_spectrum_inside_the_image() {
    let fam = Family::Sphere { symbol: SphereSymbol::coordinate(2) };
    for n in [3, 10, 25] {
        let ev = eigenvalues(&fam.build(n).unwrap()).unwrap();
        assert_eq!(ev.len(), n + 1);
        assert!(ev.iter().all(|z| z.im.abs() < 1e-10 && z.re.abs() <= 1.0 + 1e-12));
    }
}

#[test]
fn trace_converges_to_phase_space_average() {
    let f = Symbol::Torus(twisted());
    let fam = Family::for_symbol(&f, Mode::Exact);
    let rep = szego_trace(&fam, &Poly::from_real(&[0.0, 1.0, 0.0, 1.0]), &f, &[8, 16, 32, 64]).unwrap();
    assert!(rep.values.iter().all(|r| r.is_finite()));
    assert!(*rep.values.last().unwrap() < 1e-6 || rep.slope < -0.9, "{rep:?}");
}

#[test]
fn optimal_modes_decay_on_the_sphere_boundary() {
    let fam = Family::SphereLinear { t: 1.0 };
    let lam = Complex64::new(1f64.cosh(), 0.0);
    let modes = move |t: &BTMatrix| Ok(optimal_pseudomode(t, lam)?.coeffs);
    let rep = residual_decay(&fam, &modes, lam, &[16, 32, 64, 128]).unwrap();
    assert!(rep.slope < 0.0);
    assert_ne!(rep.verdict, Some(Verdict::Pass));
}
