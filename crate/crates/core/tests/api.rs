use kronig_core::units::ev_to_model;
use kronig_core::{
    band_solve, band_structure, phi_kernel, resistivity_n, transmission_limit, transmission_n,
    BlochCondition, ModelParams,
};

fn lattice(n: u64) -> ModelParams {
    ModelParams::new(ev_to_model(0.5), 0.1, 500.0, n).unwrap()
}

#[test]
fn many_cells_approach_the_uniform_barrier() {
    let p = lattice(20_000);
    let e = 0.5 * p.e_o();
    let s = transmission_n(e, &p).unwrap();
    let lim = transmission_limit(e, p.gamma, p.v, p.l).unwrap();
    assert!((s.log10_s - lim.log10_s).abs() < 1e-2 * lim.log10_s.abs());
    for factor in [3.0, 10.0] {
        let e = factor * p.e_o();
        let s = transmission_n(e, &p).unwrap().s;
        let lim = transmission_limit(e, p.gamma, p.v, p.l).unwrap().s;
        assert!((s - lim).abs() < 1e-3, "{factor}: {s} vs {lim}");
    }
}

#[test]
fn resistivity_tracks_transmission() {
    let p = lattice(80);
    for i in 1..200 {
        let e = 0.15 * i as f64;
        let s = transmission_n(e, &p).unwrap();
        let r = resistivity_n(e, &p).unwrap();
        if s.s > 1e-6 {
            let want = (1.0 - s.s) / s.s;
            assert!((r.rho - want).abs() <= 1e-9 * want.max(1e-6));
        }
    }
}

#[test]
fn bands_sit_between_gaps_and_invert_phi() {
    let p = lattice(60);
    let bs = band_structure(&p, 20.0, Some(4), 9).unwrap();
    assert!(bs.bands.len() >= 4);
    for w in bs.bands.windows(2) {
        assert!(w[0].e_hi <= w[1].e_lo);
    }
    let zone = std::f64::consts::PI / bs.period;
    for b in 1..=4 {
        let xi = 0.37 * zone;
        let e = band_solve(&p, &bs, b, xi).unwrap();
        let band = bs.band(b).unwrap();
        assert!(e >= band.e_lo && e <= band.e_hi);
        let phi = phi_kernel(e, &p).unwrap().phi;
        assert!((phi.abs() - (xi * bs.period).cos().abs()).abs() < 1e-8);
        assert!((p.half_trace(e).unwrap() - phi).abs() < 1e-15 * phi.abs().max(1.0));
    }
}
