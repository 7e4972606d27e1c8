use vslab::estimates::{average_cs_check, convergence_study, energy_identity_residual, TimeRule};
use vslab::flows::{random_divfree_vorticity, taylor_green_vorticity};
use vslab::reference::{run_reference, StepperConfig};
use vslab::slab::{picard_solve_slab, PicardConfig, Slab, VelocityProvider};
use vslab::spectral::Grid;

#[test]
fn energy_residual_vanishes_at_second_order() {
    let g = Grid::new(8).unwrap();
    let w0 = taylor_green_vorticity(g);
    let mut steps = Vec::new();
    let mut residuals = Vec::new();
    for dt in [1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0] {
        let run = run_reference(&w0, 0.5, &StepperConfig::new(dt, 1.0), &[], 1).unwrap();
        steps.push(dt);
        residuals.push(energy_identity_residual(&run.trajectory.series, 1.0, TimeRule::Trapezoid).unwrap());
    }
    let r = convergence_study(&steps, &residuals).unwrap();
    assert!(r.monotone, "{:?}", r.errors);
    assert!(r.rate >= 1.9, "{}", r.rate);
}

#[test]
fn slab_average_never_beats_cauchy_schwarz() {
    let g = Grid::new(8).unwrap();
    let cfg = PicardConfig::new(0.5);
    for seed in 0..8 {
        let w0 = random_divfree_vorticity(g, seed);
        let slab = Slab { index: 1, start: 0.0, end: 0.05 };
        let sol = picard_solve_slab(&w0, &VelocityProvider::SelfConsistent, slab, &cfg).unwrap();
        assert!(average_cs_check(&sol) >= -1e-12);
    }
}
