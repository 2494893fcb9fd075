use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use aah_walk::circuit::{lower, preparation, trotter_circuit, Scheme};
use aah_walk::engine::{apply_circuit, expectations_z};
use aah_walk::exact::SectorPropagator;
use aah_walk::experiment::{preset, run, run_all, sweep, ExperimentConfig, SweepAxis, PRESET_NAMES};
use aah_walk::observables::{edge_probability, occupation_from_z, Source};
use aah_walk::pauli::hamiltonian;
use aah_walk::state::prepare_fock_state;
use aah_walk::{ModelParams, StateVector};

fn densities(psi: &StateVector) -> Vec<f64> {
    expectations_z(psi).into_iter().map(occupation_from_z).collect()
}

fn trotter_state(params: &ModelParams, occupied: &[usize], t: f64, steps: usize, scheme: Scheme) -> StateVector {
    let mut psi = StateVector::zero(params.sites).unwrap();
    apply_circuit(&mut psi, &preparation(params.sites, occupied).unwrap()).unwrap();
    apply_circuit(&mut psi, &lower(&trotter_circuit(params, t, steps, scheme).unwrap())).unwrap();
    psi
}

fn final_p0(config: &ExperimentConfig, source: Source) -> f64 {
    let r = run(config).unwrap();
    edge_probability(r.source(source).unwrap().profiles.last().unwrap())
}

#[test]
fn ten_step_circuit_tracks_edge_oracle() {
    let params = ModelParams::aah(10, 0.9, 0.0);
    let psi = trotter_state(&params, &[0], 5.0, 10, Scheme::Sequential);
    assert!((densities(&psi)[0] - 0.9891345788897823).abs() < 0.1);
}

#[test]
fn sequential_ordering_breaks_mirror_symmetry() {
    let params = ModelParams::aah(10, 0.0, 0.0);
    let biased = densities(&trotter_state(&params, &[4, 5], 3.0, 10, Scheme::Sequential));
    let asymmetry = (0..10).map(|i| (biased[i] - biased[9 - i]).abs()).fold(0.0, f64::max);
    assert!(asymmetry > 1e-3, "asymmetry {asymmetry}");

    let mut psi = prepare_fock_state(10, &[4, 5]).unwrap();
    let step = lower(&trotter_circuit(&params, 0.3, 1, Scheme::EvenOdd1).unwrap());
    for _ in 0..10 {
        apply_circuit(&mut psi, &step).unwrap();
        let n = densities(&psi);
        for i in 0..10 {
            assert!((n[i] - n[9 - i]).abs() < 1e-10);
        }
    }
}

#[test]
fn bulk_walk_is_mirror_symmetric_under_exact_evolution() {
    let params = ModelParams::aah(10, 0.0, 0.0);
    let prop = SectorPropagator::new(&hamiltonian(&params), 2).unwrap();
    let psi0 = prepare_fock_state(10, &[4, 5]).unwrap();
    for k in 0..=50 {
        let n = densities(&prop.evolve(&psi0, k as f64 * 0.1).unwrap());
        for i in 0..10 {
            assert!((n[i] - n[9 - i]).abs() < 1e-8);
        }
    }
}

#[test]
fn modulation_sweep_localizes_monotonically() {
    let base = &preset("fig4").unwrap()[0];
    let records = sweep(base, SweepAxis::Modulation, &[0.0, 0.5, 0.9], None).unwrap();
    let p0: Vec<f64> = records
        .iter()
        .map(|r| edge_probability(r.source(Source::Exact).unwrap().profiles.last().unwrap()))
        .collect();
    assert!(p0.windows(2).all(|w| w[1] >= w[0] - 0.02), "{p0:?}");
    assert!(p0[2] - p0[0] > 0.5);
}

#[test]
fn phase_sweep_steers_edges() {
    let mut base = ExperimentConfig::new(ModelParams::aah(5, 0.9, 0.0), vec![0], 5.0);
    base.steps = 50;
    let phases = [0.0, FRAC_PI_2, PI];
    let left = sweep(&base, SweepAxis::Phase, &phases, Some(2)).unwrap();
    base.initial_occupations = vec![4];
    let right = sweep(&base, SweepAxis::Phase, &phases, Some(2)).unwrap();
    let average = |r: &aah_walk::experiment::RunRecord, site: usize| {
        let p = &r.source(Source::Exact).unwrap().profiles;
        p.iter().map(|d| d.values[site]).sum::<f64>() / p.len() as f64
    };
    assert!(average(&left[0], 0) > 0.6);
    assert!(average(&left[1], 0) < 0.3);
    assert!(average(&right[1], 4) < 0.3);
    assert!(average(&right[2], 4) > 0.6);
}

#[test]
fn preset_scenarios_show_their_phenomena() {
    let fig3: Vec<f64> = preset("fig3")
        .unwrap()
        .iter()
        .map(|c| final_p0(c, Source::Exact))
        .collect();
    assert!(fig3.windows(2).all(|w| w[1] > w[0]), "{fig3:?}");

    let fig9 = run_all(&preset("fig9").unwrap(), None).unwrap();
    let strong = fig9[2].source(Source::Exact).unwrap();
    assert_eq!(fig9[2].config.model.interaction, 2.0);
    assert!(strong.profiles.iter().all(|p| p.values[0] > 0.8 && p.values[1] < 0.2));
}

#[test]
fn mitigated_profiles_follow_the_circuit() {
    let config = &preset("fig3").unwrap()[2];
    let r = run(config).unwrap();
    let circuit = &r.source(Source::TrotterExact).unwrap().profiles;
    let raw = &r.source(Source::TrotterSampled).unwrap().profiles;
    let fixed = &r.source(Source::TrotterSampledMitigated).unwrap().profiles;
    let error = |p: &[aah_walk::observables::DensityProfile]| {
        p.iter()
            .zip(circuit)
            .flat_map(|(a, b)| a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()))
            .sum::<f64>()
    };
    assert!(error(fixed) < error(raw));
}

#[test]
fn all_presets_finish_quickly() {
    let start = Instant::now();
    for name in PRESET_NAMES {
        let records = run_all(&preset(name).unwrap(), None).unwrap();
        assert!(records.iter().all(|r| r.config.model.sites <= 10));
    }
    assert!(start.elapsed().as_secs_f64() < 60.0);
}
