use std::f64::consts::PI;

use num_complex::Complex64;
use sino::model::constructed::burgers_params;
use sino::model::*;
use sino::solvers::{burgers_rhs, integrate, PdeSpec, SolverConfig};
use sino::spectral::{
    fft, filter_real, forward_transform, grf_vector, lowpass_mask, spectral_resample, FreqGrid, GrfParams, GridSpec,
    RealField, SpectralField,
};

fn bandlimited(grid: &GridSpec, channels: usize, seed: u64, cutoff: i64) -> RealField {
    let mut u = grf_vector(grid, seed, &GrfParams::smooth_state(grid.dim()), channels).unwrap();
    let freq = FreqGrid::new(grid);
    filter_real(&freq, u.data_mut(), channels, &lowpass_mask(&freq, cutoff));
    u
}

fn burgers_setup(n: usize, hidden: Vec<usize>) -> (GridSpec, ModelConfig, SinoParams) {
    let grid = GridSpec::cube(2, n, 2.0 * PI).unwrap();
    let mut cfg = ModelConfig::new(2, &grid, 1e-3);
    cfg.k = 4;
    cfg.width = 8;
    cfg.mlp_hidden = hidden;
    let p = burgers_params(&cfg, &grid, 0.01).unwrap();
    (grid, cfg, p)
}

fn random_cfg(grid: &GridSpec, c_in: usize) -> ModelConfig {
    let mut cfg = ModelConfig::new(c_in, grid, 0.01);
    cfg.k = 4;
    cfg.width = 8;
    cfg.mlp_hidden = vec![16, 16];
    cfg
}

#[test]
fn zero_parameters_give_zero_rhs_and_identity_step() {
    let grid = GridSpec::cube(2, 16, 1.0).unwrap();
    let cfg = random_cfg(&grid, 1);
    let p = init_params(&cfg, 3).unwrap().zeros_like();
    let u = bandlimited(&grid, 1, 1, 5);
    assert_eq!(rhs_eval(&u, &p, &cfg).unwrap().max_abs(), 0.0);
    assert_eq!(model_step(&u, &p, &cfg).unwrap(), u);
    for (_, f) in dump_features(&u, &p, &cfg).unwrap() {
        assert_eq!(f.max_abs(), 0.0);
    }
}

#[test]
fn constructed_parameters_reproduce_burgers_rhs() {
    for hidden in [vec![8], vec![64, 64]] {
        let (grid, cfg, p) = burgers_setup(32, hidden);
        let spec = PdeSpec::burgers(2, 0.01);
        for seed in 0..3 {
            let u = bandlimited(&grid, 2, seed, 10);
            let truth = burgers_rhs(&u, &spec).unwrap();
            let got = rhs_eval(&u, &p, &cfg).unwrap();
            let err = got.max_abs_diff(&truth);
            assert!(err < 1e-10, "max error {err:e}");
        }
    }
}

#[test]
fn constructed_model_tracks_reference_solver() {
    let (grid, cfg, p) = burgers_setup(32, vec![64, 64]);
    let u0 = bandlimited(&grid, 2, 9, 8);
    let spec = PdeSpec::burgers(2, 0.01);
    let reference = integrate(&spec, &SolverConfig::new(1e-3, 0.1, 1e-3), &u0).unwrap();
    let model = rollout(&u0, &p, &cfg, 100, 1).unwrap();
    for s in [10, 100] {
        let err = model[s].max_abs_diff(&reference[s]) / reference[s].max_abs();
        assert!(err < if s == 10 { 1e-8 } else { 1e-6 }, "step {s}: {err:e}");
    }
}

#[test]
fn rk4_beats_euler_on_the_constructed_model() {
    let (grid, cfg, p) = burgers_setup(32, vec![8]);
    let u0 = bandlimited(&grid, 2, 4, 6);
    let dt = 1e-2;
    let mut cfg = cfg;
    cfg.dt_model = dt;
    let spec = PdeSpec::burgers(2, 0.01);
    let truth = integrate(&spec, &SolverConfig::new(1e-4, 0.1, 0.1), &u0).unwrap()[1].clone();
    let rk4 = rollout(&u0, &p, &cfg, 10, 10).unwrap()[1].clone();
    let mut euler_cfg = cfg.clone();
    euler_cfg.ablation.euler_time = true;
    let euler = rollout(&u0, &p, &euler_cfg, 10, 10).unwrap()[1].clone();
    let e_rk4 = rk4.max_abs_diff(&truth);
    let e_euler = euler.max_abs_diff(&truth);
    assert!(e_euler > 10.0 * e_rk4, "euler {e_euler:e} rk4 {e_rk4:e}");
}

#[test]
fn constructed_features_contain_the_derivative() {
    let (grid, cfg, p) = burgers_setup(16, vec![8]);
    let u =
        RealField::from_fn(&grid, 2, |c, x| if c == 0 { x[0].sin() + 0.5 * x[1].cos() } else { (2.0 * x[0]).cos() });
    let slb = &dump_features(&u, &p, &cfg).unwrap()["slb"];
    let dx = RealField::from_fn(&grid, 1, |_, x| x[0].cos());
    let err = slb.channel(1).iter().zip(dx.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10);
}

#[test]
fn feature_dump_counts_channels() {
    let grid = GridSpec::cube(2, 8, 1.0).unwrap();
    let cfg = random_cfg(&grid, 2);
    let p = init_params(&cfg, 1).unwrap();
    let u = bandlimited(&grid, 2, 0, 3);
    let total: usize = dump_features(&u, &p, &cfg).unwrap().values().map(|f| f.channels()).sum();
    assert_eq!(total, cfg.c_in * cfg.k + 2 * cfg.width);
}

#[test]
fn rhs_is_shift_equivariant() {
    let grid = GridSpec::cube(2, 16, 2.0).unwrap();
    let cfg = random_cfg(&grid, 2);
    let p = init_params(&cfg, 5).unwrap();
    let u = grf_vector(&grid, 3, &GrfParams::smooth_state(2), 2).unwrap();
    let r = rhs_eval(&u, &p, &cfg).unwrap();
    for (axis, by) in [(0, 3), (1, 7)] {
        let shifted = rhs_eval(&u.cyclic_shift(axis, by), &p, &cfg).unwrap();
        assert!(shifted.max_abs_diff(&r.cyclic_shift(axis, by)) < 1e-10);
        let stepped = model_step(&u.cyclic_shift(axis, by), &p, &cfg).unwrap();
        let reference = model_step(&u, &p, &cfg).unwrap().cyclic_shift(axis, by);
        assert!(stepped.max_abs_diff(&reference) < 1e-10);
    }
}

#[test]
fn learned_multipliers_map_real_fields_to_real_fields() {
    let grid = GridSpec::cube(2, 16, 1.0).unwrap();
    let freq = FreqGrid::new(&grid);
    let cfg = random_cfg(&grid, 1);
    let p = init_params(&cfg, 11).unwrap();
    let table = freq2vec_eval(&p.spectral, &cfg, &freq).unwrap();
    let u = grf_vector(&grid, 2, &GrfParams::smooth_state(2), 1).unwrap();
    let uh = forward_transform(&u);
    for j in 0..cfg.k {
        let mut c: Vec<Complex64> = uh.channel(0).iter().zip(table.row(j)).map(|(a, b)| a * b).collect();
        fft::inverse_inplace(grid.points(), &mut c);
        let im = c.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        assert!(im < 1e-10, "imaginary residue {im:e}");
    }
    let d = slb_apply(&u, &table).unwrap();
    assert_eq!(d.channels(), cfg.k);
}

#[test]
fn unit_table_repeats_the_input() {
    let grid = GridSpec::cube(2, 8, 1.0).unwrap();
    let freq = FreqGrid::new(&grid);
    let raw = vec![Complex64::new(1.0, 0.0); 3 * freq.len()];
    let table = MultiplierTable::from_raw(&freq, 3, raw);
    let u = bandlimited(&grid, 2, 1, 3);
    let d = slb_apply(&u, &table).unwrap();
    for c in 0..2 {
        for j in 0..3 {
            let err = d.channel(c * 3 + j).iter().zip(u.channel(c)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-14);
        }
    }
}

#[test]
fn derivative_row_turns_sine_into_cosine() {
    let grid = GridSpec::cube(2, 16, 2.0 * PI).unwrap();
    let freq = FreqGrid::new(&grid);
    let raw = (0..freq.len()).map(|m| Complex64::new(0.0, freq.wavenumber(m)[0])).collect();
    let table = MultiplierTable::from_raw(&freq, 1, raw);
    let u = RealField::from_fn(&grid, 1, |_, x| x[0].sin());
    let d = slb_apply(&u, &table).unwrap();
    let cos = RealField::from_fn(&grid, 1, |_, x| x[0].cos());
    assert!(d.max_abs_diff(&cos) < 1e-12);
}

#[test]
fn product_block_builds_convection_and_reduces_to_affine() {
    let grid = GridSpec::cube(2, 16, 2.0 * PI).unwrap();
    let mut cfg = random_cfg(&grid, 1);
    cfg.k = 2;
    cfg.width = 1;
    let mut p = init_params(&cfg, 0).unwrap();
    // d = (u, ∂x u)
    let d = RealField::from_fn(&grid, 2, |c, x| if c == 0 { x[0].sin() } else { x[0].cos() });
    p.pi[0] = Dense { n_in: 2, n_out: 1, weight: vec![1.0, 0.0], bias: vec![0.0] };
    p.pi[1] = Dense { n_in: 2, n_out: 1, weight: vec![0.0, 1.0], bias: vec![0.0] };
    let v = pi_block(&d, &p, &cfg).unwrap();
    let expect = RealField::from_fn(&grid, 1, |_, x| x[0].sin() * x[0].cos());
    assert!(v.max_abs_diff(&expect) < 1e-12);

    p.pi[0] = Dense { n_in: 2, n_out: 1, weight: vec![0.5, -2.0], bias: vec![0.25] };
    p.pi[1] = Dense { n_in: 2, n_out: 1, weight: vec![0.0, 0.0], bias: vec![1.0] };
    let v = pi_block(&d, &p, &cfg).unwrap();
    let expect = RealField::from_fn(&grid, 1, |_, x| 0.5 * x[0].sin() - 2.0 * x[0].cos() + 0.25);
    assert!(v.max_abs_diff(&expect) < 1e-12);
}

#[test]
fn filtered_product_has_no_energy_above_the_cutoff() {
    let grid = GridSpec::cube(2, 24, 1.0).unwrap();
    let freq = FreqGrid::new(&grid);
    let mut cfg = random_cfg(&grid, 1);
    cfg.k = 2;
    cfg.width = 3;
    let p = init_params(&cfg, 2).unwrap();
    let d = bandlimited(&grid, 2, 4, 11);
    let v = pi_block(&d, &p, &cfg).unwrap();
    let cutoff = grid.dealias_cutoff();
    let vh: SpectralField = forward_transform(&v);
    for c in 0..3 {
        for (m, z) in vh.channel(c).iter().enumerate() {
            if freq.index_inf_norm(m) > cutoff {
                assert!(z.norm() < 1e-10, "energy at mode {m}");
            }
        }
    }
}

#[test]
fn operator_transfers_across_resolutions() {
    let coarse = GridSpec::cube(2, 32, 2.0 * PI).unwrap();
    let fine = coarse.with_points(vec![64, 64]).unwrap();
    let cfg = random_cfg(&coarse, 2);
    let p = init_params(&cfg, 8).unwrap();
    // products of two cutoff-5 fields stay below the coarse 2/3 cutoff
    let u = bandlimited(&coarse, 2, 6, 5);
    let coarse_rhs = rhs_eval(&u, &p, &cfg).unwrap();
    let fine_rhs = rhs_eval(&spectral_resample(&u, &fine).unwrap(), &p, &cfg).unwrap();
    let up = spectral_resample(&coarse_rhs, &fine).unwrap();
    let err = fine_rhs.max_abs_diff(&up) / up.max_abs();
    assert!(err < 1e-8, "relative gap {err:e}");
}

#[test]
fn without_products_the_rhs_is_affine() {
    let grid = GridSpec::cube(2, 16, 1.0).unwrap();
    let mut cfg = random_cfg(&grid, 2);
    cfg.ablation.no_pi = true;
    let p = init_params(&cfg, 4).unwrap();
    let a = bandlimited(&grid, 2, 1, 7);
    let b = bandlimited(&grid, 2, 2, 7);
    let zero = RealField::zeros(&grid, 2);
    let mut ab = a.clone();
    ab.axpy(1.0, &b);
    let mut expect = rhs_eval(&a, &p, &cfg).unwrap();
    expect.axpy(1.0, &rhs_eval(&b, &p, &cfg).unwrap());
    expect.axpy(-1.0, &rhs_eval(&zero, &p, &cfg).unwrap());
    assert!(rhs_eval(&ab, &p, &cfg).unwrap().max_abs_diff(&expect) < 1e-10);
}

#[test]
fn filter_ablation_changes_only_the_mask() {
    let grid = GridSpec::cube(2, 16, 1.0).unwrap();
    let cfg = random_cfg(&grid, 1);
    let p = init_params(&cfg, 4).unwrap();
    let mut nf = cfg.clone();
    nf.ablation.no_filter = true;
    // smooth enough that products never reach the masked band
    let u = bandlimited(&grid, 1, 1, 2);
    let a = rhs_eval(&u, &p, &cfg).unwrap();
    let b = rhs_eval(&u, &p, &nf).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-12);
    let rough = bandlimited(&grid, 1, 1, 7);
    let full = rhs_eval(&rough, &p, &cfg).unwrap();
    let gap = full.max_abs_diff(&rhs_eval(&rough, &p, &nf).unwrap());
    assert!(gap > 1e-6 * full.max_abs(), "gap {gap:e} of {:e}", full.max_abs());
}

#[test]
fn rollout_cadence_and_determinism() {
    let grid = GridSpec::cube(2, 8, 1.0).unwrap();
    let cfg = random_cfg(&grid, 1);
    let p = init_params(&cfg, 4).unwrap();
    let u = bandlimited(&grid, 1, 1, 2);
    assert_eq!(rollout(&u, &p, &cfg, 0, 1).unwrap(), vec![u.clone()]);
    let a = rollout(&u, &p, &cfg, 6, 2).unwrap();
    assert_eq!(a.len(), 4);
    assert_eq!(a, rollout(&u, &p, &cfg, 6, 2).unwrap());
}

#[test]
fn parameter_counts() {
    let grid = GridSpec::cube(2, 64, 1.0).unwrap();
    let mut cfg = ModelConfig::new(1, &grid, 0.1);
    cfg.k = 8;
    cfg.width = 64;
    // Freq2Vec 2->64->64->16, two product maps and the linear map 8->64,
    // out map 128->1.
    let expected = (2 * 64 + 64) + (64 * 64 + 64) + (64 * 16 + 16) + 3 * (8 * 64 + 64) + (128 + 1);
    assert_eq!(count_params(&cfg), expected);
    assert_eq!(count_params(&cfg), 7249);
    for flags in Ablation::all_combinations() {
        cfg.ablation = flags;
        assert_eq!(count_params(&cfg), init_params(&cfg, 0).unwrap().count());
    }
    cfg.ablation = Ablation::default();
    let base = count_params(&cfg);
    cfg.width = 65;
    assert!(count_params(&cfg) > base);
    cfg.width = 64;
    cfg.k = 9;
    assert!(count_params(&cfg) > base);
}

#[test]
fn initialization_is_seeded() {
    let grid = GridSpec::cube(2, 8, 1.0).unwrap();
    let cfg = random_cfg(&grid, 1);
    assert_eq!(init_params(&cfg, 5).unwrap(), init_params(&cfg, 5).unwrap());
    assert_ne!(init_params(&cfg, 5).unwrap(), init_params(&cfg, 6).unwrap());
}
