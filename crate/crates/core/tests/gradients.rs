use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sino::model::*;
use sino::spectral::{grf_vector, GrfParams, GridSpec, RealField};
use sino::train::*;

/// Small random problem: 16² grid, K=4, C=8, two supervised steps.
fn problem(flags: Ablation, c_in: usize, seed: u64) -> (ModelConfig, SinoParams, Vec<RealField>) {
    let grid = GridSpec::cube(2, 16, 1.0).unwrap();
    let mut cfg = ModelConfig::new(c_in, &grid, 0.05);
    cfg.k = 4;
    cfg.width = 8;
    cfg.mlp_hidden = vec![12, 12];
    cfg.ablation = flags;
    let mut p = init_params(&cfg, seed).unwrap();
    // non-zero biases everywhere so no unit sits exactly on a kink
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
    for t in p.tensors_mut() {
        t.data.iter_mut().for_each(|v| *v += rng.random_range(-0.3..0.3));
    }
    let seg = (0..3).map(|i| grf_vector(&grid, seed * 10 + i, &GrfParams::smooth_state(2), c_in).unwrap()).collect();
    (cfg, p, seg)
}

fn fd_gradient(p: &SinoParams, cfg: &ModelConfig, seg: &[RealField], kind: LossKind, h: f64) -> Vec<f64> {
    let flat = p.flatten();
    let mut q = p.clone();
    let mut out = Vec::with_capacity(flat.len());
    for i in 0..flat.len() {
        let mut x = flat.clone();
        x[i] = flat[i] + h;
        q.assign_flat(&x).unwrap();
        let lp = loss_rollout(&q, cfg, seg, kind).unwrap();
        x[i] = flat[i] - h;
        q.assign_flat(&x).unwrap();
        let lm = loss_rollout(&q, cfg, seg, kind).unwrap();
        out.push((lp - lm) / (2.0 * h));
    }
    out
}

/// Worst per-tensor relative error `|g - g_fd| / (|g| + 1e-8)` (norms).
fn compare(p: &SinoParams, grads: &SinoParams, fd: &[f64]) -> (f64, String) {
    let mut at = 0;
    let mut worst = (0.0, String::new());
    for (t, g) in p.tensors().iter().zip(grads.tensors()) {
        assert_eq!(t.name, g.name);
        let n = g.data.len();
        let diff: f64 = g.data.iter().zip(&fd[at..at + n]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let norm: f64 = g.data.iter().map(|a| a * a).sum::<f64>().sqrt();
        let rel = diff / (norm + 1e-8);
        if rel > worst.0 {
            worst = (rel, g.name.clone());
        }
        at += n;
    }
    worst
}

#[test]
fn gradients_match_finite_differences_for_every_ablation() {
    for (i, flags) in Ablation::all_combinations().into_iter().enumerate() {
        let (cfg, p, seg) = problem(flags, 1 + i % 2, i as u64);
        let kind = if i % 3 == 0 { LossKind::RelL2 } else { LossKind::Mse };
        let (loss, grads) = backward(&p, &cfg, &seg, kind).unwrap();
        assert_eq!(loss, loss_rollout(&p, &cfg, &seg, kind).unwrap());
        let fd = fd_gradient(&p, &cfg, &seg, kind, 1e-5);
        let (rel, name) = compare(&p, &grads, &fd);
        assert!(rel < 1e-5, "{flags:?}: {name} relative error {rel:e}");
    }
}

/// Per coordinate, the central difference at h = 1e-5 carries a roundoff
/// error of order `eps * L / h`; coordinates whose gradient is below that
/// floor are compared against it instead of relatively.
#[test]
fn per_coordinate_gradients_match_finite_differences() {
    let h = 1e-5;
    let (cfg, p, seg) = problem(Ablation::default(), 2, 77);
    let (loss, grads) = backward(&p, &cfg, &seg, LossKind::Mse).unwrap();
    let fd = fd_gradient(&p, &cfg, &seg, LossKind::Mse, h);
    let floor = 100.0 * f64::EPSILON * loss / h;
    let mut relative = 0;
    for (i, (a, b)) in grads.flatten().iter().zip(&fd).enumerate() {
        let diff = (a - b).abs();
        if diff / (a.abs() + 1e-8) < 1e-5 {
            relative += 1;
        } else {
            assert!(diff < floor, "coordinate {i}: analytic {a:e}, difference quotient {b:e}");
        }
    }
    assert!(relative * 2 > fd.len());
}

#[test]
fn ablated_blocks_are_absent_from_the_gradient() {
    let flags = Ablation { no_linear: true, ..Ablation::default() };
    let (cfg, p, seg) = problem(flags, 1, 3);
    let (_, grads) = backward(&p, &cfg, &seg, LossKind::Mse).unwrap();
    assert!(grads.linear.is_none());
    assert!(grads.tensors().iter().all(|t| !t.name.starts_with("linear")));
}

#[test]
fn gradient_scales_linearly_with_the_loss() {
    let (cfg, p, seg) = problem(Ablation::default(), 1, 5);
    let (l1, g1) = backward_from(&p, &cfg, &seg[0], &seg[1..], LossKind::Mse, 1.0).unwrap();
    let (l2, g2) = backward_from(&p, &cfg, &seg[0], &seg[1..], LossKind::Mse, 2.0).unwrap();
    assert_eq!(l2, 2.0 * l1);
    for (a, b) in g1.flatten().iter().zip(g2.flatten()) {
        assert_eq!(2.0 * a, b);
    }
}

#[test]
fn relabeling_product_factors_permutes_their_gradients() {
    let (cfg, p, seg) = problem(Ablation::default(), 1, 9);
    let mut q = p.clone();
    q.pi.swap(0, 1);
    let (lp, gp) = backward(&p, &cfg, &seg, LossKind::Mse).unwrap();
    let (lq, gq) = backward(&q, &cfg, &seg, LossKind::Mse).unwrap();
    assert!((lp - lq).abs() <= 1e-14 * lp.abs());
    for (a, b) in [(0, 1), (1, 0)] {
        for (x, y) in gp.pi[a].weight.iter().zip(&gq.pi[b].weight) {
            assert!((x - y).abs() <= 1e-12 * (x.abs() + 1e-12));
        }
    }
}

#[test]
fn warm_up_does_not_touch_the_gradient_of_a_given_start() {
    let (cfg, p, seg) = problem(Ablation::default(), 1, 4);
    // the start state is data: how it was produced cannot matter
    let warmed = rollout(&seg[0], &p, &cfg, 3, 3).unwrap()[1].clone();
    let (_, a) = backward_from(&p, &cfg, &warmed, &seg[1..], LossKind::Mse, 1.0).unwrap();
    let again = rollout(&seg[0], &p, &cfg, 3, 1).unwrap()[3].clone();
    let (_, b) = backward_from(&p, &cfg, &again, &seg[1..], LossKind::Mse, 1.0).unwrap();
    assert_eq!(a, b);
}
