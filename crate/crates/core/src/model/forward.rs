use std::collections::BTreeMap;

use num_complex::Complex64;

use super::config::{ModelConfig, Recombine};
use super::freq2vec::{freq2vec_backward, freq2vec_eval_taped, MultiplierTable, SpectralTape};
use super::params::{Dense, SinoParams};
use crate::error::{Result, SinoError};
use crate::spectral::{
    fft, filter_real, inverse_transform, two_thirds_mask, FreqGrid, GridSpec, RealField, SpectralField,
};

/// `y = W x (+ b)` applied pointwise to channel-major fields of `n` points.
fn map_1x1(w: &[f64], b: Option<&[f64]>, n_out: usize, n_in: usize, x: &[f64], n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n_out * n];
    for o in 0..n_out {
        let yo = &mut y[o * n..(o + 1) * n];
        if let Some(b) = b {
            yo.fill(b[o]);
        }
        for i in 0..n_in {
            let wi = w[o * n_in + i];
            for (a, &v) in yo.iter_mut().zip(&x[i * n..(i + 1) * n]) {
                *a += wi * v;
            }
        }
    }
    y
}

/// Adjoint of [`map_1x1`]: accumulates `∂W`, `∂b` and (optionally) `∂x`.
#[allow(clippy::too_many_arguments)]
fn map_1x1_backward(
    w: &[f64],
    n_out: usize,
    n_in: usize,
    x: &[f64],
    gy: &[f64],
    n: usize,
    gw: &mut [f64],
    gb: Option<&mut [f64]>,
    gx: &mut [f64],
) {
    if let Some(gb) = gb {
        for o in 0..n_out {
            gb[o] += gy[o * n..(o + 1) * n].iter().sum::<f64>();
        }
    }
    for o in 0..n_out {
        let g = &gy[o * n..(o + 1) * n];
        for i in 0..n_in {
            let xi = &x[i * n..(i + 1) * n];
            gw[o * n_in + i] += g.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
            let wi = w[o * n_in + i];
            for (d, &v) in gx[i * n..(i + 1) * n].iter_mut().zip(g) {
                *d += wi * v;
            }
        }
    }
}

/// Everything a single RHS evaluation keeps for its adjoint.
#[derive(Debug, Clone)]
pub struct RhsTape {
    u_hat: Vec<Complex64>,
    d: Vec<f64>,
    factors: Vec<Vec<f64>>,
    v: Vec<f64>,
    lin: Option<Vec<f64>>,
}

/// Tapes of the RHS stages of one time step.
#[derive(Debug, Clone)]
pub struct StepTape {
    stages: Vec<RhsTape>,
}

/// The model bound to one grid: multipliers are evaluated once and reused by
/// every RHS call made through this value.
pub struct SinoOperator<'a> {
    cfg: &'a ModelConfig,
    params: &'a SinoParams,
    freq: FreqGrid,
    table: MultiplierTable,
    spectral_tape: SpectralTape,
    mask: Option<Vec<f64>>,
    w_lin: Option<Vec<f64>>,
    w_nl: Vec<f64>,
}

fn columns(d: &Dense, col0: usize, cols: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(d.n_out * cols);
    for o in 0..d.n_out {
        w.extend_from_slice(&d.weight[o * d.n_in + col0..o * d.n_in + col0 + cols]);
    }
    w
}

impl<'a> SinoOperator<'a> {
    pub fn new(params: &'a SinoParams, cfg: &'a ModelConfig, grid: &GridSpec) -> Result<Self> {
        cfg.validate()?;
        if grid.dim() != cfg.dim() {
            return Err(SinoError::ShapeMismatch(format!("{}-d grid for a {}-d model", grid.dim(), cfg.dim())));
        }
        params.check(cfg)?;
        let freq = FreqGrid::new(grid);
        let (table, spectral_tape) = freq2vec_eval_taped(&params.spectral, cfg, &freq)?;
        let mask = (!cfg.ablation.no_filter).then(|| two_thirds_mask(&freq));
        let c = cfg.width;
        let (lin0, nl0) = Self::out_columns(cfg);
        let w_lin = params.linear.as_ref().map(|_| columns(&params.out, lin0, c));
        let w_nl = columns(&params.out, nl0, c);
        Ok(SinoOperator { cfg, params, freq, table, spectral_tape, mask, w_lin, w_nl })
    }

    /// First out-map column of the linear and the nonlinear branch.
    fn out_columns(cfg: &ModelConfig) -> (usize, usize) {
        match (cfg.recombine, cfg.ablation.no_linear) {
            (Recombine::Concat, false) => (0, cfg.width),
            _ => (0, 0),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.freq.grid()
    }

    pub fn table(&self) -> &MultiplierTable {
        &self.table
    }

    fn check(&self, u: &RealField) -> Result<()> {
        if u.grid() != self.grid() || u.channels() != self.cfg.c_in {
            return Err(SinoError::ShapeMismatch(format!(
                "field on {:?} with {} channel(s); operator expects {:?} with {}",
                u.grid().points(),
                u.channels(),
                self.grid().points(),
                self.cfg.c_in
            )));
        }
        Ok(())
    }

    fn slb(&self, u_hat: &[Complex64]) -> Vec<f64> {
        let n = self.freq.len();
        let (c, k) = (self.cfg.c_in, self.cfg.k);
        let mut spec = vec![Complex64::default(); c * k * n];
        for ch in 0..c {
            let uh = &u_hat[ch * n..(ch + 1) * n];
            for j in 0..k {
                let row = self.table.row(j);
                let s = &mut spec[(ch * k + j) * n..(ch * k + j + 1) * n];
                for m in 0..n {
                    s[m] = row[m] * uh[m];
                }
            }
        }
        fft::inverse_real(&self.freq, &spec, c * k)
    }

    fn rhs_raw(&self, u: &[f64], keep: bool) -> (Vec<f64>, Option<RhsTape>) {
        let n = self.freq.len();
        let cfg = self.cfg;
        let (c, f, w) = (cfg.c_in, cfg.features(), cfg.width);
        let u_hat = fft::forward_real(&self.freq, u, c);
        let d = self.slb(&u_hat);
        let factors: Vec<Vec<f64>> =
            self.params.pi.iter().map(|p| map_1x1(&p.weight, Some(&p.bias), w, f, &d, n)).collect();
        let mut v = factors[0].clone();
        for fac in &factors[1..] {
            for (a, b) in v.iter_mut().zip(fac) {
                *a *= b;
            }
        }
        let lin = self.params.linear.as_ref().map(|l| map_1x1(&l.weight, Some(&l.bias), w, f, &d, n));
        // The mask commutes with the pointwise out map, so filter after it
        // (c_in channels instead of C).
        let mut out = map_1x1(&self.w_nl, None, c, w, &v, n);
        if let Some(mask) = &self.mask {
            filter_real(&self.freq, &mut out, c, mask);
        }
        if let (Some(l), Some(wl)) = (&lin, &self.w_lin) {
            let y = map_1x1(wl, None, c, w, l, n);
            out.iter_mut().zip(&y).for_each(|(a, b)| *a += b);
        }
        for o in 0..c {
            let b = self.params.out.bias[o];
            out[o * n..(o + 1) * n].iter_mut().for_each(|a| *a += b);
        }
        let tape = keep.then_some(RhsTape { u_hat, d, factors, v, lin });
        (out, tape)
    }

    /// Adjoint of one RHS evaluation. Accumulates parameter gradients into
    /// `grads` (dense parts) and `g_table`, returns `∂L/∂u`.
    fn rhs_backward(
        &self,
        tape: &RhsTape,
        g_out: &[f64],
        grads: &mut SinoParams,
        g_table: &mut [Complex64],
    ) -> Vec<f64> {
        let n = self.freq.len();
        let cfg = self.cfg;
        let (c, k, f, w) = (cfg.c_in, cfg.k, cfg.features(), cfg.width);
        let ow = grads.out.n_in;
        let (lin0, nl0) = Self::out_columns(cfg);

        for o in 0..c {
            grads.out.bias[o] += g_out[o * n..(o + 1) * n].iter().sum::<f64>();
        }
        let mut g_nl = g_out.to_vec();
        if let Some(mask) = &self.mask {
            filter_real(&self.freq, &mut g_nl, c, mask);
        }
        let mut gw = vec![0.0; c * w];
        let mut g_v = vec![0.0; w * n];
        map_1x1_backward(&self.w_nl, c, w, &tape.v, &g_nl, n, &mut gw, None, &mut g_v);
        for o in 0..c {
            for i in 0..w {
                grads.out.weight[o * ow + nl0 + i] += gw[o * w + i];
            }
        }

        let mut g_d = vec![0.0; f * n];
        if let (Some(lin), Some(wl)) = (&tape.lin, &self.w_lin) {
            let mut gw = vec![0.0; c * w];
            let mut g_lin = vec![0.0; w * n];
            map_1x1_backward(wl, c, w, lin, g_out, n, &mut gw, None, &mut g_lin);
            for o in 0..c {
                for i in 0..w {
                    grads.out.weight[o * ow + lin0 + i] += gw[o * w + i];
                }
            }
            let l = self.params.linear.as_ref().expect("linear branch present");
            let gl = grads.linear.as_mut().expect("gradient mirrors parameters");
            map_1x1_backward(&l.weight, w, f, &tape.d, &g_lin, n, &mut gl.weight, Some(&mut gl.bias), &mut g_d);
        }

        let p_count = tape.factors.len();
        for p in 0..p_count {
            let mut g_f = g_v.clone();
            for (q, fac) in tape.factors.iter().enumerate() {
                if q != p {
                    g_f.iter_mut().zip(fac).for_each(|(a, b)| *a *= b);
                }
            }
            let pp = &self.params.pi[p];
            let gp = &mut grads.pi[p];
            map_1x1_backward(&pp.weight, w, f, &tape.d, &g_f, n, &mut gp.weight, Some(&mut gp.bias), &mut g_d);
        }

        // spectral learning block
        let gd_hat = fft::forward_real(&self.freq, &g_d, f);
        let inv_n = 1.0 / n as f64;
        let mut gu_hat = vec![Complex64::default(); c * n];
        for ch in 0..c {
            let uh = &tape.u_hat[ch * n..(ch + 1) * n];
            for j in 0..k {
                let row = self.table.row(j);
                let gd = &gd_hat[(ch * k + j) * n..(ch * k + j + 1) * n];
                let gt = &mut g_table[j * n..(j + 1) * n];
                let gu = &mut gu_hat[ch * n..(ch + 1) * n];
                for m in 0..n {
                    gu[m] += row[m].conj() * gd[m];
                    let h = uh[m] * gd[m].conj() * inv_n;
                    gt[m] += Complex64::new(h.re, -h.im);
                }
            }
        }
        fft::inverse_real(&self.freq, &gu_hat, c)
    }

    fn finite(v: &[f64], what: &str) -> Result<()> {
        if v.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(SinoError::non_finite("model RHS", what))
        }
    }

    pub fn rhs(&self, u: &RealField) -> Result<RealField> {
        self.check(u)?;
        let (out, _) = self.rhs_raw(u.data(), false);
        RealField::new(u.grid().clone(), u.channels(), out)
    }

    fn step_raw(&self, u: &[f64], keep: bool) -> Result<(Vec<f64>, StepTape)> {
        let dt = self.cfg.dt_model;
        let mut stages = Vec::new();
        let mut eval = |x: &[f64], which: &str| -> Result<Vec<f64>> {
            let (k, t) = self.rhs_raw(x, keep);
            Self::finite(&k, which)?;
            if let Some(t) = t {
                stages.push(t);
            }
            Ok(k)
        };
        let shifted = |a: f64, k: &[f64]| -> Vec<f64> { u.iter().zip(k).map(|(x, y)| x + a * y).collect() };
        let next = if self.cfg.ablation.euler_time {
            let k1 = eval(u, "stage 1")?;
            shifted(dt, &k1)
        } else {
            let k1 = eval(u, "stage 1")?;
            let k2 = eval(&shifted(0.5 * dt, &k1), "stage 2")?;
            let k3 = eval(&shifted(0.5 * dt, &k2), "stage 3")?;
            let k4 = eval(&shifted(dt, &k3), "stage 4")?;
            (0..u.len()).map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
        };
        Ok((next, StepTape { stages }))
    }

    pub fn step(&self, u: &RealField) -> Result<RealField> {
        self.check(u)?;
        let (next, _) = self.step_raw(u.data(), false)?;
        RealField::new(u.grid().clone(), u.channels(), next)
    }

    /// One step that records what its adjoint needs.
    pub fn step_taped(&self, u: &RealField) -> Result<(RealField, StepTape)> {
        self.check(u)?;
        let (next, tape) = self.step_raw(u.data(), true)?;
        Ok((RealField::new(u.grid().clone(), u.channels(), next)?, tape))
    }

    /// Adjoint of one step: returns `∂L/∂u_n` given `∂L/∂u_{n+1}`.
    pub fn step_backward(
        &self,
        tape: &StepTape,
        g_next: &[f64],
        grads: &mut SinoParams,
        g_table: &mut [Complex64],
    ) -> Vec<f64> {
        let dt = self.cfg.dt_model;
        let mut gu = g_next.to_vec();
        let scaled = |a: f64, g: &[f64]| -> Vec<f64> { g.iter().map(|v| a * v).collect() };
        if self.cfg.ablation.euler_time {
            let s = self.rhs_backward(&tape.stages[0], &scaled(dt, g_next), grads, g_table);
            gu.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
            return gu;
        }
        let mut gk1 = scaled(dt / 6.0, g_next);
        let mut gk2 = scaled(dt / 3.0, g_next);
        let mut gk3 = scaled(dt / 3.0, g_next);
        let gk4 = scaled(dt / 6.0, g_next);
        let s4 = self.rhs_backward(&tape.stages[3], &gk4, grads, g_table);
        for i in 0..gu.len() {
            gu[i] += s4[i];
            gk3[i] += dt * s4[i];
        }
        let s3 = self.rhs_backward(&tape.stages[2], &gk3, grads, g_table);
        for i in 0..gu.len() {
            gu[i] += s3[i];
            gk2[i] += 0.5 * dt * s3[i];
        }
        let s2 = self.rhs_backward(&tape.stages[1], &gk2, grads, g_table);
        for i in 0..gu.len() {
            gu[i] += s2[i];
            gk1[i] += 0.5 * dt * s2[i];
        }
        let s1 = self.rhs_backward(&tape.stages[0], &gk1, grads, g_table);
        gu.iter_mut().zip(&s1).for_each(|(a, b)| *a += b);
        gu
    }

    /// Fresh accumulator for multiplier-table gradients.
    pub fn table_grad(&self) -> Vec<Complex64> {
        vec![Complex64::default(); self.table.applied.len()]
    }

    /// Pushes accumulated table gradients into the spectral parameters.
    pub fn finish_backward(&self, g_table: &[Complex64], grads: &mut SinoParams) {
        freq2vec_backward(
            &self.params.spectral,
            &self.spectral_tape,
            &self.freq,
            self.cfg.k,
            g_table,
            &mut grads.spectral,
        );
    }

    /// `n_steps` steps from `u0`, keeping every `record_every`-th state
    /// (the initial state included).
    pub fn rollout(&self, u0: &RealField, n_steps: usize, record_every: usize) -> Result<Vec<RealField>> {
        self.check(u0)?;
        let every = record_every.max(1);
        let mut out = vec![u0.clone()];
        let mut u = u0.clone();
        for s in 1..=n_steps {
            u = self.step(&u).map_err(|e| match e {
                SinoError::NonFinite { at, .. } => SinoError::non_finite("rollout", format!("step {s} ({at})")),
                other => other,
            })?;
            if s % every == 0 {
                out.push(u.clone());
            }
        }
        Ok(out)
    }

    /// SLB output, `c_in * K` channels.
    pub fn features(&self, u: &RealField) -> Result<RealField> {
        self.check(u)?;
        let u_hat = fft::forward_real(&self.freq, u.data(), self.cfg.c_in);
        RealField::new(u.grid().clone(), self.cfg.features(), self.slb(&u_hat))
    }

    /// Labeled intermediate fields of one RHS evaluation.
    pub fn dump(&self, u: &RealField) -> Result<BTreeMap<String, RealField>> {
        self.check(u)?;
        let (_, tape) = self.rhs_raw(u.data(), true);
        let tape = tape.expect("taped evaluation");
        let g = u.grid().clone();
        let mut out = BTreeMap::new();
        out.insert("slb".to_string(), RealField::new(g.clone(), self.cfg.features(), tape.d)?);
        out.insert("pi".to_string(), RealField::new(g.clone(), self.cfg.width, tape.v)?);
        if let Some(lin) = tape.lin {
            out.insert("linear".to_string(), RealField::new(g, self.cfg.width, lin)?);
        }
        Ok(out)
    }
}

/// Applies every multiplier of `table` to every channel of `u`
/// (input-channel major, multiplier minor).
pub fn slb_apply(u: &RealField, table: &MultiplierTable) -> Result<RealField> {
    if table.modes != u.grid().size() {
        return Err(SinoError::ShapeMismatch(format!(
            "table for {} modes, field with {}",
            table.modes,
            u.grid().size()
        )));
    }
    let n = table.modes;
    let uh = crate::spectral::forward_transform(u);
    let mut coeffs = Vec::with_capacity(u.channels() * table.k * n);
    for ch in 0..u.channels() {
        for j in 0..table.k {
            coeffs.extend(uh.channel(ch).iter().zip(table.row(j)).map(|(a, b)| a * b));
        }
    }
    inverse_transform(&SpectralField::new(u.grid().clone(), u.channels() * table.k, coeffs)?)
}

/// Product block on SLB features, low-pass filtered unless ablated.
pub fn pi_block(d: &RealField, params: &SinoParams, cfg: &ModelConfig) -> Result<RealField> {
    if d.channels() != cfg.features() {
        return Err(SinoError::ShapeMismatch(format!(
            "{} feature channels, expected {}",
            d.channels(),
            cfg.features()
        )));
    }
    let n = d.grid().size();
    let mut v = vec![1.0; cfg.width * n];
    for p in &params.pi {
        let f = map_1x1(&p.weight, Some(&p.bias), cfg.width, cfg.features(), d.data(), n);
        v.iter_mut().zip(&f).for_each(|(a, b)| *a *= b);
    }
    if !cfg.ablation.no_filter {
        let freq = FreqGrid::new(d.grid());
        let mask = two_thirds_mask(&freq);
        filter_real(&freq, &mut v, cfg.width, &mask);
    }
    RealField::new(d.grid().clone(), cfg.width, v)
}

pub fn rhs_eval(u: &RealField, params: &SinoParams, cfg: &ModelConfig) -> Result<RealField> {
    SinoOperator::new(params, cfg, u.grid())?.rhs(u)
}

pub fn model_step(u: &RealField, params: &SinoParams, cfg: &ModelConfig) -> Result<RealField> {
    SinoOperator::new(params, cfg, u.grid())?.step(u)
}

pub fn rollout(
    u0: &RealField,
    params: &SinoParams,
    cfg: &ModelConfig,
    n_steps: usize,
    record_every: usize,
) -> Result<Vec<RealField>> {
    SinoOperator::new(params, cfg, u0.grid())?.rollout(u0, n_steps, record_every)
}

/// SLB, pre-filter product-block and linear-block channels of one evaluation.
pub fn dump_features(u: &RealField, params: &SinoParams, cfg: &ModelConfig) -> Result<BTreeMap<String, RealField>> {
    SinoOperator::new(params, cfg, u.grid())?.dump(u)
}
