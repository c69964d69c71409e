//! Reverse-mode gradients mirroring the forward pass step by step, and the
//! finite-difference checker that validates every parameter tensor.

use super::forward::{forward, ForwardTrace, LN_EPS};
use super::state::EncoderState;
use crate::error::{Error, Result};
use crate::imgstat::Image;

/// dL/dx and dL/dw for `out = w @ x + b`; all accumulators add in place.
fn linear_backward(
    dout: &[f64],
    x: &[f64],
    w: &[f64],
    rows: usize,
    din: usize,
    dout_dim: usize,
    dx: Option<&mut [f64]>,
    dw: &mut [f64],
    db: &mut [f64],
) {
    for t in 0..rows {
        let dor = &dout[t * dout_dim..(t + 1) * dout_dim];
        let xr = &x[t * din..(t + 1) * din];
        for o in 0..dout_dim {
            let g = dor[o];
            if g == 0.0 {
                continue;
            }
            db[o] += g;
            let dwr = &mut dw[o * din..(o + 1) * din];
            for (dwi, xi) in dwr.iter_mut().zip(xr) {
                *dwi += g * xi;
            }
        }
    }
    if let Some(dx) = dx {
        for t in 0..rows {
            let dor = &dout[t * dout_dim..(t + 1) * dout_dim];
            let dxr = &mut dx[t * din..(t + 1) * din];
            for o in 0..dout_dim {
                let g = dor[o];
                if g == 0.0 {
                    continue;
                }
                let wr = &w[o * din..(o + 1) * din];
                for (dxi, wi) in dxr.iter_mut().zip(wr) {
                    *dxi += g * wi;
                }
            }
        }
    }
}

/// Layer-norm backward for one row set; accumulates into dgamma/dbeta and
/// writes dx (adding to what is already there).
#[allow(clippy::too_many_arguments)]
fn layernorm_backward(
    dy: &[f64],
    x: &[f64],
    g: &[f64],
    mean: &[f64],
    rstd: &[f64],
    rows: usize,
    d: usize,
    dx: &mut [f64],
    dg: &mut [f64],
    db: &mut [f64],
) {
    for t in 0..rows {
        let xr = &x[t * d..(t + 1) * d];
        let dyr = &dy[t * d..(t + 1) * d];
        let dxr = &mut dx[t * d..(t + 1) * d];
        let (mu, rs) = (mean[t], rstd[t]);
        let mut sum_dxhat = 0.0;
        let mut sum_dxhat_xhat = 0.0;
        for i in 0..d {
            let xhat = (xr[i] - mu) * rs;
            let dxhat = dyr[i] * g[i];
            dg[i] += dyr[i] * xhat;
            db[i] += dyr[i];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat;
        }
        let inv_d = 1.0 / d as f64;
        for i in 0..d {
            let xhat = (xr[i] - mu) * rs;
            let dxhat = dyr[i] * g[i];
            dxr[i] += rs * (dxhat - inv_d * sum_dxhat - xhat * inv_d * sum_dxhat_xhat);
        }
    }
}

/// Attention backward: given dctx, accumulate dq, dk, dv.
#[allow(clippy::too_many_arguments)]
fn attention_backward(
    dctx: &[f64],
    q: &[f64],
    k: &[f64],
    v: &[f64],
    att: &[f64],
    rows_q: usize,
    rows_k: usize,
    heads: usize,
    d: usize,
    dq: &mut [f64],
    dk: &mut [f64],
    dv: &mut [f64],
) {
    let dh = d / heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut datt = vec![0.0; rows_k];
    for h in 0..heads {
        let off = h * dh;
        for i in 0..rows_q {
            let dcr = &dctx[i * d + off..i * d + off + dh];
            let arow = &att[(h * rows_q + i) * rows_k..(h * rows_q + i + 1) * rows_k];
            // dv and datt
            let mut dot_a_da = 0.0;
            for j in 0..rows_k {
                let a = arow[j];
                let acc = super::forward::dot(dcr, &v[j * d + off..j * d + off + dh]);
                let dvr = &mut dv[j * d + off..j * d + off + dh];
                for (dvi, dc) in dvr.iter_mut().zip(dcr) {
                    *dvi += a * dc;
                }
                datt[j] = acc;
                dot_a_da += a * acc;
            }
            // softmax backward then score backward
            let qr = &q[i * d + off..i * d + off + dh];
            let dqr = &mut dq[i * d + off..i * d + off + dh];
            for j in 0..rows_k {
                let ds = arow[j] * (datt[j] - dot_a_da) * scale;
                if ds == 0.0 {
                    continue;
                }
                let kr = &k[j * d + off..j * d + off + dh];
                let dkr = &mut dk[j * d + off..j * d + off + dh];
                for ((dqi, ki), (dki, qi)) in
                    dqr.iter_mut().zip(kr).zip(dkr.iter_mut().zip(qr))
                {
                    *dqi += ds * ki;
                    *dki += ds * qi;
                }
            }
        }
    }
}

const GELU_C0: f64 = 0.7978845608028654;
const GELU_C1: f64 = 0.044715;

fn gelu_backward(dz: &[f64], u: &[f64], tanh_s: &[f64], du: &mut [f64]) {
    for i in 0..u.len() {
        let t = tanh_s[i];
        let ds_du = GELU_C0 * (1.0 + 3.0 * GELU_C1 * u[i] * u[i]);
        let dgelu = 0.5 * (1.0 + t) + 0.5 * u[i] * (1.0 - t * t) * ds_du;
        du[i] = dz[i] * dgelu;
    }
}

/// Exact reverse-mode gradients for one traced forward pass.
///
/// `d_feature` is dL/dF. Parameter gradients accumulate into `grads` (an
/// [`EncoderState`]-shaped container); the return value is dL/dS for the
/// anchor embeddings, which the trainer never applies — anchors stay frozen.
pub fn backward(
    state: &EncoderState,
    trace: &ForwardTrace,
    d_feature: &[f64],
    grads: &mut EncoderState,
) -> Result<Vec<Vec<f64>>> {
    if trace.version != state.version {
        return Err(Error::TraceMismatch);
    }
    let cfg = &state.cfg;
    if d_feature.len() != cfg.d_model {
        return Err(Error::InvalidInput("upstream gradient has wrong length".into()));
    }
    let d = cfg.d_model;
    let t = cfg.tokens();
    let hidden = cfg.hidden();
    let n_anchors = trace.anchors.len();
    let mut d_anchors = vec![vec![0.0; d]; n_anchors];

    // final layer norm over the class token
    let last_x = trace.fused_tokens(cfg.layers - 1);
    let cls_row = &last_x[..d];
    let (mu, rs) = (trace.lnf_mean, trace.lnf_rstd);
    let mut dx = vec![0.0; t * d];
    {
        let mut sum_dxhat = 0.0;
        let mut sum_dxhat_xhat = 0.0;
        for i in 0..d {
            let xhat = (cls_row[i] - mu) * rs;
            let dxhat = d_feature[i] * state.lnf_g[i];
            grads.lnf_g[i] += d_feature[i] * xhat;
            grads.lnf_b[i] += d_feature[i];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat;
        }
        let inv_d = 1.0 / d as f64;
        for i in 0..d {
            let xhat = (cls_row[i] - mu) * rs;
            let dxhat = d_feature[i] * state.lnf_g[i];
            dx[i] = rs * (dxhat - inv_d * sum_dxhat - xhat * inv_d * sum_dxhat_xhat);
        }
    }

    for l in (0..cfg.layers).rev() {
        let lt = &trace.layers[l];
        let lp = &state.layers[l];
        let lg = &mut grads.layers[l];

        // cross-attention injection (output side of the layer)
        if let Some(at) = &lt.apa {
            let apa_idx = l - cfg.first_apa_layer();
            let ap = &state.apa[apa_idx];
            let ag = &mut grads.apa[apa_idx];
            // fused = x_mlp + gate (*) xtilde
            let mut d_xtilde = vec![0.0; t * d];
            for row in 0..t {
                for i in 0..d {
                    let df = dx[row * d + i];
                    ag.gate[i] += df * at.xtilde[row * d + i];
                    d_xtilde[row * d + i] = df * ap.gate[i];
                }
            }
            // xtilde = ctx @ Wo^T + bo
            let mut d_ctx = vec![0.0; t * d];
            linear_backward(&d_xtilde, &at.ctx, &ap.wo, t, d, d, Some(&mut d_ctx), &mut ag.wo, &mut ag.bo);
            let mut d_q = vec![0.0; t * d];
            let mut d_k = vec![0.0; n_anchors * d];
            let mut d_v = vec![0.0; n_anchors * d];
            attention_backward(
                &d_ctx, &at.q, &at.k, &at.v, &at.att, t, n_anchors, cfg.heads, d, &mut d_q,
                &mut d_k, &mut d_v,
            );
            // queries come from x_mlp: residual path already in dx
            let mut s = vec![0.0; n_anchors * d];
            for (i, a) in trace.anchors.iter().enumerate() {
                s[i * d..(i + 1) * d].copy_from_slice(a);
            }
            linear_backward(&d_q, &lt.x_mlp, &ap.wq, t, d, d, Some(&mut dx), &mut ag.wq, &mut ag.bq);
            let mut d_s = vec![0.0; n_anchors * d];
            linear_backward(&d_k, &s, &ap.wk, n_anchors, d, d, Some(&mut d_s), &mut ag.wk, &mut ag.bk);
            linear_backward(&d_v, &s, &ap.wv, n_anchors, d, d, Some(&mut d_s), &mut ag.wv, &mut ag.bv);
            for (i, da) in d_anchors.iter_mut().enumerate() {
                for j in 0..d {
                    da[j] += d_s[i * d + j];
                }
            }
        }

        // MLP sub-block: x_mlp = x_attn + W2 gelu(W1 ln2(x_attn) + b1) + b2
        let mut d_z = vec![0.0; t * hidden];
        linear_backward(&dx, &lt.mlp_z, &lp.w2, t, hidden, d, Some(&mut d_z), &mut lg.w2, &mut lg.b2);
        let mut d_u = vec![0.0; t * hidden];
        gelu_backward(&d_z, &lt.mlp_u, &lt.mlp_tanh, &mut d_u);
        let mut d_ln2 = vec![0.0; t * d];
        linear_backward(&d_u, &lt.ln2_out, &lp.w1, t, d, hidden, Some(&mut d_ln2), &mut lg.w1, &mut lg.b1);
        // residual: dx flows through unchanged, plus the LN path
        layernorm_backward(
            &d_ln2, &lt.x_attn, &lp.ln2_g, &lt.ln2_mean, &lt.ln2_rstd, t, d, &mut dx,
            &mut lg.ln2_g, &mut lg.ln2_b,
        );

        // self-attention sub-block: x_attn = x_in + Wo ctx + bo
        let mut d_ctx = vec![0.0; t * d];
        linear_backward(&dx, &lt.ctx, &lp.wo, t, d, d, Some(&mut d_ctx), &mut lg.wo, &mut lg.bo);
        let mut d_q = vec![0.0; t * d];
        let mut d_k = vec![0.0; t * d];
        let mut d_v = vec![0.0; t * d];
        attention_backward(
            &d_ctx, &lt.q, &lt.k, &lt.v, &lt.att, t, t, cfg.heads, d, &mut d_q, &mut d_k,
            &mut d_v,
        );
        let mut d_ln1 = vec![0.0; t * d];
        linear_backward(&d_q, &lt.ln1_out, &lp.wq, t, d, d, Some(&mut d_ln1), &mut lg.wq, &mut lg.bq);
        linear_backward(&d_k, &lt.ln1_out, &lp.wk, t, d, d, Some(&mut d_ln1), &mut lg.wk, &mut lg.bk);
        linear_backward(&d_v, &lt.ln1_out, &lp.wv, t, d, d, Some(&mut d_ln1), &mut lg.wv, &mut lg.bv);
        layernorm_backward(
            &d_ln1, &lt.x_in, &lp.ln1_g, &lt.ln1_mean, &lt.ln1_rstd, t, d, &mut dx,
            &mut lg.ln1_g, &mut lg.ln1_b,
        );
    }

    // embedding: tok = [cls; patch_w @ patches + patch_b] + pos
    for i in 0..t * d {
        grads.pos[i] += dx[i];
    }
    for i in 0..d {
        grads.cls[i] += dx[i];
    }
    linear_backward(
        &dx[d..],
        &trace.patches,
        &state.patch_w,
        cfg.patch_count(),
        cfg.patch_dim(),
        d,
        None,
        &mut grads.patch_w,
        &mut grads.patch_b,
    );
    let _ = LN_EPS; // shared constant with the forward pass
    Ok(d_anchors)
}

/// Per-tensor result of a finite-difference gradient check.
#[derive(Debug, Clone)]
pub struct GradReport {
    pub tensor: String,
    pub max_rel_error: f64,
    pub checked: usize,
}

// Scale on the probe loss. Central-difference noise is proportional to the
// loss magnitude (roundoff eps*|L|/2h plus O(h^2) truncation); shrinking the
// probe leaves relative errors of well-sized gradients untouched while
// pushing the noise of near-zero gradients under the absolute-error branch,
// so the check discriminates real defects from f64 noise.
const PROBE_SCALE: f64 = 1e-5;

/// Compare reverse-mode gradients of the probe loss `0.5 * |F|^2` (scaled)
/// against central differences for every parameter tensor.
///
/// `stride` thins the scan: every `stride`-th element of each tensor is
/// perturbed (1 checks everything). Relative error falls back to absolute
/// when the analytic value is below 1e-8.
pub fn gradient_check(
    state: &EncoderState,
    img: &Image,
    anchors: &[Vec<f64>],
    h: f64,
    stride: usize,
) -> Result<Vec<GradReport>> {
    let probe = |st: &EncoderState| -> Result<f64> {
        let tr = forward(st, img, anchors)?;
        Ok(PROBE_SCALE * 0.5 * tr.feature.iter().map(|v| v * v).sum::<f64>())
    };
    let trace = forward(state, img, anchors)?;
    let mut grads = state.zeros_like();
    let upstream: Vec<f64> = trace.feature.iter().map(|v| v * PROBE_SCALE).collect();
    backward(state, &trace, &upstream, &mut grads)?;

    let mut names: Vec<(String, usize)> = Vec::new();
    state.for_each_tensor(|name, t| names.push((name.to_string(), t.len())));
    let mut grad_values: Vec<Vec<f64>> = Vec::new();
    grads.for_each_tensor(|_, t| grad_values.push(t.to_vec()));

    let mut reports = Vec::with_capacity(names.len());
    let mut work = state.clone();
    for (pos, (name, len)) in names.iter().enumerate() {
        let mut max_rel = 0.0f64;
        let mut checked = 0usize;
        let mut idx = 0;
        while idx < *len {
            let analytic = grad_values[pos][idx];
            let nudge = |w: &mut EncoderState, delta: f64| {
                let mut k = 0;
                w.for_each_tensor_mut(|_, t| {
                    if k == pos {
                        t[idx] += delta;
                    }
                    k += 1;
                });
            };
            nudge(&mut work, h);
            let up = probe(&work)?;
            nudge(&mut work, -2.0 * h);
            let down = probe(&work)?;
            nudge(&mut work, h);
            let fd = (up - down) / (2.0 * h);
            let err = if analytic.abs() < 1e-8 {
                (fd - analytic).abs()
            } else {
                (fd - analytic).abs() / analytic.abs().max(fd.abs())
            };
            max_rel = max_rel.max(err);
            checked += 1;
            idx += stride;
        }
        reports.push(GradReport {
            tensor: name.clone(),
            max_rel_error: max_rel,
            checked,
        });
    }
    Ok(reports)
}
