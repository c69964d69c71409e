use super::state::{ApaParams, EncoderState};
use crate::error::{Error, Result};
use crate::imgstat::Image;

pub(crate) const LN_EPS: f64 = 1e-5;

/// Dot product with four independent accumulators so the reduction has no
/// loop-carried dependency and vectorizes.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let ac = a.chunks_exact(4);
    let bc = b.chunks_exact(4);
    let tail: f64 = ac
        .remainder()
        .iter()
        .zip(bc.remainder())
        .map(|(x, y)| x * y)
        .sum();
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in ac.zip(bc) {
        s0 += x[0] * y[0];
        s1 += x[1] * y[1];
        s2 += x[2] * y[2];
        s3 += x[3] * y[3];
    }
    (s0 + s2) + (s1 + s3) + tail
}

/// `out[t] = w @ x[t] + b` for row-major `w: dout x din`.
pub(crate) fn linear(x: &[f64], w: &[f64], b: &[f64], rows: usize, din: usize, dout: usize, out: &mut [f64]) {
    for t in 0..rows {
        let xr = &x[t * din..(t + 1) * din];
        let or = &mut out[t * dout..(t + 1) * dout];
        for o in 0..dout {
            or[o] = b[o] + dot(xr, &w[o * din..(o + 1) * din]);
        }
    }
}

/// Per-row layer norm; returns (mean, rstd) per row.
pub(crate) fn layernorm(
    x: &[f64],
    g: &[f64],
    b: &[f64],
    rows: usize,
    d: usize,
    out: &mut [f64],
    mean: &mut [f64],
    rstd: &mut [f64],
) {
    for t in 0..rows {
        let xr = &x[t * d..(t + 1) * d];
        let mu = xr.iter().sum::<f64>() / d as f64;
        let var = xr.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / d as f64;
        let rs = 1.0 / (var + LN_EPS).sqrt();
        mean[t] = mu;
        rstd[t] = rs;
        let or = &mut out[t * d..(t + 1) * d];
        for i in 0..d {
            or[i] = (xr[i] - mu) * rs * g[i] + b[i];
        }
    }
}

const GELU_C0: f64 = 0.7978845608028654; // sqrt(2/pi)
const GELU_C1: f64 = 0.044715;

/// tanh-approximation GELU; caches tanh(s) for the backward pass.
pub(crate) fn gelu(u: &[f64], z: &mut [f64], tanh_s: &mut [f64]) {
    for i in 0..u.len() {
        let s = GELU_C0 * (u[i] + GELU_C1 * u[i] * u[i] * u[i]);
        let t = s.tanh();
        tanh_s[i] = t;
        z[i] = 0.5 * u[i] * (1.0 + t);
    }
}

/// Multi-head scaled dot-product attention kernel. Queries `q: rows_q x d`,
/// keys/values `k, v: rows_k x d`, head-interleaved layout. Writes softmax
/// weights (`att: heads x rows_q x rows_k`) and the concatenated context
/// (`ctx: rows_q x d`).
pub(crate) fn attention(
    q: &[f64],
    k: &[f64],
    v: &[f64],
    rows_q: usize,
    rows_k: usize,
    heads: usize,
    d: usize,
    att: &mut [f64],
    ctx: &mut [f64],
) {
    let dh = d / heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let mut scores = vec![0.0; rows_k];
    for h in 0..heads {
        let off = h * dh;
        for i in 0..rows_q {
            let qr = &q[i * d + off..i * d + off + dh];
            let mut max = f64::NEG_INFINITY;
            for (j, s) in scores.iter_mut().enumerate() {
                *s = dot(qr, &k[j * d + off..j * d + off + dh]) * scale;
                max = max.max(*s);
            }
            let arow = &mut att[(h * rows_q + i) * rows_k..(h * rows_q + i + 1) * rows_k];
            let mut denom = 0.0;
            for (a, s) in arow.iter_mut().zip(scores.iter()) {
                *a = (s - max).exp();
                denom += *a;
            }
            for a in arow.iter_mut() {
                *a /= denom;
            }
            let cr = &mut ctx[i * d + off..i * d + off + dh];
            cr.iter_mut().for_each(|c| *c = 0.0);
            for (j, a) in arow.iter().enumerate() {
                let vr = &v[j * d + off..j * d + off + dh];
                for (c, vv) in cr.iter_mut().zip(vr) {
                    *c += a * vv;
                }
            }
        }
    }
}

/// Cross-attention sub-block activations for one injected layer.
#[derive(Debug, Clone)]
pub(crate) struct ApaTrace {
    pub q: Vec<f64>,
    pub k: Vec<f64>,
    pub v: Vec<f64>,
    pub att: Vec<f64>,
    pub ctx: Vec<f64>,
    pub xtilde: Vec<f64>,
    pub fused: Vec<f64>,
}

/// One transformer layer's activations.
#[derive(Debug, Clone)]
pub(crate) struct LayerTrace {
    pub x_in: Vec<f64>,
    pub ln1_mean: Vec<f64>,
    pub ln1_rstd: Vec<f64>,
    pub ln1_out: Vec<f64>,
    pub q: Vec<f64>,
    pub k: Vec<f64>,
    pub v: Vec<f64>,
    pub att: Vec<f64>,
    pub ctx: Vec<f64>,
    pub x_attn: Vec<f64>,
    pub ln2_mean: Vec<f64>,
    pub ln2_rstd: Vec<f64>,
    pub ln2_out: Vec<f64>,
    pub mlp_u: Vec<f64>,
    pub mlp_tanh: Vec<f64>,
    pub mlp_z: Vec<f64>,
    pub x_mlp: Vec<f64>,
    pub apa: Option<ApaTrace>,
}

/// Cached activations of one forward pass, sufficient for exact reverse-mode
/// gradients, plus the pooled feature.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub(crate) version: u64,
    pub(crate) patches: Vec<f64>,
    pub(crate) layers: Vec<LayerTrace>,
    pub(crate) anchors: Vec<Vec<f64>>,
    pub(crate) lnf_mean: f64,
    pub(crate) lnf_rstd: f64,
    /// Pooled feature: final-norm output of the class token.
    pub feature: Vec<f64>,
}

impl ForwardTrace {
    /// Token matrix leaving layer `l` (after injection when present).
    pub fn fused_tokens(&self, layer: usize) -> &[f64] {
        let lt = &self.layers[layer];
        match &lt.apa {
            Some(a) => &a.fused,
            None => &lt.x_mlp,
        }
    }
}

/// Standalone cross-attention: visual tokens query the anchor embeddings.
pub fn cross_attention(
    x: &[f64],
    rows: usize,
    anchors: &[Vec<f64>],
    params: &ApaParams,
    heads: usize,
    d: usize,
) -> Result<Vec<f64>> {
    if anchors.is_empty() {
        return Err(Error::InvalidInput(
            "cross_attention needs at least one anchor; disable injection instead".into(),
        ));
    }
    Ok(cross_attention_traced(x, rows, anchors, params, heads, d).xtilde)
}

pub(crate) fn cross_attention_traced(
    x: &[f64],
    rows: usize,
    anchors: &[Vec<f64>],
    params: &ApaParams,
    heads: usize,
    d: usize,
) -> ApaTrace {
    let n = anchors.len();
    let mut s = vec![0.0; n * d];
    for (i, a) in anchors.iter().enumerate() {
        s[i * d..(i + 1) * d].copy_from_slice(a);
    }
    let mut q = vec![0.0; rows * d];
    let mut k = vec![0.0; n * d];
    let mut v = vec![0.0; n * d];
    linear(x, &params.wq, &params.bq, rows, d, d, &mut q);
    linear(&s, &params.wk, &params.bk, n, d, d, &mut k);
    linear(&s, &params.wv, &params.bv, n, d, d, &mut v);
    let mut att = vec![0.0; heads * rows * n];
    let mut ctx = vec![0.0; rows * d];
    attention(&q, &k, &v, rows, n, heads, d, &mut att, &mut ctx);
    let mut xtilde = vec![0.0; rows * d];
    linear(&ctx, &params.wo, &params.bo, rows, d, d, &mut xtilde);
    ApaTrace {
        q,
        k,
        v,
        att,
        ctx,
        xtilde,
        fused: Vec::new(),
    }
}

/// `fused = x + g (*) xtilde`, the gate broadcast across rows.
pub fn gated_fuse(x: &[f64], xtilde: &[f64], gate: &[f64], rows: usize, d: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * d];
    for t in 0..rows {
        for i in 0..d {
            out[t * d + i] = x[t * d + i] + gate[i] * xtilde[t * d + i];
        }
    }
    out
}

/// Flatten image patches channel-major: `patches[p] = [c][py][px]`.
pub(crate) fn patchify(img: &Image, patch: usize) -> Vec<f64> {
    let per_side = img.width() / patch;
    let pd = img.channels() * patch * patch;
    let mut out = vec![0.0; per_side * per_side * pd];
    for py in 0..per_side {
        for px in 0..per_side {
            let p = py * per_side + px;
            let base = p * pd;
            for c in 0..img.channels() {
                for dy in 0..patch {
                    for dx in 0..patch {
                        out[base + c * patch * patch + dy * patch + dx] =
                            img.get(px * patch + dx, py * patch + dy, c);
                    }
                }
            }
        }
    }
    out
}

/// Full forward pass. An empty anchor list skips injection entirely.
pub fn forward(state: &EncoderState, img: &Image, anchors: &[Vec<f64>]) -> Result<ForwardTrace> {
    let cfg = &state.cfg;
    if img.width() != cfg.image_side || img.height() != cfg.image_side {
        return Err(Error::InvalidInput(format!(
            "image must be {0}x{0} for this encoder",
            cfg.image_side
        )));
    }
    if img.channels() != cfg.in_channels {
        return Err(Error::InvalidInput(format!(
            "encoder expects {} channel(s), image has {}",
            cfg.in_channels,
            img.channels()
        )));
    }
    for a in anchors {
        if a.len() != cfg.d_model {
            return Err(Error::InvalidInput(
                "anchor embedding dimension differs from d_model".into(),
            ));
        }
    }
    let d = cfg.d_model;
    let t = cfg.tokens();
    let p = cfg.patch_count();
    let pd = cfg.patch_dim();
    let hidden = cfg.hidden();

    let patches = patchify(img, cfg.patch_size);
    let mut x = vec![0.0; t * d];
    x[..d].copy_from_slice(&state.cls);
    linear(&patches, &state.patch_w, &state.patch_b, p, pd, d, &mut x[d..]);
    for i in 0..t * d {
        x[i] += state.pos[i];
    }

    let mut layers = Vec::with_capacity(cfg.layers);
    for (l, lp) in state.layers.iter().enumerate() {
        let x_in = x;
        let mut ln1_out = vec![0.0; t * d];
        let mut ln1_mean = vec![0.0; t];
        let mut ln1_rstd = vec![0.0; t];
        layernorm(&x_in, &lp.ln1_g, &lp.ln1_b, t, d, &mut ln1_out, &mut ln1_mean, &mut ln1_rstd);
        let mut q = vec![0.0; t * d];
        let mut k = vec![0.0; t * d];
        let mut v = vec![0.0; t * d];
        linear(&ln1_out, &lp.wq, &lp.bq, t, d, d, &mut q);
        linear(&ln1_out, &lp.wk, &lp.bk, t, d, d, &mut k);
        linear(&ln1_out, &lp.wv, &lp.bv, t, d, d, &mut v);
        let mut att = vec![0.0; cfg.heads * t * t];
        let mut ctx = vec![0.0; t * d];
        attention(&q, &k, &v, t, t, cfg.heads, d, &mut att, &mut ctx);
        let mut attn_out = vec![0.0; t * d];
        linear(&ctx, &lp.wo, &lp.bo, t, d, d, &mut attn_out);
        let mut x_attn = vec![0.0; t * d];
        for i in 0..t * d {
            x_attn[i] = x_in[i] + attn_out[i];
        }

        let mut ln2_out = vec![0.0; t * d];
        let mut ln2_mean = vec![0.0; t];
        let mut ln2_rstd = vec![0.0; t];
        layernorm(&x_attn, &lp.ln2_g, &lp.ln2_b, t, d, &mut ln2_out, &mut ln2_mean, &mut ln2_rstd);
        let mut mlp_u = vec![0.0; t * hidden];
        linear(&ln2_out, &lp.w1, &lp.b1, t, d, hidden, &mut mlp_u);
        let mut mlp_z = vec![0.0; t * hidden];
        let mut mlp_tanh = vec![0.0; t * hidden];
        gelu(&mlp_u, &mut mlp_z, &mut mlp_tanh);
        let mut mlp_out = vec![0.0; t * d];
        linear(&mlp_z, &lp.w2, &lp.b2, t, hidden, d, &mut mlp_out);
        let mut x_mlp = vec![0.0; t * d];
        for i in 0..t * d {
            x_mlp[i] = x_attn[i] + mlp_out[i];
        }

        let apa = if l >= cfg.first_apa_layer() && !anchors.is_empty() {
            let ap = &state.apa[l - cfg.first_apa_layer()];
            let mut tr = cross_attention_traced(&x_mlp, t, anchors, ap, cfg.heads, d);
            tr.fused = gated_fuse(&x_mlp, &tr.xtilde, &ap.gate, t, d);
            Some(tr)
        } else {
            None
        };

        x = match &apa {
            Some(a) => a.fused.clone(),
            None => x_mlp.clone(),
        };
        layers.push(LayerTrace {
            x_in,
            ln1_mean,
            ln1_rstd,
            ln1_out,
            q,
            k,
            v,
            att,
            ctx,
            x_attn,
            ln2_mean,
            ln2_rstd,
            ln2_out,
            mlp_u,
            mlp_tanh,
            mlp_z,
            x_mlp,
            apa,
        });
    }

    // pooled feature: final layer norm applied to the class token alone
    let cls_row = &x[..d];
    let mu = cls_row.iter().sum::<f64>() / d as f64;
    let var = cls_row.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / d as f64;
    let rstd = 1.0 / (var + LN_EPS).sqrt();
    let feature: Vec<f64> = (0..d)
        .map(|i| (cls_row[i] - mu) * rstd * state.lnf_g[i] + state.lnf_b[i])
        .collect();

    Ok(ForwardTrace {
        version: state.version,
        patches,
        layers,
        anchors: anchors.to_vec(),
        lnf_mean: mu,
        lnf_rstd: rstd,
        feature,
    })
}
