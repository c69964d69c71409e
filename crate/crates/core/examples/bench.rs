use iffd_core::encoder::*;
use iffd_core::imgstat::Image;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn main() {
    let cfg = EncoderConfig {
        image_side: 64, in_channels: 3, patch_size: 8, d_model: 32,
        layers: 4, heads: 4, mlp_ratio: 4, apa_layers: 2,
        gate_mode: GateMode::Learnable,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let state = EncoderState::init(cfg, 1).unwrap();
    let img = Image::new(64, 64, 3, (0..64*64*3).map(|_| rng.gen()).collect()).unwrap();
    let anchors: Vec<Vec<f64>> = (0..3).map(|_| {
        let v: Vec<f64> = (0..32).map(|_| rng.gen::<f64>() - 0.5).collect();
        let n = v.iter().map(|x| x*x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x/n).collect()
    }).collect();

    let iters = 200;
    let t0 = Instant::now();
    let mut acc = 0.0;
    for _ in 0..iters {
        let tr = forward(&state, &img, &anchors).unwrap();
        acc += tr.feature[0];
    }
    let fwd_ms = t0.elapsed().as_secs_f64() * 1000.0 / iters as f64;

    let trace = forward(&state, &img, &anchors).unwrap();
    let mut grads = state.zeros_like();
    let t1 = Instant::now();
    for _ in 0..iters {
        backward(&state, &trace, &trace.feature, &mut grads).unwrap();
    }
    let bwd_ms = t1.elapsed().as_secs_f64() * 1000.0 / iters as f64;
    println!("fwd {fwd_ms:.3} ms, bwd {bwd_ms:.3} ms (acc {acc:.3})");
    // projected: criterion 9 = 83200 steps * (fwd + bwd + 0.5*teacher fwd + 0.8*0.5*prelim)
    let per_step = fwd_ms + bwd_ms + 0.5*fwd_ms + 0.8*0.5*fwd_ms;
    println!("projected criterion-9 train cost: {:.1} min", 83200.0 * per_step / 1000.0 / 60.0);
}
