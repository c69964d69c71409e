use super::*;
use crate::anchors::MatchedAnchor;
use crate::indicators::{Channel, CHANNELS};

fn matched_for(dims: &[Dimension]) -> Vec<MatchedAnchor> {
    dims.iter()
        .map(|d| {
            let ch = *CHANNELS.iter().find(|c| c.dimension == *d).unwrap();
            MatchedAnchor {
                channel: ch,
                polarity: Polarity::Fake,
                text: String::new(),
                embedding: vec![0.0; 8],
                score: 0.0,
            }
        })
        .collect()
}

#[test]
fn ind_target_real_is_zero_vector() {
    let matched = matched_for(&[Dimension::Blur, Dimension::Texture]);
    assert_eq!(make_ind_target(Polarity::Real, &matched), [false; 5]);
}

#[test]
fn ind_target_fake_unions_dimensions() {
    // two blur anchors (different regions) plus one color anchor
    let eyes_blur = Channel::new(crate::indicators::Region::Eyes, Dimension::Blur).unwrap();
    let nose_blur = Channel::new(crate::indicators::Region::Nose, Dimension::Blur).unwrap();
    let eyes_color = Channel::new(crate::indicators::Region::Eyes, Dimension::Color).unwrap();
    let matched: Vec<MatchedAnchor> = [eyes_blur, nose_blur, eyes_color]
        .into_iter()
        .map(|ch| MatchedAnchor {
            channel: ch,
            polarity: Polarity::Fake,
            text: String::new(),
            embedding: vec![0.0; 8],
            score: 0.0,
        })
        .collect();
    let y = make_ind_target(Polarity::Fake, &matched);
    assert_eq!(y, [true, true, false, false, false]);
}

#[test]
fn ind_target_all_dimensions_distinct() {
    let matched = matched_for(&Dimension::ALL);
    assert_eq!(make_ind_target(Polarity::Fake, &matched), [true; 5]);
}

#[test]
fn cls_loss_uniform_logits_is_ln2() {
    let ln2 = std::f64::consts::LN_2;
    assert!((loss_cls(&[0.0, 0.0], 0) - ln2).abs() < 1e-15);
    assert!((loss_cls(&[0.0, 0.0], 1) - ln2).abs() < 1e-15);
    assert!((loss_cls(&[3.3, 3.3], 0) - ln2).abs() < 1e-15);
}

#[test]
fn cls_loss_saturated_is_tiny() {
    assert!(loss_cls(&[30.0, -30.0], 0) < 1e-12);
    assert!(loss_cls(&[30.0, -30.0], 1) > 10.0);
}

#[test]
fn cls_loss_matches_scalar_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let logits: [f64; 2] = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let y = rng.gen_range(0..2usize);
        let z: f64 = logits.iter().map(|l| l.exp()).sum();
        let expect = -(logits[y].exp() / z).ln();
        assert!((loss_cls(&logits, y) - expect).abs() <= 1e-12);
        assert!(loss_cls(&logits, y) >= 0.0);
    }
}

#[test]
fn ind_loss_zero_logits_is_ln2() {
    let ln2 = std::f64::consts::LN_2;
    assert!((loss_ind(&[0.0; 5], &[false; 5]) - ln2).abs() < 1e-15);
    assert!((loss_ind(&[0.0; 5], &[true; 5]) - ln2).abs() < 1e-15);
}

#[test]
fn ind_loss_saturated_correct_is_tiny() {
    assert!(loss_ind(&[30.0; 5], &[true; 5]) < 1e-12);
}

#[test]
fn ind_loss_matches_scalar_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let mut logits = [0.0f64; 5];
        let mut target = [false; 5];
        for i in 0..5 {
            logits[i] = rng.gen_range(-6.0..6.0);
            target[i] = rng.gen_bool(0.5);
        }
        let mut expect = 0.0;
        for i in 0..5 {
            let p = 1.0 / (1.0 + (-logits[i]).exp());
            let y = if target[i] { 1.0 } else { 0.0 };
            expect += -(y * p.ln() + (1.0 - y) * (1.0 - p).ln());
        }
        expect /= 5.0;
        assert!((loss_ind(&logits, &target) - expect).abs() <= 1e-12);
        assert!(loss_ind(&logits, &target) >= 0.0);
    }
}

#[test]
fn dis_loss_identities() {
    let a = vec![1.0, 2.0, 3.0];
    assert_eq!(loss_dis(&a, &a).unwrap(), 0.0);
    let mut b = a.clone();
    b[1] += 1.0;
    assert_eq!(loss_dis(&a, &b).unwrap(), 1.0);
    assert!(loss_dis(&a, &[1.0, 2.0]).is_err());
}

#[test]
fn dis_loss_matches_dot_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let a: Vec<f64> = (0..16).map(|_| rng.gen::<f64>()).collect();
    let b: Vec<f64> = (0..16).map(|_| rng.gen::<f64>()).collect();
    let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let expect: f64 = diff.iter().map(|d| d * d).sum();
    assert!((loss_dis(&a, &b).unwrap() - expect).abs() <= 1e-12);
}

#[test]
fn total_loss_compositions() {
    assert_eq!(loss_total(0.0, 0.0, 0.0, 0.1, 1.0), 0.0);
    assert!((loss_total(1.0, 1.0, 1.0, 0.1, 1.0) - 2.1).abs() < 1e-15);
    // first task: distillation defined as zero
    assert_eq!(loss_total(0.7, 0.3, 0.0, 0.1, 1.0), 0.7 + 0.1 * 0.3);
}

#[test]
fn config_file_round_trip_and_rejects_unknown_keys() {
    let text = "epochs=10\nlr=8e-5\nmu1=0.1\nmu2=1\nn_warmup=2\nn_anchors=3\nseed=42\nbatch=16\n";
    let cfg = TrainConfig::from_key_values(text).unwrap();
    assert_eq!(cfg.epochs, 10);
    assert_eq!(cfg.batch, 16);
    assert_eq!(cfg.lr, 8e-5);
    assert_eq!(cfg.warmup_epochs, 2);
    assert_eq!(cfg.seed, 42);
    assert!(TrainConfig::from_key_values("bogus=1\n").is_err());
    assert!(TrainConfig::from_key_values("epochs=2\nn_warmup=5\n").is_err());
}
