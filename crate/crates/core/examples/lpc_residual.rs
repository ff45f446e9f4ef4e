//! LPC analysis of a formant-filtered pulse train and the whitened residual
//! that the cross-correlation features are computed on.

use pitchkit::audio::AudioClip;
use pitchkit::features::lpc::{autocorrelation, lpc_analyze, lpc_residual, DEFAULT_ORDER};

fn main() -> pitchkit::error::Result<()> {
    // 125 Hz pulses through two resonances at 700 and 1200 Hz.
    let n = 4_800;
    let mut y = vec![0.0f64; n];
    let poles = [(700.0, 0.97), (1200.0, 0.95)];
    let mut x: Vec<f64> = (0..n).map(|i| if i % 128 == 0 { 1.0 } else { 0.0 }).collect();
    for &(f, r) in &poles {
        let w = 2.0 * std::f64::consts::PI * f / 16_000.0;
        let (a1, a2) = (2.0 * r * w.cos(), -r * r);
        for i in 0..n {
            y[i] = x[i] + a1 * if i > 0 { y[i - 1] } else { 0.0 } + a2 * if i > 1 { y[i - 2] } else { 0.0 };
        }
        x.clone_from(&y);
    }
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let clip = AudioClip::from_samples(x.iter().map(|v| (0.5 * v / peak) as f32).collect())?;

    let ctx: Vec<f64> = clip.samples().iter().map(|&s| s as f64).collect();
    let lpc = lpc_analyze(&ctx, DEFAULT_ORDER)?;
    println!("order {} LPC, minimum phase: {}", lpc.order(), lpc.is_minimum_phase());
    println!("first reflection coefficients: {:?}", lpc.reflection()[..4].iter().map(|k| format!("{k:.3}")).collect::<Vec<_>>());

    let residual = lpc_residual(&clip, &lpc);
    let gain = 10.0 * (clip.energy() / residual.energy()).log10();
    println!("prediction gain {gain:.1} dB");

    // The residual keeps the excitation: its autocorrelation peaks at 128.
    let r = autocorrelation(&residual.samples().iter().map(|&s| s as f64).collect::<Vec<_>>(), 256);
    let lag = (32..=256).max_by(|&a, &b| r[a].total_cmp(&r[b])).unwrap();
    println!("residual autocorrelation peak at lag {lag} (period 128)");
    Ok(())
}
