use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates, one vector per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
}

impl AdamState {
    pub fn new(sizes: impl IntoIterator<Item = usize>) -> Self {
        let sizes: Vec<usize> = sizes.into_iter().collect();
        AdamState {
            m: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            v: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            t: 0,
        }
    }
}

/// One bias-corrected Adam update of `params` with `grads`.
pub fn adam_step<P, G>(params: &mut [P], grads: &[G], state: &mut AdamState, cfg: &AdamConfig)
where
    P: AsMut<[f32]>,
    G: AsRef<[f32]>,
{
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
        let (m, v) = (&mut state.m[k], &mut state.v[k]);
        for (i, (w, &gi)) in p.as_mut().iter_mut().zip(g.as_ref()).enumerate() {
            let gi = gi as f64;
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
            let step = cfg.learning_rate * (m[i] / c1) / ((v[i] / c2).sqrt() + cfg.eps);
            *w = (*w as f64 - step) as f32;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_weights() {
        let mut p = vec![vec![0.5f32, -1.0]];
        let mut s = AdamState::new([2]);
        adam_step(&mut p, &[vec![0.0f32, 0.0]], &mut s, &AdamConfig::default());
        assert_eq!(p[0], vec![0.5, -1.0]);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn first_step_is_lr_times_sign() {
        let mut p = vec![vec![0.0f32; 4]];
        let mut s = AdamState::new([4]);
        adam_step(&mut p, &[vec![3.0f32, -0.2, 1e-3, -50.0]], &mut s, &AdamConfig::default());
        for (w, sign) in p[0].iter().zip([-1.0, 1.0, -1.0, 1.0]) {
            assert!((*w as f64 - sign * 1e-3).abs() < 1e-6, "{w}");
        }
    }

    #[test]
    fn matches_scalar_reference() {
        let cfg = AdamConfig::default();
        let grads = [0.3, -0.1, 0.7, 0.7, -2.0];
        let (mut w, mut m, mut v) = (0.2f64, 0.0f64, 0.0f64);
        for (t, g) in grads.iter().enumerate() {
            let t = (t + 1) as i32;
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g * g;
            w -= 1e-3 * (m / (1.0 - 0.9f64.powi(t))) / ((v / (1.0 - 0.999f64.powi(t))).sqrt() + 1e-8);
        }
        let mut p = vec![vec![0.2f32]];
        let mut s = AdamState::new([1]);
        for g in grads {
            adam_step(&mut p, &[vec![g as f32]], &mut s, &cfg);
        }
        assert!((p[0][0] as f64 - w).abs() < 1e-6);
        assert_eq!(s.t, 5);
    }
}
