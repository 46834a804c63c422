//! Seeded synthetic six-axis traces with known labels, clean signals and
//! injected spikes.
//!
//! Active behaviors are sums of sinusoids: a 1 Hz component whose
//! per-channel pattern separates some classes and a strong 7.5 Hz component
//! whose pattern separates others. A 5 Hz low-pass erases the second, while
//! heavy noise with a segment-dependent level blurs the first unless it is
//! removed. Inactive behaviors are constant postures in even heavier noise.
//! This split is a construction that makes routed filtering measurably
//! useful; it is not a claim about real animals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data_model::{
    ActivityGroup, Behavior, ImuRecording, LabelInterval, LabelTrack, CHANNEL_COUNT, CHANNEL_NAMES,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub freq_hz: f64,
    /// Peak amplitude on each channel.
    pub amplitude: [f64; CHANNEL_COUNT],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorModel {
    pub behavior: Behavior,
    pub baseline: [f64; CHANNEL_COUNT],
    pub harmonics: Vec<Harmonic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub behavior: Behavior,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub fs_hz: f64,
    /// Used to draw a random schedule when `schedule` is empty.
    pub duration_s: f64,
    pub schedule: Vec<Segment>,
    /// Random schedules draw segment lengths uniformly from this range.
    pub segment_s: (f64, f64),
    /// Behaviors a random schedule draws from, uniformly.
    pub behaviors: Vec<Behavior>,
    pub models: Vec<BehaviorModel>,
    pub noise_active: f64,
    pub noise_inactive: f64,
    /// Each segment scales every harmonic amplitude by a factor drawn from
    /// `1 ± amplitude_jitter`, its frequencies by `1 ± freq_jitter`, and its
    /// baseline by additive `± baseline_jitter`.
    pub amplitude_jitter: f64,
    pub freq_jitter: f64,
    pub baseline_jitter: f64,
    /// Each segment scales its noise sigma by a factor from `1 ± noise_jitter`.
    pub noise_jitter: f64,
    /// Per-sample probability of a spike on one random channel.
    pub spike_rate: f64,
    pub spike_magnitude: f64,
    pub seed: u64,
}

fn tri(x: f64, y: f64, z: f64) -> [f64; CHANNEL_COUNT] {
    [x, y, z, 0.0, 0.0, 0.0]
}

fn h(freq_hz: f64, amplitude: [f64; CHANNEL_COUNT]) -> Harmonic {
    Harmonic { freq_hz, amplitude }
}

/// Default signal models, one per behavior.
///
/// Active behaviors mix a 1 Hz component with a 7.5 Hz one. Eating and
/// Walking share the slow pattern and differ only in the fast one; Eating
/// and Interacting share the fast pattern and differ only in the slow one.
pub fn default_models() -> Vec<BehaviorModel> {
    use Behavior::*;
    let m = |behavior, baseline, harmonics| BehaviorModel {
        behavior,
        baseline,
        harmonics,
    };
    let slow_a = h(1.0, [0.30, 0.10, 0.20, 0.30, 0.10, 0.20]);
    let slow_b = h(1.0, [0.10, 0.30, 0.20, 0.10, 0.30, 0.20]);
    let fast_a = h(7.5, [1.20, 0.0, 0.0, 1.20, 0.0, 0.0]);
    let fast_b = h(7.5, [0.0, 0.0, 1.20, 0.0, 0.0, 1.20]);
    let posture = tri(0.25, 0.05, 0.95);
    vec![
        m(Eating, posture, vec![slow_a.clone(), fast_a.clone()]),
        m(Lying, tri(0.0, 0.95, 0.20), vec![]),
        m(Walking, posture, vec![slow_a, fast_b]),
        m(Standing, posture, vec![]),
        m(Interacting, posture, vec![slow_b.clone(), fast_a]),
        m(Drinking, tri(0.35, 0.0, 0.85), vec![slow_b]),
        m(Unknown, tri(0.0, 0.0, 1.0), vec![]),
    ]
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            fs_hz: 50.0,
            duration_s: 1200.0,
            schedule: Vec::new(),
            segment_s: (6.0, 20.0),
            behaviors: Behavior::CLASSIFIED.to_vec(),
            models: default_models(),
            noise_active: 0.3,
            noise_inactive: 0.4,
            amplitude_jitter: 0.3,
            freq_jitter: 0.05,
            baseline_jitter: 0.05,
            noise_jitter: 0.8,
            spike_rate: 0.0,
            spike_magnitude: 3.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.fs_hz > 0.0 && self.fs_hz.is_finite()) {
            return bad(format!("fs_hz must be positive, got {}", self.fs_hz));
        }
        if self.schedule.is_empty() {
            if !(self.duration_s > 0.0) {
                return bad("duration_s must be positive".into());
            }
            if self.behaviors.is_empty() {
                return bad("random schedule needs at least one behavior".into());
            }
            let (lo, hi) = self.segment_s;
            if !(lo > 0.0 && hi >= lo) {
                return bad(format!("segment_s range ({lo}, {hi}) is invalid"));
            }
        }
        if let Some(s) = self.schedule.iter().find(|s| !(s.duration_s > 0.0 && s.duration_s.is_finite())) {
            return bad(format!("segment duration must be positive, got {}", s.duration_s));
        }
        if !(0.0..=1.0).contains(&self.spike_rate) {
            return bad(format!("spike_rate must be in [0, 1], got {}", self.spike_rate));
        }
        for (name, v) in [
            ("noise_active", self.noise_active),
            ("noise_inactive", self.noise_inactive),
            ("spike_magnitude", self.spike_magnitude),
            ("baseline_jitter", self.baseline_jitter),
            ("freq_jitter", self.freq_jitter),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be >= 0, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.noise_jitter) {
            return bad(format!("noise_jitter must be in [0, 1), got {}", self.noise_jitter));
        }
        if !(0.0..1.0).contains(&self.amplitude_jitter) {
            return bad(format!("amplitude_jitter must be in [0, 1), got {}", self.amplitude_jitter));
        }
        for b in self.schedule.iter().map(|s| s.behavior).chain(self.behaviors.iter().copied()) {
            if self.model(b).is_none() {
                return bad(format!("no signal model for {b}"));
            }
        }
        Ok(())
    }

    pub fn model(&self, b: Behavior) -> Option<&BehaviorModel> {
        self.models.iter().find(|m| m.behavior == b)
    }

    pub fn noise_for(&self, b: Behavior) -> f64 {
        match b.group() {
            ActivityGroup::Active => self.noise_active,
            ActivityGroup::Inactive => self.noise_inactive,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthTruth {
    pub clean: ImuRecording,
    pub noisy: ImuRecording,
    pub labels: LabelTrack,
    /// Sample indices that received a spike, ascending.
    pub spike_indices: Vec<usize>,
    /// Channel hit by each spike, parallel to `spike_indices`.
    pub spike_channels: Vec<usize>,
    pub schedule: Vec<Segment>,
}

fn draw_schedule(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut total = 0.0;
    let (lo, hi) = cfg.segment_s;
    while total < cfg.duration_s {
        let behavior = cfg.behaviors[rng.random_range(0..cfg.behaviors.len())];
        let d = if hi > lo { rng.random_range(lo..hi) } else { lo };
        // whole samples keep label edges on the sample grid
        let d = ((d.min(cfg.duration_s - total)) * cfg.fs_hz).round().max(1.0) / cfg.fs_hz;
        out.push(Segment { behavior, duration_s: d });
        total += d;
    }
    out
}

fn symmetric(rng: &mut ChaCha8Rng, width: f64) -> f64 {
    if width > 0.0 {
        rng.random_range(-width..width)
    } else {
        0.0
    }
}

/// Generates one recording. Separate generator streams drive the schedule,
/// the segment parameters, the noise and the spikes, so changing one knob
/// does not reshuffle the others.
pub fn generate(cfg: &SynthConfig) -> Result<SynthTruth> {
    cfg.validate()?;
    let stream = |s: u64| {
        let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
        r.set_stream(s);
        r
    };
    let mut sched_rng = stream(1);
    let mut param_rng = stream(2);
    let mut noise_rng = stream(3);
    let mut spike_rng = stream(4);

    let schedule = if cfg.schedule.is_empty() {
        draw_schedule(cfg, &mut sched_rng)
    } else {
        cfg.schedule.clone()
    };
    let dt_ms = 1000.0 / cfg.fs_hz;

    let mut clean: [Vec<f64>; CHANNEL_COUNT] = Default::default();
    let mut noisy: [Vec<f64>; CHANNEL_COUNT] = Default::default();
    let mut intervals = Vec::with_capacity(schedule.len());
    let mut start_sample = 0usize;
    for seg in &schedule {
        let n = (seg.duration_s * cfg.fs_hz).round() as usize;
        let model = cfg.model(seg.behavior).expect("validated");
        let baseline: [f64; CHANNEL_COUNT] = std::array::from_fn(|c| {
            if model.harmonics.is_empty() && c >= 3 {
                model.baseline[c]
            } else {
                model.baseline[c] + symmetric(&mut param_rng, cfg.baseline_jitter)
            }
        });
        let harmonics: Vec<(f64, f64, [f64; CHANNEL_COUNT])> = model
            .harmonics
            .iter()
            .map(|hm| {
                let f = hm.freq_hz * (1.0 + symmetric(&mut param_rng, cfg.freq_jitter));
                let scale = 1.0 + symmetric(&mut param_rng, cfg.amplitude_jitter);
                let phase = param_rng.random_range(0.0..std::f64::consts::TAU);
                (f, phase, hm.amplitude.map(|a| a * scale))
            })
            .collect();
        let sigma = cfg.noise_for(seg.behavior) * (1.0 + symmetric(&mut param_rng, cfg.noise_jitter));
        for i in 0..n {
            let t = (start_sample + i) as f64 / cfg.fs_hz;
            for c in 0..CHANNEL_COUNT {
                let mut v = baseline[c];
                for (f, phase, amp) in &harmonics {
                    v += amp[c] * (std::f64::consts::TAU * f * t + phase + c as f64).sin();
                }
                let e: f64 = StandardNormal.sample(&mut noise_rng);
                clean[c].push(v);
                noisy[c].push(v + sigma * e);
            }
        }
        let t0 = start_sample as f64 * dt_ms;
        intervals.push(LabelInterval::new(t0, t0 + n as f64 * dt_ms, seg.behavior));
        start_sample += n;
    }

    let mut spike_indices = Vec::new();
    let mut spike_channels = Vec::new();
    if cfg.spike_rate > 0.0 {
        for i in 0..start_sample {
            if spike_rng.random_bool(cfg.spike_rate) {
                let c = spike_rng.random_range(0..CHANNEL_COUNT);
                let sign = if spike_rng.random_bool(0.5) { 1.0 } else { -1.0 };
                noisy[c][i] += sign * cfg.spike_magnitude;
                spike_indices.push(i);
                spike_channels.push(c);
            }
        }
    }

    let clean = ImuRecording::from_channels(&clean, cfg.fs_hz, 0.0)?.with_ids("synth", format!("seed{}", cfg.seed));
    let noisy = ImuRecording::from_channels(&noisy, cfg.fs_hz, 0.0)?.with_ids("synth", format!("seed{}", cfg.seed));
    Ok(SynthTruth {
        clean,
        noisy,
        labels: LabelTrack::new(intervals)?,
        spike_indices,
        spike_channels,
        schedule,
    })
}

impl SynthTruth {
    /// `index,channel` CSV of spiked samples.
    pub fn spikes_csv(&self) -> String {
        let mut s = String::from("index,channel\n");
        for (i, c) in self.spike_indices.iter().zip(&self.spike_channels) {
            s.push_str(&format!("{i},{}\n", CHANNEL_NAMES[*c]));
        }
        s
    }
}
