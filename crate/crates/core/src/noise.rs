//! Driving noise: Q-Wiener increments on a time grid and finite-activity
//! compensated-Poisson jump streams, recorded as an immutable `NoisePath`
//! that both sides of every residual check replay.
//!
//! Sampling is pure given (spec, grid, seed). Wiener and jump streams come
//! from independent ChaCha streams of the same seed, and per-path streams in
//! Monte Carlo drivers are derived from the path index, so path generation
//! is reproducible and parallelizable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::stats::mean_stderr;

/// Truncated trace-class covariance: the eigenvalues of Q on the noise space.
#[derive(Debug, Clone, PartialEq)]
pub struct QWienerSpec {
    eigenvalues: Vec<f64>,
}

impl QWienerSpec {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidArgument(
                "covariance needs at least one eigenvalue".into(),
            ));
        }
        for (j, &l) in eigenvalues.iter().enumerate() {
            if !l.is_finite() || l < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "covariance eigenvalue {j} must be finite and >= 0, got {l}"
                )));
            }
        }
        Ok(Self { eigenvalues })
    }

    pub fn k_dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// One atom of the jump intensity measure: a nonzero mark with its rate.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyAtom {
    pub mark: Vec<f64>,
    pub mass: f64,
}

/// Finite-activity atomic intensity measure on the mark space.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyMeasureSpec {
    mark_dim: usize,
    atoms: Vec<LevyAtom>,
}

impl LevyMeasureSpec {
    pub fn new(mark_dim: usize, atoms: Vec<LevyAtom>) -> Result<Self> {
        if mark_dim == 0 {
            return Err(Error::InvalidArgument("mark_dim must be >= 1".into()));
        }
        for (i, atom) in atoms.iter().enumerate() {
            if atom.mark.len() != mark_dim {
                return Err(Error::DimensionMismatch {
                    what: "jump mark",
                    expected: mark_dim,
                    got: atom.mark.len(),
                });
            }
            if !atom.mass.is_finite() || atom.mass <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "atom {i} mass must be finite and > 0, got {}",
                    atom.mass
                )));
            }
            if atom.mark.iter().all(|&c| c == 0.0) {
                return Err(Error::InvalidArgument(format!("atom {i} mark is zero")));
            }
            if atom.mark.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "atom {i} mark has a non-finite coordinate"
                )));
            }
        }
        Ok(Self { mark_dim, atoms })
    }

    /// Measure with no atoms (no jumps).
    pub fn empty(mark_dim: usize) -> Result<Self> {
        Self::new(mark_dim, Vec::new())
    }

    pub fn mark_dim(&self) -> usize {
        self.mark_dim
    }

    pub fn atoms(&self) -> &[LevyAtom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

/// One realized jump: its time in (0, T] and the atom it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub atom: usize,
}

/// A recorded noise realization on a time grid: Wiener increments per step
/// and the merged, time-sorted jump events. Immutable once sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    t_grid: Vec<f64>,
    dw: Vec<Vec<f64>>,
    jumps: Vec<JumpEvent>,
    seed: u64,
}

fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidArgument(
            "time grid needs at least two nodes".into(),
        ));
    }
    if t_grid[0] != 0.0 {
        return Err(Error::InvalidArgument("time grid must start at 0".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonIncreasingGrid);
    }
    Ok(())
}

/// Uniform grid 0 = t_0 < ... < t_M = T.
pub fn uniform_grid(t_final: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_final > 0.0) || steps == 0 {
        return Err(Error::InvalidArgument(
            "horizon must be positive and steps >= 1".into(),
        ));
    }
    Ok((0..=steps)
        .map(|m| t_final * m as f64 / steps as f64)
        .collect())
}

fn wiener_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * path_index);
    rng
}

fn jump_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * path_index + 1);
    rng
}

/// Independent Gaussian increment rows; row m has covariance dt_m diag(lambda).
pub fn sample_wiener_increments(
    spec: &QWienerSpec,
    t_grid: &[f64],
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    validate_grid(t_grid)?;
    let mut rng = wiener_rng(seed, 0);
    Ok(sample_wiener_with(spec, t_grid, &mut rng))
}

fn sample_wiener_with(spec: &QWienerSpec, t_grid: &[f64], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    t_grid
        .windows(2)
        .map(|w| {
            let dt = w[1] - w[0];
            spec.eigenvalues
                .iter()
                .map(|&l| {
                    let z: f64 = rng.sample(StandardNormal);
                    (l * dt).sqrt() * z
                })
                .collect()
        })
        .collect()
}

/// Superposed Poisson processes, one per atom, merged and sorted by time.
pub fn sample_jump_stream(
    spec: &LevyMeasureSpec,
    t_final: f64,
    seed: u64,
) -> Result<Vec<JumpEvent>> {
    if !(t_final > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be > 0, got {t_final}"
        )));
    }
    let mut rng = jump_rng(seed, 0);
    Ok(sample_jumps_with(spec, t_final, &mut rng))
}

fn sample_jumps_with(spec: &LevyMeasureSpec, t_final: f64, rng: &mut ChaCha8Rng) -> Vec<JumpEvent> {
    let mut events = Vec::new();
    for (i, atom) in spec.atoms.iter().enumerate() {
        let count = Poisson::new(atom.mass * t_final)
            .expect("positive rate")
            .sample(rng) as u64;
        for _ in 0..count {
            let u: f64 = rng.random();
            // u in [0,1) maps to a time in (0, T]
            events.push(JumpEvent {
                time: t_final * (1.0 - u),
                atom: i,
            });
        }
    }
    events.sort_by(|a, b| (a.time, a.atom).partial_cmp(&(b.time, b.atom)).unwrap());
    events
}

impl NoisePath {
    /// Sample a full realization. Wiener and jump streams are independent.
    pub fn sample(
        qspec: &QWienerSpec,
        levy: &LevyMeasureSpec,
        t_grid: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        Self::sample_indexed(qspec, levy, t_grid, seed, 0)
    }

    /// Sample the `path_index`-th member of a path family: same seed,
    /// disjoint ChaCha streams per index.
    pub fn sample_indexed(
        qspec: &QWienerSpec,
        levy: &LevyMeasureSpec,
        t_grid: Vec<f64>,
        seed: u64,
        path_index: u64,
    ) -> Result<Self> {
        validate_grid(&t_grid)?;
        let t_final = *t_grid.last().unwrap();
        let mut wrng = wiener_rng(seed, path_index);
        let mut jrng = jump_rng(seed, path_index);
        let dw = sample_wiener_with(qspec, &t_grid, &mut wrng);
        let jumps = sample_jumps_with(levy, t_final, &mut jrng);
        Ok(Self {
            t_grid,
            dw,
            jumps,
            seed,
        })
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn t_final(&self) -> f64 {
        *self.t_grid.last().unwrap()
    }

    pub fn steps(&self) -> usize {
        self.t_grid.len() - 1
    }

    pub fn dw(&self) -> &[Vec<f64>] {
        &self.dw
    }

    pub fn jumps(&self) -> &[JumpEvent] {
        &self.jumps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// For each step m, the index range of events with time in (t_m, t_{m+1}].
    pub fn step_event_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut ranges = Vec::with_capacity(self.steps());
        let mut lo = 0;
        for m in 0..self.steps() {
            let hi_time = self.t_grid[m + 1];
            let mut hi = lo;
            while hi < self.jumps.len() && self.jumps[hi].time <= hi_time {
                hi += 1;
            }
            ranges.push(lo..hi);
            lo = hi;
        }
        ranges
    }

    /// Halve the grid resolution: pairwise-summed Wiener increments, same
    /// jump events. Used for paired-refinement studies on common noise.
    pub fn coarsen(&self) -> Result<NoisePath> {
        let m = self.steps();
        if m % 2 != 0 {
            return Err(Error::InvalidArgument(
                "coarsening needs an even number of steps".into(),
            ));
        }
        let t_grid: Vec<f64> = self.t_grid.iter().step_by(2).copied().collect();
        let dw = self
            .dw
            .chunks(2)
            .map(|pair| {
                pair[0]
                    .iter()
                    .zip(&pair[1])
                    .map(|(a, b)| a + b)
                    .collect::<Vec<f64>>()
            })
            .collect();
        Ok(NoisePath {
            t_grid,
            dw,
            jumps: self.jumps.clone(),
            seed: self.seed,
        })
    }

    /// Serialize for exact replay. Floats use the shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("seed,{}\n", self.seed));
        out.push_str(&format!("kdim,{}\n", self.dw.first().map_or(0, |r| r.len())));
        for t in &self.t_grid {
            out.push_str(&format!("grid,{t}\n"));
        }
        for row in &self.dw {
            out.push('w');
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        for j in &self.jumps {
            out.push_str(&format!("jump,{},{}\n", j.time, j.atom));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut seed = 0u64;
        let mut t_grid = Vec::new();
        let mut dw = Vec::new();
        let mut jumps = Vec::new();
        let bad = |line: &str| Error::InvalidArgument(format!("bad noise record: {line}"));
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            match parts.next() {
                Some("seed") => {
                    seed = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad(line))?
                }
                Some("kdim") => {}
                Some("grid") => t_grid.push(
                    parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad(line))?,
                ),
                Some("w") => {
                    let row: std::result::Result<Vec<f64>, _> =
                        parts.map(|s| s.parse::<f64>()).collect();
                    dw.push(row.map_err(|_| bad(line))?);
                }
                Some("jump") => {
                    let time = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad(line))?;
                    let atom = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad(line))?;
                    jumps.push(JumpEvent { time, atom });
                }
                _ => return Err(bad(line)),
            }
        }
        validate_grid(&t_grid)?;
        if dw.len() != t_grid.len() - 1 {
            return Err(Error::InvalidArgument(
                "noise record has wrong number of increment rows".into(),
            ));
        }
        Ok(NoisePath {
            t_grid,
            dw,
            jumps,
            seed,
        })
    }
}

/// Compensated sum of g over a realized jump stream:
/// sum over events of g(mark) minus dt_total * sum_i mass_i g(mark_i).
pub fn cprm_integral<G: Fn(&[f64]) -> f64>(
    spec: &LevyMeasureSpec,
    jumps: &[JumpEvent],
    dt_total: f64,
    g: G,
) -> f64 {
    let realized: f64 = jumps.iter().map(|j| g(&spec.atoms[j.atom].mark)).sum();
    let compensator: f64 = spec.atoms.iter().map(|a| a.mass * g(&a.mark)).sum();
    realized - dt_total * compensator
}

/// Outcome of the second-moment identity check E(q(A x B))^2 = beta(A) lambda(B).
#[derive(Debug, Clone)]
pub struct IsometryReport {
    pub empirical_second_moment: f64,
    pub theoretical: f64,
    pub stderr: f64,
    pub z: f64,
    pub trials: usize,
    pub pass: bool,
}

fn isometry_audit_impl(
    spec: &LevyMeasureSpec,
    t_final: f64,
    trials: usize,
    seed: u64,
    drop_compensator: bool,
) -> Result<IsometryReport> {
    if trials < 1000 {
        return Err(Error::InvalidArgument(format!(
            "isometry audit needs at least 1000 trials, got {trials}"
        )));
    }
    if !(t_final > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be > 0, got {t_final}"
        )));
    }
    let theoretical = spec.total_mass() * t_final;
    let mut squares = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = jump_rng(seed, trial as u64);
        let events = sample_jumps_with(spec, t_final, &mut rng);
        let q = if drop_compensator {
            events.len() as f64
        } else {
            cprm_integral(spec, &events, t_final, |_| 1.0)
        };
        squares.push(q * q);
    }
    let (empirical, stderr) = mean_stderr(&squares);
    let z = crate::stats::z_score(empirical, stderr, theoretical);
    Ok(IsometryReport {
        empirical_second_moment: empirical,
        theoretical,
        stderr,
        z,
        trials,
        pass: z.abs() < 4.0,
    })
}

/// Monte Carlo check of the defining identity of the compensated measure,
/// with A the whole atom set and B = (0, T].
pub fn isometry_audit(
    spec: &LevyMeasureSpec,
    t_final: f64,
    trials: usize,
    seed: u64,
) -> Result<IsometryReport> {
    isometry_audit_impl(spec, t_final, trials, seed, false)
}

/// Negative control: same audit with the compensator term dropped, so the
/// report must fail for any nonempty atom set. Confirms the audit detects a
/// broken compensator.
pub fn isometry_audit_negative_control(
    spec: &LevyMeasureSpec,
    t_final: f64,
    trials: usize,
    seed: u64,
) -> Result<IsometryReport> {
    isometry_audit_impl(spec, t_final, trials, seed, true)
}
