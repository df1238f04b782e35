//! Explicit finite-difference solver for `u_t = a(u) Δu` with homogeneous
//! Dirichlet data, plus support-front detection and a weak-form residual.
//!
//! The scheme is forward Euler on a uniform mesh,
//!
//! ```text
//!     u_i ← u_i (1 − θ_i) + dt·a(u_i)·(c⁻_i u_{i−1} + c⁺_i u_{i+1}),
//!     θ_i = dt·a(u_i)·(c⁻_i + c⁺_i),
//! ```
//!
//! written as a convex combination: under the step bound `θ_i ≤ 2·CFL_SAFE`
//! every update is a nonnegative blend of nonnegative values, so
//! positivity and the discrete maximum principle hold structurally, not
//! just in exact arithmetic. Vacuum nodes are frozen by `a(0) = 0` with no
//! regularization, which preserves the discrete support exactly — the
//! property the front detector relies on.
//!
//! Radial geometry uses the conservative flux form
//! `(r^{N−1} u')' / r^{N−1}` on half-integer radii (nonnegative
//! off-diagonal weights for every `N`) and the symmetric origin stencil
//! `Δu ≈ 2N(u₁ − u₀)/dr²`.

use std::io::Write as IoWrite;

use serde::{Deserialize, Serialize};

use crate::coefficients::Coefficient;
use crate::error::{Error, Result};
use crate::weights::WeightPair;

/// Spatial domain: an interval with two Dirichlet ends, or a radially
/// symmetric ball (Dirichlet at `r = R`, symmetry at the origin).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    Interval { lo: f64, hi: f64 },
    RadialBall { radius: f64, dim: u32 },
}

/// Uniform mesh over a [`Geometry`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Mesh {
    pub geometry: Geometry,
    pub n_nodes: usize,
}

impl Mesh {
    pub fn new(geometry: Geometry, n_nodes: usize) -> Result<Self> {
        if n_nodes < 3 {
            return Err(Error::Parameter(format!("mesh needs at least 3 nodes, got {n_nodes}")));
        }
        match geometry {
            Geometry::Interval { lo, hi } => {
                if !(hi > lo) {
                    return Err(Error::Parameter(format!("interval [{lo}, {hi}] is empty")));
                }
            }
            Geometry::RadialBall { radius, dim } => {
                if !(radius > 0.0) {
                    return Err(Error::Parameter(format!("ball radius must be positive, got {radius}")));
                }
                if dim < 1 {
                    return Err(Error::Parameter("ball dimension must be at least 1".into()));
                }
            }
        }
        Ok(Self { geometry, n_nodes })
    }

    pub fn span(&self) -> (f64, f64) {
        match self.geometry {
            Geometry::Interval { lo, hi } => (lo, hi),
            Geometry::RadialBall { radius, .. } => (0.0, radius),
        }
    }

    pub fn spacing(&self) -> f64 {
        let (lo, hi) = self.span();
        (hi - lo) / (self.n_nodes - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let (lo, _) = self.span();
        let dr = self.spacing();
        (0..self.n_nodes).map(|i| lo + dr * i as f64).collect()
    }

    /// Trapezoid quadrature weights, including the `r^{N−1}` measure
    /// factor on radial meshes.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let dr = self.spacing();
        let n = self.n_nodes;
        let nodes = self.nodes();
        (0..n)
            .map(|i| {
                let trap = if i == 0 || i == n - 1 { 0.5 * dr } else { dr };
                match self.geometry {
                    Geometry::Interval { .. } => trap,
                    Geometry::RadialBall { dim, .. } => {
                        trap * nodes[i].powi(dim as i32 - 1)
                    }
                }
            })
            .collect()
    }

    /// Off-diagonal Laplacian weights `(c⁻_i, c⁺_i)` per node; zero rows
    /// at Dirichlet boundaries.
    fn laplacian_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n_nodes;
        let dr = self.spacing();
        let dr2 = dr * dr;
        let mut c_minus = vec![0.0; n];
        let mut c_plus = vec![0.0; n];
        match self.geometry {
            Geometry::Interval { .. } => {
                for i in 1..n - 1 {
                    c_minus[i] = 1.0 / dr2;
                    c_plus[i] = 1.0 / dr2;
                }
            }
            Geometry::RadialBall { dim, .. } => {
                let m = dim as f64;
                c_plus[0] = 2.0 * m / dr2;
                let p = dim as i32 - 1;
                for i in 1..n - 1 {
                    let r = dr * i as f64;
                    let r_pow = r.powi(p);
                    c_minus[i] = (r - 0.5 * dr).powi(p) / (r_pow * dr2);
                    c_plus[i] = (r + 0.5 * dr).powi(p) / (r_pow * dr2);
                }
            }
        }
        (c_minus, c_plus)
    }

    /// Indices whose value the scheme evolves (everything except
    /// Dirichlet boundary nodes).
    fn evolving_range(&self) -> std::ops::Range<usize> {
        match self.geometry {
            Geometry::Interval { .. } => 1..self.n_nodes - 1,
            Geometry::RadialBall { .. } => 0..self.n_nodes - 1,
        }
    }
}

/// Explicit-scheme controls.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Step-size safety factor: each step keeps
    /// `dt · max_i a(u_i) / dr² ≤ cfl_safe` (with the radial origin row
    /// correspondingly tightened).
    pub cfl_safe: f64,
    /// Steps below this trigger a stiffness error.
    pub dt_floor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { cfl_safe: 0.4, dt_floor: 1e-14 }
    }
}

/// A time-indexed family of grid functions produced by the solver or
/// sampled from a closed-form solution.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub mesh: Mesh,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Accepted step sizes, in order.
    #[serde(skip)]
    pub dt_history: Vec<f64>,
    /// Per-step `dt·max a/dr²` factors.
    #[serde(skip)]
    pub cfl_history: Vec<f64>,
}

impl Trajectory {
    /// Wraps externally sampled states (e.g. a closed-form solution on a
    /// mesh). Sampled trajectories need not satisfy the solver's boundary
    /// invariant.
    pub fn from_samples(mesh: Mesh, times: Vec<f64>, states: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::Parameter("times and states must align and be nonempty".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("trajectory times must be strictly increasing".into()));
        }
        for st in &states {
            if st.len() != mesh.n_nodes {
                return Err(Error::Parameter("state length does not match the mesh".into()));
            }
            if st.iter().any(|&v| v < 0.0 || !v.is_finite()) {
                return Err(Error::Domain("states must be nonnegative and finite".into()));
            }
        }
        Ok(Self { mesh, times, states, dt_history: Vec::new(), cfl_history: Vec::new() })
    }

    /// Positivity, max-norm monotonicity, and boundary zeros; holds for
    /// every solver-produced trajectory.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.mesh.n_nodes;
        let mut last_max = f64::INFINITY;
        for (k, st) in self.states.iter().enumerate() {
            if st.iter().any(|&v| v < 0.0) {
                return Err(Error::Invariant(format!("negative value at output {k}")));
            }
            let max = st.iter().cloned().fold(0.0, f64::max);
            if max > last_max * (1.0 + 1e-12) {
                return Err(Error::Invariant(format!(
                    "max-norm grew at output {k}: {last_max} → {max}"
                )));
            }
            last_max = max;
            let dirichlet_ok = match self.mesh.geometry {
                Geometry::Interval { .. } => st[0] == 0.0 && st[n - 1] == 0.0,
                Geometry::RadialBall { .. } => st[n - 1] == 0.0,
            };
            if !dirichlet_ok {
                return Err(Error::Invariant(format!("boundary not identically zero at output {k}")));
            }
        }
        Ok(())
    }

    /// Long-format CSV with columns `t, x, u`.
    pub fn write_csv<W: IoWrite>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,u")?;
        let nodes = self.mesh.nodes();
        for (t, st) in self.times.iter().zip(&self.states) {
            for (x, u) in nodes.iter().zip(st) {
                writeln!(w, "{t},{x},{u}")?;
            }
        }
        Ok(())
    }
}

/// Integrates `u_t = a(u)Δu` from `u0` with homogeneous Dirichlet data,
/// emitting states exactly at the requested output times.
///
/// The step is chosen fresh each iteration from the current `max a(u_i)`
/// and clipped to land on the next output time; a zero field (where
/// `a ≡ 0` freezes everything) jumps straight to it. Steps below
/// `opts.dt_floor` surface as a stiffness error.
pub fn solve_ibvp(
    coeff: &Coefficient,
    mesh: &Mesh,
    u0: &[f64],
    output_times: &[f64],
    opts: &SolveOptions,
) -> Result<Trajectory> {
    coeff.validate()?;
    if !(opts.cfl_safe > 0.0 && opts.cfl_safe < 1.0) {
        return Err(Error::Parameter(format!("cfl_safe must lie in (0,1), got {}", opts.cfl_safe)));
    }
    let n = mesh.n_nodes;
    if u0.len() != n {
        return Err(Error::Parameter(format!(
            "initial data has {} nodes, mesh has {n}",
            u0.len()
        )));
    }
    if u0.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Domain("initial data must be nonnegative and finite".into()));
    }
    let boundary_zero = match mesh.geometry {
        Geometry::Interval { .. } => u0[0] == 0.0 && u0[n - 1] == 0.0,
        Geometry::RadialBall { .. } => u0[n - 1] == 0.0,
    };
    if !boundary_zero {
        return Err(Error::Domain("initial data must vanish on the Dirichlet boundary".into()));
    }
    if output_times.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::Parameter("output times must be nonnegative".into()));
    }
    let mut targets: Vec<f64> = output_times.to_vec();
    targets.retain(|&t| t > 0.0); // the initial state is always emitted at t = 0
    if targets.windows(2).any(|w| !(w[1] > w[0])) || targets.is_empty() {
        return Err(Error::Parameter(
            "output times must be strictly increasing with at least one positive entry".into(),
        ));
    }

    let (c_minus, c_plus) = mesh.laplacian_weights();
    let row_sum: Vec<f64> = c_minus.iter().zip(&c_plus).map(|(a, b)| a + b).collect();
    let evolving = mesh.evolving_range();
    let a_of = coeff.evaluator();
    let dr2 = mesh.spacing() * mesh.spacing();

    let mut u = u0.to_vec();
    let mut a_vals = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let mut dt_history = Vec::new();
    let mut cfl_history = Vec::new();

    for &target in &targets {
        while t < target {
            let mut scaled_max = 0.0f64;
            let mut a_max = 0.0f64;
            for i in evolving.clone() {
                let a = a_of(u[i]);
                a_vals[i] = a;
                a_max = a_max.max(a);
                scaled_max = scaled_max.max(a * row_sum[i]);
            }
            let remaining = target - t;
            let dt = if scaled_max > 0.0 {
                let stable = 2.0 * opts.cfl_safe / scaled_max;
                if stable < remaining {
                    if stable < opts.dt_floor {
                        return Err(Error::Stiffness { dt: stable, floor: opts.dt_floor, t });
                    }
                    stable
                } else {
                    remaining
                }
            } else {
                remaining
            };
            let landed = dt >= remaining;
            next.copy_from_slice(&u);
            for i in evolving.clone() {
                let a = a_vals[i];
                if a == 0.0 {
                    continue;
                }
                let theta = dt * a * row_sum[i];
                let left = if i > 0 { u[i - 1] } else { 0.0 };
                let inflow = c_minus[i] * left + c_plus[i] * u[i + 1];
                let v = u[i] * (1.0 - theta) + dt * a * inflow;
                if !(v >= 0.0) {
                    return Err(Error::Invariant(format!(
                        "negative update {v} at node {i}, t = {t}"
                    )));
                }
                next[i] = v;
            }
            std::mem::swap(&mut u, &mut next);
            dt_history.push(dt);
            cfl_history.push(dt * a_max / dr2);
            t = if landed { target } else { t + dt };
        }
        times.push(target);
        states.push(u.clone());
    }

    Ok(Trajectory { mesh: *mesh, times, states, dt_history, cfl_history })
}

/// An open ball (interval) `(center − radius, center + radius)` in the
/// 1-D coordinate of the mesh.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Ball {
    pub center: f64,
    pub radius: f64,
}

impl Ball {
    pub fn shrink(&self, factor: f64) -> Ball {
        Ball { center: self.center, radius: self.radius * factor }
    }

    fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() <= self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontVerdict {
    /// The shrunk ball stayed below threshold for a positive time.
    FiniteSpeedConsistent,
    /// Every threshold in the sweep was exceeded on the shrunk ball at
    /// the first post-initial output time.
    ImmediatePositivity,
}

/// Support extent above the base threshold at one output time.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SupportSpan {
    pub t: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

/// Front-detection result over a threshold sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontReport {
    pub eps_supp: f64,
    /// The swept thresholds: `eps_supp` times four decades.
    pub thresholds: Vec<f64>,
    /// Per threshold, the first output time at which the shrunk ball
    /// carries a value at or above it.
    pub first_hit: Vec<Option<f64>>,
    /// Largest `T'` such that the shrunk ball stays below the base
    /// threshold for all outputs before `T'`.
    pub t_prime: f64,
    pub verdict: FrontVerdict,
    pub support: Vec<SupportSpan>,
}

/// Scans a trajectory for propagation into `ball`: the initial state must
/// vanish on it (below `eps_supp`), and the report records when the
/// `epsilon`-shrunk ball first carries values above each threshold in a
/// four-decade sweep upward from `eps_supp`.
pub fn detect_front(
    traj: &Trajectory,
    ball: &Ball,
    epsilon: f64,
    eps_supp: f64,
) -> Result<FrontReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    if !(eps_supp > 0.0) {
        return Err(Error::Parameter("support threshold must be positive".into()));
    }
    let (lo, hi) = traj.mesh.span();
    if ball.center - ball.radius < lo || ball.center + ball.radius > hi {
        return Err(Error::Domain(format!(
            "ball [{}, {}] is not contained in the domain [{lo}, {hi}]",
            ball.center - ball.radius,
            ball.center + ball.radius
        )));
    }
    let nodes = traj.mesh.nodes();
    let in_ball: Vec<usize> =
        (0..nodes.len()).filter(|&i| ball.contains(nodes[i])).collect();
    if in_ball.is_empty() {
        return Err(Error::Domain("ball contains no mesh nodes".into()));
    }
    let u0 = &traj.states[0];
    if in_ball.iter().any(|&i| u0[i] >= eps_supp) {
        return Err(Error::Domain(
            "initial data does not vanish on the ball at the given threshold".into(),
        ));
    }
    let shrunk = ball.shrink(epsilon);
    let in_shrunk: Vec<usize> =
        (0..nodes.len()).filter(|&i| shrunk.contains(nodes[i])).collect();
    let thresholds: Vec<f64> = (0..4).map(|k| eps_supp * 10f64.powi(k)).collect();

    let first_hit: Vec<Option<f64>> = thresholds
        .iter()
        .map(|&thr| {
            traj.states
                .iter()
                .position(|st| in_shrunk.iter().any(|&i| st[i] >= thr))
                .map(|k| traj.times[k])
        })
        .collect();

    let t_end = *traj.times.last().unwrap();
    let t_prime = first_hit[0].unwrap_or(t_end);
    let immediate = traj.times.len() >= 2
        && first_hit.iter().all(|h| *h == Some(traj.times[1]));
    let verdict =
        if immediate { FrontVerdict::ImmediatePositivity } else { FrontVerdict::FiniteSpeedConsistent };

    let support = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, st)| {
            let mut span_lo = None;
            let mut span_hi = None;
            for (i, &x) in nodes.iter().enumerate() {
                if st[i] >= eps_supp {
                    if span_lo.is_none() {
                        span_lo = Some(x);
                    }
                    span_hi = Some(x);
                }
            }
            SupportSpan { t, lo: span_lo, hi: span_hi }
        })
        .collect();

    Ok(FrontReport { eps_supp, thresholds, first_hit, t_prime, verdict, support })
}

/// A tensor-product compactly supported Lipschitz test function
/// `φ(x,t) = q((x−x_c)/w_x)·q((t−t_c)/w_t)` with `q(ξ) = (1−ξ²)²` on
/// `|ξ| < 1`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TestFunction {
    pub x_center: f64,
    pub x_halfwidth: f64,
    pub t_center: f64,
    pub t_halfwidth: f64,
}

fn bump(xi: f64) -> f64 {
    if xi.abs() >= 1.0 {
        0.0
    } else {
        let w = 1.0 - xi * xi;
        w * w
    }
}

fn bump_deriv(xi: f64) -> f64 {
    if xi.abs() >= 1.0 {
        0.0
    } else {
        -4.0 * xi * (1.0 - xi * xi)
    }
}

impl TestFunction {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        bump((x - self.x_center) / self.x_halfwidth) * bump((t - self.t_center) / self.t_halfwidth)
    }

    pub fn time_derivative(&self, x: f64, t: f64) -> f64 {
        bump((x - self.x_center) / self.x_halfwidth)
            * bump_deriv((t - self.t_center) / self.t_halfwidth)
            / self.t_halfwidth
    }
}

/// Evaluates the weak-form gap
///
/// ```text
///     ∬ ∇u·∇(F(u)φ) dx dt − ∬ H(u) φ_t dx dt
/// ```
///
/// by central differences in space and trapezoid quadrature in space-time,
/// returning the maximum signed gap over the test functions (0 for an
/// empty set). Nonpositive gaps mean the divergence-form inequality holds
/// discretely; an equality solution leaves only discretization error.
pub fn weak_residual(
    traj: &Trajectory,
    w: &WeightPair,
    coeff: &Coefficient,
    test_fns: &[TestFunction],
) -> Result<f64> {
    if traj.times.len() < 2 {
        return Err(Error::Domain("weak-form evaluation needs at least 2 output times".into()));
    }
    let (lo, hi) = traj.mesh.span();
    let t0 = traj.times[0];
    let t_end = *traj.times.last().unwrap();
    for tf in test_fns {
        if tf.x_center - tf.x_halfwidth < lo || tf.x_center + tf.x_halfwidth > hi {
            return Err(Error::Domain("test function support exceeds the spatial domain".into()));
        }
        if tf.t_center - tf.t_halfwidth < t0 || tf.t_center + tf.t_halfwidth > t_end {
            return Err(Error::Domain("test function support exceeds the time window".into()));
        }
    }
    let nodes = traj.mesh.nodes();
    let n = nodes.len();
    let dr = traj.mesh.spacing();
    let wq = traj.mesh.quadrature_weights();
    let mut max_gap = 0.0f64;

    for tf in test_fns {
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for (k, (&t, st)) in traj.times.iter().zip(&traj.states).enumerate() {
            let wt = if k == 0 {
                0.5 * (traj.times[1] - traj.times[0])
            } else if k == traj.times.len() - 1 {
                0.5 * (traj.times[k] - traj.times[k - 1])
            } else {
                0.5 * (traj.times[k + 1] - traj.times[k - 1])
            };
            // g = F(u)·φ on the mesh at this time
            let mut g = vec![0.0; n];
            for i in 0..n {
                g[i] = w.flux_factor(coeff, st[i])? * tf.eval(nodes[i], t);
            }
            let mut lhs_t = 0.0;
            let mut rhs_t = 0.0;
            for i in 0..n {
                let (du, dg) = if i == 0 || i == n - 1 {
                    (0.0, 0.0)
                } else {
                    ((st[i + 1] - st[i - 1]) / (2.0 * dr), (g[i + 1] - g[i - 1]) / (2.0 * dr))
                };
                lhs_t += wq[i] * du * dg;
                rhs_t += wq[i] * w.integral_fast(st[i])? * tf.time_derivative(nodes[i], t);
            }
            lhs += wt * lhs_t;
            rhs += wt * rhs_t;
        }
        max_gap = max_gap.max(lhs - rhs);
    }
    Ok(max_gap)
}

/// Initial-data profiles used by experiment configurations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum InitialData {
    /// `height·(1 − ((x−center)/width)²)²` on `|x−center| < width`.
    Bump { center: f64, width: f64, height: f64 },
    /// `sin(k·π·(x−lo)/(hi−lo))`, the `k`-th Dirichlet mode.
    Sine { k: u32 },
    /// Piecewise-linear interpolation of `(x, u)` samples.
    Table { x: Vec<f64>, u: Vec<f64> },
}

impl InitialData {
    /// Samples the profile onto the mesh. The result must vanish on the
    /// Dirichlet boundary; profiles that do not are rejected.
    pub fn sample(&self, mesh: &Mesh) -> Result<Vec<f64>> {
        let nodes = mesh.nodes();
        let (lo, hi) = mesh.span();
        let vals: Vec<f64> = match self {
            Self::Bump { center, width, height } => {
                if !(*width > 0.0) || !(*height >= 0.0) {
                    return Err(Error::Parameter("bump needs width > 0 and height ≥ 0".into()));
                }
                nodes
                    .iter()
                    .map(|&x| {
                        let xi = (x - center) / width;
                        if xi.abs() >= 1.0 {
                            0.0
                        } else {
                            height * (1.0 - xi * xi) * (1.0 - xi * xi)
                        }
                    })
                    .collect()
            }
            Self::Sine { k } => {
                if *k == 0 {
                    return Err(Error::Parameter("sine mode must be at least 1".into()));
                }
                let freq = *k as f64 * std::f64::consts::PI / (hi - lo);
                let mut v: Vec<f64> =
                    nodes.iter().map(|&x| (freq * (x - lo)).sin().max(0.0)).collect();
                // the mode vanishes at both ends analytically; remove the
                // trig roundoff so the Dirichlet invariant holds exactly
                v[0] = 0.0;
                *v.last_mut().unwrap() = 0.0;
                v
            }
            Self::Table { x, u } => {
                if x.len() != u.len() || x.len() < 2 {
                    return Err(Error::Parameter("table needs parallel x/u arrays, length ≥ 2".into()));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Parameter("table abscissae must increase".into()));
                }
                nodes
                    .iter()
                    .map(|&p| {
                        if p <= x[0] {
                            u[0]
                        } else if p >= *x.last().unwrap() {
                            *u.last().unwrap()
                        } else {
                            let idx = x.partition_point(|&q| q <= p);
                            let (x0, x1) = (x[idx - 1], x[idx]);
                            u[idx - 1] + (u[idx] - u[idx - 1]) * (p - x0) / (x1 - x0)
                        }
                    })
                    .collect()
            }
        };
        let n = vals.len();
        let boundary_zero = match mesh.geometry {
            Geometry::Interval { .. } => vals[0] == 0.0 && vals[n - 1] == 0.0,
            Geometry::RadialBall { .. } => vals[n - 1] == 0.0,
        };
        if !boundary_zero {
            return Err(Error::Domain("initial profile does not vanish on the boundary".into()));
        }
        if vals.iter().any(|&v| v < 0.0) {
            return Err(Error::Domain("initial profile must be nonnegative".into()));
        }
        Ok(vals)
    }
}
