//! Continuous-time linear time-invariant systems `dx/dt = A x + B u`.
//!
//! The production path discretizes exactly under a zero-order hold and then
//! steps `x' = Ad x + Bd u`; inputs are held constant over each sample
//! interval. [`rk4_simulate`] integrates the same system with classical
//! Runge-Kutta and exists as an independent cross-check.

use nalgebra::{Complex, DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StateSpaceError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("state matrix is singular")]
    Singular,
    #[error("input series is empty")]
    EmptyInputs,
    #[error("substep count must be at least 1")]
    InvalidSubsteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    x0: DVector<f64>,
}

fn all_finite<'a>(values: impl IntoIterator<Item = &'a f64>) -> bool {
    values.into_iter().all(|v| v.is_finite())
}

impl LtiSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, x0: DVector<f64>) -> Result<Self, StateSpaceError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(StateSpaceError::Dimension(format!("A is {}x{}", n, a.ncols())));
        }
        if b.nrows() != n {
            return Err(StateSpaceError::Dimension(format!("B has {} rows, A has {n}", b.nrows())));
        }
        if x0.len() != n {
            return Err(StateSpaceError::Dimension(format!("x0 has {} entries, A has {n} rows", x0.len())));
        }
        if !all_finite(a.iter()) || !all_finite(b.iter()) || !all_finite(x0.iter()) {
            return Err(StateSpaceError::NonFinite("system matrices".into()));
        }
        Ok(Self { a, b, x0 })
    }

    pub fn state_count(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_count(&self) -> usize {
        self.b.ncols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    pub fn with_x0(mut self, x0: DVector<f64>) -> Result<Self, StateSpaceError> {
        if x0.len() != self.state_count() {
            return Err(StateSpaceError::Dimension("x0 length".into()));
        }
        if !all_finite(x0.iter()) {
            return Err(StateSpaceError::NonFinite("x0".into()));
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn eigenvalues(&self) -> Vec<Complex<f64>> {
        self.a.clone().complex_eigenvalues().iter().copied().collect()
    }

    /// True when every eigenvalue of `A` has a strictly negative real part.
    pub fn is_hurwitz(&self) -> bool {
        self.eigenvalues().iter().all(|l| l.re < 0.0)
    }
}

/// Input samples of width `m`, one per interval of length `dt` seconds,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSeries {
    dt: f64,
    width: usize,
    data: Vec<f64>,
}

impl InputSeries {
    pub fn new(dt: f64, width: usize, data: Vec<f64>) -> Result<Self, StateSpaceError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(StateSpaceError::InvalidStep(dt));
        }
        if width == 0 || data.len() % width != 0 {
            return Err(StateSpaceError::Dimension(format!(
                "{} values do not split into samples of width {width}",
                data.len()
            )));
        }
        if data.is_empty() {
            return Err(StateSpaceError::EmptyInputs);
        }
        if !all_finite(&data) {
            return Err(StateSpaceError::NonFinite("input samples".into()));
        }
        Ok(Self { dt, width, data })
    }

    pub fn from_rows(dt: f64, rows: &[Vec<f64>]) -> Result<Self, StateSpaceError> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(StateSpaceError::Dimension("ragged input rows".into()));
        }
        Self::new(dt, width, rows.concat())
    }

    /// The same sample repeated `len` times.
    pub fn constant(dt: f64, sample: &[f64], len: usize) -> Result<Self, StateSpaceError> {
        Self::new(dt, sample.len(), sample.repeat(len))
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn samples(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.width)
    }

    /// Elementwise scaled copy.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dt: self.dt,
            width: self.width,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }
}

/// States at every sample boundary: `x0` followed by the state after each step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dt: f64,
    n: usize,
    data: Vec<f64>,
}

impl Trajectory {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn state_count(&self) -> usize {
        self.n
    }

    /// Number of stored states (input length + 1).
    pub fn len(&self) -> usize {
        self.data.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// Time series of one state variable, including the initial value.
    pub fn component(&self, j: usize) -> Vec<f64> {
        self.states().map(|x| x[j]).collect()
    }

    /// Largest absolute difference between corresponding states.
    pub fn max_abs_diff(&self, other: &Trajectory) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// Largest 1-norms for which each Padé degree reaches double precision.
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(m)` by scaling and squaring with a diagonal Padé approximant of
/// degree 3 to 13, chosen from the 1-norm.
pub fn expm(m: &DMatrix<f64>) -> Result<DMatrix<f64>, StateSpaceError> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(StateSpaceError::Dimension(format!("expm of {}x{}", n, m.ncols())));
    }
    if !all_finite(m.iter()) {
        return Err(StateSpaceError::NonFinite("expm argument".into()));
    }
    let ident = DMatrix::<f64>::identity(n, n);
    let norm = norm1(m);

    for (degree, theta) in THETA {
        if norm <= theta {
            let coeffs: &[f64] = match degree {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            return pade_low(m, coeffs, &ident);
        }
    }

    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings);
    let mut r = pade13(&scaled, &ident)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !all_finite(r.iter()) {
        return Err(StateSpaceError::NonFinite("matrix exponential overflowed".into()));
    }
    Ok(r)
}

fn pade_solve(u: DMatrix<f64>, v: DMatrix<f64>) -> Result<DMatrix<f64>, StateSpaceError> {
    let p = &v + &u;
    let q = v - u;
    q.lu().solve(&p).ok_or(StateSpaceError::Singular)
}

fn pade_low(a: &DMatrix<f64>, c: &[f64], ident: &DMatrix<f64>) -> Result<DMatrix<f64>, StateSpaceError> {
    let a2 = a * a;
    // Even powers A^0, A^2, A^4, ...
    let mut powers = vec![ident.clone()];
    while powers.len() < c.len() / 2 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let n = a.nrows();
    let mut odd = DMatrix::<f64>::zeros(n, n);
    let mut even = DMatrix::<f64>::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        even += p * c[2 * k];
        odd += p * c[2 * k + 1];
    }
    let u = a * odd;
    pade_solve(u, even)
}

fn pade13(a: &DMatrix<f64>, ident: &DMatrix<f64>) -> Result<DMatrix<f64>, StateSpaceError> {
    let b = &PADE13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + ident * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + ident * b[0];
    pade_solve(u, v)
}

// ---------------------------------------------------------------------------
// Discretization and stepping
// ---------------------------------------------------------------------------

/// Zero-order-hold discretization of an [`LtiSystem`] for a fixed `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretized {
    pub dt: f64,
    pub ad: DMatrix<f64>,
    pub bd: DMatrix<f64>,
}

/// `ad = exp(A dt)` and `bd = (∫₀^dt exp(A s) ds) B`, both read from the
/// exponential of the augmented matrix `[[A, B], [0, 0]] · dt`.
pub fn discretize(system: &LtiSystem, dt: f64) -> Result<Discretized, StateSpaceError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(StateSpaceError::InvalidStep(dt));
    }
    let n = system.state_count();
    let m = system.input_count();
    let mut aug = DMatrix::<f64>::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(&(system.a() * dt));
    aug.view_mut((0, n), (n, m)).copy_from(&(system.b() * dt));
    let e = expm(&aug)?;
    let ad = e.view((0, 0), (n, n)).into_owned();
    let bd = e.view((0, n), (n, m)).into_owned();
    if !all_finite(ad.iter()) || !all_finite(bd.iter()) {
        return Err(StateSpaceError::NonFinite("discretized matrices".into()));
    }
    Ok(Discretized { dt, ad, bd })
}

impl Discretized {
    pub fn state_count(&self) -> usize {
        self.ad.nrows()
    }

    pub fn input_count(&self) -> usize {
        self.bd.ncols()
    }

    /// `out = ad·x + bd·u` without allocation. Dimensions are the caller's
    /// responsibility.
    #[inline]
    fn step_into(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        let n = self.state_count();
        let m = self.input_count();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = 0.0;
            for (j, xj) in x.iter().enumerate() {
                acc += self.ad[(i, j)] * xj;
            }
            for (j, uj) in u.iter().enumerate().take(m) {
                acc += self.bd[(i, j)] * uj;
            }
            *o = acc;
        }
    }

    pub fn step(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>, StateSpaceError> {
        if x.len() != self.state_count() || u.len() != self.input_count() {
            return Err(StateSpaceError::Dimension(format!(
                "step expects x of {} and u of {}, got {} and {}",
                self.state_count(),
                self.input_count(),
                x.len(),
                u.len()
            )));
        }
        let mut out = vec![0.0; x.len()];
        self.step_into(x, u, &mut out);
        Ok(out)
    }

    /// Runs from `x0` over every input sample. `inputs.dt()` must equal `self.dt`.
    pub fn simulate(&self, x0: &[f64], inputs: &InputSeries) -> Result<Trajectory, StateSpaceError> {
        let n = self.state_count();
        if x0.len() != n {
            return Err(StateSpaceError::Dimension("x0 length".into()));
        }
        if inputs.width() != self.input_count() {
            return Err(StateSpaceError::Dimension(format!(
                "input width {} vs {} system inputs",
                inputs.width(),
                self.input_count()
            )));
        }
        if inputs.dt() != self.dt {
            return Err(StateSpaceError::Dimension(format!(
                "input dt {} vs discretization dt {}",
                inputs.dt(),
                self.dt
            )));
        }
        let mut data = vec![0.0; n * (inputs.len() + 1)];
        data[..n].copy_from_slice(x0);
        for (k, u) in inputs.samples().enumerate() {
            let (done, rest) = data.split_at_mut((k + 1) * n);
            self.step_into(&done[k * n..], u, &mut rest[..n]);
        }
        if !all_finite(&data) {
            return Err(StateSpaceError::NonFinite("trajectory".into()));
        }
        Ok(Trajectory { dt: self.dt, n, data })
    }
}

/// One exact step `ad·x + bd·u`.
pub fn step(
    ad: &DMatrix<f64>,
    bd: &DMatrix<f64>,
    x: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<DVector<f64>, StateSpaceError> {
    if ad.nrows() != ad.ncols() || ad.ncols() != x.len() || bd.nrows() != ad.nrows() || bd.ncols() != u.len() {
        return Err(StateSpaceError::Dimension(format!(
            "ad {}x{}, bd {}x{}, x {}, u {}",
            ad.nrows(),
            ad.ncols(),
            bd.nrows(),
            bd.ncols(),
            x.len(),
            u.len()
        )));
    }
    Ok(ad * x + bd * u)
}

/// Zero-order-hold simulation from the system's `x0`.
pub fn simulate(system: &LtiSystem, inputs: &InputSeries) -> Result<Trajectory, StateSpaceError> {
    if inputs.width() != system.input_count() {
        return Err(StateSpaceError::Dimension(format!(
            "input width {} vs {} system inputs",
            inputs.width(),
            system.input_count()
        )));
    }
    discretize(system, inputs.dt())?.simulate(system.x0().as_slice(), inputs)
}

/// Solves `A x = -B u` for the equilibrium under constant input `u`.
pub fn steady_state(system: &LtiSystem, u: &DVector<f64>) -> Result<DVector<f64>, StateSpaceError> {
    if u.len() != system.input_count() {
        return Err(StateSpaceError::Dimension("steady-state input width".into()));
    }
    let rhs = -(system.b() * u);
    let x = system.a().clone().lu().solve(&rhs).ok_or(StateSpaceError::Singular)?;
    if !all_finite(x.iter()) {
        return Err(StateSpaceError::Singular);
    }
    Ok(x)
}

/// Classical fourth-order Runge-Kutta with `substeps` equal substeps per
/// input sample; the input is held constant within each sample.
pub fn rk4_simulate(
    system: &LtiSystem,
    inputs: &InputSeries,
    substeps: usize,
) -> Result<Trajectory, StateSpaceError> {
    if substeps == 0 {
        return Err(StateSpaceError::InvalidSubsteps);
    }
    if inputs.width() != system.input_count() {
        return Err(StateSpaceError::Dimension(format!(
            "input width {} vs {} system inputs",
            inputs.width(),
            system.input_count()
        )));
    }
    let n = system.state_count();
    let a = system.a();
    let h = inputs.dt() / substeps as f64;
    let mut x = system.x0().clone();
    let mut data = Vec::with_capacity(n * (inputs.len() + 1));
    data.extend_from_slice(x.as_slice());
    for u in inputs.samples() {
        let forcing = system.b() * DVector::from_column_slice(u);
        let f = |x: &DVector<f64>| a * x + &forcing;
        for _ in 0..substeps {
            let k1 = f(&x);
            let k2 = f(&(&x + &k1 * (h / 2.0)));
            let k3 = f(&(&x + &k2 * (h / 2.0)));
            let k4 = f(&(&x + &k3 * h));
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        data.extend_from_slice(x.as_slice());
    }
    if !all_finite(&data) {
        return Err(StateSpaceError::NonFinite("trajectory".into()));
    }
    Ok(Trajectory {
        dt: inputs.dt(),
        n,
        data,
    })
}
