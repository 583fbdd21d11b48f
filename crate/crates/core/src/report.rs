//! Run configuration, the field binary format, the trace CSV, and JSON
//! report plumbing.
//!
//! Field files: magic `LYZF`, u16 version = 1, u8 kind (0 = scalar,
//! 1 = hermitian), u8 n, u32 N (all little-endian), then the float64
//! little-endian payload in storage order — grid points row-major with the
//! last real axis fastest; hermitian points store n diagonal entries then
//! `(re, im)` upper-triangle pairs in lexicographic order.
//!
//! All writers go through a write-to-temp-then-rename step, so failed runs
//! leave no partial outputs. Trace CSV floats carry 17 significant digits.

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::continuation::{ContinuityTrace, Schedule, TraceRow};
use crate::error::Error;
use crate::field::{self, HermitianField, ScalarField, TorusGrid, TrigMode};
use crate::herm::CMat;
use crate::solver::{Monitors, SolverOptions, SolverState};
use crate::Result;

const MAGIC: &[u8; 4] = b"LYZF";
const VERSION: u16 = 1;
const KIND_SCALAR: u8 = 0;
const KIND_HERMITIAN: u8 = 1;

/// Pinned trace CSV header.
pub const TRACE_HEADER: &str =
    "t,hat_theta,target_theta,c_solved,newton_iters,res_sup,sup_u,sup_grad,sup_hess,hmw_ratio,wall_time_s";

// ---------------------------------------------------------------------------
// atomic writes

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// field binary format

fn encode_header(kind: u8, grid: &TorusGrid, payload_len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + payload_len * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind);
    out.push(grid.n as u8);
    out.extend_from_slice(&(grid.points_per_axis as u32).to_le_bytes());
    out
}

/// Serializes a scalar field into the `LYZF` byte format.
pub fn encode_scalar_field(f: &ScalarField) -> Vec<u8> {
    let mut out = encode_header(KIND_SCALAR, &f.grid, f.values.len());
    for v in &f.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Serializes a Hermitian field into the `LYZF` byte format.
pub fn encode_hermitian_field(f: &HermitianField) -> Vec<u8> {
    let mut out = encode_header(KIND_HERMITIAN, &f.grid, f.data.len());
    for v in &f.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn decode_header(bytes: &[u8]) -> Result<(u8, TorusGrid, &[u8])> {
    if bytes.len() < 12 {
        return Err(Error::Format("field file shorter than its header".into()));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format("bad magic (expected LYZF)".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported field version {version}")));
    }
    let kind = bytes[6];
    let n = bytes[7] as usize;
    let points = u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize;
    let grid = TorusGrid::new(n, points)
        .map_err(|e| Error::Format(format!("field header describes an invalid grid: {e}")))?;
    Ok((kind, grid, &bytes[12..]))
}

fn decode_payload(bytes: &[u8], expected: usize) -> Result<Vec<f64>> {
    if bytes.len() != expected * 8 {
        return Err(Error::Format(format!(
            "payload length {} does not match expected {} float64 values",
            bytes.len(),
            expected
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Parses a scalar field from `LYZF` bytes.
pub fn decode_scalar_field(bytes: &[u8]) -> Result<ScalarField> {
    let (kind, grid, payload) = decode_header(bytes)?;
    if kind != KIND_SCALAR {
        return Err(Error::Format("expected a scalar field file".into()));
    }
    ScalarField::from_values(grid, decode_payload(payload, grid.npoints)?)
}

/// Parses a Hermitian field from `LYZF` bytes.
pub fn decode_hermitian_field(bytes: &[u8]) -> Result<HermitianField> {
    let (kind, grid, payload) = decode_header(bytes)?;
    if kind != KIND_HERMITIAN {
        return Err(Error::Format("expected a hermitian field file".into()));
    }
    let expected = grid.npoints * HermitianField::entries_per_point(grid.n);
    HermitianField::from_data(grid, decode_payload(payload, expected)?)
}

pub fn write_scalar_field(path: &Path, f: &ScalarField) -> Result<()> {
    write_atomic(path, &encode_scalar_field(f))
}

pub fn read_scalar_field(path: &Path) -> Result<ScalarField> {
    decode_scalar_field(&fs::read(path)?)
}

pub fn write_hermitian_field(path: &Path, f: &HermitianField) -> Result<()> {
    write_atomic(path, &encode_hermitian_field(f))
}

pub fn read_hermitian_field(path: &Path) -> Result<HermitianField> {
    decode_hermitian_field(&fs::read(path)?)
}

// ---------------------------------------------------------------------------
// run configuration

/// One off-diagonal entry of the constant Hermitian part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffDiagEntry {
    pub i: usize,
    pub j: usize,
    pub re: f64,
    pub im: f64,
}

/// Trigonometric mode of the potential `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub wave: Vec<i64>,
    pub amplitude: f64,
    pub phase: f64,
}

/// `χ = C + i∂∂̄ρ` described by its constant part and the modes of `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSpec {
    pub diagonal: Vec<f64>,
    #[serde(default)]
    pub off_diagonal: Vec<OffDiagEntry>,
    #[serde(default)]
    pub rho_modes: Vec<ModeSpec>,
}

/// Solver knobs exposed to configs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub tol: f64,
    pub max_iterations: usize,
    pub branch_slack: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverOptions::default();
        SolverSpec {
            tol: d.tol,
            max_iterations: d.max_iterations,
            branch_slack: d.branch_slack,
        }
    }
}

impl SolverSpec {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iterations: self.max_iterations,
            branch_slack: self.branch_slack,
            ..SolverOptions::default()
        }
    }
}

/// Complete description of a reproducible run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub points_per_axis: usize,
    pub chi: ChiSpec,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.n, self.points_per_axis)
    }

    /// Materializes the χ field described by the config.
    pub fn build_chi(&self) -> Result<HermitianField> {
        let grid = self.grid()?;
        if self.chi.diagonal.len() != self.n {
            return Err(Error::Precondition(format!(
                "chi diagonal has {} entries for n = {}",
                self.chi.diagonal.len(),
                self.n
            )));
        }
        let mut c = CMat::zero(self.n);
        for (i, v) in self.chi.diagonal.iter().enumerate() {
            c.a[i][i] = num_complex::Complex64::new(*v, 0.0);
        }
        for e in &self.chi.off_diagonal {
            if e.i >= e.j || e.j >= self.n {
                return Err(Error::Precondition(format!(
                    "off-diagonal entry ({}, {}) outside the upper triangle",
                    e.i, e.j
                )));
            }
            c.a[e.i][e.j] = num_complex::Complex64::new(e.re, e.im);
            c.a[e.j][e.i] = num_complex::Complex64::new(e.re, -e.im);
        }
        let modes: Vec<TrigMode> = self
            .chi
            .rho_modes
            .iter()
            .map(|m| TrigMode {
                wave: m.wave.clone(),
                amplitude: m.amplitude,
                phase: m.phase,
            })
            .collect();
        let rho = field::trig_field(grid, &modes)?;
        field::build_chi(grid, &c, &rho)
    }
}

// ---------------------------------------------------------------------------
// JSON plumbing

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Format(format!("json encode: {e}")))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Format(format!("json decode: {e}")))
}

// ---------------------------------------------------------------------------
// trace CSV

fn fmt17(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Renders the trace rows in the pinned CSV format.
pub fn trace_to_csv(trace: &ContinuityTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt17(r.t),
            fmt17(r.hat_theta),
            fmt17(r.target_theta),
            fmt17(r.c_solved),
            r.newton_iters,
            fmt17(r.res_sup),
            fmt17(r.sup_u),
            fmt17(r.sup_grad),
            fmt17(r.sup_hess),
            fmt17(r.hmw_ratio),
            fmt17(r.wall_time_s),
        ));
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &ContinuityTrace) -> Result<()> {
    write_atomic(path, trace_to_csv(trace).as_bytes())
}

/// Parses a trace CSV back into rows (for the report command).
pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty trace csv".into()))?;
    if header != TRACE_HEADER {
        return Err(Error::Format("unexpected trace csv header".into()));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 11 {
            return Err(Error::Format(format!(
                "trace line {} has {} cells",
                lineno + 2,
                cells.len()
            )));
        }
        let f = |s: &str| -> Result<f64> {
            if s == "nan" {
                return Ok(f64::NAN);
            }
            s.parse::<f64>()
                .map_err(|e| Error::Format(format!("trace float parse: {e}")))
        };
        rows.push(TraceRow {
            t: f(cells[0])?,
            hat_theta: f(cells[1])?,
            target_theta: f(cells[2])?,
            c_solved: f(cells[3])?,
            newton_iters: cells[4]
                .parse()
                .map_err(|e| Error::Format(format!("trace int parse: {e}")))?,
            res_sup: f(cells[5])?,
            sup_u: f(cells[6])?,
            sup_grad: f(cells[7])?,
            sup_hess: f(cells[8])?,
            hmw_ratio: f(cells[9])?,
            wall_time_s: f(cells[10])?,
            converged: !f(cells[1])?.is_nan(),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// path and solve reports

/// JSON sidecar of one solver state snapshot.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub t: f64,
    pub c: f64,
    pub iterations: usize,
    pub converged: bool,
    pub res_sup: f64,
    pub sup_u: f64,
    pub sup_grad: f64,
    pub sup_hess: f64,
    pub hmw_ratio: f64,
}

impl SolveReport {
    pub fn new(state: &SolverState, mon: &Monitors) -> Self {
        SolveReport {
            t: state.t,
            c: state.c,
            iterations: state.iterations,
            converged: state.converged,
            res_sup: state.residual.sup_abs(),
            sup_u: mon.sup_u,
            sup_grad: mon.sup_grad,
            sup_hess: mon.sup_hess,
            hmw_ratio: mon.hmw_ratio,
        }
    }
}

/// JSON summary of a continuity-path run (the θ̂ table plus the critical
/// residuals and trace-level checks). Wall times stay in the CSV only, so
/// reports are byte-stable across machines and thread counts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathReport {
    pub t: Vec<f64>,
    pub hat_theta: Vec<f64>,
    pub target_theta: Vec<f64>,
    pub c_solved: Vec<f64>,
    pub newton_iters: Vec<usize>,
    pub converged: Vec<bool>,
    pub rows_converged: usize,
    pub rows_total: usize,
    pub bracket_c: Option<f64>,
    pub bracket_pass: bool,
    pub c_gap_max: f64,
    pub hmw_max_ratio: f64,
    pub hmw_pass: bool,
    pub critical_theta_residual: f64,
    pub critical_sigma_residual: f64,
    pub differentiate1_normalized: f64,
}
