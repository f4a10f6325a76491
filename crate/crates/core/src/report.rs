//! Reports behind the command-line workflows: analysis, transformation,
//! invariance, counterexamples and fuzzing.
//!
//! Every report is a pure function of its inputs and configuration. Wall-clock
//! timings are recorded only when asked for, since they would otherwise make
//! two identical runs differ.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::combinatorics::EnumerationLimit;
use crate::error::{Error, Result};
use crate::io::ParsedMatrix;
use crate::nsp::{nsp_report, ConstantEstimate};
use crate::numeric::{IndexSet, RationalMatrix, RationalVector, SPECTRAL_TOLERANCE};
use crate::properties::{
    check_column_addition_break, check_order_invariance, check_spark_invariance, quantities,
    universality_counterexample, well_scaled, CheckConfig, CounterexampleArtifact,
    InvarianceCheckResult, Observation, Verdict,
};
use crate::rip::{highest_rip_order_with_limit, rip_table, RipConstants, DEFAULT_ALPHA_FLOOR};
use crate::spark::{exact_recovery_sparsity, spark_with_limit, SparkValue};
use crate::transforms::OpSequence;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_NSP_SAMPLES: usize = 256;
pub const DEFAULT_SEED: u64 = 42;

const NSP_ORDER_CONVENTION: &str =
    "highest_order = spark - 1, or the column count when the columns are independent";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConfig {
    /// `None` picks `min(n, m + 1, 6)`.
    pub k_max: Option<usize>,
    pub alpha_floor: f64,
    pub nsp_samples: usize,
    pub seed: u64,
    pub force_large: bool,
    pub timings: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            k_max: None,
            alpha_floor: DEFAULT_ALPHA_FLOOR,
            nsp_samples: DEFAULT_NSP_SAMPLES,
            seed: DEFAULT_SEED,
            force_large: false,
            timings: false,
        }
    }
}

impl AnalysisConfig {
    pub fn limit(&self) -> EnumerationLimit {
        EnumerationLimit {
            force_large: self.force_large,
        }
    }

    pub fn check_config(&self) -> CheckConfig {
        CheckConfig {
            alpha_floor: self.alpha_floor,
            limit: self.limit(),
        }
    }

    /// `m + 1` rather than `m` so the first order at which columns must be
    /// dependent still shows up in the table.
    pub fn resolved_k_max(&self, (m, n): (usize, usize)) -> usize {
        self.k_max.unwrap_or_else(|| n.min(m + 1).min(6))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixInfo {
    pub id: String,
    pub rows: usize,
    pub cols: usize,
    /// `rational` or `float`; float input is analysed exactly through its
    /// dyadic rational image.
    pub entries: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct SparkSection {
    pub value: SparkValue,
    pub witness: Option<IndexSet>,
    pub coefficients: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NspSection {
    pub highest_order: usize,
    pub highest_order_convention: &'static str,
    pub failure_certificate: Option<Vec<String>>,
    /// Keyed by order.
    pub constant_estimates: BTreeMap<usize, ConstantEstimate>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactLane {
    pub rank: usize,
    pub spark: SparkSection,
    pub exact_recovery_k: usize,
    pub nsp: NspSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralLane {
    pub eigen_tolerance: f64,
    pub alpha_floor: f64,
    pub rip: Vec<RipConstants>,
    /// Read off the column-normalized image against `alpha_floor`.
    pub highest_rip_order: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub k_max: usize,
    pub alpha_floor: f64,
    pub nsp_samples: usize,
    pub seed: u64,
    pub force_large: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub matrix: MatrixInfo,
    pub exact: ExactLane,
    pub spectral: SpectralLane,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<&'static str, f64>>,
}

fn strings(v: &RationalVector) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

struct Stopwatch {
    on: bool,
    laps: BTreeMap<&'static str, f64>,
}

impl Stopwatch {
    fn time<T>(&mut self, name: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.on {
            self.laps.insert(name, start.elapsed().as_secs_f64() * 1e3);
        }
        out
    }
}

pub fn analyze(matrix: &ParsedMatrix, id: &str, cfg: &AnalysisConfig) -> Result<AnalysisReport> {
    if !(cfg.alpha_floor > 0.0 && cfg.alpha_floor.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha floor must be positive and finite, got {}",
            cfg.alpha_floor
        )));
    }
    let (m, n) = matrix.shape();
    let k_max = cfg.resolved_k_max((m, n));
    let limit = cfg.limit();
    limit.check(n)?;
    let mut clock = Stopwatch {
        on: cfg.timings,
        laps: BTreeMap::new(),
    };

    let exact = matrix.exact();
    let s = clock.time("spark", || spark_with_limit(&exact, limit))?;
    let nsp = clock.time("nsp", || {
        nsp_report(&exact, &s, k_max, cfg.nsp_samples, cfg.seed)
    })?;

    let float = matrix.float()?;
    let mut notes = Vec::new();
    let rip = if float.is_zero() {
        notes.push("zero matrix: restricted isometry constants are undefined".to_string());
        Vec::new()
    } else {
        clock.time("rip", || rip_table(&float, k_max, limit))?
    };
    let scaled = match matrix {
        ParsedMatrix::Rational(r) => well_scaled(r)?,
        ParsedMatrix::Float(f) => f.column_normalized(),
    };
    let highest_rip_order = clock.time("rip_order", || {
        highest_rip_order_with_limit(&scaled, cfg.alpha_floor, limit)
    })?;
    if highest_rip_order != s.highest_order() {
        notes.push(format!(
            "spectral order {highest_rip_order} differs from the exact order {}; \
             the matrix is ill-conditioned relative to alpha_floor {}",
            s.highest_order(),
            cfg.alpha_floor
        ));
    }

    Ok(AnalysisReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        matrix: MatrixInfo {
            id: id.to_string(),
            rows: m,
            cols: n,
            entries: if matrix.is_float() {
                "float"
            } else {
                "rational"
            },
        },
        exact: ExactLane {
            rank: exact.rank(),
            spark: SparkSection {
                value: s.spark_value(),
                witness: s.witness().cloned(),
                coefficients: s.coefficients().map(strings),
            },
            exact_recovery_k: exact_recovery_sparsity(&s),
            nsp: NspSection {
                highest_order: nsp.highest_order,
                highest_order_convention: NSP_ORDER_CONVENTION,
                failure_certificate: nsp.failure_certificate.as_ref().map(strings),
                constant_estimates: nsp.constant_estimates,
                samples: cfg.nsp_samples,
                seed: cfg.seed,
            },
        },
        spectral: SpectralLane {
            eigen_tolerance: SPECTRAL_TOLERANCE,
            alpha_floor: cfg.alpha_floor,
            rip,
            highest_rip_order,
            notes,
        },
        config: ConfigEcho {
            k_max,
            alpha_floor: cfg.alpha_floor,
            nsp_samples: cfg.nsp_samples,
            seed: cfg.seed,
            force_large: cfg.force_large,
        },
        timings_ms: cfg.timings.then_some(clock.laps),
    })
}

/// Plain-text rendering of an analysis report.
pub fn render_analysis(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let e = &r.exact;
    let _ = writeln!(
        out,
        "matrix {} ({}x{}, {})",
        r.matrix.id, r.matrix.rows, r.matrix.cols, r.matrix.entries
    );
    let _ = writeln!(out, "exact lane");
    let _ = writeln!(out, "  rank              {}", e.rank);
    let _ = writeln!(out, "  spark             {}", e.spark.value);
    if let (Some(w), Some(c)) = (&e.spark.witness, &e.spark.coefficients) {
        let _ = writeln!(out, "  witness columns   {:?}", w.indices());
        let _ = writeln!(out, "  coefficients      [{}]", c.join(", "));
    }
    let _ = writeln!(out, "  exact recovery k  {}", e.exact_recovery_k);
    let _ = writeln!(
        out,
        "  NSP highest order {}  ({})",
        e.nsp.highest_order, e.nsp.highest_order_convention
    );
    for (k, c) in &e.nsp.constant_estimates {
        let kind = match c.kind {
            crate::nsp::EstimateKind::Exact => "exact",
            crate::nsp::EstimateKind::LowerBound => "lower bound",
        };
        let _ = writeln!(out, "  NSP constant k={k}  {:.12} ({kind})", c.value);
    }
    let s = &r.spectral;
    let _ = writeln!(out, "spectral lane (alpha_floor {:e})", s.alpha_floor);
    let _ = writeln!(
        out,
        "  {:>3} {:>14} {:>14} {:>14}  argmin / argmax",
        "k", "alpha", "beta", "delta"
    );
    for c in &s.rip {
        let _ = writeln!(
            out,
            "  {:>3} {:>14.6e} {:>14.6e} {:>14.6e}  {:?} / {:?}",
            c.order,
            c.alpha,
            c.beta,
            c.delta,
            c.argmin_set.indices(),
            c.argmax_set.indices()
        );
    }
    let _ = writeln!(out, "  RIP highest order {}", s.highest_rip_order);
    for note in &s.notes {
        let _ = writeln!(out, "  note: {note}");
    }
    if let Some(t) = &r.timings_ms {
        for (name, ms) in t {
            let _ = writeln!(out, "time {name}: {ms:.3} ms");
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformReport {
    pub schema_version: u32,
    pub ops: OpSequence,
    pub before: Observation,
    pub after: Observation,
}

/// Apply `ops` exactly and summarise the certificates on both sides.
pub fn transform(
    a: &RationalMatrix,
    ops: &OpSequence,
    cfg: &CheckConfig,
) -> Result<TransformReport> {
    let b = ops.apply_all(a)?;
    Ok(TransformReport {
        schema_version: REPORT_SCHEMA_VERSION,
        ops: ops.clone(),
        before: Observation {
            label: "A".into(),
            matrix: a.clone(),
            quantities: quantities(a, cfg)?,
        },
        after: Observation {
            label: "B".into(),
            quantities: quantities(&b, cfg)?,
            matrix: b,
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub schema_version: u32,
    pub checks: Vec<InvarianceCheckResult>,
    pub all_passed: bool,
}

/// Spark and highest-order checks for one sequence. A sequence with a column
/// addition is outside the invariance results; it is reported as one
/// comparison whose change, if any, is an expected break.
pub fn invariance(
    a: &RationalMatrix,
    ops: &OpSequence,
    cfg: &CheckConfig,
) -> Result<InvarianceReport> {
    let checks = if ops.contains_col_add() {
        let t = transform(a, ops, cfg)?;
        let changed = t.before.quantities != t.after.quantities;
        vec![InvarianceCheckResult {
            check_id: "column_addition".into(),
            ops: ops.clone(),
            before: t.before,
            after: vec![t.after],
            verdict: if changed {
                Verdict::ExpectedBreak
            } else {
                Verdict::Pass
            },
            detail: vec!["sequence contains a column addition; certificates may change".into()],
        }]
    } else {
        vec![
            check_spark_invariance(a, ops, cfg)?,
            check_order_invariance(a, ops, cfg)?,
        ]
    };
    Ok(InvarianceReport {
        schema_version: REPORT_SCHEMA_VERSION,
        all_passed: checks.iter().all(|c| c.verdict != Verdict::Fail),
        checks,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterexampleKind {
    SparkBreak,
    Universality,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub schema_version: u32,
    pub kind: &'static str,
    pub artifacts: Vec<CounterexampleArtifact>,
    /// Every artifact replays to the recorded changes.
    pub replayed: bool,
}

pub fn counterexample(
    kind: CounterexampleKind,
    matrix: Option<&RationalMatrix>,
    cfg: &CheckConfig,
) -> Result<CounterexampleReport> {
    let (name, artifacts) = match kind {
        CounterexampleKind::SparkBreak => ("spark-break", check_column_addition_break(cfg)?),
        CounterexampleKind::Universality => {
            let a = matrix.ok_or(Error::EmptyInput(
                "matrix for the universality counterexample",
            ))?;
            ("universality", vec![universality_counterexample(a, cfg)?])
        }
    };
    let replayed = artifacts
        .iter()
        .map(|a| a.replay(cfg))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|ok| ok);
    Ok(CounterexampleReport {
        schema_version: REPORT_SCHEMA_VERSION,
        kind: name,
        artifacts,
        replayed,
    })
}
