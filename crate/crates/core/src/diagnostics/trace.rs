use std::io::{self, Write};

use crate::tau::Tau;

/// Version of the trace CSV layout, written as the first comment line.
pub const TRACE_FORMAT_VERSION: u32 = 1;

pub const TRACE_HEADER: &str = "step,energy,radius,l2_move,lp_move,h1_move,inner_iters";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub energy: f64,
    pub radius: Option<f64>,
    pub l2_move: f64,
    pub lp_move: f64,
    pub h1_move: f64,
    pub inner_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceMetadata {
    pub eps: f64,
    pub tau: Tau,
    pub potential: String,
    pub n: usize,
    pub length: f64,
    /// Measured by the caller; kept out of the CSV so identical runs give identical files.
    pub wall_time_s: Option<f64>,
    /// Additional `key=value` pairs echoed into the CSV header, in insertion order.
    pub extra: Vec<(String, String)>,
}

/// Per-step energies and geometry of one run. Step 0 describes the initial field.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace {
    meta: TraceMetadata,
    records: Vec<TraceRecord>,
    failure: Option<String>,
}

impl EnergyTrace {
    pub fn new(meta: TraceMetadata) -> Self {
        Self {
            meta,
            records: Vec::new(),
            failure: None,
        }
    }

    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn meta(&self) -> &TraceMetadata {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut TraceMetadata {
        &mut self.meta
    }

    pub fn mark_failed(&mut self, reason: impl Into<String>) {
        self.failure = Some(reason.into());
    }

    pub fn failure(&self) -> Option<&str> {
        self.failure.as_deref()
    }

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.energy)
    }

    /// True when each energy is at most its predecessor plus `rel_tol·(1 + |E|)`.
    pub fn is_monotone(&self, rel_tol: f64) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].energy <= w[0].energy + rel_tol * (1.0 + w[0].energy.abs()))
    }

    /// Writes `# key=value` metadata lines, the header and one row per record.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# format_version={TRACE_FORMAT_VERSION}")?;
        writeln!(w, "# eps={}", self.meta.eps)?;
        writeln!(w, "# tau={}", self.meta.tau)?;
        writeln!(w, "# potential={}", self.meta.potential)?;
        writeln!(w, "# n={}", self.meta.n)?;
        writeln!(w, "# length={}", self.meta.length)?;
        for (k, v) in &self.meta.extra {
            writeln!(w, "# {k}={v}")?;
        }
        match &self.failure {
            None => writeln!(w, "# status=ok")?,
            Some(reason) => writeln!(w, "# status=failed: {}", reason.replace('\n', " "))?,
        }
        writeln!(w, "{TRACE_HEADER}")?;
        for r in &self.records {
            let radius = r.radius.map(|v| format!("{v:e}")).unwrap_or_default();
            writeln!(
                w,
                "{},{:e},{},{:e},{:e},{:e},{}",
                r.step, r.energy, radius, r.l2_move, r.lp_move, r.h1_move, r.inner_iterations
            )?;
        }
        w.flush()
    }
}
