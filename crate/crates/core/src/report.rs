//! JSON reports. Floats are written with 17 significant digits so that every
//! value parses back to the same bits.

use std::io;

use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::affine::CriticalPoint;
use crate::curve::ConvexityReport;
use crate::sextactic::{CurvatureSummary, CurveAnalysis, HSummary, Lemma3Report, SextacticReport, StageRecord};
use crate::settings::Settings;
use crate::sturm::{DisconjugacyReport, FunctionCertificate};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub name: String,
    pub pass: bool,
    pub failed_stage: Option<String>,
    pub degenerate_conic: bool,
    pub convexity: ConvexityReport,
    pub total_affine_length: f64,
    pub unimodularity_defect: f64,
    pub affine_curvature_summary: CurvatureSummary,
    pub h_summary: HSummary,
    pub lift_residual: f64,
    pub wronskian_defect: f64,
    pub disconjugacy: DisconjugacyReport,
    pub lemma3: Lemma3Report,
    pub theorem2: Option<FunctionCertificate>,
    pub sextactic: SextacticReport,
    pub chain: Vec<StageRecord>,
    pub settings: Settings,
}

impl AnalysisReport {
    pub fn new(name: &str, analysis: &CurveAnalysis, settings: &Settings) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            name: name.to_string(),
            pass: analysis.pass,
            failed_stage: analysis.failed_stage().map(str::to_string),
            degenerate_conic: analysis.sextactic.degenerate_conic,
            convexity: analysis.convexity.clone(),
            total_affine_length: analysis.total_affine_length,
            unimodularity_defect: analysis.unimodularity_defect,
            affine_curvature_summary: analysis.curvature.clone(),
            h_summary: analysis.h.clone(),
            lift_residual: analysis.lift_residual,
            wronskian_defect: analysis.wronskian_defect,
            disconjugacy: analysis.disconjugacy.clone(),
            lemma3: analysis.lemma3.clone(),
            theorem2: analysis.theorem2.clone(),
            sextactic: analysis.sextactic.clone(),
            chain: analysis.chain.clone(),
            settings: settings.clone(),
        }
    }

    pub fn critical_points(&self) -> &[CriticalPoint] {
        &self.affine_curvature_summary.critical_points
    }
}

/// Pretty printing with floats in `{:.16e}` form.
struct Exact<'a>(PrettyFormatter<'a>);

impl Formatter for Exact<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Deterministic pretty JSON. Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Exact(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing plain data");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_survive_the_text_form() {
        let xs = vec![0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, -0.0, 1e16 + 2.0];
        let text = to_json(&xs);
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        for (a, b) in xs.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_json(&[f64::INFINITY]).split_whitespace().collect::<String>(), "[null]");
    }
}
