//! Builds the JSON analysis report and reads it back.

use sixvertex::input::CurveSpec;
use sixvertex::report::{to_json, AnalysisReport};
use sixvertex::sextactic::analyze_curve;
use sixvertex::settings::Settings;

const SPEC: &str = r#"
name = "perturbed ellipse"
grid_size = 256
fourier_x = [[0.0, 0.0], [1.0, 0.0], [0.05, 0.0]]
fourier_y = [[0.0, 0.0], [0.0, 1.0], [0.0, -0.05]]
"#;

fn main() -> sixvertex::error::Result<()> {
    let spec = CurveSpec::from_toml_str(SPEC)?;
    let settings = Settings::default().with_grid(spec.grid_size);
    let analysis = analyze_curve(&spec.to_curve()?, &settings)?;
    let report = AnalysisReport::new(&spec.name, &analysis, &settings);
    let json = to_json(&report);
    let back: AnalysisReport = serde_json::from_str(&json).expect("valid report");
    println!("{} bytes of JSON; lossless: {}", json.len(), back == report);
    println!("sextactic count {}, pass {}", back.sextactic.count, back.pass);
    Ok(())
}
