//! Reading, writing, and solving mesh files programmatically (the same
//! machinery behind the pwflat binary).
//!
//! Run with: cargo run --example mesh_files

use pwflat::cli;
use pwflat::conformal::ConformalChart;
use pwflat::fixtures;
use pwflat::meshfile::{MeshFile, RealizedData};

fn main() {
    // Assemble a file for a perturbed round-sphere packing.
    let sphere = fixtures::sphere_tetrahedron();
    let chart = ConformalChart::packing();
    let f = vec![
        0.5f64.ln() + 0.08,
        0.5f64.ln() - 0.05,
        0.5f64.ln() + 0.02,
        0.5f64.ln(),
    ];
    let file = MeshFile::from_chart(&sphere, &chart, &f);
    let text = file.serialize();
    println!("--- serialized mesh ---\n{text}");

    // Round trip: parse then realize.
    let parsed = MeshFile::parse(&text).unwrap();
    assert_eq!(parsed, file);
    let (complex, data) = parsed.realize().unwrap();
    let RealizedData::Chart { chart, f } = data else {
        unreachable!()
    };
    println!(
        "realized: {} vertices, chart {:?}, f[0] = {:.6}",
        complex.vertex_count(),
        chart.kind(),
        f[0]
    );

    // Drive the command layer directly (what `pwflat solve` does).
    let dir = std::env::temp_dir();
    let input = dir.join("pwflat_example.mesh");
    let output = dir.join("pwflat_example_solved.mesh");
    std::fs::write(&input, &text).unwrap();
    let outcome = cli::cmd_solve(&input, "csc", None, "newton", "zero-mean", None, &output);
    println!(
        "--- solve outcome (exit {}) ---\n{}",
        outcome.exit_code, outcome.stdout
    );

    let solved = MeshFile::parse(&std::fs::read_to_string(&output).unwrap()).unwrap();
    let (complex, data) = solved.realize().unwrap();
    if let RealizedData::Chart { chart, f } = data {
        let metric = chart.apply(&complex, &f).unwrap();
        let k = pwflat::curvature::vertex_curvatures_2d(&complex, &metric.lengths()).unwrap();
        println!("solved curvatures: {k:.10?}");
    }
}
