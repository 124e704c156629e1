//! Exit-code and flag behavior of the `texpic` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_texpic"))
}

fn core_fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn local_fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn convert_writes_golden_output_to_file() {
    let out = tmp("pic1_out.tex");
    let output = bin()
        .arg("convert")
        .arg(core_fixture("pic1.scene"))
        .arg("-o")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let written = std::fs::read_to_string(&out).unwrap();
    let golden = std::fs::read_to_string(core_fixture("pic1.golden.tex")).unwrap();
    assert_eq!(written, golden);
}

#[test]
fn convert_without_output_prints_to_stdout() {
    let output = bin()
        .arg("convert")
        .arg(core_fixture("pic1.scene"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).starts_with("\\begin{picture}(215,283)\n"));
}

#[test]
fn convert_empty_scene_exits_2() {
    let output = bin()
        .arg("convert")
        .arg(local_fixture("empty.scene"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("no primitives"), "{output:?}");
}

#[test]
fn convert_missing_file_exits_2() {
    let output = bin().arg("convert").arg("nope.scene").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn convert_unknown_extension_exits_2() {
    let output = bin()
        .arg("convert")
        .arg(core_fixture("pic1.tex"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn convert_unitlength_prepends_setlength() {
    let output = bin()
        .arg("convert")
        .arg(core_fixture("pic1.scene"))
        .arg("--unitlength")
        .arg("0.5mm")
        .output()
        .unwrap();
    assert!(stdout(&output).starts_with("\\setlength{\\unitlength}{0.5mm}\n\\begin{picture}"));
}

#[test]
fn convert_native_mode_emits_lines() {
    let scene = tmp("native.scene");
    std::fs::write(&scene, "segment 0 0 12 18\nvector 60 50 80 10\n").unwrap();
    let output = bin()
        .arg("convert")
        .arg(&scene)
        .arg("--line-mode")
        .arg("native-when-exact")
        .output()
        .unwrap();
    let text = stdout(&output);
    assert!(text.contains("\\put(0,0){\\line(2,3){12}}"), "{text}");
    assert!(text.contains("\\put(60,50){\\vector(1,-2){20}}"), "{text}");
}

#[test]
fn convert_circle_quads_mode() {
    let scene = tmp("circle.scene");
    std::fs::write(&scene, "circle 50 50 40\n").unwrap();
    let output = bin()
        .arg("convert")
        .arg(&scene)
        .arg("--circle-mode")
        .arg("quads:8")
        .output()
        .unwrap();
    let text = stdout(&output);
    assert_eq!(text.matches("\\qbezier").count(), 8, "{text}");
    assert!(!text.contains("\\circle"));
}

#[test]
fn check_clean_file_is_silent() {
    let output = bin()
        .arg("check")
        .arg(core_fixture("pic1.tex"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(output.stdout.is_empty());
    assert!(output.stderr.is_empty());
}

#[test]
fn check_reports_lint_errors_with_positions() {
    let output = bin()
        .arg("check")
        .arg(local_fixture("bad_line.tex"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    assert!(err.contains("E02 2:1"), "{err}");
}

#[test]
fn check_warnings_alone_exit_0() {
    let file = tmp("warn.tex");
    std::fs::write(
        &file,
        "\\begin{picture}(50,50)\n\\put(60,10){x}\n\\end{picture}\n",
    )
    .unwrap();
    let output = bin().arg("check").arg(&file).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stderr(&output).contains("W01"), "{output:?}");
}

#[test]
fn check_empty_file_exits_2() {
    let file = tmp("empty.tex");
    std::fs::write(&file, "").unwrap();
    let output = bin().arg("check").arg(&file).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn render_svg_reimports_within_tolerance() {
    let out = tmp("pic1_rendered.svg");
    let output = bin()
        .arg("render")
        .arg(core_fixture("pic1.svg"))
        .arg("-o")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");

    let original = std::fs::read_to_string(core_fixture("pic1.svg")).unwrap();
    let rendered = std::fs::read_to_string(&out).unwrap();
    let opts = texpic::ImportOptions::default();
    let (a, _) = texpic::import_svg::<f64>(&original, &opts).unwrap();
    let (b, _) = texpic::import_svg::<f64>(&rendered, &opts).unwrap();
    assert_eq!(a.len(), b.len());
    let policy = texpic::FlattenPolicy::default();
    let d = texpic::hausdorff(
        &texpic::flatten_scene(&a, &policy),
        &texpic::flatten_scene(&b, &policy),
        0.5,
    )
    .unwrap();
    assert!(d <= 1e-6, "re-import moved geometry by {d}");
}

#[test]
fn render_missing_output_goes_to_stdout() {
    let output = bin()
        .arg("render")
        .arg(core_fixture("pic1.scene"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).starts_with("<svg "));
}

#[test]
fn roundtrip_prints_distance_and_exits_0() {
    let output = bin()
        .arg("roundtrip")
        .arg(core_fixture("pic1.scene"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let text = stdout(&output);
    let d: f64 = text.trim().parse().unwrap();
    assert!(d <= 1.5, "{text}");
}

#[test]
fn roundtrip_label_only_scene_is_exact() {
    let scene = tmp("label_only.scene");
    std::fs::write(&scene, "label 10 20 solo\n").unwrap();
    let output = bin().arg("roundtrip").arg(&scene).output().unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert_eq!(stdout(&output).trim(), "0.000000");
}

#[test]
fn render_tex_with_lint_errors_exits_1() {
    let output = bin()
        .arg("render")
        .arg(local_fixture("bad_line.tex"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    assert!(stderr(&output).contains("E02"));
}

#[test]
fn roundtrip_zero_threshold_fails_on_fractional_scene() {
    let output = bin()
        .arg("roundtrip")
        .arg(local_fixture("frac.scene"))
        .arg("--max-distance")
        .arg("0")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let d: f64 = stdout(&output).trim().parse().unwrap();
    assert!(d > 0.0);
}

#[test]
fn strict_mode_rejects_unsupported_svg() {
    let file = tmp("ellipse.svg");
    std::fs::write(
        &file,
        r#"<svg viewBox="0 0 10 10"><ellipse cx="5" cy="5" rx="2" ry="1"/></svg>"#,
    )
    .unwrap();
    let output = bin()
        .arg("convert")
        .arg(&file)
        .arg("--strict")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    // Without strict the element is skipped with a warning; the scene is
    // then empty, which is an operational failure.
    let output = bin().arg("convert").arg(&file).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("W03"), "{output:?}");
}

#[test]
fn format_override_beats_extension() {
    let file = tmp("scene_as.txt");
    std::fs::write(&file, "label 1 2 ok\n").unwrap();
    let output = bin()
        .arg("convert")
        .arg(&file)
        .arg("--format")
        .arg("scene")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(stdout(&output).contains("\\put(0,0){ok}"));
}

#[test]
fn output_is_deterministic_across_runs() {
    let run = || {
        let output = bin()
            .arg("convert")
            .arg(core_fixture("pic1.scene"))
            .output()
            .unwrap();
        (stdout(&output), stderr(&output))
    };
    assert_eq!(run(), run());
}
