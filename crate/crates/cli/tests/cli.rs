use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn ordlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json", "--no-timestamp"];
    all.extend_from_slice(args);
    let o = ordlab(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn parse_recognises_families() {
    for (file, family) in [
        ("klein.grp", "KleinBottle"),
        ("trefoil.grp", "TorusKnot(2,3)"),
        ("z2.grp", "Zn(2)"),
    ] {
        let v = json(&["parse", &data(file)]);
        assert_eq!(v["family"], family);
        assert_eq!(v["command"], "parse");
        assert!(v.get("generated_at").is_none());
    }
}

#[test]
fn exit_codes_follow_error_class() {
    assert_eq!(ordlab(&["parse", "/nonexistent/x.grp"]).status.code(), Some(4));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.grp");
    std::fs::write(&bad, "gens x;\nrel x z;\n").unwrap();
    assert_eq!(ordlab(&["parse", bad.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(
        ordlab(&["slope", &data("klein.grp"), "--order", "nope"]).status.code(),
        Some(6)
    );
    assert_eq!(ordlab(&["ball", &data("klein.grp")]).status.code(), Some(2));
    assert_eq!(
        ordlab(&["--jobs", "0", "parse", &data("klein.grp")]).status.code(),
        Some(2)
    );
}

#[test]
fn cone_search_on_a_line_finds_four_cones() {
    let v = json(&["cone-search", &data("z2.grp"), "-r", "1", "--line", "T:0"]);
    assert_eq!(v["count"], 4);
    assert_eq!(v["complete"], true);
    let v = json(&[
        "cone-search",
        &data("z2.grp"),
        "-r",
        "2",
        "--line",
        "T:0:1",
        "--sign",
        "a:+",
    ]);
    assert_eq!(v["count"], 1);
}

#[test]
fn unsatisfiable_search_writes_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("torsion.cert");
    let v = json(&[
        "cone-search",
        &data("torsion.grp"),
        "-r",
        "1",
        "--emit-certificate",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(v["unsat"], true);
    assert!(!std::fs::read_to_string(&cert).unwrap().is_empty());
    let v = json(&["certify-nonorderable", &data("torsion.grp")]);
    assert_eq!(v["certified"], true);
}

#[test]
fn detection_levels() {
    let v = json(&[
        "detect",
        &data("trefoil.grp"),
        "--slope",
        "0",
        "--level",
        "strong",
        "--epi",
        "ab",
    ]);
    assert_eq!(v["verdicts"][0]["status"], "certified");
    let v = json(&["detect", &data("trefoil.grp"), "--slope", "1/0", "--level", "strong"]);
    assert_eq!(v["verdicts"][0]["status"], "not-certified");
    let v = json(&[
        "detect",
        &data("klein.grp"),
        "--slope",
        "0",
        "--level",
        "regular",
        "--order",
        "o(y)",
    ]);
    assert_eq!(v["verdicts"][0]["status"], "certified");
    let o = ordlab(&["detect", &data("klein.grp"), "--slope", "0", "--level", "weak"]);
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn slope_and_cofinality() {
    let o = ordlab(&["slope", &data("klein.grp"), "--order", "o"]);
    assert!(stdout(&o).contains("0/1 (exact"));
    let v = json(&["cofinal", &data("klein.grp"), "--order", "o", "--element", "x^2"]);
    assert_eq!(v["verdict"], "cofinal-at-radius");
    let v = json(&["cofinal", &data("klein.grp"), "--order", "o", "--boundary"]);
    assert_eq!(v["witness"], "x^2");
}

#[test]
fn gluing_commands() {
    let v = json(&["glue", &data("klein_pair.glue"), "--assign", "l,l", "--compat", "3"]);
    assert_eq!(v["passes"], true);
    assert_eq!(v["compatibility"][0]["verdict"], "compatible");
    let v = json(&["glue", &data("klein_pair.glue"), "--assign", "l,m"]);
    assert_eq!(v["passes"], false);
    let v = json(&["glue", &data("trefoil_klein.glue"), "--assign", "1,1"]);
    assert_eq!(v["passes"], false);
}

#[test]
fn files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("circle.svg");
    let report = dir.path().join("report.json");
    let o = ordlab(&[
        "--report",
        report.to_str().unwrap(),
        "detect",
        &data("klein.grp"),
        "--slope",
        "0",
        "--level",
        "regular",
        "--order",
        "o",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["generated_at"].is_string());
    let plot = dir.path().join("pl.svg");
    let o = ordlab(&[
        "dynreal",
        &data("klein.grp"),
        "--order",
        "o",
        "-r",
        "2",
        "--svg",
        plot.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&plot).unwrap().contains("<svg"));
}

#[test]
fn reports_do_not_depend_on_jobs() {
    let runs: &[&[&str]] = &[
        &["cone-search", "DATA:z2.grp", "-r", "2", "--line", "T:1/2"],
        &[
            "detect",
            "DATA:klein.grp",
            "--slope",
            "0",
            "--level",
            "regular",
            "--order",
            "o(x)",
        ],
        &[
            "detect",
            "DATA:z2.grp",
            "--slope",
            "1/2",
            "--level",
            "weak",
            "--order",
            "line:1/2",
            "--exclude",
        ],
    ];
    for args in runs {
        let args: Vec<String> = args
            .iter()
            .map(|a| a.strip_prefix("DATA:").map(data).unwrap_or_else(|| a.to_string()))
            .collect();
        let outputs: Vec<Vec<u8>> = ["1", "4"]
            .iter()
            .map(|j| {
                let mut all = vec!["--json", "--no-timestamp", "--jobs", j];
                all.extend(args.iter().map(String::as_str));
                let o = ordlab(&all);
                assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
                o.stdout
            })
            .collect();
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}
