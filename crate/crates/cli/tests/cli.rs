use std::path::Path;
use std::process::{Command, Output};

use gtcode::binmat::load_path;
use gtcode::verify::Witness;

fn gtcode(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtcode")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Non-comment lines split on `sep`.
fn table(text: &str, sep: char) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(sep).map(str::to_string).collect()).collect()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtcode(dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(gtcode(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(gtcode(dir.path(), &["bounds", "--bogus"]).status.code(), Some(1));
    assert_eq!(gtcode(dir.path(), &["frobnicate"]).status.code(), Some(1));
}

#[test]
fn bounds_anchor_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtcode(dir.path(), &["bounds", "--n", "3600", "--d", "2..6", "--rows", "a,d,p,t"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = table(&stdout(&o), '\t');
    assert_eq!(rows[0][..5], ["row_id", "d", "value", "optimizer", "status"]);
    let cell = |id: &str, d: &str| rows.iter().find(|r| r[0] == id && r[1] == d).unwrap().clone();
    assert_eq!(cell("a", "2")[2], "436");
    assert_eq!(cell("d", "2")[2], "149");
    assert_eq!(cell("t", "2")[2], "23");
    let p = cell("p", "2");
    assert_eq!((p[2].as_str(), p[3].as_str()), ("35", "w=13,mu=6"));
    assert_eq!(rows.len(), 1 + 4 * 5);
}

#[test]
fn cross_strip_violation_exits_2_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtcode(dir.path(), &["construct", "--reference", "cross_strip", "--grid", "12", "--out", "cs.gtmx"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = gtcode(dir.path(), &["verify", "--code", "cs.gtmx", "--d", "2", "--mode", "random", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("verdict=violation"));
    let line = out.lines().find(|l| l.starts_with("witness")).unwrap();
    let field = |k: &str| -> Vec<usize> {
        let v = line.split_whitespace().find_map(|f| f.strip_prefix(k)).unwrap();
        v.split(',').map(|x| x.parse().unwrap()).collect()
    };
    let w = Witness::Cover { target: field("target=")[0], cover: field("cover=") };
    let code = load_path(dir.path().join("cs.gtmx")).unwrap();
    assert!(w.replays(&code, 2));

    let o = gtcode(dir.path(), &["verify", "--code", "cs.gtmx", "--d", "1", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict=certified"));
}

#[test]
fn format_changes_delimiters_only() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = gtcode(dir.path(), &["compare"]);
    let csv = gtcode(dir.path(), &["compare", "--format", "csv"]);
    assert_eq!(table(&stdout(&tsv), '\t'), table(&stdout(&csv), ','));
    let rows = table(&stdout(&tsv), '\t');
    let big = rows.iter().find(|r| r[1] == "14400").unwrap();
    assert_eq!((big[2].as_str(), big[5].as_str()), ("240", "161"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "# bounds\nn = 100\nd=2..3\nrows=t\nformat=csv\n").unwrap();
    let o = gtcode(dir.path(), &["bounds", "--config", "run.cfg", "--d", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# n=100\n") && out.contains("# d=4\n") && out.contains("# format=csv\n"));
    let rows = table(&out, ',');
    assert_eq!(rows[1], ["t", "4", "22", "-", "computed", "-"]);

    std::fs::write(dir.path().join("bad.cfg"), "n=100\nbogus=1\n").unwrap();
    let o = gtcode(dir.path(), &["bounds", "--config", "bad.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown key \"bogus\""));
    std::fs::write(dir.path().join("junk.cfg"), "n 100\n").unwrap();
    assert_eq!(gtcode(dir.path(), &["bounds", "--config", "junk.cfg"]).status.code(), Some(1));
    assert_eq!(gtcode(dir.path(), &["bounds", "--config", "missing.cfg"]).status.code(), Some(1));
}

#[test]
fn outputs_are_byte_stable_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtcode(dir.path(), &["construct", "--recipe", "(7,2,6)_11^Iq,s(2)", "--n", "100", "--out", "c.gtmx"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sim = |workers: &str, out: &str| {
        let args = [
            "simulate", "--code", "c.gtmx", "--grid", "10", "--events", "50", "--seed", "9", "--workers", workers, "--out", out,
        ];
        assert_eq!(gtcode(dir.path(), &args).status.code(), Some(0));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let a = sim("1", "a.tsv");
    assert_eq!(a, sim("3", "b.tsv"));
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# gtcode "));
    assert!(text.contains("# seed=9\n") && !text.contains("workers"));
    assert!(text.contains("multiplicity\twindows\tdecoded\tdecoded_pct\talpha\n"));
}

#[test]
fn missing_seed_is_generated_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["construct", "--greedy", "--t", "20", "--w", "4", "--d", "2", "--n", "30", "--max-draws", "100000"];
    let o = gtcode(dir.path(), &[&args[..], &["--out", "a.gtmx"]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let seed = stderr(&o).lines().find_map(|l| l.strip_prefix("seed=")).unwrap().to_string();
    let a = std::fs::read_to_string(dir.path().join("a.gtmx")).unwrap();
    assert!(a.contains(&format!("# seed={seed}\n")));
    let o = gtcode(dir.path(), &[&args[..], &["--seed", &seed, "--out", "b.gtmx"]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert!(!stderr(&o).lines().any(|l| l.starts_with("seed=")));
    assert_eq!(a, std::fs::read_to_string(dir.path().join("b.gtmx")).unwrap());
    assert_eq!(load_path(dir.path().join("a.gtmx")).unwrap().meta().certified_d, Some(2));
}

#[test]
fn decode_stream_and_vector() {
    let dir = tempfile::tempdir().unwrap();
    gtcode(dir.path(), &["construct", "--recipe", "(6,3,4)_7^Iq", "--n", "300", "--out", "c.gtmx"]);
    let code = load_path(dir.path().join("c.gtmx")).unwrap();
    let mut csv = String::from("tdc_id,time_ps\n");
    for (j, at) in [(5usize, 100u64), (17, 110), (40, 400)] {
        for r in code.column(j) {
            csv.push_str(&format!("{r},{at}\n"));
        }
    }
    std::fs::write(dir.path().join("tdc.csv"), csv).unwrap();
    let o = gtcode(dir.path(), &["decode", "--code", "c.gtmx", "--tdc", "tdc.csv", "--interval-ps", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = table(&stdout(&o), '\t');
    assert_eq!(rows[1], ["2", "80", "success", "5 17"]);
    assert_eq!(rows[2], ["10", "400", "success", "40"]);

    let y: Vec<String> = code.superimpose(&[3, 9]).unwrap().rows().iter().map(|r| r.to_string()).collect();
    let o = gtcode(dir.path(), &["decode", "--code", "c.gtmx", "--vector", &y.join(",")]);
    assert_eq!(table(&stdout(&o), '\t')[1], ["success", "3 9"]);

    std::fs::write(dir.path().join("bad.csv"), "tdc_id,time_ps\n0,1\n99,2\n").unwrap();
    let o = gtcode(dir.path(), &["decode", "--code", "c.gtmx", "--tdc", "bad.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn import_checks_declarations() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("plain.txt"), "0 1 2\n3 4 5\n0 3 6\n").unwrap();
    let o = gtcode(dir.path(), &["import", "--file", "plain.txt", "--length", "7", "--weight", "3", "--out", "p.gtmx"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let code = load_path(dir.path().join("p.gtmx")).unwrap();
    assert_eq!((code.t(), code.n(), code.meta().certified_d), (7, 3, Some(2)));
    let o = gtcode(dir.path(), &["import", "--file", "plain.txt", "--weight", "4"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_over_a_code_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("codes")).unwrap();
    for (recipe, name) in [("(7,2,6)_11^Iq,s(2)", "codes/d6.gtmx"), ("(6,3,4)_7^Iq", "codes/d2.gtmx")] {
        gtcode(dir.path(), &["construct", "--recipe", recipe, "--n", "100", "--out", name]);
    }
    let args = [
        "sweep", "--codes", "codes", "--grid", "10", "--events", "30", "--dead-ns", "10,40", "--tdc-ps", "20,40", "--seed", "1",
    ];
    let o = gtcode(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = table(&stdout(&o), '\t');
    assert_eq!(rows[0], ["dead_ns", "tdc_ps", "firings", "max_simultaneous", "missed_pct:d=2:d2", "missed_pct:d=6:d6"]);
    assert_eq!(rows.len(), 5);
    for r in &rows[1..] {
        let (d2, d6): (f64, f64) = (r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!(d6 <= d2);
    }
}
