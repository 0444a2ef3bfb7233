use std::path::Path;
use std::process::{Command, Output};

const SMALL: [&str; 8] = ["--set", "banks=5", "--set", "firms=10", "--set", "households=60", "--set", "steps=20"];

fn cdsnet(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdsnet"))
        .args(args)
        .env("CDSNET_OUT", out)
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn single_run_writes_csv_and_summary_reproducibly() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args: Vec<&str> = ["run", "--runs", "1", "--seed", "5", "--regime", "unregulated_naked"].into_iter().chain(SMALL).collect();
    let first = cdsnet(&args, a.path());
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = cdsnet(&args, b.path());
    assert!(second.status.success());

    let names = files(a.path());
    assert_eq!(names.len(), 2, "{names:?}");
    assert!(names[0].starts_with("run-unregulated_naked-") && names[0].ends_with(".csv"));
    assert!(names[1].ends_with(".summary.toml"));
    assert_eq!(names, files(b.path()));
    for n in &names {
        assert_eq!(std::fs::read(a.path().join(n)).unwrap(), std::fs::read(b.path().join(n)).unwrap(), "{n}");
    }
}

#[test]
fn batch_writes_histograms_summary_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let args: Vec<&str> = ["run", "--runs", "3"].into_iter().chain(SMALL).collect();
    let o = cdsnet(&args, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let names = files(dir.path());
    assert_eq!(names.iter().filter(|n| n.starts_with("batch-no_cds-")).count(), 2, "{names:?}");
    assert_eq!(names.iter().filter(|n| n.starts_with("plot_")).count(), 5, "{names:?}");
    assert!(stdout(&o).contains("relative_loss"));
}

#[test]
fn compare_writes_four_histograms_and_one_summary() {
    let dir = tempfile::tempdir().unwrap();
    let args: Vec<&str> = ["compare", "--runs", "3", "--quiet"].into_iter().chain(SMALL).collect();
    let o = cdsnet(&args, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let names = files(dir.path());
    assert_eq!(names.iter().filter(|n| n.ends_with(".histograms.csv")).count(), 4, "{names:?}");
    assert_eq!(names.iter().filter(|n| n.ends_with(".summary.toml")).count(), 1, "{names:?}");
    let panel = std::fs::read_to_string(dir.path().join("plot_debtrank_by_bank.csv")).unwrap();
    assert_eq!(panel.lines().count(), 1 + 4 * 5);
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "banks = 5\nfirms = 10\nhouseholds = 60\nsteps = 15\nruns = 1\n[abm]\nwage = 1.1\n").unwrap();
    let out = dir.path().join("out");
    let o = cdsnet(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = files(&out).into_iter().find(|n| n.ends_with(".summary.toml")).unwrap();
    let text = std::fs::read_to_string(out.join(summary)).unwrap();
    assert!(text.contains("wage = 1.1") && text.contains("steps = 15"), "{text}");
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run", "--set", "foo=1"],
        vec!["run", "--regime", "sideways"],
        vec!["run", "--config", "/nonexistent/c.toml"],
        vec!["run", "--set", "banks=2"],
        vec!["compare", "--regime", "no_cds"],
        vec!["launch"],
    ] {
        let o = cdsnet(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(files(dir.path()).is_empty());
}

#[test]
fn runtime_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "").unwrap();
    let args: Vec<&str> = ["run", "--runs", "1", "--out", blocker.to_str().unwrap()].into_iter().chain(SMALL).collect();
    let o = cdsnet(&args, dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("blocker"));
}

#[test]
fn net_demo_shows_both_cases() {
    let dir = tempfile::tempdir().unwrap();
    let o = cdsnet(&["net-demo"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("covered CDS") && text.contains("naked CDS"));
    assert!(text.contains("naked receivable: bank 0 collects 4.1 if bank 2 defaults"), "{text}");
}

#[test]
fn quote_demo_logs_quotes() {
    let dir = tempfile::tempdir().unwrap();
    let args: Vec<&str> = ["quote-demo"].into_iter().chain(SMALL).collect();
    let o = cdsnet(&args, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let names = files(dir.path());
    assert_eq!(names.len(), 1);
    let csv = std::fs::read_to_string(dir.path().join(&names[0])).unwrap();
    assert!(csv.starts_with("step,buyer,seller,m,delta_el,tau,s_eff\n"));
    assert!(csv.lines().count() > 1);
    assert!(stdout(&o).contains("chosen"));
}
