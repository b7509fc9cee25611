use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn solution_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("sicfiducial."))
        .collect();
    files.sort();
    files
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn search_d5_zauner_writes_verifiable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let o = sic(&["search", "--dim", "5", "--symmetry", "fz", "--trials", "50", "--seed", "1", "--out", out_dir]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("event=start dim=5"));
    assert!(text.lines().any(|l| l.starts_with("event=batch ")));
    assert!(text.lines().last().unwrap().starts_with("summary dim=5"));

    let files = solution_files(dir.path());
    assert!(!files.is_empty());
    for f in &files {
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        assert!(name.starts_with("sicfiducial.5.t") && name.ends_with(".17.txt"), "{name}");
        assert!(fs::read_to_string(f).unwrap().contains("# symmetry = fz:m=0"));
    }
    let mut args = vec!["verify"];
    let names: Vec<String> = files.iter().map(|p| p.to_string_lossy().into_owned()).collect();
    args.extend(names.iter().map(String::as_str));
    let v = sic(&args);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert_eq!(stdout(&v).lines().filter(|l| l.ends_with("pass=true")).count(), files.len());
}

#[test]
fn search_is_byte_reproducible_without_timestamps() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, workers) in [(&a, "1"), (&b, "3")] {
        let o = Command::new(env!("CARGO_BIN_EXE_sic"))
            .args(["search", "--dim", "4", "--trials", "10", "--seed", "9", "--no-timestamp", "--out"])
            .arg(dir.path())
            .env("SIC_WORKERS", workers)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let fa = solution_files(a.path());
    let fb = solution_files(b.path());
    assert!(!fa.is_empty());
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        assert!(!fs::read_to_string(x).unwrap().contains("timestamp"));
    }
}

#[test]
fn search_usage_errors() {
    let o = sic(&["search", "--dim", "8", "--symmetry", "fb", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sic(&["search", "--dim", "9", "--symmetry", "fb"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fb inapplicable: d+1 not a square"));
    let o = sic(&["search", "--dim", "5", "--symmetry", "fq"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_without_hits_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = sic(&["search", "--dim", "6", "--trials", "1", "--max-iters", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(solution_files(dir.path()).is_empty());
}

#[test]
fn verify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let good = write(dir.path(), "good.txt", &format!("0 0\n{s} 0\n{} 0\n", -s));
    let bad = write(dir.path(), "bad.txt", "1 0\n0 0\n0 0\n");
    let twenty = write(
        dir.path(),
        "twenty.txt",
        "0.00000000000000000000 0\n0.70710678118654752440 0\n-0.70710678118654752440 0\n",
    );

    let o = sic(&["verify", &good, &twenty]);
    assert_eq!(o.status.code(), Some(0));

    let o = sic(&["verify", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o);
    let max_dev: f64 = line.split_whitespace().find_map(|f| f.strip_prefix("max_dev=")).unwrap().parse().unwrap();
    assert!((max_dev - 0.75).abs() < 1e-12);

    let o = sic(&["verify", &good, "--dim", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_parse_error_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.txt", "# dim = 3\n0 0\n0.7 zz\n-0.7 0\n");
    let o = sic(&["verify", &broken]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line=3"), "{}", stderr(&o));
}

#[test]
fn classify_one_file_and_its_conjugate() {
    let dir = tempfile::tempdir().unwrap();
    let o = sic(&[
        "search",
        "--dim",
        "4",
        "--trials",
        "8",
        "--seed",
        "2",
        "--stop-after",
        "1",
        "--no-timestamp",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let first = solution_files(dir.path()).remove(0);
    let text = fs::read_to_string(&first).unwrap();
    let conj: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split_whitespace();
            let re: f64 = it.next().unwrap().parse().unwrap();
            let im: f64 = it.next().unwrap().parse().unwrap();
            format!("{re:e} {:e}\n", -im)
        })
        .collect();
    let conj_path = write(dir.path(), "conjugate.txt", &conj);
    let first = first.to_string_lossy().into_owned();

    let o = sic(&["classify", &first]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("summary dim=4 files=1 orbits=1"));

    let o = sic(&["classify", "--dim", "4", &first, &conj_path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("orbits=1"));
    assert!(out.contains("generator=["));
}

#[test]
fn classify_rejects_large_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = (0..13).map(|k| if k == 0 { "1 0\n".to_string() } else { "0 0\n".to_string() }).collect();
    let path = write(dir.path(), "d13.txt", &body);
    let o = sic(&["classify", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("12"));
}

#[test]
fn info_lines_are_key_value() {
    let o = sic(&["info", "--dim", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("dim=12 dbar=24 "));
    assert!(out.lines().filter(|l| l.starts_with("conjugacy ")).all(|l| l.ends_with("pass=true")));
}
