use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use irisval::imaging::save_png;
use irisval::synthetic::{textured_iris, write_mini_corpus};

fn irisval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irisval")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn files_with_ext(dir: &Path, ext: &str) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            out.extend(files_with_ext(&path, ext));
        } else if path.extension().is_some_and(|x| x == ext) {
            out.push(path);
        }
    }
    out.sort();
    out
}

fn csv_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(str::to_string).collect()
}

#[test]
fn selftest_passes() {
    let o = irisval(&["selftest", "--cases", "8"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 6, "{stdout}");
}

#[test]
fn preprocess_empty_and_missing_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = tmp.path().join("out");
    assert_eq!(code(&irisval(&["preprocess", p(&empty), "--out", p(&out)])), 3);
    let missing = tmp.path().join("nope");
    assert_eq!(code(&irisval(&["preprocess", p(&missing), "--out", p(&out)])), 2);
    let bad = irisval(&["preprocess", p(&empty), "--set", "rotations=abc", "--out", p(&out)]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn preprocess_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    write_mini_corpus(&input, 3).unwrap();
    // Two images keep the run short.
    for e in fs::read_dir(&input).unwrap() {
        let path = e.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if !(name.starts_with("iris_00") || name.starts_with("iris_01")) {
            fs::remove_file(path).unwrap();
        }
    }
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = irisval(&["preprocess", p(&input), "--seed", "5", "--set", "hole_punch_count=4", "--out", p(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let pngs_a = files_with_ext(&a, "png");
    assert_eq!(pngs_a.len(), 2 * (11 + 1 + 4));
    for fa in &pngs_a {
        let fb = b.join(fa.strip_prefix(&a).unwrap());
        assert_eq!(fs::read(fa).unwrap(), fs::read(&fb).unwrap(), "{}", fa.display());
    }
    assert_eq!(fs::read(a.join("manifest.jsonl")).unwrap(), fs::read(b.join("manifest.jsonl")).unwrap());
}

#[test]
fn full_validation_campaign() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    write_mini_corpus(&input, 11).unwrap();
    let data = tmp.path().join("data");
    let o = irisval(&["preprocess", p(&input), "--set", "hole_punch_count=3", "--out", p(&data)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(data.join("manifest.jsonl")).unwrap();
    let accepted = manifest.lines().filter(|l| l.contains("\"accepted\"")).count();
    assert_eq!(accepted, 9, "{manifest}");
    assert!(manifest.lines().any(|l| l.contains("iris_07") && l.contains("coverage")));

    let codes = tmp.path().join("codes");
    let o = irisval(&["encode", "--manifest", p(&data.join("manifest.jsonl")), "--out", p(&codes)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let icodes = files_with_ext(&codes, "icode");
    assert_eq!(icodes.len(), 9 * (1 + 11 + 3));
    assert!(icodes.iter().all(|f| fs::metadata(f).unwrap().len() == 4058));
    assert_eq!(csv_rows(&codes.join("authentic_map.csv")).len(), 9 * 14);

    let report = tmp.path().join("report");
    let o = irisval(&[
        "validate",
        p(&codes.join("reference")),
        "--authentic-map",
        p(&codes.join("authentic_map.csv")),
        "--out",
        p(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&report.join("distributions.csv"));
    assert_eq!(rows.iter().filter(|r| r.starts_with("imposter,")).count(), 9 * 8 / 2);
    assert_eq!(rows.iter().filter(|r| r.starts_with("authentic,")).count(), 9 * 14);
    assert_eq!(csv_rows(&report.join("thresholds.csv")).len(), 100);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report.join("summary.json")).unwrap()).unwrap();
    assert!(summary["authentic"]["mean"].as_f64().unwrap() < summary["imposter"]["mean"].as_f64().unwrap());

    // Rotated copies of enrolled irises collide; a fresh random code does not.
    let refs = codes.join("reference");
    let cands = tmp.path().join("candidates");
    fs::create_dir(&cands).unwrap();
    for id in ["iris_00", "iris_03"] {
        fs::copy(codes.join("variants").join(id).join("rot_3.icode"), cands.join(format!("{id}_rot.icode"))).unwrap();
    }
    irisval::synthetic::random_code(99).save(cands.join("fresh.icode")).unwrap();
    let screen_out = tmp.path().join("screen");
    let o = irisval(&["screen", p(&cands), p(&refs), "--out", p(&screen_out)]);
    assert_eq!(code(&o), 0);
    let screen = csv_rows(&screen_out.join("screen.csv"));
    assert_eq!(screen.len(), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("1 pass, 2 fail"), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(code(&irisval(&["screen", p(&refs), p(&refs), "--criterion", "1.5", "--out", p(&screen_out)])), 2);
}

#[test]
fn validate_rejects_bad_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("codes");
    fs::create_dir(&dir).unwrap();
    let out = tmp.path().join("out");
    assert_eq!(code(&irisval(&["validate", p(&dir), "--out", p(&out)])), 4);

    irisval::synthetic::random_code(1).save(dir.join("a.icode")).unwrap();
    assert_eq!(code(&irisval(&["validate", p(&dir), "--out", p(&out)])), 4);

    let mut bytes = irisval::synthetic::random_code(2).to_file_bytes();
    bytes[..4].copy_from_slice(b"XXXX");
    fs::write(dir.join("broken.icode"), bytes).unwrap();
    let o = irisval(&["validate", p(&dir), "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken.icode"));

    fs::remove_file(dir.join("broken.icode")).unwrap();
    irisval::synthetic::random_code(3).save(dir.join("b.icode")).unwrap();
    let o = irisval(&["validate", p(&dir), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&out.join("distributions.csv")).len(), 1);
}

#[test]
fn encode_plain_images() {
    let tmp = tempfile::tempdir().unwrap();
    let imgs = tmp.path().join("imgs");
    fs::create_dir(&imgs).unwrap();
    for seed in 0..3 {
        save_png(&textured_iris(seed), imgs.join(format!("eye{seed}.png"))).unwrap();
    }
    fs::write(imgs.join("junk.png"), b"not an image").unwrap();
    let out = tmp.path().join("out");
    let o = irisval(&["encode", p(&imgs), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let icodes = files_with_ext(&out, "icode");
    assert_eq!(icodes.len(), 3);
    assert!(icodes.iter().all(|f| fs::metadata(f).unwrap().len() == 4058));

    let again = tmp.path().join("again");
    irisval(&["encode", p(&imgs), "--out", p(&again)]);
    for f in &icodes {
        assert_eq!(fs::read(f).unwrap(), fs::read(again.join(f.file_name().unwrap())).unwrap());
    }

    let only_junk = tmp.path().join("junk");
    fs::create_dir(&only_junk).unwrap();
    fs::copy(imgs.join("junk.png"), only_junk.join("junk.png")).unwrap();
    assert_eq!(code(&irisval(&["encode", p(&only_junk), "--out", p(&out)])), 4);
}

#[test]
fn color_analysis_one_and_two_sets() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, seeds) in [(&a, 0..6u64), (&b, 10..14u64)] {
        fs::create_dir(dir).unwrap();
        for s in seeds {
            save_png(&textured_iris(s), dir.join(format!("img{s:02}.png"))).unwrap();
        }
    }
    let out1 = tmp.path().join("one");
    let o = irisval(&["coloranalysis", p(&a), "--out", p(&out1)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&out1.join("ilr.csv")).len(), 6);
    assert_eq!(csv_rows(&out1.join("distances_intra.csv")).len(), 15);
    let hist: u64 = csv_rows(&out1.join("histogram_intra.csv"))
        .iter()
        .map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(hist, 15);
    assert!(!out1.join("distances_inter.csv").exists());

    let out2 = tmp.path().join("two");
    let o = irisval(&["coloranalysis", p(&a), p(&b), "--out", p(&out2)]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&out2.join("ilr_b.csv")).len(), 4);
    assert_eq!(csv_rows(&out2.join("pca.csv")).len(), 10);
    // One nearest-neighbour row per set-b image.
    assert_eq!(csv_rows(&out2.join("distances_inter.csv")).len(), 4);

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(code(&irisval(&["coloranalysis", p(&empty), "--out", p(&out2)])), 4);
}
