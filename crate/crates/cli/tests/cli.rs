use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cerny-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn cerny-lab")
}

fn run_with_stdin(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn cerny-lab");
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn golden_outputs() {
    let cases: &[(&[&str], &str)] = &[
        (&["trt", "tr:9"], "trt_tr9.txt"),
        (&["spf", "cerny:4", "--t-max", "9", "--csv", "-"], "spf_cerny4.csv"),
        (&["strategies", "cerny:4", "--t", "3"], "strategies_cerny4_t3.txt"),
        (&["columns", "cerny:3", "--t", "2"], "columns_cerny3_t2.txt"),
        (&["gen", "tr", "9"], "gen_tr9.txt"),
        (&["bounds", "tr:9", "--measure"], "bounds_tr9.txt"),
    ];
    for (args, file) in cases {
        let out = run(args);
        assert!(out.status.success(), "{args:?}");
        assert_eq!(stdout(&out), golden(file), "{args:?}");
    }
}

#[test]
fn trt_witness_merges_three_states() {
    let v = json(&["trt", "tr:9", "--json"]);
    assert_eq!(v["schema"], "cerny-lab/1");
    assert_eq!(v["t"], 12);
    let word = v["witness"].as_str().unwrap();
    assert_eq!(word.len(), 12);
    let aut = cerny_lab::tr(9).unwrap();
    let w = cerny_lab::Word::parse(&aut, word).unwrap();
    let targets: std::collections::BTreeMap<usize, usize> = (0..9).fold(Default::default(), |mut m, q| {
        *m.entry(aut.run(q, &w)).or_default() += 1;
        m
    });
    assert!(targets.values().any(|&c| c >= 3));
}

#[test]
fn spf_csv_shape() {
    let out = stdout(&run(&["spf", "cerny:4", "--t-max", "9", "--csv", "-"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,k_num,k_den,k_float,m_t,dim_P");
    assert_eq!(lines.len(), 11);
    assert!(lines[10].starts_with("9,1,1,"));

    let dir = std::env::temp_dir().join(format!("cerny-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("k.csv");
    let out = run(&["spf", "cerny:4", "--t-max", "9", "--csv", file.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&file).unwrap(), golden("spf_cerny4.csv"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn generated_automata_round_trip() {
    for args in [["gen", "cerny", "6", ""], ["gen", "tr", "11", ""], ["gen", "random", "6", "2"]] {
        let args: Vec<&str> = args.iter().copied().filter(|a| !a.is_empty()).collect();
        let text = run(&args).stdout;
        let out = run_with_stdin(&["validate", "-", "--json"], &text);
        assert!(out.status.success(), "{args:?}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["n"], args[2].parse::<u64>().unwrap());

        let again = run_with_stdin(&["spf", "-", "--t-max", "4", "--csv", "-"], &text);
        let builtin = match args[1] {
            "random" => continue,
            fam => run(&["spf", &format!("{fam}:{}", args[2]), "--t-max", "4", "--csv", "-"]),
        };
        assert_eq!(stdout(&again), stdout(&builtin));
    }
}

#[test]
fn piped_cerny_reset_word() {
    let text = run(&["gen", "cerny", "5"]).stdout;
    let out = run_with_stdin(&["reset-word", "-"], &text);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("length=16\n"));
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("cerny-lab-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "3 1\n1 2 3\n1 2\n").unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    std::fs::remove_dir_all(dir).unwrap();

    assert_eq!(run(&["trt", "tr:x"]).status.code(), Some(2));
    assert_eq!(run(&["trt", "/nonexistent/automaton"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "random", "4"]).status.code(), Some(2));

    // two permutations never synchronize
    let perm = b"3 2\n2 3 1\n2 1 3\n";
    assert_eq!(run_with_stdin(&["reset-word", "-"], perm).status.code(), Some(1));
    assert_eq!(run(&["check-conjectures", "tr:9", "--t-max", "12"]).status.code(), Some(1));
    assert_eq!(run(&["check-conjectures", "cerny:5", "--t-max", "16"]).status.code(), Some(0));
}

#[test]
fn strategies_json_is_exact() {
    let v = json(&["strategies", "cerny:4", "--t", "3", "--json"]);
    assert_eq!(v["k"]["display"], "1/2");
    assert_eq!(v["canonical"]["available"], true);
    assert_eq!(v["canonical"]["pairs"], 2);
    let mass: Vec<&str> = v["q"].as_array().unwrap().iter().map(|c| c["mass"]["display"].as_str().unwrap()).collect();
    assert_eq!(mass, ["1/2", "1/2"]);
}

#[test]
fn game_sim_is_reproducible() {
    let args = ["game-sim", "cerny:4", "--t", "3", "--rounds", "5000", "--seed", "9", "--json"];
    let a = json(&args);
    let b = json(&args);
    assert_eq!(a, b);
    assert_eq!(a["expected"]["display"], "1/2");
    let z: f64 = a["z"].as_str().unwrap().parse().unwrap();
    assert!(z.abs() < 4.0);

    let uniform = json(&["game-sim", "cerny:4", "--t", "0", "--rounds", "5000", "--strategy", "uniform", "--json"]);
    assert_eq!(uniform["expected"]["display"], "1/4");
}

#[test]
fn game_sim_reads_strategy_files() {
    let dir = std::env::temp_dir().join(format!("cerny-lab-strat-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("s.json");
    std::fs::write(&file, r#"{"p": ["1/2", "1/2", 0, 0], "q": [{"num": 1, "den": 4}, "1/4", "1/4", "1/4"]}"#).unwrap();
    let v = json(&["game-sim", "cerny:4", "--t", "0", "--rounds", "100", "--strategy", file.to_str().unwrap(), "--json"]);
    assert_eq!(v["expected"]["display"], "1/4");

    std::fs::write(&file, r#"{"p": ["1/2", "1/2"], "q": ["1"]}"#).unwrap();
    let out = run(&["game-sim", "cerny:4", "--t", "0", "--rounds", "100", "--strategy", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn thread_count_does_not_change_results() {
    let one = bin()
        .env("CERNY_LAB_THREADS", "1")
        .args(["spf", "tr:11", "--t-max", "14", "--csv", "-"])
        .output()
        .unwrap();
    let many = bin()
        .env("CERNY_LAB_THREADS", "4")
        .args(["spf", "tr:11", "--t-max", "14", "--csv", "-"])
        .output()
        .unwrap();
    assert!(one.status.success() && !one.stdout.is_empty());
    assert_eq!(one.stdout, many.stdout);
}
