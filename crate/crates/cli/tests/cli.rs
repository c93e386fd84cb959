use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn oblab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oblab"))
        .args(args)
        .env_remove("OBLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(line: &str, i: usize) -> &str {
    line.split(',').nth(i).unwrap()
}

#[test]
fn xor_game_is_always_won() {
    let o = oblab(&[
        "game",
        "--class",
        "pointfn",
        "--obf",
        "obf_xor",
        "--attack",
        "xor_codereader",
        "--n-grid",
        "16,32",
        "--trials",
        "200",
        "--seed",
        "2a",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for (row, n) in rows.iter().zip(["16", "32"]) {
        assert_eq!(field(row, 3), n);
        assert_eq!(field(row, 6), "1");
    }
}

#[test]
fn usage_errors_exit_2() {
    let base = [
        "game", "--class", "pointfn", "--obf", "obf_hash", "--seed", "1",
    ];
    for extra in [
        &["--attack", "nope", "--n-grid", "8"][..],
        &["--attack", "bruteforce", "--n-grid", "8,x"],
        &["--attack", "bruteforce", "--n-grid", "0"],
        &["--attack", "bruteforce", "--n-grid", "8", "--trials", "0"],
    ] {
        let args: Vec<&str> = base.iter().chain(extra).copied().collect();
        assert_eq!(oblab(&args).status.code(), Some(2), "{extra:?}");
    }
    assert_eq!(oblab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn seed_comes_from_environment_when_omitted() {
    let args = [
        "game",
        "--class",
        "pattern",
        "--obf",
        "obf_pattern_hash",
        "--attack",
        "bruteforce:64",
        "--n-grid",
        "10",
        "--trials",
        "300",
    ];
    assert_eq!(oblab(&args).status.code(), Some(2));
    let with_env = Command::new(env!("CARGO_BIN_EXE_oblab"))
        .args(args)
        .env("OBLAB_SEED", "beef")
        .output()
        .unwrap();
    let explicit = oblab(&[&args[..], &["--seed", "beef"]].concat());
    assert_eq!(with_env.status.code(), Some(0));
    assert_eq!(with_env.stdout, explicit.stdout);
}

#[test]
fn reports_are_written_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let o = oblab(&[
            "game",
            "--class",
            "cc",
            "--obf",
            "obf_cc",
            "--attack",
            "bruteforce",
            "--asset",
            "payload",
            "--n-grid",
            "6,8",
            "--trials",
            "500",
            "--seed",
            "c0ffee",
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        (
            fs::read(&csv).unwrap(),
            fs::read(csv.with_extension("json")).unwrap(),
            o.stdout,
        )
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a, b);
    assert_eq!(a.0, a.2);
    let json = String::from_utf8(a.1).unwrap();
    assert!(json.contains("\"asset_id\": \"payload\""));
}

fn make(dir: &Path, args: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    oblab(
        &[
            &["challenge", "make"][..],
            args,
            &["--seed", "5eed", "--out", out],
        ]
        .concat(),
    )
}

#[test]
fn setter_challenge_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    let o = make(
        &bundle,
        &[
            "--class",
            "pointfn",
            "--obf",
            "obf_hash",
            "--n",
            "32",
            "--flavour",
            "setter",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let b = bundle.to_str().unwrap();

    let revealed = oblab(&["challenge", "reveal", "--bundle", b]);
    assert_eq!(revealed.status.code(), Some(0));
    let truth = stdout(&revealed).trim().to_string();
    assert_eq!(truth.len(), 8);

    let cand = dir.path().join("cand.txt");
    fs::write(&cand, &truth).unwrap();
    let verify = || {
        oblab(&[
            "challenge",
            "verify",
            "--bundle",
            b,
            "--candidate",
            cand.to_str().unwrap(),
        ])
    };
    assert_eq!(verify().status.code(), Some(0));
    assert_eq!(stdout(&verify()).trim(), "accept");

    let mut wrong = u32::from_str_radix(&truth, 16).unwrap() ^ 1;
    fs::write(&cand, format!("{wrong:08x}")).unwrap();
    assert_eq!(verify().status.code(), Some(1));
    wrong ^= 1;
    fs::write(&cand, format!("0x{wrong:x}")).unwrap();
    assert_eq!(verify().status.code(), Some(0));
    fs::write(&cand, "not hex").unwrap();
    assert_eq!(verify().status.code(), Some(2));

    fs::write(&cand, &truth).unwrap();
    fs::remove_dir_all(bundle.join("secret")).unwrap();
    let o = verify();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("secret"));
}

#[test]
fn public_challenge_verifies_without_secret() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    let o = make(
        &bundle,
        &[
            "--class",
            "pattern",
            "--obf",
            "obf_pattern_hash",
            "--n",
            "16",
            "--flavour",
            "public",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let b = bundle.to_str().unwrap();
    let truth = stdout(&oblab(&["challenge", "reveal", "--bundle", b]));
    fs::remove_dir_all(bundle.join("secret")).unwrap();
    let cand = dir.path().join("cand.txt");
    fs::write(&cand, truth).unwrap();
    let o = oblab(&[
        "challenge",
        "verify",
        "--bundle",
        b,
        "--candidate",
        cand.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn automata_challenges_are_setter_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = make(
        dir.path(),
        &[
            "--class",
            "automata",
            "--obf",
            "obf_dfa_permute_pad",
            "--n",
            "5",
            "--flavour",
            "public",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = make(
        dir.path(),
        &[
            "--class",
            "automata",
            "--obf",
            "obf_dfa_permute_pad",
            "--n",
            "5",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let b = dir.path().to_str().unwrap();
    let truth = stdout(&oblab(&["challenge", "reveal", "--bundle", b]));
    assert!(truth.starts_with("{\"n\":5,"));
}

#[test]
fn identical_invocations_give_identical_bundles() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "--class",
        "splitconj",
        "--obf",
        "obf_half1+obf_half2",
        "--n",
        "16",
    ];
    let ida = stdout(&make(a.path(), &args));
    let idb = stdout(&make(b.path(), &args));
    assert_eq!(ida, idb);
    for f in [
        "public/program.bin",
        "public/program.json",
        "public/meta.json",
        "secret/aux.bin",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn list_names_every_class() {
    let out = stdout(&oblab(&["list"]));
    for id in [
        "pointfn",
        "pattern",
        "cc",
        "automata",
        "splitconj",
        "obf_half2",
        "table_reader",
    ] {
        assert!(out.contains(id), "{id}");
    }
}
