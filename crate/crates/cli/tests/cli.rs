mod support;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command as Process, Output};

use ccqmac_cli::commands::{
    load_frontier, message_count, COMPARE_HEADER, FRONTIER_HEADER_PAIR, FRONTIER_HEADER_TRIPLE, SIMULATE_HEADER_COMM,
    SIMULATE_HEADER_CONF,
};
use ccqmac_cli::format::{channel_to_json, load_channel, parse_channel, CodeManifest};
use ccqmac_core::{assemble_common_code, Budget, CodeParams};
use proptest::prelude::*;
use support::*;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
const SHIPPED: [&str; 4] = ["noiseless4", "constant", "correlated_gain", "noisy_qubit"];

fn data(name: &str) -> String {
    format!("{DATA}/{name}.json")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ccqmac-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn ccqmac(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_ccqmac")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn shipped_channels_round_trip_bit_for_bit() {
    for name in SHIPPED {
        let loaded = load_channel(Path::new(&data(name))).unwrap();
        assert_eq!(loaded.name, name);
        let text = channel_to_json(&loaded.channel, Some(name));
        let again = parse_channel(&text, Path::new("memory")).unwrap();
        for (a, b) in loaded.channel.outputs().iter().zip(again.channel.outputs()) {
            assert!(a.matrix().iter().zip(b.matrix().iter()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
        }
        assert_eq!(channel_to_json(&again.channel, Some(name)), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_channels_round_trip(seed in any::<u64>(), dim in 1usize..4) {
        let mut r = rng(seed);
        let w = random_mac(&mut r, 2, 3, dim);
        let text = channel_to_json(&w, None);
        let again = parse_channel(&text, Path::new("memory")).unwrap();
        prop_assert_eq!(again.name.as_str(), "unnamed");
        prop_assert_eq!(channel_to_json(&again.channel, None), text);
        prop_assert_eq!(again.channel.fingerprint(), w.fingerprint());
    }

    #[test]
    fn message_counts_cover_the_rate(l in 1usize..12, rate in 0.0f64..2.0) {
        let count = message_count(l, rate).unwrap();
        prop_assert!((count as f64).log2() >= l as f64 * rate - 1e-9);
        prop_assert!(count == 1 || ((count - 1) as f64).log2() < l as f64 * rate);
    }
}

#[test]
fn exact_powers_of_two_are_not_rounded_up() {
    assert_eq!(message_count(2, 0.5).unwrap(), 2);
    assert_eq!(message_count(6, 0.5).unwrap(), 8);
    assert_eq!(message_count(6, 1.0 / 6.0).unwrap(), 2);
    assert_eq!(message_count(3, 0.0).unwrap(), 1);
}

#[test]
fn parse_errors_name_the_problem() {
    let path = Path::new("w.json");
    let missing = r#"{"x_size":1,"y_size":2,"dim":1,"states":{"0,0":[[[1,0]]]}}"#;
    let err = parse_channel(missing, path).unwrap_err().to_string();
    assert!(err.contains("missing entry \"0,1\""), "{err}");

    let shape = r#"{"x_size":1,"y_size":1,"dim":2,"states":{"0,0":[[[1,0]]]}}"#;
    assert!(parse_channel(shape, path).unwrap_err().to_string().contains("2x2"));

    let key = r#"{"x_size":1,"y_size":1,"dim":1,"states":{"0;0":[[[1,0]]]}}"#;
    assert!(parse_channel(key, path).unwrap_err().to_string().contains("\"0;0\""));

    let broken = "{\"x_size\": 1,\n \"y_size\": }";
    let err = parse_channel(broken, path).unwrap_err().to_string();
    assert!(err.starts_with("w.json: line 2"), "{err}");

    let not_state = r#"{"x_size":1,"y_size":1,"dim":1,"states":{"0,0":[[[-1,0]]]}}"#;
    assert!(parse_channel(not_state, path).is_err());
}

#[test]
fn help_documents_the_emitted_headers() {
    let region_help = stdout(&ccqmac(&["region", "--help"]));
    assert!(region_help.contains(FRONTIER_HEADER_PAIR) && region_help.contains(FRONTIER_HEADER_TRIPLE));
    let simulate_help = stdout(&ccqmac(&["simulate", "--help"]));
    assert!(simulate_help.contains(SIMULATE_HEADER_COMM) && simulate_help.contains(SIMULATE_HEADER_CONF));
    assert!(stdout(&ccqmac(&["compare", "--help"])).contains(COMPARE_HEADER));

    let dir = scratch("headers");
    let pair = dir.join("pair.csv");
    let triple = dir.join("triple.csv");
    let cmp = dir.join("cmp.csv");
    let noisy = data("noisy_qubit");
    stdout(&ccqmac(&["region", "--channel", &noisy, "--seed", "1", "--directions", "4", "--starts", "2", "--out", pair.to_str().unwrap()]));
    stdout(&ccqmac(&[
        "region", "--channel", &noisy, "--mode", "comm", "--seed", "1", "--directions", "4", "--starts", "2", "--out",
        triple.to_str().unwrap(),
    ]));
    stdout(&ccqmac(&["compare", "--channel", &noisy, "--against", "1,0", "--seed", "1", "--directions", "4", "--starts", "2", "--out", cmp.to_str().unwrap()]));
    let first_line = |p: &Path| fs::read_to_string(p).unwrap().lines().next().unwrap().to_string();
    assert_eq!(first_line(&pair), FRONTIER_HEADER_PAIR);
    assert_eq!(first_line(&triple), FRONTIER_HEADER_TRIPLE);
    assert_eq!(first_line(&cmp), COMPARE_HEADER);
    let comm = stdout(&ccqmac(&["simulate", "--channel", &noisy, "--blocklength", "1", "--messages", "1,2,1", "--seed", "1", "--starts", "2"]));
    assert_eq!(comm.lines().next().unwrap(), SIMULATE_HEADER_COMM);
    let conf = stdout(&ccqmac(&["simulate", "--channel", &noisy, "--mode", "conf", "--blocklength", "1", "--messages", "2,1", "--seed", "1", "--starts", "2"]));
    assert_eq!(conf.lines().next().unwrap(), SIMULATE_HEADER_CONF);

    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("pair.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 1);
    assert_eq!(meta["n_directions"], 4);
    assert_eq!(meta["channel_hash"].as_str().unwrap().len(), 64);
    fs::remove_dir_all(dir).ok();
}

#[test]
fn region_summary_on_extreme_channels() {
    let dir = scratch("extremes");
    let out = dir.join("f.csv");
    let text = stdout(&ccqmac(&[
        "region", "--channel", &data("noiseless4"), "--conf-c", "inf", "--conf-d", "inf", "--seed", "2", "--directions", "8",
        "--starts", "8", "--out", out.to_str().unwrap(),
    ]));
    assert!(text.contains("support (1,1) 2.00000000"), "{text}");
    let text = stdout(&ccqmac(&["region", "--channel", &data("constant"), "--seed", "2", "--directions", "8", "--starts", "8", "--out", out.to_str().unwrap()]));
    for line in text.lines().filter(|l| l.starts_with("support")) {
        let value: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
        assert!(value.abs() <= 1e-9, "{line}");
    }
    fs::remove_dir_all(dir).ok();
}

#[test]
fn check_verdicts() {
    let dir = scratch("check");
    let frontier = dir.join("f.csv");
    // Inner points (1,0) and (0,1) under loose half-spaces leave a gap around (0.6,0.6).
    let h = std::f64::consts::FRAC_1_SQRT_2;
    fs::write(
        &frontier,
        format!("{FRONTIER_HEADER_PAIR}\n0,1,0,1,1,0\n1,{h},{h},{},0,1\n2,0,1,1,0,1\n", 2.0 * h + 0.2),
    )
    .unwrap();
    let region = load_frontier(&frontier).unwrap();
    assert_eq!(region.inner_points.len(), 3);
    let f = frontier.to_str().unwrap();
    let verdict = |p: &str| stdout(&ccqmac(&["check", "--frontier", f, "--point", p])).trim().to_string();
    assert_eq!(verdict("0,0"), "Inside");
    assert_eq!(verdict("0.5,0.4"), "Inside");
    assert_eq!(verdict("0.6,0.6"), "Uncertain");
    assert_eq!(verdict("3,3"), "Outside");
    assert_eq!(verdict("-0.1,0"), "Outside");
    let wrong = ccqmac(&["check", "--frontier", f, "--point", "0,0,0"]);
    assert_eq!(wrong.status.code(), Some(2));
    fs::remove_dir_all(dir).ok();
}

#[test]
fn exit_codes() {
    let noisy = data("noisy_qubit");
    let missing_seed = ccqmac(&["region", "--channel", &noisy, "--out", "x.csv"]);
    assert_eq!(missing_seed.status.code(), Some(2));
    let no_file = ccqmac(&["region", "--channel", "/nonexistent/w.json", "--seed", "1", "--out", "x.csv"]);
    assert_eq!(no_file.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&no_file.stderr).contains("/nonexistent/w.json"));

    let dir = scratch("exit");
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"x_size":1,"y_size":1,"dim":1,"states":{}}"#).unwrap();
    let parse = ccqmac(&["region", "--channel", bad.to_str().unwrap(), "--seed", "1", "--out", "x.csv"]);
    assert_eq!(parse.status.code(), Some(2));

    let budget = ccqmac(&["simulate", "--channel", &noisy, "--blocklength", "13", "--messages", "1,1,1", "--seed", "1", "--starts", "2"]);
    assert_eq!(budget.status.code(), Some(3), "{}", String::from_utf8_lossy(&budget.stderr));
    let negative = ccqmac(&["compare", "--channel", &noisy, "--against", "-1,0", "--seed", "1"]);
    assert_eq!(negative.status.code(), Some(2));
    fs::remove_dir_all(dir).ok();
}

#[test]
fn noiseless_codes_always_decode() {
    let text = stdout(&ccqmac(&["simulate", "--channel", &data("noiseless4"), "--blocklength", "1,2", "--messages", "1,1,1", "--seed", "4", "--starts", "4"]));
    for line in text.lines().skip(1) {
        assert_eq!(line.rsplit(',').next().unwrap(), "1.00000000", "{line}");
    }
}

#[test]
fn manifests_regenerate_the_same_code() {
    let dir = scratch("manifest");
    let codes = dir.join("codes");
    let noisy = data("noisy_qubit");
    let table = stdout(&ccqmac(&[
        "simulate", "--channel", &noisy, "--blocklength", "2,3", "--messages", "2,2,2", "--seed", "12", "--starts", "4",
        "--code-dir", codes.to_str().unwrap(),
    ]));
    let w = load_channel(Path::new(&noisy)).unwrap().channel;
    for (l, row) in [2usize, 3].iter().zip(table.lines().skip(1)) {
        let path = codes.join(format!("code_l{l}.json"));
        let manifest = CodeManifest::from_json(&fs::read_to_string(&path).unwrap(), &path).unwrap();
        assert_eq!(manifest.channel_hash, w.fingerprint());
        let params = CodeParams {
            l: manifest.l,
            m: manifest.m,
            k: manifest.k,
            t: manifest.t,
            delta: Some(manifest.delta.unwrap_or(f64::INFINITY)),
            seed: manifest.seed,
        };
        let law = manifest.law.to_law().unwrap();
        let rebuilt = assemble_common_code(&w, &law, &params, &Budget::default()).unwrap();
        assert_eq!(rebuilt.u_words, manifest.u_words);
        for m in 0..manifest.m {
            for k in 0..manifest.k {
                assert_eq!(rebuilt.code.x_word(k, m), manifest.x_words[m * manifest.k + k].as_slice());
            }
            for t in 0..manifest.t {
                assert_eq!(rebuilt.code.y_word(t, m), manifest.y_words[m * manifest.t + t].as_slice());
            }
        }
        let success = ccqmac_core::success_probability_common(&rebuilt.code, &w, ccqmac_core::ResidualPolicy::Error, &Budget::default()).unwrap();
        assert_eq!(ccqmac_cli::format::num(success), row.rsplit(',').next().unwrap());
    }
    fs::remove_dir_all(dir).ok();
}

#[test]
fn replays_are_byte_identical() {
    let dir = scratch("replay");
    let out = dir.join("f.csv");
    let args = ["region", "--channel", &data("correlated_gain"), "--seed", "5", "--directions", "8", "--starts", "4", "--out", out.to_str().unwrap()];
    let first = stdout(&ccqmac(&args));
    let csv = fs::read(&out).unwrap();
    let meta = fs::read(dir.join("f.meta.json")).unwrap();
    let mut threaded = vec!["--threads", "3"];
    threaded.extend(args);
    assert_eq!(stdout(&ccqmac(&threaded)), first);
    assert_eq!(fs::read(&out).unwrap(), csv);
    assert_eq!(fs::read(dir.join("f.meta.json")).unwrap(), meta);
    fs::remove_dir_all(dir).ok();
}

#[test]
fn self_comparison_has_zero_delta() {
    let text = stdout(&ccqmac(&["compare", "--channel", &data("correlated_gain"), "--conf-c", "0.5", "--against", "0.5,0", "--seed", "3", "--directions", "6", "--starts", "4"]));
    assert!(text.contains("sum-rate delta 0\n") || text.contains("sum-rate delta -"), "{text}");
    let text = stdout(&ccqmac(&["compare", "--channel", &data("correlated_gain"), "--conf-c", "0.5", "--conf-d", "0.5", "--against", "0.5,0.5", "--seed", "3", "--directions", "6", "--starts", "4"]));
    assert!(text.contains("sum-rate delta 0\n"), "{text}");
    assert!(text.contains("max delta over 6 directions 0\n"), "{text}");
}
