//! Exit codes, stdout and exact diagnostics of the command-line tool.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const FIXTURE: &str = include_str!("../../core/fixtures/smart-city.ol");
const LOCAL: &str = include_str!("../../core/fixtures/local.json");
const DEPLOY: &str = include_str!("../../core/fixtures/deploy.json");
const ANCHOR: &str = "\t\t\tevent.type = req.topic\n";

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("smart-city.ol"), FIXTURE).unwrap();
    fs::write(dir.path().join("local.json"), LOCAL).unwrap();
    fs::write(dir.path().join("deploy.json"), DEPLOY).unwrap();
    dir
}

fn sliceable(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sliceable"))
        .args(args)
        .current_dir(dir)
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

fn assert_outcome(out: &Output, code: i32, stdout: &str, stderr: &str) {
    assert_eq!(text(&out.stderr), stderr);
    assert_eq!(text(&out.stdout), stdout);
    assert_eq!(out.status.code(), Some(code));
}

#[test]
fn check_clean_fixture() {
    let dir = workspace();
    assert_outcome(
        &sliceable(dir.path(), &["check", "smart-city.ol"]),
        0,
        "",
        "",
    );
}

#[test]
fn check_diagnostics() {
    let dir = workspace();
    let broken = FIXTURE.replacen("\tinfo:ParkingAreaInformation\n", "\tinfo:Missing\n", 1);
    fs::write(dir.path().join("broken.ol"), broken).unwrap();
    assert_outcome(
        &sliceable(dir.path(), &["check", "broken.ol"]),
        2,
        "",
        "broken.ol:7:7: error: undefined type `Missing`\n",
    );

    fs::write(dir.path().join("syntax.ol"), "type A {\n\tb:\n}\n").unwrap();
    assert_outcome(
        &sliceable(dir.path(), &["check", "syntax.ol"]),
        2,
        "",
        "syntax.ol:3:1: error: expected type, found `}`\n",
    );

    fs::write(
        dir.path().join("untyped.ol"),
        "service S( config ) { ... }\n",
    )
    .unwrap();
    assert_outcome(
        &sliceable(dir.path(), &["check", "untyped.ol"]),
        0,
        "",
        "untyped.ol:1:12: warning: configuration parameter `config` of service `S` is untyped; treating it as `any`\n",
    );

    assert_outcome(
        &sliceable(dir.path(), &["check", "missing.ol"]),
        2,
        "",
        "missing.ol: error: cannot read program: No such file or directory (os error 2)\n",
    );
}

const REPORT: &str = "QuerySide: served 0, faults 0, aborted 0
CommandSide: served 1, faults 0, aborted 0
EventStore: served 3, faults 0, aborted 0
TestClient: served 1, faults 0, aborted 0, completed
";

#[test]
fn run_fixture_passes() {
    let dir = workspace();
    let out = sliceable(
        dir.path(),
        &["run", "--config", "local.json", "smart-city.ol"],
    );
    assert_outcome(&out, 0, REPORT, "");

    let out = Command::new(env!("CARGO_BIN_EXE_sliceable-run"))
        .args(["--config", "local.json", "smart-city.ol"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_outcome(&out, 0, REPORT, "");
}

#[test]
fn run_mutated_fixture_fails() {
    let dir = workspace();
    let mutated = FIXTURE.replacen(
        ANCHOR,
        &format!(
            "{ANCHOR}\t\t\tif( req.topic == \"PA_DELETED\" ) {{ event.type = \"PA_CREATED\" }}\n"
        ),
        1,
    );
    assert_ne!(mutated, FIXTURE);
    fs::write(dir.path().join("mutated.ol"), mutated).unwrap();
    let out = sliceable(dir.path(), &["run", "--config", "local.json", "mutated.ol"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        text(&out.stderr),
        "TestClient: error: ended with fault AssertionFailed\n"
    );
    assert!(text(&out.stdout)
        .ends_with("TestClient: served 1, faults 1, aborted 0, failed with AssertionFailed\n"));
}

#[test]
fn run_configuration_errors() {
    let dir = workspace();
    fs::write(dir.path().join("empty.json"), "{}").unwrap();
    let out = sliceable(
        dir.path(),
        &[
            "run",
            "--config",
            "empty.json",
            "--service",
            "CommandSide",
            "smart-city.ol",
        ],
    );
    assert_outcome(
        &out,
        2,
        "",
        "empty.json: error: configuration has no value at `CommandSide.location`\n\
         empty.json: error: configuration has no value at `EventStore.location`\n",
    );

    fs::write(dir.path().join("bad.json"), "{\n  \"a\": \n}").unwrap();
    let out = sliceable(
        dir.path(),
        &["run", "--config", "bad.json", "smart-city.ol"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).starts_with("bad.json:3:1: error: "));

    let clash = LOCAL.replace("local://queryside", "local://commandside");
    fs::write(dir.path().join("clash.json"), clash).unwrap();
    let out = sliceable(
        dir.path(),
        &["run", "--config", "clash.json", "smart-city.ol"],
    );
    assert_outcome(
        &out,
        2,
        "",
        "clash.json: error: local://commandside is bound by both QuerySide.InputQueries and CommandSide.InputCommands\n",
    );

    let out = sliceable(
        dir.path(),
        &[
            "run",
            "--config",
            "local.json",
            "--service",
            "Nope",
            "smart-city.ol",
        ],
    );
    assert_outcome(
        &out,
        2,
        "",
        "smart-city.ol: error: no service named `Nope`\n",
    );
}

#[test]
fn usage_errors_exit_2() {
    let dir = workspace();
    let out = sliceable(dir.path(), &["run", "smart-city.ol"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("--config <CONFIG>"));
    let out = sliceable(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

const MANIFEST: &str = "smart-city-sliced/docker-compose.yml\t214
smart-city-sliced/queryside/QuerySide.ol\t2948
smart-city-sliced/queryside/deploy.json\t239
smart-city-sliced/queryside/Dockerfile\t153
smart-city-sliced/commandside/CommandSide.ol\t2075
smart-city-sliced/commandside/deploy.json\t239
smart-city-sliced/commandside/Dockerfile\t159
smart-city-sliced/eventstore/EventStore.ol\t2682
smart-city-sliced/eventstore/deploy.json\t239
smart-city-sliced/eventstore/Dockerfile\t156
";

#[test]
fn bare_invocation_slices() {
    let dir = workspace();
    let args = [
        "--config",
        "deploy.json",
        "--exclude",
        "TestClient",
        "smart-city.ol",
    ];
    assert_outcome(&sliceable(dir.path(), &args), 0, MANIFEST, "");

    let mut explicit = vec!["slice", "-o", "explicit"];
    explicit.extend_from_slice(&args);
    let out = sliceable(dir.path(), &explicit);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        text(&out.stdout),
        MANIFEST.replace("smart-city-sliced/", "explicit/")
    );

    assert_outcome(
        &sliceable(dir.path(), &args),
        2,
        "",
        "smart-city-sliced: error: refusing to overwrite `smart-city-sliced` (use --force)\n",
    );
    let mut forced = args.to_vec();
    forced.insert(0, "--force");
    assert_outcome(&sliceable(dir.path(), &forced), 0, MANIFEST, "");
}

#[test]
fn slice_errors_leave_nothing_behind() {
    let dir = workspace();
    let out = sliceable(
        dir.path(),
        &[
            "slice",
            "--config",
            "deploy.json",
            "--exclude",
            "Nope",
            "smart-city.ol",
        ],
    );
    assert_outcome(
        &out,
        2,
        "",
        "smart-city.ol: error: cannot exclude `Nope`: no such service\n",
    );

    let out = sliceable(
        dir.path(),
        &["slice", "--config", "local.json", "smart-city.ol"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stderr).starts_with(
        "local.json: warning: QuerySide.InputQueries: local://queryside is only reachable inside one process\n"
    ));

    fs::write(
        dir.path().join("partial.json"),
        r#"{"CommandSide":{"location":"socket://commandside:8080"}}"#,
    )
    .unwrap();
    let out = sliceable(
        dir.path(),
        &[
            "slice",
            "--config",
            "partial.json",
            "-o",
            "partial",
            "smart-city.ol",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr)
        .starts_with("partial.json: error: configuration has no value at `QuerySide.location`\n"));
    assert!(!dir.path().join("partial").exists());
}
