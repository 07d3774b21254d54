//! Deployment generation for the smart-city fixture.

use sliceable_core::config::ConfigTree;
use sliceable_core::deploy::{self, DeployError, PlanOptions};
use sliceable_core::{parse_source, resolve, slice_all};
use std::collections::BTreeSet;
use std::path::PathBuf;

const FIXTURE: &str = include_str!("../fixtures/smart-city.ol");
const DEPLOY: &[u8] = include_bytes!("../fixtures/deploy.json");

fn plan(options: &PlanOptions) -> deploy::DeploymentPlan {
    let checked = resolve(parse_source(FIXTURE, "smart-city.ol").unwrap()).unwrap();
    let slices = slice_all(&checked).unwrap();
    let config = ConfigTree::from_json_bytes(DEPLOY).unwrap();
    deploy::plan_deployment(&slices, &config, "smart-city.ol", options).unwrap()
}

fn without_test_client() -> PlanOptions {
    PlanOptions {
        exclude: vec!["TestClient".into()],
        ..Default::default()
    }
}

#[test]
fn three_service_layout() {
    let plan = plan(&without_test_client());
    assert_eq!(plan.output_root, PathBuf::from("smart-city-sliced"));
    let files: Vec<String> = plan
        .files()
        .iter()
        .map(|(p, _)| p.to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        files,
        [
            "docker-compose.yml",
            "queryside/QuerySide.ol",
            "queryside/deploy.json",
            "queryside/Dockerfile",
            "commandside/CommandSide.ol",
            "commandside/deploy.json",
            "commandside/Dockerfile",
            "eventstore/EventStore.ol",
            "eventstore/deploy.json",
            "eventstore/Dockerfile",
        ]
    );
    assert!(plan.warnings.is_empty(), "{:?}", plan.warnings);
}

#[test]
fn dockerfile_and_config_copy() {
    let plan = plan(&without_test_client());
    let command = plan
        .entries
        .iter()
        .find(|e| e.service == "CommandSide")
        .unwrap();
    assert_eq!(
        command.dockerfile_text,
        "FROM sliceable/runtime\n\
         COPY CommandSide.ol .\n\
         COPY deploy.json .\n\
         CMD [\"sliceable-run\", \"--config\", \"deploy.json\", \"--service\", \"CommandSide\", \"CommandSide.ol\"]\n"
    );
    for (path, bytes) in plan.files() {
        if path.ends_with("deploy.json") {
            assert_eq!(bytes, DEPLOY);
        }
    }
}

#[test]
fn compose_is_valid_yaml() {
    let plan = plan(&without_test_client());
    assert!(plan.compose_text.contains("    build: ./commandside\n"));
    assert!(plan.compose_text.contains("      replicas: 1\n"));

    let doc: serde_yaml::Value = serde_yaml::from_str(&plan.compose_text).unwrap();
    let services = doc["services"].as_mapping().unwrap();
    let names: BTreeSet<&str> = services.keys().map(|k| k.as_str().unwrap()).collect();
    assert_eq!(
        names,
        BTreeSet::from(["commandside", "eventstore", "queryside"])
    );
    for (name, svc) in services {
        let name = name.as_str().unwrap();
        assert_eq!(svc["build"].as_str().unwrap(), format!("./{name}"));
        assert_eq!(svc["deploy"]["replicas"].as_u64(), Some(1));
        assert!(svc.get("ports").is_none());
    }

    let exposed = plan_with_ports();
    let doc: serde_yaml::Value = serde_yaml::from_str(&exposed).unwrap();
    assert_eq!(
        doc["services"]["eventstore"]["ports"][0].as_str(),
        Some("8080:8080")
    );
}

fn plan_with_ports() -> String {
    plan(&PlanOptions {
        expose_ports: true,
        ..without_test_client()
    })
    .compose_text
}

#[test]
fn every_slice_checks_standalone() {
    let plan = plan(&PlanOptions::default());
    assert_eq!(plan.entries.len(), 4);
    for entry in &plan.entries {
        let checked = resolve(parse_source(&entry.program_text, &entry.program_file).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e:?}", entry.service));
        assert!(checked.warnings().is_empty());
        assert_eq!(
            checked.service_names().collect::<Vec<_>>(),
            [entry.service.as_str()]
        );
    }
    // the test client only needs the event store and command side APIs
    let client = &plan.entries[3].program_text;
    assert!(!client.contains("QuerySideInterface"));
    assert!(!client.contains("type SearchArea"));
}

#[test]
fn write_refuse_force_identical() {
    let dir = tempfile::tempdir().unwrap();
    let options = PlanOptions {
        output_root: Some(dir.path().join("out")),
        ..without_test_client()
    };
    let plan = plan(&options);
    let manifest = deploy::write_deployment(&plan, false).unwrap();
    assert_eq!(manifest.len(), 10);
    let before: Vec<Vec<u8>> = manifest
        .iter()
        .map(|m| std::fs::read(&m.path).unwrap())
        .collect();
    for (m, bytes) in manifest.iter().zip(&before) {
        assert_eq!(m.size, bytes.len() as u64);
    }

    match deploy::write_deployment(&plan, false) {
        Err(DeployError::RefusingToOverwrite(root)) => assert_eq!(root, dir.path().join("out")),
        other => panic!("{other:?}"),
    }
    let again = deploy::write_deployment(&plan, true).unwrap();
    let after: Vec<Vec<u8>> = again
        .iter()
        .map(|m| std::fs::read(&m.path).unwrap())
        .collect();
    assert_eq!(before, after);
}
