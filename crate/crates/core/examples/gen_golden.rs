use findim_core::dsl::{parse_script, run_script, RunOptions};
use std::fs;

fn main() {
    let scripts = fs::read_dir("fixtures/scripts").unwrap();
    for entry in scripts {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let text = fs::read_to_string(&path).unwrap();
        let script = parse_script(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let report = run_script(&script, &RunOptions::default());
        fs::write(format!("fixtures/golden/{name}.json"), format!("{}\n", report.to_json())).unwrap();
        println!("== {name}\n{}", report.to_text());
    }
    for name in ["e01", "e02", "e03"] {
        let text = fs::read_to_string(format!("fixtures/errors/{name}.fd")).unwrap();
        let err = parse_script(&text).unwrap_err();
        fs::write(format!("fixtures/errors/{name}.err"), format!("{err}\n")).unwrap();
        println!("== {name}: {err}");
    }
}
