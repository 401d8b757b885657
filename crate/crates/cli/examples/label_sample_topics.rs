//! Stand-in for the manual labeling step on the sample corpus: assigns each
//! fitted topic the category whose keywords carry the most probability mass
//! in the topic's word distribution, if that mass reaches 0.3.
//!
//! Usage: cargo run -p sitaware-cli --example label_sample_topics -- <topics-dir> <out.csv>

use std::path::PathBuf;

use sitaware::temporal::CategoryMap;
use sitaware::topicmodel::ModelDump;

const KEYWORDS: &[(&str, &[&str])] = &[
    ("Animal", &["dog", "pets", "cat", "kennel", "animals"]),
    (
        "Bridge Damage",
        &["bridge", "span", "overpass", "crossing", "washed"],
    ),
    (
        "Damage and Costs",
        &["million", "dollars", "estimate", "repairs", "costs"],
    ),
    (
        "Drinking Water",
        &["boil", "advisory", "drinking", "bottled", "tap"],
    ),
    (
        "Flood Report",
        &["rainfall", "inches", "river", "crest", "gauge"],
    ),
    (
        "Homelessness",
        &["evacuated", "displaced", "families", "shelters", "homes"],
    ),
    (
        "Insurance",
        &["insurance", "claims", "fema", "coverage", "policy"],
    ),
    (
        "Power Loss",
        &["power", "outage", "electricity", "lines", "restored"],
    ),
    (
        "Road Damage",
        &["road", "interstate", "detour", "closures", "highway"],
    ),
    (
        "Roof Damage",
        &["roof", "leaking", "tarp", "ceiling", "shingles"],
    ),
    ("Victims", &["toll", "bodies", "rescue", "swept", "search"]),
];
const MIN_MASS: f64 = 0.3;

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "out/topics".into()));
    let out = PathBuf::from(
        args.next()
            .unwrap_or_else(|| "data/sample/category_map.csv".into()),
    );

    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("topics directory")
        .flatten()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();

    let mut entries = Vec::new();
    for path in &paths {
        let src = std::fs::read_to_string(path).expect("readable dump");
        let dump = ModelDump::from_json(&src).expect("valid dump");
        let day = dump.day.expect("dump carries its day");
        let model = dump.to_model().expect("consistent dump");
        for k in 0..model.num_topics() {
            let phi = model.phi_row(k);
            let best = KEYWORDS
                .iter()
                .map(|(cat, words)| {
                    let mass: f64 = model
                        .vocab()
                        .iter()
                        .zip(&phi)
                        .filter(|(w, _)| words.contains(&w.as_str()))
                        .map(|(_, p)| p)
                        .sum();
                    (cat, mass)
                })
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("keyword table is non-empty");
            if best.1 >= MIN_MASS {
                entries.push((day, k, best.0.to_string()));
            }
        }
    }
    let map = CategoryMap::new(entries).expect("one label per topic");
    std::fs::write(&out, map.to_csv()).expect("writable output");
    eprintln!(
        "labeled {} topics into {}",
        map.entries().len(),
        out.display()
    );
}
