//! Embedded verification scripts with expected outputs.
//!
//! Each case is a script in the surface language followed by `expect` lines
//! freezing the payload of individual query results. The whole collection is
//! compiled into the binary so `verify-paper` needs no external files.

use crate::dsl::{self, DslError};

/// Raw fixture texts, sorted by case id.
const RAW: &[(&str, &str)] = &[
    ("am-kernels", include_str!("../corpus/am-kernels.case")),
    ("cokernel-count-f3", include_str!("../corpus/cokernel-count-f3.case")),
    ("conductor-double", include_str!("../corpus/conductor-double.case")),
    ("cube-zero-witness", include_str!("../corpus/cube-zero-witness.case")),
    ("cyclic-dichotomy", include_str!("../corpus/cyclic-dichotomy.case")),
    ("dual-numbers-rel-f2", include_str!("../corpus/dual-numbers-rel-f2.case")),
    ("dual-numbers-rel-q", include_str!("../corpus/dual-numbers-rel-q.case")),
    ("eta-cycles-f2", include_str!("../corpus/eta-cycles-f2.case")),
    ("eta-cycles-f3", include_str!("../corpus/eta-cycles-f3.case")),
    ("eta-cycles-q", include_str!("../corpus/eta-cycles-q.case")),
    ("euler-form", include_str!("../corpus/euler-form.case")),
    ("gap-prediction", include_str!("../corpus/gap-prediction.case")),
    ("hh1-omega-f2", include_str!("../corpus/hh1-omega-f2.case")),
    ("hh1-omega-q", include_str!("../corpus/hh1-omega-q.case")),
    ("mayer-vietoris", include_str!("../corpus/mayer-vietoris.case")),
    ("onto-char0", include_str!("../corpus/onto-char0.case")),
    ("rel-presentation-f2", include_str!("../corpus/rel-presentation-f2.case")),
    ("rel-presentation-q", include_str!("../corpus/rel-presentation-q.case")),
    ("semigroup-valuation", include_str!("../corpus/semigroup-valuation.case")),
    ("seminormal-axes", include_str!("../corpus/seminormal-axes.case")),
    ("socle-cubes", include_str!("../corpus/socle-cubes.case")),
    ("square-trunc-f2", include_str!("../corpus/square-trunc-f2.case")),
    ("square-trunc-q", include_str!("../corpus/square-trunc-q.case")),
    ("tame-lines-f2", include_str!("../corpus/tame-lines-f2.case")),
    ("tame-lines-q", include_str!("../corpus/tame-lines-q.case")),
    ("torsion-wild-line-f2", include_str!("../corpus/torsion-wild-line-f2.case")),
    ("torsion-wild-line-f5", include_str!("../corpus/torsion-wild-line-f5.case")),
    ("wild-curve-f2", include_str!("../corpus/wild-curve-f2.case")),
    ("wild-plane-f5", include_str!("../corpus/wild-plane-f5.case")),
    ("wild-plane-q", include_str!("../corpus/wild-plane-q.case")),
];

#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub id: &'static str,
    /// Script text without the `expect` lines.
    pub script: String,
    /// (normalized query text, expected payload) pairs.
    pub expects: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub id: &'static str,
    /// Human-readable mismatch and diagnostic lines; empty means the case passed.
    pub failures: Vec<String>,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn parse_case(id: &'static str, text: &str) -> Result<CorpusCase, DslError> {
    let mut script = String::new();
    let mut expects = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("expect ") {
            let (query, payload) = rest.split_once(" = ").ok_or_else(|| DslError::Parse {
                line: 0,
                msg: format!("malformed expect line in case {}", id),
            })?;
            expects.push((dsl::normalize_statement(query)?, payload.trim().to_string()));
        } else {
            script.push_str(line);
            script.push('\n');
        }
    }
    Ok(CorpusCase {
        id,
        script,
        expects,
    })
}

pub fn cases() -> Vec<CorpusCase> {
    RAW.iter()
        .map(|&(id, text)| parse_case(id, text).unwrap_or_else(|e| panic!("case {}: {}", id, e)))
        .collect()
}

pub fn run_case(case: &CorpusCase) -> CaseOutcome {
    let mut failures = Vec::new();
    match dsl::run_text(&case.script) {
        Err(e) => failures.push(format!("parse error: {}", e)),
        Ok(out) => {
            for d in &out.diagnostics {
                failures.push(format!("diagnostic: {}", d));
            }
            for (query, payload) in &case.expects {
                match out.results.iter().find(|r| &r.name == query) {
                    None => failures.push(format!("no result for `{}`", query)),
                    Some(r) if &r.payload != payload => failures.push(format!(
                        "`{}`: expected `{}`, got `{}`",
                        query, payload, r.payload
                    )),
                    Some(_) => {}
                }
            }
        }
    }
    CaseOutcome {
        id: case.id,
        failures,
    }
}

/// Runs every case whose id contains `filter` (all cases when `None`).
pub fn run_corpus(filter: Option<&str>) -> Vec<CaseOutcome> {
    cases()
        .iter()
        .filter(|c| filter.is_none_or(|f| c.id.contains(f)))
        .map(run_case)
        .collect()
}
