//! Instance file schema. TOML with exact rational text everywhere; unknown
//! fields are rejected so typos fail loudly instead of silently defaulting.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use strassen_core::{CostMatrix, GroundSet, Measure, Rational, Relation};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub elements: Vec<ElementSpec>,
    pub measures: MeasuresSpec,
    pub relation: RelationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<FlagsSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuresSpec {
    pub mu: BTreeMap<String, String>,
    pub nu: BTreeMap<String, String>,
}

/// Exactly one of `pairs` or `generator` must be present. The `threshold`
/// generator relates label-increasing pairs and needs `gap` and `strict`;
/// `chain` orders elements by their position in the file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auto_close: Option<bool>,
}

/// A fully validated instance. Relations are preorders by the time this
/// exists; auto-closing happens during parsing or not at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedInstance {
    pub ground: Arc<GroundSet>,
    pub mu: Measure,
    pub nu: Measure,
    pub relation: Relation,
    pub cost: Option<CostMatrix>,
}

fn parse_rational(text: &str, context: &str) -> Result<Rational, CliError> {
    Rational::from_str(text.trim())
        .map_err(|e| CliError::msg(format!("{context}: cannot parse \"{text}\" as p/q ({e})")))
}

fn build_measure(
    ground: &Arc<GroundSet>,
    map: &BTreeMap<String, String>,
    name: &str,
) -> Result<Measure, CliError> {
    let mut weights = vec![Rational::from_integer(0.into()); ground.len()];
    for (id, text) in map {
        let idx = ground
            .position(id)
            .ok_or_else(|| CliError::msg(format!("measure {name} names unknown element \"{id}\"")))?;
        weights[idx] = parse_rational(text, &format!("measure {name}[{id}]"))?;
    }
    Ok(Measure::new(ground.clone(), weights)?)
}

fn build_relation(
    ground: &Arc<GroundSet>,
    spec: &RelationSpec,
) -> Result<Relation, CliError> {
    match (&spec.pairs, spec.generator.as_deref()) {
        (Some(pairs), None) => {
            if spec.gap.is_some() || spec.strict.is_some() {
                return Err(CliError::msg(
                    "relation: gap/strict only apply to the threshold generator",
                ));
            }
            let borrowed: Vec<(&str, &str)> =
                pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            Ok(Relation::from_id_pairs(ground.clone(), &borrowed)?)
        }
        (None, Some("threshold")) => {
            let gap_text = spec.gap.as_deref().ok_or_else(|| {
                CliError::msg("relation: threshold generator requires a gap value")
            })?;
            let strict = spec.strict.ok_or_else(|| {
                CliError::msg("relation: threshold generator requires a strict flag")
            })?;
            let gap = parse_rational(gap_text, "relation gap")?;
            let labels = ground.labels().ok_or_else(|| {
                CliError::msg("relation: threshold generator requires labels on every element")
            })?;
            let labels = labels.to_vec();
            Ok(Relation::from_fn(ground.clone(), |i, j| {
                if i == j {
                    return true;
                }
                let step = &labels[j] - &labels[i];
                if strict {
                    step > gap
                } else {
                    step >= gap
                }
            }))
        }
        (None, Some("chain")) => {
            if spec.gap.is_some() || spec.strict.is_some() {
                return Err(CliError::msg(
                    "relation: gap/strict only apply to the threshold generator",
                ));
            }
            Ok(Relation::from_fn(ground.clone(), |i, j| i <= j))
        }
        (None, Some(other)) => Err(CliError::msg(format!(
            "relation: unknown generator \"{other}\" (expected threshold or chain)"
        ))),
        (Some(_), Some(_)) | (None, None) => Err(CliError::msg(
            "relation: provide exactly one of pairs or generator",
        )),
    }
}

/// Parses an instance file. The relation is closed reflexively and
/// transitively only when asked (file flag or `force_close`); otherwise a
/// non-preorder input is an error naming the violating pairs.
pub fn parse_instance(text: &str, force_close: bool) -> Result<ParsedInstance, CliError> {
    let file: InstanceFile = toml::from_str(text)
        .map_err(|e| CliError::msg(format!("instance file: {e}")))?;

    if file.elements.is_empty() {
        return Err(CliError::msg("instance file: elements must not be empty"));
    }
    let ids: Vec<String> = file.elements.iter().map(|e| e.id.clone()).collect();
    let labeled = file.elements.iter().filter(|e| e.label.is_some()).count();
    let ground = if labeled == 0 {
        GroundSet::new(ids)?
    } else if labeled == file.elements.len() {
        let labels = file
            .elements
            .iter()
            .map(|e| parse_rational(e.label.as_ref().unwrap(), &format!("element {}", e.id)))
            .collect::<Result<Vec<_>, _>>()?;
        GroundSet::with_labels(ids, labels)?
    } else {
        return Err(CliError::msg(
            "elements: labels must be given for every element or for none",
        ));
    };

    let mu = build_measure(&ground, &file.measures.mu, "mu")?;
    let nu = build_measure(&ground, &file.measures.nu, "nu")?;

    let raw = build_relation(&ground, &file.relation)?;
    let auto_close =
        force_close || file.flags.as_ref().and_then(|f| f.auto_close).unwrap_or(false);
    let relation = if auto_close {
        raw.transitive_reflexive_closure()
    } else {
        raw.ensure_preorder()?;
        raw
    };

    let cost = match &file.cost {
        None => None,
        Some(spec) => {
            let n = ground.len();
            if spec.rows.len() != n || spec.rows.iter().any(|r| r.len() != n) {
                return Err(CliError::msg(format!(
                    "cost: expected a {n}x{n} grid of rationals"
                )));
            }
            let mut rows = Vec::with_capacity(n);
            for (i, row) in spec.rows.iter().enumerate() {
                let parsed = row
                    .iter()
                    .enumerate()
                    .map(|(j, cell)| parse_rational(cell, &format!("cost[{i}][{j}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(parsed);
            }
            Some(CostMatrix::from_rows(ground.clone(), rows)?)
        }
    };

    Ok(ParsedInstance {
        ground,
        mu,
        nu,
        relation,
        cost,
    })
}

/// Canonical re-emission: generators and flags are normalized away, the
/// relation becomes a sorted explicit pair list, and weight maps list every
/// element. Re-parsing the output reproduces the instance exactly.
pub fn emit_instance(instance: &ParsedInstance) -> Result<String, CliError> {
    let ground = &instance.ground;
    let elements = (0..ground.len())
        .map(|i| ElementSpec {
            id: ground.id(i).to_string(),
            label: ground.label(i).map(|l| l.to_string()),
        })
        .collect();
    let weight_map = |m: &Measure| {
        (0..ground.len())
            .map(|i| (ground.id(i).to_string(), m.weight(i).to_string()))
            .collect::<BTreeMap<_, _>>()
    };
    let pairs = instance
        .relation
        .pairs()
        .into_iter()
        .map(|(i, j)| (ground.id(i).to_string(), ground.id(j).to_string()))
        .collect();
    let cost = instance.cost.as_ref().map(|c| CostSpec {
        rows: (0..ground.len())
            .map(|i| {
                (0..ground.len())
                    .map(|j| c.get(i, j).to_string())
                    .collect()
            })
            .collect(),
    });
    let file = InstanceFile {
        elements,
        measures: MeasuresSpec {
            mu: weight_map(&instance.mu),
            nu: weight_map(&instance.nu),
        },
        relation: RelationSpec {
            pairs: Some(pairs),
            generator: None,
            gap: None,
            strict: None,
        },
        cost,
        flags: None,
    };
    toml::to_string(&file).map_err(|e| CliError::msg(format!("emit: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [[elements]]
        id = "a"
        [[elements]]
        id = "b"
        [measures.mu]
        a = "1"
        [measures.nu]
        b = "1"
        [relation]
        generator = "chain"
    "#;

    fn expect_error(text: &str, needle: &str) {
        let err = parse_instance(text, false).unwrap_err().to_string();
        assert!(err.contains(needle), "error was: {err}");
    }

    #[test]
    fn minimal_chain_parses() {
        let p = parse_instance(MINIMAL, false).unwrap();
        assert_eq!(p.ground.len(), 2);
        assert!(p.relation.contains(0, 1));
        assert!(!p.relation.contains(1, 0));
        assert!(p.cost.is_none());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        expect_error(&MINIMAL.replace("[relation]", "banana = 1\n[relation]"), "banana");
        expect_error(
            &MINIMAL.replace("generator = \"chain\"", "generator = \"chain\"\nextra = true"),
            "extra",
        );
    }

    #[test]
    fn labels_are_all_or_none() {
        expect_error(
            &MINIMAL.replace("id = \"a\"", "id = \"a\"\nlabel = \"1/2\""),
            "every element or for none",
        );
    }

    #[test]
    fn weights_must_sum_to_one() {
        expect_error(&MINIMAL.replace("a = \"1\"", "a = \"2/3\""), "sum");
    }

    #[test]
    fn unknown_measure_id_is_rejected() {
        expect_error(&MINIMAL.replace("a = \"1\"", "z = \"1\""), "unknown element \"z\"");
    }

    #[test]
    fn generator_and_pairs_are_exclusive() {
        expect_error(
            &MINIMAL.replace(
                "generator = \"chain\"",
                "generator = \"chain\"\npairs = [[\"a\", \"a\"]]",
            ),
            "exactly one",
        );
        expect_error(&MINIMAL.replace("generator = \"chain\"", ""), "exactly one");
    }

    #[test]
    fn threshold_needs_labels_gap_and_strictness() {
        expect_error(
            &MINIMAL.replace("generator = \"chain\"", "generator = \"threshold\""),
            "gap",
        );
        expect_error(
            &MINIMAL.replace(
                "generator = \"chain\"",
                "generator = \"threshold\"\ngap = \"1\"",
            ),
            "strict",
        );
        expect_error(
            &MINIMAL.replace(
                "generator = \"chain\"",
                "generator = \"threshold\"\ngap = \"1\"\nstrict = true",
            ),
            "labels",
        );
    }

    #[test]
    fn chain_rejects_threshold_knobs() {
        expect_error(
            &MINIMAL.replace("generator = \"chain\"", "generator = \"chain\"\ngap = \"1\""),
            "threshold generator",
        );
    }

    #[test]
    fn cost_shape_is_checked() {
        expect_error(
            &format!("{MINIMAL}\n[cost]\nrows = [[\"0\", \"1\"]]"),
            "2x2 grid",
        );
        let good = format!("{MINIMAL}\n[cost]\nrows = [[\"0\", \"1\"], [\"1\", \"0\"]]");
        assert!(parse_instance(&good, false).unwrap().cost.is_some());
    }

    #[test]
    fn file_flag_closes_the_relation() {
        let open = MINIMAL.replace(
            "generator = \"chain\"",
            "pairs = [[\"a\", \"b\"]]",
        );
        assert!(parse_instance(&open, false).is_err());
        let flagged = format!("{open}\n[flags]\nauto_close = true");
        let p = parse_instance(&flagged, false).unwrap();
        assert!(p.relation.contains(0, 0) && p.relation.contains(1, 1));
    }

    #[test]
    fn non_strict_threshold_includes_equality() {
        let labeled = r#"
            [[elements]]
            id = "x"
            label = "0"
            [[elements]]
            id = "y"
            label = "1"
            [measures.mu]
            x = "1"
            [measures.nu]
            y = "1"
            [relation]
            generator = "threshold"
            gap = "1"
            strict = false
        "#;
        let p = parse_instance(labeled, false).unwrap();
        assert!(p.relation.contains(0, 1));
        let strict = labeled.replace("strict = false", "strict = true");
        let q = parse_instance(&strict, false).unwrap();
        assert!(!q.relation.contains(0, 1));
    }
}
