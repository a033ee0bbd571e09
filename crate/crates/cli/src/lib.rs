//! Command-line front end: parse an instance, run the requested computation,
//! emit a deterministic report on stdout. Diagnostics go to stderr; exit code
//! 0 means success, 1 a validation or infeasibility error, 2 a usage error.

pub mod instance;
pub mod output;

use std::fmt;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use strassen_core::{
    c_transform, certify_duality, closed_approximant, dual_objective, layer_cake_extract,
    rescale_to_unit, resolution_sweep_with_shift, solve_dual_mincut, solve_primal_mass,
    CostMatrix, Direction, Potential, Rational, Relation, RelationFamily, ORACLE_LIMIT,
};

pub use instance::{emit_instance, parse_instance, ParsedInstance};
use output::{
    render_csv, render_fields, render_json, render_table, sweep_columns, sweep_json, Columns,
    Format,
};

#[derive(Debug)]
pub enum CliError {
    Message(String),
    Core(strassen_core::Error),
}

impl CliError {
    pub fn msg(text: impl Into<String>) -> Self {
        CliError::Message(text.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Message(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<strassen_core::Error> for CliError {
    fn from(e: strassen_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Parser)]
#[command(
    name = "strassen",
    version,
    about = "Exact coupling/monotone-set duality toolkit for zero-one transport costs"
)]
pub struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value = "table", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args)]
pub struct InstanceArgs {
    /// Instance file path, or `-` to read standard input.
    pub input: String,
    /// Close the relation reflexively and transitively before validating.
    #[arg(long)]
    pub auto_close: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    First,
    Second,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate an instance and print relation and cost diagnostics.
    Check(InstanceArgs),
    /// Solve both sides of the coupling/monotone-set problem and certify equality.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Insist on the exhaustive subset cross-check; fails above the size limit.
        #[arg(long)]
        oracle: bool,
    },
    /// Apply the cost conjugation to a potential.
    Transform {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Potential values in element order, comma separated p/q.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        potential: Vec<String>,
        #[arg(long, value_enum, default_value = "first")]
        direction: DirectionArg,
    },
    /// Extract an optimal superlevel set from a unit-range potential.
    Layercake {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Potential values in element order, comma separated p/q.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        potential: Vec<String>,
        /// Shift and clamp the potential into [0, 1] first.
        #[arg(long)]
        rescale: bool,
    },
    /// Reproduce the vanishing-duality-gap grid family across resolutions.
    Counterexample {
        /// Grid resolutions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        resolutions: Vec<u32>,
        /// Shift step for the explicit near-optimal coupling.
        #[arg(long, default_value_t = 1)]
        shift: u32,
    },
    /// Evaluate the nested closed approximants of a grid relation.
    Fsigma {
        /// Grid resolution.
        #[arg(long)]
        resolution: u32,
        /// Approximant indices, comma separated; default doubles up to the resolution.
        #[arg(long, value_delimiter = ',')]
        approximants: Option<Vec<u32>>,
    },
    /// Re-emit an instance in canonical form (explicit sorted pairs, full weight maps).
    Emit(InstanceArgs),
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::msg(format!("cannot read standard input: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::msg(format!("cannot read {path}: {e}")))
    }
}

fn load_instance(args: &InstanceArgs) -> Result<ParsedInstance, CliError> {
    parse_instance(&read_input(&args.input)?, args.auto_close)
}

fn parse_potential(
    instance: &ParsedInstance,
    values: &[String],
) -> Result<Potential, CliError> {
    let n = instance.ground.len();
    if values.len() != n {
        return Err(CliError::msg(format!(
            "potential needs {n} values in element order, got {}",
            values.len()
        )));
    }
    let parsed = values
        .iter()
        .enumerate()
        .map(|(i, text)| {
            text.trim().parse::<Rational>().map_err(|e| {
                CliError::msg(format!("potential[{i}]: cannot parse \"{text}\" as p/q ({e})"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Potential::new(instance.ground.clone(), parsed)?)
}

/// Cost used by the conjugation commands: the file's matrix when present,
/// otherwise the zero-one cost of the instance relation.
fn effective_cost(instance: &ParsedInstance) -> CostMatrix {
    instance
        .cost
        .clone()
        .unwrap_or_else(|| instance.relation.to_cost())
}

fn run_check(instance: &ParsedInstance, format: Format) -> String {
    let (cost_source, cost) = match &instance.cost {
        Some(c) => ("file", c.clone()),
        None => ("relation", instance.relation.to_cost()),
    };
    let report = cost.validate();
    let ground = &instance.ground;
    let witness = report
        .witness
        .map(|(i, j, k)| (ground.id(i), ground.id(j), ground.id(k)));
    let labels = if ground.labels().is_some() {
        "present"
    } else {
        "absent"
    };
    match format {
        Format::Json => render_json(&json!({
            "points": ground.len(),
            "labels": labels,
            "relation_pairs": instance.relation.pair_count(),
            "preorder": true,
            "cost_source": cost_source,
            "zero_diagonal": report.zero_diagonal,
            "triangle": report.triangle,
            "witness": witness.map(|(a, b, c)| vec![a, b, c]),
        })),
        Format::Csv => render_csv(&Columns {
            header: vec![
                "points",
                "labels",
                "relation_pairs",
                "preorder",
                "cost_source",
                "zero_diagonal",
                "triangle",
                "witness",
            ],
            rows: vec![vec![
                ground.len().to_string(),
                labels.to_string(),
                instance.relation.pair_count().to_string(),
                "true".to_string(),
                cost_source.to_string(),
                report.zero_diagonal.to_string(),
                report.triangle.to_string(),
                witness
                    .map(|(a, b, c)| format!("{a};{b};{c}"))
                    .unwrap_or_default(),
            ]],
        }),
        Format::Table => render_fields(&[
            ("points", ground.len().to_string()),
            ("labels", labels.to_string()),
            ("relation pairs", instance.relation.pair_count().to_string()),
            ("preorder", "true".to_string()),
            ("cost source", cost_source.to_string()),
            ("zero diagonal", report.zero_diagonal.to_string()),
            ("triangle", report.triangle.to_string()),
            (
                "witness",
                witness
                    .map(|(a, b, c)| format!("({a}, {b}, {c})"))
                    .unwrap_or_else(|| "none".to_string()),
            ),
        ]),
    }
}

fn run_solve(
    instance: &ParsedInstance,
    oracle: bool,
    format: Format,
) -> Result<String, CliError> {
    let report = certify_duality(&instance.mu, &instance.nu, &instance.relation)?;
    if oracle && !report.oracle_checked {
        return Err(strassen_core::Error::TooLarge {
            size: instance.ground.len(),
            limit: ORACLE_LIMIT,
        }
        .into());
    }
    let ground = &instance.ground;
    let coupling: Vec<(String, String, String)> = report
        .optimal_coupling
        .support()
        .into_iter()
        .map(|(i, j)| {
            (
                ground.id(i).to_string(),
                ground.id(j).to_string(),
                report.optimal_coupling.get(i, j).to_string(),
            )
        })
        .collect();
    let set_ids: Vec<String> = report
        .optimal_set
        .indices()
        .map(|i| ground.id(i).to_string())
        .collect();
    Ok(match format {
        Format::Json => render_json(&json!({
            "primal_value": report.primal_value.to_string(),
            "dual_value": report.dual_value.to_string(),
            "dual_set": set_ids,
            "dual_set_size": set_ids.len(),
            "certificate_ok": report.certificate_ok,
            "oracle_checked": report.oracle_checked,
            "coupling": coupling
                .iter()
                .map(|(a, b, m)| vec![a.clone(), b.clone(), m.clone()])
                .collect::<Vec<_>>(),
        })),
        Format::Csv => render_csv(&Columns {
            header: vec![
                "primal_value",
                "dual_value",
                "dual_set_size",
                "certificate_ok",
                "oracle_checked",
                "dual_set",
            ],
            rows: vec![vec![
                report.primal_value.to_string(),
                report.dual_value.to_string(),
                set_ids.len().to_string(),
                report.certificate_ok.to_string(),
                report.oracle_checked.to_string(),
                set_ids.join(";"),
            ]],
        }),
        Format::Table => {
            let mut out = render_fields(&[
                ("primal value", report.primal_value.to_string()),
                ("dual value", report.dual_value.to_string()),
                ("dual set", format!("{}", report.optimal_set)),
                ("dual set size", set_ids.len().to_string()),
                ("certificate ok", report.certificate_ok.to_string()),
                ("oracle checked", report.oracle_checked.to_string()),
            ]);
            out.push('\n');
            out.push_str(&render_table(&Columns {
                header: vec!["from", "to", "mass"],
                rows: coupling
                    .into_iter()
                    .map(|(a, b, m)| vec![a, b, m])
                    .collect(),
            }));
            out
        }
    })
}

fn run_transform(
    instance: &ParsedInstance,
    values: &[String],
    direction: DirectionArg,
    format: Format,
) -> Result<String, CliError> {
    let psi = parse_potential(instance, values)?;
    let cost = effective_cost(instance);
    let dir = match direction {
        DirectionArg::First => Direction::First,
        DirectionArg::Second => Direction::Second,
    };
    let transformed = c_transform(&psi, &cost, dir)?;
    let ground = &instance.ground;
    let name = match direction {
        DirectionArg::First => "first",
        DirectionArg::Second => "second",
    };
    Ok(match format {
        Format::Json => render_json(&json!({
            "direction": name,
            "values": (0..ground.len())
                .map(|i| json!({"id": ground.id(i), "value": transformed.value(i).to_string()}))
                .collect::<Vec<_>>(),
        })),
        Format::Csv | Format::Table => {
            let columns = Columns {
                header: vec!["element", "value"],
                rows: (0..ground.len())
                    .map(|i| vec![ground.id(i).to_string(), transformed.value(i).to_string()])
                    .collect(),
            };
            match format {
                Format::Csv => render_csv(&columns),
                _ => render_table(&columns),
            }
        }
    })
}

fn run_layercake(
    instance: &ParsedInstance,
    values: &[String],
    rescale: bool,
    format: Format,
) -> Result<String, CliError> {
    let raw = parse_potential(instance, values)?;
    let phi = if rescale {
        rescale_to_unit(&raw, &instance.relation.to_cost())?
    } else {
        raw
    };
    let extracted = layer_cake_extract(&phi, &instance.mu, &instance.nu, &instance.relation)?;
    let input_objective = dual_objective(&phi, &instance.mu, &instance.nu)?;
    let set_ids: Vec<String> = extracted
        .set
        .indices()
        .map(|i| instance.ground.id(i).to_string())
        .collect();
    Ok(match format {
        Format::Json => render_json(&json!({
            "value": extracted.value.to_string(),
            "set": set_ids,
            "set_size": set_ids.len(),
            "input_objective": input_objective.to_string(),
        })),
        Format::Csv => render_csv(&Columns {
            header: vec!["value", "set_size", "input_objective", "set"],
            rows: vec![vec![
                extracted.value.to_string(),
                set_ids.len().to_string(),
                input_objective.to_string(),
                set_ids.join(";"),
            ]],
        }),
        Format::Table => render_fields(&[
            ("value", extracted.value.to_string()),
            ("set", format!("{}", extracted.set)),
            ("set size", set_ids.len().to_string()),
            ("input objective", input_objective.to_string()),
        ]),
    })
}

fn run_counterexample(
    resolutions: &[u32],
    shift: u32,
    format: Format,
) -> Result<String, CliError> {
    let report = resolution_sweep_with_shift(resolutions, shift)?;
    Ok(match format {
        Format::Json => render_json(&sweep_json(&report)),
        Format::Csv => render_csv(&sweep_columns(&report, false)),
        Format::Table => render_table(&sweep_columns(&report, true)),
    })
}

fn default_approximants(resolution: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut m = 1;
    while m < resolution {
        out.push(m);
        m *= 2;
    }
    out.push(resolution);
    out
}

fn run_fsigma(
    resolution: u32,
    approximants: Option<&[u32]>,
    format: Format,
) -> Result<String, CliError> {
    let grid = strassen_core::build_grid_instance(resolution)?;
    let indices = match approximants {
        Some(list) if list.is_empty() => {
            return Err(CliError::msg("approximant list must not be empty"))
        }
        Some(list) => list.to_vec(),
        None => default_approximants(resolution),
    };
    let members = indices
        .iter()
        .map(|&m| closed_approximant(&grid, m))
        .collect::<Result<Vec<_>, _>>()?;
    let family = RelationFamily::new(members.clone())?;
    let family_report = family.check();

    let mut rows: Vec<(String, Relation)> = indices
        .iter()
        .zip(members)
        .map(|(&m, r)| (m.to_string(), r))
        .collect();
    rows.push(("union".to_string(), family_report.union.clone()));

    let mut cells = Vec::new();
    for (name, relation) in &rows {
        let primal = solve_primal_mass(grid.mu(), grid.nu(), relation)?;
        let dual = solve_dual_mincut(grid.mu(), grid.nu(), relation)?;
        let equals_grid = relation == grid.relation();
        cells.push(vec![
            name.clone(),
            primal.uncovered.to_string(),
            dual.value.to_string(),
            equals_grid.to_string(),
        ]);
    }

    let columns = Columns {
        header: vec!["approximant", "primal_value", "dual_value", "equals_grid"],
        rows: cells.clone(),
    };
    Ok(match format {
        Format::Json => render_json(&json!({
            "resolution": resolution,
            "nested": family_report.nested,
            "rows": cells
                .iter()
                .map(|c| json!({
                    "approximant": c[0],
                    "primal_value": c[1],
                    "dual_value": c[2],
                    "equals_grid": c[3] == "true",
                }))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => render_csv(&columns),
        Format::Table => {
            let mut out = render_table(&columns);
            out.push_str(&format!("nested: {}\n", family_report.nested));
            out
        }
    })
}

pub fn dispatch(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Check(args) => {
            let instance = load_instance(args)?;
            Ok(run_check(&instance, cli.format))
        }
        Command::Solve { instance, oracle } => {
            let instance = load_instance(instance)?;
            run_solve(&instance, *oracle, cli.format)
        }
        Command::Transform {
            instance,
            potential,
            direction,
        } => {
            let instance = load_instance(instance)?;
            run_transform(&instance, potential, *direction, cli.format)
        }
        Command::Layercake {
            instance,
            potential,
            rescale,
        } => {
            let instance = load_instance(instance)?;
            run_layercake(&instance, potential, *rescale, cli.format)
        }
        Command::Counterexample { resolutions, shift } => {
            run_counterexample(resolutions, *shift, cli.format)
        }
        Command::Fsigma {
            resolution,
            approximants,
        } => run_fsigma(*resolution, approximants.as_deref(), cli.format),
        Command::Emit(args) => {
            let instance = load_instance(args)?;
            emit_instance(&instance)
        }
    }
}

/// Parses argv and runs one command, returning the process exit code.
/// Usage errors print through the argument parser and exit 2 directly.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
