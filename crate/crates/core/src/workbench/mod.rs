//! Command implementations behind the `belltest` binary.
//!
//! Each command returns the artifact text and an exit status; the binary
//! only parses arguments and writes the result. Artifacts contain no
//! timings or other run-dependent data, so identical inputs give identical
//! bytes.

mod data;
mod render;

use std::fmt;
use std::path::PathBuf;

use num_traits::Zero;
use serde::Serialize;

pub use data::{parse_data_file, DataFile};
use data::Block;
pub use render::{equality_text, inequality_text, terms_text};

use crate::error::Error;
use crate::geometry::{facet_enumeration_with, verify_h_representation, FacetOptions, DEFAULT_MEMORY_CAP};
use crate::locality::{test_locality_in, LocalityVerdict};
use crate::model::{parse_rational, table_from_counts, ExperimentClass, ProbabilityTable, SettingsSelection};
use crate::strategies::{enumerate_vertices, strategy_from_index, DEFAULT_ENUMERATION_CAP};
use crate::Rational;
use render::{pairs_json, pairs_text, rational_text, to_json, InequalityJson};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Vertices,
    Facets,
    Test,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Process exit codes. 0–3 are the scripting contract; 4 means the tool
/// could not vouch for its own output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    /// Success; in test mode, the table is local.
    Success = 0,
    Nonlocal = 1,
    InputError = 2,
    Capacity = 3,
    VerificationFailed = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub class: Option<ExperimentClass>,
    pub pairs: Option<Vec<(usize, usize)>>,
    pub data: Option<PathBuf>,
    pub slack: Rational,
    pub cap: u64,
    pub memory_cap: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            class: None,
            pairs: None,
            data: None,
            slack: Rational::zero(),
            cap: DEFAULT_ENUMERATION_CAP,
            memory_cap: DEFAULT_MEMORY_CAP,
            format: Format::Json,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if self.cap == 0 || self.memory_cap == 0 {
            return Err(Failure::input("caps must be positive"));
        }
        if self.slack < Rational::zero() {
            return Err(Failure::input(format!("slack must be nonnegative, got {}", self.slack)));
        }
        match self.mode {
            Mode::Vertices | Mode::Facets if self.class.is_none() => {
                Err(Failure::input("--class is required"))
            }
            Mode::Test if self.data.is_none() => Err(Failure::input("--data is required in test mode")),
            _ => Ok(()),
        }
    }

    /// Declared selection; all pairs when none were given.
    fn selection(&self) -> Result<SettingsSelection, Failure> {
        let class = self.class.ok_or_else(|| Failure::input("--class is required"))?;
        Ok(match &self.pairs {
            Some(p) => SettingsSelection::new(class, p.clone())?,
            None => SettingsSelection::all_pairs(class),
        })
    }
}

/// A command that did not produce its artifact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub status: ExitStatus,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            status: ExitStatus::InputError,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::EnumerationCap { .. } | Error::MemoryCap { .. } => ExitStatus::Capacity,
            Error::Internal(_) => ExitStatus::VerificationFailed,
            _ => ExitStatus::InputError,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

/// A finished command: artifact body, a one-line summary for the terminal,
/// and the exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub artifact: String,
    pub summary: String,
    pub status: ExitStatus,
}

pub fn run(config: &RunConfig) -> Result<Outcome, Failure> {
    config.validate()?;
    match config.mode {
        Mode::Vertices => cmd_vertices(config),
        Mode::Facets => cmd_facets(config),
        Mode::Test => cmd_test(config),
    }
}

/// `"2,2,2"` → class (2,2,2).
pub fn parse_class_arg(text: &str) -> Result<ExperimentClass, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let nums: Option<Vec<u32>> = parts.iter().map(|p| p.parse().ok()).collect();
    match nums.as_deref() {
        Some(&[a, b, i]) => Ok(ExperimentClass::new(a, b, i)?),
        _ => Err(Failure::input(format!(
            "--class expects three comma-separated integers A,B,I, got {text:?}"
        ))),
    }
}

/// `"0:0,0:1,1:1"` → setting pairs.
pub fn parse_pairs_arg(text: &str) -> Result<Vec<(usize, usize)>, Failure> {
    text.split(',')
        .map(|p| {
            let (a, b) = p
                .trim()
                .split_once(':')
                .ok_or_else(|| Failure::input(format!("--pairs entry {p:?} is not of the form a:b")))?;
            match (a.trim().parse(), b.trim().parse()) {
                (Ok(a), Ok(b)) => Ok((a, b)),
                _ => Err(Failure::input(format!("--pairs entry {p:?} is not of the form a:b"))),
            }
        })
        .collect()
}

pub fn parse_slack_arg(text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(|e| Failure::input(e.to_string()))
}

#[derive(Serialize)]
struct VertexJson<'a> {
    coords: &'a [u8],
    strategies: &'a [u64],
}

#[derive(Serialize)]
struct VerticesJson<'a> {
    class: [u32; 3],
    pairs: Vec<[usize; 2]>,
    ambient_dimension: usize,
    strategy_count: u64,
    vertex_count: usize,
    vertices: Vec<VertexJson<'a>>,
}

fn class_json(class: ExperimentClass) -> [u32; 3] {
    [class.n_det_a(), class.n_det_b(), class.n_settings() as u32]
}

pub fn cmd_vertices(config: &RunConfig) -> Result<Outcome, Failure> {
    let selection = config.selection()?;
    let set = enumerate_vertices(&selection, config.cap)?;
    let summary = format!(
        "{} vertices, ambient dimension {}",
        set.len(),
        set.ambient_dimension()
    );
    let artifact = match config.format {
        Format::Json => to_json(&VerticesJson {
            class: class_json(selection.class()),
            pairs: pairs_json(&selection),
            ambient_dimension: set.ambient_dimension(),
            strategy_count: set.strategy_total(),
            vertex_count: set.len(),
            vertices: set
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| VertexJson {
                    coords: v.coords(),
                    strategies: set.strategies_of(i),
                })
                .collect(),
        }),
        Format::Text => {
            let mut out = format!(
                "class {}, pairs {}\n{summary}, {} strategies\n",
                selection.class(),
                pairs_text(&selection),
                set.strategy_total()
            );
            let block = selection.block_size();
            for (i, v) in set.vertices().iter().enumerate() {
                let blocks: Vec<String> = v
                    .coords()
                    .chunks(block)
                    .map(|c| c.iter().map(|x| char::from(b'0' + x)).collect())
                    .collect();
                let strategies: Vec<String> = set.strategies_of(i).iter().map(u64::to_string).collect();
                out.push_str(&format!(
                    "{} | strategies {}\n",
                    blocks.join(" "),
                    strategies.join(",")
                ));
            }
            out
        }
    };
    Ok(Outcome {
        artifact,
        summary,
        status: ExitStatus::Success,
    })
}

/// Facet counts that have been established independently for particular
/// selections; a mismatch is reported next to the (still verified) result.
type FacetCount = ([u32; 3], &'static [(usize, usize)], usize);

const REFERENCE_FACET_COUNTS: &[FacetCount] = &[
    ([1, 1, 1], &[(0, 0)], 4),
    ([1, 1, 2], &[(0, 0), (0, 1), (1, 0), (1, 1)], 24),
    ([2, 2, 2], &[(0, 0), (0, 1), (1, 1)], 48),
];

fn reference_facet_count(selection: &SettingsSelection) -> Option<usize> {
    let class = class_json(selection.class());
    REFERENCE_FACET_COUNTS
        .iter()
        .find(|(c, p, _)| *c == class && *p == selection.pairs())
        .map(|&(_, _, n)| n)
}

#[derive(Serialize)]
struct ClauseJson<'a> {
    passed: bool,
    failures: &'a [String],
}

#[derive(Serialize)]
struct FacetsJson<'a> {
    class: [u32; 3],
    pairs: Vec<[usize; 2]>,
    ambient_dimension: usize,
    dimension: usize,
    vertex_count: usize,
    equality_count: usize,
    facet_count: usize,
    equalities: Vec<InequalityJson<'a>>,
    facets: Vec<InequalityJson<'a>>,
    verification: std::collections::BTreeMap<&'static str, ClauseJson<'a>>,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

pub fn cmd_facets(config: &RunConfig) -> Result<Outcome, Failure> {
    let selection = config.selection()?;
    let set = enumerate_vertices(&selection, config.cap)?;
    let hrep = facet_enumeration_with(
        set.vertices(),
        FacetOptions {
            memory_cap: config.memory_cap,
        },
    )?;
    let report = verify_h_representation(set.vertices(), &hrep)?;
    let note = reference_facet_count(&selection)
        .filter(|&n| n != hrep.facets.len())
        .map(|n| {
            format!(
                "reference count for this selection is {n} facets, found {}; the listing above is complete and verified independently",
                hrep.facets.len()
            )
        });
    let verified = report.passed();
    let summary = format!(
        "{} facets, {} equalit{}, dimension {}, verification {}",
        hrep.facets.len(),
        hrep.equalities.len(),
        if hrep.equalities.len() == 1 { "y" } else { "ies" },
        hrep.dimension,
        if verified { "passed" } else { "FAILED" }
    );
    let artifact = match config.format {
        Format::Json => to_json(&FacetsJson {
            class: class_json(selection.class()),
            pairs: pairs_json(&selection),
            ambient_dimension: hrep.ambient,
            dimension: hrep.dimension,
            vertex_count: set.len(),
            equality_count: hrep.equalities.len(),
            facet_count: hrep.facets.len(),
            equalities: hrep
                .equalities
                .iter()
                .map(|e| InequalityJson::new(e, &selection, true))
                .collect(),
            facets: hrep
                .facets
                .iter()
                .map(|f| InequalityJson::new(f, &selection, false))
                .collect(),
            verification: report
                .clauses()
                .into_iter()
                .map(|(name, c)| {
                    (
                        name,
                        ClauseJson {
                            passed: c.passed,
                            failures: &c.failures,
                        },
                    )
                })
                .collect(),
            verified,
            note: note.clone(),
        }),
        Format::Text => {
            let mut out = format!(
                "class {}, pairs {}\n{} vertices, ambient dimension {}, dimension {}\n",
                selection.class(),
                pairs_text(&selection),
                set.len(),
                hrep.ambient,
                hrep.dimension
            );
            out.push_str(&format!("equalities ({}):\n", hrep.equalities.len()));
            for e in &hrep.equalities {
                out.push_str(&format!("  {}\n", equality_text(e, &selection)));
            }
            out.push_str(&format!("facets ({}):\n", hrep.facets.len()));
            for f in &hrep.facets {
                out.push_str(&format!("  {}\n", inequality_text(f, &selection)));
            }
            out.push_str("verification:\n");
            for (name, c) in report.clauses() {
                out.push_str(&format!(
                    "  {name}: {}\n",
                    if c.passed { "passed" } else { "FAILED" }
                ));
                for w in &c.failures {
                    out.push_str(&format!("    {w}\n"));
                }
            }
            if let Some(n) = &note {
                out.push_str(&format!("note: {n}\n"));
            }
            out
        }
    };
    Ok(Outcome {
        artifact,
        summary,
        status: if verified {
            ExitStatus::Success
        } else {
            ExitStatus::VerificationFailed
        },
    })
}

/// Reads the data file named in the config and builds the table over the
/// declared selection (command line if given, else the file's own).
pub fn load_table(config: &RunConfig) -> Result<ProbabilityTable, Failure> {
    let path = config
        .data
        .as_ref()
        .ok_or_else(|| Failure::input("--data is required in test mode"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    // serde_json errors end with "at line L column C".
    let file = parse_data_file(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    table_from_file(file, config.class, config.pairs.as_deref())
}

pub fn table_from_file(
    file: DataFile,
    class: Option<ExperimentClass>,
    pairs: Option<&[(usize, usize)]>,
) -> Result<ProbabilityTable, Failure> {
    let [a, b, i] = file.class;
    let file_class = ExperimentClass::new(a, b, i)?;
    if let Some(c) = class {
        if c != file_class {
            return Err(Failure::input(format!(
                "--class {c} does not match the data file's class {file_class}"
            )));
        }
    }
    let file_pairs: Vec<(usize, usize)> = file.pairs.iter().map(|&[x, y]| (x, y)).collect();
    let declared: Vec<(usize, usize)> = pairs.map_or_else(|| file_pairs.clone(), <[_]>::to_vec);
    let selection = SettingsSelection::new(file_class, declared.clone())?;
    if let Some(extra) = file_pairs.iter().find(|p| !declared.contains(p)) {
        return Err(Failure::input(format!(
            "data file has pair ({},{}) which --pairs does not declare",
            extra.0, extra.1
        )));
    }
    let (rows, cols) = (file_class.outputs_a(), file_class.outputs_b());
    match (file.counts, file.probs) {
        (Some(_), Some(_)) => Err(Failure::input(
            "data file has both counts and probs; give exactly one",
        )),
        (None, None) => Err(Failure::input("data file has neither counts nor probs")),
        (Some(blocks), None) => {
            let counts = blocks_in_order(blocks, &file_pairs, &declared, rows, cols)?
                .into_iter()
                .map(|flat| flat.chunks(cols).map(|r| r.iter().map(|c| c.0).collect()).collect())
                .collect::<Vec<Vec<Vec<u64>>>>();
            Ok(table_from_counts(&selection, &counts)?)
        }
        (None, Some(blocks)) => {
            let entries = blocks_in_order(blocks, &file_pairs, &declared, rows, cols)?
                .into_iter()
                .flatten()
                .map(|e| e.0)
                .collect();
            Ok(ProbabilityTable::from_entries(selection, entries)?)
        }
    }
}

/// Flattened blocks in declared-pair order; each file block is used once.
fn blocks_in_order<T>(
    blocks: Vec<Block<T>>,
    file_pairs: &[(usize, usize)],
    declared: &[(usize, usize)],
    rows: usize,
    cols: usize,
) -> Result<Vec<Vec<T>>, Failure> {
    let mut blocks: Vec<Option<Block<T>>> = blocks.into_iter().map(Some).collect();
    declared
        .iter()
        .map(|&(x, y)| {
            let block = file_pairs
                .iter()
                .position(|&p| p == (x, y))
                .and_then(|k| blocks.get_mut(k).and_then(Option::take))
                .ok_or_else(|| Failure::input(format!("no data for pair ({x},{y})")))?;
            block
                .flatten(rows, cols)
                .map_err(|e| Failure::input(format!("pair ({x},{y}): {e}")))
        })
        .collect()
}

#[derive(Serialize)]
struct WeightJson {
    strategy: u64,
    f_a: Vec<usize>,
    f_b: Vec<usize>,
    weight: String,
}

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
enum VerdictJson<'a> {
    Local {
        class: [u32; 3],
        pairs: Vec<[usize; 2]>,
        slack: String,
        weights: Vec<WeightJson>,
    },
    Nonlocal {
        class: [u32; 3],
        pairs: Vec<[usize; 2]>,
        slack: String,
        certificate: InequalityJson<'a>,
        local_bound: String,
        table_value: String,
        violation: String,
    },
}

pub fn cmd_test(config: &RunConfig) -> Result<Outcome, Failure> {
    let table = load_table(config)?;
    let selection = table.selection().clone();
    let set = enumerate_vertices(&selection, config.cap)?;
    let verdict = test_locality_in(&set, &table, &config.slack)?;
    let class = selection.class();
    let slack = rational_text(&config.slack);
    let header = format!(
        "class {}, pairs {}, slack {slack}\n",
        class,
        pairs_text(&selection)
    );
    let (artifact, summary, status) = match &verdict {
        LocalityVerdict::Local { weights } => {
            let rows: Vec<WeightJson> = weights
                .iter()
                .map(|(&k, w)| {
                    let s = strategy_from_index(class, k).expect("index from enumeration");
                    WeightJson {
                        strategy: k,
                        f_a: s.f_a().to_vec(),
                        f_b: s.f_b().to_vec(),
                        weight: rational_text(w),
                    }
                })
                .collect();
            let summary = format!("local: {} strategies with nonzero weight", rows.len());
            let artifact = match config.format {
                Format::Json => to_json(&VerdictJson::Local {
                    class: class_json(class),
                    pairs: pairs_json(&selection),
                    slack,
                    weights: rows,
                }),
                Format::Text => {
                    let mut out = header;
                    out.push_str("verdict: local\nweights (strategy: f_a | f_b = weight):\n");
                    for r in rows {
                        out.push_str(&format!(
                            "  {}: {:?} | {:?} = {}\n",
                            r.strategy, r.f_a, r.f_b, r.weight
                        ));
                    }
                    out
                }
            };
            (artifact, summary, ExitStatus::Success)
        }
        LocalityVerdict::Nonlocal {
            certificate,
            violation,
            table_value,
            local_bound,
        } => {
            let summary = format!("nonlocal: certificate violated by {violation}");
            let artifact = match config.format {
                Format::Json => to_json(&VerdictJson::Nonlocal {
                    class: class_json(class),
                    pairs: pairs_json(&selection),
                    slack,
                    certificate: InequalityJson::new(certificate, &selection, false),
                    local_bound: rational_text(local_bound),
                    table_value: rational_text(table_value),
                    violation: rational_text(violation),
                }),
                Format::Text => {
                    let mut out = header;
                    out.push_str("verdict: nonlocal\n");
                    out.push_str(&format!(
                        "certificate: {}\n",
                        inequality_text(certificate, &selection)
                    ));
                    out.push_str(&format!("local bound: {local_bound}\n"));
                    out.push_str(&format!("table value: {table_value}\n"));
                    out.push_str(&format!("violation: {violation}\n"));
                    out
                }
            };
            (artifact, summary, ExitStatus::Nonlocal)
        }
    };
    Ok(Outcome {
        artifact,
        summary,
        status,
    })
}
