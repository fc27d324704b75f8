use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use kkr_core::boxball::{format_trajectory, BoxBallState};
use kkr_core::crystal::{energy, r_matrix, unwinding_number};
use kkr_core::kkr::{kkr_forward, kkr_scattering, kkr_scattering_all};
use kkr_core::rigged::{JsonError, RiggedConfiguration};
use kkr_core::scattering::{
    compose_theorem, normal_order, normal_ordered_set, ScatteringData, DEFAULT_ORBIT_CAP,
};
use kkr_core::tableau::Tableau;
use kkr_core::verify::{run_suite, SuiteConfig, SUITES};

/// Rigged configurations, the KKR bijection, crystal scattering and box-ball
/// systems for sl_n.
#[derive(Parser)]
#[command(name = "kkr", version)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the vacancy and rigging conditions of a configuration.
    Validate {
        /// Configuration JSON file, or `-` for stdin.
        rc: String,
    },
    /// Map a configuration to its highest-weight path.
    Kkr {
        rc: String,
        /// Also print every box removal.
        #[arg(long)]
        trace: bool,
    },
    /// Combinatorial R matrix: prints the image `y' x'` and the energy.
    Rmatrix {
        x: String,
        y: String,
        #[arg(long)]
        n: usize,
    },
    /// Energy and unwinding number of `x ⊗ y`.
    Energy {
        x: String,
        y: String,
        #[arg(long)]
        n: usize,
    },
    /// Scattering data of one level extracted by the enlarged-space KKR run.
    Scatter {
        rc: String,
        #[arg(long)]
        level: usize,
        /// List the data of every choice among simultaneously singular rows.
        #[arg(long)]
        all: bool,
    },
    /// Normal-ordered representative of scattering data such as `2[1]*23[2]`.
    NormalOrder {
        sdata: String,
        #[arg(long)]
        n: usize,
        /// Level of the data; defaults to one less than the smallest letter.
        #[arg(long)]
        level: Option<usize>,
        /// List the whole normal-ordered set.
        #[arg(long)]
        all: bool,
    },
    /// Build the path level by level through scattering data.
    Compose {
        rc: String,
        /// Compare with the direct KKR image.
        #[arg(long)]
        check: bool,
    },
    /// Time evolution of a box-ball state.
    BbsEvolve {
        state: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        n: usize,
        /// Carrier capacity; defaults to the ball count.
        #[arg(long)]
        capacity: Option<usize>,
    },
    /// Solitons of a well-separated box-ball state.
    BbsSolitons {
        state: String,
        /// Alphabet size; defaults to the largest letter present.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run a brute-force cross-check suite (`all` runs every suite).
    Verify {
        #[arg(long)]
        suite: String,
        /// Largest quantum-space size.
        #[arg(long, default_value_t = 6)]
        max_boxes: usize,
        /// Largest alphabet.
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_row_len: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

/// A failed invocation: usage problems exit 2, invalid input or a mismatch exit 1.
enum Fail {
    Usage(String),
    Invalid(String),
}

impl From<kkr_core::Error> for Fail {
    fn from(e: kkr_core::Error) -> Self {
        Fail::Invalid(e.to_string())
    }
}

type Outcome = Result<(String, bool), Fail>;

fn usage<E: std::fmt::Display>(e: E) -> Fail {
    Fail::Usage(e.to_string())
}

fn read_source(src: &str) -> Result<String, Fail> {
    if src == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(src).map_err(|e| usage(format!("{src}: {e}")))
    }
}

fn load_rc(src: &str) -> Result<RiggedConfiguration, Fail> {
    let text = read_source(src)?;
    match RiggedConfiguration::from_json(&text) {
        Ok((rc, touched)) => {
            if !touched.is_empty() {
                let layers: Vec<String> = touched.iter().map(|a| a.to_string()).collect();
                eprintln!("note: sorted rows of layer(s) {}", layers.join(", "));
            }
            Ok(rc)
        }
        Err(e @ JsonError::Syntax(_)) => Err(Fail::Usage(format!("{src}: {e}"))),
        Err(JsonError::Content(e)) => Err(Fail::Invalid(format!("{src}: {e}"))),
    }
}

fn tableau(s: &str, n: usize) -> Result<Tableau, Fail> {
    Tableau::parse(s, n).map_err(usage)
}

fn pretty(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("serializable")
}

fn run(cli: Cli) -> Outcome {
    let js = cli.json;
    match cli.command {
        Command::Validate { rc } => {
            let rc = load_rc(&rc)?;
            let problem = rc.validate().err().map(|e| e.to_string());
            let ok = problem.is_none();
            let out = if js {
                pretty(json!({ "valid": ok, "error": problem }))
            } else {
                problem.map_or_else(|| "valid".to_string(), |p| format!("invalid: {p}"))
            };
            Ok((out, ok))
        }
        Command::Kkr { rc, trace } => {
            let rc = load_rc(&rc)?;
            let (path, tr) = kkr_forward(&rc)?;
            let out = if js {
                let mut v = json!({ "path": path.to_string() });
                if trace {
                    v["trace"] = serde_json::to_value(&tr).expect("serializable");
                }
                pretty(v)
            } else if trace {
                let mut s = format!("{path}\n");
                for rem in &tr.removals {
                    s.push_str(&format!("row {} -> {}\n", rem.quantum_row, rem.tableau));
                    for b in &rem.boxes {
                        let chain: Vec<String> = b
                            .chain
                            .iter()
                            .map(|x| format!("({},{},{})", x.layer, x.row, x.col))
                            .collect();
                        s.push_str(&format!(
                            "  col {} letter {} chain {}\n",
                            b.quantum_col,
                            b.letter,
                            chain.join(" ")
                        ));
                    }
                }
                s.pop();
                s
            } else {
                path.to_string()
            };
            Ok((out, true))
        }
        Command::Rmatrix { x, y, n } => {
            let img = r_matrix(&tableau(&x, n)?, &tableau(&y, n)?)?;
            let out = if js {
                pretty(json!({
                    "left": img.left.to_string(),
                    "right": img.right.to_string(),
                    "energy": img.energy,
                }))
            } else {
                format!("{} {} H={}", img.left, img.right, img.energy)
            };
            Ok((out, true))
        }
        Command::Energy { x, y, n } => {
            let (x, y) = (tableau(&x, n)?, tableau(&y, n)?);
            let h = energy(&x, &y)?;
            let u = unwinding_number(&x, &y)?;
            let out = if js {
                pretty(json!({ "energy": h, "unwinding": u }))
            } else {
                format!("H={h} unwinding={u}")
            };
            Ok((out, true))
        }
        Command::Scatter { rc, level, all } => {
            let rc = load_rc(&rc)?;
            if level == 0 || level >= rc.n() {
                return Err(usage(format!("level must lie in 1..{}", rc.n())));
            }
            rc.validate()?;
            let data: Vec<ScatteringData> = if all {
                let mut v: Vec<ScatteringData> = kkr_scattering_all(&rc, level, 100_000)?
                    .iter()
                    .map(ScatteringData::from)
                    .collect();
                v.sort_by_key(|s| s.to_string());
                v.dedup();
                v
            } else {
                vec![ScatteringData::from(&kkr_scattering(&rc, level)?)]
            };
            let out = if js {
                let items: Vec<Value> = data
                    .iter()
                    .map(|s| json!({ "data": s.to_string(), "modes": s.modes() }))
                    .collect();
                pretty(json!({ "level": level, "results": items }))
            } else {
                data.iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            Ok((out, true))
        }
        Command::NormalOrder {
            sdata,
            n,
            level,
            all,
        } => {
            let level = match level {
                Some(a) => a,
                None => infer_level(&sdata, n)?,
            };
            let s = ScatteringData::parse(&sdata, n, level).map_err(usage)?;
            let reps = if all {
                normal_ordered_set(&s, DEFAULT_ORBIT_CAP)?
            } else {
                vec![normal_order(&s)?]
            };
            let strs: Vec<String> = reps.iter().map(|r| r.to_string()).collect();
            let out = if js {
                pretty(json!({ "level": level, "input": s.to_string(), "normal_ordered": strs }))
            } else {
                strs.join("\n")
            };
            Ok((out, true))
        }
        Command::Compose { rc, check } => {
            let rc = load_rc(&rc)?;
            let path = compose_theorem(&rc)?;
            if !check {
                let out = if js {
                    pretty(json!({ "path": path.to_string() }))
                } else {
                    path.to_string()
                };
                return Ok((out, true));
            }
            let (direct, _) = kkr_forward(&rc)?;
            let same = direct == path;
            let out = if js {
                pretty(json!({
                    "match": same,
                    "compose": path.to_string(),
                    "kkr": direct.to_string(),
                }))
            } else if same {
                format!("MATCH {path}")
            } else {
                format!("MISMATCH compose={path} kkr={direct}")
            };
            Ok((out, same))
        }
        Command::BbsEvolve {
            state,
            steps,
            n,
            capacity,
        } => {
            let st = BoxBallState::parse(&state, n).map_err(usage)?;
            if capacity == Some(0) {
                return Err(usage("capacity must be positive"));
            }
            let traj = st.trajectory(steps, capacity)?;
            let out = if js {
                let rows: Vec<String> = traj.iter().map(|s| s.to_string()).collect();
                pretty(json!({ "n": n, "states": rows }))
            } else {
                let mut s = format_trajectory(&traj, 1);
                s.pop();
                s
            };
            Ok((out, true))
        }
        Command::BbsSolitons { state, n } => {
            let n = match n {
                Some(n) => n,
                None => state
                    .chars()
                    .filter_map(|c| c.to_digit(10))
                    .max()
                    .map_or(1, |d| d.max(1) as usize),
            };
            let st = BoxBallState::parse(&state, n).map_err(usage)?;
            let lengths = st.soliton_content()?;
            let sol = st.solitons();
            let ok = sol.is_ok();
            let out = if js {
                let sol = sol
                    .as_ref()
                    .map(|v| v.iter().map(|t| t.to_string()).collect::<Vec<_>>())
                    .ok();
                pretty(json!({ "solitons": sol, "lengths": lengths }))
            } else {
                let l: Vec<String> = lengths.iter().map(|x| x.to_string()).collect();
                match sol {
                    Ok(v) => {
                        let v: Vec<String> = v.iter().map(|t| t.to_string()).collect();
                        format!("{}\nlengths {}", v.join(" "), l.join(" "))
                    }
                    Err(e) => format!("{e}\nlengths {}", l.join(" ")),
                }
            };
            Ok((out, ok))
        }
        Command::Verify {
            suite,
            max_boxes,
            n,
            max_row_len,
            samples,
            seed,
        } => {
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else if SUITES.contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                return Err(usage(format!(
                    "unknown suite {suite:?}; expected one of {} or all",
                    SUITES.join(", ")
                )));
            };
            let cfg = SuiteConfig {
                n_max: n,
                max_boxes,
                max_row_len,
                samples,
                seed,
            };
            let mut reports = Vec::new();
            for name in names {
                reports.push(run_suite(name, &cfg)?);
            }
            let ok = reports.iter().all(|r| r.passed());
            let out = if js {
                let v: Vec<Value> = reports
                    .iter()
                    .map(|r| serde_json::to_value(r).expect("serializable"))
                    .collect();
                pretty(Value::Array(v))
            } else {
                reports
                    .iter()
                    .map(|r| r.summary())
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            Ok((out, ok))
        }
    }
}

fn infer_level(sdata: &str, n: usize) -> Result<usize, Fail> {
    let lowest = sdata
        .split('*')
        .filter_map(|f| f.split('[').next())
        .filter_map(|t| {
            if t.contains(',') {
                t.split(',')
                    .filter_map(|x| x.trim().parse::<usize>().ok())
                    .min()
            } else {
                t.chars()
                    .filter_map(|c| c.to_digit(10))
                    .map(|d| d as usize)
                    .min()
            }
        })
        .min();
    match lowest {
        Some(l) if l >= 2 && l <= n => Ok(l - 1),
        _ => Err(usage("cannot infer the level; pass --level")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, ok)) => {
            println!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Fail::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
