mod render;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use csmkit::batch::{run_batch, square_suite};
use csmkit::benchgen::{gen_maze, gen_random_objective, maze_to_game, FactoryKind};
use csmkit::csm::parity_temp;
use csmkit::game::{
    parse_game, serialize_game, GameGraph, ParsedGame, Player, PriorityFn, TwoObjectiveGame,
};
use csmkit::json;
use csmkit::negotiation::{negotiate, NegotiationOutcome, Status};
use csmkit::par::Mode;
use csmkit::templates::{check_template, conjoin, extract_strategy, Template};
use csmkit::verification::{brute_coop_all, verify_profile_winning};

#[derive(Parser)]
#[command(
    name = "csmkit",
    version,
    about = "Contract-based strategy templates for two-objective parity games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Buchi,
    Parity,
}

impl From<Kind> for FactoryKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Buchi => FactoryKind::Buchi,
            Kind::Parity => FactoryKind::Parity,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Winning region and templates for one player's objective
    Solve {
        /// Game file (`-` for stdin)
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        player: u8,
        /// Which objective of a parity2 file to use (defaults to the player's own)
        #[arg(long)]
        objective: Option<u8>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Negotiate compatible contracts for a parity2 game
    Negotiate {
        input: PathBuf,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check a template (JSON) for conflicts
    CheckTemplate {
        input: PathBuf,
        #[arg(long)]
        template: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Round-robin strategy from a template, or from the negotiated contracts
    ExtractStrategy {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        player: u8,
        /// Template JSON; without it the game is negotiated first
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Negotiate, extract both strategies and check them against the oracle
    VerifyProfile {
        input: PathBuf,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Two-robot factory game in parity2 format
    GenFactory {
        x: usize,
        y: usize,
        w: usize,
        c: usize,
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        seed: u64,
        /// Write state-to-cell metadata as JSON here
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Replace a game's objectives with two random ones
    GenObjectives {
        input: PathBuf,
        /// Highest priority
        #[arg(long)]
        m: u32,
        #[arg(long)]
        seed: u64,
    },
    /// Cooperative region by subset enumeration
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = csmkit::verification::BRUTE_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Negotiate a suite of square factory games
    Batch {
        #[arg(long, default_value_t = 3)]
        min_side: usize,
        #[arg(long, default_value_t = 6)]
        max_side: usize,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, value_enum, default_value = "buchi")]
        kind: Kind,
        #[arg(long)]
        sequential: bool,
        /// Add a negotiation-time column (output is then not reproducible)
        #[arg(long)]
        timing: bool,
    },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn internal(e: impl std::fmt::Display) -> Self {
        Failure::Internal(e.to_string())
    }
}

type Run = Result<ExitCode, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path) -> Result<ParsedGame, Failure> {
    let text = read_input(path)?;
    parse_game(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_two(path: &Path) -> Result<TwoObjectiveGame, Failure> {
    match load(path)? {
        ParsedGame::Two(g) => Ok(g),
        ParsedGame::Single { .. } => Err(Failure::Input(format!(
            "{}: expected a parity2 game with two objectives",
            path.display()
        ))),
    }
}

fn player(i: u8) -> Result<Player, Failure> {
    Player::try_from(i).map_err(|_| Failure::Input(format!("player must be 0 or 1, got {i}")))
}

fn emit(value: &impl serde::Serialize) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON output")
    );
}

fn realizable_code(o: &NegotiationOutcome) -> ExitCode {
    if o.winning_region().is_empty() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn solve(input: &Path, who: u8, objective: Option<u8>, format: Format) -> Run {
    let i = player(who)?;
    let parsed = load(input)?;
    let p = match (&parsed, objective) {
        (ParsedGame::Single { priorities, .. }, None | Some(0)) => priorities.clone(),
        (ParsedGame::Single { .. }, Some(k)) => {
            return Err(Failure::Input(format!(
                "single-objective game has no objective {k}"
            )))
        }
        (ParsedGame::Two(g), k) => g.objective(player(k.unwrap_or(who))?).clone(),
    };
    let g = parsed.graph();
    let r = parity_temp(&g.full(), &p, i).map_err(Failure::internal)?;
    match format {
        Format::Json => emit(&json::solve_json(g, i, &r)),
        Format::Text => {
            println!("region: {}", render::set(g, &r.region));
            println!("colive core: {}", render::set(g, &r.colive_core));
            print!("{}", render::template(g, "assumption", &r.csm.assumption));
            print!("{}", render::template(g, "strategy", &r.csm.strategy));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn negotiated(
    game: &TwoObjectiveGame,
    max_iters: Option<usize>,
) -> Result<NegotiationOutcome, Failure> {
    let o = negotiate(&game.graph, &game.p0, &game.p1, max_iters).map_err(Failure::internal)?;
    for r in &o.iterations {
        let (w, _) = r.measure();
        eprintln!(
            "iter {}: |W|={}, |C|={}, conflicts={}",
            r.index,
            w,
            r.joint_core().len(),
            r.conflict_count()
        );
    }
    Ok(o)
}

fn cmd_negotiate(input: &Path, max_iters: Option<usize>, format: Format) -> Run {
    let game = load_two(input)?;
    let g = &game.graph;
    let o = negotiated(&game, max_iters)?;
    match format {
        Format::Json => emit(&json::outcome_json(g, &o)),
        Format::Text => {
            println!("status: {}", o.status.as_str());
            println!("iterations: {}", o.iterations.len());
            println!("winning region: {}", render::set(g, &o.winning_region()));
            for c in &o.csms {
                println!("player {}", c.owner);
                print!("{}", render::template(g, "assumption", &c.assumption));
                print!("{}", render::template(g, "strategy", &c.strategy));
            }
        }
    }
    match o.status {
        Status::Compatible => Ok(realizable_code(&o)),
        s => Err(Failure::Internal(format!(
            "negotiation ended without compatibility: {}",
            s.as_str()
        ))),
    }
}

fn read_template(g: &GameGraph, path: &Path) -> Result<Template, Failure> {
    let text = read_input(path)?;
    let j: json::TemplateJson = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    json::parse_template(g, &j).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_check_template(input: &Path, template: &Path, format: Format) -> Run {
    let parsed = load(input)?;
    let g = parsed.graph();
    let t = read_template(g, template)?;
    let c = check_template(&g.full(), &t);
    match format {
        Format::Json => emit(&json::check_json(g, &c)),
        Format::Text => print!("{}", render::check(g, &c)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_extract(
    input: &Path,
    who: u8,
    template: Option<&Path>,
    max_iters: Option<usize>,
    format: Format,
) -> Run {
    let i = player(who)?;
    let parsed = load(input)?;
    let g = parsed.graph();
    let (s, domain) = match template {
        Some(path) => {
            let t = read_template(g, path)?;
            (extract_strategy(&g.full(), &t, i), g.all_vertices())
        }
        None => {
            let ParsedGame::Two(game) = &parsed else {
                return Err(Failure::Input(
                    "negotiation needs a parity2 game; pass --template".into(),
                ));
            };
            let o = negotiated(game, max_iters)?;
            let t = conjoin(&o.csm(i.opponent()).assumption, &o.csm(i).strategy);
            (extract_strategy(&o.view(g), &t, i), o.live_region.clone())
        }
    };
    let s = s.map_err(Failure::internal)?;
    let owned: Vec<_> = domain.iter().filter(|&v| g.owner(v) == i).collect();
    match format {
        Format::Json => {
            let choices: Vec<_> = owned
                .iter()
                .map(|&v| json!({"vertex": g.label(v), "allowed": json::vertices(g, s.allowed(v).iter().copied())}))
                .collect();
            emit(&json!({"player": who, "choices": choices}));
        }
        Format::Text => {
            for v in owned {
                let next = json::vertices(g, s.allowed(v).iter().copied());
                println!("{} -> {}", g.label(v), next.join(" "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(input: &Path, max_iters: Option<usize>, format: Format) -> Run {
    let game = load_two(input)?;
    let g = &game.graph;
    let o = negotiated(&game, max_iters)?;
    let report = verify_profile_winning(
        g,
        [
            std::slice::from_ref(&game.p0),
            std::slice::from_ref(&game.p1),
        ],
        &o,
    )
    .map_err(Failure::internal)?;
    match format {
        Format::Json => emit(&json::report_json(g, &report)),
        Format::Text => {
            println!(
                "{} sound ({} oracle)",
                render::verdict(report.sound),
                report.oracle
            );
            println!("{} complete", render::verdict(report.complete));
            for v in &report.verdicts {
                let lasso = v.lasso.as_ref().map_or_else(
                    || "-".to_owned(),
                    |l| {
                        let j = json::lasso_json(g, l);
                        format!("{} ({})", j.stem.join(" "), j.cycle.join(" "))
                    },
                );
                println!(
                    "{}: coop={} wins={} play={}",
                    g.label(v.vertex),
                    v.in_coop_region,
                    v.profile_wins,
                    lasso.trim_start()
                );
            }
        }
    }
    if report.exact() {
        Ok(realizable_code(&o))
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_gen_factory(
    x: usize,
    y: usize,
    w: usize,
    c: usize,
    kind: Kind,
    seed: u64,
    sidecar: Option<&Path>,
) -> Run {
    if x < 2 || y < 2 {
        return Err(Failure::Input(
            "maze needs at least 2 columns and 2 rows".into(),
        ));
    }
    let f = maze_to_game(&gen_maze(x, y, w, c, seed), kind.into());
    if let Some(path) = sidecar {
        let text = serde_json::to_string_pretty(&f.meta).expect("JSON output");
        std::fs::write(path, text + "\n")
            .map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))?;
    }
    print!("{}", serialize_game(&ParsedGame::Two(f.game)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen_objectives(input: &Path, m: u32, seed: u64) -> Run {
    if m == 0 {
        return Err(Failure::Input("--m must be at least 1".into()));
    }
    let parsed = load(input)?;
    let g = parsed.graph().clone();
    let p0 = gen_random_objective(&g, m, seed);
    let p1 = gen_random_objective(&g, m, seed.wrapping_add(1));
    let game = TwoObjectiveGame::new(g, p0, p1).map_err(Failure::internal)?;
    print!("{}", serialize_game(&ParsedGame::Two(game)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(input: &Path, cap: usize, format: Format) -> Run {
    let parsed = load(input)?;
    let objectives: Vec<&PriorityFn> = match &parsed {
        ParsedGame::Single { priorities, .. } => vec![priorities],
        ParsedGame::Two(g) => vec![&g.p0, &g.p1],
    };
    let g = parsed.graph();
    let region = brute_coop_all(g, &objectives, cap).map_err(Failure::internal)?;
    match format {
        Format::Json => emit(&json!({"region": json::vertices(g, region.iter())})),
        Format::Text => println!("region: {}", render::set(g, &region)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_batch(
    min_side: usize,
    max_side: usize,
    seeds: u64,
    kind: Kind,
    sequential: bool,
    timing: bool,
) -> Run {
    if min_side < 2 || max_side < min_side {
        return Err(Failure::Input("need 2 <= min-side <= max-side".into()));
    }
    let mode = if sequential {
        Mode::Sequential
    } else {
        Mode::Parallel
    };
    let results = run_batch(mode, &square_suite(min_side, max_side, seeds, kind.into()));
    let mut header =
        "x,y,walls,one_way,seed,vertices,edges,status,iterations,realizable".to_owned();
    if timing {
        header.push_str(",millis");
    }
    println!("{header}");
    let mut failed = false;
    for r in &results {
        let i = r.instance;
        let status = match &r.status {
            Ok(s) => s.as_str().to_owned(),
            Err(e) => {
                failed = true;
                format!("error: {e}")
            }
        };
        failed |= matches!(r.status, Ok(s) if s != Status::Compatible);
        let mut line = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            i.x,
            i.y,
            i.walls,
            i.one_way,
            i.seed,
            r.vertices,
            r.edges,
            status,
            r.iterations,
            r.realizable
        );
        if timing {
            line.push_str(&format!(",{:.3}", r.elapsed.as_secs_f64() * 1e3));
        }
        println!("{line}");
    }
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            input,
            player,
            objective,
            format,
        } => solve(&input, player, objective, format),
        Command::Negotiate {
            input,
            max_iters,
            format,
        } => cmd_negotiate(&input, max_iters, format),
        Command::CheckTemplate {
            input,
            template,
            format,
        } => cmd_check_template(&input, &template, format),
        Command::ExtractStrategy {
            input,
            player,
            template,
            max_iters,
            format,
        } => cmd_extract(&input, player, template.as_deref(), max_iters, format),
        Command::VerifyProfile {
            input,
            max_iters,
            format,
        } => cmd_verify(&input, max_iters, format),
        Command::GenFactory {
            x,
            y,
            w,
            c,
            kind,
            seed,
            sidecar,
        } => cmd_gen_factory(x, y, w, c, kind, seed, sidecar.as_deref()),
        Command::GenObjectives { input, m, seed } => cmd_gen_objectives(&input, m, seed),
        Command::Oracle { input, cap, format } => cmd_oracle(&input, cap, format),
        Command::Batch {
            min_side,
            max_side,
            seeds,
            kind,
            sequential,
            timing,
        } => cmd_batch(min_side, max_side, seeds, kind, sequential, timing),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
