//! Operator command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 protocol abort, 3 transport
//! error.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::adversary::{escape_experiment, EscapeStats};
use crate::ddh::DdhFamily;
use crate::math::OtRng;
use crate::net::{self, NetError, SessionOutcome};
use crate::protocol::{run_local_session, ProtocolConfig};
use crate::residuosity::{DnrFamily, DqrFamily};
use crate::sph::{Amplified, Assumption, Profile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ABORT: i32 = 2;
pub const EXIT_TRANSPORT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "otframe",
    about = "h-out-of-n oblivious transfer over smooth projective hash families",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonOpts {
    /// Number of sender messages.
    #[arg(long)]
    n: usize,
    /// Number of messages the receiver obtains.
    #[arg(long)]
    h: usize,
    /// Cut-and-choose width; defaults to 40 in production, 8 in toy.
    #[arg(long = "k-cut")]
    k_cut: Option<usize>,
    /// Hash family assumption.
    #[arg(long, default_value = "ddh")]
    assumption: String,
    /// Parameter profile (falls back to OTFRAME_PROFILE, then "toy").
    #[arg(long)]
    profile: Option<String>,
    /// Seed for deterministic runs; omitted means OS entropy.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-flow timeout in seconds.
    #[arg(long = "timeout-secs", default_value_t = 30)]
    timeout_secs: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Serve the sender role: listen, run one session, exit.
    Send {
        #[command(flatten)]
        common: CommonOpts,
        /// File with one hex-encoded message per line.
        #[arg(long)]
        messages: String,
        /// Listen address (host:port or tcp:host:port).
        #[arg(long)]
        listen: String,
    },
    /// Run the receiver role against a listening sender.
    Receive {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated 1-based indices of the h messages to fetch.
        #[arg(long)]
        indices: String,
        /// Sender address (host:port or tcp:host:port).
        #[arg(long)]
        connect: String,
        /// Agreed message length in bytes.
        #[arg(long, default_value_t = 16)]
        len: usize,
    },
    /// Local self-play: both roles in one process, printing the retrieved
    /// messages.
    Demo {
        #[command(flatten)]
        common: CommonOpts,
        /// Optional message file; synthesized from the seed when omitted.
        #[arg(long)]
        messages: Option<String>,
        /// Optional selection; drawn from the seed when omitted.
        #[arg(long)]
        indices: Option<String>,
        /// Message length for synthesized messages.
        #[arg(long, default_value_t = 16)]
        len: usize,
    },
    /// Statistical experiments.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Cut-and-choose escape rate for a receiver with d illegal vectors.
    Escape(EscapeArgs),
}

#[derive(Args, Debug)]
struct EscapeArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    h: usize,
    #[arg(long, default_value = "ddh")]
    assumption: String,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug)]
struct Usage(String);

fn parse_profile(explicit: &Option<String>) -> Result<Profile, Usage> {
    let name = match explicit {
        Some(p) => p.clone(),
        None => std::env::var("OTFRAME_PROFILE").unwrap_or_else(|_| "toy".into()),
    };
    name.parse().map_err(Usage)
}

fn parse_assumption(name: &str) -> Result<Assumption, Usage> {
    name.parse().map_err(Usage)
}

fn resolve_k_cut(explicit: Option<usize>, profile: Profile) -> usize {
    explicit.unwrap_or(match profile {
        Profile::Toy => 8,
        Profile::Production => 40,
    })
}

fn parse_indices(csv: &str, cfg: &ProtocolConfig) -> Result<BTreeSet<usize>, Usage> {
    let mut out = BTreeSet::new();
    for part in csv.split(',') {
        let idx: usize = part
            .trim()
            .parse()
            .map_err(|_| Usage(format!("bad index {part:?}")))?;
        if idx < 1 || idx > cfg.n {
            return Err(Usage(format!("index {idx} out of range 1..={}", cfg.n)));
        }
        if !out.insert(idx - 1) {
            return Err(Usage(format!("duplicate index {idx}")));
        }
    }
    if out.len() != cfg.h {
        return Err(Usage(format!(
            "need exactly h = {} indices, got {}",
            cfg.h,
            out.len()
        )));
    }
    Ok(out)
}

fn read_message_file(path: &str) -> Result<Vec<Vec<u8>>, Usage> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Usage(format!("cannot read {path}: {e}")))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bytes =
            hex::decode(line).map_err(|e| Usage(format!("{path}:{}: bad hex: {e}", lineno + 1)))?;
        out.push(bytes);
    }
    if out.is_empty() {
        return Err(Usage(format!("{path}: no messages")));
    }
    let len = out[0].len();
    if out.iter().any(|m| m.len() != len) {
        return Err(Usage(format!(
            "{path}: messages must all have equal length"
        )));
    }
    Ok(out)
}

fn rng_from(seed: Option<u64>) -> OtRng {
    match seed {
        Some(s) => OtRng::seeded(s),
        None => OtRng::from_entropy(),
    }
}

/// Runs `body` with the family type matching the assumption.
macro_rules! with_family {
    ($assumption:expr, $F:ident, $body:block) => {
        match $assumption {
            Assumption::Ddh => {
                type $F = DdhFamily;
                $body
            }
            Assumption::Dnr => {
                type $F = Amplified<DnrFamily>;
                $body
            }
            Assumption::Dqr => {
                type $F = Amplified<DqrFamily>;
                $body
            }
        }
    };
}

fn outcome_exit(outcome: &SessionOutcome) -> i32 {
    match outcome {
        SessionOutcome::Received(_) | SessionOutcome::Sent => EXIT_OK,
        SessionOutcome::LocalAbort(_) | SessionOutcome::PeerAbort => EXIT_ABORT,
    }
}

fn net_exit(err: &NetError) -> i32 {
    match err {
        NetError::Setup(_) => EXIT_USAGE,
        NetError::Transport(_) => EXIT_TRANSPORT,
    }
}

fn strip_tcp(addr: &str) -> Result<String, Usage> {
    match net::parse_endpoint(addr) {
        Ok(net::Endpoint::Tcp(a)) => Ok(a),
        Ok(net::Endpoint::Mem) => Err(Usage(
            "mem: endpoints only make sense for demo self-play".into(),
        )),
        Err(e) => Err(Usage(e)),
    }
}

fn run_send(common: &CommonOpts, messages_path: &str, listen: &str) -> Result<i32, Usage> {
    let profile = parse_profile(&common.profile)?;
    let assumption = parse_assumption(&common.assumption)?;
    let messages = read_message_file(messages_path)?;
    if messages.len() != common.n {
        return Err(Usage(format!(
            "message file holds {} messages, --n is {}",
            messages.len(),
            common.n
        )));
    }
    let cfg = ProtocolConfig {
        n: common.n,
        h: common.h,
        k_cut: resolve_k_cut(common.k_cut, profile),
        msg_len: messages[0].len(),
        profile,
    };
    cfg.validate().map_err(|e| Usage(e.to_string()))?;
    let addr = strip_tcp(listen)?;
    let timeout = Duration::from_secs(common.timeout_secs);
    let mut rng = rng_from(common.seed);
    with_family!(assumption, F, {
        match net::serve_sender_once::<F>(&addr, &cfg, messages, &mut rng, timeout) {
            Ok(report) => {
                report_outcome(&report.outcome, None);
                Ok(outcome_exit(&report.outcome))
            }
            Err(e) => {
                eprintln!("{e}");
                Ok(net_exit(&e))
            }
        }
    })
}

fn run_receive(
    common: &CommonOpts,
    indices: &str,
    connect: &str,
    len: usize,
) -> Result<i32, Usage> {
    let profile = parse_profile(&common.profile)?;
    let assumption = parse_assumption(&common.assumption)?;
    let cfg = ProtocolConfig {
        n: common.n,
        h: common.h,
        k_cut: resolve_k_cut(common.k_cut, profile),
        msg_len: len,
        profile,
    };
    let selection = parse_indices(indices, &cfg)?;
    cfg.validate().map_err(|e| Usage(e.to_string()))?;
    let addr = strip_tcp(connect)?;
    let timeout = Duration::from_secs(common.timeout_secs);
    let mut rng = rng_from(common.seed);
    with_family!(assumption, F, {
        match net::connect_receiver::<F>(&addr, &cfg, &selection, &mut rng, timeout) {
            Ok(report) => {
                report_outcome(&report.outcome, Some(&selection));
                Ok(outcome_exit(&report.outcome))
            }
            Err(e) => {
                eprintln!("{e}");
                Ok(net_exit(&e))
            }
        }
    })
}

fn report_outcome(outcome: &SessionOutcome, selection: Option<&BTreeSet<usize>>) {
    match outcome {
        SessionOutcome::Received(messages) => {
            if let Some(sel) = selection {
                for (idx, msg) in sel.iter().zip(messages) {
                    println!("{}: {}", idx + 1, hex::encode(msg));
                }
            } else {
                for msg in messages {
                    println!("{}", hex::encode(msg));
                }
            }
        }
        SessionOutcome::Sent => eprintln!("session complete"),
        SessionOutcome::LocalAbort(abort) => eprintln!("{abort}"),
        SessionOutcome::PeerAbort => eprintln!("counterpart aborted"),
    }
}

fn run_demo(
    common: &CommonOpts,
    messages_path: &Option<String>,
    indices: &Option<String>,
    len: usize,
) -> Result<i32, Usage> {
    let profile = parse_profile(&common.profile)?;
    let assumption = parse_assumption(&common.assumption)?;
    let seed = common.seed.unwrap_or(0);
    let messages = match messages_path {
        Some(path) => read_message_file(path)?,
        None => {
            let mut rng = OtRng::seeded(seed ^ 0x64656d6f);
            (0..common.n)
                .map(|_| {
                    let mut m = vec![0u8; len];
                    rng.fill(&mut m);
                    m
                })
                .collect()
        }
    };
    if messages.len() != common.n {
        return Err(Usage(format!(
            "message file holds {} messages, --n is {}",
            messages.len(),
            common.n
        )));
    }
    let cfg = ProtocolConfig {
        n: common.n,
        h: common.h,
        k_cut: resolve_k_cut(common.k_cut, profile),
        msg_len: messages[0].len(),
        profile,
    };
    cfg.validate().map_err(|e| Usage(e.to_string()))?;
    let selection = match indices {
        Some(csv) => parse_indices(csv, &cfg)?,
        None => {
            let mut rng = OtRng::seeded(seed ^ 0x73656c65);
            let mut sel = BTreeSet::new();
            while sel.len() < cfg.h {
                sel.insert(rng.index(cfg.n));
            }
            sel
        }
    };
    println!("messages:");
    for (i, m) in messages.iter().enumerate() {
        println!("  {}: {}", i + 1, hex::encode(m));
    }
    println!(
        "selection: {}",
        selection
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    let mut rng = rng_from(common.seed);
    with_family!(assumption, F, {
        match run_local_session::<F>(&cfg, messages, &selection, &mut rng) {
            Ok(session) => match session.outcome {
                Ok(received) => {
                    println!("retrieved:");
                    for (idx, msg) in selection.iter().zip(&received) {
                        println!("  {}: {}", idx + 1, hex::encode(msg));
                    }
                    println!("flows: {}", session.transcript.len());
                    Ok(EXIT_OK)
                }
                Err(abort) => {
                    eprintln!("{abort}");
                    Ok(EXIT_ABORT)
                }
            },
            Err(e) => Err(Usage(e.to_string())),
        }
    })
}

fn run_escape(args: &EscapeArgs) -> Result<i32, Usage> {
    let profile = parse_profile(&args.profile)?;
    let assumption = parse_assumption(&args.assumption)?;
    let cfg = ProtocolConfig {
        n: args.n,
        h: args.h,
        k_cut: args.k,
        msg_len: 16,
        profile,
    };
    cfg.validate().map_err(|e| Usage(e.to_string()))?;
    let started = Instant::now();
    with_family!(assumption, F, {
        let stats: EscapeStats = escape_experiment::<F>(&cfg, args.d, args.trials, args.seed)
            .map_err(|e| Usage(e.to_string()))?;
        println!("{}", EscapeStats::csv_header());
        println!("{}", stats.csv_row());
        eprintln!(
            "overlap {}/{} aborted, {:.1}s",
            stats.overlap_aborts,
            stats.overlap_trials,
            started.elapsed().as_secs_f64()
        );
        Ok(EXIT_OK)
    })
}

/// Parses arguments and runs the requested command, returning the process
/// exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Send {
            common,
            messages,
            listen,
        } => run_send(common, messages, listen),
        Command::Receive {
            common,
            indices,
            connect,
            len,
        } => run_receive(common, indices, connect, *len),
        Command::Demo {
            common,
            messages,
            indices,
            len,
        } => run_demo(common, messages, indices, *len),
        Command::Experiment { which } => match which {
            ExperimentCommand::Escape(args) => run_escape(args),
        },
    };
    match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("usage error: {msg}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_index_counts() {
        let cfg = ProtocolConfig {
            n: 3,
            h: 2,
            k_cut: 8,
            msg_len: 4,
            profile: Profile::Toy,
        };
        assert!(parse_indices("1,2,3", &cfg).is_err());
        assert!(parse_indices("1", &cfg).is_err());
        assert!(parse_indices("0,1", &cfg).is_err());
        assert!(parse_indices("1,1", &cfg).is_err());
        assert_eq!(
            parse_indices("3,1", &cfg).unwrap(),
            [0usize, 2].into_iter().collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(cli_main(["otframe", "frobnicate"]), EXIT_USAGE);
        assert_eq!(
            cli_main([
                "otframe",
                "receive",
                "--indices",
                "1,2,3",
                "--n",
                "3",
                "--h",
                "2",
                "--connect",
                "tcp:127.0.0.1:1"
            ]),
            EXIT_USAGE
        );
        assert_eq!(cli_main(["otframe", "--help"]), EXIT_OK);
    }

    #[test]
    fn demo_runs_end_to_end() {
        assert_eq!(
            cli_main([
                "otframe",
                "demo",
                "--seed",
                "7",
                "--n",
                "4",
                "--h",
                "2",
                "--k-cut",
                "8",
                "--assumption",
                "ddh",
                "--profile",
                "toy",
            ]),
            EXIT_OK
        );
    }
}
