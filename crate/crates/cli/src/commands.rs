use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use entropchain_core::block::HASH_LEN;
use entropchain_core::chainstore::{
    block_size_upper_bound, blocks_per_year, chain_growth_per_year, chain_payload_bytes, load_chain,
    save_chain, GrowthParams, StoreError,
};
use entropchain_core::entropy::{analyze, GrayGrid};
use entropchain_core::eval::{
    classify_one, evaluate_corpus, format_percent, render_tally_table, EvalError, LabeledCorpus,
    Thresholds,
};
use entropchain_core::imaging::{load_image, resize, ImageError, NONCE_IMAGE_SIDE};
use entropchain_core::mining::{
    default_workers, estimate_difficulty, MineError, MiningReport, ParallelMiner, Progress,
    RandomNonceSource, SharedNonceSource,
};
use entropchain_core::{validate_chain, Block, ChainError, DifficultyParams, ImageNonceSource, NoncePolicy};
use serde_json::json;
use thiserror::Error;

use crate::{GrowthArgs, NonceMode, OutputMode, PolicyArgs};

/// Shown nonce prefix length when printing blocks.
const NONCE_PREVIEW_CHARS: usize = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
    #[error("{0}")]
    Io(String),
    #[error("chain invalid: {message}")]
    InvalidChain {
        message: String,
        index: Option<usize>,
        violation: Option<&'static str>,
    },
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Failure(_) | CliError::InvalidChain { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    /// Summary record emitted in `records` mode instead of a success record.
    pub fn record(&self) -> serde_json::Value {
        let mut r = json!({ "ok": false, "exit_code": self.code(), "error": self.to_string() });
        if let CliError::InvalidChain { index, violation, .. } = self {
            r["index"] = json!(index);
            r["violation"] = json!(violation);
        }
        r
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io(_) => CliError::Io(e.to_string()),
            StoreError::CorruptRecord { .. } => CliError::Failure(e.to_string()),
        }
    }
}

impl From<ImageError> for CliError {
    fn from(e: ImageError) -> Self {
        match e {
            ImageError::NotFound(_) | ImageError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::EmptyCorpus(_) => CliError::Failure(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// `1051920000` -> `1,051,920,000`.
pub fn group_thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

fn format_amount(v: f64) -> String {
    if v.fract() == 0.0 && v >= 0.0 && v < u64::MAX as f64 {
        group_thousands(v as u64)
    } else {
        format!("{v:.2}")
    }
}

fn policy_of(args: &PolicyArgs) -> NoncePolicy {
    match args.mode {
        NonceMode::Random => NoncePolicy::Unconstrained,
        NonceMode::Image => NoncePolicy::InterestingImage {
            threshold: args.threshold,
        },
    }
}

fn growth_of(args: &GrowthArgs) -> Result<GrowthParams, CliError> {
    if !(args.interval_minutes.is_finite() && args.interval_minutes > 0.0) {
        return Err(CliError::Usage("--interval-minutes must be positive".into()));
    }
    Ok(GrowthParams {
        image_bytes_per_block: args.image_bytes,
        max_data_bytes: args.max_data_bytes,
        block_interval_minutes: args.interval_minutes,
    })
}

pub struct MineConfig {
    pub chain: PathBuf,
    pub policy: PolicyArgs,
    pub image_dir: Option<PathBuf>,
    pub data: Option<String>,
    pub count: u64,
    pub workers: Option<usize>,
    pub progress_interval: f64,
    pub full_nonce: bool,
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

pub fn mine(out: OutputMode, cfg: &MineConfig) -> Result<(), CliError> {
    let rho = cfg.policy.difficulty;
    // Each base64 character of the hash carries 6 bits.
    let max_rho = (HASH_LEN * 8 / 6) as u32;
    if rho > max_rho {
        return Err(CliError::Usage(format!(
            "difficulty {rho} can never be met; a {}-byte hash has {max_rho} full characters",
            HASH_LEN
        )));
    }
    if !(cfg.progress_interval.is_finite() && cfg.progress_interval > 0.0) {
        return Err(CliError::Usage("--progress-interval must be positive".into()));
    }
    let workers = cfg.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let images = match cfg.policy.mode {
        NonceMode::Random => None,
        NonceMode::Image => {
            let dir = cfg
                .image_dir
                .as_deref()
                .ok_or_else(|| CliError::Usage("--mode image requires --image-dir".into()))?;
            Some(list_images(dir)?)
        }
    };

    let mut chain = if cfg.chain.exists() {
        load_chain(&cfg.chain)?
    } else {
        Vec::new()
    };
    let params = DifficultyParams::new(rho);
    let miner = ParallelMiner::new(params).with_progress_interval(Duration::from_secs_f64(cfg.progress_interval));
    let text = out == OutputMode::Text;
    if text {
        println!(
            "Mining at difficulty order {rho}, which corresponds to a difficulty of {} hashes",
            format_amount(estimate_difficulty(&params))
        );
    }

    let to_mine = if chain.is_empty() { cfg.count + 1 } else { cfg.count };
    let mut mined = 0u64;
    let mut total_hashes = 0u64;
    let mut total_time = Duration::ZERO;
    for _ in 0..to_mine {
        let data = match (&cfg.data, chain.is_empty()) {
            (_, true) => "genesis".to_owned(),
            (Some(d), false) => d.clone(),
            (None, false) => format!("block{}", chain.len()),
        };
        let progress = |p: Progress| {
            if text {
                eprintln!("  {} hashes tried, {:.0} H/s", p.hashes_tried, p.hash_rate());
            }
        };
        let result = match &images {
            None => {
                let sources = (0..workers).map(|_| RandomNonceSource::default()).collect();
                miner.mine(chain.last(), data.as_bytes(), sources, progress)
            }
            Some(paths) => {
                // One pass over the directory per block: each image is one attempt.
                let shared = SharedNonceSource::new(ImageNonceSource::new(paths.clone(), cfg.policy.threshold));
                miner.mine(chain.last(), data.as_bytes(), vec![shared; workers], progress)
            }
        };
        let report: MiningReport = match result {
            Ok(r) => r,
            Err(MineError::SourceExhausted { hashes_tried }) => {
                return Err(CliError::Failure(format!(
                    "nonce source exhausted at height {} after {hashes_tried} hashes; {mined} blocks mined",
                    chain.len()
                )))
            }
        };
        if text {
            println!("{}", report.block.render((!cfg.full_nonce).then_some(NONCE_PREVIEW_CHARS)));
            println!(
                "mined height {} in {} hashes, {:.3}s ({:.0} H/s)",
                report.block.height(),
                report.hashes_tried,
                report.elapsed.as_secs_f64(),
                report.hash_rate()
            );
        }
        total_hashes += report.hashes_tried;
        total_time += report.elapsed;
        mined += 1;
        chain.push(report.block);
        save_chain(&chain, &cfg.chain)?;
    }

    let tip = chain.last().map(Block::height);
    if text {
        println!(
            "{mined} blocks mined, {total_hashes} hashes in {:.3}s; chain {} now has {} blocks",
            total_time.as_secs_f64(),
            cfg.chain.display(),
            chain.len()
        );
    } else {
        println!(
            "{}",
            json!({
                "ok": true,
                "command": "mine",
                "chain": cfg.chain,
                "difficulty": rho,
                "expected_hashes_per_block": estimate_difficulty(&params),
                "blocks_mined": mined,
                "blocks": chain.len(),
                "height": tip,
                "hashes_tried": total_hashes,
                "elapsed_secs": total_time.as_secs_f64(),
                "workers": workers,
            })
        );
    }
    Ok(())
}

pub fn validate(out: OutputMode, path: &Path, policy_args: &PolicyArgs) -> Result<(), CliError> {
    let chain = load_chain(path)?;
    let params = DifficultyParams::new(policy_args.difficulty);
    let policy = policy_of(policy_args);
    match validate_chain(&chain, &params, &policy) {
        Ok(()) => {
            match out {
                OutputMode::Text => println!(
                    "chain valid: {} blocks at difficulty {}, tip height {}",
                    chain.len(),
                    policy_args.difficulty,
                    chain.len() - 1
                ),
                OutputMode::Records => println!(
                    "{}",
                    json!({
                        "ok": true,
                        "command": "validate",
                        "chain": path,
                        "blocks": chain.len(),
                        "difficulty": policy_args.difficulty,
                    })
                ),
            }
            Ok(())
        }
        Err(e) => Err(CliError::InvalidChain {
            message: e.to_string(),
            index: match &e {
                ChainError::Invalid { index, .. } => Some(*index),
                ChainError::Empty => None,
            },
            violation: match &e {
                ChainError::Invalid { violation, .. } => Some(violation.kind()),
                ChainError::Empty => None,
            },
        }),
    }
}

fn map_to_png(grid: &GrayGrid, path: &Path) -> Result<(), CliError> {
    // Entropy values stay below 8 bits; stretch them over the full range.
    let scaled = GrayGrid::from_fn(grid.width(), grid.height(), |r, c| {
        (u32::from(grid.get(r, c)) * 255 / 8).min(255) as u8
    });
    scaled.to_rgb().save(path).map_err(CliError::from)
}

pub fn score(out: OutputMode, image: &Path, export: Option<&Path>) -> Result<(), CliError> {
    let img = resize(&load_image(image)?, NONCE_IMAGE_SIDE, NONCE_IMAGE_SIDE);
    let a = analyze(&img);
    let mut written = Vec::new();
    if let Some(dir) = export {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let stem = image.file_stem().and_then(|s| s.to_str()).unwrap_or("image");
        let luma = dir.join(format!("{stem}_luma.png"));
        a.gray.to_rgb().save(&luma)?;
        let first = dir.join(format!("{stem}_first.png"));
        map_to_png(&a.first.quantized_grid(), &first)?;
        let second = dir.join(format!("{stem}_second.png"));
        map_to_png(&a.second.quantized_grid(), &second)?;
        written = vec![luma, first, second];
    }
    match out {
        OutputMode::Text => {
            println!("{}", a.score());
            for p in &written {
                eprintln!("wrote {}", p.display());
            }
        }
        OutputMode::Records => println!(
            "{}",
            json!({ "ok": true, "command": "score", "image": image, "score": a.score(), "maps": written })
        ),
    }
    Ok(())
}

pub fn classify(out: OutputMode, image: &Path, bottom: u64, top: u64) -> Result<(), CliError> {
    let img = load_image(image)?;
    let (score, label) = classify_one(&img, &Thresholds { bottom, top });
    match out {
        OutputMode::Text => println!("{}\t{score}", label.verdict_text()),
        OutputMode::Records => println!(
            "{}",
            json!({
                "ok": true,
                "command": "classify",
                "image": image,
                "score": score,
                "label": label,
                "bottom_threshold": bottom,
                "top_threshold": top,
            })
        ),
    }
    Ok(())
}

pub fn eval(out: OutputMode, root: &Path, bottom: u64, top: u64) -> Result<(), CliError> {
    let corpus = LabeledCorpus::open(root)?;
    let report = evaluate_corpus(&corpus, &Thresholds { bottom, top })?;
    for f in &report.failures {
        log::warn!("skipped {}/{}: {}", f.expected, f.filename, f.error);
    }
    match out {
        OutputMode::Text => {
            for row in &report.rows {
                println!("{}", row.log_line());
            }
            println!();
            for set in &report.sets {
                println!("{}: {}", set.label, set.log_line());
            }
            println!();
            for set in &report.sets {
                println!("{}\n", render_tally_table(&format!("{} images", set.label), &set.tally));
            }
            println!("{}", render_tally_table("all images", &report.totals));
        }
        OutputMode::Records => println!(
            "{}",
            json!({
                "ok": true,
                "command": "eval",
                "root": root,
                "images": report.rows.len(),
                "accuracy": format_percent(report.totals.accuracy()),
                "totals": report.totals,
                "sets": report.sets,
                "false_negatives": report.false_negatives().count(),
                "false_positives": report.false_positives().count(),
                "failures": report.failures,
            })
        ),
    }
    Ok(())
}

pub fn growth(out: OutputMode, args: &GrowthArgs) -> Result<(), CliError> {
    let params = growth_of(args)?;
    let bound = block_size_upper_bound(&params);
    let per_year = blocks_per_year(&params);
    let growth = chain_growth_per_year(&params);
    match out {
        OutputMode::Text => {
            println!(
                "block size upper bound: {} bytes ({} image + {} data)",
                group_thousands(bound),
                group_thousands(params.image_bytes_per_block),
                group_thousands(params.max_data_bytes)
            );
            println!("blocks per year: {}", format_amount(per_year));
            println!("chain growth: {} bytes/year", format_amount(growth));
        }
        OutputMode::Records => println!(
            "{}",
            json!({
                "ok": true,
                "command": "growth",
                "block_size_upper_bound": bound,
                "blocks_per_year": per_year,
                "bytes_per_year": growth,
            })
        ),
    }
    Ok(())
}

pub fn info(out: OutputMode, path: &Path, args: &GrowthArgs) -> Result<(), CliError> {
    let params = growth_of(args)?;
    let chain = load_chain(path)?;
    let file_bytes = fs::metadata(path).map_err(|e| io_err(path, e))?.len();
    let payload = chain_payload_bytes(&chain);
    let height = chain.len() as u64 - 1;
    let growth = chain_growth_per_year(&params);
    match out {
        OutputMode::Text => {
            println!("chain: {}", path.display());
            println!("height: {height} ({} blocks)", chain.len());
            println!("payload bytes: {}", group_thousands(payload));
            println!("file bytes: {}", group_thousands(file_bytes));
            println!("projected growth: {} bytes/year", format_amount(growth));
        }
        OutputMode::Records => println!(
            "{}",
            json!({
                "ok": true,
                "command": "info",
                "chain": path,
                "height": height,
                "blocks": chain.len(),
                "payload_bytes": payload,
                "file_bytes": file_bytes,
                "bytes_per_year": growth,
            })
        ),
    }
    Ok(())
}
