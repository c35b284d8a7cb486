//! `chainbank`: build per-root derivational trees from rule tables plus a
//! lexicon, evaluate them against gold trees, and query chains.
//!
//! Exit codes: 0 success, 1 usage error or lookup miss, 2 validation failure
//! (including builds that completed with quarantined lexicon lines).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use chainbank::eval::load_gold;
use chainbank::network::{
    compile, expand_affixational, expand_semantic_spec, load_affix_rules, load_canonical,
    load_semspec_rules,
};
use chainbank::{
    build_bank, diff_trees, evaluate, run_with_threads, AbstractNetwork, Alphabet, Bank,
    BuildOptions, EvalOptions, FamilyTree, LexiconLoad,
};

#[derive(Parser)]
#[command(
    name = "chainbank",
    version,
    about = "Build and evaluate Arabic derivational chain banks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Transliteration alphabet table (symbol<TAB>class).
    #[arg(long)]
    alphabet: PathBuf,
    /// Canonical pattern table.
    #[arg(long)]
    canonical: PathBuf,
    /// Derivational affix rules.
    #[arg(long)]
    affix_rules: PathBuf,
    /// Semantic-specification rules.
    #[arg(long)]
    semspec_rules: PathBuf,
    /// Lexicon, JSON Lines with one lemma per line.
    #[arg(long)]
    lexicon: PathBuf,
    /// Force-attach disconnected lemmas to the root with an unknown relation.
    #[arg(long)]
    attach_orphans: bool,
    /// Worker threads for family construction (default: rayon's choice).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the bank: per-root tree JSON, a flat relation TSV, and stats.
    Build {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Build (in memory) and score against gold trees.
    Evaluate {
        #[command(flatten)]
        inputs: InputArgs,
        /// Gold trees: a directory of per-root .json files or a single file.
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
        /// Match on parent lemma alone, ignoring relation labels.
        #[arg(long)]
        parent_only_eval: bool,
        /// Count duplicated lemmas as multiple-correct only with exactly one
        /// matching relation.
        #[arg(long)]
        strict_multiple: bool,
    },
    /// Print every chain path leading to a lemma (or a bare root).
    Query {
        /// Directory holding a built bank (the build's --output-dir).
        #[arg(long)]
        output_dir: PathBuf,
        /// A lemma or a dotted root.
        query: String,
    },
    /// Print the stats of a built bank.
    Stats {
        #[arg(long)]
        output_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap's default exit code for bad usage is 2; this tool reserves
            // 2 for validation failures.
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Build { inputs, output_dir } => cmd_build(&inputs, &output_dir),
        Command::Evaluate {
            inputs,
            gold,
            output_dir,
            parent_only_eval,
            strict_multiple,
        } => cmd_evaluate(&inputs, &gold, &output_dir, parent_only_eval, strict_multiple),
        Command::Query { output_dir, query } => cmd_query(&output_dir, &query),
        Command::Stats { output_dir } => cmd_stats(&output_dir),
    }
}

struct Loaded {
    alphabet: Alphabet,
    network: AbstractNetwork,
    lexicon: LexiconLoad,
}

/// Fail-fast loading: every input must parse before anything is written.
fn load_inputs(inputs: &InputArgs) -> Result<Loaded> {
    let alphabet = Alphabet::load(&inputs.alphabet).context("alphabet")?;
    let canonical = load_canonical(&inputs.canonical, &alphabet).context("canonical table")?;
    let affix = load_affix_rules(&inputs.affix_rules, &alphabet).context("affix rules")?;
    let semspec = load_semspec_rules(&inputs.semspec_rules).context("semantic-spec rules")?;
    let draft = expand_affixational(&canonical, &affix, &alphabet)?;
    let draft = expand_semantic_spec(&draft, &semspec, &alphabet)?;
    let network = compile(draft)?;
    let templates = network.templates();
    let lexicon =
        chainbank::load_lexicon(&inputs.lexicon, &alphabet, &templates).context("lexicon")?;
    Ok(Loaded {
        alphabet,
        network,
        lexicon,
    })
}

fn build_loaded(inputs: &InputArgs, loaded: &Loaded) -> Bank {
    let options = BuildOptions {
        attach_orphans: inputs.attach_orphans,
    };
    let entries = loaded.lexicon.entries.clone();
    run_with_threads(inputs.threads, || {
        build_bank(entries, &loaded.network, &loaded.alphabet, options)
    })
    .with_quarantined(loaded.lexicon.quarantined.len())
}

fn write_bank(bank: &Bank, quarantined: &[chainbank::Quarantined], dir: &Path) -> Result<()> {
    let trees_dir = dir.join("trees");
    fs::create_dir_all(&trees_dir)
        .with_context(|| format!("creating {}", trees_dir.display()))?;
    for tree in &bank.trees {
        let path = trees_dir.join(format!("{}.json", tree.root.dotted()));
        fs::write(&path, tree.to_json_string())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    fs::write(dir.join("relations.tsv"), bank.relations_tsv())?;
    let mut stats = serde_json::to_string_pretty(&bank.stats)?;
    stats.push('\n');
    fs::write(dir.join("stats.json"), stats)?;
    if !quarantined.is_empty() {
        let mut report = String::from("# line\tlemma\treason\n");
        for q in quarantined {
            report.push_str(&format!("{}\t{}\t{}\n", q.line, q.lemma, q.reason));
        }
        fs::write(dir.join("quarantine.tsv"), report)?;
    }
    Ok(())
}

fn cmd_build(inputs: &InputArgs, output_dir: &Path) -> Result<ExitCode> {
    let loaded = load_inputs(inputs)?;
    let bank = build_loaded(inputs, &loaded);
    write_bank(&bank, &loaded.lexicon.quarantined, output_dir)?;
    fs::write(output_dir.join("network.json"), loaded.network.to_json_string())?;
    println!("network: {}", loaded.network.describe());
    println!(
        "built {} trees over {} lemmas: {} detected ({}%), {} relations",
        bank.stats.root_count,
        bank.stats.lemma_count,
        bank.stats.detected_lemma_count,
        bank.stats.detected_pct,
        bank.stats.relation_count
    );
    if !loaded.lexicon.quarantined.is_empty() {
        eprintln!(
            "{} lexicon line(s) quarantined; see {}",
            loaded.lexicon.quarantined.len(),
            output_dir.join("quarantine.tsv").display()
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_evaluate(
    inputs: &InputArgs,
    gold_path: &Path,
    output_dir: &Path,
    parent_only: bool,
    strict_multiple: bool,
) -> Result<ExitCode> {
    let loaded = load_inputs(inputs)?;
    let gold = load_gold(gold_path)?;
    let bank = build_loaded(inputs, &loaded);

    let predicted_roots: Vec<String> = bank.trees.iter().map(|t| t.root.dotted()).collect();
    let gold_roots: Vec<String> = gold.iter().map(|t| t.root.dotted()).collect();
    let mut mismatches = Vec::new();
    for root in &gold_roots {
        if !predicted_roots.contains(root) {
            mismatches.push(format!("gold root {root} has no predicted tree"));
        }
    }
    for root in &predicted_roots {
        if !gold_roots.contains(root) {
            mismatches.push(format!("predicted root {root} has no gold tree"));
        }
    }

    let options = EvalOptions {
        parent_only,
        strict_multiple,
    };
    let report = evaluate(&bank.trees, &gold, options)?;

    fs::create_dir_all(output_dir)?;
    let mut text = report.text_table();
    if !mismatches.is_empty() {
        text.push('\n');
        for m in &mismatches {
            text.push_str(m);
            text.push('\n');
        }
    }
    // Per-root deltas for debugging the rule tables.
    for gold_tree in &gold {
        let Some(tree) = bank
            .trees
            .iter()
            .find(|t| t.root == gold_tree.root)
        else {
            continue;
        };
        let delta = diff_trees(tree, gold_tree)?;
        if !delta.is_empty() {
            text.push_str(&format!("\n[{}]\n{delta}", gold_tree.root.dotted()));
        }
    }
    fs::write(output_dir.join("eval_report.txt"), &text)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(output_dir.join("eval_report.json"), json)?;

    print!("{text}");
    println!("detected / single / multiple / none: {}", report.percent_summary());
    Ok(ExitCode::SUCCESS)
}

fn load_trees(output_dir: &Path) -> Result<Vec<FamilyTree>> {
    let trees_dir = output_dir.join("trees");
    if !trees_dir.is_dir() {
        bail!("no built bank under {} (run `build` first)", output_dir.display());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&trees_dir)?
        .filter_map(|r| r.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    let mut trees = Vec::new();
    for file in files {
        let text = fs::read_to_string(&file)?;
        let tree: FamilyTree = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", file.display()))?;
        trees.push(tree);
    }
    Ok(trees)
}

/// Walks parent links from a node up to the family root and renders the
/// chain left to right with its relation labels.
fn path_to(tree: &FamilyTree, node_id: &str) -> String {
    let mut hops = Vec::new();
    let mut cursor = node_id.to_string();
    let root_id = tree.root_node_id();
    while cursor != root_id {
        let Some(edge) = tree.edges.iter().find(|e| e.child == cursor) else {
            break;
        };
        let lemma = tree
            .node(&cursor)
            .map(|n| n.lemma.to_string())
            .unwrap_or_else(|| cursor.clone());
        hops.push((edge.relation, lemma));
        cursor = edge.parent.clone();
    }
    let mut out = root_id;
    for (relation, lemma) in hops.into_iter().rev() {
        out.push_str(&format!(" →({relation}) {lemma}"));
    }
    out
}

fn cmd_query(output_dir: &Path, query: &str) -> Result<ExitCode> {
    let trees = load_trees(output_dir)?;
    let mut printed = 0usize;
    for tree in &trees {
        if tree.root.dotted() == query {
            println!("{}", tree.root.dotted());
            printed += 1;
            continue;
        }
        for node in &tree.nodes {
            if node.lemma.as_str() == query && node.entry_ref.is_some() {
                println!("{}", path_to(tree, &node.node_id));
                printed += 1;
            }
        }
    }
    if printed == 0 {
        eprintln!("not found: {query}");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(output_dir: &Path) -> Result<ExitCode> {
    let path = output_dir.join("stats.json");
    if !path.is_file() {
        eprintln!("no stats at {} (run `build` first)", path.display());
        return Ok(ExitCode::from(1));
    }
    let stats: chainbank::BankStats = serde_json::from_str(&fs::read_to_string(&path)?)?;
    println!("roots               {}", stats.root_count);
    println!("lemmas              {}", stats.lemma_count);
    println!("detected lemmas     {} ({}%)", stats.detected_lemma_count, stats.detected_pct);
    println!("relations           {}", stats.relation_count);
    println!("quarantined         {}", stats.quarantined_count);
    Ok(ExitCode::SUCCESS)
}
