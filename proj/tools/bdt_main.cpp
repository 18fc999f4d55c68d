#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bdt/averaging.hpp"
#include "bdt/dataset.hpp"
#include "bdt/diagnostics.hpp"
#include "bdt/manifest.hpp"
#include "bdt/sampler.hpp"

namespace fs = std::filesystem;

namespace {

struct RunFlags {
  std::string data;
  std::string label_column;
  std::string strategy = "sweeping";
  std::string rule_mode = "auto";
  std::string moves = "0.1,0.1,0.1,0.7";
  std::string chipman;
  long long pmin = 5;
  long burnin = 50000;
  long post = 10000;
  int thin = 7;
  double alpha = 1.0;
  double sigma_frac = 0.1;
  int max_terminals = 0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

std::vector<double> parse_doubles(const std::string& csv, std::size_t expect,
                                  const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  if (out.size() != expect)
    throw std::invalid_argument(flag + " expects " + std::to_string(expect) +
                                " comma-separated values");
  return out;
}

bdt::Strategy parse_strategy(const std::string& name) {
  if (name == "standard") return bdt::Strategy::standard;
  if (name == "sweeping") return bdt::Strategy::sweeping;
  throw std::invalid_argument("--strategy must be standard or sweeping");
}

bdt::SamplerConfig make_config(const RunFlags& f, const std::string& strategy) {
  bdt::SamplerConfig cfg;
  const auto probs = parse_doubles(f.moves, 4, "--moves");
  cfg.moves.p_birth = probs[0];
  cfg.moves.p_death = probs[1];
  cfg.moves.p_change_split = probs[2];
  cfg.moves.p_change_rule = probs[3];
  cfg.moves.p_min = f.pmin;
  cfg.moves.sigma_fraction = f.sigma_frac;
  cfg.strategy = parse_strategy(strategy);
  std::string mode = f.rule_mode;
  if (mode == "auto") mode = (cfg.strategy == bdt::Strategy::standard) ? "discrete" : "continuous";
  if (mode == "discrete") {
    cfg.moves.rule_mode = bdt::RuleProposalMode::discrete_observed;
  } else if (mode == "continuous") {
    cfg.moves.rule_mode = bdt::RuleProposalMode::continuous_root_range;
  } else {
    throw std::invalid_argument("--rule-mode must be auto, discrete or continuous");
  }
  cfg.burn_in = f.burnin;
  cfg.post_burn_in = f.post;
  cfg.thin = f.thin;
  cfg.seed = f.seed;
  cfg.alpha = f.alpha;
  cfg.max_terminals = f.max_terminals;
  if (!f.chipman.empty()) {
    const auto cd = parse_doubles(f.chipman, 2, "--chipman");
    cfg.chipman.gamma = cd[0];
    cfg.chipman.delta = cd[1];
    cfg.chipman.enabled = true;
  }
  cfg.validate();
  return cfg;
}

void fill_config_manifest(bdt::RunManifest& mf, const bdt::SamplerConfig& cfg) {
  mf.set("tool_version", std::string(bdt::kToolVersion));
  mf.set("strategy", bdt::to_string(cfg.strategy));
  mf.set("moves.p_birth", cfg.moves.p_birth);
  mf.set("moves.p_death", cfg.moves.p_death);
  mf.set("moves.p_change_split", cfg.moves.p_change_split);
  mf.set("moves.p_change_rule", cfg.moves.p_change_rule);
  mf.set("moves.p_min", static_cast<long long>(cfg.moves.p_min));
  mf.set("moves.sigma_fraction", cfg.moves.sigma_fraction);
  mf.set("moves.rule_mode",
         cfg.moves.rule_mode == bdt::RuleProposalMode::discrete_observed
             ? std::string("discrete")
             : std::string("continuous"));
  mf.set("burn_in", static_cast<long long>(cfg.burn_in));
  mf.set("post_burn_in", static_cast<long long>(cfg.post_burn_in));
  mf.set("thin", cfg.thin);
  mf.set("seed", cfg.seed);
  mf.set("alpha", cfg.alpha);
  mf.set("max_terminals", cfg.max_terminals);
  mf.set("chipman.enabled", cfg.chipman.enabled ? 1 : 0);
  if (cfg.chipman.enabled) {
    mf.set("chipman.gamma", cfg.chipman.gamma);
    mf.set("chipman.delta", cfg.chipman.delta);
  }
}

int cmd_gen_xor3(int n, std::uint64_t seed, const std::string& out) {
  const bdt::Dataset ds = bdt::generate_xor3(n, seed);
  if (const fs::path dir = fs::path(out).parent_path(); !dir.empty())
    fs::create_directories(dir);
  bdt::write_csv(ds, out);
  bdt::RunManifest mf;
  mf.set("tool_version", std::string(bdt::kToolVersion));
  mf.set("command", std::string("gen-xor3"));
  mf.set("n", n);
  mf.set("seed", seed);
  mf.set("out", out);
  mf.set("out.digest", bdt::file_digest(out));
  mf.write(out + ".manifest");
  std::cout << "wrote " << out << " (" << ds.n() << " rows, " << ds.m()
            << " features, " << ds.class_count() << " classes)\n";
  return 0;
}

int cmd_run(const RunFlags& f) {
  const bdt::Dataset ds = bdt::load_csv(f.data, f.label_column);
  const bdt::SamplerConfig cfg = make_config(f, f.strategy);
  fs::create_directories(f.out_dir);

  const bdt::ChainResult result = bdt::run_chain(ds, cfg);

  const std::string chain_path = (fs::path(f.out_dir) / "chain.trees").string();
  const std::string trace_path = (fs::path(f.out_dir) / "trace.csv").string();
  {
    std::ofstream chain_os(chain_path);
    bdt::write_chain(result.samples, chain_os);
    std::ofstream trace_os(trace_path);
    bdt::write_trace_csv(result.trace, trace_os);
  }

  bdt::RunManifest mf;
  fill_config_manifest(mf, cfg);
  mf.set("command", std::string("run"));
  mf.set("data", f.data);
  mf.set("data.digest", bdt::file_digest(f.data));
  mf.set("out.chain", chain_path);
  mf.set("out.chain.digest", bdt::file_digest(chain_path));
  mf.set("out.trace", trace_path);
  mf.set("out.trace.digest", bdt::file_digest(trace_path));
  mf.set("retained_samples", static_cast<long long>(result.samples.size()));
  mf.set("acceptance.burn_in", result.acceptance_burn_in);
  mf.set("acceptance.post", result.acceptance_post);
  mf.write((fs::path(f.out_dir) / "run.manifest").string());

  double mean_k = 0.0;
  for (const auto& s : result.samples) mean_k += s.tree.terminal_count();
  mean_k /= static_cast<double>(result.samples.size());
  std::cout << "retained " << result.samples.size() << " samples; acceptance burn-in "
            << result.acceptance_burn_in << ", post " << result.acceptance_post
            << "; mean terminals " << mean_k << "\n";
  return 0;
}

int cmd_cv(const RunFlags& f, int folds, int jobs, const std::string& strategy_flag) {
  const bdt::Dataset ds = bdt::load_csv(f.data, f.label_column);
  const bdt::FoldSplit split = bdt::make_folds(ds, folds, f.seed);
  fs::create_directories(f.out_dir);
  const std::string dataset_name = fs::path(f.data).stem().string();
  const std::string results_path = (fs::path(f.out_dir) / "results.csv").string();

  std::vector<std::string> strategies;
  if (strategy_flag == "both") {
    strategies = {"standard", "sweeping"};
  } else {
    strategies = {strategy_flag};
  }

  std::ofstream os(results_path);
  bool header = true;
  for (const std::string& strat : strategies) {
    const bdt::SamplerConfig cfg = make_config(f, strat);
    const bdt::CvSummary summary = bdt::cross_validate(ds, split, cfg, jobs);
    bdt::write_cv_csv(summary, dataset_name, strat, os, header);
    header = false;
    std::cout << strat << ": accuracy " << summary.accuracy_mean << " +/- "
              << summary.accuracy_2sigma << ", entropy/fold " << summary.entropy_mean
              << " +/- " << summary.entropy_2sigma << ", split nodes "
              << summary.split_nodes_mean << " +/- " << summary.split_nodes_2sigma
              << ", total nodes " << summary.total_nodes_mean << " +/- "
              << summary.total_nodes_2sigma << "\n";
  }
  os.close();

  bdt::RunManifest mf;
  fill_config_manifest(mf, make_config(f, strategies.front()));
  mf.set("command", std::string("cv"));
  mf.set("strategy", strategy_flag);
  mf.set("data", f.data);
  mf.set("data.digest", bdt::file_digest(f.data));
  mf.set("folds", folds);
  mf.set("jobs", jobs);
  mf.set("out.results", results_path);
  mf.set("out.results.digest", bdt::file_digest(results_path));
  mf.write((fs::path(f.out_dir) / "cv.manifest").string());
  return 0;
}

int cmd_emulate(const bdt::EmulatorConfig& cfg, const std::string& out) {
  const bdt::MoveFrequencies realized = bdt::emulate_moves(cfg);
  if (out.empty()) {
    bdt::write_frequencies_csv(cfg, realized, std::cout);
  } else {
    if (const fs::path dir = fs::path(out).parent_path(); !dir.empty())
      fs::create_directories(dir);
    std::ofstream os(out);
    bdt::write_frequencies_csv(cfg, realized, os);
    os.close();
    bdt::RunManifest mf;
    mf.set("tool_version", std::string(bdt::kToolVersion));
    mf.set("command", std::string("emulate"));
    mf.set("p_birth", cfg.p_birth);
    mf.set("p_death", cfg.p_death);
    mf.set("p_change", cfg.p_change);
    mf.set("p_birth_unavailable", cfg.p_birth_unavailable);
    mf.set("p_change_unavailable", cfg.p_change_unavailable);
    mf.set("case3_fraction", cfg.case3_fraction);
    mf.set("mode", cfg.mode == bdt::EmulatorMode::standard ? std::string("standard")
                                                           : std::string("sweeping"));
    mf.set("trials", static_cast<long long>(cfg.trials));
    mf.set("seed", cfg.seed);
    mf.set("out", out);
    mf.set("out.digest", bdt::file_digest(out));
    mf.write(out + ".manifest");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian decision-tree averaging via reversible-jump MCMC"};
  app.require_subcommand(1);

  // gen-xor3
  int gen_n = 1000;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "xor3.csv";
  CLI::App* gen = app.add_subcommand("gen-xor3", "generate the synthetic XOR dataset");
  gen->add_option("--n", gen_n, "number of rows")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "output CSV path");

  // run
  RunFlags rf;
  CLI::App* run = app.add_subcommand("run", "run one chain and persist samples + trace");
  run->add_option("--data", rf.data, "training CSV")->required();
  run->add_option("--label-column", rf.label_column, "label column name (default: last)");
  run->add_option("--strategy", rf.strategy, "standard|sweeping")
      ->check(CLI::IsMember({"standard", "sweeping"}));
  run->add_option("--rule-mode", rf.rule_mode, "auto|discrete|continuous")
      ->check(CLI::IsMember({"auto", "discrete", "continuous"}));
  run->add_option("--pmin", rf.pmin, "minimum points per partition")->check(CLI::PositiveNumber);
  run->add_option("--moves", rf.moves, "birth,death,change-split,change-rule probabilities");
  run->add_option("--burnin", rf.burnin, "burn-in iterations")->check(CLI::NonNegativeNumber);
  run->add_option("--post", rf.post, "post burn-in iterations")->check(CLI::PositiveNumber);
  run->add_option("--thin", rf.thin, "retain every thin-th post state")->check(CLI::PositiveNumber);
  run->add_option("--alpha", rf.alpha, "symmetric Dirichlet concentration");
  run->add_option("--sigma-frac", rf.sigma_frac, "change-rule step as a fraction of range");
  run->add_option("--chipman", rf.chipman, "gamma,delta to enable the depth prior");
  run->add_option("--max-terminals", rf.max_terminals, "terminal cap (0: n-1)");
  run->add_option("--seed", rf.seed, "RNG seed");
  run->add_option("--out-dir", rf.out_dir, "output directory");

  // cv
  RunFlags cf;
  int folds = 5, jobs = 1;
  std::string cv_strategy = "both";
  CLI::App* cv = app.add_subcommand("cv", "cross-validated comparison");
  cv->add_option("--data", cf.data, "dataset CSV")->required();
  cv->add_option("--label-column", cf.label_column, "label column name (default: last)");
  cv->add_option("--folds", folds, "fold count")->check(CLI::Range(2, 1 << 20));
  cv->add_option("--jobs", jobs, "concurrent fold workers")->check(CLI::PositiveNumber);
  cv->add_option("--strategy", cv_strategy, "standard|sweeping|both")
      ->check(CLI::IsMember({"standard", "sweeping", "both"}));
  cv->add_option("--rule-mode", cf.rule_mode, "auto|discrete|continuous")
      ->check(CLI::IsMember({"auto", "discrete", "continuous"}));
  cv->add_option("--pmin", cf.pmin, "minimum points per partition")->check(CLI::PositiveNumber);
  cv->add_option("--moves", cf.moves, "birth,death,change-split,change-rule probabilities");
  cv->add_option("--burnin", cf.burnin, "burn-in iterations")->check(CLI::NonNegativeNumber);
  cv->add_option("--post", cf.post, "post burn-in iterations")->check(CLI::PositiveNumber);
  cv->add_option("--thin", cf.thin, "retain every thin-th post state")->check(CLI::PositiveNumber);
  cv->add_option("--alpha", cf.alpha, "symmetric Dirichlet concentration");
  cv->add_option("--sigma-frac", cf.sigma_frac, "change-rule step as a fraction of range");
  cv->add_option("--chipman", cf.chipman, "gamma,delta to enable the depth prior");
  cv->add_option("--seed", cf.seed, "RNG seed");
  cv->add_option("--out-dir", cf.out_dir, "output directory");

  // emulate
  bdt::EmulatorConfig ec;
  ec.trials = 1000000;
  std::string em_mode = "standard";
  std::string em_out;
  CLI::App* em = app.add_subcommand("emulate", "move-frequency distortion emulator");
  em->add_option("--pb", ec.p_birth, "birth probability");
  em->add_option("--pd", ec.p_death, "death probability");
  em->add_option("--pc", ec.p_change, "change probability");
  em->add_option("--pbu", ec.p_birth_unavailable, "unavailable-birth mass");
  em->add_option("--pcu", ec.p_change_unavailable, "unavailable-change mass");
  em->add_option("--case3", ec.case3_fraction, "fraction of unavailable changes resampled");
  em->add_option("--mode", em_mode, "standard|sweeping")
      ->check(CLI::IsMember({"standard", "sweeping"}));
  em->add_option("--trials", ec.trials, "completed moves to draw")->check(CLI::PositiveNumber);
  em->add_option("--seed", ec.seed, "RNG seed");
  em->add_option("--out", em_out, "output CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_xor3(gen_n, gen_seed, gen_out);
    if (run->parsed()) return cmd_run(rf);
    if (cv->parsed()) return cmd_cv(cf, folds, jobs, cv_strategy);
    if (em->parsed()) {
      ec.mode = (em_mode == "standard") ? bdt::EmulatorMode::standard
                                        : bdt::EmulatorMode::sweeping;
      return cmd_emulate(ec, em_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
