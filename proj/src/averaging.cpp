#include "bdt/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace bdt {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Sample mean and 2 * sample standard deviation.
std::pair<double, double> mean_2sigma(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, 2.0 * std::sqrt(ss / (n - 1.0))};
}

// Training splits must contain every class; redraw stratified folds if not.
FoldSplit ensure_trainable_folds(const Dataset& ds, const FoldSplit& folds) {
  const int k = folds.fold_count;
  std::vector<std::vector<long long>> fold_class(k,
      std::vector<long long>(ds.class_count(), 0));
  std::vector<long long> totals(ds.class_count(), 0);
  for (int i = 0; i < ds.n(); ++i) {
    ++fold_class[folds.assignment[i]][ds.label(i) - 1];
    ++totals[ds.label(i) - 1];
  }
  bool ok = true;
  for (int f = 0; f < k && ok; ++f)
    for (int c = 0; c < ds.class_count() && ok; ++c)
      if (totals[c] - fold_class[f][c] == 0) ok = false;
  if (ok) return folds;

  std::cerr << "warning: a training split lost a class; re-stratifying folds\n";
  for (long long c : totals)
    if (c < 2)
      throw std::invalid_argument(
          "cross_validate: a class has fewer than 2 members, no training split can keep it");

  // Deal the shuffled rows class by class onto one rotating fold counter:
  // fold sizes stay near-equal and every class lands in at least two folds.
  FoldSplit out;
  out.fold_count = k;
  out.seed = folds.seed;
  out.assignment.assign(ds.n(), 0);
  std::vector<int> order(ds.n());
  for (int i = 0; i < ds.n(); ++i) order[i] = i;
  std::mt19937_64 rng(folds.seed ^ 0x5bf03635ULL);
  std::shuffle(order.begin(), order.end(), rng);
  int slot = 0;
  for (int cls = 1; cls <= ds.class_count(); ++cls) {
    for (int row : order) {
      if (ds.label(row) != cls) continue;
      out.assignment[row] = slot;
      slot = (slot + 1) % k;
    }
  }
  return out;
}

}  // namespace

PredictionResult predict(const std::vector<ChainSample>& samples,
                         const DirichletPrior& prior, const Dataset& test) {
  if (samples.empty()) throw std::invalid_argument("predict: empty chain");
  const int t = test.n();
  const int c = test.class_count();
  if (static_cast<int>(prior.alpha.size()) != c)
    throw std::invalid_argument("predict: prior dimension mismatch");

  PredictionResult res;
  res.posterior.assign(t, std::vector<double>(c, 0.0));
  const double weight = 1.0 / static_cast<double>(samples.size());
  for (const ChainSample& s : samples) {
    for (int i = 0; i < t; ++i) {
      const int leaf = s.tree.route(test.row(i));
      const std::vector<double> phi =
          terminal_class_posterior(s.tree.node(leaf).class_counts, prior);
      if (static_cast<int>(phi.size()) != c)
        throw std::invalid_argument("predict: sample class dimension mismatch");
      for (int j = 0; j < c; ++j) res.posterior[i][j] += weight * phi[j];
    }
  }

  res.predicted.resize(t);
  int correct = 0;
  for (int i = 0; i < t; ++i) {
    int best = 0;
    for (int j = 1; j < c; ++j)
      if (res.posterior[i][j] > res.posterior[i][best]) best = j;
    res.predicted[i] = best + 1;
    if (res.predicted[i] == test.label(i)) ++correct;
  }
  res.accuracy = static_cast<double>(correct) / t;
  res.entropy_sum = entropy(res.posterior);
  return res;
}

double entropy(const std::vector<std::vector<double>>& posterior) {
  double e = 0.0;
  for (const auto& row : posterior) {
    for (double p : row) {
      if (p < 0.0) throw std::invalid_argument("entropy: negative probability");
      if (p > 0.0) e -= p * std::log(p);
    }
  }
  return e;
}

CvSummary cross_validate(const Dataset& ds, const FoldSplit& folds,
                         const SamplerConfig& cfg, int jobs) {
  if (folds.fold_count < 2) throw std::invalid_argument("cross_validate: need >= 2 folds");
  if (static_cast<int>(folds.assignment.size()) != ds.n())
    throw std::invalid_argument("cross_validate: fold assignment length mismatch");
  const FoldSplit use = ensure_trainable_folds(ds, folds);
  const int nf = use.fold_count;

  CvSummary summary;
  summary.folds.resize(nf);

  std::mutex fold_mutex;
  int next_fold = 0;
  auto worker = [&] {
    for (;;) {
      int f;
      {
        std::lock_guard<std::mutex> lock(fold_mutex);
        if (next_fold >= nf) return;
        f = next_fold++;
      }
      std::vector<int> train_rows, test_rows;
      for (int i = 0; i < ds.n(); ++i)
        (use.assignment[i] == f ? test_rows : train_rows).push_back(i);
      const Dataset train = ds.subset(train_rows);
      const Dataset test = ds.subset(test_rows);

      SamplerConfig fold_cfg = cfg;
      fold_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(f));
      const ChainResult chain = run_chain(train, fold_cfg);
      const DirichletPrior prior = fold_cfg.dirichlet(ds.class_count());
      const PredictionResult pred = predict(chain.samples, prior, test);

      FoldOutcome out;
      out.fold = f;
      out.accuracy = pred.accuracy;
      out.entropy = pred.entropy_sum;
      double splits = 0.0, totals = 0.0;
      for (const ChainSample& s : chain.samples) {
        splits += s.tree.terminal_count() - 1;
        totals += 2 * s.tree.terminal_count() - 1;
      }
      out.mean_split_nodes = splits / chain.samples.size();
      out.mean_total_nodes = totals / chain.samples.size();
      out.acceptance_post = chain.acceptance_post;
      summary.folds[f] = out;
    }
  };

  const int workers = std::max(1, std::min(jobs, nf));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<double> acc, ent, splits, totals;
  for (const FoldOutcome& f : summary.folds) {
    acc.push_back(f.accuracy);
    ent.push_back(f.entropy);
    splits.push_back(f.mean_split_nodes);
    totals.push_back(f.mean_total_nodes);
    summary.entropy_total += f.entropy;
  }
  std::tie(summary.accuracy_mean, summary.accuracy_2sigma) = mean_2sigma(acc);
  std::tie(summary.entropy_mean, summary.entropy_2sigma) = mean_2sigma(ent);
  std::tie(summary.split_nodes_mean, summary.split_nodes_2sigma) = mean_2sigma(splits);
  std::tie(summary.total_nodes_mean, summary.total_nodes_2sigma) = mean_2sigma(totals);
  return summary;
}

void write_cv_csv(const CvSummary& summary, const std::string& dataset_name,
                  const std::string& strategy_name, std::ostream& os, bool header) {
  if (header)
    os << "dataset,strategy,fold,accuracy,entropy,mean_split_nodes,mean_total_nodes,"
          "acceptance_post\n";
  for (const FoldOutcome& f : summary.folds) {
    os << dataset_name << "," << strategy_name << "," << f.fold << ","
       << format_double(f.accuracy) << "," << format_double(f.entropy) << ","
       << format_double(f.mean_split_nodes) << "," << format_double(f.mean_total_nodes)
       << "," << format_double(f.acceptance_post) << "\n";
  }
  os << dataset_name << "," << strategy_name << ",mean," << format_double(summary.accuracy_mean)
     << "," << format_double(summary.entropy_mean) << ","
     << format_double(summary.split_nodes_mean) << ","
     << format_double(summary.total_nodes_mean) << ",\n";
  os << dataset_name << "," << strategy_name << ",2sigma,"
     << format_double(summary.accuracy_2sigma) << "," << format_double(summary.entropy_2sigma)
     << "," << format_double(summary.split_nodes_2sigma) << ","
     << format_double(summary.total_nodes_2sigma) << ",\n";
}

}  // namespace bdt
