#ifndef BDT_AVERAGING_HPP
#define BDT_AVERAGING_HPP

#include <iosfwd>
#include <vector>

#include "bdt/dataset.hpp"
#include "bdt/likelihood.hpp"
#include "bdt/sampler.hpp"

namespace bdt {

struct PredictionResult {
  std::vector<std::vector<double>> posterior;  // t x C, rows sum to 1
  std::vector<int> predicted;                  // argmax class ids, ties -> lowest
  double accuracy = 0.0;
  double entropy_sum = 0.0;  // natural log, summed over rows and classes
};

/// Model-averaged prediction: class posteriors of the routed terminal,
/// averaged uniformly over the retained chain samples.
PredictionResult predict(const std::vector<ChainSample>& samples,
                         const DirichletPrior& prior, const Dataset& test);

/// -sum_ij P_ij ln P_ij with 0 ln 0 = 0. Throws on negative entries.
double entropy(const std::vector<std::vector<double>>& posterior);

struct FoldOutcome {
  int fold = 0;
  double accuracy = 0.0;
  double entropy = 0.0;            // summed over the fold's test examples
  double mean_split_nodes = 0.0;   // k - 1, averaged over retained samples
  double mean_total_nodes = 0.0;   // 2k - 1, averaged over retained samples
  double acceptance_post = 0.0;
};

struct CvSummary {
  std::vector<FoldOutcome> folds;
  double accuracy_mean = 0.0, accuracy_2sigma = 0.0;
  double entropy_mean = 0.0, entropy_2sigma = 0.0;
  double entropy_total = 0.0;  // summed across folds
  double split_nodes_mean = 0.0, split_nodes_2sigma = 0.0;
  double total_nodes_mean = 0.0, total_nodes_2sigma = 0.0;
};

/// Trains one chain per training split and evaluates on the held-out fold.
/// Folds whose training split would miss a class trigger a stratified
/// re-draw (with a warning on stderr). `jobs` caps concurrent fold workers;
/// results are independent of the worker count.
CvSummary cross_validate(const Dataset& ds, const FoldSplit& folds,
                         const SamplerConfig& cfg, int jobs = 1);

/// Per-fold rows followed by mean/2-sigma aggregate rows.
void write_cv_csv(const CvSummary& summary, const std::string& dataset_name,
                  const std::string& strategy_name, std::ostream& os,
                  bool header = true);

}  // namespace bdt

#endif  // BDT_AVERAGING_HPP
