#ifndef BDT_DATASET_HPP
#define BDT_DATASET_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bdt {

enum class FeatureKind { continuous, categorical };

/// Per-feature metadata: the sorted unique values observed in the training
/// data double as the candidate split rules for that feature.
struct FeatureMeta {
  int index = 0;
  FeatureKind kind = FeatureKind::continuous;
  std::vector<double> observed_values;       // sorted, unique, non-empty
  std::vector<std::string> category_labels;  // categorical: label of code i

  double root_min() const { return observed_values.front(); }
  double root_max() const { return observed_values.back(); }
  std::size_t rule_count() const { return observed_values.size(); }
};

/// Immutable classification dataset: an n x m numeric feature matrix and
/// labels remapped to contiguous class ids 1..C (first-appearance order).
class Dataset {
 public:
  Dataset(std::vector<double> features_row_major, int n, int m,
          std::vector<int> labels, std::vector<std::string> class_names,
          std::vector<FeatureKind> kinds = {},
          std::vector<std::vector<std::string>> category_labels = {});

  int n() const { return n_; }
  int m() const { return m_; }
  int class_count() const { return static_cast<int>(class_names_.size()); }

  double value(int row, int col) const { return features_[static_cast<std::size_t>(row) * m_ + col]; }
  std::span<const double> row(int i) const {
    return {features_.data() + static_cast<std::size_t>(i) * m_, static_cast<std::size_t>(m_)};
  }
  const std::vector<int>& labels() const { return labels_; }
  int label(int row) const { return labels_[row]; }
  const FeatureMeta& meta(int j) const { return meta_[j]; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  /// Row subset sharing this dataset's class mapping. Feature metadata
  /// (observed values, hence candidate rules) is recomputed on the subset.
  Dataset subset(const std::vector<int>& rows) const;

  /// Per-class totals over the whole dataset.
  std::vector<long long> class_totals() const;

 private:
  std::vector<double> features_;  // row-major n*m
  int n_ = 0;
  int m_ = 0;
  std::vector<int> labels_;  // values in 1..C
  std::vector<std::string> class_names_;
  std::vector<FeatureMeta> meta_;
};

/// Loads a comma-separated file with a mandatory header row. `label_column`
/// names the label column; empty selects the last column. String-valued
/// feature columns are ordinally encoded by sorted distinct value. Missing
/// cells (empty or "?") are rejected.
Dataset load_csv(const std::string& path, const std::string& label_column = "");

void write_csv(const Dataset& ds, const std::string& path);

/// Synthetic XOR problem: x1, x2 ~ U(-0.5, 0.5), x3 ~ N(0, 0.2) noise,
/// class 1 iff x1 * x2 > 0, class 2 otherwise.
Dataset generate_xor3(int n, std::uint64_t seed);

struct FoldSplit {
  int fold_count = 0;
  std::vector<int> assignment;  // row -> fold id in [0, fold_count)
  std::uint64_t seed = 0;
};

/// Random near-equal partition into k folds, deterministic given the seed.
FoldSplit make_folds(const Dataset& ds, int k, std::uint64_t seed);

}  // namespace bdt

#endif  // BDT_DATASET_HPP
