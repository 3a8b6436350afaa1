#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "apguard/errors.hpp"

namespace apguard {

// Dense row-major feature matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct TreeHyperparams {
  std::size_t n_trees = 100;
  double learning_rate = 0.1;
  std::size_t max_leaves = 31;
  std::size_t min_samples_per_leaf = 5;
  std::size_t max_bins = 64;
  double l2_reg = 1.0;
  // Row fraction drawn per boosting stage; 1 disables bagging.
  double subsample = 1.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

enum class Task : std::uint8_t { classifier = 1, regressor = 2 };

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;         // leaf output, already scaled by the learning rate

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  std::size_t leaf_count() const;
  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

// Additive stages of regression trees. A classifier keeps one tree per class
// per stage (one-vs-rest logistic boosting); a regressor keeps one.
class TreeEnsembleModel {
 public:
  TreeEnsembleModel(Task task, std::size_t n_features, std::vector<int> classes,
                    std::vector<double> base_scores, std::vector<std::vector<RegressionTree>> stages);

  Task task() const noexcept { return task_; }
  std::size_t feature_count() const noexcept { return n_features_; }
  const std::vector<int>& class_labels() const noexcept { return classes_; }
  const std::vector<double>& base_scores() const noexcept { return base_scores_; }
  const std::vector<std::vector<RegressionTree>>& stages() const noexcept { return stages_; }
  std::size_t stage_count() const noexcept { return stages_.size(); }

  // Raw margins (one per class, or a single value for a regressor) using the
  // first `n_stages` stages, all of them by default.
  std::vector<double> decision_scores(std::span<const double> x,
                                      std::optional<std::size_t> n_stages = std::nullopt) const;

  friend bool operator==(const TreeEnsembleModel&, const TreeEnsembleModel&) = default;

 private:
  void check_features(std::span<const double> x) const;

  Task task_;
  std::size_t n_features_;
  std::vector<int> classes_;
  std::vector<double> base_scores_;
  std::vector<std::vector<RegressionTree>> stages_;
};

// Rows are put into a canonical order before fitting, so the result does not
// depend on the order of the training data. Throws DegenerateLabelError for
// fewer than two distinct labels.
TreeEnsembleModel train_classifier(const FeatureMatrix& features, std::span<const int> labels,
                                   const TreeHyperparams& hp);

TreeEnsembleModel train_regressor(const FeatureMatrix& features, std::span<const double> targets,
                                  const TreeHyperparams& hp);

struct ClassPrediction {
  int rp_id = 0;
  std::vector<double> scores;  // aligned with class_labels()
};

// argmax over class scores, lowest label on ties.
ClassPrediction predict_label(const TreeEnsembleModel& model, std::span<const double> x);
double predict_value(const TreeEnsembleModel& model, std::span<const double> x);

// Binary container: "APGTREE\0", u32 version, u8 task, u32 features,
// u32 classes + i32 labels, u32 bases + f64 bases, u32 stages, u32 trees per
// stage, then per tree u32 node count and nodes (i32 feature, f64 threshold,
// i32 left, i32 right, f64 value); trailer is FNV-1a-64 of all preceding
// bytes. Little-endian throughout.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize_model(const TreeEnsembleModel& model);
// Throws ModelLoadError on any malformed input.
TreeEnsembleModel deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const TreeEnsembleModel& model, const std::filesystem::path& path);
TreeEnsembleModel load_model(const std::filesystem::path& path);

}  // namespace apguard
