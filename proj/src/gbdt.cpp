#include "apguard/gbdt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>

#include "apguard/rng.hpp"

namespace apguard {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw Error("FeatureMatrix: data size " + std::to_string(data_.size()) + " != " +
                std::to_string(rows_) + " x " + std::to_string(cols_));
}

void TreeHyperparams::validate() const {
  if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0))
    throw ConfigError("learning_rate must be in (0, 1]");
  if (max_leaves < 2) throw ConfigError("max_leaves must be >= 2");
  if (min_samples_per_leaf < 1) throw ConfigError("min_samples_per_leaf must be >= 1");
  if (max_bins < 2 || max_bins > 256) throw ConfigError("max_bins must be in [2, 256]");
  if (!(l2_reg >= 0.0)) throw ConfigError("l2_reg must be >= 0");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("subsample must be in (0, 1]");
}

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                       : n.right);
  }
  return nodes[i].value;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

TreeEnsembleModel::TreeEnsembleModel(Task task, std::size_t n_features, std::vector<int> classes,
                                     std::vector<double> base_scores,
                                     std::vector<std::vector<RegressionTree>> stages)
    : task_(task),
      n_features_(n_features),
      classes_(std::move(classes)),
      base_scores_(std::move(base_scores)),
      stages_(std::move(stages)) {}

void TreeEnsembleModel::check_features(std::span<const double> x) const {
  if (x.size() != n_features_)
    throw SchemaError("model expects " + std::to_string(n_features_) + " features, got " +
                      std::to_string(x.size()));
}

std::vector<double> TreeEnsembleModel::decision_scores(std::span<const double> x,
                                                       std::optional<std::size_t> n_stages) const {
  check_features(x);
  std::vector<double> scores = base_scores_;
  const std::size_t upto = std::min(n_stages.value_or(stages_.size()), stages_.size());
  for (std::size_t s = 0; s < upto; ++s)
    for (std::size_t k = 0; k < scores.size(); ++k) scores[k] += stages_[s][k].predict(x);
  return scores;
}

namespace {

constexpr double kMinGain = 1e-12;

struct BinnedFeatures {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<std::vector<double>> cuts;  // x <= cuts[f][b] falls in bin <= b
  std::vector<std::uint8_t> codes;        // codes[f * n_rows + row]

  std::size_t bin_count(std::size_t f) const { return cuts[f].size() + 1; }
  std::uint8_t code(std::size_t f, std::size_t row) const { return codes[f * n_rows + row]; }
};

std::vector<double> feature_cuts(std::vector<double> values, std::size_t max_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  std::unique_copy(values.begin(), values.end(), std::back_inserter(distinct));
  std::vector<double> cuts;
  auto midpoint = [](double a, double b) { return a + (b - a) / 2.0; };
  if (distinct.size() <= max_bins) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
      cuts.push_back(midpoint(distinct[i], distinct[i + 1]));
    return cuts;
  }
  const std::size_t n = values.size();
  for (std::size_t b = 1; b < max_bins; ++b) {
    const double v = values[b * n / max_bins];
    auto next = std::upper_bound(distinct.begin(), distinct.end(), v);
    if (next == distinct.end()) break;
    const double cut = midpoint(v, *next);
    if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
  }
  return cuts;
}

BinnedFeatures bin_features(const FeatureMatrix& x, std::size_t max_bins) {
  BinnedFeatures out;
  out.n_rows = x.rows();
  out.n_features = x.cols();
  out.cuts.resize(x.cols());
  out.codes.resize(x.rows() * x.cols());
  std::vector<double> col(x.rows());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t i = 0; i < x.rows(); ++i) col[i] = x.at(i, f);
    out.cuts[f] = feature_cuts(col, max_bins);
    const auto& cuts = out.cuts[f];
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto it = std::lower_bound(cuts.begin(), cuts.end(), col[i]);
      out.codes[f * x.rows() + i] = static_cast<std::uint8_t>(it - cuts.begin());
    }
  }
  return out;
}

struct Split {
  double gain = 0.0;
  int feature = -1;
  int bin = -1;
};

struct Leaf {
  std::size_t node = 0;
  std::vector<std::uint32_t> rows;
  double g = 0.0;
  double h = 0.0;
  Split split;
};

class TreeGrower {
 public:
  TreeGrower(const BinnedFeatures& data, const TreeHyperparams& hp) : data_(data), hp_(hp) {}

  RegressionTree grow(std::span<const double> grad, std::span<const double> hess,
                      std::vector<std::uint32_t> rows) const {
    RegressionTree tree;
    tree.nodes.emplace_back();
    std::vector<Leaf> leaves;
    leaves.push_back(make_leaf(0, std::move(rows), grad, hess));

    while (leaves.size() < hp_.max_leaves) {
      std::size_t best = leaves.size();
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (leaves[i].split.feature < 0) continue;
        if (best == leaves.size() || leaves[i].split.gain > leaves[best].split.gain) best = i;
      }
      if (best == leaves.size()) break;

      Leaf parent = std::move(leaves[best]);
      const auto f = static_cast<std::size_t>(parent.split.feature);
      const auto bin = static_cast<std::uint8_t>(parent.split.bin);
      std::vector<std::uint32_t> left_rows, right_rows;
      for (auto r : parent.rows) (data_.code(f, r) <= bin ? left_rows : right_rows).push_back(r);

      const auto left_idx = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[parent.node];
      node.feature = static_cast<std::int32_t>(f);
      node.threshold = data_.cuts[f][bin];
      node.left = left_idx;
      node.right = left_idx + 1;

      leaves[best] = make_leaf(static_cast<std::size_t>(left_idx), std::move(left_rows), grad, hess);
      leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(best) + 1,
                    make_leaf(static_cast<std::size_t>(left_idx + 1), std::move(right_rows), grad,
                              hess));
    }

    for (const auto& leaf : leaves) {
      const double denom = leaf.h + hp_.l2_reg;
      tree.nodes[leaf.node].value = denom > 0.0 ? -leaf.g / denom * hp_.learning_rate : 0.0;
    }
    return tree;
  }

 private:
  Leaf make_leaf(std::size_t node, std::vector<std::uint32_t> rows, std::span<const double> grad,
                 std::span<const double> hess) const {
    Leaf leaf;
    leaf.node = node;
    for (auto r : rows) {
      leaf.g += grad[r];
      leaf.h += hess[r];
    }
    leaf.rows = std::move(rows);
    if (leaf.rows.size() >= 2 * hp_.min_samples_per_leaf) leaf.split = best_split(leaf, grad, hess);
    return leaf;
  }

  double score(double g, double h) const {
    const double denom = h + hp_.l2_reg;
    return denom > 0.0 ? g * g / denom : 0.0;
  }

  Split best_split(const Leaf& leaf, std::span<const double> grad,
                   std::span<const double> hess) const {
    Split best;
    const double parent = score(leaf.g, leaf.h);
    const std::size_t n = leaf.rows.size();
    std::vector<double> hg, hh;
    std::vector<std::uint32_t> hn;
    for (std::size_t f = 0; f < data_.n_features; ++f) {
      const std::size_t nb = data_.bin_count(f);
      if (nb < 2) continue;
      hg.assign(nb, 0.0);
      hh.assign(nb, 0.0);
      hn.assign(nb, 0);
      const std::uint8_t* codes = data_.codes.data() + f * data_.n_rows;
      for (auto r : leaf.rows) {
        const auto b = codes[r];
        hg[b] += grad[r];
        hh[b] += hess[r];
        ++hn[b];
      }
      double gl = 0.0, hl = 0.0;
      std::size_t nl = 0;
      for (std::size_t b = 0; b + 1 < nb; ++b) {
        gl += hg[b];
        hl += hh[b];
        nl += hn[b];
        if (hn[b] == 0 && b > 0) continue;  // same partition as the previous bin
        if (nl < hp_.min_samples_per_leaf) continue;
        if (n - nl < hp_.min_samples_per_leaf) break;
        const double gain = score(gl, hl) + score(leaf.g - gl, leaf.h - hl) - parent;
        if (gain > kMinGain && gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.bin = static_cast<int>(b);
        }
      }
    }
    return best;
  }

  const BinnedFeatures& data_;
  const TreeHyperparams& hp_;
};

std::vector<std::uint32_t> stage_rows(std::size_t n, const TreeHyperparams& hp, std::size_t stage) {
  std::vector<std::uint32_t> rows;
  rows.reserve(n);
  if (hp.subsample >= 1.0) {
    for (std::size_t i = 0; i < n; ++i) rows.push_back(static_cast<std::uint32_t>(i));
    return rows;
  }
  Rng rng(derive_seed(hp.rng_seed, "bagging", stage));
  for (std::size_t i = 0; i < n; ++i)
    if (rng.uniform01() < hp.subsample) rows.push_back(static_cast<std::uint32_t>(i));
  if (rows.empty()) rows.push_back(static_cast<std::uint32_t>(rng.below(n)));
  return rows;
}

void check_finite(const FeatureMatrix& x) {
  for (double v : x.data())
    if (!std::isfinite(v)) throw Error("training features must be finite");
}

// Row order sorted by (key, features); makes training order-independent.
template <typename Key>
std::vector<std::size_t> canonical_order(const FeatureMatrix& x, std::span<const Key> keys) {
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    const auto ra = x.row(a), rb = x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return order;
}

FeatureMatrix reorder(const FeatureMatrix& x, const std::vector<std::size_t>& order) {
  std::vector<double> data;
  data.reserve(x.data().size());
  for (auto i : order) {
    const auto r = x.row(i);
    data.insert(data.end(), r.begin(), r.end());
  }
  return FeatureMatrix(x.rows(), x.cols(), std::move(data));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

TreeEnsembleModel train_classifier(const FeatureMatrix& features, std::span<const int> labels,
                                   const TreeHyperparams& hp) {
  hp.validate();
  if (features.rows() != labels.size())
    throw Error("train_classifier: " + std::to_string(features.rows()) + " rows but " +
                std::to_string(labels.size()) + " labels");
  check_finite(features);
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2)
    throw DegenerateLabelError("train_classifier needs at least two distinct labels");

  const auto order = canonical_order(features, labels);
  const FeatureMatrix x = reorder(features, order);
  const std::size_t n = x.rows(), k_count = classes.size();
  std::vector<std::size_t> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), labels[order[i]]) - classes.begin());

  std::vector<double> base(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double count = static_cast<double>(std::count(y.begin(), y.end(), k));
    const double p = std::clamp(count / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    base[k] = std::log(p / (1.0 - p));
  }

  const BinnedFeatures binned = bin_features(x, hp.max_bins);
  const TreeGrower grower(binned, hp);
  std::vector<double> margin(n * k_count);
  for (std::size_t i = 0; i < n; ++i)
    std::copy(base.begin(), base.end(), margin.begin() + static_cast<std::ptrdiff_t>(i * k_count));

  std::vector<std::vector<RegressionTree>> stages;
  stages.reserve(hp.n_trees);
  std::vector<double> grad(n), hess(n);
  for (std::size_t s = 0; s < hp.n_trees; ++s) {
    const auto rows = stage_rows(n, hp, s);
    std::vector<RegressionTree> stage;
    stage.reserve(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = sigmoid(margin[i * k_count + k]);
        grad[i] = p - (y[i] == k ? 1.0 : 0.0);
        hess[i] = std::max(p * (1.0 - p), 1e-16);
      }
      stage.push_back(grower.grow(grad, hess, rows));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < k_count; ++k) margin[i * k_count + k] += stage[k].predict(x.row(i));
    stages.push_back(std::move(stage));
  }
  return TreeEnsembleModel(Task::classifier, x.cols(), std::move(classes), std::move(base),
                           std::move(stages));
}

TreeEnsembleModel train_regressor(const FeatureMatrix& features, std::span<const double> targets,
                                  const TreeHyperparams& hp) {
  hp.validate();
  if (features.rows() == 0) throw Error("train_regressor: empty training set");
  if (features.rows() != targets.size())
    throw Error("train_regressor: " + std::to_string(features.rows()) + " rows but " +
                std::to_string(targets.size()) + " targets");
  check_finite(features);
  for (double t : targets)
    if (!std::isfinite(t)) throw Error("training targets must be finite");

  const auto order = canonical_order(features, targets);
  const FeatureMatrix x = reorder(features, order);
  const std::size_t n = x.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = targets[order[i]];

  const double base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const BinnedFeatures binned = bin_features(x, hp.max_bins);
  const TreeGrower grower(binned, hp);
  std::vector<double> pred(n, base), grad(n), hess(n, 1.0);
  std::vector<std::vector<RegressionTree>> stages;
  stages.reserve(hp.n_trees);
  for (std::size_t s = 0; s < hp.n_trees; ++s) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y[i];
    auto tree = grower.grow(grad, hess, stage_rows(n, hp, s));
    for (std::size_t i = 0; i < n; ++i) pred[i] += tree.predict(x.row(i));
    stages.push_back({std::move(tree)});
  }
  return TreeEnsembleModel(Task::regressor, x.cols(), {}, {base}, std::move(stages));
}

ClassPrediction predict_label(const TreeEnsembleModel& model, std::span<const double> x) {
  if (model.task() != Task::classifier) throw Error("predict_label needs a classifier");
  ClassPrediction out;
  out.scores = model.decision_scores(x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < out.scores.size(); ++k)
    if (out.scores[k] > out.scores[best]) best = k;  // classes ascending: ties keep lowest label
  out.rp_id = model.class_labels()[best];
  return out;
}

double predict_value(const TreeEnsembleModel& model, std::span<const double> x) {
  if (model.task() != Task::regressor) throw Error("predict_value needs a regressor");
  return model.decision_scores(x)[0];
}

namespace {

constexpr char kMagic[8] = {'A', 'P', 'G', 'T', 'R', 'E', 'E', '\0'};

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { le(v); }
  void i32(std::int32_t v) { le(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) { le(v); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  std::vector<std::uint8_t>& data() { return out_; }

 private:
  template <typename U>
  void le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(le<std::uint32_t>()); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > in_.size() - pos_) throw ModelLoadError("model stream is truncated");
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  template <typename U>
  U le() {
    auto s = take(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(s[i]) << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

constexpr std::size_t kNodeBytes = 4 + 8 + 4 + 4 + 8;

}  // namespace

std::vector<std::uint8_t> serialize_model(const TreeEnsembleModel& model) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kModelFormatVersion);
  w.u8(static_cast<std::uint8_t>(model.task()));
  w.u32(static_cast<std::uint32_t>(model.feature_count()));
  w.u32(static_cast<std::uint32_t>(model.class_labels().size()));
  for (int c : model.class_labels()) w.i32(c);
  w.u32(static_cast<std::uint32_t>(model.base_scores().size()));
  for (double b : model.base_scores()) w.f64(b);
  w.u32(static_cast<std::uint32_t>(model.stage_count()));
  w.u32(static_cast<std::uint32_t>(model.base_scores().size()));
  for (const auto& stage : model.stages()) {
    for (const auto& tree : stage) {
      w.u32(static_cast<std::uint32_t>(tree.nodes.size()));
      for (const auto& n : tree.nodes) {
        w.i32(n.feature);
        w.f64(n.threshold);
        w.i32(n.left);
        w.i32(n.right);
        w.f64(n.value);
      }
    }
  }
  const auto checksum = fnv1a(w.data());
  w.u64(checksum);
  return std::move(w.data());
}

TreeEnsembleModel deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) + 8) throw ModelLoadError("model stream is truncated");
  const auto body = bytes.first(bytes.size() - 8);
  Reader trailer(bytes.last(8));
  if (trailer.u64() != fnv1a(body)) throw ModelLoadError("model checksum mismatch");

  Reader r(body);
  if (std::memcmp(r.take(sizeof(kMagic)).data(), kMagic, sizeof(kMagic)) != 0)
    throw ModelLoadError("not a model file (bad magic)");
  const auto version = r.u32();
  if (version != kModelFormatVersion)
    throw ModelLoadError("unsupported model format version " + std::to_string(version));
  const auto task_tag = r.u8();
  if (task_tag != static_cast<std::uint8_t>(Task::classifier) &&
      task_tag != static_cast<std::uint8_t>(Task::regressor))
    throw ModelLoadError("unknown task tag");
  const auto task = static_cast<Task>(task_tag);
  const std::size_t n_features = r.u32();
  const std::size_t n_classes = r.u32();
  if (n_classes > r.remaining() / 4) throw ModelLoadError("model stream is truncated");
  std::vector<int> classes(n_classes);
  for (auto& c : classes) c = r.i32();
  const std::size_t n_base = r.u32();
  if (n_base > r.remaining() / 8) throw ModelLoadError("model stream is truncated");
  std::vector<double> base(n_base);
  for (auto& b : base) b = r.f64();
  const std::size_t expected_trees = task == Task::classifier ? n_classes : 1;
  if (task == Task::classifier && (n_classes < 2 || !std::is_sorted(classes.begin(), classes.end())))
    throw ModelLoadError("classifier needs at least two ascending class labels");
  if (task == Task::regressor && n_classes != 0) throw ModelLoadError("regressor with class labels");
  if (n_base != expected_trees) throw ModelLoadError("base score count mismatch");

  const std::size_t n_stages = r.u32();
  const std::size_t per_stage = r.u32();
  if (per_stage != expected_trees) throw ModelLoadError("trees per stage mismatch");
  if (n_stages > r.remaining()) throw ModelLoadError("model stream is truncated");
  std::vector<std::vector<RegressionTree>> stages(n_stages);
  for (auto& stage : stages) {
    stage.resize(per_stage);
    for (auto& tree : stage) {
      const std::size_t n_nodes = r.u32();
      if (n_nodes == 0 || n_nodes > r.remaining() / kNodeBytes)
        throw ModelLoadError("bad node count");
      tree.nodes.resize(n_nodes);
      for (std::size_t i = 0; i < n_nodes; ++i) {
        auto& n = tree.nodes[i];
        n.feature = r.i32();
        n.threshold = r.f64();
        n.left = r.i32();
        n.right = r.i32();
        n.value = r.f64();
        const auto self = static_cast<std::int64_t>(i);
        const auto count = static_cast<std::int64_t>(n_nodes);
        if (n.feature < 0) {
          if (n.feature != -1 || n.left != -1 || n.right != -1 || !std::isfinite(n.value))
            throw ModelLoadError("malformed leaf node");
        } else if (static_cast<std::size_t>(n.feature) >= n_features || n.left <= self ||
                   n.right <= self || n.left >= count || n.right >= count ||
                   std::isnan(n.threshold)) {
          throw ModelLoadError("malformed split node");
        }
      }
    }
  }
  if (r.remaining() != 0) throw ModelLoadError("trailing bytes after model payload");
  return TreeEnsembleModel(task, n_features, std::move(classes), std::move(base), std::move(stages));
}

void save_model(const TreeEnsembleModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing model file " + path.string());
}

TreeEnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelLoadError("cannot open model file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace apguard
