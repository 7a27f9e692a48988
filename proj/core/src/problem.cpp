#include "sepscan/problem.hpp"

#include <cstring>
#include <string_view>
#include <unordered_map>

namespace sepscan {

std::span<const uint8_t> BinaryProblem::raw_bytes(int i) const {
  if (source) {
    return {source->image(sample_index[i]), source->dim()};
  }
  return {reinterpret_cast<const uint8_t*>(X_raw.row(i).data()),
          size_t(X_raw.cols()) * sizeof(double)};
}

namespace {

BinaryProblem build_from_dataset(std::shared_ptr<const LabeledDataset> ds,
                                 ProblemRef ref,
                                 const std::vector<int32_t>& picked,
                                 const std::vector<double>& labels) {
  const int n = int(picked.size());
  const int d = int(ds->dim());
  BinaryProblem p;
  p.ref = ref;
  p.sample_index = picked;
  p.dataset_fingerprint = ds->source_fingerprint;
  p.feature_scale = 1.0 / 255.0;
  p.columns.resize(d);
  for (int k = 0; k < d; ++k) p.columns[k] = k;
  p.y = Eigen::Map<const Eigen::VectorXd>(labels.data(), n);
  p.X.resize(n, d);
  for (int i = 0; i < n; ++i) {
    const uint8_t* px = ds->image(picked[i]);
    double* row = p.X.row(i).data();
    for (int k = 0; k < d; ++k) row[k] = double(px[k]) / 255.0;
  }
  p.source = std::move(ds);
  return p;
}

}  // namespace

BinaryProblem build_pairwise(std::shared_ptr<const LabeledDataset> ds, int a,
                             int b) {
  if (a < 0 || a > 9 || b < 0 || b > 9)
    throw Error(Fault::invalid_argument, "digits must be in [0, 9]");
  if (a == b)
    throw Error(Fault::invalid_argument,
                "pairwise digits must differ, got " + std::to_string(a) +
                    " twice");
  std::vector<int32_t> picked;
  std::vector<double> labels;
  for (uint32_t i = 0; i < ds->size(); ++i) {
    const int lab = ds->label(i);
    if (lab == a || lab == b) {
      picked.push_back(int32_t(i));
      labels.push_back(lab == a ? 1.0 : -1.0);
    }
  }
  const auto counts = digit_counts(*ds);
  if (counts[a] == 0 || counts[b] == 0)
    throw Error(Fault::empty_class,
                "digit " + std::to_string(counts[a] == 0 ? a : b) +
                    " absent from dataset");
  ProblemRef ref{ds->split, Mode::pairwise, a, b};
  return build_from_dataset(std::move(ds), ref, picked, labels);
}

BinaryProblem build_one_vs_rest(std::shared_ptr<const LabeledDataset> ds,
                                int pos) {
  if (pos < 0 || pos > 9)
    throw Error(Fault::invalid_argument, "digit must be in [0, 9]");
  const auto counts = digit_counts(*ds);
  if (counts[pos] == 0)
    throw Error(Fault::empty_class,
                "digit " + std::to_string(pos) + " absent from dataset");
  if (counts[pos] == ds->size())
    throw Error(Fault::empty_class, "rest class is empty");
  std::vector<int32_t> picked(ds->size());
  std::vector<double> labels(ds->size());
  for (uint32_t i = 0; i < ds->size(); ++i) {
    picked[i] = int32_t(i);
    labels[i] = ds->label(i) == pos ? 1.0 : -1.0;
  }
  ProblemRef ref{ds->split, Mode::one_vs_rest, pos, ProblemRef::kRest};
  return build_from_dataset(std::move(ds), ref, picked, labels);
}

BinaryProblem make_synthetic_problem(RowMatrixXd X, Eigen::VectorXd y,
                                     ProblemRef ref) {
  if (X.rows() != y.size())
    throw Error(Fault::count_mismatch, "X rows and y length differ");
  bool has_pos = false, has_neg = false;
  for (int i = 0; i < y.size(); ++i) {
    if (y[i] == 1.0)
      has_pos = true;
    else if (y[i] == -1.0)
      has_neg = true;
    else
      throw Error(Fault::invalid_argument, "labels must be +1 or -1");
  }
  if (!has_pos || !has_neg)
    throw Error(Fault::empty_class, "both classes must be non-empty");
  BinaryProblem p;
  p.X_raw = X;
  p.X = std::move(X);
  p.y = std::move(y);
  p.ref = ref;
  p.feature_scale = 1.0;
  p.sample_index.resize(p.X.rows());
  p.columns.resize(p.X.cols());
  for (int i = 0; i < int(p.sample_index.size()); ++i) p.sample_index[i] = i;
  for (int k = 0; k < int(p.columns.size()); ++k) p.columns[k] = k;
  p.dataset_fingerprint =
      "sha256:" + sha256_hex(std::span<const uint8_t>(
                      reinterpret_cast<const uint8_t*>(p.X_raw.data()),
                      size_t(p.X_raw.size()) * sizeof(double)));
  return p;
}

std::pair<BinaryProblem, PresolveRecord> presolve(const BinaryProblem& p) {
  const int n = p.n(), d = p.d();
  std::vector<int> keep;
  keep.reserve(d);
  for (int k = 0; k < d; ++k) {
    const auto col = p.X.col(k);
    double lo = col[0], hi = col[0];
    for (int i = 1; i < n; ++i) {
      lo = std::min(lo, col[i]);
      hi = std::max(hi, col[i]);
    }
    if (hi > lo) keep.push_back(k);
  }
  if (keep.empty())
    throw Error(Fault::all_columns_constant,
                "every feature is constant over the problem's samples");

  BinaryProblem q;
  q.ref = p.ref;
  q.sample_index = p.sample_index;
  q.dataset_fingerprint = p.dataset_fingerprint;
  q.feature_scale = p.feature_scale;
  q.source = p.source;
  q.X_raw = p.X_raw;
  q.y = p.y;
  q.X.resize(n, int(keep.size()));
  q.columns.resize(keep.size());
  for (size_t j = 0; j < keep.size(); ++j) {
    q.X.col(int(j)) = p.X.col(keep[j]);
    q.columns[j] = p.columns[keep[j]];
  }

  PresolveRecord rec;
  rec.kept_columns.assign(q.columns.begin(), q.columns.end());
  rec.scale = Eigen::VectorXd::Constant(int(keep.size()), p.feature_scale);
  rec.original_dim = int32_t(p.raw_dim());
  return {std::move(q), std::move(rec)};
}

std::optional<IntersectionWitness> conflict_precheck(const BinaryProblem& p) {
  // First positive occurrence of each distinct raw byte pattern; the first
  // negative row matching one yields the witness.
  std::unordered_map<std::string_view, int32_t> first_pos;
  first_pos.reserve(size_t(p.n()));
  for (int i = 0; i < p.n(); ++i) {
    if (p.y[i] != 1.0) continue;
    auto bytes = p.raw_bytes(i);
    std::string_view key(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size());
    first_pos.emplace(key, int32_t(i));
  }
  for (int j = 0; j < p.n(); ++j) {
    if (p.y[j] != -1.0) continue;
    auto bytes = p.raw_bytes(j);
    std::string_view key(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size());
    auto it = first_pos.find(key);
    if (it != first_pos.end()) {
      IntersectionWitness wit;
      wit.pos_weights = {{it->second, 1.0}};
      wit.neg_weights = {{int32_t(j), 1.0}};
      wit.problem_ref = p.ref;
      wit.dataset_fingerprint = p.dataset_fingerprint;
      wit.solver_provenance = "precheck";
      return wit;
    }
  }
  return std::nullopt;
}

}  // namespace sepscan
