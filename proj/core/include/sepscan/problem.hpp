#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "sepscan/certificate.hpp"
#include "sepscan/dataset.hpp"
#include "sepscan/types.hpp"

namespace sepscan {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One binary classification instance. X holds scaled features (pixel/255
/// for MNIST problems, so entries lie in [0, 1]); y holds +1/-1. Raw
/// (unscaled) features stay reachable for certificate verification: through
/// the source dataset for MNIST problems, through X_raw for synthetic ones.
struct BinaryProblem {
  RowMatrixXd X;      // n x d, scaled
  Eigen::VectorXd y;  // +1 / -1
  ProblemRef ref;
  std::vector<int32_t> sample_index;  // row -> index into the source dataset
  std::vector<int32_t> columns;       // X column -> original feature index
  double feature_scale = 1.0;         // raw * feature_scale == X entry source
  std::string dataset_fingerprint;

  std::shared_ptr<const LabeledDataset> source;  // null for synthetic problems
  RowMatrixXd X_raw;                             // synthetic raw view

  int n() const { return int(X.rows()); }
  int d() const { return int(X.cols()); }
  /// Original (pre-presolve) feature count.
  int raw_dim() const {
    return source ? int(source->dim()) : int(X_raw.cols());
  }
  /// Raw feature k (original indexing) of problem row i.
  double raw(int i, int k) const {
    return source ? double(source->image(sample_index[i])[k]) : X_raw(i, k);
  }
  /// Bytes of row i's raw features, for exact duplicate detection.
  std::span<const uint8_t> raw_bytes(int i) const;
};

/// Presolve audit trail: which original columns survived and the positive
/// per-column factor mapping solver units back to raw units.
struct PresolveRecord {
  std::vector<int32_t> kept_columns;  // sorted, original feature indices
  Eigen::VectorXd scale;              // per kept column (uniform 1/255 here)
  int32_t original_dim = 0;           // feature count before presolve
  std::optional<IntersectionWitness> conflict;
};

/// Pairwise problem: digit a -> +1, digit b -> -1, everything else excluded;
/// rows follow dataset order. Throws Error{invalid_argument} if a == b,
/// Error{empty_class} if a digit is absent.
BinaryProblem build_pairwise(std::shared_ptr<const LabeledDataset> ds, int a,
                             int b);

/// One-vs-rest: digit pos -> +1, all nine others -> -1; n equals the
/// dataset size.
BinaryProblem build_one_vs_rest(std::shared_ptr<const LabeledDataset> ds,
                                int pos);

/// Synthetic problem over an explicit matrix (tests, tiny instances).
/// X doubles as its own raw view; feature_scale is 1.
BinaryProblem make_synthetic_problem(RowMatrixXd X, Eigen::VectorXd y,
                                     ProblemRef ref = {});

/// Removes columns with zero range over the problem's samples. The reduced
/// problem has the same separability verdict (dropped columns are constant,
/// hence absorbable into the bias). Idempotent. Throws
/// Error{all_columns_constant} when nothing survives.
std::pair<BinaryProblem, PresolveRecord> presolve(const BinaryProblem& p);

/// Exact fast path: if some raw sample appears byte-identically in both
/// classes, no hyperplane can satisfy both constraints; the witness puts
/// weight 1 on each occurrence. Exact byte comparison, no tolerance.
std::optional<IntersectionWitness> conflict_precheck(const BinaryProblem& p);

}  // namespace sepscan
