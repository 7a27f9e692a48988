#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sepscan/types.hpp"

namespace sepscan {

struct BinaryProblem;

/// Proof object for "separable": a hyperplane in the original feature space
/// (raw 0-255 pixel units for MNIST problems). Verifies iff
/// y_i (w . x_i + b) > 0 for every sample of the referenced problem.
struct HyperplaneCertificate {
  Eigen::VectorXd w;  // length = original feature count (784 for MNIST)
  double b = 0.0;
  ProblemRef problem_ref;
  std::string dataset_fingerprint;
  std::string solver_provenance;  // "ipm" or "perceptron"
};

struct WeightedSample {
  int32_t sample = 0;   // row index within the referenced problem
  double weight = 0.0;  // strictly positive
};

/// Proof object for "non-separable": per-class convex weights whose weighted
/// mean vectors coincide, exhibiting a common point of the two class hulls.
struct IntersectionWitness {
  std::vector<WeightedSample> pos_weights;
  std::vector<WeightedSample> neg_weights;
  ProblemRef problem_ref;
  std::string dataset_fingerprint;
  std::string solver_provenance;
};

struct VerificationReport {
  bool passed = false;
  double metric = 0.0;  // min margin (hyperplane) or residual (witness)
  int64_t checked_samples = 0;
  bool exact_mode = false;
};

/// Checks min_i y_i (w . x_i + b) > 0 over the problem's raw (unscaled)
/// features. With exact_mode the margins are evaluated in exact rational
/// arithmetic, with w and b taken as their serialized 17-significant-digit
/// decimal values, so a pass is an exact proof of separability.
/// Throws Error{fingerprint_mismatch, dimension_mismatch}.
VerificationReport verify_hyperplane(const HyperplaneCertificate& cert,
                                     const BinaryProblem& p,
                                     bool exact_mode = false);

/// Renormalizes each side to sum 1 and checks the two weighted means agree
/// within eps in the infinity norm, in scaled feature units.
/// Throws Error{negative_weight, index_out_of_range, fingerprint_mismatch}.
VerificationReport verify_witness(const IntersectionWitness& wit,
                                  const BinaryProblem& p, double eps);

struct PresolveRecord;

/// Maps a solver solution z = (w', b) on the presolved columns back to the
/// original feature space: dropped columns get weight 0, kept column k gets
/// w_k = z_k * scale_k. Throws Error{record_mismatch} if z does not match
/// the record.
HyperplaneCertificate unscale_certificate(const Eigen::VectorXd& z,
                                          const PresolveRecord& rec,
                                          const ProblemRef& ref,
                                          std::string dataset_fingerprint,
                                          std::string solver_provenance);

// Certificate files: UTF-8 JSON with canonical key order, floats printed as
// 17-significant-digit decimals, so output is byte-stable for identical
// inputs. `created_at` is injected by the writer (empty string omits it and
// keeps serialization deterministic).
std::string serialize_certificate(const HyperplaneCertificate& cert,
                                  const std::string& created_at = "");
std::string serialize_certificate(const IntersectionWitness& wit,
                                  const std::string& created_at = "");

struct ParsedCertificate {
  std::optional<HyperplaneCertificate> hyperplane;
  std::optional<IntersectionWitness> witness;
};

ParsedCertificate parse_certificate(const std::string& text);
ParsedCertificate read_certificate_file(const std::string& path);
void write_certificate_file(const std::string& path, const std::string& body);

/// Shortest 17-significant-digit decimal form used everywhere a float is
/// serialized; round-trips the double bit-exactly.
std::string format_double(double v);

}  // namespace sepscan
