#pragma once

#include <stdexcept>
#include <string>

namespace sepscan {

enum class Split { train, test, combined };
enum class Mode { pairwise, one_vs_rest };

/// Identifies one tested assembly: which split, which mode, which digits.
/// For one-vs-rest, `negative` is kRest.
struct ProblemRef {
  Split split = Split::train;
  Mode mode = Mode::pairwise;
  int positive = 0;
  int negative = 0;

  static constexpr int kRest = -1;

  friend bool operator==(const ProblemRef&, const ProblemRef&) = default;
};

std::string to_string(Split s);
std::string to_string(Mode m);
Split split_from_string(const std::string& s);

/// "train/pairwise/0-1", "test/one_vs_rest/5-rest"; used in reports and
/// certificate files.
std::string to_string(const ProblemRef& ref);
ProblemRef problem_ref_from_string(const std::string& s);

/// Filesystem-safe variant: "train_pairwise_0_1", "test_ovr_5".
std::string file_stem(const ProblemRef& ref);

enum class Fault {
  bad_magic,
  truncated,
  trailing_bytes,
  label_out_of_range,
  count_mismatch,
  network,
  checksum_mismatch,
  io,
  empty_class,
  invalid_argument,
  all_columns_constant,
  fingerprint_mismatch,
  dimension_mismatch,
  record_mismatch,
  negative_weight,
  index_out_of_range,
  too_large,
  parse,
};

class Error : public std::runtime_error {
 public:
  Error(Fault fault, const std::string& what)
      : std::runtime_error(what), fault_(fault) {}
  Fault fault() const { return fault_; }

 private:
  Fault fault_;
};

}  // namespace sepscan
