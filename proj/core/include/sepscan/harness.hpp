#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sepscan/dataset.hpp"
#include "sepscan/ipm.hpp"
#include "sepscan/perceptron.hpp"

namespace sepscan {

/// One experimental campaign: which assemblies of one split to test and how.
struct CampaignSpec {
  Split split = Split::train;
  Mode mode = Mode::pairwise;
  bool all = true;
  std::vector<std::pair<int, int>> pairs;  // pairwise selection when !all
  std::vector<int> digits;                 // one-vs-rest selection when !all
  bool use_fast_path = true;               // perceptron before the LP
  int threads = 0;                         // <= 0: hardware concurrency
  std::filesystem::path cert_dir = "certs";
  IpmConfig ipm;
  PerceptronConfig perceptron;
};

struct CampaignRow {
  Split split = Split::train;
  Mode mode = Mode::pairwise;
  int positive = 0;
  int negative = 0;  // ProblemRef::kRest for one-vs-rest
  int n_pos = 0;
  int n_neg = 0;
  std::string status;  // "Yes" | "No" | "Indeterminate"
  std::optional<double> objective;
  int iterations = 0;
  double solve_seconds = 0;
  bool fast_path_used = false;
  std::string cert_path;
  std::string note;  // diagnostics for Indeterminate rows; not serialized
};

struct EnvironmentInfo {
  std::string cpu;
  int threads = 0;
  std::string build;
};

struct CampaignReport {
  std::vector<CampaignRow> rows;
  EnvironmentInfo environment;

  bool all_decided() const;
};

EnvironmentInfo probe_environment(int threads);

/// Runs every selected assembly: conflict precheck, optional perceptron fast
/// path, then the phase-I interior-point solve. Every verdict's certificate
/// is written and re-verified from disk before its row is accepted;
/// row-level failures become Indeterminate rows rather than aborting the
/// campaign. Rows come back sorted by (positive, negative) regardless of the
/// thread budget. solve_seconds measures the solver only.
CampaignReport run_campaign(const CampaignSpec& spec,
                            std::shared_ptr<const LabeledDataset> ds);

std::string report_to_csv(const CampaignReport& report);
std::string report_to_markdown(const CampaignReport& report);
void emit_report(const CampaignReport& report, const std::string& format,
                 const std::filesystem::path& path);

/// Parses the tabular content back (comment lines ignored); the round trip
/// preserves every column.
std::vector<CampaignRow> parse_report_csv(const std::string& text);

}  // namespace sepscan
