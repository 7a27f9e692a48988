// sepscan: decides strict linear separability of MNIST digit assemblies via
// a phase-I linear program and emits independently verifiable certificates
// for both outcomes.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "sepscan/fetch.hpp"
#include "sepscan/harness.hpp"
#include "sepscan/oracle2d.hpp"

namespace {

using namespace sepscan;

struct CampaignCli {
  std::string split = "train";
  bool all = false;
  std::string pair;
  int digit = -1;
  std::string data_dir;
  std::string out;
  std::string format = "csv";
  std::string cert_dir = "certs";
  int threads = 0;
  bool no_fast_path = false;
  double tol_obj = IpmConfig{}.eps_obj_per_sample;
  double tol_witness = IpmConfig{}.eps_witness;
};

void add_campaign_flags(CLI::App* cmd, CampaignCli& cli, bool pairwise) {
  cmd->add_option("--split", cli.split, "train, test or combined")
      ->required()
      ->check(CLI::IsMember({"train", "test", "combined"}));
  auto* all = cmd->add_flag("--all", cli.all, "test every assembly");
  if (pairwise) {
    cmd->add_option("--pair", cli.pair, "single digit pair A,B")
        ->excludes(all);
  } else {
    cmd->add_option("--digit", cli.digit, "single positive digit")
        ->check(CLI::Range(0, 9))
        ->excludes(all);
  }
  cmd->add_option("--data", cli.data_dir, "directory with the MNIST files")
      ->envname("SEPSCAN_DATA");
  cmd->add_option("--out", cli.out, "report file (stdout when omitted)");
  cmd->add_option("--format", cli.format, "report format")
      ->check(CLI::IsMember({"csv", "md"}));
  cmd->add_option("--cert-dir", cli.cert_dir, "certificate output directory");
  cmd->add_option("--threads", cli.threads, "row-level thread budget");
  cmd->add_flag("--no-fast-path", cli.no_fast_path,
                "skip the perceptron fast path");
  cmd->add_option("--tol-obj", cli.tol_obj,
                  "separability threshold on phase-I optimum per sample");
  cmd->add_option("--tol-witness", cli.tol_witness,
                  "witness residual tolerance");
}

int run_campaign_cli(const CampaignCli& cli, Mode mode) {
  if (cli.data_dir.empty()) {
    std::cerr << "error: no data directory (--data or SEPSCAN_DATA)\n";
    return 1;
  }
  CampaignSpec spec;
  spec.split = split_from_string(cli.split);
  spec.mode = mode;
  spec.all = cli.all;
  if (!cli.all) {
    if (mode == Mode::pairwise) {
      const size_t comma = cli.pair.find(',');
      if (cli.pair.empty() || comma == std::string::npos) {
        std::cerr << "error: --pair expects A,B (or pass --all)\n";
        return 1;
      }
      const int a = std::stoi(cli.pair.substr(0, comma));
      const int b = std::stoi(cli.pair.substr(comma + 1));
      if (a == b || a < 0 || a > 9 || b < 0 || b > 9) {
        std::cerr << "error: --pair needs two distinct digits in [0, 9]\n";
        return 1;
      }
      spec.pairs = {{a, b}};
    } else {
      if (cli.digit < 0) {
        std::cerr << "error: pass --digit D or --all\n";
        return 1;
      }
      spec.digits = {cli.digit};
    }
  }
  spec.use_fast_path = !cli.no_fast_path;
  spec.threads = cli.threads;
  spec.cert_dir = cli.cert_dir;
  spec.ipm.eps_obj_per_sample = cli.tol_obj;
  spec.ipm.eps_witness = cli.tol_witness;

  auto ds = load_split_shared(cli.data_dir, spec.split);
  if (!has_canonical_mnist_counts(*ds))
    std::cerr << "warning: dataset does not match the canonical MNIST counts\n";

  const CampaignReport report = run_campaign(spec, ds);
  if (cli.out.empty()) {
    std::cout << (cli.format == "md" ? report_to_markdown(report)
                                     : report_to_csv(report));
  } else {
    emit_report(report, cli.format, cli.out);
  }
  for (const CampaignRow& row : report.rows)
    if (row.status == "Indeterminate")
      std::cerr << "indeterminate: " << row.positive << " vs "
                << (row.negative == ProblemRef::kRest
                        ? std::string("rest")
                        : std::to_string(row.negative))
                << " (" << row.note << ")\n";
  return report.all_decided() ? 0 : 2;
}

int run_verify(const std::string& cert_file, const std::string& data_dir,
               bool exact) {
  if (data_dir.empty()) {
    std::cerr << "error: no data directory (--data or SEPSCAN_DATA)\n";
    return 1;
  }
  const ParsedCertificate parsed = read_certificate_file(cert_file);
  const ProblemRef ref = parsed.hyperplane ? parsed.hyperplane->problem_ref
                                           : parsed.witness->problem_ref;
  auto ds = load_split_shared(data_dir, ref.split);
  BinaryProblem p = ref.mode == Mode::pairwise
                        ? build_pairwise(ds, ref.positive, ref.negative)
                        : build_one_vs_rest(ds, ref.positive);
  VerificationReport rep;
  if (parsed.hyperplane) {
    rep = verify_hyperplane(*parsed.hyperplane, p, exact);
    std::cout << "hyperplane " << to_string(ref) << ": min margin "
              << format_double(rep.metric) << (exact ? " (exact)" : "")
              << ", " << (rep.passed ? "verified" : "NOT verified") << "\n";
  } else {
    rep = verify_witness(*parsed.witness, p, IpmConfig{}.eps_witness);
    std::cout << "witness " << to_string(ref) << ": residual "
              << format_double(rep.metric) << ", "
              << (rep.passed ? "verified" : "NOT verified") << "\n";
  }
  return rep.passed ? 0 : 1;
}

mpq_class parse_rational(const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0)
    throw Error(Fault::parse, "bad rational: " + text);
  q.canonicalize();
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear separability certification for MNIST digit sets"};
  app.require_subcommand(1);

  // fetch
  auto* fetch_cmd = app.add_subcommand("fetch", "download the MNIST files");
  std::string dest, base_url, checksums_file;
  fetch_cmd->add_option("--dest", dest, "destination directory")->required();
  fetch_cmd->add_option("--base-url", base_url, "mirror base URL");
  fetch_cmd->add_option("--checksums", checksums_file,
                        "JSON file with filename -> sha256 overrides");

  // pairwise / ovr
  CampaignCli pairwise_cli, ovr_cli;
  auto* pairwise_cmd =
      app.add_subcommand("pairwise", "pairwise separability campaign");
  add_campaign_flags(pairwise_cmd, pairwise_cli, true);
  auto* ovr_cmd =
      app.add_subcommand("ovr", "one-vs-rest separability campaign");
  add_campaign_flags(ovr_cmd, ovr_cli, false);

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "re-check a certificate file");
  std::string cert_file, verify_data;
  bool exact = false;
  verify_cmd->add_option("--cert", cert_file, "certificate file")->required();
  verify_cmd->add_option("--data", verify_data, "directory with MNIST files")
      ->envname("SEPSCAN_DATA");
  verify_cmd->add_flag("--exact", exact, "exact rational margin evaluation");

  // oracle2d (debugging aid)
  auto* oracle_cmd = app.add_subcommand(
      "oracle2d", "exact 2-D separability oracle (Fourier-Motzkin)");
  oracle_cmd->group("");  // hidden
  std::vector<std::string> point_specs;
  oracle_cmd->add_option("--point", point_specs,
                         "x,y,label with rational x and y (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fetch_cmd) {
      sepscan::FetchConfig config;
      if (!base_url.empty()) config.base_url = base_url;
      if (!checksums_file.empty())
        for (auto& [name, hash] : sepscan::load_checksum_file(checksums_file))
          config.sha256[name] = hash;
      const auto paths = sepscan::fetch_split(config, dest);
      for (const auto& p : paths) std::cout << p.string() << "\n";
      return 0;
    }
    if (*pairwise_cmd)
      return run_campaign_cli(pairwise_cli, sepscan::Mode::pairwise);
    if (*ovr_cmd) return run_campaign_cli(ovr_cli, sepscan::Mode::one_vs_rest);
    if (*verify_cmd) return run_verify(cert_file, verify_data, exact);
    if (*oracle_cmd) {
      sepscan::TinyProblem tp;
      for (const std::string& spec : point_specs) {
        const size_t c1 = spec.find(',');
        const size_t c2 = spec.rfind(',');
        if (c1 == std::string::npos || c2 == c1)
          throw sepscan::Error(sepscan::Fault::parse,
                               "--point expects x,y,label: " + spec);
        tp.points.push_back({parse_rational(spec.substr(0, c1)),
                             parse_rational(spec.substr(c1 + 1, c2 - c1 - 1))});
        tp.labels.push_back(std::stoi(spec.substr(c2 + 1)));
      }
      const bool separable = sepscan::oracle_separable_2d(tp);
      std::cout << (separable ? "separable" : "non-separable") << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
