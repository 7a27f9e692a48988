#include "sepscan/harness.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

namespace sepscan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<ProblemRef> selected_refs(const CampaignSpec& spec) {
  std::vector<ProblemRef> refs;
  if (spec.mode == Mode::pairwise) {
    if (spec.all) {
      for (int a = 0; a < 10; ++a)
        for (int b = a + 1; b < 10; ++b)
          refs.push_back({spec.split, Mode::pairwise, a, b});
    } else {
      for (auto [a, b] : spec.pairs) {
        if (a == b)
          throw Error(Fault::invalid_argument,
                      "pairwise selection needs distinct digits");
        refs.push_back({spec.split, Mode::pairwise, a, b});
      }
    }
  } else {
    if (spec.all) {
      for (int d = 0; d < 10; ++d)
        refs.push_back({spec.split, Mode::one_vs_rest, d, ProblemRef::kRest});
    } else {
      for (int d : spec.digits)
        refs.push_back({spec.split, Mode::one_vs_rest, d, ProblemRef::kRest});
    }
  }
  if (refs.empty())
    throw Error(Fault::invalid_argument, "campaign selection is empty");
  std::sort(refs.begin(), refs.end(), [](const ProblemRef& x,
                                         const ProblemRef& y) {
    return std::tie(x.positive, x.negative) < std::tie(y.positive, y.negative);
  });
  return refs;
}

// Writes the certificate (or witness) file and re-verifies the parsed copy;
// the row only carries paths to files that check out.
template <typename Cert>
std::string write_and_check(const Cert& cert, const BinaryProblem& p,
                            const CampaignSpec& spec) {
  std::filesystem::create_directories(spec.cert_dir);
  const std::filesystem::path path =
      spec.cert_dir / (file_stem(cert.problem_ref) + ".json");
  write_certificate_file(path.string(),
                         serialize_certificate(cert, iso8601_utc_now()));
  const ParsedCertificate parsed = read_certificate_file(path.string());
  bool ok = false;
  if constexpr (std::is_same_v<Cert, HyperplaneCertificate>)
    ok = parsed.hyperplane && verify_hyperplane(*parsed.hyperplane, p).passed;
  else
    ok = parsed.witness &&
         verify_witness(*parsed.witness, p, spec.ipm.eps_witness).passed;
  if (!ok)
    throw Error(Fault::io, "serialized certificate failed re-verification: " +
                               path.string());
  return path.string();
}

CampaignRow run_one(const CampaignSpec& spec,
                    const std::shared_ptr<const LabeledDataset>& ds,
                    const ProblemRef& ref) {
  CampaignRow row;
  row.split = ref.split;
  row.mode = ref.mode;
  row.positive = ref.positive;
  row.negative = ref.negative;

  BinaryProblem p = ref.mode == Mode::pairwise
                        ? build_pairwise(ds, ref.positive, ref.negative)
                        : build_one_vs_rest(ds, ref.positive);
  for (int i = 0; i < p.n(); ++i)
    (p.y[i] > 0 ? row.n_pos : row.n_neg)++;

  // Exact duplicate fast path.
  {
    const auto start = Clock::now();
    auto conflict = conflict_precheck(p);
    if (conflict &&
        verify_witness(*conflict, p, spec.ipm.eps_witness).passed) {
      row.solve_seconds = seconds_since(start);
      row.status = "No";
      row.fast_path_used = true;
      row.cert_path = write_and_check(*conflict, p, spec);
      return row;
    }
  }

  auto [reduced, rec] = presolve(p);

  // Perceptron fast path; pairwise only, never authoritative for "No".
  if (spec.use_fast_path && ref.mode == Mode::pairwise) {
    const auto start = Clock::now();
    PerceptronStats stats;
    if (auto cert = perceptron_train(reduced, rec, spec.perceptron, &stats)) {
      row.solve_seconds = seconds_since(start);
      row.status = "Yes";
      row.fast_path_used = true;
      row.iterations = stats.epochs;
      row.cert_path = write_and_check(*cert, reduced, spec);
      return row;
    }
  }

  const PhaseOneLP lp = assemble_phase1(reduced);
  IpmConfig attempt = spec.ipm;
  Verdict verdict;
  double solve_seconds = 0;
  int iterations = 0;
  for (int retry = 0; retry <= 2; ++retry) {
    const auto start = Clock::now();
    const IpmResult r = solve_phase1(lp, attempt);
    solve_seconds += seconds_since(start);
    iterations += r.iterations;
    verdict = decide(r, reduced, rec, spec.ipm);
    verdict.diagnostics.retries = retry;
    row.objective = r.primal_obj;
    if (verdict.decided() || r.status != IpmStatus::Converged) break;
    attempt.tol_primal = std::max(attempt.tol_primal * 1e-3, 1e-12);
    attempt.tol_dual = std::max(attempt.tol_dual * 1e-3, 1e-12);
    attempt.tol_gap = std::max(attempt.tol_gap * 1e-3, 1e-12);
  }
  row.solve_seconds = solve_seconds;
  row.iterations = iterations;

  switch (verdict.kind) {
    case Verdict::Kind::Separable:
      row.status = "Yes";
      row.cert_path = write_and_check(*verdict.certificate, reduced, spec);
      break;
    case Verdict::Kind::NonSeparable:
      row.status = "No";
      row.cert_path = write_and_check(*verdict.witness, reduced, spec);
      break;
    case Verdict::Kind::Indeterminate:
      row.status = "Indeterminate";
      row.note = verdict.diagnostics.note;
      break;
  }
  return row;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

bool CampaignReport::all_decided() const {
  return std::all_of(rows.begin(), rows.end(), [](const CampaignRow& r) {
    return r.status != "Indeterminate";
  });
}

EnvironmentInfo probe_environment(int threads) {
  EnvironmentInfo env;
  env.threads = threads;
  env.cpu = "unknown";
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("model name", 0) == 0) {
      const size_t colon = line.find(':');
      if (colon != std::string::npos) {
        env.cpu = line.substr(colon + 1);
        while (!env.cpu.empty() && env.cpu.front() == ' ')
          env.cpu.erase(env.cpu.begin());
      }
      break;
    }
  }
#if defined(__VERSION__)
  env.build = std::string("cxx ") + __VERSION__;
#else
  env.build = "cxx unknown";
#endif
#ifdef NDEBUG
  env.build += ", release";
#else
  env.build += ", debug";
#endif
  return env;
}

CampaignReport run_campaign(const CampaignSpec& spec,
                            std::shared_ptr<const LabeledDataset> ds) {
  if (!ds) throw Error(Fault::invalid_argument, "null dataset");
  if (ds->split != spec.split)
    throw Error(Fault::invalid_argument,
                "dataset split " + to_string(ds->split) +
                    " does not match campaign split " + to_string(spec.split));
  const std::vector<ProblemRef> refs = selected_refs(spec);
  const int threads =
      spec.threads > 0 ? spec.threads
                       : std::max(1u, std::thread::hardware_concurrency());

  CampaignReport report;
  report.environment = probe_environment(threads);
  report.rows.resize(refs.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= refs.size()) return;
      try {
        report.rows[i] = run_one(spec, ds, refs[i]);
      } catch (const std::exception& e) {
        CampaignRow row;
        row.split = refs[i].split;
        row.mode = refs[i].mode;
        row.positive = refs[i].positive;
        row.negative = refs[i].negative;
        row.status = "Indeterminate";
        row.note = e.what();
        report.rows[i] = row;
      }
    }
  };

  if (threads == 1 || refs.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(threads, int(refs.size())); ++t)
      pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return report;
}

std::string report_to_csv(const CampaignReport& report) {
  std::string out;
  out += "# sepscan campaign report\n";
  out += "# cpu: " + report.environment.cpu + "\n";
  out += "# threads: " + std::to_string(report.environment.threads) + "\n";
  out += "# build: " + report.environment.build + "\n";
  out +=
      "split,mode,positive,negative,n_pos,n_neg,status,objective,iterations,"
      "solve_seconds,fast_path,cert_path\n";
  char solve_buf[32];
  for (const CampaignRow& r : report.rows) {
    std::snprintf(solve_buf, sizeof(solve_buf), "%.6f", r.solve_seconds);
    out += to_string(r.split) + "," + to_string(r.mode) + "," +
           std::to_string(r.positive) + ",";
    out += r.negative == ProblemRef::kRest ? "rest"
                                           : std::to_string(r.negative);
    out += "," + std::to_string(r.n_pos) + "," + std::to_string(r.n_neg) +
           "," + r.status + ",";
    out += r.objective ? format_double(*r.objective) : "";
    out += "," + std::to_string(r.iterations) + "," + solve_buf + "," +
           (r.fast_path_used ? "true" : "false") + "," +
           csv_escape(r.cert_path) + "\n";
  }
  return out;
}

std::vector<CampaignRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<CampaignRow> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("split,", 0) != 0)
        throw Error(Fault::parse, "unexpected CSV header: " + line);
      header_seen = true;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 12)
      throw Error(Fault::parse, "expected 12 CSV fields, got " +
                                    std::to_string(f.size()));
    CampaignRow r;
    r.split = split_from_string(f[0]);
    r.mode = f[1] == "pairwise" ? Mode::pairwise : Mode::one_vs_rest;
    r.positive = std::stoi(f[2]);
    r.negative = f[3] == "rest" ? ProblemRef::kRest : std::stoi(f[3]);
    r.n_pos = std::stoi(f[4]);
    r.n_neg = std::stoi(f[5]);
    r.status = f[6];
    if (!f[7].empty()) r.objective = std::stod(f[7]);
    r.iterations = std::stoi(f[8]);
    r.solve_seconds = std::stod(f[9]);
    r.fast_path_used = f[10] == "true";
    r.cert_path = f[11];
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw Error(Fault::parse, "CSV header missing");
  return rows;
}

std::string report_to_markdown(const CampaignReport& report) {
  std::string out;
  if (report.rows.empty()) return out;
  const Mode mode = report.rows.front().mode;
  const Split split = report.rows.front().split;

  if (mode == Mode::pairwise) {
    // Triangular grid: digits 0..8 as rows, 1..9 as columns.
    std::array<std::array<std::string, 10>, 10> cell;
    std::array<int, 10> count{};
    for (const CampaignRow& r : report.rows) {
      cell[r.positive][r.negative] = r.status;
      count[r.positive] = r.n_pos;
      count[r.negative] = r.n_neg;
    }
    out += "Pairwise linear separability of the MNIST " + to_string(split) +
           " set\n\n";
    out += "| digit (samples) |";
    for (int b = 1; b <= 9; ++b)
      out += " **" + std::to_string(b) + "** (" + std::to_string(count[b]) +
             ") |";
    out += "\n|---|";
    for (int b = 1; b <= 9; ++b) out += "---|";
    out += "\n";
    for (int a = 0; a <= 8; ++a) {
      out += "| **" + std::to_string(a) + "** (" + std::to_string(count[a]) +
             ") |";
      for (int b = 1; b <= 9; ++b) {
        out += " " + (b > a ? cell[a][b] : std::string()) + " |";
      }
      out += "\n";
    }
  } else {
    out += "One-vs-rest linear separability of the MNIST " + to_string(split) +
           " set\n\n";
    out += "| digit (positive samples) |";
    for (const CampaignRow& r : report.rows)
      out += " **" + std::to_string(r.positive) + "** (" +
             std::to_string(r.n_pos) + ") |";
    out += "\n|---|";
    for (size_t i = 0; i < report.rows.size(); ++i) out += "---|";
    out += "\n| separable (negative samples) |";
    for (const CampaignRow& r : report.rows)
      out += " " + r.status + " (" + std::to_string(r.n_neg) + ") |";
    out += "\n";
  }
  return out;
}

void emit_report(const CampaignReport& report, const std::string& format,
                 const std::filesystem::path& path) {
  std::string body;
  if (format == "csv")
    body = report_to_csv(report);
  else if (format == "md")
    body = report_to_markdown(report);
  else
    throw Error(Fault::invalid_argument, "unknown report format: " + format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Fault::io, "cannot open " + path.string());
  out << body;
  if (!out) throw Error(Fault::io, "write failed: " + path.string());
}

}  // namespace sepscan
