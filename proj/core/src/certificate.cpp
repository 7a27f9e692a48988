#include "sepscan/certificate.hpp"

#include <gmpxx.h>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sepscan/problem.hpp"

namespace sepscan {

namespace {

void check_refs(const ProblemRef& cert_ref, const std::string& cert_fp,
                const BinaryProblem& p) {
  if (!(cert_ref == p.ref))
    throw Error(Fault::fingerprint_mismatch,
                "certificate references " + to_string(cert_ref) +
                    " but problem is " + to_string(p.ref));
  if (cert_fp != p.dataset_fingerprint)
    throw Error(Fault::fingerprint_mismatch,
                "certificate fingerprint " + cert_fp +
                    " does not match dataset " + p.dataset_fingerprint);
}

// Decimal literal -> mantissa * 10^exp10, exactly.
struct Decimal {
  mpz_class mantissa;
  long exp10 = 0;
};

Decimal parse_decimal(const std::string& text) {
  size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-'))
    negative = text[i++] == '-';
  std::string digits;
  long frac_len = 0;
  for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i)
    digits.push_back(text[i]);
  if (i < text.size() && text[i] == '.') {
    ++i;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i) {
      digits.push_back(text[i]);
      ++frac_len;
    }
  }
  long exp = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    exp = std::stol(text.substr(i));
    i = text.size();
  }
  if (digits.empty() || i != text.size())
    throw Error(Fault::parse, "bad decimal literal: " + text);
  Decimal d;
  d.mantissa = mpz_class(digits, 10);
  if (negative) d.mantissa = -d.mantissa;
  d.exp10 = exp - frac_len;
  return d;
}

mpq_class decimal_to_mpq(const Decimal& d) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, ulong(std::abs(d.exp10)));
  if (d.exp10 >= 0) return mpq_class(d.mantissa * scale);
  mpq_class q(d.mantissa, scale);
  q.canonicalize();
  return q;
}

// Exact margins over integer raw pixels: bring all coefficients to a common
// power-of-ten denominator so each margin is a single integer accumulation.
VerificationReport exact_margins_integer_pixels(
    const HyperplaneCertificate& cert, const BinaryProblem& p) {
  const int d = p.raw_dim();
  std::vector<Decimal> coef(d + 1);
  long min_exp = 0;
  for (int k = 0; k < d; ++k) {
    coef[k] = parse_decimal(format_double(cert.w[k]));
    if (coef[k].mantissa != 0) min_exp = std::min(min_exp, coef[k].exp10);
  }
  coef[d] = parse_decimal(format_double(cert.b));
  if (coef[d].mantissa != 0) min_exp = std::min(min_exp, coef[d].exp10);

  std::vector<mpz_class> a(d + 1);
  for (int k = 0; k <= d; ++k) {
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, ulong(coef[k].exp10 - min_exp));
    a[k] = coef[k].mantissa * pow10;
  }

  VerificationReport rep;
  rep.exact_mode = true;
  rep.checked_samples = p.n();
  mpz_class margin, min_margin;
  bool first = true;
  bool all_positive = true;
  for (int i = 0; i < p.n(); ++i) {
    const uint8_t* px = p.source->image(p.sample_index[i]);
    margin = a[d];
    for (int k = 0; k < d; ++k) {
      const unsigned v = px[k];
      if (v != 0 && a[k] != 0) margin += a[k] * v;
    }
    if (p.y[i] < 0) margin = -margin;
    if (margin <= 0) all_positive = false;
    if (first || margin < min_margin) {
      min_margin = margin;
      first = false;
    }
  }
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, ulong(-min_exp));
  rep.metric = mpq_class(min_margin, den).get_d();
  rep.passed = all_positive;
  return rep;
}

// Exact margins over arbitrary (synthetic) raw features, full rational path.
VerificationReport exact_margins_rational(const HyperplaneCertificate& cert,
                                          const BinaryProblem& p) {
  const int d = p.raw_dim();
  std::vector<mpq_class> w(d);
  for (int k = 0; k < d; ++k)
    w[k] = decimal_to_mpq(parse_decimal(format_double(cert.w[k])));
  const mpq_class b = decimal_to_mpq(parse_decimal(format_double(cert.b)));

  VerificationReport rep;
  rep.exact_mode = true;
  rep.checked_samples = p.n();
  mpq_class min_margin;
  bool first = true;
  bool all_positive = true;
  for (int i = 0; i < p.n(); ++i) {
    mpq_class margin = b;
    for (int k = 0; k < d; ++k) {
      if (w[k] != 0) margin += w[k] * mpq_class(p.raw(i, k));
    }
    if (p.y[i] < 0) margin = -margin;
    if (margin <= 0) all_positive = false;
    if (first || margin < min_margin) {
      min_margin = margin;
      first = false;
    }
  }
  rep.metric = min_margin.get_d();
  rep.passed = all_positive;
  return rep;
}

std::string json_ref(const ProblemRef& ref) {
  std::string neg = ref.negative == ProblemRef::kRest
                        ? "\"rest\""
                        : std::to_string(ref.negative);
  return "{\"split\":\"" + to_string(ref.split) + "\",\"mode\":\"" +
         to_string(ref.mode) + "\",\"positive\":" +
         std::to_string(ref.positive) + ",\"negative\":" + neg + "}";
}

void append_weights(std::string& out, const std::vector<WeightedSample>& ws) {
  out.push_back('[');
  for (size_t i = 0; i < ws.size(); ++i) {
    if (i) out.push_back(',');
    out += "[" + std::to_string(ws[i].sample) + "," +
           format_double(ws[i].weight) + "]";
  }
  out.push_back(']');
}

ProblemRef ref_from_json(const nlohmann::json& j) {
  ProblemRef ref;
  ref.split = split_from_string(j.at("split").get<std::string>());
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "pairwise")
    ref.mode = Mode::pairwise;
  else if (mode == "one_vs_rest")
    ref.mode = Mode::one_vs_rest;
  else
    throw Error(Fault::parse, "unknown mode: " + mode);
  ref.positive = j.at("positive").get<int>();
  const auto& neg = j.at("negative");
  ref.negative =
      neg.is_string() ? ProblemRef::kRest : neg.get<int>();
  return ref;
}

std::vector<WeightedSample> weights_from_json(const nlohmann::json& j) {
  std::vector<WeightedSample> out;
  out.reserve(j.size());
  for (const auto& e : j)
    out.push_back({e.at(0).get<int32_t>(), e.at(1).get<double>()});
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

VerificationReport verify_hyperplane(const HyperplaneCertificate& cert,
                                     const BinaryProblem& p, bool exact_mode) {
  check_refs(cert.problem_ref, cert.dataset_fingerprint, p);
  if (int(cert.w.size()) != p.raw_dim())
    throw Error(Fault::dimension_mismatch,
                "certificate has " + std::to_string(cert.w.size()) +
                    " weights, problem has " + std::to_string(p.raw_dim()) +
                    " raw features");
  if (cert.w.isZero(0.0) && cert.b == 0.0) {
    VerificationReport rep;
    rep.exact_mode = exact_mode;
    rep.checked_samples = p.n();
    return rep;  // all margins zero, not strict
  }
  if (exact_mode)
    return p.source ? exact_margins_integer_pixels(cert, p)
                    : exact_margins_rational(cert, p);

  VerificationReport rep;
  rep.checked_samples = p.n();
  const int d = p.raw_dim();
  double min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.n(); ++i) {
    double dot = cert.b;
    if (p.source) {
      const uint8_t* px = p.source->image(p.sample_index[i]);
      for (int k = 0; k < d; ++k) dot += cert.w[k] * double(px[k]);
    } else {
      for (int k = 0; k < d; ++k) dot += cert.w[k] * p.X_raw(i, k);
    }
    min_margin = std::min(min_margin, p.y[i] * dot);
  }
  rep.metric = min_margin;
  rep.passed = min_margin > 0.0;
  return rep;
}

VerificationReport verify_witness(const IntersectionWitness& wit,
                                  const BinaryProblem& p, double eps) {
  check_refs(wit.problem_ref, wit.dataset_fingerprint, p);
  if (wit.pos_weights.empty() || wit.neg_weights.empty())
    throw Error(Fault::invalid_argument, "witness side is empty");

  const int d = p.raw_dim();
  Eigen::VectorXd mean_pos = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd mean_neg = Eigen::VectorXd::Zero(d);
  double checked = 0;

  auto accumulate = [&](const std::vector<WeightedSample>& side,
                        double expected_label, Eigen::VectorXd& mean) {
    double sum = 0;
    for (const auto& [idx, weight] : side) {
      if (idx < 0 || idx >= p.n())
        throw Error(Fault::index_out_of_range,
                    "witness sample " + std::to_string(idx) +
                        " outside [0, " + std::to_string(p.n()) + ")");
      if (weight <= 0)
        throw Error(Fault::negative_weight,
                    "witness weight " + format_double(weight) +
                        " for sample " + std::to_string(idx) +
                        " not strictly positive");
      if (p.y[idx] != expected_label)
        throw Error(Fault::invalid_argument,
                    "witness sample " + std::to_string(idx) +
                        " is on the wrong side");
      sum += weight;
    }
    for (const auto& [idx, weight] : side) {
      const double scaled = weight / sum;
      for (int k = 0; k < d; ++k)
        mean[k] += scaled * p.raw(idx, k) * p.feature_scale;
      checked += 1;
    }
  };
  accumulate(wit.pos_weights, 1.0, mean_pos);
  accumulate(wit.neg_weights, -1.0, mean_neg);

  VerificationReport rep;
  rep.checked_samples = int64_t(checked);
  rep.metric = (mean_pos - mean_neg).cwiseAbs().maxCoeff();
  rep.passed = rep.metric <= eps;
  return rep;
}

HyperplaneCertificate unscale_certificate(const Eigen::VectorXd& z,
                                          const PresolveRecord& rec,
                                          const ProblemRef& ref,
                                          std::string dataset_fingerprint,
                                          std::string solver_provenance) {
  const int kept = int(rec.kept_columns.size());
  if (int(z.size()) != kept + 1)
    throw Error(Fault::record_mismatch,
                "solution has " + std::to_string(z.size()) +
                    " entries, presolve record expects " +
                    std::to_string(kept + 1));
  HyperplaneCertificate cert;
  cert.w = Eigen::VectorXd::Zero(rec.original_dim);
  for (int j = 0; j < kept; ++j) {
    const int32_t k = rec.kept_columns[j];
    if (k < 0 || k >= rec.original_dim)
      throw Error(Fault::record_mismatch,
                  "kept column " + std::to_string(k) + " out of range");
    cert.w[k] = z[j] * rec.scale[j];
  }
  cert.b = z[kept];
  cert.problem_ref = ref;
  cert.dataset_fingerprint = std::move(dataset_fingerprint);
  cert.solver_provenance = std::move(solver_provenance);
  return cert;
}

std::string serialize_certificate(const HyperplaneCertificate& cert,
                                  const std::string& created_at) {
  std::string out = "{\"type\":\"hyperplane\",\"problem_ref\":";
  out += json_ref(cert.problem_ref);
  out += ",\"dataset_fingerprint\":\"" + cert.dataset_fingerprint + "\"";
  out += ",\"w\":[";
  for (int k = 0; k < cert.w.size(); ++k) {
    if (k) out.push_back(',');
    out += format_double(cert.w[k]);
  }
  out += "],\"b\":" + format_double(cert.b);
  out += ",\"solver_provenance\":\"" + cert.solver_provenance + "\"";
  if (!created_at.empty()) out += ",\"created_at\":\"" + created_at + "\"";
  out += "}\n";
  return out;
}

std::string serialize_certificate(const IntersectionWitness& wit,
                                  const std::string& created_at) {
  std::string out = "{\"type\":\"witness\",\"problem_ref\":";
  out += json_ref(wit.problem_ref);
  out += ",\"dataset_fingerprint\":\"" + wit.dataset_fingerprint + "\"";
  out += ",\"pos_weights\":";
  append_weights(out, wit.pos_weights);
  out += ",\"neg_weights\":";
  append_weights(out, wit.neg_weights);
  out += ",\"solver_provenance\":\"" + wit.solver_provenance + "\"";
  if (!created_at.empty()) out += ",\"created_at\":\"" + created_at + "\"";
  out += "}\n";
  return out;
}

ParsedCertificate parse_certificate(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Fault::parse, std::string("certificate JSON: ") + e.what());
  }
  try {
    ParsedCertificate out;
    const std::string type = j.at("type").get<std::string>();
    if (type == "hyperplane") {
      HyperplaneCertificate cert;
      cert.problem_ref = ref_from_json(j.at("problem_ref"));
      cert.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
      const auto& w = j.at("w");
      cert.w.resize(Eigen::Index(w.size()));
      for (size_t k = 0; k < w.size(); ++k) cert.w[Eigen::Index(k)] = w[k].get<double>();
      cert.b = j.at("b").get<double>();
      cert.solver_provenance = j.value("solver_provenance", "");
      out.hyperplane = std::move(cert);
    } else if (type == "witness") {
      IntersectionWitness wit;
      wit.problem_ref = ref_from_json(j.at("problem_ref"));
      wit.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
      wit.pos_weights = weights_from_json(j.at("pos_weights"));
      wit.neg_weights = weights_from_json(j.at("neg_weights"));
      wit.solver_provenance = j.value("solver_provenance", "");
      out.witness = std::move(wit);
    } else {
      throw Error(Fault::parse, "unknown certificate type: " + type);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Fault::parse, std::string("certificate fields: ") + e.what());
  }
}

ParsedCertificate read_certificate_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Fault::io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_certificate(ss.str());
}

void write_certificate_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Fault::io, "cannot open " + path + " for writing");
  out << body;
  if (!out) throw Error(Fault::io, "write failed: " + path);
}

}  // namespace sepscan
