#include "sepscan/types.hpp"

namespace sepscan {

std::string to_string(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::test:
      return "test";
    case Split::combined:
      return "combined";
  }
  return "?";
}

std::string to_string(Mode m) {
  return m == Mode::pairwise ? "pairwise" : "one_vs_rest";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  if (s == "combined") return Split::combined;
  throw Error(Fault::parse, "unknown split: " + s);
}

std::string to_string(const ProblemRef& ref) {
  std::string neg = ref.negative == ProblemRef::kRest
                        ? "rest"
                        : std::to_string(ref.negative);
  return to_string(ref.split) + "/" + to_string(ref.mode) + "/" +
         std::to_string(ref.positive) + "-" + neg;
}

ProblemRef problem_ref_from_string(const std::string& s) {
  const size_t p1 = s.find('/');
  const size_t p2 = s.find('/', p1 + 1);
  const size_t dash = s.rfind('-');
  if (p1 == std::string::npos || p2 == std::string::npos ||
      dash == std::string::npos || dash < p2)
    throw Error(Fault::parse, "bad problem ref: " + s);
  ProblemRef ref;
  ref.split = split_from_string(s.substr(0, p1));
  const std::string mode = s.substr(p1 + 1, p2 - p1 - 1);
  if (mode == "pairwise")
    ref.mode = Mode::pairwise;
  else if (mode == "one_vs_rest")
    ref.mode = Mode::one_vs_rest;
  else
    throw Error(Fault::parse, "bad problem ref mode: " + mode);
  ref.positive = std::stoi(s.substr(p2 + 1, dash - p2 - 1));
  const std::string neg = s.substr(dash + 1);
  ref.negative = neg == "rest" ? ProblemRef::kRest : std::stoi(neg);
  return ref;
}

std::string file_stem(const ProblemRef& ref) {
  if (ref.mode == Mode::one_vs_rest)
    return to_string(ref.split) + "_ovr_" + std::to_string(ref.positive);
  return to_string(ref.split) + "_pairwise_" + std::to_string(ref.positive) +
         "_" + std::to_string(ref.negative);
}

}  // namespace sepscan
