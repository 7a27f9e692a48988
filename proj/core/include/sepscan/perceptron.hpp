#pragma once

#include <cstdint>
#include <optional>

#include "sepscan/certificate.hpp"
#include "sepscan/problem.hpp"

namespace sepscan {

struct PerceptronConfig {
  int max_epochs = 2000;
  uint64_t shuffle_seed = 42;
};

struct PerceptronStats {
  int epochs = 0;
  int64_t updates = 0;
};

/// Classic additive perceptron on the presolved scaled features with a bias
/// feature appended: w <- w + y_i x_i on each mistake, one deterministic
/// shuffled pass per epoch. Returns a certificate only after a full
/// mistake-free epoch whose unscaled hyperplane passes exact-mode
/// verification; otherwise nothing. Absence of a result says nothing about
/// separability.
std::optional<HyperplaneCertificate> perceptron_train(
    const BinaryProblem& p, const PresolveRecord& rec,
    const PerceptronConfig& cfg, PerceptronStats* stats = nullptr);

}  // namespace sepscan
