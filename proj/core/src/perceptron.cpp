#include "sepscan/perceptron.hpp"

#include <numeric>
#include <vector>

namespace sepscan {

namespace {

// splitmix64; fixed across platforms so shuffles are reproducible everywhere,
// unlike std::shuffle whose output is implementation-defined.
struct SplitMix64 {
  uint64_t state;
  uint64_t next() {
    uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  // Unbiased bounded draw by rejection.
  uint64_t below(uint64_t bound) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }
};

void shuffle_indices(std::vector<int32_t>& order, SplitMix64& rng) {
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);
}

}  // namespace

std::optional<HyperplaneCertificate> perceptron_train(
    const BinaryProblem& p, const PresolveRecord& rec,
    const PerceptronConfig& cfg, PerceptronStats* stats) {
  const int n = p.n(), d = p.d();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  std::vector<int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng{cfg.shuffle_seed};

  int64_t updates = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_indices(order, rng);
    int mistakes = 0;
    for (const int32_t i : order) {
      const double margin = p.y[i] * (p.X.row(i).dot(w) + b);
      if (margin <= 0.0) {
        w += p.y[i] * p.X.row(i).transpose();
        b += p.y[i];
        ++mistakes;
      }
    }
    updates += mistakes;
    if (stats) {
      stats->epochs = epoch;
      stats->updates = updates;
    }
    if (mistakes == 0) {
      Eigen::VectorXd z(d + 1);
      z.head(d) = w;
      z[d] = b;
      HyperplaneCertificate cert = unscale_certificate(
          z, rec, p.ref, p.dataset_fingerprint, "perceptron");
      // A mistake-free pass shows margins > 0 in floating point; the exact
      // check closes the gap between that and a true proof. A failure here
      // means some true margin is non-positive, so training just continues.
      if (verify_hyperplane(cert, p, /*exact_mode=*/true).passed)
        return cert;
    }
  }
  return std::nullopt;
}

}  // namespace sepscan
