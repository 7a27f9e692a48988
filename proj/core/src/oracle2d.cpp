#include "sepscan/oracle2d.hpp"

#include <algorithm>
#include <set>

namespace sepscan {

namespace {

// Row of the inequality system a . v >= c over variables v = (w1, w2, b).
struct Row {
  std::array<mpq_class, 3> a;
  mpq_class c;
};

// Scale-normalizes a row (largest |coefficient| becomes 1) so duplicates
// collapse; keeps the elimination's row growth in check.
void normalize(Row& row) {
  mpq_class biggest = 0;
  for (const auto& v : row.a) {
    const mpq_class mag = abs(v);
    if (mag > biggest) biggest = mag;
  }
  const mpq_class cmag = abs(row.c);
  if (cmag > biggest) biggest = cmag;
  if (biggest == 0) return;
  for (auto& v : row.a) v /= biggest;
  row.c /= biggest;
}

std::vector<Row> dedup(std::vector<Row> rows) {
  auto key = [](const Row& r) {
    return std::array<mpq_class, 4>{r.a[0], r.a[1], r.a[2], r.c};
  };
  std::set<std::array<mpq_class, 4>> seen;
  std::vector<Row> out;
  for (auto& r : rows) {
    normalize(r);
    if (seen.insert(key(r)).second) out.push_back(std::move(r));
  }
  return out;
}

// One Fourier-Motzkin step: eliminates variable v from `rows`.
std::vector<Row> eliminate(const std::vector<Row>& rows, int v) {
  std::vector<const Row*> lower, upper;
  std::vector<Row> out;
  for (const Row& r : rows) {
    if (r.a[v] > 0)
      lower.push_back(&r);
    else if (r.a[v] < 0)
      upper.push_back(&r);
    else
      out.push_back(r);
  }
  // With bounds on one side only, the variable absorbs those rows entirely.
  if (lower.empty() || upper.empty()) return dedup(std::move(out));
  for (const Row* lo : lower) {
    for (const Row* up : upper) {
      // Positive combination a_lo[v] * up - a_up[v] * lo removes v.
      Row combined;
      for (int k = 0; k < 3; ++k)
        combined.a[k] = lo->a[v] * up->a[k] - up->a[v] * lo->a[k];
      combined.c = lo->a[v] * up->c - up->a[v] * lo->c;
      out.push_back(std::move(combined));
    }
  }
  return dedup(std::move(out));
}

}  // namespace

bool oracle_separable_2d(const TinyProblem& tp) {
  const size_t n = tp.points.size();
  if (n > kOracleMaxPoints)
    throw Error(Fault::too_large,
                "oracle handles at most " + std::to_string(kOracleMaxPoints) +
                    " points, got " + std::to_string(n));
  if (tp.labels.size() != n)
    throw Error(Fault::invalid_argument, "labels and points differ in length");
  bool has_pos = false, has_neg = false;
  for (int lab : tp.labels) {
    if (lab == 1)
      has_pos = true;
    else if (lab == -1)
      has_neg = true;
    else
      throw Error(Fault::invalid_argument, "labels must be +1 or -1");
  }
  if (!has_pos || !has_neg)
    throw Error(Fault::empty_class, "both classes must be non-empty");

  std::vector<Row> rows;
  rows.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Row r;
    r.a[0] = tp.labels[i] * tp.points[i][0];
    r.a[1] = tp.labels[i] * tp.points[i][1];
    r.a[2] = tp.labels[i];
    r.c = 1;
    rows.push_back(std::move(r));
  }
  for (int v = 0; v < 3; ++v) rows = eliminate(rows, v);
  // All coefficients are gone; rows read 0 >= c.
  return std::all_of(rows.begin(), rows.end(),
                     [](const Row& r) { return r.c <= 0; });
}

}  // namespace sepscan
