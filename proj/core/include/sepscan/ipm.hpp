#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>

#include "sepscan/certificate.hpp"
#include "sepscan/problem.hpp"

namespace sepscan {

/// Phase-I feasibility program for the margin system M z >= 1 with
/// z = (w, b): minimize sum(xi) subject to M z + xi >= 1, xi >= 0. The
/// optimum is 0 exactly when the margin system is feasible, i.e. when the
/// problem is strictly separable; otherwise the optimal dual multipliers
/// form an intersection witness.
struct PhaseOneLP {
  RowMatrixXd M;  // n x (d+1); row i = y_i * [x_i, 1]
  int n = 0;
  int d = 0;  // feature count; M has d+1 columns
};

struct IpmConfig {
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
  double tol_gap = 1e-8;
  int max_iters = 200;
  double ridge = 1e-10;  // normal-equation regularization, escalates to 1e-6
  double eps_obj_per_sample = 1e-9;  // separability threshold on optimum / n
  double eps_witness = 1e-7;         // witness residual tolerance
  // Bound |z_k| <= z_bound. Keeps the phase-I optimal face bounded on
  // nearly-separable instances (where a weak separator would let the central
  // path drift to infinity); far beyond any certificate scale that actually
  // occurs, so it never binds on decidable instances.
  double z_bound = 1e6;
};

enum class IpmStatus { Converged, IterationLimit, NumericalFailure };

std::string to_string(IpmStatus s);

struct IpmResult {
  Eigen::VectorXd z;       // d+1; (w, b) in presolved scaled units
  Eigen::VectorXd xi;      // n, nonnegative slacks
  Eigen::VectorXd lambda;  // n, dual multipliers in [0, 1]
  double primal_obj = 0;   // sum(xi)
  double dual_obj = 0;     // sum(lambda)
  double residual_primal = 0;
  double residual_dual = 0;  // ||M' lambda||_inf / (1 + ||lambda||_1)
  // Full stationarity residual including the z-box duals; agrees with
  // residual_dual away from the box.
  double residual_stationarity = 0;
  // z_bound * (sum of box duals); the box's share of the duality gap,
  // vanishing at convergence whenever the box is slack.
  double box_dual_mass = 0;
  double gap = 0;
  int iterations = 0;
  IpmStatus status = IpmStatus::NumericalFailure;
};

/// Per-iterate observer for property tests (weak duality etc.).
using IterateCallback = std::function<void(const IpmResult&)>;

PhaseOneLP assemble_phase1(const BinaryProblem& p);

/// Mehrotra-style predictor-corrector on the primal-dual pair
///   primal: min sum(xi)  s.t. M z + xi - s = 1, xi >= 0, s >= 0
///   dual:   max sum(lambda)  s.t. M' lambda = 0, 0 <= lambda <= 1.
/// Each iteration eliminates the slack blocks and solves one (d+1)x(d+1)
/// normal-equation system with a ridge on the diagonal. Deterministic for
/// identical inputs and config.
IpmResult solve_phase1(const PhaseOneLP& lp, const IpmConfig& cfg,
                       const IterateCallback& on_iterate = nullptr);

struct VerdictDiagnostics {
  IpmStatus status = IpmStatus::NumericalFailure;
  double primal_obj = 0;
  double residual_primal = 0;
  double residual_dual = 0;
  double gap = 0;
  int iterations = 0;
  int retries = 0;
  std::string note;
};

struct Verdict {
  enum class Kind { Separable, NonSeparable, Indeterminate };
  Kind kind = Kind::Indeterminate;
  std::optional<HyperplaneCertificate> certificate;  // Separable
  std::optional<IntersectionWitness> witness;        // NonSeparable
  VerdictDiagnostics diagnostics;

  bool decided() const { return kind != Kind::Indeterminate; }
};

std::string to_string(Verdict::Kind k);

/// Turns a converged phase-I result into a verdict. Separable requires the
/// phase-I optimum below eps_obj_per_sample * n and a verifying hyperplane
/// over raw features; NonSeparable requires a near-null normalized dual with
/// mass >= 1 and a verifying witness. Anything else is Indeterminate.
Verdict decide(const IpmResult& r, const BinaryProblem& p,
               const PresolveRecord& rec, const IpmConfig& cfg);

/// Full pipeline for one problem: conflict precheck, presolve, phase-I
/// solve, decide. On an Indeterminate outcome with a converged solver the
/// solve is retried with tolerances tightened by 1e-3 (twice at most), as
/// the decision thresholds allow. Populates `result` with the last solver
/// output when non-null.
Verdict decide_problem(const BinaryProblem& p, const IpmConfig& cfg,
                       IpmResult* result = nullptr);

}  // namespace sepscan
