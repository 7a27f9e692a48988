#include "sepscan/ipm.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace sepscan {

namespace {

constexpr double kStepDamping = 0.9995;
constexpr double kRidgeCeiling = 1e-6;
constexpr int kNormalEqBlockRows = 8192;

// A = M' diag(w) M accumulated over fixed row blocks; deterministic order.
void accumulate_normal_matrix(const RowMatrixXd& M, const Eigen::VectorXd& w,
                              Eigen::MatrixXd& A, RowMatrixXd& scratch) {
  const int n = int(M.rows());
  A.setZero();
  for (int i0 = 0; i0 < n; i0 += kNormalEqBlockRows) {
    const int b = std::min(kNormalEqBlockRows, n - i0);
    auto rows = M.middleRows(i0, b);
    scratch.topRows(b) = w.segment(i0, b).asDiagonal() * rows;
    A.noalias() += rows.transpose() * scratch.topRows(b);
  }
}

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = 1.0;
  for (int i = 0; i < v.size(); ++i)
    if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

}  // namespace

std::string to_string(IpmStatus s) {
  switch (s) {
    case IpmStatus::Converged:
      return "Converged";
    case IpmStatus::IterationLimit:
      return "IterationLimit";
    case IpmStatus::NumericalFailure:
      return "NumericalFailure";
  }
  return "?";
}

std::string to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Separable:
      return "Separable";
    case Verdict::Kind::NonSeparable:
      return "NonSeparable";
    case Verdict::Kind::Indeterminate:
      return "Indeterminate";
  }
  return "?";
}

PhaseOneLP assemble_phase1(const BinaryProblem& p) {
  PhaseOneLP lp;
  lp.n = p.n();
  lp.d = p.d();
  lp.M.resize(lp.n, lp.d + 1);
  lp.M.leftCols(lp.d) = p.y.asDiagonal() * p.X;
  lp.M.col(lp.d) = p.y;
  return lp;
}

// Primal block: z in [-R, R] (p = R - z, q = z + R), slacks xi, s >= 0.
// Dual block: lambda in [0, 1] (t = 1 - lambda), box duals sp, sq >= 0.
// The z box keeps the optimal face bounded: on nearly-separable instances a
// weak-separator direction otherwise lets the central path drift to
// infinity, which stalls the duality gap and wrecks the normal-equation
// conditioning. The box never binds on instances whose certificates exist at
// sane scales, so verdicts are unaffected.
IpmResult solve_phase1(const PhaseOneLP& lp, const IpmConfig& cfg,
                       const IterateCallback& on_iterate) {
  const int n = lp.n, k = lp.d + 1;
  const double R = cfg.z_bound;
  const RowMatrixXd& M = lp.M;
  const double total = 2.0 * n + 2.0 * k;

  IpmResult res;
  res.status = IpmStatus::IterationLimit;

  Eigen::MatrixXd A(k, k);
  RowMatrixXd scratch(std::min(kNormalEqBlockRows, n), k);
  Eigen::LLT<Eigen::MatrixXd> llt;

  // Factors A + ridge*I with the spec's escalation schedule.
  double ridge_used = cfg.ridge;
  auto factorize = [&]() {
    double added = 0.0;
    ridge_used = cfg.ridge;
    for (;;) {
      A.diagonal().array() += ridge_used - added;
      added = ridge_used;
      llt.compute(A);
      if (llt.info() == Eigen::Success) return true;
      if (ridge_used >= kRidgeCeiling) return false;
      ridge_used = std::min(ridge_used * 10.0, kRidgeCeiling);
    }
  };

  // Least-squares warm start toward margins 1, then positivity shifts.
  accumulate_normal_matrix(M, Eigen::VectorXd::Ones(n), A, scratch);
  A.diagonal().array() += std::max(cfg.ridge, 1e-8);
  llt.compute(A);
  Eigen::VectorXd z;
  if (llt.info() == Eigen::Success)
    z = llt.solve(M.transpose() * Eigen::VectorXd::Ones(n))
            .cwiseMax(-0.5 * R)
            .cwiseMin(0.5 * R);
  else
    z = Eigen::VectorXd::Zero(k);

  Eigen::VectorXd margins = M * z;
  Eigen::VectorXd xi = (1.0 - margins.array()).max(0.0) + 1.0;
  Eigen::VectorXd s = (margins.array() - 1.0).max(0.0) + 1.0;
  Eigen::VectorXd lam = Eigen::VectorXd::Constant(n, 0.5);
  Eigen::VectorXd t = Eigen::VectorXd::Constant(n, 0.5);
  const double mu_start = (xi.dot(t) + s.dot(lam)) / (2.0 * n);
  Eigen::VectorXd sp = Eigen::VectorXd::Constant(k, mu_start / R);
  Eigen::VectorXd sq = Eigen::VectorXd::Constant(k, mu_start / R);
  Eigen::VectorXd p = (R - z.array()).matrix();
  Eigen::VectorXd q = (z.array() + R).matrix();

  Eigen::VectorXd rp(n), rdz(k), dinv(n), dz_diag(k), g(n), rhs(k), resid(k);
  Eigen::VectorXd dz(k), dlam(n), dxi(n), ds(n), dsp(k), dsq(k);
  Eigen::VectorXd dz_a(k), dlam_a(n), dxi_a(n), ds_a(n), dsp_a(k), dsq_a(k);

  auto fill_result = [&](int iters) {
    res.z = z;
    res.xi = xi;
    res.lambda = lam;
    res.primal_obj = xi.sum();
    res.dual_obj = lam.sum();
    res.box_dual_mass = R * (sp.sum() + sq.sum());
    res.iterations = iters;
    rp = Eigen::VectorXd::Ones(n) - (margins + xi - s);
    res.residual_primal =
        rp.cwiseAbs().maxCoeff() /
        (1.0 + std::max(xi.cwiseAbs().maxCoeff(), s.cwiseAbs().maxCoeff()));
    rdz = sp - sq - M.transpose() * lam;
    const double lam_norm1 = lam.lpNorm<1>();
    res.residual_dual = (M.transpose() * lam).cwiseAbs().maxCoeff() /
                        (1.0 + lam_norm1);
    res.residual_stationarity =
        rdz.cwiseAbs().maxCoeff() / (1.0 + lam_norm1);
    res.gap = std::abs(res.primal_obj - res.dual_obj) /
              (1.0 + std::abs(res.primal_obj));
  };

  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    margins.noalias() = M * z;
    p = (R - z.array()).matrix();
    q = (z.array() + R).matrix();
    fill_result(iter);
    if (on_iterate) on_iterate(res);
    if (res.residual_primal <= cfg.tol_primal &&
        std::max(res.residual_dual, res.residual_stationarity) <=
            cfg.tol_dual &&
        res.gap <= cfg.tol_gap) {
      res.status = IpmStatus::Converged;
      return res;
    }
    if (iter == cfg.max_iters) break;

    rp = Eigen::VectorXd::Ones(n) - (margins + xi - s);
    rdz = sp - sq - M.transpose() * lam;
    const double mu =
        (xi.dot(t) + s.dot(lam) + p.dot(sp) + q.dot(sq)) / total;

    dinv = (xi.array() / t.array() + s.array() / lam.array()).inverse();
    dz_diag = (sp.array() / p.array() + sq.array() / q.array()).matrix();
    accumulate_normal_matrix(M, dinv, A, scratch);
    A.diagonal() += dz_diag;
    if (!factorize()) {
      res.status = IpmStatus::NumericalFailure;
      return res;
    }

    // Normal solve with one iterative-refinement step against the
    // regularized matrix (A holds A_reg after factorize()).
    auto normal_solve = [&](const Eigen::VectorXd& b) {
      Eigen::VectorXd x = llt.solve(b);
      resid = b;
      resid.noalias() -= A * x;
      x += llt.solve(resid);
      return x;
    };

    // One Newton direction for complementarity target sigmu; corr terms
    // carry Mehrotra's second-order correction. Reuses the factorization.
    auto newton = [&](double sigmu, const Eigen::VectorXd* cxi,
                      const Eigen::VectorXd* cs, const Eigen::VectorXd* cp,
                      const Eigen::VectorXd* cq, Eigen::VectorXd& odz,
                      Eigen::VectorXd& odlam, Eigen::VectorXd& odxi,
                      Eigen::VectorXd& ods, Eigen::VectorXd& odsp,
                      Eigen::VectorXd& odsq) {
      g = rp.array() - (sigmu - xi.array() * t.array()) / t.array() +
          (sigmu - s.array() * lam.array()) / lam.array();
      if (cxi) g.array() += cxi->array() / t.array();
      if (cs) g.array() -= cs->array() / lam.array();
      rhs.noalias() = M.transpose() * (dinv.asDiagonal() * g);
      rhs -= rdz;
      rhs.array() -= (sigmu - p.array() * sp.array()) / p.array();
      rhs.array() += (sigmu - q.array() * sq.array()) / q.array();
      if (cp) rhs.array() += cp->array() / p.array();
      if (cq) rhs.array() -= cq->array() / q.array();
      odz = normal_solve(rhs);
      odlam = dinv.asDiagonal() * (g - M * odz);
      odxi = (sigmu - xi.array() * t.array() + xi.array() * odlam.array()) /
             t.array();
      if (cxi) odxi.array() -= cxi->array() / t.array();
      ods = (sigmu - s.array() * lam.array() - s.array() * odlam.array()) /
            lam.array();
      if (cs) ods.array() -= cs->array() / lam.array();
      odsp = (sigmu - p.array() * sp.array() + sp.array() * odz.array()) /
             p.array();
      if (cp) odsp.array() -= cp->array() / p.array();
      odsq = (sigmu - q.array() * sq.array() - sq.array() * odz.array()) /
             q.array();
      if (cq) odsq.array() -= cq->array() / q.array();
    };

    auto primal_step = [&](const Eigen::VectorXd& vdz,
                           const Eigen::VectorXd& vdxi,
                           const Eigen::VectorXd& vds) {
      return kStepDamping *
             std::min(std::min(max_step(xi, vdxi), max_step(s, vds)),
                      std::min(max_step(p, -vdz), max_step(q, vdz)));
    };
    auto dual_step = [&](const Eigen::VectorXd& vdlam,
                         const Eigen::VectorXd& vdsp,
                         const Eigen::VectorXd& vdsq) {
      return kStepDamping *
             std::min(std::min(max_step(lam, vdlam), max_step(t, -vdlam)),
                      std::min(max_step(sp, vdsp), max_step(sq, vdsq)));
    };

    // Predictor (affine scaling).
    newton(0.0, nullptr, nullptr, nullptr, nullptr, dz_a, dlam_a, dxi_a, ds_a,
           dsp_a, dsq_a);
    const double ap_a = primal_step(dz_a, dxi_a, ds_a);
    const double ad_a = dual_step(dlam_a, dsp_a, dsq_a);
    const double mu_aff =
        ((xi + ap_a * dxi_a).dot(t - ad_a * dlam_a) +
         (s + ap_a * ds_a).dot(lam + ad_a * dlam_a) +
         (p - ap_a * dz_a).dot(sp + ad_a * dsp_a) +
         (q + ap_a * dz_a).dot(sq + ad_a * dsq_a)) /
        total;
    const double ratio = mu_aff / mu;
    const double sigma = std::min(1.0, std::max(0.0, ratio * ratio * ratio));

    // Complementarity target, floored at a tenth of what the gap criterion
    // needs: driving mu further down before the residuals converge only
    // destroys the normal-equation conditioning.
    const double mu_needed = 0.1 * cfg.tol_gap * (1.0 + xi.sum()) / total;
    const double sigmu = std::max(sigma * mu, std::min(mu_needed, mu));

    // Corrector; the affine products become the correction terms.
    dxi_a.array() *= -dlam_a.array();          // dxi_aff * dt_aff
    ds_a.array() *= dlam_a.array();            // ds_aff * dlam_aff
    dsp_a.array() *= -dz_a.array();            // dp_aff * dsp_aff
    dsq_a.array() *= dz_a.array();             // dq_aff * dsq_aff
    newton(sigmu, &dxi_a, &ds_a, &dsp_a, &dsq_a, dz, dlam, dxi, ds, dsp, dsq);

    const double ap = primal_step(dz, dxi, ds);
    const double ad = dual_step(dlam, dsp, dsq);
    z += ap * dz;
    xi += ap * dxi;
    s += ap * ds;
    lam += ad * dlam;
    t -= ad * dlam;
    sp += ad * dsp;
    sq += ad * dsq;
  }

  margins.noalias() = M * z;
  p = (R - z.array()).matrix();
  q = (z.array() + R).matrix();
  fill_result(cfg.max_iters);
  return res;
}

Verdict decide(const IpmResult& r, const BinaryProblem& p,
               const PresolveRecord& rec, const IpmConfig& cfg) {
  Verdict v;
  v.diagnostics.status = r.status;
  v.diagnostics.primal_obj = r.primal_obj;
  v.diagnostics.residual_primal = r.residual_primal;
  v.diagnostics.residual_dual = r.residual_dual;
  v.diagnostics.gap = r.gap;
  v.diagnostics.iterations = r.iterations;

  if (r.status != IpmStatus::Converged) {
    v.diagnostics.note = "solver status " + to_string(r.status);
    return v;
  }

  if (r.primal_obj <= cfg.eps_obj_per_sample * p.n()) {
    HyperplaneCertificate cert = unscale_certificate(
        r.z, rec, p.ref, p.dataset_fingerprint, "ipm");
    const VerificationReport rep = verify_hyperplane(cert, p);
    if (rep.passed) {
      v.kind = Verdict::Kind::Separable;
      v.certificate = std::move(cert);
      return v;
    }
    v.diagnostics.note = "phase-I optimum near zero but hyperplane margin " +
                         format_double(rep.metric) + " not strictly positive";
    return v;
  }

  const double mass = r.lambda.sum();
  const double dual_residual_over_mass =
      mass > 0 ? r.residual_dual * (1.0 + r.lambda.lpNorm<1>()) / mass
               : std::numeric_limits<double>::infinity();
  if (mass >= 1.0 && dual_residual_over_mass <= cfg.eps_witness) {
    IntersectionWitness wit;
    wit.problem_ref = p.ref;
    wit.dataset_fingerprint = p.dataset_fingerprint;
    wit.solver_provenance = "ipm";
    for (int i = 0; i < p.n(); ++i) {
      if (r.lambda[i] > 0) {
        if (p.y[i] > 0)
          wit.pos_weights.push_back({int32_t(i), r.lambda[i]});
        else
          wit.neg_weights.push_back({int32_t(i), r.lambda[i]});
      }
    }
    const VerificationReport rep = verify_witness(wit, p, cfg.eps_witness);
    if (rep.passed) {
      v.kind = Verdict::Kind::NonSeparable;
      v.witness = std::move(wit);
      return v;
    }
    v.diagnostics.note = "dual mass " + format_double(mass) +
                         " but witness residual " + format_double(rep.metric) +
                         " above " + format_double(cfg.eps_witness);
    return v;
  }

  v.diagnostics.note =
      "between decision thresholds: objective " + format_double(r.primal_obj) +
      ", dual mass " + format_double(mass);
  return v;
}

Verdict decide_problem(const BinaryProblem& p, const IpmConfig& cfg,
                       IpmResult* result) {
  if (auto wit = conflict_precheck(p)) {
    const VerificationReport rep = verify_witness(*wit, p, cfg.eps_witness);
    if (rep.passed) {
      Verdict v;
      v.kind = Verdict::Kind::NonSeparable;
      v.witness = std::move(wit);
      v.diagnostics.status = IpmStatus::Converged;
      v.diagnostics.note = "identical sample in both classes";
      return v;
    }
  }

  auto [reduced, rec] = presolve(p);
  const PhaseOneLP lp = assemble_phase1(reduced);

  IpmConfig attempt = cfg;
  Verdict v;
  for (int retry = 0; retry <= 2; ++retry) {
    IpmResult r = solve_phase1(lp, attempt);
    if (result) *result = r;
    v = decide(r, reduced, rec, cfg);
    v.diagnostics.retries = retry;
    if (v.decided() || r.status != IpmStatus::Converged) return v;
    attempt.tol_primal = std::max(attempt.tol_primal * 1e-3, 1e-12);
    attempt.tol_dual = std::max(attempt.tol_dual * 1e-3, 1e-12);
    attempt.tol_gap = std::max(attempt.tol_gap * 1e-3, 1e-12);
  }
  return v;
}

}  // namespace sepscan
