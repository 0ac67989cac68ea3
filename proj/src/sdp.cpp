#include "sdp.hpp"

#include <cmath>
#include <stdexcept>

namespace mtobs::sdp {

Eigen::MatrixXd assemble(const Problem& p, const Eigen::VectorXd& v) {
  Eigen::MatrixXd m = p.constant;
  for (int k = 0; k < static_cast<int>(p.vars.size()); ++k)
    for (const Entry& e : p.vars[k]) m(e.row, e.col) += v(k) * e.value;
  return m;
}

namespace {

// log det via Cholesky; nullopt when not positive definite
bool logdet(const Eigen::MatrixXd& m, double& out) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  out = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return true;
}

}  // namespace

Result barrier_minimize(const Problem& p, const Eigen::VectorXd& v0, const Options& opt) {
  const int nv = static_cast<int>(p.vars.size());
  Result res;
  res.v = v0;

  Eigen::MatrixXd m = assemble(p, res.v);
  double ld;
  if (!logdet(m, ld))
    throw std::invalid_argument("barrier solve started from an infeasible point");

  for (double t = opt.t_init; t <= opt.t_max; t *= opt.t_mult) {
    for (;;) {
      if (res.newton_steps >= opt.newton_budget) return res;
      ++res.newton_steps;

      Eigen::LLT<Eigen::MatrixXd> llt(m);
      if (llt.info() != Eigen::Success) return res;  // numerically lost feasibility
      const Eigen::MatrixXd g =
          llt.solve(Eigen::MatrixXd::Identity(p.dim, p.dim));  // M^{-1}

      // gradient of t c^T v - logdet M(v)
      Eigen::VectorXd grad(nv);
      for (int k = 0; k < nv; ++k) {
        double tr = 0.0;
        for (const Entry& e : p.vars[k]) tr += e.value * g(e.col, e.row);
        grad(k) = t * p.objective(k) - tr;
      }

      // Hessian H_kl = tr(M^{-1} S_k M^{-1} S_l)
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(nv, nv);
      for (int k = 0; k < nv; ++k) {
        for (int l = k; l < nv; ++l) {
          double sum = 0.0;
          for (const Entry& ek : p.vars[k])
            for (const Entry& el : p.vars[l])
              sum += ek.value * el.value * g(ek.col, el.row) * g(el.col, ek.row);
          hess(k, l) = sum;
          hess(l, k) = sum;
        }
        hess(k, k) += opt.ridge;
      }

      Eigen::LDLT<Eigen::MatrixXd> hldlt(hess);
      if (hldlt.info() != Eigen::Success) return res;
      const Eigen::VectorXd dv = hldlt.solve(-grad);
      const double decrement2 = -grad.dot(dv);
      if (!(decrement2 > 0) || decrement2 / 2.0 < opt.newton_tol) break;  // stage done

      // backtracking line search on the merit t c^T v - logdet
      const double merit0 = t * p.objective.dot(res.v) - ld;
      double alpha = 1.0;
      bool stepped = false;
      for (int bt = 0; bt < 40; ++bt) {
        const Eigen::VectorXd cand = res.v + alpha * dv;
        const Eigen::MatrixXd mc = assemble(p, cand);
        double ldc;
        if (logdet(mc, ldc)) {
          const double merit = t * p.objective.dot(cand) - ldc;
          if (merit < merit0 - 1e-4 * alpha * decrement2) {
            res.v = cand;
            m = mc;
            ld = ldc;
            stepped = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!stepped) break;  // line search exhausted; move to next stage
    }
    res.ok = true;
  }
  return res;
}

}  // namespace mtobs::sdp
