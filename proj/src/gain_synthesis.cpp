#include "mtobs/gain_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "mtobs/matrix_ops.hpp"
#include "sdp.hpp"

namespace mtobs {

std::string to_string(GainMethod m) {
  return m == GainMethod::ccl ? "ccl" : "descent";
}

GainMethod gain_method_from_string(const std::string& s) {
  if (s == "ccl") return GainMethod::ccl;
  if (s == "descent" || s == "spectral_descent") return GainMethod::spectral_descent;
  throw std::invalid_argument("unknown gain method '" + s + "'");
}

namespace {

struct DesignContext {
  int n = 0;   // CAV count
  int da = 0;  // per-CAV state dimension
  int dim = 0; // n * da
  Eigen::MatrixXd q;     // W (x) A
  Eigen::MatrixXd dc;
  Eigen::MatrixXd dcq;   // D_C (W (x) A)
  std::vector<std::vector<int>> support;    // measured indices per CAV block
  std::vector<std::vector<int>> ancestors;  // per state s: states with a path to s

  double rho(const ObserverGain& k) const {
    return spectral_radius(q - k.global() * dcq);
  }
};

DesignContext make_context(const Eigen::MatrixXd& w, const Eigen::MatrixXd& a,
                           const Eigen::MatrixXd& dc) {
  if (w.rows() != w.cols() || a.rows() != a.cols())
    throw std::invalid_argument("W and A must be square");
  DesignContext ctx;
  ctx.n = static_cast<int>(w.rows());
  ctx.da = static_cast<int>(a.rows());
  ctx.dim = ctx.n * ctx.da;
  if (dc.rows() != ctx.dim || dc.cols() != ctx.dim)
    throw std::invalid_argument("D_C dimension mismatch");
  ctx.q = kronecker(w, a);
  ctx.dc = dc;
  ctx.dcq = dc * ctx.q;

  ctx.support.resize(ctx.n);
  for (int i = 0; i < ctx.n; ++i)
    for (int s = 0; s < ctx.da; ++s)
      if (dc(i * ctx.da + s, i * ctx.da + s) != 0.0) ctx.support[i].push_back(s);

  // ancestors within the per-HDV dynamics: BFS over "state j feeds state v"
  ctx.ancestors.resize(ctx.da);
  for (int s = 0; s < ctx.da; ++s) {
    std::vector<bool> seen(ctx.da, false);
    std::deque<int> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      ctx.ancestors[s].push_back(v);
      for (int j = 0; j < ctx.da; ++j)
        if (!seen[j] && a(v, j) != 0.0) {
          seen[j] = true;
          queue.push_back(j);
        }
    }
    std::sort(ctx.ancestors[s].begin(), ctx.ancestors[s].end());
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// derivative-free spectral descent

SynthesisResult run_descent(const DesignContext& ctx, const SynthesisConfig& cfg) {
  SynthesisResult res;
  res.method = GainMethod::spectral_descent;
  const double target = 1.0 - cfg.margin;

  ObserverGain k = ObserverGain::zero(ctx.n, ctx.da);
  double best = ctx.rho(k);
  ++res.iterations;
  if (best < target) {
    res.gain = k;
    res.achieved_spectral_radius = best;
    res.converged = true;
    return res;
  }

  // injection pattern: each measured state feeds itself and everything that
  // can reach it, scaled down by the D_C multiplicity
  ObserverGain pattern = ObserverGain::zero(ctx.n, ctx.da);
  for (int i = 0; i < ctx.n; ++i)
    for (int s : ctx.support[i]) {
      const double mult = ctx.dc(i * ctx.da + s, i * ctx.da + s);
      for (int r : ctx.ancestors[s]) pattern.blocks[i](r, s) = 1.0 / mult;
    }

  ObserverGain best_k = k;
  for (int g = 1; g <= 75; ++g) {
    const double gamma = 0.02 * g;
    ObserverGain cand = pattern;
    for (auto& b : cand.blocks) b *= gamma;
    const double r = ctx.rho(cand);
    ++res.iterations;
    if (r < best) {
      best = r;
      best_k = cand;
    }
  }

  // coordinate descent over the effective entries
  struct Coord {
    int cav, row, col;
  };
  std::vector<Coord> coords;
  for (int i = 0; i < ctx.n; ++i)
    for (int s : ctx.support[i])
      for (int r : ctx.ancestors[s]) coords.push_back({i, r, s});

  double step = cfg.descent_init_step;
  k = best_k;
  for (int sweep = 0; sweep < cfg.descent_max_sweeps && best >= target; ++sweep) {
    bool improved = false;
    for (const Coord& c : coords) {
      for (double delta : {step, -step}) {
        k.blocks[c.cav](c.row, c.col) += delta;
        const double r = ctx.rho(k);
        ++res.iterations;
        if (r < best - 1e-12) {
          best = r;
          best_k = k;
          improved = true;
        } else {
          k.blocks[c.cav](c.row, c.col) -= delta;
        }
        if (best < target) break;
      }
      if (best < target) break;
    }
    if (!improved) {
      step *= cfg.descent_shrink;
      if (step < cfg.descent_min_step) break;
    }
  }

  res.gain = best_k;
  res.achieved_spectral_radius = best;
  res.converged = best < target;
  return res;
}

// ---------------------------------------------------------------------------
// cone-complementarity linearization over the design LMIs
//   [ X  Ahat^T ]        [ X  I ]
//   [ Ahat  Y   ] > 0,   [ I  Y ] > 0,   K block-diagonal,
// minimizing the linearized trace(X Y_prev + X_prev Y).

struct CclVariables {
  // variable layout inside the flat vector
  struct SymIndex {
    int a, b;
  };
  std::vector<SymIndex> x_vars, y_vars;
  struct KIndex {
    int cav, row, col;  // col restricted to the D_C support
  };
  std::vector<KIndex> k_vars;

  int total() const {
    return static_cast<int>(x_vars.size() + y_vars.size() + k_vars.size());
  }
};

sdp::Problem build_ccl_problem(const DesignContext& ctx, CclVariables& vars) {
  const int d = ctx.dim;
  vars.x_vars.clear();
  vars.y_vars.clear();
  vars.k_vars.clear();
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) vars.x_vars.push_back({a, b});
  vars.y_vars = vars.x_vars;
  for (int i = 0; i < ctx.n; ++i)
    for (int r = 0; r < ctx.da; ++r)
      for (int s : ctx.support[i]) vars.k_vars.push_back({i, r, s});

  sdp::Problem p;
  p.dim = 4 * d;  // blkdiag of the two 2d x 2d LMIs
  p.constant = Eigen::MatrixXd::Zero(p.dim, p.dim);
  // M1 constant: the K-independent part of Ahat is Q
  p.constant.block(d, 0, d, d) = ctx.q;
  p.constant.block(0, d, d, d) = ctx.q.transpose();
  // M2 constant: identity off-diagonal blocks
  p.constant.block(2 * d, 3 * d, d, d) = Eigen::MatrixXd::Identity(d, d);
  p.constant.block(3 * d, 2 * d, d, d) = Eigen::MatrixXd::Identity(d, d);

  p.vars.reserve(vars.total());
  auto sym_entries = [](int base_row, int base_col, int a, int b) {
    std::vector<sdp::Entry> e;
    e.push_back({base_row + a, base_col + b, 1.0});
    if (a != b) e.push_back({base_row + b, base_col + a, 1.0});
    return e;
  };
  for (const auto& [a, b] : vars.x_vars) {
    auto e = sym_entries(0, 0, a, b);
    auto e2 = sym_entries(2 * d, 2 * d, a, b);
    e.insert(e.end(), e2.begin(), e2.end());
    p.vars.push_back(std::move(e));
  }
  for (const auto& [a, b] : vars.y_vars) {
    auto e = sym_entries(d, d, a, b);
    auto e2 = sym_entries(3 * d, 3 * d, a, b);
    e.insert(e.end(), e2.begin(), e2.end());
    p.vars.push_back(std::move(e));
  }
  for (const auto& [cav, row, col] : vars.k_vars) {
    const int r_global = cav * ctx.da + row;
    const int c_global = cav * ctx.da + col;
    std::vector<sdp::Entry> e;
    for (int j = 0; j < d; ++j) {
      const double val = -ctx.dcq(c_global, j);
      if (val == 0.0) continue;
      e.push_back({d + r_global, j, val});
      e.push_back({j, d + r_global, val});
    }
    p.vars.push_back(std::move(e));
  }
  p.objective = Eigen::VectorXd::Zero(vars.total());
  return p;
}

void set_ccl_objective(sdp::Problem& p, const CclVariables& vars,
                       const Eigen::MatrixXd& x_prev, const Eigen::MatrixXd& y_prev) {
  int k = 0;
  for (const auto& [a, b] : vars.x_vars)
    p.objective(k++) = (a == b) ? y_prev(a, a) : 2.0 * y_prev(a, b);
  for (const auto& [a, b] : vars.y_vars)
    p.objective(k++) = (a == b) ? x_prev(a, a) : 2.0 * x_prev(a, b);
  // K enters the objective only through the constraints
}

void unpack(const CclVariables& vars, const Eigen::VectorXd& v, int d, int da,
            Eigen::MatrixXd& x, Eigen::MatrixXd& y, ObserverGain& k) {
  x.setZero(d, d);
  y.setZero(d, d);
  int idx = 0;
  for (const auto& [a, b] : vars.x_vars) {
    x(a, b) = x(b, a) = v(idx++);
  }
  for (const auto& [a, b] : vars.y_vars) {
    y(a, b) = y(b, a) = v(idx++);
  }
  for (auto& block : k.blocks) block.setZero();
  for (const auto& [cav, row, col] : vars.k_vars) k.blocks[cav](row, col) = v(idx++);
}

Eigen::VectorXd pack_start(const CclVariables& vars, const DesignContext& ctx,
                           const ObserverGain& k0) {
  const Eigen::MatrixXd ahat = ctx.q - k0.global() * ctx.dcq;
  const double sigma = ahat.jacobiSvd().singularValues()(0);
  const double tau = 1.2 * std::max(sigma, 1.0) + 0.1;

  Eigen::VectorXd v = Eigen::VectorXd::Zero(vars.total());
  int idx = 0;
  for (const auto& [a, b] : vars.x_vars) v(idx++) = (a == b) ? tau : 0.0;
  for (const auto& [a, b] : vars.y_vars) v(idx++) = (a == b) ? tau : 0.0;
  for (const auto& [cav, row, col] : vars.k_vars) v(idx++) = k0.blocks[cav](row, col);
  return v;
}

SynthesisResult run_ccl(const DesignContext& ctx, const SynthesisConfig& cfg) {
  SynthesisResult res;
  res.method = GainMethod::ccl;
  const int d = ctx.dim;
  const double target = 1.0 - cfg.margin;

  ObserverGain k = ObserverGain::zero(ctx.n, ctx.da);
  double best = ctx.rho(k);
  ObserverGain best_k = k;
  if (best < target) {
    res.gain = k;
    res.achieved_spectral_radius = best;
    res.converged = true;
    res.iterations = 0;
    return res;
  }

  CclVariables vars;
  sdp::Problem problem = build_ccl_problem(ctx, vars);
  Eigen::VectorXd v = pack_start(vars, ctx, k);

  Eigen::MatrixXd x_prev = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd y_prev = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd x(d, d), y(d, d);

  sdp::Options opt;
  opt.t_max = cfg.sdp_t_max;
  int budget = cfg.ccl_newton_budget;

  for (int outer = 0; outer < cfg.ccl_max_outer && budget > 0; ++outer) {
    set_ccl_objective(problem, vars, x_prev, y_prev);
    opt.newton_budget = budget;
    sdp::Result sol;
    try {
      sol = sdp::barrier_minimize(problem, v, opt);
    } catch (const std::invalid_argument&) {
      break;  // lost feasibility; fall back
    }
    budget -= sol.newton_steps;
    ++res.iterations;
    if (sol.newton_steps == 0) break;
    v = sol.v;
    unpack(vars, v, d, ctx.da, x, y, k);

    const double rho = ctx.rho(k);
    if (rho < best) {
      best = rho;
      best_k = k;
    }
    if (best < target) break;

    const double objective = (x * y_prev).trace() + (x_prev * y).trace();
    if (objective - 2.0 * d < cfg.ccl_tol) break;  // complementarity reached
    x_prev = x;
    y_prev = y;
  }

  res.gain = best_k;
  res.achieved_spectral_radius = best;
  res.converged = best < target;
  return res;
}

}  // namespace

SynthesisResult synthesize_gain(const Eigen::MatrixXd& w, const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& dc, const SynthesisConfig& cfg) {
  DesignContext ctx = make_context(w, a, dc);
  if (cfg.requested_blocks >= 0 && cfg.requested_blocks != ctx.n)
    throw std::invalid_argument(
        "gain structure must be block-diagonal with one block per CAV");

  if (cfg.method == GainMethod::spectral_descent) return run_descent(ctx, cfg);

  SynthesisResult res = run_ccl(ctx, cfg);
  if (!res.converged && cfg.allow_fallback) {
    SynthesisResult fb = run_descent(ctx, cfg);
    fb.iterations += res.iterations;
    if (fb.converged || fb.achieved_spectral_radius < res.achieved_spectral_radius)
      return fb;
  }
  return res;
}

}  // namespace mtobs
