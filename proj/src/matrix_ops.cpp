#include "mtobs/matrix_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mtobs {

void SensorPlacement::validate(int state_dim) const {
  if (cav_count < 1) throw std::invalid_argument("placement needs cav_count >= 1");
  if (static_cast<int>(measured.size()) != cav_count)
    throw std::invalid_argument("placement lists do not match cav_count");
  for (const auto& list : measured)
    for (int idx : list)
      if (idx < 0 || idx >= state_dim)
        throw std::out_of_range("measured state index " + std::to_string(idx) +
                                " outside [0, " + std::to_string(state_dim) + ")");
}

std::vector<int> SensorPlacement::all_measured() const {
  std::vector<int> out;
  for (const auto& list : measured) out.insert(out.end(), list.begin(), list.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void ObserverGain::validate() const {
  if (blocks.empty()) throw std::invalid_argument("gain has no blocks");
  const auto dim = blocks[0].rows();
  for (const auto& b : blocks)
    if (b.rows() != dim || b.cols() != dim)
      throw std::invalid_argument("gain blocks must be square with uniform dimension");
}

ObserverGain ObserverGain::zero(int n, int dim) {
  ObserverGain g;
  g.blocks.assign(n, Eigen::MatrixXd::Zero(dim, dim));
  return g;
}

Eigen::MatrixXd ObserverGain::global() const {
  validate();
  const int n = block_count(), d = block_dim();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n * d, n * d);
  for (int i = 0; i < n; ++i) k.block(i * d, i * d, d, d) = blocks[i];
  return k;
}

std::string ObserverGain::serialize() const {
  std::ostringstream out;
  out << "blocks " << blocks.size() << "\n";
  for (const auto& b : blocks) out << serialize_matrix(b);
  return out.str();
}

ObserverGain ObserverGain::parse(std::istream& in) {
  std::string word;
  int n = 0;
  if (!(in >> word >> n) || word != "blocks" || n < 1)
    throw std::invalid_argument("expected 'blocks N' header");
  ObserverGain g;
  for (int i = 0; i < n; ++i) g.blocks.push_back(parse_matrix(in));
  g.validate();
  return g;
}

ObserverGain ObserverGain::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs,
                          int max_dim) {
  const long rows = lhs.rows() * rhs.rows();
  const long cols = lhs.cols() * rhs.cols();
  if (rows > max_dim || cols > max_dim)
    throw std::invalid_argument("kronecker result exceeds dimension cap " +
                                std::to_string(max_dim));
  Eigen::MatrixXd out(rows, cols);
  for (long i = 0; i < lhs.rows(); ++i)
    for (long j = 0; j < lhs.cols(); ++j)
      out.block(i * rhs.rows(), j * rhs.cols(), rhs.rows(), rhs.cols()) =
          lhs(i, j) * rhs;
  return out;
}

Eigen::MatrixXd build_row_stochastic(const DirectedGraph& g, WeightRule rule) {
  const int n = g.node_count();
  if (n < 1) throw std::invalid_argument("empty graph");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (!g.has_self_loop(i))
      throw std::invalid_argument("node " + std::to_string(i) +
                                  " has no self-loop; consensus needs i in N_i");
    const auto nbrs = g.in_neighbors(i);
    if (rule == WeightRule::uniform_neighbors) {
      for (int j : nbrs) w(i, j) = 1.0 / static_cast<double>(nbrs.size());
    } else {
      double sum = 0.0;
      for (int j : nbrs) {
        double wj = g.weight(j, i).value_or(1.0);
        if (wj <= 0.0)
          throw std::invalid_argument("nonpositive link weight on (" +
                                      std::to_string(j) + ", " + std::to_string(i) + ")");
        w(i, j) = wj;
        sum += wj;
      }
      for (int j : nbrs) w(i, j) /= sum;
    }
  }
  return w;
}

Eigen::MatrixXd build_dc(const SensorPlacement& placement, const DirectedGraph& w_graph,
                         int state_dim) {
  placement.validate(state_dim);
  const int n = w_graph.node_count();
  if (n != placement.cav_count)
    throw std::invalid_argument("w_graph size does not match placement.cav_count");
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(n * state_dim, n * state_dim);
  for (int i = 0; i < n; ++i) {
    if (!w_graph.has_self_loop(i))
      throw std::invalid_argument("node " + std::to_string(i) +
                                  " has no self-loop; neighborhoods must include self");
    for (int j : w_graph.in_neighbors(i))
      for (int idx : placement.measured[j])
        dc(i * state_dim + idx, i * state_dim + idx) += 1.0;
  }
  return dc;
}

Eigen::MatrixXd assemble_ahat(const Eigen::MatrixXd& w, const Eigen::MatrixXd& a,
                              const ObserverGain& k, const Eigen::MatrixXd& dc) {
  if (w.rows() != w.cols() || a.rows() != a.cols())
    throw std::invalid_argument("W and A must be square");
  k.validate();
  const int n = static_cast<int>(w.rows());
  const int d = static_cast<int>(a.rows());
  if (k.block_count() != n || k.block_dim() != d)
    throw std::invalid_argument("gain blocks must be n blocks of the state dimension");
  if (dc.rows() != n * d || dc.cols() != n * d)
    throw std::invalid_argument("D_C dimension mismatch");
  Eigen::MatrixXd q = kronecker(w, a);
  return q - k.global() * (dc * q);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral radius of non-square matrix");
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_row_stochastic(const Eigen::MatrixXd& w, double tol) {
  if (w.rows() != w.cols()) return false;
  if (w.minCoeff() < -tol) return false;
  for (long i = 0; i < w.rows(); ++i)
    if (std::abs(w.row(i).sum() - 1.0) > tol) return false;
  return true;
}

std::string serialize_matrix(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out.precision(17);
  out << m.rows() << " " << m.cols() << "\n";
  for (long i = 0; i < m.rows(); ++i) {
    for (long j = 0; j < m.cols(); ++j) {
      if (j) out << " ";
      out << m(i, j);
    }
    out << "\n";
  }
  return out.str();
}

Eigen::MatrixXd parse_matrix(std::istream& in) {
  long rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw std::invalid_argument("expected 'rows cols' matrix header");
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j)
      if (!(in >> m(i, j))) throw std::invalid_argument("truncated matrix body");
  return m;
}

Eigen::MatrixXd parse_matrix_string(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix(in);
}

}  // namespace mtobs
