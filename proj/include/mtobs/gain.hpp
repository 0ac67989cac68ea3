#ifndef MTOBS_GAIN_HPP
#define MTOBS_GAIN_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace mtobs {

/// Block-diagonal observer gain: one square block per CAV, all blocks of the
/// same dimension (the global state dimension N*m).
struct ObserverGain {
  std::vector<Eigen::MatrixXd> blocks;

  int block_count() const { return static_cast<int>(blocks.size()); }
  int block_dim() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].rows()); }

  /// Throws unless every block is square with a uniform dimension.
  void validate() const;

  /// All-zero gain with n blocks of size dim.
  static ObserverGain zero(int n, int dim);

  /// The induced global block-diagonal matrix; off-blocks are exactly zero.
  Eigen::MatrixXd global() const;

  // matrix text format, one block per section
  std::string serialize() const;
  static ObserverGain parse(std::istream& in);
  static ObserverGain parse_string(const std::string& text);
};

}  // namespace mtobs

#endif
