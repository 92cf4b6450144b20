#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rwrp {

/// Nonnegative sparse matrix in compressed-row form. Entries are stored as
/// exp(log_entry - log_scale) so that large potentials cannot overflow; the
/// represented matrix is exp(log_scale) * values.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_start;  // size n + 1
  std::vector<std::size_t> col;
  std::vector<double> val;
  double log_scale = 0.0;

  /// Builds from (row, col, log weight) triplets; duplicate positions are summed.
  static SparseMatrix from_log_triplets(std::size_t n, const std::vector<std::size_t>& rows,
                                        const std::vector<std::size_t>& cols,
                                        const std::vector<double>& log_weights);
  SparseMatrix transposed() const;
  /// Principal submatrix on the given (sorted) index set.
  SparseMatrix restricted(const std::vector<std::size_t>& keep) const;
  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
};

/// Strongly connected components (Tarjan), each sorted, listed in order of
/// their smallest member.
std::vector<std::vector<std::size_t>> strongly_connected_components(const SparseMatrix& m);

struct PerronOptions {
  double tolerance = 1e-12;     ///< relative Collatz-Wielandt gap
  int max_iterations = 100000;
  bool allow_reducible = false; ///< take the max over components instead of throwing
  bool left_vector = true;
  /// Polish both vectors by dense inverse iteration (at most kDenseSpectrumLimit states).
  bool refine_vectors = false;
};

struct PerronResult {
  double log_root = 0.0;
  /// Certified bracket: log_lower <= log rho <= log_upper.
  double log_lower = 0.0;
  double log_upper = 0.0;
  /// Observed contraction 1 - |lambda_2 + s| / (rho + s) of the shifted
  /// iteration. This is not the spectral gap of the matrix itself, which is
  /// zero for periodic operators; see `spectral_gap`.
  double iteration_contraction = 1.0;
  int iterations = 0;
  /// Right and left Perron vectors, each normalized to sum one.
  std::vector<double> right;
  std::vector<double> left;
  bool reducible = false;
  std::vector<std::string> warnings;
};

/// Perron root of an irreducible nonnegative matrix by shifted power iteration.
/// Throws ReducibleOperatorError (unless allowed) and NonConvergenceError.
PerronResult perron(const SparseMatrix& m, const PerronOptions& options = {});

inline constexpr std::size_t kDenseSpectrumLimit = 2000;

/// 1 - |lambda_2| / rho from the dense spectrum. Throws BoundExceededError
/// above kDenseSpectrumLimit states.
double spectral_gap(const SparseMatrix& m);

}  // namespace rwrp
