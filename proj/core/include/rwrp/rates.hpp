#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rwrp/chain.hpp"
#include "rwrp/variational.hpp"

namespace rwrp {

/// t -> lambda(t), a convex function on R^d.
using LambdaFn = std::function<double(const std::vector<double>&)>;

/// lambda(t) = Lambda_l(g + t . x) - Lambda_l(g) on a periodic chain space.
/// For RWRE pass g = -V; then lambda is the quenched velocity log-MGF.
LambdaFn level1_lambda(const ChainStateSpace& space, const std::vector<double>& g);

struct LegendreOptions {
  double t_max = 5.0;     ///< grid is [-t_max, t_max]^d
  int grid_points = 41;   ///< per axis
  double tolerance = 1e-12;
  int max_sweeps = 200;
  double snap_tolerance = 1e-9;  ///< max distance for snapping zeta onto aff(hull)
  std::size_t threads = 1;
};

struct RatePoint {
  std::vector<double> zeta;
  bool infinite = false;       ///< zeta outside conv(R)
  double value = 0.0;
  std::vector<double> t;       ///< maximizer
  bool at_boundary = false;    ///< maximizer on the grid edge: value is a lower bound
};

struct RateCurve {
  std::vector<RatePoint> points;
  std::vector<std::string> warnings;
};

/// lambda*(zeta) = sup_t { zeta . t - lambda(t) }: best point of a product grid,
/// then golden-section coordinate ascent inside the neighbouring grid cell.
/// When `hull` is given, zeta outside conv(hull) is reported as infinite.
RateCurve legendre_rate(const LambdaFn& lambda, int dimension, const std::vector<std::vector<double>>& zetas,
                        const LegendreOptions& options = {}, const StepSet* hull = nullptr);

/// grad lambda(0) by central differences.
std::vector<double> lln_velocity(const LambdaFn& lambda, int dimension, double h = 1e-5);

/// Stationary law u_s v_s / sum u v of the g-tilted Perron chain (u left, v right vector).
PairMeasure tilted_stationary_measure(const ChainStateSpace& space, const std::vector<double>& g);

/// Marginal of a measure on memory l + 1 onto memory l (drops the last step).
PairMeasure project_measure(const ChainStateSpace& longer, const PairMeasure& mu);

struct Level2Options {
  double tolerance = 1e-9;  ///< L1 norm of the gradient mu - nu(g - V)
  /// When the line search can no longer decrease the objective (roundoff), a
  /// gradient norm below this still counts as converged.
  double stall_tolerance = 1e-6;
  int max_iterations = 2000;
  bool require_convergence = true;
};

struct Level2Result {
  double value = 0.0;
  std::vector<double> g;       ///< dual maximizer
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// I_l^V(mu) = sup_g { E^mu[g] - Lambda_l(g - V) } + Lambda_l(-V), by BFGS
/// ascent from g = 0. The gradient is mu - nu where nu is the tilted stationary law.
Level2Result level2_rate_dual(const ChainStateSpace& space, const std::vector<double>& V, const PairMeasure& mu,
                              const Level2Options& options = {});

struct Level2EntropyResult {
  bool infinite = false;
  double value = 0.0;
  double entropy = 0.0;
};

/// H_l(mu) + E^mu[V] + Lambda_l(-V).
Level2EntropyResult level2_rate_entropy(const ChainStateSpace& space, const std::vector<double>& V,
                                        const PairMeasure& mu, const EntropyOptions& options = {});

}  // namespace rwrp
