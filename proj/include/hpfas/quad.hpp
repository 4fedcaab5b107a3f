// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_QUAD_HPP
#define HPFAS_QUAD_HPP

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace hpfas::quad {

/// Tolerances and rule sizes shared by every integral in the library.
struct QuadSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 400;
  int spatial_points_per_axis = 64; // one- and two-dimensional spatial averages
  int spatial_points_3d = 32;       // three-dimensional spatial averages
  double tail_mass = 1e-10;         // mass dropped when truncating [0, inf)

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod integration of f over [a, b].
/// The interval is first cut into `initial_pieces` equal parts. Stops when the
/// summed error estimate drops below max(abs_tol, rel_tol |value|); otherwise
/// returns the best estimate with converged = false.
QuadResult integrate_finite(const Integrand& f, double a, double b, const QuadSpec& spec,
                            int initial_pieces = 1);

/// Upper truncation point for integrals against the noncentral chi-square density.
double ncchi2_truncation(double s, const QuadSpec& spec);

/// int_0^inf ncchi2_pdf(r, s) g(r) dr, truncated at the (1 - tail_mass) quantile.
/// The reported error adds tail_mass * g_bound for the dropped tail.
QuadResult integrate_semiinf_ncchi2(const Integrand& g, double s, const QuadSpec& spec,
                                    double g_bound = 1.0);

/// Same, with a precomputed truncation point.
QuadResult integrate_semiinf_ncchi2(const Integrand& g, double s, double upper,
                                    const QuadSpec& spec, double g_bound = 1.0);

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussLegendreRule gauss_legendre(int n);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

using SpatialIntegrand = std::function<double(const Eigen::VectorXd&)>;

/// Tensor Gauss-Legendre integral over a box of dimension 1 to 3. The error is
/// the difference to the same rule with points_per_axis + 8 points; the finer
/// value is returned, flagged converged when the error is within
/// max(abs_tol, rel_tol |value|). Nodes are evaluated in parallel and summed in
/// a fixed order.
QuadResult integrate_spatial(const SpatialIntegrand& f, const std::vector<Interval>& box,
                             int points_per_axis, double abs_tol = 1e-7, double rel_tol = 1e-4);

/// Lazily built interpolation table for a positive function of x > 0.
///
/// log f is interpolated against log10 x on Chebyshev-Lobatto nodes, one
/// segment per decade, each built on first use. A segment doubles its degree
/// from 8 up to 64 until the interpolant reproduces the new nodes to
/// `log_tol`, and halves itself when that is not enough. Decades in which f
/// underflows to zero are evaluated directly. Every segment depends only on f
/// and its decade, so the table returns the same value regardless of the order
/// in which points are requested.
class LogChebyshevTable {
public:
  struct Options {
    double log_tol = 1e-8;
    int max_degree = 64;
    int max_split_depth = 4;
  };

  explicit LogChebyshevTable(std::function<double(double)> f);
  LogChebyshevTable(std::function<double(double)> f, Options options);

  double operator()(double x) const;

  std::size_t function_evaluations() const;
  bool all_converged() const;

private:
  struct Segment {
    double t0 = 0.0;
    double t1 = 0.0;
    std::vector<double> values; // log f at the Lobatto nodes, t0 end first
  };
  struct Decade {
    bool direct = false;
    bool converged = true;
    std::vector<Segment> segments;
  };

  const Decade& decade(int k) const;
  void build_segment(double t0, double t1, int depth, Decade& out, std::size_t& evals) const;

  std::function<double(double)> f_;
  Options options_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::unique_ptr<Decade>> decades_;
  mutable std::size_t evaluations_ = 0;
};

} // namespace hpfas::quad

#endif // HPFAS_QUAD_HPP
