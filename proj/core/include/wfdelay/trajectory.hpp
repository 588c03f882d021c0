#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "wfdelay/errors.hpp"
#include "wfdelay/kinematics.hpp"

namespace wfdelay {

inline constexpr int kDefaultDegree = 16;

// One polynomial piece. Coefficients live on the basis interval [alpha, beta];
// the validity interval [a, b] is contained in it, so restricting a segment
// never touches the coefficients and evaluation stays bit-identical.
class Segment {
 public:
  Segment(double a, double b, Eigen::MatrixXd coeffs);
  Segment(double a, double b, double alpha, double beta, Eigen::MatrixXd coeffs);

  double lo() const { return a_; }
  double hi() const { return b_; }
  double basis_lo() const { return alpha_; }
  double basis_hi() const { return beta_; }
  int degree() const { return static_cast<int>(coeffs_.cols()) - 1; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }

  // k-th time derivative, no domain check.
  Vec3 value(double t, int k = 0) const;
  // Derivatives 0..order written to out[0..order].
  void eval_into(double t, int order, Vec3* out) const;
  std::vector<Vec3> eval(double t, int order) const;

  Segment restricted(double a, double b) const;

  // Max speed on a uniform check grid of at least 4D points.
  double max_speed() const { return max_speed_; }

 private:
  void init();

  double a_, b_, alpha_, beta_;
  Eigen::MatrixXd coeffs_;
  std::vector<Eigen::MatrixXd> deriv_;  // deriv_[k]: time-scaled coefficients of the k-th derivative
  double max_speed_ = 0.0;
};

struct JoinReport {
  double time = 0.0;
  std::vector<double> mismatch;  // relative defect per derivative order
  double max() const;
};

// Relative derivative mismatch at t of orders 0..order, with denominator max(1, |L|, |R|).
JoinReport join_mismatch(const Segment& left, const Segment& right, double t, int order);

class WorldLine {
 public:
  WorldLine() = default;
  // Segments must be sorted and abut exactly. origin marks the segment nearest to
  // the initial data; at a shared endpoint the segment closer to origin wins.
  WorldLine(ChargeParams charge, std::vector<Segment> segments, int join_order = 3, double join_tol = 1e-6,
            int origin = 0);

  const ChargeParams& charge() const { return charge_; }
  double lo() const;
  double hi() const;
  bool empty() const { return segs_.empty(); }
  std::size_t size() const { return segs_.size(); }
  const Segment& segment(std::size_t k) const { return *segs_[k]; }
  int origin() const { return origin_; }
  int join_order() const { return join_order_; }
  double join_tol() const { return join_tol_; }
  double speed_bound() const { return speed_bound_; }
  int min_degree() const;

  std::size_t locate(double t) const;  // throws OutOfDomainError
  bool covers(double t) const { return !empty() && t >= lo() && t <= hi(); }
  std::vector<Vec3> eval(double t, int order) const;
  void eval_into(double t, int order, Vec3* out) const;
  Vec3 position(double t) const;
  Vec3 velocity(double t) const;
  Vec3 momentum(double t) const;
  PhasePoint phase(double t) const;

  // Sub-worldline made of restricted copies; values inside [a, b] are unchanged.
  WorldLine restricted(double a, double b) const;

 private:
  friend struct WorldLineAccess;
  ChargeParams charge_;
  std::vector<std::shared_ptr<const Segment>> segs_;
  int join_order_ = 3;
  double join_tol_ = 1e-6;
  int origin_ = 0;
  double speed_bound_ = 0.0;
};

struct ParamSamples {
  std::vector<double> s;
  std::vector<Vec3> y;
};

struct FitOptions {
  double max_residual = 1e-8;  // relative to 1 + max |y|
};

struct FitResult {
  Segment segment;
  double node_residual;  // max |fit(s_k) - y_k| / (1 + max |y|)
  double tail;           // size of the two highest coefficients, same scaling
};

// Chebyshev fit of degree D over [s_0, s_last] (or the given interval).
FitResult fit_segment(const ParamSamples& samples, int degree, const FitOptions& opt = {});
FitResult fit_segment(const ParamSamples& samples, int degree, double a, double b, const FitOptions& opt = {});

// Samples y(t) with a monotone parameter tau(t) and its rate dtau/dt.
struct ParametricSamples {
  std::vector<double> t;
  std::vector<double> tau;
  std::vector<double> rate;
  std::vector<Vec3> y;
};

struct ReparamResult {
  ParamSamples samples;      // (tau*, y) pairs
  std::vector<double> t_of;  // solved t* per target
  double max_residual = 0.0; // max |tau(t*) - tau*|
};

ReparamResult reparameterize(const ParametricSamples& parametric, const std::vector<double>& target_tau);

struct AppendResult {
  WorldLine line;
  JoinReport join;
};

AppendResult append_segment(const WorldLine& w, Segment s, Side side);

}  // namespace wfdelay
