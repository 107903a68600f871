#ifndef DOCOSIM_LOSSES_HPP
#define DOCOSIM_LOSSES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "docosim/decision_set.hpp"
#include "docosim/rng.hpp"

namespace docosim
{

//
// f(x) = (alpha/2)||x - c||^2 + <w, x>. alpha = 0 gives a linear loss; an
// empty center means c = 0.
//
struct LossFn
{
  double alpha = 0.0;
  Vector center;
  Vector w;

  static LossFn linear(Vector w) { return {0.0, Vector(), std::move(w)}; }
  static LossFn iso_quadratic(double alpha, Vector c, Vector w)
  {
    return {alpha, std::move(c), std::move(w)};
  }

  double value(const Vector &x) const
  {
    double v = w.dot(x);
    if (alpha != 0.0)
    {
      v += 0.5 * alpha * (center.size() ? (x - center).squaredNorm() : x.squaredNorm());
    }
    return v;
  }

  Vector gradient(const Vector &x) const
  {
    if (alpha == 0.0)
    {
      return w;
    }
    return center.size() ? Vector(alpha * (x - center) + w) : Vector(alpha * x + w);
  }

  // Upper bound on ||grad f|| over a set of radius R.
  double lipschitz_bound(double R) const
  {
    const double cn = center.size() ? center.norm() : 0.0;
    return w.norm() + alpha * (R + cn);
  }
};

//
// Sum of one round's losses, stored as (A/2)||x||^2 + <b, x> + c.
//
struct QuadraticSum
{
  double alpha = 0.0;
  Vector linear;
  double constant = 0.0;

  explicit QuadraticSum(int d = 0) : linear(Vector::Zero(d)) {}

  void add(const LossFn &f)
  {
    linear += f.w;
    if (f.alpha != 0.0)
    {
      alpha += f.alpha;
      if (f.center.size())
      {
        linear -= f.alpha * f.center;
        constant += 0.5 * f.alpha * f.center.squaredNorm();
      }
    }
  }

  void add(const QuadraticSum &o)
  {
    alpha += o.alpha;
    linear += o.linear;
    constant += o.constant;
  }

  double value(const Vector &x) const
  {
    return 0.5 * alpha * x.squaredNorm() + linear.dot(x) + constant;
  }
};

//
// Interval structure of the lower-bound adversaries. boundaries has Z+2
// entries 0 = b_0 < b_1 < ... < b_{Z+1} = T; interval i covers rounds
// b_i + 1 .. b_{i+1}.
//
struct CommSplit
{
  int K = 1;
  int Z = 0;
  std::vector<int> boundaries;

  int intervals() const { return Z + 1; }

  int interval_of(int t) const
  {
    auto it = std::lower_bound(boundaries.begin() + 1, boundaries.end(), t);
    return static_cast<int>(it - boundaries.begin()) - 1;
  }

  int length(int i) const { return boundaries.at(i + 1) - boundaries.at(i); }
};

// Delay radius K = ceil(m/2) of the n-cycle with n = 2(m+1).
inline int delay_radius(int n)
{
  if (n < 4 || n % 2 != 0)
  {
    throw std::invalid_argument("lower-bound schedules need even n >= 4, got " +
                                std::to_string(n));
  }
  const int m = n / 2 - 1;
  return (m + 1) / 2;
}

// Split for C equally spaced communication rounds c_j = j*s; interval i
// ends at c_{(i+1)K}.
inline CommSplit comm_split(int n, int T, int C)
{
  if (C < 0 || C >= T)
  {
    throw std::invalid_argument("comm split: need 0 <= C < T (C=" + std::to_string(C) +
                                ", T=" + std::to_string(T) + ")");
  }
  CommSplit s;
  s.K = delay_radius(n);
  s.Z = C / s.K;
  const long long spacing = std::max<long long>(1, T / (static_cast<long long>(s.Z + 1) * s.K));
  for (int i = 0; i <= s.Z; i++)
  {
    s.boundaries.push_back(static_cast<int>(i * s.K * spacing));
  }
  s.boundaries.push_back(T);
  return s;
}

// K-regular split c_i = iK with Z = floor((T-1)/K).
inline CommSplit regular_split(int n, int T)
{
  if (T < 1)
  {
    throw std::invalid_argument("regular split: T must be >= 1");
  }
  CommSplit s;
  s.K = delay_radius(n);
  s.Z = (T - 1) / s.K;
  for (int i = 0; i <= s.Z; i++)
  {
    s.boundaries.push_back(i * s.K);
  }
  s.boundaries.push_back(T);
  return s;
}

// Learners (0-indexed) receiving the interval function: K <= i <= n-K. The
// rest, {n-K+1..n-1} and {0..K-1}, form the passive block around learner 0.
inline bool is_active_learner(int n, int K, int i) { return i >= K && i <= n - K; }

enum class ScheduleKind
{
  Zero,
  RandomLinear,
  QuadraticTracking,
  LowerConvex,
  LowerStronglyConvex,
  LowerLogT
};

inline std::string to_string(ScheduleKind k)
{
  switch (k)
  {
    case ScheduleKind::Zero:
      return "zero";
    case ScheduleKind::RandomLinear:
      return "random_linear";
    case ScheduleKind::QuadraticTracking:
      return "quadratic_tracking";
    case ScheduleKind::LowerConvex:
      return "lower_convex";
    case ScheduleKind::LowerStronglyConvex:
      return "lower_strongly_convex";
    case ScheduleKind::LowerLogT:
      return "lower_logT";
  }
  return "?";
}

inline ScheduleKind schedule_kind_from_string(const std::string &s)
{
  for (auto k : {ScheduleKind::Zero, ScheduleKind::RandomLinear,
                 ScheduleKind::QuadraticTracking, ScheduleKind::LowerConvex,
                 ScheduleKind::LowerStronglyConvex, ScheduleKind::LowerLogT})
  {
    if (to_string(k) == s)
    {
      return k;
    }
  }
  throw std::invalid_argument("unknown schedule kind '" + s + "'");
}

//
// The adversary: a deterministic map (t, i) -> LossFn for t in 1..T and
// learners i in 0..n-1, together with its declared Lipschitz constant G and
// strong-convexity modulus alpha. Rounds beyond T yield zero losses, which
// is how the harness pads the horizon to a multiple of the block length.
//
class LossSchedule
{
public:
  ScheduleKind kind() const { return kind_; }
  int learners() const { return n_; }
  int horizon() const { return T_; }
  int dimension() const { return set_.dimension(); }
  double lipschitz() const { return G_; }
  double modulus() const { return alpha_; }
  std::uint64_t seed() const { return seed_; }
  const DecisionSet &decision_set() const { return set_; }
  // Interval split of the lower-bound kinds (empty otherwise).
  const CommSplit &split() const { return split_; }
  double bernoulli_p() const { return p_; }
  // Communication budget C of the lower-bound adversaries (-1 if none).
  int comm_budget() const { return C_; }

  // Same schedule under a different seed.
  LossSchedule reseeded(std::uint64_t seed) const
  {
    LossSchedule copy = *this;
    copy.seed_ = seed;
    return copy;
  }

  int active_count() const
  {
    int c = 0;
    for (int i = 0; i < n_; i++)
    {
      c += is_active(i);
    }
    return c;
  }

  bool is_active(int i) const
  {
    switch (kind_)
    {
      case ScheduleKind::LowerConvex:
      case ScheduleKind::LowerStronglyConvex:
      case ScheduleKind::LowerLogT:
        return is_active_learner(n_, split_.K, i);
      default:
        return true;
    }
  }

  LossFn loss(int t, int i) const
  {
    const int d = set_.dimension();
    if (t < 1 || i < 0 || i >= n_)
    {
      throw std::out_of_range("schedule: (t=" + std::to_string(t) + ", i=" +
                              std::to_string(i) + ") out of range");
    }
    if (t > T_ || kind_ == ScheduleKind::Zero)
    {
      return LossFn::linear(Vector::Zero(d));
    }
    const double rd = std::sqrt(static_cast<double>(d));
    switch (kind_)
    {
      case ScheduleKind::RandomLinear:
      {
        CounterRng rng(seed_, {1, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i)});
        Vector w(d);
        for (int j = 0; j < d; j++)
        {
          w(j) = rng.sign() * G_ / rd;
        }
        return LossFn::linear(std::move(w));
      }
      case ScheduleKind::QuadraticTracking:
      {
        CounterRng rng(seed_, {2, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i)});
        return LossFn::iso_quadratic(alpha_, uniform_point(rng), Vector::Zero(d));
      }
      case ScheduleKind::LowerConvex:
      {
        if (!is_active(i))
        {
          return LossFn::linear(Vector::Zero(d));
        }
        return LossFn::linear(interval_signs(t, G_ / rd));
      }
      case ScheduleKind::LowerStronglyConvex:
      {
        const Vector w = is_active(i) ? interval_signs(t, alpha_ * set_.radius() / rd)
                                      : Vector(Vector::Zero(d));
        return LossFn::iso_quadratic(alpha_, Vector(), w);
      }
      case ScheduleKind::LowerLogT:
      {
        if (!is_active(i))
        {
          return LossFn::iso_quadratic(alpha_, Vector(), Vector::Zero(d));
        }
        const int interval = split_.interval_of(t);
        CounterRng rng(seed_, {5, static_cast<std::uint64_t>(interval)});
        const double level = rng.bernoulli(p_) ? set_.radius() / rd : 0.0;
        return LossFn::iso_quadratic(alpha_, Vector::Constant(d, level), Vector::Zero(d));
      }
      case ScheduleKind::Zero:
        break;
    }
    return LossFn::linear(Vector::Zero(d));
  }

  QuadraticSum round_sum(int t) const
  {
    QuadraticSum s(set_.dimension());
    for (int i = 0; i < n_; i++)
    {
      s.add(loss(t, i));
    }
    return s;
  }

  friend LossSchedule schedule_zero(int n, int T, const DecisionSet &K);
  friend LossSchedule schedule_random_linear(int n, int T, const DecisionSet &K, double G,
                                             std::uint64_t seed);
  friend LossSchedule schedule_quadratic_tracking(int n, int T, const DecisionSet &K,
                                                  double alpha, std::uint64_t seed);
  friend LossSchedule schedule_lower_convex(int n, int T, const DecisionSet &K, double G,
                                            int C, std::uint64_t seed);
  friend LossSchedule schedule_lower_strongly_convex(int n, int T, const DecisionSet &K,
                                                     double alpha, int C,
                                                     std::uint64_t seed);
  friend LossSchedule schedule_lower_logT(int n, int T, const DecisionSet &K, double alpha,
                                          double p, std::uint64_t seed);

private:
  LossSchedule(ScheduleKind kind, int n, int T, DecisionSet set, std::uint64_t seed)
    : kind_(kind), n_(n), T_(T), set_(set), seed_(seed)
  {
    if (n < 1)
    {
      throw std::invalid_argument("schedule: n must be >= 1");
    }
    if (T < 1)
    {
      throw std::invalid_argument("schedule: T must be >= 1");
    }
  }

  Vector uniform_point(CounterRng &rng) const
  {
    const int d = set_.dimension();
    Vector c(d);
    if (set_.kind() == SetKind::Ball)
    {
      for (int j = 0; j < d; j++)
      {
        c(j) = rng.normal();
      }
      const double norm = c.norm();
      const double r = set_.radius() * std::pow(rng.uniform(), 1.0 / d);
      return norm > 0.0 ? Vector(c * (r / norm)) : Vector(Vector::Zero(d));
    }
    for (int j = 0; j < d; j++)
    {
      c(j) = rng.uniform(set_.lower(), set_.upper());
    }
    return c;
  }

  // Shared +/- magnitude sign vector of the interval containing round t.
  Vector interval_signs(int t, double magnitude) const
  {
    const int interval = split_.interval_of(t);
    CounterRng rng(seed_, {3, static_cast<std::uint64_t>(interval)});
    Vector w(set_.dimension());
    for (int j = 0; j < w.size(); j++)
    {
      w(j) = rng.sign() * magnitude;
    }
    return w;
  }

  void check_active_count() const
  {
    if (active_count() != n_ - 2 * split_.K + 1)
    {
      throw std::logic_error("schedule: active learner count differs from n-2K+1");
    }
  }

  ScheduleKind kind_;
  int n_;
  int T_;
  DecisionSet set_;
  std::uint64_t seed_;
  double G_ = 0.0;
  double alpha_ = 0.0;
  double p_ = 0.0;
  int C_ = -1;
  CommSplit split_;
};

inline LossSchedule schedule_zero(int n, int T, const DecisionSet &K)
{
  LossSchedule s(ScheduleKind::Zero, n, T, K, 0);
  return s;
}

// Linear losses with i.i.d. coordinates +/- G/sqrt(d), so ||w|| = G exactly.
inline LossSchedule schedule_random_linear(int n, int T, const DecisionSet &K, double G,
                                           std::uint64_t seed)
{
  if (!(G > 0.0))
  {
    throw std::invalid_argument("random_linear: G must be positive");
  }
  LossSchedule s(ScheduleKind::RandomLinear, n, T, K, seed);
  s.G_ = G;
  return s;
}

// (alpha/2)||x - c_{t,i}||^2 with c uniform in K; declared G = 2 alpha R.
inline LossSchedule schedule_quadratic_tracking(int n, int T, const DecisionSet &K,
                                                double alpha, std::uint64_t seed)
{
  if (!(alpha > 0.0))
  {
    throw std::invalid_argument("quadratic_tracking: alpha must be positive");
  }
  LossSchedule s(ScheduleKind::QuadraticTracking, n, T, K, seed);
  s.alpha_ = alpha;
  s.G_ = 2.0 * alpha * K.radius();
  return s;
}

inline void require_kind(const DecisionSet &K, SetKind kind, const char *who)
{
  if (K.kind() != kind)
  {
    throw std::invalid_argument(std::string(who) + ": decision set must be " + to_string(kind));
  }
}

inline LossSchedule schedule_lower_convex(int n, int T, const DecisionSet &K, double G, int C,
                                          std::uint64_t seed)
{
  require_kind(K, SetKind::CenteredBox, "lower_convex");
  if (!(G > 0.0))
  {
    throw std::invalid_argument("lower_convex: G must be positive");
  }
  LossSchedule s(ScheduleKind::LowerConvex, n, T, K, seed);
  s.G_ = G;
  s.C_ = C;
  s.split_ = comm_split(n, T, C);
  s.check_active_count();
  return s;
}

inline LossSchedule schedule_lower_strongly_convex(int n, int T, const DecisionSet &K,
                                                   double alpha, int C, std::uint64_t seed)
{
  require_kind(K, SetKind::CenteredBox, "lower_strongly_convex");
  if (!(alpha > 0.0))
  {
    throw std::invalid_argument("lower_strongly_convex: alpha must be positive");
  }
  LossSchedule s(ScheduleKind::LowerStronglyConvex, n, T, K, seed);
  s.alpha_ = alpha;
  s.G_ = 2.0 * alpha * K.radius();
  s.C_ = C;
  s.split_ = comm_split(n, T, C);
  s.check_active_count();
  return s;
}

inline LossSchedule schedule_lower_logT(int n, int T, const DecisionSet &K, double alpha,
                                        double p, std::uint64_t seed)
{
  require_kind(K, SetKind::NonnegBox, "lower_logT");
  if (!(alpha > 0.0))
  {
    throw std::invalid_argument("lower_logT: alpha must be positive");
  }
  if (!(p >= 0.0 && p <= 1.0))
  {
    throw std::invalid_argument("lower_logT: p must lie in [0,1]");
  }
  if (T < 16 * n + 1)
  {
    throw std::invalid_argument("lower_logT: need T >= 16n+1 (T=" + std::to_string(T) +
                                ", n=" + std::to_string(n) + ")");
  }
  LossSchedule s(ScheduleKind::LowerLogT, n, T, K, seed);
  s.alpha_ = alpha;
  s.G_ = alpha * K.radius();
  s.p_ = p;
  s.split_ = regular_split(n, T);
  s.check_active_count();
  return s;
}

// Max ||grad f_{t,i}(x)|| over `samples` random feasible points per (t, i)
// cell visited; cells are strided so the audit stays cheap for long horizons.
inline double lipschitz_audit(const LossSchedule &schedule, const DecisionSet &K, int samples,
                              std::uint64_t seed = 0, int max_rounds = 256)
{
  const int T = schedule.horizon();
  const int stride = std::max(1, T / std::max(1, max_rounds));
  CounterRng rng(seed, {99});
  double worst = 0.0;
  const int d = K.dimension();
  for (int t = 1; t <= T; t += stride)
  {
    for (int i = 0; i < schedule.learners(); i++)
    {
      const LossFn f = schedule.loss(t, i);
      for (int s = 0; s < samples; s++)
      {
        Vector x(d);
        if (K.kind() == SetKind::Ball)
        {
          for (int j = 0; j < d; j++)
          {
            x(j) = rng.normal();
          }
          const double r = K.radius() * std::pow(rng.uniform(), 1.0 / d);
          x *= r / std::max(x.norm(), 1e-300);
        }
        else if (s < 2)
        {
          // Two vertices: the far corners are where quadratic gradients peak.
          for (int j = 0; j < d; j++)
          {
            x(j) = rng.sign() > 0 ? K.upper() : K.lower();
          }
        }
        else
        {
          for (int j = 0; j < d; j++)
          {
            x(j) = rng.uniform(K.lower(), K.upper());
          }
        }
        worst = std::max(worst, f.gradient(x).norm());
      }
    }
  }
  return worst;
}

}  // namespace docosim

#endif  // DOCOSIM_LOSSES_HPP
