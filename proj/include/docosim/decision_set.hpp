#ifndef DOCOSIM_DECISION_SET_HPP
#define DOCOSIM_DECISION_SET_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace docosim
{

using Vector = Eigen::VectorXd;

enum class SetKind
{
  CenteredBox,  // [-R/sqrt(d), R/sqrt(d)]^d
  NonnegBox,    // [0, R/sqrt(d)]^d
  Ball          // { ||x||_2 <= R }
};

inline std::string to_string(SetKind k)
{
  switch (k)
  {
    case SetKind::CenteredBox:
      return "centered_box";
    case SetKind::NonnegBox:
      return "nonneg_box";
    case SetKind::Ball:
      return "ball";
  }
  return "?";
}

inline SetKind set_kind_from_string(const std::string &s)
{
  if (s == "centered_box")
  {
    return SetKind::CenteredBox;
  }
  if (s == "nonneg_box")
  {
    return SetKind::NonnegBox;
  }
  if (s == "ball")
  {
    return SetKind::Ball;
  }
  throw std::invalid_argument("unknown decision set kind '" + s + "'");
}

//
// Convex feasible region containing the origin with ||x||_2 <= R for every
// member. Exposes Euclidean projection, a linear minimization oracle and the
// regularized argmin  <z,x> + (beta/2)||x||^2  used by every FTRL-type update.
//
class DecisionSet
{
public:
  DecisionSet(SetKind kind, double R, int d) : kind_(kind), R_(R), d_(d)
  {
    if (!(R > 0.0) || !std::isfinite(R))
    {
      throw std::invalid_argument("decision set: R must be positive and finite");
    }
    if (d < 1)
    {
      throw std::invalid_argument("decision set: dimension must be >= 1");
    }
  }

  static DecisionSet centered_box(double R, int d) { return {SetKind::CenteredBox, R, d}; }
  static DecisionSet nonneg_box(double R, int d) { return {SetKind::NonnegBox, R, d}; }
  static DecisionSet ball(double R, int d) { return {SetKind::Ball, R, d}; }

  SetKind kind() const { return kind_; }
  double radius() const { return R_; }
  int dimension() const { return d_; }

  // Per-coordinate bounds of the box kinds.
  double lower() const { return kind_ == SetKind::CenteredBox ? -half_width() : 0.0; }
  double upper() const { return half_width(); }

  Vector project(const Vector &y) const
  {
    check(y, "project");
    switch (kind_)
    {
      case SetKind::CenteredBox:
      case SetKind::NonnegBox:
        return y.cwiseMax(lower()).cwiseMin(upper());
      case SetKind::Ball:
      {
        const double norm = y.norm();
        return norm > R_ ? Vector(y * (R_ / norm)) : y;
      }
    }
    return y;
  }

  // Minimizer of <g,x>. Zero coordinates (box) or g = 0 (ball) resolve to the
  // lower endpoint / origin so runs are reproducible.
  Vector lmo(const Vector &g) const
  {
    check(g, "lmo");
    Vector v(d_);
    switch (kind_)
    {
      case SetKind::CenteredBox:
      case SetKind::NonnegBox:
        for (int j = 0; j < d_; j++)
        {
          v(j) = g(j) < 0.0 ? upper() : lower();
        }
        return v;
      case SetKind::Ball:
      {
        const double norm = g.norm();
        if (norm == 0.0)
        {
          return Vector::Zero(d_);
        }
        return -R_ * g / norm;
      }
    }
    return v;
  }

  // argmin_x <z,x> + (beta/2)||x||^2 = project(-z/beta).
  Vector reg_argmin(const Vector &z, double beta) const
  {
    if (!(beta > 0.0))
    {
      throw std::invalid_argument("reg_argmin: beta must be positive, got " +
                                  std::to_string(beta));
    }
    return project(-z / beta);
  }

  bool contains(const Vector &x, double tol = 1e-10) const
  {
    if (x.size() != d_ || !x.allFinite())
    {
      return false;
    }
    switch (kind_)
    {
      case SetKind::CenteredBox:
      case SetKind::NonnegBox:
        return (x.array() >= lower() - tol).all() && (x.array() <= upper() + tol).all();
      case SetKind::Ball:
        return x.norm() <= R_ + tol;
    }
    return false;
  }

private:
  double half_width() const { return R_ / std::sqrt(static_cast<double>(d_)); }

  void check(const Vector &v, const char *what) const
  {
    if (v.size() != d_)
    {
      throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                  std::to_string(v.size()) + " vs " + std::to_string(d_) +
                                  ")");
    }
    if (!v.allFinite())
    {
      throw std::invalid_argument(std::string(what) + ": non-finite input");
    }
  }

  SetKind kind_;
  double R_;
  int d_;
};

}  // namespace docosim

#endif  // DOCOSIM_DECISION_SET_HPP
