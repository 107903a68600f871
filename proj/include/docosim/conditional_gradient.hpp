#ifndef DOCOSIM_CONDITIONAL_GRADIENT_HPP
#define DOCOSIM_CONDITIONAL_GRADIENT_HPP

#include <algorithm>
#include <stdexcept>
#include <string>

#include "docosim/decision_set.hpp"

namespace docosim
{

// F(x) = <z, x> + (beta/2)||x||^2, the objective of every FTGL-type update.
inline double regularized_objective(const Vector &z, double beta, const Vector &x)
{
  return z.dot(x) + 0.5 * beta * x.squaredNorm();
}

//
// One Frank-Wolfe iteration on F(x) = <z,x> + (beta/2)||x||^2 from y. The
// line search over s in [0,1] is solved in closed form:
//   s = clamp(<grad F(y), y - v> / (beta ||v - y||^2), 0, 1),
// with s = 0 when v = y.
//
inline Vector cg_step(const DecisionSet &K, const Vector &z, double beta, const Vector &y)
{
  const Vector grad = z + beta * y;
  const Vector v = K.lmo(grad);
  const Vector dir = v - y;
  const double curvature = beta * dir.squaredNorm();
  if (curvature == 0.0)
  {
    return y;
  }
  const double s = std::clamp(-grad.dot(dir) / curvature, 0.0, 1.0);
  return y + s * dir;
}

// Conditional gradient with `iterations` linear-minimization steps.
// Guarantee: F(out) - min_K F <= 8 beta R^2 / (iterations + 2).
inline Vector cg_minimize(const DecisionSet &K, int iterations, const Vector &z, double beta,
                          const Vector &x_init)
{
  if (!(beta > 0.0))
  {
    throw std::invalid_argument("cg_minimize: beta must be positive, got " +
                                std::to_string(beta));
  }
  if (iterations < 1)
  {
    throw std::invalid_argument("cg_minimize: iterations must be >= 1");
  }
  if (!K.contains(x_init))
  {
    throw std::invalid_argument("cg_minimize: initial point is not feasible");
  }
  Vector y = x_init;
  for (int k = 0; k < iterations; k++)
  {
    y = cg_step(K, z, beta, y);
  }
  return y;
}

}  // namespace docosim

#endif  // DOCOSIM_CONDITIONAL_GRADIENT_HPP
