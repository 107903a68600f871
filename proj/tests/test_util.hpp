#ifndef DOCOSIM_TEST_UTIL_HPP
#define DOCOSIM_TEST_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "docosim/decision_set.hpp"
#include "docosim/rng.hpp"

namespace testutil
{

using docosim::CounterRng;
using docosim::DecisionSet;
using docosim::Vector;

inline Vector gaussian(CounterRng &rng, int d, double scale = 1.0)
{
  Vector v(d);
  for (int j = 0; j < d; j++)
  {
    v(j) = scale * rng.normal();
  }
  return v;
}

inline Eigen::MatrixXd gaussian_matrix(CounterRng &rng, int r, int c)
{
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; i++)
  {
    for (int j = 0; j < c; j++)
    {
      m(i, j) = rng.normal();
    }
  }
  return m;
}

// Random point of K, built per kind (not through project()).
inline Vector member(CounterRng &rng, const DecisionSet &K)
{
  const int d = K.dimension();
  Vector x(d);
  if (K.kind() == docosim::SetKind::Ball)
  {
    Vector g = gaussian(rng, d);
    const double r = K.radius() * std::pow(rng.uniform(), 1.0 / d);
    return g.norm() > 0 ? Vector(g * (r / g.norm())) : Vector(Vector::Zero(d));
  }
  for (int j = 0; j < d; j++)
  {
    x(j) = rng.uniform(K.lower(), K.upper());
  }
  return x;
}

inline std::vector<DecisionSet> all_sets(double R, int d)
{
  return {DecisionSet::centered_box(R, d), DecisionSet::nonneg_box(R, d),
          DecisionSet::ball(R, d)};
}

}  // namespace testutil

#endif
