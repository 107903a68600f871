#ifndef DOCOSIM_GOSSIP_HPP
#define DOCOSIM_GOSSIP_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "docosim/gossip_matrix.hpp"

namespace docosim
{

// n x d stacked learner state; row i belongs to learner i.
using StackedState = Eigen::MatrixXd;

namespace detail
{
inline void check_rows(const GossipMatrix &P, const StackedState &X, const char *what)
{
  if (X.rows() != P.size())
  {
    throw std::invalid_argument(std::string(what) + ": state has " + std::to_string(X.rows()) +
                                " rows, matrix is " + std::to_string(P.size()) + "x" +
                                std::to_string(P.size()));
  }
}
}  // namespace detail

// P X computed learner by learner, each summing only over its nonzero
// weights P_ij (j in N_i), in ascending j.
inline StackedState standard_step(const GossipMatrix &P, const StackedState &X)
{
  detail::check_rows(P, X, "standard_step");
  StackedState out(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); i++)
  {
    for (Eigen::Index c = 0; c < X.cols(); c++)
    {
      double acc = 0.0;
      for (int j : P.support(static_cast<int>(i)))
      {
        acc += P(static_cast<int>(i), j) * X(j, c);
      }
      out(i, c) = acc;
    }
  }
  return out;
}

// Full dense product over every column of P; reference for standard_step.
inline StackedState dense_step(const GossipMatrix &P, const StackedState &X)
{
  detail::check_rows(P, X, "dense_step");
  StackedState out(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); i++)
  {
    for (Eigen::Index c = 0; c < X.cols(); c++)
    {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < X.rows(); j++)
      {
        acc += P.entries()(i, j) * X(j, c);
      }
      out(i, c) = acc;
    }
  }
  return out;
}

// One accelerated step (1 + theta) P X^k - theta X^{k-1}.
inline StackedState accelerated_step(const GossipMatrix &P, const StackedState &current,
                                     const StackedState &previous, double theta)
{
  if (previous.rows() != current.rows() || previous.cols() != current.cols())
  {
    throw std::invalid_argument("accelerated_step: buffer shapes differ");
  }
  StackedState mixed = standard_step(P, current);
  for (Eigen::Index i = 0; i < mixed.rows(); i++)
  {
    for (Eigen::Index c = 0; c < mixed.cols(); c++)
    {
      mixed(i, c) = (1.0 + theta) * mixed(i, c) - theta * previous(i, c);
    }
  }
  return mixed;
}

// Iterates X^0, X^1, ..., X^L of the accelerated recurrence with X^{-1} = X^0.
inline std::vector<StackedState> accelerated_trajectory(const GossipMatrix &P,
                                                        const StackedState &X0, double theta,
                                                        int iterations)
{
  detail::check_rows(P, X0, "accelerated_run");
  if (iterations < 1)
  {
    throw std::invalid_argument("accelerated_run: iterations must be >= 1");
  }
  std::vector<StackedState> traj;
  traj.reserve(iterations + 1);
  traj.push_back(X0);
  StackedState prev = X0;
  for (int k = 0; k < iterations; k++)
  {
    StackedState next = accelerated_step(P, traj.back(), prev, theta);
    prev = traj.back();
    traj.push_back(std::move(next));
  }
  return traj;
}

inline StackedState accelerated_run(const GossipMatrix &P, const StackedState &X0,
                                    double theta, int iterations)
{
  detail::check_rows(P, X0, "accelerated_run");
  if (iterations < 1)
  {
    throw std::invalid_argument("accelerated_run: iterations must be >= 1");
  }
  StackedState prev = X0, cur = X0;
  for (int k = 0; k < iterations; k++)
  {
    StackedState next = accelerated_step(P, cur, prev, theta);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

inline Eigen::RowVectorXd row_mean(const StackedState &X) { return X.colwise().mean(); }

// ||X - 1 mean(X)||_F.
inline double consensus_error(const StackedState &X)
{
  if (X.rows() == 0)
  {
    return 0.0;
  }
  return (X.rowwise() - row_mean(X)).norm();
}

// Largest per-learner distance ||x_i - ref||_2.
inline double max_row_distance(const StackedState &X, const Eigen::RowVectorXd &ref)
{
  double worst = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); i++)
  {
    worst = std::max(worst, (X.row(i) - ref).norm());
  }
  return worst;
}

}  // namespace docosim

#endif  // DOCOSIM_GOSSIP_HPP
