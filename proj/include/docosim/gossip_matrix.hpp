#ifndef DOCOSIM_GOSSIP_MATRIX_HPP
#define DOCOSIM_GOSSIP_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "docosim/graph.hpp"
#include "docosim/symmetric_eigen.hpp"

namespace docosim
{

//
// Symmetric doubly stochastic weight matrix supported on a graph, with its
// spectrum cached at construction. sigma2 is the second-largest singular value
// (for a symmetric matrix, the second-largest |eigenvalue| counted with
// multiplicity); for n = 1 it is defined as 0.
//
class GossipMatrix
{
public:
  GossipMatrix(const Graph &graph, Eigen::MatrixXd entries)
    : graph_(graph), entries_(std::move(entries))
  {
    const int n = graph_.size();
    if (entries_.rows() != n || entries_.cols() != n)
    {
      throw std::invalid_argument("gossip matrix: dimension does not match graph");
    }
    for (int i = 0; i < n; i++)
    {
      double row = 0.0, col = 0.0;
      for (int j = 0; j < n; j++)
      {
        const double pij = entries_(i, j);
        if (!std::isfinite(pij) || pij < 0.0)
        {
          throw std::invalid_argument("gossip matrix: negative or non-finite entry at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
        }
        if (std::abs(pij - entries_(j, i)) > 1e-12)
        {
          throw std::invalid_argument("gossip matrix: not symmetric");
        }
        if (pij > 0.0 && i != j && !graph_.has_edge(i, j))
        {
          throw std::invalid_argument("gossip matrix: weight outside graph support at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
        }
        row += pij;
        col += entries_(j, i);
      }
      if (std::abs(row - 1.0) > 1e-10 || std::abs(col - 1.0) > 1e-10)
      {
        throw std::invalid_argument("gossip matrix: row/column " + std::to_string(i) +
                                    " does not sum to 1");
      }
    }

    support_.resize(n);
    for (int i = 0; i < n; i++)
    {
      for (int j = 0; j < n; j++)
      {
        if (entries_(i, j) != 0.0)
        {
          support_[i].push_back(j);
        }
      }
    }

    eigenvalues_ = symmetric_eigen(entries_).values;
    Eigen::VectorXd singular = eigenvalues_.cwiseAbs();
    std::sort(singular.data(), singular.data() + singular.size(), std::greater<>());
    sigma2_ = n > 1 ? singular(1) : 0.0;
    is_psd_ = eigenvalues_.minCoeff() >= -1e-10;
  }

  int size() const { return graph_.size(); }
  const Graph &graph() const { return graph_; }
  const Eigen::MatrixXd &entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  // Column indices j with P(i,j) != 0, ascending; a subset of N_i.
  const std::vector<int> &support(int i) const { return support_.at(i); }

  const Eigen::VectorXd &eigenvalues() const { return eigenvalues_; }
  double sigma2() const { return sigma2_; }
  double rho() const { return 1.0 - sigma2_; }
  bool is_psd() const { return is_psd_; }

  // Row-major dump, 17 significant digits.
  void write_csv(std::ostream &os) const
  {
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < entries_.rows(); i++)
    {
      for (Eigen::Index j = 0; j < entries_.cols(); j++)
      {
        os << (j ? "," : "") << entries_(i, j);
      }
      os << '\n';
    }
  }

private:
  Graph graph_;
  Eigen::MatrixXd entries_;
  std::vector<std::vector<int>> support_;
  Eigen::VectorXd eigenvalues_;
  double sigma2_ = 0.0;
  bool is_psd_ = true;
};

// P = I - (D - A) / (delta_max + 1); lazy returns (I + P) / 2.
inline GossipMatrix max_degree_weights(const Graph &g, bool lazy)
{
  const int n = g.size();
  const double denom = static_cast<double>(g.max_degree()) + 1.0;
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; i++)
  {
    P(i, i) -= g.degree(i) / denom;
    for (int j : g.neighbors(i))
    {
      P(i, j) += 1.0 / denom;
    }
  }
  if (lazy)
  {
    P = 0.5 * (Eigen::MatrixXd::Identity(n, n) + P);
  }
  return GossipMatrix(g, std::move(P));
}

struct SpectralParams
{
  // Mixing coefficient of the accelerated recurrence, in [1/2, 1).
  double theta = 0.5;
  // Accelerated-gossip iterations per consensus, >= 1.
  int gossip_iterations = 1;
};

inline SpectralParams spectral_params(double sigma2, int n)
{
  if (!(sigma2 >= 0.0) || sigma2 >= 1.0)
  {
    throw std::invalid_argument("spectral_params: sigma2 must lie in [0,1), got " +
                                std::to_string(sigma2));
  }
  if (n < 1)
  {
    throw std::invalid_argument("spectral_params: n must be >= 1");
  }
  SpectralParams sp;
  sp.theta = 1.0 / (1.0 + std::sqrt(1.0 - sigma2 * sigma2));
  const double L = std::numbers::sqrt2 * std::log(std::sqrt(14.0 * n)) /
                   ((std::numbers::sqrt2 - 1.0) * std::sqrt(1.0 - sigma2));
  sp.gossip_iterations = std::max(1, static_cast<int>(std::ceil(L)));
  return sp;
}

inline SpectralParams spectral_params(const GossipMatrix &P)
{
  return spectral_params(P.sigma2(), P.size());
}

// Whether pi^2 / (1 - sigma2) <= 4 n^2 holds for the non-lazy max-degree
// matrix on the n-cycle.
inline bool check_cycle_spectral_bound(int n)
{
  const GossipMatrix P = max_degree_weights(build_cycle(n), false);
  const double lhs = std::numbers::pi * std::numbers::pi / (1.0 - P.sigma2());
  return lhs <= 4.0 * static_cast<double>(n) * n;
}

}  // namespace docosim

#endif  // DOCOSIM_GOSSIP_MATRIX_HPP
