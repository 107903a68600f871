#ifndef DOCOSIM_SYMMETRIC_EIGEN_HPP
#define DOCOSIM_SYMMETRIC_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace docosim
{

struct EigenDecomposition
{
  // Sorted descending.
  Eigen::VectorXd values;
  // Column k is the unit eigenvector for values(k).
  Eigen::MatrixXd vectors;
  int sweeps = 0;
};

//
// Cyclic Jacobi eigensolver for dense symmetric matrices. Sweeps apply one
// rotation per off-diagonal pair (p,q) until the off-diagonal Frobenius norm
// drops below rel_tol * ||M||_F or max_sweeps is reached.
//
inline EigenDecomposition symmetric_eigen(const Eigen::MatrixXd &M, double rel_tol = 1e-12,
                                          int max_sweeps = 100)
{
  const Eigen::Index n = M.rows();
  if (M.cols() != n)
  {
    throw std::invalid_argument("symmetric_eigen: matrix is not square");
  }
  if (!M.allFinite())
  {
    throw std::invalid_argument("symmetric_eigen: non-finite entry");
  }
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
  {
    throw std::invalid_argument("symmetric_eigen: matrix is not symmetric");
  }

  Eigen::MatrixXd A = 0.5 * (M + M.transpose());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  const double target = rel_tol * A.norm();

  auto off_norm = [&]()
  {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; p++)
    {
      for (Eigen::Index q = p + 1; q < n; q++)
      {
        s += 2.0 * A(p, q) * A(p, q);
      }
    }
    return std::sqrt(s);
  };

  int sweep = 0;
  while (sweep < max_sweeps && off_norm() > target)
  {
    for (Eigen::Index p = 0; p < n - 1; p++)
    {
      for (Eigen::Index q = p + 1; q < n; q++)
      {
        const double apq = A(p, q);
        if (apq == 0.0)
        {
          continue;
        }
        // Rotation angle zeroing A(p,q): tan(2phi) = 2 apq / (aqq - app).
        const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; k++)
        {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; k++)
        {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        A(p, q) = A(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; k++)
        {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
    sweep++;
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return A(a, a) > A(b, b); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; k++)
  {
    out.values(k) = A(order[k], order[k]);
    out.vectors.col(k) = V.col(order[k]);
  }
  out.sweeps = sweep;
  return out;
}

}  // namespace docosim

#endif  // DOCOSIM_SYMMETRIC_EIGEN_HPP
