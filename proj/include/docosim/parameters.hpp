#ifndef DOCOSIM_PARAMETERS_HPP
#define DOCOSIM_PARAMETERS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "docosim/gossip_matrix.hpp"

namespace docosim
{

enum class Mode
{
  Convex,
  StronglyConvex
};

struct ResolvedParams
{
  double alpha = 0.0;
  double h = 0.0;
  // Block length L (1 for per-round algorithms).
  int L = 1;
  // Accelerated gossip steps per block, L'. Equals L for AD-FTGL.
  int L_gossip = 1;
  double theta = 0.5;
  // Horizon rounded up to a multiple of L.
  int padded_T = 0;
};

inline int pad_horizon(int T, int L) { return ((T + L - 1) / L) * L; }

inline int ceil_positive(double v) { return std::max(1, static_cast<int>(std::ceil(v - 1e-12))); }

//
// Tuning of AD-FTGL and its projection-free variant:
//   AD-FTGL, convex:            alpha = 0, h = sqrt(11 L T) G / R
//   AD-FTGL, strongly convex:   h = alpha L
//   PF, convex:                 L = sqrt(T) (if L' <= sqrt(T)) else sqrt(T) L',
//                               h = sqrt(14 L T) G / R
//   PF, strongly convex:        L = T^{2/3} (ln T)^{-2/3} (times L' if L' exceeds it),
//                               h = alpha L
// with theta and L (resp. L') from the spectral formulas. Non-integer L is
// rounded up and T is padded so that L divides it; h uses the padded T.
//
inline ResolvedParams default_params(Mode mode, bool projection_free, int n, int T, double G,
                                     double R, double alpha, double sigma2)
{
  if (mode == Mode::StronglyConvex && !(alpha > 0.0))
  {
    throw std::invalid_argument("default_params: strongly convex mode needs alpha > 0");
  }
  if (T < 1 || !(G > 0.0) || !(R > 0.0))
  {
    throw std::invalid_argument("default_params: need T >= 1, G > 0, R > 0");
  }
  const SpectralParams sp = spectral_params(sigma2, n);
  ResolvedParams out;
  out.theta = sp.theta;
  out.alpha = mode == Mode::Convex ? 0.0 : alpha;
  out.L_gossip = sp.gossip_iterations;

  if (!projection_free)
  {
    out.L = sp.gossip_iterations;
    out.padded_T = pad_horizon(T, out.L);
    out.h = mode == Mode::Convex ? std::sqrt(11.0 * out.L * out.padded_T) * G / R : alpha * out.L;
    return out;
  }

  const double Tn = T;
  if (mode == Mode::Convex)
  {
    const double root = std::sqrt(Tn);
    out.L = out.L_gossip <= root ? ceil_positive(root) : ceil_positive(root * out.L_gossip);
  }
  else
  {
    const double lnT = std::log(std::max(Tn, 2.0));
    const double base = std::pow(Tn, 2.0 / 3.0) * std::pow(lnT, -2.0 / 3.0);
    out.L = out.L_gossip <= base ? ceil_positive(base) : ceil_positive(base * out.L_gossip);
  }
  if (out.L_gossip > out.L)
  {
    out.L = out.L_gossip;
  }
  out.padded_T = pad_horizon(T, out.L);
  out.h = mode == Mode::Convex ? std::sqrt(14.0 * out.L * out.padded_T) * G / R : alpha * out.L;
  return out;
}

// Bound on the D-FTGL dual consensus error,
// 2 xi ((1 + ln sqrt(n)) / rho + 1), with xi bounding each update vector.
inline double dftgl_consensus_bound(double xi, int n, double rho)
{
  return 2.0 * xi * ((1.0 + std::log(std::sqrt(static_cast<double>(n)))) / rho + 1.0);
}

//
// D-FTGL tuning. Convex: h minimizes the per-round form of the D-FTGL regret
// bound, 3 n G T (C + 2G) / (2h) + n h R^2, with C the consensus bound above.
// Strongly convex: h = 0.
//
inline ResolvedParams dftgl_default_params(Mode mode, int n, int T, double G, double R,
                                           double alpha, double sigma2)
{
  if (mode == Mode::StronglyConvex && !(alpha > 0.0))
  {
    throw std::invalid_argument("default_params: strongly convex mode needs alpha > 0");
  }
  ResolvedParams out;
  out.padded_T = T;
  if (mode == Mode::Convex)
  {
    const double C = dftgl_consensus_bound(G, n, 1.0 - sigma2);
    out.h = std::sqrt(1.5 * G * T * (C + 2.0 * G)) / R;
  }
  else
  {
    out.alpha = alpha;
  }
  return out;
}

// Centralized FTRL on the global loss (gradient norm <= nG):
// h = 1/eta = n G sqrt(T) / R. FTAL uses the global modulus n alpha.
inline ResolvedParams central_default_params(Mode mode, int n, int T, double G, double R,
                                             double alpha)
{
  ResolvedParams out;
  out.padded_T = T;
  if (mode == Mode::Convex)
  {
    out.h = n * G * std::sqrt(static_cast<double>(T)) / R;
  }
  else
  {
    if (!(alpha > 0.0))
    {
      throw std::invalid_argument("ftal: alpha must be positive");
    }
    out.alpha = n * alpha;
  }
  return out;
}

}  // namespace docosim

#endif  // DOCOSIM_PARAMETERS_HPP
