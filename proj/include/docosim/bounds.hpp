#ifndef DOCOSIM_BOUNDS_HPP
#define DOCOSIM_BOUNDS_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "docosim/losses.hpp"
#include "docosim/parameters.hpp"

namespace docosim
{

enum class AlgorithmKind
{
  Adftgl,
  PfAdftgl,
  Dftgl,
  Ftrl,
  Ftal
};

inline std::string to_string(AlgorithmKind a)
{
  switch (a)
  {
    case AlgorithmKind::Adftgl:
      return "adftgl";
    case AlgorithmKind::PfAdftgl:
      return "pf_adftgl";
    case AlgorithmKind::Dftgl:
      return "dftgl";
    case AlgorithmKind::Ftrl:
      return "ftrl";
    case AlgorithmKind::Ftal:
      return "ftal";
  }
  return "?";
}

inline AlgorithmKind algorithm_kind_from_string(const std::string &s)
{
  if (s == "adftgl") return AlgorithmKind::Adftgl;
  if (s == "pf_adftgl") return AlgorithmKind::PfAdftgl;
  if (s == "dftgl") return AlgorithmKind::Dftgl;
  if (s == "ftrl") return AlgorithmKind::Ftrl;
  if (s == "ftal") return AlgorithmKind::Ftal;
  throw std::invalid_argument("unknown algorithm \"" + s +
                              "\" (expected adftgl, pf_adftgl, dftgl, ftrl or ftal)");
}

// Everything the bound formulas depend on. T is the (padded) horizon the
// algorithm actually ran for.
struct BoundInputs
{
  AlgorithmKind algorithm = AlgorithmKind::Adftgl;
  Mode mode = Mode::Convex;
  int n = 1;
  int T = 1;
  // Nominal horizon before padding (0: same as T). Lower bounds use it.
  int T_nominal = 0;
  double G = 1.0;
  double R = 1.0;
  double alpha = 0.0;
  double h = 1.0;
  int L = 1;
  int L_gossip = 1;
  double sigma2 = 0.0;
  // Communication budget C used by the lower bounds.
  int C = 0;
  // Interval split of a lower-bound schedule, when one is in play.
  std::optional<CommSplit> split;
  ScheduleKind schedule = ScheduleKind::RandomLinear;
};

struct BoundEntry
{
  std::string name;
  double value = 0.0;
  bool upper = true;
  std::string note;
};

struct BoundReport
{
  std::vector<BoundEntry> entries;

  const BoundEntry *find(const std::string &name) const
  {
    for (const auto &e : entries)
    {
      if (e.name == name)
      {
        return &e;
      }
    }
    return nullptr;
  }
  bool has(const std::string &name) const { return find(name) != nullptr; }
  double value(const std::string &name) const
  {
    const BoundEntry *e = find(name);
    if (!e)
    {
      throw std::out_of_range("bound \"" + name + "\" is not applicable here");
    }
    return e->value;
  }
};

namespace bounds
{

// AD-FTGL, any alpha >= 0 and h > 0 (T a multiple of L).
inline double adftgl_general(int n, int T, int L, double G, double R, double alpha, double h)
{
  const int blocks = T / L;
  double s1 = 0.0, s2 = 0.0;
  for (int z = 2; z <= blocks; z++)
  {
    s1 += 3.0 * L * (G + alpha * R) / ((z - 2.0) * L * alpha + 2.0 * h);
  }
  for (int z = 1; z <= blocks; z++)
  {
    s2 += 4.0 * L * (G + 2.0 * alpha * R) / (z * L * alpha + 2.0 * h);
  }
  return 3.0 * n * L * G * (s1 + s2) + n * h * R * R;
}

// alpha = 0 with h = sqrt(11 L T) G / R.
inline double adftgl_convex(int n, int T, int L, double G, double R)
{
  return 2.0 * n * G * R * std::sqrt(11.0 * L * T);
}

// alpha > 0 with h = alpha L.
inline double adftgl_strongly_convex(int n, int T, int L, double G, double R, double alpha)
{
  return 3.0 * n * L * G * (7.0 * G + 11.0 * alpha * R) * (1.0 + std::log(double(T) / L)) /
           alpha +
         n * alpha * L * R * R;
}

// Projection-free variant with block length L, any alpha >= 0 and h > 0.
inline double pf_general(int n, int T, int L, double G, double R, double alpha, double h)
{
  const int blocks = T / L;
  double s1 = 0.0, s2 = 0.0;
  for (int z = 3; z <= blocks; z++)
  {
    s1 += 3.0 * L * (G + alpha * R) / ((z - 3.0) * L * alpha + 2.0 * h);
  }
  for (int z = 1; z <= blocks; z++)
  {
    s2 += 6.0 * L * (G + 2.0 * alpha * R) / ((z - 1.0) * L * alpha + 2.0 * h);
  }
  return 3.0 * n * L * G * (s1 + s2) + n * h * R * R +
         12.0 * n * G * R * T / std::sqrt(L + 2.0);
}

// Convex tuning with L = sqrt(T) L' (first form) or L = sqrt(T) (second).
inline double pf_convex_scaled(int n, int T, int L_gossip, double G, double R)
{
  const double t34 = std::pow(double(T), 0.75);
  const double lp = L_gossip;
  return 2.0 * std::sqrt(14.0) * n * G * R * std::sqrt(lp) * t34 +
         12.0 * n * G * R * t34 / std::sqrt(lp);
}
inline double pf_convex(int n, int T, double G, double R)
{
  return (2.0 * std::sqrt(14.0) + 12.0) * n * G * R * std::pow(double(T), 0.75);
}

// Strongly convex tuning; L_gossip = 1 gives the second (unscaled) form.
inline double pf_strongly_convex(int n, int T, int L_gossip, double G, double R, double alpha)
{
  const double lnT = std::log(double(T));
  const double t23 = std::pow(double(T), 2.0 / 3.0);
  const double lp = L_gossip;
  return 3.0 * n * G * (9.0 * G + 15.0 * alpha * R) * t23 * lp *
           (std::pow(lnT, -2.0 / 3.0) + std::pow(lnT, 1.0 / 3.0)) / alpha +
         n * alpha * t23 * lp * R * R * std::pow(lnT, -2.0 / 3.0) +
         12.0 * n * G * R * t23 * std::pow(lnT, 1.0 / 3.0) / std::sqrt(lp);
}

// D-FTGL with consensus constant C_err.
inline double dftgl_general(int n, int T, double G, double R, double alpha, double h,
                            double C_err)
{
  double s1 = 0.0, s2 = 0.0;
  for (int t = 2; t <= T; t++)
  {
    s1 += C_err / ((t - 1.0) * alpha + 2.0 * h);
  }
  for (int t = 1; t <= T; t++)
  {
    s2 += 2.0 * (G + 2.0 * alpha * R) / (t * alpha + 2.0 * h);
  }
  return 3.0 * n * G * (s1 + s2) + n * h * R * R;
}

inline double lower_convex(int n, int T, double G, double R, double rho, int C)
{
  if (n <= 8 * C + 16)
  {
    return n * std::sqrt(std::numbers::pi) * R * G * T /
           (16.0 * std::pow(rho, 0.25) * std::sqrt(C + 1.0));
  }
  return n * R * G * T / 4.0;
}

inline double lower_strongly_convex(int n, int T, double R, double alpha, double rho, int C)
{
  if (n <= 8 * C + 16)
  {
    return alpha * std::numbers::pi * n * R * R * T / (256.0 * (C + 1.0) * std::sqrt(rho));
  }
  return alpha * n * R * R * T / 16.0;
}

inline double lower_log_horizon(int n, int T, double R, double alpha, double rho)
{
  const double log16 = std::log(30.0 * (T - 1.0) / n) / std::log(16.0);
  return std::pow(16.0, -5.0) * alpha * std::numbers::pi * (log16 - 2.0) * (n - 2.0) * R * R /
         (4.0 * std::sqrt(rho));
}

// Expected regret of learner 1 under the lower-bound adversaries.
inline double lower_convex_expectation(int n, int K, int Z, int T, double G, double R)
{
  return (n - 2.0 * K + 1.0) * R * G * T / std::sqrt(2.0 * (Z + 1.0));
}
inline double lower_strongly_convex_expectation(int n, int K, int Z, int T, double R,
                                                double alpha)
{
  const double a = n - 2.0 * K + 1.0;
  return alpha * a * a * R * R * T / (2.0 * n * (Z + 1.0));
}

}  // namespace bounds

//
// Evaluates every bound that applies to the inputs. Upper bounds depend on
// the algorithm (tuned forms only for the matching mode); lower bounds only
// on the problem. Inapplicable entries are simply absent.
//
inline BoundReport bound_report(const BoundInputs &in)
{
  BoundReport rep;
  auto up = [&](std::string name, double v, std::string note = "") {
    rep.entries.push_back({std::move(name), v, true, std::move(note)});
  };
  auto low = [&](std::string name, double v, std::string note = "") {
    rep.entries.push_back({std::move(name), v, false, std::move(note)});
  };
  const double rho = 1.0 - in.sigma2;
  const int Tn = in.T_nominal > 0 ? in.T_nominal : in.T;
  const bool sc = in.alpha > 0.0;

  switch (in.algorithm)
  {
    case AlgorithmKind::Adftgl:
      up("adftgl_consensus", 3.0 * in.L * (in.G + in.alpha * in.R), "per block, per learner");
      if (in.h > 0.0)
      {
        up("adftgl_general",
           bounds::adftgl_general(in.n, in.T, in.L, in.G, in.R, in.alpha, in.h));
      }
      if (!sc)
      {
        up("adftgl_convex", bounds::adftgl_convex(in.n, in.T, in.L, in.G, in.R));
      }
      else
      {
        up("adftgl_strongly_convex",
           bounds::adftgl_strongly_convex(in.n, in.T, in.L, in.G, in.R, in.alpha));
      }
      break;
    case AlgorithmKind::PfAdftgl:
    {
      up("pf_general", bounds::pf_general(in.n, in.T, in.L, in.G, in.R, in.alpha, in.h));
      if (!sc)
      {
        const double root = std::sqrt(double(Tn));
        if (in.L_gossip <= root)
        {
          up("pf_convex", bounds::pf_convex(in.n, in.T, in.G, in.R), "L = sqrt(T)");
        }
        else
        {
          up("pf_convex", bounds::pf_convex_scaled(in.n, in.T, in.L_gossip, in.G, in.R),
             "L = sqrt(T) L'");
        }
      }
      else
      {
        const double lnT = std::log(double(Tn));
        const double base = std::pow(double(Tn), 2.0 / 3.0) * std::pow(lnT, -2.0 / 3.0);
        if (in.L_gossip <= base)
        {
          up("pf_strongly_convex",
             bounds::pf_strongly_convex(in.n, in.T, 1, in.G, in.R, in.alpha),
             "L = T^(2/3) (ln T)^(-2/3)");
        }
        else
        {
          up("pf_strongly_convex",
             bounds::pf_strongly_convex(in.n, in.T, in.L_gossip, in.G, in.R, in.alpha),
             "L = T^(2/3) (ln T)^(-2/3) L'");
        }
      }
      break;
    }
    case AlgorithmKind::Dftgl:
    {
      const double xi = in.G + in.alpha * in.R;
      const double c = dftgl_consensus_bound(xi, in.n, rho);
      up("dftgl_consensus", c, "per round, per learner");
      if (in.h > 0.0 || sc)
      {
        up("dftgl_general", bounds::dftgl_general(in.n, in.T, in.G, in.R, in.alpha, in.h, c));
      }
      break;
    }
    case AlgorithmKind::Ftrl:
    case AlgorithmKind::Ftal:
      break;
  }

  low("lower_convex", bounds::lower_convex(in.n, Tn, in.G, in.R, rho, in.C),
      in.n <= 8 * in.C + 16 ? "branch n <= 8C+16" : "branch n > 8C+16");
  if (sc)
  {
    low("lower_strongly_convex",
        bounds::lower_strongly_convex(in.n, Tn, in.R, in.alpha, rho, in.C),
        in.n <= 8 * in.C + 16 ? "branch n <= 8C+16" : "branch n > 8C+16");
    if (16 * in.n + 1 <= Tn && in.n > 2)
    {
      low("lower_log_horizon", bounds::lower_log_horizon(in.n, Tn, in.R, in.alpha, rho));
    }
  }
  if (in.split)
  {
    const CommSplit &s = *in.split;
    if (in.schedule == ScheduleKind::LowerConvex)
    {
      low("lower_convex_expectation",
          bounds::lower_convex_expectation(in.n, s.K, s.Z, Tn, in.G, in.R), "learner 1");
    }
    else if (in.schedule == ScheduleKind::LowerStronglyConvex)
    {
      low("lower_strongly_convex_expectation",
          bounds::lower_strongly_convex_expectation(in.n, s.K, s.Z, Tn, in.R, in.alpha),
          "learner 1");
    }
  }
  return rep;
}

}  // namespace docosim

#endif  // DOCOSIM_BOUNDS_HPP
