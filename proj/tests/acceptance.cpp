// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and runtime limits are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "docosim/harness.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace docosim;

namespace
{

struct Verdict
{
  bool ok = true;
  std::string detail;
};

Experiment experiment(GossipMatrix P, DecisionSet K, LossSchedule s, AlgorithmKind a, Mode mode,
                      double alpha)
{
  Experiment e(std::move(P), K, std::move(s));
  e.algorithm = a;
  e.mode = mode;
  const int n = e.P.size(), T = e.schedule.horizon();
  const double G = e.schedule.lipschitz(), R = e.K.radius(), s2 = e.P.sigma2();
  switch (a)
  {
    case AlgorithmKind::Adftgl:
      e.params = default_params(mode, false, n, T, G, R, alpha, s2);
      break;
    case AlgorithmKind::PfAdftgl:
      e.params = default_params(mode, true, n, T, G, R, alpha, s2);
      break;
    case AlgorithmKind::Dftgl:
      e.params = dftgl_default_params(mode, n, T, G, R, alpha, s2);
      break;
    default:
      e.params = central_default_params(mode, n, T, G, R, alpha);
  }
  return e;
}

GossipMatrix lazy_cycle(int n) { return max_degree_weights(build_cycle(n), true); }

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Gossip contraction of the accelerated recurrence.
Verdict contraction()
{
  Verdict v;
  CounterRng rng(1001, {1});
  double worst = 0.0;
  for (int n : {8, 32, 128})
  {
    const GossipMatrix P = lazy_cycle(n);
    const SpectralParams sp = spectral_params(P);
    const double rate = 1.0 - (1.0 - 1.0 / std::numbers::sqrt2) * std::sqrt(P.rho());
    for (int s = 0; s < 100; s++)
    {
      const StackedState X0 = testutil::gaussian_matrix(rng, n, 3);
      const double e0 = consensus_error(X0);
      const auto traj = accelerated_trajectory(P, X0, sp.theta, sp.gossip_iterations);
      for (int k = 0; k <= sp.gossip_iterations; k++)
      {
        const double lim = std::sqrt(14.0) * std::pow(rate, k) * e0;
        const double ratio = consensus_error(traj[k]) / lim;
        worst = std::max(worst, ratio);
        if (ratio > 1.0 + 1e-9)
        {
          v.ok = false;
        }
      }
    }
  }
  v.detail = fmt("worst error/bound ratio %.4f over n in {8,32,128}, 100 states each", worst);
  return v;
}

// Per-block AD-FTGL dual consensus error.
Verdict adftgl_consensus()
{
  Verdict v;
  const auto K = DecisionSet::ball(1.0, 4);
  std::string d;
  for (double alpha : {0.0, 1.0})
  {
    const auto s = schedule_random_linear(16, 8192, K, 1.0, 2002);
    const Mode mode = alpha > 0 ? Mode::StronglyConvex : Mode::Convex;
    Experiment e = experiment(lazy_cycle(16), K, s, AlgorithmKind::Adftgl, mode, alpha);
    e.trace_stride = 0;
    const RunResult r = run(e);
    const double lim = 3.0 * e.params.L * (1.0 + alpha * 1.0);
    const bool ok = r.violation_count == 0 && r.max_consensus_err <= lim &&
                    static_cast<int>(r.consensus.size()) == e.params.padded_T / e.params.L;
    v.ok = v.ok && ok;
    d += fmt("alpha=%g max %.4g <= %.4g; ", alpha, r.max_consensus_err, lim);
  }
  v.detail = d + "checked at every block boundary";
  return v;
}

// Convex default-parameter regret plus a sublinearity sanity check.
Verdict convex_regret()
{
  Verdict v;
  std::string d;
  for (int n : {4, 8, 16})
  {
    const auto K = DecisionSet::ball(1.0, 4);
    Experiment e = experiment(lazy_cycle(n), K, schedule_random_linear(n, 10000, K, 1.0, 3003 + n),
                              AlgorithmKind::Adftgl, Mode::Convex, 0.0);
    e.trace_stride = 0;
    const RunResult r = run(e);
    const double b = bound_report(e).value("adftgl_convex");
    v.ok = v.ok && r.violation_count == 0 && r.max_regret() <= b;
    d += fmt("n=%g R=%.1f <= %.1f; ", n, r.max_regret(), b);
  }
  // Sublinear growth: mean over seeds of R_{T,1} on n=8, d=32.
  const auto K = DecisionSet::ball(1.0, 32);
  auto mean_regret = [&](int T) {
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 4; seed++)
    {
      Experiment e = experiment(lazy_cycle(8), K, schedule_random_linear(8, T, K, 1.0, seed),
                                AlgorithmKind::Adftgl, Mode::Convex, 0.0);
      e.trace_stride = 0;
      e.regret_learners = {0};
      acc += run(e).regret_first();
    }
    return acc / 4.0;
  };
  const double r_small = mean_regret(2500), r_large = mean_regret(10000);
  v.ok = v.ok && r_large <= 0.6 * r_small * 4.0;
  d += fmt("R(1e4)=%.1f <= 2.4 R(2500)=%.1f", r_large, 2.4 * r_small);
  v.detail = d;
  return v;
}

Verdict strongly_convex_regret()
{
  Verdict v;
  std::string d;
  for (int n : {4, 8, 16})
  {
    const auto K = DecisionSet::ball(1.0, 4);
    Experiment e =
      experiment(lazy_cycle(n), K, schedule_quadratic_tracking(n, 10000, K, 1.0, 4004 + n),
                 AlgorithmKind::Adftgl, Mode::StronglyConvex, 1.0);
    e.trace_stride = 0;
    const RunResult r = run(e);
    const double b = bound_report(e).value("adftgl_strongly_convex");
    v.ok = v.ok && r.violation_count == 0 && r.max_regret() <= b;
    d += fmt("n=%g R=%.1f <= %.4g; ", n, r.max_regret(), b);
  }
  v.detail = d;
  return v;
}

Verdict projection_free()
{
  Verdict v;
  std::string d;
  const auto K = DecisionSet::ball(1.0, 4);
  for (bool sc : {false, true})
  {
    const auto s = sc ? schedule_quadratic_tracking(8, 65536, K, 1.0, 5005)
                      : schedule_random_linear(8, 65536, K, 1.0, 5005);
    Experiment e = experiment(lazy_cycle(8), K, s, AlgorithmKind::PfAdftgl,
                              sc ? Mode::StronglyConvex : Mode::Convex, sc ? 1.0 : 0.0);
    e.trace_stride = 0;
    const RunResult r = run(e);
    const BoundReport rep = bound_report(e);
    const double tuned = rep.value(sc ? "pf_strongly_convex" : "pf_convex");
    const double general = rep.value("pf_general");
    const long long expect =
      static_cast<long long>(e.params.padded_T / e.params.L - 1) * e.params.L_gossip;
    const bool ok = r.violation_count == 0 && r.max_regret() <= tuned &&
                    r.max_regret() <= general && r.comm_rounds == expect;
    v.ok = v.ok && ok;
    d += std::string(sc ? "strongly convex" : "convex") +
         fmt(": R=%.1f <= %.4g, comm %g", r.max_regret(), tuned, r.comm_rounds) +
         fmt(" == %g (L=%g", static_cast<double>(expect), e.params.L) +
         fmt(", L'=%g); ", e.params.L_gossip);
  }
  v.detail = d;
  return v;
}

Verdict cg_gap()
{
  Verdict v;
  CounterRng rng(6006, {1});
  int violations = 0, total = 0;
  double worst = 0.0;
  for (SetKind kind : {SetKind::CenteredBox, SetKind::NonnegBox, SetKind::Ball})
  {
    for (int s = 0; s < 1000; s++, total++)
    {
      const int d = 1 + static_cast<int>(rng.uniform() * 8);
      const double R = std::exp(rng.uniform(-1.0, 1.0));
      const DecisionSet K = kind == SetKind::Ball        ? DecisionSet::ball(R, d)
                            : kind == SetKind::NonnegBox ? DecisionSet::nonneg_box(R, d)
                                                         : DecisionSet::centered_box(R, d);
      const int iters = 1 + static_cast<int>(rng.uniform() * 64);
      const double beta = std::exp(rng.uniform(-3.0, 3.0));
      const Vector z = testutil::gaussian(rng, d, std::exp(rng.uniform(-2.0, 2.0)));
      const Vector x0 = testutil::member(rng, K);
      const Vector out = cg_minimize(K, iters, z, beta, x0);
      const double gap = regularized_objective(z, beta, out) -
                         regularized_objective(z, beta, K.reg_argmin(z, beta));
      const double lim = 8.0 * beta * R * R / (iters + 2.0);
      worst = std::max(worst, gap / lim);
      if (gap > lim || !K.contains(out))
      {
        violations++;
      }
    }
  }
  v.ok = violations == 0;
  v.detail = fmt("%g violations in %g instances, worst gap/bound %.4f", violations, total, worst);
  return v;
}

Verdict lower_bound(bool sc)
{
  Verdict v;
  const int n = 8, T = 4096;
  const auto K = DecisionSet::centered_box(1.0, 1);
  const auto s = sc ? schedule_lower_strongly_convex(n, T, K, 1.0, T - 1, 7007)
                    : schedule_lower_convex(n, T, K, 1.0, T - 1, 7007);
  Experiment e = experiment(lazy_cycle(n), K, s, AlgorithmKind::Adftgl,
                            sc ? Mode::StronglyConvex : Mode::Convex, sc ? 1.0 : 0.0);
  const double b =
    bound_report(e).value(sc ? "lower_strongly_convex_expectation" : "lower_convex_expectation");
  const ReplicateStats st = replicate(e, 200, sc ? 8008 : 7007, 1);
  v.ok = st.mean >= b - 3.0 * st.stderr_mean;
  v.detail = fmt("mean R_T_1 %.3f, SE %.3f, bound %.4g", st.mean, st.stderr_mean, b) +
             " (200 seeds, need mean >= bound - 3 SE)";
  return v;
}

Verdict dftgl_consensus()
{
  Verdict v;
  std::string d;
  for (int n : {16, 64})
  {
    for (double alpha : {0.0, 1.0})
    {
      const auto K = DecisionSet::ball(1.0, 4);
      const auto s = alpha > 0 ? schedule_quadratic_tracking(n, 8192, K, alpha, 9009)
                               : schedule_random_linear(n, 8192, K, 1.0, 9009);
      Experiment e = experiment(lazy_cycle(n), K, s, AlgorithmKind::Dftgl,
                                alpha > 0 ? Mode::StronglyConvex : Mode::Convex, alpha);
      e.trace_stride = 0;
      e.consensus_every = 1;
      const RunResult r = run(e);
      const double xi = e.schedule.lipschitz() + alpha * K.radius();
      const double lim = dftgl_consensus_bound(xi, n, e.P.rho());
      v.ok = v.ok && r.violation_count == 0 && r.max_consensus_err <= lim &&
             static_cast<int>(r.consensus.size()) == 8192;
      d += fmt("n=%g alpha=%g max %.3g", n, alpha, r.max_consensus_err) + fmt(" <= %.4g; ", lim);
    }
  }
  v.detail = d;
  return v;
}

Verdict spectral()
{
  Verdict v;
  double worst_eig = 0.0;
  int bound_fail = 0;
  for (int n = 4; n <= 128; n += 2)
  {
    if (!check_cycle_spectral_bound(n))
    {
      bound_fail++;
    }
    for (bool lazy : {false, true})
    {
      const GossipMatrix P = max_degree_weights(build_cycle(n), lazy);
      std::vector<double> want, got;
      for (int k = 0; k < n; k++)
      {
        const double mu = (1.0 + 2.0 * std::cos(2.0 * std::numbers::pi * k / n)) / 3.0;
        want.push_back(lazy ? (1.0 + mu) / 2.0 : mu);
        got.push_back(P.eigenvalues()(k));
      }
      std::sort(want.begin(), want.end());
      std::sort(got.begin(), got.end());
      for (int k = 0; k < n; k++)
      {
        worst_eig = std::max(worst_eig, std::abs(want[k] - got[k]));
      }
    }
  }
  v.ok = bound_fail == 0 && worst_eig <= 1e-9;
  v.detail = fmt("cycle bound failures %g, max eigenvalue error %.2e", bound_fail, worst_eig);
  return v;
}

std::vector<StackedState> drive(OnlineAlgorithm &a, const LossSchedule &s, int T)
{
  std::vector<StackedState> out;
  for (int t = 1; t <= T; t++)
  {
    const StackedState X = a.decisions();
    StackedState G(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); i++)
    {
      G.row(i) = s.loss(t, static_cast<int>(i)).gradient(X.row(i).transpose()).transpose();
    }
    out.push_back(X);
    a.advance(G);
  }
  return out;
}

Verdict oracle_equivalence()
{
  Verdict v;
  const GossipMatrix P = max_degree_weights(build_path(2), true);
  const double Pm[2][2] = {{P(0, 0), P(0, 1)}, {P(1, 0), P(1, 1)}};
  const auto K1 = DecisionSet::centered_box(1.0, 1);
  const double theta = spectral_params(P).theta;
  int mismatches = 0;
  for (int L : {1, 2})
  {
    for (double alpha : {0.0, 0.5})
    {
      const auto s = alpha > 0 ? schedule_quadratic_tracking(2, 4, K1, alpha, 11)
                               : schedule_random_linear(2, 4, K1, 1.0, 11);
      Adftgl a(P, K1, {alpha, 0.8, theta, L});
      const auto got = drive(a, s, 4);
      const auto want = oracle::adftgl_two_learners(Pm, theta, alpha, 0.8, L, 1.0, 4, s);
      for (int t = 0; t < 4; t++)
      {
        for (int i = 0; i < 2; i++)
        {
          mismatches += got[t](i, 0) == want[t][i] ? 0 : 1;
        }
      }
    }
  }

  const GossipMatrix one = max_degree_weights(build_complete(1), false);
  const auto K = DecisionSet::ball(1.0, 3);
  double worst = 0.0;
  auto compare = [&](const std::vector<StackedState> &a, const std::vector<StackedState> &b,
                     int shift) {
    for (std::size_t t = shift; t < a.size(); t++)
    {
      worst = std::max(worst, (a[t] - b[t - shift]).cwiseAbs().maxCoeff());
    }
  };
  const auto lin = schedule_random_linear(1, 200, K, 1.0, 12);
  const auto quad = schedule_quadratic_tracking(1, 200, K, 0.7, 12);
  Adftgl ad(one, K, {0.0, 2.0, 0.5, 1});
  Dftgl dl(one, K, {0.0, 2.0});
  Dftgl dq(one, K, {0.7, 0.0});
  Centralized fl = Centralized::ftrl(1, K, 2.0);
  Centralized fa = Centralized::ftal(1, K, 0.7);
  const auto ftrl = drive(fl, lin, 200);
  compare(drive(ad, lin, 200), ftrl, 1);
  compare(drive(dl, lin, 200), ftrl, 0);
  compare(drive(dq, quad, 200), drive(fa, quad, 200), 0);
  v.ok = mismatches == 0 && worst <= 1e-9;
  v.detail = fmt("n=2 bitwise mismatches %g of 32; n=1 max deviation %.2e", mismatches, worst);
  return v;
}

}  // namespace

int main()
{
  struct Criterion
  {
    const char *name;
    double limit_s;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria = {
    {"accelerated gossip contraction", 10, contraction},
    {"AD-FTGL dual consensus error", 30, adftgl_consensus},
    {"convex regret bound and sublinear growth", 120, convex_regret},
    {"strongly convex regret bound", 120, strongly_convex_regret},
    {"projection-free bounds and communication count", 300, projection_free},
    {"conditional gradient gap", 10, cg_gap},
    {"convex lower bound in expectation", 300, [] { return lower_bound(false); }},
    {"strongly convex lower bound in expectation", 300, [] { return lower_bound(true); }},
    {"D-FTGL gossip error", 60, dftgl_consensus},
    {"spectral checks", 5, spectral},
    {"oracle equivalence", 1, oracle_equivalence},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); k++)
  {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try
    {
      v = criteria[k].check();
    }
    catch (const std::exception &e)
    {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < criteria[k].limit_s;
    if (v.detail.size() > 2 && v.detail.ends_with("; "))
    {
      v.detail.resize(v.detail.size() - 2);
    }
    const bool ok = v.ok && in_time;
    failed += ok ? 0 : 1;
    std::printf("[%s] criterion %zu: %s: %s [%.2f s, limit %.0f s%s]\n", ok ? "PASS" : "FAIL",
                k + 1, criteria[k].name, v.detail.c_str(), secs, criteria[k].limit_s,
                in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
