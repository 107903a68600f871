#ifndef DOCOSIM_HARNESS_HPP
#define DOCOSIM_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "docosim/algorithms.hpp"
#include "docosim/bounds.hpp"
#include "docosim/decision_set.hpp"
#include "docosim/gossip.hpp"
#include "docosim/gossip_matrix.hpp"
#include "docosim/losses.hpp"
#include "docosim/parameters.hpp"
#include "docosim/rng.hpp"

namespace docosim
{

//
// One fully resolved simulation: topology, feasible set, adversary,
// learner and its parameters. params.padded_T >= schedule.horizon().
//
struct Experiment
{
  Experiment(GossipMatrix P_, DecisionSet K_, LossSchedule schedule_)
    : P(std::move(P_)), K(K_), schedule(std::move(schedule_))
  {
  }

  GossipMatrix P;
  DecisionSet K;
  LossSchedule schedule;
  AlgorithmKind algorithm = AlgorithmKind::Adftgl;
  Mode mode = Mode::Convex;
  ResolvedParams params;
  bool exact_inner = false;

  // Emit trace rows every `trace_stride` rounds (0: final round only).
  int trace_stride = 1;
  // Consensus sampling cadence for per-round learners (block learners
  // are sampled at every block boundary).
  int consensus_every = 64;
  // 0-indexed learners whose global regret is tracked; empty means all.
  // Learner 0 is always included.
  std::vector<int> regret_learners;
  // Compare consensus errors against their theoretical bounds.
  bool check_consensus_bound = true;
};

struct TraceRow
{
  int round = 0;
  int learner = 0;
  double cum_loss = 0.0;
  double comparator = 0.0;
  double regret = 0.0;
  int comm_rounds = 0;
  // Latest sampled ||z_i - zbar|| (NaN before the first sample).
  double consensus_err = std::numeric_limits<double>::quiet_NaN();
};

struct InvariantViolation
{
  int round = 0;
  int learner = 0;
  std::string what;
  double value = 0.0;
  double limit = 0.0;
};

struct ConsensusSample
{
  int round = 0;
  // max_i ||z_i - zbar||.
  double max_err = 0.0;
};

struct Comparator
{
  Vector x;
  double value = 0.0;
  // Per-round loss sums; rounds 1..T are stored at index t-1.
  std::vector<QuadraticSum> rounds;
};

struct RunResult
{
  std::string algorithm;
  int nominal_T = 0;
  int padded_T = 0;
  std::vector<int> learners;
  std::vector<TraceRow> rows;
  // Final R_{T,i}, NaN for learners not tracked.
  std::vector<double> final_regret;
  std::vector<double> final_loss;
  Comparator comparator;
  int comm_rounds = 0;
  std::vector<ConsensusSample> consensus;
  double max_consensus_err = 0.0;
  // Theoretical consensus limit checked during the run (0 if none).
  double consensus_limit = 0.0;
  std::vector<InvariantViolation> violations;
  long long violation_count = 0;

  double regret_first() const { return final_regret.at(0); }
  double max_regret() const
  {
    double m = -std::numeric_limits<double>::infinity();
    for (double r : final_regret)
    {
      if (!std::isnan(r))
      {
        m = std::max(m, r);
      }
    }
    return m;
  }
};

//
// Exact minimizer of sum_t sum_i f_{t,i} over K. The total is
// (A/2)||x||^2 + <b,x> + c; for A > 0 the projection of -b/A is exact, for
// A = 0 the linear minimizer is a vertex. An all-zero total yields the origin.
//
inline Comparator offline_comparator(const LossSchedule &schedule, const DecisionSet &K)
{
  Comparator out;
  const int T = schedule.horizon();
  out.rounds.reserve(T);
  QuadraticSum total(K.dimension());
  for (int t = 1; t <= T; t++)
  {
    out.rounds.push_back(schedule.round_sum(t));
    total.add(out.rounds.back());
  }
  if (total.alpha > 0.0)
  {
    out.x = K.project(-total.linear / total.alpha);
  }
  else if (total.linear.isZero(0.0))
  {
    out.x = Vector::Zero(K.dimension());
  }
  else
  {
    out.x = K.lmo(total.linear);
  }
  out.value = total.value(out.x);
  return out;
}

inline std::unique_ptr<OnlineAlgorithm> make_algorithm(const Experiment &e)
{
  const ResolvedParams &p = e.params;
  const int n = e.P.size();
  switch (e.algorithm)
  {
    case AlgorithmKind::Adftgl:
      return std::make_unique<Adftgl>(e.P, e.K, AdftglParams{p.alpha, p.h, p.theta, p.L});
    case AlgorithmKind::PfAdftgl:
      return std::make_unique<PfAdftgl>(
        e.P, e.K, PfAdftglParams{p.alpha, p.h, p.theta, p.L, p.L_gossip, e.exact_inner});
    case AlgorithmKind::Dftgl:
      return std::make_unique<Dftgl>(e.P, e.K, DftglParams{p.alpha, p.h});
    case AlgorithmKind::Ftrl:
      return std::make_unique<Centralized>(Centralized::ftrl(n, e.K, p.h));
    case AlgorithmKind::Ftal:
      return std::make_unique<Centralized>(Centralized::ftal(n, e.K, p.alpha));
  }
  throw std::logic_error("make_algorithm: unknown algorithm");
}

inline BoundInputs bound_inputs(const Experiment &e)
{
  BoundInputs in;
  in.algorithm = e.algorithm;
  in.mode = e.mode;
  in.n = e.P.size();
  in.T = e.params.padded_T;
  in.T_nominal = e.schedule.horizon();
  in.G = e.schedule.lipschitz();
  in.R = e.K.radius();
  in.alpha = e.params.alpha;
  in.h = e.params.h;
  in.L = e.params.L;
  in.L_gossip = e.params.L_gossip;
  in.sigma2 = e.P.sigma2();
  in.C = e.schedule.comm_budget() >= 0 ? e.schedule.comm_budget() : e.schedule.horizon() - 1;
  in.schedule = e.schedule.kind();
  if (!e.schedule.split().boundaries.empty())
  {
    in.split = e.schedule.split();
  }
  return in;
}

inline BoundReport bound_report(const Experiment &e) { return bound_report(bound_inputs(e)); }

namespace detail
{
inline double consensus_limit(const Experiment &e)
{
  if (!e.check_consensus_bound)
  {
    return 0.0;
  }
  const BoundReport rep = bound_report(e);
  if (const BoundEntry *b = rep.find("adftgl_consensus"))
  {
    return b->value;
  }
  if (const BoundEntry *b = rep.find("dftgl_consensus"))
  {
    return b->value;
  }
  return 0.0;
}
}  // namespace detail

//
// Runs the learner for padded_T rounds. Per round every learner's local
// gradient is taken at its own decision, the global loss of each tracked
// learner is sum_j f_{t,j}(x_i(t)), and after each finalized dual update the
// duals are compared with the exact network average zbar, kept here as a
// prefix sum of averaged generalized gradients.
//
inline RunResult run(const Experiment &e, const Comparator *precomputed = nullptr)
{
  const int n = e.P.size();
  const int d = e.K.dimension();
  if (e.schedule.learners() != n)
  {
    throw std::invalid_argument("run: schedule has " + std::to_string(e.schedule.learners()) +
                                " learners, topology has " + std::to_string(n));
  }
  if (e.schedule.dimension() != d)
  {
    throw std::invalid_argument("run: schedule dimension differs from the decision set");
  }
  const int T = e.schedule.horizon();
  const int padded = std::max(e.params.padded_T, T);

  RunResult res;
  res.nominal_T = T;
  res.padded_T = padded;
  res.comparator = precomputed ? *precomputed : offline_comparator(e.schedule, e.K);
  const Comparator &cmp = res.comparator;
  if (static_cast<int>(cmp.rounds.size()) != T)
  {
    throw std::invalid_argument("run: comparator built for a different horizon");
  }

  std::vector<char> tracked(n, e.regret_learners.empty() ? 1 : 0);
  tracked[0] = 1;
  for (int i : e.regret_learners)
  {
    if (i < 0 || i >= n)
    {
      throw std::invalid_argument("run: regret learner " + std::to_string(i + 1) +
                                  " out of range");
    }
    tracked[i] = 1;
  }
  for (int i = 0; i < n; i++)
  {
    if (tracked[i])
    {
      res.learners.push_back(i);
    }
  }

  auto algo = make_algorithm(e);
  res.algorithm = algo->name();
  const int block = algo->block_length();
  const bool per_round = e.algorithm == AlgorithmKind::Dftgl;
  const int every = std::max(1, e.consensus_every);
  res.consensus_limit = detail::consensus_limit(e);

  auto violate = [&](int t, int i, std::string what, double v, double lim) {
    res.violation_count++;
    if (res.violations.size() < 100)
    {
      res.violations.push_back({t, i, std::move(what), v, lim});
    }
  };

  std::vector<double> cum(n, 0.0);
  std::vector<double> latest_err(n, std::numeric_limits<double>::quiet_NaN());
  double cmp_cum = 0.0;
  // zbar_prefix[b] = average dual after b blocks of generalized gradients.
  std::vector<Eigen::RowVectorXd> zbar_prefix{Eigen::RowVectorXd::Zero(d)};
  Eigen::RowVectorXd dbar_acc = Eigen::RowVectorXd::Zero(d);
  StackedState grads(n, d);
  int comm = 0;

  for (int t = 1; t <= padded; t++)
  {
    const StackedState X = algo->decisions();
    const QuadraticSum zero_sum(d);
    const QuadraticSum &round = t <= T ? cmp.rounds[t - 1] : zero_sum;

    for (int i = 0; i < n; i++)
    {
      const Vector x = X.row(i).transpose();
      if (!e.K.contains(x))
      {
        violate(t, i, "decision outside the feasible set", 0.0, 0.0);
      }
      grads.row(i) = e.schedule.loss(t, i).gradient(x).transpose();
      if (tracked[i])
      {
        cum[i] += round.value(x);
      }
    }
    cmp_cum += round.value(cmp.x);
    dbar_acc += (grads - algo->alpha() * X).colwise().mean();
    if (t % block == 0)
    {
      zbar_prefix.push_back(zbar_prefix.back() + dbar_acc);
      dbar_acc.setZero();
    }

    const RoundInfo info = algo->advance(grads);
    comm += info.gossiped ? 1 : 0;

    const StackedState *Z = algo->duals();
    const bool sample = Z && info.block_closed && (!per_round || t % every == 0 || t == padded);
    if (sample)
    {
      const int b = algo->dual_blocks();
      const Eigen::RowVectorXd &zbar = zbar_prefix.at(b);
      const double scale = std::max(1.0, zbar.norm());
      const double drift = (row_mean(*Z) - zbar).norm();
      if (drift > 1e-8 * scale * std::max(1, b))
      {
        violate(t, -1, "dual average drifted from the exact network average", drift,
                1e-8 * scale);
      }
      double worst = 0.0;
      for (int i = 0; i < n; i++)
      {
        const double err = (Z->row(i) - zbar).norm();
        latest_err[i] = err;
        worst = std::max(worst, err);
        if (res.consensus_limit > 0.0 && err > res.consensus_limit * (1.0 + 1e-9))
        {
          violate(t, i, "consensus error above its theoretical bound", err, res.consensus_limit);
        }
      }
      res.consensus.push_back({t, worst});
      res.max_consensus_err = std::max(res.max_consensus_err, worst);
    }

    const bool emit = (e.trace_stride > 0 && t % e.trace_stride == 0) || t == padded;
    if (emit)
    {
      for (int i : res.learners)
      {
        res.rows.push_back({t, i, cum[i], cmp_cum, cum[i] - cmp_cum, comm, latest_err[i]});
      }
    }
  }
  if (comm != algo->gossip_rounds())
  {
    violate(padded, -1, "harness and learner disagree on communication rounds", comm,
            algo->gossip_rounds());
  }
  res.comm_rounds = comm;
  res.final_regret.assign(n, std::numeric_limits<double>::quiet_NaN());
  res.final_loss.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (int i : res.learners)
  {
    res.final_regret[i] = cum[i] - cmp_cum;
    res.final_loss[i] = cum[i];
  }
  return res;
}

struct CommunicationAudit
{
  long long expected = 0;
  long long counted = 0;
  bool ok() const { return expected == counted; }
};

// Expected exchanges: AD-FTGL one per round from block 2 on, the
// projection-free variant L' per block from block 2 on, D-FTGL one per round
// after the first, centralized baselines none.
inline CommunicationAudit communication_audit(const RunResult &r, const Experiment &e)
{
  CommunicationAudit a;
  a.counted = r.comm_rounds;
  const long long T = r.padded_T;
  const int L = e.params.L;
  switch (e.algorithm)
  {
    case AlgorithmKind::Adftgl:
      a.expected = T - L;
      break;
    case AlgorithmKind::PfAdftgl:
      a.expected = (T / L - 1) * e.params.L_gossip;
      break;
    case AlgorithmKind::Dftgl:
      a.expected = T - 1;
      break;
    default:
      a.expected = 0;
  }
  return a;
}

struct ReplicateStats
{
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_mean = 0.0;
};

inline ReplicateStats summarize(std::vector<double> values)
{
  ReplicateStats s;
  s.values = std::move(values);
  const double k = static_cast<double>(s.values.size());
  for (double v : s.values)
  {
    s.mean += v;
  }
  s.mean /= k;
  if (s.values.size() > 1)
  {
    double ss = 0.0;
    for (double v : s.values)
    {
      ss += (v - s.mean) * (v - s.mean);
    }
    s.stddev = std::sqrt(ss / (k - 1.0));
  }
  s.stderr_mean = s.stddev / std::sqrt(k);
  return s;
}

//
// R_{T,1} over `reps` reseeded copies of the experiment; replicate r uses the
// schedule seed derive_seed(master, r). Results are ordered by replicate
// index regardless of `jobs`.
//
inline ReplicateStats replicate(const Experiment &e, int reps, std::uint64_t master, int jobs = 1)
{
  if (reps < 1)
  {
    throw std::invalid_argument("replicate: reps must be >= 1");
  }
  std::vector<double> out(reps, 0.0);
  auto one = [&](int r) {
    Experiment copy = e;
    copy.schedule = e.schedule.reseeded(derive_seed(master, static_cast<std::uint64_t>(r)));
    copy.trace_stride = 0;
    copy.regret_learners = {0};
    out[r] = run(copy).regret_first();
  };
  jobs = std::clamp(jobs, 1, reps);
  if (jobs == 1)
  {
    for (int r = 0; r < reps; r++)
    {
      one(r);
    }
    return summarize(std::move(out));
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; w++)
  {
    pool.emplace_back([&, w] {
      try
      {
        for (int r = next++; r < reps; r = next++)
        {
          one(r);
        }
      }
      catch (...)
      {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &th : pool)
  {
    th.join();
  }
  for (auto &err : errors)
  {
    if (err)
    {
      std::rethrow_exception(err);
    }
  }
  return summarize(std::move(out));
}

}  // namespace docosim

#endif  // DOCOSIM_HARNESS_HPP
