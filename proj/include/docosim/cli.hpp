#ifndef DOCOSIM_CLI_HPP
#define DOCOSIM_CLI_HPP

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "docosim/config.hpp"
#include "docosim/gossip.hpp"
#include "docosim/harness.hpp"
#include "docosim/rng.hpp"

#ifndef DOCOSIM_VERSION
#define DOCOSIM_VERSION "0.0.0"
#endif

namespace docosim
{

enum ExitCode
{
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitInvariant = 3,
  kExitPartial = 4
};

struct CliOptions
{
  std::string config;
  std::string out = ".";
  int jobs = 0;
  bool quiet = false;
};

namespace fs = std::filesystem;

// 17 significant digits; NaN becomes an empty field.
inline std::string fmt_double(double v)
{
  if (std::isnan(v))
  {
    return "";
  }
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline void write_trace_csv(std::ostream &os, const RunResult &r)
{
  os << "round,learner,cum_loss,comparator,regret,comm_rounds,consensus_err\n";
  for (const TraceRow &row : r.rows)
  {
    os << row.round << ',' << row.learner + 1 << ',' << fmt_double(row.cum_loss) << ','
       << fmt_double(row.comparator) << ',' << fmt_double(row.regret) << ','
       << row.comm_rounds << ',' << fmt_double(row.consensus_err) << '\n';
  }
}

inline json bounds_json(const BoundReport &rep)
{
  json arr = json::array();
  for (const BoundEntry &b : rep.entries)
  {
    arr.push_back(
      {{"name", b.name}, {"kind", b.upper ? "upper" : "lower"}, {"value", b.value}, {"note", b.note}});
  }
  return arr;
}

// Upper bound valid for the parameters actually used (NaN if none).
inline double applicable_bound(const BoundReport &rep)
{
  for (const char *name : {"adftgl_general", "pf_general", "dftgl_general"})
  {
    if (const BoundEntry *b = rep.find(name))
    {
      return b->value;
    }
  }
  return std::nan("");
}

inline json metadata_json(const ExperimentSpec &spec, const Experiment &e, const RunResult &r,
                          const std::optional<ReplicateStats> &reps)
{
  const BoundReport rep = bound_report(e);
  const SpectralParams sp = spectral_params(e.P);
  json final_regret = json::object();
  for (int i : r.learners)
  {
    final_regret[std::to_string(i + 1)] = r.final_regret[i];
  }
  json m;
  m[kMetadataMarker] = 1;
  m["version"] = DOCOSIM_VERSION;
  json cfg = spec.source;
  cfg.erase("sweep");
  m["config"] = cfg;
  m["resolved"] = {{"algorithm", to_string(e.algorithm)},
                   {"mode", e.mode == Mode::Convex ? "convex" : "strongly_convex"},
                   {"alpha", e.params.alpha},
                   {"h", e.params.h},
                   {"L", e.params.L},
                   {"L_prime", e.params.L_gossip},
                   {"theta", e.params.theta},
                   {"T", r.nominal_T},
                   {"padded_T", r.padded_T},
                   {"schedule_seed", e.schedule.seed()},
                   {"G", e.schedule.lipschitz()},
                   {"R", e.K.radius()}};
  m["spectral"] = {{"sigma2", e.P.sigma2()},
                   {"rho", e.P.rho()},
                   {"theta", sp.theta},
                   {"L_gossip", sp.gossip_iterations},
                   {"is_psd", e.P.is_psd()}};
  m["bounds"] = bounds_json(rep);
  m["bound_value"] = std::isnan(applicable_bound(rep)) ? json(nullptr) : json(applicable_bound(rep));
  m["comparator"] = {{"value", r.comparator.value},
                     {"x", std::vector<double>(r.comparator.x.data(),
                                               r.comparator.x.data() + r.comparator.x.size())}};
  m["comm_rounds"] = r.comm_rounds;
  m["max_consensus_err"] = r.max_consensus_err;
  m["consensus_limit"] = r.consensus_limit;
  m["final_regret"] = final_regret;
  m["R_T_1"] = r.regret_first();
  m["invariant_violations"] = r.violation_count;
  if (reps)
  {
    m["replications"] = {{"count", reps->values.size()},
                         {"mean_R_T_1", reps->mean},
                         {"stddev_R_T_1", reps->stddev},
                         {"values", reps->values}};
  }
  return m;
}

struct RunOutcome
{
  int code = kExitOk;
  double R_T_1 = std::nan("");
  double bound_value = std::nan("");
  int comm_rounds = 0;
  std::string message;
};

//
// Builds, runs and writes one experiment into `dir`. Configuration problems
// give kExitConfig, detected invariant violations kExitInvariant.
//
inline RunOutcome run_to_directory(const ExperimentSpec &spec, const fs::path &dir,
                                   int jobs = 1)
{
  RunOutcome out;
  std::optional<Experiment> exp;
  try
  {
    exp.emplace(experiment_from_spec(spec));
    make_algorithm(*exp);
  }
  catch (const std::exception &e)
  {
    out.code = kExitConfig;
    out.message = std::string("config error: ") + e.what();
    return out;
  }
  const Experiment &e = *exp;
  RunResult r;
  std::optional<ReplicateStats> reps;
  try
  {
    r = run(e);
    if (spec.replications > 1)
    {
      reps = replicate(e, spec.replications, spec.seed, jobs);
    }
  }
  catch (const std::exception &err)
  {
    out.code = kExitInvariant;
    out.message = std::string("run failed: ") + err.what();
    return out;
  }

  const CommunicationAudit audit = communication_audit(r, e);
  std::ostringstream diag;
  for (const InvariantViolation &v : r.violations)
  {
    diag << "invariant violation at round " << v.round;
    if (v.learner >= 0)
    {
      diag << ", learner " << v.learner + 1;
    }
    diag << ": " << v.what << " (value " << fmt_double(v.value) << ", limit "
         << fmt_double(v.limit) << ")\n";
  }
  if (r.violation_count > static_cast<long long>(r.violations.size()))
  {
    diag << "... " << r.violation_count - static_cast<long long>(r.violations.size())
         << " further violations\n";
  }
  if (!audit.ok())
  {
    diag << "communication audit: counted " << audit.counted << " rounds, expected "
         << audit.expected << "\n";
  }

  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "trace.csv");
    write_trace_csv(csv, r);
  }
  {
    std::ofstream meta(dir / "metadata.json");
    meta << metadata_json(spec, e, r, reps).dump(2) << "\n";
  }
  out.R_T_1 = r.regret_first();
  out.bound_value = applicable_bound(bound_report(e));
  out.comm_rounds = r.comm_rounds;
  out.message = diag.str();
  out.code = (r.violation_count > 0 || !audit.ok()) ? kExitInvariant : kExitOk;
  return out;
}

inline std::optional<ExperimentSpec> load_spec(const std::string &path, std::ostream &err)
{
  try
  {
    return parse_spec(load_json(path));
  }
  catch (const std::exception &e)
  {
    err << "config error: " << e.what() << "\n";
    return std::nullopt;
  }
}

inline int cmd_run(const CliOptions &opt, std::ostream &out = std::cout,
                   std::ostream &err = std::cerr)
{
  auto spec = load_spec(opt.config, err);
  if (!spec)
  {
    return kExitConfig;
  }
  if (!spec->sweep.is_null())
  {
    err << "config error: config has sweep axes; use the sweep command\n";
    return kExitConfig;
  }
  const int jobs = opt.jobs > 0 ? opt.jobs : 1;
  const RunOutcome o = run_to_directory(*spec, opt.out, jobs);
  if (!o.message.empty())
  {
    err << o.message;
    if (o.message.back() != '\n')
    {
      err << "\n";
    }
  }
  if (o.code == kExitOk && !opt.quiet)
  {
    out << "R_T_1=" << fmt_double(o.R_T_1) << " comm_rounds=" << o.comm_rounds
        << " bound=" << fmt_double(o.bound_value) << "\n";
  }
  return o.code;
}

inline std::string axis_text(const json &v)
{
  return v.is_string() ? v.get<std::string>() : v.dump();
}

inline int cmd_sweep(const CliOptions &opt, std::ostream &out = std::cout,
                     std::ostream &err = std::cerr)
{
  auto spec = load_spec(opt.config, err);
  if (!spec)
  {
    return kExitConfig;
  }
  const std::vector<SweepPoint> points = expand_sweep(*spec);
  std::vector<RunOutcome> outcomes(points.size());
  const int workers =
    std::max(1, std::min<int>(static_cast<int>(points.size()),
                              opt.jobs > 0 ? opt.jobs
                                           : static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++)
    {
      std::ostringstream name;
      name << "point_" << std::setw(3) << std::setfill('0') << k;
      RunOutcome o;
      try
      {
        const ExperimentSpec pt = parse_spec(points[k].config, false);
        o = run_to_directory(pt, fs::path(opt.out) / name.str(), 1);
      }
      catch (const std::exception &e)
      {
        o.code = kExitConfig;
        o.message = std::string("config error: ") + e.what();
      }
      {
        std::lock_guard<std::mutex> lock(log_mutex);
        if (!o.message.empty())
        {
          err << name.str() << ": " << o.message << (o.message.back() == '\n' ? "" : "\n");
        }
        if (!opt.quiet)
        {
          out << name.str() << " exit=" << o.code << "\n";
        }
      }
      outcomes[k] = std::move(o);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; w++)
  {
    pool.emplace_back(worker);
  }
  for (auto &t : pool)
  {
    t.join();
  }

  fs::create_directories(opt.out);
  std::ofstream csv(fs::path(opt.out) / "sweep_summary.csv");
  csv << "point";
  if (!points.empty())
  {
    for (const auto &[axis, _] : points.front().axes)
    {
      csv << ',' << axis;
    }
  }
  csv << ",R_T_1,bound_value,comm_rounds,status\n";
  bool all_ok = true;
  for (std::size_t k = 0; k < points.size(); k++)
  {
    const RunOutcome &o = outcomes[k];
    all_ok = all_ok && o.code == kExitOk;
    csv << k;
    for (const auto &[_, v] : points[k].axes)
    {
      csv << ',' << axis_text(v);
    }
    csv << ',' << fmt_double(o.R_T_1) << ',' << fmt_double(o.bound_value) << ','
        << (o.code == kExitConfig ? std::string() : std::to_string(o.comm_rounds)) << ','
        << (o.code == kExitOk ? "ok" : o.code == kExitConfig ? "config_error" : "invariant_violation")
        << '\n';
  }
  return all_ok ? kExitOk : kExitPartial;
}

inline int cmd_validate(const CliOptions &opt, std::ostream &out = std::cout,
                        std::ostream &err = std::cerr)
{
  auto spec = load_spec(opt.config, err);
  if (!spec)
  {
    return kExitConfig;
  }
  try
  {
    const Experiment e = experiment_from_spec(*spec);
    make_algorithm(e);
    const SpectralParams sp = spectral_params(e.P);
    out << std::setprecision(17);
    out << "n=" << e.P.size() << "\n";
    out << "lazy=" << (spec->lazy ? "true" : "false") << "\n";
    out << "sigma2=" << e.P.sigma2() << "\n";
    out << "rho=" << e.P.rho() << "\n";
    out << "theta=" << sp.theta << "\n";
    out << "L=" << e.params.L << "\n";
    out << "L_prime=" << e.params.L_gossip << "\n";
    out << "L_gossip=" << sp.gossip_iterations << "\n";
    out << "is_psd=" << (e.P.is_psd() ? "true" : "false") << "\n";
    out << "eigenvalues=";
    for (Eigen::Index k = 0; k < e.P.eigenvalues().size(); k++)
    {
      out << (k ? " " : "") << e.P.eigenvalues()(k);
    }
    out << "\n";
    if (spec->topology.kind == "cycle")
    {
      out << "cycle_spectral_bound=" << (check_cycle_spectral_bound(e.P.size()) ? "true" : "false")
          << "\n";
    }
  }
  catch (const std::exception &e)
  {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

//
// Consensus error of standard versus accelerated gossip from one random
// stacked state (n x d, seeded by the master seed), for iterations 0..L.
//
inline int cmd_gossip_bench(const CliOptions &opt, std::ostream &out = std::cout,
                            std::ostream &err = std::cerr)
{
  auto spec = load_spec(opt.config, err);
  if (!spec)
  {
    return kExitConfig;
  }
  std::optional<GossipMatrix> P;
  try
  {
    P.emplace(max_degree_weights(build_topology(spec->topology), spec->lazy));
  }
  catch (const std::exception &e)
  {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const SpectralParams sp = spectral_params(*P);
  const int iters = spec->algorithm.L.value_or(sp.gossip_iterations);
  const int n = P->size(), d = spec->d;
  CounterRng rng(spec->seed, {7});
  StackedState X0(n, d);
  for (int i = 0; i < n; i++)
  {
    for (int c = 0; c < d; c++)
    {
      X0(i, c) = rng.normal();
    }
  }
  fs::create_directories(opt.out);
  std::ofstream csv(fs::path(opt.out) / "gossip_bench.csv");
  csv << "kernel,iteration,consensus_error\n";
  StackedState X = X0;
  for (int k = 0; k <= iters; k++)
  {
    csv << "standard," << k << ',' << fmt_double(consensus_error(X)) << '\n';
    X = standard_step(*P, X);
  }
  const auto traj = accelerated_trajectory(*P, X0, sp.theta, iters);
  for (int k = 0; k <= iters; k++)
  {
    csv << "accelerated," << k << ',' << fmt_double(consensus_error(traj[k])) << '\n';
  }
  if (!opt.quiet)
  {
    out << "iterations=" << iters << " theta=" << fmt_double(sp.theta) << "\n";
  }
  return kExitOk;
}

inline int cmd_bounds(const CliOptions &opt, std::ostream &out = std::cout,
                      std::ostream &err = std::cerr)
{
  auto spec = load_spec(opt.config, err);
  if (!spec)
  {
    return kExitConfig;
  }
  try
  {
    const Experiment e = experiment_from_spec(*spec);
    const BoundReport rep = bound_report(e);
    out << std::left << std::setw(36) << "bound" << std::setw(7) << "kind"
        << std::setw(26) << "value"
        << "note\n";
    for (const BoundEntry &b : rep.entries)
    {
      out << std::setw(36) << b.name << std::setw(7) << (b.upper ? "upper" : "lower")
          << std::setw(26) << fmt_double(b.value) << b.note << "\n";
    }
  }
  catch (const std::exception &e)
  {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace docosim

#endif  // DOCOSIM_CLI_HPP
