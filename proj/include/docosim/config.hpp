#ifndef DOCOSIM_CONFIG_HPP
#define DOCOSIM_CONFIG_HPP

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "docosim/bounds.hpp"
#include "docosim/graph.hpp"
#include "docosim/harness.hpp"

namespace docosim
{

using json = nlohmann::json;

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Marker key identifying a run's metadata file.
inline constexpr const char *kMetadataMarker = "docosim_metadata";

struct TopologySpec
{
  std::string kind = "cycle";
  int n = 0;
  std::vector<Edge> edges;
};

struct ScheduleSpec
{
  std::string kind;
  std::optional<double> G;
  std::optional<double> alpha;
  std::optional<int> C;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;
};

struct AlgorithmSpec
{
  std::string name = "adftgl";
  std::optional<std::string> mode;
  std::optional<double> alpha;
  std::optional<double> h;
  std::optional<int> L;
  std::optional<int> L_prime;
  std::optional<double> theta;
  bool exact_inner = false;
};

struct OutputSpec
{
  int trace_stride = 1;
  int consensus_every = 64;
  // 1-based learner ids.
  std::vector<int> regret_learners;
};

struct ExperimentSpec
{
  TopologySpec topology;
  bool lazy = true;
  SetKind set_kind = SetKind::CenteredBox;
  double R = 1.0;
  int d = 1;
  ScheduleSpec schedule;
  AlgorithmSpec algorithm;
  int T = 0;
  std::uint64_t seed = 0;
  int replications = 1;
  OutputSpec output;
  // Sweep axes as given (null when absent).
  json sweep;
  // The input document with the effective seed filled in.
  json source;
};

namespace detail
{
inline void check_keys(const json &obj, const std::string &where,
                       std::initializer_list<const char *> allowed)
{
  if (!obj.is_object())
  {
    throw ConfigError(where + ": expected a JSON object");
  }
  for (const auto &[key, _] : obj.items())
  {
    bool ok = false;
    for (const char *a : allowed)
    {
      ok = ok || key == a;
    }
    if (!ok)
    {
      throw ConfigError("unknown field \"" + where + "." + key + "\"");
    }
  }
}

inline const json &require(const json &obj, const std::string &where, const char *key)
{
  if (!obj.contains(key))
  {
    throw ConfigError("missing required field \"" +
                      (where.empty() ? std::string(key) : where + "." + key) + "\"");
  }
  return obj.at(key);
}

template <class T> T get(const json &v, const std::string &field)
{
  try
  {
    if constexpr (std::is_same_v<T, double>)
    {
      if (!v.is_number())
      {
        throw ConfigError("");
      }
    }
    else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>)
    {
      if (!v.is_number_integer())
      {
        throw ConfigError("");
      }
    }
    return v.get<T>();
  }
  catch (const std::exception &)
  {
    throw ConfigError("field \"" + field + "\" has the wrong type: " + v.dump());
  }
}

template <class T>
std::optional<T> opt(const json &obj, const std::string &where, const char *key)
{
  if (!obj.contains(key) || obj.at(key).is_null())
  {
    return std::nullopt;
  }
  return get<T>(obj.at(key), where + "." + key);
}

inline std::optional<std::uint64_t> env_seed()
{
  const char *s = std::getenv("DOCOSIM_SEED");
  if (!s || !*s)
  {
    return std::nullopt;
  }
  try
  {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used, 0);
    if (used != std::string(s).size())
    {
      throw std::invalid_argument("");
    }
    return v;
  }
  catch (const std::exception &)
  {
    throw ConfigError(std::string("DOCOSIM_SEED is not an unsigned integer: ") + s);
  }
}
}  // namespace detail

//
// Strict parse of an experiment document. Unknown fields are errors. When
// the document is a run's metadata file, its embedded config is used.
// DOCOSIM_SEED, if set, replaces the master seed and any schedule seed.
//
inline ExperimentSpec parse_spec(json doc, bool apply_env = true)
{
  using namespace detail;
  if (doc.is_object() && doc.contains(kMetadataMarker))
  {
    doc = require(doc, "", "config");
  }
  check_keys(doc, "config",
             {"topology", "lazy", "decision_set", "schedule", "algorithm", "T", "seed",
              "replications", "output", "sweep"});
  ExperimentSpec s;

  const json &topo = require(doc, "", "topology");
  check_keys(topo, "topology", {"kind", "n", "edges"});
  s.topology.kind = get<std::string>(require(topo, "topology", "kind"), "topology.kind");
  s.topology.n = get<int>(require(topo, "topology", "n"), "topology.n");
  if (topo.contains("edges"))
  {
    for (const auto &e : topo.at("edges"))
    {
      if (!e.is_array() || e.size() != 2)
      {
        throw ConfigError("topology.edges: each edge must be a pair [i, j]");
      }
      // 1-based in the config, like learner ids elsewhere.
      s.topology.edges.emplace_back(get<int>(e[0], "topology.edges") - 1,
                                    get<int>(e[1], "topology.edges") - 1);
    }
  }
  s.lazy = opt<bool>(doc, "config", "lazy").value_or(true);

  const json &ds = require(doc, "", "decision_set");
  check_keys(ds, "decision_set", {"kind", "R", "d"});
  try
  {
    s.set_kind = set_kind_from_string(
      get<std::string>(require(ds, "decision_set", "kind"), "decision_set.kind"));
  }
  catch (const std::invalid_argument &e)
  {
    throw ConfigError(std::string("decision_set.kind: ") + e.what());
  }
  s.R = get<double>(require(ds, "decision_set", "R"), "decision_set.R");
  s.d = get<int>(require(ds, "decision_set", "d"), "decision_set.d");

  const json &sc = require(doc, "", "schedule");
  check_keys(sc, "schedule", {"kind", "G", "alpha", "C", "p", "seed"});
  s.schedule.kind = get<std::string>(require(sc, "schedule", "kind"), "schedule.kind");
  s.schedule.G = opt<double>(sc, "schedule", "G");
  s.schedule.alpha = opt<double>(sc, "schedule", "alpha");
  s.schedule.C = opt<int>(sc, "schedule", "C");
  s.schedule.p = opt<double>(sc, "schedule", "p");
  s.schedule.seed = opt<std::uint64_t>(sc, "schedule", "seed");

  if (doc.contains("algorithm"))
  {
    const json &al = doc.at("algorithm");
    check_keys(al, "algorithm",
               {"name", "mode", "alpha", "h", "L", "L_prime", "theta", "exact_inner"});
    s.algorithm.name = get<std::string>(require(al, "algorithm", "name"), "algorithm.name");
    s.algorithm.mode = opt<std::string>(al, "algorithm", "mode");
    s.algorithm.alpha = opt<double>(al, "algorithm", "alpha");
    s.algorithm.h = opt<double>(al, "algorithm", "h");
    s.algorithm.L = opt<int>(al, "algorithm", "L");
    s.algorithm.L_prime = opt<int>(al, "algorithm", "L_prime");
    s.algorithm.theta = opt<double>(al, "algorithm", "theta");
    s.algorithm.exact_inner = opt<bool>(al, "algorithm", "exact_inner").value_or(false);
  }

  s.T = get<int>(require(doc, "", "T"), "T");
  s.seed = opt<std::uint64_t>(doc, "config", "seed").value_or(0);
  s.replications = opt<int>(doc, "config", "replications").value_or(1);
  if (s.replications < 1)
  {
    throw ConfigError("replications must be >= 1");
  }

  if (doc.contains("output"))
  {
    const json &out = doc.at("output");
    check_keys(out, "output", {"trace_stride", "consensus_every", "regret_learners"});
    s.output.trace_stride = opt<int>(out, "output", "trace_stride").value_or(1);
    s.output.consensus_every = opt<int>(out, "output", "consensus_every").value_or(64);
    if (s.output.trace_stride < 0 || s.output.consensus_every < 1)
    {
      throw ConfigError("output: trace_stride must be >= 0 and consensus_every >= 1");
    }
    if (out.contains("regret_learners"))
    {
      for (const auto &v : out.at("regret_learners"))
      {
        s.output.regret_learners.push_back(get<int>(v, "output.regret_learners"));
      }
    }
  }

  if (doc.contains("sweep"))
  {
    check_keys(doc.at("sweep"), "sweep", {"n", "T", "topology", "algorithm", "seed"});
    for (const auto &[axis, values] : doc.at("sweep").items())
    {
      if (!values.is_array() || values.empty())
      {
        throw ConfigError("sweep." + axis + " must be a non-empty array");
      }
    }
    s.sweep = doc.at("sweep");
  }

  if (apply_env)
  {
    if (auto env = env_seed())
    {
      s.seed = *env;
      s.schedule.seed.reset();
      doc["seed"] = *env;
      if (doc["schedule"].contains("seed"))
      {
        doc["schedule"].erase("seed");
      }
    }
  }
  s.source = doc;
  s.source["seed"] = s.seed;
  return s;
}

inline json load_json(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file " + path);
  }
  try
  {
    return json::parse(in);
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError(path + ": " + e.what());
  }
}

inline Graph build_topology(const TopologySpec &t)
{
  if (t.kind == "cycle")
  {
    return build_cycle(t.n);
  }
  if (t.kind == "complete")
  {
    return build_complete(t.n);
  }
  if (t.kind == "path")
  {
    return build_path(t.n);
  }
  if (t.kind == "custom")
  {
    return build_from_edges(t.n, t.edges);
  }
  throw ConfigError("topology.kind: unknown topology \"" + t.kind +
                    "\" (expected cycle, complete, path or custom)");
}

inline std::uint64_t schedule_seed(const ExperimentSpec &s)
{
  return s.schedule.seed.value_or(s.seed);
}

inline LossSchedule build_schedule(const ExperimentSpec &s, const DecisionSet &K)
{
  const int n = s.topology.n;
  const ScheduleKind kind = schedule_kind_from_string(s.schedule.kind);
  const std::uint64_t seed = schedule_seed(s);
  auto need = [&](const auto &v, const char *name) {
    if (!v)
    {
      throw ConfigError("missing required field \"schedule." + std::string(name) +
                        "\" for schedule kind " + s.schedule.kind);
    }
    return *v;
  };
  switch (kind)
  {
    case ScheduleKind::Zero:
      return schedule_zero(n, s.T, K);
    case ScheduleKind::RandomLinear:
      return schedule_random_linear(n, s.T, K, need(s.schedule.G, "G"), seed);
    case ScheduleKind::QuadraticTracking:
      return schedule_quadratic_tracking(n, s.T, K, need(s.schedule.alpha, "alpha"), seed);
    case ScheduleKind::LowerConvex:
      return schedule_lower_convex(n, s.T, K, need(s.schedule.G, "G"),
                                   s.schedule.C.value_or(s.T - 1), seed);
    case ScheduleKind::LowerStronglyConvex:
      return schedule_lower_strongly_convex(n, s.T, K, need(s.schedule.alpha, "alpha"),
                                            s.schedule.C.value_or(s.T - 1), seed);
    case ScheduleKind::LowerLogT:
      return schedule_lower_logT(n, s.T, K, need(s.schedule.alpha, "alpha"),
                                 s.schedule.p.value_or(0.5), seed);
  }
  throw ConfigError("unsupported schedule kind");
}

namespace detail
{
// h of the block algorithms for a given (possibly overridden) L.
inline double tuned_h(Mode mode, bool pf, int L, int padded_T, double G, double R, double alpha)
{
  if (mode == Mode::StronglyConvex)
  {
    return alpha * L;
  }
  return std::sqrt((pf ? 14.0 : 11.0) * L * padded_T) * G / R;
}
}  // namespace detail

//
// Resolves algorithm parameters: defaults from the tuning rules, then any
// overrides. Overriding L re-pads T and re-derives h unless h is given.
//
inline Experiment build_experiment(const ExperimentSpec &s)
{
  if (s.T < 1)
  {
    throw ConfigError("T must be >= 1");
  }
  if (s.topology.n < 1)
  {
    throw ConfigError("topology.n must be >= 1");
  }
  Graph g = build_topology(s.topology);
  GossipMatrix P = max_degree_weights(g, s.lazy);
  DecisionSet K(s.set_kind, s.R, s.d);
  LossSchedule schedule = build_schedule(s, K);

  Experiment e(std::move(P), K, std::move(schedule));
  try
  {
    e.algorithm = algorithm_kind_from_string(s.algorithm.name);
  }
  catch (const std::invalid_argument &err)
  {
    throw ConfigError(std::string("algorithm.name: ") + err.what());
  }
  const AlgorithmSpec &a = s.algorithm;
  const double sched_alpha = e.schedule.modulus();
  std::string mode_name = a.mode.value_or(
    (a.alpha.value_or(0.0) > 0.0 || (!a.alpha && sched_alpha > 0.0)) ? "strongly_convex"
                                                                     : "convex");
  if (mode_name == "convex")
  {
    e.mode = Mode::Convex;
  }
  else if (mode_name == "strongly_convex")
  {
    e.mode = Mode::StronglyConvex;
  }
  else
  {
    throw ConfigError("algorithm.mode: expected convex or strongly_convex, got " + mode_name);
  }
  const double alpha =
    e.mode == Mode::Convex ? a.alpha.value_or(0.0) : a.alpha.value_or(sched_alpha);
  if (e.mode == Mode::StronglyConvex && !(alpha > 0.0))
  {
    throw ConfigError("algorithm: strongly_convex mode needs alpha > 0 (set algorithm.alpha)");
  }
  if (alpha > 0.0 && sched_alpha >= 0.0 && alpha > sched_alpha + 1e-15 &&
      e.schedule.kind() != ScheduleKind::Zero)
  {
    throw ConfigError("algorithm.alpha exceeds the schedule's strong-convexity modulus");
  }

  const int n = e.P.size();
  const double G = e.schedule.lipschitz();
  const double R = K.radius();
  ResolvedParams p;
  const bool block_algo =
    e.algorithm == AlgorithmKind::Adftgl || e.algorithm == AlgorithmKind::PfAdftgl;
  if (block_algo)
  {
    const bool pf = e.algorithm == AlgorithmKind::PfAdftgl;
    const double Gd = G > 0.0 ? G : 1.0;
    p = default_params(e.mode, pf, n, s.T, Gd, R, alpha, e.P.sigma2());
    const SpectralParams sp = spectral_params(e.P);
    if (a.theta)
    {
      p.theta = *a.theta;
    }
    if (a.L_prime)
    {
      if (!pf)
      {
        throw ConfigError("algorithm.L_prime applies to pf_adftgl only");
      }
      p.L_gossip = *a.L_prime;
    }
    if (a.L)
    {
      p.L = *a.L;
    }
    if (!pf)
    {
      p.L_gossip = p.L;
    }
    if (p.L < 1 || p.L_gossip < 1)
    {
      throw ConfigError("algorithm: L and L_prime must be >= 1");
    }
    if (pf && p.L_gossip > p.L)
    {
      throw ConfigError("algorithm: L_prime must not exceed L");
    }
    p.padded_T = pad_horizon(s.T, p.L);
    p.alpha = alpha;
    p.h = a.h.value_or(detail::tuned_h(e.mode, pf, p.L, p.padded_T, Gd, R, alpha));
    e.check_consensus_bound = !a.theta && (pf ? p.L_gossip : p.L) >= sp.gossip_iterations;
  }
  else if (e.algorithm == AlgorithmKind::Dftgl)
  {
    p = dftgl_default_params(e.mode, n, s.T, G > 0.0 ? G : 1.0, R, alpha, e.P.sigma2());
    p.alpha = alpha;
    if (a.h)
    {
      p.h = *a.h;
    }
    if (!(p.h > 0.0) && !(p.alpha > 0.0))
    {
      throw ConfigError("dftgl: need h > 0 or alpha > 0");
    }
  }
  else
  {
    p = central_default_params(e.mode, n, s.T, G > 0.0 ? G : 1.0, R, alpha);
    if (a.h)
    {
      p.h = *a.h;
    }
    if (e.algorithm == AlgorithmKind::Ftal && e.mode != Mode::StronglyConvex)
    {
      throw ConfigError("ftal requires strongly_convex mode with alpha > 0");
    }
  }
  e.params = p;
  e.exact_inner = a.exact_inner;
  e.trace_stride = s.output.trace_stride;
  e.consensus_every = s.output.consensus_every;
  for (int id : s.output.regret_learners)
  {
    if (id < 1 || id > n)
    {
      throw ConfigError("output.regret_learners: learner id " + std::to_string(id) +
                        " outside 1.." + std::to_string(n));
    }
    e.regret_learners.push_back(id - 1);
  }
  return e;
}

// Parses and builds, mapping library precondition failures to ConfigError.
inline Experiment experiment_from_spec(const ExperimentSpec &s)
{
  try
  {
    return build_experiment(s);
  }
  catch (const ConfigError &)
  {
    throw;
  }
  catch (const std::invalid_argument &e)
  {
    throw ConfigError(e.what());
  }
}

struct SweepPoint
{
  // (axis, value) pairs in axis order.
  std::vector<std::pair<std::string, json>> axes;
  json config;
};

//
// Cartesian product of the sweep axes, in the fixed axis order
// n, T, topology, algorithm, seed, last axis varying fastest. A document
// without sweep axes yields one point.
//
inline std::vector<SweepPoint> expand_sweep(const ExperimentSpec &s)
{
  static const char *order[] = {"n", "T", "topology", "algorithm", "seed"};
  json base = s.source;
  base.erase("sweep");
  std::vector<SweepPoint> points{{{}, base}};
  if (s.sweep.is_null())
  {
    return points;
  }
  for (const char *axis : order)
  {
    if (!s.sweep.contains(axis))
    {
      continue;
    }
    std::vector<SweepPoint> next;
    for (const auto &pt : points)
    {
      for (const auto &v : s.sweep.at(axis))
      {
        SweepPoint q = pt;
        q.axes.emplace_back(axis, v);
        const std::string a = axis;
        if (a == "n")
        {
          q.config["topology"]["n"] = v;
        }
        else if (a == "T")
        {
          q.config["T"] = v;
        }
        else if (a == "topology")
        {
          q.config["topology"]["kind"] = v;
        }
        else if (a == "algorithm")
        {
          q.config["algorithm"]["name"] = v;
        }
        else
        {
          q.config["seed"] = v;
          if (q.config["schedule"].contains("seed"))
          {
            q.config["schedule"].erase("seed");
          }
        }
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

}  // namespace docosim

#endif  // DOCOSIM_CONFIG_HPP
