#pragma once

// Experiment plumbing: point-set sources, result records (JSON / long-format
// CSV) and the subcommand dispatcher behind the ffvc command-line tool.

#include "ffvc/checks.hpp"
#include "ffvc/count.hpp"
#include "ffvc/field.hpp"
#include "ffvc/geometry.hpp"
#include "ffvc/graph.hpp"
#include "ffvc/pac.hpp"
#include "ffvc/parallel.hpp"
#include "ffvc/prism.hpp"
#include "ffvc/rng.hpp"
#include "ffvc/vc.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ffvc {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Point-set sources.

/// Uniform random subset of the given size: partial Fisher-Yates over all
/// point indices.
inline PointSet sample_subset(const FieldParams& params, std::uint64_t size, std::uint64_t seed) {
  const Index n = params.space_size();
  if (size > n) throw InvalidArgument("subset size " + std::to_string(size) + " exceeds q^d = " + std::to_string(n));
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng = make_rng(derive_seed(seed, {0x5b5e7}));
  for (std::uint64_t i = 0; i < size; ++i) std::swap(idx[i], idx[i + uniform_below(rng, n - i)]);
  return PointSet::from_indices(params, std::span<const Index>(idx.data(), size));
}

/// One point per line as d comma-separated residues; '#' starts a comment.
inline PointSet parse_pointset(std::string_view text, const FieldParams& params) {
  PointSet s(params);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (end == text.size()) break;
      continue;
    }
    Point p(params.d);
    std::stringstream ss(line);
    std::string field;
    int i = 0;
    while (std::getline(ss, field, ',')) {
      const auto first = field.find_first_not_of(" \t\r");
      const auto last = field.find_last_not_of(" \t\r");
      if (first == std::string::npos) throw ParseError(line_no, "empty coordinate");
      field = field.substr(first, last - first + 1);
      if (field.find_first_not_of("0123456789") != std::string::npos || field.size() > 9)
        throw ParseError(line_no, "coordinate '" + field + "' is not a decimal residue");
      if (i >= params.d) throw ParseError(line_no, "expected " + std::to_string(params.d) + " coordinates");
      const unsigned long v = std::stoul(field);
      if (v >= params.q) throw ParseError(line_no, "coordinate " + field + " out of range [0, " + std::to_string(params.q) + ")");
      p[i++] = static_cast<Residue>(v);
    }
    if (i != params.d) throw ParseError(line_no, "expected " + std::to_string(params.d) + " coordinates, got " + std::to_string(i));
    if (!s.insert(point_index(p, params))) throw ParseError(line_no, "duplicate point " + p.to_string());
    if (end == text.size()) break;
  }
  return s;
}

inline PointSet load_pointset(const std::string& path, const FieldParams& params) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open point-set file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_pointset(buf.str(), params);
}

struct SetSpec {
  enum class Kind { full, random, file } kind = Kind::full;
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
  std::string path;

  /// "full", "random:SIZE:SEED" or "file:PATH".
  static SetSpec parse(const std::string& s) {
    SetSpec spec;
    if (s == "full") return spec;
    if (s.rfind("file:", 0) == 0) {
      spec.kind = Kind::file;
      spec.path = s.substr(5);
      if (spec.path.empty()) throw InvalidArgument("file set spec needs a path");
      return spec;
    }
    if (s.rfind("random:", 0) == 0) {
      spec.kind = Kind::random;
      const auto rest = s.substr(7);
      const auto colon = rest.find(':');
      try {
        std::size_t used = 0;
        spec.size = std::stoull(rest.substr(0, colon), &used);
        if (used != colon && colon != std::string::npos) throw InvalidArgument("");
        spec.seed = colon == std::string::npos ? 0 : std::stoull(rest.substr(colon + 1));
      } catch (const std::exception&) {
        throw InvalidArgument("malformed random set spec '" + s + "', expected random:SIZE:SEED");
      }
      return spec;
    }
    throw InvalidArgument("unknown set spec '" + s + "'");
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::full: return "full";
      case Kind::random: return "random:" + std::to_string(size) + ":" + std::to_string(seed);
      case Kind::file: return "file:" + path;
    }
    return "?";
  }

  PointSet materialize(const FieldParams& params) const {
    switch (kind) {
      case Kind::full: return PointSet::full(params);
      case Kind::random: return sample_subset(params, size, seed);
      case Kind::file: return load_pointset(path, params);
    }
    return PointSet(params);
  }
};

// ---------------------------------------------------------------------------
// Records.

enum class Outcome { pass, fail, hypothesis_unmet, informational };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::fail: return "fail";
    case Outcome::hypothesis_unmet: return "hypothesis-unmet";
    case Outcome::informational: return "informational";
  }
  return "?";
}

inline Outcome parse_outcome(const std::string& s) {
  if (s == "pass") return Outcome::pass;
  if (s == "fail") return Outcome::fail;
  if (s == "hypothesis-unmet") return Outcome::hypothesis_unmet;
  if (s == "informational") return Outcome::informational;
  throw InvalidArgument("unknown check outcome '" + s + "'");
}

struct Check {
  std::string name;
  Outcome outcome = Outcome::informational;
  std::string detail;
  friend bool operator==(const Check&, const Check&) = default;
};

/// Exact integers: JSON numbers while they fit 64 bits, decimal strings beyond.
inline json count_json(const Count& c) {
  if (fits_u64(c)) return c.convert_to<std::uint64_t>();
  return c.str();
}

inline json point_json(Index idx, const FieldParams& params) {
  const Point p = index_point(idx, params);
  return json(std::vector<Residue>(p.coords().begin(), p.coords().end()));
}

inline json points_json(std::span<const Index> idx, const FieldParams& params) {
  json a = json::array();
  for (Index i : idx) a.push_back(point_json(i, params));
  return a;
}

inline json prism_json(const Prism& P, const FieldParams& params) {
  return json{{"tail", points_json(std::vector<Index>{P.y, P.z}, params)}, {"center", points_json(P.center, params)}};
}

struct ExperimentConfig {
  std::string command;
  FieldParams params;
  SetSpec set;
  int k = 2;                // gamma
  int n = 0;                // prisms; 0 => d
  ClassKind class_kind = ClassKind::two_param;
  double epsilon = 0.05;
  double delta = 0.1;
  std::vector<std::size_t> m_grid{0, 5, 10, 20, 40, 80};
  std::uint64_t trials = 200;
  bool confidence_band = false;
  std::uint64_t seed = 1;
  std::uint64_t max_prisms = 200'000;
  std::uint64_t max_hypotheses = 50'000'000;
  std::uint64_t time_budget_ms = 0;  // 0 => none
  std::uint64_t samples = 1000;
  std::vector<Index> census;         // bad-sets: optional census set B
  std::optional<std::pair<Index, Index>> target;  // pac-sweep
  std::string format = "json";
  std::string output;  // empty => stdout

  json to_json() const {
    json j{{"command", command},
           {"q", params.q},
           {"d", params.d},
           {"t", params.t},
           {"set", set.to_string()},
           {"k", k},
           {"n", n == 0 ? params.d : n},
           {"class", ffvc::to_string(class_kind)},
           {"epsilon", epsilon},
           {"delta", delta},
           {"m_grid", m_grid},
           {"trials", trials},
           {"confidence_band", confidence_band},
           {"seed", seed},
           {"max_prisms", max_prisms},
           {"max_hypotheses", max_hypotheses},
           {"time_budget_ms", time_budget_ms},
           {"samples", samples},
           {"format", format}};
    if (!census.empty()) j["census"] = points_json(census, params);
    if (target) j["target"] = points_json(std::vector<Index>{target->first, target->second}, params);
    return j;
  }
};

struct ResultRecord {
  json config;
  std::string command;
  json results = json::object();
  std::vector<Check> checks;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::uint64_t wall_ms = 0;

  void add_check(std::string name, Outcome o, std::string detail = {}) { checks.push_back({std::move(name), o, std::move(detail)}); }
  bool any_failed() const {
    for (const auto& c : checks)
      if (c.outcome == Outcome::fail) return true;
    return false;
  }

  json to_json() const {
    json cj = json::array();
    for (const auto& c : checks) cj.push_back({{"name", c.name}, {"outcome", ffvc::to_string(c.outcome)}, {"detail", c.detail}});
    return json{{"config", config}, {"command", command}, {"results", results}, {"checks", cj},
                {"seed", seed},     {"version", version}, {"wall_ms", wall_ms}};
  }

  static ResultRecord from_json(const json& j) {
    ResultRecord r;
    r.config = j.at("config");
    r.command = j.at("command").get<std::string>();
    r.results = j.at("results");
    for (const auto& c : j.at("checks"))
      r.checks.push_back({c.at("name").get<std::string>(), parse_outcome(c.at("outcome").get<std::string>()), c.at("detail").get<std::string>()});
    r.seed = j.at("seed").get<std::uint64_t>();
    r.version = j.at("version").get<std::string>();
    r.wall_ms = j.at("wall_ms").get<std::uint64_t>();
    return r;
  }

  /// Record without wall time; byte-identical for identical runs.
  std::string payload() const {
    json j = to_json();
    j.erase("wall_ms");
    return j.dump();
  }

  /// Long format: one row per (instance, metric).
  std::string to_csv() const {
    std::ostringstream os;
    os << "command,instance,metric,value\n";
    std::string instance = "q=" + config.value("q", json()).dump() + ";d=" + config.value("d", json()).dump() +
                           ";t=" + config.value("t", json()).dump() + ";set=" + config.value("set", std::string());
    auto quote = [](const std::string& s) {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
      return out + "\"";
    };
    auto emit = [&](auto&& self, const json& node, const std::string& path) -> void {
      if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it) self(self, it.value(), path.empty() ? it.key() : path + "." + it.key());
      } else if (node.is_array() && !node.empty() && (node.front().is_structured())) {
        for (std::size_t i = 0; i < node.size(); ++i) self(self, node[i], path + "." + std::to_string(i));
      } else {
        os << quote(command) << ',' << quote(instance) << ',' << quote(path) << ','
           << quote(node.is_string() ? node.get<std::string>() : node.dump()) << '\n';
      }
    };
    emit(emit, results, "");
    for (const auto& c : checks) os << quote(command) << ',' << quote(instance) << ',' << quote("check." + c.name) << ',' << ffvc::to_string(c.outcome) << '\n';
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// Subcommands.

namespace detail {

class Deadline {
 public:
  explicit Deadline(std::uint64_t budget_ms) : budget_ms_(budget_ms), start_(std::chrono::steady_clock::now()) {}
  bool expired() const {
    return budget_ms_ != 0 &&
           std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count() >=
               static_cast<long long>(budget_ms_);
  }

 private:
  std::uint64_t budget_ms_;
  std::chrono::steady_clock::time_point start_;
};

inline json audit_json(const BoundAudit& a) {
  return json{{"name", a.name},        {"q", a.params.q},         {"d", a.params.d},
              {"t", a.params.t},       {"dim", a.dim},            {"instances", a.instances},
              {"violations", a.violations}, {"max_observed", a.max_observed}, {"bound", count_json(a.bound)},
              {"first_violation", a.first_violation}};
}

inline void record_audit(ResultRecord& r, const BoundAudit& a, const std::string& key) {
  r.results[key].push_back(audit_json(a));
  r.add_check(key + ":" + a.name, a.ok() ? Outcome::pass : Outcome::fail,
              a.ok() ? "max " + std::to_string(a.max_observed) + " <= " + a.bound.str()
                     : std::to_string(a.violations) + " violations; " + a.first_violation);
}

inline void run_sphere_size(const ExperimentConfig& cfg, ResultRecord& r) {
  const auto rep = verify_sphere_size_bounds(cfg.params);
  for (const auto& e : rep.entries)
    r.results["spheres"].push_back({{"t", e.t}, {"size", e.size}, {"lower", e.lower}, {"upper", e.upper}, {"within", e.within}});
  r.add_check("sphere-size-bounds", rep.all_within() ? Outcome::pass : Outcome::fail);
}

inline json gamma_json(const GammaBoundReport& g) {
  return json{{"k", g.k},
              {"set_size", g.set_size},
              {"gamma", count_json(g.gamma)},
              {"main_term", g.main_term},
              {"discrepancy", g.discrepancy},
              {"allowance", g.allowance},
              {"size_threshold", g.size_threshold},
              {"hypothesis_met", g.hypothesis_met},
              {"within_bound", g.within_bound}};
}

inline void run_gamma(const ExperimentConfig& cfg, const PointSet& E, ResultRecord& r) {
  const auto g = build_graph(E, cfg.params);
  const auto rep = gamma_bound_check(g, cfg.k);
  r.results = gamma_json(rep);
  r.results["edges"] = g.edge_count();
  const std::string detail = "|D_k| = " + std::to_string(rep.discrepancy) + ", allowance " + std::to_string(rep.allowance);
  if (rep.hypothesis_met)
    r.add_check("chain-count-discrepancy", rep.within_bound ? Outcome::pass : Outcome::fail, detail);
  else
    r.add_check("chain-count-discrepancy", Outcome::hypothesis_unmet,
                detail + (rep.within_bound ? " (within)" : " (outside)") + "; |E| <= " + std::to_string(rep.size_threshold));
}

inline void run_prisms(const ExperimentConfig& cfg, const PointSet& E, ResultRecord& r) {
  const auto& p = cfg.params;
  const unsigned n = static_cast<unsigned>(cfg.n == 0 ? p.d : cfg.n);
  const auto g = build_graph(E, p);
  const auto k = two_path_counts(g);
  const Count N = count_prisms_formula(k, n);
  const std::uint64_t sym = 2 * factorial_u64(n);
  r.results["n"] = n;
  r.results["nondegenerate_ordered"] = count_json(N);
  r.results["symmetry_factor"] = sym;
  r.results["nondegenerate_unordered"] = count_json(N / sym);
  r.results["max_two_paths"] = k.max_off_diagonal();
  const double ratio = static_cast<double>(to_long_double(N) * std::pow(static_cast<long double>(p.q), 2 * p.d) /
                                           std::pow(static_cast<long double>(E.size()), p.d + 2));
  r.results["lower_bound_ratio"] = ratio;  // N q^{2d} / |E|^{d+2}

  if (N <= cfg.max_prisms) {
    Deadline deadline(cfg.time_budget_ms);
    bool partial = false;
    const std::uint64_t enumerated = for_each_prism(g, n, PrismFilter::nondegenerate, cfg.max_prisms, [&](const Prism&) {
      if (deadline.expired()) {
        partial = true;
        return false;
      }
      return true;
    });
    r.results["enumerated"] = enumerated;
    if (partial)
      r.add_check("prism-formula-vs-enumeration", Outcome::informational, "time budget exhausted after " + std::to_string(enumerated));
    else
      r.add_check("prism-formula-vs-enumeration", Count(enumerated) == N ? Outcome::pass : Outcome::fail,
                  std::to_string(enumerated) + " enumerated vs " + N.str() + " by formula");
  } else {
    r.add_check("prism-formula-vs-enumeration", Outcome::informational, "count exceeds --max-prisms; enumeration skipped");
  }

  if (n == static_cast<unsigned>(p.d) && N > 0) {
    AffineFractionOptions opt;
    opt.exact_limit = cfg.max_prisms;
    opt.samples = cfg.samples;
    opt.seed = cfg.seed;
    const auto f = affinely_nondegenerate_fraction(g, opt);
    r.results["affine_fraction"] = {{"ratio", f.ratio}, {"exact", f.exact}, {"samples", f.samples}, {"sampled_hits", f.sampled_hits}};
    if (f.exact) r.results["affine_fraction"]["affinely_nondegenerate"] = count_json(f.affinely_nondegenerate);
    if (p.d == 3)
      r.add_check("d3-all-affinely-nondegenerate", f.ratio == 1.0 ? Outcome::pass : Outcome::fail,
                  "fraction " + std::to_string(f.ratio) + (f.exact ? " (exact)" : " (sampled)"));
  }
}

inline void run_bad_sets(const ExperimentConfig& cfg, const PointSet& E, ResultRecord& r) {
  const auto& p = cfg.params;
  const auto g = build_graph(E, p);
  const SphereCache cache(p);
  Deadline deadline(cfg.time_budget_ms);
  std::uint64_t checked = 0, admitting = 0, bound_checks = 0, bound_violations = 0;
  std::optional<Prism> first_clean;
  std::string first_violation;
  bool partial = false;
  for_each_prism(g, static_cast<unsigned>(p.d), PrismFilter::affinely_nondegenerate, cfg.max_prisms, [&](const Prism& P) {
    if (deadline.expired()) {
      partial = true;
      return false;
    }
    ++checked;
    const auto rep = find_bad_sets(P, cache);
    if (rep.admits_bad_set()) {
      ++admitting;
      for (const auto& s : rep.subsets) {
        if (!s.bad) continue;
        const int kk = static_cast<int>(s.members.size());
        const Count bound = 2 * (p.d - kk) * ipow(p.q, static_cast<unsigned>(p.d - kk - 1));
        ++bound_checks;
        if (!(Count(s.pole_count) < bound) && bound_violations++ == 0)
          first_violation = "B of size " + std::to_string(kk) + " has " + std::to_string(s.pole_count) + " poles, bound " + bound.str();
      }
    } else if (!first_clean) {
      first_clean = P;
    }
    return true;
  });
  r.results["prisms_checked"] = checked;
  r.results["admitting_bad_set"] = admitting;
  r.results["admitting_no_bad_set"] = checked - admitting;
  r.results["partial"] = partial;
  if (first_clean) r.results["first_clean_prism"] = prism_json(*first_clean, p);
  r.add_check("bad-set-pole-bound", bound_violations == 0 ? Outcome::pass : Outcome::fail,
              std::to_string(bound_checks) + " bad sets checked" + (bound_violations ? "; " + first_violation : std::string()));
  if (!cfg.census.empty()) {
    const auto c = bad_prism_census(g, cfg.census);
    r.results["census"] = {{"k", c.k},
                           {"count", count_json(c.count)},
                           {"scale", count_json(c.scale)},
                           {"empirical_constant", c.empirical_constant},
                           {"pole_count", c.pole_count},
                           {"max_pole_bound", count_json(c.max_pole_bound)}};
    if (c.max_pole_bound_checked)
      r.add_check("census-pole-bound", c.max_pole_bound_holds ? Outcome::pass : Outcome::fail,
                  std::to_string(c.pole_count) + " poles vs bound " + c.max_pole_bound.str());
  }
}

inline void run_vc_dim(const ExperimentConfig& cfg, const PointSet& E, ResultRecord& r) {
  const auto& p = cfg.params;
  VcOptions opt;
  opt.max_checks = cfg.max_hypotheses;
  opt.max_prisms = cfg.max_prisms;
  const auto v = vc_dimension(E, cfg.class_kind, p, opt);
  r.results = {{"vc", v.value},       {"exact", v.exact},   {"cap", v.cap},
               {"method", v.method}, {"degenerate", v.degenerate}, {"checks", v.checks},
               {"prisms_tried", v.prisms_tried}, {"shattered_set", points_json(v.shattered_set, p)}};
  if (!v.exact) r.results["vc_status"] = "unknown >= " + std::to_string(v.value);
  r.add_check("vc-within-structural-cap", v.value <= v.cap ? Outcome::pass : Outcome::fail);
  if (v.degenerate) r.add_check("degenerate-class", Outcome::informational, "no hypothesis exists; VC reported as 0");
  if (v.witness) r.add_check("witness-valid", validate_witness(*v.witness, p) ? Outcome::pass : Outcome::fail);
}

inline void run_witness(const ExperimentConfig& cfg, const PointSet& E, ResultRecord& r) {
  const auto& p = cfg.params;
  const auto g = build_graph(E, p);
  const SphereCache cache(p);
  std::optional<ShatterWitness> found;
  std::optional<WitnessFailure> last_failure;
  std::uint64_t tried = 0;
  prisms_admitting_no_bad_set(g, PrismFilter::affinely_nondegenerate, cfg.max_prisms, [&](const Prism& P) {
    ++tried;
    auto res = shatter_witness(P, E, cache);
    if (auto* w = std::get_if<ShatterWitness>(&res)) {
      found = std::move(*w);
      return false;
    }
    last_failure = std::get<WitnessFailure>(res);
    return true;
  });
  r.results["clean_prisms_tried"] = tried;
  if (!found) {
    r.results["found"] = false;
    if (last_failure) r.results["last_failure"] = {{"mask", last_failure->mask}, {"reason", last_failure->reason}};
    r.add_check("witness-found", Outcome::informational, "no witness within the prism budget");
    return;
  }
  r.results["found"] = true;
  r.results["prism"] = prism_json(found->prism, p);
  for (std::size_t m = 0; m < found->assignment.size(); ++m)
    r.results["assignment"].push_back({{"mask", m}, {"hypothesis", found->assignment[m].to_string(p)}});
  r.add_check("witness-valid", validate_witness(*found, p) ? Outcome::pass : Outcome::fail);
  const auto one = one_param_assignment(*found, E, cache);
  if (const auto* hs = std::get_if<std::vector<Hypothesis>>(&one))
    r.add_check("one-param-witness-valid", validate_assignment(found->prism, *hs, p) ? Outcome::pass : Outcome::fail);
  else
    r.add_check("one-param-witness-valid", Outcome::fail, std::get<WitnessFailure>(one).reason);
}

inline void run_pac_sweep(const ExperimentConfig& cfg, const PointSet& E, ResultRecord& r) {
  const auto& p = cfg.params;
  const auto members = E.indices();
  Hypothesis target = Hypothesis::one_param(members.at(0));
  if (cfg.class_kind == ClassKind::two_param) {
    if (members.size() < 2) throw InvalidArgument("pac-sweep needs |E| >= 2 for the two-parameter class");
    if (cfg.target) {
      target = Hypothesis::two_param(cfg.target->first, cfg.target->second);
    } else {
      Rng rng = make_rng(derive_seed(cfg.seed, {0x7a}));
      const std::size_t a = uniform_below(rng, members.size());
      std::size_t b = uniform_below(rng, members.size() - 1);
      if (b >= a) ++b;
      target = Hypothesis::two_param(members[a], members[b]);
    }
  } else if (cfg.target) {
    target = Hypothesis::one_param(cfg.target->first);
  } else {
    Rng rng = make_rng(derive_seed(cfg.seed, {0x7a}));
    target = Hypothesis::one_param(members[uniform_below(rng, members.size())]);
  }
  const auto task = LearningTask::make(E, cfg.class_kind, target, p, {}, cfg.seed);
  const auto curve = sample_complexity_sweep(task, cfg.epsilon, cfg.delta, cfg.m_grid, cfg.trials, {cfg.confidence_band});
  const double ceiling = loss_ceiling(E, cfg.class_kind, task.cache());
  r.results["target"] = target.to_string(p);
  r.results["loss_ceiling"] = ceiling;
  r.results["m_hat"] = curve.m_hat ? json(*curve.m_hat) : json("> " + std::to_string(cfg.m_grid.empty() ? 0 : cfg.m_grid.back()));
  std::uint64_t inconsistent = 0;
  bool above_ceiling = false;
  for (const auto& pt : curve.points) {
    r.results["curve"].push_back({{"m", pt.m},
                                  {"trials", pt.trials},
                                  {"successes", pt.successes},
                                  {"frequency", pt.frequency},
                                  {"lower_band", pt.lower_band},
                                  {"mean_loss", pt.mean_loss}});
    inconsistent += pt.trials - pt.consistent;
    above_ceiling = above_ceiling || pt.mean_loss > ceiling;
  }
  r.add_check("erm-sample-consistent", inconsistent == 0 ? Outcome::pass : Outcome::fail,
              std::to_string(inconsistent) + " inconsistent trials");
  r.add_check("loss-within-ceiling", above_ceiling ? Outcome::fail : Outcome::pass);
}

inline void run_verify(const ExperimentConfig& cfg, ResultRecord& r) {
  const auto& p = cfg.params;
  const std::uint64_t samples = cfg.samples;
  run_sphere_size(cfg, r);
  const json spheres = r.results["spheres"];
  r.results = json::object();
  r.results["spheres"] = spheres;

  if (p.d == 2) record_audit(r, exhaustive_line_audit(p), "slice_audits");
  for (int n = 1; n < p.d; ++n) record_audit(r, random_slice_audit(p, n, samples, cfg.seed), "slice_audits");
  for (int k = 1; k <= p.d; ++k)
    record_audit(r, p.space_size() <= 729 ? exhaustive_pole_audit(p, k) : random_pole_audit(p, k, samples, cfg.seed), "pole_audits");

  const auto E = PointSet::full(p);
  const auto g = build_graph(E, p);
  for (int k = 1; k <= 3; ++k) {
    const auto rep = gamma_bound_check(g, k);
    r.results["gamma"].push_back(gamma_json(rep));
    r.add_check("chain-count-discrepancy k=" + std::to_string(k), rep.within_bound ? Outcome::pass : Outcome::fail);
  }
  const auto kc = two_path_counts(g);
  r.add_check("two-path-diagonal-identity", kc.total_sum() == gamma_k(g, 2) ? Outcome::pass : Outcome::fail);
  const Count N = count_prisms_formula(kc, static_cast<unsigned>(p.d));
  r.results["prisms"] = count_json(N);
  if (N <= cfg.max_prisms) {
    const std::uint64_t e = for_each_prism(g, static_cast<unsigned>(p.d), PrismFilter::nondegenerate, cfg.max_prisms, [](const Prism&) { return true; });
    r.add_check("prism-formula-vs-enumeration", Count(e) == N ? Outcome::pass : Outcome::fail,
                std::to_string(e) + " enumerated vs " + N.str());
  }
  if (p.d == 3 && N > 0) {
    AffineFractionOptions opt;
    opt.exact_limit = std::max<std::uint64_t>(cfg.max_prisms, 20'000'000);
    opt.seed = cfg.seed;
    const auto f = affinely_nondegenerate_fraction(g, opt);
    r.results["affine_fraction"] = f.ratio;
    r.add_check("d3-all-affinely-nondegenerate", f.ratio == 1.0 ? Outcome::pass : Outcome::fail, "fraction " + std::to_string(f.ratio));
  }
  VcOptions vopt;
  vopt.max_prisms = cfg.max_prisms;
  vopt.max_checks = cfg.max_hypotheses;
  const auto v = vc_dimension(E, ClassKind::two_param, p, vopt);
  r.results["vc"] = v.value;
  r.add_check("vc-equals-d", v.value == p.d && v.exact ? Outcome::pass : Outcome::informational,
              "vc " + std::to_string(v.value) + " via " + v.method);
  if (v.witness) r.add_check("witness-valid", validate_witness(*v.witness, p) ? Outcome::pass : Outcome::fail);
}

}  // namespace detail

struct RunOutcome {
  ResultRecord record;
  int exit_code = 0;  // 0 ok, 1 failed checks
};

/// Dispatches one subcommand. Usage and IO problems surface as exceptions
/// (InvalidArgument, ParseError, IoError) for the caller to map to exit 2.
inline RunOutcome run_command(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  ResultRecord& r = out.record;
  r.config = cfg.to_json();
  r.command = cfg.command;
  r.seed = cfg.seed;
  const auto& c = cfg.command;
  if (c == "sphere-size") {
    detail::run_sphere_size(cfg, r);
  } else if (c == "verify") {
    detail::run_verify(cfg, r);
  } else {
    const PointSet E = cfg.set.materialize(cfg.params);
    r.results["set_size"] = E.size();
    if (E.empty()) throw InvalidArgument("the point set is empty");
    const json set_size = r.results["set_size"];
    if (c == "gamma") detail::run_gamma(cfg, E, r);
    else if (c == "prisms") detail::run_prisms(cfg, E, r);
    else if (c == "bad-sets") detail::run_bad_sets(cfg, E, r);
    else if (c == "vc-dim") detail::run_vc_dim(cfg, E, r);
    else if (c == "witness") detail::run_witness(cfg, E, r);
    else if (c == "pac-sweep") detail::run_pac_sweep(cfg, E, r);
    else throw InvalidArgument("unknown command '" + c + "'");
    r.results["set_size"] = set_size;
  }
  r.wall_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
  out.exit_code = r.any_failed() ? 1 : 0;
  return out;
}

}  // namespace ffvc
