#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>

#include "sigmalab/decomposition.hpp"
#include "sigmalab/gallery.hpp"
#include "sigmalab/montecarlo.hpp"
#include "sigmalab/parallel.hpp"
#include "sigmalab/qmeasure.hpp"
#include "sigmalab/randomtimes.hpp"

namespace sigmalab::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxTableRows = 127;

json node_json(const PathSpace& space, NodeId node) {
  return {{"path", space.path_of(node)}, {"depth", space.depth(node)}, {"atom", space.level_index(node)}};
}

std::string path_string(const PathSpace& space, NodeId node) {
  const auto path = space.path_of(node);
  if (path.empty()) return "root";
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path[i]);
  }
  return out;
}

json check_json(const std::string& name, bool passed, json witness = nullptr) {
  json out = {{"name", name}, {"status", passed ? "PASS" : "FAIL"}};
  if (!passed) out["witness"] = witness.is_null() ? json{{"note", "no witness recorded"}} : std::move(witness);
  return out;
}

json base_report(const std::string& command, const ProcessSpec& spec) {
  return {{"command", command},
          {"spec", {{"kind", kind_name(spec.kind)}, {"horizon", spec.horizon}}},
          {"spec_digest", spec_digest(spec)},
          {"checks", json::array()},
          {"tables", json::object()},
          {"warnings", json::array()}};
}

void finalize(CommandResult& result) {
  bool all = true;
  for (const auto& c : result.report["checks"]) all = all && c["status"] == "PASS";
  result.report["status"] = all ? "PASS" : "FAIL";
  if (result.exit_code == kExitOk && !all) result.exit_code = kExitCheckFailed;
}

CommandResult error_result(const std::string& command, const std::string& where, const std::string& message,
                           int exit_code) {
  CommandResult result;
  result.report = {{"command", command},
                   {"status", "ERROR"},
                   {"error", {{"where", where}, {"message", message}}}};
  result.table = "error: " + (where.empty() ? message : where + ": " + message) + "\n";
  result.exit_code = exit_code;
  return result;
}

// The spec with the --horizon override applied. Custom trees are fixed by
// their values, so a conflicting override is a spec error.
ProcessSpec with_horizon(ProcessSpec spec, const std::optional<int>& horizon) {
  if (!horizon) return spec;
  if (*horizon < 1) throw SpecError("--horizon", "horizon must be at least 1");
  if (spec.kind == ProcessKind::kCustom && *horizon != spec.horizon) {
    throw SpecError("/horizon", "custom spec has horizon " + std::to_string(spec.horizon) +
                                    "; --horizon cannot change it");
  }
  spec.horizon = *horizon;
  return spec;
}

std::optional<CommandResult> refuse_over_cap(const std::string& command, const ProcessSpec& spec, int cap) {
  if (spec.horizon <= cap) return std::nullopt;
  return error_result(command, "/horizon",
                      "horizon " + std::to_string(spec.horizon) + " exceeds the enumeration cap " +
                          std::to_string(cap) +
                          "; raise --max-horizon or estimate by sampling with `sigma_lab mc`",
                      kExitRefused);
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

// Index of the first node with negative one-step drift, if any.
std::optional<NodeId> first_negative_drift(const AdaptedProcess& x) {
  const auto drift = one_step_drift(x);
  const PathSpace& space = x.space();
  for (std::uint32_t i = 0; i < drift.size(); ++i) {
    const NodeId v{space.id(), i};
    if (space.depth(v) < space.horizon() && sgn(drift[i]) < 0) return v;
  }
  return std::nullopt;
}

void warn_negative(json& report, const AdaptedProcess& x) {
  const PathSpace& space = x.space();
  std::size_t count = 0;
  std::optional<NodeId> first;
  for (std::uint32_t i = 0; i < space.node_count(); ++i) {
    const NodeId v{space.id(), i};
    if (sgn(x[v]) < 0) {
      if (!first) first = v;
      ++count;
    }
  }
  if (count > 0) {
    report["warnings"].push_back("X is negative at " + std::to_string(count) + " node(s), first at " +
                                 path_string(space, *first));
  }
}

// Reports a failed submartingale check; returns true if X is a submartingale.
bool check_submartingale(CommandResult& result, const AdaptedProcess& x) {
  const auto bad = first_negative_drift(x);
  json witness;
  if (bad) {
    const auto drift = one_step_drift(x);
    witness = node_json(x.space(), *bad);
    witness["drift"] = to_string(drift[bad->index]);
  }
  result.report["checks"].push_back(check_json("submartingale", !bad, witness));
  return !bad;
}

}  // namespace

CommandResult spec_error_result(const std::string& command, const SpecError& error) {
  const std::string what = error.what();
  const std::string prefix = error.where() + ": ";
  const std::string message = what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
  return error_result(command, error.where(), message, kExitSpecError);
}

// --- decompose ---------------------------------------------------------------------

CommandResult cmd_decompose(const ProcessSpec& input, const DecomposeOptions& options) {
  const std::string command = "decompose";
  ProcessSpec spec;
  try {
    spec = with_horizon(input, options.horizon);
  } catch (const SpecError& e) {
    return spec_error_result(command, e);
  }
  if (auto refused = refuse_over_cap(command, spec, options.max_horizon)) return *refused;

  std::optional<std::pair<SpacePtr, AdaptedProcess>> built;
  try {
    built = make_process(spec);
  } catch (const std::invalid_argument& e) {
    return error_result(command, "spec", e.what(), kExitSpecError);
  } catch (const std::length_error& e) {
    return error_result(command, "spec", e.what(), kExitSpecError);
  }
  const auto& [space, x] = *built;

  CommandResult result;
  result.report = base_report(command, spec);
  warn_negative(result.report, x);
  if (!check_submartingale(result, x)) {
    result.table = "verdict: FAIL (not a submartingale)\n";
    finalize(result);
    return result;
  }

  const Decomposition dec = doob_decompose(x);
  const SigmaClassReport sigma = check_sigma_class(x, dec);
  auto& checks = result.report["checks"];
  checks.push_back(check_json("sum_matches", sigma.sum_matches));
  checks.push_back(check_json("martingale_part", sigma.martingale_part));
  checks.push_back(check_json("compensator_starts_at_zero", sigma.compensator_starts_at_zero));
  checks.push_back(check_json("compensator_predictable", sigma.compensator_predictable));
  checks.push_back(check_json("compensator_increasing", sigma.compensator_increasing));
  json sigma_witness;
  if (!sigma.violations.empty()) {
    const auto& v = sigma.violations.front();
    sigma_witness = node_json(*space, v.node);
    sigma_witness["increment"] = to_string(v.increment);
    sigma_witness["value"] = to_string(v.value);
    sigma_witness["violations"] = sigma.violations.size();
  }
  checks.push_back(check_json("sigma_class", sigma.violations.empty(), sigma_witness));

  json nodes = json::array();
  for (std::uint32_t i = 0; i < space->node_count(); ++i) {
    const NodeId v{space->id(), i};
    nodes.push_back({{"path", space->path_of(v)},
                     {"depth", space->depth(v)},
                     {"x", to_string(x[v])},
                     {"n", to_string(dec.martingale[v])},
                     {"a", to_string(dec.compensator[v])}});
  }
  json by_time = json::array();
  for (int n = 0; n <= space->horizon(); ++n) {
    by_time.push_back({{"n", n},
                       {"e_p_x", to_string(expect(x, n))},
                       {"e_p_a", to_string(expect(dec.compensator, n))}});
  }
  result.report["tables"]["nodes"] = std::move(nodes);
  result.report["tables"]["by_time"] = std::move(by_time);
  finalize(result);

  std::ostringstream table;
  if (options.csv) {
    table << "depth,path,X,N,A\n";
  } else {
    table << "verdict: " << result.report["status"].get<std::string>() << "\n";
    table << pad("depth", 6) << pad("path", 2 * static_cast<std::size_t>(space->horizon()) + 6) << pad("X", 10)
          << pad("N", 10) << "A\n";
  }
  for (std::uint32_t i = 0; i < space->node_count(); ++i) {
    if (!options.csv && i >= kMaxTableRows) {
      table << "... " << space->node_count() - kMaxTableRows << " more rows in the JSON report\n";
      break;
    }
    const NodeId v{space->id(), i};
    if (options.csv) {
      table << space->depth(v) << ',' << path_string(*space, v) << ',' << to_string(x[v]) << ','
            << to_string(dec.martingale[v]) << ',' << to_string(dec.compensator[v]) << '\n';
    } else {
      table << pad(std::to_string(space->depth(v)), 6)
            << pad(path_string(*space, v), 2 * static_cast<std::size_t>(space->horizon()) + 6)
            << pad(to_string(x[v]), 10) << pad(to_string(dec.martingale[v]), 10) << to_string(dec.compensator[v])
            << '\n';
    }
  }
  result.table = table.str();
  return result;
}

// --- qmeasure ----------------------------------------------------------------------

namespace {

// First failure seen for an aggregated check; the lowest key wins so the
// witness does not depend on thread scheduling.
struct FirstFailure {
  std::mutex mutex;
  std::optional<std::pair<std::size_t, json>> failure;

  void record(std::size_t key, json witness) {
    std::lock_guard lock(mutex);
    if (!failure || key < failure->first) failure = {key, std::move(witness)};
  }
  json check(const std::string& name) const {
    return check_json(name, !failure, failure ? failure->second : json());
  }
};

}  // namespace

CommandResult cmd_qmeasure(const ProcessSpec& input, const QMeasureOptions& options) {
  const std::string command = "qmeasure";
  ProcessSpec spec;
  try {
    spec = with_horizon(input, options.horizon);
  } catch (const SpecError& e) {
    return spec_error_result(command, e);
  }
  if (auto refused = refuse_over_cap(command, spec, options.max_horizon)) return *refused;

  std::optional<std::pair<SpacePtr, AdaptedProcess>> built;
  try {
    built = make_process(spec);
  } catch (const std::invalid_argument& e) {
    return error_result(command, "spec", e.what(), kExitSpecError);
  } catch (const std::length_error& e) {
    return error_result(command, "spec", e.what(), kExitSpecError);
  }
  const auto& [space, x] = *built;
  const int horizon = space->horizon();
  const unsigned threads = options.threads == 0 ? worker_count() : options.threads;

  CommandResult result;
  result.report = base_report(command, spec);
  result.report["all_checks"] = options.all_checks;
  auto& checks = result.report["checks"];
  warn_negative(result.report, x);

  if (!check_submartingale(result, x)) {
    result.table = "verdict: FAIL (not a submartingale)\n";
    finalize(result);
    return result;
  }
  {
    const SigmaClassReport sigma = check_sigma_class(x, doob_decompose(x));
    json witness;
    if (!sigma.violations.empty()) {
      const auto& v = sigma.violations.front();
      witness = node_json(*space, v.node);
      witness["increment"] = to_string(v.increment);
      witness["value"] = to_string(v.value);
    }
    checks.push_back(check_json("sigma_class", sigma.passed(), witness));
  }

  for (std::size_t i = 0; i < space->leaf_count(); ++i) {
    if (sgn(x[space->leaf(i)]) < 0) {
      checks.push_back(check_json("q_construction", false,
                                  {{"leaf", node_json(*space, space->leaf(i))},
                                   {"note", "X_H is negative, so Q^(n) would carry negative mass"}}));
      finalize(result);
      result.table = "verdict: FAIL (negative terminal values)\n";
      return result;
    }
  }

  std::vector<Rational> expectations;
  for (int n = 0; n <= horizon; ++n) expectations.push_back(expect(x, n));

  std::vector<std::optional<QnMeasure>> qns(static_cast<std::size_t>(horizon));
  std::vector<Rational> totals(static_cast<std::size_t>(horizon));
  FirstFailure identity, total_mass, kills, density;
  parallel_for(static_cast<std::size_t>(horizon), threads, [&](std::size_t level_index) {
    const int level = static_cast<int>(level_index);
    QnMeasure qn = build_qn(x, level);
    totals[level_index] = qn.total();
    if (totals[level_index] != expectations[level_index + 1]) {
      total_mass.record(level_index, {{"level", level},
                                      {"total", to_string(totals[level_index])},
                                      {"expected", to_string(expectations[level_index + 1])}});
    }
    if (const auto leaf = future_zero_violation(qn)) {
      kills.record(level_index, {{"level", level}, {"leaf", node_json(*space, space->leaf(*leaf))}});
    }
    const int n = level + 1;
    for (std::size_t k = 0; k < space->level_size(n); ++k) {
      const auto sides = q_eval_sides(qn, space->at_level(n, k));
      if (sides.expectation != sides.q_mass) {
        identity.record(level_index, {{"n", n},
                                      {"atom", node_json(*space, sides.atom)},
                                      {"q_mass", to_string(sides.q_mass)},
                                      {"expectation", to_string(sides.expectation)}});
        break;
      }
    }
    if (options.all_checks) {
      for (int p = level + 1; p <= horizon; ++p) {
        if (const auto atom = density_mismatch(qn, p)) {
          density.record(level_index * 1000 + static_cast<std::size_t>(p),
                         {{"level", level}, {"p", p}, {"atom", node_json(*space, *atom)}});
          break;
        }
      }
      qns[level_index] = std::move(qn);
    }
  });
  checks.push_back(identity.check("identity"));
  checks.push_back(total_mass.check("total_mass"));
  checks.push_back(kills.check("kills_future_zeros"));

  if (options.all_checks) {
    checks.push_back(density.check("density"));
    FirstFailure restriction, monotone;
    const std::size_t h = static_cast<std::size_t>(horizon);
    parallel_for(h * h, threads, [&](std::size_t pair) {
      const std::size_t m = pair / h;
      const std::size_t n = pair % h;
      if (m > n) return;
      if (const auto leaf = restriction_mismatch(*qns[m], *qns[n])) {
        restriction.record(pair, {{"m", m}, {"n", n}, {"leaf", node_json(*space, space->leaf(*leaf))}});
      }
      if (n == m + 1) {
        for (std::size_t i = 0; i < space->leaf_count(); ++i) {
          if (qns[m]->weight(i) > qns[n]->weight(i)) {
            monotone.record(pair, {{"level", m}, {"leaf", node_json(*space, space->leaf(i))}});
            break;
          }
        }
      }
    });
    checks.push_back(restriction.check("restriction"));
    checks.push_back(monotone.check("monotone"));
    qns.clear();

    bool unique = false;
    json witness;
    try {
      unique = uniqueness_probe(x);
      if (!unique) witness = {{"note", "identity system has no solution matching Q^(n)"}};
    } catch (const std::logic_error& e) {
      witness = {{"note", e.what()}};
    }
    checks.push_back(check_json("uniqueness", unique, witness));
  }

  std::optional<LastZeroLaw> law;
  try {
    law = q_law_of_g(x);
    checks.push_back(check_json("law_of_g", true));
  } catch (const std::domain_error& e) {
    checks.push_back(check_json("law_of_g", false, {{"note", e.what()}}));
  }

  json expectation_rows = json::array();
  for (int n = 0; n <= horizon; ++n) {
    expectation_rows.push_back({{"n", n}, {"e_p_x", to_string(expectations[static_cast<std::size_t>(n)])}});
  }
  json total_rows = json::array();
  for (int level = 0; level < horizon; ++level) {
    total_rows.push_back({{"level", level}, {"total", to_string(totals[static_cast<std::size_t>(level)])}});
  }
  auto& tables = result.report["tables"];
  tables["expectations"] = std::move(expectation_rows);
  tables["q_totals"] = std::move(total_rows);
  if (law) {
    json rows = json::array();
    for (int n = 0; n < horizon; ++n) {
      rows.push_back({{"n", n},
                      {"e_p_x_n", to_string(law->expectations[static_cast<std::size_t>(n)])},
                      {"q_g_eq_n", to_string(law->mass[static_cast<std::size_t>(n)])}});
    }
    tables["law_of_g"] = std::move(rows);
    tables["zero_free_mass"] = to_string(law->zero_free);
  }
  finalize(result);

  std::ostringstream table;
  if (options.csv) {
    table << "n,E_P[X_n],Q[g=n]\n";
    for (int n = 0; n < horizon; ++n) {
      table << n << ',' << to_string(expectations[static_cast<std::size_t>(n)]) << ','
            << (law ? to_string(law->mass[static_cast<std::size_t>(n)]) : std::string("NA")) << '\n';
    }
  } else {
    table << "verdict: " << result.report["status"].get<std::string>() << "\n";
    for (const auto& c : checks) {
      table << "  " << pad(c["name"].get<std::string>(), 22) << c["status"].get<std::string>() << '\n';
    }
    table << pad("n", 5) << pad("E_P[X_n]", 14) << "Q[g=n]\n";
    for (int n = 0; n < horizon; ++n) {
      table << pad(std::to_string(n), 5) << pad(to_string(expectations[static_cast<std::size_t>(n)]), 14)
            << (law ? to_string(law->mass[static_cast<std::size_t>(n)]) : std::string("n/a")) << '\n';
    }
    if (law) table << "zero-free mass: " << to_string(law->zero_free) << '\n';
  }
  result.table = table.str();
  return result;
}

// --- mc ------------------------------------------------------------------------------

CommandResult cmd_mc(const ProcessSpec& spec, const McCommandOptions& options) {
  const std::string command = "mc";
  if (options.count == 0) return error_result(command, "--count", "sample count must be at least 1", kExitSpecError);
  if (options.streams == 0) return error_result(command, "--streams", "stream count must be at least 1", kExitSpecError);

  MCOptions mc;
  mc.streams = options.streams;
  mc.threads = options.threads;

  CommandResult result;
  result.report = base_report(command, spec);
  auto& report = result.report;
  if (options.count == 1) {
    report["warnings"].push_back("degenerate sample (count = 1): standard error reported as 0");
  }

  std::ostringstream table;
  table << std::setprecision(6);
  auto band_check = [&](double estimate, double se, double target) {
    if (se > 0.0) {
      const double z = (estimate - target) / se;
      report["z_score"] = z;
      report["checks"].push_back(check_json("within_4_standard_errors", std::abs(z) <= 4.0, {{"z_score", z}}));
    } else {
      report["z_score"] = nullptr;
    }
  };

  if (options.scaling_m || options.t) {
    if (spec.kind != ProcessKind::kReflectedSrw) {
      return error_result(command, "/kind", "the scaling probe needs the reflected walk (reflected_srw)",
                          kExitSpecError);
    }
    ScalingSpec scaling{options.t.value_or(1.0), options.scaling_m.value_or(400)};
    ScalingProbe probe;
    try {
      probe = estimate_q_g_tail(scaling, options.count, options.seed, mc);
    } catch (const std::invalid_argument& e) {
      return error_result(command, "--t/--scaling-m", e.what(), kExitSpecError);
    }
    report["mode"] = "scaling";
    report["t"] = scaling.t;
    report["scaling_m"] = scaling.steps_per_unit;
    report["horizon"] = probe.horizon;
    report["estimate"] = probe.estimate.estimate;
    report["standard_error"] = probe.estimate.standard_error;
    report["count"] = probe.estimate.count;
    report["seed"] = probe.estimate.seed;
    report["streams"] = options.streams;
    report["target"] = probe.target;
    report["discrete_mean"] = probe.discrete_mean;
    report["discretization_bias"] = probe.discretization_bias;
    band_check(probe.estimate.estimate, probe.estimate.standard_error, probe.target);
    finalize(result);
    if (options.csv) {
      table << "t,m,horizon,estimate,standard_error,target,discrete_mean\n"
            << scaling.t << ',' << scaling.steps_per_unit << ',' << probe.horizon << ',' << probe.estimate.estimate
            << ',' << probe.estimate.standard_error << ',' << probe.target << ',' << probe.discrete_mean << '\n';
    } else {
      table << "E|W_H|/sqrt(m), t=" << scaling.t << " m=" << scaling.steps_per_unit << " H=" << probe.horizon
            << "\n  estimate " << probe.estimate.estimate << " +- " << probe.estimate.standard_error
            << "\n  target sqrt(2t/pi) " << probe.target << "\n  exact discrete mean " << probe.discrete_mean
            << " (bias " << probe.discretization_bias << ")\n";
    }
    result.table = table.str();
    return result;
  }

  const int n = options.n.value_or(spec.horizon);
  if (n < 1) return error_result(command, "--n", "time index must be at least 1", kExitSpecError);

  PathSampler sampler;
  PathFunctional weight;
  std::optional<Rational> exact;
  try {
    if (spec.kind == ProcessKind::kCustom) {
      if (n > spec.horizon) {
        return error_result(command, "--n", "custom spec has horizon " + std::to_string(spec.horizon),
                            kExitSpecError);
      }
      auto [space, x] = make_process(spec);
      sampler = tree_sampler(space);
      weight = process_functional(x);
      exact = expect(x, n);
    } else {
      sampler = fair_coin_sampler();
      weight = gallery_functional(spec.kind);
      if (n <= options.max_horizon) {
        ProcessSpec exact_spec = spec;
        exact_spec.horizon = n;
        const auto [space, x] = make_process(exact_spec);
        exact = expect(x, n);
      }
    }
  } catch (const std::invalid_argument& e) {
    return error_result(command, "spec", e.what(), kExitSpecError);
  }

  const MCEstimate estimate =
      estimate_q_functional(sampler, weight, n, constant_functional(1.0), options.count, options.seed, mc);
  report["mode"] = "functional";
  report["functional"] = "1";
  report["n"] = n;
  report["estimate"] = estimate.estimate;
  report["standard_error"] = estimate.standard_error;
  report["count"] = estimate.count;
  report["seed"] = estimate.seed;
  report["streams"] = options.streams;
  if (exact) {
    report["target"] = to_double(*exact);
    report["target_exact"] = to_string(*exact);
    band_check(estimate.estimate, estimate.standard_error, to_double(*exact));
  } else {
    report["target"] = nullptr;
    report["warnings"].push_back("n above --max-horizon: no exact target computed");
  }
  finalize(result);
  if (options.csv) {
    table << "n,estimate,standard_error,target\n"
          << n << ',' << estimate.estimate << ',' << estimate.standard_error << ','
          << (exact ? to_string(*exact) : std::string("NA")) << '\n';
  } else {
    table << "Q[1_{g<" << n << "}] = E_P[X_" << n << "]\n  estimate " << estimate.estimate << " +- "
          << estimate.standard_error << "\n  exact " << (exact ? to_string(*exact) : std::string("n/a")) << '\n';
  }
  result.table = table.str();
  return result;
}

}  // namespace sigmalab::cli
