// awdist: adapted Wasserstein distances between scenario-tree models and
// stability checks for hedging, risk and utility objectives built on them.
//
// Exit codes: 0 success, 1 solver failure, 2 invalid input, 3 a verified
// inequality came back with negative slack beyond tolerance.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aw/bicausal.hpp"
#include "aw/generators.hpp"
#include "aw/lattice.hpp"
#include "aw/models.hpp"
#include "aw/report_io.hpp"
#include "aw/svg.hpp"
#include "aw/transport.hpp"
#include "aw/tree_io.hpp"
#include "aw/verify.hpp"

using namespace aw;
using nlohmann::json;

namespace {

int workers_from_env() {
  const char* env = std::getenv("AWDIST_WORKERS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

json ledger_json() {
  return {{"b1", ConstantsLedger::b1},
          {"b2", ConstantsLedger::b2},
          {"quadratic_variation", "realized"}};
}

Claim parse_claim(const std::string& spec) {
  if (spec.rfind("call", 0) == 0) {
    Scalar strike = 0;
    const auto colon = spec.find(':');
    if (colon != std::string::npos)
      strike = std::stod(spec.substr(colon + 1));
    return call_claim(strike);
  }
  throw std::invalid_argument("unknown claim \"" + spec +
                              "\" (expected call or call:K)");
}

UtilitySpec parse_utility(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const Scalar arg =
      colon == std::string::npos ? 1.0 : std::stod(spec.substr(colon + 1));
  if (kind == "cap") return UtilitySpec::capped_linear(arg);
  if (kind == "exp") return UtilitySpec::capped_exponential(arg);
  throw std::invalid_argument("unknown utility \"" + spec +
                              "\" (expected cap:C or exp:gamma)");
}

LossSpec parse_loss(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  if (kind == "pp")
    return LossSpec::positive_part_scaled(
        colon == std::string::npos ? 1.0 : std::stod(spec.substr(colon + 1)));
  if (kind == "exp") return LossSpec::exponential();
  throw std::invalid_argument("unknown loss \"" + spec +
                              "\" (expected pp, pp:alpha or exp)");
}

TimeFunction parse_schedule(const std::string& spec, int steps) {
  if (spec.find(',') == std::string::npos)
    return constant_schedule(std::stod(spec));
  std::vector<Scalar> values;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  if (static_cast<int>(values.size()) != steps)
    throw std::invalid_argument("schedule has " +
                                std::to_string(values.size()) +
                                " entries for " + std::to_string(steps) +
                                " steps");
  return step_schedule(std::move(values), 1.0 / steps);
}

std::string format_record(const json& j, const std::string& format) {
  if (format == "json") return j.dump(2) + "\n";
  // Flat CSV: header from keys (scalars only), one data row.
  std::ostringstream head, row;
  bool first = true;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number() && !value.is_string() && !value.is_boolean())
      continue;
    if (!first) {
      head << ',';
      row << ',';
    }
    head << key;
    if (value.is_string())
      row << value.get<std::string>();
    else
      row << value.dump();
    first = false;
  }
  return head.str() + "\n" + row.str() + "\n";
}

json suite_summary(const std::string& name, const SuiteOutcome& outcome) {
  json j;
  j["subcommand"] = "verify " + name;
  j["instances"] = outcome.reports.size();
  j["failures"] = outcome.failures;
  j["worst_slack"] = outcome.worst_slack;
  j["ledger"] = ledger_json();
  return j;
}

std::string suite_csv(const SuiteOutcome& outcome) {
  std::ostringstream out;
  out << "instance,name,lhs,rhs,slack\n";
  for (size_t i = 0; i < outcome.reports.size(); ++i) {
    const BoundReport& r = outcome.reports[i];
    out << i << ',' << r.name << ',' << r.lhs << ',' << r.rhs << ','
        << r.slack << '\n';
  }
  return out.str();
}

struct CommonOpts {
  std::string out_path;
  std::string format = "json";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "awdist: adapted Wasserstein distances between scenario-tree models\n"
      "and stability verification for hedging and utility objectives"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--out", common.out_path, "output file (default stdout)");
  app.add_option("--format", common.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::function<int()> action;

  // ---- dist ------------------------------------------------------------
  auto* dist = app.add_subcommand(
      "dist", "adapted Wasserstein distance between two tree files");
  {
    static std::string a, b, method = "lp", coupling_csv;
    static Scalar p = 2.0;
    dist->add_option("treeP", a)->required();
    dist->add_option("treeQ", b)->required();
    dist->add_option("--p", p, "order p >= 1");
    dist->add_option("--method", method, "lp | dp | sync")
        ->check(CLI::IsMember({"lp", "dp", "sync"}));
    dist->add_option("--coupling-csv", coupling_csv,
                     "write the optimal coupling matrix to this file");
    dist->callback([&] {
      action = [&]() {
        const TreeData P(load_tree(a));
        const TreeData Q(load_tree(b));
        json j;
        j["subcommand"] = "dist";
        j["p"] = p;
        j["method"] = method;
        if (method == "lp") {
          const AdaptedDistanceResult r = adapted_wasserstein_lp(P, Q, p);
          if (r.status != LpStatus::optimal) {
            std::cerr << "solver failure: " << to_string(r.status) << "\n";
            return 1;
          }
          j["value"] = r.value;
          j["expected_cost"] = r.expected_cost;
          j["lp_variables"] = r.lp_variables;
          j["lp_rows"] = r.lp_rows;
          j["lp_iterations"] = r.lp_iterations;
          if (!coupling_csv.empty()) {
            std::ofstream c(coupling_csv);
            c << "# rows: P-paths, cols: Q-paths\n";
            for (Index i = 0; i < r.coupling.weights.rows(); ++i) {
              for (Index jj = 0; jj < r.coupling.weights.cols(); ++jj)
                c << (jj ? "," : "") << r.coupling.weights(i, jj);
              c << "\n";
            }
          }
        } else if (method == "dp") {
          j["value"] = adapted_wasserstein_dp_aw2(P.tree, Q.tree);
          if (p != 2.0)
            throw std::invalid_argument(
                "dist --method dp computes the stage-additive AW_2 case");
        } else {
          const BiCausalCoupling sync = synchronous_coupling(P, Q);
          j["value"] = coupling_value(sync, P, Q, p);
          j["note"] = "synchronous coupling upper bound";
        }
        j["ledger"] = ledger_json();
        write_text(common.out_path, format_record(j, common.format));
        return 0;
      };
    });
  }

  // ---- wass / weak / seminorm -------------------------------------------
  auto* wass = app.add_subcommand(
      "wass", "plain Wasserstein distance (path laws or atom files)");
  {
    static std::string a, b;
    static Scalar p = 1.0;
    static bool atoms = false;
    wass->add_option("A", a)->required();
    wass->add_option("B", b)->required();
    wass->add_option("--p", p);
    wass->add_flag("--atoms", atoms, "inputs are distribution files");
    wass->callback([&] {
      action = [&]() {
        TransportResult r;
        if (atoms)
          r = wasserstein(load_distribution(a), load_distribution(b), p);
        else
          r = wasserstein(to_path_law(load_tree(a)), to_path_law(load_tree(b)),
                          p);
        if (r.status != LpStatus::optimal) {
          std::cerr << "solver failure: " << to_string(r.status) << "\n";
          return 1;
        }
        json j{{"subcommand", "wass"}, {"p", p}, {"value", r.value}};
        write_text(common.out_path, format_record(j, common.format));
        return 0;
      };
    });
  }

  auto* weak = app.add_subcommand(
      "weak", "weak (barycentric) transport cost between atom files");
  {
    static std::string a, b;
    static int p = 2;
    weak->add_option("mu", a)->required();
    weak->add_option("nu", b)->required();
    weak->add_option("--p", p)->check(CLI::IsMember({1, 2}));
    weak->callback([&] {
      action = [&]() {
        const WeakTransportResult r =
            weak_ot(load_distribution(a), load_distribution(b), p);
        if (!r.converged) {
          std::cerr << "weak transport did not certify convergence (gap "
                    << r.gap << ")\n";
          return 1;
        }
        json j{{"subcommand", "weak"},
               {"p", p},
               {"value", r.value},
               {"gap", r.gap},
               {"iterations", r.iterations}};
        write_text(common.out_path, format_record(j, common.format));
        return 0;
      };
    });
  }

  auto* semi = app.add_subcommand(
      "seminorm", "adapted distance to the constant model");
  {
    static std::string a;
    static Scalar p = 2.0;
    semi->add_option("tree", a)->required();
    semi->add_option("--p", p);
    semi->callback([&] {
      action = [&]() {
        json j{{"subcommand", "seminorm"},
               {"p", p},
               {"value", seminorm(load_tree(a), p)}};
        write_text(common.out_path, format_record(j, common.format));
        return 0;
      };
    });
  }

  // ---- hedge -------------------------------------------------------------
  auto* hedge = app.add_subcommand("hedge", "hedging and utility solvers");
  hedge->require_subcommand(1);
  {
    static std::string tree_path, claim_spec = "call:0", util_spec = "exp:1",
                       loss_spec = "pp", strategy_out;
    static Scalar k = 1.0, alpha = 0.3, m = 0.0, tol = 1e-6;

    auto add_common = [&](CLI::App* cmd) {
      cmd->add_option("tree", tree_path)->required();
      cmd->add_option("--claim", claim_spec, "call or call:K");
      cmd->add_option("--k", k, "strategy bound");
      cmd->add_option("--strategy-out", strategy_out,
                      "write the optimizer strategy as JSON");
    };

    auto* avar_cmd = hedge->add_subcommand("avar", "optimal AVaR hedge (LP)");
    add_common(avar_cmd);
    avar_cmd->add_option("--alpha", alpha);
    avar_cmd->callback([&] {
      action = [&]() {
        const TreeData data(load_tree(tree_path));
        const AvarHedgeResult r =
            optimal_avar_hedge(data, parse_claim(claim_spec), k, alpha);
        if (r.status != LpStatus::optimal) {
          std::cerr << "solver failure: " << to_string(r.status) << "\n";
          return 1;
        }
        if (!strategy_out.empty()) save_strategy(r.strategy, strategy_out);
        json j{{"subcommand", "hedge avar"}, {"alpha", alpha},     {"k", k},
               {"value", r.value},           {"m_star", r.m_star}};
        write_text(common.out_path, format_record(j, common.format));
        return 0;
      };
    });

    auto* loss_cmd =
        hedge->add_subcommand("loss", "expected-loss hedge at fixed m");
    add_common(loss_cmd);
    loss_cmd->add_option("--m", m);
    loss_cmd->add_option("--loss", loss_spec, "pp | pp:alpha | exp");
    loss_cmd->callback([&] {
      action = [&]() {
        const TreeData data(load_tree(tree_path));
        const Claim claim = parse_claim(claim_spec);
        LossHedgeResult r;
        if (loss_spec == "pp")
          r = expected_loss_hedge(data, claim, k, m);
        else
          r = expected_loss_hedge(data, claim, k, m, parse_loss(loss_spec));
        if (!strategy_out.empty()) save_strategy(r.strategy, strategy_out);
        json j{{"subcommand", "hedge loss"},
               {"m", m},
               {"k", k},
               {"value", r.value},
               {"iterations", r.iterations}};
        write_text(common.out_path, format_record(j, common.format));
        return 0;
      };
    });

    auto* util_cmd =
        hedge->add_subcommand("utility", "expected-utility maximization");
    add_common(util_cmd);
    util_cmd->add_option("--utility", util_spec, "cap:C | exp:gamma");
    util_cmd->callback([&] {
      action = [&]() {
        const TreeData data(load_tree(tree_path));
        const UtilityMaxResult r = utility_maximize(
            data, parse_claim(claim_spec), k, parse_utility(util_spec));
        if (!r.converged) {
          std::cerr << "utility ascent did not converge (pg norm "
                    << r.projected_gradient_norm << ")\n";
          return 1;
        }
        if (!strategy_out.empty()) save_strategy(r.strategy, strategy_out);
        json j{{"subcommand", "hedge utility"},
               {"k", k},
               {"value", r.value},
               {"optimality_gap", r.optimality_gap},
               {"iterations", r.iterations}};
        write_text(common.out_path, format_record(j, common.format));
        return 0;
      };
    });

    auto* indiff_cmd =
        hedge->add_subcommand("indiff", "utility indifference price");
    add_common(indiff_cmd);
    indiff_cmd->add_option("--utility", util_spec);
    indiff_cmd->add_option("--tol", tol);
    indiff_cmd->callback([&] {
      action = [&]() {
        const TreeData data(load_tree(tree_path));
        const IndifferenceResult r = indifference_price(
            data, parse_claim(claim_spec), k, parse_utility(util_spec), tol);
        json j{{"subcommand", "hedge indiff"},
               {"k", k},
               {"price", r.price},
               {"residual", r.residual},
               {"bisection_steps", r.bisection_steps}};
        write_text(common.out_path, format_record(j, common.format));
        return 0;
      };
    });
  }

  // ---- project -----------------------------------------------------------
  auto* project = app.add_subcommand(
      "project", "conditional-expectation projection of a strategy");
  {
    static std::string a, b, strategy_in, strategy_out;
    static Scalar p = 1.0;
    project->add_option("treeP", a)->required();
    project->add_option("treeQ", b)->required();
    project->add_option("--strategy", strategy_in)->required();
    project->add_option("--p", p, "order of the optimal coupling");
    project->add_option("--strategy-out", strategy_out);
    project->callback([&] {
      action = [&]() {
        const TreeData P(load_tree(a));
        const TreeData Q(load_tree(b));
        const Strategy h = load_strategy(strategy_in);
        const AdaptedDistanceResult aw = adapted_wasserstein_lp(P, Q, p);
        if (aw.status != LpStatus::optimal) {
          std::cerr << "solver failure: " << to_string(aw.status) << "\n";
          return 1;
        }
        const Strategy g = project_strategy(h, aw.coupling, Q.tree);
        if (!strategy_out.empty()) save_strategy(g, strategy_out);
        const Vector lhs = gains(Q, g);
        const Vector rhs = mixed_integral_conditional(h, aw.coupling);
        json j{{"subcommand", "project"},
               {"p", p},
               {"aw", aw.value},
               {"identity_residual", (lhs - rhs).cwiseAbs().maxCoeff()}};
        write_text(common.out_path, format_record(j, common.format));
        return 0;
      };
    });
  }

  // ---- verify ------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "theorem verification sweeps");
  verify->require_subcommand(1);
  {
    static SuiteConfig cfg;
    static std::string svg_path;
    cfg.workers = workers_from_env();

    auto add_suite = [&](const std::string& name, const char* help) {
      auto* cmd = verify->add_subcommand(name, help);
      cmd->add_option("--instances", cfg.instances);
      cmd->add_option("--seed", cfg.seed);
      cmd->add_option("--k", cfg.k);
      cmd->add_option("--alpha", cfg.alpha);
      cmd->add_option("--p", cfg.p);
      return cmd;
    };

    for (const auto& [name, help] :
         std::vector<std::pair<std::string, const char*>>{
             {"whi", "almost-superhedge transfer inequality"},
             {"shi", "same-strategy hedging inequality"},
             {"contraction", "weak-transport contraction bound"},
             {"oce", "optimized-certainty-equivalent stability"}}) {
      auto* cmd = add_suite(name, help);
      cmd->callback([&, name = name] {
        action = [&, name]() {
          const SuiteOutcome outcome = run_verifier_suite(name, cfg);
          write_text(common.out_path,
                     common.format == "csv"
                         ? suite_csv(outcome)
                         : suite_summary(name, outcome).dump(2) + "\n");
          return outcome.failures == 0 ? 0 : 3;
        };
      });
    }

    auto* avar_v = add_suite("avar", "AVaR-hedging Lipschitz stability");
    static Scalar sig1 = 0, sig2 = 0;
    static int lattice_n = 100;
    avar_v->add_option("--sigma1", sig1,
                       "with --sigma2: call-hedging tightness report");
    avar_v->add_option("--sigma2", sig2);
    avar_v->add_option("--N", lattice_n, "lattice steps for the tightness report");
    avar_v->callback([&] {
      action = [&]() {
        if (sig1 > 0 && sig2 > 0) {
          // Example-style tightness: hedged call values on two binomial
          // walk models vs the adapted distance between them.
          const BinomialLattice a = arithmetic_walk_lattice(lattice_n, sig1);
          const BinomialLattice b = arithmetic_walk_lattice(lattice_n, sig2);
          const Scalar va = lattice_call_value(a, 0.0);
          const Scalar vb = lattice_call_value(b, 0.0);
          const Scalar aw1 = std::abs(sig1 - sig2);  // synchronous coupling
          const Scalar ratio = std::abs(va - vb) / aw1;
          const Scalar target = 1.0 / std::sqrt(2.0 * M_PI);
          json j{{"subcommand", "verify avar tightness"},
                 {"N", lattice_n},
                 {"value_sigma1", va},
                 {"value_sigma2", vb},
                 {"aw1_T_normalization", aw1},
                 {"aw1_sqrtT_normalization", aw1},
                 {"note", "T = 1: both normalizations coincide"},
                 {"ratio", ratio},
                 {"target", target},
                 {"max_delta_sigma1", lattice_max_call_delta(a, 0.0)},
                 {"max_delta_sigma2", lattice_max_call_delta(b, 0.0)},
                 {"ledger", ledger_json()}};
          write_text(common.out_path, format_record(j, common.format));
          return (ratio >= 0.9 * target && ratio <= 1.1 * target) ? 0 : 3;
        }
        const SuiteOutcome outcome = run_verifier_suite("avar", cfg);
        write_text(common.out_path,
                   common.format == "csv"
                       ? suite_csv(outcome)
                       : suite_summary("avar", outcome).dump(2) + "\n");
        return outcome.failures == 0 ? 0 : 3;
      };
    });

    auto* metric = verify->add_subcommand(
        "metric", "metric axioms on random tree triples");
    static int triples = 10;
    metric->add_option("--triples", triples);
    metric->add_option("--seed", cfg.seed);
    metric->add_option("--p", cfg.p);
    metric->callback([&] {
      action = [&]() {
        Scalar worst_sym = 0, worst_tri = kInfinity;
        bool identity_ok = true;
        for (int i = 0; i < triples; ++i) {
          Rng rng(cfg.seed + 7919ull * static_cast<std::uint64_t>(i));
          RandomTreeSpec spec;
          spec.max_children = 4;
          const int T = rng.uniform_int(1, 3);
          spec.min_horizon = spec.max_horizon = T;
          std::vector<ScenarioTree> trees;
          for (int t = 0; t < 3; ++t) trees.push_back(random_tree(rng, spec));
          const MetricAxiomReport rep = check_metric_axioms(trees, cfg.p);
          worst_sym = std::max(worst_sym, rep.worst_symmetry_gap);
          worst_tri = std::min(worst_tri, rep.worst_triangle_slack);
          identity_ok = identity_ok && rep.identity_consistent;
        }
        json j{{"subcommand", "verify metric"},
               {"p", cfg.p},
               {"triples", triples},
               {"worst_symmetry_gap", worst_sym},
               {"worst_triangle_slack", worst_tri},
               {"identity_consistent", identity_ok}};
        write_text(common.out_path, format_record(j, common.format));
        return (worst_sym <= 1e-7 && worst_tri >= -1e-7 && identity_ok) ? 0
                                                                        : 3;
      };
    });

    auto* scaling = verify->add_subcommand(
        "scaling", "random-walk scaling identity for AW_2");
    static int scaling_n = 4, scaling_pairs = 10;
    scaling->add_option("--N", scaling_n, "largest step count (>=1)");
    scaling->add_option("--pairs", scaling_pairs);
    scaling->add_option("--seed", cfg.seed);
    scaling->callback([&] {
      action = [&]() {
        Scalar worst = 0;
        Rng rng(cfg.seed);
        for (int N = 1; N <= scaling_n; ++N) {
          for (int rep = 0; rep < scaling_pairs; ++rep) {
            std::vector<Scalar> s1(N), s2(N);
            for (int n = 0; n < N; ++n) {
              s1[n] = 0.2 + rng.uniform();
              s2[n] = 0.2 + rng.uniform();
            }
            const auto f1 = step_schedule(s1, 1.0 / N);
            const auto f2 = step_schedule(s2, 1.0 / N);
            const Scalar lp =
                adapted_wasserstein_lp(random_walk_tree(N, f1),
                                       random_walk_tree(N, f2), 2.0)
                    .value;
            worst = std::max(worst,
                             std::abs(lp - walk_scaling_identity(N, f1, f2)));
          }
        }
        json j{{"subcommand", "verify scaling"},
               {"max_N", scaling_n},
               {"pairs_per_N", scaling_pairs},
               {"worst_abs_error", worst}};
        write_text(common.out_path, format_record(j, common.format));
        return worst <= 1e-9 ? 0 : 3;
      };
    });

    auto* gbm_v = verify->add_subcommand(
        "gbm", "convergence of the geometric model distance to its closed form");
    static Scalar gsig1 = 0.2, gsig2 = 0.3, gT = 1.0;
    static std::string n_list = "25,50,100";
    gbm_v->add_option("--sigma1", gsig1);
    gbm_v->add_option("--sigma2", gsig2);
    gbm_v->add_option("--T", gT);
    gbm_v->add_option("--N", n_list, "comma-separated step counts");
    gbm_v->add_option("--svg", svg_path, "write a convergence plot");
    gbm_v->callback([&] {
      action = [&]() {
        const Scalar target = std::exp(gsig1 * gsig1 * gT) -
                              2 * std::exp(gsig1 * gsig2 * gT) +
                              std::exp(gsig2 * gsig2 * gT);
        std::vector<int> ns;
        std::stringstream ss(n_list);
        std::string item;
        while (std::getline(ss, item, ',')) ns.push_back(std::stoi(item));

        std::ostringstream csv;
        csv << "N,aw2_squared_sync,target,abs_error\n";
        std::vector<Scalar> xs, vals, errs;
        bool monotone = true;
        Scalar prev_err = kInfinity;
        for (int N : ns) {
          const Scalar v = lattice_sync_cost2(gbm_lattice(N, gsig1, gT),
                                              gbm_lattice(N, gsig2, gT));
          const Scalar err = std::abs(v - target);
          csv << N << ',' << v << ',' << target << ',' << err << '\n';
          xs.push_back(N);
          vals.push_back(v);
          errs.push_back(err);
          if (err > prev_err + 1e-12) monotone = false;
          prev_err = err;
        }
        if (!svg_path.empty()) {
          write_svg_line_plot(
              svg_path, "synchronous-coupling distance vs closed form", "N",
              "squared distance",
              {{"computed", xs, vals},
               {"target", xs, std::vector<Scalar>(xs.size(), target)}});
        }
        if (common.format == "csv") {
          write_text(common.out_path, csv.str());
        } else {
          json j{{"subcommand", "verify gbm"},
                 {"sigma1", gsig1},
                 {"sigma2", gsig2},
                 {"T", gT},
                 {"target", target},
                 {"monotone_error", monotone},
                 {"final_rel_error", errs.back() / target}};
          write_text(common.out_path, j.dump(2) + "\n");
        }
        return (monotone && errs.back() <= 0.10 * target) ? 0 : 3;
      };
    });

    auto* cex = verify->add_subcommand(
        "counterexamples", "reproduce the discontinuity counterexamples");
    static int cex_n = 100;
    static Scalar cex_eps = 0.01;
    cex->add_option("--n", cex_n);
    cex->add_option("--eps", cex_eps);
    cex->callback([&] {
      action = [&]() {
        json j;
        j["subcommand"] = "verify counterexamples";
        bool ok = true;

        {
          // Kinked pair: plain distance vanishes, utility values do not.
          const auto [Pn, P] = remark51_pair(cex_n);
          const TreeData dPn(Pn), dP(P);
          const Scalar w1 = wasserstein(dPn.law, dP.law, 1.0).value;
          const UtilitySpec cap = UtilitySpec::capped_linear(5.0);
          const Claim zero{[](const std::vector<Scalar>&) { return 0.0; },
                           0.0};
          const Scalar k = 1.0;
          const Scalar vn = utility_maximize(dPn, zero, k, cap).value;
          const Scalar vp = utility_maximize(dP, zero, k, cap).value;
          const Scalar gap = std::abs(vn - vp);
          // The achievable limit of the gap is (U(k) + U(0))/2 - U(0).
          const Scalar limit = 0.5 * (cap.u(k) + cap.u(0.0)) - cap.u(0.0);
          j["remark51"] = {{"n", cex_n},
                           {"w1", w1},
                           {"utility_gap", gap},
                           {"gap_limit", limit}};
          ok = ok && w1 < 0.02 && gap >= 0.9 * limit;
        }
        {
          const auto [Pe, P] = contraction_cex_pair(cex_eps);
          const TreeData dPe(Pe), dP(P);
          const AdaptedDistanceResult aw = adapted_wasserstein_lp(dPe, dP, 2.0);
          Strategy sign;
          sign.bound = 1.0;
          sign.position.assign(Pe.nodes.size(), 0.0);
          for (size_t u = 0; u < Pe.nodes.size(); ++u)
            if (!Pe.nodes[u].children.empty() && Pe.nodes[u].time == 1)
              sign.position[u] = Pe.nodes[u].value > 0 ? 1.0 : -1.0;
          const Strategy g = project_strategy(sign, aw.coupling, P);
          Scalar gmax = 0;
          for (size_t v = 0; v < P.nodes.size(); ++v)
            if (!P.nodes[v].children.empty())
              gmax = std::max(gmax, std::abs(g.position[v]));
          j["contraction_cex"] = {
              {"eps", cex_eps},
              {"aw2", aw.value},
              {"aw2_expected", cex_eps * std::sqrt(2.0)},
              {"projected_max_abs", gmax}};
          ok = ok &&
               std::abs(aw.value - cex_eps * std::sqrt(2.0)) < 1e-9 &&
               gmax < 1e-9;
        }
        {
          const auto [Pe, nul] = remark53_pair(cex_eps);
          const TreeData data(Pe);
          const Claim zero{[](const std::vector<Scalar>&) { return 0.0; },
                           0.0};
          const Scalar alpha = 0.3;
          const AvarHedgeResult bounded =
              optimal_avar_hedge(data, zero, 1.0, alpha);
          Scalar unbounded = 0;
          Scalar kk = 1.0;
          while (unbounded > -1e6 && kk < 1e12) {
            kk *= 32;
            Strategy shortpos;
            shortpos.bound = kk;
            shortpos.position.assign(Pe.nodes.size(), -kk);
            unbounded =
                avar(wealth_distribution(data, shortpos, nullptr, 0.0), alpha);
          }
          j["remark53"] = {{"eps", cex_eps},
                           {"k1_value", bounded.value},
                           {"witness_k", kk},
                           {"witness_value", unbounded}};
          ok = ok && std::isfinite(bounded.value) && unbounded < -1e6;
        }
        j["all_hold"] = ok;
        write_text(common.out_path, j.dump(2) + "\n");
        return ok ? 0 : 3;
      };
    });
  }

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "model generators");
  gen->require_subcommand(1);
  {
    static std::string out_tree = "tree.json", sigma_spec = "0.2",
                       mu_spec = "0.0", quant_spec = "binomial", outdir = ".";
    static int N = 4;
    static Scalar gsigma = 0.2, gT = 1.0;
    static int cn = 10;
    static Scalar ceps = 0.1;

    auto* walk = gen->add_subcommand("walk", "zero-mean quantized random walk");
    walk->add_option("--N", N)->required();
    walk->add_option("--sigma", sigma_spec, "constant or per-step list");
    walk->add_option("--quant", quant_spec, "binomial | gh:m");
    walk->add_option("--tree-out", out_tree);
    walk->callback([&] {
      action = [&]() {
        Quantization q = Quantization::Binomial();
        if (quant_spec.rfind("gh", 0) == 0)
          q = Quantization::GaussHermite(
              std::stoi(quant_spec.substr(quant_spec.find(':') + 1)));
        save_tree(random_walk_tree(N, parse_schedule(sigma_spec, N), q),
                  out_tree);
        return 0;
      };
    });

    auto* gbm_g = gen->add_subcommand("gbm", "geometric binomial martingale");
    gbm_g->add_option("--N", N)->required();
    gbm_g->add_option("--sigma", gsigma);
    gbm_g->add_option("--T", gT);
    gbm_g->add_option("--tree-out", out_tree);
    gbm_g->callback([&] {
      action = [&]() {
        save_tree(gbm_tree(N, gsigma, gT), out_tree);
        return 0;
      };
    });

    auto* diff = gen->add_subcommand("diffusion", "Euler drift-diffusion tree");
    diff->add_option("--N", N)->required();
    diff->add_option("--mu", mu_spec, "constant or per-step list");
    diff->add_option("--sigma", sigma_spec, "constant or per-step list");
    diff->add_option("--T", gT);
    diff->add_option("--tree-out", out_tree);
    diff->callback([&] {
      action = [&]() {
        const TimeFunction mu = parse_schedule(mu_spec, N);
        const TimeFunction sig = parse_schedule(sigma_spec, N);
        save_tree(drift_diffusion_tree(
                      N, mu, [sig](Scalar t, Scalar) { return sig(t); }, gT),
                  out_tree);
        return 0;
      };
    });

    auto* cex_g = gen->add_subcommand("counterexamples",
                                      "write the named counterexample trees");
    cex_g->add_option("--n", cn);
    cex_g->add_option("--eps", ceps);
    cex_g->add_option("--outdir", outdir);
    cex_g->callback([&] {
      action = [&]() {
        for (const auto& [name, tree] : counterexample_suite(cn, ceps))
          save_tree(tree, outdir + "/" + name + ".json");
        return 0;
      };
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return action();
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 1;
  }
}
