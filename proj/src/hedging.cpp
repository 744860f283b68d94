#include "aw/hedging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aw {

std::vector<std::string> Strategy::validate(const ScenarioTree& tree) const {
  std::vector<std::string> report;
  if (position.size() < tree.nodes.size()) {
    report.push_back("strategy/tree mismatch: " +
                     std::to_string(position.size()) + " positions for " +
                     std::to_string(tree.nodes.size()) + " nodes");
    return report;
  }
  if (bound < 0) report.push_back("strategy bound must be >= 0");
  for (size_t u = 0; u < tree.nodes.size(); ++u) {
    if (tree.nodes[u].children.empty()) continue;
    if (std::abs(position[u]) > bound + 1e-12)
      report.push_back("position at node " + std::to_string(u) +
                       " exceeds the bound");
  }
  return report;
}

Vector Claim::evaluate(const PathLaw& law) const {
  Vector out(law.path_count());
  std::vector<Scalar> path(law.horizon + 1);
  for (Index i = 0; i < law.path_count(); ++i) {
    for (int t = 0; t <= law.horizon; ++t) path[t] = law.values(i, t);
    out[i] = payoff(path);
  }
  return out;
}

Scalar claim_lipschitz_realized(const Claim& claim,
                                const std::vector<const PathLaw*>& laws) {
  std::vector<Vector> vals;
  Scalar worst = 0;
  for (const PathLaw* law : laws) vals.push_back(claim.evaluate(*law));
  for (size_t a = 0; a < laws.size(); ++a) {
    for (size_t b = a; b < laws.size(); ++b) {
      for (Index i = 0; i < laws[a]->path_count(); ++i) {
        for (Index j = (a == b ? i + 1 : Index(0)); j < laws[b]->path_count();
             ++j) {
          const Scalar dist = laws[a]->sup_distance(i, *laws[b], j);
          const Scalar gap = std::abs(vals[a][i] - vals[b][j]);
          if (dist > 0)
            worst = std::max(worst, gap / dist);
          else if (gap > 0)
            return kInfinity;
        }
      }
    }
  }
  return worst;
}

Strategy realize(const PathStrategy& h, const ScenarioTree& tree) {
  Strategy out;
  out.bound = h.bound;
  out.position.assign(tree.nodes.size(), 0.0);
  for (size_t u = 0; u < tree.nodes.size(); ++u) {
    if (tree.nodes[u].children.empty()) continue;
    const auto prefix = tree.prefix_values(static_cast<int>(u));
    const Scalar pos = h.position(tree.nodes[u].time, prefix);
    if (std::abs(pos) > h.bound + 1e-12)
      throw std::invalid_argument("path strategy violates its own bound");
    out.position[u] = pos;
  }
  return out;
}

Scalar prefix_lipschitz(const PathStrategy& h,
                        const std::vector<const ScenarioTree*>& trees) {
  int horizon = trees.front()->horizon;
  for (const ScenarioTree* t : trees)
    if (t->horizon != horizon)
      throw std::invalid_argument("prefix_lipschitz: horizon mismatch");
  Scalar worst = 0;
  for (int t = 0; t < horizon; ++t) {
    // Pool the time-t prefixes of every tree.
    std::vector<std::vector<Scalar>> prefixes;
    std::vector<Scalar> values;
    for (const ScenarioTree* tree : trees) {
      for (int u : tree->nodes_at_time(t)) {
        prefixes.push_back(tree->prefix_values(u));
        values.push_back(h.position(t, prefixes.back()));
      }
    }
    for (size_t a = 0; a < prefixes.size(); ++a) {
      for (size_t b = a + 1; b < prefixes.size(); ++b) {
        Scalar dist = 0;
        for (int s = 0; s <= t; ++s)
          dist = std::max(dist, std::abs(prefixes[a][s] - prefixes[b][s]));
        const Scalar gap = std::abs(values[a] - values[b]);
        if (dist > 0)
          worst = std::max(worst, gap / dist);
        else if (gap > 0)
          return kInfinity;
      }
    }
  }
  return worst;
}

Vector gains(const TreeData& data, const Strategy& h) {
  const auto report = h.validate(data.tree);
  if (!report.empty()) throw std::invalid_argument(report.front());
  const PathLaw& law = data.law;
  Vector out = Vector::Zero(law.path_count());
  for (Index i = 0; i < law.path_count(); ++i) {
    Scalar w = 0;
    for (int t = 1; t <= law.horizon; ++t)
      w += h.position[law.nodes[i][t - 1]] *
           (law.values(i, t) - law.values(i, t - 1));
    out[i] = w;
  }
  return out;
}

DiscreteDistribution wealth_distribution(const TreeData& data,
                                         const Strategy& h,
                                         const Claim* claim, Scalar m) {
  const Vector g = gains(data, h);
  Vector c = claim ? claim->evaluate(data.law)
                   : Vector::Zero(data.law.path_count());
  DiscreteDistribution out;
  for (Index i = 0; i < data.law.path_count(); ++i) {
    const Scalar z = claim ? c[i] - m - g[i] : g[i] - m;
    out.atoms.push_back({z, data.law.probs[i]});
  }
  return out.canonical();
}

DiscreteDistribution utility_wealth_distribution(const TreeData& data,
                                                 const Strategy& h,
                                                 const Claim* claim,
                                                 Scalar shift) {
  const Vector g = gains(data, h);
  Vector c = claim ? claim->evaluate(data.law)
                   : Vector::Zero(data.law.path_count());
  DiscreteDistribution out;
  for (Index i = 0; i < data.law.path_count(); ++i)
    out.atoms.push_back({c[i] + g[i] + shift, data.law.probs[i]});
  return out.canonical();
}

Scalar avar(const DiscreteDistribution& dist, Scalar alpha) {
  if (!(alpha > 0) || alpha > 1)
    throw std::invalid_argument("avar: alpha must lie in (0, 1]");
  const auto bad = dist.validate();
  if (!bad.empty()) throw std::invalid_argument("avar: " + bad.front());
  const DiscreteDistribution d = dist.canonical();
  const Index n = d.size();
  // m* = smallest atom value with P(Z > m*) <= alpha; evaluating the
  // objective at m* keeps translation equivariance exact.
  Vector tail(n);  // tail[i] = P(Z > v_i)
  Scalar acc = 0;
  for (Index i = n - 1; i >= 0; --i) {
    tail[i] = acc;
    acc += d.atoms[i].weight;
  }
  Index star = n - 1;
  for (Index i = 0; i < n; ++i) {
    if (tail[i] <= alpha) {
      star = i;
      break;
    }
  }
  const Scalar m = d.atoms[star].value;
  Scalar excess = 0;
  for (Index i = star + 1; i < n; ++i)
    excess += d.atoms[i].weight * (d.atoms[i].value - m);
  return m + excess / alpha;
}

namespace {

// Variable layout used by the hedging linear programs.
struct NodeVars {
  std::vector<Index> var_of_node;  // -1 for leaves
  Index count = 0;
};

NodeVars enumerate_nonterminal(const ScenarioTree& tree) {
  NodeVars nv;
  nv.var_of_node.assign(tree.nodes.size(), -1);
  for (size_t u = 0; u < tree.nodes.size(); ++u)
    if (!tree.nodes[u].children.empty())
      nv.var_of_node[u] = nv.count++;
  return nv;
}

// Accumulates sum over paths of weight_i * dx_t(i) into the time-(t-1)
// node positions: the common gradient shape of all hedging objectives.
Vector node_gradient(const TreeData& data, const NodeVars& nv,
                     const Vector& path_weight) {
  Vector g = Vector::Zero(nv.count);
  const PathLaw& law = data.law;
  for (Index i = 0; i < law.path_count(); ++i) {
    if (path_weight[i] == 0) continue;
    for (int t = 1; t <= law.horizon; ++t) {
      const Index v = nv.var_of_node[law.nodes[i][t - 1]];
      g[v] += path_weight[i] * (law.values(i, t) - law.values(i, t - 1));
    }
  }
  return g;
}

Vector gains_from_vars(const TreeData& data, const NodeVars& nv,
                       const Vector& h) {
  Vector out = Vector::Zero(data.law.path_count());
  const PathLaw& law = data.law;
  for (Index i = 0; i < law.path_count(); ++i) {
    Scalar w = 0;
    for (int t = 1; t <= law.horizon; ++t)
      w += h[nv.var_of_node[law.nodes[i][t - 1]]] *
           (law.values(i, t) - law.values(i, t - 1));
    out[i] = w;
  }
  return out;
}

Strategy strategy_from_vars(const ScenarioTree& tree, const NodeVars& nv,
                            const Vector& h, Scalar k) {
  Strategy s;
  s.bound = k;
  s.position.assign(tree.nodes.size(), 0.0);
  for (size_t u = 0; u < tree.nodes.size(); ++u)
    if (nv.var_of_node[u] >= 0)
      s.position[u] = std::clamp(h[nv.var_of_node[u]], -k, k);
  return s;
}

}  // namespace

AvarHedgeResult optimal_avar_hedge(const TreeData& data, const Claim& claim,
                                   Scalar k, Scalar alpha) {
  if (!(alpha > 0) || alpha > 1)
    throw std::invalid_argument("optimal_avar_hedge: alpha must be in (0,1]");
  if (k < 0) throw std::invalid_argument("optimal_avar_hedge: k must be >= 0");
  const NodeVars nv = enumerate_nonterminal(data.tree);
  const Index np = data.law.path_count();
  const Vector c = claim.evaluate(data.law);

  // Variables: [m, h_0..h_{nn-1}, s_0..s_{np-1}].
  const Index n = 1 + nv.count + np;
  LinearProgram lp = LinearProgram::with_variables(n);
  lp.objective[0] = 1.0;
  for (Index i = 0; i < np; ++i)
    lp.objective[1 + nv.count + i] = data.law.probs[i] / alpha;
  lp.lower[0] = -kInfinity;
  for (Index v = 0; v < nv.count; ++v) {
    lp.lower[1 + v] = -k;
    lp.upper[1 + v] = k;
  }

  lp.ub_A = Matrix::Zero(np, n);
  lp.ub_b.resize(np);
  const PathLaw& law = data.law;
  for (Index i = 0; i < np; ++i) {
    lp.ub_A(i, 0) = -1.0;
    for (int t = 1; t <= law.horizon; ++t) {
      const Index v = nv.var_of_node[law.nodes[i][t - 1]];
      lp.ub_A(i, 1 + v) -= law.values(i, t) - law.values(i, t - 1);
    }
    lp.ub_A(i, 1 + nv.count + i) = -1.0;
    lp.ub_b[i] = -c[i];
  }

  const LpResult r = solve_lp(lp);
  AvarHedgeResult out;
  out.status = r.status;
  if (r.status != LpStatus::optimal) return out;
  out.value = r.value;
  out.m_star = r.x[0];
  out.strategy = strategy_from_vars(data.tree, nv, r.x.segment(1, nv.count), k);
  return out;
}

std::vector<std::string> LossSpec::validate(Scalar lo, Scalar hi,
                                            int grid) const {
  std::vector<std::string> report;
  const Scalar step = (hi - lo) / grid;
  Scalar prev = loss(lo), prev2 = 0;
  for (int i = 1; i <= grid; ++i) {
    const Scalar x = lo + i * step;
    const Scalar v = loss(x);
    if (v < prev - 1e-12 * (1 + std::abs(prev)))
      report.push_back("loss is decreasing near x = " + std::to_string(x));
    if (i >= 2) {
      const Scalar second = v - 2 * prev + prev2;
      if (second < -1e-9 * (1 + std::abs(v)))
        report.push_back("loss is non-convex near x = " + std::to_string(x));
    }
    if (dloss(x) < -1e-12)
      report.push_back("loss derivative negative at x = " + std::to_string(x));
    prev2 = prev;
    prev = v;
  }
  return report;
}

LossSpec LossSpec::positive_part_scaled(Scalar alpha) {
  LossSpec l;
  l.loss = [alpha](Scalar x) { return x > 0 ? x / alpha : 0.0; };
  l.dloss = [alpha](Scalar x) { return x > 0 ? 1.0 / alpha : 0.0; };
  l.growth_c = 1.0 / alpha;
  l.growth_p = 1.0;
  return l;
}

LossSpec LossSpec::exponential() {
  LossSpec l;
  l.loss = [](Scalar x) { return std::exp(x); };
  l.dloss = [](Scalar x) { return std::exp(x); };
  l.growth_c = 1.0;
  l.growth_p = 2.0;  // growth data only used to size validation grids
  return l;
}

namespace {

struct ProjectedDescent {
  // Minimizes a smooth convex objective over box-constrained positions
  // (plus optionally one free leading variable) by projected gradient
  // with backtracking.
  std::function<Scalar(const Vector&)> f;
  std::function<Vector(const Vector&)> grad;
  Vector lower, upper;
  long max_iters = 50000;
  Scalar pg_tol = 1e-9;

  Vector project(Vector x) const {
    for (Index i = 0; i < x.size(); ++i)
      x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
  }

  std::pair<Vector, long> run(Vector x) const {
    x = project(x);
    Scalar fx = f(x);
    Scalar step = 1.0;
    long it = 0;
    for (; it < max_iters; ++it) {
      const Vector g = grad(x);
      const Vector pg = project(x - g) - x;
      if (pg.cwiseAbs().maxCoeff() < pg_tol) break;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        const Vector cand = project(x - step * g);
        const Vector d = cand - x;
        const Scalar fc = f(cand);
        if (fc <= fx + 1e-4 * g.dot(d)) {
          x = cand;
          fx = fc;
          step *= 2.0;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    return {x, it};
  }
};

}  // namespace

LossHedgeResult expected_loss_hedge(const TreeData& data, const Claim& claim,
                                    Scalar k, Scalar m) {
  // Positive-part loss: exact LP over (h, slacks).
  const NodeVars nv = enumerate_nonterminal(data.tree);
  const Index np = data.law.path_count();
  const Vector c = claim.evaluate(data.law);

  const Index n = nv.count + np;
  LinearProgram lp = LinearProgram::with_variables(n);
  for (Index i = 0; i < np; ++i)
    lp.objective[nv.count + i] = data.law.probs[i];
  for (Index v = 0; v < nv.count; ++v) {
    lp.lower[v] = -k;
    lp.upper[v] = k;
  }
  lp.ub_A = Matrix::Zero(np, n);
  lp.ub_b.resize(np);
  const PathLaw& law = data.law;
  for (Index i = 0; i < np; ++i) {
    for (int t = 1; t <= law.horizon; ++t) {
      const Index v = nv.var_of_node[law.nodes[i][t - 1]];
      lp.ub_A(i, v) -= law.values(i, t) - law.values(i, t - 1);
    }
    lp.ub_A(i, nv.count + i) = -1.0;
    lp.ub_b[i] = -(c[i] - m);
  }
  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::optimal)
    throw std::runtime_error("expected_loss_hedge: LP failed: " +
                             std::string(to_string(r.status)));
  LossHedgeResult out;
  out.value = r.value;
  out.iterations = r.iterations;
  out.strategy = strategy_from_vars(data.tree, nv, r.x.head(nv.count), k);
  return out;
}

LossHedgeResult expected_loss_hedge(const TreeData& data, const Claim& claim,
                                    Scalar k, Scalar m, const LossSpec& loss) {
  const NodeVars nv = enumerate_nonterminal(data.tree);
  const Vector c = claim.evaluate(data.law);

  // Range of hedged outcomes for validation: |gains| <= k * path 1-var.
  Scalar reach = 0;
  for (Index i = 0; i < data.law.path_count(); ++i) {
    Scalar var1 = 0;
    for (int t = 1; t <= data.law.horizon; ++t)
      var1 += std::abs(data.law.values(i, t) - data.law.values(i, t - 1));
    reach = std::max(reach, k * var1);
  }
  const Scalar lo = (c.minCoeff() - m) - reach - 1;
  const Scalar hi = (c.maxCoeff() - m) + reach + 1;
  const auto report = loss.validate(lo, hi);
  for (const auto& msg : report)
    if (msg.find("non-convex") != std::string::npos)
      throw std::invalid_argument("expected_loss_hedge: " + msg);

  ProjectedDescent pd;
  pd.lower = Vector::Constant(nv.count, -k);
  pd.upper = Vector::Constant(nv.count, k);
  pd.f = [&](const Vector& h) {
    const Vector g = gains_from_vars(data, nv, h);
    Scalar s = 0;
    for (Index i = 0; i < g.size(); ++i)
      s += data.law.probs[i] * loss.loss(c[i] - m - g[i]);
    return s;
  };
  pd.grad = [&](const Vector& h) {
    const Vector g = gains_from_vars(data, nv, h);
    Vector w(g.size());
    for (Index i = 0; i < g.size(); ++i)
      w[i] = -data.law.probs[i] * loss.dloss(c[i] - m - g[i]);
    return node_gradient(data, nv, w);
  };
  const auto [h, iters] = pd.run(Vector::Zero(nv.count));
  LossHedgeResult out;
  out.value = pd.f(h);
  out.iterations = iters;
  out.strategy = strategy_from_vars(data.tree, nv, h, k);
  return out;
}

std::vector<std::string> UtilitySpec::validate(Scalar lo, Scalar hi,
                                               int grid) const {
  std::vector<std::string> report;
  const Scalar step = (hi - lo) / grid;
  Scalar prev = u(lo), prev2 = 0;
  for (int i = 1; i <= grid; ++i) {
    const Scalar x = lo + i * step;
    const Scalar v = u(x);
    if (v < prev - 1e-12 * (1 + std::abs(prev)))
      report.push_back("utility is decreasing near x = " + std::to_string(x));
    if (i >= 2) {
      const Scalar second = v - 2 * prev + prev2;
      if (second > 1e-9 * (1 + std::abs(v)))
        report.push_back("utility is non-concave near x = " + std::to_string(x));
    }
    const Scalar d = du(x);
    if (d < 0)
      report.push_back("marginal utility negative at x = " + std::to_string(x));
    if (d > growth_c * (1 + std::pow(std::abs(x), growth_p - 1)) + 1e-9)
      report.push_back("declared growth bound fails at x = " + std::to_string(x));
    prev2 = prev;
    prev = v;
  }
  return report;
}

UtilitySpec UtilitySpec::capped_linear(Scalar cap) {
  UtilitySpec s;
  s.u = [cap](Scalar x) { return std::min(x, cap); };
  s.du = [cap](Scalar x) { return x <= cap ? 1.0 : 0.0; };  // left derivative
  s.growth_c = 1.0;
  s.growth_p = 1.0;
  return s;
}

UtilitySpec UtilitySpec::capped_exponential(Scalar gamma) {
  UtilitySpec s;
  s.u = [gamma](Scalar x) { return 1.0 - std::exp(-gamma * x); };
  s.du = [gamma](Scalar x) { return gamma * std::exp(-gamma * x); };
  s.growth_c = gamma;
  s.growth_p = 1.0;  // derivative bounded only on the wealth range in use
  return s;
}

UtilityMaxResult utility_maximize(const TreeData& data, const Claim& claim,
                                  Scalar k, const UtilitySpec& util) {
  const NodeVars nv = enumerate_nonterminal(data.tree);
  const Vector c = claim.evaluate(data.law);

  Scalar reach = 0;
  for (Index i = 0; i < data.law.path_count(); ++i) {
    Scalar var1 = 0;
    for (int t = 1; t <= data.law.horizon; ++t)
      var1 += std::abs(data.law.values(i, t) - data.law.values(i, t - 1));
    reach = std::max(reach, k * var1);
  }
  const auto report =
      util.validate(c.minCoeff() - reach - 1, c.maxCoeff() + reach + 1);
  for (const auto& msg : report)
    if (msg.find("non-concave") != std::string::npos ||
        msg.find("negative") != std::string::npos)
      throw std::invalid_argument("utility_maximize: " + msg);

  auto objective = [&](const Vector& h) {
    const Vector g = gains_from_vars(data, nv, h);
    Scalar s = 0;
    for (Index i = 0; i < g.size(); ++i)
      s += data.law.probs[i] * util.u(c[i] + g[i]);
    return s;
  };
  auto gradient = [&](const Vector& h) {
    const Vector g = gains_from_vars(data, nv, h);
    Vector w(g.size());
    for (Index i = 0; i < g.size(); ++i)
      w[i] = data.law.probs[i] * util.du(c[i] + g[i]);
    return node_gradient(data, nv, w);
  };

  Vector h = Vector::Zero(nv.count);
  Scalar fx = objective(h);
  Scalar step = 1.0;
  UtilityMaxResult out;
  const long max_iters = 50000;
  long it = 0;
  auto project = [&](Vector x) {
    for (Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], -k, k);
    return x;
  };
  Vector g = gradient(h);
  for (; it < max_iters; ++it) {
    const Vector pg = project(h + g) - h;
    if (pg.cwiseAbs().maxCoeff() < 1e-8) break;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vector cand = project(h + step * g);
      const Vector d = cand - h;
      const Scalar fc = objective(cand);
      if (fc >= fx + 1e-4 * g.dot(d)) {
        h = cand;
        fx = fc;
        g = gradient(h);
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }

  out.value = fx;
  out.strategy = strategy_from_vars(data.tree, nv, h, k);
  out.iterations = it;
  out.projected_gradient_norm = (project(h + g) - h).cwiseAbs().maxCoeff();
  Scalar gap = 0;
  for (Index v = 0; v < nv.count; ++v)
    gap += g[v] > 0 ? g[v] * (k - h[v]) : g[v] * (-k - h[v]);
  out.optimality_gap = gap;
  out.converged = out.projected_gradient_norm < 1e-8 || gap < 1e-10;
  return out;
}

Scalar utility_objective(const TreeData& data, const Claim& claim,
                         const UtilitySpec& util, const Strategy& h) {
  const Vector g = gains(data, h);
  const Vector c = claim.evaluate(data.law);
  Scalar s = 0;
  for (Index i = 0; i < g.size(); ++i)
    s += data.law.probs[i] * util.u(c[i] + g[i]);
  return s;
}

std::vector<Scalar> utility_objective_gradient(const TreeData& data,
                                               const Claim& claim,
                                               const UtilitySpec& util,
                                               const Strategy& h) {
  const Vector g = gains(data, h);
  const Vector c = claim.evaluate(data.law);
  std::vector<Scalar> grad(data.tree.nodes.size(), 0.0);
  const PathLaw& law = data.law;
  for (Index i = 0; i < law.path_count(); ++i) {
    const Scalar w = data.law.probs[i] * util.du(c[i] + g[i]);
    for (int t = 1; t <= law.horizon; ++t)
      grad[law.nodes[i][t - 1]] +=
          w * (law.values(i, t) - law.values(i, t - 1));
  }
  return grad;
}

IndifferenceResult indifference_price(const TreeData& data, const Claim& claim,
                                      Scalar k, const UtilitySpec& util,
                                      Scalar tol) {
  const Vector c = claim.evaluate(data.law);
  Claim zero{[](const std::vector<Scalar>&) { return 0.0; }, 0.0};
  const Scalar baseline = utility_maximize(data, zero, k, util).value;

  auto f = [&](Scalar v) {
    Claim shifted{claim.payoff, claim.lipschitz};
    const auto base = claim.payoff;
    shifted.payoff = [base, v](const std::vector<Scalar>& path) {
      return base(path) - v;
    };
    return utility_maximize(data, shifted, k, util).value - baseline;
  };

  Scalar lo = c.minCoeff() - 1, hi = c.maxCoeff() + 1;
  Scalar flo = f(lo), fhi = f(hi);
  Scalar span = hi - lo;
  int expansions = 0;
  while (flo < 0 && expansions < 60) {
    lo -= span;
    span *= 2;
    flo = f(lo);
    ++expansions;
  }
  while (fhi > 0 && expansions < 60) {
    hi += span;
    span *= 2;
    fhi = f(hi);
    ++expansions;
  }
  if (flo < 0 || fhi > 0)
    throw std::runtime_error("indifference_price: could not bracket the root");

  IndifferenceResult out;
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = 0.5 * (lo + hi);
    const Scalar fm = f(mid);
    ++out.bisection_steps;
    if (std::abs(fm) < tol) {
      out.price = mid;
      out.residual = fm;
      return out;
    }
    if (fm > 0)
      lo = mid;
    else
      hi = mid;
  }
  throw std::runtime_error("indifference_price: bisection did not reach tol");
}

Strategy project_strategy(const Strategy& h, const BiCausalCoupling& pi,
                          const ScenarioTree& treeQ) {
  const PathLaw& lawP = pi.lawP;
  const PathLaw& lawQ = pi.lawQ;
  if (lawQ.horizon != treeQ.horizon)
    throw std::invalid_argument("project_strategy: coupling/tree mismatch");

  Strategy g;
  g.bound = h.bound;
  g.position.assign(treeQ.nodes.size(), 0.0);

  for (int t = 0; t < treeQ.horizon; ++t) {
    // a_i = H position of the P-path i at time t.
    Vector a(lawP.path_count());
    for (Index i = 0; i < lawP.path_count(); ++i)
      a[i] = h.position[lawP.nodes[i][t]];
    const Vector num = pi.weights.transpose() * a;       // per Q-path
    const Vector den = pi.weights.colwise().sum();       // per Q-path
    // Group Q-paths by their time-t node.
    std::vector<Scalar> mass(treeQ.nodes.size(), 0.0);
    std::vector<Scalar> acc(treeQ.nodes.size(), 0.0);
    for (Index j = 0; j < lawQ.path_count(); ++j) {
      const int v = lawQ.nodes[j][t];
      mass[v] += den[j];
      acc[v] += num[j];
    }
    for (int v : treeQ.nodes_at_time(t)) {
      if (treeQ.nodes[v].children.empty()) continue;
      if (mass[v] <= 0)
        throw std::runtime_error(
            "project_strategy: no coupling mass through reachable node " +
            std::to_string(v) + " (coupling inconsistent with marginal)");
      g.position[v] = std::clamp(acc[v] / mass[v], -h.bound, h.bound);
    }
  }
  return g;
}

Vector mixed_integral_conditional(const Strategy& h,
                                  const BiCausalCoupling& pi) {
  const PathLaw& lawP = pi.lawP;
  const PathLaw& lawQ = pi.lawQ;
  Vector out = Vector::Zero(lawQ.path_count());
  for (int t = 1; t <= lawQ.horizon; ++t) {
    Vector a(lawP.path_count());
    for (Index i = 0; i < lawP.path_count(); ++i)
      a[i] = h.position[lawP.nodes[i][t - 1]];
    const Vector num = pi.weights.transpose() * a;
    for (Index j = 0; j < lawQ.path_count(); ++j)
      out[j] += num[j] * (lawQ.values(j, t) - lawQ.values(j, t - 1));
  }
  const Vector den = pi.weights.colwise().sum();
  for (Index j = 0; j < lawQ.path_count(); ++j) {
    if (den[j] <= 0)
      throw std::runtime_error(
          "mixed_integral_conditional: Q-path with no coupling mass");
    out[j] /= den[j];
  }
  return out;
}

Scalar oce_risk(const DiscreteDistribution& dist, const LossSpec& loss) {
  const auto bad = dist.validate();
  if (!bad.empty()) throw std::invalid_argument("oce_risk: " + bad.front());
  auto g = [&](Scalar m) {
    Scalar s = 0;
    for (const auto& a : dist.atoms) s += a.weight * loss.loss(a.value - m);
    return s + m;
  };

  Scalar lo = dist.min_value() - 1;
  Scalar hi = dist.max_value() + 1;
  for (int attempt = 0; attempt < 6; ++attempt) {
    // Golden-section search on the convex objective.
    const Scalar phi = (std::sqrt(5.0) - 1.0) / 2.0;
    Scalar a = lo, b = hi;
    Scalar x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    Scalar f1 = g(x1), f2 = g(x2);
    while (b - a > 1e-8) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = g(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = g(x2);
      }
    }
    const Scalar m = 0.5 * (a + b);
    // Re-expand if the minimum sits on the bracket boundary.
    if (m - lo < 1e-6 * (hi - lo)) {
      lo -= 4 * (hi - lo);
      continue;
    }
    if (hi - m < 1e-6 * (hi - lo)) {
      hi += 4 * (hi - lo);
      continue;
    }
    return g(m);
  }
  throw std::runtime_error("oce_risk: minimizer escaped every bracket");
}

OceHedgeResult oce_hedge(const TreeData& data, const Claim& claim, Scalar k,
                         const LossSpec& loss) {
  const NodeVars nv = enumerate_nonterminal(data.tree);
  const Vector c = claim.evaluate(data.law);

  // Variables: [m, h]; m unconstrained.
  ProjectedDescent pd;
  pd.lower = Vector::Constant(nv.count + 1, -k);
  pd.upper = Vector::Constant(nv.count + 1, k);
  pd.lower[0] = -kInfinity;
  pd.upper[0] = kInfinity;
  pd.f = [&](const Vector& x) {
    const Vector g = gains_from_vars(data, nv, x.tail(nv.count));
    Scalar s = x[0];
    for (Index i = 0; i < g.size(); ++i)
      s += data.law.probs[i] * loss.loss(c[i] - g[i] - x[0]);
    return s;
  };
  pd.grad = [&](const Vector& x) {
    const Vector g = gains_from_vars(data, nv, x.tail(nv.count));
    Vector w(g.size());
    Scalar dm = 1.0;
    for (Index i = 0; i < g.size(); ++i) {
      const Scalar d = data.law.probs[i] * loss.dloss(c[i] - g[i] - x[0]);
      w[i] = -d;
      dm -= d;
    }
    Vector out(nv.count + 1);
    out[0] = dm;
    out.tail(nv.count) = node_gradient(data, nv, w);
    return out;
  };

  Vector x0 = Vector::Zero(nv.count + 1);
  x0[0] = c.mean();
  const auto [x, iters] = pd.run(x0);
  OceHedgeResult out;
  out.value = pd.f(x);
  out.m_star = x[0];
  out.iterations = iters;
  out.strategy = strategy_from_vars(data.tree, nv, x.tail(nv.count), k);
  return out;
}

}  // namespace aw
