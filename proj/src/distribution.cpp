#include "aw/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aw {

Scalar DiscreteDistribution::total_weight() const {
  Scalar s = 0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

Scalar DiscreteDistribution::mean() const {
  Scalar s = 0;
  for (const auto& a : atoms) s += a.weight * a.value;
  return s;
}

Scalar DiscreteDistribution::min_value() const {
  Scalar m = kInfinity;
  for (const auto& a : atoms) m = std::min(m, a.value);
  return m;
}

Scalar DiscreteDistribution::max_value() const {
  Scalar m = -kInfinity;
  for (const auto& a : atoms) m = std::max(m, a.value);
  return m;
}

Vector DiscreteDistribution::values() const {
  Vector v(size());
  for (Index i = 0; i < size(); ++i) v[i] = atoms[i].value;
  return v;
}

Vector DiscreteDistribution::weights() const {
  Vector w(size());
  for (Index i = 0; i < size(); ++i) w[i] = atoms[i].weight;
  return w;
}

DiscreteDistribution DiscreteDistribution::canonical(Scalar merge_tol) const {
  std::vector<Atom> sorted = atoms;
  std::sort(sorted.begin(), sorted.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  DiscreteDistribution out;
  for (const auto& a : sorted) {
    if (!out.atoms.empty() &&
        std::abs(out.atoms.back().value - a.value) <= merge_tol) {
      out.atoms.back().weight += a.weight;
    } else {
      out.atoms.push_back(a);
    }
  }
  return out;
}

std::vector<std::string> DiscreteDistribution::validate() const {
  std::vector<std::string> report;
  if (atoms.empty()) {
    report.push_back("distribution has no atoms");
    return report;
  }
  for (const auto& a : atoms) {
    if (!std::isfinite(a.value)) report.push_back("non-finite atom value");
    if (!(a.weight > 0) || a.weight > 1 + kProbTolLocal)
      report.push_back("atom weight " + std::to_string(a.weight) +
                       " outside (0,1]");
  }
  const Scalar mass = total_weight();
  if (std::abs(mass - 1.0) > kProbTolLocal)
    report.push_back("weight sum " + std::to_string(mass) + " != 1");
  return report;
}

bool approx_equal(const DiscreteDistribution& a, const DiscreteDistribution& b,
                  Scalar value_tol, Scalar weight_tol) {
  const DiscreteDistribution ca = a.canonical(value_tol);
  const DiscreteDistribution cb = b.canonical(value_tol);
  if (ca.size() != cb.size()) return false;
  for (Index i = 0; i < ca.size(); ++i) {
    if (std::abs(ca.atoms[i].value - cb.atoms[i].value) > value_tol)
      return false;
    if (std::abs(ca.atoms[i].weight - cb.atoms[i].weight) > weight_tol)
      return false;
  }
  return true;
}

}  // namespace aw
