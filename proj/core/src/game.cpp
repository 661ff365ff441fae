#include "zdlab/game.hpp"

#include <bit>
#include <cmath>

#include "zdlab/error.hpp"

namespace zdlab {

double PayoffScale::operator()(int n) const {
  const double nn = static_cast<double>(n);
  return a * (k == 2 ? nn * nn : nn) + b;
}

void PayoffScale::validate() const {
  if (!(a >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("payoff scale: coefficient a must be finite and >= 0");
  if (k != 1 && k != 2) throw DomainError("payoff scale: exponent k must be 1 or 2");
}

bool PayoffScale::dilemma_for_all(int n_max) const {
  // a >= 0 makes r nondecreasing in n, so n = 2 is the binding case; the
  // loop keeps this honest if that ever changes.
  for (int n = 2; n <= n_max; ++n)
    if (!is_social_dilemma((*this)(n))) return false;
  return true;
}

void GameShape::validate() const {
  if (N < 2) throw DomainError("game shape: N must be >= 2");
  if (N > 30) throw DomainError("game shape: N too large for state indexing");
  if (nL < 1 || nL > N) throw DomainError("game shape: need 1 <= nL <= N");
  if (nA < 1 || nA > nL) throw DomainError("game shape: need 1 <= nA <= nL");
  if (N - nA < 1) throw DomainError("game shape: at least one outsider is required");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("game shape: r must be positive");
}

int cooperator_count(State s) noexcept { return std::popcount(s); }

int cooperator_count(State s, int first, int last) noexcept {
  if (last <= first) return 0;
  const State mask = ((State{1} << (last - first)) - 1u) << first;
  return std::popcount(s & mask);
}

std::optional<Action> alliance_action(const GameShape& shape, State s) noexcept {
  const int c = cooperator_count(s, 0, shape.nA);
  if (c == shape.nA) return Action::Cooperate;
  if (c == 0) return Action::Defect;
  return std::nullopt;
}

std::string state_label(State s, int N) {
  std::string out(static_cast<std::size_t>(N), 'd');
  for (int i = 0; i < N; ++i)
    if (cooperates(s, i)) out[static_cast<std::size_t>(i)] = 'c';
  return out;
}

State parse_state(const std::string& label) {
  if (label.empty() || label.size() > 30) throw DomainError("state label: bad length");
  State s = 0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label[i] == 'c')
      s |= State{1} << i;
    else if (label[i] != 'd')
      throw DomainError("state label: expected only 'c' and 'd'");
  }
  return s;
}

double utility(Action a, int j, int neighbors, double r) {
  if (neighbors < 1) throw DomainError("utility: neighbor count must be >= 1");
  if (j < 0 || j > neighbors) throw DomainError("utility: cooperating neighbors out of range");
  const int ai = bit(a);
  return r * static_cast<double>(j + ai) / static_cast<double>(neighbors + 1) +
         static_cast<double>(1 - ai);
}

bool is_social_dilemma(double r) { return r > 1.0; }

double alliance_unison_payoff(const GameShape& shape, Action s, int b) {
  const double base = shape.r * b / shape.N;
  if (s == Action::Cooperate) {
    if (b < shape.nA || b > shape.N) throw DomainError("alliance payoff: b out of range");
    return base;
  }
  if (b < 0 || b > shape.N - shape.nA) throw DomainError("alliance payoff: b out of range");
  return base + 1.0;
}

double outsider_unison_payoff(const GameShape& shape, Action s, int b) {
  const double base = shape.r * b / shape.N;
  const double out = shape.N - shape.nA;
  if (s == Action::Cooperate) {
    if (b < shape.nA || b > shape.N) throw DomainError("outsider payoff: b out of range");
    return ((b - shape.nA) * base + (shape.N - b) * (base + 1.0)) / out;
  }
  if (b < 0 || b > shape.N - shape.nA) throw DomainError("outsider payoff: b out of range");
  return (b * base + (shape.N - shape.nA - b) * (base + 1.0)) / out;
}

PayoffVectors payoff_vectors(const GameShape& shape) {
  shape.validate();
  const std::size_t n_states = shape.state_count();
  PayoffVectors g;
  g.alliance.resize(n_states);
  g.outsiders.resize(n_states);
  const int others = shape.N - 1;
  for (State s = 0; s < n_states; ++s) {
    const int b = cooperator_count(s);
    double sum_a = 0.0, sum_o = 0.0;
    for (int i = 0; i < shape.N; ++i) {
      const Action ai = cooperates(s, i) ? Action::Cooperate : Action::Defect;
      const double u = utility(ai, b - bit(ai), others, shape.r);
      (i < shape.nA ? sum_a : sum_o) += u;
    }
    g.alliance[s] = sum_a / shape.nA;
    g.outsiders[s] = sum_o / shape.outsiders();
  }
  return g;
}

}  // namespace zdlab
