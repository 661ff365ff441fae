#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace zdlab {

enum class Action : std::uint8_t { Defect = 0, Cooperate = 1 };

inline constexpr int bit(Action a) noexcept { return a == Action::Cooperate ? 1 : 0; }

// r(n) = a * n^k + b, n being the number of players in one game.
struct PayoffScale {
  double a = 2.0;
  int k = 1;
  double b = 3.0;

  double operator()(int n) const;

  // Throws DomainError unless a >= 0 and k in {1, 2}.
  void validate() const;
  // True when r(n) > 1 for every n in [2, n_max].
  bool dilemma_for_all(int n_max) const;
};

// Static parameters of one sequential game. Players are 0-based: the
// alliance occupies [0, nA), the remaining leaders [nA, nL), followers
// [nL, N).
struct GameShape {
  int N = 2;
  int nL = 1;
  int nA = 1;
  double r = 2.0;

  // Throws DomainError when the counts are inconsistent.
  void validate() const;

  int outsiders() const noexcept { return N - nA; }
  int followers() const noexcept { return N - nL; }
  std::size_t state_count() const noexcept { return std::size_t{1} << N; }
};

// A state is the joint action of all N players; bit i is player i
// (1 = cooperate).
using State = std::uint32_t;

inline bool cooperates(State s, int player) noexcept { return (s >> player) & 1u; }
int cooperator_count(State s) noexcept;
// Cooperators among players [first, last).
int cooperator_count(State s, int first, int last) noexcept;
// Unison action of the alliance, or nullopt when its members disagree.
std::optional<Action> alliance_action(const GameShape& shape, State s) noexcept;
// "ccd"-style label, player 0 first.
std::string state_label(State s, int N);
State parse_state(const std::string& label);

// Single-player payoff for action `a` with `j` cooperating neighbors out of
// `neighbors`.
double utility(Action a, int j, int neighbors, double r);

bool is_social_dilemma(double r);

// Closed-form average payoffs on alliance-unison states: `s` is the alliance
// action and `b` the total cooperator count.
double alliance_unison_payoff(const GameShape& shape, Action s, int b);
double outsider_unison_payoff(const GameShape& shape, Action s, int b);

// State-indexed group averages of the per-player payoffs, defined on all
// 2^N states.
struct PayoffVectors {
  std::vector<double> alliance;
  std::vector<double> outsiders;
};

PayoffVectors payoff_vectors(const GameShape& shape);

}  // namespace zdlab
