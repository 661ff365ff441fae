#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "zdlab/game.hpp"

namespace zdlab {

// Leader strategy: probability of cooperating given the leader's own previous
// action s, the number x of other leaders that cooperated, and the number y of
// cooperating followers in the previous round.
class LeaderStrategy {
 public:
  LeaderStrategy() = default;
  LeaderStrategy(int owner, int leaders, int followers, double fill = 0.0);

  int owner() const noexcept { return owner_; }
  int leaders() const noexcept { return leaders_; }
  int followers() const noexcept { return followers_; }

  double prob(Action s, int x, int y) const;
  void set(Action s, int x, int y, double p);

  // Throws ConstructionError if any entry leaves [0, 1].
  void validate() const;

  const std::vector<double>& table() const noexcept { return probs_; }

 private:
  std::size_t index(Action s, int x, int y) const;

  int owner_ = 0;
  int leaders_ = 1;
  int followers_ = 0;
  std::vector<double> probs_;
};

// Follower strategy: probability of cooperating given z cooperating leaders
// in the current round, z in [0, nL].
class FollowerStrategy {
 public:
  FollowerStrategy() = default;
  FollowerStrategy(int owner, std::vector<double> probs);

  int owner() const noexcept { return owner_; }
  double prob(int z) const { return probs_.at(static_cast<std::size_t>(z)); }
  const std::vector<double>& probs() const noexcept { return probs_; }

 private:
  int owner_ = 0;
  std::vector<double> probs_;
};

enum class Coupling {
  Independent,
  // Alliance members share one uniform draw per round: member k cooperates
  // iff U < p_k, so members with equal probabilities always act in unison.
  SharedDraw,
};

struct TransitionMatrix {
  Eigen::MatrixXd entries;
  GameShape shape;
};

// Default state-space cap; matrices have side 2^N.
inline constexpr int kMaxPlayers = 10;
inline constexpr int kMaxDeterminantPlayers = 8;

TransitionMatrix build_transition_matrix(const GameShape& shape,
                                         std::span<const LeaderStrategy> leaders,
                                         std::span<const FollowerStrategy> followers,
                                         Coupling coupling,
                                         int max_players = kMaxPlayers);

struct StationaryVector {
  Eigen::VectorXd v;
  double residual = 0.0;  // ||v^T M - v^T||_inf
  long iterations = 0;
  bool used_linear_solve = false;
};

struct StationaryOptions {
  double tol = 1e-12;
  long max_iters = 1'000'000;
  // Power iterations before the dense solve is attempted.
  long solve_after = 2'000;
  // Chains up to this many states try the dense solve before iterating. It
  // leaves transient states at exact zero, where power iteration only decays
  // them geometrically.
  long direct_max_states = 256;
};

StationaryVector stationary(const TransitionMatrix& M, const StationaryOptions& opts = {});

double stationary_residual(const TransitionMatrix& M, const Eigen::VectorXd& v);

// det of (M - I) after its all-defect column is replaced by f and the
// column of the state where only `pivot_leader` cooperates is replaced by
// the sum of every column in which that leader cooperates. The normalizer is
// the same determinant with f = 1, so value / normalizer = v . f.
struct ZdDeterminant {
  double value = 0.0;
  double normalizer = 0.0;
  double ratio() const noexcept { return value / normalizer; }
};

ZdDeterminant zd_determinant(const TransitionMatrix& M, std::span<const double> f,
                             int pivot_leader);

// The transformed matrix itself, exposed so the pivot column can be
// inspected.
Eigen::MatrixXd zd_matrix(const TransitionMatrix& M, std::span<const double> f,
                          int pivot_leader);

struct ExpectedPayoffs {
  double alliance = 0.0;
  double outsiders = 0.0;
};

ExpectedPayoffs expected_payoffs(const GameShape& shape, const StationaryVector& v,
                                 const PayoffVectors& g);

}  // namespace zdlab
