#pragma once

#include <optional>
#include <span>
#include <vector>

#include "zdlab/game.hpp"
#include "zdlab/markov.hpp"

namespace zdlab {

// Parameters of the enforced relation pi_out = chi * pi_alliance + (1 - chi) * l.
struct ZDParams {
  double chi = 0.0;
  double l = 0.0;
  // Scaling of the strategy; the midpoint of the feasible interval when unset.
  std::optional<double> phi;
  GameShape shape;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const noexcept { return lo > hi; }
  double width() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return 0.5 * (lo + hi); }
};

// One alliance-unison outcome: alliance action s with b cooperators overall.
struct UnisonEntry {
  Action s = Action::Defect;
  int b = 0;
  double f = 0.0;
  double p = 0.0;  // cooperation probability of every alliance member
};

struct SynthesisResult {
  LeaderStrategy strategy;  // shared by every alliance member (owner 0)
  std::vector<double> f;    // chi (gA - l) - (gOut - l), all 2^N states
  std::vector<UnisonEntry> unison;
  // Feasible phi values; lo is exclusive when it equals 0.
  Interval phi_interval;
  double phi = 0.0;
  double chi = 0.0;
  double l = 0.0;
  GameShape shape;
  // |pi_out - chi pi_A - (1 - chi) l| against outsiders that cooperate with
  // probability 1/2 everywhere.
  double certificate = 0.0;

  // Copy of the shared strategy re-owned by alliance member `member`.
  LeaderStrategy member_strategy(int member) const;
};

// Range of baselines l for which some nonzero phi keeps every unison-state
// probability in [0, 1]. Throws InfeasibleError when the range is empty.
Interval feasible_l_range(double chi, const GameShape& shape);

// (r-1) N / (2r) < nA < (r-1) N / r; with one outsider this is r > N.
bool alliance_admissible(const GameShape& shape);

SynthesisResult synthesize(const ZDParams& params, const PayoffVectors& g);

// Outsider play: strategies for every non-alliance leader and every follower.
struct OutsiderProfile {
  std::vector<LeaderStrategy> leaders;
  std::vector<FollowerStrategy> followers;
};

// Every outsider cooperates with probability `p` in every situation.
OutsiderProfile uniform_outsiders(const GameShape& shape, double p);

struct EnforcementReport {
  double pi_alliance = 0.0;
  double pi_outsiders = 0.0;
  double residual = 0.0;
  double split_mass = 0.0;  // stationary mass on alliance-split states
  double stationary_residual = 0.0;
};

EnforcementReport verify_enforcement(const SynthesisResult& result,
                                     const OutsiderProfile& outsiders, double chi, double l);

// Reward for an outsider that cooperates, punishment for one that defects, in
// a game of nA alliance members and a single outsider.
struct IncentiveMenu {
  double cooperate = 0.0;
  double defect = 0.0;
};

IncentiveMenu incentive_menu(int nA, double r);

// Whether cooperation dominates defection for the alliance against both
// outsider actions. Requires exactly one outsider.
bool dominance_check(const GameShape& shape);

}  // namespace zdlab
