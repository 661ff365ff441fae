#include "zdlab/alliance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "zdlab/error.hpp"

namespace zdlab {
namespace {

void check_chi(double chi) {
  if (!(chi >= 0.0 && chi < 1.0)) throw DomainError("chi must lie in [0, 1)");
}

std::string describe(const UnisonEntry& e) {
  std::ostringstream os;
  os << "(alliance " << (e.s == Action::Cooperate ? 'c' : 'd') << ", b=" << e.b
     << ", f=" << e.f << ")";
  return os.str();
}

double unison_f(const GameShape& shape, Action s, int b, double chi, double l) {
  return chi * (alliance_unison_payoff(shape, s, b) - l) -
         (outsider_unison_payoff(shape, s, b) - l);
}

}  // namespace

LeaderStrategy SynthesisResult::member_strategy(int member) const {
  if (member < 0 || member >= shape.nA) throw DomainError("member index outside the alliance");
  LeaderStrategy out(member, strategy.leaders(), strategy.followers());
  for (int s = 0; s < 2; ++s)
    for (int x = 0; x < strategy.leaders(); ++x)
      for (int y = 0; y <= strategy.followers(); ++y) {
        const auto a = static_cast<Action>(s);
        out.set(a, x, y, strategy.prob(a, x, y));
      }
  return out;
}

Interval feasible_l_range(double chi, const GameShape& shape) {
  shape.validate();
  check_chi(chi);
  const double N = shape.N;
  const double out = shape.N - shape.nA;
  const double theta = shape.r * out * (1.0 - chi) - N;
  const double denom = N * out * (1.0 - chi);
  Interval range{-std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
  for (int b = 0; b <= shape.N - shape.nA; ++b)
    range.lo = std::max(range.lo, theta * b / denom + 1.0);
  for (int b = shape.nA; b <= shape.N; ++b)
    range.hi = std::min(range.hi, (theta * b + N * N) / denom);
  if (range.empty()) {
    std::ostringstream os;
    os << "empty baseline range [" << range.lo << ", " << range.hi
       << "]: alliance too small or r too small";
    throw InfeasibleError(os.str());
  }
  return range;
}

bool alliance_admissible(const GameShape& shape) {
  shape.validate();
  const double r = shape.r;
  const double N = shape.N;
  const double nA = shape.nA;
  // Strict on the right: at nA = (r-1)N/r the alliance pins a degenerate
  // range and, with one outsider, this is the r = N case that has no control.
  return (r - 1.0) / (2.0 * r) * N < nA && nA < (r - 1.0) / r * N;
}

SynthesisResult synthesize(const ZDParams& params, const PayoffVectors& g) {
  const GameShape& shape = params.shape;
  shape.validate();
  check_chi(params.chi);
  if (params.phi && *params.phi == 0.0) throw DomainError("phi must be nonzero");
  const std::size_t n_states = shape.state_count();
  if (g.alliance.size() != n_states || g.outsiders.size() != n_states)
    throw DomainError("synthesize: payoff vectors do not match the game");

  const double chi = params.chi;
  const double l = params.l;

  SynthesisResult res;
  res.chi = chi;
  res.l = l;
  res.shape = shape;
  res.f.resize(n_states);
  for (std::size_t v = 0; v < n_states; ++v)
    res.f[v] = chi * (g.alliance[v] - l) - (g.outsiders[v] - l);

  for (int b = shape.nA; b <= shape.N; ++b)
    res.unison.push_back({Action::Cooperate, b, unison_f(shape, Action::Cooperate, b, chi, l)});
  for (int b = 0; b <= shape.N - shape.nA; ++b)
    res.unison.push_back({Action::Defect, b, unison_f(shape, Action::Defect, b, chi, l)});

  // phi f must lie in [-1, 0] on cooperating states and in [0, 1] on
  // defecting ones. Values within round-off of zero constrain nothing.
  const double zero_tol = 1e-12 * std::max({1.0, std::abs(l), shape.r});
  const double inf = std::numeric_limits<double>::infinity();
  Interval pos{0.0, inf};
  Interval neg{-inf, 0.0};
  const UnisonEntry* pos_violation = nullptr;
  const UnisonEntry* neg_violation = nullptr;
  for (const auto& e : res.unison) {
    if (std::abs(e.f) <= zero_tol) continue;
    // Sign the phi f product must have on this state.
    const double want = e.s == Action::Cooperate ? -1.0 : 1.0;
    if (e.f * want > 0.0) {
      pos.hi = std::min(pos.hi, 1.0 / std::abs(e.f));
      if (!neg_violation) neg_violation = &e;
    } else {
      neg.lo = std::max(neg.lo, -1.0 / std::abs(e.f));
      if (!pos_violation) pos_violation = &e;
    }
  }
  if (pos_violation) pos = {1.0, 0.0};
  if (neg_violation) neg = {0.0, -1.0};
  // Every f entry vanished: any phi works, keep it at unit scale.
  if (!pos_violation && std::isinf(pos.hi)) pos.hi = 1.0;
  if (!neg_violation && std::isinf(neg.lo)) neg.lo = -1.0;

  if (pos.empty() && neg.empty()) {
    std::ostringstream os;
    os << "no feasible phi for chi=" << chi << ", l=" << l << ": state "
       << describe(*pos_violation) << " rules out phi > 0 and state "
       << describe(*neg_violation) << " rules out phi < 0";
    throw InfeasibleError(os.str());
  }
  res.phi_interval = (neg.empty() || (!pos.empty() && pos.width() >= neg.width())) ? pos : neg;

  if (params.phi) {
    const double phi = *params.phi;
    const bool inside = (phi > 0.0 && !pos.empty() && phi <= pos.hi + 1e-15) ||
                        (phi < 0.0 && !neg.empty() && phi >= neg.lo - 1e-15);
    if (!inside) {
      std::ostringstream os;
      os << "phi=" << phi << " outside the feasible set";
      throw InfeasibleError(os.str());
    }
    if (phi < 0.0) res.phi_interval = neg;
    if (phi > 0.0) res.phi_interval = pos;
    res.phi = phi;
  } else {
    res.phi = res.phi_interval.midpoint();
  }

  for (auto& e : res.unison)
    e.p = std::clamp(res.phi * e.f + (e.s == Action::Cooperate ? 1.0 : 0.0), 0.0, 1.0);

  // Table over the member's own view (s, x, y). Combinations that cannot
  // arise while the alliance moves in unison stay at 0.
  const int nL = shape.nL;
  const int nF = shape.followers();
  res.strategy = LeaderStrategy(0, nL, nF, 0.0);
  for (int s = 0; s < 2; ++s) {
    const auto a = static_cast<Action>(s);
    for (int x = 0; x < nL; ++x) {
      const int other_leaders = a == Action::Cooperate ? x - (shape.nA - 1) : x;
      if (other_leaders < 0 || other_leaders > nL - shape.nA) continue;
      for (int y = 0; y <= nF; ++y) {
        const int b = s + x + y;
        const auto it = std::find_if(res.unison.begin(), res.unison.end(),
                                     [&](const UnisonEntry& e) { return e.s == a && e.b == b; });
        res.strategy.set(a, x, y, it->p);
      }
    }
  }

  res.certificate =
      verify_enforcement(res, uniform_outsiders(shape, 0.5), chi, l).residual;
  return res;
}

OutsiderProfile uniform_outsiders(const GameShape& shape, double p) {
  shape.validate();
  OutsiderProfile prof;
  for (int i = shape.nA; i < shape.nL; ++i)
    prof.leaders.emplace_back(i, shape.nL, shape.followers(), p);
  for (int j = shape.nL; j < shape.N; ++j)
    prof.followers.emplace_back(j, std::vector<double>(static_cast<std::size_t>(shape.nL) + 1, p));
  return prof;
}

EnforcementReport verify_enforcement(const SynthesisResult& result,
                                     const OutsiderProfile& outsiders, double chi, double l) {
  const GameShape& shape = result.shape;
  std::vector<LeaderStrategy> leaders;
  leaders.reserve(static_cast<std::size_t>(shape.nL));
  for (int k = 0; k < shape.nA; ++k) leaders.push_back(result.member_strategy(k));
  for (const auto& ls : outsiders.leaders) {
    if (ls.owner() < shape.nA)
      throw ConstructionError("outsider strategy assigned to an alliance member");
    leaders.push_back(ls);
  }
  const TransitionMatrix M =
      build_transition_matrix(shape, leaders, outsiders.followers, Coupling::SharedDraw);
  const StationaryVector v = stationary(M);
  const ExpectedPayoffs pi = expected_payoffs(shape, v, payoff_vectors(shape));

  EnforcementReport rep;
  rep.pi_alliance = pi.alliance;
  rep.pi_outsiders = pi.outsiders;
  rep.residual = std::abs(pi.outsiders - chi * pi.alliance - (1.0 - chi) * l);
  rep.stationary_residual = v.residual;
  for (State s = 0; s < shape.state_count(); ++s)
    if (!alliance_action(shape, s)) rep.split_mass += v.v(static_cast<Eigen::Index>(s));
  return rep;
}

IncentiveMenu incentive_menu(int nA, double r) {
  if (nA < 1) throw DomainError("incentive menu: alliance size must be >= 1");
  const int N = nA + 1;
  if (!(r > N))
    throw InfeasibleError("incentive menu: r=" + std::to_string(r) + " <= N=" +
                          std::to_string(N) + ", alliance lacks control power");
  return {r * nA / N + 1.0, r * (N - nA) / N};
}

bool dominance_check(const GameShape& shape) {
  shape.validate();
  if (shape.outsiders() != 1) throw DomainError("dominance check needs exactly one outsider");
  for (int a = 0; a <= 1; ++a) {
    const int b_coop = shape.nA + a;
    const int b_defect = a;
    const double coop = alliance_unison_payoff(shape, Action::Cooperate, b_coop);
    const double defect = alliance_unison_payoff(shape, Action::Defect, b_defect);
    if (!(coop > defect)) return false;
  }
  return true;
}

}  // namespace zdlab
