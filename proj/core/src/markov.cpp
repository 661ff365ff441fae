#include "zdlab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zdlab/error.hpp"

namespace zdlab {

LeaderStrategy::LeaderStrategy(int owner, int leaders, int followers, double fill)
    : owner_(owner), leaders_(leaders), followers_(followers) {
  if (leaders < 1 || followers < 0 || owner < 0 || owner >= leaders)
    throw ConstructionError("leader strategy: inconsistent dimensions");
  probs_.assign(static_cast<std::size_t>(2 * leaders * (followers + 1)), fill);
}

std::size_t LeaderStrategy::index(Action s, int x, int y) const {
  if (x < 0 || x >= leaders_ || y < 0 || y > followers_)
    throw ConstructionError("leader strategy: no entry for (x=" + std::to_string(x) +
                            ", y=" + std::to_string(y) + ")");
  return static_cast<std::size_t>((bit(s) * leaders_ + x) * (followers_ + 1) + y);
}

double LeaderStrategy::prob(Action s, int x, int y) const { return probs_[index(s, x, y)]; }

void LeaderStrategy::set(Action s, int x, int y, double p) { probs_[index(s, x, y)] = p; }

void LeaderStrategy::validate() const {
  for (double p : probs_)
    if (!(p >= 0.0 && p <= 1.0))
      throw ConstructionError("leader strategy " + std::to_string(owner_) +
                              ": probability outside [0, 1]");
}

FollowerStrategy::FollowerStrategy(int owner, std::vector<double> probs)
    : owner_(owner), probs_(std::move(probs)) {
  if (probs_.empty()) throw ConstructionError("follower strategy: empty table");
  for (double p : probs_)
    if (!(p >= 0.0 && p <= 1.0))
      throw ConstructionError("follower strategy " + std::to_string(owner_) +
                              ": probability outside [0, 1]");
}

namespace {

// Probability that the alliance realizes the cooperating set encoded by
// `mask` when members share one uniform draw.
double shared_draw_probability(std::span<const double> p, State mask) {
  double lo = 1.0;  // min over cooperators
  double hi = 0.0;  // max over defectors
  for (std::size_t k = 0; k < p.size(); ++k) {
    if ((mask >> k) & 1u)
      lo = std::min(lo, p[k]);
    else
      hi = std::max(hi, p[k]);
  }
  return std::max(0.0, lo - hi);
}

}  // namespace

TransitionMatrix build_transition_matrix(const GameShape& shape,
                                         std::span<const LeaderStrategy> leaders,
                                         std::span<const FollowerStrategy> followers,
                                         Coupling coupling, int max_players) {
  shape.validate();
  if (shape.N > max_players)
    throw DomainError("transition matrix: N exceeds the state-space cap of " +
                      std::to_string(max_players));
  const int nL = shape.nL;
  const int nF = shape.followers();

  std::vector<const LeaderStrategy*> lead(static_cast<std::size_t>(nL), nullptr);
  for (const auto& ls : leaders) {
    if (ls.owner() < 0 || ls.owner() >= nL)
      throw ConstructionError("leader strategy owner out of range");
    if (ls.leaders() != nL || ls.followers() != nF)
      throw ConstructionError("leader strategy " + std::to_string(ls.owner()) +
                              ": table dimensions do not match the game");
    ls.validate();
    lead[static_cast<std::size_t>(ls.owner())] = &ls;
  }
  std::vector<const FollowerStrategy*> foll(static_cast<std::size_t>(nF), nullptr);
  for (const auto& fs : followers) {
    if (fs.owner() < nL || fs.owner() >= shape.N)
      throw ConstructionError("follower strategy owner out of range");
    if (static_cast<int>(fs.probs().size()) != nL + 1)
      throw ConstructionError("follower strategy " + std::to_string(fs.owner()) +
                              ": needs nL + 1 entries");
    foll[static_cast<std::size_t>(fs.owner() - nL)] = &fs;
  }
  for (int i = 0; i < nL; ++i)
    if (!lead[static_cast<std::size_t>(i)])
      throw ConstructionError("missing strategy for leader " + std::to_string(i));
  for (int j = 0; j < nF; ++j)
    if (!foll[static_cast<std::size_t>(j)])
      throw ConstructionError("missing strategy for follower " + std::to_string(nL + j));

  const std::size_t n_states = shape.state_count();
  const State leader_profiles = State{1} << nL;
  const bool shared = coupling == Coupling::SharedDraw && shape.nA > 1;
  const State alliance_mask = (State{1} << shape.nA) - 1u;

  TransitionMatrix M{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_states),
                                           static_cast<Eigen::Index>(n_states)),
                     shape};
  std::vector<double> p(static_cast<std::size_t>(nL));
  std::vector<double> leader_prob(leader_profiles);

  for (State v = 0; v < n_states; ++v) {
    const int leader_coops = cooperator_count(v, 0, nL);
    const int y = cooperator_count(v, nL, shape.N);
    for (int i = 0; i < nL; ++i) {
      const Action s = cooperates(v, i) ? Action::Cooperate : Action::Defect;
      p[static_cast<std::size_t>(i)] =
          lead[static_cast<std::size_t>(i)]->prob(s, leader_coops - bit(s), y);
    }
    for (State L = 0; L < leader_profiles; ++L) {
      double prob = 1.0;
      int first_independent = 0;
      if (shared) {
        prob = shared_draw_probability(std::span(p).first(static_cast<std::size_t>(shape.nA)),
                                       L & alliance_mask);
        first_independent = shape.nA;
      }
      for (int i = first_independent; i < nL && prob > 0.0; ++i)
        prob *= cooperates(L, i) ? p[static_cast<std::size_t>(i)]
                                 : 1.0 - p[static_cast<std::size_t>(i)];
      leader_prob[L] = prob;
    }
    for (State w = 0; w < n_states; ++w) {
      const State L = w & (leader_profiles - 1u);
      double prob = leader_prob[L];
      if (prob == 0.0) continue;
      const int z = cooperator_count(L);
      for (int j = 0; j < nF && prob > 0.0; ++j) {
        const double q = foll[static_cast<std::size_t>(j)]->prob(z);
        prob *= cooperates(w, nL + j) ? q : 1.0 - q;
      }
      M.entries(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) = prob;
    }
  }
  return M;
}

double stationary_residual(const TransitionMatrix& M, const Eigen::VectorXd& v) {
  return (M.entries.transpose() * v - v).lpNorm<Eigen::Infinity>();
}

namespace {

// Solves v^T (M - I) = 0 with sum(v) = 1 by replacing one balance equation
// with the normalization. Returns false when the system is singular.
bool solve_stationary(const Eigen::MatrixXd& P, Eigen::VectorXd& out) {
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) return false;
  out = lu.solve(rhs);
  // Round-off can leave tiny negatives on transient states.
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out(i) < -1e-10) return false;
    out(i) = std::max(0.0, out(i));
  }
  out /= out.sum();
  return true;
}

}  // namespace

StationaryVector stationary(const TransitionMatrix& M, const StationaryOptions& opts) {
  const Eigen::Index n = M.entries.rows();
  if (n == 0 || M.entries.cols() != n) throw DomainError("stationary: matrix must be square");
  const Eigen::MatrixXd Pt = M.entries.transpose();

  StationaryVector out;
  if (n <= opts.direct_max_states) {
    Eigen::VectorXd solved;
    if (solve_stationary(M.entries, solved)) {
      const double r = stationary_residual(M, solved);
      if (r <= opts.tol) {
        out.v = std::move(solved);
        out.residual = r;
        out.used_linear_solve = true;
        return out;
      }
    }
  }
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd next(n);
  double residual = 1.0;
  bool tried_solve = false;
  bool lazy = false;

  for (long it = 1; it <= opts.max_iters; ++it) {
    next.noalias() = Pt * v;
    residual = (next - v).lpNorm<Eigen::Infinity>();
    if (lazy) next = 0.5 * (next + v);
    v = next / next.sum();
    out.iterations = it;
    if (residual <= opts.tol) {
      residual = stationary_residual(M, v);
      if (residual <= opts.tol) break;
    }
    if (!tried_solve && it >= opts.solve_after) {
      tried_solve = true;
      Eigen::VectorXd solved;
      if (solve_stationary(M.entries, solved)) {
        const double r = stationary_residual(M, solved);
        if (r <= opts.tol) {
          out.v = std::move(solved);
          out.residual = r;
          out.used_linear_solve = true;
          return out;
        }
      }
      // Periodic or multi-class chains: averaging with the identity removes
      // periodicity without changing the stationary set.
      lazy = true;
    }
  }
  residual = stationary_residual(M, v);
  if (residual > opts.tol)
    throw ConvergenceError("stationary: no convergence after " +
                               std::to_string(out.iterations) + " iterations (residual " +
                               std::to_string(residual) + ")",
                           residual);
  out.v = std::move(v);
  out.residual = residual;
  return out;
}

Eigen::MatrixXd zd_matrix(const TransitionMatrix& M, std::span<const double> f,
                          int pivot_leader) {
  const GameShape& shape = M.shape;
  if (shape.N > kMaxDeterminantPlayers)
    throw DomainError("zd_determinant: N exceeds the determinant cap of " +
                      std::to_string(kMaxDeterminantPlayers));
  if (pivot_leader < 0 || pivot_leader >= shape.nL)
    throw DomainError("zd_determinant: pivot must be a leader index");
  const Eigen::Index n = M.entries.rows();
  if (static_cast<Eigen::Index>(f.size()) != n)
    throw DomainError("zd_determinant: f must have one entry per state");

  Eigen::MatrixXd A = M.entries - Eigen::MatrixXd::Identity(n, n);
  // Lowest-index state where the pivot is the only cooperating leader: every
  // other player defects.
  const State pivot_state = State{1} << pivot_leader;
  Eigen::VectorXd column = Eigen::VectorXd::Zero(n);
  for (State w = 0; w < static_cast<State>(n); ++w)
    if (cooperates(w, pivot_leader)) column += A.col(static_cast<Eigen::Index>(w));
  A.col(static_cast<Eigen::Index>(pivot_state)) = column;
  // The all-defect state never has the pivot cooperating, so replacing its
  // column does not interfere with the transformation above.
  for (Eigen::Index v = 0; v < n; ++v) A(v, 0) = f[static_cast<std::size_t>(v)];
  return A;
}

ZdDeterminant zd_determinant(const TransitionMatrix& M, std::span<const double> f,
                             int pivot_leader) {
  Eigen::MatrixXd A = zd_matrix(M, f, pivot_leader);
  ZdDeterminant out;
  out.value = A.partialPivLu().determinant();
  A.col(0).setOnes();
  out.normalizer = A.partialPivLu().determinant();
  if (std::abs(out.normalizer) < 1e-12)
    throw DegeneracyError("zd_determinant: normalizer below 1e-12; chain is not irreducible");
  return out;
}

ExpectedPayoffs expected_payoffs(const GameShape& shape, const StationaryVector& v,
                                 const PayoffVectors& g) {
  const auto n = static_cast<Eigen::Index>(shape.state_count());
  if (v.v.size() != n || static_cast<Eigen::Index>(g.alliance.size()) != n ||
      static_cast<Eigen::Index>(g.outsiders.size()) != n)
    throw DomainError("expected_payoffs: vector lengths do not match the game");
  ExpectedPayoffs out;
  for (Eigen::Index s = 0; s < n; ++s) {
    out.alliance += v.v(s) * g.alliance[static_cast<std::size_t>(s)];
    out.outsiders += v.v(s) * g.outsiders[static_cast<std::size_t>(s)];
  }
  return out;
}

}  // namespace zdlab
