#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "zdlab/alliance.hpp"
#include "zdlab/error.hpp"
#include "zdlab/markov.hpp"
#include "support/oracles.hpp"

using namespace zdlab;

namespace {

constexpr Action C = Action::Cooperate;
constexpr Action D = Action::Defect;

struct Profile {
  std::vector<LeaderStrategy> leaders;
  std::vector<FollowerStrategy> followers;
};

Profile random_profile(const GameShape& shape, std::mt19937_64& rng, double lo = 0.05,
                       double hi = 0.95) {
  std::uniform_real_distribution<double> u(lo, hi);
  Profile p;
  for (int i = 0; i < shape.nL; ++i) {
    LeaderStrategy ls(i, shape.nL, shape.followers());
    for (Action s : {C, D})
      for (int x = 0; x < shape.nL; ++x)
        for (int y = 0; y <= shape.followers(); ++y) ls.set(s, x, y, u(rng));
    p.leaders.push_back(ls);
  }
  for (int j = shape.nL; j < shape.N; ++j) {
    std::vector<double> q(static_cast<std::size_t>(shape.nL + 1));
    for (double& x : q) x = u(rng);
    p.followers.emplace_back(j, q);
  }
  return p;
}

TransitionMatrix build(const GameShape& shape, const Profile& p,
                       Coupling c = Coupling::Independent) {
  return build_transition_matrix(shape, p.leaders, p.followers, c);
}

}  // namespace

TEST_CASE("worked-example entry from cdc to ddc") {
  const GameShape shape{3, 2, 2, 9};
  std::mt19937_64 rng(3);
  const auto p = random_profile(shape, rng);
  const auto M = build(shape, p);
  const double expected = (1 - p.leaders[0].prob(C, 0, 1)) * (1 - p.leaders[1].prob(D, 1, 1)) *
                          p.followers[0].prob(0);
  CHECK(M.entries(parse_state("cdc"), parse_state("ddc")) == doctest::Approx(expected));
}

TEST_CASE("uniform independent strategies give a uniform matrix") {
  const GameShape shape{3, 2, 1, 9};
  Profile p;
  p.leaders = {LeaderStrategy(0, 2, 1, 0.5), LeaderStrategy(1, 2, 1, 0.5)};
  p.followers = {FollowerStrategy(2, {0.5, 0.5, 0.5})};
  const auto M = build(shape, p);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) CHECK(M.entries(i, j) == doctest::Approx(0.125));
  const auto v = stationary(M);
  for (Eigen::Index i = 0; i < 8; ++i) CHECK(v.v(i) == doctest::Approx(0.125));
}

TEST_CASE("always-defect chain is absorbed in the all-defect state") {
  const GameShape shape{3, 2, 1, 9};
  Profile p;
  p.leaders = {LeaderStrategy(0, 2, 1, 0.0), LeaderStrategy(1, 2, 1, 0.0)};
  p.followers = {FollowerStrategy(2, {0.0, 0.0, 0.0})};
  const auto v = stationary(build(shape, p));
  CHECK(v.v(0) == doctest::Approx(1.0));
  CHECK(v.v.sum() == doctest::Approx(1.0));
}

TEST_CASE("rows are stochastic under both couplings") {
  std::mt19937_64 rng(5);
  for (int N = 2; N <= 6; ++N)
    for (int nL = 1; nL <= N; ++nL)
      for (int nA = 1; nA <= nL && nA < N; ++nA) {
        const GameShape shape{N, nL, nA, 2.0 * N};
        auto p = random_profile(shape, rng, 0.0, 1.0);
        for (int k = 1; k < nA; ++k) {
          LeaderStrategy copy(k, nL, shape.followers());
          for (Action s : {C, D})
            for (int x = 0; x < nL; ++x)
              for (int y = 0; y <= shape.followers(); ++y)
                copy.set(s, x, y, p.leaders[0].prob(s, x, y));
          p.leaders[static_cast<std::size_t>(k)] = copy;
        }
        for (Coupling c : {Coupling::Independent, Coupling::SharedDraw}) {
          const auto M = build(shape, p, c);
          CHECK(M.entries.minCoeff() >= 0.0);
          CHECK(M.entries.maxCoeff() <= 1.0);
          for (Eigen::Index r = 0; r < M.entries.rows(); ++r)
            CHECK(std::abs(M.entries.row(r).sum() - 1.0) <= 1e-12);
        }
      }
}

TEST_CASE("shared draw puts no mass on alliance-split successors") {
  const GameShape shape{4, 3, 3, 10};
  LeaderStrategy shared(0, 3, 1, 0.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (Action s : {C, D})
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y <= 1; ++y) shared.set(s, x, y, u(rng));
  Profile p;
  for (int k = 0; k < 3; ++k) {
    LeaderStrategy m(k, 3, 1);
    for (Action s : {C, D})
      for (int x = 0; x < 3; ++x)
        for (int y = 0; y <= 1; ++y) m.set(s, x, y, shared.prob(s, x, y));
    p.leaders.push_back(m);
  }
  p.followers = {FollowerStrategy(3, {0.2, 0.4, 0.6, 0.8})};
  const auto M = build(shape, p, Coupling::SharedDraw);
  for (State v = 0; v < 16; ++v) {
    if (!alliance_action(shape, v)) continue;
    for (State w = 0; w < 16; ++w)
      if (!alliance_action(shape, w)) CHECK(M.entries(v, w) == 0.0);
  }
  const auto st = stationary(M);
  double split = 0.0;
  for (State v = 0; v < 16; ++v)
    if (!alliance_action(shape, v)) split += st.v(v);
  CHECK(split <= 1e-12);

  const auto indep = build(shape, p, Coupling::Independent);
  CHECK(indep.entries(0, parse_state("cdcd")) > 0.0);
}

TEST_CASE("construction errors") {
  const GameShape shape{3, 2, 1, 9};
  const std::vector<LeaderStrategy> one_leader{LeaderStrategy(0, 2, 1, 0.5)};
  const std::vector<FollowerStrategy> follower{FollowerStrategy(2, {0.5, 0.5, 0.5})};
  CHECK_THROWS_AS(build_transition_matrix(shape, one_leader, follower, Coupling::Independent),
                  ConstructionError);
  const std::vector<LeaderStrategy> wrong_dims{LeaderStrategy(0, 2, 2, 0.5),
                                               LeaderStrategy(1, 2, 2, 0.5)};
  CHECK_THROWS_AS(build_transition_matrix(shape, wrong_dims, follower, Coupling::Independent),
                  ConstructionError);
  const std::vector<FollowerStrategy> short_follower{FollowerStrategy(2, {0.5, 0.5})};
  const std::vector<LeaderStrategy> leaders{LeaderStrategy(0, 2, 1, 0.5),
                                            LeaderStrategy(1, 2, 1, 0.5)};
  CHECK_THROWS_AS(
      build_transition_matrix(shape, leaders, short_follower, Coupling::Independent),
      ConstructionError);
  CHECK_THROWS_AS(FollowerStrategy(2, {0.5, 1.5}), ConstructionError);
  LeaderStrategy bad(0, 2, 1, 0.5);
  CHECK_THROWS_AS(bad.set(C, 2, 0, 0.5), ConstructionError);
  CHECK_THROWS_AS(build_transition_matrix(GameShape{11, 2, 1, 9}, leaders, follower,
                                          Coupling::Independent),
                  DomainError);
}

TEST_CASE("stationary agrees with the repeated-squaring oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int N = 2 + trial % 4;
    const GameShape shape{N, std::max(1, N - 1), 1, 2.0 * N};
    const auto M = build(shape, random_profile(shape, rng));
    const auto oracle = oracle::squaring_stationary(M.entries);
    StationaryOptions iterate_only;
    iterate_only.direct_max_states = 0;
    for (const auto& opts : {StationaryOptions{}, iterate_only}) {
      const auto v = stationary(M, opts);
      CHECK((v.v - oracle).lpNorm<Eigen::Infinity>() <= 1e-10);
      CHECK(v.residual <= 1e-12);
      CHECK(v.v.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(v.v.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("stationary is deterministic") {
  std::mt19937_64 rng(4);
  const GameShape shape{4, 2, 2, 9};
  const auto M = build(shape, random_profile(shape, rng));
  const auto a = stationary(M);
  const auto b = stationary(M);
  CHECK(a.v == b.v);
}

TEST_CASE("periodic chain falls back to the linear solve") {
  // Leader 0 flips its own action every round: period two.
  const GameShape shape{2, 2, 1, 5};
  LeaderStrategy a(0, 2, 0), b(1, 2, 0);
  for (int x = 0; x < 2; ++x) {
    a.set(C, x, 0, 0.0);
    a.set(D, x, 0, 1.0);
    b.set(C, x, 0, 0.3);
    b.set(D, x, 0, 0.6);
  }
  const std::vector<LeaderStrategy> leaders{a, b};
  const auto M = build_transition_matrix(shape, leaders, {}, Coupling::Independent);
  StationaryOptions opts;
  opts.direct_max_states = 0;
  opts.solve_after = 50;
  const auto v = stationary(M, opts);
  CHECK(v.residual <= 1e-12);
  CHECK(v.v(0) + v.v(2) == doctest::Approx(0.5));
}

TEST_CASE("non-convergence raises with the last residual") {
  std::mt19937_64 rng(9);
  const GameShape shape{3, 2, 1, 9};
  const auto M = build(shape, random_profile(shape, rng));
  StationaryOptions opts;
  opts.max_iters = 1;
  opts.direct_max_states = 0;
  try {
    (void)stationary(M, opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_residual() > 1e-12);
  }
}

TEST_CASE("determinant ratio equals v . f") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int N = 2; N <= 4; ++N)
    for (int trial = 0; trial < 40; ++trial) {
      const int nL = 1 + trial % N;
      const GameShape shape{N, nL, 1, 2.0 * N};
      const auto M = build(shape, random_profile(shape, rng));
      const auto v = stationary(M);
      std::vector<double> f(shape.state_count());
      for (double& x : f) x = u(rng);
      const int pivot = trial % nL;
      const auto det = zd_determinant(M, f, pivot);
      const double vf = v.v.dot(Eigen::Map<const Eigen::VectorXd>(f.data(), f.size()));
      CHECK(std::abs(det.ratio() - vf) <= 1e-8);
      const std::vector<double> ones(f.size(), 1.0);
      CHECK(zd_determinant(M, ones, pivot).ratio() == doctest::Approx(1.0));
    }
}

TEST_CASE("pivot column holds p - 1 where the pivot cooperated and p elsewhere") {
  std::mt19937_64 rng(17);
  const GameShape shape{3, 2, 1, 9};
  const auto p = random_profile(shape, rng);
  const auto M = build(shape, p);
  const std::vector<double> f(8, 1.0);
  const auto A = zd_matrix(M, f, 1);
  for (State v = 0; v < 8; ++v) {
    const Action s = cooperates(v, 1) ? C : D;
    const int x = cooperator_count(v, 0, 2) - bit(s);
    const int y = cooperator_count(v, 2, 3);
    const double expect = p.leaders[1].prob(s, x, y) - bit(s);
    CHECK(A(v, parse_state("dcd")) == doctest::Approx(expect));
  }
  CHECK_THROWS_AS(zd_matrix(M, f, 2), DomainError);
}

TEST_CASE("identity chain is degenerate") {
  const GameShape shape{2, 2, 1, 5};
  LeaderStrategy a(0, 2, 0), b(1, 2, 0);
  for (int x = 0; x < 2; ++x) {
    a.set(C, x, 0, 1.0);
    b.set(C, x, 0, 1.0);
  }
  const std::vector<LeaderStrategy> leaders{a, b};
  const auto M = build_transition_matrix(shape, leaders, {}, Coupling::Independent);
  const std::vector<double> f{1, 2, 3, 4};
  CHECK_THROWS_AS(zd_determinant(M, f, 0), DegeneracyError);
}

TEST_CASE("relabeling followers permutes the stationary vector") {
  std::mt19937_64 rng(29);
  const GameShape shape{4, 2, 1, 9};
  auto p = random_profile(shape, rng);
  const auto v = stationary(build(shape, p)).v;
  Profile swapped = p;
  swapped.followers = {FollowerStrategy(2, p.followers[1].probs()),
                       FollowerStrategy(3, p.followers[0].probs())};
  const auto w = stationary(build(shape, swapped)).v;
  for (State s = 0; s < 16; ++s) {
    const State b2 = (s >> 2) & 1u, b3 = (s >> 3) & 1u;
    const State t = (s & 3u) | (b3 << 2) | (b2 << 3);
    CHECK(v(s) == doctest::Approx(w(t)).epsilon(1e-10));
  }
}

TEST_CASE("expected payoffs") {
  const GameShape shape{3, 2, 2, 9};
  const auto g = payoff_vectors(shape);
  StationaryVector v;
  v.v = Eigen::VectorXd::Zero(8);
  v.v(7) = 1.0;
  auto e = expected_payoffs(shape, v, g);
  CHECK(e.alliance == doctest::Approx(9));
  CHECK(e.outsiders == doctest::Approx(9));
  v.v.setZero();
  v.v(0) = 1.0;
  e = expected_payoffs(shape, v, g);
  CHECK(e.alliance == doctest::Approx(1));
  CHECK(e.outsiders == doctest::Approx(1));
  v.v.setZero();
  for (const char* s : {"ccd", "ccc", "ddd", "ddc"}) v.v(parse_state(s)) = 0.25;
  e = expected_payoffs(shape, v, g);
  CHECK(e.alliance == doctest::Approx(5));
  CHECK(e.outsiders == doctest::Approx(5));
}

TEST_CASE("worked example chain under the synthesized strategy pins outsiders at 3") {
  const GameShape shape{3, 2, 2, 9};
  const auto g = payoff_vectors(shape);
  const auto res = synthesize({0.0, 3.0, 1.0 / 6.0, shape}, g);
  const std::vector<LeaderStrategy> leaders{res.member_strategy(0), res.member_strategy(1)};
  for (const std::vector<double>& q :
       {std::vector<double>{0.9, 0.5, 0.1}, std::vector<double>{1.0, 1.0, 1.0}}) {
    const std::vector<FollowerStrategy> followers{FollowerStrategy(2, q)};
    const auto M = build_transition_matrix(shape, leaders, followers, Coupling::SharedDraw);
    const auto v = stationary(M);
    const auto e = expected_payoffs(shape, v, g);
    CHECK(std::abs(e.outsiders - 3.0) <= 1e-8);
  }
  // The alliance payoff does depend on follower play; values from an
  // independent 4-state reduction of the chain.
  const std::pair<std::vector<double>, double> cases[] = {{{0.1, 0.5, 0.9}, 58.0 / 19.0},
                                                          {{0.9, 0.5, 0.1}, 42.0 / 11.0}};
  for (const auto& [q, piA] : cases) {
    const std::vector<FollowerStrategy> followers{FollowerStrategy(2, q)};
    const auto M = build_transition_matrix(shape, leaders, followers, Coupling::SharedDraw);
    const auto e = expected_payoffs(shape, stationary(M), g);
    CHECK(e.alliance == doctest::Approx(piA).epsilon(1e-10));
  }
}
