#include <cmath>
#include <map>
#include <stdexcept>

#include "doctest.h"
#include "ghzsim/exact_ladder.hpp"
#include "ghzsim/measurement.hpp"
#include "ghzsim/noise.hpp"
#include "ghzsim/protocol.hpp"
#include "ghzsim/sparse_state.hpp"
#include "oracle_utils.hpp"

using namespace ghzsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

SparseState basis_state(int n_h, int n_v) {
  SparseState s(2);
  s.accumulate(OccupationKey{static_cast<uint8_t>(n_h), static_cast<uint8_t>(n_v)}, 1.0);
  return s;
}

// Pre-measurement state of one connection: pairs (1,2) and (3,4) plus the
// (2,3) link on a 4-ensemble register, no loss applied yet.
SparseState connection_state(double phi_left = 0.0, double phi_link = 0.0,
                             double phi_right = 0.0) {
  SparseState joint = mode_product(exact::pair_state(4, 1, 2, phi_left),
                                   exact::pair_state(4, 3, 4, phi_right));
  return mode_product(joint, exact::pair_state(4, 2, 3, phi_link));
}

}  // namespace

TEST_CASE("rotation matches the explicit two-photon table") {
  for (double theta : {0.0, kPi / 8.0, kPi / 4.0, 1.0}) {
    for (double phi : {0.0, 0.7}) {
      RotationSpec spec{theta, phi};
      for (int n_h = 0; n_h <= 2; ++n_h) {
        for (int n_v = 0; n_v + n_h <= 2; ++n_v) {
          SparseState got = rotate_ensemble(basis_state(n_h, n_v), 1, spec);
          auto want = oracle::rotation_table(n_h, n_v, theta, phi);
          CHECK(got.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
          for (const auto& [occ, amp] : want) {
            OccupationKey key{static_cast<uint8_t>(occ.first),
                              static_cast<uint8_t>(occ.second)};
            CHECK(std::abs(got.amplitude(key) - amp) < 1e-14);
          }
        }
      }
    }
  }
}

TEST_CASE("opposite rotations cancel") {
  SparseState psi = normalized(added(basis_state(1, 1), scaled(basis_state(2, 0), 0.5)));
  RotationSpec fwd{0.61, 0.35}, back{-0.61, 0.35};
  SparseState round = rotate_ensemble(rotate_ensemble(psi, 1, fwd), 1, back);
  CHECK(fidelity(pruned(round), psi) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two photons never split on a balanced rotation") {
  SparseState hv = basis_state(1, 1);
  SparseState out = rotate_ensemble(hv, 1, RotationSpec{});
  CHECK(std::abs(out.amplitude(OccupationKey{1, 1})) < 1e-12);
  // They bunch: |2,0> and |0,2> each with probability 1/2.
  CHECK(std::norm(out.amplitude(OccupationKey{2, 0})) == doctest::Approx(0.5));
  CHECK(std::norm(out.amplitude(OccupationKey{0, 2})) == doctest::Approx(0.5));
}

TEST_CASE("rotation beyond the cutoff is rejected") {
  SparseState s(2);
  s.accumulate(OccupationKey{2, 1}, 1.0);
  CHECK_THROWS_AS(rotate_ensemble(s, 1, RotationSpec{}), std::domain_error);
}

TEST_CASE("loss commutes with the balanced rotation") {
  SparseState psi = normalized(added(added(basis_state(1, 0), scaled(basis_state(0, 1), {0.3, 0.4})),
                                     scaled(basis_state(1, 1), {-0.2, 0.7})));
  for (double eta : {0.2, 1.0 / 3.0}) {
    for (double theta : {kPi / 4.0, kPi / 8.0}) {
      RotationSpec spec{theta, 0.0};
      BranchMixture damp_then_rot =
          rotate_ensemble(damp_mode_exact(damp_mode_exact(psi, mode_h(1), eta), mode_v(1), eta),
                          1, spec);
      BranchMixture rot_then_damp = damp_mode_exact(
          damp_mode_exact(BranchMixture::single(rotate_ensemble(psi, 1, spec)), mode_h(1), eta),
          mode_v(1), eta);
      oracle::DenseOp a = oracle::density_from_mixture(damp_then_rot, 2);
      oracle::DenseOp b = oracle::density_from_mixture(rot_then_damp, 2);
      CHECK(oracle::max_abs_diff(a, b) < 1e-12);
    }
  }
}

TEST_CASE("exact detection distribution on a single link") {
  // (h1 + v2)/sqrt(2), detect ensemble 1. Outcomes: one click with
  // probability (1-eta)/2 split evenly between detectors, else no click.
  double eta = 0.4;
  BranchMixture mix = BranchMixture::single(exact::pair_state(2, 1, 2, 0.0));
  auto outcomes = detect_ensemble_exact(mix, 1, eta, RotationSpec{});

  double total = 0.0;
  std::map<std::pair<int, int>, double> probs;
  for (const auto& o : outcomes) {
    total += o.probability;
    probs[{o.click.n_h, o.click.n_v}] += o.probability;
    CHECK(o.click.ensemble == 1);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(probs[{1, 0}] == doctest::Approx((1 - eta) / 4.0));
  CHECK(probs[{0, 1}] == doctest::Approx((1 - eta) / 4.0));
  CHECK(probs[{0, 0}] == doctest::Approx(0.5 + eta / 2.0));

  // The no-click posterior mixes the v2 component with true vacuum.
  for (const auto& o : outcomes) {
    if (o.click.n_h == 0 && o.click.n_v == 0) {
      double v2 = 0.0;
      for (const auto& b : o.posterior.branches())
        if (!occupies_none(b.state, {2})) v2 += b.weight;
      CHECK(v2 == doctest::Approx(0.5 / (0.5 + eta / 2.0)));
    }
  }
}

TEST_CASE("sampled detection follows the exact distribution") {
  double eta = 0.3;
  SparseState psi = connection_state();
  BranchMixture mix = BranchMixture::single(psi);
  auto outcomes = detect_ensemble_exact(mix, 2, eta, RotationSpec{});

  TrialRng rng(4242, 0);
  const int trials = 20000;
  std::map<std::pair<int, int>, uint64_t> counts;
  for (int i = 0; i < trials; ++i) {
    auto [click, after] = detect_ensemble_sample(psi, 2, eta, RotationSpec{}, rng);
    counts[{click.n_h, click.n_v}] += 1;
  }
  for (const auto& o : outcomes) {
    auto key = std::make_pair(o.click.n_h, o.click.n_v);
    if (o.probability < 1e-3) continue;
    CHECK(oracle::within_sigma(counts[key], trials, o.probability, 4.0));
  }
}

TEST_CASE("click outcome helpers") {
  ClickOutcome one_h{1, 1, 0};
  ClickOutcome one_v{1, 0, 1};
  ClickOutcome none{1, 0, 0};
  ClickOutcome both{1, 1, 1};
  CHECK(one_h.accepted());
  CHECK(one_h.bit() == 0);
  CHECK(one_v.accepted());
  CHECK(one_v.bit() == 1);
  CHECK_FALSE(none.accepted());
  CHECK_FALSE(both.accepted());
}

TEST_CASE("postselection acceptance matches the brute-force Kraus sum") {
  SparseState conn = connection_state(0.2, 0.9, 1.7);
  SparseState ring = ring_state(4, {0.1, 0.2, 0.3, 0.4});
  for (double eta : {0.0, 0.25, 0.5}) {
    PostselectResult res = postselect_single(conn, {2, 3}, eta);
    CHECK(res.acceptance ==
          doctest::Approx(oracle::postselect_acceptance(conn, {2, 3}, eta)).epsilon(1e-10));

    PostselectResult ring_res = postselect_single(ring, {1, 2, 3, 4}, eta);
    CHECK(ring_res.acceptance ==
          doctest::Approx(oracle::postselect_acceptance(ring, {1, 2, 3, 4}, eta)).epsilon(1e-10));
  }
}

TEST_CASE("postselection acceptance ignores the detection basis") {
  SparseState conn = connection_state();
  double eta = 0.3;
  double base = postselect_single(conn, {2, 3}, eta).acceptance;
  for (double theta : {0.0, kPi / 8.0, kPi / 4.0, kPi / 3.0}) {
    SparseState rotated = rotate_ensemble(rotate_ensemble(conn, 2, RotationSpec{theta, 0.0}), 3,
                                          RotationSpec{theta, 0.0});
    double acc = postselect_single(rotated, {2, 3}, eta).acceptance;
    CHECK(std::abs(acc - base) < 1e-10);
  }
}

TEST_CASE("postselection keeps the heralded photons coherent") {
  // Lossless connection at zero phases: posterior must be the 1..4 chain.
  PostselectResult res = postselect_single(connection_state(), {2, 3}, 0.0);
  CHECK(res.acceptance == doctest::Approx(0.25));
  REQUIRE(res.posterior.size() == 1);
  // Without loss the herald is a plain projector, so the posterior must be
  // the renormalized restriction of the input to single occupancy on 2, 3.
  SparseState conn = connection_state();
  SparseState want(8);
  for (const auto& [key, amp] : conn.terms()) {
    if (ensemble_occupation(key, 2) == 1 && ensemble_occupation(key, 3) == 1)
      want.accumulate(key, amp);
  }
  CHECK(mixture_fidelity(res.posterior, normalized(want)) == doctest::Approx(1.0).epsilon(1e-12));
}
