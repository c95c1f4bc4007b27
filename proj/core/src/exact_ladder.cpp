#include "ghzsim/exact_ladder.hpp"

#include <cmath>
#include <stdexcept>

#include "ghzsim/errors.hpp"
#include "ghzsim/modes.hpp"

namespace ghzsim {
namespace exact {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct Block {
  int lo = 0;
  int hi = 0;
  BranchMixture mix;
};

BranchMixture product_with_link(const Block& a, const SparseState& link, const Block& b) {
  std::vector<Branch> raw;
  raw.reserve(a.mix.size() * b.mix.size());
  for (const auto& ba : a.mix.branches()) {
    SparseState left = mode_product(ba.state, link);
    for (const auto& bb : b.mix.branches())
      raw.push_back(Branch{ba.weight * bb.weight, mode_product(left, bb.state)});
  }
  return canonical_merged(std::move(raw));
}

}  // namespace

SparseState pair_state(int n_register, int i, int j, double phase) {
  SparseState state = vacuum(n_register);
  SparseState h_part = create(state, mode_h(i));
  SparseState v_part = create(state, mode_v(j));
  return added(scaled(h_part, 1.0 / std::sqrt(2.0)),
               scaled(v_part, std::polar(1.0 / std::sqrt(2.0), phase)));
}

SparseState chain_reference(int n_register, int lo, int hi, double phase) {
  SparseState h_part = vacuum(n_register);
  for (int e = lo; e < hi; ++e) h_part = create(h_part, mode_h(e));
  SparseState v_part = vacuum(n_register);
  for (int e = lo + 1; e <= hi; ++e) v_part = create(v_part, mode_v(e));
  return added(scaled(h_part, 1.0 / std::sqrt(2.0)),
               scaled(v_part, std::polar(1.0 / std::sqrt(2.0), phase)));
}

LadderResult run_ladder(int n, double eta, const std::vector<double>& link_phases,
                        bool include_closure) {
  if (!is_power_of_two(n) || n < 4)
    throw ConfigError("ring merging requires n a power of two with n >= 4");
  if (n > 16) throw GuardError("exact ladder is limited to n <= 16");
  if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("eta must lie in [0, 1)");
  if (link_phases.size() != static_cast<size_t>(n))
    throw std::invalid_argument("run_ladder: need one phase per link");

  LadderResult result;
  for (double phi : link_phases) result.total_phase += phi;

  std::vector<Block> blocks;
  for (int lo = 1; lo < n; lo += 2) {
    Block b;
    b.lo = lo;
    b.hi = lo + 1;
    b.mix = BranchMixture::single(pair_state(n, lo, lo + 1, link_phases[size_t(lo - 1)]));
    blocks.push_back(std::move(b));
  }

  int level = 0;
  while (blocks.size() > 1) {
    ++level;
    std::vector<Block> merged;
    for (size_t b = 0; b + 1 < blocks.size(); b += 2) {
      const Block& a = blocks[b];
      const Block& c = blocks[b + 1];
      int mid = a.hi;
      SparseState link = pair_state(n, mid, mid + 1, link_phases[size_t(mid - 1)]);
      BranchMixture joint = product_with_link(a, link, c);
      PostselectResult sel = postselect_single(joint, {mid, mid + 1}, eta);
      Block out;
      out.lo = a.lo;
      out.hi = c.hi;
      out.mix = sel.posterior;
      result.connections.push_back(ConnectionReport{
          level, a.lo, mid, c.hi, sel.acceptance,
          vacuum_weight(sel.posterior, {a.lo, c.hi})});
      merged.push_back(std::move(out));
    }
    blocks = std::move(merged);
  }

  if (!include_closure) {
    result.posterior = std::move(blocks.front().mix);
    return result;
  }

  SparseState closing = pair_state(n, n, 1, link_phases[size_t(n - 1)]);
  std::vector<Branch> raw;
  for (const auto& br : blocks.front().mix.branches())
    raw.push_back(Branch{br.weight, mode_product(br.state, closing)});
  PostselectResult sel = postselect_single(canonical_merged(std::move(raw)), {n, 1}, eta);
  result.posterior = sel.posterior;
  result.closed = true;
  result.closure_acceptance = sel.acceptance;
  result.ghz_fidelity = mixture_fidelity(result.posterior, ghz_reference(n, result.total_phase));
  return result;
}

StepOneResult step_one(double eta, double phi_left, double phi_link, double phi_right) {
  if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("eta must lie in [0, 1)");
  Block a{1, 2, BranchMixture::single(pair_state(4, 1, 2, phi_left))};
  Block b{3, 4, BranchMixture::single(pair_state(4, 3, 4, phi_right))};
  SparseState link = pair_state(4, 2, 3, phi_link);
  PostselectResult sel = postselect_single(product_with_link(a, link, b), {2, 3}, eta);
  StepOneResult out;
  out.acceptance = sel.acceptance;
  out.vacuum_weight = vacuum_weight(sel.posterior, {1, 4});
  out.posterior = sel.posterior;
  return out;
}

}  // namespace exact
}  // namespace ghzsim
