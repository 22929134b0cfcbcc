#include "pcn/feasibility.hpp"

#include <stdexcept>

#include "pcn/flow.hpp"

namespace pcn {

CutInterval cut_interval(const ChannelGraph& g, const std::vector<bool>& s) {
  if (s.size() != g.node_count()) throw std::invalid_argument("cut membership has wrong length");
  std::size_t inside = 0;
  for (bool b : s) inside += b ? 1 : 0;
  if (inside == 0 || inside == g.node_count()) throw std::invalid_argument("cut must be a nonempty proper subset");
  CutInterval out;
  Coins crossing = 0;
  for (const auto& c : g.channels()) {
    std::size_t in = 0;
    for (auto v : c.endpoints) in += s[v] ? 1 : 0;
    if (in == c.endpoints.size()) {
      out.lo += c.capacity;
    } else if (in > 0) {
      crossing += c.capacity;
    }
  }
  out.hi = out.lo + crossing;
  return out;
}

FeasibilityResult is_feasible(const ChannelGraph& g, const WealthVector& omega) {
  if (omega.size() != g.node_count()) throw std::invalid_argument("wealth vector has wrong length");
  if (omega.total() != g.total_capacity()) {
    throw std::invalid_argument("wealth total " + std::to_string(omega.total()) + " differs from capacity " +
                                std::to_string(g.total_capacity()));
  }
  // Nodes 0..n-1 are peers, n..n+m-1 are channels.
  const auto n = g.node_count();
  const auto m = g.channel_count();
  flow::FlowNetwork net;
  net.node_count = n + m;
  net.supply.assign(n + m, 0);
  std::vector<std::vector<std::size_t>> member_arc(m);
  for (std::size_t e = 0; e < m; ++e) {
    const auto& c = g.channel(e);
    net.supply[n + e] = c.capacity;
    for (auto v : c.endpoints) member_arc[e].push_back(net.add_arc(n + e, v, c.capacity));
  }
  for (NodeIndex v = 0; v < n; ++v) net.supply[v] = -omega[v];

  auto res = flow::feasible_transshipment(net);
  FeasibilityResult out;
  out.feasible = res.feasible;
  if (res.feasible) {
    std::vector<std::vector<Coins>> values(m);
    for (std::size_t e = 0; e < m; ++e) {
      for (auto a : member_arc[e]) values[e].push_back(res.flow[a]);
    }
    out.witness = LiquidityState(g, std::move(values));
  } else {
    // The residual-reachable side, restricted to peers, holds less wealth
    // than the channels it fully contains.
    CutCertificate cert;
    cert.members.assign(res.certificate.begin(), res.certificate.begin() + static_cast<std::ptrdiff_t>(n));
    for (NodeIndex v = 0; v < n; ++v) {
      if (cert.members[v]) cert.wealth += omega[v];
    }
    auto iv = cut_interval(g, cert.members);
    cert.lo = iv.lo;
    cert.hi = iv.hi;
    if (cert.wealth >= cert.lo && cert.wealth <= cert.hi) {
      throw std::logic_error("infeasibility certificate does not violate its cut interval");
    }
    out.certificate = std::move(cert);
  }
  return out;
}

std::vector<std::vector<Coins>> compositions(Coins total, std::size_t parts) {
  if (parts == 0) throw std::invalid_argument("compositions need at least one part");
  std::vector<std::vector<Coins>> out;
  std::vector<Coins> cur(parts, 0);
  // Recursive fill in lexicographic order.
  auto rec = [&](auto&& self, std::size_t i, Coins left) -> void {
    if (i + 1 == parts) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (Coins x = 0; x <= left; ++x) {
      cur[i] = x;
      self(self, i + 1, left - x);
    }
  };
  rec(rec, 0, total);
  return out;
}

bool is_feasible_bruteforce(const ChannelGraph& g, const WealthVector& omega, std::uint64_t max_states) {
  if (omega.size() != g.node_count()) throw std::invalid_argument("wealth vector has wrong length");
  if (state_space_volume(g) > max_states) throw std::length_error("state space too large for exhaustive scan");
  if (omega.total() != g.total_capacity()) return false;
  bool found = false;
  std::vector<Coins> w(g.node_count());
  for_each_state(g, [&](const std::vector<std::vector<Coins>>& values) {
    std::fill(w.begin(), w.end(), 0);
    for (std::size_t e = 0; e < values.size(); ++e) {
      const auto& ends = g.channel(e).endpoints;
      for (std::size_t i = 0; i < ends.size(); ++i) w[ends[i]] += values[e][i];
    }
    found = w == omega.values();
    return !found;
  });
  return found;
}

WealthVector shifted_wealth(const WealthVector& omega, NodeIndex payer, NodeIndex payee, Coins amount) {
  if (payer >= omega.size() || payee >= omega.size()) throw std::invalid_argument("payer or payee out of range");
  if (amount < 0) throw std::invalid_argument("payment amount must be nonnegative");
  if (omega[payer] < amount) {
    throw std::invalid_argument("payer balance " + std::to_string(omega[payer]) + " below amount " +
                                std::to_string(amount));
  }
  auto w = omega.values();
  w[payer] -= amount;
  w[payee] += amount;
  return WealthVector(std::move(w));
}

FeasibilityResult payment_feasible(const ChannelGraph& g, const WealthVector& omega, NodeIndex payer,
                                   NodeIndex payee, Coins amount) {
  return is_feasible(g, shifted_wealth(omega, payer, payee, amount));
}

}  // namespace pcn
