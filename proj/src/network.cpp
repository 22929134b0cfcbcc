#include "pcn/network.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace pcn {

bool Channel::contains(NodeIndex v) const {
  return std::find(endpoints.begin(), endpoints.end(), v) != endpoints.end();
}

std::optional<std::size_t> Channel::slot_of(NodeIndex v) const {
  auto it = std::find(endpoints.begin(), endpoints.end(), v);
  if (it == endpoints.end()) return std::nullopt;
  return static_cast<std::size_t>(it - endpoints.begin());
}

ChannelGraph ChannelGraph::build(const NetworkDescription& desc) {
  ChannelGraph g;
  for (const auto& id : desc.nodes) {
    if (!g.index_.emplace(id, g.node_ids_.size()).second) {
      throw std::invalid_argument("duplicate node id '" + id + "'");
    }
    g.node_ids_.push_back(id);
  }
  g.incident_.resize(g.node_ids_.size());

  std::map<std::vector<NodeIndex>, std::size_t> by_members;
  std::set<std::string> used_ids;
  for (const auto& spec : desc.channels) {
    if (spec.cap <= 0) {
      throw std::invalid_argument("channel capacity must be positive, got " + std::to_string(spec.cap));
    }
    if (spec.ends.size() < 2) throw std::invalid_argument("channel needs at least two endpoints");
    std::vector<NodeIndex> ends;
    for (const auto& id : spec.ends) {
      auto it = g.index_.find(id);
      if (it == g.index_.end()) throw std::invalid_argument("channel references unknown node '" + id + "'");
      ends.push_back(it->second);
    }
    auto key = ends;
    std::sort(key.begin(), key.end());
    if (std::adjacent_find(key.begin(), key.end()) != key.end()) {
      throw std::invalid_argument("channel endpoints must be distinct");
    }
    if (auto it = by_members.find(key); it != by_members.end()) {
      auto& merged = g.channels_[it->second];
      if (merged.capacity > std::numeric_limits<Coins>::max() - spec.cap) {
        throw std::overflow_error("merged channel capacity overflows");
      }
      merged.capacity += spec.cap;
    } else {
      by_members.emplace(key, g.channels_.size());
      Channel c;
      c.endpoints = std::move(ends);
      c.capacity = spec.cap;
      c.id = spec.id;
      g.channels_.push_back(std::move(c));
    }
  }
  for (std::size_t e = 0; e < g.channels_.size(); ++e) {
    auto& c = g.channels_[e];
    if (c.id.empty()) c.id = "c" + std::to_string(e);
    if (!used_ids.insert(c.id).second) throw std::invalid_argument("duplicate channel id '" + c.id + "'");
    for (auto v : c.endpoints) g.incident_[v].push_back(e);
    if (g.total_capacity_ > std::numeric_limits<Coins>::max() - c.capacity) {
      throw std::overflow_error("total capacity overflows");
    }
    g.total_capacity_ += c.capacity;
  }
  return g;
}

ChannelGraph ChannelGraph::from_indices(
    std::size_t node_count, const std::vector<std::pair<std::vector<NodeIndex>, Coins>>& channels) {
  NetworkDescription desc;
  for (std::size_t v = 0; v < node_count; ++v) desc.nodes.push_back("n" + std::to_string(v));
  for (const auto& [ends, cap] : channels) {
    NetworkDescription::ChannelSpec spec;
    for (auto v : ends) {
      if (v >= node_count) throw std::invalid_argument("channel references unknown node index");
      spec.ends.push_back(desc.nodes[v]);
    }
    spec.cap = cap;
    desc.channels.push_back(std::move(spec));
  }
  return build(desc);
}

NodeIndex ChannelGraph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("unknown node '" + id + "'");
  return it->second;
}

std::optional<std::size_t> ChannelGraph::channel_index(const std::string& id) const {
  for (std::size_t e = 0; e < channels_.size(); ++e) {
    if (channels_[e].id == id) return e;
  }
  return std::nullopt;
}

std::optional<std::size_t> ChannelGraph::find_channel(NodeIndex u, NodeIndex v) const {
  for (auto e : incident_.at(u)) {
    const auto& c = channels_[e];
    if (c.is_two_party() && c.contains(v)) return e;
  }
  return std::nullopt;
}

bool ChannelGraph::all_two_party() const {
  return std::all_of(channels_.begin(), channels_.end(), [](const Channel& c) { return c.is_two_party(); });
}

LiquidityState::LiquidityState(const ChannelGraph& g, std::vector<std::vector<Coins>> values)
    : values_(std::move(values)) {
  if (values_.size() != g.channel_count()) throw std::invalid_argument("liquidity state has wrong channel count");
  for (std::size_t e = 0; e < values_.size(); ++e) {
    const auto& c = g.channel(e);
    if (values_[e].size() != c.endpoints.size()) {
      throw std::invalid_argument("liquidity state has wrong member count on channel " + c.id);
    }
    Coins sum = 0;
    for (auto x : values_[e]) {
      if (x < 0 || x > c.capacity) throw std::invalid_argument("liquidity out of [0, cap] on channel " + c.id);
      sum += x;
    }
    if (sum != c.capacity) throw std::invalid_argument("conservation of liquidity violated on channel " + c.id);
  }
}

LiquidityState LiquidityState::from_first_endpoint(const ChannelGraph& g, std::span<const Coins> first) {
  if (first.size() != g.channel_count()) throw std::invalid_argument("coordinate count differs from channel count");
  std::vector<std::vector<Coins>> v(g.channel_count());
  for (std::size_t e = 0; e < first.size(); ++e) {
    const auto& c = g.channel(e);
    if (!c.is_two_party()) throw std::invalid_argument("first-endpoint coordinates need 2-party channels");
    v[e] = {first[e], c.capacity - first[e]};
  }
  return LiquidityState(g, std::move(v));
}

Coins LiquidityState::of(const ChannelGraph& g, std::size_t e, NodeIndex v) const {
  auto slot = g.channel(e).slot_of(v);
  if (!slot) throw std::invalid_argument("node is not a member of the channel");
  return values_.at(e).at(*slot);
}

std::vector<Coins> LiquidityState::first_endpoint_coordinates() const {
  std::vector<Coins> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(v.front());
  return out;
}

WealthVector::WealthVector(std::vector<Coins> omega) : omega_(std::move(omega)) {
  for (auto x : omega_) {
    if (x < 0) throw std::invalid_argument("wealth entries must be nonnegative");
    if (total_ > std::numeric_limits<Coins>::max() - x) throw std::overflow_error("wealth total overflows");
    total_ += x;
  }
}

LiquidityNetwork liquidity_network(const ChannelGraph& g, const LiquidityState& lam) {
  LiquidityNetwork net;
  net.node_count = g.node_count();
  net.arcs.reserve(2 * g.channel_count());
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto& c = g.channel(e);
    if (!c.is_two_party()) {
      throw std::invalid_argument("liquidity network requires 2-party channels; channel " + c.id + " has " +
                                  std::to_string(c.endpoints.size()) + " members");
    }
    auto u = c.endpoints[0];
    auto v = c.endpoints[1];
    net.arcs.push_back({u, v, lam.at(e, 0), e});
    net.arcs.push_back({v, u, lam.at(e, 1), e});
  }
  return net;
}

WealthVector wealth_of(const ChannelGraph& g, const LiquidityState& lam) {
  std::vector<Coins> omega(g.node_count(), 0);
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto& c = g.channel(e);
    for (std::size_t i = 0; i < c.endpoints.size(); ++i) omega[c.endpoints[i]] += lam.at(e, i);
  }
  return WealthVector(std::move(omega));
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw std::overflow_error("count exceeds 64 bits");
  }
  return a * b;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays exact because r is C(n-k+i-1, i-1).
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("binomial exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t state_space_volume(const ChannelGraph& g) {
  std::uint64_t vol = 1;
  for (const auto& c : g.channels()) {
    auto k = c.endpoints.size();
    vol = checked_mul(vol, binomial(static_cast<std::uint64_t>(c.capacity) + k - 1, k - 1));
  }
  return vol;
}

NetworkDescription parse_network(const nlohmann::json& j) {
  NetworkDescription d;
  if (!j.is_object() || !j.contains("nodes")) throw std::invalid_argument("network JSON needs a \"nodes\" array");
  for (const auto& n : j.at("nodes")) d.nodes.push_back(n.get<std::string>());
  if (j.contains("channels")) {
    for (const auto& c : j.at("channels")) {
      NetworkDescription::ChannelSpec spec;
      for (const auto& end : c.at("ends")) spec.ends.push_back(end.get<std::string>());
      spec.cap = c.at("cap").get<Coins>();
      if (c.contains("id")) spec.id = c.at("id").get<std::string>();
      d.channels.push_back(std::move(spec));
    }
  }
  return d;
}

nlohmann::json network_to_json(const ChannelGraph& g) {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& c : g.channels()) {
    nlohmann::json ends = nlohmann::json::array();
    for (auto v : c.endpoints) ends.push_back(g.node_id(v));
    channels.push_back({{"id", c.id}, {"ends", ends}, {"cap", c.capacity}});
  }
  return {{"nodes", g.node_ids()}, {"channels", channels}};
}

LiquidityState parse_liquidity(const ChannelGraph& g, const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("liquidity JSON must be an object keyed by channel id");
  std::vector<std::vector<Coins>> values(g.channel_count());
  std::vector<bool> seen(g.channel_count(), false);
  for (const auto& [cid, balances] : j.items()) {
    auto e = g.channel_index(cid);
    if (!e) throw std::invalid_argument("liquidity references unknown channel '" + cid + "'");
    const auto& c = g.channel(*e);
    values[*e].assign(c.endpoints.size(), 0);
    std::vector<bool> member_seen(c.endpoints.size(), false);
    for (const auto& [node, amount] : balances.items()) {
      auto slot = c.slot_of(g.index_of(node));
      if (!slot) throw std::invalid_argument("node '" + node + "' is not on channel '" + cid + "'");
      values[*e][*slot] = amount.get<Coins>();
      member_seen[*slot] = true;
    }
    // One omitted member is implied by conservation.
    auto missing = std::count(member_seen.begin(), member_seen.end(), false);
    if (missing == 1) {
      auto slot = static_cast<std::size_t>(std::find(member_seen.begin(), member_seen.end(), false) - member_seen.begin());
      Coins rest = c.capacity;
      for (std::size_t i = 0; i < values[*e].size(); ++i) {
        if (i != slot) rest -= values[*e][i];
      }
      values[*e][slot] = rest;
    } else if (missing > 1) {
      throw std::invalid_argument("liquidity for channel '" + cid + "' leaves more than one member unspecified");
    }
    seen[*e] = true;
  }
  for (std::size_t e = 0; e < seen.size(); ++e) {
    if (!seen[e]) throw std::invalid_argument("liquidity missing for channel '" + g.channel(e).id + "'");
  }
  return LiquidityState(g, std::move(values));
}

nlohmann::json liquidity_to_json(const ChannelGraph& g, const LiquidityState& lam) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto& c = g.channel(e);
    nlohmann::json b = nlohmann::json::object();
    for (std::size_t i = 0; i < c.endpoints.size(); ++i) b[g.node_id(c.endpoints[i])] = lam.at(e, i);
    out[c.id] = b;
  }
  return out;
}

WealthVector parse_wealth(const ChannelGraph& g, const nlohmann::json& j) {
  std::vector<Coins> omega(g.node_count(), 0);
  if (j.is_array()) {
    if (j.size() != g.node_count()) throw std::invalid_argument("wealth array length differs from node count");
    for (std::size_t v = 0; v < j.size(); ++v) omega[v] = j[v].get<Coins>();
  } else if (j.is_object()) {
    for (const auto& [node, amount] : j.items()) omega[g.index_of(node)] = amount.get<Coins>();
  } else {
    throw std::invalid_argument("wealth JSON must be an object keyed by node id or an array");
  }
  return WealthVector(std::move(omega));
}

nlohmann::json wealth_to_json(const ChannelGraph& g, const WealthVector& omega) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t v = 0; v < g.node_count(); ++v) out[g.node_id(v)] = omega[v];
  return out;
}

}  // namespace pcn
