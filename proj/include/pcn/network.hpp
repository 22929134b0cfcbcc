#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pcn {

using Coins = std::int64_t;
using NodeIndex = std::size_t;

/// A k-party channel. Two endpoints is the ordinary 2-party case.
struct Channel {
  std::string id;
  std::vector<NodeIndex> endpoints;
  Coins capacity = 0;

  bool is_two_party() const { return endpoints.size() == 2; }
  bool contains(NodeIndex v) const;
  /// Position of v in endpoints, or nullopt if v is not a member.
  std::optional<std::size_t> slot_of(NodeIndex v) const;
};

/// Textual description of a network before validation.
struct NetworkDescription {
  struct ChannelSpec {
    std::vector<std::string> ends;
    Coins cap = 0;
    std::string id;  // optional; defaults to "c<merged index>"
  };
  std::vector<std::string> nodes;
  std::vector<ChannelSpec> channels;
};

/// Undirected weighted (hyper)graph of peers and channels.
///
/// Node ids are opaque strings mapped to dense indices in declaration order.
/// Channels on the same endpoint set are merged into one channel whose
/// capacity is the sum; the merged channel keeps the endpoint order and
/// position of its first occurrence.
class ChannelGraph {
 public:
  ChannelGraph() = default;

  static ChannelGraph build(const NetworkDescription& desc);
  /// Convenience overload taking index-based channels.
  static ChannelGraph from_indices(std::size_t node_count,
                                   const std::vector<std::pair<std::vector<NodeIndex>, Coins>>& channels);

  std::size_t node_count() const { return node_ids_.size(); }
  std::size_t channel_count() const { return channels_.size(); }
  Coins total_capacity() const { return total_capacity_; }

  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::string& node_id(NodeIndex v) const { return node_ids_.at(v); }
  NodeIndex index_of(const std::string& id) const;

  const std::vector<Channel>& channels() const { return channels_; }
  const Channel& channel(std::size_t e) const { return channels_.at(e); }
  std::optional<std::size_t> channel_index(const std::string& id) const;

  /// Channels incident to v, in channel order.
  const std::vector<std::size_t>& incident(NodeIndex v) const { return incident_.at(v); }

  /// Index of the 2-party channel joining u and v, if any.
  std::optional<std::size_t> find_channel(NodeIndex u, NodeIndex v) const;

  bool all_two_party() const;

 private:
  std::vector<std::string> node_ids_;
  std::map<std::string, NodeIndex> index_;
  std::vector<Channel> channels_;
  std::vector<std::vector<std::size_t>> incident_;
  Coins total_capacity_ = 0;
};

/// Per-channel, per-endpoint balances. values[e][i] is the liquidity held by
/// channel(e).endpoints[i].
class LiquidityState {
 public:
  LiquidityState() = default;
  /// Validates conservation of liquidity and nonnegativity against g.
  LiquidityState(const ChannelGraph& g, std::vector<std::vector<Coins>> values);

  /// 2-party shorthand: coordinate e is the balance of the first endpoint.
  static LiquidityState from_first_endpoint(const ChannelGraph& g, std::span<const Coins> first);

  const std::vector<std::vector<Coins>>& values() const { return values_; }
  Coins at(std::size_t e, std::size_t slot) const { return values_.at(e).at(slot); }
  /// Balance of node v on channel e. Throws if v is not a member of e.
  Coins of(const ChannelGraph& g, std::size_t e, NodeIndex v) const;

  /// Hyperbox coordinates of a 2-party state: first-endpoint balances.
  std::vector<Coins> first_endpoint_coordinates() const;

  bool operator==(const LiquidityState&) const = default;

 private:
  std::vector<std::vector<Coins>> values_;
};

/// Per-node coin totals.
class WealthVector {
 public:
  WealthVector() = default;
  /// Rejects negative entries.
  explicit WealthVector(std::vector<Coins> omega);

  std::size_t size() const { return omega_.size(); }
  Coins operator[](NodeIndex v) const { return omega_.at(v); }
  Coins total() const { return total_; }
  const std::vector<Coins>& values() const { return omega_; }

  bool operator==(const WealthVector& o) const { return omega_ == o.omega_; }
  bool operator<(const WealthVector& o) const { return omega_ < o.omega_; }

 private:
  std::vector<Coins> omega_;
  Coins total_ = 0;
};

/// Directed arc of a liquidity network, tagged with the channel it came from.
struct LiquidityArc {
  NodeIndex from = 0;
  NodeIndex to = 0;
  Coins capacity = 0;
  std::size_t channel = 0;
};

/// L(G, lambda): for channel e = (u, v) the arc u->v carries lambda(e, u) and
/// v->u carries lambda(e, v). Arcs 2e and 2e+1 belong to channel e, the even
/// arc leaving the first endpoint.
struct LiquidityNetwork {
  std::size_t node_count = 0;
  std::vector<LiquidityArc> arcs;
};

LiquidityNetwork liquidity_network(const ChannelGraph& g, const LiquidityState& lam);

/// Projection of a liquidity state to the wealth it represents.
WealthVector wealth_of(const ChannelGraph& g, const LiquidityState& lam);

/// Number of liquidity states: product over channels of the number of ways
/// to split its capacity among its members (c + 1 for 2-party channels).
/// Throws std::overflow_error past 64 bits.
std::uint64_t state_space_volume(const ChannelGraph& g);

/// Checked arithmetic used by the counting code.
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// JSON formats.
//   network:   {"nodes":[...], "channels":[{"ends":[...], "cap":N}, ...]}
//   liquidity: {"<channel id>": {"<node>": amount, ...}, ...}
//   wealth:    {"<node>": amount, ...}
// A channel entry may carry an optional "id"; otherwise ids are "c<index>"
// of the merged channel list.
NetworkDescription parse_network(const nlohmann::json& j);
nlohmann::json network_to_json(const ChannelGraph& g);
LiquidityState parse_liquidity(const ChannelGraph& g, const nlohmann::json& j);
nlohmann::json liquidity_to_json(const ChannelGraph& g, const LiquidityState& lam);
WealthVector parse_wealth(const ChannelGraph& g, const nlohmann::json& j);
nlohmann::json wealth_to_json(const ChannelGraph& g, const WealthVector& omega);

}  // namespace pcn
