#pragma once

#include <vector>

namespace pcn {

template <typename Visit>
void for_each_state(const ChannelGraph& g, Visit&& visit) {
  const auto m = g.channel_count();
  std::vector<std::vector<std::vector<Coins>>> choices(m);
  for (std::size_t e = 0; e < m; ++e) {
    choices[e] = compositions(g.channel(e).capacity, g.channel(e).endpoints.size());
  }
  std::vector<std::size_t> odometer(m, 0);
  std::vector<std::vector<Coins>> values(m);
  for (std::size_t e = 0; e < m; ++e) values[e] = choices[e][0];
  while (true) {
    if (!visit(values)) return;
    std::size_t e = m;
    while (e > 0) {
      --e;
      if (++odometer[e] < choices[e].size()) {
        values[e] = choices[e][odometer[e]];
        break;
      }
      odometer[e] = 0;
      values[e] = choices[e][0];
      if (e == 0) return;
    }
    if (m == 0) return;
  }
}

}  // namespace pcn
