// pcn: command-line front end for the payment channel network library.

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcn/convex_fees.hpp"
#include "pcn/depletion.hpp"
#include "pcn/feasibility.hpp"
#include "pcn/fibers.hpp"
#include "pcn/multiparty.hpp"
#include "pcn/network.hpp"
#include "pcn/parallel.hpp"
#include "pcn/rational.hpp"
#include "pcn/replenishment.hpp"
#include "pcn/sampling.hpp"

using nlohmann::json;
using namespace pcn;

namespace {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

ChannelGraph load_network(const std::string& path) { return ChannelGraph::build(parse_network(read_json(path))); }

// Writes to a file when a path is given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ValidationError("cannot write " + path);
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// "a:b" or "a" as an inclusive range.
std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
  try {
    auto colon = s.find(':');
    if (colon == std::string::npos) {
      auto v = std::stoll(s);
      return {v, v};
    }
    return {std::stoll(s.substr(0, colon)), std::stoll(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError("bad range '" + s + "', expected a or a:b");
  }
}

json report_json(const EstimatorReport& r) {
  return {{"estimate", r.estimate}, {"hits", r.hits}, {"samples", r.sample_count},
          {"standard_error", r.standard_error}, {"seed", r.seed}};
}

json certificate_json(const ChannelGraph& g, const CutCertificate& c) {
  json members = json::array();
  for (std::size_t v = 0; v < c.members.size(); ++v) {
    if (c.members[v]) members.push_back(g.node_id(v));
  }
  return {{"members", members}, {"wealth", c.wealth}, {"lo", c.lo}, {"hi", c.hi}};
}

json circulation_json(const ChannelGraph& g, const Circulation& f) {
  json out = json::object();
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto& c = g.channel(e);
    if (f.forward[e] == 0 && f.backward[e] == 0) continue;
    json arcs = json::array();
    if (f.forward[e] > 0)
      arcs.push_back({{"from", g.node_id(c.endpoints[0])}, {"to", g.node_id(c.endpoints[1])}, {"amount", f.forward[e]}});
    if (f.backward[e] > 0)
      arcs.push_back({{"from", g.node_id(c.endpoints[1])}, {"to", g.node_id(c.endpoints[0])}, {"amount", f.backward[e]}});
    out[c.id] = arcs;
  }
  return out;
}

json bands_json(const BandFractions& b) { return {{"0.4-0.6", b.narrow}, {"0.1-0.9", b.wide}}; }

std::vector<double> parse_target(const ChannelGraph& g, const json& j) {
  if (!j.is_object()) throw ValidationError("target JSON must be an object keyed by channel id");
  std::vector<double> x(2 * g.channel_count(), std::nan(""));
  for (const auto& [cid, balances] : j.items()) {
    auto e = g.channel_index(cid);
    if (!e) throw ValidationError("target references unknown channel '" + cid + "'");
    for (const auto& [node, amount] : balances.items()) {
      auto slot = g.channel(*e).slot_of(g.index_of(node));
      if (!slot) throw ValidationError("node '" + node + "' is not on channel '" + cid + "'");
      x[2 * *e + *slot] = amount.get<double>();
    }
  }
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto c = static_cast<double>(g.channel(e).capacity);
    auto& a = x[2 * e];
    auto& b = x[2 * e + 1];
    if (std::isnan(a) && std::isnan(b)) throw ValidationError("target missing for channel '" + g.channel(e).id + "'");
    if (std::isnan(a)) a = c - b;
    if (std::isnan(b)) b = c - a;
  }
  return x;
}

// Sums of m positive parts equal to total, in lexicographic order.
void for_each_split(Coins total, std::size_t m, const std::function<void(const std::vector<Coins>&)>& visit) {
  std::vector<Coins> parts(m, 0);
  auto rec = [&](auto&& self, std::size_t i, Coins left) -> void {
    if (i + 1 == m) {
      parts[i] = left;
      visit(parts);
      return;
    }
    for (Coins x = 1; x + static_cast<Coins>(m - i - 1) <= left; ++x) {
      parts[i] = x;
      self(self, i + 1, left - x);
    }
  };
  if (m > 0 && total >= static_cast<Coins>(m)) rec(rec, 0, total);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Payment channel network analysis"};
  app.require_subcommand(1);
  unsigned threads = default_threads();
  app.add_option("--threads", threads, "Worker threads (default: PCN_THREADS or 1)")->check(CLI::PositiveNumber);

  std::string network, wealth, liquidity, target, output, summary, bands;
  std::uint64_t seed = 0, samples = 0;

  auto* feasible = app.add_subcommand("feasible", "Decide whether a wealth vector is feasible");
  feasible->add_option("--network", network)->required();
  feasible->add_option("--wealth", wealth)->required();

  auto* fiber = app.add_subcommand("fiber", "Count the liquidity states with a given wealth vector");
  bool enumerate = false;
  std::uint64_t max_states = 10'000'000;
  fiber->add_option("--network", network)->required();
  fiber->add_option("--wealth", wealth)->required();
  fiber->add_flag("--enumerate", enumerate, "List the states");
  fiber->add_option("--max-states", max_states, "Enumeration bound");

  auto* volume = app.add_subcommand("volume", "Liquidity state space volume");
  Coins total = 0;
  std::size_t m_max = 0;
  volume->add_option("--network", network, "Report the volume of this network");
  volume->add_option("--total", total, "Total capacity for the split sweep")->check(CLI::PositiveNumber);
  volume->add_option("--m-max", m_max, "Largest channel count in the sweep")->check(CLI::PositiveNumber);
  volume->add_option("-o,--output", output);

  auto* est_r = app.add_subcommand("estimate-r", "Estimate the fraction of feasible wealth distributions");
  bool exact = false;
  est_r->add_option("--network", network)->required();
  est_r->add_option("--samples", samples)->required();
  est_r->add_option("--seed", seed)->required();
  est_r->add_flag("--exact", exact, "Also report the exhaustive ratio");

  auto* est_rho = app.add_subcommand("estimate-rho", "Estimate the rate of infeasible payments");
  Coins amount = 1;
  est_rho->add_option("--network", network)->required();
  est_rho->add_option("--amount", amount)->required()->check(CLI::NonNegativeNumber);
  est_rho->add_option("--samples", samples)->required();
  est_rho->add_option("--seed", seed)->required();

  auto* tput = app.add_subcommand("throughput", "Supported payments per second S = zeta / rho");
  double zeta = 7.0, rho = -1.0;
  tput->add_option("--zeta", zeta)->check(CLI::NonNegativeNumber);
  tput->add_option("--rho", rho);
  auto* sweep = tput->add_subcommand("sweep", "rho and S over a range of amounts");
  std::string amounts = "1:10";
  sweep->add_option("--network", network)->required();
  sweep->add_option("--amounts", amounts, "Inclusive range a:b");
  sweep->add_option("--samples", samples)->required();
  sweep->add_option("--seed", seed)->required();
  sweep->add_option("--zeta", zeta)->check(CLI::NonNegativeNumber);
  sweep->add_option("-o,--output", output);

  auto* cut = app.add_subcommand("cutwidth", "Closed-form and Monte Carlo cut widths of random k-party topologies");
  std::size_t n = 10, m = 10;
  Coins cap = 1;
  std::string k_range = "2:4", s_range = "1:5";
  cut->add_option("--n", n)->required();
  cut->add_option("--m", m)->required();
  cut->add_option("--c", cap)->required();
  cut->add_option("--k-range", k_range);
  cut->add_option("--s-range", s_range);
  cut->add_option("--samples", samples)->required();
  cut->add_option("--seed", seed)->required();
  cut->add_option("-o,--output", output);

  auto* depl = app.add_subcommand("depletion", "Fee-potential maximization on random networks");
  std::size_t depl_n = 20, depl_m = 30, trials = 50, m_min = 0;
  bool symmetric = false;
  depl->add_option("--n", depl_n);
  depl->add_option("--m", depl_m, "Largest channel count");
  depl->add_option("--m-min", m_min, "Smallest channel count (default n - 1)");
  depl->add_option("--trials", trials);
  depl->add_option("--seed", seed)->required();
  depl->add_flag("--symmetric-fees", symmetric);
  depl->add_option("-o,--output", output);
  depl->add_option("--summary", summary, "JSON summary path");

  auto* sim = app.add_subcommand("convexsim", "Routing simulation under linear or quadratic fees");
  std::string schedule = "quadratic", demand = "circular", disclose = "auto";
  Ppm ppm = 100;
  std::size_t steps = 10'000, cycle_n = 3;
  Coins cycle_cap = 100;
  sim->add_option("--schedule", schedule)->check(CLI::IsMember({"linear", "quadratic"}));
  sim->add_option("--ppm", ppm)->check(CLI::PositiveNumber);
  sim->add_option("--steps", steps);
  sim->add_option("--seed", seed)->required();
  sim->add_option("--demand", demand)->check(CLI::IsMember({"circular", "circular-random", "uniform"}));
  sim->add_option("--disclose", disclose, "yes, no or auto (yes for quadratic)")
      ->check(CLI::IsMember({"yes", "no", "auto"}));
  sim->add_option("--nodes", cycle_n, "Cycle length of the benchmark network");
  sim->add_option("--cap", cycle_cap, "Channel capacity of the benchmark network");
  sim->add_option("--network", network, "Use this network instead of the cycle benchmark");
  sim->add_option("-o,--output", output, "Time series CSV path");
  sim->add_option("--summary", summary, "JSON summary path");

  auto* repl = app.add_subcommand("replenish", "Nearest rebalanced state with the same wealth");
  repl->add_option("--network", network)->required();
  repl->add_option("--liquidity", liquidity)->required();
  repl->add_option("--target", target, "Target liquidity (default: half of every channel)");
  repl->add_option("--bands", bands, "Before/after band CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (feasible->parsed()) {
      auto g = load_network(network);
      auto omega = parse_wealth(g, read_json(wealth));
      auto r = is_feasible(g, omega);
      json out{{"feasible", r.feasible}};
      if (r.witness) out["witness"] = liquidity_to_json(g, *r.witness);
      if (r.certificate) out["certificate"] = certificate_json(g, *r.certificate);
      std::cout << out.dump(2) << "\n";
    } else if (fiber->parsed()) {
      auto g = load_network(network);
      auto omega = parse_wealth(g, read_json(wealth));
      auto states = fiber_enumerate(g, omega, max_states);
      json out{{"count", states.size()}};
      if (enumerate) {
        out["states"] = json::array();
        for (const auto& s : states) out["states"].push_back(liquidity_to_json(g, s));
      }
      std::cout << out.dump(2) << "\n";
    } else if (volume->parsed()) {
      if (!network.empty()) {
        auto g = load_network(network);
        std::cout << json{{"channels", g.channel_count()}, {"total_capacity", g.total_capacity()},
                          {"volume", state_space_volume(g)}}
                         .dump(2)
                  << "\n";
      } else {
        if (total <= 0 || m_max == 0) throw ValidationError("volume needs --network or both --total and --m-max");
        Sink sink(output);
        sink.out() << "m,volume_equal,volume_max,volume_min\n";
        for (std::size_t k = 1; k <= m_max && static_cast<Coins>(k) <= total; ++k) {
          // Every split of total into k positive capacities.
          std::uint64_t best = 0, worst = std::numeric_limits<std::uint64_t>::max();
          for_each_split(total, k, [&](const std::vector<Coins>& caps) {
            std::uint64_t v = 1;
            for (auto c : caps) v = checked_mul(v, static_cast<std::uint64_t>(c + 1));
            best = std::max(best, v);
            worst = std::min(worst, v);
          });
          const double equal = std::pow(static_cast<double>(total) / static_cast<double>(k) + 1.0, static_cast<double>(k));
          sink.out() << k << "," << num(equal) << "," << best << "," << worst << "\n";
        }
      }
    } else if (est_r->parsed()) {
      if (samples == 0) throw ValidationError("--samples must be at least 1");
      auto g = load_network(network);
      auto r = estimate_r(g, SamplingOptions{samples, seed, threads});
      json out = report_json(r);
      if (exact) {
        auto e = exact_r(g);
        out["exact"] = to_string(e);
        out["exact_value"] = to_double(e);
      }
      std::cout << out.dump(2) << "\n";
    } else if (est_rho->parsed()) {
      if (samples == 0) throw ValidationError("--samples must be at least 1");
      auto g = load_network(network);
      auto r = estimate_rho(g, PaymentModel::fixed_amount(amount), SamplingOptions{samples, seed, threads});
      json out = report_json(r);
      out["amount"] = amount;
      std::cout << out.dump(2) << "\n";
    } else if (sweep->parsed()) {
      if (samples == 0) throw ValidationError("--samples must be at least 1");
      auto [a_lo, a_hi] = parse_range(amounts);
      if (a_lo < 0 || a_hi < a_lo) throw ValidationError("bad amount range");
      auto g = load_network(network);
      Sink sink(output);
      sink.out() << "amount,rho,stderr,S\n";
      for (Coins a = a_lo; a <= a_hi; ++a) {
        auto r = estimate_rho(g, PaymentModel::fixed_amount(a), SamplingOptions{samples, seed, threads});
        auto s = throughput(zeta, r.estimate);
        sink.out() << a << "," << num(r.estimate) << "," << num(r.standard_error) << "," << (s ? num(*s) : "inf")
                   << "\n";
      }
    } else if (tput->parsed()) {
      if (rho < 0) throw ValidationError("throughput needs --rho (or the sweep subcommand)");
      if (rho > 1) throw ValidationError("--rho must lie in [0, 1]");
      auto s = throughput(zeta, rho);
      json out{{"zeta", zeta}, {"rho", rho}, {"unbounded", !s.has_value()}};
      out["S"] = s ? json(*s) : json(nullptr);
      std::cout << out.dump(2) << "\n";
    } else if (cut->parsed()) {
      if (samples == 0) throw ValidationError("--samples must be at least 1");
      auto [k_lo, k_hi] = parse_range(k_range);
      auto [s_lo, s_hi] = parse_range(s_range);
      if (k_lo < 2 || k_hi < k_lo || static_cast<std::size_t>(k_hi) > n) throw ValidationError("k range must lie in [2, n]");
      if (s_lo < 1 || s_hi < s_lo || static_cast<std::size_t>(s_hi) >= n) throw ValidationError("s range must lie in [1, n - 1]");
      struct Cell {
        std::size_t k, s;
      };
      std::vector<Cell> cells;
      for (auto k = k_lo; k <= k_hi; ++k) {
        for (auto s = s_lo; s <= s_hi; ++s) cells.push_back({static_cast<std::size_t>(k), static_cast<std::size_t>(s)});
      }
      std::vector<CutWidthReport> rows(cells.size());
      const Rng master(seed);
      parallel_for(cells.size(), threads, [&](std::uint64_t i) {
        RandomTopologySpec spec{n, m, cells[i].k, cap};
        spec.validate();
        auto rng = master.split(i);
        rows[i] = mc_cut_width(spec, cells[i].s, samples, rng);
      });
      Sink sink(output);
      sink.out() << "k,s,q_closed,q_mc,width_closed,width_mc\n";
      for (const auto& r : rows) {
        sink.out() << r.k << "," << r.s << "," << num(to_double(r.q_closed)) << "," << num(r.q_mc) << ","
                   << num(to_double(r.expected_width_closed)) << "," << num(r.expected_width_mc) << "\n";
      }
    } else if (depl->parsed()) {
      DepletionEnsemble ens;
      ens.n = depl_n;
      ens.m_max = depl_m;
      ens.m_min = depl->count("--m-min") ? m_min : depl_n - 1;
      ens.symmetric_fees = symmetric;
      ens.validate();
      auto res = depletion_experiment(ens, trials, seed, threads);
      Sink sink(output);
      sink.out() << "trial,m,circuit_rank,depleted,p_G\n";
      for (const auto& t : res.trials) {
        sink.out() << t.trial << "," << t.m << "," << t.circuit_rank << "," << t.depleted << "," << t.p_G << "\n";
      }
      if (!summary.empty()) {
        Sink s(summary);
        bool gaps = true;
        for (const auto& t : res.trials) gaps = gaps && t.gaps_zero;
        s.out() << json{{"trials", res.trials.size()}, {"pearson", number_or_null(res.pearson)}, {"gaps_zero", gaps}}.dump(2)
                << "\n";
      }
    } else if (sim->parsed()) {
      auto g = network.empty() ? cycle_benchmark(cycle_n, cycle_cap) : load_network(network);
      auto tiers = schedule == "linear" ? TierSchedule::linear(g, ppm) : TierSchedule::quadratic(g, ppm);
      SimulationConfig cfg;
      cfg.steps = steps;
      cfg.demand = parse_demand(demand);
      cfg.disclose = disclose == "auto" ? schedule == "quadratic" : disclose == "yes";
      Rng rng(seed);
      auto series = routing_simulation(g, balanced_state(g), tiers, cfg, rng);

      Sink csv(output);
      csv.out() << "step,source,target,success,attempts,hops,fee";
      for (const auto& c : g.channels()) csv.out() << "," << c.id;
      csv.out() << "\n";
      for (const auto& s : series.steps) {
        csv.out() << s.step << "," << g.node_id(s.source) << "," << g.node_id(s.target) << "," << (s.success ? 1 : 0) << ","
                  << s.attempts << "," << s.hops << "," << s.fee;
        for (auto l : s.liquidity) csv.out() << "," << l;
        csv.out() << "\n";
      }
      if (!series.steps.empty() && (!summary.empty() || !output.empty())) {
        auto sum = summarize_liquidity(g, series);
        json medians = json::object(), fees = json::object();
        for (std::size_t e = 0; e < g.channel_count(); ++e) medians[g.channel(e).id] = sum.median_relative[e];
        for (std::size_t v = 0; v < g.node_count(); ++v) fees[g.node_id(v)] = sum.node_fees[v];
        json out{{"schedule", schedule}, {"ppm", ppm}, {"steps", steps}, {"seed", seed},
                 {"demand", demand}, {"disclose", cfg.disclose}, {"steady", sum.steady},
                 {"from_step", sum.from_step}, {"median_relative", medians}, {"node_fees", fees},
                 {"network_fees", sum.network_fees}, {"payments", sum.payments}, {"successes", sum.successes},
                 {"band_0.4_0.6", sum.band_40_60}, {"band_0.1_0.9", sum.band_10_90}};
        Sink s(summary);
        s.out() << out.dump(2) << "\n";
      }
    } else if (repl->parsed()) {
      auto g = load_network(network);
      auto lam = parse_liquidity(g, read_json(liquidity));
      auto prob = target.empty() ? ReplenishmentProblem(g, lam)
                                 : ReplenishmentProblem(g, lam, parse_target(g, read_json(target)));
      auto res = replenish(prob);
      auto rep = replenish_report(prob, res);
      json x_rho = json::object();
      for (std::size_t e = 0; e < g.channel_count(); ++e) {
        const auto& c = g.channel(e);
        x_rho[c.id] = {{g.node_id(c.endpoints[0]), res.x_rho[2 * e]}, {g.node_id(c.endpoints[1]), res.x_rho[2 * e + 1]}};
      }
      json out{{"x_rho", x_rho},
               {"x_int", liquidity_to_json(g, res.x_int)},
               {"delta", res.delta},
               {"delta_used", res.delta_used},
               {"dist_rho", res.dist_rho},
               {"dist_int", res.dist_int},
               {"kkt_residual", res.kkt_residual},
               {"circulation", circulation_json(g, res.circulation)},
               {"log", res.log},
               {"bands_before", bands_json(rep.before)},
               {"bands_after", bands_json(rep.after)},
               {"moved_fraction", rep.moved_fraction}};
      std::cout << out.dump(2) << "\n";
      if (!bands.empty()) {
        Sink s(bands);
        s.out() << "band,before,after\n";
        s.out() << "0.4-0.6," << num(rep.before.narrow) << "," << num(rep.after.narrow) << "\n";
        s.out() << "0.1-0.9," << num(rep.before.wide) << "," << num(rep.after.wide) << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
