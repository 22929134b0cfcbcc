#include "pcn/replenishment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <Eigen/Dense>

#include "pcn/depletion.hpp"
#include "pcn/flow.hpp"

namespace pcn {

namespace {

// Work in first-endpoint coordinates y (one per channel). With target
// (a, b) on channel e, (y - a)^2 + (c - y - b)^2 = 2 (y - t)^2 + const for
// t = (a + c - b) / 2, so projecting x0 is projecting t.
struct Reduced {
  Eigen::VectorXd y_lam;
  Eigen::VectorXd t;
  Eigen::VectorXd cap;
  Eigen::MatrixXd cycles;  // m x k, fundamental cycles as +-1 columns
  std::vector<std::size_t> nontree;
};

Reduced reduce(const ReplenishmentProblem& p) {
  const auto m = p.g.channel_count();
  Reduced r;
  r.y_lam.resize(static_cast<Eigen::Index>(m));
  r.t.resize(static_cast<Eigen::Index>(m));
  r.cap.resize(static_cast<Eigen::Index>(m));
  for (std::size_t e = 0; e < m; ++e) {
    const auto i = static_cast<Eigen::Index>(e);
    const double c = static_cast<double>(p.g.channel(e).capacity);
    r.y_lam[i] = static_cast<double>(p.lam.at(e, 0));
    r.t[i] = (p.target[2 * e] + c - p.target[2 * e + 1]) / 2.0;
    r.cap[i] = c;
  }
  auto basis = fundamental_cycles(p.g);
  r.cycles = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(basis.cycles.size()));
  for (std::size_t j = 0; j < basis.cycles.size(); ++j) {
    r.nontree.push_back(basis.cycles[j].front().channel);
    for (auto s : basis.cycles[j]) r.cycles(static_cast<Eigen::Index>(s.channel), static_cast<Eigen::Index>(j)) += s.sign;
  }
  return r;
}

std::vector<double> expand(const Eigen::VectorXd& y, const Eigen::VectorXd& cap) {
  std::vector<double> x(2 * static_cast<std::size_t>(y.size()));
  for (Eigen::Index e = 0; e < y.size(); ++e) {
    x[2 * static_cast<std::size_t>(e)] = y[e];
    x[2 * static_cast<std::size_t>(e) + 1] = cap[e] - y[e];
  }
  return x;
}

Eigen::VectorXd clamp_box(const Eigen::VectorXd& y, const Eigen::VectorXd& cap) {
  return y.cwiseMax(0.0).cwiseMin(cap);
}

// Equality-constrained minimizer with the channels in `lower` fixed at 0
// and those in `upper` at capacity. nu holds the multipliers in that order.
struct FaceSolution {
  Eigen::VectorXd y;
  Eigen::VectorXd nu;
  double residual = 0.0;
};

FaceSolution solve_face(const Reduced& r, const std::vector<Eigen::Index>& lower, const std::vector<Eigen::Index>& upper) {
  const auto k = r.cycles.cols();
  const auto a = static_cast<Eigen::Index>(lower.size() + upper.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + a, k + a);
  Eigen::VectorXd rhs(k + a);
  kkt.topLeftCorner(k, k) = r.cycles.transpose() * r.cycles;
  rhs.head(k) = r.cycles.transpose() * (r.t - r.y_lam);
  Eigen::Index i = k;
  auto add = [&](Eigen::Index e, double bound) {
    kkt.block(i, 0, 1, k) = r.cycles.row(e);
    kkt.block(0, i, k, 1) = r.cycles.row(e).transpose();
    rhs[i] = bound - r.y_lam[e];
    ++i;
  };
  for (auto e : lower) add(e, 0.0);
  for (auto e : upper) add(e, r.cap[e]);
  Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  FaceSolution f;
  f.y = r.y_lam + r.cycles * sol.head(k);
  f.nu = sol.tail(a);
  f.residual = a + k > 0 ? (kkt * sol - rhs).cwiseAbs().maxCoeff() : 0.0;
  return f;
}

struct Polish {
  Eigen::VectorXd y;
  double kkt = 0.0;
  bool ok = false;
};

// Active-set refinement starting from the bounds that are (nearly) tight at
// y: violated bounds join the set, the worst multiplier of the wrong sign
// leaves it. Multipliers solve C^T (y - t) + C_A^T nu = 0, so nu <= 0 on
// lower and nu >= 0 on upper bounds at the optimum.
Polish polish(const Reduced& r, const Eigen::VectorXd& start) {
  const auto m = start.size();
  const double tight = 1e-6;
  std::vector<char> state(static_cast<std::size_t>(m), 0);  // -1 lower, 1 upper
  for (Eigen::Index e = 0; e < m; ++e) {
    if (start[e] <= tight) state[static_cast<std::size_t>(e)] = -1;
    else if (start[e] >= r.cap[e] - tight) state[static_cast<std::size_t>(e)] = 1;
  }
  Polish out;
  for (int round = 0; round < 4 * static_cast<int>(m) + 10; ++round) {
    std::vector<Eigen::Index> lower, upper;
    for (Eigen::Index e = 0; e < m; ++e) {
      if (state[static_cast<std::size_t>(e)] < 0) lower.push_back(e);
      if (state[static_cast<std::size_t>(e)] > 0) upper.push_back(e);
    }
    auto f = solve_face(r, lower, upper);
    out.y = f.y;
    bool added = false;
    for (Eigen::Index e = 0; e < m; ++e) {
      auto& s = state[static_cast<std::size_t>(e)];
      if (s != 0) continue;
      if (f.y[e] < -1e-9) s = -1, added = true;
      else if (f.y[e] > r.cap[e] + 1e-9) s = 1, added = true;
    }
    if (added) continue;
    double worst = 0.0;
    Eigen::Index drop = -1;
    const auto nl = static_cast<Eigen::Index>(lower.size());
    for (Eigen::Index i = 0; i < f.nu.size(); ++i) {
      const double v = i < nl ? f.nu[i] : -f.nu[i];
      if (v > worst) {
        worst = v;
        drop = i < nl ? lower[static_cast<std::size_t>(i)] : upper[static_cast<std::size_t>(i - nl)];
      }
    }
    const double feas = std::max({(-f.y).maxCoeff(), (f.y - r.cap).maxCoeff(), 0.0});
    out.kkt = std::max({feas, f.residual, worst});
    out.ok = feas <= 1e-9 && f.residual <= 1e-6;
    if (drop < 0 || worst <= 1e-9) return out;
    state[static_cast<std::size_t>(drop)] = 0;
  }
  return out;
}

double objective(const Eigen::VectorXd& y, const Eigen::VectorXd& t) { return (y - t).squaredNorm(); }

}  // namespace

ReplenishmentProblem::ReplenishmentProblem(ChannelGraph graph, LiquidityState current)
    : g(std::move(graph)), lam(std::move(current)) {
  target = coordinates(balanced_state(g));
  validate();
}

ReplenishmentProblem::ReplenishmentProblem(ChannelGraph graph, LiquidityState current, std::vector<double> x0)
    : g(std::move(graph)), lam(std::move(current)), target(std::move(x0)) {
  validate();
}

void ReplenishmentProblem::validate() const {
  if (!g.all_two_party()) throw std::invalid_argument("replenishment needs a 2-party graph");
  if (lam.values().size() != g.channel_count()) throw std::invalid_argument("liquidity does not match the graph");
  if (target.size() != 2 * g.channel_count()) throw std::invalid_argument("target needs two coordinates per channel");
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto c = static_cast<double>(g.channel(e).capacity);
    for (std::size_t i = 0; i < 2; ++i) {
      const double x = target[2 * e + i];
      if (!std::isfinite(x) || x < 0 || x > c) throw std::invalid_argument("target coordinate outside [0, capacity]");
    }
  }
}

std::vector<double> coordinates(const LiquidityState& lam) {
  std::vector<double> x;
  for (const auto& v : lam.values()) {
    for (auto b : v) x.push_back(static_cast<double>(b));
  }
  return x;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance between vectors of different length");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

RelaxationResult continuous_relaxation(const ReplenishmentProblem& prob, double tol, std::size_t max_iterations) {
  prob.validate();
  const auto r = reduce(prob);
  RelaxationResult out;
  if (r.cycles.cols() == 0) {
    out.x = expand(r.y_lam, r.cap);
    out.polished = true;
    return out;
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(r.cycles).householderQ() *
                            Eigen::MatrixXd::Identity(r.cycles.rows(), r.cycles.cols());
  auto affine = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return r.y_lam + q * (q.transpose() * (y - r.y_lam));
  };

  Eigen::VectorXd y = r.t;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(y.size());
  Eigen::VectorXd s = Eigen::VectorXd::Zero(y.size());
  Eigen::VectorXd a = affine(y);
  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    a = affine(y + p);
    p = y + p - a;
    Eigen::VectorXd next = clamp_box(a + s, r.cap);
    s = a + s - next;
    const double step = (next - y).norm();
    y = std::move(next);
    if (step < tol && (a - y).norm() < 1e-7) break;
  }
  // a is on the affine set, y in the box; they agree to the tolerance.
  Eigen::VectorXd best = clamp_box(affine(y), r.cap);
  auto polished = polish(r, y);
  if (polished.ok && objective(polished.y, r.t) <= objective(best, r.t) + 1e-9) {
    best = polished.y;
    out.polished = true;
  }
  out.kkt_residual = polished.ok ? polished.kkt : (affine(best) - best).cwiseAbs().maxCoeff();
  out.x = expand(best, r.cap);
  return out;
}

Coins delta_radius(const std::vector<double>& x_rho, const std::vector<double>& x0, std::size_t m) {
  if (m == 0) return 1;
  const double d = distance(x_rho, x0);
  return std::max<Coins>(1, static_cast<Coins>(std::ceil(std::sqrt(d / static_cast<double>(m)) + 1.0 - 1e-12)));
}

RepairResult integer_repair(const ReplenishmentProblem& prob, const std::vector<double>& x_rho, Coins delta) {
  prob.validate();
  if (delta < 1) throw std::invalid_argument("cube radius must be at least 1");
  if (x_rho.size() != prob.target.size()) throw std::invalid_argument("relaxed point has the wrong dimension");
  const auto r = reduce(prob);
  const auto m = prob.g.channel_count();
  const auto k = static_cast<std::size_t>(r.cycles.cols());
  std::vector<Coins> cap(m), y(m);
  std::vector<double> y_rho(m);
  for (std::size_t e = 0; e < m; ++e) {
    cap[e] = prob.g.channel(e).capacity;
    y[e] = prob.lam.at(e, 0);
    y_rho[e] = x_rho[2 * e];
  }
  std::vector<std::vector<std::pair<std::size_t, Coins>>> cycle(k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t e = 0; e < m; ++e) {
      const auto c = static_cast<Coins>(r.cycles(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(j)));
      if (c != 0) cycle[j].push_back({e, c});
    }
  }
  // Each fundamental cycle owns one non-tree channel, so its coefficient is
  // read off there.
  for (std::size_t j = 0; j < k; ++j) {
    const auto e = r.nontree[j];
    const auto z = static_cast<Coins>(std::llround(y_rho[e] - static_cast<double>(prob.lam.at(e, 0))));
    for (auto [f, c] : cycle[j]) y[f] += c * z;
  }

  RepairResult out;
  auto score = [&](const std::vector<Coins>& v, double radius) {
    double box = 0, cube = 0, dist = 0;
    for (std::size_t e = 0; e < m; ++e) {
      box += static_cast<double>(std::max<Coins>(0, -v[e]) + std::max<Coins>(0, v[e] - cap[e]));
      cube += std::max(0.0, std::abs(static_cast<double>(v[e]) - y_rho[e]) - radius);
      const double x1 = static_cast<double>(v[e]) - prob.target[2 * e];
      const double x2 = static_cast<double>(cap[e] - v[e]) - prob.target[2 * e + 1];
      dist += x1 * x1 + x2 * x2;
    }
    return std::make_tuple(box, cube, dist);
  };
  auto search = [&](double radius) {
    auto current = score(y, radius);
    while (true) {
      auto best = current;
      std::size_t best_j = k;
      Coins best_s = 0;
      for (std::size_t j = 0; j < k; ++j) {
        for (Coins s : {Coins{1}, Coins{-1}}) {
          for (auto [f, c] : cycle[j]) y[f] += s * c;
          auto sc = score(y, radius);
          for (auto [f, c] : cycle[j]) y[f] -= s * c;
          if (sc < best) {
            best = sc;
            best_j = j;
            best_s = s;
          }
        }
      }
      if (best_j == k) return current;
      for (auto [f, c] : cycle[best_j]) y[f] += best_s * c;
      current = best;
    }
  };

  out.delta = delta;
  for (int round = 0; round <= 6; ++round) {
    auto [box, cube, dist] = search(static_cast<double>(out.delta));
    (void)dist;
    if (box == 0 && cube == 0) {
      out.x = LiquidityState::from_first_endpoint(prob.g, y);
      return out;
    }
    if (round == 6) break;
    out.delta *= 2;
    ++out.widenings;
    out.log.push_back("no integer point found in the cube; widening delta to " + std::to_string(out.delta));
  }
  out.log.push_back("integer repair failed; keeping the current state");
  out.fell_back = true;
  out.x = prob.lam;
  return out;
}

LiquidityState integer_optimum(const ReplenishmentProblem& prob) {
  prob.validate();
  const auto& g = prob.g;
  bool half_integral = true;
  for (double x : prob.target) half_integral = half_integral && std::abs(2 * x - std::round(2 * x)) < 1e-9;
  const double scale = half_integral ? 1.0 : 1e6;

  // Moving the first endpoint's balance from k to k + 1 changes the squared
  // distance by 4k - 2a + 2b - 2c + 2.
  flow::FlowNetwork net;
  net.node_count = g.node_count();
  struct Unit {
    std::size_t arc;
    std::size_t channel;
    int direction;
  };
  std::vector<Unit> units;
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const auto& ends = g.channel(e).endpoints;
    const auto c = g.channel(e).capacity;
    const double a = prob.target[2 * e];
    const double b = prob.target[2 * e + 1];
    auto up = [&](Coins k) {
      return static_cast<flow::Amount>(
          std::llround(scale * (4.0 * static_cast<double>(k) - 2 * a + 2 * b - 2.0 * static_cast<double>(c) + 2)));
    };
    const auto y0 = prob.lam.at(e, 0);
    for (Coins k = y0; k < c; ++k) units.push_back({net.add_arc(ends[1], ends[0], 1, up(k)), e, 1});
    for (Coins k = y0; k > 0; --k) units.push_back({net.add_arc(ends[0], ends[1], 1, -up(k - 1)), e, -1});
  }
  auto f = flow::min_cost_circulation(net);
  auto y = prob.lam.first_endpoint_coordinates();
  for (const auto& u : units) y[u.channel] += u.direction * f[u.arc];
  return LiquidityState::from_first_endpoint(g, y);
}

ReplenishmentResult replenish(const ReplenishmentProblem& prob) {
  auto relaxed = continuous_relaxation(prob);
  ReplenishmentResult out;
  out.x_rho = relaxed.x;
  out.kkt_residual = relaxed.kkt_residual;
  out.dist_rho = distance(relaxed.x, prob.target);
  out.delta = delta_radius(relaxed.x, prob.target, prob.g.channel_count());
  auto repaired = integer_repair(prob, relaxed.x, out.delta);
  out.x_int = repaired.x;
  out.delta_used = repaired.delta;
  out.log = repaired.log;
  out.dist_int = distance(coordinates(out.x_int), prob.target);
  out.circulation = circulation_between(prob.g, prob.lam, out.x_int);
  return out;
}

BandFractions band_fractions(const ChannelGraph& g, const LiquidityState& lam) {
  BandFractions b;
  if (g.channel_count() == 0) return b;
  for (std::size_t e = 0; e < g.channel_count(); ++e) {
    const double x = static_cast<double>(lam.at(e, 0)) / static_cast<double>(g.channel(e).capacity);
    b.narrow += (x >= 0.4 && x <= 0.6) ? 1 : 0;
    b.wide += (x >= 0.1 && x <= 0.9) ? 1 : 0;
  }
  b.narrow /= static_cast<double>(g.channel_count());
  b.wide /= static_cast<double>(g.channel_count());
  return b;
}

ReplenishmentReport replenish_report(const ReplenishmentProblem& prob, const ReplenishmentResult& result) {
  ReplenishmentReport r;
  r.before = band_fractions(prob.g, prob.lam);
  r.after = band_fractions(prob.g, result.x_int);
  Coins moved = 0;
  for (std::size_t e = 0; e < prob.g.channel_count(); ++e) {
    for (std::size_t i = 0; i < 2; ++i) moved += std::abs(result.x_int.at(e, i) - prob.lam.at(e, i));
  }
  const auto total = prob.g.total_capacity();
  r.moved_fraction = total > 0 ? static_cast<double>(moved) / (2.0 * static_cast<double>(total)) : 0.0;
  r.circulation = result.circulation;
  return r;
}

}  // namespace pcn
