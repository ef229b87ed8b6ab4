#include "aucrac/auction.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "aucrac/kernels/kernels.hpp"

namespace aucrac {

void AuctionConfig::validate() const {
  if (bidders < 2) throw InputError("an auction needs at least 2 bidders");
}

namespace {

double ipow(double base, std::size_t exponent) {
  double p = 1.0;
  for (std::size_t e = 0; e < exponent; ++e) p *= base;
  return p;
}

}  // namespace

double win_probability(double bid, const BidDistribution& dist, std::size_t n, WinRule rule) {
  if (n < 2) throw InputError("win_probability needs n >= 2");
  const double f = dist.cdf(bid);
  return ipow(rule == WinRule::highest ? f : 1.0 - f, n - 1);
}

double expected_utility(double bid, double value, const BidDistribution& dist, std::size_t n,
                        bool eligible, WinRule rule) {
  if (!eligible) return 0.0;
  return win_probability(bid, dist, n, rule) * (value - bid);
}

double optimal_bid_paper(double value) {
  if (value < 0.0) throw InputError("value must be >= 0");
  return value;
}

double optimal_bid_numeric(double value, const BidDistribution& dist, std::size_t n,
                           WinRule rule, std::size_t grid) {
  if (grid < 100) throw InputError("bid search grid must be >= 100");
  if (n < 2) throw InputError("optimal_bid_numeric needs n >= 2");
  const double lo = dist.lower();
  const double hi = std::min(value, dist.upper());
  if (hi < lo) {
    throw InputError(fmt::format("empty bid search range [{}, {}]", lo, hi));
  }

  const double step = (hi - lo) / static_cast<double>(grid);
  std::vector<double> bids(grid + 1);
  for (std::size_t k = 0; k <= grid; ++k) bids[k] = lo + static_cast<double>(k) * step;

  std::vector<double> utility(bids.size());
  if (dist.kind() == BidDistribution::Kind::uniform) {
    const kernels::UniformUtility u{dist.lower(), dist.upper(), static_cast<unsigned>(n - 1),
                                    rule == WinRule::lowest, value};
    kernels::expected_utility(u, bids, utility);
  } else {
    for (std::size_t k = 0; k < bids.size(); ++k) {
      utility[k] = expected_utility(bids[k], value, dist, n, true, rule);
    }
  }
  return bids[kernels::argmax(utility).index];
}

AuctionOutcome run_sealed_auction(const Task& task, std::span<const Bid> bids,
                                  const AuctionConfig& cfg) {
  if (bids.empty()) throw InputError("run_sealed_auction needs at least one bid");

  const auto better = [&](const Bid& a, const Bid& b) {
    if (a.amount != b.amount) {
      return cfg.win_rule == WinRule::lowest ? a.amount < b.amount : a.amount > b.amount;
    }
    if (a.submit_time != b.submit_time) return a.submit_time < b.submit_time;
    return a.node_id < b.node_id;
  };

  AuctionOutcome out;
  out.task_id = task.id;
  const Bid* best = nullptr;
  for (const Bid& b : bids) {
    if (b.eligible && (best == nullptr || better(b, *best))) best = &b;
  }
  for (const Bid& b : bids) {
    if (&b != best) out.losing_bids.push_back(b);
  }
  if (best != nullptr) {
    out.winner = best->node_id;
    out.payment = best->amount;
  }
  return out;
}

LiteralAllocation allocate_tasks_literal(std::span<const double> values,
                                         std::span<const Task> tasks,
                                         std::span<const double> prior_bids) {
  if (values.empty()) throw InputError("allocate_tasks_literal needs at least one worker");
  if (!prior_bids.empty() && prior_bids.size() != values.size()) {
    throw InputError("prior bids must match the number of workers");
  }

  LiteralAllocation out;
  out.order.resize(values.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  if (prior_bids.empty()) {
    out.bids.assign(values.size(), 0.0);
  } else {
    out.bids.assign(prior_bids.begin(), prior_bids.end());
  }

  for (const Task& t : tasks) {
    const auto it = std::find_if(out.bids.begin(), out.bids.end(),
                                 [&](double b) { return b >= t.value; });
    const std::size_t pos =
        it == out.bids.end() ? out.bids.size() - 1 : static_cast<std::size_t>(it - out.bids.begin());
    out.assigned_position.push_back(pos);
    out.assigned_worker.push_back(out.order[pos]);
    out.bids[pos] = std::max(out.bids[pos], t.value);
  }
  return out;
}

double mn_revenue(const Task& task, double unit_price) {
  if (unit_price < 0.0) throw InputError("unit price must be >= 0");
  return task.data_in * unit_price;
}

}  // namespace aucrac
