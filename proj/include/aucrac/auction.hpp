#pragma once

// Manager-side mechanism: winning probability, expected utility, bid search,
// sealed-bid first-price auctions and the literal task-allocation routine.

#include <cstddef>
#include <span>
#include <vector>

#include "aucrac/config.hpp"
#include "aucrac/core.hpp"

namespace aucrac {

struct AuctionConfig {
  WinRule win_rule = WinRule::lowest;
  AuctionMode mode = AuctionMode::repaired;
  std::size_t bidders = 2;  // n

  void validate() const;
};

/// F(b)^(n-1) under highest-wins, (1 - F(b))^(n-1) under lowest-wins.
double win_probability(double bid, const BidDistribution& dist, std::size_t n, WinRule rule);

/// P_win * (V - b) * zeta.
double expected_utility(double bid, double value, const BidDistribution& dist, std::size_t n,
                        bool eligible, WinRule rule);

/// The closed-form optimum stated for i.i.d. bids: b* = V.
double optimal_bid_paper(double value);

/// Arg-max of expected_utility over `grid` equal steps of
/// [dist.lower(), min(value, dist.upper())]; lowest bid wins ties. Throws
/// InputError if grid < 100 or the range is empty.
double optimal_bid_numeric(double value, const BidDistribution& dist, std::size_t n,
                           WinRule rule, std::size_t grid);

/// Repaired sealed-bid auction: ineligible bids are dropped, the best
/// remaining bid under the win rule wins and is paid its own bid. Ties go to
/// the earliest submit_time, then the lowest node id. Throws InputError on
/// an empty bid list.
AuctionOutcome run_sealed_auction(const Task& task, std::span<const Bid> bids,
                                  const AuctionConfig& cfg);

/// Trace of the literal allocation routine.
struct LiteralAllocation {
  /// order[k] = input index of the worker at sorted position k (stable
  /// ascending sort of the values).
  std::vector<std::size_t> order;
  /// Sorted position each task was assigned to, in task order.
  std::vector<std::size_t> assigned_position;
  /// Input index each task was assigned to (order[assigned_position]).
  std::vector<std::size_t> assigned_worker;
  /// Final bids, by sorted position.
  std::vector<double> bids;
};

/// Literal execution of the task-allocation pseudocode:
///   sort workers ascending by value; bids <- prior (zeros if empty);
///   for each task: idx <- first position with bids[idx] >= task.value,
///                  else the last position; assign; bids[idx] <- max(bids[idx], task.value).
/// `prior_bids`, when given, must be indexed by sorted position and have
/// the same length as `values`. Throws InputError on empty `values`.
LiteralAllocation allocate_tasks_literal(std::span<const double> values,
                                         std::span<const Task> tasks,
                                         std::span<const double> prior_bids = {});

/// d_j * v charged to the client.
double mn_revenue(const Task& task, double unit_price);

}  // namespace aucrac
