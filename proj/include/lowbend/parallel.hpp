#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace lowbend {

/// Worker count: LOWBEND_THREADS if set, else hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n). Work is split by index, so results written
/// per index are independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise (tree) summation with a fixed reduction order.
double pairwise_sum(std::span<const double> values);

}  // namespace lowbend
