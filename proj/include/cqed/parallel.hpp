#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace cqed {

/// Number of workers to use when the caller passes 0.
int default_workers();

/// Runs body(i) for i in [0, n) on up to `workers` threads. Work items are
/// claimed dynamically; callers write results by index so output order never
/// depends on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

/// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace cqed
