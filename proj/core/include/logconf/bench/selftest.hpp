#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace logconf::bench {

/// One oracle comparison: the worst error over `samples` random draws.
struct SelfTestCheck {
  int group{0};  ///< checks sharing a group share a runtime budget
  std::string name;
  int samples{0};
  double max_error{0.0};
  double tolerance{0.0};
  double seconds{0.0};

  [[nodiscard]] bool passed() const { return max_error <= tolerance; }
};

struct SelfTestGroup {
  int id{0};
  std::string title;
  double time_limit{0.0};  ///< seconds
};

const std::vector<SelfTestGroup>& selftest_groups();

/// Closed form of the strain coupling against its Bernoulli series.
std::vector<SelfTestCheck> selftest_series(std::uint64_t seed);
/// Closed form beyond the series radius against the Wilcox integral.
std::vector<SelfTestCheck> selftest_continuation(std::uint64_t seed);
/// Hadamard conjugation, iterated commutators and the exponential derivative.
std::vector<SelfTestCheck> selftest_appendix(std::uint64_t seed);
/// Log-conformation residual mapped back to the conformation equation.
std::vector<SelfTestCheck> selftest_transfer(std::uint64_t seed);

std::vector<SelfTestCheck> run_selftests(std::uint64_t seed = 20240611);

/// Total runtime of a group's checks.
double group_seconds(const std::vector<SelfTestCheck>& checks, int group);

}  // namespace logconf::bench
