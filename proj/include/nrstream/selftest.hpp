#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nrstream {

struct SelftestCheck {
  std::string name;
  bool ok = false;
  std::string detail;  // first failing witness; empty when ok
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  bool ok() const;
};

// Fast build-sanity suites over small instances: field axioms plus
// table-vs-reference agreement, inner-code distances, curve-decoder radii,
// confidence denominators, and the stream-length formula. A nonzero
// mutation_seed corrupts one product in the multiply the axiom suite uses,
// demonstrating the checks can actually fail; 0 tests the real thing.
SelftestReport run_selftest(std::uint64_t mutation_seed = 0);

}  // namespace nrstream
