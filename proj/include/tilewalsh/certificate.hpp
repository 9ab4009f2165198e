#pragma once

// A single checked inequality lhs <= rhs, exact or with relative tolerance 1e-9.

#include <string>
#include <utility>
#include <vector>

#include "tilewalsh/numeric.hpp"

namespace tilewalsh {

inline constexpr double kFloatTolerance = 1e-9;

struct Certificate {
  std::string name;
  Quantity lhs;
  Quantity rhs;
  bool exact = true;
  bool pass = true;
  /// Only theorem-backed certificates gate exit codes and CI.
  bool theorem_backed = true;
  std::vector<std::pair<std::string, std::string>> context;
};

/// Exact when both sides are rational, float otherwise.
Certificate make_certificate(std::string name, Quantity lhs, Quantity rhs, bool theorem_backed,
                             std::vector<std::pair<std::string, std::string>> context = {});

bool all_theorem_backed_pass(const std::vector<Certificate>& certs);

}  // namespace tilewalsh
