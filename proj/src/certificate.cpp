#include "tilewalsh/certificate.hpp"

#include <algorithm>
#include <cmath>

namespace tilewalsh {

Certificate make_certificate(std::string name, Quantity lhs, Quantity rhs, bool theorem_backed,
                             std::vector<std::pair<std::string, std::string>> context) {
  Certificate c;
  c.name = std::move(name);
  c.theorem_backed = theorem_backed;
  c.context = std::move(context);
  const auto* ql = std::get_if<Rational>(&lhs);
  const auto* qr = std::get_if<Rational>(&rhs);
  if (ql && qr) {
    c.exact = true;
    c.pass = *ql <= *qr;
  } else {
    c.exact = false;
    const double l = quantity_to_double(lhs);
    const double r = quantity_to_double(rhs);
    c.pass = l <= r + kFloatTolerance * std::abs(r);
  }
  c.lhs = std::move(lhs);
  c.rhs = std::move(rhs);
  return c;
}

bool all_theorem_backed_pass(const std::vector<Certificate>& certs) {
  return std::all_of(certs.begin(), certs.end(), [](const Certificate& c) { return !c.theorem_backed || c.pass; });
}

}  // namespace tilewalsh
