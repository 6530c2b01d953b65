#pragma once

#include <vector>

#include "ggm/poly.hpp"

namespace ggm {

/// Remainder of p under full division by `basis` (grevlex).
Poly reduce_by(const Poly& p, const std::vector<Poly>& basis);

/// Reduced, monic Groebner basis of the ideal generated by `gens`, sorted by
/// leading monomial.
std::vector<Poly> reduced_groebner(const std::vector<Poly>& gens);

/// Buchberger criterion: every S-polynomial reduces to zero.
bool is_groebner(const std::vector<Poly>& basis);

}  // namespace ggm
