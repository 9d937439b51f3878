#include "sol/core.hpp"

#include <cmath>

namespace sol {

SolPoint conjugate_horizontal(SolPoint g, SolPoint h) {
  if (std::abs(h.z) > 1e-12)
    throw InputError("conjugate_horizontal: h must be horizontal (|h.z| <= 1e-12), got h.z = " +
                     std::to_string(h.z));
  const double ez = detail::checked_exp(g.z, "conjugate_horizontal");
  return {h.x / ez, ez * h.y, 0.0};
}

}  // namespace sol
