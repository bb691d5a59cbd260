#pragma once

#include "gmt/core/grid_field.hpp"
#include "gmt/core/measure.hpp"
#include "gmt/core/mollifier.hpp"

namespace gmt {

/// Smallest kernel scale accepted on a grid: two cell spacings.
[[nodiscard]] double min_resolvable_delta(const GridSpec& spec);

/// ρ_δ ∗ ν sampled on the grid. Each atom's stencil is normalised so that it
/// carries exactly m_a over the (virtual, unbounded) lattice; whatever part
/// of it falls outside the grid is lost. Throws ResolutionError if δ is
/// below min_resolvable_delta.
[[nodiscard]] GridField mollify_measure(const AtomicMeasure& nu, const MollifierSpec& rho, const GridSpec& spec);
[[nodiscard]] GridField mollify_measure(const SignedAtomicMeasure& nu, const MollifierSpec& rho, const GridSpec& spec);

/// Discrete ρ_δ ∗ W with lattice weights normalised to one; near the grid
/// boundary the weights are renormalised over the cells inside the grid.
[[nodiscard]] GridField mollify_field(const GridField& W, const MollifierSpec& rho);

}  // namespace gmt
