#pragma once

#include <span>
#include <vector>

#include "evfusion/model.hpp"

namespace evfusion {

using Marginals = std::vector<std::vector<double>>;

/// Independent (product) coupling: each cell is the product of its axis
/// marginal entries. This is the coupling of least mutual information.
CouplingTable min_mi_coupling(const Marginals& marginals);

/// Greedy low-entropy coupling. Repeatedly joins the largest residual mass of
/// every axis into one cell, moving the smallest of those masses, so large
/// probability masses stay whole. Ties go to the lowest index. Residuals below
/// 1e-12 are treated as exhausted.
CouplingTable max_mi_coupling(const Marginals& marginals);

/// Cellwise `rho * t_max + (1 - rho) * t_min`. Both tables must have the same
/// shape and the same marginals.
CouplingTable blend_couplings(const CouplingTable& t_max, const CouplingTable& t_min, double rho);

/// `blend_couplings(max_mi_coupling(m), min_mi_coupling(m), rho)`.
CouplingTable blended_coupling(const Marginals& marginals, double rho);

}  // namespace evfusion
