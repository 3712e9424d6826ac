#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evfusion/model.hpp"

namespace evfusion {

/// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(std::span<const double> p);

/// Joint entropy of every cell of `t`, in bits.
double joint_entropy(const CouplingTable& t);

/// Mutual information of a two-axis table, in bits, summed cell by cell
/// against the product of its own marginals.
double mutual_information(const CouplingTable& t);

/// Sums out every axis except `axis`.
std::vector<double> marginalize(const CouplingTable& t, std::size_t axis);

}  // namespace evfusion
