#pragma once

#include <cstddef>
#include <vector>

#include "qsocp/ccs.hpp"

namespace qsocp {

/// Fill-reducing approximate minimum degree ordering of a symmetric pattern.
///
/// Only the structure of `pattern` is read; entries in either triangle are
/// treated symmetrically and the diagonal is ignored. The result `perm` lists
/// original indices in elimination order (perm[k] is eliminated k-th).
/// Degree ties go to the smallest original index, so the output is
/// deterministic. Element absorption is limited to the elements adjacent to
/// the pivot (no aggressive absorption).
///
/// Throws InvalidProblem for non-square input.
std::vector<std::size_t> amd_order(const SparseCCS& pattern);

/// Inverse of a permutation: inv[perm[k]] = k. Throws InvalidProblem if
/// `perm` is not a permutation.
std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& perm);

}  // namespace qsocp
