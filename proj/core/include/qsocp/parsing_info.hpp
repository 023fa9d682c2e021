#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qsocp/plan.hpp"
#include "qsocp/problem.hpp"

namespace qsocp {

struct ParsingEntry {
    std::string label;
    MatrixId matrix = MatrixId::Q;
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t ccs_index = 0;  // position in the matrix's values array
    std::size_t kkt_slot = 0;   // position in the KKT values array

    friend bool operator==(const ParsingEntry&, const ParsingEntry&) = default;
};

/// Where each structural nonzero of Q, A and G lives, in both the CCS value
/// array of its matrix and the assembled KKT matrix.
struct ParsingInfo {
    std::vector<ParsingEntry> entries;

    /// One line per entry: label, matrix, row, col, ccs_index, kkt_slot,
    /// separated by tabs.
    std::string to_text() const;
};

/// Entries follow Q, A, G in CCS order. Unlabeled families get labels of
/// the form "Q[i,j]". Throws InvalidProblem on duplicate labels or when the
/// plan was built for a different family.
ParsingInfo emit_parsing_info(const ProblemFamily& family, const CustomizationPlan& plan);

}  // namespace qsocp
