#include "qsocp/parsing_info.hpp"

#include <sstream>
#include <unordered_set>

#include "qsocp/errors.hpp"

namespace qsocp {

std::string ParsingInfo::to_text() const {
    std::ostringstream out;
    for (const ParsingEntry& e : entries) {
        out << e.label << '\t' << matrix_name(e.matrix) << '\t' << e.row << '\t' << e.col << '\t'
            << e.ccs_index << '\t' << e.kkt_slot << '\n';
    }
    return out.str();
}

ParsingInfo emit_parsing_info(const ProblemFamily& family, const CustomizationPlan& plan) {
    const ProblemFamily& pf = plan.family();
    if (family.n != pf.n || family.p != pf.p || family.m != pf.m || !(family.cone == pf.cone) ||
        !family.Q.same_pattern(pf.Q) || !family.A.same_pattern(pf.A) ||
        !family.G.same_pattern(pf.G)) {
        throw InvalidProblem("emit_parsing_info: plan was built for a different family");
    }
    ParsingInfo info;
    std::unordered_set<std::string> seen;
    for (MatrixId id : {MatrixId::Q, MatrixId::A, MatrixId::G}) {
        const SparseCCS& a = family.pattern(id);
        const auto& labels = family.labels(id);
        const auto& slots = id == MatrixId::Q   ? plan.layout.Q_slots
                            : id == MatrixId::A ? plan.layout.A_slots
                                                : plan.layout.G_slots;
        for (std::size_t j = 0; j < a.ncols; ++j) {
            for (std::size_t k = a.col_offsets[j]; k < a.col_offsets[j + 1]; ++k) {
                ParsingEntry e;
                e.matrix = id;
                e.row = a.row_indices[k];
                e.col = j;
                e.ccs_index = k;
                e.kkt_slot = slots[k];
                e.label = labels.empty() ? std::string(matrix_name(id)) + "[" +
                                               std::to_string(e.row) + "," + std::to_string(j) + "]"
                                         : labels[k];
                if (!seen.insert(e.label).second) {
                    throw InvalidProblem("emit_parsing_info: duplicate label '" + e.label + "'");
                }
                info.entries.push_back(std::move(e));
            }
        }
    }
    return info;
}

}  // namespace qsocp
