#include "qsocp/plan.hpp"

#include <fstream>
#include <iterator>

#include "binary_io.hpp"
#include "qsocp/amd.hpp"
#include "qsocp/errors.hpp"

namespace qsocp {

namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr char kMagic[5] = "CFPL";

void write_pattern(ByteWriter& w, const SparseCCS& a, const std::vector<std::string>& labels) {
    w.u32(a.nnz());
    w.u32_array(a.col_offsets);
    w.u32_array(a.row_indices);
    w.u32(labels.size());
    for (const auto& l : labels) w.string(l);
}

SparseCCS read_pattern(ByteReader& r, std::size_t rows, std::size_t cols,
                       std::vector<std::string>& labels) {
    SparseCCS a;
    a.nrows = rows;
    a.ncols = cols;
    const std::size_t nnz = r.u32();
    a.col_offsets = r.u32_array(cols + 1);
    a.row_indices = r.u32_array(nnz);
    a.values.assign(nnz, 0.0);
    try {
        a.validate();
    } catch (const InvalidProblem& e) {
        r.fail(FormatError::Kind::Malformed, e.what());
    }
    const std::size_t count = r.u32();
    r.need(count, 4);
    labels.clear();
    for (std::size_t i = 0; i < count; ++i) labels.push_back(r.string());
    return a;
}

}  // namespace

CustomizationPlan analyze_family(const ProblemFamily& family) {
    CustomizationPlan plan;
    plan.layout = kkt_layout(family);
    plan.symbolic = symbolic_ldl(plan.layout.pattern, amd_order(plan.layout.pattern));
    return plan;
}

std::vector<std::uint8_t> serialize_plan(const CustomizationPlan& plan) {
    const KKTLayout& L = plan.layout;
    const ProblemFamily& f = L.family;
    const SymbolicFactor& s = plan.symbolic;
    ByteWriter w;
    w.magic(kMagic);
    w.u32(CustomizationPlan::kFormatVersion);
    w.u32(L.dim);
    w.u32(f.n);
    w.u32(f.p);
    w.u32(f.m);
    w.u32(f.cone.nn_count);
    w.u32(f.cone.soc_count());
    w.u32_array(f.cone.soc_dims);
    write_pattern(w, f.Q, f.Q_labels);
    write_pattern(w, f.A, f.A_labels);
    write_pattern(w, f.G, f.G_labels);
    w.u32_array(s.perm);
    w.u32_array(s.L_col_offsets);
    w.u32(s.nnz_L());
    w.u32_array(s.L_row_indices);
    w.index_array(s.etree);
    w.u32_array(L.Q_slots);
    w.u32_array(L.A_slots);
    w.u32_array(L.G_slots);
    w.u32(L.scaling_slots.size());
    w.u32_array(L.scaling_slots);
    return w.finish();
}

CustomizationPlan deserialize_plan(std::span<const std::uint8_t> bytes) {
    using Kind = FormatError::Kind;
    ByteReader r(bytes, kMagic, "plan");
    const std::size_t version = r.u32();
    if (version != CustomizationPlan::kFormatVersion) {
        r.fail(Kind::VersionMismatch, "unsupported version " + std::to_string(version));
    }
    const std::size_t dim = r.u32();
    ProblemFamily f;
    f.n = r.u32();
    f.p = r.u32();
    f.m = r.u32();
    f.cone.nn_count = r.u32();
    const std::size_t n_soc = r.u32();
    f.cone.soc_dims = r.u32_array(n_soc);
    f.Q = read_pattern(r, f.n, f.n, f.Q_labels);
    f.A = read_pattern(r, f.p, f.n, f.A_labels);
    f.G = read_pattern(r, f.m, f.n, f.G_labels);
    const auto perm = r.u32_array(dim);
    const auto L_offsets = r.u32_array(dim + 1);
    const std::size_t nnz_L = r.u32();
    const auto L_rows = r.u32_array(nnz_L);
    const auto etree = r.index_array(dim);
    const auto Q_slots = r.u32_array(f.Q.nnz());
    const auto A_slots = r.u32_array(f.A.nnz());
    const auto G_slots = r.u32_array(f.G.nnz());
    const std::size_t n_scaling = r.u32();
    const auto scaling_slots = r.u32_array(n_scaling);
    r.finish();

    CustomizationPlan plan;
    try {
        plan.layout = kkt_layout(f);
        if (plan.layout.dim != dim) r.fail(Kind::Malformed, "kkt_dim disagrees with the family");
        plan.symbolic = symbolic_ldl(plan.layout.pattern, perm);
    } catch (const FormatError&) {
        throw;
    } catch (const Error& e) {
        r.fail(Kind::Malformed, e.what());
    }
    const SymbolicFactor& s = plan.symbolic;
    if (s.L_col_offsets != L_offsets || s.L_row_indices != L_rows || s.etree != etree) {
        r.fail(Kind::Malformed, "factor pattern disagrees with the permutation");
    }
    if (plan.layout.Q_slots != Q_slots || plan.layout.A_slots != A_slots ||
        plan.layout.G_slots != G_slots || plan.layout.scaling_slots != scaling_slots) {
        r.fail(Kind::Malformed, "slot maps disagree with the family");
    }
    return plan;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + path.string());
}

void save_plan(const std::filesystem::path& path, const CustomizationPlan& plan) {
    write_file_bytes(path, serialize_plan(plan));
}

CustomizationPlan load_plan(const std::filesystem::path& path) {
    return deserialize_plan(read_file_bytes(path));
}

}  // namespace qsocp
