#include "qsocp/instance_io.hpp"

#include <string>

#include "binary_io.hpp"
#include "qsocp/errors.hpp"
#include "qsocp/plan.hpp"

namespace qsocp {

namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr char kMagic[5] = "CFPB";

void write_matrix(ByteWriter& w, const SparseCCS& a) {
    w.u32(a.nnz());
    w.u32_array(a.col_offsets);
    w.u32_array(a.row_indices);
    w.f64_array(a.values);
}

SparseCCS read_matrix(ByteReader& r, std::size_t rows, std::size_t cols) {
    SparseCCS a;
    a.nrows = rows;
    a.ncols = cols;
    const std::size_t nnz = r.u32();
    a.col_offsets = r.u32_array(cols + 1);
    a.row_indices = r.u32_array(nnz);
    a.values = r.f64_array(nnz);
    return a;
}

}  // namespace

std::vector<std::uint8_t> serialize_instance(const ProblemData& d) {
    d.validate();
    ByteWriter w;
    w.magic(kMagic);
    w.u32(kInstanceFormatVersion);
    w.u32(d.n);
    w.u32(d.p);
    w.u32(d.m);
    w.u32(d.cone.nn_count);
    w.u32(d.cone.soc_count());
    w.u32_array(d.cone.soc_dims);
    write_matrix(w, d.Q);
    write_matrix(w, d.A);
    write_matrix(w, d.G);
    w.f64_array(d.q);
    w.f64_array(d.b);
    w.f64_array(d.h);
    return w.finish();
}

ProblemData deserialize_instance(std::span<const std::uint8_t> bytes) {
    using Kind = FormatError::Kind;
    ByteReader r(bytes, kMagic, "instance");
    const std::size_t version = r.u32();
    if (version != kInstanceFormatVersion) {
        r.fail(Kind::VersionMismatch, "unsupported version " + std::to_string(version));
    }
    ProblemData d;
    d.n = r.u32();
    d.p = r.u32();
    d.m = r.u32();
    d.cone.nn_count = r.u32();
    const std::size_t n_soc = r.u32();
    d.cone.soc_dims = r.u32_array(n_soc);
    d.Q = read_matrix(r, d.n, d.n);
    d.A = read_matrix(r, d.p, d.n);
    d.G = read_matrix(r, d.m, d.n);
    d.q = r.f64_array(d.n);
    d.b = r.f64_array(d.p);
    d.h = r.f64_array(d.m);
    r.finish();
    try {
        d.validate();
    } catch (const Error& e) {
        r.fail(Kind::Malformed, e.what());
    }
    return d;
}

void write_instance(const std::filesystem::path& path, const ProblemData& problem) {
    write_file_bytes(path, serialize_instance(problem));
}

ProblemData read_instance(const std::filesystem::path& path) {
    return deserialize_instance(read_file_bytes(path));
}

}  // namespace qsocp
