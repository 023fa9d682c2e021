#include "qsocp/amd.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "qsocp/errors.hpp"

namespace qsocp {

namespace {

// Quotient graph used during elimination. Uneliminated variables keep a list
// of variable neighbours and a list of adjacent elements; each element keeps
// the variables of its clique.
struct QuotientGraph {
    std::vector<std::vector<std::size_t>> var_adj;
    std::vector<std::vector<std::size_t>> var_elems;
    std::vector<std::vector<std::size_t>> elem_vars;
    std::vector<char> eliminated;
};

void erase_value(std::vector<std::size_t>& v, std::size_t value) {
    const auto it = std::find(v.begin(), v.end(), value);
    if (it != v.end()) {
        *it = v.back();
        v.pop_back();
    }
}

}  // namespace

std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> inv(perm.size(), kNoIndex);
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (perm[k] >= perm.size() || inv[perm[k]] != kNoIndex) {
            throw InvalidProblem("invert_permutation: not a permutation");
        }
        inv[perm[k]] = k;
    }
    return inv;
}

std::vector<std::size_t> amd_order(const SparseCCS& pattern) {
    if (pattern.nrows != pattern.ncols) throw InvalidProblem("amd_order: matrix must be square");
    const std::size_t n = pattern.ncols;

    QuotientGraph g;
    g.var_adj.resize(n);
    g.var_elems.resize(n);
    g.elem_vars.resize(n);
    g.eliminated.assign(n, 0);

    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = pattern.col_offsets[j]; p < pattern.col_offsets[j + 1]; ++p) {
            const std::size_t i = pattern.row_indices[p];
            if (i == j) continue;
            g.var_adj[i].push_back(j);
            g.var_adj[j].push_back(i);
        }
    }
    for (auto& adj : g.var_adj) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }

    std::vector<std::size_t> degree(n);
    std::set<std::pair<std::size_t, std::size_t>> queue;
    for (std::size_t i = 0; i < n; ++i) {
        degree[i] = g.var_adj[i].size();
        queue.emplace(degree[i], i);
    }

    std::vector<std::size_t> mark(n, kNoIndex);   // membership stamp for L_p
    std::vector<std::size_t> ext(n, kNoIndex);    // |L_e \ L_p| per element
    std::vector<std::size_t> ext_touched;
    std::vector<std::size_t> order;
    order.reserve(n);

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t piv = queue.begin()->second;
        queue.erase(queue.begin());
        order.push_back(piv);
        g.eliminated[piv] = 1;

        // L_p = A_p U (union of adjacent elements) minus the pivot.
        std::vector<std::size_t> lp;
        mark[piv] = piv;
        auto add = [&](std::size_t v) {
            if (mark[v] != piv && !g.eliminated[v]) {
                mark[v] = piv;
                lp.push_back(v);
            }
        };
        for (std::size_t v : g.var_adj[piv]) add(v);
        for (std::size_t e : g.var_elems[piv]) {
            for (std::size_t v : g.elem_vars[e]) add(v);
        }
        std::sort(lp.begin(), lp.end());

        // Elements adjacent to the pivot are absorbed into the new element.
        std::vector<std::size_t> absorbed = std::move(g.var_elems[piv]);
        for (std::size_t e : absorbed) {
            g.elem_vars[e].clear();
            g.elem_vars[e].shrink_to_fit();
        }
        g.var_adj[piv].clear();
        g.var_elems[piv].clear();
        g.elem_vars[piv] = lp;

        for (std::size_t i : lp) {
            auto& elems = g.var_elems[i];
            for (std::size_t e : absorbed) erase_value(elems, e);
            elems.push_back(piv);
            // Variable edges inside L_p are now represented by the element.
            auto& adj = g.var_adj[i];
            adj.erase(std::remove_if(adj.begin(), adj.end(),
                                     [&](std::size_t v) { return v == piv || mark[v] == piv; }),
                      adj.end());
        }

        // |L_e \ L_p| for every other element touching L_p.
        for (std::size_t i : lp) {
            for (std::size_t e : g.var_elems[i]) {
                if (e == piv) continue;
                if (ext[e] == kNoIndex) {
                    ext[e] = g.elem_vars[e].size();
                    ext_touched.push_back(e);
                }
                --ext[e];
            }
        }

        const std::size_t remaining = n - k - 1;
        const std::size_t lp_size = lp.size();
        for (std::size_t i : lp) {
            std::size_t approx = g.var_adj[i].size() + (lp_size - 1);
            for (std::size_t e : g.var_elems[i]) {
                if (e != piv) approx += ext[e];
            }
            const std::size_t bound = degree[i] + lp_size - 1;
            const std::size_t d = std::min({remaining == 0 ? 0 : remaining - 1, bound, approx});
            if (d != degree[i]) {
                queue.erase({degree[i], i});
                degree[i] = d;
                queue.emplace(d, i);
            }
        }
        for (std::size_t e : ext_touched) ext[e] = kNoIndex;
        ext_touched.clear();
    }
    return order;
}

}  // namespace qsocp
