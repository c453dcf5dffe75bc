#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "acmot/ac_graph.hpp"
#include "acmot/types.hpp"

namespace acmot {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct Assignment {
    std::vector<int> row_to_col;  // -1 only when there are more rows than columns
    double total_cost = 0.0;
};

namespace detail {

// Kuhn's augmenting-path search restricted to allowed[i][j].
inline bool augment(int row, const std::vector<std::vector<char>>& allowed, std::vector<int>& col_owner,
                    std::vector<char>& seen) {
    for (std::size_t j = 0; j < allowed[row].size(); ++j) {
        if (!allowed[row][j] || seen[j]) continue;
        seen[j] = 1;
        if (col_owner[j] < 0 || augment(col_owner[j], allowed, col_owner, seen)) {
            col_owner[j] = row;
            return true;
        }
    }
    return false;
}

inline bool has_perfect_matching(const std::vector<std::vector<char>>& allowed, const std::vector<int>& fixed_col) {
    const std::size_t n = allowed.size();
    std::vector<int> col_owner(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (fixed_col[i] >= 0) col_owner[static_cast<std::size_t>(fixed_col[i])] = static_cast<int>(i);
    for (std::size_t i = 0; i < n; ++i) {
        if (fixed_col[i] >= 0) continue;
        std::vector<char> seen(n, 0);
        for (std::size_t j = 0; j < n; ++j)
            if (col_owner[j] >= 0 && fixed_col[static_cast<std::size_t>(col_owner[j])] >= 0) seen[j] = 1;
        if (!augment(static_cast<int>(i), allowed, col_owner, seen)) return false;
    }
    return true;
}

}  // namespace detail

/// Minimum-cost assignment of every row to a distinct column. Infeasible cells hold
/// +infinity. Among optimal assignments the lexicographically smallest row->col mapping
/// is returned.
inline Assignment hungarian(const std::vector<std::vector<double>>& cost) {
    Assignment out;
    const std::size_t rows = cost.size();
    if (rows == 0) return out;
    const std::size_t cols = cost.front().size();
    double max_abs = 0.0;
    for (const auto& row : cost) {
        if (row.size() != cols) throw PreconditionError("hungarian: ragged cost matrix");
        bool any_finite = false;
        for (double c : row) {
            if (std::isnan(c)) throw PreconditionError("hungarian: NaN cost");
            if (std::isfinite(c)) {
                any_finite = true;
                max_abs = std::max(max_abs, std::abs(c));
            } else if (c < 0) {
                throw PreconditionError("hungarian: -infinity cost");
            }
        }
        if (!any_finite) throw PreconditionError("hungarian: row without any feasible column");
    }

    // Square the problem; padding cells cost 0, infeasible cells cost `big`.
    const std::size_t n = std::max(rows, cols);
    const double big = (max_abs + 1.0) * static_cast<double>(2 * n + 2);
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = std::isfinite(cost[i][j]) ? cost[i][j] : big;

    // Shortest augmenting path with potentials (1-indexed, column 0 is the virtual root).
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = std::numeric_limits<double>::infinity();
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> col_of(n, -1);
    for (std::size_t j = 1; j <= n; ++j) col_of[match[j] - 1] = static_cast<int>(j - 1);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto j = static_cast<std::size_t>(col_of[i]);
        if (j < cols && !std::isfinite(cost[i][j])) throw PreconditionError("hungarian: no feasible assignment");
    }

    // Every optimal assignment uses only edges that are tight for the optimal duals, so
    // the lexicographic optimum is a greedy walk over tight edges that keeps a perfect
    // matching possible.
    const double eps = 1e-9 * (1.0 + max_abs);
    std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const bool infeasible = i < rows && j < cols && !std::isfinite(cost[i][j]);
            tight[i][j] = !infeasible && std::abs(a[i][j] - u[i + 1] - v[j + 1]) <= eps;
        }
    for (std::size_t i = 0; i < n; ++i) tight[i][static_cast<std::size_t>(col_of[i])] = 1;

    std::vector<int> fixed(n, -1);
    std::vector<char> taken(n, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!tight[i][j] || taken[j]) continue;
            fixed[i] = static_cast<int>(j);
            if (detail::has_perfect_matching(tight, fixed)) {
                taken[j] = 1;
                break;
            }
            fixed[i] = -1;
        }
        if (fixed[i] < 0) fixed[i] = col_of[i];  // unreachable with consistent duals
        taken[static_cast<std::size_t>(fixed[i])] = 1;
    }

    out.row_to_col.assign(rows, -1);
    for (std::size_t i = 0; i < rows; ++i) {
        const int j = fixed[i];
        if (static_cast<std::size_t>(j) < cols) {
            out.row_to_col[i] = j;
            out.total_cost += cost[i][static_cast<std::size_t>(j)];
        }
    }
    return out;
}

/// Assignment instance for the Ambiguous states of one frame.
struct CostMatrix {
    std::vector<StateId> rows;     // Ambiguous children, ascending id
    std::vector<StateId> parents;  // union of their parents, ascending id
    std::vector<std::vector<double>> cost;  // rows x (parents + one birth column per row)

    std::size_t birth_column(std::size_t row) const { return parents.size() + row; }
    bool is_birth(std::size_t col) const { return col >= parents.size(); }
};

/// cost(i, parent j) = 1 - Aff, cost(i, own birth) = 1 - A_thre, everything else infeasible.
inline CostMatrix build_cost_matrix(const ACGraph& graph, FrameIndex frame, double a_thre) {
    CostMatrix m;
    for (StateId s : graph.frame_states(frame)) {
        const auto& n = graph.node(s);
        if (!n.merged() && n.clarity == Clarity::Ambiguous) m.rows.push_back(s);
    }
    std::sort(m.rows.begin(), m.rows.end());
    for (StateId r : m.rows)
        for (const auto& link : graph.node(r).parents) m.parents.push_back(link.id);
    std::sort(m.parents.begin(), m.parents.end());
    m.parents.erase(std::unique(m.parents.begin(), m.parents.end()), m.parents.end());

    const std::size_t cols = m.parents.size() + m.rows.size();
    m.cost.assign(m.rows.size(), std::vector<double>(cols, kInfeasible));
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        for (const auto& link : graph.node(m.rows[i]).parents) {
            const auto j = static_cast<std::size_t>(
                std::lower_bound(m.parents.begin(), m.parents.end(), link.id) - m.parents.begin());
            m.cost[i][j] = 1.0 - link.score;
        }
        m.cost[i][m.birth_column(i)] = 1.0 - a_thre;
    }
    return m;
}

}  // namespace acmot
