#include "pbc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

struct Contingency {
    std::size_t kp = 0, kt = 0;
    std::vector<std::uint64_t> cells;  // kp x kt
    std::vector<std::uint64_t> rows, cols;
    std::uint64_t m = 0;

    std::uint64_t at(std::size_t i, std::size_t j) const {
        return cells[i * kt + j];
    }
};

Contingency contingency(const Labels& pred, const Labels& truth) {
    if (pred.assignment.size() != truth.assignment.size())
        throw LengthMismatch("label vectors have different lengths");
    Contingency c;
    c.kp = static_cast<std::size_t>(pred.k);
    c.kt = static_cast<std::size_t>(truth.k);
    c.m = pred.assignment.size();
    c.cells.assign(c.kp * c.kt, 0);
    c.rows.assign(c.kp, 0);
    c.cols.assign(c.kt, 0);
    for (std::size_t s = 0; s < pred.assignment.size(); ++s) {
        const std::size_t i = static_cast<std::size_t>(pred.assignment[s] - 1);
        const std::size_t j = static_cast<std::size_t>(truth.assignment[s] - 1);
        ++c.cells[i * c.kt + j];
        ++c.rows[i];
        ++c.cols[j];
    }
    return c;
}

std::uint64_t choose2(std::uint64_t n) { return n * (n - 1) / 2; }

/// True when every occupied cell is alone in both its row and column, i.e.
/// the partitions coincide up to relabeling.
bool identical_up_to_relabeling(const Contingency& c) {
    for (std::size_t i = 0; i < c.kp; ++i)
        for (std::size_t j = 0; j < c.kt; ++j)
            if (c.at(i, j) > 0 &&
                (c.at(i, j) != c.rows[i] || c.at(i, j) != c.cols[j]))
                return false;
    return true;
}

}  // namespace

EvalReport evaluate(const Labels& pred, const Labels& truth) {
    if (pred.assignment.size() < 2)
        throw InvalidArgument("pairwise accuracy needs at least two samples");
    const Contingency c = contingency(pred, truth);
    std::uint64_t same_both = 0, same_pred = 0, same_truth = 0;
    for (const std::uint64_t v : c.cells) same_both += choose2(v);
    for (const std::uint64_t v : c.rows) same_pred += choose2(v);
    for (const std::uint64_t v : c.cols) same_truth += choose2(v);
    const std::uint64_t total = choose2(c.m);

    EvalReport rep;
    rep.agree_together = same_both;
    rep.agree_apart = total - same_pred - same_truth + same_both;
    rep.disagree = total - rep.agree_together - rep.agree_apart;
    rep.ac_percent = 100.0 *
                     static_cast<double>(rep.agree_together + rep.agree_apart) /
                     static_cast<double>(total);
    rep.mi_percent = mutual_information(pred, truth);
    return rep;
}

double accuracy(const Labels& pred, const Labels& truth) {
    return evaluate(pred, truth).ac_percent;
}

double mutual_information(const Labels& pred, const Labels& truth) {
    const Contingency c = contingency(pred, truth);
    if (identical_up_to_relabeling(c)) return 100.0;

    const double m = static_cast<double>(c.m);
    auto entropy = [&](const std::vector<std::uint64_t>& marg) {
        double h = 0.0;
        for (const std::uint64_t v : marg)
            if (v > 0) {
                const double p = static_cast<double>(v) / m;
                h -= p * std::log(p);
            }
        return h;
    };
    const double hp = entropy(c.rows);
    const double ht = entropy(c.cols);
    if (hp == 0.0 || ht == 0.0) return 0.0;  // differing zero-entropy partition

    double info = 0.0;
    for (std::size_t i = 0; i < c.kp; ++i)
        for (std::size_t j = 0; j < c.kt; ++j) {
            const std::uint64_t n = c.at(i, j);
            if (n == 0) continue;
            const double p = static_cast<double>(n) / m;
            info += p * std::log(static_cast<double>(n) * m /
                                 (static_cast<double>(c.rows[i]) *
                                  static_cast<double>(c.cols[j])));
        }
    const double nmi = info / std::sqrt(hp * ht);
    return std::clamp(100.0 * nmi, 0.0, 100.0);
}

double best_match_accuracy(const Labels& pred, const Labels& truth) {
    const Contingency c = contingency(pred, truth);
    const std::size_t n = std::max(c.kp, c.kt);
    // Hungarian algorithm on the negated contingency (maximum matching).
    std::vector<std::vector<double>> cost(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < c.kp; ++i)
        for (std::size_t j = 0; j < c.kt; ++j)
            cost[i + 1][j + 1] = -static_cast<double>(c.at(i, j));

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = std::numeric_limits<double>::infinity();
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0][j] - u[i0] - v[j];
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

    std::uint64_t matched = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match[j];
        if (i >= 1 && i <= c.kp && j <= c.kt) matched += c.at(i - 1, j - 1);
    }
    return 100.0 * static_cast<double>(matched) / static_cast<double>(c.m);
}

}  // namespace pbc
