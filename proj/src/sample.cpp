#include "clusrank/sample.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "clusrank/types.hpp"

namespace clusrank {

namespace {

// Sorted distinct labels and the code of each input label.
std::pair<std::vector<std::string>, std::vector<int>> encode(const std::vector<const std::string*>& labels) {
    std::map<std::string, int> table;
    for (const auto* l : labels) {
        table.emplace(*l, 0);
    }
    std::vector<std::string> sorted;
    sorted.reserve(table.size());
    int next = 0;
    for (auto& [label, code] : table) {
        code = next++;
        sorted.push_back(label);
    }
    std::vector<int> codes;
    codes.reserve(labels.size());
    for (const auto* l : labels) {
        codes.push_back(table.at(*l));
    }
    return {std::move(sorted), std::move(codes)};
}

} // namespace

ClusteredSample ClusteredSample::ingest(std::vector<Record> rows, bool paired) {
    if (rows.empty()) {
        throw Error("empty input");
    }

    std::size_t with_stratum = 0;
    for (const auto& r : rows) {
        if (!std::isfinite(r.value)) {
            throw Error("non-finite value");
        }
        if (!paired && !r.group) {
            throw Error("missing group label for cluster '" + r.cluster + "'");
        }
        if (r.stratum) {
            ++with_stratum;
        }
    }
    if (with_stratum != 0 && with_stratum != rows.size()) {
        throw Error("stratum label present on some records but not others");
    }

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].cluster < rows[b].cluster; });

    ClusteredSample out;
    out.paired_ = paired;
    out.values_.reserve(rows.size());

    std::vector<const std::string*> clusters, groups, strata;
    clusters.reserve(rows.size());
    for (auto idx : order) {
        const auto& r = rows[idx];
        out.values_.push_back(r.value);
        clusters.push_back(&r.cluster);
        if (!paired) {
            groups.push_back(&*r.group);
        }
        if (with_stratum != 0) {
            strata.push_back(&*r.stratum);
        }
    }

    std::tie(out.cluster_labels_, out.cluster_codes_) = encode(clusters);
    if (out.cluster_labels_.size() < 2) {
        throw Error("fewer than 2 clusters");
    }
    if (!paired) {
        std::tie(out.group_labels_, out.group_codes_) = encode(groups);
        if (out.group_labels_.size() < 2) {
            throw Error("fewer than 2 groups");
        }
    }
    if (with_stratum != 0) {
        std::tie(out.stratum_labels_, out.stratum_codes_) = encode(strata);
    }

    out.offsets_.assign(out.cluster_labels_.size() + 1, 0);
    for (int c : out.cluster_codes_) {
        ++out.offsets_[static_cast<std::size_t>(c) + 1];
    }
    std::partial_sum(out.offsets_.begin(), out.offsets_.end(), out.offsets_.begin());
    return out;
}

bool ClusteredSample::cluster_level_grouping() const {
    if (group_codes_.empty()) {
        return false;
    }
    for (std::size_t i = 0; i < cluster_count(); ++i) {
        const int g = group_codes_[offsets_[i]];
        for (auto k = offsets_[i] + 1; k < offsets_[i + 1]; ++k) {
            if (group_codes_[k] != g) {
                return false;
            }
        }
    }
    return true;
}

std::vector<Record> ClusteredSample::records() const {
    std::vector<Record> out;
    out.reserve(size());
    for (std::size_t k = 0; k < size(); ++k) {
        Record r;
        r.value = values_[k];
        r.cluster = cluster_labels_[static_cast<std::size_t>(cluster_codes_[k])];
        if (!group_codes_.empty()) {
            r.group = group_labels_[static_cast<std::size_t>(group_codes_[k])];
        }
        if (!stratum_codes_.empty()) {
            r.stratum = stratum_labels_[static_cast<std::size_t>(stratum_codes_[k])];
        }
        out.push_back(std::move(r));
    }
    return out;
}

ClusteredSample ClusteredSample::with_values(std::vector<double> values) const {
    if (values.size() != values_.size()) {
        throw Error("value count does not match sample size");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error("non-finite value");
        }
    }
    ClusteredSample out = *this;
    out.values_ = std::move(values);
    return out;
}

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) {
            ++j;
        }
        // positions i..j-1 hold ranks i+1..j
        const double r = 0.5 * static_cast<double>(i + 1 + j);
        for (auto k = i; k < j; ++k) {
            ranks[order[k]] = r;
        }
        i = j;
    }
    return ranks;
}

std::pair<double, double> ecdf_pair(std::span<const double> values, double x) {
    if (values.empty()) {
        throw Error("empty cluster");
    }
    std::size_t le = 0, lt = 0;
    for (double v : values) {
        le += (v <= x);
        lt += (v < x);
    }
    const auto n = static_cast<double>(values.size());
    return {static_cast<double>(le) / n, static_cast<double>(lt) / n};
}

double pooled_ecdf(const ClusteredSample& sample, double x) {
    std::size_t le = 0;
    for (double v : sample.values()) {
        le += (v <= x);
    }
    return static_cast<double>(le) / static_cast<double>(sample.size());
}

SortedEcdf::SortedEcdf(std::span<const double> values) : sorted_(values.begin(), values.end()) {
    if (sorted_.empty()) {
        throw Error("empty cluster");
    }
    std::sort(sorted_.begin(), sorted_.end());
}

double SortedEcdf::at(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double SortedEcdf::left_limit(double x) const {
    const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

RankedView RankedView::of(const ClusteredSample& sample) {
    RankedView view;
    view.ranks = midranks(sample.values());
    view.cluster_rank_sums.assign(sample.cluster_count(), 0.0);
    const auto codes = sample.cluster_codes();
    for (std::size_t k = 0; k < view.ranks.size(); ++k) {
        view.cluster_rank_sums[static_cast<std::size_t>(codes[k])] += view.ranks[k];
    }
    return view;
}

} // namespace clusrank
