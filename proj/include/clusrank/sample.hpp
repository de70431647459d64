#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace clusrank {

struct Record {
    double value = 0.0;
    std::string cluster;
    std::optional<std::string> group;
    std::optional<std::string> stratum;
};

/// Validated clustered observations.
///
/// Records are stably sorted by cluster label, so cluster `i` occupies the
/// half-open range `[cluster_begin(i), cluster_end(i))`. Labels are opaque
/// strings; group and stratum codes index into the lexicographically sorted
/// label tables, which makes group code 0 the "group 1" of the formulas.
class ClusteredSample {
public:
    /// Validates `rows` and builds the sample. Throws clusrank::Error on empty
    /// input, non-finite values, missing group labels (unpaired), fewer than
    /// two clusters or two groups, and partially present strata.
    static ClusteredSample ingest(std::vector<Record> rows, bool paired);

    bool paired() const { return paired_; }
    bool has_strata() const { return !stratum_labels_.empty(); }

    std::size_t size() const { return values_.size(); }
    std::size_t cluster_count() const { return cluster_labels_.size(); }
    std::size_t group_count() const { return group_labels_.size(); }
    std::size_t stratum_count() const { return stratum_labels_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<const int> cluster_codes() const { return cluster_codes_; }
    std::span<const int> group_codes() const { return group_codes_; }
    std::span<const int> stratum_codes() const { return stratum_codes_; }

    std::size_t cluster_begin(std::size_t i) const { return offsets_[i]; }
    std::size_t cluster_end(std::size_t i) const { return offsets_[i + 1]; }
    std::size_t cluster_size(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
    std::span<const double> cluster_values(std::size_t i) const {
        return std::span<const double>(values_).subspan(offsets_[i], cluster_size(i));
    }

    const std::vector<std::string>& cluster_labels() const { return cluster_labels_; }
    const std::vector<std::string>& group_labels() const { return group_labels_; }
    const std::vector<std::string>& stratum_labels() const { return stratum_labels_; }

    /// True when every cluster carries a single group label.
    bool cluster_level_grouping() const;

    /// Group code shared by all records of cluster `i`; only meaningful when
    /// cluster_level_grouping() holds.
    int cluster_group(std::size_t i) const { return group_codes_[offsets_[i]]; }

    /// Records in canonical order, suitable for re-ingesting.
    std::vector<Record> records() const;

    /// Same structure with values replaced (size must match).
    ClusteredSample with_values(std::vector<double> values) const;

private:
    ClusteredSample() = default;

    bool paired_ = false;
    std::vector<double> values_;
    std::vector<int> cluster_codes_;
    std::vector<int> group_codes_;
    std::vector<int> stratum_codes_;
    std::vector<std::size_t> offsets_;
    std::vector<std::string> cluster_labels_;
    std::vector<std::string> group_labels_;
    std::vector<std::string> stratum_labels_;
};

/// Mid-ranks (1-based); tied values share the average of the ranks they span.
std::vector<double> midranks(std::span<const double> values);

/// (F(x), F(x-)) for the empirical distribution of `values`.
std::pair<double, double> ecdf_pair(std::span<const double> values, double x);

/// Pooled ECDF of all values in the sample, evaluated at `x`.
double pooled_ecdf(const ClusteredSample& sample, double x);

/// Empirical distribution of one set of values, held sorted for O(log n)
/// evaluation of F(x) and F(x-).
class SortedEcdf {
public:
    SortedEcdf() = default;
    explicit SortedEcdf(std::span<const double> values);

    std::size_t size() const { return sorted_.size(); }
    double at(double x) const;         // F(x)
    double left_limit(double x) const; // F(x-)
    /// (F(x) + F(x-)) / 2
    double mid(double x) const { return 0.5 * (at(x) + left_limit(x)); }

private:
    std::vector<double> sorted_;
};

/// Mid-ranks over the pooled sample plus per-cluster rank sums.
struct RankedView {
    std::vector<double> ranks;
    std::vector<double> cluster_rank_sums;

    static RankedView of(const ClusteredSample& sample);
};

} // namespace clusrank
