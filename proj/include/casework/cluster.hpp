#pragma once

#include "casework/case_record.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace casework {

enum class Dimension { platforms, demographics, topics, investigation, severity, relationship };

inline constexpr std::array<Dimension, 6> kDimensions = {
    Dimension::platforms,     Dimension::demographics, Dimension::topics,
    Dimension::investigation, Dimension::severity,     Dimension::relationship};

std::string_view to_string(Dimension dimension);

/// Per-dimension weights of the case similarity score. The defaults sum to 1.
struct SimilarityWeights {
    double platforms = 0.25;
    double demographics = 0.20;
    double topics = 0.20;
    double investigation = 0.15;
    double severity = 0.15;
    double relationship = 0.05;

    double operator[](Dimension d) const;
    double sum() const;
    SimilarityWeights scaled(double factor) const;

    bool operator==(const SimilarityWeights&) const = default;
};

using TokenSet = std::set<std::string>;

/// The six comparison sets of one case.
struct CaseDimensions {
    std::array<TokenSet, 6> sets;

    TokenSet& operator[](Dimension d) { return sets[static_cast<std::size_t>(d)]; }
    const TokenSet& operator[](Dimension d) const { return sets[static_cast<std::size_t>(d)]; }
};

/// Encodes a FeatureSet as comparison sets:
///   platforms     -> platforms
///   demographics  -> victim-age buckets, victim-count bucket, perpetrator
///                    age decade, rso:true|false
///   topics        -> case_topics
///   investigation -> investigation types and agencies
///   severity      -> severity indicators and severity phrases
///   relationship  -> {relationship_to_victim}
CaseDimensions featurize(const FeatureSet& features);

/// |x ∩ y| / |x ∪ y|; two empty sets give 0.
double jaccard(const TokenSet& x, const TokenSet& y);

struct DimensionScore {
    bool present = false;  // false when both cases lack the dimension
    double jaccard = 0.0;
};

struct SimilarityBreakdown {
    std::array<DimensionScore, 6> dimensions{};
    double total = 0.0;

    const DimensionScore& operator[](Dimension d) const { return dimensions[static_cast<std::size_t>(d)]; }
};

/// Weighted sum of per-dimension Jaccard values. A dimension empty on both
/// sides contributes nothing; empty on one side scores 0 like any disjoint pair.
SimilarityBreakdown weighted_similarity(const CaseDimensions& a, const CaseDimensions& b,
                                        const SimilarityWeights& weights);
SimilarityBreakdown weighted_similarity(const FeatureSet& a, const FeatureSet& b,
                                        const SimilarityWeights& weights);

namespace cluster_names {
inline constexpr std::string_view online_digital = "Online-Digital";
inline constexpr std::string_view possession = "Possession";
inline constexpr std::string_view severe = "Severe";
inline constexpr std::string_view investigation = "Investigation";
inline constexpr std::string_view general = "General";
}  // namespace cluster_names

/// External clusters in report order.
const std::vector<std::string>& external_cluster_names();

struct ClusterConfig {
    double threshold = 0.35;
    SimilarityWeights weights;
    std::set<std::string> severe_markers{"infant", "very_young", "under_10", "sexual_assault", "production"};

    bool operator==(const ClusterConfig&) const = default;
};

/// External cluster memberships of a case; always includes General.
std::set<std::string> external_assign(const CaseRecord& record, const ClusterConfig& config = {});

struct SubGroup {
    std::string group_id;
    std::string cluster_name;
    std::vector<std::string> member_case_ids;  // sorted, size >= 2
    double mean_pairwise_similarity = 0.0;
    std::map<std::string, TokenSet> shared_characteristics;  // dimension -> common tokens
    std::string description;
};

struct SubGroupResult {
    std::vector<SubGroup> groups;
    std::vector<std::string> ungrouped;  // members with no neighbour above threshold
};

/// Single-linkage grouping: cases are linked when their similarity reaches
/// `threshold`, and each connected component of two or more cases becomes a
/// SubGroup. Throws std::invalid_argument unless 0 < threshold <= weights.sum().
SubGroupResult form_subgroups(const std::vector<CaseRecord>& members, double threshold,
                              const SimilarityWeights& weights, std::string_view cluster_name = "");

struct ClusterSummary {
    std::string name;
    std::vector<std::string> member_case_ids;  // input order
    double coverage_percent = 0.0;
    std::optional<double> avg_similarity;  // mean over all member pairs; none below 2 members
    std::vector<SubGroup> groups;
    std::vector<std::string> ungrouped;

    std::size_t count() const { return member_case_ids.size(); }
};

struct ClusterReport {
    std::size_t total_cases = 0;
    double threshold = 0.0;
    SimilarityWeights weights;
    std::vector<ClusterSummary> clusters;
    double elapsed_ms = 0.0;

    const ClusterSummary* find(std::string_view name) const;
    std::vector<SubGroup> all_groups() const;
};

/// Both stages over the whole corpus: external assignment, then sub-groups
/// inside every external cluster.
ClusterReport cluster_all(const std::vector<CaseRecord>& records, const ClusterConfig& config);

}  // namespace casework
