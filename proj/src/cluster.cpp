#include "casework/cluster.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <deque>
#include <stdexcept>

namespace casework {

std::string_view to_string(Dimension dimension) {
    switch (dimension) {
        case Dimension::platforms: return "platforms";
        case Dimension::demographics: return "demographics";
        case Dimension::topics: return "topics";
        case Dimension::investigation: return "investigation";
        case Dimension::severity: return "severity";
        case Dimension::relationship: return "relationship";
    }
    return "unknown";
}

double SimilarityWeights::operator[](Dimension d) const {
    switch (d) {
        case Dimension::platforms: return platforms;
        case Dimension::demographics: return demographics;
        case Dimension::topics: return topics;
        case Dimension::investigation: return investigation;
        case Dimension::severity: return severity;
        case Dimension::relationship: return relationship;
    }
    return 0.0;
}

double SimilarityWeights::sum() const {
    double total = 0.0;
    for (const auto d : kDimensions) total += (*this)[d];
    return total;
}

SimilarityWeights SimilarityWeights::scaled(double factor) const {
    return SimilarityWeights{platforms * factor,     demographics * factor, topics * factor,
                             investigation * factor, severity * factor,     relationship * factor};
}

namespace {

std::string victim_age_bucket(int age) {
    if (age <= 4) return "victim_age:0-4";
    if (age <= 9) return "victim_age:5-9";
    if (age <= 13) return "victim_age:10-13";
    if (age <= 17) return "victim_age:14-17";
    return "victim_age:18+";
}

std::string victim_count_bucket(int count) {
    if (count <= 0) return "victim_count:0";
    if (count == 1) return "victim_count:1";
    if (count <= 4) return "victim_count:2-4";
    return "victim_count:5+";
}

}  // namespace

CaseDimensions featurize(const FeatureSet& f) {
    CaseDimensions d;
    d[Dimension::platforms] = TokenSet(f.platforms.begin(), f.platforms.end());

    auto& demo = d[Dimension::demographics];
    for (const int age : f.victim_ages) demo.insert(victim_age_bucket(age));
    if (f.victim_count) demo.insert(victim_count_bucket(*f.victim_count));
    if (f.perpetrator_age) demo.insert("perp_age:" + std::to_string(*f.perpetrator_age / 10 * 10) + "s");
    demo.insert(f.registered_sex_offender ? "rso:true" : "rso:false");

    d[Dimension::topics] = TokenSet(f.case_topics.begin(), f.case_topics.end());

    auto& inv = d[Dimension::investigation];
    for (const auto& t : f.investigation_type) inv.insert("type:" + t);
    for (const auto& a : f.agencies) inv.insert("agency:" + a);

    auto& sev = d[Dimension::severity];
    for (const auto& s : f.severity_indicators) sev.insert("indicator:" + s);
    for (const auto& p : f.severity_phrases) sev.insert("phrase:" + p);

    d[Dimension::relationship] = TokenSet{f.relationship_to_victim};
    return d;
}

double jaccard(const TokenSet& x, const TokenSet& y) {
    if (x.empty() && y.empty()) return 0.0;
    std::size_t common = 0;
    auto ix = x.begin();
    auto iy = y.begin();
    while (ix != x.end() && iy != y.end()) {
        if (*ix < *iy) {
            ++ix;
        } else if (*iy < *ix) {
            ++iy;
        } else {
            ++common;
            ++ix;
            ++iy;
        }
    }
    const std::size_t unite = x.size() + y.size() - common;
    return static_cast<double>(common) / static_cast<double>(unite);
}

SimilarityBreakdown weighted_similarity(const CaseDimensions& a, const CaseDimensions& b,
                                        const SimilarityWeights& weights) {
    SimilarityBreakdown out;
    for (std::size_t i = 0; i < kDimensions.size(); ++i) {
        const Dimension d = kDimensions[i];
        auto& score = out.dimensions[i];
        score.present = !(a[d].empty() && b[d].empty());
        if (!score.present) continue;
        score.jaccard = jaccard(a[d], b[d]);
        out.total += weights[d] * score.jaccard;
    }
    return out;
}

SimilarityBreakdown weighted_similarity(const FeatureSet& a, const FeatureSet& b, const SimilarityWeights& weights) {
    return weighted_similarity(featurize(a), featurize(b), weights);
}

const std::vector<std::string>& external_cluster_names() {
    static const std::vector<std::string> names = {
        std::string(cluster_names::online_digital), std::string(cluster_names::possession),
        std::string(cluster_names::severe), std::string(cluster_names::investigation),
        std::string(cluster_names::general)};
    return names;
}

std::set<std::string> external_assign(const CaseRecord& record, const ClusterConfig& config) {
    const FeatureSet& f = record.features;
    std::set<std::string> out{std::string(cluster_names::general)};
    if (f.case_topics.count("online_digital")) out.insert(std::string(cluster_names::online_digital));
    if (f.case_topics.count("possession")) out.insert(std::string(cluster_names::possession));
    if (!f.investigation_type.empty()) out.insert(std::string(cluster_names::investigation));
    const bool severe = std::any_of(f.severity_indicators.begin(), f.severity_indicators.end(),
                                    [&](const std::string& s) { return config.severe_markers.count(s) > 0; });
    if (severe) out.insert(std::string(cluster_names::severe));
    return out;
}

namespace {

class SimilarityMatrix {
public:
    SimilarityMatrix(const std::vector<CaseDimensions>& dims, const SimilarityWeights& weights)
        : n_(dims.size()), values_(n_ * n_, 0.0) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double s = weighted_similarity(dims[i], dims[j], weights).total;
                values_[i * n_ + j] = s;
                values_[j * n_ + i] = s;
            }
        }
    }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

private:
    std::size_t n_;
    std::vector<double> values_;
};

double mean_pairwise(const std::vector<std::size_t>& members, const SimilarityMatrix& sim) {
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            total += sim(members[a], members[b]);
            ++pairs;
        }
    }
    return pairs == 0 ? 0.0 : total / static_cast<double>(pairs);
}

std::string join_tokens(const TokenSet& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ", ";
        out += t;
    }
    return out;
}

std::string describe(const SubGroup& g) {
    char head[96];
    std::snprintf(head, sizeof head, "%zu cases, mean similarity %.3f", g.member_case_ids.size(),
                  g.mean_pairwise_similarity);
    std::string out = head;
    for (const auto d : {Dimension::platforms, Dimension::topics, Dimension::severity, Dimension::investigation,
                         Dimension::demographics, Dimension::relationship}) {
        const auto it = g.shared_characteristics.find(std::string(to_string(d)));
        if (it == g.shared_characteristics.end()) continue;
        out += "; shared ";
        out += to_string(d);
        out += ": ";
        out += join_tokens(it->second);
    }
    return out;
}

/// Connected components of the thresholded similarity graph restricted to
/// `members` (indices into records/dims/sim).
SubGroupResult group_members(const std::vector<std::size_t>& members, const std::vector<CaseRecord>& records,
                             const std::vector<CaseDimensions>& dims, const SimilarityMatrix& sim,
                             double threshold, std::string_view cluster_name) {
    const std::size_t n = members.size();
    std::vector<std::vector<std::size_t>> adjacency(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (sim(members[a], members[b]) >= threshold) {
                adjacency[a].push_back(b);
                adjacency[b].push_back(a);
            }
        }
    }

    SubGroupResult result;
    std::vector<bool> seen(n, false);
    std::vector<std::vector<std::size_t>> components;
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::vector<std::size_t> component;
        std::deque<std::size_t> queue{start};
        seen[start] = true;
        while (!queue.empty()) {
            const auto cur = queue.front();
            queue.pop_front();
            component.push_back(members[cur]);
            for (const auto next : adjacency[cur]) {
                if (!seen[next]) {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
        if (component.size() < 2) {
            result.ungrouped.push_back(records[component.front()].case_id);
        } else {
            components.push_back(std::move(component));
        }
    }

    for (auto& component : components) {
        std::sort(component.begin(), component.end(),
                  [&](std::size_t x, std::size_t y) { return records[x].case_id < records[y].case_id; });
    }
    std::sort(components.begin(), components.end(), [&](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() > y.size();
        return records[x.front()].case_id < records[y.front()].case_id;
    });

    const std::string prefix = cluster_name.empty() ? std::string("group") : std::string(cluster_name);
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& component = components[k];
        SubGroup g;
        g.group_id = prefix + "-" + std::to_string(k + 1);
        g.cluster_name = std::string(cluster_name);
        for (const auto idx : component) g.member_case_ids.push_back(records[idx].case_id);
        g.mean_pairwise_similarity = mean_pairwise(component, sim);
        for (const auto d : kDimensions) {
            TokenSet common = dims[component.front()][d];
            for (std::size_t m = 1; m < component.size() && !common.empty(); ++m) {
                TokenSet next;
                const auto& other = dims[component[m]][d];
                std::set_intersection(common.begin(), common.end(), other.begin(), other.end(),
                                      std::inserter(next, next.end()));
                common = std::move(next);
            }
            if (!common.empty()) g.shared_characteristics.emplace(std::string(to_string(d)), std::move(common));
        }
        g.description = describe(g);
        result.groups.push_back(std::move(g));
    }
    std::sort(result.ungrouped.begin(), result.ungrouped.end());
    return result;
}

void check_threshold(double threshold, const SimilarityWeights& weights) {
    if (!(threshold > 0.0) || threshold > weights.sum()) {
        throw std::invalid_argument("similarity threshold must lie in (0, sum of weights]");
    }
}

}  // namespace

SubGroupResult form_subgroups(const std::vector<CaseRecord>& members, double threshold,
                              const SimilarityWeights& weights, std::string_view cluster_name) {
    check_threshold(threshold, weights);
    std::vector<CaseDimensions> dims;
    dims.reserve(members.size());
    for (const auto& r : members) dims.push_back(featurize(r.features));
    const SimilarityMatrix sim(dims, weights);
    std::vector<std::size_t> all(members.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return group_members(all, members, dims, sim, threshold, cluster_name);
}

const ClusterSummary* ClusterReport::find(std::string_view name) const {
    const auto it = std::find_if(clusters.begin(), clusters.end(), [&](const ClusterSummary& c) { return c.name == name; });
    return it == clusters.end() ? nullptr : &*it;
}

std::vector<SubGroup> ClusterReport::all_groups() const {
    std::vector<SubGroup> out;
    for (const auto& c : clusters) out.insert(out.end(), c.groups.begin(), c.groups.end());
    return out;
}

ClusterReport cluster_all(const std::vector<CaseRecord>& records, const ClusterConfig& config) {
    check_threshold(config.threshold, config.weights);
    const auto t0 = std::chrono::steady_clock::now();

    ClusterReport report;
    report.total_cases = records.size();
    report.threshold = config.threshold;
    report.weights = config.weights;

    std::vector<CaseDimensions> dims;
    dims.reserve(records.size());
    for (const auto& r : records) dims.push_back(featurize(r.features));
    const SimilarityMatrix sim(dims, config.weights);

    std::map<std::string, std::vector<std::size_t>> members;
    for (const auto& name : external_cluster_names()) members[name];
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (const auto& name : external_assign(records[i], config)) members[name].push_back(i);
    }

    for (const auto& name : external_cluster_names()) {
        const auto& idx = members[name];
        ClusterSummary summary;
        summary.name = name;
        for (const auto i : idx) summary.member_case_ids.push_back(records[i].case_id);
        summary.coverage_percent =
            records.empty() ? 0.0 : 100.0 * static_cast<double>(idx.size()) / static_cast<double>(records.size());
        if (idx.size() >= 2) summary.avg_similarity = mean_pairwise(idx, sim);
        auto grouped = group_members(idx, records, dims, sim, config.threshold, name);
        summary.groups = std::move(grouped.groups);
        summary.ungrouped = std::move(grouped.ungrouped);
        report.clusters.push_back(std::move(summary));
    }

    report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace casework
