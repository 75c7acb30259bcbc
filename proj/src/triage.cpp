#include "casework/triage.hpp"

#include "casework/errors.hpp"

#include <algorithm>
#include <cmath>

namespace casework {

std::string_view to_string(TriageFactor factor) {
    switch (factor) {
        case TriageFactor::severity_indicators: return "severity_indicators";
        case TriageFactor::victim_count: return "victim_count";
        case TriageFactor::case_type: return "case_type";
        case TriageFactor::severity_phrases: return "severity_phrases";
        case TriageFactor::evidence_volume: return "evidence_volume";
        case TriageFactor::registered_offender: return "registered_offender";
    }
    return "unknown";
}

std::string_view to_string(PriorityBand band) {
    switch (band) {
        case PriorityBand::high: return "High";
        case PriorityBand::medium: return "Medium";
        case PriorityBand::low: return "Low";
    }
    return "Low";
}

double TriageWeights::operator[](TriageFactor f) const {
    switch (f) {
        case TriageFactor::severity_indicators: return severity_indicators;
        case TriageFactor::victim_count: return victim_count;
        case TriageFactor::case_type: return case_type;
        case TriageFactor::severity_phrases: return severity_phrases;
        case TriageFactor::evidence_volume: return evidence_volume;
        case TriageFactor::registered_offender: return registered_offender;
    }
    return 0.0;
}

TriageWeights TriageWeights::scaled(double factor) const {
    return TriageWeights{severity_indicators * factor, victim_count * factor,    case_type * factor,
                         severity_phrases * factor,    evidence_volume * factor, registered_offender * factor};
}

namespace {

double max_table_score(const std::set<std::string>& tags, const std::map<std::string, double>& table) {
    double best = 0.0;
    for (const auto& t : tags) {
        const auto it = table.find(t);
        if (it != table.end()) best = std::max(best, it->second);
    }
    return best;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::vector<HighlightSpan> evidence_for(TriageFactor factor, const CaseRecord& record, const TriageConfig& config) {
    std::vector<HighlightSpan> out;
    for (const auto& span : record.spans) {
        const std::string_view path = span.feature_path;
        bool keep = false;
        switch (factor) {
            case TriageFactor::severity_indicators: {
                keep = starts_with(path, "severity_indicators.") &&
                       config.severity_scores.count(std::string(path.substr(20))) > 0;
                break;
            }
            case TriageFactor::victim_count: keep = path == "victim_count"; break;
            case TriageFactor::case_type:
                keep = starts_with(path, "case_topics.") && config.case_type_scores.count(std::string(path.substr(12))) > 0;
                break;
            case TriageFactor::severity_phrases: keep = starts_with(path, "severity_phrases."); break;
            case TriageFactor::evidence_volume: keep = starts_with(path, "evidence_"); break;
            case TriageFactor::registered_offender: keep = path == "registered_sex_offender"; break;
        }
        if (keep) out.push_back(span);
    }
    return out;
}

}  // namespace

FactorScores factor_scores(const FeatureSet& f, const TriageConfig& config) {
    FactorScores s;
    s[TriageFactor::severity_indicators] = max_table_score(f.severity_indicators, config.severity_scores);

    if (f.victim_count && config.victim_count_cap > 0) {
        const int capped = std::clamp(*f.victim_count, 0, config.victim_count_cap);
        s[TriageFactor::victim_count] = static_cast<double>(capped) / config.victim_count_cap;
    }

    s[TriageFactor::case_type] = max_table_score(f.case_topics, config.case_type_scores);

    if (config.severity_phrase_count > 0) {
        s[TriageFactor::severity_phrases] =
            std::min(1.0, static_cast<double>(f.severity_phrases.size()) / config.severity_phrase_count);
    }

    const bool large = (f.evidence_storage && config.large_storage_units.count(f.evidence_storage->unit)) ||
                       (f.evidence_images && *f.evidence_images >= config.large_image_count);
    const bool any = f.evidence_images || f.evidence_videos || f.evidence_storage || f.evidence_messages;
    if (large) {
        s[TriageFactor::evidence_volume] = config.large_evidence_score;
    } else if (any) {
        s[TriageFactor::evidence_volume] = config.any_evidence_score;
    }

    s[TriageFactor::registered_offender] = f.registered_sex_offender ? 1.0 : 0.0;
    return s;
}

double raw_score(const FactorScores& scores, const TriageWeights& weights) {
    double total = 0.0;
    for (const auto f : kTriageFactors) total += weights[f] * scores[f];
    return total;
}

std::vector<double> normalize(std::span<const double> raw_scores) {
    if (raw_scores.empty()) throw EmptyInput("cannot normalize an empty score list");
    const auto [lo_it, hi_it] = std::minmax_element(raw_scores.begin(), raw_scores.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> out;
    out.reserve(raw_scores.size());
    for (const double s : raw_scores) {
        if (hi == lo) {
            out.push_back(5.0);
        } else {
            out.push_back(std::clamp(5.0 + 5.0 * (s - lo) / (hi - lo), 5.0, 10.0));
        }
    }
    return out;
}

PriorityBand band_for(double normalized_score, const TriageConfig& config) {
    if (normalized_score >= config.high_band) return PriorityBand::high;
    if (normalized_score >= config.medium_band) return PriorityBand::medium;
    return PriorityBand::low;
}

std::vector<PriorityResult> rank_cases(const std::vector<CaseRecord>& records, const TriageConfig& config) {
    std::vector<PriorityResult> results;
    if (records.empty()) return results;
    results.reserve(records.size());
    std::vector<double> raw;
    raw.reserve(records.size());

    for (const auto& record : records) {
        PriorityResult r;
        r.case_id = record.case_id;
        r.factor_scores = factor_scores(record.features, config);
        // Snap to a 1e-12 grid: sums that are mathematically equal can differ in the last bit depending
        // on which factors fired, and that must not decide the ranking.
        r.raw_score = std::round(raw_score(r.factor_scores, config.weights) * 1e12) / 1e12;
        for (const auto f : kTriageFactors) {
            r.explanation.push_back(
                FactorExplanation{f, config.weights[f], r.factor_scores[f], evidence_for(f, record, config)});
        }
        raw.push_back(r.raw_score);
        results.push_back(std::move(r));
    }

    const auto normalized = normalize(raw);
    for (std::size_t i = 0; i < results.size(); ++i) {
        results[i].normalized_score = normalized[i];
        results[i].band = band_for(normalized[i], config);
    }
    std::sort(results.begin(), results.end(), [](const PriorityResult& a, const PriorityResult& b) {
        if (a.normalized_score != b.normalized_score) return a.normalized_score > b.normalized_score;
        return a.case_id < b.case_id;
    });
    for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = static_cast<int>(i) + 1;
    return results;
}

TriageSummary summarize(const std::vector<PriorityResult>& results) {
    TriageSummary s;
    s.count = results.size();
    if (results.empty()) return s;
    s.min = s.max = results.front().normalized_score;
    double sum = 0.0;
    for (const auto& r : results) {
        s.min = std::min(s.min, r.normalized_score);
        s.max = std::max(s.max, r.normalized_score);
        sum += r.normalized_score;
        switch (r.band) {
            case PriorityBand::high: ++s.high; break;
            case PriorityBand::medium: ++s.medium; break;
            case PriorityBand::low: ++s.low; break;
        }
    }
    s.mean = sum / static_cast<double>(results.size());
    double sq = 0.0;
    for (const auto& r : results) sq += (r.normalized_score - s.mean) * (r.normalized_score - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(results.size()));
    return s;
}

}  // namespace casework
