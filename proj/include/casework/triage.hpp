#pragma once

#include "casework/case_record.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace casework {

enum class TriageFactor {
    severity_indicators,
    victim_count,
    case_type,
    severity_phrases,
    evidence_volume,
    registered_offender
};

inline constexpr std::array<TriageFactor, 6> kTriageFactors = {
    TriageFactor::severity_indicators, TriageFactor::victim_count,    TriageFactor::case_type,
    TriageFactor::severity_phrases,    TriageFactor::evidence_volume, TriageFactor::registered_offender};

std::string_view to_string(TriageFactor factor);

/// Factor weights. The defaults add up to 1.25; only relative size matters
/// after normalization.
struct TriageWeights {
    double severity_indicators = 0.35;
    double victim_count = 0.30;
    double case_type = 0.25;
    double severity_phrases = 0.15;
    double evidence_volume = 0.10;
    double registered_offender = 0.10;

    double operator[](TriageFactor f) const;
    TriageWeights scaled(double factor) const;

    bool operator==(const TriageWeights&) const = default;
};

struct TriageConfig {
    TriageWeights weights;
    std::map<std::string, double> severity_scores{
        {"infant", 1.0}, {"sexual_assault", 0.8}, {"very_young", 0.7}, {"under_10", 0.6}, {"production", 0.5}};
    std::map<std::string, double> case_type_scores{
        {"production", 1.0}, {"hands_on", 0.9}, {"online_digital", 0.5}, {"possession", 0.4}};
    int victim_count_cap = 5;
    double severity_phrase_count = 6.0;
    std::int64_t large_image_count = 1000;
    std::set<StorageUnit> large_storage_units{StorageUnit::TB};
    double large_evidence_score = 1.0;
    double any_evidence_score = 0.5;
    double high_band = 8.0;
    double medium_band = 6.0;

    bool operator==(const TriageConfig&) const = default;
};

/// Factor values f_i(case), each in [0, 1], indexed by TriageFactor.
struct FactorScores {
    std::array<double, 6> values{};

    double& operator[](TriageFactor f) { return values[static_cast<std::size_t>(f)]; }
    double operator[](TriageFactor f) const { return values[static_cast<std::size_t>(f)]; }
};

FactorScores factor_scores(const FeatureSet& features, const TriageConfig& config = {});

/// Σ w_i · f_i.
double raw_score(const FactorScores& scores, const TriageWeights& weights);

/// Affine map of raw scores onto [5, 10]: min -> 5, max -> 10. When every
/// score is equal all map to 5. Throws EmptyInput on an empty list.
std::vector<double> normalize(std::span<const double> raw_scores);

enum class PriorityBand { high, medium, low };

std::string_view to_string(PriorityBand band);

/// High [8, 10], Medium [6, 8), Low [5, 6) with the default cut points.
PriorityBand band_for(double normalized_score, const TriageConfig& config = {});

struct FactorExplanation {
    TriageFactor factor = TriageFactor::severity_indicators;
    double weight = 0.0;
    double value = 0.0;
    std::vector<HighlightSpan> evidence;  // spans of the features that set the value
};

struct PriorityResult {
    std::string case_id;
    FactorScores factor_scores;
    double raw_score = 0.0;
    double normalized_score = 5.0;
    int rank = 0;
    PriorityBand band = PriorityBand::low;
    std::vector<FactorExplanation> explanation;
};

/// Scores, jointly normalizes and ranks `records`: descending normalized
/// score, then descending raw score, then ascending case id.
std::vector<PriorityResult> rank_cases(const std::vector<CaseRecord>& records, const TriageConfig& config = {});

struct TriageSummary {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
    std::size_t high = 0;
    std::size_t medium = 0;
    std::size_t low = 0;
};

TriageSummary summarize(const std::vector<PriorityResult>& results);

}  // namespace casework
