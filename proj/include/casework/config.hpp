#pragma once

#include "casework/cluster.hpp"
#include "casework/ingest.hpp"
#include "casework/insights.hpp"
#include "casework/pattern_config.hpp"
#include "casework/triage.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace casework {

inline constexpr int kConfigVersion = 1;
inline constexpr const char* kConfigEnvVar = "CASEWORK_CONFIG";

struct Config {
    int version = kConfigVersion;
    std::vector<OrgPattern> org_patterns;
    ExtractionConfig extraction;
    ClusterConfig clustering;
    TriageConfig triage;
    InsightConfig insights;
};

/// The built-in configuration document (JSON).
std::string_view default_config_json();

/// Parses and validates a complete configuration document.
/// Throws ConfigError with the offending key in the message.
Config parse_config(std::string_view json_text);

/// Built-in defaults with the optional user file applied as a JSON merge
/// patch. Without an explicit path the CASEWORK_CONFIG environment variable
/// is consulted.
Config load_config(const std::optional<std::filesystem::path>& path = std::nullopt);

Config default_config();

/// Rule id for a keyword given as a bare string: "<category>.<feature>.<slug>",
/// where the slug keeps lowercase alphanumerics and joins the rest with '_'.
std::string keyword_rule_id(std::string_view category, std::string_view feature, std::string_view keyword);

}  // namespace casework
