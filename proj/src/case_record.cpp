#include "casework/case_record.hpp"

#include <algorithm>

namespace casework {

std::string_view to_string(StorageUnit unit) { return unit == StorageUnit::TB ? "TB" : "GB"; }

std::optional<StorageUnit> parse_storage_unit(std::string_view text) {
    if (text == "TB" || text == "tb" || text == "Tb" || text == "tB") return StorageUnit::TB;
    if (text == "GB" || text == "gb" || text == "Gb" || text == "gB") return StorageUnit::GB;
    return std::nullopt;
}

std::string_view to_string(IssueSeverity severity) {
    return severity == IssueSeverity::error ? "error" : "warning";
}

bool has_errors(const std::vector<ValidationIssue>& issues) {
    return std::any_of(issues.begin(), issues.end(),
                       [](const ValidationIssue& i) { return i.severity == IssueSeverity::error; });
}

namespace vocab {

const std::set<std::string>& platforms() {
    static const std::set<std::string> v{"facebook", "instagram", "snapchat", "discord",
                                         "whatsapp", "online",    "chat"};
    return v;
}

const std::set<std::string>& investigation_types() {
    static const std::set<std::string> v{"proactive", "reactive", "online", "undercover"};
    return v;
}

const std::set<std::string>& prosecution() {
    static const std::set<std::string> v{"booked", "arrested", "charged"};
    return v;
}

const std::set<std::string>& severity_indicators() {
    static const std::set<std::string> v{"infant", "very_young", "under_10", "sexual_assault",
                                         "production"};
    return v;
}

const std::set<std::string>& case_topics() {
    static const std::set<std::string> v{"production", "possession", "international",
                                         "multi_state", "hands_on",   "online_digital",
                                         "family",     "stranger",   "pornography"};
    return v;
}

const std::set<std::string>& severity_phrases() {
    static const std::set<std::string> v{"dangerous", "stated",   "told",
                                         "continue",  "attacked", "out_of_control"};
    return v;
}

}  // namespace vocab
}  // namespace casework
