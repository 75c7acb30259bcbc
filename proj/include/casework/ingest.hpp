#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace casework {

enum class SourceFormat { plain_text, pdf };

/// `.pdf` (any case) is PDF, everything else is plain text.
SourceFormat format_for_path(const std::filesystem::path& path);

struct OrgPattern {
    std::string pattern;  // matched case-insensitively as a substring
    std::string name;     // canonical organization name

    bool operator==(const OrgPattern&) const = default;
};

inline constexpr std::string_view kUnknownOrg = "UNKNOWN";

struct RawDocument {
    std::string source_path;
    std::string source_org;
    std::optional<int> report_year;
    std::string cleaned_text;
    std::size_t char_count = 0;
    std::string ingested_at;
};

/// Raw text of a source document. Plain text is returned verbatim (invalid
/// UTF-8 replaced); PDF pages are concatenated with one newline between pages.
/// Throws FileNotFound, UnreadablePdf or EmptyDocument.
std::string extract_text(const std::filesystem::path& source_path, SourceFormat format);

/// Drops standalone page-number lines, collapses space/tab runs, strips
/// trailing whitespace and limits blank runs to a single blank line.
/// Idempotent and never lengthens its input.
std::string clean_text(std::string_view raw);

/// Canonical name of the first matching pattern, or "UNKNOWN".
std::string detect_source_org(std::string_view filename, const std::vector<OrgPattern>& known_orgs);

/// First standalone 4-digit token of `filename` within [1990, 2100].
std::optional<int> infer_report_year(std::string_view filename);

/// Common interface over the supported source kinds.
class Ingestor {
public:
    virtual ~Ingestor() = default;
    virtual RawDocument ingest(const std::filesystem::path& source) const = 0;
};

/// Ingestor for `format`; org and year are inferred from the file name.
std::unique_ptr<Ingestor> make_ingestor(SourceFormat format, std::vector<OrgPattern> known_orgs);

}  // namespace casework
