#pragma once

#include <stdexcept>
#include <string>

namespace casework {

/// Base of every error the pipeline raises. `kind()` is a stable
/// machine-readable code used by the CLI diagnostics and the API error body.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define CASEWORK_DEFINE_ERROR(Name, code)                                  \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& message) : Error(code, message) {} \
    };

// ingest
CASEWORK_DEFINE_ERROR(FileNotFound, "file_not_found")
CASEWORK_DEFINE_ERROR(UnreadablePdf, "unreadable_pdf")
CASEWORK_DEFINE_ERROR(EmptyDocument, "empty_document")
// batcher
CASEWORK_DEFINE_ERROR(NoMarkersFound, "no_markers_found")
// extractor
CASEWORK_DEFINE_ERROR(UnknownCategory, "unknown_category")
CASEWORK_DEFINE_ERROR(ValidationFailed, "validation_failed")
// store
CASEWORK_DEFINE_ERROR(SchemaVersionMismatch, "schema_version_mismatch")
CASEWORK_DEFINE_ERROR(StoreIoError, "io_error")
CASEWORK_DEFINE_ERROR(StorageError, "storage_error")
// triage
CASEWORK_DEFINE_ERROR(EmptyInput, "empty_input")
// insights / filtering
CASEWORK_DEFINE_ERROR(UnknownTag, "unknown_tag")
CASEWORK_DEFINE_ERROR(InvalidQuery, "invalid_query")
// configuration
CASEWORK_DEFINE_ERROR(ConfigError, "config_error")

#undef CASEWORK_DEFINE_ERROR

}  // namespace casework
