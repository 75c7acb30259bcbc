#pragma once

#include "casework/case_record.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

struct sqlite3;

namespace casework {

inline constexpr int kSchemaVersion = 1;

struct CaseFilter {
    std::optional<std::string> org;
    std::optional<int> year_from;
    std::optional<int> year_to;
    std::optional<std::string> month;  // English month name, any case
    std::optional<std::vector<std::string>> ids;
};

struct MergeReport {
    std::size_t copied = 0;
    std::vector<std::string> skipped_collisions;
};

/// One SQLite database file. A handle owns a single connection and is not
/// shared between threads; open one handle per reader.
class Store {
public:
    /// Creates the schema when absent. Throws SchemaVersionMismatch when the
    /// file carries another schema version and StoreIoError when it cannot be
    /// opened or is not a database.
    static Store open(const std::filesystem::path& db_path);

    /// Opens an existing store without write access.
    static Store open_read_only(const std::filesystem::path& db_path);

    Store(Store&& other) noexcept;
    Store& operator=(Store&& other) noexcept;
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;
    ~Store();

    const std::filesystem::path& path() const noexcept { return path_; }
    bool read_only() const noexcept { return read_only_; }

    /// Writes the case row and its three normalized rows in one transaction.
    /// An existing case is replaced except for its original created_at.
    /// Throws StorageError after rolling back.
    void upsert_case(const CaseRecord& record);

    /// Matching records ordered by (year, month, case_id).
    std::vector<CaseRecord> query_cases(const CaseFilter& filter = {}) const;
    std::optional<CaseRecord> fetch_case(std::string_view case_id) const;
    bool contains(std::string_view case_id) const;

    std::size_t count_rows(std::string_view table) const;
    std::vector<std::string> table_names() const;
    int schema_version() const;

    /// Copies every case of the store at `src_path` that is not already
    /// present; colliding ids keep the destination row.
    MergeReport merge_from(const std::filesystem::path& src_path);

    /// Runs raw SQL on the connection (maintenance and tests).
    void execute(std::string_view sql);

private:
    Store(sqlite3* db, std::filesystem::path path, bool read_only);
    void init_schema();
    void check_schema_version() const;

    sqlite3* db_ = nullptr;
    std::filesystem::path path_;
    bool read_only_ = false;
};

/// Free-function spellings of the store operations.
Store init_schema(const std::filesystem::path& db_path);
MergeReport merge_databases(Store& dest, const std::filesystem::path& src_path);

}  // namespace casework
