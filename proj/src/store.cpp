#include "casework/store.hpp"

#include "casework/errors.hpp"
#include "casework/serialization.hpp"
#include "casework/text_util.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include <sqlite3.h>

namespace casework {

namespace {

constexpr const char* kSchemaSql = R"sql(
CREATE TABLE IF NOT EXISTS schema_meta (
    key   TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS cases (
    case_id            TEXT PRIMARY KEY,
    source_org         TEXT NOT NULL,
    year               INTEGER NOT NULL,
    month              TEXT NOT NULL,
    raw_text           TEXT NOT NULL CHECK (length(raw_text) > 0),
    extracted_features TEXT NOT NULL,
    highlight_spans    TEXT NOT NULL,
    created_at         TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_cases_org_year ON cases (source_org, year);
CREATE TABLE IF NOT EXISTS victim_demographics (
    case_id       TEXT PRIMARY KEY REFERENCES cases (case_id) ON DELETE CASCADE,
    victim_count  INTEGER,
    victim_ages   TEXT NOT NULL,
    victim_gender TEXT
);
CREATE TABLE IF NOT EXISTS perpetrator_demographics (
    case_id                 TEXT PRIMARY KEY REFERENCES cases (case_id) ON DELETE CASCADE,
    perpetrator_age         INTEGER,
    registered_sex_offender INTEGER NOT NULL,
    relationship_to_victim  TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS prosecution_outcomes (
    case_id        TEXT PRIMARY KEY REFERENCES cases (case_id) ON DELETE CASCADE,
    charges        TEXT NOT NULL,
    booking_status TEXT,
    jail_info      TEXT
);
)sql";

class Statement {
public:
    Statement(sqlite3* db, std::string_view sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK) {
            throw StorageError(std::string("prepare failed: ") + sqlite3_errmsg(db));
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    void bind(int i, std::string_view v) {
        check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    }
    void bind(int i, std::int64_t v) { check(sqlite3_bind_int64(stmt_, i, v)); }
    void bind_null(int i) { check(sqlite3_bind_null(stmt_, i)); }
    template <typename T>
    void bind_opt(int i, const std::optional<T>& v) {
        if (v) {
            if constexpr (std::is_same_v<T, std::string>) {
                bind(i, std::string_view(*v));
            } else {
                bind(i, static_cast<std::int64_t>(*v));
            }
        } else {
            bind_null(i);
        }
    }

    /// true while a row is available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw StorageError(std::string("statement failed: ") + sqlite3_errmsg(db_));
    }

    std::string text(int col) const {
        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
        const int n = sqlite3_column_bytes(stmt_, col);
        return p ? std::string(p, static_cast<std::size_t>(n)) : std::string();
    }
    std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }

private:
    void check(int rc) {
        if (rc != SQLITE_OK) throw StorageError(std::string("bind failed: ") + sqlite3_errmsg(db_));
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

void exec_or(sqlite3* db, std::string_view sql, bool io_error) {
    char* msg = nullptr;
    const std::string owned(sql);
    if (sqlite3_exec(db, owned.c_str(), nullptr, nullptr, &msg) != SQLITE_OK) {
        std::string what = msg ? msg : sqlite3_errmsg(db);
        sqlite3_free(msg);
        if (io_error) throw StoreIoError(what);
        throw StorageError(what);
    }
}

sqlite3* open_db(const std::filesystem::path& path, int flags) {
    sqlite3* db = nullptr;
    const int rc = sqlite3_open_v2(path.string().c_str(), &db, flags, nullptr);
    if (rc != SQLITE_OK) {
        std::string what = db ? sqlite3_errmsg(db) : "out of memory";
        sqlite3_close(db);
        throw StoreIoError("cannot open database " + path.string() + ": " + what);
    }
    sqlite3_busy_timeout(db, 5000);
    return db;
}

int month_rank(const std::string& month) { return month_ordinal(month).value_or(13); }

std::string join(const std::set<std::string>& values, const char* sep) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) out += sep;
        out += v;
    }
    return out;
}

}  // namespace

Store::Store(sqlite3* db, std::filesystem::path path, bool read_only)
    : db_(db), path_(std::move(path)), read_only_(read_only) {}

Store::Store(Store&& other) noexcept
    : db_(std::exchange(other.db_, nullptr)), path_(std::move(other.path_)), read_only_(other.read_only_) {}

Store& Store::operator=(Store&& other) noexcept {
    if (this != &other) {
        sqlite3_close(db_);
        db_ = std::exchange(other.db_, nullptr);
        path_ = std::move(other.path_);
        read_only_ = other.read_only_;
    }
    return *this;
}

Store::~Store() { sqlite3_close(db_); }

Store Store::open(const std::filesystem::path& db_path) {
    Store s(open_db(db_path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE), db_path, false);
    s.init_schema();
    return s;
}

Store Store::open_read_only(const std::filesystem::path& db_path) {
    if (!std::filesystem::exists(db_path)) throw StoreIoError("database not found: " + db_path.string());
    Store s(open_db(db_path, SQLITE_OPEN_READONLY), db_path, true);
    s.check_schema_version();
    return s;
}

void Store::init_schema() {
    // Fails with SQLITE_NOTADB on a file that is not a database.
    exec_or(db_, "PRAGMA foreign_keys = ON;", true);
    bool has_meta = false;
    try {
        Statement q(db_, "SELECT count(*) FROM sqlite_master WHERE type = 'table' AND name = 'schema_meta'");
        q.step();
        has_meta = q.integer(0) > 0;
    } catch (const StorageError& e) {
        throw StoreIoError(std::string("not a usable database: ") + e.what());
    }
    if (has_meta) {
        check_schema_version();
        return;
    }
    {
        Statement q(db_, "SELECT count(*) FROM sqlite_master WHERE type = 'table'");
        q.step();
        if (q.integer(0) > 0) throw SchemaVersionMismatch("database has tables but no schema version stamp");
    }
    exec_or(db_, "BEGIN IMMEDIATE;", true);
    try {
        exec_or(db_, kSchemaSql, true);
        Statement ins(db_, "INSERT INTO schema_meta (key, value) VALUES ('schema_version', ?)");
        ins.bind(1, std::to_string(kSchemaVersion));
        ins.step();
        exec_or(db_, "COMMIT;", true);
    } catch (...) {
        sqlite3_exec(db_, "ROLLBACK;", nullptr, nullptr, nullptr);
        throw;
    }
}

int Store::schema_version() const {
    try {
        Statement q(db_, "SELECT value FROM schema_meta WHERE key = 'schema_version'");
        if (!q.step()) throw SchemaVersionMismatch("schema version stamp missing");
        return std::stoi(q.text(0));
    } catch (const StorageError&) {
        throw SchemaVersionMismatch("schema metadata table missing");
    } catch (const std::logic_error&) {
        throw SchemaVersionMismatch("schema version stamp unreadable");
    }
}

void Store::check_schema_version() const {
    const int v = schema_version();
    if (v != kSchemaVersion) {
        throw SchemaVersionMismatch("database schema version " + std::to_string(v) + ", expected " +
                                    std::to_string(kSchemaVersion));
    }
}

void Store::execute(std::string_view sql) { exec_or(db_, sql, false); }

void Store::upsert_case(const CaseRecord& r) {
    if (read_only_) throw StorageError("store opened read-only");
    exec_or(db_, "BEGIN IMMEDIATE;", false);
    try {
        const auto& f = r.features;
        {
            Statement s(db_, R"sql(
                INSERT INTO cases (case_id, source_org, year, month, raw_text, extracted_features,
                                   highlight_spans, created_at)
                VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)
                ON CONFLICT (case_id) DO UPDATE SET
                    source_org = excluded.source_org, year = excluded.year, month = excluded.month,
                    raw_text = excluded.raw_text, extracted_features = excluded.extracted_features,
                    highlight_spans = excluded.highlight_spans)sql");
            s.bind(1, r.case_id);
            s.bind(2, r.source_org);
            s.bind(3, static_cast<std::int64_t>(r.year));
            s.bind(4, r.month);
            s.bind(5, r.raw_text);
            s.bind(6, serialize_features(f));
            s.bind(7, serialize_spans(r.spans));
            s.bind(8, r.created_at);
            s.step();
        }
        for (const char* table : {"victim_demographics", "perpetrator_demographics", "prosecution_outcomes"}) {
            Statement d(db_, std::string("DELETE FROM ") + table + " WHERE case_id = ?");
            d.bind(1, r.case_id);
            d.step();
        }
        {
            Statement s(db_,
                        "INSERT INTO victim_demographics (case_id, victim_count, victim_ages, victim_gender) "
                        "VALUES (?, ?, ?, ?)");
            s.bind(1, r.case_id);
            s.bind_opt(2, f.victim_count);
            s.bind(3, Json(f.victim_ages).dump());
            s.bind_opt(4, f.victim_gender);
            s.step();
        }
        {
            Statement s(db_,
                        "INSERT INTO perpetrator_demographics (case_id, perpetrator_age, registered_sex_offender, "
                        "relationship_to_victim) VALUES (?, ?, ?, ?)");
            s.bind(1, r.case_id);
            s.bind_opt(2, f.perpetrator_age);
            s.bind(3, static_cast<std::int64_t>(f.registered_sex_offender ? 1 : 0));
            s.bind(4, f.relationship_to_victim);
            s.step();
        }
        {
            Statement s(db_,
                        "INSERT INTO prosecution_outcomes (case_id, charges, booking_status, jail_info) "
                        "VALUES (?, ?, ?, ?)");
            s.bind(1, r.case_id);
            s.bind(2, Json(f.charges).dump());
            if (f.prosecution.empty()) {
                s.bind_null(3);
            } else {
                s.bind(3, join(f.prosecution, ","));
            }
            s.bind_opt(4, f.jail_info);
            s.step();
        }
        exec_or(db_, "COMMIT;", false);
    } catch (const std::exception& e) {
        sqlite3_exec(db_, "ROLLBACK;", nullptr, nullptr, nullptr);
        throw StorageError("upsert of " + r.case_id + " failed: " + e.what());
    }
}

std::vector<CaseRecord> Store::query_cases(const CaseFilter& filter) const {
    std::string sql =
        "SELECT case_id, source_org, year, month, raw_text, extracted_features, highlight_spans, created_at "
        "FROM cases WHERE 1 = 1";
    if (filter.org) sql += " AND source_org = :org";
    if (filter.year_from) sql += " AND year >= :year_from";
    if (filter.year_to) sql += " AND year <= :year_to";
    if (filter.month) sql += " AND lower(month) = lower(:month)";
    if (filter.ids) {
        sql += " AND case_id IN (";
        for (std::size_t i = 0; i < filter.ids->size(); ++i) sql += (i ? ",?" : "?");
        sql += ")";
        if (filter.ids->empty()) return {};
    }

    Statement q(db_, sql);
    int idx = 1;
    if (filter.org) q.bind(idx++, *filter.org);
    if (filter.year_from) q.bind(idx++, static_cast<std::int64_t>(*filter.year_from));
    if (filter.year_to) q.bind(idx++, static_cast<std::int64_t>(*filter.year_to));
    if (filter.month) q.bind(idx++, *filter.month);
    if (filter.ids) {
        for (const auto& id : *filter.ids) q.bind(idx++, id);
    }

    std::vector<CaseRecord> out;
    while (q.step()) {
        CaseRecord r;
        r.case_id = q.text(0);
        r.source_org = q.text(1);
        r.year = static_cast<int>(q.integer(2));
        r.month = q.text(3);
        r.raw_text = q.text(4);
        try {
            r.features = parse_features(q.text(5));
            r.spans = parse_spans(q.text(6));
        } catch (const std::exception& e) {
            throw StorageError("corrupt stored case " + r.case_id + ": " + e.what());
        }
        r.created_at = q.text(7);
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const CaseRecord& a, const CaseRecord& b) {
        if (a.year != b.year) return a.year < b.year;
        const int ma = month_rank(a.month);
        const int mb = month_rank(b.month);
        if (ma != mb) return ma < mb;
        return a.case_id < b.case_id;
    });
    return out;
}

std::optional<CaseRecord> Store::fetch_case(std::string_view case_id) const {
    CaseFilter f;
    f.ids = std::vector<std::string>{std::string(case_id)};
    auto rows = query_cases(f);
    if (rows.empty()) return std::nullopt;
    return std::move(rows.front());
}

bool Store::contains(std::string_view case_id) const {
    Statement q(db_, "SELECT 1 FROM cases WHERE case_id = ?");
    q.bind(1, case_id);
    return q.step();
}

std::size_t Store::count_rows(std::string_view table) const {
    const auto names = table_names();
    if (std::find(names.begin(), names.end(), table) == names.end()) {
        throw StorageError("unknown table " + std::string(table));
    }
    Statement q(db_, "SELECT count(*) FROM " + std::string(table));
    q.step();
    return static_cast<std::size_t>(q.integer(0));
}

std::vector<std::string> Store::table_names() const {
    Statement q(db_, "SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name");
    std::vector<std::string> out;
    while (q.step()) out.push_back(q.text(0));
    return out;
}

MergeReport Store::merge_from(const std::filesystem::path& src_path) {
    if (read_only_) throw StorageError("store opened read-only");
    std::vector<CaseRecord> incoming;
    {
        const Store src = Store::open_read_only(src_path);
        incoming = src.query_cases();
    }
    MergeReport report;
    for (const auto& r : incoming) {
        if (contains(r.case_id)) {
            report.skipped_collisions.push_back(r.case_id);
        } else {
            upsert_case(r);
            ++report.copied;
        }
    }
    return report;
}

Store init_schema(const std::filesystem::path& db_path) { return Store::open(db_path); }

MergeReport merge_databases(Store& dest, const std::filesystem::path& src_path) { return dest.merge_from(src_path); }

}  // namespace casework
