#include "dial/exec/sqlite_executor.hpp"

#include "dial/common/errors.hpp"

#include <sqlite3.h>

#include <mutex>

namespace dial {

struct SqliteExecutor::Impl {
	sqlite3 *db = nullptr;
	std::mutex lock; // one connection, serialized access
};

SqliteExecutor::SqliteExecutor() : impl(std::make_unique<Impl>()) {
	if (sqlite3_open(":memory:", &impl->db) != SQLITE_OK) {
		throw AdapterUnavailableException("cannot open in-memory sqlite database");
	}
}

SqliteExecutor::~SqliteExecutor() {
	if (impl && impl->db) {
		sqlite3_close(impl->db);
	}
}

void SqliteExecutor::exec_script(const std::string &script) {
	std::lock_guard<std::mutex> guard(impl->lock);
	char *err = nullptr;
	if (sqlite3_exec(impl->db, script.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
		std::string message = err ? err : "unknown sqlite error";
		sqlite3_free(err);
		throw DialException("sqlite setup script failed: " + message);
	}
}

ExecutionOutcome SqliteExecutor::execute(const SqlText &sql) {
	std::lock_guard<std::mutex> guard(impl->lock);
	sqlite3_stmt *stmt = nullptr;
	int rc = sqlite3_prepare_v2(impl->db, sql.text.c_str(), -1, &stmt, nullptr);
	if (rc != SQLITE_OK) {
		ErrorTrace trace;
		trace.message = sqlite3_errmsg(impl->db);
		trace.vendor_code = std::to_string(sqlite3_errcode(impl->db));
		return ExecutionOutcome::error(std::move(trace));
	}

	RowTable rows;
	int cols = sqlite3_column_count(stmt);
	while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
		Row row;
		row.reserve(cols);
		for (int c = 0; c < cols; c++) {
			if (sqlite3_column_type(stmt, c) == SQLITE_NULL) {
				row.push_back(Cell::null());
			} else {
				const unsigned char *text = sqlite3_column_text(stmt, c);
				row.push_back(Cell::of(text ? reinterpret_cast<const char *>(text) : ""));
			}
		}
		rows.push_back(std::move(row));
	}
	if (rc != SQLITE_DONE) {
		ErrorTrace trace;
		trace.message = sqlite3_errmsg(impl->db);
		trace.vendor_code = std::to_string(sqlite3_errcode(impl->db));
		sqlite3_finalize(stmt);
		return ExecutionOutcome::error(std::move(trace));
	}
	sqlite3_finalize(stmt);
	return ExecutionOutcome::ok(std::move(rows));
}

std::unique_ptr<Executor> make_embedded_executor(DialectId dialect) {
	if (dialect == DialectId::SQLITE) {
		return std::make_unique<SqliteExecutor>();
	}
	throw AdapterUnavailableException("no embedded engine registered for dialect: " +
	                                  dialect_name(dialect));
}

} // namespace dial
