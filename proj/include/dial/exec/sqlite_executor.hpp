#pragma once

#include "dial/exec/executor.hpp"

#include <memory>
#include <string>

namespace dial {

// Live adapter over an in-memory SQLite database. The only locally embeddable
// engine wired in; requesting any other dialect through make_embedded_executor
// raises AdapterUnavailableException.
class SqliteExecutor : public Executor {
public:
	SqliteExecutor();
	~SqliteExecutor() override;

	SqliteExecutor(const SqliteExecutor &) = delete;
	SqliteExecutor &operator=(const SqliteExecutor &) = delete;

	// Run setup statements (DDL / seed inserts); throws on failure.
	void exec_script(const std::string &script);

	ExecutionOutcome execute(const SqlText &sql) override;
	bool is_live() const override {
		return true;
	}
	DialectId dialect() const override {
		return DialectId::SQLITE;
	}

private:
	struct Impl;
	std::unique_ptr<Impl> impl;
};

// Embedded engine for the dialect, or AdapterUnavailableException.
std::unique_ptr<Executor> make_embedded_executor(DialectId dialect);

} // namespace dial
