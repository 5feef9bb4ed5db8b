#pragma once

#include "dial/core/dialect.hpp"
#include "dial/core/schema.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dial {

// One pipeline run: (question q, schema S, target dialect d). gold_elements
// are ground-truth (table, column) pairs supplied as generation context by
// the benchmark; they must resolve in the schema.
struct TranslationTask {
	std::string question;
	SchemaCatalog schema;
	DialectId dialect = DialectId::SQLITE;
	std::vector<std::pair<std::string, std::string>> gold_elements;

	// Stable content hash used to name per-task output files.
	std::string stable_hash() const;
};

// Returns one violation description per failed invariant; empty means valid.
std::vector<std::string> validate_task(const TranslationTask &task);

} // namespace dial
