#pragma once

#include "dial/core/dialect.hpp"

#include <string>
#include <vector>

namespace dial {

enum class EntryOrigin : uint8_t { DISTILLED_FROM_DOCS, CONSOLIDATED };

const std::string &origin_name(EntryOrigin origin);

// Declarative function repository record (F_Func): intent-keyed mapping from
// a canonical category to one dialect-specific implementation.
struct FunctionEntry {
	std::string id;
	DialectId dialect = DialectId::SQLITE;
	std::string category;
	std::vector<std::string> scenarios;
	std::string specification;
	std::string implementation;
	std::vector<double> embedding; // unit-norm
	EntryOrigin origin = EntryOrigin::DISTILLED_FROM_DOCS;

	bool operator==(const FunctionEntry &) const = default;

	// Text the embedding indexes: category, scenarios and specification.
	std::string index_text() const;
	// Rendered block injected into generation prompts.
	std::string prompt_block() const;

	std::string to_json_line() const;
	static FunctionEntry from_json_line(const std::string &line);
};

struct ContrastiveCase {
	std::string erroneous;
	std::string correct;

	bool operator==(const ContrastiveCase &) const = default;
};

// Procedural constraint repository record (R_Rule): diagnostics-keyed grammar
// constraint. Construction leaves cases empty; they arrive via consolidation.
struct ConstraintEntry {
	std::string id;
	DialectId dialect = DialectId::SQLITE;
	std::string rule_spec;
	std::vector<std::string> signature_patterns; // glob templates over normalized signatures
	std::vector<ContrastiveCase> cases;
	EntryOrigin origin = EntryOrigin::DISTILLED_FROM_DOCS;

	bool operator==(const ConstraintEntry &) const = default;

	std::string prompt_block() const;

	std::string to_json_line() const;
	static ConstraintEntry from_json_line(const std::string &line);
};

// Distilled repair: incorrect pattern, corrective exemplar, root cause.
struct KnowledgePrimitive {
	std::string incorrect_pattern;   // P_inc
	std::string corrective_exemplar; // E_cor, original identifiers retained
	std::string root_cause;          // A_rtc
	DialectId dialect = DialectId::SQLITE;

	bool operator==(const KnowledgePrimitive &) const = default;

	std::vector<std::string> validate() const;
};

} // namespace dial
