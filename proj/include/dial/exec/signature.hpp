#pragma once

#include "dial/core/outcome.hpp"

#include <optional>
#include <string>

namespace dial {

// Error message reduced to a retrieval key: identifiers, literals and numbers
// replaced by placeholders; vendor code split out.
struct ErrorSignature {
	std::optional<std::string> vendor_code;
	std::string template_text;
	DialectId dialect = DialectId::SQLITE;

	bool operator==(const ErrorSignature &) const = default;

	// "[code] template" form used for embedding-based fuzzy rule lookup.
	std::string key_text() const;
};

// Placeholders (UTF-8): identifiers, string literals, standalone numbers.
extern const std::string PLACEHOLDER_ID;
extern const std::string PLACEHOLDER_LIT;
extern const std::string PLACEHOLDER_NUM;

// Idempotent: normalizing an already-normalized message changes nothing.
ErrorSignature normalize_signature(const ErrorTrace &trace, DialectId dialect);

// Glob match with '*' wildcards over the signature "[code] template" key,
// case-insensitive. Used by the constraint repository's signature patterns.
bool glob_match(const std::string &pattern, const std::string &text);

} // namespace dial
