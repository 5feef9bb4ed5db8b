#pragma once

#include "dial/core/outcome.hpp"
#include "dial/sql/ast.hpp"

#include <set>
#include <string>
#include <vector>

namespace dial {

// Normalized predicate triple. Dialect realizations collapse where a
// normalization rule exists (EXTRACT(YEAR ...) = n, YEAR(col) = n, a
// full-year BETWEEN and a '%Y' strftime comparison all become "year=").
struct NormalizedPredicate {
	std::string column;     // bare column name, lowercased
	std::string comparator; // canonical, column on the left
	std::string value;      // canonicalized literal / rendered expression
	bool post_aggregation = false;

	bool operator==(const NormalizedPredicate &) const = default;
	bool operator<(const NormalizedPredicate &o) const {
		return std::tie(column, comparator, value, post_aggregation) <
		       std::tie(o.column, o.comparator, o.value, o.post_aggregation);
	}

	std::string display() const {
		return column + " " + comparator + " " + value + (post_aggregation ? " [having]" : "");
	}
};

struct JoinEdge {
	std::string left_table;  // resolved base table, lowercased; lexicographic pair order
	std::string right_table;
	std::vector<std::pair<std::string, std::string>> key_pairs;

	bool operator==(const JoinEdge &) const = default;
	bool operator<(const JoinEdge &o) const {
		return std::tie(left_table, right_table) < std::tie(o.left_table, o.right_table);
	}
};

struct AggregateUnit {
	std::string function;       // uppercased
	std::string primary_column; // first column inside the argument, bare lowercased
	std::string full_text;      // normalized rendering of the argument

	bool operator==(const AggregateUnit &o) const {
		return function == o.function && primary_column == o.primary_column;
	}
	bool operator<(const AggregateUnit &o) const {
		return std::tie(function, primary_column) < std::tie(o.function, o.primary_column);
	}
};

struct ProjectionItem {
	std::string rendered; // lowercased canonical rendering
	std::set<std::string> columns;
	std::string alias; // empty when none

	bool operator==(const ProjectionItem &) const = default;
};

struct OperatorTrace {
	std::set<std::string> tables; // resolved base tables, lowercased
	std::set<JoinEdge> joins;
	std::set<NormalizedPredicate> predicates;
	std::set<AggregateUnit> aggregates;
	std::set<std::string> group_dims; // bare columns, lowercased
	std::vector<ProjectionItem> projection;
	bool has_set_operation = false;
	bool uses_cast = false;
	std::set<std::string> cast_columns; // columns appearing inside CAST(...)
};

// Map the statement's clauses onto logical units. Unrecognized expressions
// pass through verbatim as rendered text.
OperatorTrace derive_trace(const SelectStatement &stmt);

} // namespace dial
