#include "dial/kb/csr.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <nlohmann/json.hpp>

namespace dial {

using nlohmann::json;

const std::string FALLBACK_CATEGORY = "AUX";

const CanonicalReference &CanonicalReference::builtin() {
	static const CanonicalReference REF = [] {
		CanonicalReference ref;
		auto cat = [&](std::string name, std::vector<AtomicSyntaxPoint> points) {
			ref.categories.push_back({std::move(name), std::move(points)});
		};

		cat("String Manipulation",
		    {
		        {"Substring Extraction",
		         "extract a substring from a string value by position and length, SUBSTRING(value FROM start FOR length)"},
		        {"String Concatenation",
		         "concatenate two or more string values into one combined string"},
		        {"Case Conversion",
		         "convert a string value to upper case or lower case letters"},
		        {"String Length",
		         "measure the character length of a string value"},
		        {"Trimming and Padding",
		         "trim leading or trailing characters from a string, pad a string to a fixed width"},
		    });
		cat("Date & Time Operations",
		    {
		        {"Date Truncation",
		         "truncate a date or timestamp to a coarser precision such as day, month or year"},
		        {"Interval Arithmetic",
		         "add or subtract an interval, compute the difference between two dates in years, months or days"},
		        {"Timestamp Extraction",
		         "extract a date part such as the year, month or day from a date or timestamp value"},
		        {"Date Formatting",
		         "format a date or timestamp value into text using a format pattern"},
		        {"Date Parsing",
		         "parse a text value into a date or timestamp using a format pattern"},
		        {"Current Date and Time",
		         "obtain the current date, current time or current timestamp of the session"},
		    });
		cat("Window Functions",
		    {
		        {"Row Numbering",
		         "assign sequential row numbers within a partition ordered by an expression"},
		        {"Ranking",
		         "rank rows within a partition with rank or dense rank semantics"},
		        {"Windowed Aggregation",
		         "compute an aggregate over a window of rows without collapsing them"},
		        {"Lead and Lag Offsets",
		         "access the value of a previous or following row within a window"},
		    });
		cat("Type Conversion & Casting",
		    {
		        {"Explicit Cast",
		         "explicitly convert a value from one data type to another, CAST(value AS type)"},
		        {"Safe Conversion",
		         "convert a value to another type returning null instead of an error on failure"},
		        {"Numeric Formatting",
		         "format a numeric value into text with grouping and decimal patterns"},
		        {"Text To Number",
		         "convert textual digits into a numeric value for arithmetic"},
		    });
		cat("Aggregation & Grouping",
		    {
		        {"Basic Aggregates",
		         "compute sum, count, average, minimum or maximum over a set of rows"},
		        {"Grouped Aggregation",
		         "group rows by one or more dimensions and aggregate within each group"},
		        {"Conditional Aggregation",
		         "aggregate only the rows satisfying a condition using a case expression inside the aggregate"},
		        {"String Aggregation",
		         "aggregate string values from a group of rows into one delimited list"},
		        {"Distinct Counting",
		         "count the number of distinct values of an expression"},
		    });
		cat("Conditional & Null Handling",
		    {
		        {"Case Expression",
		         "choose between result values based on ordered conditions, CASE WHEN condition THEN result END"},
		        {"Null Coalescing",
		         "return the first non-null value from a list of expressions"},
		        {"Null-Safe Comparison",
		         "compare two values treating null as an ordinary comparable value"},
		        {"Null Ordering",
		         "control whether null values sort first or last in an ordering"},
		    });
		cat("Pagination & Row Limiting",
		    {
		        {"Row Count Limiting",
		         "limit the number of rows returned by a query to a fixed count"},
		        {"Offset Pagination",
		         "skip a number of rows before returning the next page of results"},
		        {"Top-N Selection",
		         "select only the first n rows under a specified ordering"},
		    });
		cat("Identifier & Literal Quoting",
		    {
		        {"Identifier Quoting",
		         "quote a table or column identifier so reserved words or mixed case names remain valid"},
		        {"String Literal Quoting",
		         "write a string literal with the correct quote characters and escaping"},
		        {"Reserved Keyword Escaping",
		         "use a reserved keyword as an object name by escaping or quoting it"},
		    });
		cat("Joins & Set Operations",
		    {
		        {"Inner Join",
		         "combine rows of two relations on a join condition keeping only matches"},
		        {"Outer Join",
		         "combine rows keeping unmatched rows of the left, right or both sides"},
		        {"Cross Join",
		         "form the cartesian product of two relations"},
		        {"Set Union",
		         "combine the rows of two queries removing or keeping duplicates"},
		        {"Set Difference and Intersection",
		         "subtract or intersect the row sets of two queries"},
		    });
		cat("Subqueries & CTEs",
		    {
		        {"Scalar Subquery",
		         "use a single-value subquery inside an expression or comparison"},
		        {"Derived Table",
		         "use a subquery as a table source in the FROM clause with an alias"},
		        {"Common Table Expression",
		         "name a subquery with WITH so the main query can reference it"},
		        {"Correlated Subquery",
		         "reference columns of the outer query from within a subquery"},
		    });
		cat("Regular Expressions & Pattern Matching",
		    {
		        {"Pattern Match Predicate",
		         "match a string against a wildcard or regular-expression pattern in a predicate"},
		        {"Regex Extraction",
		         "extract the portion of a string matching a regular expression"},
		        {"Regex Replacement",
		         "replace the portions of a string matching a regular expression"},
		        {"Like Escaping",
		         "escape wildcard characters inside a LIKE pattern"},
		    });
		return ref;
	}();
	return REF;
}

bool CanonicalReference::has_category(const std::string &name) const {
	return !canonical_category(name).empty();
}

std::string CanonicalReference::canonical_category(const std::string &name) const {
	for (auto &c : categories) {
		if (iequals(c.name, name)) {
			return c.name;
		}
	}
	return "";
}

std::vector<std::string> CanonicalReference::category_names() const {
	std::vector<std::string> names;
	names.reserve(categories.size());
	for (auto &c : categories) {
		names.push_back(c.name);
	}
	return names;
}

size_t CanonicalReference::total_atomic_points() const {
	size_t n = 0;
	for (auto &c : categories) {
		n += c.atomic_points.size();
	}
	return n;
}

std::vector<std::string> CanonicalReference::validate() const {
	std::vector<std::string> violations;
	if (categories.size() != 11) {
		violations.push_back("expected 11 categories, have " + std::to_string(categories.size()));
	}
	if (total_atomic_points() < 40) {
		violations.push_back("expected at least 40 atomic points, have " +
		                     std::to_string(total_atomic_points()));
	}
	for (auto &c : categories) {
		if (c.name == "Date & Time Operations" && c.atomic_points.size() != 6) {
			violations.push_back("Date & Time Operations must have exactly 6 atomic points, has " +
			                     std::to_string(c.atomic_points.size()));
		}
	}
	return violations;
}

std::string CanonicalReference::to_json() const {
	json cats = json::array();
	for (auto &c : categories) {
		json points = json::array();
		for (auto &p : c.atomic_points) {
			points.push_back({{"name", p.name}, {"ansi_sketch", p.ansi_sketch}});
		}
		cats.push_back({{"name", c.name}, {"atomic_points", points}});
	}
	return json {{"categories", cats}}.dump(2) + "\n";
}

CanonicalReference CanonicalReference::from_json(const std::string &text) {
	CanonicalReference ref;
	json j;
	try {
		j = json::parse(text);
	} catch (const json::exception &e) {
		throw ParseException(std::string("csr json: ") + e.what());
	}
	for (auto &cj : j.at("categories")) {
		CanonicalCategory c;
		c.name = cj.at("name").get<std::string>();
		for (auto &pj : cj.at("atomic_points")) {
			c.atomic_points.push_back(
			    {pj.at("name").get<std::string>(), pj.at("ansi_sketch").get<std::string>()});
		}
		ref.categories.push_back(std::move(c));
	}
	return ref;
}

} // namespace dial
