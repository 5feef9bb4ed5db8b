#include "dial/planner/plan.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>

namespace dial {

using nlohmann::json;

namespace {

const std::array<std::string, 6> KIND_NAMES = {"src", "flt", "cal", "agg", "org", "aux"};

// Canonical execution rank; org must come last, aux floats before it.
int kind_rank(MacroOperatorKind kind) {
	switch (kind) {
	case MacroOperatorKind::SRC:
		return 0;
	case MacroOperatorKind::FLT:
		return 1;
	case MacroOperatorKind::CAL:
		return 2;
	case MacroOperatorKind::AGG:
		return 3;
	case MacroOperatorKind::AUX:
		return 4;
	case MacroOperatorKind::ORG:
		return 5;
	}
	return 6;
}

} // namespace

const std::string &operator_kind_name(MacroOperatorKind kind) {
	return KIND_NAMES[static_cast<size_t>(kind)];
}

std::optional<MacroOperatorKind> operator_kind_from_name(const std::string &name) {
	std::string lowered = to_lower(trim(name));
	for (size_t i = 0; i < KIND_NAMES.size(); i++) {
		if (KIND_NAMES[i] == lowered) {
			return static_cast<MacroOperatorKind>(i);
		}
	}
	return std::nullopt;
}

std::vector<std::string> LogicalPlan::order_violations() const {
	std::vector<std::string> violations;
	for (size_t i = 0; i < operators.size(); i++) {
		for (size_t j = i + 1; j < operators.size(); j++) {
			auto a = operators[i].kind;
			auto b = operators[j].kind;
			if (a == MacroOperatorKind::AUX || b == MacroOperatorKind::AUX) {
				continue;
			}
			if (kind_rank(a) > kind_rank(b)) {
				violations.push_back(operator_kind_name(a) + " at position " + std::to_string(i) +
				                     " precedes " + operator_kind_name(b) + " at position " +
				                     std::to_string(j));
			}
		}
		if (operators[i].kind == MacroOperatorKind::ORG && i + 1 < operators.size() &&
		    operators[i + 1].kind == MacroOperatorKind::AUX) {
			// aux trailing org is fine; nothing to record
		}
	}
	return violations;
}

void LogicalPlan::canonicalize_order() {
	std::stable_sort(operators.begin(), operators.end(),
	                 [](const MacroOperator &a, const MacroOperator &b) {
		                 if (a.kind == MacroOperatorKind::AUX || b.kind == MacroOperatorKind::AUX) {
			                 // aux is unconstrained except org stays last
			                 if (a.kind == MacroOperatorKind::AUX) {
				                 return b.kind == MacroOperatorKind::ORG;
			                 }
			                 return a.kind != MacroOperatorKind::ORG;
		                 }
		                 return kind_rank(a.kind) < kind_rank(b.kind);
	                 });
	for (size_t i = 0; i < operators.size(); i++) {
		operators[i].order_index = i;
	}
}

std::string LogicalPlan::to_prompt_text() const {
	std::string out;
	for (size_t i = 0; i < operators.size(); i++) {
		auto &op = operators[i];
		out += "[" + std::to_string(i + 1) + "] " + to_upper(operator_kind_name(op.kind)) + " | " +
		       op.description + " | ";
		for (size_t r = 0; r < op.refs.size(); r++) {
			if (r > 0) {
				out += ", ";
			}
			out += op.refs[r].display();
		}
		out += "\n";
	}
	return out;
}

std::vector<std::string> DialectAwarePlan::validate() const {
	std::vector<std::string> violations;
	size_t sensitive_count = 0;
	for (auto &op : base.operators) {
		if (op.sensitive) {
			sensitive_count++;
		}
	}
	if (enriched.size() != sensitive_count) {
		violations.push_back("enriched size " + std::to_string(enriched.size()) +
		                     " != sensitive operator count " + std::to_string(sensitive_count));
	}
	std::vector<bool> seen(base.operators.size(), false);
	for (auto &e : enriched) {
		if (e.source_index >= base.operators.size()) {
			violations.push_back("source_index out of range: " + std::to_string(e.source_index));
			continue;
		}
		if (seen[e.source_index]) {
			violations.push_back("duplicate source_index: " + std::to_string(e.source_index));
		}
		seen[e.source_index] = true;
		if (!base.operators[e.source_index].sensitive) {
			violations.push_back("source_index " + std::to_string(e.source_index) +
			                     " points at a non-sensitive operator");
		}
	}
	return violations;
}

std::string DialectAwarePlan::to_json() const {
	json ops = json::array();
	for (auto &op : base.operators) {
		json refs = json::array();
		for (auto &r : op.refs) {
			refs.push_back({{"table", r.table}, {"column", r.column}, {"type", r.physical_type}});
		}
		ops.push_back({
		    {"kind", operator_kind_name(op.kind)},
		    {"description", op.description},
		    {"refs", refs},
		    {"sensitive", op.sensitive},
		    {"order_index", op.order_index},
		});
	}
	json enriched_j = json::array();
	for (auto &e : enriched) {
		enriched_j.push_back({
		    {"category", e.category},
		    {"standard_description", e.standard_description},
		    {"source_index", e.source_index},
		});
	}
	return json {{"operators", ops}, {"enriched", enriched_j}, {"dialect", dialect_name(dialect)}}
	           .dump(2) +
	       "\n";
}

DialectAwarePlan DialectAwarePlan::from_json(const std::string &text) {
	DialectAwarePlan plan;
	json j;
	try {
		j = json::parse(text);
	} catch (const json::exception &e) {
		throw ParseException(std::string("plan json: ") + e.what());
	}
	for (auto &oj : j.at("operators")) {
		MacroOperator op;
		auto kind = operator_kind_from_name(oj.at("kind").get<std::string>());
		if (!kind) {
			throw ParseException("unknown operator kind: " + oj.at("kind").get<std::string>());
		}
		op.kind = *kind;
		op.description = oj.at("description").get<std::string>();
		for (auto &rj : oj.at("refs")) {
			op.refs.push_back({rj.at("table").get<std::string>(), rj.at("column").get<std::string>(),
			                   rj.at("type").get<std::string>()});
		}
		op.sensitive = oj.at("sensitive").get<bool>();
		op.order_index = oj.at("order_index").get<size_t>();
		plan.base.operators.push_back(std::move(op));
	}
	for (auto &ej : j.at("enriched")) {
		plan.enriched.push_back({ej.at("category").get<std::string>(),
		                         ej.at("standard_description").get<std::string>(),
		                         ej.at("source_index").get<size_t>()});
	}
	auto d = dialect_from_name(j.at("dialect").get<std::string>());
	if (!d) {
		throw ParseException("unknown dialect: " + j.at("dialect").get<std::string>());
	}
	plan.dialect = *d;
	return plan;
}

std::string DialectAwarePlan::to_prompt_text() const {
	std::string out = base.to_prompt_text();
	for (auto &e : enriched) {
		out += "  => operator " + std::to_string(e.source_index + 1) + ": [" + e.category + "] " +
		       e.standard_description + "\n";
	}
	return out;
}

namespace {

const std::array<std::string, 8> BLACKLIST_KEYWORDS = {
    "select", "from", "where", "group", "join", "order", "having", "limit",
};

// Dialect function names flagged when written in call syntax "NAME(".
const std::vector<std::string> &blacklist_function_names() {
	static const std::vector<std::string> NAMES = {
	    "concat",        "cast",      "extract",  "substr",     "substring", "group_concat",
	    "listagg",       "string_agg", "timestampdiff", "datediff", "date_format", "to_char",
	    "to_date",       "strftime",  "coalesce", "nvl",        "ifnull",    "row_number",
	    "rank",          "count",     "sum",      "avg",        "min",       "max",
	    "char_length",   "length",    "date_trunc",
	};
	return NAMES;
}

} // namespace

std::vector<std::string> blacklist_violations(const std::string &description) {
	std::vector<std::string> violations;
	for (auto &kw : BLACKLIST_KEYWORDS) {
		if (contains_word_ci(description, kw)) {
			violations.push_back("SQL keyword '" + to_upper(kw) + "' in description");
		}
	}
	std::string lowered = to_lower(description);
	for (auto &fn : blacklist_function_names()) {
		size_t pos = 0;
		while ((pos = lowered.find(fn, pos)) != std::string::npos) {
			bool word_start = pos == 0 || (!std::isalnum(static_cast<unsigned char>(lowered[pos - 1])) &&
			                               lowered[pos - 1] != '_');
			size_t after = pos + fn.size();
			// skip whitespace between name and paren
			size_t scan = after;
			while (scan < lowered.size() && lowered[scan] == ' ') {
				scan++;
			}
			if (word_start && scan < lowered.size() && lowered[scan] == '(') {
				violations.push_back("function-call syntax '" + to_upper(fn) + "(' in description");
				break;
			}
			pos = after;
		}
	}
	return violations;
}

} // namespace dial
