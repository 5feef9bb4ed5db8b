#include "dial/audit/audit.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"
#include "dial/sql/parser.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>

namespace dial {

using nlohmann::json;

const std::string &invariant_name(AuditInvariant inv) {
	static const std::array<std::string, 4> NAMES = {"topology", "constraints", "computation",
	                                                 "projection"};
	return NAMES[static_cast<size_t>(inv)];
}

std::string AuditReport::to_json() const {
	json verdicts_j = json::object();
	json details = json::array();
	for (auto &[inv, verdict] : verdicts) {
		verdicts_j[invariant_name(inv)] = verdict.pass ? "pass" : "fail";
		if (!verdict.pass) {
			details.push_back(invariant_name(inv) + ": " + verdict.details);
		}
	}
	return json {{"verdicts", verdicts_j}, {"details", details}, {"passed", passed}}.dump();
}

std::string AuditReport::describe() const {
	std::string out;
	for (auto &[inv, verdict] : verdicts) {
		out += invariant_name(inv) + ": " + (verdict.pass ? "pass" : "FAIL: " + verdict.details) + "\n";
	}
	return out;
}

StatementPtr parse_sql(const SqlText &sql) {
	return parse_select(sql.text, profile_for(sql.dialect));
}

// ---------------------------------------------------------------------------
// Intent extraction
// ---------------------------------------------------------------------------

namespace {

bool is_date_like_type(const std::string &physical_type) {
	for (auto &tok : word_tokens(physical_type)) {
		if (tok == "date" || tok == "datetime" || tok == "timestamp") {
			return true;
		}
	}
	return false;
}

std::optional<std::string> first_quoted_literal(const std::string &text) {
	size_t open = text.find('\'');
	if (open == std::string::npos) {
		return std::nullopt;
	}
	size_t close = text.find('\'', open + 1);
	if (close == std::string::npos) {
		return std::nullopt;
	}
	return text.substr(open + 1, close - open - 1);
}

std::optional<std::string> first_number(const std::string &text) {
	for (auto &tok : word_tokens(text)) {
		bool all_digits = !tok.empty();
		size_t digits = 0;
		for (char c : tok) {
			if (std::isdigit(static_cast<unsigned char>(c))) {
				digits++;
			} else if (c != '.') {
				all_digits = false;
				break;
			}
		}
		if (all_digits && digits > 0) {
			return tok;
		}
	}
	return std::nullopt;
}

std::optional<std::string> comparator_from_text(const std::string &lowered) {
	static const std::vector<std::pair<std::string, std::string>> PHRASES = {
	    {"not equal", "<>"},       {"differs from", "<>"},
	    {"other than", "<>"},      {"greater than or equal", ">="},
	    {"at least", ">="},        {"no less than", ">="},
	    {"less than or equal", "<="}, {"at most", "<="},
	    {"no more than", "<="},    {"greater than", ">"},
	    {"more than", ">"},        {"exceeds", ">"},
	    {"above", ">"},            {"less than", "<"},
	    {"below", "<"},            {"under", "<"},
	    {"equals", "="},           {"equal to", "="},
	    {"is exactly", "="},       {" is ", "="},
	    {"matches", "="},
	};
	for (auto &[phrase, op] : PHRASES) {
		if (lowered.find(phrase) != std::string::npos) {
			return op;
		}
	}
	return std::nullopt;
}

} // namespace

std::optional<PredicateIntent> extract_predicate_intent(const MacroOperator &op) {
	if (op.refs.empty()) {
		return std::nullopt;
	}
	std::string lowered = " " + to_lower(op.description) + " ";
	auto comparator = comparator_from_text(lowered);
	if (!comparator) {
		return std::nullopt;
	}
	std::optional<std::string> value = first_quoted_literal(op.description);
	if (!value) {
		value = first_number(op.description);
	}
	if (!value) {
		return std::nullopt;
	}
	PredicateIntent intent;
	intent.column = to_lower(op.refs[0].column);
	intent.comparator = *comparator;
	intent.value = *value;
	// year-extraction phrasing over a temporal column normalizes to year=
	if (contains_word_ci(op.description, "year") && is_date_like_type(op.refs[0].physical_type) &&
	    value->size() == 4) {
		intent.comparator = "year" + *comparator;
	}
	return intent;
}

std::optional<AggregateIntent> extract_aggregate_intent(const MacroOperator &op) {
	std::string lowered = to_lower(op.description);
	std::string function;
	if (contains_word_ci(lowered, "count") || contains_word_ci(lowered, "number")) {
		function = "COUNT";
	} else if (contains_word_ci(lowered, "sum") || contains_word_ci(lowered, "total")) {
		function = "SUM";
	} else if (contains_word_ci(lowered, "average") || contains_word_ci(lowered, "avg") ||
	           contains_word_ci(lowered, "mean")) {
		function = "AVG";
	} else if (contains_word_ci(lowered, "max") || contains_word_ci(lowered, "maximum") ||
	           contains_word_ci(lowered, "largest") || contains_word_ci(lowered, "highest")) {
		function = "MAX";
	} else if (contains_word_ci(lowered, "min") || contains_word_ci(lowered, "minimum") ||
	           contains_word_ci(lowered, "smallest") || contains_word_ci(lowered, "lowest")) {
		function = "MIN";
	} else {
		return std::nullopt;
	}

	// split the description at the grouping phrase
	size_t split_pos = std::string::npos;
	size_t split_len = 0;
	for (const std::string marker : {" by ", " per ", " for each "}) {
		size_t pos = lowered.rfind(marker);
		if (pos != std::string::npos && (split_pos == std::string::npos || pos > split_pos)) {
			split_pos = pos;
			split_len = marker.size();
		}
	}
	std::string measure_part = split_pos == std::string::npos ? lowered : lowered.substr(0, split_pos);
	std::string dims_part =
	    split_pos == std::string::npos ? "" : lowered.substr(split_pos + split_len);

	AggregateIntent intent;
	intent.function = function;
	for (auto &ref : op.refs) {
		std::string bare = to_lower(ref.column);
		if (contains_word_ci(measure_part, bare) && intent.column.empty()) {
			intent.column = bare;
		}
		if (!dims_part.empty() && contains_word_ci(dims_part, bare)) {
			intent.group_dims.push_back(bare);
		}
	}
	if (intent.column.empty()) {
		if (function == "COUNT") {
			intent.column = "*";
		} else {
			// first ref not claimed as a dimension
			for (auto &ref : op.refs) {
				std::string bare = to_lower(ref.column);
				if (std::find(intent.group_dims.begin(), intent.group_dims.end(), bare) ==
				    intent.group_dims.end()) {
					intent.column = bare;
					break;
				}
			}
			if (intent.column.empty()) {
				return std::nullopt;
			}
		}
	}
	return intent;
}

ProjectionIntent extract_projection_intent(const MacroOperator &op) {
	ProjectionIntent intent;
	for (auto &ref : op.refs) {
		intent.columns.push_back(to_lower(ref.column));
	}
	// "aliased as X" / "alias X" phrases name explicit output aliases
	std::string lowered = to_lower(op.description);
	auto scan_after = [&](const std::string &phrase) {
		size_t pos = 0;
		while ((pos = lowered.find(phrase, pos)) != std::string::npos) {
			size_t start = pos + phrase.size();
			std::string word;
			while (start < lowered.size() &&
			       (std::isalnum(static_cast<unsigned char>(lowered[start])) ||
			        lowered[start] == '_')) {
				word += lowered[start];
				start++;
			}
			if (!word.empty()) {
				intent.aliases.push_back(word);
			}
			pos = start;
		}
	};
	scan_after("aliased as ");
	scan_after("alias ");
	return intent;
}

// ---------------------------------------------------------------------------
// The four checks
// ---------------------------------------------------------------------------

namespace {

struct UnionFind {
	std::map<std::string, std::string> parent;

	std::string find(const std::string &x) {
		auto it = parent.find(x);
		if (it == parent.end()) {
			parent[x] = x;
			return x;
		}
		if (it->second == x) {
			return x;
		}
		std::string root = find(it->second);
		parent[x] = root;
		return root;
	}

	void unite(const std::string &a, const std::string &b) {
		parent[find(a)] = find(b);
	}
};

AuditVerdict check_topology(const OperatorTrace &trace, const DialectAwarePlan &plan) {
	AuditVerdict verdict;
	if (trace.has_set_operation) {
		verdict.pass = false;
		verdict.details = "unmodeled construct: set operation outside the plan operator vocabulary";
		return verdict;
	}
	std::set<std::string> expected;
	for (auto &op : plan.base.operators) {
		if (op.kind != MacroOperatorKind::SRC) {
			continue;
		}
		for (auto &ref : op.refs) {
			expected.insert(to_lower(ref.table));
		}
	}
	if (expected.empty()) {
		return verdict;
	}
	std::vector<std::string> missing, extra;
	for (auto &t : expected) {
		if (!trace.tables.count(t)) {
			missing.push_back(t);
		}
	}
	for (auto &t : trace.tables) {
		if (!expected.count(t)) {
			extra.push_back(t);
		}
	}
	if (!missing.empty() || !extra.empty()) {
		verdict.pass = false;
		verdict.details = "source tables diverge from the plan";
		if (!missing.empty()) {
			verdict.details += "; missing: " + join(missing, ", ");
		}
		if (!extra.empty()) {
			verdict.details += "; extra: " + join(extra, ", ");
		}
		return verdict;
	}
	if (expected.size() > 1) {
		UnionFind uf;
		for (auto &t : expected) {
			uf.find(t);
		}
		for (auto &edge : trace.joins) {
			uf.unite(edge.left_table, edge.right_table);
		}
		std::string root = uf.find(*expected.begin());
		for (auto &t : expected) {
			if (uf.find(t) != root) {
				verdict.pass = false;
				verdict.details = "join relationships do not connect the plan's source tables (" +
				                  t + " is unlinked)";
				return verdict;
			}
		}
	}
	return verdict;
}

bool values_match(const std::string &a, const std::string &b) {
	double da, db;
	if (parse_double(a, da) && parse_double(b, db)) {
		return da == db;
	}
	return iequals(a, b);
}

AuditVerdict check_constraints(const OperatorTrace &trace, const DialectAwarePlan &plan,
                               const AuditOptions &options) {
	AuditVerdict verdict;
	std::vector<std::string> missing;
	for (auto &op : plan.base.operators) {
		if (op.kind != MacroOperatorKind::FLT) {
			continue;
		}
		auto intent = extract_predicate_intent(op);
		if (!intent) {
			// free-text intent: optional adjudication, otherwise unverifiable
			if (!options.deterministic && options.llm && options.templates) {
				std::string aspect;
				for (auto &p : trace.predicates) {
					aspect += p.display() + "\n";
				}
				ChatRequest req;
				req.template_id = "audit_adjudicate";
				req.rendered_prompt = options.templates->render(
				    "audit_adjudicate", {{"intent", op.description}, {"aspect", aspect}});
				auto reply = options.llm->complete(req);
				if (!starts_with_ci(trim(reply.text), "yes")) {
					missing.push_back(op.description);
				}
			}
			continue;
		}
		bool found = false;
		for (auto &p : trace.predicates) {
			if (p.column == intent->column && p.comparator == intent->comparator &&
			    values_match(p.value, intent->value)) {
				found = true;
				break;
			}
		}
		if (!found) {
			missing.push_back(intent->column + " " + intent->comparator + " " + intent->value);
		}
	}
	if (!missing.empty()) {
		verdict.pass = false;
		verdict.details = "missing or altered filter predicate: " + join(missing, "; ");
	}
	return verdict;
}

AuditVerdict check_computation(const OperatorTrace &trace, const DialectAwarePlan &plan) {
	AuditVerdict verdict;
	std::vector<std::string> problems;
	for (auto &op : plan.base.operators) {
		if (op.kind == MacroOperatorKind::AGG) {
			auto intent = extract_aggregate_intent(op);
			if (!intent) {
				continue;
			}
			bool found = false;
			std::string actual;
			for (auto &unit : trace.aggregates) {
				if (unit.primary_column == intent->column ||
				    (intent->column == "*" && unit.primary_column == "*")) {
					actual = unit.function;
					if (unit.function == intent->function) {
						found = true;
						break;
					}
				}
			}
			if (!found) {
				if (!actual.empty()) {
					problems.push_back(intent->function + "(" + intent->column + ") realized as " +
					                   actual + "(" + intent->column + ")");
				} else {
					problems.push_back("aggregate " + intent->function + "(" + intent->column +
					                   ") absent");
				}
				continue;
			}
			for (auto &dim : intent->group_dims) {
				if (!trace.group_dims.count(dim)) {
					problems.push_back("grouping dimension '" + dim + "' absent");
				}
			}
		}
		if (op.kind == MacroOperatorKind::CAL && !op.refs.empty() &&
		    (contains_word_ci(op.description, "cast") || contains_word_ci(op.description, "convert") ||
		     contains_word_ci(op.description, "numeric"))) {
			std::string column = to_lower(op.refs[0].column);
			if (!trace.uses_cast || !trace.cast_columns.count(column)) {
				problems.push_back("type conversion of '" + column + "' absent");
			}
		}
	}
	if (!problems.empty()) {
		verdict.pass = false;
		verdict.details = join(problems, "; ");
	}
	return verdict;
}

AuditVerdict check_projection(const OperatorTrace &trace, const DialectAwarePlan &plan) {
	AuditVerdict verdict;
	std::vector<std::string> problems;
	std::set<std::string> projected_columns;
	std::set<std::string> aliases;
	for (auto &item : trace.projection) {
		for (auto &c : item.columns) {
			projected_columns.insert(c);
		}
		if (!item.alias.empty()) {
			aliases.insert(to_lower(item.alias));
		}
	}
	for (auto &op : plan.base.operators) {
		if (op.kind != MacroOperatorKind::ORG) {
			continue;
		}
		auto intent = extract_projection_intent(op);
		for (auto &col : intent.columns) {
			if (!projected_columns.count(col)) {
				problems.push_back("output column '" + col + "' absent from projection");
			}
		}
		for (auto &alias : intent.aliases) {
			if (!aliases.count(alias)) {
				problems.push_back("declared alias '" + alias + "' absent from projection");
			}
		}
	}
	if (!problems.empty()) {
		verdict.pass = false;
		verdict.details = join(problems, "; ");
	}
	return verdict;
}

} // namespace

AuditReport audit(const SqlText &q_exec, const DialectAwarePlan &plan, const AuditOptions &options) {
	auto stmt = parse_sql(q_exec); // ParseException propagates
	OperatorTrace trace = derive_trace(*stmt);

	AuditReport report;
	report.verdicts[AuditInvariant::TOPOLOGY] = check_topology(trace, plan);
	report.verdicts[AuditInvariant::CONSTRAINTS] = check_constraints(trace, plan, options);
	report.verdicts[AuditInvariant::COMPUTATION] = check_computation(trace, plan);
	report.verdicts[AuditInvariant::PROJECTION] = check_projection(trace, plan);
	report.passed = true;
	for (auto &[inv, verdict] : report.verdicts) {
		report.passed = report.passed && verdict.pass;
	}
	return report;
}

} // namespace dial
