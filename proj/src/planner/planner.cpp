#include "dial/planner/planner.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <algorithm>

namespace dial {

namespace {

constexpr int PLAN_RETRIES = 2;

bool is_textual_type(const std::string &physical_type) {
	static const std::set<std::string> TEXTUAL = {
	    "text", "char", "varchar", "nvarchar", "nchar", "clob", "string", "character",
	};
	for (auto &tok : word_tokens(physical_type)) {
		if (TEXTUAL.count(tok)) {
			return true;
		}
	}
	return false;
}

bool has_numeric_op_cue(const std::string &description) {
	static const std::vector<std::string> CUES = {"sum", "total", "average", "avg", "mean"};
	for (auto &cue : CUES) {
		if (contains_word_ci(description, cue)) {
			return true;
		}
	}
	return false;
}

// "table.column (TYPE)" mentions, comma separated.
std::vector<SchemaRef> parse_refs(const std::string &text) {
	std::vector<SchemaRef> refs;
	for (auto &part : split(text, ',')) {
		std::string t = trim(part);
		if (t.empty()) {
			continue;
		}
		SchemaRef ref;
		size_t dot = t.find('.');
		size_t paren = t.find('(');
		if (dot == std::string::npos) {
			continue;
		}
		ref.table = trim(t.substr(0, dot));
		if (paren != std::string::npos && paren > dot) {
			ref.column = trim(t.substr(dot + 1, paren - dot - 1));
			size_t close = t.find(')', paren);
			ref.physical_type =
			    close == std::string::npos ? trim(t.substr(paren + 1)) : trim(t.substr(paren + 1, close - paren - 1));
		} else {
			ref.column = trim(t.substr(dot + 1));
		}
		if (!ref.table.empty() && !ref.column.empty()) {
			refs.push_back(std::move(ref));
		}
	}
	return refs;
}

} // namespace

std::vector<TypeConflict> detect_type_conflicts(const LogicalPlan &plan, const SchemaCatalog &schema) {
	std::vector<TypeConflict> conflicts;
	for (size_t i = 0; i < plan.operators.size(); i++) {
		auto &op = plan.operators[i];
		// only computing operators can conflict with a stored type; sourcing
		// and result organization never evaluate the column
		bool computing = op.kind == MacroOperatorKind::AGG || op.kind == MacroOperatorKind::CAL ||
		                 op.kind == MacroOperatorKind::FLT;
		if (!computing || !has_numeric_op_cue(op.description)) {
			continue;
		}
		// the numeric operation applies to the measure part of the
		// description; grouping dimensions after "by"/"per"/"for each" are
		// not operands
		std::string measure = to_lower(op.description);
		for (const std::string marker : {" by ", " per ", " for each "}) {
			size_t pos = measure.rfind(marker);
			if (pos != std::string::npos) {
				measure = measure.substr(0, pos);
			}
		}
		for (auto &ref : op.refs) {
			if (!contains_word_ci(measure, ref.column)) {
				continue;
			}
			std::string type = ref.physical_type;
			if (const ColumnDef *col = schema.find_column(ref.table, ref.column)) {
				type = col->physical_type;
			}
			if (!is_textual_type(type)) {
				continue;
			}
			// an earlier CAL already covering this column means the plan has
			// its compensation in place
			bool covered = false;
			for (size_t k = 0; k < i; k++) {
				if (plan.operators[k].kind != MacroOperatorKind::CAL) {
					continue;
				}
				for (auto &cref : plan.operators[k].refs) {
					if (iequals(cref.table, ref.table) && iequals(cref.column, ref.column)) {
						covered = true;
					}
				}
			}
			if (!covered) {
				TypeConflict c;
				c.operator_index = i;
				c.ref = ref;
				c.ref.physical_type = type;
				conflicts.push_back(std::move(c));
			}
		}
	}
	return conflicts;
}

LogicalPlan Planner::parse_plan_reply(const std::string &reply, const TranslationTask &task,
                                      std::string &problem) const {
	LogicalPlan plan;
	problem.clear();
	size_t parsed = 0;
	for (auto &raw_line : split(reply, '\n')) {
		std::string line = trim(raw_line);
		if (line.empty()) {
			continue;
		}
		if (line[0] != '[') {
			problem = "line does not start with [k]: " + line;
			return {};
		}
		size_t close = line.find(']');
		if (close == std::string::npos) {
			problem = "missing ] in line: " + line;
			return {};
		}
		auto fields = split(line.substr(close + 1), '|');
		if (fields.size() < 2) {
			problem = "expected 'KIND | description | refs' in line: " + line;
			return {};
		}
		auto kind = operator_kind_from_name(trim(fields[0]));
		if (!kind) {
			problem = "unknown operator kind '" + trim(fields[0]) + "'";
			return {};
		}
		MacroOperator op;
		op.kind = *kind;
		op.description = trim(fields[1]);
		if (op.description.empty()) {
			problem = "empty description in line: " + line;
			return {};
		}
		auto bl = blacklist_violations(op.description);
		if (!bl.empty()) {
			problem = "description contains SQL tokens (" + join(bl, "; ") + "): " + op.description;
			return {};
		}
		if (fields.size() >= 3) {
			op.refs = parse_refs(fields[2]);
		}
		// refs must resolve in the task schema; physical types come from it
		for (auto &ref : op.refs) {
			const ColumnDef *col = task.schema.find_column(ref.table, ref.column);
			if (!col) {
				problem = "ref does not resolve in schema: " + ref.table + "." + ref.column;
				return {};
			}
			ref.physical_type = col->physical_type;
		}
		op.order_index = parsed++;
		plan.operators.push_back(std::move(op));
	}
	if (plan.operators.empty()) {
		problem = "reply contains no operator lines";
		return {};
	}
	return plan;
}

LogicalPlan Planner::build_logical_plan(const TranslationTask &task) const {
	auto violations = validate_task(task);
	if (!violations.empty()) {
		throw DialException("invalid task: " + join(violations, "; "));
	}
	std::map<std::string, std::string> bindings = {
	    {"question", task.question},
	    {"dialect", dialect_name(task.dialect)},
	    {"schema", task.schema.describe()},
	};
	ChatRequest req;
	req.template_id = "plan_build";
	req.rendered_prompt = templates.render("plan_build", bindings);

	std::string problem;
	std::string last_reply;
	for (int attempt = 0; attempt <= PLAN_RETRIES; attempt++) {
		auto reply = llm.complete(req);
		last_reply = reply.text;
		LogicalPlan plan = parse_plan_reply(reply.text, task, problem);
		if (problem.empty()) {
			plan.canonicalize_order();
			return plan;
		}
		// repair prompt for the next attempt
		req.template_id = "plan_repair";
		req.rendered_prompt = templates.render("plan_repair", {
		                                                          {"problem", problem},
		                                                          {"previous", last_reply},
		                                                          {"question", task.question},
		                                                          {"dialect", dialect_name(task.dialect)},
		                                                          {"schema", task.schema.describe()},
		                                                      });
	}
	if (problem.find("SQL tokens") != std::string::npos) {
		throw BlacklistViolationException(problem);
	}
	throw PlanFormatException(problem);
}

LogicalPlan Planner::mine_implicit_logic(const LogicalPlan &plan, const SchemaCatalog &schema) const {
	auto conflicts = detect_type_conflicts(plan, schema);
	if (conflicts.empty()) {
		return plan;
	}
	LogicalPlan mined = plan;
	// insert back-to-front so stored indices stay valid
	std::sort(conflicts.begin(), conflicts.end(),
	          [](const TypeConflict &a, const TypeConflict &b) {
		          return a.operator_index > b.operator_index;
	          });
	for (auto &conflict : conflicts) {
		const ColumnDef *col = schema.find_column(conflict.ref.table, conflict.ref.column);
		std::string samples = col && !col->samples.empty() ? join(col->samples, ", ") : "(none)";
		ChatRequest req;
		req.template_id = "implicit_cal";
		req.rendered_prompt = templates.render(
		    "implicit_cal", {
		                        {"operator", mined.operators[conflict.operator_index].description},
		                        {"column", conflict.ref.table + "." + conflict.ref.column},
		                        {"type", conflict.ref.physical_type},
		                        {"samples", samples},
		                    });
		std::string description;
		std::string problem;
		for (int attempt = 0; attempt <= PLAN_RETRIES; attempt++) {
			auto reply = llm.complete(req);
			std::string line = trim(reply.text);
			// accept "CAL | description"
			auto fields = split(line, '|');
			if (fields.size() >= 2 && iequals(trim(fields[0]), "cal")) {
				std::string candidate = trim(fields[1]);
				auto bl = blacklist_violations(candidate);
				if (!candidate.empty() && bl.empty()) {
					description = candidate;
					break;
				}
				problem = "blacklisted or empty CAL description";
			} else {
				problem = "expected 'CAL | description', got: " + line;
			}
		}
		if (description.empty()) {
			throw PlanFormatException("implicit-logic mining failed: " + problem);
		}
		MacroOperator cal;
		cal.kind = MacroOperatorKind::CAL;
		cal.description = description;
		cal.refs = {conflict.ref};
		mined.operators.insert(mined.operators.begin() + conflict.operator_index, std::move(cal));
	}
	for (size_t i = 0; i < mined.operators.size(); i++) {
		mined.operators[i].order_index = i;
	}
	return mined;
}

DialectAwarePlan Planner::map_functional_categories(const LogicalPlan &plan,
                                                    const CanonicalReference &csr,
                                                    DialectId dialect) const {
	DialectAwarePlan result;
	result.base = plan;
	result.dialect = dialect;

	std::string categories = join(csr.category_names(), "\n");
	for (size_t i = 0; i < plan.operators.size(); i++) {
		auto &op = plan.operators[i];
		if (!op.sensitive) {
			continue;
		}
		std::string refs;
		for (size_t r = 0; r < op.refs.size(); r++) {
			refs += (r ? ", " : "") + op.refs[r].display();
		}
		ChatRequest req;
		req.template_id = "categorize";
		req.rendered_prompt = templates.render("categorize", {
		                                                         {"categories", categories},
		                                                         {"kind", to_upper(operator_kind_name(op.kind))},
		                                                         {"description", op.description},
		                                                         {"refs", refs},
		                                                     });
		StandardizedOperator standardized;
		standardized.source_index = i;
		bool resolved = false;
		for (int attempt = 0; attempt <= PLAN_RETRIES && !resolved; attempt++) {
			auto reply = llm.complete(req);
			auto fields = split(trim(reply.text), '|');
			if (fields.size() < 2) {
				continue;
			}
			std::string category = csr.canonical_category(trim(fields[0]));
			std::string description = trim(fields[1]);
			if (!category.empty() && !description.empty()) {
				standardized.category = category;
				standardized.standard_description = description;
				resolved = true;
			}
		}
		if (!resolved) {
			// UnknownCategory after retries: AUX fallback
			standardized.category = FALLBACK_CATEGORY;
			standardized.standard_description = op.description;
		}
		result.enriched.push_back(std::move(standardized));
	}
	return result;
}

} // namespace dial
