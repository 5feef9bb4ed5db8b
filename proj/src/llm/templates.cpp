#include "dial/llm/templates.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <cctype>
#include <filesystem>
#include <vector>

namespace dial {

namespace {

const std::map<std::string, std::string> &default_templates() {
	static const std::map<std::string, std::string> DEFAULTS = {
	    {"plan_build",
	     "You are a query planning assistant. Decompose the request into a linearized chain of\n"
	     "logical operators, one per line, in strict relational execution order\n"
	     "(sourcing, then filtering, then calculation, then aggregation, then organization).\n"
	     "Operator kinds: SRC (base relations and their associations), FLT (predicates),\n"
	     "CAL (row-level scalar derivations), AGG (grouping and summary metrics),\n"
	     "ORG (final projection, sorting, cardinality), AUX (anything else).\n"
	     "Each line: [k] KIND | plain-language description | refs\n"
	     "refs are comma-separated table.column (TYPE) mentions taken from the schema.\n"
	     "Describe every step in plain language only. Do not write SQL keywords or\n"
	     "SQL function calls anywhere in the descriptions.\n"
	     "\n"
	     "Question: {question}\n"
	     "Target dialect: {dialect}\n"
	     "Schema:\n{schema}\n"},
	    {"plan_repair",
	     "Your previous plan output could not be used: {problem}\n"
	     "Re-emit the full plan, one operator per line, exactly in the form\n"
	     "[k] KIND | description | refs\n"
	     "with no SQL keywords or function calls in any description.\n"
	     "\n"
	     "Question: {question}\n"
	     "Target dialect: {dialect}\n"
	     "Schema:\n{schema}\n"
	     "Previous output:\n{previous}\n"},
	    {"implicit_cal",
	     "A step in this plan applies a numeric operation to a column whose stored form\n"
	     "is not directly numeric. Describe, in one plain-language line, the row-level\n"
	     "preparation needed before that step (cleaning and conversion), based on the\n"
	     "sample values. No SQL keywords or function calls.\n"
	     "Reply with exactly one line: CAL | description\n"
	     "\n"
	     "Consuming step: {operator}\n"
	     "Column: {column} (type {type})\n"
	     "Sample values: {samples}\n"},
	    {"categorize",
	     "Classify the operator below into exactly one category from the list, and\n"
	     "restate its core intent as one terse standardized instruction, dropping any\n"
	     "business-logic justification.\n"
	     "Reply with exactly one line: CATEGORY | standardized description\n"
	     "\n"
	     "Categories:\n{categories}\n"
	     "Operator kind: {kind}\n"
	     "Operator description: {description}\n"
	     "Referenced columns: {refs}\n"},
	    {"generate_sql",
	     "Write one {dialect} SQL query implementing the plan below. Use the provided\n"
	     "dialect function references where they apply; prefer native {dialect} constructs.\n"
	     "Reply with the SQL only, no commentary, no code fences.\n"
	     "\n"
	     "Schema:\n{schema}\n"
	     "Plan:\n{plan}\n"
	     "Dialect function references:\n{templates}\n"},
	    {"direct_generate",
	     "Write one {dialect} SQL query answering the question below.\n"
	     "Reply with the SQL only, no commentary, no code fences.\n"
	     "\n"
	     "Question: {question}\n"
	     "Schema:\n{schema}\n"},
	    {"rule_fix",
	     "The query below failed on {dialect}. A known dialect constraint matches the\n"
	     "error. Apply the rule to repair the query; change nothing else.\n"
	     "Reply with the corrected SQL only, no commentary, no code fences.\n"
	     "\n"
	     "Failing query:\n{sql}\n"
	     "Error: {error}\n"
	     "Rule: {rule}\n"
	     "Cases:\n{cases}\n"},
	    {"deep_fix",
	     "The query below failed on {dialect} and no stored rule matches. Diagnose the\n"
	     "root cause from the error and repair the query. The plan is the ground truth\n"
	     "for intent; do not alter the logic it prescribes.\n"
	     "Reply with the corrected SQL only, no commentary, no code fences.\n"
	     "\n"
	     "Failing query:\n{sql}\n"
	     "Error: {error}\n"
	     "Plan:\n{plan}\n"},
	    {"semantic_fix",
	     "The query below executes on {dialect} but deviates from the plan. Treat the\n"
	     "deviation report as a high-priority constraint and repair only the failing\n"
	     "aspects, preserving everything already correct.\n"
	     "Reply with the corrected SQL only, no commentary, no code fences.\n"
	     "\n"
	     "Query:\n{sql}\n"
	     "Deviation report:\n{report}\n"
	     "Plan:\n{plan}\n"},
	    {"distill",
	     "A failing query for {dialect} was repaired and verified. Generalize the repair\n"
	     "into a reusable note. Use placeholders instead of concrete table or column\n"
	     "names. Reply with exactly two lines:\n"
	     "P_INC: the violation pattern and the malformed structure that triggered it\n"
	     "A_RTC: one-sentence root-cause statement of the underlying engine constraint\n"
	     "\n"
	     "Failing query:\n{failing_sql}\n"
	     "Error: {error}\n"
	     "Verified repair:\n{fixed_sql}\n"},
	    {"kb_func_entry",
	     "From the documentation section below, produce one dialect function reference\n"
	     "for {dialect}. Reply with exactly three lines:\n"
	     "SCENARIOS: short usage scenario phrases separated by '; '\n"
	     "SPEC: one line defining the semantic operation\n"
	     "IMPL: the concrete {dialect} syntax template\n"
	     "\n"
	     "Category: {category}\n"
	     "Section:\n{section}\n"},
	    {"kb_rule_entry",
	     "From the documentation section below, extract the grammar constraint it states\n"
	     "for {dialect}. Reply with exactly one line:\n"
	     "RULE: the constraint, stated precisely\n"
	     "\n"
	     "Section:\n{section}\n"},
	    {"audit_adjudicate",
	     "Does the query aspect described below satisfy the stated intent? Reply with\n"
	     "exactly one word: YES or NO.\n"
	     "\n"
	     "Intent: {intent}\n"
	     "Query aspect: {aspect}\n"},
	};
	return DEFAULTS;
}

} // namespace

TemplateStore::TemplateStore() : templates(default_templates()) {
}

void TemplateStore::load_directory(const std::string &dir) {
	namespace fs = std::filesystem;
	if (!fs::is_directory(dir)) {
		throw IoException("template directory not found: " + dir);
	}
	for (auto &entry : fs::directory_iterator(dir)) {
		if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
			continue;
		}
		templates[entry.path().stem().string()] = read_file(entry.path().string());
	}
}

bool TemplateStore::has(const std::string &id) const {
	return templates.count(id) > 0;
}

const std::string &TemplateStore::get(const std::string &id) const {
	auto it = templates.find(id);
	if (it == templates.end()) {
		throw UnknownTemplateException(id);
	}
	return it->second;
}

void TemplateStore::set(const std::string &id, const std::string &body) {
	templates[id] = body;
}

std::vector<std::string> TemplateStore::ids() const {
	std::vector<std::string> out;
	out.reserve(templates.size());
	for (auto &[id, body] : templates) {
		out.push_back(id);
	}
	return out;
}

std::string TemplateStore::render(const std::string &id,
                                  const std::map<std::string, std::string> &bindings) const {
	return render_template(get(id), bindings);
}

std::string render_template(const std::string &body,
                            const std::map<std::string, std::string> &bindings) {
	std::string out;
	out.reserve(body.size());
	size_t i = 0;
	while (i < body.size()) {
		char c = body[i];
		if (c == '{') {
			size_t close = body.find('}', i + 1);
			if (close == std::string::npos) {
				out += c;
				i++;
				continue;
			}
			std::string name = body.substr(i + 1, close - i - 1);
			// placeholder names are word-like; anything else is literal text
			bool word_like = !name.empty();
			for (char nc : name) {
				if (!std::isalnum(static_cast<unsigned char>(nc)) && nc != '_') {
					word_like = false;
					break;
				}
			}
			if (!word_like) {
				out += c;
				i++;
				continue;
			}
			auto it = bindings.find(name);
			if (it == bindings.end()) {
				throw UnboundPlaceholderException(name);
			}
			out += it->second;
			i = close + 1;
			continue;
		}
		out += c;
		i++;
	}
	return out;
}

} // namespace dial
