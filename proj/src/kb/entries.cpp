#include "dial/kb/entries.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <nlohmann/json.hpp>

namespace dial {

using nlohmann::json;

const std::string &origin_name(EntryOrigin origin) {
	static const std::string DISTILLED = "distilled_from_docs";
	static const std::string CONSOLIDATED = "consolidated";
	return origin == EntryOrigin::DISTILLED_FROM_DOCS ? DISTILLED : CONSOLIDATED;
}

namespace {

EntryOrigin origin_from_name(const std::string &name) {
	if (name == "consolidated") {
		return EntryOrigin::CONSOLIDATED;
	}
	return EntryOrigin::DISTILLED_FROM_DOCS;
}

} // namespace

std::string FunctionEntry::index_text() const {
	return category + " | " + join(scenarios, "; ") + " | " + specification;
}

std::string FunctionEntry::prompt_block() const {
	return "[" + category + "] " + specification + "\n  scenarios: " + join(scenarios, "; ") +
	       "\n  " + dialect_name(dialect) + " syntax: " + implementation;
}

std::string FunctionEntry::to_json_line() const {
	json j = {
	    {"id", id},
	    {"dialect", dialect_name(dialect)},
	    {"category", category},
	    {"scenarios", scenarios},
	    {"specification", specification},
	    {"implementation", implementation},
	    {"embedding", embedding},
	    {"origin", origin_name(origin)},
	};
	return j.dump();
}

FunctionEntry FunctionEntry::from_json_line(const std::string &line) {
	FunctionEntry e;
	json j = json::parse(line);
	e.id = j.at("id").get<std::string>();
	auto d = dialect_from_name(j.at("dialect").get<std::string>());
	if (!d) {
		throw ParseException("unknown dialect in function entry: " +
		                     j.at("dialect").get<std::string>());
	}
	e.dialect = *d;
	e.category = j.at("category").get<std::string>();
	e.scenarios = j.at("scenarios").get<std::vector<std::string>>();
	e.specification = j.at("specification").get<std::string>();
	e.implementation = j.at("implementation").get<std::string>();
	e.embedding = j.at("embedding").get<std::vector<double>>();
	e.origin = origin_from_name(j.at("origin").get<std::string>());
	return e;
}

std::string ConstraintEntry::prompt_block() const {
	std::string out = "rule: " + rule_spec;
	for (auto &c : cases) {
		out += "\n  erroneous: " + c.erroneous + "\n  correct:   " + c.correct;
	}
	return out;
}

std::string ConstraintEntry::to_json_line() const {
	json cases_j = json::array();
	for (auto &c : cases) {
		cases_j.push_back({{"erroneous", c.erroneous}, {"correct", c.correct}});
	}
	json j = {
	    {"id", id},
	    {"dialect", dialect_name(dialect)},
	    {"rule_spec", rule_spec},
	    {"signature_patterns", signature_patterns},
	    {"cases", cases_j},
	    {"origin", origin_name(origin)},
	};
	return j.dump();
}

ConstraintEntry ConstraintEntry::from_json_line(const std::string &line) {
	ConstraintEntry e;
	json j = json::parse(line);
	e.id = j.at("id").get<std::string>();
	auto d = dialect_from_name(j.at("dialect").get<std::string>());
	if (!d) {
		throw ParseException("unknown dialect in constraint entry: " +
		                     j.at("dialect").get<std::string>());
	}
	e.dialect = *d;
	e.rule_spec = j.at("rule_spec").get<std::string>();
	e.signature_patterns = j.at("signature_patterns").get<std::vector<std::string>>();
	for (auto &cj : j.at("cases")) {
		e.cases.push_back(
		    {cj.at("erroneous").get<std::string>(), cj.at("correct").get<std::string>()});
	}
	e.origin = origin_from_name(j.at("origin").get<std::string>());
	return e;
}

std::vector<std::string> KnowledgePrimitive::validate() const {
	std::vector<std::string> violations;
	if (trim(incorrect_pattern).empty()) {
		violations.push_back("incorrect_pattern empty");
	}
	if (trim(corrective_exemplar).empty()) {
		violations.push_back("corrective_exemplar empty");
	}
	if (trim(root_cause).empty()) {
		violations.push_back("root_cause empty");
	}
	return violations;
}

} // namespace dial
