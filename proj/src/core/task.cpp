#include "dial/core/task.hpp"

#include "dial/common/strings.hpp"

namespace dial {

std::string TranslationTask::stable_hash() const {
	return fnv1a_hex(question + "\x1f" + dialect_name(dialect));
}

std::vector<std::string> validate_task(const TranslationTask &task) {
	std::vector<std::string> violations;
	if (trim(task.question).empty()) {
		violations.push_back("question empty");
	}
	if (task.schema.tables.empty()) {
		violations.push_back("schema has no tables");
	}
	for (auto &[table, column] : task.gold_elements) {
		if (!task.schema.has_column(table, column)) {
			violations.push_back("gold_elements pair does not resolve in schema: " + table + "." + column);
		}
	}
	return violations;
}

} // namespace dial
