#pragma once

#include "dial/core/task.hpp"

#include <map>
#include <string>
#include <vector>

namespace dial {

struct DialectGold {
	std::string gold_sql;
	std::vector<std::string> feature_patterns; // regex strings, may be empty
};

struct BenchmarkItem {
	std::string qid;
	std::string question;
	std::string schema_ref; // path relative to the benchmark directory
	std::map<DialectId, DialectGold> gold;
	std::vector<std::pair<std::string, std::string>> gold_elements;
};

// items.jsonl and schema files resolved relative to dir.
std::vector<BenchmarkItem> load_benchmark(const std::string &dir);

// Build the per-dialect translation task for one item.
TranslationTask task_for(const BenchmarkItem &item, const std::string &bench_dir, DialectId dialect);

} // namespace dial
