#include "dial/eval/benchmark.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace dial {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<BenchmarkItem> load_benchmark(const std::string &dir) {
	std::string items_path = (fs::path(dir) / "items.jsonl").string();
	std::string content = read_file(items_path);
	std::vector<BenchmarkItem> items;
	size_t line_no = 0;
	for (auto &line : split(content, '\n')) {
		line_no++;
		if (trim(line).empty()) {
			continue;
		}
		json j;
		try {
			j = json::parse(line);
		} catch (const json::exception &e) {
			throw CorruptRecordException(items_path, line_no, e.what());
		}
		try {
			BenchmarkItem item;
			item.qid = j.at("qid").get<std::string>();
			item.question = j.at("question").get<std::string>();
			item.schema_ref = j.at("schema_ref").get<std::string>();
			for (auto &[name, gj] : j.at("gold").items()) {
				auto d = dialect_from_name(name);
				if (!d) {
					throw CorruptRecordException(items_path, line_no, "unknown dialect " + name);
				}
				DialectGold gold;
				gold.gold_sql = gj.at("gold_sql").get<std::string>();
				if (gj.contains("feature_patterns")) {
					gold.feature_patterns = gj.at("feature_patterns").get<std::vector<std::string>>();
				}
				item.gold[*d] = std::move(gold);
			}
			if (item.gold.empty()) {
				throw CorruptRecordException(items_path, line_no, "item has no dialects");
			}
			if (j.contains("gold_elements")) {
				for (auto &pair : j.at("gold_elements")) {
					item.gold_elements.emplace_back(pair.at(0).get<std::string>(),
					                                pair.at(1).get<std::string>());
				}
			}
			items.push_back(std::move(item));
		} catch (const json::exception &e) {
			throw CorruptRecordException(items_path, line_no, e.what());
		}
	}
	return items;
}

TranslationTask task_for(const BenchmarkItem &item, const std::string &bench_dir, DialectId dialect) {
	TranslationTask task;
	task.question = item.question;
	task.schema = SchemaCatalog::load_file((fs::path(bench_dir) / item.schema_ref).string());
	task.dialect = dialect;
	task.gold_elements = item.gold_elements;
	return task;
}

} // namespace dial
