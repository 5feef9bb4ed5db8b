#include "dial/eval/metrics.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <regex>

namespace dial {

using nlohmann::json;

double score_exec(const std::vector<bool> &outcomes) {
	if (outcomes.empty()) {
		return 0.0;
	}
	size_t ok = 0;
	for (bool b : outcomes) {
		ok += b ? 1 : 0;
	}
	return static_cast<double>(ok) / static_cast<double>(outcomes.size());
}

double score_acc(const std::vector<bool> &outcomes) {
	return score_exec(outcomes);
}

std::optional<double> score_dfc(const std::string &generated_sql, const std::string &gold_sql,
                                const std::vector<std::string> &patterns) {
	size_t gold_features = 0;
	size_t recalled = 0;
	for (auto &pattern : patterns) {
		std::unique_ptr<std::regex> re;
		try {
			re = std::make_unique<std::regex>(pattern,
			                                  std::regex::ECMAScript | std::regex::icase);
		} catch (const std::regex_error &e) {
			throw InvalidPatternException("invalid DFC pattern '" + pattern + "': " + e.what());
		}
		if (std::regex_search(gold_sql, *re)) {
			gold_features++;
			if (std::regex_search(generated_sql, *re)) {
				recalled++;
			}
		}
	}
	if (gold_features == 0) {
		return std::nullopt;
	}
	return static_cast<double>(recalled) / static_cast<double>(gold_features);
}

OverallScores aggregate_overall(const std::map<std::string, std::map<DialectId, ItemOutcome>> &outcomes,
                                const std::vector<DialectId> &evaluated) {
	OverallScores scores;
	if (outcomes.empty() || evaluated.empty()) {
		return scores;
	}
	size_t exec_all = 0, acc_all = 0;
	for (auto &[qid, per_dialect] : outcomes) {
		bool exec_conj = true, acc_conj = true;
		for (auto dialect : evaluated) {
			auto it = per_dialect.find(dialect);
			if (it == per_dialect.end()) {
				throw MissingDialectOutcomeException("item " + qid + " lacks an outcome for dialect " +
				                                     dialect_name(dialect));
			}
			exec_conj = exec_conj && it->second.exec;
			acc_conj = acc_conj && it->second.acc;
		}
		exec_all += exec_conj ? 1 : 0;
		acc_all += acc_conj ? 1 : 0;
	}
	scores.exec = static_cast<double>(exec_all) / static_cast<double>(outcomes.size());
	scores.acc = static_cast<double>(acc_all) / static_cast<double>(outcomes.size());
	return scores;
}

MetricsReport build_report(const std::map<std::string, std::map<DialectId, ItemOutcome>> &outcomes,
                           const std::vector<DialectId> &evaluated) {
	MetricsReport report;
	for (auto dialect : evaluated) {
		DialectScores scores;
		double dfc_sum = 0.0;
		for (auto &[qid, per_dialect] : outcomes) {
			auto it = per_dialect.find(dialect);
			if (it == per_dialect.end()) {
				continue;
			}
			scores.items++;
			scores.exec += it->second.exec ? 1.0 : 0.0;
			scores.acc += it->second.acc ? 1.0 : 0.0;
			if (it->second.dfc) {
				scores.dfc_applicable++;
				dfc_sum += *it->second.dfc;
			}
		}
		if (scores.items > 0) {
			scores.exec /= static_cast<double>(scores.items);
			scores.acc /= static_cast<double>(scores.items);
		}
		scores.dfc = scores.dfc_applicable > 0 ? dfc_sum / static_cast<double>(scores.dfc_applicable)
		                                       : 0.0;
		report.per_dialect[dialect] = scores;
	}
	auto overall = aggregate_overall(outcomes, evaluated);
	report.overall_exec = overall.exec;
	report.overall_acc = overall.acc;
	report.overall_items = outcomes.size();
	return report;
}

std::string MetricsReport::to_json() const {
	json per = json::object();
	for (auto &[dialect, scores] : per_dialect) {
		per[dialect_name(dialect)] = {
		    {"exec", scores.exec},           {"acc", scores.acc},
		    {"dfc", scores.dfc},             {"items", scores.items},
		    {"dfc_applicable", scores.dfc_applicable},
		};
	}
	json j = {
	    {"per_dialect", per},
	    {"overall", {{"exec", overall_exec}, {"acc", overall_acc}, {"items", overall_items}}},
	};
	return j.dump(2) + "\n";
}

std::string MetricsReport::to_markdown() const {
	auto pct = [](double v) {
		char buf[16];
		std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
		return std::string(buf);
	};
	std::string out;
	out += "| Dialect | Exec | Acc | DFC |\n";
	out += "|---------|------|-----|-----|\n";
	for (auto &[dialect, scores] : per_dialect) {
		out += "| " + dialect_name(dialect) + " | " + pct(scores.exec) + " | " + pct(scores.acc) +
		       " | " + pct(scores.dfc) + " |\n";
	}
	out += "\nOverall (all-or-nothing across dialects): Exec " + pct(overall_exec) + ", Acc " +
	       pct(overall_acc) + " over " + std::to_string(overall_items) + " items\n";
	return out;
}

} // namespace dial
