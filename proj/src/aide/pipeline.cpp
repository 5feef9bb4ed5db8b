#include "dial/aide/pipeline.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"
#include "dial/exec/signature.hpp"
#include "dial/planner/label.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cctype>
#include <filesystem>

namespace dial {

using nlohmann::json;

const std::string &stage_name(StageKind stage) {
	static const std::array<std::string, 4> NAMES = {"init", "rule_fix", "deep_fix", "semantic_fix"};
	return NAMES[static_cast<size_t>(stage)];
}

bool RepairTrajectory::has_fix_step() const {
	for (auto &step : steps) {
		if (step.stage != StageKind::INIT) {
			return true;
		}
	}
	return false;
}

std::vector<std::string> RepairTrajectory::validate() const {
	std::vector<std::string> violations;
	if (steps.empty()) {
		violations.push_back("trajectory has no steps");
		return violations;
	}
	if (steps.front().stage != StageKind::INIT) {
		violations.push_back("first step is not init");
	}
	// init -> (rule_fix|deep_fix)* -> semantic_fix*
	int phase = 0;
	for (size_t i = 0; i < steps.size(); i++) {
		switch (steps[i].stage) {
		case StageKind::INIT:
			if (i != 0) {
				violations.push_back("init stage occurs after step 0");
			}
			break;
		case StageKind::RULE_FIX:
		case StageKind::DEEP_FIX:
			if (phase > 1) {
				violations.push_back("syntactic fix after semantic phase at step " + std::to_string(i));
			}
			phase = 1;
			break;
		case StageKind::SEMANTIC_FIX:
			phase = 2;
			break;
		}
	}
	bool last_passing_audit = !steps.empty() && steps.back().audit_report &&
	                          steps.back().audit_report->passed;
	if (final.has_value() != last_passing_audit) {
		violations.push_back("final presence does not match last outcome");
	}
	return violations;
}

namespace {

// Models often fence SQL replies; strip fences and leading language tags.
std::string strip_sql_reply(const std::string &reply) {
	std::string text = trim(reply);
	if (starts_with_ci(text, "```")) {
		size_t first_newline = text.find('\n');
		size_t closing = text.rfind("```");
		if (first_newline != std::string::npos && closing != std::string::npos &&
		    closing > first_newline) {
			text = trim(text.substr(first_newline + 1, closing - first_newline - 1));
		}
	}
	return text;
}

std::string error_text_of(const TrajectoryStep &step) {
	if (step.execution && !step.execution->success && step.execution->trace) {
		return step.execution->trace->message;
	}
	if (step.audit_report && !step.audit_report->passed) {
		return step.audit_report->describe();
	}
	return "";
}

constexpr int DISTILL_RETRIES = 2;

} // namespace

std::string AidePipeline::ask_sql(const std::string &template_id,
                                  const std::map<std::string, std::string> &bindings,
                                  std::string &prompt_out, std::string &reply_out) {
	ChatRequest req;
	req.template_id = template_id;
	req.rendered_prompt = templates.render(template_id, bindings);
	auto reply = llm.complete(req);
	prompt_out = req.rendered_prompt;
	reply_out = reply.text;
	std::string sql = strip_sql_reply(reply.text);
	if (trim(sql).empty()) {
		throw GenerationFormatException("model returned empty SQL for template " + template_id);
	}
	return sql;
}

SqlText AidePipeline::generate_initial(const DialectAwarePlan &plan, const SchemaCatalog &schema,
                                       RepairTrajectory &trajectory) {
	std::string templates_block;
	if (!flags.no_retrieval) {
		size_t k = kb.config().retrieval_k;
		for (auto &op : plan.enriched) {
			try {
				auto entries = kb.retrieve_functions(op.category, op.standard_description,
				                                     plan.dialect, k);
				for (auto &entry : entries) {
					templates_block += entry.prompt_block() + "\n";
				}
			} catch (const EmptyRepositoryException &) {
				// no entries for this dialect: generation proceeds bare
			}
		}
	}
	if (templates_block.empty()) {
		templates_block = "(none)";
	}

	TrajectoryStep step;
	step.stage = StageKind::INIT;
	step.prompt_template = "generate_sql";
	std::string sql = ask_sql("generate_sql",
	                          {
	                              {"dialect", dialect_name(plan.dialect)},
	                              {"schema", schema.describe()},
	                              {"plan", plan.to_prompt_text()},
	                              {"templates", templates_block},
	                          },
	                          step.prompt, step.reply);
	step.sql = SqlText {sql, plan.dialect};
	trajectory.steps.push_back(std::move(step));
	return trajectory.steps.back().sql;
}

SqlText AidePipeline::generate_direct(const TranslationTask &task, RepairTrajectory &trajectory) {
	TrajectoryStep step;
	step.stage = StageKind::INIT;
	step.prompt_template = "direct_generate";
	std::string sql = ask_sql("direct_generate",
	                          {
	                              {"dialect", dialect_name(task.dialect)},
	                              {"question", task.question},
	                              {"schema", task.schema.describe()},
	                          },
	                          step.prompt, step.reply);
	step.sql = SqlText {sql, task.dialect};
	trajectory.steps.push_back(std::move(step));
	return trajectory.steps.back().sql;
}

SqlText AidePipeline::syntactic_recovery(const SqlText &q_init, const DialectAwarePlan &plan,
                                         RepairTrajectory &trajectory) {
	SqlText current = q_init;
	size_t fixes = 0;

	auto execute_current = [&]() -> bool {
		ExecutionOutcome outcome = executor.execute(current);
		trajectory.steps.back().execution = outcome;
		return outcome.success;
	};

	bool ok = execute_current();
	while (!ok) {
		if (fixes >= cfg.max_syntax_iters) {
			throw RecoveryExhaustedException("syntactic recovery budget (" +
			                                 std::to_string(cfg.max_syntax_iters) + ") spent");
		}
		const TrajectoryStep &failed = trajectory.steps.back();
		const ErrorTrace &trace = *failed.execution->trace;
		std::string segment = trace.failing_segment.value_or("");

		// rule retrieval is engine-feedback-driven; deep reasoning covers a
		// failed rule application before another rule attempt
		std::optional<ConstraintEntry> rule;
		bool previous_was_failed_rule_fix = failed.stage == StageKind::RULE_FIX;
		if (!flags.no_retrieval && !previous_was_failed_rule_fix) {
			auto signature = normalize_signature(trace, current.dialect);
			rule = kb.retrieve_rules(signature, segment, current.dialect);
		}

		TrajectoryStep step;
		std::string sql;
		if (rule) {
			std::string cases;
			for (auto &c : rule->cases) {
				cases += "erroneous: " + c.erroneous + "\ncorrect: " + c.correct + "\n";
			}
			if (cases.empty()) {
				cases = "(none)";
			}
			step.stage = StageKind::RULE_FIX;
			step.prompt_template = "rule_fix";
			step.applied_rule = rule->id;
			sql = ask_sql("rule_fix",
			              {
			                  {"dialect", dialect_name(current.dialect)},
			                  {"sql", current.text},
			                  {"error", trace.message},
			                  {"rule", rule->rule_spec},
			                  {"cases", cases},
			              },
			              step.prompt, step.reply);
		} else {
			step.stage = StageKind::DEEP_FIX;
			step.prompt_template = "deep_fix";
			sql = ask_sql("deep_fix",
			              {
			                  {"dialect", dialect_name(current.dialect)},
			                  {"sql", current.text},
			                  {"error", trace.message},
			                  {"plan", plan.to_prompt_text()},
			              },
			              step.prompt, step.reply);
		}
		step.sql = SqlText {sql, current.dialect};
		trajectory.steps.push_back(std::move(step));
		current = trajectory.steps.back().sql;
		fixes++;
		ok = execute_current();
	}
	return current;
}

SqlText AidePipeline::verify_semantics(const SqlText &q_exec, const DialectAwarePlan &plan,
                                       RepairTrajectory &trajectory) {
	SqlText current = q_exec;
	// index of the step holding `current`
	size_t current_step = trajectory.steps.size() - 1;

	AuditOptions options;
	options.deterministic = cfg.deterministic_mode;
	options.llm = cfg.deterministic_mode ? nullptr : &llm;
	options.templates = cfg.deterministic_mode ? nullptr : &templates;

	for (size_t iter = 0;; iter++) {
		AuditReport report = audit(current, plan, options);
		trajectory.steps[current_step].audit_report = report;
		if (report.passed) {
			trajectory.final = current;
			return current;
		}
		if (iter >= cfg.max_semantic_iters) {
			throw VerificationExhaustedException("semantic verification budget (" +
			                                     std::to_string(cfg.max_semantic_iters) + ") spent");
		}

		TrajectoryStep step;
		step.stage = StageKind::SEMANTIC_FIX;
		step.prompt_template = "semantic_fix";
		std::string sql = ask_sql("semantic_fix",
		                          {
		                              {"dialect", dialect_name(current.dialect)},
		                              {"sql", current.text},
		                              {"report", report.describe()},
		                              {"plan", plan.to_prompt_text()},
		                          },
		                          step.prompt, step.reply);
		step.sql = SqlText {sql, current.dialect};
		trajectory.steps.push_back(std::move(step));
		ExecutionOutcome outcome = executor.execute(trajectory.steps.back().sql);
		trajectory.steps.back().execution = outcome;

		if (outcome.success) {
			current = trajectory.steps.back().sql;
			current_step = trajectory.steps.size() - 1;
			continue;
		}

		// the rectification broke executability: one targeted recovery
		// attempt inside this semantic iteration
		const ErrorTrace &trace = *outcome.trace;
		std::optional<ConstraintEntry> rule;
		if (!flags.no_retrieval) {
			auto signature = normalize_signature(trace, current.dialect);
			rule = kb.retrieve_rules(signature, trace.failing_segment.value_or(""), current.dialect);
		}
		TrajectoryStep retry;
		retry.stage = StageKind::SEMANTIC_FIX;
		std::string fixed;
		if (rule) {
			std::string cases;
			for (auto &c : rule->cases) {
				cases += "erroneous: " + c.erroneous + "\ncorrect: " + c.correct + "\n";
			}
			if (cases.empty()) {
				cases = "(none)";
			}
			retry.prompt_template = "rule_fix";
			retry.applied_rule = rule->id;
			fixed = ask_sql("rule_fix",
			                {
			                    {"dialect", dialect_name(current.dialect)},
			                    {"sql", trajectory.steps.back().sql.text},
			                    {"error", trace.message},
			                    {"rule", rule->rule_spec},
			                    {"cases", cases},
			                },
			                retry.prompt, retry.reply);
		} else {
			retry.prompt_template = "deep_fix";
			fixed = ask_sql("deep_fix",
			                {
			                    {"dialect", dialect_name(current.dialect)},
			                    {"sql", trajectory.steps.back().sql.text},
			                    {"error", trace.message},
			                    {"plan", plan.to_prompt_text()},
			                },
			                retry.prompt, retry.reply);
		}
		retry.sql = SqlText {fixed, current.dialect};
		trajectory.steps.push_back(std::move(retry));
		ExecutionOutcome retry_outcome = executor.execute(trajectory.steps.back().sql);
		trajectory.steps.back().execution = retry_outcome;
		if (retry_outcome.success) {
			current = trajectory.steps.back().sql;
			current_step = trajectory.steps.size() - 1;
		}
		// still failing: keep the previous executable query; the iteration is spent
	}
}

KnowledgePrimitive AidePipeline::distill_primitive(const RepairTrajectory &trajectory,
                                                   const SchemaCatalog &schema, DialectId dialect,
                                                   std::string *prompt_out,
                                                   std::string *reply_out) {
	if (!trajectory.final) {
		throw DialException("distill_primitive precondition: trajectory has no verified final query");
	}
	if (!trajectory.has_fix_step()) {
		throw DialException("distill_primitive precondition: trajectory contains no fix step");
	}
	// the most recent step that recorded a failure
	const TrajectoryStep *failing = nullptr;
	for (auto &step : trajectory.steps) {
		if ((step.execution && !step.execution->success) ||
		    (step.audit_report && !step.audit_report->passed)) {
			failing = &step;
		}
	}
	if (!failing) {
		throw DialException("distill_primitive: no failing step recorded");
	}

	ChatRequest req;
	req.template_id = "distill";
	req.rendered_prompt = templates.render("distill", {
	                                                      {"dialect", dialect_name(dialect)},
	                                                      {"failing_sql", failing->sql.text},
	                                                      {"error", error_text_of(*failing)},
	                                                      {"fixed_sql", trajectory.final->text},
	                                                  });
	if (prompt_out) {
		*prompt_out = req.rendered_prompt;
	}
	std::string p_inc, a_rtc;
	for (int attempt = 0; attempt <= DISTILL_RETRIES; attempt++) {
		auto reply = llm.complete(req);
		if (reply_out) {
			*reply_out = reply.text;
		}
		for (auto &line : split(reply.text, '\n')) {
			std::string t = trim(line);
			if (starts_with_ci(t, "P_INC:")) {
				p_inc = trim(t.substr(6));
			} else if (starts_with_ci(t, "A_RTC:")) {
				a_rtc = trim(t.substr(6));
			}
		}
		if (!p_inc.empty() && !a_rtc.empty()) {
			break;
		}
	}
	if (p_inc.empty() || a_rtc.empty()) {
		throw GenerationFormatException("distillation reply missing P_INC/A_RTC lines");
	}

	KnowledgePrimitive primitive;
	primitive.incorrect_pattern = templatize_identifiers(p_inc, schema);
	primitive.corrective_exemplar = trajectory.final->text; // identifiers retained
	primitive.root_cause = templatize_identifiers(a_rtc, schema);
	primitive.dialect = dialect;
	return primitive;
}

PipelineResult AidePipeline::run_pipeline(const TranslationTask &task) {
	PipelineResult result;
	result.task = task;
	auto violations = validate_task(task);
	if (!violations.empty()) {
		throw DialException("invalid task: " + join(violations, "; "));
	}

	DialectAwarePlan plan;
	plan.dialect = task.dialect;
	if (!flags.no_planning) {
		Planner planner(llm, templates);
		LogicalPlan logical = planner.build_logical_plan(task);
		logical = planner.mine_implicit_logic(logical, task.schema);
		logical = label_operators(logical, task.schema, LabelConfig::defaults());
		plan = planner.map_functional_categories(logical, kb.reference(), task.dialect);
	}
	result.plan = plan;

	SqlText q_init = flags.no_planning ? generate_direct(task, result.trajectory)
	                                   : generate_initial(plan, task.schema, result.trajectory);
	result.best = q_init;

	if (flags.no_correction) {
		ExecutionOutcome outcome = executor.execute(q_init);
		result.trajectory.steps.back().execution = outcome;
		result.passed = outcome.success;
		if (!outcome.success) {
			result.failure_reason = "initial query failed without correction";
		}
		return result;
	}

	SqlText q_exec;
	try {
		q_exec = syntactic_recovery(q_init, plan, result.trajectory);
	} catch (const RecoveryExhaustedException &e) {
		result.best = result.trajectory.steps.back().sql;
		result.passed = false;
		result.failure_reason = e.what();
		return result;
	}
	result.best = q_exec;

	SqlText verified;
	try {
		verified = verify_semantics(q_exec, plan, result.trajectory);
	} catch (const VerificationExhaustedException &e) {
		result.best = result.trajectory.steps.back().sql;
		result.passed = false;
		result.failure_reason = e.what();
		return result;
	}
	result.best = verified;
	result.passed = true;

	// consolidation strictly follows verified success with an actual repair
	if (result.trajectory.has_fix_step() && !flags.no_retrieval) {
		ConsolidationEvent event;
		event.primitive = distill_primitive(result.trajectory, task.schema, task.dialect,
		                                    &event.distill_prompt, &event.distill_reply);
		std::string category_hint =
		    plan.enriched.empty() ? FALLBACK_CATEGORY : plan.enriched.front().category;
		event.decision = kb.route_primitive(event.primitive, plan.to_json(), category_hint);
		result.consolidations.push_back(std::move(event));
	}
	return result;
}

std::string templatize_identifiers(const std::string &text, const SchemaCatalog &schema) {
	auto replace_word = [](std::string text_in, const std::string &word, const std::string &with) {
		std::string lowered = to_lower(text_in);
		std::string needle = to_lower(word);
		std::string out;
		size_t pos = 0;
		while (true) {
			size_t hit = lowered.find(needle, pos);
			if (hit == std::string::npos) {
				out += text_in.substr(pos);
				break;
			}
			bool left_ok = hit == 0 || (!std::isalnum(static_cast<unsigned char>(lowered[hit - 1])) &&
			                            lowered[hit - 1] != '_');
			size_t end = hit + needle.size();
			bool right_ok = end >= lowered.size() ||
			                (!std::isalnum(static_cast<unsigned char>(lowered[end])) &&
			                 lowered[end] != '_');
			if (left_ok && right_ok) {
				out += text_in.substr(pos, hit - pos) + with;
				pos = end;
			} else {
				out += text_in.substr(pos, hit - pos + needle.size());
				pos = end;
			}
		}
		return out;
	};
	std::string result = text;
	for (auto &table : schema.tables) {
		for (auto &col : table.columns) {
			result = replace_word(result, col.name, "<column>");
		}
		result = replace_word(result, table.name, "<table>");
	}
	return result;
}

namespace {

json outcome_to_json(const ExecutionOutcome &outcome) {
	json j;
	j["success"] = outcome.success;
	if (outcome.trace) {
		json t;
		t["message"] = outcome.trace->message;
		if (outcome.trace->vendor_code) {
			t["vendor_code"] = *outcome.trace->vendor_code;
		}
		if (outcome.trace->failing_segment) {
			t["failing_segment"] = *outcome.trace->failing_segment;
			t["span"] = {outcome.trace->segment_begin, outcome.trace->segment_end};
		}
		j["trace"] = t;
	}
	if (outcome.rows) {
		j["row_count"] = outcome.rows->size();
	}
	return j;
}

} // namespace

std::string PipelineResult::to_json(bool redact) const {
	json j;
	j["task"] = {
	    {"question", task.question},
	    {"dialect", dialect_name(task.dialect)},
	    {"hash", task.stable_hash()},
	};
	if (plan) {
		j["plan"] = json::parse(plan->to_json());
	}
	json steps = json::array();
	for (auto &step : trajectory.steps) {
		json s;
		s["stage"] = stage_name(step.stage);
		s["sql"] = step.sql.text;
		s["prompt_template"] = step.prompt_template;
		if (redact) {
			s["prompt_hash"] = fnv1a_hex(step.prompt);
			s["reply_hash"] = fnv1a_hex(step.reply);
		} else {
			s["prompt"] = step.prompt;
			s["reply"] = step.reply;
		}
		if (step.execution) {
			s["execution"] = outcome_to_json(*step.execution);
		}
		if (step.audit_report) {
			s["audit"] = json::parse(step.audit_report->to_json());
		}
		if (step.applied_rule) {
			s["applied_rule"] = *step.applied_rule;
		}
		steps.push_back(std::move(s));
	}
	j["steps"] = steps;
	j["final"] = trajectory.final ? json(trajectory.final->text) : json(nullptr);
	j["passed"] = passed;
	j["failure_reason"] = failure_reason;
	json events = json::array();
	for (auto &event : consolidations) {
		json e = {
		    {"p_inc", event.primitive.incorrect_pattern},
		    {"e_cor", event.primitive.corrective_exemplar},
		    {"a_rtc", event.primitive.root_cause},
		    {"routed_to", event.decision.to_function ? "f_func" : "r_rule"},
		    {"similarity", event.decision.similarity},
		    {"entry_id", event.decision.entry_id},
		};
		if (redact) {
			e["distill_prompt_hash"] = fnv1a_hex(event.distill_prompt);
			e["distill_reply_hash"] = fnv1a_hex(event.distill_reply);
		} else {
			e["distill_prompt"] = event.distill_prompt;
			e["distill_reply"] = event.distill_reply;
		}
		events.push_back(std::move(e));
	}
	j["consolidations"] = events;
	return j.dump(2) + "\n";
}

std::string write_trajectory(const PipelineResult &result, const std::string &dir, bool redact) {
	namespace fs = std::filesystem;
	fs::create_directories(dir);
	std::string path = (fs::path(dir) / (result.task.stable_hash() + ".json")).string();
	write_file(path, result.to_json(redact));
	return path;
}

} // namespace dial
