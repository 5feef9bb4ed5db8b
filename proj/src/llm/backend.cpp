#include "dial/llm/backend.hpp"

#include "dial/common/errors.hpp"
#include "dial/common/strings.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

// httplib pulled in only here; replay/record paths never construct a client.
#include <httplib.h>

namespace dial {

namespace fs = std::filesystem;

std::string fixture_key(const ChatRequest &req) {
	return req.template_id + "-" + fnv1a_hex(req.rendered_prompt);
}

FixtureStore::FixtureStore(std::string dir_p) : dir(std::move(dir_p)) {
}

namespace {

std::string length_prefixed(const std::string &block) {
	return std::to_string(block.size()) + "\n" + block + "\n";
}

bool read_block(std::istream &in, std::string &out) {
	std::string len_line;
	if (!std::getline(in, len_line)) {
		return false;
	}
	size_t n = 0;
	try {
		n = std::stoul(len_line);
	} catch (...) {
		return false;
	}
	out.resize(n);
	if (n > 0 && !in.read(out.data(), static_cast<std::streamsize>(n))) {
		return false;
	}
	char nl = 0;
	in.get(nl);
	return nl == '\n';
}

} // namespace

bool FixtureStore::lookup(const std::string &key, std::string &reply_out) const {
	fs::path path = fs::path(dir) / key;
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		return false;
	}
	std::string prompt;
	if (!read_block(in, prompt) || !read_block(in, reply_out)) {
		throw CorruptRecordException(path.string(), 1, "malformed fixture blocks");
	}
	return true;
}

void FixtureStore::store(const std::string &key, const std::string &prompt, const std::string &reply) {
	std::lock_guard<std::mutex> guard(write_lock);
	fs::create_directories(dir);
	fs::path path = fs::path(dir) / key;
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) {
		throw IoException("cannot write fixture: " + path.string());
	}
	out << length_prefixed(prompt) << length_prefixed(reply);
}

ChatReply ReplayBackend::complete(const ChatRequest &req) {
	if (req.rendered_prompt.empty()) {
		throw MalformedReplyException("empty rendered prompt");
	}
	std::string key = fixture_key(req);
	std::string text;
	if (!store->lookup(key, text)) {
		throw FixtureMissException(key);
	}
	ChatReply reply;
	reply.text = text;
	reply.backend_id = id();
	reply.latency_ms = 0;
	return reply;
}

ChatReply RecordingBackend::complete(const ChatRequest &req) {
	ChatReply reply = delegate->complete(req);
	store->store(fixture_key(req), req.rendered_prompt, reply.text);
	return reply;
}

void ScriptedBackend::prime(const std::string &template_id, const std::string &reply) {
	std::lock_guard<std::mutex> guard(lock);
	queues[template_id].push_back(reply);
}

void ScriptedBackend::prime_exact(const std::string &template_id, const std::string &prompt,
                                  const std::string &reply) {
	std::lock_guard<std::mutex> guard(lock);
	exact[template_id + "\x1f" + prompt] = reply;
}

void ScriptedBackend::set_default_handler(std::function<std::string(const ChatRequest &)> fn) {
	default_handler = std::move(fn);
}

ChatReply ScriptedBackend::complete(const ChatRequest &req) {
	std::lock_guard<std::mutex> guard(lock);
	calls++;
	ChatReply reply;
	reply.backend_id = id();
	auto eit = exact.find(req.template_id + "\x1f" + req.rendered_prompt);
	if (eit != exact.end()) {
		reply.text = eit->second;
		return reply;
	}
	auto qit = queues.find(req.template_id);
	if (qit != queues.end() && !qit->second.empty()) {
		reply.text = qit->second.front();
		qit->second.pop_front();
		return reply;
	}
	if (default_handler) {
		reply.text = default_handler(req);
		return reply;
	}
	throw BackendUnavailableException("scripted backend has no reply for template '" + req.template_id +
	                                  "'");
}

namespace {
std::atomic<size_t> http_instances {0};
}

HttpBackend::HttpBackend(std::string endpoint, std::string api_key, std::string model)
    : endpoint(std::move(endpoint)), api_key(std::move(api_key)), model(std::move(model)) {
	http_instances++;
}

size_t HttpBackend::instances_created() {
	return http_instances.load();
}

ChatReply HttpBackend::complete(const ChatRequest &req) {
	if (req.rendered_prompt.empty()) {
		throw MalformedReplyException("empty rendered prompt");
	}
	using nlohmann::json;
	auto started = std::chrono::steady_clock::now();

	json body = {
	    {"model", model},
	    {"temperature", req.temperature},
	    {"messages", json::array({json {{"role", "user"}, {"content", req.rendered_prompt}}})},
	};

	httplib::Client client(endpoint);
	client.set_read_timeout(120, 0);
	httplib::Headers headers;
	if (!api_key.empty()) {
		headers.emplace("Authorization", "Bearer " + api_key);
	}
	auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
	if (!res) {
		throw BackendUnavailableException("chat endpoint unreachable: " + endpoint);
	}
	if (res->status != 200) {
		throw BackendUnavailableException("chat endpoint returned status " + std::to_string(res->status));
	}
	ChatReply reply;
	try {
		json parsed = json::parse(res->body);
		reply.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
	} catch (const json::exception &e) {
		throw MalformedReplyException(std::string("cannot parse chat completion: ") + e.what());
	}
	reply.backend_id = id();
	reply.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
	                       std::chrono::steady_clock::now() - started)
	                       .count();
	return reply;
}

std::shared_ptr<ChatBackend> backend_from_env(const std::string &fixture_dir,
                                              std::shared_ptr<ChatBackend> record_delegate) {
	const char *mode_env = std::getenv("DIAL_LLM_MODE");
	std::string mode = mode_env ? mode_env : "replay";

	auto make_http = []() -> std::shared_ptr<ChatBackend> {
		const char *endpoint = std::getenv("DIAL_LLM_ENDPOINT");
		const char *key = std::getenv("DIAL_LLM_API_KEY");
		const char *model = std::getenv("DIAL_LLM_MODEL");
		if (!endpoint || !model) {
			throw BackendUnavailableException(
			    "http mode requires DIAL_LLM_ENDPOINT and DIAL_LLM_MODEL");
		}
		return std::make_shared<HttpBackend>(endpoint, key ? key : "", model);
	};

	if (mode == "http") {
		return make_http();
	}
	auto store = std::make_shared<FixtureStore>(fixture_dir);
	if (mode == "replay") {
		return std::make_shared<ReplayBackend>(store);
	}
	if (mode == "record") {
		auto delegate = record_delegate ? std::move(record_delegate) : make_http();
		return std::make_shared<RecordingBackend>(std::move(delegate), store);
	}
	throw BackendUnavailableException("unknown DIAL_LLM_MODE: " + mode);
}

} // namespace dial
