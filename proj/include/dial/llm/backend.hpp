#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace dial {

struct ChatRequest {
	std::string template_id;
	std::string rendered_prompt;
	double temperature = 0.0;
};

struct ChatReply {
	std::string text;
	std::string backend_id;
	long latency_ms = 0;
};

class ChatBackend {
public:
	virtual ~ChatBackend() = default;
	virtual ChatReply complete(const ChatRequest &req) = 0;
	virtual std::string id() const = 0;
};

// Fixture key: template id + stable hash of the rendered prompt, so fixtures
// survive unrelated pipeline edits that don't change the prompt itself.
std::string fixture_key(const ChatRequest &req);

// Directory of files named by key; each file holds the request prompt and the
// reply as two length-prefixed UTF-8 blocks.
class FixtureStore {
public:
	explicit FixtureStore(std::string dir);

	bool lookup(const std::string &key, std::string &reply_out) const;
	void store(const std::string &key, const std::string &prompt, const std::string &reply);

	const std::string &directory() const {
		return dir;
	}

private:
	std::string dir;
	mutable std::mutex write_lock;
};

// Replays recorded fixtures; a miss is an explicit error, never a fabricated
// reply. Deterministic: same request, same reply.
class ReplayBackend : public ChatBackend {
public:
	explicit ReplayBackend(std::shared_ptr<FixtureStore> store) : store(std::move(store)) {
	}

	ChatReply complete(const ChatRequest &req) override;
	std::string id() const override {
		return "replay";
	}

private:
	std::shared_ptr<FixtureStore> store;
};

// Wraps a delegate and records every (request, reply) pair into the store.
class RecordingBackend : public ChatBackend {
public:
	RecordingBackend(std::shared_ptr<ChatBackend> delegate, std::shared_ptr<FixtureStore> store)
	    : delegate(std::move(delegate)), store(std::move(store)) {
	}

	ChatReply complete(const ChatRequest &req) override;
	std::string id() const override {
		return "record(" + delegate->id() + ")";
	}

private:
	std::shared_ptr<ChatBackend> delegate;
	std::shared_ptr<FixtureStore> store;
};

// Test backend primed with replies. Keyed replies match on (template_id,
// exact prompt); queued replies are FIFO per template id.
class ScriptedBackend : public ChatBackend {
public:
	void prime(const std::string &template_id, const std::string &reply);
	void prime_exact(const std::string &template_id, const std::string &prompt, const std::string &reply);
	// Fallback handler for anything not primed (optional).
	void set_default_handler(std::function<std::string(const ChatRequest &)> fn);

	ChatReply complete(const ChatRequest &req) override;
	std::string id() const override {
		return "scripted";
	}

	size_t calls_made() const {
		return calls;
	}

private:
	std::map<std::string, std::deque<std::string>> queues;
	std::map<std::string, std::string> exact;
	std::function<std::string(const ChatRequest &)> default_handler;
	size_t calls = 0;
	std::mutex lock;
};

// OpenAI-compatible chat endpoint over HTTP. Configured from env:
// DIAL_LLM_ENDPOINT, DIAL_LLM_API_KEY, DIAL_LLM_MODEL.
class HttpBackend : public ChatBackend {
public:
	HttpBackend(std::string endpoint, std::string api_key, std::string model);

	ChatReply complete(const ChatRequest &req) override;
	std::string id() const override {
		return "http:" + model;
	}

	// Instantiations counted so replay-mode tests can assert no network path
	// was ever constructed.
	static size_t instances_created();

private:
	std::string endpoint;
	std::string api_key;
	std::string model;
};

// Builds the backend selected by DIAL_LLM_MODE (http | replay | record).
// `fixture_dir` backs replay/record; record wraps the http backend unless a
// delegate is supplied.
std::shared_ptr<ChatBackend> backend_from_env(const std::string &fixture_dir,
                                              std::shared_ptr<ChatBackend> record_delegate = nullptr);

} // namespace dial
