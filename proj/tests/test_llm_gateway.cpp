#include <doctest.h>

#include "dial/common/errors.hpp"
#include "dial/llm/backend.hpp"
#include "dial/llm/embedding.hpp"
#include "dial/llm/templates.hpp"

#include <cmath>
#include <filesystem>

using namespace dial;

TEST_CASE("render substitutes bound placeholders and rejects unbound ones") {
	TemplateStore store;
	store.set("t1", "Q: {question} D: {dialect}");
	CHECK(store.render("t1", {{"question", "hi"}, {"dialect", "oracle"}}) == "Q: hi D: oracle");
	CHECK_THROWS_AS(store.render("t1", {{"question", "hi"}}), UnboundPlaceholderException);
	CHECK_THROWS_AS(store.render("missing", {}), UnknownTemplateException);

	store.set("plain", "no placeholders here");
	CHECK(store.render("plain", {}) == "no placeholders here");
}

TEST_CASE("unbound placeholder error names the placeholder") {
	TemplateStore store;
	store.set("t", "{question} {dialect}");
	try {
		store.render("t", {{"question", "q"}});
		FAIL("expected throw");
	} catch (const UnboundPlaceholderException &e) {
		CHECK(e.placeholder == "dialect");
	}
}

TEST_CASE("built-in templates cover the pipeline prompt set") {
	TemplateStore store;
	for (const char *id : {"plan_build", "plan_repair", "implicit_cal", "categorize", "generate_sql",
	                       "direct_generate", "rule_fix", "deep_fix", "semantic_fix", "distill",
	                       "kb_func_entry", "kb_rule_entry"}) {
		CHECK(store.has(id));
	}
}

TEST_CASE("default embedding is unit-norm and deterministic") {
	HashingEmbedder embedder;
	auto a = embedder.embed("compute the interval between two dates in years");
	auto b = embedder.embed("compute the interval between two dates in years");
	CHECK(a == b);
	CHECK(std::fabs(l2_norm(a) - 1.0) <= 1e-6);
	CHECK(cosine_similarity(a, b) == doctest::Approx(1.0).epsilon(1e-9));
	CHECK_THROWS_AS(embedder.embed("   "), DialException);
}

TEST_CASE("disjoint-token texts stay below the pinned similarity bound") {
	HashingEmbedder embedder;
	// 20 pairs with no shared tokens; the observed maximum cosine at D=256
	// on this corpus is 0.2857 (hash collisions only), pinned at 0.3
	std::vector<std::pair<std::string, std::string>> pairs = {
	    {"alpha bravo charlie delta", "echo foxtrot golf hotel"},
	    {"india juliett kilo lima", "mike november oscar papa"},
	    {"quebec romeo sierra tango", "uniform victor whiskey xray"},
	    {"yankee zulu apple banana", "cherry date elderberry fig"},
	    {"grape honeydew kiwi lemon", "mango nectarine orange peach"},
	    {"pear quince raspberry strawberry", "tangerine ugli vanilla watermelon"},
	    {"amber bronze copper dusk", "ember flint granite horizon"},
	    {"iris jade kelp lotus", "maple nutmeg olive pine"},
	    {"quartz ruby slate topaz", "umber violet willow zinc"},
	    {"anchor bridge canal dock", "engine ferry gangway harbor"},
	    {"ingot jetty keel lighthouse", "mast net oar port"},
	    {"quay rudder sail tide", "upwind vessel wharf yacht"},
	    {"acute blunt convex dense", "elastic fluid granular hollow"},
	    {"inert jagged kinetic liquid", "molten narrow opaque porous"},
	    {"quiet rigid smooth taut", "uneven viscous warped yielding"},
	    {"badger cougar dingo elk", "ferret gopher heron ibex"},
	    {"jackal koala lemur marmot", "newt otter panther quail"},
	    {"rabbit salamander tapir urchin", "vole walrus yak zebra"},
	    {"basil chive dill fennel", "ginger horseradish juniper kale"},
	    {"leek mustard nori oregano", "parsley rosemary saffron thyme"},
	};
	for (auto &[left, right] : pairs) {
		double cos = cosine_similarity(embedder.embed(left), embedder.embed(right));
		CHECK(cos < 0.3);
	}
}

namespace {

std::string temp_dir(const std::string &tag) {
	auto dir = std::filesystem::temp_directory_path() / ("dial_test_" + tag);
	std::filesystem::remove_all(dir);
	std::filesystem::create_directories(dir);
	return dir.string();
}

} // namespace

TEST_CASE("replay backend returns recorded replies byte-exact and misses loudly") {
	auto dir = temp_dir("replay");
	auto store = std::make_shared<FixtureStore>(dir);

	ChatRequest req;
	req.template_id = "generate_sql";
	req.rendered_prompt = "prompt with\nnewlines and unicode ⟨id⟩";
	store->store(fixture_key(req), req.rendered_prompt, "SELECT 1\n-- with trailing parts");

	ReplayBackend replay(store);
	auto reply = replay.complete(req);
	CHECK(reply.text == "SELECT 1\n-- with trailing parts");

	// determinism: identical request, identical reply
	CHECK(replay.complete(req).text == reply.text);

	ChatRequest other = req;
	other.rendered_prompt = "different prompt";
	CHECK_THROWS_AS(replay.complete(other), FixtureMissException);
	try {
		replay.complete(other);
	} catch (const FixtureMissException &e) {
		CHECK(e.key == fixture_key(other));
	}
}

TEST_CASE("recording then replaying the same inputs has zero fixture misses") {
	auto dir = temp_dir("record");
	auto scripted = std::make_shared<ScriptedBackend>();
	scripted->prime("plan_build", "[1] SRC | read things | t.a (INT)");
	scripted->prime("plan_build", "second reply");
	auto store = std::make_shared<FixtureStore>(dir);
	RecordingBackend recorder(scripted, store);

	ChatRequest r1 {"plan_build", "prompt one", 0.0};
	ChatRequest r2 {"plan_build", "prompt two", 0.0};
	auto a = recorder.complete(r1);
	auto b = recorder.complete(r2);

	ReplayBackend replay(store);
	CHECK(replay.complete(r1).text == a.text);
	CHECK(replay.complete(r2).text == b.text);
}

TEST_CASE("scripted backend exhausts primed replies then fails") {
	ScriptedBackend backend;
	backend.prime("x", "one");
	ChatRequest req {"x", "p", 0.0};
	CHECK(backend.complete(req).text == "one");
	CHECK_THROWS_AS(backend.complete(req), BackendUnavailableException);
}

TEST_CASE("fixture keying tracks template id and prompt content") {
	ChatRequest a {"t", "same", 0.0};
	ChatRequest b {"t", "same", 0.0};
	ChatRequest c {"t", "other", 0.0};
	ChatRequest d {"u", "same", 0.0};
	CHECK(fixture_key(a) == fixture_key(b));
	CHECK(fixture_key(a) != fixture_key(c));
	CHECK(fixture_key(a) != fixture_key(d));
}
