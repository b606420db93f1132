#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <atomic>
#include <random>
#include <sstream>
#include <thread>

#include <supercluster/app/cli.hpp>

using namespace supercluster;
using namespace supercluster::app;

namespace {

struct CliRun {
    int code;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "supercluster");
    std::vector<const char*> argv;
    for (auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name + ".sq"; }

bool has_line(const std::string& text, const std::string& line) {
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (l == line)
            return true;
    return false;
}

json post(Service& svc, const std::string& path, const json& body, int want = 200) {
    const ApiResponse r = svc.handle("POST", path, body.dump());
    INFO(r.body.dump());
    CHECK(r.status == want);
    return r.body;
}

json get(Service& svc, const std::string& path, int want = 200) {
    const ApiResponse r = svc.handle("GET", path);
    INFO(r.body.dump());
    CHECK(r.status == want);
    return r.body;
}

std::string value_of(const json& state, const std::string& vertex) {
    for (const auto& v : state.at("values"))
        if (v.at("vertex") == vertex)
            return v.at("text");
    return {};
}

std::filesystem::path temp_file(const std::string& stem) {
    auto p = std::filesystem::temp_directory_path() /
             (stem + "-" + std::to_string(std::random_device{}()) + ".jsonl");
    std::filesystem::remove(p);
    return p;
}

} // namespace

// ---------------------------------------------------------------------------
// CLI

TEST_CASE("cli validate") {
    auto ok = cli({"validate", fixture("spo21")});
    CHECK(ok.code == 0);
    CHECK(has_line(ok.out, "C1∨C2: satisfied"));

    auto warn = cli({"validate", fixture("counterexample7")});
    CHECK(warn.code == 0);
    CHECK_THAT(warn.err, Catch::Matchers::ContainsSubstring("C1 and C2 both violated"));

    const auto bad = temp_file("bad");
    std::FILE* f = std::fopen(bad.c_str(), "w");
    std::fputs("even x\nfrobnicate\n", f);
    std::fclose(f);
    CHECK(cli({"validate", bad.string()}).code == 2);
    std::filesystem::remove(bad);
    CHECK(cli({"validate", "/nonexistent/file.sq"}).code == 2);

    auto invalid = cli({"validate", "--model", "spo21", fixture("spo21")});
    CHECK(invalid.code == 2);
}

TEST_CASE("cli validate reports structural violations") {
    const auto p = temp_file("loop");
    std::FILE* f = std::fopen(p.c_str(), "w");
    std::fputs("even x\neven z\narrow x -> z\narrow z -> x\n", f);
    std::fclose(f);
    auto r = cli({"validate", p.string()});
    std::filesystem::remove(p);
    CHECK(r.code == 2);
    CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("2-cycle"));
}

TEST_CASE("cli mutate") {
    auto r = cli({"mutate", fixture("spo21"), "--seq", "mu:a"});
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "a' = (1 + b*c + al*be)/a"));
    CHECK(has_line(r.out, "b = b"));

    auto g = cli({"mutate", fixture("grassmannian"), "--seq", "eta:l2"});
    CHECK(g.code == 0);
    CHECK(has_line(g.out, "l2' = (q12*l4 + q24*l1)/q14"));

    auto mixed = cli({"mutate", fixture("spo21"), "--seq", "mu:a,eta:al", "--mode", "algebra"});
    CHECK(mixed.code == 3);
    CHECK_THAT(mixed.err, Catch::Matchers::ContainsSubstring("mixed sequence not allowed"));

    auto quiver_only = cli({"mutate", fixture("spo21"), "--seq", "mu:a,eta:al", "--mode", "quiver"});
    CHECK(quiver_only.code == 0);

    CHECK(cli({"mutate", fixture("spo21"), "--seq", "mu:b"}).code == 3);
    CHECK(cli({"mutate", fixture("spo21"), "--seq", "mu:zz"}).code == 2);
}

TEST_CASE("cli mutate is deterministic") {
    auto a = cli({"mutate", "--model", "spo22", "--seq", "mu:a,mu:e1"});
    auto b = cli({"mutate", "--model", "spo22", "--seq", "mu:a,mu:e1"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("cli enumerate") {
    auto r = cli({"enumerate", fixture("spo21"), "--parity", "even", "--depth", "4"});
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "4 even variables up to depth 4"));

    auto zero = cli({"enumerate", fixture("grassmannian"), "--parity", "odd", "--depth", "0", "--json"});
    const json env = json::parse(zero.out);
    CHECK(env["payload"]["count"] == 3);

    const Seed f = build_model("frieze(2)");
    const std::string want =
        value_text(SuperFraction(sp_parse(f.ambient, "1 + x2 + y2*y1")) / SuperFraction(sp_parse(f.ambient, "x1")));
    auto fr = cli({"enumerate", fixture("frieze2"), "--parity", "even", "--depth", "2"});
    CHECK(has_line(fr.out, want));
}

TEST_CASE("cli mutclass") {
    auto r = cli({"mutclass", fixture("spo21"), "--cap", "1000", "--check-bound"});
    CHECK(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("verdict: Finite"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("(holds)"));

    const auto p = temp_file("kronecker");
    std::FILE* f = std::fopen(p.c_str(), "w");
    std::fputs("even a\neven b\neven c\narrow a -> b * 3\narrow b -> c\n", f);
    std::fclose(f);
    auto k = cli({"mutclass", p.string(), "--cap", "500"});
    std::filesystem::remove(p);
    CHECK_THAT(k.out, Catch::Matchers::ContainsSubstring("InfiniteWitness"));

    const auto s = temp_file("single");
    f = std::fopen(s.c_str(), "w");
    std::fputs("even a\n", f);
    std::fclose(f);
    auto one = cli({"mutclass", s.string(), "--labeled", "--json"});
    std::filesystem::remove(s);
    const json env = json::parse(one.out);
    CHECK(env["payload"]["verdict"] == "Finite");
    CHECK(env["payload"]["size"] == 1);

    CHECK(cli({"mutclass", fixture("spo21"), "--labeled", "--up-to-iso"}).code == 2);
}

TEST_CASE("cli frieze") {
    auto r = cli({"frieze", "--width", "2", "--window", "3", "--check"});
    CHECK(r.code == 0);
    CHECK(has_line(r.out, "frieze rule: OK on all diamonds"));

    auto one = cli({"frieze", "--width", "1"});
    const Superfrieze f = superfrieze_generate(1, 2);
    CHECK(has_line(one.out, "x1' = " + value_text(SuperFraction(sp_parse(f.ambient, "2 + y2*y1")) /
                                                  SuperFraction(sp_parse(f.ambient, "x1")))));

    auto zero = cli({"frieze", "--width", "0"});
    CHECK(zero.code == 2);
    CHECK_THAT(zero.err, Catch::Matchers::ContainsSubstring("usage"));
}

TEST_CASE("cli laurent") {
    auto good = cli({"laurent", fixture("spo21"), "--seq", "mu:a", "--vertex", "a", "--json"});
    CHECK(good.code == 0);
    CHECK(json::parse(good.out)["payload"]["laurent"] == true);

    auto bad = cli({"laurent", fixture("counterexample7"), "--seq", "mu:x1,mu:x2,mu:x1", "--vertex", "x1"});
    CHECK(bad.code == 0);
    CHECK_THAT(bad.out, Catch::Matchers::ContainsSubstring("NotLaurent"));
}

TEST_CASE("cli models") {
    auto list = cli({"models", "list"});
    CHECK(list.code == 0);
    CHECK_THAT(list.out, Catch::Matchers::ContainsSubstring("spo21"));
    auto show = cli({"models", "show", "flipQ"});
    CHECK(parse_quiver(show.out) == build_quiver("flipQ"));
    CHECK(cli({"models", "show", "nope"}).code == 3);
}

TEST_CASE("cli json envelopes") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"--json", "validate", fixture("spo21")},
             {"--json", "validate", fixture("counterexample7")},
             {"--json", "mutate", fixture("spo21"), "--seq", "mu:a,eta:al"},
             {"--json", "frieze", "--width", "0"},
             {"--json", "models", "list"}}) {
        auto r = cli(args);
        const json env = json::parse(r.out);
        REQUIRE(env.contains("ok"));
        REQUIRE(env.contains("payload"));
        REQUIRE(env.contains("diagnostics"));
        CHECK(env["ok"] == (r.code == 0));
        if (!env["ok"].get<bool>())
            CHECK_FALSE(env["diagnostics"].empty());
    }
    auto w = json::parse(cli({"--json", "validate", fixture("counterexample7")}).out);
    CHECK(w["payload"]["conditions"]["c1_or_c2"] == false);
}

TEST_CASE("cli usage errors") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"mutate", fixture("spo21")}).code == 2);
    CHECK(cli({"enumerate", "--model", "spo21", "--parity", "both"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

// ---------------------------------------------------------------------------
// Service

TEST_CASE("service session lifecycle") {
    SessionStore store;
    Service svc(store);
    const json created = post(svc, "/api/sessions", {{"model_name", "spo21"}}, 201);
    const std::string id = created["session_id"];
    const json initial = created["state"];
    CHECK(value_of(initial, "a") == "a");
    CHECK(initial["conditions"]["c1_or_c2"] == true);

    const json moved = post(svc, "/api/sessions/" + id + "/mutate", {{"kind", "even"}, {"vertex", "a"}});
    CHECK(value_of(moved["state"], "a") == "(1 + b*c + al*be)/a");
    CHECK(moved["relation"] == "a * a' = 1 + b*c + al*be");

    post(svc, "/api/sessions/" + id + "/mutate", {{"kind", "even"}, {"vertex", "b"}}, 409);

    const json undone = post(svc, "/api/sessions/" + id + "/undo", json::object());
    CHECK(undone["values"] == initial["values"]);
    CHECK(undone["quiver"] == initial["quiver"]);
    CHECK(undone["can_redo"] == true);
    post(svc, "/api/sessions/" + id + "/undo", json::object(), 409);

    const json redone = post(svc, "/api/sessions/" + id + "/redo", json::object());
    CHECK(redone["values"] == moved["state"]["values"]);
    CHECK(get(svc, "/api/sessions/" + id) == redone);
}

TEST_CASE("service enforces parity in algebra mode") {
    SessionStore store;
    Service svc(store);
    const std::string id = post(svc, "/api/sessions", {{"model_name", "spo21"}}, 201)["session_id"];
    post(svc, "/api/sessions/" + id + "/mutate", {{"vertex", "a"}});
    const json r = post(svc, "/api/sessions/" + id + "/mutate", {{"kind", "odd"}, {"vertex", "al"}}, 409);
    CHECK_THAT(r["error"].get<std::string>(), Catch::Matchers::ContainsSubstring("mixed sequence not allowed"));
    post(svc, "/api/sessions/" + id + "/mutate", {{"kind", "odd"}, {"vertex", "al"}, {"mode", "quiver"}});
    const json state = get(svc, "/api/sessions/" + id);
    CHECK(state["values_follow_quiver"] == false);
    post(svc, "/api/sessions/" + id + "/mutate", {{"vertex", "a"}}, 409);
    post(svc, "/api/sessions/" + id + "/mutate", {{"kind", "odd"}, {"vertex", "a"}}, 409);
}

TEST_CASE("service flip sequence reaches Q'") {
    SessionStore store;
    Service svc(store);
    const std::string id = post(svc, "/api/sessions", {{"model_name", "flipQ"}}, 201)["session_id"];
    for (const char* v : {"x1", "y2", "y4"})
        post(svc, "/api/sessions/" + id + "/mutate", {{"vertex", v}, {"mode", "quiver"}});
    const json s = get(svc, "/api/sessions/" + id);
    CHECK(parse_quiver(s["quiver"]["text"].get<std::string>()) == build_quiver("flipQprime"));
}

TEST_CASE("service errors") {
    SessionStore store;
    Service svc(store);
    get(svc, "/api/sessions/deadbeef", 404);
    post(svc, "/api/sessions/deadbeef/undo", json::object(), 404);
    get(svc, "/api/nothing", 404);
    get(svc, "/elsewhere", 404);
    get(svc, "/api/models/nope", 404);
    CHECK(svc.handle("POST", "/api/sessions", "{not json").status == 400);
    CHECK(svc.handle("POST", "/api/sessions", "[1]").status == 400);
    post(svc, "/api/sessions", {{"quiver_text", "even x\narrow x -> x\n"}}, 400);
    post(svc, "/api/sessions", {{"model_name", "nope"}}, 400);
    post(svc, "/api/sessions", json::object(), 400);
    const std::string id = post(svc, "/api/sessions", {{"model_name", "spo21"}}, 201)["session_id"];
    post(svc, "/api/sessions/" + id + "/mutate", {{"vertex", "zz"}}, 404);
    post(svc, "/api/sessions/" + id + "/mutate", {{"vertex", "a"}, {"mode", "fast"}}, 400);
    get(svc, "/api/sessions/" + id + "/laurent/zz", 404);
    const json e = get(svc, "/api/sessions/nope", 404);
    CHECK(e["ok"] == false);
    CHECK_FALSE(e["diagnostics"].empty());
}

TEST_CASE("service models and laurent certificates") {
    SessionStore store;
    Service svc(store);
    const json models = get(svc, "/api/models");
    CHECK(models.size() == models::list_models().size());
    CHECK(get(svc, "/api/models/spo21")["quiver_text"] == models::model_text("spo21"));

    const std::string id = post(svc, "/api/sessions", {{"model_name", "counterexample7"}}, 201)["session_id"];
    for (const char* v : {"x1", "x2", "x1"})
        post(svc, "/api/sessions/" + id + "/mutate", {{"vertex", v}});
    const json cert = get(svc, "/api/sessions/" + id + "/laurent/x1");
    CHECK(cert["laurent"] == false);
    CHECK(cert.contains("witness"));
    post(svc, "/api/sessions/" + id + "/undo", json::object());
    post(svc, "/api/sessions/" + id + "/undo", json::object());
    const json good = get(svc, "/api/sessions/" + id + "/laurent/x1");
    CHECK(good["laurent"] == true);
    CHECK(good["polynomial"] == "x1^-1 + x1^-1*x2");
}

TEST_CASE("service and cli share value strings") {
    SessionStore store;
    Service svc(store);
    const std::string id = post(svc, "/api/sessions", {{"model_name", "grassmannian"}}, 201)["session_id"];
    const json r = post(svc, "/api/sessions/" + id + "/mutate", {{"vertex", "q24"}});
    auto c = cli({"mutate", "--model", "grassmannian", "--seq", "mu:q24"});
    CHECK(has_line(c.out, "q24' = " + value_of(r["state"], "q24")));
}

TEST_CASE("service state round-trips through quiver text") {
    SessionStore store;
    Service svc(store);
    for (const auto& m : models::list_models()) {
        if (m.name == "frieze(n)")
            continue;
        const json s = post(svc, "/api/sessions", {{"model_name", m.name}}, 201)["state"];
        INFO(m.name);
        CHECK(parse_quiver(s["quiver"]["text"].get<std::string>()) == build_quiver(m.name));
        const json again = post(svc, "/api/sessions", {{"quiver_text", s["quiver"]["text"]}}, 201)["state"];
        CHECK(again["quiver"] == s["quiver"]);
    }
}

TEST_CASE("property: session replay reproduces the current seed") {
    std::mt19937 rng(5);
    for (const char* model : {"spo22", "grassmannian", "example4_2", "flipQ"}) {
        SessionStore store;
        auto s = store.create_from_model(model);
        for (int step = 0; step < 12; ++step) {
            const SuperQuiver& q = s->current().seed.quiver;
            std::uniform_int_distribution<int> op(0, 5);
            const int o = op(rng);
            if (o == 0 && s->can_undo()) {
                s->undo();
            } else if (o == 1 && s->can_redo()) {
                s->redo();
            } else {
                std::uniform_int_distribution<std::size_t> pick(0, q.size() - 1);
                const std::size_t v = pick(rng);
                const MutationStep st{q.vertex(v).even() ? StepKind::Even : StepKind::Odd, v};
                const SequenceMode mode = o == 2 ? SequenceMode::QuiverOnly : SequenceMode::Algebra;
                try {
                    s->mutate(st, mode);
                } catch (const Conflict&) {
                }
            }
            INFO(model << " step " << step);
            CHECK(seeds_equal(s->replay(), s->current().seed));
        }
    }
}

TEST_CASE("history tree keeps branches") {
    SessionStore store;
    auto s = store.create_from_model("spo22");
    const auto x1 = s->current().seed.quiver.index_of("a");
    const auto x2 = s->current().seed.quiver.index_of("e1");
    s->mutate({StepKind::Even, x1}, SequenceMode::Algebra);
    s->undo();
    s->mutate({StepKind::Even, x2}, SequenceMode::Algebra);
    CHECK(s->nodes().size() == 3);
    CHECK(s->nodes()[0].children.size() == 2);
    s->jump(1);
    CHECK(s->current().step == MutationStep{StepKind::Even, x1});
    s->undo();
    s->redo();
    CHECK(s->cursor() == 1);
    // Repeating a move from the same node revisits it.
    s->undo();
    s->mutate({StepKind::Even, x2}, SequenceMode::Algebra);
    CHECK(s->nodes().size() == 3);
    CHECK_THROWS_AS(s->jump(9), NotFound);
}

TEST_CASE("journal replay restores sessions") {
    const auto path = temp_file("journal");
    json before;
    std::string id;
    {
        SessionStore store(path.string());
        Service svc(store);
        id = post(svc, "/api/sessions", {{"model_name", "spo22"}}, 201)["session_id"];
        post(svc, "/api/sessions/" + id + "/mutate", {{"vertex", "a"}});
        post(svc, "/api/sessions/" + id + "/mutate", {{"vertex", "e1"}});
        post(svc, "/api/sessions/" + id + "/undo", json::object());
        post(svc, "/api/sessions/" + id + "/mutate", {{"kind", "odd"}, {"vertex", "al1"}}, 409);
        before = get(svc, "/api/sessions/" + id);
    }
    {
        SessionStore store(path.string());
        Service svc(store);
        CHECK(get(svc, "/api/sessions/" + id) == before);
    }
    {
        std::FILE* f = std::fopen(path.c_str(), "a");
        std::fputs("{\"op\":\"mutate\",\"id\":\"missing\"}\n", f);
        std::fclose(f);
        CHECK_THROWS_AS(SessionStore(path.string()), Error);
    }
    std::filesystem::remove(path);
}

TEST_CASE("concurrent requests") {
    SessionStore store;
    Service svc(store);
    const std::string shared = post(svc, "/api/sessions", {{"model_name", "spo22"}}, 201)["session_id"];
    std::vector<std::thread> threads;
    std::atomic<int> failures{0};
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            const auto own = svc.handle("POST", "/api/sessions", json{{"model_name", "grassmannian"}}.dump());
            if (own.status != 201)
                ++failures;
            const std::string id = own.body["session_id"];
            for (int i = 0; i < 5; ++i) {
                const char* v = (i + t) % 2 ? "a" : "e1";
                if (svc.handle("POST", "/api/sessions/" + shared + "/mutate", json{{"vertex", v}}.dump()).status != 200)
                    ++failures;
                if (svc.handle("POST", "/api/sessions/" + id + "/mutate", json{{"vertex", "q24"}}.dump()).status != 200)
                    ++failures;
            }
        });
    for (auto& th : threads)
        th.join();
    CHECK(failures == 0);
    CHECK(store.size() == 5);
    auto s = store.get(shared);
    std::lock_guard lock(s->mutex());
    CHECK(seeds_equal(s->replay(), s->current().seed));
    CHECK(s->path().size() == 21);
}

TEST_CASE("http server over a socket") {
    SessionStore store;
    Service svc(store);
    HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread th([&] { server.run(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto models = client.Get("/api/models");
    REQUIRE(models);
    CHECK(models->status == 200);
    auto created = client.Post("/api/sessions", R"({"model_name":"spo21"})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string id = json::parse(created->body)["session_id"];
    auto moved = client.Post("/api/sessions/" + id + "/mutate", R"({"kind":"even","vertex":"a"})", "application/json");
    REQUIRE(moved);
    CHECK_THAT(moved->body, Catch::Matchers::ContainsSubstring("(1 + b*c + al*be)/a"));
    auto frozen = client.Post("/api/sessions/" + id + "/mutate", R"({"vertex":"b"})", "application/json");
    REQUIRE(frozen);
    CHECK(frozen->status == 409);
    auto missing = client.Get("/api/sessions/zzz");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    server.stop();
    th.join();
}
