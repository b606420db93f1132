#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "../models.hpp"
#include "encode.hpp"
#include "session.hpp"

namespace supercluster::app {

struct ApiResponse {
    int status = 200;
    json body;
};

inline std::vector<std::string> split_path(std::string_view path) {
    if (auto q = path.find('?'); q != std::string_view::npos)
        path = path.substr(0, q);
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/')
            ++i;
        std::size_t j = i;
        while (j < path.size() && path[j] != '/')
            ++j;
        if (j > i)
            out.emplace_back(path.substr(i, j - i));
        i = j;
    }
    return out;
}

/// JSON API over a SessionStore, independent of any HTTP library.
class Service {
public:
    explicit Service(SessionStore& store) : store_(store) {}

    ApiResponse handle(std::string_view method, std::string_view path, std::string_view body = {}) {
        try {
            return route(method, split_path(path), body);
        } catch (const NotFound& e) {
            return error(404, e.what());
        } catch (const Conflict& e) {
            return error(409, e.what());
        } catch (const IllegalMutation& e) {
            return error(409, e.what());
        } catch (const BadRequest& e) {
            return error(400, e.what());
        } catch (const ParseError& e) {
            return error(400, e.what());
        } catch (const InvalidQuiver& e) {
            return error(400, e.what());
        } catch (const PreconditionError& e) {
            return error(400, e.what());
        } catch (const json::exception& e) {
            return error(400, std::string("bad JSON: ") + e.what());
        } catch (const std::exception& e) {
            return error(500, e.what());
        }
    }

    /// State of a session; callers hold its mutex.
    static json state(const Session& s) {
        const HistoryNode& cur = s.current();
        json moves = json::array();
        const SuperQuiver& q = cur.seed.quiver;
        for (std::size_t v = 0; v < q.size(); ++v) {
            if (q.vertex(v).frozen)
                continue;
            const MutationStep st{q.vertex(v).even() ? StepKind::Even : StepKind::Odd, v};
            json m = {{"vertex", q.vertex(v).label}, {"kind", kind_name(st.kind)}, {"quiver", true}};
            try {
                s.check_move(st, SequenceMode::Algebra);
                m["algebra"] = true;
            } catch (const Conflict& e) {
                m["algebra"] = false;
                m["reason"] = e.what();
            }
            moves.push_back(std::move(m));
        }
        json nodes = json::array();
        for (std::size_t i = 0; i < s.nodes().size(); ++i) {
            const auto& n = s.nodes()[i];
            json node = {{"node", i}, {"children", n.children}};
            node["parent"] = n.parent ? json(*n.parent) : json(nullptr);
            if (n.step) {
                node["step"] = format_step(n.seed.quiver, *n.step);
                node["mode"] = mode_name(n.mode);
            }
            if (!n.relation.empty())
                node["relation"] = n.relation;
            nodes.push_back(std::move(node));
        }
        bool stale = false;
        for (auto i : s.path())
            stale = stale || (s.nodes()[i].step && s.nodes()[i].mode == SequenceMode::QuiverOnly);
        return {{"session_id", s.id()},
                {"quiver", quiver_json(q)},
                {"values", seed_values_json(cur.seed)},
                {"values_follow_quiver", !stale},
                {"conditions", conditions_json(q)},
                {"legal_moves", moves},
                {"history", {{"cursor", s.cursor()}, {"path", s.path()}, {"nodes", nodes}}},
                {"can_undo", s.can_undo()},
                {"can_redo", s.can_redo()},
                {"warnings", cur.warnings}};
    }

private:
    static ApiResponse error(int status, std::string msg) {
        return {status, {{"ok", false}, {"error", msg}, {"diagnostics", {msg}}}};
    }

    static json parse_body(std::string_view body) {
        if (body.empty())
            return json::object();
        json j = json::parse(body);
        if (!j.is_object())
            throw BadRequest("request body must be a JSON object");
        return j;
    }

    ApiResponse route(std::string_view method, const std::vector<std::string>& p, std::string_view body) {
        if (p.empty() || p[0] != "api")
            throw NotFound("no such endpoint");
        if (p.size() == 2 && p[1] == "models" && method == "GET") {
            json out = json::array();
            for (const auto& m : models::list_models())
                out.push_back({{"name", m.name}, {"summary", m.summary}});
            return {200, out};
        }
        if (p.size() == 3 && p[1] == "models" && method == "GET") {
            std::string text;
            try {
                text = models::model_text(p[2]);
            } catch (const PreconditionError& e) {
                throw NotFound(e.what());
            }
            return {200, {{"name", p[2]}, {"quiver_text", text}}};
        }
        if (p.size() < 2 || p[1] != "sessions")
            throw NotFound("no such endpoint");

        if (p.size() == 2 && method == "POST") {
            const json req = parse_body(body);
            std::shared_ptr<Session> s;
            if (req.contains("quiver_text"))
                s = store_.create_from_text(req.at("quiver_text").get<std::string>());
            else if (req.contains("model_name"))
                s = store_.create_from_model(req.at("model_name").get<std::string>());
            else
                throw BadRequest("expected quiver_text or model_name");
            std::lock_guard lock(s->mutex());
            return {201, {{"session_id", s->id()}, {"state", state(*s)}}};
        }
        if (p.size() < 3)
            throw NotFound("no such endpoint");

        auto s = store_.get(p[2]);
        std::lock_guard lock(s->mutex());
        if (p.size() == 3 && method == "GET")
            return {200, state(*s)};
        if (p.size() == 4 && method == "POST") {
            const json req = parse_body(body);
            if (p[3] == "mutate") {
                const SuperQuiver& q = s->current().seed.quiver;
                const std::string label = req.at("vertex").get<std::string>();
                const auto found = q.find(label);
                if (!found)
                    throw NotFound("unknown vertex " + label);
                const std::size_t v = *found;
                const StepKind kind = req.contains("kind") ? parse_kind(req.at("kind").get<std::string>())
                                                           : (q.vertex(v).even() ? StepKind::Even : StepKind::Odd);
                const SequenceMode mode = parse_mode(req.value("mode", std::string("algebra")));
                const HistoryNode& n = s->mutate({kind, v}, mode);
                store_.record(*s, {{"op", "mutate"}, {"kind", kind_name(kind)}, {"vertex", v}, {"mode", mode_name(mode)}});
                return {200, {{"state", state(*s)}, {"relation", n.relation}, {"warnings", n.warnings}}};
            }
            if (p[3] == "undo" || p[3] == "redo") {
                p[3] == "undo" ? s->undo() : s->redo();
                store_.record(*s, {{"op", p[3]}});
                return {200, state(*s)};
            }
            if (p[3] == "jump") {
                const auto node = req.at("node").get<std::size_t>();
                s->jump(node);
                store_.record(*s, {{"op", "jump"}, {"node", node}});
                return {200, state(*s)};
            }
        }
        if (p.size() == 5 && p[3] == "laurent" && method == "GET") {
            const Seed& seed = s->current().seed;
            if (!seed.quiver.find(p[4]))
                throw NotFound("unknown vertex " + p[4]);
            const SuperFraction& v = seed.value(p[4]);
            const LaurentCertificate c = is_laurent(v);
            json out = {{"vertex", p[4]}, {"value", value_text(v)}, {"laurent", c.laurent}};
            if (c.polynomial)
                out["polynomial"] = sp_format(*c.polynomial);
            if (c.witness)
                out["witness"] = sf_format(*c.witness);
            return {200, out};
        }
        throw NotFound("no such endpoint");
    }

    SessionStore& store_;
};

} // namespace supercluster::app
