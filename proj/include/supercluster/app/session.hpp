#pragma once

#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../errors.hpp"
#include "../models.hpp"
#include "../mutation.hpp"
#include "encode.hpp"

namespace supercluster::app {

class NotFound : public Error {
public:
    using Error::Error;
};

/// Malformed request field.
class BadRequest : public Error {
public:
    using Error::Error;
};

/// Move rejected by the session (frozen vertex, mixed or stale algebra history).
class Conflict : public Error {
public:
    using Error::Error;
};

inline std::string mode_name(SequenceMode m) { return m == SequenceMode::Algebra ? "algebra" : "quiver"; }

inline SequenceMode parse_mode(std::string_view s) {
    if (s == "algebra")
        return SequenceMode::Algebra;
    if (s == "quiver")
        return SequenceMode::QuiverOnly;
    throw BadRequest("mode must be 'algebra' or 'quiver', got '" + std::string(s) + "'");
}

inline StepKind parse_kind(std::string_view s) {
    if (s == "even" || s == "Even" || s == "mu")
        return StepKind::Even;
    if (s == "odd" || s == "Odd" || s == "eta")
        return StepKind::Odd;
    throw BadRequest("kind must be 'even' or 'odd', got '" + std::string(s) + "'");
}

inline std::string kind_name(StepKind k) { return k == StepKind::Even ? "even" : "odd"; }

/// Node of the exploration tree. The root has no step.
struct HistoryNode {
    std::optional<MutationStep> step;
    SequenceMode mode = SequenceMode::Algebra;
    Seed seed;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
    std::optional<std::size_t> redo_child;
    std::vector<std::string> warnings;
    std::string relation;
};

class Session {
public:
    using Clock = std::chrono::system_clock;

    Session(std::string id, std::string source, Seed initial) : id_(std::move(id)), source_(std::move(source)) {
        nodes_.push_back({std::nullopt, SequenceMode::Algebra, std::move(initial), std::nullopt, {}, {}, {}, {}});
        created_ = modified_ = Clock::now();
    }

    const std::string& id() const { return id_; }
    /// Quiver text the session was created from.
    const std::string& source() const { return source_; }
    std::mutex& mutex() const { return mutex_; }

    const HistoryNode& current() const { return nodes_[cursor_]; }
    const HistoryNode& initial() const { return nodes_.front(); }
    const std::vector<HistoryNode>& nodes() const { return nodes_; }
    std::size_t cursor() const { return cursor_; }
    Clock::time_point created() const { return created_; }
    Clock::time_point modified() const { return modified_; }

    /// Node indices from the root to the cursor.
    std::vector<std::size_t> path() const {
        std::vector<std::size_t> out;
        for (std::optional<std::size_t> n = cursor_; n; n = nodes_[*n].parent)
            out.push_back(*n);
        return {out.rbegin(), out.rend()};
    }

    /// Checks legality of a move from the cursor; throws Conflict with the reason.
    void check_move(const MutationStep& st, SequenceMode mode) const {
        const SuperQuiver& q = current().seed.quiver;
        if (st.vertex >= q.size())
            throw Conflict("no such vertex");
        const auto& v = q.vertex(st.vertex);
        if (v.frozen)
            throw Conflict("vertex " + v.label + " is frozen");
        if ((st.kind == StepKind::Even) != v.even())
            throw Conflict("vertex " + v.label + " is " + (v.even() ? "even" : "odd") + "; use a " +
                           (v.even() ? "mu" : "eta") + " step");
        if (mode != SequenceMode::Algebra)
            return;
        for (auto n : path()) {
            const auto& node = nodes_[n];
            if (!node.step)
                continue;
            if (node.mode == SequenceMode::QuiverOnly)
                throw Conflict("history contains quiver-only moves, so the values no longer match the quiver; "
                               "algebra moves are disabled on this branch");
            if (node.step->kind != st.kind)
                throw Conflict("mixed sequence not allowed in algebra mode: this branch already uses " +
                               kind_name(node.step->kind) + " mutations");
        }
    }

    /// Applies a move and makes it the cursor. An identical move already taken
    /// from the cursor is revisited rather than duplicated.
    const HistoryNode& mutate(const MutationStep& st, SequenceMode mode) {
        check_move(st, mode);
        HistoryNode& cur = nodes_[cursor_];
        for (auto c : cur.children)
            if (nodes_[c].step == st && nodes_[c].mode == mode) {
                cur.redo_child = c;
                cursor_ = c;
                touch();
                return nodes_[c];
            }
        HistoryNode next;
        next.step = st;
        next.mode = mode;
        next.seed = apply_step(cur.seed, st, mode, &next.warnings);
        next.parent = cursor_;
        next.relation = mode == SequenceMode::Algebra ? relation_text(cur.seed, next.seed, st) : std::string{};
        nodes_.push_back(std::move(next));
        const std::size_t idx = nodes_.size() - 1;
        nodes_[cursor_].children.push_back(idx);
        nodes_[cursor_].redo_child = idx;
        cursor_ = idx;
        touch();
        return nodes_[idx];
    }

    bool can_undo() const { return current().parent.has_value(); }
    bool can_redo() const { return current().redo_child.has_value(); }

    void undo() {
        if (!can_undo())
            throw Conflict("nothing to undo");
        cursor_ = *current().parent;
        touch();
    }

    void redo() {
        if (!can_redo())
            throw Conflict("nothing to redo");
        cursor_ = *current().redo_child;
        touch();
    }

    /// Moves the cursor to any node of the tree.
    void jump(std::size_t node) {
        if (node >= nodes_.size())
            throw NotFound("no history node " + std::to_string(node));
        cursor_ = node;
        for (auto n = nodes_[node].parent, c = std::optional<std::size_t>(node); n; c = n, n = nodes_[*n].parent)
            nodes_[*n].redo_child = c;
        touch();
    }

    /// Recomputes the cursor's seed from the root along the recorded moves.
    Seed replay() const {
        Seed s = initial().seed;
        for (auto n : path())
            if (nodes_[n].step)
                s = apply_step(s, *nodes_[n].step, nodes_[n].mode);
        return s;
    }

private:
    void touch() { modified_ = Clock::now(); }

    std::string id_;
    std::string source_;
    std::vector<HistoryNode> nodes_;
    std::size_t cursor_ = 0;
    Clock::time_point created_, modified_;
    mutable std::mutex mutex_;
};

/// Sessions by id. Each session is locked separately; the map lock is only
/// held for lookup and insertion. With a journal path, every create and move
/// is appended as one JSON line and replayed on construction.
class SessionStore {
public:
    SessionStore() = default;
    explicit SessionStore(std::string journal_path) : journal_path_(std::move(journal_path)) { replay_journal(); }

    std::shared_ptr<Session> create_from_text(const std::string& text) {
        return create(Seed::initial(parse_quiver(text)), text, new_id(), true);
    }

    std::shared_ptr<Session> create_from_model(const std::string& name) {
        return create_from_text(models::model_text(name));
    }

    std::shared_ptr<Session> get(const std::string& id) const {
        std::shared_lock lock(map_mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end())
            throw NotFound("unknown session " + id);
        return it->second;
    }

    std::size_t size() const {
        std::shared_lock lock(map_mutex_);
        return sessions_.size();
    }

    /// Callers hold the session's mutex.
    void record(const Session& s, nlohmann::json op) {
        op["id"] = s.id();
        append(op);
    }

private:
    std::shared_ptr<Session> create(Seed seed, const std::string& text, std::string id, bool journal) {
        auto s = std::make_shared<Session>(id, text, std::move(seed));
        {
            std::unique_lock lock(map_mutex_);
            sessions_[id] = s;
        }
        if (journal)
            append({{"op", "create"}, {"id", id}, {"quiver_text", text}});
        return s;
    }

    std::string new_id() {
        std::lock_guard lock(rng_mutex_);
        std::uniform_int_distribution<std::uint64_t> d;
        char buf[17];
        for (;;) {
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d(rng_)));
            std::shared_lock lock2(map_mutex_);
            if (!sessions_.count(buf))
                return buf;
        }
    }

    void append(const nlohmann::json& op) {
        if (journal_path_.empty())
            return;
        std::lock_guard lock(journal_mutex_);
        std::ofstream out(journal_path_, std::ios::app);
        if (!out)
            throw Error("cannot write journal " + journal_path_);
        out << op.dump() << '\n';
    }

    void replay_journal() {
        std::ifstream in(journal_path_);
        if (!in)
            return;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty())
                continue;
            try {
                const auto op = nlohmann::json::parse(line);
                const std::string kind = op.at("op");
                const std::string id = op.at("id");
                if (kind == "create") {
                    create(Seed::initial(parse_quiver(op.at("quiver_text").get<std::string>())),
                           op.at("quiver_text"), id, false);
                    continue;
                }
                auto s = get(id);
                if (kind == "mutate")
                    s->mutate({parse_kind(op.at("kind").get<std::string>()), op.at("vertex").get<std::size_t>()},
                              parse_mode(op.at("mode").get<std::string>()));
                else if (kind == "undo")
                    s->undo();
                else if (kind == "redo")
                    s->redo();
                else if (kind == "jump")
                    s->jump(op.at("node").get<std::size_t>());
                else
                    throw BadRequest("unknown op " + kind);
            } catch (const std::exception& e) {
                throw Error("journal " + journal_path_ + " line " + std::to_string(lineno) + ": " + e.what());
            }
        }
    }

    std::string journal_path_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    mutable std::shared_mutex map_mutex_;
    std::mutex journal_mutex_, rng_mutex_;
    std::mt19937_64 rng_{std::random_device{}()};
};

} // namespace supercluster::app
