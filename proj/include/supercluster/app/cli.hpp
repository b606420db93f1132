#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../frieze.hpp"
#include "../models.hpp"
#include "../mutation.hpp"
#include "../mutation_class.hpp"
#include "encode.hpp"
#include "http.hpp"
#include "service.hpp"
#include "session.hpp"

namespace supercluster::app {

enum ExitCode { ExitOk = 0, ExitFailure = 1, ExitInvalid = 2, ExitIllegal = 3 };

/// Thrown for bad command-line usage; mapped to ExitInvalid.
class UsageError : public Error {
public:
    using Error::Error;
};

namespace detail {

struct Input {
    std::string path;
    std::string model;

    void add_to(CLI::App* cmd) {
        cmd->add_option("file", path, "quiver file");
        cmd->add_option("--model", model, "built-in model instead of a file");
    }

    std::string text() const {
        if (!model.empty() && !path.empty())
            throw UsageError("give either a file or --model, not both");
        if (!model.empty())
            return models::model_text(model);
        if (path.empty())
            throw UsageError("no input: give a quiver file or --model NAME");
        std::ifstream in(path);
        if (!in)
            throw ParseError("cannot read " + path, 0, 0);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
};

inline std::string primes(std::size_t t) {
    return t <= 3 ? std::string(t, '\'') : "^(" + std::to_string(t) + ")";
}

inline std::string violation_text(const Violation& v) { return std::string(to_string(v.kind)) + ": " + v.message; }

} // namespace detail

/// Runs the command line. Output goes to out, diagnostics to err; returns the
/// exit code (0 ok, 2 parse or validation failure, 3 illegal operation).
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quiver mutation in cluster superalgebras", "supercluster"};
    app.require_subcommand(1);
    app.fallthrough();
    bool as_json = false;
    app.add_flag("--json", as_json, "print a JSON envelope {ok, payload, diagnostics}");

    Envelope env;
    auto warn = [&](const std::string& msg) { env.diagnostics.push_back("warning: " + msg); };

    // validate
    detail::Input v_in;
    auto* validate_cmd = app.add_subcommand("validate", "check a quiver file and report C1/C2 per even vertex");
    v_in.add_to(validate_cmd);

    // mutate
    detail::Input m_in;
    std::string seq, mode_text = "algebra";
    auto* mutate_cmd = app.add_subcommand("mutate", "apply a mutation sequence");
    m_in.add_to(mutate_cmd);
    mutate_cmd->add_option("--seq", seq, "steps such as \"mu:a,eta:al\"")->required();
    mutate_cmd->add_option("--mode", mode_text, "algebra or quiver")->check(CLI::IsMember({"algebra", "quiver"}));

    // enumerate
    detail::Input e_in;
    std::string parity_text = "even";
    std::size_t depth = 3;
    auto* enumerate_cmd = app.add_subcommand("enumerate", "list cluster variables up to a mutation depth");
    e_in.add_to(enumerate_cmd);
    enumerate_cmd->add_option("--parity", parity_text, "even or odd")->check(CLI::IsMember({"even", "odd"}));
    enumerate_cmd->add_option("--depth", depth, "maximum sequence length");

    // mutclass
    detail::Input c_in;
    std::size_t cap = 10000;
    bool labeled = false, up_to_iso = false, check_bound = false;
    auto* class_cmd = app.add_subcommand("mutclass", "mutation class and finite-type verdict");
    c_in.add_to(class_cmd);
    class_cmd->add_option("--cap", cap, "stop after this many quivers");
    auto* lab = class_cmd->add_flag("--labeled", labeled, "count labeled quivers");
    class_cmd->add_flag("--up-to-iso", up_to_iso, "count isomorphism classes (default)")->excludes(lab);
    class_cmd->add_flag("--check-bound", check_bound, "report the bound from the even and odd parts");

    // frieze
    std::size_t width = 0, window = 2;
    bool check = false;
    auto* frieze_cmd = app.add_subcommand("frieze", "generate a superfrieze");
    frieze_cmd->add_option("--width", width, "number of nontrivial even rows")->required();
    frieze_cmd->add_option("--window", window, "number of diagonals");
    frieze_cmd->add_flag("--check", check, "verify the frieze rule on every diamond");

    // laurent
    detail::Input l_in;
    std::string l_seq, l_vertex;
    auto* laurent_cmd = app.add_subcommand("laurent", "certify that a cluster variable is a Laurent polynomial");
    l_in.add_to(laurent_cmd);
    laurent_cmd->add_option("--seq", l_seq, "mutation sequence applied first");
    laurent_cmd->add_option("--vertex", l_vertex, "vertex whose value is certified")->required();

    // models
    auto* models_cmd = app.add_subcommand("models", "built-in models");
    models_cmd->require_subcommand(1);
    auto* models_list = models_cmd->add_subcommand("list", "list models");
    std::string show_name;
    auto* models_show = models_cmd->add_subcommand("show", "print a model's quiver");
    models_show->add_option("name", show_name)->required();

    // serve
    int port = 8080;
    if (const char* p = std::getenv("SUPERCLUSTER_PORT"))
        port = std::atoi(p);
    std::string bind_host = "127.0.0.1", journal, static_dir;
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP JSON service");
    serve_cmd->add_option("--port", port, "port (default $SUPERCLUSTER_PORT or 8080)");
    serve_cmd->add_option("--bind", bind_host, "address to listen on");
    serve_cmd->add_option("--journal", journal, "append-only session journal, replayed at start");
    serve_cmd->add_option("--static", static_dir, "directory served at /");

    auto finish = [&](int code, const std::string& text) {
        env.ok = code == ExitOk;
        if (as_json) {
            out << env.to_json().dump(2) << '\n';
        } else {
            out << text;
            for (const auto& d : env.diagnostics)
                err << d << '\n';
        }
        return code;
    };
    auto fail = [&](int code, const std::string& msg) {
        env.ok = false;
        env.diagnostics.push_back("error: " + msg);
        if (as_json)
            out << env.to_json().dump(2) << '\n';
        else
            for (const auto& d : env.diagnostics)
                err << d << '\n';
        return code;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return ExitInvalid;
    }

    std::ostringstream text;
    try {
        if (*validate_cmd) {
            const SuperQuiver q = parse_quiver_unchecked(v_in.text());
            const auto violations = validate(q);
            env.payload["quiver"] = format_quiver(q);
            env.payload["violations"] = json::array();
            for (const auto& v : violations) {
                env.payload["violations"].push_back(detail::violation_text(v));
                env.diagnostics.push_back("error: " + detail::violation_text(v));
            }
            if (!violations.empty())
                return finish(ExitInvalid, "invalid quiver\n");
            const json conds = conditions_json(q);
            env.payload["conditions"] = conds;
            const auto evens = q.vertices_of(Parity::Even);
            text << "valid: " << evens.size() << " even, " << q.size() - evens.size() << " odd vertices\n";
            for (const auto& c : conds["vertices"])
                text << "  " << c["vertex"].get<std::string>() << ": C1 " << (c["c1"].get<bool>() ? "yes" : "no")
                     << ", C2 " << (c["c2"].get<bool>() ? "yes" : "no") << '\n';
            if (conds["c1_or_c2"].get<bool>()) {
                text << "C1∨C2: satisfied\n";
            } else {
                std::string where;
                for (const auto& c : conds["vertices"])
                    if (!c["c1"].get<bool>() && !c["c2"].get<bool>())
                        where += (where.empty() ? "" : ", ") + c["vertex"].get<std::string>();
                text << "C1∨C2: not satisfied\n";
                warn("C1 and C2 both violated at " + where + "; Laurentness is not guaranteed");
            }
            return finish(ExitOk, text.str());
        }

        if (*mutate_cmd) {
            const Seed s = Seed::initial(parse_quiver(m_in.text()));
            const auto steps = parse_steps(s.quiver, seq);
            const SequenceMode mode = parse_mode(mode_text);
            std::vector<std::string> warnings;
            const Seed r = apply_sequence(s, steps, mode, &warnings);
            for (const auto& w : warnings)
                warn(w);
            text << "quiver:\n" << format_quiver(r.quiver);
            env.payload["quiver"] = quiver_json(r.quiver);
            env.payload["sequence"] = json::array();
            for (const auto& st : steps)
                env.payload["sequence"].push_back(format_step(s.quiver, st));
            json values = json::array();
            if (mode == SequenceMode::Algebra) {
                text << "values:\n";
                for (std::size_t i = 0; i < r.values.size(); ++i) {
                    const bool changed = !sf_eq(r.values[i], s.values[i]);
                    const std::string name = r.quiver.vertex(i).label + (changed ? "'" : "");
                    text << name << " = " << value_text(r.values[i]) << '\n';
                    json v = value_json(r.values[i]);
                    v["vertex"] = r.quiver.vertex(i).label;
                    v["changed"] = changed;
                    values.push_back(std::move(v));
                }
            } else {
                text << "values: unchanged (quiver mode)\n";
            }
            env.payload["values"] = values;
            return finish(ExitOk, text.str());
        }

        if (*enumerate_cmd) {
            const Seed s = Seed::initial(parse_quiver(e_in.text()));
            const Parity parity = parity_text == "even" ? Parity::Even : Parity::Odd;
            const ValueSet vals = enumerate_vars(s, parity, depth);
            text << vals.size() << ' ' << parity_text << " variables up to depth " << depth << '\n';
            json arr = json::array();
            for (const auto& v : vals.sorted()) {
                text << value_text(v) << '\n';
                arr.push_back(value_json(v));
            }
            env.payload = {{"parity", parity_text}, {"depth", depth}, {"count", vals.size()}, {"values", arr}};
            return finish(ExitOk, text.str());
        }

        if (*class_cmd) {
            const SuperQuiver q = parse_quiver(c_in.text());
            ClassOptions opt;
            opt.labeled = labeled;
            opt.cap = cap;
            const MutClassReport rep = finite_type_verdict(q, opt);
            text << "verdict: " << to_string(rep.verdict);
            if (rep.verdict == Verdict::Finite)
                text << " (" << rep.size << (labeled ? " labeled quivers" : " quivers up to isomorphism") << ")";
            text << '\n';
            if (!rep.reason.empty())
                text << "reason: " << rep.reason << '\n';
            if (rep.witness)
                text << "witness:\n" << format_quiver(*rep.witness);
            env.payload = {{"verdict", to_string(rep.verdict)},
                           {"size", rep.size},
                           {"labeled", labeled},
                           {"reason", rep.reason}};
            if (rep.witness)
                env.payload["witness"] = format_quiver(*rep.witness);
            if (check_bound) {
                if (rep.bound_check) {
                    const BoundCheck& b = *rep.bound_check;
                    text << "bound: " << rep.size << " <= r*s*2^n = " << b.r << '*' << b.s << "*2^" << b.n << " = "
                         << b.bound << (b.holds ? " (holds)" : " (VIOLATED)") << '\n';
                    env.payload["bound"] = {{"r", b.r}, {"s", b.s}, {"n", b.n}, {"bound", b.bound}, {"holds", b.holds}};
                } else {
                    text << "bound: not available (class not finite)\n";
                }
            }
            return finish(ExitOk, text.str());
        }

        if (*frieze_cmd) {
            if (width == 0)
                throw UsageError("--width must be at least 1");
            if (window == 0)
                throw UsageError("--window must be at least 1");
            const Superfrieze f = superfrieze_generate(width, window);
            json diags = json::array();
            for (std::size_t t = 0; t < f.diagonals.size(); ++t) {
                json even = json::array(), odd = json::array();
                for (std::size_t k = 1; k <= width; ++k) {
                    const auto v = f.even(static_cast<long>(k), t);
                    text << 'x' << k << detail::primes(t) << " = " << value_text(v) << '\n';
                    even.push_back(value_text(v));
                }
                for (std::size_t k = 1; k <= width + 1; ++k) {
                    const auto v = f.ne(static_cast<long>(k), t);
                    text << 'y' << k << detail::primes(t) << " = " << value_text(v) << '\n';
                    odd.push_back(value_text(v));
                }
                diags.push_back({{"even", even}, {"odd", odd}});
            }
            env.payload = {{"width", width}, {"window", window}, {"diagonals", diags}};
            if (check) {
                const auto bad = frieze_rule_check(f);
                json list = json::array();
                for (const auto& b : bad)
                    list.push_back({{"k", b.k}, {"t", b.t}, {"identity", b.identity}});
                env.payload["violations"] = list;
                if (bad.empty()) {
                    text << "frieze rule: OK on all diamonds\n";
                } else {
                    text << "frieze rule: " << bad.size() << " violations\n";
                    for (const auto& b : bad)
                        text << "  diamond k=" << b.k << " t=" << b.t << ": " << b.identity << '\n';
                    env.diagnostics.push_back("error: frieze rule violated");
                    return finish(ExitFailure, text.str());
                }
            }
            return finish(ExitOk, text.str());
        }

        if (*laurent_cmd) {
            const Seed s = Seed::initial(parse_quiver(l_in.text()));
            std::vector<std::string> warnings;
            const Seed r = apply_sequence(s, parse_steps(s.quiver, l_seq), SequenceMode::Algebra, &warnings);
            for (const auto& w : warnings)
                warn(w);
            const SuperFraction& v = r.value(l_vertex);
            const LaurentCertificate c = is_laurent(v);
            text << l_vertex << " = " << value_text(v) << '\n';
            env.payload = {{"vertex", l_vertex}, {"value", value_json(v)}, {"laurent", c.laurent}};
            if (c.laurent) {
                text << "Laurent: " << sp_format(*c.polynomial) << '\n';
                env.payload["polynomial"] = terms_json(*c.polynomial);
                env.payload["polynomial_text"] = sp_format(*c.polynomial);
            } else {
                text << "NotLaurent: denominator does not divide the numerator\n";
                env.payload["witness"] = sf_format(*c.witness);
            }
            return finish(ExitOk, text.str());
        }

        if (*models_list) {
            json arr = json::array();
            for (const auto& m : models::list_models()) {
                text << m.name << "  " << m.summary << '\n';
                arr.push_back({{"name", m.name}, {"summary", m.summary}});
            }
            env.payload["models"] = arr;
            return finish(ExitOk, text.str());
        }

        if (*models_show) {
            const std::string t = format_quiver(parse_quiver(models::model_text(show_name)));
            env.payload = {{"name", show_name}, {"quiver_text", t}};
            return finish(ExitOk, t);
        }

        if (*serve_cmd) {
            SessionStore store = journal.empty() ? SessionStore() : SessionStore(journal);
            Service service(store);
            HttpServer server(service, static_dir);
            const int p = server.bind(bind_host, port);
            out << "listening on http://" << bind_host << ':' << p << std::endl;
            return server.run() ? ExitOk : ExitFailure;
        }
    } catch (const UsageError& e) {
        return fail(ExitInvalid, std::string("usage: ") + e.what());
    } catch (const ParseError& e) {
        return fail(ExitInvalid, e.what());
    } catch (const InvalidQuiver& e) {
        return fail(ExitInvalid, e.what());
    } catch (const IllegalMutation& e) {
        return fail(ExitIllegal, e.what());
    } catch (const BadRequest& e) {
        return fail(ExitInvalid, e.what());
    } catch (const PreconditionError& e) {
        return fail(ExitIllegal, e.what());
    } catch (const std::exception& e) {
        return fail(ExitFailure, e.what());
    }
    return ExitOk;
}

} // namespace supercluster::app
