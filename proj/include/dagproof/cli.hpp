#ifndef DAGPROOF_CLI_HPP
#define DAGPROOF_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dagproof/assignment.hpp"
#include "dagproof/checker.hpp"
#include "dagproof/deduction.hpp"
#include "dagproof/error.hpp"
#include "dagproof/formula.hpp"
#include "dagproof/fst.hpp"
#include "dagproof/io.hpp"
#include "dagproof/prover.hpp"
#include "dagproof/transform.hpp"

namespace dagproof::cli {

inline constexpr const char* kVersion = "1.0.0";

enum Exit : int { kOk = 0, kNegative = 1, kMalformed = 2, kLimit = 3 };

namespace detail {

inline std::size_t env_cap(const char* name, std::size_t fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (const std::exception&) {
        throw InputError(std::string("environment variable ") + name + " is not a number: " + v);
    }
}

inline std::string version_text() {
    std::ostringstream os;
    os << "dagproof " << kVersion << "\n"
       << "deduction-format " << kDeductionFormatVersion << "\n"
       << "choice-format " << kChoiceFormatVersion << "\n"
       << "thread-format " << kThreadFormatVersion << "\n"
       << "tuple-format " << kTupleFormatVersion;
    return os.str();
}

/// Error raised while handling a named file; the CLI prefixes the file name.
template <class F>
auto with_file(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ResourceLimit&) {
        throw;
    } catch (const SyntaxError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline Json violations_json(const LCReport& r) {
    Json out = Json::array();
    for (const Violation& v : r.violations) {
        out.push_back({{"condition", v.condition}, {"node", v.node}, {"message", v.message}});
    }
    return out;
}

inline bool has_s(const Deduction& d) { return d.has_separation(); }

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    f << text;
}

inline std::string dump(const Deduction& d) {
    std::ostringstream os;
    write_deduction(os, d);
    return os.str();
}

inline double millis(std::chrono::steady_clock::duration d) {
    return std::chrono::duration<double, std::milli>(d).count();
}

}

/// Runs one command line. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    using detail::with_file;
    CLI::App app{"Dag-like natural deduction for implicational minimal logic", "dagproof"};
    app.set_version_flag("--version", detail::version_text());
    app.require_subcommand(1);

    std::string file, file2, formula_text, out_path, threads_out, choice_path, fst_path, emit_choice, method = "a";
    bool tuples = false, via_search = false;
    std::size_t cap = 0, max_steps = 0, max_nodes = 0, family_from = 1, family_to = 6;

    auto* check = app.add_subcommand("check", "local correctness report");
    check->add_option("dag-file", file, "deduction file or -")->required();
    check->add_flag("--tuples", tuples, "check through the tuple encoding");

    auto* provc = app.add_subcommand("prov", "provability of an S-free deduction");
    provc->add_option("dag-file", file)->required();
    provc->add_option("--method", method)->check(CLI::IsMember({"a", "reach", "threads"}));
    provc->add_option("--cap", cap, "thread enumeration cap");

    auto* search = app.add_subcommand("search", "certificate search over S-edges");
    search->add_option("dag-file", file)->required();
    search->add_option("--emit-choice", emit_choice, "write the certificate here");
    search->add_option("--max-steps", max_steps);

    auto* provec = app.add_subcommand("prove", "tree proof of a formula");
    provec->add_option("formula", formula_text)->required();
    provec->add_option("--out", out_path, "deduction file; metadata goes to FILE.meta.json");
    provec->add_option("--max-steps", max_steps);
    provec->add_option("--max-nodes", max_nodes);

    auto* oracle = app.add_subcommand("oracle", "validity decision");
    oracle->add_option("formula", formula_text)->required();

    auto* compressc = app.add_subcommand("compress", "horizontal compression of a tree");
    compressc->add_option("tree-file", file)->required();
    compressc->add_option("--out", out_path);
    compressc->add_option("--threads-out", threads_out);

    auto* unfoldc = app.add_subcommand("unfold", "tree unfolding of a dag");
    unfoldc->add_option("dag-file", file)->required();
    unfoldc->add_option("--cap", cap, "node cap");

    auto* cleanse = app.add_subcommand("cleanse", "eliminate S-nodes");
    cleanse->add_option("dag-file", file)->required();
    auto* opt_choice = cleanse->add_option("--choice", choice_path);
    auto* opt_fst = cleanse->add_option("--fst", fst_path);
    auto* opt_search = cleanse->add_flag("--search", via_search);
    opt_choice->excludes(opt_fst)->excludes(opt_search);
    opt_fst->excludes(opt_search);
    cleanse->add_option("--max-steps", max_steps);

    auto* encodec = app.add_subcommand("encode", "tuple encoding of an S-free deduction");
    encodec->add_option("dag-file", file)->required();

    auto* decodec = app.add_subcommand("decode", "deduction from a tuple file");
    decodec->add_option("tuple-file", file)->required();

    auto* fstc = app.add_subcommand("fst-check", "fundamental set of threads check");
    fstc->add_option("dag-file", file)->required();
    fstc->add_option("threads-file", file2)->required();

    auto* bench = app.add_subcommand("bench", "metrics over the benchmark family");
    bench->add_option("--family", family_from, "first n")->check(CLI::PositiveNumber);
    bench->add_option("--max", family_to, "last n");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kMalformed;
    }

    auto load = [&](const std::string& path) {
        return with_file(path, [&] {
            std::istringstream is(slurp(path, in));
            return read_deduction(is);
        });
    };
    auto parse_formula = [&](const std::string& text) {
        try {
            return parse_infix(text);
        } catch (const SyntaxError& e) {
            throw InputError("formula \"" + text + "\": " + e.what());
        }
    };

    try {
        if (*check) {
            Deduction d = load(file);
            LCReport r;
            if (tuples) {
                if (detail::has_s(d)) throw InputError(file + ": tuple encoding is defined for S-free deductions only");
                r = check_tuples(encode(d));
            } else {
                r = check_local_correctness(d);
            }
            out << Json{{"ok", r.ok}, {"via", tuples ? "tuples" : "direct"}, {"violations", detail::violations_json(r)}}.dump(2)
                << '\n';
            err << file << ": " << (r.ok ? "locally correct" : "not locally correct") << '\n';
            return r.ok ? kOk : kNegative;
        }

        if (*provc) {
            Deduction d = load(file);
            auto verdict = [&](bool proving, const std::string& text) {
                out << Json{{"method", method}, {"proving", proving}, {"verdict", text}}.dump(2) << '\n';
                err << file << ": " << text << '\n';
                return proving ? kOk : kNegative;
            };
            if (detail::has_s(d)) return verdict(false, "not proving (S present; use search)");
            LCReport lc = check_local_correctness(d);
            if (!lc.ok) return verdict(false, "not proving (not locally correct)");
            bool proving = false;
            if (method == "a") {
                proving = prov(d);
            } else if (method == "reach") {
                proving = prov1(d);
            } else {
                std::size_t limit = cap ? cap : detail::env_cap("DAGPROOF_THREAD_CAP", kDefaultThreadCap);
                auto r = proves_by_threads(d, limit);
                if (r.overflow) throw ResourceLimit(file + ": more than " + std::to_string(limit) + " threads", "cap");
                proving = r.value;
            }
            return verdict(proving, proving ? "proving" : "not proving");
        }

        if (*search) {
            Deduction d = load(file);
            LCReport lc = check_local_correctness(d);
            if (!lc.ok) {
                out << Json{{"certificate", nullptr}, {"reason", "not locally correct"}}.dump(2) << '\n';
                err << file << ": not locally correct\n";
                return kNegative;
            }
            auto c = search_choice(d, max_steps);
            if (!c) {
                out << Json{{"certificate", "none"}}.dump(2) << '\n';
                err << file << ": none\n";
                return kNegative;
            }
            out << Json{{"certificate", to_json(*c)}}.dump(2) << '\n';
            if (!emit_choice.empty()) {
                std::ostringstream os;
                write_choice(os, *c);
                detail::write_file(emit_choice, os.str());
            }
            err << file << ": certificate with " << c->size() << " S-edge choice(s)\n";
            return kOk;
        }

        if (*provec) {
            Formula f = parse_formula(formula_text);
            ProverLimits limits;
            if (max_steps) limits.max_steps = max_steps;
            if (max_nodes) limits.max_nodes = max_nodes;
            auto p = prove(f, limits);
            if (!p) {
                out << Json{{"formula", print_infix(f)}, {"provable", false}}.dump(2) << '\n';
                err << print_infix(f) << ": not provable\n";
                return kNegative;
            }
            Json meta{{"formula", print_infix(f)},
                      {"height", p->stats.height},
                      {"node_count", p->stats.node_count},
                      {"distinct_formulas", p->stats.distinct_formulas},
                      {"max_formula_weight", p->stats.max_formula_weight},
                      {"search_steps", p->stats.search_steps}};
            if (out_path.empty()) {
                write_deduction(out, p->deduction);
                err << meta.dump() << '\n';
            } else {
                detail::write_file(out_path, detail::dump(p->deduction));
                detail::write_file(out_path + ".meta.json", meta.dump(2) + "\n");
                err << out_path << ": " << p->stats.node_count << " nodes\n";
            }
            return kOk;
        }

        if (*oracle) {
            Formula f = parse_formula(formula_text);
            bool valid = oracle_valid(f);
            out << Json{{"formula", print_infix(f)}, {"valid", valid}}.dump(2) << '\n';
            return valid ? kOk : kNegative;
        }

        if (*compressc) {
            Deduction t = load(file);
            Compression c = with_file(file, [&] { return compress(level(t)); });
            if (out_path.empty()) {
                write_deduction(out, c.dag);
            } else {
                detail::write_file(out_path, detail::dump(c.dag));
            }
            if (!threads_out.empty()) {
                std::ostringstream os;
                write_threads(os, c.thread_image);
                detail::write_file(threads_out, os.str());
            }
            err << file << ": " << c.dag.size() << " dag nodes, merge widths " << Json(c.merge_width).dump()
                << ", dispatch widths " << Json(c.dispatch_width).dump() << '\n';
            return kOk;
        }

        if (*unfoldc) {
            Deduction d = load(file);
            std::size_t limit = cap ? cap : detail::env_cap("DAGPROOF_UNFOLD_CAP", kDefaultUnfoldCap);
            auto u = unfold(d, limit);
            if (u.overflow) throw ResourceLimit(file + ": unfolding exceeds " + std::to_string(limit) + " nodes", "cap");
            write_deduction(out, u.value);
            err << file << ": " << u.value.size() << " tree nodes\n";
            return kOk;
        }

        if (*cleanse) {
            Deduction d = load(file);
            Deduction result;
            if (!choice_path.empty()) {
                Choice c = with_file(choice_path, [&] {
                    std::istringstream is(slurp(choice_path, in));
                    return read_choice(is);
                });
                result = with_file(choice_path, [&] { return s_eliminate(d, c); });
            } else if (!fst_path.empty()) {
                ThreadSet ts = with_file(fst_path, [&] {
                    std::istringstream is(slurp(fst_path, in));
                    return read_threads(is);
                });
                FstReport rep = with_file(fst_path, [&] { return check_fst(d, ts); });
                if (!rep.is_fst()) {
                    err << fst_path << ": not a fundamental set of threads\n";
                    return kNegative;
                }
                try {
                    result = cleanse_via_fst(d, ts).cleansed;
                } catch (const InputError& e) {
                    err << fst_path << ": " << e.what() << '\n';
                    return kNegative;
                }
            } else if (via_search) {
                auto c = search_choice(d, max_steps);
                if (!c) {
                    err << file << ": no certificate\n";
                    return kNegative;
                }
                result = s_eliminate(d, *c);
            } else {
                throw InputError("cleanse needs one of --choice, --fst, --search");
            }
            write_deduction(out, result);
            bool ok = check_local_correctness(result).ok && prov(result);
            err << file << ": cleansed to " << result.size() << " nodes, " << (ok ? "proving" : "not proving") << '\n';
            return ok ? kOk : kNegative;
        }

        if (*encodec) {
            Deduction d = load(file);
            TupleEncoding t = with_file(file, [&] { return encode(d); });
            write_tuples(out, t);
            return kOk;
        }

        if (*decodec) {
            Deduction d = with_file(file, [&] {
                std::istringstream is(slurp(file, in));
                return decode(read_tuples(is));
            });
            write_deduction(out, d);
            return kOk;
        }

        if (*fstc) {
            Deduction d = load(file);
            ThreadSet ts = with_file(file2, [&] {
                std::istringstream is(slurp(file2, in));
                return read_threads(is);
            });
            FstReport r = with_file(file2, [&] { return check_fst(d, ts); });
            Json ws = Json::array();
            for (const FstWitness& w : r.witnesses) {
                const char* kind = w.kind == FstWitness::Kind::UncoveredNode ? "uncovered-node"
                                   : w.kind == FstWitness::Kind::OpenThread  ? "open-thread"
                                                                             : "missing-premise-thread";
                Json j{{"kind", kind}, {"node", w.node}};
                if (w.kind != FstWitness::Kind::UncoveredNode) j["thread"] = w.thread;
                if (w.kind == FstWitness::Kind::MissingPremiseThread) j["premise"] = w.premise;
                ws.push_back(std::move(j));
            }
            out << Json{{"fst", r.is_fst()},
                        {"dense", r.dense},
                        {"all_closed", r.all_closed},
                        {"e_preserving", r.e_preserving},
                        {"witnesses", std::move(ws)}}
                       .dump(2)
                << '\n';
            return r.is_fst() ? kOk : kNegative;
        }

        if (*bench) {
            using clock = std::chrono::steady_clock;
            if (family_to < family_from) throw InputError("bench: --max must be at least --family");
            Json rows = Json::array();
            err << std::setw(3) << "n" << std::setw(10) << "tree" << std::setw(10) << "leveled" << std::setw(10) << "dag"
                << std::setw(6) << "S" << std::setw(10) << "cleansed" << std::setw(12) << "prove ms" << std::setw(12)
                << "compress ms" << std::setw(12) << "search ms" << '\n';
            for (std::size_t n = family_from; n <= family_to; ++n) {
                Formula f = family(n);
                auto t0 = clock::now();
                auto p = prove(f);
                auto t1 = clock::now();
                if (!p) throw Error("family(" + std::to_string(n) + ") was not proved");
                Deduction lev = level(p->deduction);
                Compression c = compress(lev);
                auto t2 = clock::now();
                auto choice = search_choice(c.dag, max_steps);
                auto t3 = clock::now();
                std::size_t s_nodes = 0;
                for (const Node& x : c.dag.nodes()) s_nodes += x.rule == Rule::S;
                Json row{{"n", n},
                         {"formula_weight", f.weight()},
                         {"tree_nodes", p->deduction.size()},
                         {"leveled_nodes", lev.size()},
                         {"dag_nodes", c.dag.size()},
                         {"s_nodes", s_nodes},
                         {"tree_width", c.tree_width},
                         {"merge_width", c.merge_width},
                         {"dispatch_width", c.dispatch_width},
                         {"cleansed_nodes", choice ? Json(s_eliminate(c.dag, *choice).size()) : Json(nullptr)},
                         {"prove_ms", detail::millis(t1 - t0)},
                         {"compress_ms", detail::millis(t2 - t1)},
                         {"search_ms", detail::millis(t3 - t2)}};
                err << std::setw(3) << n << std::setw(10) << p->deduction.size() << std::setw(10) << lev.size()
                    << std::setw(10) << c.dag.size() << std::setw(6) << s_nodes << std::setw(10)
                    << (row["cleansed_nodes"].is_null() ? std::string("-") : row["cleansed_nodes"].dump())
                    << std::setw(12) << std::fixed << std::setprecision(2) << row["prove_ms"].get<double>()
                    << std::setw(12) << row["compress_ms"].get<double>() << std::setw(12) << row["search_ms"].get<double>()
                    << '\n';
                rows.push_back(std::move(row));
            }
            out << rows.dump(2) << '\n';
            return kOk;
        }
    } catch (const ResourceLimit& e) {
        err << "resource limit: " << e.what() << '\n';
        return kLimit;
    } catch (const MissingChoice& e) {
        err << "malformed input: " << e.what() << '\n';
        return kMalformed;
    } catch (const InputError& e) {
        err << "malformed input: " << e.what() << '\n';
        return kMalformed;
    } catch (const SyntaxError& e) {
        err << "malformed input: " << e.what() << '\n';
        return kMalformed;
    }
    return kMalformed;
}

}

#endif
