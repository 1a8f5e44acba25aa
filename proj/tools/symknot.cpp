#include <CLI11.hpp>
#include <json.hpp>

#include <symknot/symknot.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace symknot;
using nlohmann::json;

namespace {

struct cli_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cli_error(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw cli_error(path + ": cannot write");
    out << text;
}

// Library errors carry no file name; add it here.
template <class F>
auto with_file(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const error& e) {
        throw cli_error(path + ": " + e.what());
    }
}

diagram load_diagram(const std::string& path) {
    std::string text = read_text(path);
    return with_file(path, [&] {
        diagram d = parse_sud(text);
        validate(d);
        return d;
    });
}

int_matrix load_matrix(const std::string& path) {
    std::string text = read_text(path);
    return with_file(path, [&] { return int_matrix::parse(text); });
}

struct common_opts {
    bool json_out = false;
    unsigned threads = 0;
};

struct compute_opts {
    std::string bracket_method = "state-sum";
    std::string partition = "brute";
    int n = 4;
    std::string d_sign = "+";
    int xi_branch = 0;
    std::string backend; // empty: exact when n = 4
    double tol = 1e-9;
    bool certify_laurent = false;

    void add(CLI::App* app, bool spin) {
        app->add_option("--bracket", bracket_method, "bracket method")
            ->check(CLI::IsMember({"state-sum", "contraction"}))
            ->capture_default_str();
        if (!spin) return;
        app->add_option("--n", n, "Potts model size")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--d-sign", d_sign, "sign of d")->check(CLI::IsMember({"+", "-"}))->capture_default_str();
        app->add_option("--xi-branch", xi_branch, "branch of xi")->check(CLI::Range(0, 3))->capture_default_str();
        app->add_option("--backend", backend, "exact (n = 4 only) or float; default exact when n = 4")
            ->check(CLI::IsMember({"exact", "float"}));
        app->add_option("--tol", tol, "tolerance of the floating backend")->check(CLI::PositiveNumber);
        app->add_option("--partition", partition, "partition function method")
            ->check(CLI::IsMember({"brute", "elimination"}))
            ->capture_default_str();
    }
};

std::uint64_t state_cap(std::uint64_t fallback) {
    const char* env = std::getenv("SYMKNOT_CAP_STATES");
    if (!env || !*env) return fallback;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (*end || v == 0) throw cli_error("SYMKNOT_CAP_STATES must be a positive integer");
    return v;
}

bracket_options bracket_opts(const common_opts& c, const compute_opts& o) {
    bracket_options b;
    b.method = o.bracket_method == "contraction" ? bracket_method::contraction : bracket_method::state_sum;
    b.state_cap = state_cap(b.state_cap);
    b.threads = c.threads;
    return b;
}

spin_model make_model(const compute_opts& o) {
    bool exact = o.backend.empty() ? o.n == 4 : o.backend == "exact";
    auto backend = exact ? spin_backend::exact : spin_backend::floating;
    return potts_model(o.n, o.d_sign == "+" ? 1 : -1, o.xi_branch, backend, o.tol);
}

partition_options partition_opts(const common_opts& c, const compute_opts& o) {
    partition_options p;
    p.method = o.partition == "elimination" ? partition_method::elimination : partition_method::brute_force;
    p.cap = state_cap(p.cap);
    p.threads = c.threads;
    return p;
}

json value_json(const spin_value& v) {
    json j{{"exact", v.exact}, {"re", v.z.real()}, {"im", v.z.imag()}};
    if (v.exact) j["value"] = v.q.str();
    return j;
}

// ---------------------------------------------------------------------------

int run_validate(const common_opts& c, const std::vector<std::string>& files) {
    int status = 0;
    json out = json::array();
    for (auto& f : files) {
        json r{{"file", f}};
        try {
            diagram d = load_diagram(f);
            auto rep = validate_symmetric_union(d);
            r["crossings"] = d.num_crossings();
            r["axis_crossings"] = d.axis_count();
            r["symmetric_union"] = rep.ok();
            json fails = json::array();
            for (auto& x : rep.failures) fails.push_back({{"check", std::string(1, x.check)}, {"message", x.message}});
            r["failures"] = fails;
            if (!rep.ok()) status = 1;
            if (!c.json_out) {
                std::cout << f << ": " << (rep.ok() ? "ok" : "not a symmetric union") << " (" << d.num_crossings()
                          << " crossings, " << d.axis_count() << " on the axis)\n";
                for (auto& x : rep.failures) std::cout << "  (" << x.check << ") " << x.message << "\n";
            }
        } catch (const cli_error& e) {
            status = 1;
            r["error"] = e.what();
            if (!c.json_out) std::cout << e.what() << "\n";
        }
        out.push_back(r);
    }
    if (c.json_out) std::cout << out.dump(2) << "\n";
    return status;
}

int run_invariant(const common_opts& c, const compute_opts& o, const std::string& which, const std::string& file) {
    diagram d = load_diagram(file);
    json j{{"file", file}, {"invariant", which}};
    std::string text;
    with_file(file, [&] {
        if (which == "jones") {
            auto v = jones(d, bracket_opts(c, o));
            text = v.str();
            j["value"] = text;
        } else if (which == "refined") {
            refined_options ro;
            ro.bracket = bracket_opts(c, o);
            ro.threads = c.threads;
            auto w = refined_W(d, ro);
            if (o.certify_laurent && !w.is_laurent()) throw not_laurent();
            text = w.str();
            j["value"] = text;
            j["laurent"] = w.is_laurent();
        } else {
            auto m = make_model(o);
            auto v = normalized_I(m, d, partition_opts(c, o));
            text = v.str();
            j["value"] = value_json(v);
            j["model"] = {{"n", o.n}, {"d_sign", o.d_sign}, {"xi_branch", o.xi_branch}, {"exact", v.exact}};
        }
        return 0;
    });
    if (c.json_out) std::cout << j.dump(2) << "\n";
    else std::cout << text << "\n";
    return 0;
}

int run_twist(int h, const std::string& partial, const std::string& in, const std::string& out) {
    diagram d = load_diagram(in);
    diagram r = with_file(in, [&] {
        if (partial.empty()) return twist(d, h);
        int t = 0, hh = 0, b = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ps(partial);
        if (!(ps >> t >> c1 >> hh >> c2 >> b) || c1 != ',' || c2 != ',' || !ps.eof())
            throw invalid_designation("--partial expects t,h,b");
        return twist_partial(d, t, hh, b);
    });
    write_text(out, serialize_sud(r));
    return 0;
}

int run_compare(const common_opts& c, const compute_opts& o, bool want_jones, bool want_refined, bool want_spin,
                const std::string& fa, const std::string& fb) {
    if (!want_jones && !want_refined && !want_spin) want_jones = want_refined = true;
    diagram a = load_diagram(fa), b = load_diagram(fb);
    bool differ = false;
    json j{{"a", fa}, {"b", fb}};
    auto report = [&](const std::string& name, bool eq, const std::string& va, const std::string& vb) {
        differ = differ || !eq;
        j[name] = {{"result", eq ? "EQUAL" : "DIFFER"}, {"a", va}, {"b", vb}};
        if (c.json_out) return;
        if (eq) std::cout << name << ": EQUAL " << va << "\n";
        else std::cout << name << ": DIFFER\n  " << fa << ": " << va << "\n  " << fb << ": " << vb << "\n";
    };
    if (want_jones) {
        auto bo = bracket_opts(c, o);
        auto ja = with_file(fa, [&] { return jones(a, bo); });
        auto jb = with_file(fb, [&] { return jones(b, bo); });
        report("jones", ja == jb, ja.str(), jb.str());
    }
    if (want_refined) {
        refined_options ro;
        ro.bracket = bracket_opts(c, o);
        ro.threads = c.threads;
        auto wa = with_file(fa, [&] { return refined_W(a, ro); });
        auto wb = with_file(fb, [&] { return refined_W(b, ro); });
        report("refined", wa == wb, wa.str(), wb.str());
    }
    if (want_spin) {
        auto m = make_model(o);
        auto po = partition_opts(c, o);
        auto ia = with_file(fa, [&] { return normalized_I(m, a, po); });
        auto ib = with_file(fb, [&] { return normalized_I(m, b, po); });
        report("spin", ia.equals(ib, o.tol), ia.str(), ib.str());
    }
    if (c.json_out) std::cout << j.dump(2) << "\n";
    return differ ? 2 : 0;
}

int run_homology(const common_opts& c, const std::string& file, unsigned fold) {
    int_matrix v = load_matrix(file);
    auto [g, order] = with_file(file, [&] { return std::make_pair(h1_branched_cover(v, fold), cover_order_by_resultant(v, fold)); });
    bool agree = g.order() == order;
    if (c.json_out) {
        json f = json::array();
        for (auto& x : g.factors) f.push_back(x.str());
        std::cout << json{{"file", file}, {"fold", fold}, {"factors", f}, {"free_rank", g.free_rank},
                          {"order", g.order().str()}, {"resultant_order", order.str()}, {"agree", agree}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << g.str() << "\n";
        std::cout << "resultant order " << order.str() << (agree ? " (agrees)" : " (DISAGREES)") << "\n";
    }
    if (!agree) throw cli_error(file + ": homology order and resultant disagree");
    return 0;
}

int run_snf(const common_opts& c, const std::string& file) {
    int_matrix m = load_matrix(file);
    auto s = with_file(file, [&] { return smith_normal_form(m); });
    if (c.json_out) {
        json d = json::array();
        for (auto& x : s.diagonal) d.push_back(x.str());
        std::cout << json{{"file", file}, {"diagonal", d}}.dump(2) << "\n";
    } else {
        std::string line;
        for (auto& x : s.diagonal) line += (line.empty() ? "" : " ") + x.str();
        std::cout << line << "\n";
    }
    return 0;
}

move_direction parse_direction(const std::string& s) {
    return s == "reverse" ? move_direction::reverse : move_direction::forward;
}

int run_moves_sites(const common_opts& c, const std::string& kind, const std::string& dir, const std::string& file) {
    diagram d = load_diagram(file);
    auto spec = parse_move_spec(kind);
    auto sites = with_file(file, [&] { return enumerate_sites(d, spec, parse_direction(dir)); });
    json a = json::array();
    for (auto& s : sites) {
        diagram r = apply_move(d, s);
        a.push_back({{"kind", spec.str()}, {"site", s.fingerprint()}, {"direction", dir}, {"crossings", r.num_crossings()}});
        if (!c.json_out) std::cout << s.fingerprint() << "  -> " << r.num_crossings() << " crossings\n";
    }
    if (c.json_out) std::cout << a.dump(2) << "\n";
    else if (sites.empty()) std::cout << "no " << dir << " " << spec.str() << " sites\n";
    return 0;
}

int run_moves_apply(const std::string& file, const std::string& kind, const std::string& site, const std::string& dir,
                    const std::string& log, bool reverse, const std::string& out) {
    diagram d = load_diagram(file);
    diagram r = d;
    if (!log.empty()) {
        json j;
        try {
            j = json::parse(read_text(log));
        } catch (const json::exception& e) {
            throw cli_error(log + ": " + e.what());
        }
        auto entries = with_file(log, [&] { return scramble_log_from_json(j); });
        r = with_file(file, [&] {
            if (reverse) {
                for (auto& e : entries)
                    if (e.inverse.site.empty()) throw parse_error("log entry without an inverse");
                return replay_inverse(d, entries);
            }
            std::vector<move_step> steps;
            for (auto& e : entries) steps.push_back(e.step);
            return replay(d, steps);
        });
    } else {
        if (kind.empty() || site.empty()) throw cli_error("moves apply needs --kind and --site, or --log");
        r = with_file(file, [&] { return apply_move(d, parse_move_spec(kind), parse_direction(dir), site); });
    }
    write_text(out, serialize_sud(r));
    return 0;
}

int run_moves_scramble(const std::string& file, const std::string& cls, int length, std::uint64_t seed, int budget,
                       const std::string& out, const std::string& log) {
    diagram d = load_diagram(file);
    auto res = with_file(file, [&] {
        return scramble(d, seed, length, cls == "weak" ? move_class::weak : move_class::symmetric, budget);
    });
    write_text(out, serialize_sud(res.result));
    std::string lj = scramble_log_json(res.log).dump(2) + "\n";
    if (!log.empty()) write_text(log, lj);
    else if (!out.empty() && out != "-") std::cout << lj;
    if (static_cast<int>(res.log.size()) < length)
        std::cerr << "note: only " << res.log.size() << " moves applicable within the crossing budget\n";
    return 0;
}

int run_moves_expand(const common_opts& c, const std::string& kind, const std::string& file, const std::string& site,
                     const std::string& dir) {
    auto spec = parse_move_spec(kind);
    move_script script;
    if (file.empty()) {
        script = expand_composite(spec).script;
    } else {
        diagram d = load_diagram(file);
        script = with_file(file, [&] { return expand_composite(d, site_from_fingerprint(spec, parse_direction(dir), site)); });
    }
    if (c.json_out) {
        std::cout << script_json(script.steps).dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < script.steps.size(); ++i)
            std::cout << i + 1 << ". " << script.steps[i].spec.str() << " " << to_string(script.steps[i].dir) << " "
                      << script.steps[i].site << "  (" << script.states[i].num_crossings() << " crossings)\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariants and moves of symmetric union diagrams"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand
    common_opts common;
    app.add_flag("--json", common.json_out, "JSON output");
    app.add_option("--threads", common.threads, "worker threads (0: all cores)");

    std::vector<std::string> files;
    auto* validate_cmd = app.add_subcommand("validate", "check diagrams and the symmetric union conditions");
    validate_cmd->add_option("files", files, "SUD files")->required()->check(CLI::ExistingFile);

    auto* inv_cmd = app.add_subcommand("invariant", "compute jones, refined or spin invariants");
    std::string which, file;
    compute_opts copts;
    inv_cmd->add_option("which", which, "jones | refined | spin")->required()->check(CLI::IsMember({"jones", "refined", "spin"}));
    inv_cmd->add_option("file", file, "SUD file")->required()->check(CLI::ExistingFile);
    copts.add(inv_cmd, true);
    inv_cmd->add_flag("--certify-laurent", copts.certify_laurent, "fail unless the refined polynomial is Laurent");

    auto* twist_cmd = app.add_subcommand("twist", "the D(h) construction");
    twist_cmd->set_help_flag("--help", "Print this help message and exit"); // -h would clash with --h
    int h = 1;
    std::string partial, out;
    twist_cmd->add_option("--h", h, "twist parameter");
    twist_cmd->add_option("--partial", partial, "t,h,b: top, middle and bottom twist counts");
    twist_cmd->add_option("file", file, "SUD file")->required()->check(CLI::ExistingFile);
    twist_cmd->add_option("-o,--output", out, "output SUD file (default stdout)");

    auto* cmp_cmd = app.add_subcommand("compare", "compare invariants of two diagrams");
    std::string fa, fb;
    bool want_jones = false, want_refined = false, want_spin = false;
    cmp_cmd->add_option("a", fa, "first SUD file")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("b", fb, "second SUD file")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_flag("--jones", want_jones, "compare Jones polynomials");
    cmp_cmd->add_flag("--refined", want_refined, "compare refined polynomials");
    cmp_cmd->add_flag("--spin", want_spin, "compare spin model invariants");
    compute_opts cmp_opts;
    cmp_opts.add(cmp_cmd, true);

    auto* hom_cmd = app.add_subcommand("homology", "H1 of the k-fold branched cover from a Seifert matrix");
    std::string seifert;
    unsigned fold = 3;
    hom_cmd->add_option("--seifert", seifert, "Seifert matrix file")->required()->check(CLI::ExistingFile);
    hom_cmd->add_option("--fold", fold, "cover degree")->check(CLI::Range(1u, 1000u))->capture_default_str();

    auto* snf_cmd = app.add_subcommand("snf", "Smith normal form of an integer matrix");
    snf_cmd->add_option("file", file, "matrix file")->required()->check(CLI::ExistingFile);

    auto* moves_cmd = app.add_subcommand("moves", "symmetric move rewriting");
    moves_cmd->require_subcommand(1);
    std::string kind, site, dir = "forward", log, cls = "weak";
    bool reverse_log = false;
    int length = 5, budget = 40;
    std::uint64_t seed = 1;
    auto dir_check = CLI::IsMember({"forward", "reverse"});

    auto* sites_cmd = moves_cmd->add_subcommand("sites", "list the sites of a move");
    sites_cmd->add_option("--kind", kind, "move, e.g. S3 or S4mn(2,1)")->required();
    sites_cmd->add_option("--direction", dir, "forward or reverse")->check(dir_check)->capture_default_str();
    sites_cmd->add_option("file", file, "SUD file")->required()->check(CLI::ExistingFile);

    auto* apply_cmd = moves_cmd->add_subcommand("apply", "apply a move at a site, or replay a log");
    apply_cmd->add_option("--kind", kind, "move kind");
    apply_cmd->add_option("--site", site, "site fingerprint");
    apply_cmd->add_option("--direction", dir, "forward or reverse")->check(dir_check)->capture_default_str();
    apply_cmd->add_option("--log", log, "JSON move log to replay")->check(CLI::ExistingFile);
    apply_cmd->add_flag("--reverse", reverse_log, "replay the log backwards through the inverse moves");
    apply_cmd->add_option("file", file, "SUD file")->required()->check(CLI::ExistingFile);
    apply_cmd->add_option("-o,--output", out, "output SUD file (default stdout)");

    auto* scr_cmd = moves_cmd->add_subcommand("scramble", "apply random moves of a class");
    scr_cmd->add_option("--class", cls, "symmetric or weak")->check(CLI::IsMember({"symmetric", "weak"}))->capture_default_str();
    scr_cmd->add_option("--length", length, "number of moves")->check(CLI::NonNegativeNumber)->capture_default_str();
    scr_cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    scr_cmd->add_option("--budget", budget, "crossing budget")->check(CLI::PositiveNumber)->capture_default_str();
    scr_cmd->add_option("file", file, "SUD file")->required()->check(CLI::ExistingFile);
    scr_cmd->add_option("-o,--output", out, "output SUD file (default stdout)");
    scr_cmd->add_option("--log", log, "write the move log here");

    auto* exp_cmd = moves_cmd->add_subcommand("expand", "decompose a composite move into elementary moves");
    exp_cmd->add_option("--kind", kind, "S4mn(m,n) or S2pmn(sign,n)")->required();
    exp_cmd->add_option("--site", site, "site fingerprint in the given file");
    exp_cmd->add_option("--direction", dir, "forward or reverse")->check(dir_check)->capture_default_str();
    exp_cmd->add_option("file", file, "SUD file (default: the move's own closure)")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*validate_cmd) return run_validate(common, files);
        if (*inv_cmd) return run_invariant(common, copts, which, file);
        if (*twist_cmd) return run_twist(h, partial, file, out);
        if (*cmp_cmd) return run_compare(common, cmp_opts, want_jones, want_refined, want_spin, fa, fb);
        if (*hom_cmd) return run_homology(common, seifert, fold);
        if (*snf_cmd) return run_snf(common, file);
        if (*sites_cmd) return run_moves_sites(common, kind, dir, file);
        if (*apply_cmd) return run_moves_apply(file, kind, site, dir, log, reverse_log, out);
        if (*scr_cmd) return run_moves_scramble(file, cls, length, seed, budget, out, log);
        if (*exp_cmd) {
            if (!file.empty() && site.empty()) throw cli_error("moves expand on a file needs --site");
            return run_moves_expand(common, kind, file, site, dir);
        }
    } catch (const cli_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
