#include "odo/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "odo/bratteli.hpp"
#include "odo/cocycles.hpp"
#include "odo/config.hpp"
#include "odo/seqbuild.hpp"
#include "odo/spectrum.hpp"
#include "odo/words.hpp"

namespace odo {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

std::string out_path(const json& cfg, const std::string& name) {
    std::string dir = ".";
    std::string prefix = "odolab";
    if (cfg.contains("output")) {
        dir = cfg["output"].value("dir", dir);
        prefix = cfg["output"].value("prefix", prefix);
    }
    std::filesystem::create_directories(dir);
    return dir + "/" + prefix + "_" + name;
}

void write_text(RunResult& res, const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);  // LF line endings, verbatim
    if (!out) throw Error("cannot write " + path);
    out << text;
    res.files.push_back(path);
}

ordered_json envelope(const json& cfg) {
    ordered_json env;
    env["tool"] = "odolab";
    env["version"] = kVersion;
    env["command"] = cfg["command"];
    env["config_hash"] = config_hash(cfg);
    if (cfg.contains("params") && cfg["params"].contains("seed"))
        env["seed"] = cfg["params"]["seed"];
    env["precision_bits"] = cfg.value("precision_bits", 128);
    // the one nondeterministic field, kept isolated on its own line
    env["timestamp"] =
        std::to_string(std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count());
    return env;
}

void write_report(RunResult& res, const json& cfg, const std::string& name,
                  ordered_json body) {
    ordered_json env = envelope(cfg);
    env["report"] = std::move(body);
    write_text(res, out_path(cfg, name + ".json"), env.dump(2) + "\n");
}

json params_of(const json& cfg) {
    return cfg.contains("params") ? cfg["params"] : json::object();
}

ordered_json rat_json(const BigRat& r) { return r.get_str(); }

Partition partition_from(const OdomutantSystem& sys, const json& params) {
    std::size_t l = params.value("level", std::size_t{1});
    std::string kind = params.value("partition", "auto");
    if (kind == "plain") return Partition::plain(l);
    if (kind == "auto") return default_partition(sys, l);
    if (kind == "collapsed") {
        const auto* m = sys.family().multiplicity_structure();
        if (!m) throw ConfigError("collapsed partition needs a multiplicity family");
        return Partition::block_collapsed(l, m->blocks(sys.space(), l - 1));
    }
    throw ConfigError("partition must be auto|plain|collapsed");
}

void run_validate(RunResult& res, const json& cfg) {
    auto sys = system_from_config(cfg);
    auto params = params_of(cfg);
    std::size_t levels = params.value("levels", std::size_t{8});
    auto rep = validate_family(sys.space(), sys.family(), levels,
                               params.value("expect_fixes_zero", false),
                               params.value("expect_fixes_max", false),
                               params.value("expect_distinct", false));
    ordered_json body;
    body["ok"] = rep.ok;
    body["fixes_zero"] = sys.family().fixes_zero();
    body["fixes_max"] = sys.family().fixes_max();
    body["extends_to_homeomorphism"] = sys.extends_to_homeomorphism();
    body["fixed_point_counts"] = rep.fixed_point_counts;
    body["fixed_point_density"] = ordered_json::array();
    for (auto& d : rep.fixed_point_density) body["fixed_point_density"].push_back(rat_json(d));
    body["violations"] = ordered_json::array();
    for (auto& c : rep.checks)
        if (!c.ok)
            body["violations"].push_back(
                {{"what", c.what}, {"level", c.level}, {"index", c.index}});
    write_report(res, cfg, "validate", std::move(body));
    res.summary = rep.ok ? "family valid" : "family INVALID";
}

void run_orbit(RunResult& res, const json& cfg) {
    auto sys = system_from_config(cfg);
    auto params = params_of(cfg);
    Point p = point_from_json(sys.space(), params.value("point", json{{"tail", "min"}}));
    long steps = params.value("steps", 32L);
    std::string csv = "k";
    std::size_t width = std::max<std::size_t>(p.digits.size(), 8);
    for (std::size_t i = 0; i < width; ++i) csv += ",d" + std::to_string(i);
    csv += "\n";
    Point cur = p;
    for (long k = 0; k <= steps; ++k) {
        csv += std::to_string(k);
        for (std::size_t i = 0; i < width; ++i) {
            csv += ",";
            try {
                csv += std::to_string(digit_at(sys.space(), cur, i));
            } catch (const UndeterminedError&) {
                csv += "?";
            }
        }
        csv += "\n";
        if (k < steps) cur = apply_T(sys, cur);
    }
    write_text(res, out_path(cfg, "orbit.csv"), csv);
    ordered_json body;
    body["steps"] = steps;
    if (params.contains("return_cylinder")) {
        auto c = Cylinder::of_prefix(sys.space(),
                                     params["return_cylinder"].get<std::vector<digit_t>>());
        long long cap = params.value("return_cap", 100000LL);
        auto r = first_return(sys, p, c, cap);
        body["first_return"] = r ? ordered_json(*r) : ordered_json("exhausted");
    }
    write_report(res, cfg, "orbit", std::move(body));
    res.summary = "orbit emitted";
}

void run_cocycles(RunResult& res, const json& cfg) {
    auto sys = system_from_config(cfg);
    auto params = params_of(cfg);
    std::size_t samples = params.value("samples", std::size_t{1000});
    std::size_t prefix = params.value("prefix", std::size_t{24});
    std::uint64_t seed = params.at("seed").get<std::uint64_t>();
    unsigned threads = cfg.value("threads", 1u);
    auto ver = verify_orbit_equivalence(sys, samples, seed, prefix, threads);
    // no report leaves the building when a defining identity failed
    if (ver.failures) {
        std::string what = "orbit-equivalence identity failed on a sample";
        if (!ver.failure_details.empty()) what += ": " + ver.failure_details.front();
        throw InternalError(what);
    }
    auto stats = cocycle_stats(sys, samples, prefix, seed);

    std::string csv = "value,count\n";
    for (auto& [v, c] : stats.histogram) csv += v.get_str() + "," + std::to_string(c) + "\n";
    write_text(res, out_path(cfg, "histogram.csv"), csv);

    ordered_json body;
    body["samples"] = ver.samples;
    body["verified"] = ver.verified;
    body["undetermined"] = ver.undetermined;
    body["failures"] = ver.failures;
    body["cocycle_bound_violated"] = ver.bound_violated;
    body["max_abs_cT"] = stats.max_abs.get_str();
    body["empirical_log_mean"] = stats.empirical_phi_mean;
    body["empirical_value_entropy_estimate"] = stats.empirical_entropy;
    body["level_bands"] = ordered_json::array();
    for (auto& b : stats.bands)
        body["level_bands"].push_back({{"n", b.n},
                                       {"expected", b.expected},
                                       {"observed", b.observed},
                                       {"sigma", b.sigma},
                                       {"within_3_sigma", b.within_3_sigma}});
    write_report(res, cfg, "cocycles", std::move(body));
    res.summary = "orbit equivalence verified";
}

PhiMap phi_from_json(const json& j) {
    std::string kind = j.value("kind", "log");
    if (kind == "log") return PhiMap::log();
    if (kind == "linear") return PhiMap::linear();
    if (kind == "power") return PhiMap::power(rat_from_json(j.at("p")));
    if (kind == "log_quotient") return PhiMap::log_quotient(j.value("m", 1u));
    throw ConfigError("phi kind must be log|linear|power|log_quotient");
}

std::string series_csv(const SeriesReport& rep) {
    std::string csv = "n,term,partial_sum\n";
    for (auto& row : rep.rows)
        csv += std::to_string(row.n) + "," + row.term_str + "," + row.partial_str + "\n";
    return csv;
}

void run_series(RunResult& res, const json& cfg) {
    auto params = params_of(cfg);
    std::string which = params.value("which", "C1");
    PhiMap phi = phi_from_json(params.value("phi", json{{"kind", "log"}}));
    std::size_t n_max = params.value("n_max", std::size_t{16});
    mpfr_prec_t prec = cfg.value("precision_bits", 128);
    ordered_json body;
    body["phi"] = phi.describe();
    if (which == "C1") {
        auto space = cfg.contains("family") && cfg["family"].value("preset", "") == "feldman"
                         ? system_from_config(cfg).space()
                         : space_from_config(cfg);
        auto rep = phi_series_C1(space, phi, n_max, prec);
        write_text(res, out_path(cfg, "series_c1.csv"), series_csv(rep));
        body["which"] = "C1";
        body["monotone"] = rep.monotone;
        body["last_term"] = rep.rows.back().term_str;
        body["last_partial"] = rep.rows.back().partial_str;
        body["note"] = rep.note;
    } else if (which == "C2") {
        auto sys = system_from_config(cfg);
        auto pair = phi_series_C2(sys, phi, n_max, prec);
        write_text(res, out_path(cfg, "series_c2_first.csv"), series_csv(pair.first));
        write_text(res, out_path(cfg, "series_c2_second.csv"), series_csv(pair.second));
        body["which"] = "C2";
        body["first_last_partial"] = pair.first.rows.back().partial_str;
        body["second_last_partial"] = pair.second.rows.back().partial_str;
        body["note"] = pair.first.note;
    } else {
        throw ConfigError("series which must be C1|C2");
    }
    write_report(res, cfg, "series", std::move(body));
    res.summary = "series emitted";
}

void run_words(RunResult& res, const json& cfg) {
    auto sys = system_from_config(cfg);
    auto params = params_of(cfg);
    auto part = partition_from(sys, params);
    std::size_t n = params.value("n", part.level());
    std::string method = params.value("method", "brute");
    std::uint64_t budget = params.value("budget", std::uint64_t{1} << 27);
    auto r = count_words(sys, part, n,
                         method == "brute" ? CountMethod::Brute : CountMethod::Recursion,
                         budget);
    ordered_json body;
    body["level"] = r.level;
    body["n"] = n;
    body["method"] = method;
    body["count"] = r.count;
    body["exact"] = r.exact;
    body["log_count_over_h"] = r.log_count_over_h;
    body["lower_bound"] = r.lower_bound.get_str();
    body["upper_bound"] = r.upper_bound.get_str();
    if (params.value("dump_words", false)) {
        auto words = tower_words(sys, part, n, budget);
        std::string csv = "x_n,word\n";
        for (std::size_t x = 0; x < words.size(); ++x) {
            csv += std::to_string(x) + ",";
            for (std::size_t k = 0; k < words[x].size(); ++k) {
                if (k) csv += " ";
                csv += std::to_string(words[x][k]);
            }
            csv += "\n";
        }
        write_text(res, out_path(cfg, "tower_words.csv"), csv);
    }
    write_report(res, cfg, "words", std::move(body));
    res.summary = "count = " + std::to_string(r.count);
}

void run_entropy(RunResult& res, const json& cfg) {
    auto sys = system_from_config(cfg);
    auto params = params_of(cfg);
    std::size_t l = params.value("level", std::size_t{1});
    std::vector<std::size_t> ns = params.value("n_list", std::vector<std::size_t>{});
    std::string method = params.value("method", "brute");
    auto t = entropy_estimate(sys, l, ns,
                              method == "brute" ? CountMethod::Brute : CountMethod::Recursion,
                              params.value("budget", std::uint64_t{1} << 27));
    std::string csv = "n,count,estimate,target,upper_estimate\n";
    ordered_json rows = ordered_json::array();
    for (auto& row : t.rows) {
        csv += std::to_string(row.n) + "," + std::to_string(row.words.count) + "," +
               std::to_string(row.estimate) + "," + std::to_string(row.target) + "," +
               std::to_string(row.upper_estimate) + "\n";
        rows.push_back({{"n", row.n},
                        {"count", row.words.count},
                        {"estimate", row.estimate},
                        {"target", row.target},
                        {"upper_estimate", row.upper_estimate}});
    }
    write_text(res, out_path(cfg, "entropy.csv"), csv);
    ordered_json body;
    body["level"] = l;
    body["target_decreasing"] = t.target_decreasing;
    body["rows"] = std::move(rows);
    write_report(res, cfg, "entropy", std::move(body));
    res.summary = "entropy table emitted";
}

void run_fmetric(RunResult& res, const json& cfg) {
    auto sys = system_from_config(cfg);
    auto params = params_of(cfg);
    auto part = partition_from(sys, params);
    std::size_t n = params.value("n", part.level());
    auto words = tower_words(sys, part, n, params.value("budget", std::uint64_t{1} << 26));
    // distinct words, stable order
    std::vector<Word> distinct;
    for (auto& w : words)
        if (std::find(distinct.begin(), distinct.end(), w) == distinct.end())
            distinct.push_back(w);
    std::string csv = "i,j,f\n";
    BigRat maxf(0);
    for (std::size_t i = 0; i < distinct.size(); ++i)
        for (std::size_t j = i + 1; j < distinct.size(); ++j) {
            BigRat f = f_metric(distinct[i], distinct[j]);
            if (f > maxf) maxf = f;
            csv += std::to_string(i) + "," + std::to_string(j) + "," + f.get_str() + "\n";
        }
    write_text(res, out_path(cfg, "fmatrix.csv"), csv);
    ordered_json body;
    body["distinct_words"] = distinct.size();
    body["max_pairwise_f"] = rat_json(maxf);
    write_report(res, cfg, "fmetric", std::move(body));
    res.summary = "f-matrix emitted";
}

void run_lb0(RunResult& res, const json& cfg) {
    auto sys = system_from_config(cfg);
    auto params = params_of(cfg);
    auto part = partition_from(sys, params);
    std::size_t N = params.at("N").get<std::size_t>();
    BigRat eps = rat_from_json(params.at("epsilon"));
    auto rep = lb0_report(sys, part, N, eps, params.value("budget", std::uint64_t{1} << 20));
    ordered_json body;
    body["N"] = rep.N;
    body["epsilon"] = rat_json(rep.epsilon);
    body["distinct_words"] = rep.distinct_words;
    body["resolved_mass"] = rat_json(rep.resolved_mass);
    body["unresolved_mass"] = rat_json(rep.unresolved_mass);
    body["global_max_f"] = rat_json(rep.global_max_f);
    body["best_coverage"] = rat_json(rep.best_coverage);
    body["partial"] = rep.partial;
    body["clusters"] = ordered_json::array();
    for (auto& cl : rep.clusters)
        body["clusters"].push_back({{"words", cl.words},
                                    {"mass", rat_json(cl.mass)},
                                    {"max_inside_f", rat_json(cl.max_inside_f)}});
    write_report(res, cfg, "lb0", std::move(body));
    res.summary = "lb0 report emitted";
}

void run_builder(RunResult& res, const json& cfg) {
    auto params = params_of(cfg);
    std::string which = params.at("which").get<std::string>();
    mpfr_prec_t prec = cfg.value("precision_bits", 256);
    ordered_json body;
    body["which"] = which;
    if (which == "choiceqn") {
        SupernaturalSpec spec;
        spec.p_star = BigInt(params.at("p_star").get<long>());
        for (auto& p : params.value("finite_primes", std::vector<long>{}))
            spec.finite_primes.push_back(BigInt(p));
        auto r = build_choiceqn(rat_from_json(params.at("alpha")), spec,
                                params.value("depth", std::size_t{2}), prec);
        body["K"] = r.K.get_str();
        body["all_certified"] = r.all_certified;
        body["levels"] = ordered_json::array();
        for (auto& lvl : r.levels) {
            ordered_json jl;
            jl["i_n"] = lvl.i_n.get_str();
            jl["j_n"] = lvl.j_n;
            jl["q_factored"] = ordered_json::array();
            for (auto& [p, e] : lvl.q.factors())
                jl["q_factored"].push_back({p.get_str(), e.get_str()});
            jl["checks"] = ordered_json::array();
            for (auto& c : lvl.checks)
                jl["checks"].push_back(
                    {{"what", c.what}, {"decided", c.cert.decided}, {"holds", c.cert.holds}});
            body["levels"].push_back(std::move(jl));
        }
    } else if (which == "infinite_entropy") {
        auto primes = params.value("finite_primes", std::vector<long>{});
        std::vector<BigInt> ps(primes.begin(), primes.end());
        auto r = build_infinite_entropy(BigInt(params.at("p_star").get<long>()), ps,
                                        params.value("depth", std::size_t{2}),
                                        params.value("factorial_budget", 200000ul));
        body["log_kappa_bound_ok"] = r.log_kappa_bound_ok;
        body["levels"] = ordered_json::array();
        for (auto& lvl : r.levels)
            body["levels"].push_back({{"c", lvl.c.get_str()},
                                      {"qtilde", lvl.qtilde.get_str()},
                                      {"q", lvl.q.get_str()},
                                      {"kappa", lvl.kappa.get_str()},
                                      {"chi", lvl.chi.get_str()},
                                      {"j", lvl.j},
                                      {"h", lvl.h.get_str()}});
    } else if (which == "summable") {
        auto space = space_from_config(cfg);
        auto r = check_summable(space, params.value("m", 0u), rat_from_json(params.at("beta")),
                                params.value("n_lo", std::size_t{0}),
                                params.value("n_hi", std::size_t{4}), prec);
        body["any_failure"] = r.any_failure;
        body["any_undecided"] = r.any_undecided;
        body["first_bad"] = r.first_bad;
        body["rows"] = ordered_json::array();
        for (auto& row : r.rows)
            body["rows"].push_back({{"n", row.n},
                                    {"precondition_decided", row.precondition.decided},
                                    {"precondition_holds", row.precondition.holds},
                                    {"inequality_decided", row.inequality.decided},
                                    {"inequality_holds", row.inequality.holds}});
    } else if (which == "powerK") {
        auto r = check_powerK(BigInt(params.at("p").get<long>()),
                              params.at("qtilde").get<digit_t>(), params.at("c").get<digit_t>(),
                              prec);
        body["lhs"] = r.lhs.get_str();
        body["lhs_exponent"] = r.lhs_exponent.get_str();
        body["rhs_upper"] = r.rhs;
        body["ok"] = r.ok;
    } else if (which == "feldman_exponents") {
        std::size_t n_max = params.value("n_max", std::size_t{50});
        auto s = feldman_exponents(n_max);
        body["S"] = ordered_json::array();
        for (auto& v : s) body["S"].push_back(v.get_str());
    } else {
        throw ConfigError("builder which must be one of "
                          "choiceqn|infinite_entropy|summable|powerK|feldman_exponents");
    }
    write_report(res, cfg, "builder", std::move(body));
    res.summary = "builder output emitted";
}

void run_bratteli(RunResult& res, const json& cfg) {
    auto params = params_of(cfg);
    std::size_t depth = params.value("depth", std::size_t{5});
    std::string kind = params.value("diagram", "odomutant");
    BratteliDiagram d = [&] {
        if (kind == "odometer") return odometer_diagram(space_from_config(cfg), depth);
        if (kind == "odomutant") return from_odomutant(system_from_config(cfg), depth);
        throw ConfigError("diagram must be odometer|odomutant");
    }();
    if (params.contains("split"))
        d = split_multiplicities(d, params["split"].get<std::vector<digit_t>>());
    write_text(res, out_path(cfg, "diagram.dot"), to_dot(d));
    write_text(res, out_path(cfg, "diagram.json"), to_json(d));
    auto ms = incidence_matrices(d, depth);
    std::string csv = "level,i,j,count\n";
    for (std::size_t k = 0; k < ms.size(); ++k)
        for (std::size_t i = 0; i < ms[k].size(); ++i)
            for (std::size_t j = 0; j < ms[k][i].size(); ++j)
                csv += std::to_string(k) + "," + std::to_string(i) + "," + std::to_string(j) +
                       "," + ms[k][i][j].get_str() + "\n";
    write_text(res, out_path(cfg, "incidence.csv"), csv);
    ordered_json body;
    body["depth"] = depth;
    body["properly_ordered_probe"] =
        properly_ordered(d, depth >= 2 ? depth - 2 : 0);
    write_report(res, cfg, "bratteli", std::move(body));
    res.summary = "diagram emitted";
}

void run_spectrum(RunResult& res, const json& cfg) {
    auto params = params_of(cfg);
    std::string which = params.value("which", "eigen");
    ordered_json body;
    body["which"] = which;
    if (which == "eigen") {
        auto space = space_from_config(cfg);
        auto r = check_eigen_relation(space, params.value("n", std::size_t{2}),
                                      params.value("samples", std::size_t{1000}),
                                      params.at("seed").get<std::uint64_t>(),
                                      params.value("prefix", std::size_t{16}));
        if (r.failures) throw InternalError("eigen relation failed");
        body["samples"] = r.samples;
        body["checked"] = r.checked;
        body["undetermined"] = r.undetermined;
        body["failures"] = r.failures;
    } else if (which == "pullback") {
        auto sys = system_from_config(cfg);
        auto r = check_pullback(sys, params.value("n", std::size_t{2}),
                                params.value("samples", std::size_t{1000}),
                                params.at("seed").get<std::uint64_t>(),
                                params.value("prefix", std::size_t{16}));
        if (r.failures) throw InternalError("pullback relation failed");
        body["samples"] = r.samples;
        body["checked"] = r.checked;
        body["undetermined"] = r.undetermined;
        body["failures"] = r.failures;
    } else if (which == "complex") {
        auto r = lemma_complex_check(rat_from_json(params.at("tau")),
                                     rat_from_json(params.at("epsilon")),
                                     params.value("j_lo", 0LL), params.value("j_hi", 1000LL),
                                     cfg.value("precision_bits", 128));
        body["count"] = r.count;
        body["undecided"] = r.undecided;
        body["bound"] = r.bound;
        body["theta"] = r.theta;
        body["ok"] = r.ok;
    } else if (which == "fixed_points") {
        auto sys = system_from_config(cfg);
        auto r = fixed_point_series(sys.space(), sys.family(),
                                    params.value("n_max", std::size_t{16}));
        std::string csv = "n,count,density,partial_sum\n";
        for (std::size_t n = 0; n < r.counts.size(); ++n)
            csv += std::to_string(n) + "," + std::to_string(r.counts[n]) + "," +
                   r.densities[n].get_str() + "," + r.partials[n].get_str() + "\n";
        write_text(res, out_path(cfg, "fixed_points.csv"), csv);
        body["levels"] = r.counts.size();
        if (!r.partials.empty()) body["last_partial"] = rat_json(r.partials.back());
    } else {
        throw ConfigError("spectrum which must be eigen|pullback|complex|fixed_points");
    }
    write_report(res, cfg, "spectrum", std::move(body));
    res.summary = "spectrum report emitted";
}

}  // namespace

RunResult run_config(const nlohmann::json& cfg) {
    validate_config(cfg);
    RunResult res;
    std::string cmd = cfg["command"].get<std::string>();
    if (cmd == "validate")
        run_validate(res, cfg);
    else if (cmd == "orbit")
        run_orbit(res, cfg);
    else if (cmd == "cocycles")
        run_cocycles(res, cfg);
    else if (cmd == "series")
        run_series(res, cfg);
    else if (cmd == "words")
        run_words(res, cfg);
    else if (cmd == "entropy")
        run_entropy(res, cfg);
    else if (cmd == "fmetric")
        run_fmetric(res, cfg);
    else if (cmd == "lb0")
        run_lb0(res, cfg);
    else if (cmd == "builder")
        run_builder(res, cfg);
    else if (cmd == "bratteli")
        run_bratteli(res, cfg);
    else if (cmd == "spectrum")
        run_spectrum(res, cfg);
    else
        throw ConfigError("unknown command " + cmd);
    return res;
}

}  // namespace odo
