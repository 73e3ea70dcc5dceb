#include "odo/config.hpp"

#include <fstream>
#include <set>

#include "odo/family.hpp"

namespace odo {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& known) {
    if (!obj.is_object()) throw ConfigError(path + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + path);
}

const std::set<std::string> kCommands{"validate", "orbit",   "cocycles", "series",
                                      "words",    "entropy", "fmetric",  "lb0",
                                      "builder",  "bratteli", "spectrum"};

}  // namespace

void validate_config(const nlohmann::json& cfg) {
    require_keys(cfg, "config",
                 {"command", "space", "family", "params", "output", "precision_bits",
                  "threads"});
    if (!cfg.contains("command") || !cfg["command"].is_string())
        throw ConfigError("config needs a string 'command'");
    std::string cmd = cfg["command"].get<std::string>();
    if (!kCommands.count(cmd)) throw ConfigError("unknown command '" + cmd + "'");
    if (cfg.contains("space"))
        require_keys(cfg["space"], "space", {"kind", "q", "factors", "levels"});
    if (cfg.contains("family"))
        require_keys(cfg["family"], "family",
                     {"preset", "seed", "levels", "distinct", "qtilde", "table_file",
                      "word_levels"});
    if (cfg.contains("output")) require_keys(cfg["output"], "output", {"dir", "prefix"});
    if (cfg.contains("precision_bits")) {
        long b = cfg["precision_bits"].get<long>();
        if (b < 16 || b > 1 << 20) throw ConfigError("precision_bits out of range");
    }
    if (cfg.contains("threads")) {
        long t = cfg["threads"].get<long>();
        if (t < 1 || t > 1024) throw ConfigError("threads out of range");
    }
    // stochastic commands need an explicit seed (no wall-clock defaults)
    bool stochastic = (cmd == "cocycles" || cmd == "spectrum");
    if (cmd == "spectrum" && cfg.contains("params") && cfg["params"].contains("which")) {
        std::string w = cfg["params"]["which"].get<std::string>();
        stochastic = (w == "eigen" || w == "pullback");
    }
    if (stochastic) {
        bool has_seed = cfg.contains("params") && cfg["params"].is_object() &&
                        cfg["params"].contains("seed");
        if (!has_seed) throw ConfigError("command '" + cmd + "' requires params.seed");
    }
}

std::string config_hash(const nlohmann::json& cfg) {
    // nlohmann::json orders object keys, so dump() is canonical
    std::string s = cfg.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

BaseSequence space_from_config(const nlohmann::json& cfg) {
    if (!cfg.contains("space")) throw ConfigError("config needs a 'space' section");
    const auto& sp = cfg["space"];
    std::string kind = sp.value("kind", "explicit");
    if (kind == "explicit" || kind == "cyclic") {
        if (!sp.contains("q")) throw ConfigError("space needs 'q'");
        std::vector<digit_t> qs = sp["q"].get<std::vector<digit_t>>();
        return kind == "explicit" ? BaseSequence::explicit_list(qs) : BaseSequence::cyclic(qs);
    }
    if (kind == "factored") {
        if (!sp.contains("factors")) throw ConfigError("factored space needs 'factors'");
        std::vector<FactoredInt> qs;
        for (const auto& level : sp["factors"]) {
            FactoredInt f;
            for (const auto& pe : level) {
                if (!pe.is_array() || pe.size() != 2)
                    throw ConfigError("factor entries are [prime, exponent-string]");
                BigInt p(pe[0].get<long>());
                BigInt e(pe[1].get<std::string>());
                f.mul_prime(p, e);
            }
            qs.push_back(f);
        }
        return BaseSequence::factored(qs);
    }
    throw ConfigError("unknown space kind '" + kind + "'");
}

namespace {

PermutationFamily tables_from_file(const BaseSequence& space, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open table file " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("multiplicity")) {
        const auto& m = j["multiplicity"];
        MultiplicityStructure ms;
        ms.c = m.at("c").get<std::vector<digit_t>>();
        ms.qt = m.at("qtilde").get<std::vector<digit_t>>();
        ms.tau = m.at("tau").get<std::vector<std::vector<std::vector<digit_t>>>>();
        return PermutationFamily::multiplicity(space, std::move(ms));
    }
    auto tables = j.at("levels").get<std::vector<std::vector<std::vector<digit_t>>>>();
    return PermutationFamily::tables(space, std::move(tables));
}

}  // namespace

OdomutantSystem system_from_config(const nlohmann::json& cfg) {
    if (!cfg.contains("family")) throw ConfigError("config needs a 'family' section");
    const auto& fam = cfg["family"];
    std::string preset = fam.value("preset", "identity");
    std::size_t levels = fam.value("levels", std::size_t{16});
    std::uint64_t seed = fam.value("seed", std::uint64_t{0});

    if (preset == "feldman") {
        digit_t qt = fam.value("qtilde", digit_t{2});
        std::size_t word_levels = fam.value("word_levels", std::size_t{2});
        FeldmanWordSystem ws([qt](std::size_t) { return qt; }, word_levels);
        return OdomutantSystem(feldman_family(ws, levels));
    }

    BaseSequence space = space_from_config(cfg);
    if (preset == "identity") return OdomutantSystem(identity_family(space));
    if (preset == "cyclic") return OdomutantSystem(cyclic_family(space));
    if (preset == "random_fixed_endpoints") {
        if (!fam.contains("seed")) throw ConfigError("random family needs family.seed");
        bool distinct = fam.value("distinct", false);
        return OdomutantSystem(random_fixed_endpoint_family(space, levels, seed, distinct));
    }
    if (preset == "entropy") {
        if (!fam.contains("seed")) throw ConfigError("entropy family needs family.seed");
        return OdomutantSystem(entropy_family(space, levels, seed));
    }
    if (preset == "tables") {
        if (!fam.contains("table_file")) throw ConfigError("tables preset needs table_file");
        return OdomutantSystem(tables_from_file(space, fam["table_file"].get<std::string>()));
    }
    throw ConfigError("unknown family preset '" + preset + "'");
}

Point point_from_json(const BaseSequence& space, const nlohmann::json& j) {
    Point p;
    if (j.contains("digits")) p.digits = j["digits"].get<std::vector<digit_t>>();
    std::string tail = j.value("tail", "unspecified");
    if (tail == "min")
        p.tail = Tail::Min;
    else if (tail == "max")
        p.tail = Tail::Max;
    else if (tail == "unspecified")
        p.tail = Tail::Unspecified;
    else
        throw ConfigError("tail must be min|max|unspecified");
    validate_point(space, p);
    return p;
}

BigRat rat_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return BigRat(j.get<long>());
    if (j.is_string()) {
        BigRat r(j.get<std::string>());
        r.canonicalize();
        return r;
    }
    throw ConfigError("rationals are integers or strings like \"49/100\"");
}

}  // namespace odo
