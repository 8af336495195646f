#include "urnsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace urnsim {

namespace {

// Best-effort line attribution: first occurrence of the quoted key.
int line_of_key(const std::string& text, const std::string& key) {
    const std::string needle = "\"" + key + "\"";
    const std::size_t pos = text.find(needle);
    if (pos == std::string::npos) return 1;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

int line_of_offset(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

struct Context {
    const std::string& text;
    const std::string& label;

    [[noreturn]] void fail_at_key(const std::string& key, const std::string& msg) const {
        std::ostringstream os;
        os << label << ":" << line_of_key(text, key) << ": " << msg;
        throw ConfigError(os.str());
    }

    void reject_unknown(const nlohmann::json& obj,
                        std::initializer_list<const char*> allowed,
                        const char* where) const {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || it.key() == a;
            if (!ok)
                fail_at_key(it.key(),
                            std::string("unknown key \"") + it.key() + "\" in " + where);
        }
    }

    double number(const nlohmann::json& obj, const char* key) const {
        if (!obj.contains(key) || !obj.at(key).is_number())
            fail_at_key(key, std::string("missing or non-numeric \"") + key + "\"");
        return obj.at(key).get<double>();
    }

    long integer(const nlohmann::json& obj, const char* key, long fallback,
                 bool required = false) const {
        if (!obj.contains(key)) {
            if (required) fail_at_key(key, std::string("missing required \"") + key + "\"");
            return fallback;
        }
        if (!obj.at(key).is_number_integer())
            fail_at_key(key, std::string("\"") + key + "\" must be an integer");
        return obj.at(key).get<long>();
    }
};

InitSpec init_from_json(const Context& ctx, const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        ctx.fail_at_key("init", "\"init\" must be an object with a string \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        ctx.reject_unknown(j, {"kind", "value"}, "init");
        return InitSpec::constant(ctx.number(j, "value"));
    }
    if (kind == "fixed") {
        ctx.reject_unknown(j, {"kind", "values"}, "init");
        if (!j.contains("values") || !j.at("values").is_array())
            ctx.fail_at_key("values", "fixed init requires a \"values\" array");
        return InitSpec::fixed(j.at("values").get<std::vector<double>>());
    }
    if (kind == "iid-uniform") {
        ctx.reject_unknown(j, {"kind"}, "init");
        return InitSpec::iid_uniform();
    }
    ctx.fail_at_key("kind", "init kind must be \"constant\", \"fixed\" or \"iid-uniform\"");
}

} // namespace

ModelParams model_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw std::invalid_argument("model: expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "n" && k != "alpha" && k != "beta" && k != "q" && k != "f" && k != "n0")
            throw std::invalid_argument("model: unknown key \"" + k + "\"");
    }
    for (const char* k : {"n", "alpha", "beta", "q"})
        if (!j.contains(k) || !j.at(k).is_number())
            throw std::invalid_argument(std::string("model: missing numeric \"") + k + "\"");
    if (!j.contains("f"))
        throw std::invalid_argument("model: missing \"f\"");
    return ModelParams(j.at("n").get<int>(), j.at("alpha").get<double>(),
                       j.at("beta").get<double>(), j.at("q").get<double>(),
                       ReinforcementFunction::from_json(j.at("f")),
                       j.value("n0", 1L));
}

nlohmann::json model_to_json(const ModelParams& p) {
    nlohmann::json j;
    j["n"] = p.n_agents;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["q"] = p.q;
    j["f"] = p.f.to_json();
    j["n0"] = p.n0;
    return j;
}

ExperimentConfig parse_config(const std::string& text, const std::string& label) {
    Context ctx{text, label};

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::ostringstream os;
        os << label << ":" << line_of_offset(text, e.byte) << ": " << e.what();
        throw ConfigError(os.str());
    }
    if (!j.is_object()) throw ConfigError(label + ":1: top level must be an object");

    ctx.reject_unknown(j,
                       {"schema_version", "model", "init", "horizon", "replications",
                        "seed", "record_every", "threads", "grid_resolution",
                        "include_unstable_middle", "zero_index", "outputs"},
                       "config");
    if (j.contains("schema_version") && j.at("schema_version") != 1)
        ctx.fail_at_key("schema_version", "unsupported schema_version");

    if (!j.contains("model")) ctx.fail_at_key("model", "missing required \"model\"");
    ModelParams model = [&] {
        try {
            return model_from_json(j.at("model"));
        } catch (const std::invalid_argument& e) {
            ctx.fail_at_key("model", e.what());
        }
    }();

    ExperimentConfig cfg(std::move(model));
    cfg.init = j.contains("init") ? init_from_json(ctx, j.at("init"))
                                  : InitSpec::constant(0.5);
    cfg.horizon = ctx.integer(j, "horizon", 0, true);
    if (cfg.horizon < 0) ctx.fail_at_key("horizon", "horizon must be >= 0");
    cfg.replications = ctx.integer(j, "replications", 1);
    if (cfg.replications < 1) ctx.fail_at_key("replications", "replications must be >= 1");

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer())
            ctx.fail_at_key("seed", "\"seed\" must be an integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    cfg.record_every = ctx.integer(j, "record_every", 0);
    cfg.threads = static_cast<int>(ctx.integer(j, "threads", 0));
    cfg.grid_resolution = static_cast<int>(ctx.integer(j, "grid_resolution", 101));
    cfg.zero_index = static_cast<int>(ctx.integer(j, "zero_index", 0));
    if (j.contains("include_unstable_middle")) {
        if (!j.at("include_unstable_middle").is_boolean())
            ctx.fail_at_key("include_unstable_middle", "must be a boolean");
        cfg.include_unstable_middle = j.at("include_unstable_middle").get<bool>();
    }
    if (j.contains("outputs")) {
        if (!j.at("outputs").is_array())
            ctx.fail_at_key("outputs", "\"outputs\" must be an array of names");
        cfg.outputs = j.at("outputs").get<std::vector<std::string>>();
    }

    if (cfg.init.kind == InitSpec::Kind::Fixed &&
        static_cast<int>(cfg.init.values.size()) != cfg.model.n_agents)
        ctx.fail_at_key("values", "fixed init length must equal model.n");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ":1: cannot open config file");
    std::ostringstream body;
    body << in.rdbuf();
    return parse_config(body.str(), path);
}

} // namespace urnsim
